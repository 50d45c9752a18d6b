use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use cbpabc::branching::DEFAULT_MAX_ATTEMPTS;
use cbpabc::io;
use cbpabc::multitype::{simulate_two_type, REFERENCE_ALPHA, REFERENCE_BETA};
use cbpabc::posterior::{
    default_grid, default_lattice, derived_posteriors, hpd_interval, ise, kde_1d, kde_2d, kl, linspace,
    regression_adjust, rmse, summarize_parameter, total_variation, DEFAULT_GRID_POINTS, HPD_LEVEL,
};
use cbpabc::{
    datasets, simulate_nonextinct, smc_abc, summarize, Adjusted, CbpModel, ConjugatePosterior, Domain,
    Error, ParameterSummary, ParticlePopulation, Prior, PriorComponent, Result, SeedTree, SmcConfig,
    SmcFailure, SummaryVector, Trajectory, TwoTypeParams, TwoTypeTreeSummary,
};

use crate::config::{ModelSpec, ObservedSpec, RunConfig};

/// Conjugate draws used for the exact HPD interval.
const CONJUGATE_DRAWS: usize = 100_000;

/// Files written under one output directory, in creation order.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<File>> {
        let path = self.dir.join(name);
        let f = File::create(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    fn write_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let mut w = self.create(name)?;
        f(&mut w)?;
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Serialize)]
struct StageRecord {
    stage: usize,
    threshold: f64,
    accepted: usize,
    attempts: u64,
    pool_size: Option<usize>,
    effective_sample_size: f64,
}

impl StageRecord {
    fn of(p: &ParticlePopulation) -> Self {
        Self {
            stage: p.stage,
            threshold: p.threshold,
            accepted: p.len(),
            attempts: p.attempts,
            pool_size: p.pool_size,
            effective_sample_size: p.effective_sample_size(),
        }
    }
}

#[derive(Debug, Serialize)]
struct CellRecord {
    cell: usize,
    label: String,
    status: String,
    stages: Vec<StageRecord>,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    command: &'a str,
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    threads: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a RunConfig>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    inputs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    stages: Vec<StageRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    cells: Vec<CellRecord>,
    warnings: Vec<String>,
    outputs: Vec<String>,
}

impl<'a> Manifest<'a> {
    fn new(command: &'a str, config: Option<&'a RunConfig>) -> Self {
        Self {
            command,
            status: "ok".into(),
            error: None,
            seed: config.map(|c| c.seed),
            threads: rayon::current_num_threads(),
            config,
            inputs: Vec::new(),
            stages: Vec::new(),
            cells: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Records `result`, writes `manifest.json` and passes `result` through.
    fn finish<T>(mut self, mut out: Outputs, result: Result<T>) -> Result<T> {
        if let Err(e) = &result {
            self.status = match e {
                Error::Budget(_) => "budget_exhausted".into(),
                _ => "failed".into(),
            };
            self.error = Some(e.to_string());
        }
        out.files.push("manifest.json".into());
        self.outputs = out.files.clone();
        let path = out.dir.join("manifest.json");
        let json = serde_json::to_string_pretty(&self).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        result
    }
}

enum Observed {
    Single(Trajectory),
    TwoType(TwoTypeTreeSummary),
}

fn simulate_truth(cfg: &RunConfig) -> Result<Observed> {
    let truth = cfg.truth.as_ref().ok_or_else(|| Error::Config("`truth` is required to simulate".into()))?;
    let mut rng = SeedTree::new(cfg.seed).stream(Domain::Simulate, 0, 0);
    match &cfg.model {
        ModelSpec::Single(m) => {
            let (off, ctl) = m.laws(truth)?;
            Ok(Observed::Single(simulate_nonextinct(&off, &ctl, m.z0, m.generations, &mut rng, DEFAULT_MAX_ATTEMPTS)?))
        }
        ModelSpec::TwoType(m) => {
            let params = TwoTypeParams::from_free(truth[0], truth[1], truth[2])?;
            for _ in 0..DEFAULT_MAX_ATTEMPTS {
                let tree = simulate_two_type(&params, m.n0, m.generations, &mut rng);
                let s = tree.summary(m.n0);
                if tree.final_z1 > 0 && s.delta > 0 {
                    return Ok(Observed::TwoType(s));
                }
            }
            Err(Error::Budget(format!("no surviving tree in {DEFAULT_MAX_ATTEMPTS} attempts")))
        }
    }
}

fn load_observed(cfg: &RunConfig) -> Result<(Observed, Option<PathBuf>)> {
    let spec = cfg.observed.clone().unwrap_or(ObservedSpec::Reference);
    match (spec, &cfg.model) {
        (ObservedSpec::Reference, ModelSpec::Single(_)) => Ok((Observed::Single(datasets::reference_trajectory()), None)),
        (ObservedSpec::Reference, ModelSpec::TwoType(_)) => Ok((Observed::TwoType(datasets::REFERENCE_TREE), None)),
        (ObservedSpec::Simulate, _) => Ok((simulate_truth(cfg)?, None)),
        (ObservedSpec::File { path }, model) => {
            let path = cfg.resolve(&path);
            let f = File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            let obs = match model {
                ModelSpec::Single(_) => Observed::Single(io::read_trajectory(f)?),
                ModelSpec::TwoType(_) => Observed::TwoType(io::read_tree_summary(f)?),
            };
            Ok((obs, Some(path)))
        }
    }
}

fn observed_summary(cfg: &RunConfig, obs: &Observed) -> Result<SummaryVector> {
    match obs {
        Observed::Single(t) => {
            if t.is_extinct() {
                return Err(Error::Config("observed trajectory is extinct".into()));
            }
            summarize(t, cfg.summary_kind())
        }
        Observed::TwoType(s) => s.statistic(),
    }
}

pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let mut out = Outputs::new(out_dir)?;
    let manifest = Manifest::new("simulate", Some(cfg));
    let result = (|| match simulate_truth(cfg)? {
        Observed::Single(t) => out.write_with("trajectory.csv", |w| io::write_trajectory(&t, w)),
        Observed::TwoType(s) => out.write_with("tree.csv", |w| io::write_tree_summary(&s, w)),
    })();
    manifest.finish(out, result)
}

fn run_smc(
    model: &ModelSpec,
    prior: &Prior,
    observed: &SummaryVector,
    config: &SmcConfig,
) -> std::result::Result<Vec<ParticlePopulation>, SmcFailure> {
    match model {
        ModelSpec::Single(m) => smc_abc(prior, m, observed, config),
        ModelSpec::TwoType(m) => smc_abc(prior, m, observed, config),
    }
}

fn adjust(
    last: &ParticlePopulation,
    observed: &SummaryVector,
    prior: &Prior,
    warnings: &mut Vec<String>,
) -> Option<Adjusted> {
    match regression_adjust(last, observed, prior) {
        Ok(a) => {
            if let Some(w) = &a.warning {
                warnings.push(format!("regression adjustment: {w}"));
            }
            Some(a)
        }
        Err(e) => {
            warnings.push(format!("regression adjustment skipped: {e}"));
            None
        }
    }
}

/// Stage-`t` population with adjusted parameters and weights.
fn adjusted_population(last: &ParticlePopulation, adj: &Adjusted) -> ParticlePopulation {
    let mut pop = last.clone();
    for ((p, params), &w) in pop.particles.iter_mut().zip(&adj.params).zip(&adj.weights) {
        p.params = params.clone();
        p.weight = w;
    }
    pop
}

fn single_type_rows(
    method: &str,
    names: &[String],
    points: &[Vec<f64>],
    weights: &[f64],
    model: &CbpModel,
    truth: Option<&[f64]>,
) -> Result<Vec<ParameterSummary>> {
    let mut rows = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let col: Vec<f64> = points.iter().map(|p| p[i]).collect();
        rows.push(summarize_parameter(method, name, &col, weights, truth.map(|t| t[i]), None)?);
    }
    let g = derived_posteriors(points, weights, model)?;
    let g_truth = truth.map(|t| model.growth(t)).transpose()?;
    for (name, col, t) in [
        ("m", &g.m, g_truth.map(|v| v.0)),
        ("tau", &g.tau, g_truth.map(|v| v.1)),
        ("tau_m", &g.tau_m, g_truth.map(|v| v.2)),
    ] {
        rows.push(summarize_parameter(method, name, col, weights, t, None)?);
    }
    Ok(rows)
}

const TWO_TYPE_NAMES: [&str; 4] = ["p0", "p1", "p2", "gamma"];

/// `(p0, p1, p2, γ)` columns of `[p0, p1, γ]` points.
fn two_type_columns(points: &[Vec<f64>]) -> [Vec<f64>; 4] {
    [
        points.iter().map(|p| p[0]).collect(),
        points.iter().map(|p| p[1]).collect(),
        points.iter().map(|p| 1.0 - p[0] - p[1]).collect(),
        points.iter().map(|p| p[2]).collect(),
    ]
}

fn two_type_truth(truth: Option<&[f64]>) -> Option<[f64; 4]> {
    truth.map(|t| [t[0], t[1], 1.0 - t[0] - t[1], t[2]])
}

fn two_type_rows(
    method: &str,
    points: &[Vec<f64>],
    weights: &[f64],
    exact: &ConjugatePosterior,
    truth: Option<&[f64]>,
) -> Result<Vec<ParameterSummary>> {
    let grid = linspace(0.0, 1.0, DEFAULT_GRID_POINTS);
    let truth = two_type_truth(truth);
    let mut rows = Vec::new();
    for (i, col) in two_type_columns(points).iter().enumerate() {
        let est = kde_1d(col, weights, &grid)?;
        let reference = cbpabc::DensityEstimate::new_1d(
            grid.clone(),
            grid.iter().map(|&x| exact.marginal_density(i, x)).collect(),
        )?;
        rows.push(summarize_parameter(
            method,
            TWO_TYPE_NAMES[i],
            col,
            weights,
            truth.map(|t| t[i]),
            Some((&est, &reference)),
        )?);
    }
    Ok(rows)
}

fn conjugate_rows(exact: &ConjugatePosterior, seed: u64, truth: Option<&[f64]>) -> Result<Vec<ParameterSummary>> {
    let mut rng = SeedTree::new(seed).stream(Domain::Replicate, 0, 0);
    let draws: Vec<[f64; 4]> = (0..CONJUGATE_DRAWS).map(|_| exact.sample(&mut rng)).collect();
    let w = vec![1.0; CONJUGATE_DRAWS];
    let (means, vars) = (exact.means(), exact.variances());
    let truth = two_type_truth(truth);
    (0..4)
        .map(|i| {
            let col: Vec<f64> = draws.iter().map(|d| d[i]).collect();
            let (hpd_lo, hpd_hi) = hpd_interval(&col, &w, HPD_LEVEL)?;
            Ok(ParameterSummary {
                method: "conjugate".into(),
                parameter: TWO_TYPE_NAMES[i].into(),
                mean: means[i],
                variance: vars[i],
                hpd_lo,
                hpd_hi,
                rmse: truth.map(|t| rmse(&col, &w, t[i])),
                ise: None,
                kl: None,
            })
        })
        .collect()
}

fn write_densities(
    out: &mut Outputs,
    suffix: &str,
    names: &[String],
    columns: &[Vec<f64>],
    weights: &[f64],
    unit_interval: bool,
    warnings: &mut Vec<String>,
) -> Result<()> {
    for (name, col) in names.iter().zip(columns) {
        let grid = if unit_interval {
            Ok(linspace(0.0, 1.0, DEFAULT_GRID_POINTS))
        } else {
            default_grid(col, weights)
        };
        match grid.and_then(|g| kde_1d(col, weights, &g)) {
            Ok(est) => out.write_with(&format!("density_{name}{suffix}.csv"), |w| io::write_density(&est, w))?,
            Err(e) => warnings.push(format!("density of {name}{suffix} skipped: {e}")),
        }
    }
    if columns.len() >= 2 {
        let joint = default_lattice(&columns[0], &columns[1], weights)
            .and_then(|(gx, gy)| kde_2d(&columns[0], &columns[1], weights, &gx, &gy));
        match joint {
            Ok(est) => out.write_with(&format!("density_joint{suffix}.csv"), |w| io::write_density(&est, w))?,
            Err(e) => warnings.push(format!("joint density{suffix} skipped: {e}")),
        }
    }
    Ok(())
}

fn density_columns(model: &ModelSpec, names: &[String], points: &[Vec<f64>], weights: &[f64]) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    match model {
        ModelSpec::Single(m) => {
            let mut cols: Vec<Vec<f64>> = (0..names.len()).map(|i| points.iter().map(|p| p[i]).collect()).collect();
            let mut n = names.to_vec();
            let g = derived_posteriors(points, weights, m)?;
            cols.push(g.tau_m);
            n.push("tau_m".into());
            Ok((n, cols))
        }
        ModelSpec::TwoType(_) => Ok((
            TWO_TYPE_NAMES.iter().map(|s| s.to_string()).collect(),
            two_type_columns(points).to_vec(),
        )),
    }
}

/// `(α, β)` when the prior is a three-weight Dirichlet on `(p0, p1)` followed by a Beta on γ.
fn conjugate_hyperparameters(prior: &Prior) -> Option<([f64; 3], [f64; 2])> {
    match prior.components() {
        [PriorComponent::Dirichlet { alpha, .. }, PriorComponent::Beta { a, b, .. }] if alpha.len() == 3 => {
            Some(([alpha[0], alpha[1], alpha[2]], [*a, *b]))
        }
        _ => None,
    }
}

pub fn infer(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let mut out = Outputs::new(out_dir)?;
    let mut manifest = Manifest::new("infer", Some(cfg));
    let result = infer_into(cfg, &mut out, &mut manifest);
    manifest.finish(out, result)
}

fn infer_into(cfg: &RunConfig, out: &mut Outputs, manifest: &mut Manifest) -> Result<()> {
    let prior = cfg.prior()?;
    let smc = cfg.smc_config()?;
    let (obs, path) = load_observed(cfg)?;
    if let Some(p) = path {
        manifest.inputs.push(p.display().to_string());
    }
    let observed = observed_summary(cfg, &obs)?;

    let stages = match run_smc(&cfg.model, &prior, &observed, &smc) {
        Ok(s) => s,
        Err(SmcFailure { error, completed }) => {
            for p in &completed {
                manifest.stages.push(StageRecord::of(p));
                out.write_with(&format!("particles_stage{}.csv", p.stage), |w| io::write_particles(p, w))?;
            }
            return Err(error);
        }
    };
    for p in &stages {
        manifest.stages.push(StageRecord::of(p));
        out.write_with(&format!("particles_stage{}.csv", p.stage), |w| io::write_particles(p, w))?;
    }
    let last = stages.last().expect("at least one stage");
    let adjusted = if cfg.adjust { adjust(last, &observed, &prior, &mut manifest.warnings) } else { None };
    if let Some(a) = &adjusted {
        let pop = adjusted_population(last, a);
        out.write_with("particles_adjusted.csv", |w| io::write_particles(&pop, w))?;
    }

    let names = last.param_names.clone();
    let truth = cfg.truth.as_deref();
    let mut rows = Vec::new();
    let mut blocks = vec![("smc_abc", "", last.points(), last.weights())];
    if let Some(a) = &adjusted {
        blocks.push(("smc_abc_regression", "_adjusted", a.params.clone(), a.weights.clone()));
    }
    let exact = match (&cfg.model, &obs) {
        (ModelSpec::TwoType(_), Observed::TwoType(s)) => {
            let (alpha, beta) = conjugate_hyperparameters(&prior).unwrap_or_else(|| {
                manifest.warnings.push(
                    "prior is not Dirichlet x Beta; conjugate rows use Dirichlet(1/2, 1/2, 1/2) x Beta(1/2, 1/2)".into(),
                );
                (REFERENCE_ALPHA, REFERENCE_BETA)
            });
            Some(ConjugatePosterior::new(s, alpha, beta)?)
        }
        _ => None,
    };
    for (method, suffix, points, weights) in &blocks {
        match (&cfg.model, &exact) {
            (ModelSpec::Single(m), _) => rows.extend(single_type_rows(method, &names, points, weights, m, truth)?),
            (ModelSpec::TwoType(_), Some(exact)) => rows.extend(two_type_rows(method, points, weights, exact, truth)?),
            _ => unreachable!("observed data matches the model"),
        }
        let (dn, dc) = density_columns(&cfg.model, &names, points, weights)?;
        let unit = matches!(cfg.model, ModelSpec::TwoType(_));
        write_densities(out, suffix, &dn, &dc, weights, unit, &mut manifest.warnings)?;
    }
    if let Some(exact) = &exact {
        rows.extend(conjugate_rows(exact, cfg.seed, truth)?);
    }
    out.write_with("report.csv", |w| io::write_report(&rows, w))
}

fn sweep_cells(cfg: &RunConfig, base: &CbpModel) -> Result<Vec<(String, CbpModel, Prior)>> {
    let spec = cfg.sweep.clone().unwrap_or_default();
    let models: Vec<CbpModel> = match &spec.families {
        Some(f) => f
            .iter()
            .map(|fam| CbpModel {
                offspring: fam.offspring,
                control: fam.control,
                size_map: fam.size_map.unwrap_or(base.size_map),
                ..base.clone()
            })
            .collect(),
        None => vec![base.clone()],
    };
    let mut cells = Vec::new();
    for m in models {
        let fam = format!(
            "{}/{}/{}",
            serde_json::to_value(m.offspring).unwrap().as_str().unwrap_or_default(),
            serde_json::to_value(m.control).unwrap().as_str().unwrap_or_default(),
            serde_json::to_value(m.size_map).unwrap().as_str().unwrap_or_default(),
        );
        match &spec.beta_shapes {
            Some(shapes) => {
                let [a, b] = m.param_names();
                for s1 in shapes {
                    for s2 in shapes {
                        let prior = Prior::new(vec![
                            PriorComponent::beta(a, s1[0], s1[1]),
                            PriorComponent::beta(b, s2[0], s2[1]),
                        ])?;
                        let label = format!("{fam} {a}~Beta({},{}) {b}~Beta({},{})", s1[0], s1[1], s2[0], s2[1]);
                        cells.push((label, m.clone(), prior));
                    }
                }
            }
            None => {
                let prior = if spec.families.is_some() { m.default_prior() } else { cfg.prior()? };
                cells.push((fam, m, prior));
            }
        }
    }
    Ok(cells)
}

pub fn sweep(cfg: &RunConfig, out_dir: &Path) -> Result<()> {
    let mut out = Outputs::new(out_dir)?;
    let mut manifest = Manifest::new("sweep", Some(cfg));
    let result = sweep_into(cfg, &mut out, &mut manifest);
    manifest.finish(out, result)
}

fn sweep_into(cfg: &RunConfig, out: &mut Outputs, manifest: &mut Manifest) -> Result<()> {
    let base = match &cfg.model {
        ModelSpec::Single(m) => m.clone(),
        ModelSpec::TwoType(_) => return Err(Error::Config("sweeps are defined for single-type models only".into())),
    };
    let smc = cfg.smc_config()?;
    let (obs, path) = load_observed(cfg)?;
    if let Some(p) = path {
        manifest.inputs.push(p.display().to_string());
    }
    let observed = observed_summary(cfg, &obs)?;
    let cells = sweep_cells(cfg, &base)?;

    let mut w = out.create("sweep.csv")?;
    let mut wtr = csv::Writer::from_writer(&mut w);
    let mut header = vec!["cell", "label", "status"];
    header.extend(io::REPORT_HEADER);
    wtr.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for (i, (label, model, prior)) in cells.iter().enumerate() {
        let spec = ModelSpec::Single(model.clone());
        let mut record = CellRecord { cell: i, label: label.clone(), status: "ok".into(), stages: Vec::new() };
        let rows = (|| -> Result<Vec<ParameterSummary>> {
            let stages = run_smc(&spec, prior, &observed, &smc).map_err(|f| {
                record.stages = f.completed.iter().map(StageRecord::of).collect();
                f.error
            })?;
            record.stages = stages.iter().map(StageRecord::of).collect();
            let last = stages.last().expect("at least one stage");
            let mut warnings = Vec::new();
            let (method, points, weights) = match cfg.adjust.then(|| adjust(last, &observed, prior, &mut warnings)).flatten() {
                Some(a) => ("smc_abc_regression", a.params, a.weights),
                None => ("smc_abc", last.points(), last.weights()),
            };
            manifest.warnings.extend(warnings.into_iter().map(|w| format!("cell {i}: {w}")));
            let same_laws = (model.offspring, model.control) == (base.offspring, base.control);
            let truth = cfg.truth.as_deref().filter(|_| same_laws);
            single_type_rows(method, &last.param_names, &points, &weights, model, truth)
        })();
        let wr = |wtr: &mut csv::Writer<_>, rec: Vec<String>| wtr.write_record(rec).map_err(|e| Error::Io(e.to_string()));
        match rows {
            Ok(rows) => {
                for r in &rows {
                    let mut rec = vec![i.to_string(), label.clone(), "ok".into()];
                    rec.extend(io::report_record(r));
                    wr(&mut wtr, rec)?;
                }
            }
            Err(e) => {
                record.status = format!("failed: {e}");
                let mut rec = vec![i.to_string(), label.clone(), record.status.clone()];
                rec.extend(std::iter::repeat_n(String::new(), io::REPORT_HEADER.len()));
                wr(&mut wtr, rec)?;
            }
        }
        manifest.cells.push(record);
    }
    wtr.flush()?;
    drop(wtr);
    w.flush()?;
    Ok(())
}

pub fn density(particles: &Path, out_dir: &Path) -> Result<()> {
    let mut out = Outputs::new(out_dir)?;
    let mut manifest = Manifest::new("density", None);
    manifest.inputs.push(particles.display().to_string());
    let result = (|| {
        let f = File::open(particles).map_err(|e| Error::Io(format!("{}: {e}", particles.display())))?;
        let pop: ParticlePopulation = io::read_particles(f)?;
        let w = pop.weights();
        let cols: Vec<Vec<f64>> = (0..pop.dim()).map(|i| pop.column(i)).collect();
        write_densities(&mut out, "", &pop.param_names, &cols, &w, false, &mut manifest.warnings)
    })();
    manifest.finish(out, result)
}

#[derive(Debug, Serialize)]
pub struct Comparison {
    pub ise: f64,
    pub kl: f64,
    pub total_variation: f64,
}

pub fn compare(a: &Path, b: &Path, out_dir: Option<&Path>) -> Result<Comparison> {
    let read = |p: &Path| -> Result<cbpabc::DensityEstimate> {
        let f = File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        io::read_density(f)
    };
    let run = || -> Result<Comparison> {
        let (f, g) = (read(a)?, read(b)?);
        Ok(Comparison { ise: ise(&f, &g)?, kl: kl(&f, &g)?, total_variation: total_variation(&f, &g)? })
    };
    let Some(dir) = out_dir else {
        return run();
    };
    let mut out = Outputs::new(dir)?;
    let mut manifest = Manifest::new("compare", None);
    manifest.inputs = vec![a.display().to_string(), b.display().to_string()];
    let result = run().and_then(|c| {
        out.write_with("compare.csv", |w| {
            writeln!(w, "ise,kl,total_variation")?;
            writeln!(w, "{},{},{}", c.ise, c.kl, c.total_variation)?;
            Ok(())
        })?;
        Ok(c)
    });
    manifest.finish(out, result)
}
