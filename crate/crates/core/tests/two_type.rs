use cbpabc::abc::DEFAULT_BUDGET_PER_STAGE;
use cbpabc::multitype::{simulate_two_type, REFERENCE_ALPHA, REFERENCE_BETA};
use cbpabc::posterior::{kde_1d, linspace, total_variation};
use cbpabc::*;

fn simulated_data(seed: u64, params: &TwoTypeParams) -> TwoTypeTreeSummary {
    let mut rng = SeedTree::new(seed).stream(Domain::Observed, 0, 0);
    loop {
        let tree = simulate_two_type(params, 30, 5, &mut rng);
        let s = tree.summary(30);
        if tree.final_z1 > 0 && s.delta > 0 {
            return s;
        }
    }
}

fn stage_tv(pop: &ParticlePopulation, exact: &ConjugatePosterior, grid: &[f64]) -> f64 {
    let w = pop.weights();
    let p0 = pop.column(0);
    let p1 = pop.column(1);
    let p2: Vec<f64> = p0.iter().zip(&p1).map(|(a, b)| 1.0 - a - b).collect();
    let columns = [p0, p1, p2, pop.column(2)];
    let mut total = 0.0;
    for (i, col) in columns.iter().enumerate() {
        let est = kde_1d(col, &w, grid).unwrap();
        let truth = DensityEstimate::new_1d(
            grid.to_vec(),
            grid.iter().map(|&x| exact.marginal_density(i, x)).collect(),
        )
        .unwrap();
        total += total_variation(&est, &truth).unwrap();
    }
    total / columns.len() as f64
}

#[test]
fn abc_approaches_conjugate_posterior_across_stages() {
    let truth = TwoTypeParams::new(0.15, 0.5, 0.35, 0.95).unwrap();
    let model = TwoTypeModel::new(30, 5).unwrap();
    let prior: Prior = model.prior(REFERENCE_ALPHA, REFERENCE_BETA).unwrap();
    let grid = linspace(0.0, 1.0, 1001);
    let mut tv = [0.0; 3];
    let seeds = 5;
    for seed in 0..seeds {
        let data = simulated_data(100 + seed, &truth);
        let exact = ConjugatePosterior::new(&data, REFERENCE_ALPHA, REFERENCE_BETA).unwrap();
        let observed: SummaryVector = data.statistic().unwrap();
        let config = SmcConfig {
            schedule: Schedule::Quantile {
                stages: vec![
                    QuantileStage { pool: 2_000, order: 0.25 },
                    QuantileStage { pool: 5_000, order: 0.1 },
                    QuantileStage { pool: 10_000, order: 0.05 },
                ],
            },
            metric: Metric::Rho1,
            summary: SummaryKind::TwoType,
            seed,
            budget_per_stage: DEFAULT_BUDGET_PER_STAGE,
        };
        let stages = smc_abc(&prior, &model, &observed, &config).unwrap();
        for (t, pop) in stages.iter().enumerate() {
            tv[t] += stage_tv(pop, &exact, &grid) / seeds as f64;
        }
    }
    assert!(tv[0] > tv[1] && tv[1] > tv[2], "mean TV by stage {tv:?}");
}

#[test]
fn partition_invariant_and_progenitor_fraction() {
    let params = TwoTypeParams::new(0.2, 0.45, 0.35, 0.8).unwrap();
    let seeds = SeedTree::new(9);
    let runs = 20_000;
    let (mut delta, mut y1) = (0u64, 0u64);
    for i in 0..runs {
        let mut rng = seeds.stream(Domain::Test, 0, i);
        let s = simulate_two_type(&params, 30, 5, &mut rng).summary(30);
        assert_eq!(s.y0 + s.y2 + s.psi, s.delta);
        assert!(s.delta <= s.y1);
        delta += s.delta;
        y1 += s.y1;
    }
    // Conditional on the tree, Δ is a sum of Binomial(Z_l, γ) draws, so Δ/ΣY1
    // has variance at most γ(1 − γ)/ΣY1.
    let frac = delta as f64 / y1 as f64;
    let se = (0.8 * 0.2 / y1 as f64).sqrt();
    assert!((frac - 0.8).abs() < 3.0 * se, "Delta/Y1 = {frac}, se {se}");
}
