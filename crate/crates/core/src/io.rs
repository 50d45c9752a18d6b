//! CSV formats for trajectories, particles, density grids, tree summaries
//! and posterior reports. Floats are written with Rust's shortest
//! round-trip formatting, so reading a file back is exact.

use std::io::{Read, Write};

use crate::abc::kernel::weighted_covariance;
use crate::abc::{Particle, ParticlePopulation};
use crate::branching::Trajectory;
use crate::error::{Error, Result};
use crate::multitype::TwoTypeTreeSummary;
use crate::posterior::{DensityEstimate, ParameterSummary};
use crate::scalar::Real;
use crate::summary::{SummaryKind, SummaryVector};

pub const TRAJECTORY_HEADER: [&str; 3] = ["n", "Z", "phi"];
pub const TREE_HEADER: [&str; 7] = ["n", "N", "Y1", "Delta", "Y0", "Y2", "Psi"];

fn parse_err(e: csv::Error) -> Error {
    match e.kind() {
        csv::ErrorKind::Io(_) => Error::Io(e.to_string()),
        _ => Error::Parse(e.to_string()),
    }
}

fn write_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(r)
}

fn check_header<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let h = rdr.headers().map_err(parse_err)?;
    if h.iter().ne(expected.iter().copied()) {
        return Err(Error::Parse(format!(
            "expected header `{}`, found `{}`",
            expected.join(","),
            h.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize, line: u64, what: &str) -> Result<T> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::Parse(format!("line {line}: invalid {what} `{raw}`")))
}

fn line_of(rec: &csv::StringRecord) -> u64 {
    rec.position().map_or(0, |p| p.line())
}

pub fn write_trajectory<W: Write>(traj: &Trajectory, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(TRAJECTORY_HEADER).map_err(write_err)?;
    let n = traj.generations();
    for (i, z) in traj.sizes().iter().enumerate() {
        let phi = if i + 1 == n { traj.last_progenitors().to_string() } else { String::new() };
        wtr.write_record([i.to_string(), z.to_string(), phi]).map_err(write_err)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_trajectory<R: Read>(r: R) -> Result<Trajectory> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &TRAJECTORY_HEADER)?;
    let mut z = Vec::new();
    let mut phis = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse_err)?;
        let line = line_of(&rec);
        let idx: usize = field(&rec, 0, line, "generation")?;
        if idx != z.len() {
            return Err(Error::Parse(format!("line {line}: generations must run 0, 1, 2, ...")));
        }
        z.push(field::<u64>(&rec, 1, line, "population size")?);
        if !rec.get(2).unwrap_or("").is_empty() {
            phis.push((idx, field::<u64>(&rec, 2, line, "progenitor count")?));
        }
    }
    let n = z.len().saturating_sub(1);
    match phis.as_slice() {
        [(i, phi)] if *i + 1 == n => Trajectory::new(z, *phi),
        _ => Err(Error::Parse(format!(
            "exactly one progenitor count is expected, on generation {}",
            n.saturating_sub(1)
        ))),
    }
}

pub fn particle_header<T: Real>(pop: &ParticlePopulation<T>) -> Vec<String> {
    let mut h = vec!["stage".to_string(), "idx".to_string()];
    h.extend(pop.param_names.iter().cloned());
    h.push("weight".into());
    h.push("distance".into());
    if let Some(p) = pop.particles.first() {
        h.extend(p.summary.kind().component_names().iter().map(|s| s.to_string()));
    }
    h
}

/// `stage,idx,<params>,weight,distance,<summary components>`, rows in index order.
pub fn write_particles<T: Real, W: Write>(pop: &ParticlePopulation<T>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(particle_header(pop)).map_err(write_err)?;
    for (i, p) in pop.particles.iter().enumerate() {
        let mut row = vec![pop.stage.to_string(), i.to_string()];
        row.extend(p.params.iter().map(|v| v.to_string()));
        row.push(p.weight.to_string());
        row.push(p.distance.to_string());
        row.extend(p.summary.values().iter().map(|v| v.to_string()));
        wtr.write_record(&row).map_err(write_err)?;
    }
    wtr.flush()?;
    Ok(())
}

const KINDS: [SummaryKind; 5] = [
    SummaryKind::Full,
    SummaryKind::S1,
    SummaryKind::S2,
    SummaryKind::S3,
    SummaryKind::TwoType,
];

/// Reads a particle file back. The threshold is taken as the largest
/// distance, the covariance is recomputed and the attempt count is zero.
pub fn read_particles<T: Real, R: Read>(r: R) -> Result<ParticlePopulation<T>> {
    let mut rdr = reader(r);
    let header: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(String::from).collect();
    let pos = |name: &str| header.iter().position(|h| h == name);
    let (Some(wi), Some(di)) = (pos("weight"), pos("distance")) else {
        return Err(Error::Parse("particle header needs weight and distance columns".into()));
    };
    if header.len() < 4 || header[0] != "stage" || header[1] != "idx" || di != wi + 1 || wi < 3 {
        return Err(Error::Parse("particle header must start with stage,idx,<params>,weight,distance".into()));
    }
    let param_names: Vec<String> = header[2..wi].to_vec();
    let summary_names: Vec<&str> = header[di + 1..].iter().map(String::as_str).collect();
    let kind = KINDS
        .into_iter()
        .find(|k| k.component_names() == summary_names.as_slice())
        .ok_or_else(|| Error::Parse(format!("unknown summary columns `{}`", summary_names.join(","))))?;

    let mut stage = None;
    let mut particles = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse_err)?;
        let line = line_of(&rec);
        if rec.len() != header.len() {
            return Err(Error::Parse(format!("line {line}: expected {} fields", header.len())));
        }
        let s: usize = field(&rec, 0, line, "stage")?;
        if *stage.get_or_insert(s) != s {
            return Err(Error::Parse(format!("line {line}: mixed stages in one file")));
        }
        let idx: usize = field(&rec, 1, line, "idx")?;
        if idx != particles.len() {
            return Err(Error::Parse(format!("line {line}: idx must run 0, 1, 2, ...")));
        }
        let params = (2..wi).map(|i| field(&rec, i, line, "parameter")).collect::<Result<Vec<T>>>()?;
        let weight = field(&rec, wi, line, "weight")?;
        let distance = field(&rec, di, line, "distance")?;
        let values = (di + 1..header.len())
            .map(|i| field(&rec, i, line, "summary"))
            .collect::<Result<Vec<T>>>()?;
        let summary = SummaryVector::new(kind, values).map_err(|e| Error::Parse(format!("line {line}: {e}")))?;
        particles.push(Particle { params, weight, distance, summary });
    }
    if particles.is_empty() {
        return Err(Error::EmptyPopulation);
    }
    let points: Vec<Vec<T>> = particles.iter().map(|p: &Particle<T>| p.params.clone()).collect();
    let weights: Vec<T> = particles.iter().map(|p| p.weight).collect();
    let total: T = weights.iter().copied().sum();
    let normalized: Vec<T> = weights.iter().map(|&w| w / total).collect();
    let two = T::of(2.0);
    let threshold = particles.iter().map(|p| p.distance).fold(T::zero(), T::max);
    Ok(ParticlePopulation {
        stage: stage.unwrap_or(1),
        param_names,
        covariance: weighted_covariance(&points, &normalized).into_iter().map(|v| two * v).collect(),
        particles,
        threshold,
        attempts: 0,
        pool_size: None,
    })
}

/// `x,density` or, for lattices, `x,y,density` with `x` as the slow index.
pub fn write_density<T: Real, W: Write>(est: &DensityEstimate<T>, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if est.dim() == 1 {
        wtr.write_record(["x", "density"]).map_err(write_err)?;
        for (x, v) in est.x.iter().zip(&est.values) {
            wtr.write_record([x.to_string(), v.to_string()]).map_err(write_err)?;
        }
    } else {
        wtr.write_record(["x", "y", "density"]).map_err(write_err)?;
        for (i, x) in est.x.iter().enumerate() {
            for (j, y) in est.y.iter().enumerate() {
                wtr.write_record([x.to_string(), y.to_string(), est.at(i, j).to_string()])
                    .map_err(write_err)?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_density<T: Real, R: Read>(r: R) -> Result<DensityEstimate<T>> {
    let mut rdr = reader(r);
    let header: Vec<String> = rdr.headers().map_err(parse_err)?.iter().map(String::from).collect();
    let two_d = match header.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["x", "density"] => false,
        ["x", "y", "density"] => true,
        _ => return Err(Error::Parse("density header must be `x,density` or `x,y,density`".into())),
    };
    let mut rows: Vec<Vec<T>> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(parse_err)?;
        let line = line_of(&rec);
        rows.push((0..header.len()).map(|i| field(&rec, i, line, "value")).collect::<Result<_>>()?);
    }
    if !two_d {
        let (x, values) = rows.into_iter().map(|r| (r[0], r[1])).unzip();
        return DensityEstimate::new_1d(x, values);
    }
    let first_x = rows.first().map(|r| r[0]);
    let ny = rows.iter().take_while(|r| Some(r[0]) == first_x).count();
    if ny == 0 || rows.len() % ny != 0 {
        return Err(Error::Parse("lattice rows are not a full x by y grid".into()));
    }
    let y: Vec<T> = rows[..ny].iter().map(|r| r[1]).collect();
    let x: Vec<T> = rows.iter().step_by(ny).map(|r| r[0]).collect();
    for (k, r) in rows.iter().enumerate() {
        if r[0] != x[k / ny] || r[1] != y[k % ny] {
            return Err(Error::Parse(format!("lattice row {} is out of order", k + 1)));
        }
    }
    let values = rows.iter().map(|r| r[2]).collect();
    DensityEstimate::new_2d(x, y, values)
}

pub fn write_tree_summary<W: Write>(s: &TwoTypeTreeSummary, w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.serialize(s).map_err(write_err)?;
    wtr.flush()?;
    Ok(())
}

/// First data row of a tree-summary file.
pub fn read_tree_summary<R: Read>(r: R) -> Result<TwoTypeTreeSummary> {
    let mut rdr = reader(r);
    check_header(&mut rdr, &TREE_HEADER)?;
    let s: TwoTypeTreeSummary = rdr
        .deserialize()
        .next()
        .ok_or_else(|| Error::Parse("tree summary file has no data row".into()))?
        .map_err(parse_err)?;
    s.validate().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(s)
}

pub const REPORT_HEADER: [&str; 9] =
    ["method", "parameter", "mean", "variance", "hpd_lo", "hpd_hi", "rmse", "ise", "kl"];

fn opt<T: Real>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn report_record<T: Real>(r: &ParameterSummary<T>) -> Vec<String> {
    vec![
        r.method.clone(),
        r.parameter.clone(),
        r.mean.to_string(),
        r.variance.to_string(),
        r.hpd_lo.to_string(),
        r.hpd_hi.to_string(),
        opt(r.rmse),
        opt(r.ise),
        opt(r.kl),
    ]
}

pub fn write_report<T: Real, W: Write>(rows: &[ParameterSummary<T>], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(REPORT_HEADER).map_err(write_err)?;
    for r in rows {
        wtr.write_record(report_record(r)).map_err(write_err)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abc::{rejection_abc, Acceptance, Rejection};
    use crate::abc::PriorComponent;
    use crate::abc::Prior;
    use crate::datasets::{reference_trajectory, REFERENCE_TREE};
    use crate::posterior::linspace;
    use crate::rng::Stream;
    use crate::summary::Metric;
    use rand::Rng;

    #[test]
    fn trajectory_roundtrip_is_bit_exact() {
        let t = reference_trajectory();
        let mut buf = Vec::new();
        write_trajectory(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("n,Z,phi\n0,1,\n1,4,\n"));
        assert!(text.contains("\n29,166,131\n30,216,\n"));
        assert_eq!(text.lines().count(), 32);
        let back = read_trajectory(buf.as_slice()).unwrap();
        assert_eq!(back, t);
        let mut again = Vec::new();
        write_trajectory(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn malformed_trajectories() {
        assert!(matches!(read_trajectory("n,Z\n0,1\n".as_bytes()), Err(Error::Parse(_))));
        assert!(read_trajectory("n,Z,phi\n0,1,\n1,2,\n".as_bytes()).is_err());
        assert!(read_trajectory("n,Z,phi\n0,1,1\n2,2,\n".as_bytes()).is_err());
        assert!(read_trajectory("n,Z,phi\n0,x,1\n1,2,\n".as_bytes()).is_err());
        assert!(read_trajectory("n,Z,phi\n0,1,1\n1,2,\n".as_bytes()).is_ok());
    }

    fn toy(p: &[f64], kind: SummaryKind, rng: &mut Stream) -> std::result::Result<SummaryVector<f64>, Rejection> {
        let e: f64 = rng.random();
        SummaryVector::new(kind, vec![1.0 + p[0] + e, 1.0 + p[1], 2.0]).map_err(|_| Rejection::Degenerate)
    }

    #[test]
    fn particle_roundtrip() {
        let prior = Prior::new(vec![PriorComponent::beta("theta", 0.5, 0.5), PriorComponent::beta("gamma", 0.5, 0.5)]).unwrap();
        let obs = SummaryVector::new(SummaryKind::Full, vec![2.0, 1.5, 2.0]).unwrap();
        let pop = rejection_abc(&prior, &toy, &obs, Metric::Rho1, 500, Acceptance::Quantile(0.1), 4, u64::MAX).unwrap();
        let mut buf = Vec::new();
        write_particles(&pop, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("stage,idx,theta,gamma,weight,distance,total_progeny,growth_ratio,progenitor_ratio\n1,0,"));
        let back: ParticlePopulation<f64> = read_particles(buf.as_slice()).unwrap();
        assert_eq!(back.particles, pop.particles);
        assert_eq!(back.param_names, pop.param_names);
        assert_eq!(back.threshold, pop.particles.iter().map(|p| p.distance).fold(0.0, f64::max));
        let mut again = Vec::new();
        write_particles(&back, &mut again).unwrap();
        assert_eq!(again, buf);
    }

    #[test]
    fn density_roundtrips() {
        let x = linspace(0.0, 1.0, 5);
        let est = DensityEstimate::new_1d(x.clone(), vec![0.1, 0.3, 1.0 / 3.0, 2.0, 0.0]).unwrap();
        let mut buf = Vec::new();
        write_density(&est, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x,density\n0,0.1\n"));
        assert_eq!(read_density::<f64, _>(buf.as_slice()).unwrap(), est);

        let y = vec![-1.0, 0.5, 2.0];
        let vals: Vec<f64> = (0..15).map(|k| k as f64 / 7.0).collect();
        let est2 = DensityEstimate::new_2d(x, y, vals).unwrap();
        let mut buf = Vec::new();
        write_density(&est2, &mut buf).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("x,y,density\n0,-1,0\n0,0.5,"));
        assert_eq!(read_density::<f64, _>(buf.as_slice()).unwrap(), est2);
        assert!(read_density::<f64, _>("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn tree_roundtrip() {
        let mut buf = Vec::new();
        write_tree_summary(&REFERENCE_TREE, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "n,N,Y1,Delta,Y0,Y2,Psi\n5,30,276,269,37,133,99\n");
        assert_eq!(read_tree_summary(buf.as_slice()).unwrap(), REFERENCE_TREE);
        assert!(read_tree_summary("n,N,Y1,Delta,Y0,Y2,Psi\n5,30,276,269,37,133,98\n".as_bytes()).is_err());
    }

    #[test]
    fn report_layout() {
        let row = ParameterSummary {
            method: "smc".into(),
            parameter: "theta".into(),
            mean: 0.5,
            variance: 0.01,
            hpd_lo: 0.3,
            hpd_hi: 0.7,
            rmse: Some(0.02),
            ise: None,
            kl: None,
        };
        let mut buf = Vec::new();
        write_report(&[row], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "method,parameter,mean,variance,hpd_lo,hpd_hi,rmse,ise,kl\nsmc,theta,0.5,0.01,0.3,0.7,0.02,,\n"
        );
    }
}
