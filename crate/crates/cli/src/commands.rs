use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bcs_sha::config::ModelConfig;
use bcs_sha::eig::{diagonalize_with, EigenOptions};
use bcs_sha::hamiltonian::build_hamiltonian;
use bcs_sha::model::enumerate_basis;
use bcs_sha::sha::{ShaAnalysis, ShiftOptions};
use bcs_sha::subspace::{run_subspace, QuantaSet, RankRule, SubspaceOptions, SubspaceSpec};
use bcs_sha::{Error, PairingModel, Result};
use rayon::prelude::*;
use serde::Serialize;

use crate::format::g12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Exact,
    Sha,
    Subspace,
    Sweep,
    Compare,
}

/// Evenly spaced coupling strengths `start..=stop`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepGrid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl SweepGrid {
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Config(format!("sweep `{s}` is not start:stop:steps"));
        let [a, b, n] = parts.as_slice() else { return Err(bad()) };
        let grid = Self {
            start: a.trim().parse().map_err(|_| bad())?,
            stop: b.trim().parse().map_err(|_| bad())?,
            steps: n.trim().parse().map_err(|_| bad())?,
        };
        if grid.steps == 0 {
            return Err(Error::Config("sweep needs at least one step".into()));
        }
        if !grid.start.is_finite() || !grid.stop.is_finite() {
            return Err(bad());
        }
        if grid.steps > 1 && grid.stop <= grid.start {
            return Err(Error::Config(format!("sweep grid must increase: {} -> {}", grid.start, grid.stop)));
        }
        Ok(grid)
    }

    pub fn points(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let h = (self.stop - self.start) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| if i + 1 == self.steps { self.stop } else { self.start + h * i as f64 }).collect()
    }
}

/// `sha-vectors`, `sha-vectors:<count>` or `su2-states:<count>`.
pub fn parse_subspace(s: &str, quanta_max: u32, rank: RankRule) -> Result<SubspaceSpec> {
    let (kind, size) = match s.split_once(':') {
        Some((k, n)) => {
            let n: usize = n.trim().parse().map_err(|_| Error::Config(format!("bad subspace size in `{s}`")))?;
            if n == 0 {
                return Err(Error::Config("subspace size must be positive".into()));
            }
            (k, Some(n))
        }
        None => (s, None),
    };
    match (kind, size) {
        ("sha-vectors", count) => Ok(SubspaceSpec::ShaVectors { quanta_max, count }),
        ("su2-states", Some(count)) => Ok(SubspaceSpec::Su2States { count, rule: rank }),
        ("su2-states", None) => Err(Error::Config("su2-states needs a size, e.g. su2-states:50".into())),
        (other, _) => Err(Error::Config(format!("unknown subspace kind `{other}`"))),
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub model: ModelConfig,
    pub command: Command,
    pub g: Option<f64>,
    pub sweep: Option<SweepGrid>,
    pub subspace: Option<SubspaceSpec>,
    pub out: Option<PathBuf>,
    pub csv_out: Option<PathBuf>,
    pub quanta_max: u32,
    pub levels: Option<usize>,
    pub eigen: EigenOptions<f64>,
    pub shift: ShiftOptions<f64>,
    pub dump_matrix: Option<PathBuf>,
    pub dump_sha: Option<PathBuf>,
    pub sha_only: bool,
}

impl RunConfig {
    fn model_at(&self, g: Option<f64>) -> Result<PairingModel> {
        match g {
            Some(g) => self.model.with_strength(g)?.build(),
            None => self.model.build(),
        }
    }

    fn subspace_spec(&self) -> SubspaceSpec {
        self.subspace.clone().unwrap_or(SubspaceSpec::ShaVectors { quanta_max: self.quanta_max, count: None })
    }
}

pub fn run(cfg: &RunConfig) -> Result<()> {
    match cfg.command {
        Command::Exact => cmd_exact(cfg),
        Command::Sha => cmd_sha(cfg),
        Command::Subspace => cmd_subspace(cfg),
        Command::Sweep => cmd_sweep(cfg),
        Command::Compare => cmd_compare(cfg),
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    Ok(csv::WriterBuilder::new().from_writer(open_out(path)?))
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(io::Error::other(format!("{other:?}"))),
    }
}

fn write_rows(path: Option<&Path>, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

fn header(cols: &[&str]) -> Vec<String> {
    cols.iter().map(|c| c.to_string()).collect()
}

fn quanta_label(q: &[u32]) -> String {
    q.iter().map(u32::to_string).collect::<Vec<_>>().join("_")
}

pub fn cmd_exact(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model_at(cfg.g)?;
    let basis = enumerate_basis(&model)?;
    let h = build_hamiltonian(&model, &basis)?;
    if let Some(p) = &cfg.dump_matrix {
        let mut f = BufWriter::new(File::create(p)?);
        h.write_coordinate(&mut f)?;
        f.flush()?;
    }
    let count = cfg.levels.unwrap_or(10).min(basis.dim());
    let spectrum = diagonalize_with(&h, count, false, &cfg.eigen)?;
    let ex = spectrum.excitations();
    let rows: Vec<Vec<String>> =
        spectrum.eigenvalues.iter().zip(&ex).enumerate().map(|(i, (e, x))| vec![i.to_string(), g12(*e), g12(*x)]).collect();
    write_rows(cfg.out.as_deref(), &header(&["index", "energy", "excitation"]), &rows)
}

#[derive(Serialize)]
struct ShaState {
    quanta: Vec<u32>,
    energy: f64,
    excitation: f64,
}

#[derive(Serialize)]
struct ShaReport {
    g: Option<f64>,
    x0: Vec<f64>,
    lambda: f64,
    kappa: Vec<f64>,
    shift_residual: f64,
    shift_iterations: usize,
    omega: Vec<f64>,
    sigma: Vec<f64>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    #[serde(rename = "E")]
    e: f64,
    ground_energy: f64,
    states: Vec<ShaState>,
}

pub fn cmd_sha(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model_at(cfg.g)?;
    let sha = ShaAnalysis::new(&model, &cfg.shift)?;
    if let Some(p) = &cfg.dump_sha {
        std::fs::write(p, sha.diagnostics())?;
    }
    let quanta = QuantaSet::with_cutoff(sha.modes.num_modes(), cfg.quanta_max);
    let ground = sha.modes.ground_energy();
    let states = quanta
        .tuples()
        .iter()
        .map(|q| {
            let energy = sha.modes.energy(q)?;
            Ok(ShaState { quanta: q.clone(), energy, excitation: energy - ground })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = ShaReport {
        g: cfg.g.or(cfg.model.rule_strength()),
        x0: sha.shift.x0.clone(),
        lambda: sha.shift.lambda,
        kappa: sha.shift.kappa.clone(),
        shift_residual: sha.shift.residual,
        shift_iterations: sha.shift.iterations,
        omega: sha.modes.omega.clone(),
        sigma: sha.modes.sigma.clone(),
        alpha: sha.modes.alpha.clone(),
        beta: sha.modes.beta.clone(),
        e: sha.modes.e,
        ground_energy: ground,
        states,
    };
    if let Some(p) = &cfg.csv_out {
        let mut cols: Vec<String> = (1..=sha.modes.num_modes()).map(|i| format!("nu{i}")).collect();
        cols.extend(["energy".to_string(), "excitation".to_string()]);
        let rows: Vec<Vec<String>> = report
            .states
            .iter()
            .map(|s| {
                let mut r: Vec<String> = s.quanta.iter().map(u32::to_string).collect();
                r.extend([g12(s.energy), g12(s.excitation)]);
                r
            })
            .collect();
        write_rows(Some(p), &cols, &rows)?;
    }
    let mut out = open_out(cfg.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(|e| Error::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn cmd_subspace(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model_at(cfg.g)?;
    let basis = enumerate_basis(&model)?;
    let h = build_hamiltonian(&model, &basis)?;
    let opts = SubspaceOptions { shift: cfg.shift.clone(), ..Default::default() };
    let run = run_subspace(&model, &basis, &h, &cfg.subspace_spec(), &opts)?;
    eprintln!("subspace: {} requested, {} used", run.requested, run.used);
    let n = cfg.levels.unwrap_or(10).min(run.spectrum.len());
    let ex = run.spectrum.excitations();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| vec![i.to_string(), g12(run.spectrum.eigenvalues[i]), g12(ex[i]), g12(run.spectrum.residuals[i])])
        .collect();
    write_rows(cfg.out.as_deref(), &header(&["index", "energy", "excitation", "residual"]), &rows)
}

/// SHA excitations of the unit tuples and of two quanta in the softest mode.
fn sweep_tuples(num_modes: usize) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = (0..num_modes)
        .map(|i| {
            let mut q = vec![0; num_modes];
            q[i] = 1;
            q
        })
        .collect();
    if num_modes > 0 {
        let mut q = vec![0; num_modes];
        q[0] = 2;
        out.push(q);
    }
    out
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<()> {
    let grid = cfg.sweep.ok_or_else(|| Error::Config("sweep needs --sweep start:stop:steps".into()))?;
    let points = grid.points();
    let num_modes = cfg.model.levels.len().saturating_sub(1);
    let tuples = sweep_tuples(num_modes);
    let exact_count = 4;
    // validate once up front so config problems are not reported per point
    cfg.model_at(Some(points[0]))?;

    let rows: Vec<Result<Vec<String>>> = points
        .par_iter()
        .map(|&g| {
            let model = cfg.model_at(Some(g))?;
            let mut row = vec![g12(g)];
            match ShaAnalysis::new(&model, &cfg.shift) {
                Ok(sha) => {
                    for q in &tuples {
                        row.push(g12(sha.modes.excitation(q)?));
                    }
                }
                Err(e) if e.is_numerical() => {
                    eprintln!("warning: g={}: {e}", g12(g));
                    row.extend(tuples.iter().map(|_| g12(f64::NAN)));
                }
                Err(e) => return Err(e),
            }
            if !cfg.sha_only {
                let basis = enumerate_basis(&model)?;
                let h = build_hamiltonian(&model, &basis)?;
                let spectrum = diagonalize_with(&h, (exact_count + 1).min(basis.dim()), false, &cfg.eigen)?;
                let ex = spectrum.excitations();
                row.extend((1..=exact_count).map(|i| g12(ex.get(i).copied().unwrap_or(f64::NAN))));
            }
            Ok(row)
        })
        .collect();
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut cols = vec!["g".to_string()];
    cols.extend(tuples.iter().map(|q| format!("sha_{}", quanta_label(q))));
    if !cfg.sha_only {
        cols.extend((1..=exact_count).map(|i| format!("exact_{i}")));
    }
    write_rows(cfg.out.as_deref(), &cols, &rows)
}

pub fn cmd_compare(cfg: &RunConfig) -> Result<()> {
    let model = cfg.model_at(cfg.g)?;
    let basis = enumerate_basis(&model)?;
    let h = build_hamiltonian(&model, &basis)?;
    let n = (cfg.levels.unwrap_or(5) + 1).min(basis.dim());
    let exact = diagonalize_with(&h, n, true, &cfg.eigen)?;
    let opts = SubspaceOptions { shift: cfg.shift.clone(), ..Default::default() };
    let run = run_subspace(&model, &basis, &h, &cfg.subspace_spec(), &opts)?;
    let overlaps = run.overlaps_with(&exact, n).unwrap_or_default();
    let sha: Vec<f64> = match ShaAnalysis::new(&model, &cfg.shift) {
        Ok(s) => {
            let quanta = QuantaSet::with_cutoff(s.modes.num_modes(), cfg.quanta_max);
            let mut ex = quanta.tuples().iter().map(|q| s.modes.excitation(q)).collect::<Result<Vec<_>>>()?;
            ex.sort_by(f64::total_cmp);
            ex
        }
        Err(e) if e.is_numerical() => {
            eprintln!("warning: SHA unavailable: {e}");
            Vec::new()
        }
        Err(e) => return Err(e),
    };
    eprintln!(
        "dimension {}, subspace {} requested / {} used, exact ground {}, subspace ground {}",
        basis.dim(),
        run.requested,
        run.used,
        g12(exact.ground_energy()),
        g12(run.spectrum.ground_energy())
    );
    let (ex, sub) = (exact.excitations(), run.spectrum.excitations());
    let cell = |v: Option<&f64>| g12(v.copied().unwrap_or(f64::NAN));
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| vec![i.to_string(), cell(ex.get(i)), cell(sub.get(i)), cell(sha.get(i)), cell(overlaps.get(i))])
        .collect();
    write_rows(cfg.out.as_deref(), &header(&["state", "exact", "subspace", "sha", "overlap"]), &rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid_parsing() {
        let g = SweepGrid::parse("0.01:0.15:15").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 15);
        assert_eq!((p[0], p[14]), (0.01, 0.15));
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(SweepGrid::parse("0.2:0.2:1").unwrap().points(), vec![0.2]);
        for bad in ["0.1:0.05:4", "0.1:0.2:0", "0.1:0.2", "a:b:c", "0.1:0.1:3"] {
            assert!(matches!(SweepGrid::parse(bad), Err(Error::Config(_))), "{bad}");
        }
    }

    #[test]
    fn subspace_parsing() {
        let r = RankRule::DiagonalEnergy;
        assert_eq!(parse_subspace("sha-vectors:286", 10, r).unwrap(), SubspaceSpec::ShaVectors { quanta_max: 10, count: Some(286) });
        assert_eq!(parse_subspace("sha-vectors", 4, r).unwrap(), SubspaceSpec::ShaVectors { quanta_max: 4, count: None });
        assert_eq!(
            parse_subspace("su2-states:50", 10, RankRule::ShaWeight).unwrap(),
            SubspaceSpec::Su2States { count: 50, rule: RankRule::ShaWeight }
        );
        for bad in ["su2-states", "su2-states:0", "lanczos:5", "sha-vectors:x"] {
            assert!(parse_subspace(bad, 10, r).is_err(), "{bad}");
        }
    }

    #[test]
    fn sweep_columns() {
        assert_eq!(sweep_tuples(3), vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![2, 0, 0]]);
        assert!(sweep_tuples(0).is_empty());
    }
}
