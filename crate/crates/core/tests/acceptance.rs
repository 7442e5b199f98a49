//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits nonzero on any failure.

use std::time::Instant;

use bcs_sha::config::ModelConfig;
use bcs_sha::eig::diagonalize;
use bcs_sha::hamiltonian::build_hamiltonian;
use bcs_sha::model::{build_model, coupling_from_rule, enumerate_basis, LevelSpec, PairingModel};
use bcs_sha::sha::{ShaAnalysis, ShiftOptions};
use bcs_sha::subspace::{run_subspace, sample_sha_vectors, QuantaSet, RankRule, SubspaceOptions, SubspaceSpec};
use bcs_sha::{single_level_spectrum, SubspaceRun};
use nalgebra::DMatrix;

const FOUR_LEVEL: &str = r#"{"levels":[{"j":7,"epsilon":0.5},{"j":8,"epsilon":2.3},{"j":9,"epsilon":6.1},{"j":10,"epsilon":7.3}],
    "N":28,"G":{"rule":"linear-gap","g":0.15}}"#;

fn four_level(g: f64) -> PairingModel<f64> {
    ModelConfig::from_json(FOUR_LEVEL).unwrap().with_strength(g).unwrap().build().unwrap()
}

fn model(js: &[f64], eps: &[f64], g: f64, n: u32) -> PairingModel<f64> {
    let levels = js.iter().zip(eps).map(|(&j, &e)| LevelSpec::new(j, e).unwrap()).collect();
    build_model(levels, coupling_from_rule(g, eps), n).unwrap()
}

/// `|value - printed| <= one unit in the printed value's last digit`.
fn matches_printed(value: f64, printed: &str) -> bool {
    let decimals = printed.split('.').nth(1).map_or(0, str::len);
    let unit = 10f64.powi(-(decimals as i32));
    (value - printed.parse::<f64>().unwrap()).abs() <= unit * (1.0 + 1e-9)
}

fn all_printed(values: &[f64], printed: &[&str]) -> bool {
    values.len() >= printed.len() && values.iter().zip(printed).all(|(&v, p)| matches_printed(v, p))
}

fn within(values: &[f64], expected: &[f64], tol: f64) -> bool {
    values.len() >= expected.len() && values.iter().zip(expected).all(|(v, e)| (v - e).abs() <= tol + 1e-12)
}

fn fmt(values: &[f64], n: usize) -> String {
    let v: Vec<String> = values.iter().take(n).map(|x| format!("{x:.6}")).collect();
    format!("[{}]", v.join(", "))
}

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: &str, ok: bool, detail: String) {
        if !ok {
            self.failures += 1;
        }
        println!("{} [{id}] {detail}", if ok { "PASS" } else { "FAIL" });
    }
}

fn sha_lowest_excitations(sha: &ShaAnalysis<f64>, n: usize) -> Vec<f64> {
    let quanta = QuantaSet::with_cutoff(sha.modes.num_modes(), 6);
    let mut ex: Vec<f64> = quanta.tuples()[1..].iter().map(|q| sha.modes.excitation(q).unwrap()).collect();
    ex.sort_by(f64::total_cmp);
    ex.truncate(n);
    ex
}

fn su2_run(m: &PairingModel<f64>, count: usize, rule: RankRule) -> SubspaceRun {
    let b = enumerate_basis(m).unwrap();
    let h = build_hamiltonian(m, &b).unwrap();
    run_subspace(m, &b, &h, &SubspaceSpec::Su2States { count, rule }, &SubspaceOptions::default()).unwrap()
}

fn main() {
    let mut r = Report { failures: 0 };
    let opts = ShiftOptions::default();

    // 1
    let t = Instant::now();
    let m150 = four_level(0.150);
    let basis = enumerate_basis(&m150).unwrap();
    let secs = t.elapsed().as_secs_f64();
    r.line("1 basis dimension", basis.dim() == 3231 && secs < 1.0, format!("dim={} ({secs:.3}s)", basis.dim()));

    // 2
    let t = Instant::now();
    let sha150 = ShaAnalysis::new(&m150, &opts).unwrap();
    let ex = sha_lowest_excitations(&sha150, 5);
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "2 SHA excitations g=0.150",
        within(&ex, &[15.06, 16.22, 18.08, 30.12, 31.28], 0.005) && secs < 1.0,
        format!("{} ({secs:.3}s)", fmt(&ex, 5)),
    );

    // 3
    let t = Instant::now();
    let h150 = build_hamiltonian(&m150, &basis).unwrap();
    let exact150 = diagonalize(&h150, 6, false).unwrap();
    let ex = exact150.excitations()[1..].to_vec();
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "3 exact excitations g=0.150",
        all_printed(&ex, &["15.03", "16.18", "18.1", "29.5", "30.7"]) && secs < 60.0,
        format!("{} ({secs:.1}s)", fmt(&ex, 5)),
    );

    // 4
    let t = Instant::now();
    let spec = SubspaceSpec::ShaVectors { quanta_max: 10, count: None };
    let run = run_subspace(&m150, &basis, &h150, &spec, &SubspaceOptions::default()).unwrap();
    let ex = run.spectrum.excitations()[1..].to_vec();
    let secs = t.elapsed().as_secs_f64();
    r.line(
        "4 SHA-vector subspace g=0.150",
        run.requested == 286 && all_printed(&ex, &["15.03", "16.18", "18.1", "29.5", "30.7"]) && secs < 90.0,
        format!("{} vectors kept {} ({secs:.1}s)", fmt(&ex, 5), run.used),
    );

    // 5
    let m010 = four_level(0.010);
    let printed010 = ["3.650313", "6.9484", "7.38050", "9.4210", "10.5531"];
    let mut details = Vec::new();
    let mut any010 = false;
    for rule in [RankRule::DiagonalEnergy, RankRule::ShaWeight] {
        let ex = su2_run(&m010, 50, rule).spectrum.excitations()[1..].to_vec();
        let ok = all_printed(&ex, &printed010);
        any010 |= ok;
        details.push(format!("{rule}{}: {}", if ok { "" } else { " (miss)" }, fmt(&ex, 5)));
    }
    let sha010 = sha_lowest_excitations(&ShaAnalysis::new(&m010, &opts).unwrap(), 5);
    let sha_ok = within(&sha010, &[3.61, 6.90, 7.21, 9.38, 10.51], 0.005);
    let m045 = four_level(0.045);
    let printed045 = ["3.60", "5.258", "7.65", "7.8", "8.37"];
    let mut any045 = false;
    for rule in [RankRule::DiagonalEnergy, RankRule::ShaWeight] {
        let ex = su2_run(&m045, 300, rule).spectrum.excitations()[1..].to_vec();
        let ok = all_printed(&ex, &printed045);
        any045 |= ok;
        details.push(format!("g=0.045 {rule}{}: {}", if ok { "" } else { " (miss)" }, fmt(&ex, 5)));
    }
    r.line(
        "5 su(2) subspaces g=0.010/0.045",
        any010 && sha_ok && any045,
        format!("g=0.010 {}; SHA {}; {}", details[0..2].join("; "), fmt(&sha010, 5), details[2..].join("; ")),
    );

    // 6
    let steps = 141;
    let mut crossings = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for s in 0..steps {
        let g = 0.01 + 0.14 * s as f64 / (steps - 1) as f64;
        let w = ShaAnalysis::new(&four_level(g), &opts).unwrap().modes.omega;
        let diff = 2.0 * w[0] - w[2];
        if let Some((pg, pd)) = prev {
            if pd.signum() != diff.signum() {
                crossings.push(pg - pd * (g - pg) / (diff - pd));
            }
        }
        prev = Some((g, diff));
    }
    let inside = crossings.iter().any(|&g| (0.04..=0.06).contains(&g));
    r.line("6 {2,0,0}/{0,0,1} crossover", inside, format!("sign changes of 2w1-w3 at g={crossings:.4?}"));

    // 7
    properties(&mut r, &m150, &sha150, &exact150.eigenvalues);

    // 8
    let m2 = model(&[10.0, 14.0], &[0.0, 1.0], 0.5, 12);
    let b2 = enumerate_basis(&m2).unwrap();
    let exact2 = diagonalize(&build_hamiltonian(&m2, &b2).unwrap(), 1, true).unwrap();
    let sha2 = ShaAnalysis::new(&m2, &opts).unwrap();
    let nu0 = sample_sha_vectors(&sha2.modes, &b2, &QuantaSet::first(1, 1)).unwrap();
    let overlap = nu0.vectors[0].dot(&exact2.eigenvectors.unwrap().column(0)).abs();
    r.line("8 two-level ground overlap", overlap >= 0.95, format!("|<sha|exact>|={overlap:.6} (threshold 0.95) dim={}", b2.dim()));

    println!("{} failure(s)", r.failures);
    if r.failures > 0 {
        std::process::exit(1);
    }
}

fn properties(r: &mut Report, m150: &PairingModel<f64>, sha150: &ShaAnalysis<f64>, exact150: &[f64]) {
    let opts = ShiftOptions::default();

    // (a)
    let a = &sha150.tensors.a;
    let norm = a.norm();
    let rows = (0..a.nrows()).map(|p| a.row(p).sum().abs()).fold(0.0, f64::max);
    let eig = a.clone().symmetric_eigen().eigenvalues;
    let zero = eig.iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    r.line("7a inverse-mass zero mode", rows <= 1e-12 * norm && zero <= 1e-12 * norm, format!("max row sum {rows:.1e}, min |eig| {zero:.1e}, |A| {norm:.2}"));

    // (b)
    let modes = &sha150.modes;
    let mut worst: f64 = 0.0;
    for q in QuantaSet::with_cutoff(3, 10).tuples() {
        let sum: f64 = q.iter().zip(&modes.omega).map(|(&n, w)| n as f64 * w).sum();
        worst = worst.max((modes.excitation(q).unwrap() - sum).abs() / sum.max(1.0));
    }
    r.line("7b harmonic additivity", worst <= 1e-12, format!("max rel deviation {worst:.1e}"));

    // (c)
    let mut ok = true;
    let mut prev: Option<Vec<f64>> = None;
    let mut worst_bound: f64 = f64::INFINITY;
    for count in [20, 60, 150, 400] {
        let ev = su2_run(m150, count, RankRule::DiagonalEnergy).spectrum.eigenvalues;
        for (i, &v) in ev.iter().enumerate() {
            worst_bound = worst_bound.min(v - exact150.get(i).copied().unwrap_or(f64::NEG_INFINITY));
        }
        if let Some(p) = &prev {
            ok &= p.iter().zip(&ev).all(|(a, b)| *b <= a + 1e-10);
        }
        prev = Some(ev);
    }
    ok &= worst_bound >= -1e-10;
    let basis = enumerate_basis(m150).unwrap();
    let h = build_hamiltonian(m150, &basis).unwrap();
    let mut sha_prev: Option<Vec<f64>> = None;
    for count in [10, 35, 120] {
        let spec = SubspaceSpec::ShaVectors { quanta_max: 0, count: Some(count) };
        let ev = run_subspace(m150, &basis, &h, &spec, &SubspaceOptions::default()).unwrap().spectrum.eigenvalues;
        ok &= ev.iter().zip(exact150).all(|(v, e)| v - e >= -1e-10);
        if let Some(p) = &sha_prev {
            ok &= p.iter().zip(&ev).all(|(a, b)| *b <= a + 1e-10);
        }
        sha_prev = Some(ev);
    }
    r.line("7c Ritz bounds and monotonicity", ok, format!("min (ritz - exact) {worst_bound:.2e}"));

    // (d)
    let mut worst: f64 = 0.0;
    for (twice_j, eps, g, n) in [(15u32, 0.7f64, 0.3f64, 5u32), (8, -0.4, 1.1, 4), (21, 2.0, 0.05, 17)] {
        let levels = vec![LevelSpec::from_twice_j(twice_j, eps, 0).unwrap()];
        let m = build_model(levels, DMatrix::from_element(1, 1, g), n).unwrap();
        let b = enumerate_basis(&m).unwrap();
        let e = diagonalize(&build_hamiltonian(&m, &b).unwrap(), 1, false).unwrap().eigenvalues[0];
        let oracle: f64 = single_level_spectrum(twice_j, eps, g)[n as usize];
        worst = worst.max((e - oracle).abs() / oracle.abs().max(1e-300));
    }
    r.line("7d single-level oracle", worst <= 1e-13, format!("max rel deviation {worst:.1e}"));

    // (e)
    let mut worst: f64 = 0.0;
    for (tjs, n) in [(vec![1u32, 1], 1u32), (vec![1, 3], 2), (vec![3, 3], 3), (vec![3, 2], 2), (vec![3], 1), (vec![2], 1)] {
        let k = tjs.len();
        let levels = tjs.iter().enumerate().map(|(p, &t)| LevelSpec::from_twice_j(t, 0.3 + 1.1 * p as f64, 0).unwrap()).collect();
        let g = DMatrix::from_fn(k, k, |p, q| 0.25 + 0.15 * (p + q) as f64);
        let m = build_model(levels, g, n).unwrap();
        let b = enumerate_basis(&m).unwrap();
        let h = build_hamiltonian(&m, &b).unwrap().to_dense();
        let (full, occs) = generator_oracle(&m);
        let sel: Vec<usize> = (0..b.dim()).map(|i| occs.iter().position(|o| o.as_slice() == b.occupations(i)).unwrap()).collect();
        for a in 0..b.dim() {
            for c in 0..b.dim() {
                worst = worst.max((h[(a, c)] - full[(sel[a], sel[c])]).abs());
            }
        }
    }
    r.line("7e generator-matrix oracle", worst <= 1e-13, format!("max deviation {worst:.1e}"));

    // (f)
    let small = model(&[2.0, 3.5, 2.5], &[0.2, 1.5, 3.0], 0.3, 5);
    let c = 2.5;
    let scaled = small.scaled(c);
    let s1 = ShaAnalysis::new(&small, &opts).unwrap();
    let s2 = ShaAnalysis::new(&scaled, &opts).unwrap();
    let dx = s1.shift.x0.iter().zip(&s2.shift.x0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let dw = s1.modes.omega.iter().zip(&s2.modes.omega).map(|(a, b)| (c * a - b).abs() / b).fold(0.0, f64::max);
    let spectrum = |m: &PairingModel<f64>| {
        let b = enumerate_basis(m).unwrap();
        let h = build_hamiltonian(m, &b).unwrap();
        diagonalize(&h, b.dim(), false).unwrap().eigenvalues
    };
    let (e1, e2) = (spectrum(&small), spectrum(&scaled));
    let de = e1.iter().zip(&e2).map(|(a, b)| (c * a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
    r.line("7f scale covariance", dx <= 1e-10 && dw <= 1e-10 && de <= 1e-10, format!("x0 {dx:.1e}, omega {dw:.1e}, energies {de:.1e}"));

    // (g)
    let perm = [2, 0, 1];
    let permuted = small.permuted(&perm).unwrap();
    let sp = ShaAnalysis::new(&permuted, &opts).unwrap();
    let dw = s1.modes.omega.iter().zip(&sp.modes.omega).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let ep = spectrum(&permuted);
    let de = e1.iter().zip(&ep).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    r.line("7g permutation invariance", dw <= 1e-10 && de <= 1e-10, format!("omega {dw:.1e}, energies {de:.1e}"));
}

fn generators(twice_j: usize) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = twice_j + 1;
    let j = twice_j as f64 / 2.0;
    let mut jz = DMatrix::zeros(d, d);
    let mut jp = DMatrix::zeros(d, d);
    for a in 0..d {
        let m = a as f64 - j;
        jz[(a, a)] = m;
        if a + 1 < d {
            jp[(a + 1, a)] = ((j - m) * (j + m + 1.0)).sqrt();
        }
    }
    (jz, jp)
}

/// Hamiltonian on the full tensor product of quasi-spin multiplets, built from explicit generator matrices.
fn generator_oracle(m: &PairingModel<f64>) -> (DMatrix<f64>, Vec<Vec<u32>>) {
    let tj = m.twice_j_effs();
    let dims: Vec<usize> = tj.iter().map(|&t| t as usize + 1).collect();
    let gens: Vec<_> = tj.iter().map(|&t| generators(t as usize)).collect();
    let embed = |p: usize, op: &DMatrix<f64>| {
        (0..dims.len())
            .map(|q| if q == p { op.clone() } else { DMatrix::identity(dims[q], dims[q]) })
            .reduce(|acc, o| acc.kronecker(&o))
            .unwrap()
    };
    let total: usize = dims.iter().product();
    let mut h = DMatrix::zeros(total, total);
    for p in 0..dims.len() {
        let jp = embed(p, &gens[p].1);
        let n = (embed(p, &gens[p].0) + DMatrix::identity(total, total) * m.j_effs()[p]) * 2.0;
        h += n * m.level(p).epsilon;
        for q in 0..dims.len() {
            h -= &jp * embed(q, &gens[q].1.transpose()) * m.coupling()[(p, q)];
        }
    }
    let occs = (0..total)
        .map(|idx| {
            let mut rem = idx;
            let mut occ = vec![0u32; dims.len()];
            for p in (0..dims.len()).rev() {
                occ[p] = (rem % dims[p]) as u32;
                rem /= dims[p];
            }
            occ
        })
        .collect();
    (h, occs)
}
