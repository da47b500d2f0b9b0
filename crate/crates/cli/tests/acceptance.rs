//! Acceptance battery: one PASS/FAIL line per criterion. Exits non-zero if
//! any criterion fails.

use std::f64::consts::TAU;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use negmono_core::boundary::{
    classify_triple, closed_form_root, implicit_surface_eval, parametric_boundary_triple,
    polar_grid, quartic_determinant, quartic_eval,
};
use negmono_core::explorer::{
    derive_seed, perturbation_search, qubit_boundary_bases, qudit_boundary_bases, sample_triples,
    SearchBase,
};
use negmono_core::linalg::{determinant, hermitian_eigenvalues, partial_transpose};
use negmono_core::measures::{
    marginal_spectra, monogamy_residual, negativity, negativity_triple, pure_cut_negativity,
};
use negmono_core::qudit::{
    asymptotic_check, higuchi_residual, n_abc_closed_form, pt_block_decompose, pt_determinants,
    Pair,
};
use negmono_core::states::{
    acin_state, named_state, qudit_family_state, AcinParams, NamedState, QuditFamilyParams,
};
use negmono_core::{Region, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const MONOGAMY_FLOOR: f64 = -1e-10;
const MONOGAMY_SAMPLES: usize = 100_000;
const MONOGAMY_SEED: u64 = 42;
const MONOGAMY_BUDGET: Duration = Duration::from_secs(120);
const QUARTIC_TOL: f64 = 1e-9;
const PARAMETRIC_TOL: f64 = 1e-10;
const IMPLICIT_TOL: f64 = 1e-8;
const ROOT_TOL: f64 = 1e-10;
const ROOT_B0_TOL: f64 = 1e-12;
const W_TRIPLE_TOL: f64 = 1e-10;
const W_RESIDUAL: f64 = 0.5493635;
const W_RESIDUAL_TOL: f64 = 1e-6;
const SPECTRUM_TOL: f64 = 1e-10;
const N_ABC_TOL: f64 = 1e-9;
const DET_REL_TOL: f64 = 1e-8;
const HIGUCHI_TOL: f64 = 1e-10;
/// Below-threshold residuals must clear eigensolver noise by this much.
const HIGUCHI_POSITIVE: f64 = 1e-10;
const ASYMPTOTIC_SPREAD: f64 = 2.0;
const SEARCH_TOL: f64 = 1e-7;
const SEARCH_BASES: usize = 100;
const SEARCH_TRIALS: usize = 10_000;
const SEARCH_STEP: f64 = 1e-2;
const DRAWS: usize = 100;

struct Verdict {
    pass: bool,
    detail: String,
}

type Criterion = (&'static str, fn() -> Result<Verdict>);

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("monogamy", monogamy),
        ("quartic_identity", quartic_identity),
        ("parametric_implicit", parametric_implicit),
        ("closed_form_root", closed_root),
        ("w_tightness", w_tightness),
        ("qudit_blocks", qudit_blocks),
        ("higuchi_saturation", higuchi),
        ("asymptotics", asymptotics),
        ("conjecture_probe", conjecture_probe),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let v = run().unwrap_or_else(|e| verdict(false, format!("error: {e}")));
        if !v.pass {
            failed += 1;
        }
        let status = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "{status} {name}: {} [{:.1}s]",
            v.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xACCE_0000 + salt)
}

fn random_acin(r: &mut impl Rng) -> Result<AcinParams> {
    let w = C64::from_polar(r.random::<f64>(), r.random_range(0.0..TAU));
    AcinParams::normalized(r.random(), r.random(), r.random(), r.random(), w)
}

fn monogamy() -> Result<Verdict> {
    let start = Instant::now();
    let records = sample_triples(2, MONOGAMY_SAMPLES, MONOGAMY_SEED)?;
    let elapsed = start.elapsed();
    let min_n = records
        .iter()
        .map(|r| monogamy_residual(&r.triple))
        .fold(f64::INFINITY, f64::min);
    let min_c = records
        .iter()
        .map(|r| {
            r.concurrence
                .as_ref()
                .map_or(f64::NEG_INFINITY, monogamy_residual)
        })
        .fold(f64::INFINITY, f64::min);
    let pass = min_n >= MONOGAMY_FLOOR && min_c >= MONOGAMY_FLOOR && elapsed < MONOGAMY_BUDGET;
    Ok(verdict(
        pass,
        format!(
            "n={} min_negativity_residual={min_n:.3e} min_concurrence_residual={min_c:.3e} floor={MONOGAMY_FLOOR:e} \
             time={:.1}s budget={}s",
            records.len(),
            elapsed.as_secs_f64(),
            MONOGAMY_BUDGET.as_secs()
        ),
    ))
}

fn quartic_identity() -> Result<Verdict> {
    let mut r = rng(1);
    let mut worst_root: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_acin(&mut r)?;
        let x = negativity(&acin_state(&p)?.reduced(&[0, 2])?, (2, 2))?;
        worst_root = worst_root.max(quartic_eval(&p, x).abs());
    }
    let mut worst_det: f64 = 0.0;
    for _ in 0..1_000 {
        let p = random_acin(&mut r)?;
        let x = r.random_range(-2.0..2.0);
        worst_det = worst_det.max((quartic_eval(&p, x) - quartic_determinant(&p, x)?).abs());
    }
    Ok(verdict(
        worst_root < QUARTIC_TOL && worst_det < QUARTIC_TOL,
        format!("max|P(N_oracle)|={worst_root:.3e} max|P-det|={worst_det:.3e} tol={QUARTIC_TOL:e}"),
    ))
}

fn parametric_implicit() -> Result<Verdict> {
    let rows = polar_grid(200, 1.0)?
        .into_par_iter()
        .map(|(a, b)| -> Result<(f64, f64)> {
            let t = parametric_boundary_triple(a, b)?;
            let oracle = negativity_triple(&acin_state(&AcinParams::boundary(a, b)?)?)?;
            let (x, y, z) = t.unsquared();
            Ok((
                t.max_abs_diff(&oracle),
                implicit_surface_eval(x, y, z).abs(),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let dev = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let res = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(verdict(
        dev < PARAMETRIC_TOL && res < IMPLICIT_TOL,
        format!(
            "points={} max_oracle_dev={dev:.3e} tol={PARAMETRIC_TOL:e} max_implicit={res:.3e} tol={IMPLICIT_TOL:e}",
            rows.len()
        ),
    ))
}

fn closed_root() -> Result<Verdict> {
    let mut r = rng(2);
    let (mut worst, mut worst_b0): (f64, f64) = (0.0, 0.0);
    let mut n = 0;
    while n < 10_000 {
        let (a, b): (f64, f64) = (r.random(), r.random());
        if a * a + b * b > 1.0 {
            continue;
        }
        n += 1;
        let p = AcinParams::boundary(a, b)?;
        let oracle = negativity(&acin_state(&p)?.reduced(&[0, 2])?, (2, 2))?;
        worst = worst.max((closed_form_root(p.a, p.b, p.d) - oracle).abs());
        worst_b0 = worst_b0.max((closed_form_root(p.a, 0.0, p.d) - 2.0 * p.a * p.d).abs());
    }
    Ok(verdict(
        worst < ROOT_TOL && worst_b0 < ROOT_B0_TOL,
        format!("draws={n} max_dev={worst:.3e} tol={ROOT_TOL:e} max_b0_dev={worst_b0:.3e} tol={ROOT_B0_TOL:e}"),
    ))
}

fn w_tightness() -> Result<Verdict> {
    let t = negativity_triple(&named_state(NamedState::W))?;
    let pair = (5f64.sqrt() - 1.0).powi(2) / 9.0;
    let dev = (t.n_ac_sq - pair)
        .abs()
        .max((t.n_ab_sq - pair).abs())
        .max((t.n_abc_sq - 8.0 / 9.0).abs());
    let (x, y, z) = t.unsquared();
    let linear = monogamy_residual(&t);
    let implicit = implicit_surface_eval(x, y, z);
    let region = classify_triple(&t)?;
    let pass = dev < W_TRIPLE_TOL
        && linear > 0.5
        && (linear - W_RESIDUAL).abs() < W_RESIDUAL_TOL
        && region == Region::OnBoundary
        && implicit.abs() < IMPLICIT_TOL;
    Ok(verdict(
        pass,
        format!("triple_dev={dev:.3e} linear_residual={linear:.7} region={region} implicit={implicit:.3e}"),
    ))
}

fn random_family(dim: usize, r: &mut impl Rng) -> Result<QuditFamilyParams> {
    QuditFamilyParams::normalized(dim, r.random(), r.random(), r.random(), r.random())
}

fn qudit_blocks() -> Result<Verdict> {
    let mut r = rng(3);
    let (mut spec, mut nabc, mut det): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for dim in 2..=6 {
        for _ in 0..DRAWS {
            let p = random_family(dim, &mut r)?;
            let psi = qudit_family_state(&p)?;
            let (det_ac, det_ab) = pt_determinants(&p);
            for (pair, keep, closed) in [(Pair::AC, [0, 2], det_ac), (Pair::AB, [0, 1], det_ab)] {
                let pt = partial_transpose(&psi.reduced(&keep)?, (dim, dim))?;
                let blocks = pt_block_decompose(&p, pair)?.spectrum()?;
                let full = hermitian_eigenvalues(&pt)?;
                if blocks.len() != full.len() {
                    spec = f64::INFINITY;
                }
                for (x, y) in blocks.values().iter().zip(full.values()) {
                    spec = spec.max((x - y).abs());
                }
                let brute = determinant(&pt)?.re;
                det = det.max(((closed - brute) / brute).abs());
            }
            nabc = nabc.max((n_abc_closed_form(&p) - pure_cut_negativity(&psi)?).abs());
        }
    }
    Ok(verdict(
        spec < SPECTRUM_TOL && nabc < N_ABC_TOL && det < DET_REL_TOL,
        format!(
            "D=2..6 draws={DRAWS} spectrum={spec:.3e} tol={SPECTRUM_TOL:e} n_abc={nabc:.3e} tol={N_ABC_TOL:e} \
             det_rel={det:.3e} tol={DET_REL_TOL:e}"
        ),
    ))
}

/// A `c = 0` family member with `(D-1)(a^2+b^2)` uniform in `[lo, hi]`.
fn family_in_shell(dim: usize, lo: f64, hi: f64, r: &mut impl Rng) -> Result<QuditFamilyParams> {
    let rho = (r.random_range(lo..hi) / (dim - 1) as f64).sqrt();
    let phi = r.random_range(0.0..std::f64::consts::FRAC_PI_2);
    QuditFamilyParams::boundary(dim, rho * phi.cos(), rho * phi.sin())
}

fn higuchi() -> Result<Verdict> {
    let mut r = rng(4);
    let mut above: f64 = 0.0;
    let mut below = f64::INFINITY;
    for dim in 2..=6 {
        // d^2 = 1 - (D-1)(a^2+b^2), so the threshold d^2 = 1/D sits at 1 - 1/D.
        let edge = 1.0 - 1.0 / dim as f64;
        for _ in 0..DRAWS {
            let p = family_in_shell(dim, 0.0, 0.99 * edge, &mut r)?;
            above = above.max(
                higuchi_residual(&marginal_spectra(&qudit_family_state(&p)?)?)
                    .0
                    .abs(),
            );
            let q = family_in_shell(dim, edge + 0.01 * (1.0 - edge), 1.0, &mut r)?;
            below = below.min(higuchi_residual(&marginal_spectra(&qudit_family_state(&q)?)?).0);
        }
    }
    Ok(verdict(
        above < HIGUCHI_TOL && below > HIGUCHI_POSITIVE,
        format!("above_threshold_max|res|={above:.3e} tol={HIGUCHI_TOL:e} below_threshold_min_res={below:.3e}"),
    ))
}

fn spread(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    max / min
}

fn asymptotics() -> Result<Verdict> {
    const DIMS: [usize; 4] = [8, 16, 32, 64];
    let mut worst_d: f64 = 0.0;
    let mut worst_root: f64 = 0.0;
    let mut cases = Vec::new();
    for (alpha, beta) in [(0.5, 0.3), (0.3, 0.3), (0.7, 0.2)] {
        let r: Vec<(f64, f64)> = DIMS
            .iter()
            .map(|&d| asymptotic_check(d, alpha, beta))
            .collect::<Result<_>>()?;
        let by = |f: &dyn Fn(f64) -> f64, pick: fn(&(f64, f64)) -> f64| -> Vec<f64> {
            DIMS.iter()
                .zip(&r)
                .map(|(&d, x)| pick(x) * f(d as f64))
                .collect()
        };
        for pick in [|x: &(f64, f64)| x.0, |x: &(f64, f64)| x.1] {
            worst_d = worst_d.max(spread(&by(&|d| d, pick)));
            worst_root = worst_root.max(spread(&by(&|d| d.sqrt(), pick)));
        }
        let r2d: Vec<String> = DIMS
            .iter()
            .zip(&r)
            .map(|(&d, x)| format!("{:.3}", x.1 * d as f64))
            .collect();
        cases.push(format!("({alpha},{beta}):r2*D=[{}]", r2d.join(",")));
    }
    Ok(verdict(
        worst_d < ASYMPTOTIC_SPREAD,
        format!(
            "max_spread(r*D)={worst_d:.3} limit={ASYMPTOTIC_SPREAD} max_spread(r*sqrt D)={worst_root:.3} {}",
            cases.join(" ")
        ),
    ))
}

fn search_all(bases: Vec<SearchBase>, seed: u64) -> Result<Vec<negmono_core::SearchReport>> {
    bases
        .into_par_iter()
        .enumerate()
        .map(|(k, base)| {
            perturbation_search(
                base,
                SEARCH_TRIALS,
                SEARCH_STEP,
                derive_seed(seed, k as u64),
            )
        })
        .collect()
}

fn conjecture_probe() -> Result<Verdict> {
    let qubit = search_all(
        qubit_boundary_bases(SEARCH_BASES, 1)?
            .into_iter()
            .map(SearchBase::Qubit)
            .collect(),
        1,
    )?;
    let qubit_max = qubit
        .iter()
        .map(|r| r.max_excess)
        .fold(f64::NEG_INFINITY, f64::max);

    let qutrit = search_all(
        qudit_boundary_bases(3, SEARCH_BASES, 3)?
            .into_iter()
            .map(SearchBase::Qudit)
            .collect(),
        3,
    )?;
    let qutrit_max = qutrit
        .iter()
        .map(|r| r.max_excess)
        .fold(f64::NEG_INFINITY, f64::max);
    let findings = qutrit.iter().filter(|r| r.max_excess > SEARCH_TOL).count();
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join("qutrit_findings.json");
    let json = serde_json::to_string_pretty(&qutrit).expect("reports serialize");
    std::fs::write(&path, json)?;

    Ok(verdict(
        qubit_max <= SEARCH_TOL && qutrit.len() == SEARCH_BASES,
        format!(
            "bases={SEARCH_BASES} trials={SEARCH_TRIALS} qubit_max_excess={qubit_max:.3e} tol={SEARCH_TOL:e} \
             qutrit_max_excess={qutrit_max:.3e} qutrit_findings={findings} report={}",
            path.display()
        ),
    ))
}

fn determinism() -> Result<Verdict> {
    let dir = tempfile::tempdir()?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}.csv"));
        let status = Command::new(env!("CARGO_BIN_EXE_negmono"))
            .args([
                "sample", "--dims", "2", "--n", "1000", "--seed", "7", "--out",
            ])
            .arg(&out)
            .output()?
            .status;
        if !status.success() {
            return Ok(verdict(false, format!("run {k} exited with {status}")));
        }
        outputs.push(std::fs::read(&out)?);
    }
    Ok(verdict(
        outputs[0] == outputs[1],
        format!(
            "bytes={} identical={}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    ))
}
