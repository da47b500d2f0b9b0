//! The `verify` battery. Every check reports its worst error against a pinned
//! tolerance, and a manifest lists the library operations the battery must
//! touch; a suite whose checks leave an operation uncovered fails.

use std::collections::BTreeSet;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use negmono_core::boundary::{
    boundary_curve, classify_triple, closed_form_root, implicit_surface_eval,
    parametric_boundary_triple, polar_grid, quartic_eval, stationarity_residuals, BoundaryFamily,
};
use negmono_core::explorer::{
    emit_dataset, perturbation_search, qubit_boundary_bases, read_dataset, region_fill_sweep,
    sample_triples, Format, SearchBase,
};
use negmono_core::linalg::{
    density_from_pure, determinant, hermitian_eigenvalues, partial_trace, partial_transpose,
    tensor_product,
};
use negmono_core::measures::{
    concurrence_pure_cut, concurrence_triple, marginal_spectra, monogamy_residual,
    n_abc_squared_closed_form, negativity, negativity_triple, wootters_concurrence,
};
use negmono_core::qudit::{
    asymptotic_check, higuchi_residual, n_abc_closed_form, pt_block_decompose, pt_determinants,
    qudit_negativity_triple, swap_surface_scan, Pair,
};
use negmono_core::states::{
    acin_state, haar_random_pure, named_state, qudit_family_state, swap_family_state, AcinParams,
    NamedState, QuditFamilyParams, SwapFamilyParams,
};
use negmono_core::{ComplexMatrix, PureState, Result, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{EXIT_FAILED, EXIT_OK};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    All,
    Linalg,
    States,
    Measures,
    Boundary,
    Qudit,
    Explorer,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Self::All => "all",
            Self::Linalg => "linalg",
            Self::States => "states",
            Self::Measures => "measures",
            Self::Boundary => "boundary",
            Self::Qudit => "qudit",
            Self::Explorer => "explorer",
        }
    }
}

/// Every operation the battery is required to exercise, by module.
pub const MANIFEST: &[(Suite, &str)] = &[
    (Suite::Linalg, "tensor_product"),
    (Suite::Linalg, "density_from_pure"),
    (Suite::Linalg, "partial_trace"),
    (Suite::Linalg, "partial_transpose"),
    (Suite::Linalg, "hermitian_eigenvalues"),
    (Suite::States, "acin_state"),
    (Suite::States, "qudit_family_state"),
    (Suite::States, "swap_family_state"),
    (Suite::States, "haar_random_pure"),
    (Suite::States, "named_state"),
    (Suite::Measures, "negativity"),
    (Suite::Measures, "negativity_triple"),
    (Suite::Measures, "n_abc_squared_closed_form"),
    (Suite::Measures, "concurrence_pure_cut"),
    (Suite::Measures, "wootters_concurrence"),
    (Suite::Measures, "concurrence_triple"),
    (Suite::Measures, "monogamy_residual"),
    (Suite::Measures, "marginal_spectra"),
    (Suite::Boundary, "quartic_eval"),
    (Suite::Boundary, "stationarity_residuals"),
    (Suite::Boundary, "closed_form_root"),
    (Suite::Boundary, "parametric_boundary_triple"),
    (Suite::Boundary, "implicit_surface_eval"),
    (Suite::Boundary, "boundary_curve"),
    (Suite::Boundary, "classify_triple"),
    (Suite::Qudit, "pt_block_decompose"),
    (Suite::Qudit, "qudit_negativity_triple"),
    (Suite::Qudit, "n_abc_closed_form"),
    (Suite::Qudit, "pt_determinants"),
    (Suite::Qudit, "higuchi_residual"),
    (Suite::Qudit, "asymptotic_check"),
    (Suite::Qudit, "swap_surface_scan"),
    (Suite::Explorer, "sample_triples"),
    (Suite::Explorer, "region_fill_sweep"),
    (Suite::Explorer, "perturbation_search"),
    (Suite::Explorer, "emit_dataset"),
];

/// Worst error of a check and the bound it must not exceed.
struct Outcome {
    value: f64,
    tol: f64,
}

struct Check {
    suite: Suite,
    name: &'static str,
    covers: &'static [&'static str],
    run: fn(u64) -> Result<Outcome>,
}

const CHECKS: &[Check] = &[
    Check {
        suite: Suite::Linalg,
        name: "tensor_identity",
        covers: &["tensor_product"],
        run: tensor_identity,
    },
    Check {
        suite: Suite::Linalg,
        name: "bell_reductions",
        covers: &[
            "density_from_pure",
            "partial_trace",
            "partial_transpose",
            "hermitian_eigenvalues",
        ],
        run: bell_reductions,
    },
    Check {
        suite: Suite::Linalg,
        name: "spectrum_sums_to_trace",
        covers: &["hermitian_eigenvalues"],
        run: spectrum_trace,
    },
    Check {
        suite: Suite::Linalg,
        name: "partial_transpose_involution",
        covers: &["partial_transpose"],
        run: pt_involution,
    },
    Check {
        suite: Suite::States,
        name: "constructors_normalized",
        covers: &[
            "acin_state",
            "qudit_family_state",
            "swap_family_state",
            "haar_random_pure",
            "named_state",
        ],
        run: constructors_normalized,
    },
    Check {
        suite: Suite::States,
        name: "acin_matches_qubit_family",
        covers: &["acin_state", "qudit_family_state"],
        run: acin_matches_family,
    },
    Check {
        suite: Suite::States,
        name: "swap_quarter_turn",
        covers: &["swap_family_state"],
        run: swap_quarter_turn,
    },
    Check {
        suite: Suite::Measures,
        name: "haar_monogamy",
        covers: &[
            "negativity_triple",
            "concurrence_triple",
            "monogamy_residual",
        ],
        run: haar_monogamy,
    },
    Check {
        suite: Suite::Measures,
        name: "maximally_entangled_negativity",
        covers: &["negativity"],
        run: max_entangled,
    },
    Check {
        suite: Suite::Measures,
        name: "n_abc_closed_form",
        covers: &["n_abc_squared_closed_form"],
        run: n_abc_qubit,
    },
    Check {
        suite: Suite::Measures,
        name: "pure_pair_concurrence",
        covers: &["concurrence_pure_cut", "wootters_concurrence"],
        run: pure_pair_concurrence,
    },
    Check {
        suite: Suite::Measures,
        name: "concurrence_dominates_negativity",
        covers: &["wootters_concurrence", "negativity"],
        run: concurrence_dominates,
    },
    Check {
        suite: Suite::Measures,
        name: "marginal_spectra",
        covers: &["marginal_spectra"],
        run: marginals,
    },
    Check {
        suite: Suite::Boundary,
        name: "quartic_root",
        covers: &["quartic_eval"],
        run: quartic_root,
    },
    Check {
        suite: Suite::Boundary,
        name: "stationarity_derivatives",
        covers: &["stationarity_residuals"],
        run: stationarity,
    },
    Check {
        suite: Suite::Boundary,
        name: "closed_form_root",
        covers: &["closed_form_root"],
        run: closed_root,
    },
    Check {
        suite: Suite::Boundary,
        name: "parametric_implicit",
        covers: &["parametric_boundary_triple", "implicit_surface_eval"],
        run: parametric_implicit,
    },
    Check {
        suite: Suite::Boundary,
        name: "curve_endpoints",
        covers: &["boundary_curve"],
        run: curve_endpoints,
    },
    Check {
        suite: Suite::Boundary,
        name: "haar_never_outside",
        covers: &["classify_triple"],
        run: haar_classify,
    },
    Check {
        suite: Suite::Qudit,
        name: "block_spectra",
        covers: &["pt_block_decompose"],
        run: block_spectra,
    },
    Check {
        suite: Suite::Qudit,
        name: "qudit_closed_forms",
        covers: &[
            "qudit_negativity_triple",
            "n_abc_closed_form",
            "pt_determinants",
        ],
        run: qudit_closed_forms,
    },
    Check {
        suite: Suite::Qudit,
        name: "higuchi",
        covers: &["higuchi_residual"],
        run: higuchi,
    },
    Check {
        suite: Suite::Qudit,
        name: "asymptotic_root_scaling",
        covers: &["asymptotic_check"],
        run: asymptotics,
    },
    Check {
        suite: Suite::Qudit,
        name: "swap_fold",
        covers: &["swap_surface_scan"],
        run: swap_fold,
    },
    Check {
        suite: Suite::Explorer,
        name: "sampling_round_trip",
        covers: &["sample_triples", "emit_dataset"],
        run: sampling_round_trip,
    },
    Check {
        suite: Suite::Explorer,
        name: "region_fill",
        covers: &["region_fill_sweep"],
        run: region_fill,
    },
    Check {
        suite: Suite::Explorer,
        name: "qubit_search",
        covers: &["perturbation_search"],
        run: qubit_search,
    },
];

/// Runs the selected checks and prints one line per check plus a summary.
pub(crate) fn run_suite(suite: Suite, seed: u64) -> i32 {
    let selected = |s: Suite| suite == Suite::All || suite == s;
    let mut covered = BTreeSet::new();
    let mut failed = 0;
    let mut ran = 0;
    for check in CHECKS.iter().filter(|c| selected(c.suite)) {
        ran += 1;
        let (status, detail) = match (check.run)(seed) {
            Ok(o) if o.value <= o.tol => ("pass", format!("value={:e} tol={:e}", o.value, o.tol)),
            Ok(o) => ("fail", format!("value={:e} tol={:e}", o.value, o.tol)),
            Err(e) => ("fail", format!("error=\"{e}\"")),
        };
        if status == "pass" {
            covered.extend(check.covers.iter().copied());
        } else {
            failed += 1;
        }
        println!(
            "CHECK={} SUITE={} STATUS={status} {detail}",
            check.name,
            check.suite.name()
        );
    }
    let required: Vec<&str> = MANIFEST
        .iter()
        .filter(|(s, _)| selected(*s))
        .map(|&(_, op)| op)
        .collect();
    let missing: Vec<&str> = required
        .iter()
        .copied()
        .filter(|op| !covered.contains(op))
        .collect();
    println!("CHECKS_RUN={ran}");
    println!("CHECKS_FAILED={failed}");
    println!(
        "COVERAGE={}/{}",
        required.len() - missing.len(),
        required.len()
    );
    if !missing.is_empty() {
        println!("MISSING={}", missing.join(","));
    }
    let ok = failed == 0 && missing.is_empty();
    println!("STATUS={}", if ok { "pass" } else { "fail" });
    if ok {
        EXIT_OK
    } else {
        EXIT_FAILED
    }
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn random_acin(r: &mut impl Rng) -> Result<AcinParams> {
    let w = C64::from_polar(r.random::<f64>(), r.random_range(-3.2..3.2));
    AcinParams::normalized(r.random(), r.random(), r.random(), r.random(), w)
}

fn random_family(dim: usize, r: &mut impl Rng) -> Result<QuditFamilyParams> {
    QuditFamilyParams::normalized(dim, r.random(), r.random(), r.random(), r.random())
}

fn bell() -> Result<PureState> {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    let z = C64::new(0.0, 0.0);
    PureState::new([2, 2, 1], vec![s, z, z, s])
}

fn tensor_identity(_: u64) -> Result<Outcome> {
    let t = tensor_product(&ComplexMatrix::identity(2), &ComplexMatrix::identity(3))?;
    Ok(Outcome {
        value: t.max_abs_diff(&ComplexMatrix::identity(6)),
        tol: 0.0,
    })
}

fn bell_reductions(_: u64) -> Result<Outcome> {
    let rho = density_from_pure(&bell()?)?;
    let half = ComplexMatrix::from_diag(&[0.5, 0.5]);
    let reduced = partial_trace(&rho, &[2, 2], &[0])?.max_abs_diff(&half);
    let spec = hermitian_eigenvalues(&partial_transpose(&rho, (2, 2))?)?;
    let expected = [-0.5, 0.5, 0.5, 0.5];
    let eig = spec
        .values()
        .iter()
        .zip(expected)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(Outcome {
        value: reduced.max(eig),
        tol: 1e-12,
    })
}

fn random_density(d: usize, seed: u64) -> Result<ComplexMatrix> {
    haar_random_pure([d, d, d], seed)?.reduced(&[0, 1])
}

fn spectrum_trace(seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let rho = random_density(2 + (k % 3) as usize, seed.wrapping_add(k))?;
        worst = worst.max((hermitian_eigenvalues(&rho)?.sum() - rho.trace().re).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn pt_involution(seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let rho = random_density(3, seed.wrapping_add(k))?;
        let twice = partial_transpose(&partial_transpose(&rho, (3, 3))?, (3, 3))?;
        worst = worst.max(twice.max_abs_diff(&rho));
    }
    Ok(Outcome {
        value: worst,
        tol: 0.0,
    })
}

fn constructors_normalized(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 1);
    let mut worst: f64 = 0.0;
    let mut track = |psi: PureState| worst = worst.max((psi.norm_sq() - 1.0).abs());
    for _ in 0..100 {
        track(acin_state(&random_acin(&mut r)?)?);
        track(qudit_family_state(&random_family(3, &mut r)?)?);
        track(swap_family_state(&SwapFamilyParams::new(
            3,
            r.random(),
            r.random_range(0.0..6.3),
        )?)?);
        track(haar_random_pure([2, 3, 4], r.random())?);
    }
    for name in [NamedState::Ghz, NamedState::W, NamedState::Product] {
        track(named_state(name));
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-12,
    })
}

fn acin_matches_family(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let (a, b): (f64, f64) = (r.random::<f64>() * 0.7, r.random::<f64>() * 0.7);
        let x = acin_state(&AcinParams::boundary(a, b)?)?;
        let y = qudit_family_state(&QuditFamilyParams::boundary(2, a, b)?)?;
        for (u, v) in x.amplitudes().iter().zip(y.amplitudes()) {
            worst = worst.max((u - v).norm());
        }
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-15,
    })
}

fn swap_quarter_turn(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 3);
    let mut worst: f64 = 0.0;
    for _ in 0..30 {
        let (d, theta) = (r.random::<f64>(), r.random_range(0.0..FRAC_PI_2));
        let t = negativity_triple(&swap_family_state(&SwapFamilyParams::new(3, d, theta)?)?)?;
        let u = negativity_triple(&swap_family_state(&SwapFamilyParams::new(
            3,
            d,
            FRAC_PI_2 - theta,
        )?)?)?;
        worst = worst
            .max((t.n_ac_sq - u.n_ab_sq).abs())
            .max((t.n_ab_sq - u.n_ac_sq).abs())
            .max((t.n_abc_sq - u.n_abc_sq).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn haar_monogamy(seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for record in sample_triples(2, 10_000, seed)? {
        let psi = haar_random_pure([2, 2, 2], record.seed)?;
        let c = concurrence_triple(&psi)?;
        worst = worst
            .max(-monogamy_residual(&record.triple))
            .max(-monogamy_residual(&c));
    }
    Ok(Outcome {
        value: worst.max(0.0),
        tol: 1e-10,
    })
}

fn max_entangled(_: u64) -> Result<Outcome> {
    let bell_err = (negativity(&density_from_pure(&bell()?)?, (2, 2))? - 1.0).abs();
    let amp = C64::new(1.0 / 3f64.sqrt(), 0.0);
    let mut amps = vec![C64::new(0.0, 0.0); 9];
    for i in 0..3 {
        amps[i * 3 + i] = amp;
    }
    let psi = PureState::new([3, 3, 1], amps)?;
    let qutrit_err = (negativity(&density_from_pure(&psi)?, (3, 3))? - 2.0).abs();
    Ok(Outcome {
        value: bell_err.max(qutrit_err),
        tol: 1e-10,
    })
}

fn n_abc_qubit(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_acin(&mut r)?;
        let t = negativity_triple(&acin_state(&p)?)?;
        worst = worst.max((n_abc_squared_closed_form(&p) - t.n_abc_sq).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn pure_pair_concurrence(seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let psi = haar_random_pure([2, 2, 1], seed.wrapping_add(k))?;
        let rho = psi.reduced(&[0, 1])?;
        let c = wootters_concurrence(&rho)?;
        worst = worst
            .max((concurrence_pure_cut(&psi)? - c).abs())
            .max((negativity(&rho, (2, 2))? - c).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn concurrence_dominates(seed: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..2000 {
        let rho = haar_random_pure([4, 4, 1], seed.wrapping_add(k))?.reduced(&[0])?;
        worst = worst.max(negativity(&rho, (2, 2))? - wootters_concurrence(&rho)?);
    }
    Ok(Outcome {
        value: worst.max(0.0),
        tol: 1e-10,
    })
}

fn marginals(seed: u64) -> Result<Outcome> {
    let ghz = marginal_spectra(&named_state(NamedState::Ghz))?;
    let mut worst = ghz
        .parties()
        .iter()
        .flat_map(|s| s.values().iter().map(|v| (v - 0.5).abs()))
        .fold(0.0, f64::max);
    for k in 0..50 {
        let s = marginal_spectra(&haar_random_pure([2, 3, 4], seed.wrapping_add(k))?)?;
        for spec in s.parties() {
            worst = worst.max((spec.sum() - 1.0).abs());
        }
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn quartic_root(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 5);
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let p = random_acin(&mut r)?;
        let x = negativity(&acin_state(&p)?.reduced(&[0, 2])?, (2, 2))?;
        worst = worst.max(quartic_eval(&p, x).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-9,
    })
}

fn stationarity(seed: u64) -> Result<Outcome> {
    // The two conditions are -1/4 of the quartic's partial derivatives in w
    // and in c; compare against central differences.
    let mut r = rng(seed, 6);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let mut p = random_acin(&mut r)?;
        p.omega = C64::new(p.omega.norm(), 0.0);
        let x = r.random_range(0.0..1.0);
        let h = 1e-5;
        let at = |w: f64, c: f64| {
            quartic_eval(
                &AcinParams {
                    omega: C64::new(w, 0.0),
                    c,
                    ..p
                },
                x,
            )
        };
        let d_w = (at(p.omega.re + h, p.c) - at(p.omega.re - h, p.c)) / (2.0 * h);
        let d_c = (at(p.omega.re, p.c + h) - at(p.omega.re, p.c - h)) / (2.0 * h);
        let (e6, e7) = stationarity_residuals(&p, x);
        worst = worst
            .max((e6 + d_w / 4.0).abs())
            .max((e7 + d_c / 4.0).abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-7,
    })
}

fn closed_root(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 7);
    let mut worst: f64 = 0.0;
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
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn parametric_implicit(_: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for (a, b) in polar_grid(200, 1.0)? {
        let t = parametric_boundary_triple(a, b)?;
        let oracle = negativity_triple(&acin_state(&AcinParams::boundary(a, b)?)?)?;
        let (x, y, z) = t.unsquared();
        // Scale the implicit residual so one tolerance covers both parts.
        worst = worst
            .max(t.max_abs_diff(&oracle))
            .max(implicit_surface_eval(x, y, z).abs() * 1e-2);
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn curve_endpoints(_: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for z_sq in [0.1, 0.5, 8.0 / 9.0, 1.0] {
        let c = boundary_curve(z_sq, 256)?;
        let (first, last) = (c.first(), c.last());
        worst = worst
            .max(first.0.abs())
            .max((first.1 - z_sq).abs())
            .max((last.0 - z_sq).abs())
            .max(last.1.abs());
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-9,
    })
}

fn haar_classify(seed: u64) -> Result<Outcome> {
    use negmono_core::Region;
    let mut bad = 0.0;
    for record in sample_triples(2, 10_000, seed.wrapping_add(1))? {
        if classify_triple(&record.triple)? == Region::Outside {
            bad += 1.0;
        }
    }
    let w = negativity_triple(&named_state(NamedState::W))?;
    if classify_triple(&w)? != Region::OnBoundary {
        bad += 1.0;
    }
    Ok(Outcome {
        value: bad,
        tol: 0.0,
    })
}

fn brute_pt(p: &QuditFamilyParams, pair: Pair) -> Result<ComplexMatrix> {
    let keep = match pair {
        Pair::AC => [0, 2],
        Pair::AB => [0, 1],
    };
    partial_transpose(&qudit_family_state(p)?.reduced(&keep)?, (p.dim, p.dim))
}

fn block_spectra(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 8);
    let mut worst: f64 = 0.0;
    for dim in 2..=6 {
        for _ in 0..20 {
            let p = random_family(dim, &mut r)?;
            for pair in [Pair::AC, Pair::AB] {
                let blocks = pt_block_decompose(&p, pair)?.spectrum()?;
                let full = hermitian_eigenvalues(&brute_pt(&p, pair)?)?;
                if blocks.len() != full.len() {
                    return Ok(Outcome {
                        value: f64::INFINITY,
                        tol: 1e-10,
                    });
                }
                for (x, y) in blocks.values().iter().zip(full.values()) {
                    worst = worst.max((x - y).abs());
                }
            }
        }
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn qudit_closed_forms(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 9);
    let mut worst: f64 = 0.0;
    for dim in 2..=5 {
        for _ in 0..10 {
            let p = random_family(dim, &mut r)?;
            let (x, y, z) = qudit_negativity_triple(&p)?;
            let (ox, oy, oz) = negativity_triple(&qudit_family_state(&p)?)?.unsquared();
            worst = worst
                .max((x - ox).abs())
                .max((y - oy).abs())
                .max((z - oz).abs());
            worst = worst.max((n_abc_closed_form(&p) - oz).abs());
            let (det_ac, det_ab) = pt_determinants(&p);
            let brute_ac = determinant(&brute_pt(&p, Pair::AC)?)?.re;
            let brute_ab = determinant(&brute_pt(&p, Pair::AB)?)?.re;
            // Relative determinant error, scaled onto the same 1e-9 budget.
            let rel = (det_ac / brute_ac - 1.0)
                .abs()
                .max((det_ab / brute_ab - 1.0).abs());
            worst = worst.max(rel * 1e-1);
        }
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-9,
    })
}

fn higuchi(seed: u64) -> Result<Outcome> {
    let mut r = rng(seed, 10);
    let mut worst: f64 = 0.0;
    for dim in 2..=5 {
        let threshold = 1.0 / (dim as f64).sqrt();
        let limit = ((1.0 - threshold * threshold) / (dim - 1) as f64).sqrt();
        for _ in 0..20 {
            let (a, b) = (
                r.random::<f64>() * limit * FRAC_1_SQRT_2,
                r.random::<f64>() * limit * FRAC_1_SQRT_2,
            );
            let p = QuditFamilyParams::boundary(dim, a, b)?;
            let s = marginal_spectra(&qudit_family_state(&p)?)?;
            let (res_a, res_b, res_c) = higuchi_residual(&s);
            worst = worst.max(res_a.abs()).max(-res_b).max(-res_c);
        }
        for k in 0..20 {
            let s = marginal_spectra(&haar_random_pure([dim, dim, dim], seed.wrapping_add(k))?)?;
            let (x, y, z) = higuchi_residual(&s);
            worst = worst.max(-x).max(-y).max(-z);
        }
    }
    Ok(Outcome {
        value: worst.max(0.0),
        tol: 1e-10,
    })
}

fn asymptotics(_: u64) -> Result<Outcome> {
    // Exact trivial cases, then boundedness of r * sqrt(D) under doubling.
    let (r1, r2) = asymptotic_check(16, 0.0, 0.0)?;
    let mut worst = r1.max(r2).max(asymptotic_check(32, 0.6, 0.0)?.1);
    for (alpha, beta) in [(0.5, 0.3), (0.3, 0.3), (0.7, 0.2)] {
        let scaled: Vec<(f64, f64)> = [8usize, 16, 32, 64]
            .iter()
            .map(|&dim| {
                let (r1, r2) = asymptotic_check(dim, alpha, beta)?;
                let s = (dim as f64).sqrt();
                Ok((r1 * s, r2 * s))
            })
            .collect::<Result<_>>()?;
        for w in scaled.windows(2) {
            let growth = (w[1].0 / w[0].0).max(w[1].1 / w[0].1);
            // Allow a factor 1.5 per doubling; report only the excess.
            worst = worst.max((growth - 1.5).max(0.0));
        }
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-10,
    })
}

fn swap_fold(_: u64) -> Result<Outcome> {
    let family = BoundaryFamily::qudit(3)?;
    let mut worst: f64 = 0.0;
    for p in swap_surface_scan(3, 21)? {
        if p.theta == 0.0 {
            worst = worst.max(p.triple.n_ac_sq.abs());
        }
        if p.fold && p.triple.n_abc_sq > 0.0 {
            let slice = family.slice(p.triple.n_abc_sq, 256)?;
            let phi = p.triple.n_ab_sq.atan2(p.triple.n_ac_sq);
            let outer = slice
                .branch_radius(&slice.branches()[0], phi)
                .unwrap_or(0.0);
            worst = worst.max(p.triple.n_ac_sq.hypot(p.triple.n_ab_sq) - outer);
        }
    }
    Ok(Outcome {
        value: worst.max(0.0),
        tol: 1e-9,
    })
}

fn sampling_round_trip(seed: u64) -> Result<Outcome> {
    let a = sample_triples(2, 200, seed)?;
    let b = sample_triples(2, 200, seed)?;
    let path =
        std::env::temp_dir().join(format!("negmono-verify-{}-{seed}.csv", std::process::id()));
    emit_dataset(&a, &path, Format::Csv)?;
    let back = read_dataset(&path, Format::Csv);
    let _ = std::fs::remove_file(&path);
    let mismatches = (a != b) as u8 + (back? != a) as u8;
    Ok(Outcome {
        value: mismatches as f64,
        tol: 0.0,
    })
}

fn region_fill(_: u64) -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for z_sq in [0.3, 0.7] {
        let checks = region_fill_sweep(z_sq, 10, 64)?.checks();
        worst = worst
            .max(checks.max_endpoint_offset)
            .max(checks.max_nesting_violation)
            .max(checks.collapse_radius)
            .max(if checks.max_interior_determinant < 0.0 {
                0.0
            } else {
                1.0
            });
    }
    Ok(Outcome {
        value: worst,
        tol: 1e-9,
    })
}

fn qubit_search(seed: u64) -> Result<Outcome> {
    let mut worst = f64::NEG_INFINITY;
    for (k, base) in qubit_boundary_bases(5, seed)?.into_iter().enumerate() {
        let report = perturbation_search(
            SearchBase::Qubit(base),
            500,
            1e-2,
            seed.wrapping_add(k as u64),
        )?;
        worst = worst.max(report.max_excess);
    }
    Ok(Outcome {
        value: worst.max(0.0),
        tol: 1e-7,
    })
}
