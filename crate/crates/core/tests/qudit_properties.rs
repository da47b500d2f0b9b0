use negmono_core::boundary::{radial_excess, BoundaryFamily};
use negmono_core::linalg::{determinant, hermitian_eigenvalues, partial_transpose};
use negmono_core::measures::{marginal_spectra, negativity_triple};
use negmono_core::qudit::{
    higuchi_residual, n_abc_closed_form, pt_block_decompose, pt_determinants,
    qudit_negativity_triple, Pair,
};
use negmono_core::states::{haar_random_pure, qudit_family_state, QuditFamilyParams};
use negmono_core::Spectrum;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_params(dim: usize, rng: &mut impl Rng) -> QuditFamilyParams {
    QuditFamilyParams::normalized(dim, rng.random(), rng.random(), rng.random(), rng.random())
        .unwrap()
}

/// Distinct values with multiplicities after clustering within `tol`.
fn clusters(s: &Spectrum, tol: f64) -> Vec<(f64, usize)> {
    let mut out: Vec<(f64, usize)> = Vec::new();
    for &v in s.values() {
        match out.last_mut() {
            Some((c, n)) if (v - *c).abs() <= tol => *n += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

#[test]
fn blocks_and_closed_forms_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(600);
    for dim in 2..=6 {
        for _ in 0..20 {
            let p = random_params(dim, &mut rng);
            let psi = qudit_family_state(&p).unwrap();
            for (pair, keep) in [(Pair::AC, [0, 2]), (Pair::AB, [0, 1])] {
                let pt = partial_transpose(&psi.reduced(&keep).unwrap(), (dim, dim)).unwrap();
                let full = hermitian_eigenvalues(&pt).unwrap();
                let blocks = pt_block_decompose(&p, pair).unwrap().spectrum().unwrap();
                for (x, y) in blocks.values().iter().zip(full.values()) {
                    assert!((x - y).abs() < 1e-10);
                }
                let det = determinant(&pt).unwrap().re;
                let closed = match pair {
                    Pair::AC => pt_determinants(&p).0,
                    Pair::AB => pt_determinants(&p).1,
                };
                assert!(
                    (closed / det - 1.0).abs() < 1e-8,
                    "D={dim}: {closed} vs {det}"
                );
            }
            let (_, _, z) = negativity_triple(&psi).unwrap().unsquared();
            assert!((n_abc_closed_form(&p) - z).abs() < 1e-9);
        }
    }
}

#[test]
fn family_marginals_follow_degeneracy_pattern() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for dim in 3..=5 {
        for _ in 0..10 {
            let (a, b) = (rng.random::<f64>() * 0.3, rng.random::<f64>() * 0.3);
            let p = QuditFamilyParams::boundary(dim, a, b).unwrap();
            let s = marginal_spectra(&qudit_family_state(&p).unwrap()).unwrap();
            let m = dim - 1;
            let (a2, b2, d2) = (p.a * p.a, p.b * p.b, p.d * p.d);
            let expected = [
                vec![(a2 + b2, m), (d2, 1)],
                vec![(b2, m), (m as f64 * a2 + d2, 1)],
                vec![(a2, m), (m as f64 * b2 + d2, 1)],
            ];
            for (spec, want) in s.parties().iter().zip(expected) {
                let mut want = want;
                want.sort_by(|x, y| x.0.total_cmp(&y.0));
                let got = clusters(spec, 1e-9);
                assert_eq!(got.len(), want.len(), "D={dim}: {got:?} vs {want:?}");
                for ((gv, gn), (wv, wn)) in got.iter().zip(&want) {
                    assert_eq!(gn, wn);
                    assert!((gv - wv).abs() < 1e-9);
                }
            }
        }
    }
}

#[test]
fn higuchi_residuals_are_nonnegative_for_haar_states() {
    for dim in 2..=4 {
        for seed in 0..200 {
            let s = marginal_spectra(&haar_random_pure([dim, dim, dim], seed).unwrap()).unwrap();
            let (x, y, z) = higuchi_residual(&s);
            assert!(x.min(y).min(z) >= -1e-10, "D={dim} seed={seed}");
        }
    }
}

#[test]
fn block_triple_matches_oracle_on_grid() {
    for i in 1..6 {
        for j in 1..6 {
            let (a, b) = (0.08 * i as f64, 0.08 * j as f64);
            let p = QuditFamilyParams::boundary(3, a, b).unwrap();
            let (x, y, z) = qudit_negativity_triple(&p).unwrap();
            let (ox, oy, oz) = negativity_triple(&qudit_family_state(&p).unwrap())
                .unwrap()
                .unsquared();
            assert!((x - ox).abs() < 1e-9 && (y - oy).abs() < 1e-9 && (z - oz).abs() < 1e-9);
        }
    }
}

#[test]
fn qutrit_haar_scan_against_envelope() {
    // The conjectured bound: findings are printed rather than asserted, but
    // the scan must run and report.
    let family = BoundaryFamily::qudit(3).unwrap();
    let mut worst = f64::NEG_INFINITY;
    let mut violations = 0;
    for seed in 0..2000 {
        let t = negativity_triple(&haar_random_pure([3, 3, 3], seed).unwrap()).unwrap();
        let excess = radial_excess(family, &t, 128).unwrap();
        if excess > 1e-7 {
            violations += 1;
            eprintln!("finding: seed {seed} excess {excess:e} triple {t:?}");
        }
        worst = worst.max(excess);
    }
    eprintln!("qutrit haar scan: worst excess {worst:e}, {violations} points beyond the envelope");
    assert!(worst.is_finite());
}
