//! Entanglement measures on pure three-party states and their marginals.
//!
//! Negativity here is twice the absolute sum of the negative eigenvalues of
//! the partial transpose, so a Bell pair has negativity 1 and a `D x D`
//! maximally entangled state has `D - 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eigen, hermitian_eigenvalues, partial_transpose, tensor_product, ComplexMatrix,
    PureState, Spectrum, C64,
};
use crate::states::AcinParams;

/// Eigenvalues of the partial transpose in `(-NEG_EIG_THRESHOLD, 0)` count as zero.
pub const NEG_EIG_THRESHOLD: f64 = 1e-12;

/// Hermiticity, trace and positivity tolerance for density matrix inputs.
pub const DENSITY_TOL: f64 = 1e-10;

/// Squared negativities `(N_A|C^2, N_A|B^2, N_A|BC^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NegativityTriple {
    pub n_ac_sq: f64,
    pub n_ab_sq: f64,
    pub n_abc_sq: f64,
}

impl NegativityTriple {
    pub fn new(n_ac_sq: f64, n_ab_sq: f64, n_abc_sq: f64) -> Self {
        Self {
            n_ac_sq,
            n_ab_sq,
            n_abc_sq,
        }
    }

    pub fn from_unsquared(n_ac: f64, n_ab: f64, n_abc: f64) -> Self {
        Self::new(n_ac * n_ac, n_ab * n_ab, n_abc * n_abc)
    }

    /// `(N_A|C, N_A|B, N_A|BC)`.
    pub fn unsquared(&self) -> (f64, f64, f64) {
        (
            self.n_ac_sq.max(0.0).sqrt(),
            self.n_ab_sq.max(0.0).sqrt(),
            self.n_abc_sq.max(0.0).sqrt(),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.n_ac_sq - other.n_ac_sq)
            .abs()
            .max((self.n_ab_sq - other.n_ab_sq).abs())
            .max((self.n_abc_sq - other.n_abc_sq).abs())
    }
}

/// Squared concurrences `(C_A|C^2, C_A|B^2, C_A|BC^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcurrenceTriple {
    pub c_ac_sq: f64,
    pub c_ab_sq: f64,
    pub c_abc_sq: f64,
}

/// A triple `(x^2, y^2, z^2)` subject to `z^2 >= x^2 + y^2`.
pub trait MonogamyTriple {
    fn squared_components(&self) -> (f64, f64, f64);

    /// `z^2 - x^2 - y^2`.
    fn monogamy_residual(&self) -> f64 {
        let (x, y, z) = self.squared_components();
        z - x - y
    }
}

impl MonogamyTriple for NegativityTriple {
    fn squared_components(&self) -> (f64, f64, f64) {
        (self.n_ac_sq, self.n_ab_sq, self.n_abc_sq)
    }
}

impl MonogamyTriple for ConcurrenceTriple {
    fn squared_components(&self) -> (f64, f64, f64) {
        (self.c_ac_sq, self.c_ab_sq, self.c_abc_sq)
    }
}

pub fn monogamy_residual<T: MonogamyTriple>(t: &T) -> f64 {
    t.monogamy_residual()
}

/// Ascending single-party marginal spectra.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalSpectra {
    pub lambda_a: Spectrum,
    pub lambda_b: Spectrum,
    pub lambda_c: Spectrum,
}

impl MarginalSpectra {
    pub fn parties(&self) -> [&Spectrum; 3] {
        [&self.lambda_a, &self.lambda_b, &self.lambda_c]
    }
}

/// Checks Hermiticity, unit trace and positivity; returns the spectrum.
pub fn validate_density(rho: &ComplexMatrix) -> Result<Spectrum> {
    let deviation = rho.hermitian_deviation();
    if deviation > DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!(
            "not Hermitian (deviation {deviation:e})"
        )));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > DENSITY_TOL || tr.im.abs() > DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!("trace is {tr}")));
    }
    let spec = hermitian_eigenvalues(rho)?;
    if spec.min() < -DENSITY_TOL {
        return Err(Error::NotDensityMatrix(format!(
            "negative eigenvalue {:e}",
            spec.min()
        )));
    }
    Ok(spec)
}

/// `2 sum |lambda^-|` over the partial transpose on the first factor.
pub fn negativity(rho: &ComplexMatrix, dims: (usize, usize)) -> Result<f64> {
    if rho.dim() != dims.0 * dims.1 {
        return Err(Error::DimensionMismatch(format!(
            "matrix dimension {} does not match {}x{}",
            rho.dim(),
            dims.0,
            dims.1
        )));
    }
    validate_density(rho)?;
    let pt = partial_transpose(rho, dims)?;
    Ok(2.0 * hermitian_eigenvalues(&pt)?.negative_mass(NEG_EIG_THRESHOLD))
}

/// Negativity of a pure state across the A|BC cut from the Schmidt spectrum
/// of `rho_A`: `(sum_i sqrt(lambda_i))^2 - 1`.
pub fn pure_cut_negativity(psi: &PureState) -> Result<f64> {
    let spec = hermitian_eigenvalues(&psi.reduced(&[0])?)?;
    let root_sum: f64 = spec.values().iter().map(|&x| x.max(0.0).sqrt()).sum();
    Ok((root_sum * root_sum - 1.0).max(0.0))
}

/// Squared negativities of `rho_AC`, `rho_AB` and the A|BC cut.
pub fn negativity_triple(psi: &PureState) -> Result<NegativityTriple> {
    let [da, db, dc] = psi.dims();
    let n_ac = negativity(&psi.reduced(&[0, 2])?, (da, dc))?;
    let n_ab = negativity(&psi.reduced(&[0, 1])?, (da, db))?;
    let n_abc = pure_cut_negativity(psi)?;
    Ok(NegativityTriple::from_unsquared(n_ac, n_ab, n_abc))
}

/// `4 (a^2 + b^2 + c^2) d^2`.
pub fn n_abc_squared_closed_form(p: &AcinParams) -> f64 {
    4.0 * (p.a * p.a + p.b * p.b + p.c * p.c) * p.d * p.d
}

/// `2 sqrt(det rho_A)` for a qubit A.
pub fn concurrence_pure_cut(psi: &PureState) -> Result<f64> {
    if psi.dims()[0] != 2 {
        return Err(Error::DimensionMismatch(format!(
            "pure-cut concurrence needs a qubit first factor, got dimension {}",
            psi.dims()[0]
        )));
    }
    let r = psi.reduced(&[0])?;
    let det = (r[(0, 0)] * r[(1, 1)] - r[(0, 1)] * r[(1, 0)]).re;
    Ok(2.0 * det.max(0.0).sqrt())
}

fn sigma_y_sigma_y() -> ComplexMatrix {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    let sy = ComplexMatrix::new(2, 2, vec![z, -i, i, z]).expect("2x2");
    tensor_product(&sy, &sy).expect("4x4")
}

/// Two-qubit concurrence `max(0, mu_1 - mu_2 - mu_3 - mu_4)`, where `mu` are
/// the descending square roots of the eigenvalues of `rho rho~`.
///
/// The `mu` are computed as the singular values of `tau_kl = w_k^T (Y x Y) w_l`
/// for the subnormalized eigenvectors `w_k = sqrt(lambda_k) v_k`, read off the
/// Hermitian dilation `[[0, tau], [tau^dagger, 0]]`. Eigenvalues of `rho`
/// below [`NEG_EIG_THRESHOLD`] are dropped: taking square roots of eigensolver
/// noise there would cost about eight digits on rank-deficient inputs.
pub fn wootters_concurrence(rho: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::NotDensityMatrix(format!(
            "expected a 4x4 matrix, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    validate_density(rho)?;
    let eig = hermitian_eigen(rho)?;
    let yy = sigma_y_sigma_y();
    let w: Vec<Vec<C64>> = eig
        .values
        .values()
        .iter()
        .enumerate()
        .filter(|(_, &lambda)| lambda > NEG_EIG_THRESHOLD)
        .map(|(k, &lambda)| {
            (0..4)
                .map(|i| eig.vectors[(i, k)] * lambda.sqrt())
                .collect()
        })
        .collect();
    let r = w.len();
    let flipped: Vec<Vec<C64>> = w.iter().map(|v| yy.mul_vec(v)).collect();
    let tau =
        |k: usize, l: usize| -> C64 { w[k].iter().zip(&flipped[l]).map(|(x, y)| x * y).sum() };
    let dilation = ComplexMatrix::from_fn(2 * r, |i, j| match (i < r, j < r) {
        (true, false) => tau(i, j - r),
        (false, true) => tau(j, i - r).conj(),
        _ => C64::new(0.0, 0.0),
    });
    let mut mu: Vec<f64> = hermitian_eigenvalues(&dilation)?
        .values()
        .iter()
        .rev()
        .take(r)
        .map(|&x| x.max(0.0))
        .collect();
    mu.resize(4, 0.0);
    Ok((mu[0] - mu[1] - mu[2] - mu[3]).max(0.0))
}

/// Squared Wootters concurrences of `rho_AC`, `rho_AB` and the pure A|BC cut.
pub fn concurrence_triple(psi: &PureState) -> Result<ConcurrenceTriple> {
    if psi.dims() != [2, 2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence triple needs three qubits, got {:?}",
            psi.dims()
        )));
    }
    let c_ac = wootters_concurrence(&psi.reduced(&[0, 2])?)?;
    let c_ab = wootters_concurrence(&psi.reduced(&[0, 1])?)?;
    let c_abc = concurrence_pure_cut(psi)?;
    Ok(ConcurrenceTriple {
        c_ac_sq: c_ac * c_ac,
        c_ab_sq: c_ab * c_ab,
        c_abc_sq: c_abc * c_abc,
    })
}

pub fn marginal_spectra(psi: &PureState) -> Result<MarginalSpectra> {
    Ok(MarginalSpectra {
        lambda_a: hermitian_eigenvalues(&psi.reduced(&[0])?)?,
        lambda_b: hermitian_eigenvalues(&psi.reduced(&[1])?)?,
        lambda_c: hermitian_eigenvalues(&psi.reduced(&[2])?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::density_from_pure;
    use crate::states::{acin_state, haar_random_pure, named_state, NamedState};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn bell_rho() -> ComplexMatrix {
        let s = C64::new(FRAC_1_SQRT_2, 0.0);
        let z = C64::new(0.0, 0.0);
        ComplexMatrix::outer(&[s, z, z, s], &[s, z, z, s]).unwrap()
    }

    fn w_negativity() -> f64 {
        (5f64.sqrt() - 1.0) / 3.0
    }

    fn equal_w_acin() -> AcinParams {
        let s = 1.0 / 3f64.sqrt();
        AcinParams::new(s, s, 0.0, s, C64::new(0.0, 0.0)).unwrap()
    }

    #[test]
    fn bell_negativity_is_one() {
        assert!((negativity(&bell_rho(), (2, 2)).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn product_negativity_is_zero() {
        let psi = haar_random_pure([2, 1, 1], 1).unwrap();
        let phi = haar_random_pure([2, 1, 1], 2).unwrap();
        let rho = tensor_product(
            &density_from_pure(&psi).unwrap(),
            &density_from_pure(&phi).unwrap(),
        )
        .unwrap();
        assert_eq!(negativity(&rho, (2, 2)).unwrap(), 0.0);
    }

    #[test]
    fn w_marginal_negativity() {
        let psi = named_state(NamedState::W);
        let n = negativity(&psi.reduced(&[0, 2]).unwrap(), (2, 2)).unwrap();
        assert!((n - w_negativity()).abs() < 1e-12);
    }

    #[test]
    fn negativity_rejects_non_density() {
        let bad = ComplexMatrix::from_diag(&[0.5, 0.5, 0.5, -0.5]);
        assert!(matches!(
            negativity(&bad, (2, 2)),
            Err(Error::NotDensityMatrix(_))
        ));
        let trace2 = ComplexMatrix::identity(4).scale(C64::new(0.5, 0.0));
        assert!(matches!(
            negativity(&trace2, (2, 2)),
            Err(Error::NotDensityMatrix(_))
        ));
        assert!(matches!(
            negativity(&bell_rho(), (2, 3)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn triples_of_named_states() {
        let ghz = negativity_triple(&named_state(NamedState::Ghz)).unwrap();
        assert!(ghz.max_abs_diff(&NegativityTriple::new(0.0, 0.0, 1.0)) < 1e-12);
        let prod = negativity_triple(&named_state(NamedState::Product)).unwrap();
        assert!(prod.max_abs_diff(&NegativityTriple::new(0.0, 0.0, 0.0)) < 1e-12);

        let w = negativity_triple(&acin_state(&equal_w_acin()).unwrap()).unwrap();
        let x = w_negativity().powi(2);
        assert!(w.max_abs_diff(&NegativityTriple::new(x, x, 8.0 / 9.0)) < 1e-10);
    }

    #[test]
    fn closed_form_split_negativity() {
        let s = FRAC_1_SQRT_2;
        let bell = AcinParams::new(s, 0.0, 0.0, s, C64::new(0.0, 0.0)).unwrap();
        assert!((n_abc_squared_closed_form(&bell) - 1.0).abs() < 1e-15);
        let no_d = AcinParams::new(0.6, 0.0, 0.0, 0.0, C64::new(0.8, 0.0)).unwrap();
        assert_eq!(n_abc_squared_closed_form(&no_d), 0.0);
        let w = equal_w_acin();
        assert!((n_abc_squared_closed_form(&w) - 8.0 / 9.0).abs() < 1e-15);
        let oracle = negativity_triple(&acin_state(&w).unwrap())
            .unwrap()
            .n_abc_sq;
        assert!((n_abc_squared_closed_form(&w) - oracle).abs() < 1e-10);
    }

    #[test]
    fn pure_cut_concurrence_cases() {
        assert!((concurrence_pure_cut(&named_state(NamedState::Ghz)).unwrap() - 1.0).abs() < 1e-14);
        assert_eq!(
            concurrence_pure_cut(&named_state(NamedState::Product)).unwrap(),
            0.0
        );
        let qutrit = haar_random_pure([3, 2, 2], 5).unwrap();
        assert!(matches!(
            concurrence_pure_cut(&qutrit),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pure_cut_concurrence_matches_split_negativity() {
        for seed in 0..1000 {
            let psi = haar_random_pure([2, 2, 2], seed).unwrap();
            let c = concurrence_pure_cut(&psi).unwrap();
            let n = negativity_triple(&psi).unwrap().n_abc_sq.sqrt();
            assert!((c - n).abs() < 1e-10, "seed {seed}: {c} vs {n}");
        }
    }

    #[test]
    fn pure_cut_negativity_matches_full_partial_transpose() {
        for (seed, dims) in [
            (1, [2, 2, 2]),
            (2, [3, 2, 2]),
            (3, [2, 3, 3]),
            (4, [3, 3, 3]),
        ] {
            let psi = haar_random_pure(dims, seed).unwrap();
            let rho = density_from_pure(&psi).unwrap();
            let full = negativity(&rho, (dims[0], dims[1] * dims[2])).unwrap();
            assert!(
                (full - pure_cut_negativity(&psi).unwrap()).abs() < 1e-10,
                "{dims:?}"
            );
        }
    }

    #[test]
    fn wootters_cases() {
        assert!((wootters_concurrence(&bell_rho()).unwrap() - 1.0).abs() < 1e-12);
        let mixed = ComplexMatrix::identity(4).scale(C64::new(0.25, 0.0));
        assert_eq!(wootters_concurrence(&mixed).unwrap(), 0.0);
        let w = named_state(NamedState::W);
        let c = wootters_concurrence(&w.reduced(&[0, 1]).unwrap()).unwrap();
        assert!((c - 2.0 / 3.0).abs() < 1e-10);
        let bad = ComplexMatrix::identity(3).scale(C64::new(1.0 / 3.0, 0.0));
        assert!(matches!(
            wootters_concurrence(&bad),
            Err(Error::NotDensityMatrix(_))
        ));
    }

    #[test]
    fn concurrence_triples() {
        let w = concurrence_triple(&named_state(NamedState::W)).unwrap();
        assert!((w.c_ac_sq - 4.0 / 9.0).abs() < 1e-10);
        assert!((w.c_ab_sq - 4.0 / 9.0).abs() < 1e-10);
        assert!((w.c_abc_sq - 8.0 / 9.0).abs() < 1e-10);
        assert!(monogamy_residual(&w).abs() < 1e-10);

        let ghz = concurrence_triple(&named_state(NamedState::Ghz)).unwrap();
        assert!((monogamy_residual(&ghz) - 1.0).abs() < 1e-12);
        let prod = concurrence_triple(&named_state(NamedState::Product)).unwrap();
        assert_eq!((prod.c_ac_sq, prod.c_ab_sq, prod.c_abc_sq), (0.0, 0.0, 0.0));
    }

    #[test]
    fn negativity_residual_of_w_is_strictly_positive() {
        let t = negativity_triple(&named_state(NamedState::W)).unwrap();
        let expected = 8.0 / 9.0 - 2.0 * (5f64.sqrt() - 1.0).powi(2) / 9.0;
        assert!((monogamy_residual(&t) - expected).abs() < 1e-10);
        assert!((expected - 0.5493635).abs() < 1e-6);
        assert_eq!(
            monogamy_residual(&NegativityTriple::new(0.0, 0.0, 1.0)),
            1.0
        );
    }

    #[test]
    fn marginal_spectra_cases() {
        let ghz = marginal_spectra(&named_state(NamedState::Ghz)).unwrap();
        for s in ghz.parties() {
            assert!(s.values().iter().all(|x| (x - 0.5).abs() < 1e-14));
        }
        let prod = marginal_spectra(&named_state(NamedState::Product)).unwrap();
        for s in prod.parties() {
            assert!(s.values()[0].abs() < 1e-14 && (s.values()[1] - 1.0).abs() < 1e-14);
        }
    }
}
