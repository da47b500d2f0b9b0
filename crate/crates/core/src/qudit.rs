//! The qudit family `d|000> + sum_{j=1}^{D-1} (a|j0j> + b|jj0> + c|jjj>)`.
//!
//! Its pairwise partial transposes split into a `d^2` scalar, `(D-1)(D-2)/2`
//! copies of `[[0, a^2], [a^2, 0]]` and `D-1` copies of a 3x3 block, so every
//! quantity below costs O(1) in `D` apart from the scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix, Spectrum};
use crate::measures::{MarginalSpectra, NegativityTriple, NEG_EIG_THRESHOLD};
use crate::states::{QuditFamilyParams, SwapFamilyParams};

/// Which reduced pair the partial transpose is taken on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pair {
    AC,
    AB,
}

/// Block-diagonal form of `rho^{T_A}` for one pair of the qudit family.
#[derive(Debug, Clone, PartialEq)]
pub struct PtBlockDecomposition {
    pub dim: usize,
    pub pair: Pair,
    /// The `d^2` entry.
    pub scalar_block: f64,
    /// Off-diagonal element of each 2x2 block (`a^2` for A|C, `b^2` for A|B).
    pub offdiag: f64,
    pub offdiag_count: usize,
    /// `[[0, ad, 0], [ad, b^2, bc], [0, bc, a^2+c^2]]`, with `a` and `b`
    /// exchanged for A|B.
    pub triple_block: [[f64; 3]; 3],
    pub triple_count: usize,
}

impl PtBlockDecomposition {
    pub fn total_dim(&self) -> usize {
        1 + 2 * self.offdiag_count + 3 * self.triple_count
    }

    pub fn triple_block_spectrum(&self) -> Result<Spectrum> {
        let flat: Vec<f64> = self.triple_block.iter().flatten().copied().collect();
        hermitian_eigenvalues(&ComplexMatrix::from_real(3, &flat)?)
    }

    /// All eigenvalues with multiplicity, ascending.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let triple = self.triple_block_spectrum()?;
        let mut values = Vec::with_capacity(self.total_dim());
        values.push(self.scalar_block);
        for _ in 0..self.offdiag_count {
            values.extend([-self.offdiag, self.offdiag]);
        }
        for _ in 0..self.triple_count {
            values.extend_from_slice(triple.values());
        }
        Ok(Spectrum::from_unsorted(values))
    }

    /// `2 sum |lambda^-|`, summed block by block.
    pub fn negativity(&self) -> Result<f64> {
        let triple = self
            .triple_block_spectrum()?
            .negative_mass(NEG_EIG_THRESHOLD);
        Ok(2.0 * (self.offdiag_count as f64 * self.offdiag + self.triple_count as f64 * triple))
    }
}

pub fn pt_block_decompose(p: &QuditFamilyParams, pair: Pair) -> Result<PtBlockDecomposition> {
    p.validate()?;
    let (x, y) = match pair {
        Pair::AC => (p.a, p.b),
        Pair::AB => (p.b, p.a),
    };
    let m = p.dim - 1;
    Ok(PtBlockDecomposition {
        dim: p.dim,
        pair,
        scalar_block: p.d * p.d,
        offdiag: x * x,
        offdiag_count: m * (m.saturating_sub(1)) / 2,
        triple_block: [
            [0.0, x * p.d, 0.0],
            [x * p.d, y * y, y * p.c],
            [0.0, y * p.c, x * x + p.c * p.c],
        ],
        triple_count: m,
    })
}

/// `2(D-1) d sqrt(s) + (D-1)(D-2) s` with `s = a^2 + b^2 + c^2`.
pub fn n_abc_closed_form(p: &QuditFamilyParams) -> f64 {
    let m = (p.dim - 1) as f64;
    let s = p.a * p.a + p.b * p.b + p.c * p.c;
    2.0 * m * p.d * s.sqrt() + m * (m - 1.0) * s
}

/// Unsquared `(N_A|C, N_A|B, N_A|BC)`. The pairwise values come from the
/// blocks; the A|BC value from the Schmidt coefficients `d` and
/// `sqrt(a^2+b^2+c^2)` (the latter `D-1` times).
pub fn qudit_negativity_triple(p: &QuditFamilyParams) -> Result<(f64, f64, f64)> {
    let n_ac = pt_block_decompose(p, Pair::AC)?.negativity()?;
    let n_ab = pt_block_decompose(p, Pair::AB)?.negativity()?;
    let m = (p.dim - 1) as f64;
    let root_sum = p.d + m * (p.a * p.a + p.b * p.b + p.c * p.c).sqrt();
    let n_abc = (root_sum * root_sum - 1.0).max(0.0);
    Ok((n_ac, n_ab, n_abc))
}

/// Closed-form `(det rho_AC^{T_A}, det rho_AB^{T_A})`:
/// `(-1)^floor(D/2) d^2 (a^2 (a^2+c^2) d^2)^{D-1} a^{2(D-1)(D-2)}` and the
/// same with `a` and `b` exchanged.
pub fn pt_determinants(p: &QuditFamilyParams) -> (f64, f64) {
    let m = p.dim - 1;
    let sign = if (p.dim / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let det = |x: f64| {
        let x2 = x * x;
        let d2 = p.d * p.d;
        sign * d2
            * (x2 * (x2 + p.c * p.c) * d2).powi(m as i32)
            * x2.powi((m * (m.saturating_sub(1))) as i32)
    };
    (det(p.a), det(p.b))
}

/// Marginal-inequality residuals, one per party taken as the left-hand side:
/// `S(Q) + S(R) - S(P)` where `S` sums the `D-1` smallest eigenvalues.
pub fn higuchi_residual(s: &MarginalSpectra) -> (f64, f64, f64) {
    let k = s.lambda_a.len().saturating_sub(1);
    let [sa, sb, sc] = s.parties().map(|spec| spec.smallest_sum(k));
    (sb + sc - sa, sa + sc - sb, sa + sb - sc)
}

/// Parameters used by [`asymptotic_check`]: `a = alpha/sqrt(D)`,
/// `b = beta/sqrt(D)`, `c = 0`, and `d` from normalization.
pub fn asymptotic_params(dim: usize, alpha: f64, beta: f64) -> Result<QuditFamilyParams> {
    let scale = 1.0 / (dim as f64).sqrt();
    QuditFamilyParams::boundary(dim, alpha * scale, beta * scale)
}

/// `(r1, r2)` for the large-`D` comparison. `r1` is the largest relative
/// deviation of the exact unsquared triple from `D^2 (a^2, b^2, a^2+b^2)`
/// (components whose leading term vanishes are skipped); `r2` is the
/// relative linear-monogamy defect `|N_A|BC - N_A|B - N_A|C| / N_A|BC`.
pub fn asymptotic_check(dim: usize, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let p = asymptotic_params(dim, alpha, beta)?;
    let (n_ac, n_ab, n_abc) = qudit_negativity_triple(&p)?;
    let d2 = (dim * dim) as f64;
    let (a2, b2) = (p.a * p.a, p.b * p.b);
    let r1 = [(n_ac, a2), (n_ab, b2), (n_abc, a2 + b2)]
        .into_iter()
        .filter(|&(_, lead)| lead > 0.0)
        .map(|(n, lead)| (n - d2 * lead).abs() / (d2 * lead))
        .fold(0.0, f64::max);
    let r2 = if n_abc > 0.0 {
        (n_abc - n_ab - n_ac).abs() / n_abc
    } else {
        0.0
    };
    Ok((r1, r2))
}

/// One grid point of [`swap_surface_scan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapScanPoint {
    pub d: f64,
    pub theta: f64,
    pub triple: NegativityTriple,
    /// `d < 1/sqrt(D)`: the part of the surface that does not bound the set.
    pub fold: bool,
}

/// Triples of the swap-generated family over a `grid x grid` lattice of
/// `d in [0, 1]` and `theta in [0, pi/2]`, in row-major `(d, theta)` order.
pub fn swap_surface_scan(dim: usize, grid: usize) -> Result<Vec<SwapScanPoint>> {
    if dim < 2 {
        return Err(Error::InvalidParams(format!(
            "local dimension must be >= 2, got {dim}"
        )));
    }
    if grid < 2 {
        return Err(Error::InvalidParams(format!(
            "grid must have at least 2 points per axis, got {grid}"
        )));
    }
    let step = 1.0 / (grid - 1) as f64;
    let threshold = 1.0 / (dim as f64).sqrt();
    (0..grid * grid)
        .into_par_iter()
        .map(|k| {
            let d = (k / grid) as f64 * step;
            let theta = (k % grid) as f64 * step * std::f64::consts::FRAC_PI_2;
            let family = SwapFamilyParams::new(dim, d, theta)?.equivalent_family()?;
            let (x, y, z) = qudit_negativity_triple(&family)?;
            Ok(SwapScanPoint {
                d,
                theta,
                triple: NegativityTriple::from_unsquared(x, y, z),
                fold: d < threshold,
            })
        })
        .collect()
}
