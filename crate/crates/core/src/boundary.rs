//! Boundary of the achievable negativity set.
//!
//! For three qubits in the canonical form `d|000> + w|100> + a|101> + b|110> +
//! c|111>`, the A|C negativity `x` is a root of a quartic in `x` whose
//! coefficients are polynomial in `(a, b, c, d, |w|, cos arg w)`. Its maxima sit
//! on `c = w = 0`, where `x = -b^2 + sqrt(b^4 + 4a^2 d^2)`; together with the
//! A|B analogue and `N_A|BC^2 = 4(a^2 + b^2) d^2` this traces the boundary
//! surface, which also has an implicit sextic form.
//!
//! Slices of constant `N_A|BC^2` are handled by [`BoundarySlice`]. Fixing `z^2`
//! fixes `d` only up to a finite set of roots, so a slice holds one branch per
//! root; the achievable region at that height is everything radially below the
//! outer envelope of the branches. The same machinery covers the qudit family
//! `d|000> + sum_j (a|j0j> + b|jj0>)`, for which the envelope is the
//! conjectured boundary.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{determinant, partial_transpose, ComplexMatrix, C64};
use crate::measures::NegativityTriple;
use crate::states::{acin_state, AcinParams};

/// Samples per branch used when a slice is built implicitly.
pub const DEFAULT_CURVE_POINTS: usize = 512;

/// Radial distance within which a point counts as lying on a boundary sheet.
pub const ON_BOUNDARY_TOL: f64 = 1e-7;

const BISECTION_STEPS: usize = 80;
const ROOT_SCAN_POINTS: usize = 4096;

/// Value of the quartic whose root is `N_A|C` for the canonical-form state.
pub fn quartic_eval(p: &AcinParams, x: f64) -> f64 {
    let (a, b, c, d) = (p.a, p.b, p.c, p.d);
    let w = p.omega.norm();
    let cos_arg = if w > 0.0 { p.omega.re / w } else { 1.0 };
    let (a2, b2, c2, d2, w2) = (a * a, b * b, c * c, d * d, w * w);
    let (x2, x3, x4) = (x * x, x * x * x, x * x * x * x);

    -16.0 * a2 * a2 * d2 * d2 - 16.0 * a2 * c2 * d2 * d2 - 8.0 * a2 * a2 * d2 * x
        + 8.0 * a2 * b2 * d2 * x
        - 8.0 * a2 * c2 * d2 * x
        - 8.0 * a2 * d2 * d2 * x
        - 8.0 * a2 * d2 * w2 * x
        + 4.0 * a2 * b2 * x2
        + 4.0 * b2 * d2 * x2
        + 4.0 * c2 * d2 * x2
        + 4.0 * c2 * w2 * x2
        + 2.0 * a2 * x3
        + 2.0 * b2 * x3
        + 2.0 * c2 * x3
        + 2.0 * d2 * x3
        + 2.0 * w2 * x3
        + x4
        - (16.0 * d2 * x + 8.0 * x2) * a * b * c * w * cos_arg
}

/// `det(2 rho_AC^{T_A} + x I_4)` computed from the state itself.
pub fn quartic_determinant(p: &AcinParams, x: f64) -> Result<f64> {
    let psi = acin_state(p)?;
    let pt = partial_transpose(&psi.reduced(&[0, 2])?, (2, 2))?;
    let shifted =
        &pt.scale(C64::new(2.0, 0.0)) + &ComplexMatrix::identity(4).scale(C64::new(x, 0.0));
    Ok(determinant(&shifted)?.re)
}

/// `8abc|w| x (2d^2 + x) sin(arg w)`: the quartic's derivative in `arg w` up to
/// sign; it vanishes exactly when `w` is real.
pub fn phase_stationarity(p: &AcinParams, x: f64) -> f64 {
    8.0 * p.a * p.b * p.c * p.omega.im * x * (2.0 * p.d * p.d + x)
}

/// The two stationarity conditions at real `w` (the imaginary part is
/// ignored): the derivative conditions in `w` and in `c`, each scaled so that
/// they equal `-1/4` of the corresponding partial derivative of the quartic.
pub fn stationarity_residuals(p: &AcinParams, x: f64) -> (f64, f64) {
    let (a, b, c, d, w) = (p.a, p.b, p.c, p.d, p.omega.re);
    let d2 = d * d;
    let omega_condition = x
        * (4.0 * a * b * c * d2 + 4.0 * a * a * d2 * w + 2.0 * a * b * c * x
            - 2.0 * c * c * w * x
            - w * x * x);
    let c_condition =
        8.0 * a * a * c * d2 * d2 + 4.0 * a * a * c * d2 * x + 4.0 * a * b * d2 * w * x
            - 2.0 * c * d2 * x * x
            + 2.0 * a * b * w * x * x
            - 2.0 * c * w * w * x * x
            - c * x * x * x;
    (omega_condition, c_condition)
}

/// `-b^2 + sqrt(b^4 + 4 a^2 d^2)`, evaluated without cancellation.
pub fn closed_form_root(a: f64, b: f64, d: f64) -> f64 {
    let num = 4.0 * a * a * d * d;
    if num == 0.0 {
        return 0.0;
    }
    let b2 = b * b;
    num / (b2 + (b2 * b2 + num).sqrt())
}

/// `n x n` polar lattice over the quarter disk of radius `radius`:
/// `(r_i cos phi_j, r_i sin phi_j)` with `r_i = radius i/(n-1)` and
/// `phi_j = (pi/2) j/(n-1)`, radius-major. Every point is a valid `(a, b)`.
pub fn polar_grid(n: usize, radius: f64) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::InvalidParams(format!(
            "grid must have at least 2 points per axis, got {n}"
        )));
    }
    let step = 1.0 / (n - 1) as f64;
    Ok((0..n)
        .flat_map(|i| {
            let r = if i + 1 == n {
                radius
            } else {
                radius * i as f64 * step
            };
            (0..n).map(move |j| {
                let phi = FRAC_PI_2 * j as f64 * step;
                if j + 1 == n {
                    (0.0, r)
                } else {
                    (r * phi.cos(), r * phi.sin())
                }
            })
        })
        .collect())
}

/// Boundary triple of the `c = w = 0` state with `d = sqrt(1 - a^2 - b^2)`.
pub fn parametric_boundary_triple(a: f64, b: f64) -> Result<NegativityTriple> {
    let p = AcinParams::boundary(a, b)?;
    let x = closed_form_root(p.a, p.b, p.d);
    let y = closed_form_root(p.b, p.a, p.d);
    Ok(NegativityTriple::new(
        x * x,
        y * y,
        4.0 * (p.a * p.a + p.b * p.b) * p.d * p.d,
    ))
}

/// Implicit boundary polynomial in the unsquared negativities
/// `x = N_A|C`, `y = N_A|B`, `z = N_A|BC`.
pub fn implicit_surface_eval(x: f64, y: f64, z: f64) -> f64 {
    let (x2, y2, z2) = (x * x, y * y, z * z);
    let inner = x * (x + 1.0) + y * (y + 1.0) - 1.5 * x * y + 2.0;
    z2 * z2 * z2 - 2.0 * z2 * z2 * (x2 - x * y + y2)
        + z2 * (x2 * x2 + y2 * y2 - 2.0 * x * y * inner)
        + x * y * (2.0 * y2 + x * y2 + x2 * y + 2.0 * x2) * (x + y + 2.0)
}

/// The `c = 0` boundary family at local dimension `D`:
/// `d|000> + sum_{j=1}^{D-1} (a|j0j> + b|jj0>)` with `d^2 + (D-1)(a^2+b^2) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryFamily {
    dim: usize,
}

impl BoundaryFamily {
    pub fn qubit() -> Self {
        Self { dim: 2 }
    }

    pub fn qudit(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {dim}"
            )));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    fn m(&self) -> f64 {
        (self.dim - 1) as f64
    }

    /// Largest reachable `N_A|BC^2`, `(D-1)^2`.
    pub fn max_z_sq(&self) -> f64 {
        self.m() * self.m()
    }

    /// Unsquared `(N_A|C, N_A|B)` of the family member.
    pub fn pair(&self, a: f64, b: f64, d: f64) -> (f64, f64) {
        let m = self.m();
        let blocks = m * (m - 1.0);
        (
            blocks * a * a + m * closed_form_root(a, b, d),
            blocks * b * b + m * closed_form_root(b, a, d),
        )
    }

    /// Squared `(N_A|C^2, N_A|B^2)`.
    pub fn pair_sq(&self, a: f64, b: f64, d: f64) -> (f64, f64) {
        let (x, y) = self.pair(a, b, d);
        (x * x, y * y)
    }

    /// `N_A|BC` of the family member at a given `d`.
    pub fn n_abc(&self, d: f64) -> f64 {
        let m = self.m();
        let s2 = ((1.0 - d * d) / m).max(0.0);
        2.0 * m * d * s2.sqrt() + m * (m - 1.0) * s2
    }

    /// `sqrt(a^2 + b^2)` at a given `d`.
    pub fn radius(&self, d: f64) -> f64 {
        ((1.0 - d * d) / self.m()).max(0.0).sqrt()
    }

    /// Every `d` in `[0, 1]` at which the family reaches `N_A|BC^2 = z_sq`.
    pub fn d_roots(&self, z_sq: f64) -> Result<Vec<f64>> {
        let max = self.max_z_sq();
        if !(z_sq.is_finite() && z_sq >= -1e-12 && z_sq <= max + 1e-9) {
            return Err(Error::Unreachable { z_sq, max });
        }
        let z_sq = z_sq.clamp(0.0, max);
        if self.dim == 2 {
            let disc = (1.0 - z_sq).max(0.0).sqrt();
            let hi = ((1.0 + disc) / 2.0).sqrt();
            let lo = ((1.0 - disc) / 2.0).sqrt();
            return Ok(if hi - lo > 0.0 {
                vec![hi, lo]
            } else {
                vec![hi]
            });
        }

        let g = |d: f64| self.n_abc(d).powi(2) - z_sq;
        let peak = 1.0 / (self.dim as f64).sqrt();
        let mut roots: Vec<f64> = Vec::new();
        if (max - z_sq).abs() <= 1e-12 * max.max(1.0) {
            roots.push(peak);
        }
        let grid: Vec<f64> = (0..=ROOT_SCAN_POINTS)
            .map(|i| i as f64 / ROOT_SCAN_POINTS as f64)
            .collect();
        let vals: Vec<f64> = grid.iter().map(|&d| g(d)).collect();
        for i in 0..ROOT_SCAN_POINTS {
            let (lo, hi) = (grid[i], grid[i + 1]);
            let (glo, ghi) = (vals[i], vals[i + 1]);
            if glo == 0.0 {
                roots.push(lo);
                continue;
            }
            if i + 1 == ROOT_SCAN_POINTS && ghi == 0.0 {
                roots.push(hi);
            }
            if glo * ghi < 0.0 {
                roots.push(bisect(lo, hi, glo, &g));
            }
        }
        roots.sort_by(|x, y| y.total_cmp(x));
        roots.dedup_by(|x, y| (*x - *y).abs() < 1e-12);
        Ok(roots)
    }

    pub fn slice(&self, z_sq: f64, n_points: usize) -> Result<BoundarySlice> {
        BoundarySlice::new(*self, z_sq, n_points)
    }
}

fn bisect(mut lo: f64, mut hi: f64, glo: f64, g: &impl Fn(f64) -> f64) -> f64 {
    let sign_lo = glo.signum();
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let gm = g(mid);
        if gm == 0.0 {
            return mid;
        }
        if gm.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// One branch of a constant-`z^2` slice: `d` fixed, `a` swept uniformly over
/// `[0, a_max]` and `b` from normalization.
#[derive(Debug, Clone)]
pub struct BranchCurve {
    pub d: f64,
    pub a_max: f64,
    /// Sampled `(a, x^2, y^2)`.
    samples: Vec<(f64, f64, f64)>,
}

impl BranchCurve {
    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().map(|&(_, x, y)| (x, y))
    }

    fn is_degenerate(&self) -> bool {
        self.samples.iter().all(|&(_, x, y)| x == 0.0 && y == 0.0)
    }
}

/// All boundary branches of the family at one value of `N_A|BC^2`.
#[derive(Debug, Clone)]
pub struct BoundarySlice {
    family: BoundaryFamily,
    z_sq: f64,
    branches: Vec<BranchCurve>,
}

fn angle(x: f64, y: f64) -> f64 {
    y.atan2(x)
}

impl BoundarySlice {
    pub fn new(family: BoundaryFamily, z_sq: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::InvalidParams(format!(
                "a boundary curve needs at least 2 points, got {n_points}"
            )));
        }
        let branches = family
            .d_roots(z_sq)?
            .into_iter()
            .map(|d| {
                let a_max = family.radius(d);
                let samples = (0..n_points)
                    .map(|i| {
                        let a = if i + 1 == n_points {
                            a_max
                        } else {
                            a_max * i as f64 / (n_points - 1) as f64
                        };
                        let b = (a_max * a_max - a * a).max(0.0).sqrt();
                        let (x, y) = family.pair_sq(a, b, d);
                        (a, x, y)
                    })
                    .collect();
                BranchCurve { d, a_max, samples }
            })
            .collect();
        Ok(Self {
            family,
            z_sq: z_sq.clamp(0.0, family.max_z_sq()),
            branches,
        })
    }

    pub fn z_sq(&self) -> f64 {
        self.z_sq
    }

    pub fn branches(&self) -> &[BranchCurve] {
        &self.branches
    }

    /// Radius of the branch in the `(x^2, y^2)` plane along direction `phi`,
    /// refined by bisection in `a` inside every bracketing sample interval.
    pub fn branch_radius(&self, branch: &BranchCurve, phi: f64) -> Option<f64> {
        if branch.is_degenerate() {
            return Some(0.0);
        }
        let fam = self.family;
        let point = |a: f64| {
            let b = (branch.a_max * branch.a_max - a * a).max(0.0).sqrt();
            fam.pair_sq(a, b, branch.d)
        };
        let mut best: Option<f64> = None;
        for win in branch.samples.windows(2) {
            let (a0, x0, y0) = win[0];
            let (a1, x1, y1) = win[1];
            let f0 = angle(x0, y0) - phi;
            let f1 = angle(x1, y1) - phi;
            if f0 * f1 > 0.0 {
                continue;
            }
            let a = if f0 == 0.0 {
                a0
            } else if f1 == 0.0 {
                a1
            } else {
                bisect(a0, a1, f0, &|a| {
                    let (x, y) = point(a);
                    angle(x, y) - phi
                })
            };
            let (x, y) = point(a);
            let r = x.hypot(y);
            best = Some(best.map_or(r, |cur: f64| cur.max(r)));
        }
        best
    }

    /// Radii of every branch along `phi` (branches that never reach the
    /// direction are skipped).
    pub fn radii(&self, phi: f64) -> Vec<f64> {
        self.branches
            .iter()
            .filter_map(|b| self.branch_radius(b, phi))
            .collect()
    }

    /// Outer envelope radius along `phi`.
    pub fn envelope_radius(&self, phi: f64) -> f64 {
        self.radii(phi).into_iter().fold(0.0, f64::max)
    }

    /// The outer envelope as an ordered curve from `(0, z^2)` to `(z^2, 0)`
    /// (for the qubit family; in general from the `y^2` axis to the `x^2` axis).
    pub fn envelope(&self) -> BoundaryCurve {
        let mut pts: Vec<(f64, f64, f64)> = Vec::new();
        for branch in &self.branches {
            for (x, y) in branch.points() {
                let r = x.hypot(y);
                let phi = angle(x, y);
                let outer = if self.branches.len() == 1 {
                    r
                } else {
                    self.envelope_radius(phi)
                };
                if r >= outer - 1e-12 {
                    pts.push((phi, x, y));
                }
            }
        }
        pts.sort_by(|p, q| q.0.total_cmp(&p.0));
        pts.dedup_by(|p, q| (p.1 - q.1).abs() < 1e-15 && (p.2 - q.2).abs() < 1e-15);
        if pts.is_empty() {
            pts.push((0.0, 0.0, 0.0));
        }
        BoundaryCurve {
            z_sq: self.z_sq,
            points: pts.into_iter().map(|(_, x, y)| (x, y)).collect(),
        }
    }

    /// Signed radial distance of `(x_sq, y_sq)` beyond the envelope.
    pub fn excess(&self, x_sq: f64, y_sq: f64) -> f64 {
        let (x, y) = (x_sq.max(0.0), y_sq.max(0.0));
        x.hypot(y) - self.envelope_radius(angle(x, y))
    }

    pub fn classify(&self, x_sq: f64, y_sq: f64, tol: f64) -> Region {
        let (x, y) = (x_sq.max(0.0), y_sq.max(0.0));
        let r = x.hypot(y);
        let radii = self.radii(angle(x, y));
        let outer = radii.iter().copied().fold(0.0, f64::max);
        if r > outer + tol {
            Region::Outside
        } else if radii.iter().any(|rb| (r - rb).abs() <= tol) {
            Region::OnBoundary
        } else {
            Region::Inside
        }
    }
}

/// Constant-`N_A|BC^2` slice of the boundary, as points `(N_A|C^2, N_A|B^2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCurve {
    pub z_sq: f64,
    pub points: Vec<(f64, f64)>,
}

impl BoundaryCurve {
    pub fn first(&self) -> (f64, f64) {
        self.points[0]
    }

    pub fn last(&self) -> (f64, f64) {
        *self.points.last().expect("curves are never empty")
    }
}

/// Qubit boundary envelope at `N_A|BC^2 = z_sq`.
pub fn boundary_curve(z_sq: f64, n_points: usize) -> Result<BoundaryCurve> {
    Ok(BoundaryFamily::qubit().slice(z_sq, n_points)?.envelope())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Inside,
    OnBoundary,
    Outside,
}

impl std::fmt::Display for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Inside => "inside",
            Self::OnBoundary => "on_boundary",
            Self::Outside => "outside",
        })
    }
}

/// Classifies a qubit triple against the boundary at its own `N_A|BC^2`.
///
/// `OnBoundary` means the point lies within [`ON_BOUNDARY_TOL`] of some
/// branch of the `c = 0` surface; `Outside` means it lies radially beyond
/// the outer envelope.
pub fn classify_triple(t: &NegativityTriple) -> Result<Region> {
    classify_triple_with(
        BoundaryFamily::qubit(),
        t,
        ON_BOUNDARY_TOL,
        DEFAULT_CURVE_POINTS,
    )
}

pub fn classify_triple_with(
    family: BoundaryFamily,
    t: &NegativityTriple,
    tol: f64,
    n_points: usize,
) -> Result<Region> {
    let slice = family.slice(t.n_abc_sq, n_points)?;
    Ok(slice.classify(t.n_ac_sq, t.n_ab_sq, tol))
}

/// Signed radial excess of a triple beyond the family envelope at its own
/// `N_A|BC^2`.
pub fn radial_excess(family: BoundaryFamily, t: &NegativityTriple, n_points: usize) -> Result<f64> {
    Ok(family
        .slice(t.n_abc_sq, n_points)?
        .excess(t.n_ac_sq, t.n_ab_sq))
}
