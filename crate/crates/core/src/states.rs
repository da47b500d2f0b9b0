//! State constructors: the qubit canonical form, the qudit family built from
//! it, the swap-rotated maximally entangled family, named qubit states and
//! Haar-random pure states.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, PureState, C64};

/// Tolerance on the normalization of parameter sets.
pub const PARAM_NORM_TOL: f64 = 1e-12;

fn check_nonneg(name: &str, x: f64) -> Result<()> {
    if !(x >= 0.0 && x.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "{name} must be a finite non-negative real, got {x}"
        )));
    }
    Ok(())
}

/// Coefficients of `d|000> + w|100> + a|101> + b|110> + c|111>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcinParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub omega: C64,
}

impl AcinParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, omega: C64) -> Result<Self> {
        let p = Self { a, b, c, d, omega };
        p.validate()?;
        Ok(p)
    }

    /// Rescales non-negative coefficients to unit norm.
    pub fn normalized(a: f64, b: f64, c: f64, d: f64, omega: C64) -> Result<Self> {
        for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            check_nonneg(name, x)?;
        }
        let n = (a * a + b * b + c * c + d * d + omega.norm_sqr()).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalizable(format!("coefficient norm is {n}")));
        }
        Self::new(a / n, b / n, c / n, d / n, omega / n)
    }

    /// The `c = w = 0` boundary state with `d` fixed by normalization.
    pub fn boundary(a: f64, b: f64) -> Result<Self> {
        check_nonneg("a", a)?;
        check_nonneg("b", b)?;
        let rest = 1.0 - a * a - b * b;
        if rest < -PARAM_NORM_TOL {
            return Err(Error::NotNormalizable(format!(
                "a^2 + b^2 = {} exceeds 1",
                a * a + b * b
            )));
        }
        Self::new(a, b, 0.0, rest.max(0.0).sqrt(), C64::new(0.0, 0.0))
    }

    pub fn norm_sq(&self) -> f64 {
        self.a * self.a
            + self.b * self.b
            + self.c * self.c
            + self.d * self.d
            + self.omega.norm_sqr()
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            check_nonneg(name, x)?;
        }
        if !(self.omega.re.is_finite() && self.omega.im.is_finite()) {
            return Err(Error::InvalidParams("omega must be finite".into()));
        }
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > PARAM_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(())
    }
}

/// Coefficients of `d|000> + sum_{j=1}^{D-1} (a|j0j> + b|jj0> + c|jjj>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuditFamilyParams {
    pub dim: usize,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl QuditFamilyParams {
    pub fn new(dim: usize, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let p = Self { dim, a, b, c, d };
        p.validate()?;
        Ok(p)
    }

    /// Rescales non-negative coefficients so that `d^2 + (D-1)(a^2+b^2+c^2) = 1`.
    pub fn normalized(dim: usize, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {dim}"
            )));
        }
        for (name, x) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            check_nonneg(name, x)?;
        }
        let m = (dim - 1) as f64;
        let n = (d * d + m * (a * a + b * b + c * c)).sqrt();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NotNormalizable(format!("coefficient norm is {n}")));
        }
        Self::new(dim, a / n, b / n, c / n, d / n)
    }

    /// The `c = 0` member with `d` fixed by normalization.
    pub fn boundary(dim: usize, a: f64, b: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {dim}"
            )));
        }
        check_nonneg("a", a)?;
        check_nonneg("b", b)?;
        let rest = 1.0 - (dim - 1) as f64 * (a * a + b * b);
        if rest < -PARAM_NORM_TOL {
            return Err(Error::NotNormalizable(format!(
                "(D-1)(a^2+b^2) = {} exceeds 1",
                1.0 - rest
            )));
        }
        Self::new(dim, a, b, 0.0, rest.max(0.0).sqrt())
    }

    pub fn norm_sq(&self) -> f64 {
        self.d * self.d
            + (self.dim as f64 - 1.0) * (self.a * self.a + self.b * self.b + self.c * self.c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {}",
                self.dim
            )));
        }
        for (name, x) in [("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            check_nonneg(name, x)?;
        }
        let norm_sq = self.norm_sq();
        if (norm_sq - 1.0).abs() > PARAM_NORM_TOL {
            return Err(Error::NotNormalized { norm_sq });
        }
        Ok(())
    }

    /// The same state with `a` and `b` exchanged (A|B and A|C roles swap).
    pub fn swapped(&self) -> Self {
        Self {
            a: self.b,
            b: self.a,
            ..*self
        }
    }
}

/// `d e^{i theta}|000> + b sum_j (cos theta |jj0> + i sin theta |j0j>)`,
/// with `b = sqrt((1 - d^2)/(D - 1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwapFamilyParams {
    pub dim: usize,
    pub d: f64,
    pub theta: f64,
}

impl SwapFamilyParams {
    pub fn new(dim: usize, d: f64, theta: f64) -> Result<Self> {
        let p = Self { dim, d, theta };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(Error::InvalidParams(format!(
                "local dimension must be >= 2, got {}",
                self.dim
            )));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return Err(Error::InvalidParams(format!(
                "d must lie in [0, 1], got {}",
                self.d
            )));
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParams("theta must be finite".into()));
        }
        Ok(())
    }

    pub fn b(&self) -> f64 {
        ((1.0 - self.d * self.d) / (self.dim as f64 - 1.0))
            .max(0.0)
            .sqrt()
    }

    /// The qudit-family member with `c = 0` that this state is locally
    /// equivalent to.
    pub fn equivalent_family(&self) -> Result<QuditFamilyParams> {
        let b = self.b();
        QuditFamilyParams::new(
            self.dim,
            b * self.theta.sin().abs(),
            b * self.theta.cos().abs(),
            0.0,
            self.d,
        )
    }
}

pub fn acin_state(p: &AcinParams) -> Result<PureState> {
    p.validate()?;
    let z = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    PureState::new(
        [2, 2, 2],
        vec![re(p.d), z, z, z, p.omega, re(p.a), re(p.b), re(p.c)],
    )
}

pub fn qudit_family_state(p: &QuditFamilyParams) -> Result<PureState> {
    p.validate()?;
    let n = p.dim;
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut amps = vec![C64::new(0.0, 0.0); n * n * n];
    amps[idx(0, 0, 0)] = C64::new(p.d, 0.0);
    for j in 1..n {
        amps[idx(j, 0, j)] += p.a;
        amps[idx(j, j, 0)] += p.b;
        amps[idx(j, j, j)] += p.c;
    }
    PureState::new([n, n, n], amps)
}

pub fn swap_family_state(p: &SwapFamilyParams) -> Result<PureState> {
    p.validate()?;
    let n = p.dim;
    let b = p.b();
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    let mut amps = vec![C64::new(0.0, 0.0); n * n * n];
    amps[idx(0, 0, 0)] = C64::from_polar(p.d, p.theta);
    for j in 1..n {
        amps[idx(j, j, 0)] += C64::new(b * p.theta.cos(), 0.0);
        amps[idx(j, 0, j)] += C64::new(0.0, b * p.theta.sin());
    }
    PureState::new([n, n, n], amps)
}

/// Standard complex Gaussian: real and imaginary parts each `N(0, 1/2)`.
fn complex_gaussian(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * FRAC_1_SQRT_2
}

/// Haar-random pure state drawn from `rng`.
pub fn haar_random_pure_with(dims: [usize; 3], rng: &mut impl Rng) -> Result<PureState> {
    let len: usize = dims.iter().product();
    let amps = (0..len).map(|_| complex_gaussian(rng)).collect();
    PureState::from_unnormalized(dims, amps)
}

/// Haar-random pure state, reproducible from `seed`.
pub fn haar_random_pure(dims: [usize; 3], seed: u64) -> Result<PureState> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    haar_random_pure_with(dims, &mut rng)
}

/// Haar-random unitary: Gram-Schmidt on a complex Ginibre matrix, which
/// leaves the triangular factor with a positive diagonal.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
        for u in &cols {
            let proj: C64 = u.iter().zip(&v).map(|(x, y)| x.conj() * y).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= proj * ui;
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            continue;
        }
        v.iter_mut().for_each(|z| *z /= norm);
        cols.push(v);
    }
    ComplexMatrix::from_fn(n, |i, j| cols[j][i])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NamedState {
    Ghz,
    W,
    Product,
}

impl FromStr for NamedState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ghz" => Ok(Self::Ghz),
            "w" => Ok(Self::W),
            "product" => Ok(Self::Product),
            _ => Err(Error::UnknownName(s.to_string())),
        }
    }
}

impl fmt::Display for NamedState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ghz => "ghz",
            Self::W => "w",
            Self::Product => "product",
        })
    }
}

/// GHZ `(|000> + |111>)/sqrt2`, W `(|001> + |010> + |100>)/sqrt3`, or `|000>`.
pub fn named_state(name: NamedState) -> PureState {
    let z = C64::new(0.0, 0.0);
    let mut amps = vec![z; 8];
    match name {
        NamedState::Ghz => {
            amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
            amps[7] = C64::new(FRAC_1_SQRT_2, 0.0);
        }
        NamedState::W => {
            let s = 1.0 / 3f64.sqrt();
            for i in [1, 2, 4] {
                amps[i] = C64::new(s, 0.0);
            }
        }
        NamedState::Product => amps[0] = C64::new(1.0, 0.0),
    }
    PureState::new([2, 2, 2], amps).expect("named states are normalized")
}
