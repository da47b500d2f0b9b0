//! Sampling of achievable triples, the constant-`z^2` region-filling sweep,
//! perturbation search for points beyond the boundary, and dataset IO.
//!
//! Every random quantity is derived from an explicit `u64` seed. Parallel
//! work gets per-item seeds from [`derive_seed`] and results are collected in
//! index order, so outputs do not depend on the thread count.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary::{BoundaryCurve, BoundaryFamily};
use crate::error::{Error, Result};
use crate::linalg::{PureState, C64};
use crate::measures::{concurrence_triple, negativity_triple, ConcurrenceTriple, NegativityTriple};
use crate::qudit::{pt_block_decompose, pt_determinants, Pair};
use crate::states::{
    acin_state, haar_random_pure, haar_unitary, qudit_family_state, AcinParams, QuditFamilyParams,
};

/// Boundary samples per branch used when measuring excess during a search.
/// Radii are refined by bisection, so this only has to bracket the angle.
pub const SEARCH_CURVE_POINTS: usize = 128;

const STALL_LIMIT: usize = 20;
const STEP_FLOOR: f64 = 1e-8;

/// SplitMix64 finalizer applied to `seed + (index + 1) * golden`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Fixed-width float rendering used by every dataset: 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Haar,
    AcinGrid,
    QuditGrid,
    SwapGrid,
    Perturbation,
}

impl Source {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Haar => "haar",
            Self::AcinGrid => "acin_grid",
            Self::QuditGrid => "qudit_grid",
            Self::SwapGrid => "swap_grid",
            Self::Perturbation => "perturbation",
        }
    }
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Source {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Self::Haar,
            Self::AcinGrid,
            Self::QuditGrid,
            Self::SwapGrid,
            Self::Perturbation,
        ]
        .into_iter()
        .find(|src| src.as_str() == s)
        .ok_or_else(|| Error::Format(format!("unknown source `{s}`")))
    }
}

/// One dataset row. For Haar samples `seed` regenerates the state through
/// [`haar_random_pure`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRecord {
    pub source: Source,
    pub seed: u64,
    pub triple: NegativityTriple,
    pub concurrence: Option<ConcurrenceTriple>,
    pub params: Option<Vec<f64>>,
}

/// `n` Haar-random pure states of three `d`-dimensional parties. Qubit
/// records also carry the concurrence triple.
pub fn sample_triples(d: usize, n: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    if n == 0 {
        return Err(Error::InvalidParams(
            "sample count must be at least 1".into(),
        ));
    }
    if d < 2 {
        return Err(Error::InvalidParams(format!(
            "local dimension must be >= 2, got {d}"
        )));
    }
    (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let s = derive_seed(seed, i);
            let psi = haar_random_pure([d, d, d], s)?;
            let concurrence = if d == 2 {
                Some(concurrence_triple(&psi)?)
            } else {
                None
            };
            Ok(SampleRecord {
                source: Source::Haar,
                seed: s,
                triple: negativity_triple(&psi)?,
                concurrence,
                params: None,
            })
        })
        .collect()
}

/// Curves of the constant-`z^2` sweep plus the pieces needed to check them.
#[derive(Debug, Clone)]
pub struct RegionFill {
    /// The fixed `d` (outer boundary root for this `z^2`).
    pub d: f64,
    pub c_values: Vec<f64>,
    pub curves: Vec<BoundaryCurve>,
    /// `(det rho_AC^{T_A}, det rho_AB^{T_A})` for each curve point.
    pub determinants: Vec<Vec<(f64, f64)>>,
    /// `(a, b)` for each curve point.
    pub coefficients: Vec<Vec<(f64, f64)>>,
}

/// Outcome of the three region-filling checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FillChecks {
    /// Largest distance of a curve's end points from their coordinate planes.
    pub max_endpoint_offset: f64,
    /// Largest radial growth from one curve to the next at a matched index.
    pub max_nesting_violation: f64,
    /// Largest determinant over points with `a, b > 0` (should be negative).
    pub max_interior_determinant: f64,
    /// Distance of the last curve from the origin.
    pub collapse_radius: f64,
}

impl FillChecks {
    pub fn passed(&self, tol: f64) -> bool {
        self.max_endpoint_offset <= tol
            && self.max_nesting_violation <= tol
            && self.max_interior_determinant < 0.0
            && self.collapse_radius <= tol
    }
}

impl RegionFill {
    pub fn checks(&self) -> FillChecks {
        let mut endpoint: f64 = 0.0;
        for curve in &self.curves {
            endpoint = endpoint
                .max(curve.first().0.abs())
                .max(curve.last().1.abs());
        }
        let mut nesting: f64 = 0.0;
        for pair in self.curves.windows(2) {
            for (p, q) in pair[0].points.iter().zip(&pair[1].points) {
                nesting = nesting.max(q.0.hypot(q.1) - p.0.hypot(p.1));
            }
        }
        let mut det = f64::NEG_INFINITY;
        for (dets, coeffs) in self.determinants.iter().zip(&self.coefficients) {
            for (&(x, y), &(a, b)) in dets.iter().zip(coeffs) {
                if a > 0.0 && b > 0.0 {
                    det = det.max(x).max(y);
                }
            }
        }
        let last = self.curves.last().expect("sweep has at least two curves");
        let collapse = last
            .points
            .iter()
            .map(|p| p.0.hypot(p.1))
            .fold(0.0, f64::max);
        FillChecks {
            max_endpoint_offset: endpoint,
            max_nesting_violation: nesting,
            max_interior_determinant: det,
            collapse_radius: collapse,
        }
    }
}

/// Sweeps `c` from 0 to `sqrt(1 - d^2)` at fixed `d`, tracing the curve of
/// `w = 0` states at constant `N_A|BC^2 = z_sq`. Point `i` of every curve uses
/// `a = rho i/(n-1)`, `b = sqrt(rho^2 - a^2)` with `rho^2 = 1 - d^2 - c^2`, so
/// the `c = 0` curve coincides with the boundary slice.
pub fn region_fill_sweep(z_sq: f64, n_c: usize, n_points: usize) -> Result<RegionFill> {
    if !(z_sq > 0.0 && z_sq < 1.0) {
        return Err(Error::Unreachable { z_sq, max: 1.0 });
    }
    if n_c < 2 || n_points < 2 {
        return Err(Error::InvalidParams(format!(
            "need at least 2 curves and 2 points per curve, got {n_c} and {n_points}"
        )));
    }
    let d = ((1.0 + (1.0 - z_sq).sqrt()) / 2.0).sqrt();
    let r = (1.0 - d * d).max(0.0).sqrt();
    let c_values: Vec<f64> = (0..n_c)
        .map(|k| {
            if k + 1 == n_c {
                r
            } else {
                r * k as f64 / (n_c - 1) as f64
            }
        })
        .collect();

    let per_curve: Vec<_> = c_values
        .par_iter()
        .map(|&c| -> Result<_> {
            let rho = (r * r - c * c).max(0.0).sqrt();
            let mut points = Vec::with_capacity(n_points);
            let mut dets = Vec::with_capacity(n_points);
            let mut coeffs = Vec::with_capacity(n_points);
            for i in 0..n_points {
                let a = if i + 1 == n_points {
                    rho
                } else {
                    rho * i as f64 / (n_points - 1) as f64
                };
                let b = (rho * rho - a * a).max(0.0).sqrt();
                let p = QuditFamilyParams { dim: 2, a, b, c, d };
                let x = pt_block_decompose(&p, Pair::AC)?.negativity()?;
                let y = pt_block_decompose(&p, Pair::AB)?.negativity()?;
                points.push((x * x, y * y));
                dets.push(pt_determinants(&p));
                coeffs.push((a, b));
            }
            Ok((BoundaryCurve { z_sq, points }, dets, coeffs))
        })
        .collect::<Result<_>>()?;

    let mut fill = RegionFill {
        d,
        c_values,
        curves: Vec::new(),
        determinants: Vec::new(),
        coefficients: Vec::new(),
    };
    for (curve, dets, coeffs) in per_curve {
        fill.curves.push(curve);
        fill.determinants.push(dets);
        fill.coefficients.push(coeffs);
    }
    Ok(fill)
}

/// Starting point of a perturbation search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SearchBase {
    Qubit(AcinParams),
    Qudit(QuditFamilyParams),
}

impl SearchBase {
    pub fn dim(&self) -> usize {
        match self {
            Self::Qubit(_) => 2,
            Self::Qudit(p) => p.dim,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Largest signed radial distance beyond the boundary over all trials.
    pub max_excess: f64,
    /// Parameters of the worst trial: `(a, b, c, d, Re w, Im w)` for qubits,
    /// interleaved real and imaginary amplitudes for qudits.
    pub at_params: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub dim: usize,
    pub final_step: f64,
}

enum Point {
    Qubit([f64; 6]),
    Amplitudes(Vec<C64>),
}

impl Point {
    fn state(&self, dim: usize) -> Result<PureState> {
        match self {
            Self::Qubit(v) => {
                let p = AcinParams::normalized(
                    v[0].abs(),
                    v[1].abs(),
                    v[2].abs(),
                    v[3].abs(),
                    C64::new(v[4], v[5]),
                )?;
                acin_state(&p)
            }
            Self::Amplitudes(amps) => PureState::from_unnormalized([dim; 3], amps.clone()),
        }
    }

    fn perturbed(&self, step: f64, rng: &mut impl Rng) -> Self {
        let mut gauss = || -> f64 { rng.sample(StandardNormal) };
        match self {
            Self::Qubit(v) => Self::Qubit(v.map(|x| x + step * gauss())),
            Self::Amplitudes(amps) => Self::Amplitudes(
                amps.iter()
                    .map(|z| z + C64::new(step * gauss(), step * gauss()))
                    .collect(),
            ),
        }
    }

    fn flatten(&self) -> Vec<f64> {
        match self {
            Self::Qubit(v) => v.to_vec(),
            Self::Amplitudes(amps) => amps.iter().flat_map(|z| [z.re, z.im]).collect(),
        }
    }
}

/// Hill-climbs on the excess beyond the `c = 0` envelope at the perturbed
/// `N_A|BC^2`. Each trial adds Gaussian noise of size `step` to the current
/// point (the six canonical-form parameters for qubits, every amplitude for
/// qudits), applies Haar-random local unitaries, and accepts the candidate
/// if it increases the excess. The step halves after 20 consecutive
/// rejections, down to `1e-8`.
pub fn perturbation_search(
    base: SearchBase,
    n_trials: usize,
    step: f64,
    seed: u64,
) -> Result<SearchReport> {
    if !(step >= 0.0 && step.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "step must be finite and non-negative, got {step}"
        )));
    }
    let dim = base.dim();
    let family = BoundaryFamily::qudit(dim)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let excess_of = |psi: &PureState| -> Result<f64> {
        let t = negativity_triple(psi)?;
        let z_sq = t.n_abc_sq.min(family.max_z_sq());
        Ok(family
            .slice(z_sq, SEARCH_CURVE_POINTS)?
            .excess(t.n_ac_sq, t.n_ab_sq))
    };

    let mut current = match base {
        SearchBase::Qubit(p) => {
            p.validate()?;
            Point::Qubit([p.a, p.b, p.c, p.d, p.omega.re, p.omega.im])
        }
        SearchBase::Qudit(p) => Point::Amplitudes(qudit_family_state(&p)?.amplitudes().to_vec()),
    };
    let mut current_excess = excess_of(&current.state(dim)?)?;
    let mut best = current_excess;
    let mut best_params = current.flatten();
    let mut step = step;
    let mut stalled = 0;

    for _ in 0..n_trials {
        let candidate = current.perturbed(step, &mut rng);
        let unitaries = [
            haar_unitary(dim, &mut rng),
            haar_unitary(dim, &mut rng),
            haar_unitary(dim, &mut rng),
        ];
        let psi = match candidate.state(dim) {
            Ok(psi) => psi.apply_local([&unitaries[0], &unitaries[1], &unitaries[2]])?,
            Err(Error::NotNormalizable(_)) => continue,
            Err(e) => return Err(e),
        };
        let excess = excess_of(&psi)?;
        if excess > best {
            best = excess;
            best_params = candidate.flatten();
        }
        if excess > current_excess {
            current = candidate;
            current_excess = excess;
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= STALL_LIMIT {
                step = (step / 2.0).max(STEP_FLOOR).min(step);
                stalled = 0;
            }
        }
    }
    Ok(SearchReport {
        max_excess: best,
        at_params: best_params,
        trials: n_trials,
        seed,
        dim,
        final_step: step,
    })
}

/// `n` qubit boundary states with `(a, b)` uniform in the unit quarter disk.
pub fn qubit_boundary_bases(n: usize, seed: u64) -> Result<Vec<AcinParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b): (f64, f64) = (rng.random(), rng.random());
        if a * a + b * b < 1.0 {
            out.push(AcinParams::boundary(a, b)?);
        }
    }
    Ok(out)
}

/// `n` qudit boundary states (`c = 0`) with `d` above the fold.
pub fn qudit_boundary_bases(dim: usize, n: usize, seed: u64) -> Result<Vec<QuditFamilyParams>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = 1.0 / (dim as f64).sqrt();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b): (f64, f64) = (rng.random::<f64>() * limit, rng.random::<f64>() * limit);
        if (dim - 1) as f64 * (a * a + b * b) < 1.0 - 1.0 / dim as f64 {
            out.push(QuditFamilyParams::boundary(dim, a, b)?);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::Format(format!(
                "unknown format `{other}` (expected csv or json)"
            ))),
        }
    }
}

const BASE_COLUMNS: [&str; 5] = ["source", "seed", "n_ac_sq", "n_ab_sq", "n_abc_sq"];
const CONCURRENCE_COLUMNS: [&str; 3] = ["c_ac_sq", "c_ab_sq", "c_abc_sq"];

#[derive(Serialize, Deserialize)]
struct JsonRow {
    source: Source,
    seed: u64,
    n_ac_sq: f64,
    n_ab_sq: f64,
    n_abc_sq: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    c_ac_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    c_ab_sq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    c_abc_sq: Option<f64>,
}

/// Writes records in the dataset schema. The concurrence columns appear when
/// every record carries a concurrence triple. Source parameters are not
/// serialized.
pub fn emit_dataset(records: &[SampleRecord], path: &Path, format: Format) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_dataset(records, &mut out, format)?;
    out.flush()?;
    Ok(())
}

pub fn write_dataset(records: &[SampleRecord], out: &mut impl Write, format: Format) -> Result<()> {
    let with_c = !records.is_empty() && records.iter().all(|r| r.concurrence.is_some());
    match format {
        Format::Csv => {
            let mut header: Vec<&str> = BASE_COLUMNS.to_vec();
            if with_c {
                header.extend(CONCURRENCE_COLUMNS);
            }
            writeln!(out, "{}", header.join(","))?;
            for r in records {
                let t = &r.triple;
                write!(
                    out,
                    "{},{},{},{},{}",
                    r.source,
                    r.seed,
                    fmt_float(t.n_ac_sq),
                    fmt_float(t.n_ab_sq),
                    fmt_float(t.n_abc_sq)
                )?;
                if let (true, Some(c)) = (with_c, r.concurrence) {
                    write!(
                        out,
                        ",{},{},{}",
                        fmt_float(c.c_ac_sq),
                        fmt_float(c.c_ab_sq),
                        fmt_float(c.c_abc_sq)
                    )?;
                }
                writeln!(out)?;
            }
        }
        Format::Json => {
            let rows: Vec<JsonRow> = records
                .iter()
                .map(|r| {
                    let c = r.concurrence.filter(|_| with_c);
                    JsonRow {
                        source: r.source,
                        seed: r.seed,
                        n_ac_sq: r.triple.n_ac_sq,
                        n_ab_sq: r.triple.n_ab_sq,
                        n_abc_sq: r.triple.n_abc_sq,
                        c_ac_sq: c.map(|c| c.c_ac_sq),
                        c_ab_sq: c.map(|c| c.c_ab_sq),
                        c_abc_sq: c.map(|c| c.c_abc_sq),
                    }
                })
                .collect();
            serde_json::to_writer_pretty(&mut *out, &rows)
                .map_err(|e| Error::Format(e.to_string()))?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Reads a dataset written by [`emit_dataset`].
pub fn read_dataset(path: &Path, format: Format) -> Result<Vec<SampleRecord>> {
    let file = File::open(path)?;
    let rows: Vec<JsonRow> = match format {
        Format::Json => serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::Format(e.to_string()))?,
        Format::Csv => {
            let mut reader = csv::Reader::from_reader(file);
            let headers = reader
                .headers()
                .map_err(|e| Error::Format(e.to_string()))?
                .clone();
            let names: Vec<&str> = headers.iter().collect();
            let with_c = names.len() == 8;
            let expected: Vec<&str> = BASE_COLUMNS
                .iter()
                .chain(if with_c {
                    &CONCURRENCE_COLUMNS[..]
                } else {
                    &[]
                })
                .copied()
                .collect();
            if names != expected {
                return Err(Error::Format(format!("unexpected header {names:?}")));
            }
            reader
                .deserialize()
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Format(e.to_string()))?
        }
    };
    Ok(rows
        .into_iter()
        .map(|row| {
            let concurrence = match (row.c_ac_sq, row.c_ab_sq, row.c_abc_sq) {
                (Some(c_ac_sq), Some(c_ab_sq), Some(c_abc_sq)) => Some(ConcurrenceTriple {
                    c_ac_sq,
                    c_ab_sq,
                    c_abc_sq,
                }),
                _ => None,
            };
            SampleRecord {
                source: row.source,
                seed: row.seed,
                triple: NegativityTriple::new(row.n_ac_sq, row.n_ab_sq, row.n_abc_sq),
                concurrence,
                params: None,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary::{boundary_curve, classify_triple, Region};
    use crate::linalg::{determinant, partial_transpose};
    use crate::measures::monogamy_residual;
    use crate::states::qudit_family_state;

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: std::collections::HashSet<u64> =
            (0..10_000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        assert_ne!(derive_seed(0, 0), derive_seed(1, 0));
    }

    #[test]
    fn single_sample_is_reproducible() {
        let a = sample_triples(2, 1, 9).unwrap();
        let b = sample_triples(2, 1, 9).unwrap();
        assert_eq!(a, b);
        let again = negativity_triple(&haar_random_pure([2, 2, 2], a[0].seed).unwrap()).unwrap();
        assert_eq!(again, a[0].triple);
    }

    #[test]
    fn qubit_samples_obey_theorems() {
        let records = sample_triples(2, 2000, 1).unwrap();
        let mut closest = f64::INFINITY;
        for r in &records {
            assert!(monogamy_residual(&r.triple) >= -1e-10);
            let c = r.concurrence.unwrap();
            assert!(monogamy_residual(&c) >= -1e-10);
            closest = closest.min(monogamy_residual(&c));
            assert_ne!(classify_triple(&r.triple).unwrap(), Region::Outside);
        }
        // States close to the linear plane exist but are rare.
        assert!(closest < 2e-2, "{closest}");
    }

    #[test]
    fn qutrit_samples_have_no_concurrence() {
        let records = sample_triples(3, 4, 2).unwrap();
        assert!(records.iter().all(|r| r.concurrence.is_none()));
        assert!(sample_triples(2, 0, 0).is_err());
    }

    #[test]
    fn region_fill_properties() {
        let z_sq = 0.5;
        let fill = region_fill_sweep(z_sq, 12, 64).unwrap();
        assert!(fill.checks().passed(1e-9), "{:?}", fill.checks());
        let reference = boundary_curve(z_sq, 64).unwrap();
        for (p, q) in fill.curves[0].points.iter().zip(&reference.points) {
            assert!((p.0 - q.0).abs() < 1e-12 && (p.1 - q.1).abs() < 1e-12);
        }
        for curve in &fill.curves {
            assert!(curve
                .points
                .iter()
                .all(|_| (curve.z_sq - z_sq).abs() == 0.0));
        }
        assert!(region_fill_sweep(1.5, 4, 8).is_err());
    }

    #[test]
    fn region_fill_heights_are_constant() {
        let fill = region_fill_sweep(0.3, 5, 9).unwrap();
        for (k, &c) in fill.c_values.iter().enumerate() {
            for &(a, b) in &fill.coefficients[k] {
                let z = 4.0 * (a * a + b * b + c * c) * fill.d * fill.d;
                assert!((z - 0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn fill_determinants_match_lu() {
        let fill = region_fill_sweep(0.6, 4, 9).unwrap();
        let (k, i) = (1, 4);
        let (a, b) = fill.coefficients[k][i];
        let p = QuditFamilyParams::new(2, a, b, fill.c_values[k], fill.d).unwrap();
        let psi = qudit_family_state(&p).unwrap();
        let lu = determinant(&partial_transpose(&psi.reduced(&[0, 2]).unwrap(), (2, 2)).unwrap())
            .unwrap()
            .re;
        assert!((lu - fill.determinants[k][i].0).abs() < 1e-14);
        assert!(lu < 0.0);
    }

    #[test]
    fn zero_step_search_stays_on_boundary() {
        let base = AcinParams::boundary(0.4, 0.3).unwrap();
        let report = perturbation_search(SearchBase::Qubit(base), 50, 0.0, 3).unwrap();
        assert!(report.max_excess <= 1e-9);
        assert_eq!(report.trials, 50);
    }

    #[test]
    fn qubit_search_finds_nothing() {
        let base = AcinParams::boundary(0.5, 0.2).unwrap();
        let report = perturbation_search(SearchBase::Qubit(base), 400, 1e-2, 11).unwrap();
        assert!(report.max_excess <= 1e-7, "{report:?}");
        assert!(report.final_step <= 1e-2);
    }

    #[test]
    fn search_is_deterministic() {
        let base = SearchBase::Qudit(QuditFamilyParams::boundary(3, 0.2, 0.3).unwrap());
        let a = perturbation_search(base, 30, 1e-2, 5).unwrap();
        let b = perturbation_search(base, 30, 1e-2, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.at_params.len(), 2 * 27);
    }

    #[test]
    fn bases_are_valid_boundary_states() {
        for p in qubit_boundary_bases(20, 4).unwrap() {
            assert_eq!(p.c, 0.0);
            p.validate().unwrap();
        }
        for p in qudit_boundary_bases(3, 20, 4).unwrap() {
            assert!(p.d > 1.0 / 3f64.sqrt());
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let records = sample_triples(2, 3, 17).unwrap();
        emit_dataset(&records, &path, Format::Csv).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("source,seed,n_ac_sq,n_ab_sq,n_abc_sq,c_ac_sq,c_ab_sq,c_abc_sq\n"));
        assert!(!text.contains('\r'));
        assert_eq!(read_dataset(&path, Format::Csv).unwrap(), records);
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.json");
        let records = sample_triples(3, 3, 17).unwrap();
        emit_dataset(&records, &path, Format::Json).unwrap();
        assert_eq!(read_dataset(&path, Format::Json).unwrap(), records);
    }

    #[test]
    fn empty_dataset_is_header_only() {
        let mut buf = Vec::new();
        write_dataset(&[], &mut buf, Format::Csv).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "source,seed,n_ac_sq,n_ab_sq,n_abc_sq\n"
        );
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "source,seed,x\nhaar,1,0.0\n").unwrap();
        assert!(matches!(
            read_dataset(&path, Format::Csv),
            Err(Error::Format(_))
        ));
    }
}
