//! Frequency-trend curve fitting.
//!
//! All exponential fits are done in log space, so every fit is closed form:
//! `ln y = ln a + b·f` solved by (weighted) least squares. The oscillator
//! efficiency curve is a parabola rising to a peak at a knot frequency,
//! followed by an exponential decline anchored to the peak value.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::units::FrequencyGhz;

/// Default number of log-spaced frequency bins used for best-point selection.
pub const DEFAULT_BINS: usize = 8;
/// Default weight carried by best points in weighted fits (others weigh 1).
pub const DEFAULT_BEST_POINT_WEIGHT: f64 = 10.0;
/// Minimum number of points accepted by [`fit_piecewise_parab_exp`].
pub const MIN_PIECEWISE_POINTS: usize = 6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("no points to fit")]
    Empty,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("value at {freq} GHz must be positive for a log-domain fit, got {value}")]
    NonPositiveValue { freq: f64, value: f64 },
    #[error("non-finite value at {freq} GHz")]
    NonFinite { freq: f64 },
    #[error("weight at {freq} GHz must be positive and finite, got {weight}")]
    BadWeight { freq: f64, weight: f64 },
    #[error("all frequencies are identical ({0} GHz)")]
    IdenticalFrequencies(f64),
    #[error("number of bins must be at least 1")]
    ZeroBins,
    #[error("no knot candidate leaves at least two distinct frequencies right of the knot")]
    NoValidKnot,
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
}

/// One observation: value `y` at frequency `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub f: FrequencyGhz,
    pub y: f64,
}

impl Point {
    pub fn new(f: FrequencyGhz, y: f64) -> Self {
        Self { f, y }
    }
}

/// Build points from raw `(GHz, value)` pairs. Panics on non-positive frequency.
pub fn points(raw: &[(f64, f64)]) -> Vec<Point> {
    raw.iter()
        .map(|&(f, y)| Point::new(FrequencyGhz::new(f).expect("positive frequency"), y))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedPoint {
    pub f: FrequencyGhz,
    pub y: f64,
    pub weight: f64,
}

impl WeightedPoint {
    pub fn new(f: FrequencyGhz, y: f64, weight: f64) -> Self {
        Self { f, y, weight }
    }
}

/// Closed frequency interval `[lo, hi]` in GHz with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    lo: f64,
    hi: f64,
}

impl Domain {
    pub fn new(lo: f64, hi: f64) -> Result<Self, FitError> {
        if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && lo < hi) {
            return Err(FitError::InvalidCurve(format!(
                "domain [{lo}, {hi}] must satisfy 0 < lo < hi"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.lo && f <= self.hi
    }

    fn of_points(fs: impl Iterator<Item = f64>) -> Result<Self, FitError> {
        let (lo, hi) = fs.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| {
            (lo.min(f), hi.max(f))
        });
        if lo == hi {
            return Err(FitError::IdenticalFrequencies(lo));
        }
        Domain::new(lo, hi)
    }
}

/// Fit diagnostics. `rmse` and `r_squared` are measured on the fitted
/// quantity itself, not its logarithm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub n_points: usize,
    pub n_best_points: usize,
    pub rmse: f64,
    pub r_squared: f64,
    pub converged: bool,
}

/// Result of evaluating a curve at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Query frequency lies outside the curve's fitted domain.
    pub extrapolated: bool,
}

pub trait FrequencyCurve {
    fn value_at(&self, f_ghz: f64) -> f64;
    fn domain(&self) -> Domain;

    /// Value at `f`; the formula is used unchanged outside the domain and
    /// the result is flagged.
    fn evaluate(&self, f: FrequencyGhz) -> Evaluation {
        let f = f.value();
        Evaluation {
            value: self.value_at(f),
            extrapolated: !self.domain().contains(f),
        }
    }
}

/// `y = a·exp(b·f)`, `f` in GHz.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialCurve {
    pub a: f64,
    /// Rate in 1/GHz; negative for a decaying trend.
    pub b: f64,
    pub domain: Domain,
}

impl ExponentialCurve {
    pub fn new(a: f64, b: f64, domain: Domain) -> Result<Self, FitError> {
        if !(a.is_finite() && a > 0.0 && b.is_finite()) {
            return Err(FitError::InvalidCurve(format!(
                "exponential needs finite a > 0 and finite b, got a = {a}, b = {b}"
            )));
        }
        Ok(Self { a, b, domain })
    }

    pub fn with_domain(self, domain: Domain) -> Self {
        Self { domain, ..self }
    }
}

impl FrequencyCurve for ExponentialCurve {
    fn value_at(&self, f: f64) -> f64 {
        self.a * (self.b * f).exp()
    }

    fn domain(&self) -> Domain {
        self.domain
    }
}

/// Parabola `c0 + c1·f + c2·f²` for `f ≤ knot`, then `a·exp(b·f)` for
/// `f > knot`, with `a·exp(b·knot)` equal to the parabola's value at the
/// knot. On `[domain.lo, knot]` the parabola is maximal at the knot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiecewiseParabExpCurve {
    pub knot: FrequencyGhz,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub a: f64,
    pub b: f64,
    pub domain: Domain,
}

/// Relative slack allowed when checking that the parabola peaks at the knot.
const PEAK_TOLERANCE: f64 = 1e-9;

fn horner(c: (f64, f64, f64), f: f64) -> f64 {
    c.0 + f * (c.1 + f * c.2)
}

/// The parabola's maximum over `[lo, knot]` is reached at `knot`.
fn peaks_at_knot(c: (f64, f64, f64), lo: f64, knot: f64) -> bool {
    let (_, c1, c2) = c;
    if c2 < 0.0 {
        -c1 / (2.0 * c2) >= knot * (1.0 - PEAK_TOLERANCE)
    } else if c2 == 0.0 {
        c1 >= 0.0
    } else {
        horner(c, knot) >= horner(c, lo)
    }
}

impl PiecewiseParabExpCurve {
    /// Builds the curve, anchoring the exponential amplitude to the
    /// parabola's value at the knot.
    pub fn new(
        knot: FrequencyGhz,
        coefficients: (f64, f64, f64),
        b: f64,
        domain: Domain,
    ) -> Result<Self, FitError> {
        let (c0, c1, c2) = coefficients;
        let k = knot.value();
        if ![c0, c1, c2, b].iter().all(|v| v.is_finite()) {
            return Err(FitError::InvalidCurve("non-finite coefficient".into()));
        }
        if k < domain.lo() || k > domain.hi() {
            return Err(FitError::InvalidCurve(format!(
                "knot {k} GHz outside domain [{}, {}]",
                domain.lo(),
                domain.hi()
            )));
        }
        if !peaks_at_knot(coefficients, domain.lo(), k) {
            return Err(FitError::InvalidCurve(format!(
                "parabola does not peak at the knot ({k} GHz)"
            )));
        }
        let at_knot = horner(coefficients, k);
        // concave or linear-rising segments are smallest at the left edge;
        // convex ones at their vertex when it lies inside
        let mut low = horner(coefficients, domain.lo()).min(at_knot);
        if c2 > 0.0 {
            let v = -c1 / (2.0 * c2);
            if v > domain.lo() && v < k {
                low = low.min(horner(coefficients, v));
            }
        }
        if !(low > 0.0) {
            return Err(FitError::InvalidCurve(
                "parabola is not positive on its segment".into(),
            ));
        }
        let a = at_knot * (-b * k).exp();
        if !(a.is_finite() && a > 0.0) {
            return Err(FitError::InvalidCurve(format!(
                "anchored amplitude {a} unusable"
            )));
        }
        Ok(Self {
            knot,
            c0,
            c1,
            c2,
            a,
            b,
            domain,
        })
    }

    pub fn with_domain(self, domain: Domain) -> Self {
        Self { domain, ..self }
    }

    pub fn coefficients(&self) -> (f64, f64, f64) {
        (self.c0, self.c1, self.c2)
    }

    pub fn parabola_at(&self, f: f64) -> f64 {
        horner(self.coefficients(), f)
    }

    pub fn exponential_at(&self, f: f64) -> f64 {
        self.a * (self.b * f).exp()
    }
}
impl FrequencyCurve for PiecewiseParabExpCurve {
    fn value_at(&self, f: f64) -> f64 {
        if f <= self.knot.value() {
            self.parabola_at(f)
        } else {
            self.exponential_at(f)
        }
    }

    fn domain(&self) -> Domain {
        self.domain
    }
}

/// Either fitted curve family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Curve {
    Exponential(ExponentialCurve),
    ParabExp(PiecewiseParabExpCurve),
}

impl FrequencyCurve for Curve {
    fn value_at(&self, f: f64) -> f64 {
        match self {
            Curve::Exponential(c) => c.value_at(f),
            Curve::ParabExp(c) => c.value_at(f),
        }
    }

    fn domain(&self) -> Domain {
        match self {
            Curve::Exponential(c) => c.domain,
            Curve::ParabExp(c) => c.domain,
        }
    }
}

pub fn evaluate(curve: &impl FrequencyCurve, f: FrequencyGhz) -> Evaluation {
    curve.evaluate(f)
}

fn check_points(pts: &[Point], log_domain: bool) -> Result<(), FitError> {
    if pts.is_empty() {
        return Err(FitError::Empty);
    }
    for p in pts {
        if !p.y.is_finite() {
            return Err(FitError::NonFinite { freq: p.f.value() });
        }
        if log_domain && p.y <= 0.0 {
            return Err(FitError::NonPositiveValue {
                freq: p.f.value(),
                value: p.y,
            });
        }
    }
    Ok(())
}

fn report(curve: &impl FrequencyCurve, pts: &[Point], n_best_points: usize) -> FitReport {
    let n = pts.len() as f64;
    let mean = pts.iter().map(|p| p.y).sum::<f64>() / n;
    let ss_res = sum_squared_residual(curve, pts);
    let ss_tot: f64 = pts.iter().map(|p| (p.y - mean).powi(2)).sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    FitReport {
        n_points: pts.len(),
        n_best_points,
        rmse: (ss_res / n).sqrt(),
        r_squared,
        converged: true,
    }
}

/// Sum of squared residuals of `curve` against `pts`, on the fitted quantity.
pub fn sum_squared_residual(curve: &impl FrequencyCurve, pts: &[Point]) -> f64 {
    pts.iter()
        .map(|p| (p.y - curve.value_at(p.f.value())).powi(2))
        .sum()
}

/// Ordinary least squares of `ln y` on `f`; returns `(intercept, slope)`.
fn loglinear_line(pts: &[Point]) -> (f64, f64) {
    let n = pts.len() as f64;
    let f_mean = pts.iter().map(|p| p.f.value()).sum::<f64>() / n;
    let ly_mean = pts.iter().map(|p| p.y.ln()).sum::<f64>() / n;
    let mut sff = 0.0;
    let mut sfy = 0.0;
    for p in pts {
        let df = p.f.value() - f_mean;
        sff += df * df;
        sfy += df * p.y.ln();
    }
    let slope = sfy / sff;
    (ly_mean - slope * f_mean, slope)
}

/// Unweighted least-squares fit of `ln y = ln a + b·f`.
pub fn fit_exponential_loglinear(pts: &[Point]) -> Result<(ExponentialCurve, FitReport), FitError> {
    check_points(pts, true)?;
    let domain = Domain::of_points(pts.iter().map(|p| p.f.value()))?;
    let (intercept, slope) = loglinear_line(pts);
    let curve = ExponentialCurve::new(intercept.exp(), slope, domain)?;
    Ok((curve, report(&curve, pts, 0)))
}

/// Minimises `Σ wᵢ·(ln yᵢ − ln a − b·fᵢ)²` in closed form.
pub fn fit_exponential_weighted(
    pts: &[WeightedPoint],
) -> Result<(ExponentialCurve, FitReport), FitError> {
    let plain: Vec<Point> = pts.iter().map(|p| Point::new(p.f, p.y)).collect();
    check_points(&plain, true)?;
    for p in pts {
        if !(p.weight.is_finite() && p.weight > 0.0) {
            return Err(FitError::BadWeight {
                freq: p.f.value(),
                weight: p.weight,
            });
        }
    }
    let domain = Domain::of_points(pts.iter().map(|p| p.f.value()))?;

    let w_sum: f64 = pts.iter().map(|p| p.weight).sum();
    let f_mean = pts.iter().map(|p| p.weight * p.f.value()).sum::<f64>() / w_sum;
    let ly_mean = pts.iter().map(|p| p.weight * p.y.ln()).sum::<f64>() / w_sum;
    let (mut sff, mut sfy) = (0.0, 0.0);
    for p in pts {
        let df = p.f.value() - f_mean;
        sff += p.weight * df * df;
        sfy += p.weight * df * (p.y.ln() - ly_mean);
    }
    let b = sfy / sff;
    let ln_a = ly_mean - b * f_mean;
    let curve = ExponentialCurve::new(ln_a.exp(), b, domain)?;

    let min_w = pts.iter().map(|p| p.weight).fold(f64::INFINITY, f64::min);
    let n_heavy = pts.iter().filter(|p| p.weight > min_w).count();
    Ok((curve, report(&curve, &plain, n_heavy)))
}

/// Edges of `n_bins` log-spaced bins over `[lo, hi]`; `n_bins + 1` values,
/// first and last exactly `lo` and `hi`.
pub fn log_bin_edges(lo: f64, hi: f64, n_bins: usize) -> Vec<f64> {
    let ratio = hi / lo;
    (0..=n_bins)
        .map(|i| match i {
            0 => lo,
            i if i == n_bins => hi,
            i => lo * ratio.powf(i as f64 / n_bins as f64),
        })
        .collect()
}

/// Indices (into `pts`) of the maximal-`y` point of every non-empty log
/// frequency bin, in bin order. Equal `y` within a bin keeps the lower
/// frequency, then the earlier index.
pub fn best_point_indices(pts: &[Point], n_bins: usize) -> Result<Vec<usize>, FitError> {
    if pts.is_empty() {
        return Err(FitError::Empty);
    }
    if n_bins == 0 {
        return Err(FitError::ZeroBins);
    }
    check_points(pts, false)?;
    let (lo, hi) = pts
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
            (lo.min(p.f.value()), hi.max(p.f.value()))
        });
    let edges = log_bin_edges(lo, hi, n_bins);
    let interior = &edges[1..n_bins];

    let mut best: Vec<Option<usize>> = vec![None; n_bins];
    for (i, p) in pts.iter().enumerate() {
        let f = p.f.value();
        let bin = if lo == hi {
            0
        } else {
            interior.partition_point(|&e| e <= f)
        };
        let slot = &mut best[bin];
        let better = match *slot {
            None => true,
            Some(j) => {
                let q = pts[j];
                p.y > q.y || (p.y == q.y && f < q.f.value())
            }
        };
        if better {
            *slot = Some(i);
        }
    }
    Ok(best.into_iter().flatten().collect())
}

/// One point per non-empty log-spaced frequency bin: the one with maximal `y`.
pub fn select_best_points(pts: &[Point], n_bins: usize) -> Result<Vec<Point>, FitError> {
    Ok(best_point_indices(pts, n_bins)?
        .into_iter()
        .map(|i| pts[i])
        .collect())
}

/// Sorted distinct frequencies of `pts`.
fn distinct_frequencies(pts: &[Point]) -> Vec<f64> {
    let mut fs: Vec<f64> = pts.iter().map(|p| p.f.value()).collect();
    fs.sort_by(f64::total_cmp);
    fs.dedup();
    fs
}

/// Knot positions searched by [`fit_piecewise_parab_exp`]: observed
/// frequencies and midpoints between neighbours, ascending, limited to
/// those leaving at least two distinct frequencies at or right of the knot.
pub fn knot_candidates(pts: &[Point]) -> Vec<f64> {
    let fs = distinct_frequencies(pts);
    if fs.len() < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(2 * fs.len());
    for w in fs[..fs.len() - 1].windows(2) {
        out.push(w[0]);
        out.push(0.5 * (w[0] + w[1]));
    }
    out.push(fs[fs.len() - 2]);
    out
}

/// Least-squares polynomial `c0 + c1·f + c2·f²` through `pts`, degree
/// reduced to (distinct frequencies − 1) when fewer than three are present.
/// Solved in the centred, scaled variable `t = (f − centre)/scale`.
fn fit_parabola(pts: &[&Point], centre: f64) -> Option<(f64, f64, f64)> {
    let mut fs: Vec<f64> = pts.iter().map(|p| p.f.value()).collect();
    fs.sort_by(f64::total_cmp);
    fs.dedup();
    let terms = fs.len().min(3);
    if terms == 0 {
        return None;
    }
    let scale = pts
        .iter()
        .map(|p| (p.f.value() - centre).abs())
        .fold(0.0, f64::max)
        .max(1.0);

    // normal equations in t
    let mut m = [[0.0f64; 4]; 3];
    for p in pts {
        let t = (p.f.value() - centre) / scale;
        let basis = [1.0, t, t * t];
        for i in 0..terms {
            for j in 0..terms {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * p.y;
        }
    }
    let d = solve_small(&mut m, terms)?;
    let (d0, d1, d2) = (d[0], d[1], d[2]);

    // expand d0 + d1·t + d2·t² back to powers of f
    let (s, k) = (scale, centre);
    let c2 = d2 / (s * s);
    let c1 = d1 / s - 2.0 * d2 * k / (s * s);
    let c0 = d0 - d1 * k / s + d2 * k * k / (s * s);
    Some((c0, c1, c2))
}

/// Gaussian elimination with partial pivoting on the leading `n`×`n` block
/// of an augmented matrix.
fn solve_small(m: &mut [[f64; 4]; 3], n: usize) -> Option<[f64; 3]> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            for k in col..n {
                m[row][k] -= factor * m[col][k];
            }
            m[row][3] -= factor * m[col][3];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (m[row][3] - tail) / m[row][row];
    }
    Some(x)
}

fn piecewise_at_knot(pts: &[Point], knot: f64, domain: Domain) -> Option<PiecewiseParabExpCurve> {
    let left: Vec<&Point> = pts.iter().filter(|p| p.f.value() <= knot).collect();
    let right: Vec<Point> = pts
        .iter()
        .filter(|p| p.f.value() >= knot)
        .copied()
        .collect();
    if left.is_empty() || distinct_frequencies(&right).len() < 2 {
        return None;
    }
    let coefficients = fit_parabola(&left, knot)?;
    let (_, b) = loglinear_line(&right);
    let knot = FrequencyGhz::new(knot).ok()?;
    PiecewiseParabExpCurve::new(knot, coefficients, b, domain).ok()
}

/// Piecewise parabola-then-exponential fit with grid-searched knot.
///
/// For every candidate knot the left segment (`f ≤ knot`) gets an ordinary
/// least-squares parabola and the right segment (`f ≥ knot`) a log-linear
/// exponential whose amplitude is re-anchored to the parabola's value at
/// the knot. Candidates whose parabola does not peak at the knot, or is not
/// positive, are skipped. The plain exponential over all points is also a
/// candidate (a flat parabola at the lowest frequency). The smallest total
/// squared residual wins; ties go to the lower knot.
pub fn fit_piecewise_parab_exp(
    pts: &[Point],
) -> Result<(PiecewiseParabExpCurve, FitReport), FitError> {
    check_points(pts, true)?;
    if pts.len() < MIN_PIECEWISE_POINTS {
        return Err(FitError::TooFewPoints {
            needed: MIN_PIECEWISE_POINTS,
            got: pts.len(),
        });
    }
    let domain = Domain::of_points(pts.iter().map(|p| p.f.value()))?;

    let mut best: Option<(f64, PiecewiseParabExpCurve)> = None;
    let mut consider = |curve: PiecewiseParabExpCurve| {
        let ssr = sum_squared_residual(&curve, pts);
        if ssr.is_finite() && best.as_ref().is_none_or(|(b, _)| ssr < *b) {
            best = Some((ssr, curve));
        }
    };

    let (plain, _) = fit_exponential_loglinear(pts)?;
    let lo = FrequencyGhz::new(domain.lo()).expect("positive domain");
    let flat = (plain.value_at(domain.lo()), 0.0, 0.0);
    if let Ok(c) = PiecewiseParabExpCurve::new(lo, flat, plain.b, domain) {
        consider(c);
    }
    for knot in knot_candidates(pts) {
        if let Some(c) = piecewise_at_knot(pts, knot, domain) {
            consider(c);
        }
    }

    let (_, curve) = best.ok_or(FitError::NoValidKnot)?;
    Ok((curve, report(&curve, pts, 0)))
}
/// Subset of the fit diagnostics stored alongside a serialized curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub rmse: f64,
    pub r2: f64,
    pub n: usize,
}

impl From<&FitReport> for FitSummary {
    fn from(r: &FitReport) -> Self {
        Self {
            rmse: r.rmse,
            r2: r.r_squared,
            n: r.n_points,
        }
    }
}

/// A fitted curve with its diagnostics; the unit of JSON serialization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveDto", into = "CurveDto")]
pub struct CurveDocument {
    pub curve: Curve,
    pub fit: FitSummary,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
enum ParamsDto {
    #[serde(rename = "exp")]
    Exp { a: f64, b: f64 },
    #[serde(rename = "parab_exp")]
    ParabExp {
        knot_ghz: f64,
        c0: f64,
        c1: f64,
        c2: f64,
        a: f64,
        b: f64,
    },
}

#[derive(Serialize, Deserialize)]
struct CurveDto {
    #[serde(flatten)]
    params: ParamsDto,
    domain_ghz: [f64; 2],
    fit: FitSummary,
}

impl From<CurveDocument> for CurveDto {
    fn from(doc: CurveDocument) -> Self {
        let domain = doc.curve.domain();
        let params = match doc.curve {
            Curve::Exponential(c) => ParamsDto::Exp { a: c.a, b: c.b },
            Curve::ParabExp(c) => ParamsDto::ParabExp {
                knot_ghz: c.knot.value(),
                c0: c.c0,
                c1: c.c1,
                c2: c.c2,
                a: c.a,
                b: c.b,
            },
        };
        Self {
            params,
            domain_ghz: [domain.lo(), domain.hi()],
            fit: doc.fit,
        }
    }
}

impl TryFrom<CurveDto> for CurveDocument {
    type Error = FitError;

    fn try_from(dto: CurveDto) -> Result<Self, FitError> {
        let domain = Domain::new(dto.domain_ghz[0], dto.domain_ghz[1])?;
        let curve = match dto.params {
            ParamsDto::Exp { a, b } => Curve::Exponential(ExponentialCurve::new(a, b, domain)?),
            ParamsDto::ParabExp {
                knot_ghz,
                c0,
                c1,
                c2,
                a,
                b,
            } => {
                let knot = FrequencyGhz::new(knot_ghz)
                    .map_err(|e| FitError::InvalidCurve(e.to_string()))?;
                let curve = PiecewiseParabExpCurve::new(knot, (c0, c1, c2), b, domain)?;
                if (curve.a - a).abs() > 1e-9 * a.abs() {
                    return Err(FitError::InvalidCurve(format!(
                        "amplitude {a} breaks continuity at the knot (expected {})",
                        curve.a
                    )));
                }
                Curve::ParabExp(curve)
            }
        };
        Ok(Self {
            curve,
            fit: dto.fit,
        })
    }
}
