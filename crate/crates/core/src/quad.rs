//! Adaptive Gauss-Kronrod quadrature.
//!
//! A 15-point Kronrod rule with embedded 7-point Gauss rule supplies a
//! per-segment error estimate; segments live in a max-heap keyed by that
//! estimate and the worst one is bisected until the summed estimate meets
//! the tolerance. Improper integrals over `(0, b]` and `[a, inf)` are
//! summed over geometric blocks, with a heuristic that reports divergence
//! when the block contributions fail to decay.

use crate::error::{Error, Result};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Abscissae of the 15-point Kronrod rule on `[-1, 1]`: seven symmetric
/// pairs plus the center (last entry).
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Weights of the embedded 7-point Gauss rule; `WG[i]` pairs with
/// `XGK[2*i + 1]` and `WG[3]` with the center.
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of an improper integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IntegralValue {
    Finite(f64),
    /// The geometric-block sums failed the decay test; the integral is
    /// treated as divergent (or too close to critical decay to resolve).
    Divergent,
}

impl IntegralValue {
    /// Unwraps the finite value, turning divergence into [`Error::Domain`].
    pub fn finite(self) -> Result<f64> {
        match self {
            IntegralValue::Finite(v) => Ok(v),
            IntegralValue::Divergent => {
                Err(Error::Domain("integral diverges".into()))
            }
        }
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, IntegralValue::Divergent)
    }
}

/// Tolerances and budget for the adaptive driver.
#[derive(Debug, Clone, Copy)]
pub struct QuadCtrl {
    /// Relative tolerance on the accumulated error estimate.
    pub rel_tol: f64,
    /// Absolute floor on the accepted error (guards integrals near zero).
    pub abs_tol: f64,
    /// Maximum number of segments before giving up.
    pub max_segments: usize,
}

impl Default for QuadCtrl {
    fn default() -> Self {
        QuadCtrl { rel_tol: 1e-10, abs_tol: 1e-14, max_segments: 4000 }
    }
}

impl QuadCtrl {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        QuadCtrl { rel_tol, ..QuadCtrl::default() }
    }
}

/// One evaluation of the 15-point rule on `[a, b]`.
///
/// Returns `(value, error_estimate)` or `None` if the integrand produced
/// a non-finite value at a node. Endpoints are never evaluated, so
/// integrable endpoint singularities are safe.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Option<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    if !fc.is_finite() {
        return None;
    }
    let mut resk = WGK[7] * fc;
    let mut resg = WG[3] * fc;
    let mut resabs = WGK[7] * fc.abs();
    let mut pairs = [(0.0f64, 0.0f64); 7];
    for i in 0..7 {
        let dx = h * XGK[i];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        if !f1.is_finite() || !f2.is_finite() {
            return None;
        }
        pairs[i] = (f1, f2);
        let fsum = f1 + f2;
        resk += WGK[i] * fsum;
        resabs += WGK[i] * (f1.abs() + f2.abs());
        if i % 2 == 1 {
            resg += WG[i / 2] * fsum;
        }
    }
    // Scaled error estimate as in QUADPACK: resasc measures deviation from
    // the mean, which keeps the estimate meaningful for integrands with a
    // large constant component.
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for i in 0..7 {
        let (f1, f2) = pairs[i];
        resasc += WGK[i] * ((f1 - reskh).abs() + (f2 - reskh).abs());
    }
    let value = resk * h;
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let round = 50.0 * f64::EPSILON * resabs;
    if round > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(round);
    }
    Some((value, err))
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(Ordering::Equal)
    }
}

fn eval_segment<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment> {
    match gk15(f, a, b) {
        Some((value, err)) => Ok(Segment { a, b, value, err }),
        None => Err(Error::Integration {
            location: format!("[{a:e}, {b:e}]"),
            reason: "integrand returned a non-finite value".into(),
        }),
    }
}

/// Adaptive integral of `f` over the finite interval `[a, b]`.
pub fn quad<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, ctrl: &QuadCtrl) -> Result<f64> {
    quad_with_breaks(f, a, b, &[], ctrl)
}

/// Adaptive integral with caller-provided interior breakpoints (kinks,
/// jumps). Breakpoints outside `(a, b)` are ignored.
pub fn quad_with_breaks<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    breaks: &[f64],
    ctrl: &QuadCtrl,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("quad requires finite endpoints".into()));
    }
    if a == b {
        return Ok(0.0);
    }
    if a > b {
        return Ok(-quad_with_breaks(f, b, a, breaks, ctrl)?);
    }
    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|t| *t > a && *t < b).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    cuts.dedup();
    cuts.insert(0, a);
    cuts.push(b);

    let mut heap = BinaryHeap::new();
    let mut total = 0.0;
    let mut total_err = 0.0;
    for w in cuts.windows(2) {
        let seg = eval_segment(&f, w[0], w[1])?;
        total += seg.value;
        total_err += seg.err;
        heap.push(seg);
    }

    while total_err > ctrl.abs_tol.max(ctrl.rel_tol * total.abs()) {
        if heap.len() >= ctrl.max_segments {
            return Err(Error::Accuracy(format!(
                "quadrature error {total_err:.3e} above tolerance after {} segments",
                heap.len()
            )));
        }
        let worst = heap.pop().expect("heap cannot be empty while err > 0");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at f64 resolution: accept its estimate as-is.
            total_err -= worst.err;
            let mut spent = worst;
            spent.err = 0.0;
            heap.push(spent);
            continue;
        }
        let left = eval_segment(&f, worst.a, mid)?;
        let right = eval_segment(&f, mid, worst.b)?;
        total += left.value + right.value - worst.value;
        total_err += left.err + right.err - worst.err;
        heap.push(left);
        heap.push(right);
    }
    Ok(total)
}

/// Improper integral over `[a, inf)` by geometric blocks.
///
/// Blocks are `[a, b0]`, `[b0, 2 b0]`, `[2 b0, 4 b0]`, ... with
/// `b0 = max(2 |a|, 1)`. Summation stops once two consecutive blocks are
/// below `rel_tol * |total|` (plus the absolute floor). If the blocks do
/// not decay, the integral is reported [`IntegralValue::Divergent`].
pub fn quad_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, ctrl: &QuadCtrl) -> Result<IntegralValue> {
    if !a.is_finite() {
        return Err(Error::Domain("lower endpoint must be finite".into()));
    }
    let block_ctrl = QuadCtrl {
        rel_tol: ctrl.rel_tol,
        abs_tol: ctrl.abs_tol,
        max_segments: ctrl.max_segments,
    };
    let mut total = 0.0f64;
    let mut lo = a;
    let mut hi = (2.0 * a.abs()).max(1.0);
    if hi <= lo {
        hi = lo + 1.0;
    }
    let mut small_run = 0u32;
    let mut ratios: Vec<f64> = Vec::new();
    let mut prev_mag: Option<f64> = None;
    for _ in 0..1100 {
        let block = quad(&f, lo, hi, &block_ctrl)?;
        total += block;
        if !total.is_finite() || total.abs() > 1e306 {
            return Ok(IntegralValue::Divergent);
        }
        let mag = block.abs();
        if mag <= ctrl.abs_tol.max(ctrl.rel_tol * total.abs()) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(IntegralValue::Finite(total));
            }
        } else {
            small_run = 0;
        }
        if let Some(p) = prev_mag {
            if p > 0.0 {
                ratios.push(mag / p);
                if ratios.len() > 16 {
                    ratios.remove(0);
                }
            }
        }
        prev_mag = Some(mag);
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            break;
        }
    }
    // Budget exhausted: classify by the recent decay rate.
    let gm = geometric_mean(&ratios);
    if gm >= 0.9 {
        Ok(IntegralValue::Divergent)
    } else {
        Err(Error::Accuracy(
            "improper integral converges too slowly for the block budget".into(),
        ))
    }
}

/// Improper integral over `(0, b]` by geometric blocks shrinking toward 0.
///
/// Handles integrable singularities at the origin; reports
/// [`IntegralValue::Divergent`] when block contributions fail to decay
/// (e.g. `1/t`).
pub fn quad_to_zero<F: Fn(f64) -> f64>(f: F, b: f64, ctrl: &QuadCtrl) -> Result<IntegralValue> {
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::Domain("upper endpoint must be positive and finite".into()));
    }
    let mut total = 0.0f64;
    let mut hi = b;
    let mut small_run = 0u32;
    let mut ratios: Vec<f64> = Vec::new();
    let mut prev_mag: Option<f64> = None;
    for _ in 0..1100 {
        let lo = 0.5 * hi;
        let block = quad(&f, lo, hi, ctrl)?;
        total += block;
        if !total.is_finite() || total.abs() > 1e306 {
            return Ok(IntegralValue::Divergent);
        }
        let mag = block.abs();
        if mag <= ctrl.abs_tol.max(ctrl.rel_tol * total.abs()) {
            small_run += 1;
            if small_run >= 2 {
                return Ok(IntegralValue::Finite(total));
            }
        } else {
            small_run = 0;
        }
        if let Some(p) = prev_mag {
            if p > 0.0 {
                ratios.push(mag / p);
                if ratios.len() > 16 {
                    ratios.remove(0);
                }
            }
        }
        prev_mag = Some(mag);
        hi = lo;
        if hi < 1e-280 {
            break;
        }
    }
    let gm = geometric_mean(&ratios);
    if gm >= 0.9 {
        Ok(IntegralValue::Divergent)
    } else {
        Err(Error::Accuracy(
            "singular integral converges too slowly for the block budget".into(),
        ))
    }
}

fn geometric_mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 1.0;
    }
    let s: f64 = xs.iter().map(|r| r.max(1e-300).ln()).sum();
    (s / xs.len() as f64).exp()
}
