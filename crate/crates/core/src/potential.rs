//! Potential weights `G >= 0` on the half-line or line: evaluation,
//! moments with divergence certificates, and dyadic-shell sequences.
//!
//! Closed-form families carry analytic convergence predicates so that a
//! divergent moment is reported as such instead of burning quadrature
//! budget. Shell entries are computed in a scaled coordinate
//! (`t = c^j tau`, `tau` in `(1/c, 1]`), which keeps them meaningful far
//! beyond the range where `c^j` itself is representable: the integrand
//! `c^{2j} G(c^j tau)` equals `tau^{-2} * w(j ln c + ln tau)` for the
//! weighted evaluation `w(s) = e^{2s} G(e^s)`, and `w` is implemented
//! per-family in log-space so it never produces `inf * 0`.

use crate::error::{Error, Result};
use crate::quad::{self, IntegralValue, QuadCtrl};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    HalfLine,
    WholeLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    Linear,
    Step,
}

/// Weight convention for the logarithmic change of variables `t = e^s`
/// applied to a radial profile: `Derivation` uses `e^{2s} F(e^s)` (the
/// exact unitary reduction), `Theorem` the symmetrized `e^{2|s|} F(e^s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convention {
    Derivation,
    Theorem,
}

#[derive(Debug, Clone, PartialEq)]
pub enum PotentialKind {
    /// Indicator of `(0, width)`.
    SquareWell { width: f64 },
    /// `exp(-rate * t)`.
    ExpDecay { rate: f64 },
    /// `exp(-(t / scale)^2)`.
    Gaussian { scale: f64 },
    /// `(offset + t)^{-exponent}`; `offset = 0` is admissible and makes
    /// the weight singular at the origin.
    PowerTail { exponent: f64, offset: f64 },
    /// `t^{-2} (ln t)^{-1/q}` for `t > e`, zero otherwise.
    LogBorderline { q: f64 },
    /// `values[i]` on `(breakpoints[i], breakpoints[i+1])`, zero outside.
    PiecewiseConstant { breakpoints: Vec<f64>, values: Vec<f64> },
    /// Tabulated values on a strictly increasing grid, zero outside.
    Sampled { grid: Vec<f64>, values: Vec<f64>, interpolation: Interpolation },
    /// Line potential `e^{2t} F(e^t)` (or `e^{2|t|} F(e^t)`) obtained from
    /// a half-line profile `F` by `log_transform`.
    LogWeighted { profile: Box<Potential>, symmetrized: bool },
}

impl PotentialKind {
    /// Short stable identifier used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::SquareWell { .. } => "square_well",
            PotentialKind::ExpDecay { .. } => "exp_decay",
            PotentialKind::Gaussian { .. } => "gaussian",
            PotentialKind::PowerTail { .. } => "power_tail",
            PotentialKind::LogBorderline { .. } => "log_borderline",
            PotentialKind::PiecewiseConstant { .. } => "piecewise_constant",
            PotentialKind::Sampled { .. } => "sampled",
            PotentialKind::LogWeighted { .. } => "log_weighted",
        }
    }
}

/// A nonnegative weight together with the domain it lives on. Immutable
/// after construction; all methods are `&self` and reentrant.
#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    kind: PotentialKind,
    domain: Domain,
}

impl Potential {
    pub fn new(kind: PotentialKind, domain: Domain) -> Result<Self> {
        validate_kind(&kind, domain)?;
        Ok(Potential { kind, domain })
    }

    pub fn square_well(width: f64) -> Result<Self> {
        Potential::new(PotentialKind::SquareWell { width }, Domain::HalfLine)
    }

    pub fn exp_decay(rate: f64) -> Result<Self> {
        Potential::new(PotentialKind::ExpDecay { rate }, Domain::HalfLine)
    }

    pub fn gaussian(scale: f64) -> Result<Self> {
        Potential::new(PotentialKind::Gaussian { scale }, Domain::HalfLine)
    }

    pub fn power_tail(exponent: f64, offset: f64) -> Result<Self> {
        Potential::new(PotentialKind::PowerTail { exponent, offset }, Domain::HalfLine)
    }

    pub fn log_borderline(q: f64) -> Result<Self> {
        Potential::new(PotentialKind::LogBorderline { q }, Domain::HalfLine)
    }

    pub fn piecewise_constant(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Potential::new(
            PotentialKind::PiecewiseConstant { breakpoints, values },
            Domain::HalfLine,
        )
    }

    pub fn zero() -> Self {
        Potential {
            kind: PotentialKind::PiecewiseConstant { breakpoints: vec![0.0, 1.0], values: vec![0.0] },
            domain: Domain::HalfLine,
        }
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Checked evaluation. On the half-line, negative `t` is a domain
    /// error; `t = 0` is allowed (singular kinds return `+inf` there).
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::Domain("eval at non-finite point".into()));
        }
        if self.domain == Domain::HalfLine && t < 0.0 {
            return Err(Error::Domain(format!("t = {t} outside the half-line")));
        }
        Ok(self.eval_plain(t))
    }

    /// Unchecked evaluation used by the quadrature closures: zero outside
    /// the domain/support, stable for arbitrarily large `|t|`.
    pub fn eval_plain(&self, t: f64) -> f64 {
        if self.domain == Domain::HalfLine && t < 0.0 {
            return 0.0;
        }
        let x = match self.domain {
            Domain::HalfLine => t,
            // Closed-form families extend evenly; the tabulated kinds carry
            // their own (possibly asymmetric) grid, and the log-weighted
            // kind handles its own sign.
            Domain::WholeLine => match self.kind {
                PotentialKind::LogWeighted { .. }
                | PotentialKind::PiecewiseConstant { .. }
                | PotentialKind::Sampled { .. } => t,
                _ => t.abs(),
            },
        };
        match &self.kind {
            PotentialKind::SquareWell { width } => {
                if x >= 0.0 && x < *width {
                    1.0
                } else {
                    0.0
                }
            }
            PotentialKind::ExpDecay { rate } => (-rate * x).exp(),
            PotentialKind::Gaussian { scale } => {
                let z = x / scale;
                (-z * z).exp()
            }
            PotentialKind::PowerTail { exponent, offset } => {
                if *offset == 0.0 && x == 0.0 {
                    f64::INFINITY
                } else {
                    (offset + x).powf(-exponent)
                }
            }
            PotentialKind::LogBorderline { q } => {
                if x > std::f64::consts::E {
                    let l = x.ln();
                    x.powi(-2) * l.powf(-1.0 / q)
                } else {
                    0.0
                }
            }
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                piecewise_value(breakpoints, values, x)
            }
            PotentialKind::Sampled { grid, values, interpolation } => {
                sampled_value(grid, values, *interpolation, x)
            }
            PotentialKind::LogWeighted { .. } => {
                let lw = self.log_weighted_log(x);
                if lw == f64::NEG_INFINITY {
                    0.0
                } else {
                    lw.exp()
                }
            }
        }
    }

    /// `ln(e^{2t} F(e^t))` (or the symmetrized variant) for the
    /// log-weighted kind, computed without intermediate overflow.
    fn log_weighted_log(&self, t: f64) -> f64 {
        let PotentialKind::LogWeighted { profile, symmetrized } = &self.kind else {
            unreachable!("log_weighted_log on non-log-weighted kind");
        };
        let base = weighted_exp_log(profile, t);
        if *symmetrized && t < 0.0 {
            // e^{2|t|} = e^{2t} * e^{-4t}.
            base - 4.0 * t
        } else {
            base
        }
    }

    /// `e^{2s} G(e^s)` for a half-line potential, stable for all `s`.
    /// This is the effective weight after the substitution `t = e^s`,
    /// `u = e^{s/2} w`, and also the scaled integrand of shell entries.
    pub fn t2g_at_log(&self, s: f64) -> f64 {
        // For whole-line closed forms this is the right-half weight; the
        // log-weighted kind is already in log coordinates and has no
        // second transform.
        debug_assert!(!matches!(self.kind, PotentialKind::LogWeighted { .. }));
        weighted_exp_log(self, s).exp()
    }

    /// Upper bound for `sup_{t >= t_from} t^2 G(t)`, from per-family
    /// monotone envelopes. Returns `+inf` when no finite envelope is
    /// known (the caller then cannot certify a tail this way).
    pub fn sup_tail_t2g(&self, t_from: f64) -> f64 {
        let s = if t_from <= 0.0 { f64::NEG_INFINITY } else { t_from.ln() };
        self.sup_tail_t2g_log(s)
    }

    /// `sup_tail_t2g` with the cutoff given as `s = ln t`, usable far
    /// beyond f64 range in `t` (the log-coordinate engine needs cutoffs
    /// like `s ~ 1e6`).
    pub fn sup_tail_t2g_log(&self, s_from: f64) -> f64 {
        match &self.kind {
            PotentialKind::SquareWell { width } => {
                if s_from >= width.ln() {
                    0.0
                } else {
                    width * width
                }
            }
            PotentialKind::ExpDecay { rate } => {
                let s = s_from.max((2.0 / rate).ln());
                (2.0 * s - rate * s.exp()).exp()
            }
            PotentialKind::Gaussian { scale } => {
                let s = s_from.max(scale.ln());
                (2.0 * s - (2.0 * (s - scale.ln())).exp()).exp()
            }
            PotentialKind::PowerTail { exponent, offset } => {
                let p = *exponent;
                if p < 2.0 {
                    f64::INFINITY
                } else if p == 2.0 {
                    1.0
                } else if *offset == 0.0 {
                    ((2.0 - p) * s_from).exp()
                } else {
                    let s = s_from.max((2.0 * offset / (p - 2.0)).ln());
                    (2.0 * s - p * ln_offset_plus_exp(*offset, s)).exp()
                }
            }
            PotentialKind::LogBorderline { q } => s_from.max(1.0).powf(-1.0 / q),
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                let t_from = s_from.exp();
                let mut sup: f64 = 0.0;
                for i in 0..values.len() {
                    let hi = breakpoints[i + 1];
                    if hi <= t_from {
                        continue;
                    }
                    sup = sup.max(values[i] * hi * hi);
                }
                sup
            }
            PotentialKind::Sampled { grid, values, .. } => {
                let t_from = s_from.exp();
                let mut sup: f64 = 0.0;
                for i in 0..grid.len() - 1 {
                    let hi = grid[i + 1];
                    if hi <= t_from {
                        continue;
                    }
                    sup = sup.max(values[i].max(values[i + 1]) * hi * hi);
                }
                sup
            }
            PotentialKind::LogWeighted { .. } => f64::INFINITY,
        }
    }

    /// `sup_{s <= s_to} e^{2s} G(e^s)` — the head-side counterpart of
    /// `sup_tail_t2g_log`. The per-family weight is unimodal, so the sup
    /// over `(-inf, s_to]` is the weight at `min(s_to, argmax)`.
    pub fn sup_head_t2g_log(&self, s_to: f64) -> f64 {
        let at = |s: f64| weighted_exp_log(self, s).exp();
        match &self.kind {
            PotentialKind::SquareWell { width } => {
                // sup approached from below t = width, where eval is 0.
                if s_to >= width.ln() {
                    width * width
                } else {
                    (2.0 * s_to).exp()
                }
            }
            PotentialKind::ExpDecay { rate } => at(s_to.min((2.0 / rate).ln())),
            PotentialKind::Gaussian { scale } => at(s_to.min(scale.ln())),
            PotentialKind::PowerTail { exponent, offset } => {
                let p = *exponent;
                if *offset == 0.0 {
                    // t^{2-p}: increasing toward t = 0 when p > 2.
                    if p > 2.0 {
                        f64::INFINITY
                    } else {
                        ((2.0 - p) * s_to).exp()
                    }
                } else if p > 2.0 {
                    at(s_to.min((2.0 * offset / (p - 2.0)).ln()))
                } else {
                    // increasing in t throughout (limit 1 for p = 2).
                    at(s_to)
                }
            }
            PotentialKind::LogBorderline { .. } => {
                if s_to <= 1.0 {
                    0.0
                } else {
                    1.0
                }
            }
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                let t_to = s_to.exp();
                let mut sup: f64 = 0.0;
                for i in 0..values.len() {
                    let lo = breakpoints[i];
                    if lo >= t_to {
                        continue;
                    }
                    let hi = breakpoints[i + 1].min(t_to);
                    sup = sup.max(values[i] * hi * hi);
                }
                sup
            }
            PotentialKind::Sampled { grid, values, .. } => {
                let t_to = s_to.exp();
                let mut sup: f64 = 0.0;
                for i in 0..grid.len() - 1 {
                    let lo = grid[i];
                    if lo >= t_to {
                        continue;
                    }
                    let hi = grid[i + 1].min(t_to);
                    sup = sup.max(values[i].max(values[i + 1]) * hi * hi);
                }
                sup
            }
            PotentialKind::LogWeighted { .. } => f64::INFINITY,
        }
    }

    /// Envelope bound for `sup G` over one tail of a whole-line
    /// potential: `[t_from, inf)` on the right, `(-inf, -t_from]` on the
    /// left (`t_from >= 0`). `+inf` when no finite envelope is known.
    pub fn sup_line_tail(&self, t_from: f64, left: bool) -> f64 {
        debug_assert_eq!(self.domain, Domain::WholeLine);
        let t_from = t_from.max(0.0);
        match &self.kind {
            PotentialKind::SquareWell { width } => {
                if t_from >= *width {
                    0.0
                } else {
                    1.0
                }
            }
            PotentialKind::ExpDecay { rate } => (-rate * t_from).exp(),
            PotentialKind::Gaussian { scale } => {
                let z = t_from / scale;
                (-z * z).exp()
            }
            PotentialKind::PowerTail { exponent, offset } => {
                if offset + t_from == 0.0 {
                    f64::INFINITY
                } else {
                    (offset + t_from).powf(-exponent)
                }
            }
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                let mut sup: f64 = 0.0;
                for i in 0..values.len() {
                    let (lo, hi) = (breakpoints[i], breakpoints[i + 1]);
                    let hit = if left { lo < -t_from } else { hi > t_from };
                    if hit {
                        sup = sup.max(values[i]);
                    }
                }
                sup
            }
            PotentialKind::Sampled { grid, values, .. } => {
                let mut sup: f64 = 0.0;
                for i in 0..grid.len() - 1 {
                    let (lo, hi) = (grid[i], grid[i + 1]);
                    let hit = if left { lo < -t_from } else { hi > t_from };
                    if hit {
                        sup = sup.max(values[i].max(values[i + 1]));
                    }
                }
                sup
            }
            PotentialKind::LogWeighted { profile, symmetrized } => {
                if !left {
                    return profile.sup_tail_t2g_log(t_from);
                }
                if *symmetrized {
                    // e^{-2s} F(e^s) on the left: zero iff past the
                    // profile's support start, unbounded otherwise.
                    let si = profile.support_inf();
                    if si > 0.0 && -t_from <= si.ln() {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    profile.sup_head_t2g_log(-t_from)
                }
            }
            PotentialKind::LogBorderline { q } => {
                // |t|^{-2} (ln|t|)^{-1/q} decreases beyond e.
                let t = t_from.max(std::f64::consts::E);
                t.powi(-2) * t.ln().powf(-1.0 / q)
            }
        }
    }

    /// Infimum of the support (0 for kinds positive near the origin).
    /// `+inf` for an identically zero weight.
    pub fn support_inf(&self) -> f64 {
        match &self.kind {
            PotentialKind::LogBorderline { .. } if self.domain == Domain::HalfLine => {
                std::f64::consts::E
            }
            PotentialKind::PiecewiseConstant { breakpoints, values } => values
                .iter()
                .position(|v| *v > 0.0)
                .map_or(f64::INFINITY, |i| breakpoints[i]),
            PotentialKind::Sampled { grid, values, .. } => (0..grid.len() - 1)
                .find(|i| values[*i] > 0.0 || values[i + 1] > 0.0)
                .map_or(f64::INFINITY, |i| grid[i]),
            PotentialKind::LogWeighted { profile, symmetrized } => {
                let si = profile.support_inf();
                if *symmetrized || si <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    // support of e^{2s}F(e^s) starts at ln(inf supp F)
                    si.ln()
                }
            }
            _ => {
                if self.domain == Domain::WholeLine {
                    -self.support_sup()
                } else {
                    0.0
                }
            }
        }
    }

    /// True only for a weight that is zero everywhere.
    pub fn is_identically_zero(&self) -> bool {
        match &self.kind {
            PotentialKind::PiecewiseConstant { values, .. }
            | PotentialKind::Sampled { values, .. } => values.iter().all(|v| *v == 0.0),
            PotentialKind::LogWeighted { profile, .. } => profile.is_identically_zero(),
            _ => false,
        }
    }

    /// True when a whole-line weight is even in `t` (exact symmetry, not
    /// a numerical check).
    pub fn is_even(&self) -> bool {
        if self.domain != Domain::WholeLine {
            return false;
        }
        match &self.kind {
            PotentialKind::SquareWell { .. }
            | PotentialKind::ExpDecay { .. }
            | PotentialKind::Gaussian { .. }
            | PotentialKind::PowerTail { .. }
            | PotentialKind::LogBorderline { .. } => true,
            PotentialKind::LogWeighted { .. } => false,
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                let n = breakpoints.len();
                (0..n).all(|i| breakpoints[i] == -breakpoints[n - 1 - i])
                    && (0..values.len()).all(|i| values[i] == values[values.len() - 1 - i])
            }
            PotentialKind::Sampled { grid, values, .. } => {
                let n = grid.len();
                (0..n).all(|i| grid[i] == -grid[n - 1 - i])
                    && (0..n).all(|i| values[i] == values[n - 1 - i])
            }
        }
    }

    /// Finite support radius, `+inf` for non-compact kinds.
    pub fn support_sup(&self) -> f64 {
        match &self.kind {
            PotentialKind::SquareWell { width } => *width,
            PotentialKind::PiecewiseConstant { breakpoints, .. } => *breakpoints.last().unwrap(),
            PotentialKind::Sampled { grid, .. } => *grid.last().unwrap(),
            _ => f64::INFINITY,
        }
    }

    /// True when `G` has a (possibly non-integrable) singularity at 0.
    pub fn singular_at_zero(&self) -> bool {
        matches!(self.kind, PotentialKind::PowerTail { offset, .. } if offset == 0.0)
    }

    /// Interior breakpoints (kinks and jumps) of the weight, sorted.
    pub fn natural_breaks(&self) -> Vec<f64> {
        let one_sided: Vec<f64> = match &self.kind {
            PotentialKind::SquareWell { width } => vec![*width],
            PotentialKind::LogBorderline { .. } => vec![std::f64::consts::E],
            PotentialKind::PiecewiseConstant { breakpoints, .. } => breakpoints.clone(),
            PotentialKind::Sampled { grid, .. } => grid.clone(),
            PotentialKind::LogWeighted { profile, symmetrized } => {
                let mut v: Vec<f64> = profile
                    .natural_breaks()
                    .into_iter()
                    .filter(|b| *b > 0.0)
                    .map(|b| b.ln())
                    .collect();
                if *symmetrized {
                    v.push(0.0);
                }
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                return v;
            }
            _ => vec![],
        };
        match self.domain {
            Domain::HalfLine => one_sided,
            Domain::WholeLine => {
                let mut v: Vec<f64> = one_sided.iter().map(|b| -b).chain(one_sided.iter().copied()).collect();
                v.push(0.0);
                v.sort_by(|a, b| a.partial_cmp(b).unwrap());
                v.dedup();
                v
            }
        }
    }

    /// Monotone non-increasing on the half-line, checked analytically for
    /// closed forms and on a probe grid for tabulated kinds.
    pub fn is_monotone_nonincreasing(&self) -> bool {
        match &self.kind {
            PotentialKind::SquareWell { .. }
            | PotentialKind::ExpDecay { .. }
            | PotentialKind::Gaussian { .. } => true,
            PotentialKind::PowerTail { .. } => true,
            // Zero below e, positive after: not monotone.
            PotentialKind::LogBorderline { .. } => false,
            PotentialKind::PiecewiseConstant { values, .. } => {
                values.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
            }
            PotentialKind::Sampled { values, .. } => {
                values.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0))
            }
            PotentialKind::LogWeighted { .. } => false,
        }
    }

    /// Analytic certificate for convergence of `sum_j zeta_j^{1/2}`.
    /// `None` means no closed-form verdict (decide from window evidence).
    pub fn zeta_sqrt_summable(&self) -> Option<bool> {
        match &self.kind {
            PotentialKind::SquareWell { .. }
            | PotentialKind::ExpDecay { .. }
            | PotentialKind::Gaussian { .. }
            | PotentialKind::PiecewiseConstant { .. }
            | PotentialKind::Sampled { .. } => Some(true),
            // zeta_j ~ 2^{j(2-p)} on the right, so sqrt-summable iff p > 2
            // (offset > 0 also controls the left end).
            PotentialKind::PowerTail { exponent, offset } => {
                Some(*exponent > 2.0 && *offset > 0.0)
            }
            // zeta_j ~ (j ln 2)^{-1/q}: sum j^{-1/(2q)} converges iff q < 1/2.
            PotentialKind::LogBorderline { q } => Some(*q < 0.5),
            PotentialKind::LogWeighted { .. } => None,
        }
    }

    /// `int t^k G dt` (default: whole domain). Divergence certificates
    /// from the family's analytic predicates short-circuit quadrature.
    pub fn moment(&self, k: u32, interval: Option<(f64, f64)>) -> Result<IntegralValue> {
        if k > 2 {
            return Err(Error::Domain(format!("moment order {k} not in 0..=2")));
        }
        let ctrl = QuadCtrl::default();
        self.weighted_integral(&|t: f64| powik(t, k), k, interval, &ctrl)
    }

    /// `int sqrt(G) dt` over the domain, with divergence certificates.
    pub fn sqrt_mass(&self) -> Result<IntegralValue> {
        let ctrl = QuadCtrl::default();
        let (lo, hi) = self.full_interval();
        // Analytic predicates for the closed forms.
        match &self.kind {
            PotentialKind::PowerTail { exponent, offset } => {
                if *exponent <= 2.0 {
                    return Ok(IntegralValue::Divergent);
                }
                if *offset == 0.0 && *exponent >= 2.0 {
                    return Ok(IntegralValue::Divergent);
                }
            }
            PotentialKind::LogBorderline { q } => {
                if *q >= 0.5 {
                    return Ok(IntegralValue::Divergent);
                }
            }
            _ => {}
        }
        let f = self.sqrt_eval_fn();
        self.integrate_piecewise(&f, lo, hi, &ctrl)
    }

    fn sqrt_eval_fn(&self) -> Box<dyn Fn(f64) -> f64 + '_> {
        match &self.kind {
            PotentialKind::LogWeighted { .. } => {
                Box::new(move |t: f64| (0.5 * self.log_weighted_log(t)).exp())
            }
            _ => Box::new(move |t: f64| self.eval_plain(t).sqrt()),
        }
    }

    /// Bargmann-type tail `int_T^inf (t - T) G dt` on the right, or the
    /// mirror integral `int_{-inf}^{-T} (|t| - T) G dt` on the left of a
    /// whole-line potential.
    pub fn bargmann_tail(&self, t_from: f64, left: bool) -> Result<IntegralValue> {
        let ctrl = QuadCtrl::default();
        if left && self.domain != Domain::WholeLine {
            return Err(Error::Domain("left tail requires a whole-line potential".into()));
        }
        if self.support_sup().is_finite() && t_from >= self.support_sup() && !left {
            return Ok(IntegralValue::Finite(0.0));
        }
        let g = move |x: f64| {
            let t = if left { -x } else { x };
            (x - t_from) * self.eval_plain(t)
        };
        quad::quad_to_inf(g, t_from, &ctrl)
    }

    fn full_interval(&self) -> (f64, f64) {
        match self.domain {
            Domain::HalfLine => (0.0, f64::INFINITY),
            Domain::WholeLine => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Integral of `w(t) G(t)` with `w` a moment weight of order `k`
    /// (used only for the divergence predicates); handles infinite ends
    /// and the origin singularity.
    fn weighted_integral(
        &self,
        w: &dyn Fn(f64) -> f64,
        k: u32,
        interval: Option<(f64, f64)>,
        ctrl: &QuadCtrl,
    ) -> Result<IntegralValue> {
        let (dlo, dhi) = self.full_interval();
        let (lo, hi) = interval.unwrap_or((dlo, dhi));
        if lo < dlo || hi > dhi {
            return Err(Error::Domain("moment interval outside the potential's domain".into()));
        }
        if lo >= hi {
            return Ok(IntegralValue::Finite(0.0));
        }
        // Certified divergence from the family predicates.
        if hi == f64::INFINITY && !self.tail_moment_finite(k) {
            return Ok(IntegralValue::Divergent);
        }
        if lo == f64::NEG_INFINITY && !self.tail_moment_finite(k) {
            return Ok(IntegralValue::Divergent);
        }
        if lo <= 0.0 && hi > 0.0 && self.singular_at_zero() && !self.origin_moment_finite(k) {
            return Ok(IntegralValue::Divergent);
        }
        // Exact closed forms for the piecewise-polynomial kinds.
        if let Some(v) = self.poly_moment_closed(k, lo.max(dlo), hi) {
            return Ok(IntegralValue::Finite(v));
        }
        let f = move |t: f64| w(t) * self.eval_plain(t);
        self.integrate_piecewise(&f, lo, hi, ctrl)
    }

    /// Splits `[lo, hi]` (possibly infinite, possibly singular at 0) into
    /// tractable pieces and sums; any piece reporting divergence makes the
    /// whole integral divergent.
    fn integrate_piecewise(
        &self,
        f: &dyn Fn(f64) -> f64,
        lo: f64,
        hi: f64,
        ctrl: &QuadCtrl,
    ) -> Result<IntegralValue> {
        let breaks = self.natural_breaks();
        let mut total = 0.0f64;
        let add = |v: IntegralValue, total: &mut f64| -> Option<IntegralValue> {
            match v {
                IntegralValue::Finite(x) => {
                    *total += x;
                    None
                }
                IntegralValue::Divergent => Some(IntegralValue::Divergent),
            }
        };

        // Left infinite end (whole line): integrate x -> f(-x) on [-cut, inf).
        let mut lo_eff = lo;
        if lo == f64::NEG_INFINITY {
            let cut = hi.min(-1.0);
            let v = quad::quad_to_inf(|x| f(-x), -cut, ctrl)?;
            if let Some(d) = add(v, &mut total) {
                return Ok(d);
            }
            lo_eff = cut;
        }
        let mut hi_eff = hi;
        if hi == f64::INFINITY {
            let start = if lo_eff > 0.0 { lo_eff } else { 1.0 };
            let cap = self.support_sup();
            if cap.is_finite() {
                hi_eff = cap.max(lo_eff);
                if start < hi_eff {
                    // fall through: finite piece below covers [lo_eff, hi_eff]
                }
            } else {
                let v = quad::quad_to_inf(|x| f(x), start, ctrl)?;
                if let Some(d) = add(v, &mut total) {
                    return Ok(d);
                }
                hi_eff = start;
            }
        }
        if lo_eff < hi_eff {
            // Origin singularity: peel (0, eps] geometrically.
            if lo_eff == 0.0 && self.singular_at_zero() {
                let eps = hi_eff.min(1.0);
                let v = quad::quad_to_zero(|x| f(x), eps, ctrl)?;
                if let Some(d) = add(v, &mut total) {
                    return Ok(d);
                }
                lo_eff = eps;
            }
            if lo_eff < hi_eff {
                let v = quad::quad_with_breaks(|x| f(x), lo_eff, hi_eff, &breaks, ctrl)?;
                total += v;
            }
        }
        Ok(IntegralValue::Finite(total))
    }

    fn tail_moment_finite(&self, k: u32) -> bool {
        match &self.kind {
            PotentialKind::SquareWell { .. }
            | PotentialKind::ExpDecay { .. }
            | PotentialKind::Gaussian { .. }
            | PotentialKind::PiecewiseConstant { .. }
            | PotentialKind::Sampled { .. } => true,
            PotentialKind::PowerTail { exponent, .. } => *exponent > (k + 1) as f64,
            PotentialKind::LogBorderline { q } => match k {
                0 => true,
                1 => *q < 1.0,
                _ => false,
            },
            // No closed-form verdict; the numeric heuristic decides.
            PotentialKind::LogWeighted { .. } => true,
        }
    }

    fn origin_moment_finite(&self, k: u32) -> bool {
        match &self.kind {
            PotentialKind::PowerTail { exponent, offset } if *offset == 0.0 => {
                *exponent < (k + 1) as f64
            }
            _ => true,
        }
    }

    /// Exact `int t^k G` over `[lo, hi]` for piecewise-polynomial kinds.
    fn poly_moment_closed(&self, k: u32, lo: f64, hi: f64) -> Option<f64> {
        let cell_const = |v: f64, a: f64, b: f64| -> f64 {
            let kk = (k + 1) as i32;
            v * (b.powi(kk) - a.powi(kk)) / kk as f64
        };
        match &self.kind {
            PotentialKind::SquareWell { width } => {
                let a = lo.max(0.0);
                let b = hi.min(*width);
                Some(if b > a { cell_const(1.0, a, b) } else { 0.0 })
            }
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                if self.domain == Domain::WholeLine {
                    return None;
                }
                let mut s = 0.0;
                for i in 0..values.len() {
                    let a = breakpoints[i].max(lo);
                    let b = breakpoints[i + 1].min(hi);
                    if b > a {
                        s += cell_const(values[i], a, b);
                    }
                }
                Some(s)
            }
            PotentialKind::Sampled { grid, values, interpolation } => {
                if self.domain == Domain::WholeLine {
                    return None;
                }
                let mut s = 0.0;
                for i in 0..grid.len() - 1 {
                    let (ga, gb) = (grid[i], grid[i + 1]);
                    let a = ga.max(lo);
                    let b = gb.min(hi);
                    if b <= a {
                        continue;
                    }
                    match interpolation {
                        Interpolation::Step => s += cell_const(values[i], a, b),
                        Interpolation::Linear => {
                            // G = c0 + c1 t on the cell.
                            let c1 = (values[i + 1] - values[i]) / (gb - ga);
                            let c0 = values[i] - c1 * ga;
                            let k1 = (k + 1) as i32;
                            let k2 = (k + 2) as i32;
                            s += c0 * (b.powi(k1) - a.powi(k1)) / k1 as f64
                                + c1 * (b.powi(k2) - a.powi(k2)) / k2 as f64;
                        }
                    }
                }
                Some(s)
            }
            _ => None,
        }
    }

    /// Dyadic-shell sequence in the default convention (base 2, weight
    /// `2^j`), with automatic window selection when `window` is `None`.
    pub fn zeta(&self, mode: ZetaMode, window: Option<(i64, i64)>) -> Result<ZetaSequence> {
        self.zeta_with(mode, window, &ZetaConvention::default(), 1e-10)
    }

    /// Shell sequence under an explicit convention (base `c > 1`, weight
    /// `c^j int G` or `int t G`).
    pub fn zeta_with(
        &self,
        mode: ZetaMode,
        window: Option<(i64, i64)>,
        convention: &ZetaConvention,
        rel_tol: f64,
    ) -> Result<ZetaSequence> {
        convention.validate()?;
        match mode {
            ZetaMode::WholeLine => {
                if self.domain != Domain::WholeLine {
                    return Err(Error::Domain(
                        "whole-line shell sequence requires a whole-line potential".into(),
                    ));
                }
            }
            ZetaMode::Dirichlet | ZetaMode::Neumann => {
                if self.domain != Domain::HalfLine {
                    return Err(Error::Domain(
                        "half-line shell sequence requires a half-line potential".into(),
                    ));
                }
            }
        }
        if let Some((j_min, j_max)) = window {
            if j_min > j_max {
                return Err(Error::Domain("empty shell window".into()));
            }
            if mode != ZetaMode::Dirichlet && j_min < 0 {
                return Err(Error::Domain("this mode is indexed from j = 0".into()));
            }
            let mut entries = Vec::with_capacity((j_max - j_min + 1) as usize);
            for j in j_min..=j_max {
                entries.push(self.shell_entry(mode, j, convention, rel_tol)?);
            }
            Ok(ZetaSequence { mode, j_min, j_max, entries, quadrature_tol: rel_tol })
        } else {
            self.zeta_auto(mode, convention, rel_tol)
        }
    }

    /// Expands the window from j = 0 until two consecutive entries per
    /// side drop below `1e-14 * max`, capped at +-512. Until a positive
    /// entry has been seen, zero entries terminate a side only once its
    /// shells are certainly past the support (a weight supported away
    /// from 1 starts with a run of legitimate zeros that says nothing
    /// about decay).
    fn zeta_auto(
        &self,
        mode: ZetaMode,
        convention: &ZetaConvention,
        rel_tol: f64,
    ) -> Result<ZetaSequence> {
        const CAP: i64 = 512;
        if self.is_identically_zero() {
            return Ok(ZetaSequence {
                mode,
                j_min: 0,
                j_max: 1,
                entries: vec![0.0, 0.0],
                quadrature_tol: rel_tol,
            });
        }
        let ln_base = convention.base.ln();
        let ln_sup = self.support_sup().ln();
        let ln_inf = self.support_inf().max(0.0).ln();
        let mut right: Vec<f64> = Vec::new();
        let mut max_entry = 0.0f64;
        let mut small = 0u32;
        let mut j = 0i64;
        while j <= CAP {
            let e = self.shell_entry(mode, j, convention, rel_tol)?;
            right.push(e);
            max_entry = max_entry.max(e);
            let decisive = max_entry > 0.0 || (j - 1) as f64 * ln_base >= ln_sup;
            if e <= 1e-14 * max_entry && decisive {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            j += 1;
        }
        let j_max = (right.len() as i64) - 1;
        let mut left: Vec<f64> = Vec::new();
        let mut j_min = 0i64;
        if mode == ZetaMode::Dirichlet {
            let mut small = 0u32;
            let mut j = -1i64;
            while j >= -CAP {
                let e = self.shell_entry(mode, j, convention, rel_tol)?;
                left.push(e);
                max_entry = max_entry.max(e);
                let decisive = max_entry > 0.0 || j as f64 * ln_base <= ln_inf;
                if e <= 1e-14 * max_entry && decisive {
                    small += 1;
                    if small >= 2 {
                        break;
                    }
                } else {
                    small = 0;
                }
                j -= 1;
            }
            j_min = -(left.len() as i64);
        }
        left.reverse();
        left.extend(right);
        Ok(ZetaSequence { mode, j_min, j_max, entries: left, quadrature_tol: rel_tol })
    }

    /// One shell entry. Entries with `j >= 1` (and all Dirichlet entries)
    /// integrate over `(c^{j-1}, c^j)` in the scaled coordinate; the
    /// `j = 0` entry of the Neumann and whole-line modes is the plain
    /// integral over `(0, 1)` resp. `(-1, 1)`.
    fn shell_entry(
        &self,
        mode: ZetaMode,
        j: i64,
        convention: &ZetaConvention,
        rel_tol: f64,
    ) -> Result<f64> {
        let ctrl = QuadCtrl { rel_tol, ..QuadCtrl::default() };
        let named = |e: Error| match e {
            Error::Accuracy(m) => Error::Accuracy(format!("shell j = {j}: {m}")),
            other => other,
        };
        if j == 0 && mode != ZetaMode::Dirichlet {
            let v = match mode {
                ZetaMode::Neumann => {
                    if self.singular_at_zero() {
                        let v = quad::quad_to_zero(|t| self.eval_plain(t), 1.0, &ctrl)
                            .map_err(named)?;
                        match v {
                            IntegralValue::Finite(x) => x,
                            IntegralValue::Divergent => {
                                return Err(Error::Domain(
                                    "shell j = 0 diverges at the origin".into(),
                                ))
                            }
                        }
                    } else {
                        quad::quad_with_breaks(
                            |t| self.eval_plain(t),
                            0.0,
                            1.0,
                            &self.natural_breaks(),
                            &ctrl,
                        )
                        .map_err(named)?
                    }
                }
                ZetaMode::WholeLine => quad::quad_with_breaks(
                    |t| self.eval_plain(t),
                    -1.0,
                    1.0,
                    &self.natural_breaks(),
                    &ctrl,
                )
                .map_err(named)?,
                ZetaMode::Dirichlet => unreachable!(),
            };
            return Ok(v.max(0.0));
        }

        let ln_base = convention.base.ln();
        let l = j as f64 * ln_base;
        // Support short-circuit: the shell (c^{j-1}, c^j) misses compact
        // support entirely once c^{j-1} is past it.
        let sup = self.support_sup();
        if sup.is_finite() {
            let shell_lo_ln = (j - 1) as f64 * ln_base;
            if shell_lo_ln >= sup.ln() + 1e-12 {
                return Ok(0.0);
            }
        }
        let first_moment = convention.weight == ZetaWeight::FirstMoment;
        let both_sides = mode == ZetaMode::WholeLine;
        let tau_lo = 1.0 / convention.base;
        // Breaks in tau for kinds with structure (only relevant while the
        // shell is inside the representable range).
        let mut tau_breaks: Vec<f64> = Vec::new();
        if l.abs() < 700.0 {
            let el = l.exp();
            for b in self.natural_breaks() {
                let tau = b.abs() / el;
                if tau > tau_lo && tau < 1.0 {
                    tau_breaks.push(tau);
                }
            }
            tau_breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
            tau_breaks.dedup();
        }
        let f = |tau: f64| {
            let mut v = self.scaled_shell_weight(l, tau, false);
            if both_sides {
                v += self.scaled_shell_weight(l, tau, true);
            }
            if first_moment {
                // int t G dt over the shell = int tau * [c^{2j} G(c^j tau)] dtau.
                v *= tau;
            }
            v
        };
        let v = quad::quad_with_breaks(f, tau_lo, 1.0, &tau_breaks, &ctrl).map_err(named)?;
        Ok(v.max(0.0))
    }

    /// The scaled integrand `e^{2L} G(sign * e^L tau)`, computed through
    /// the log-space weighted evaluation so that huge `e^{2L}` never
    /// multiplies a vanishing `G`.
    fn scaled_shell_weight(&self, l: f64, tau: f64, negative_side: bool) -> f64 {
        let s = l + tau.ln();
        let total = match &self.kind {
            PotentialKind::LogWeighted { profile, symmetrized } => {
                let mag = s.exp();
                let lg = if mag.is_infinite() {
                    // Past f64 range the weight is a pure limit: on the
                    // negative side the symmetrized variant blows up
                    // whenever the profile has mass near the origin.
                    if negative_side && *symmetrized {
                        if profile.limit_at_zero() == 0.0 {
                            f64::NEG_INFINITY
                        } else {
                            f64::INFINITY
                        }
                    } else {
                        let sgn = if negative_side { f64::NEG_INFINITY } else { f64::INFINITY };
                        weighted_exp_log_line(profile, sgn)
                    }
                } else {
                    let t = if negative_side { -mag } else { mag };
                    self.log_weighted_log(t)
                };
                2.0 * l + lg
            }
            // Even families: both sides evaluate at e^s > 0, and
            // weighted_exp_log already returns 2s + ln G(e^s)
            // = ln(e^{2L} G) + 2 ln tau.
            _ => weighted_exp_log(self, s) - 2.0 * tau.ln(),
        };
        if total == f64::NEG_INFINITY {
            0.0
        } else {
            total.exp()
        }
    }

    /// Limit of the weight at `0+` (only used to classify far-out
    /// symmetrized shells of log-weighted potentials).
    fn limit_at_zero(&self) -> f64 {
        match &self.kind {
            PotentialKind::SquareWell { .. }
            | PotentialKind::ExpDecay { .. }
            | PotentialKind::Gaussian { .. } => 1.0,
            PotentialKind::PowerTail { exponent, offset } => {
                if *offset == 0.0 {
                    f64::INFINITY
                } else {
                    offset.powf(-*exponent)
                }
            }
            PotentialKind::LogBorderline { .. } => 0.0,
            PotentialKind::PiecewiseConstant { breakpoints, values } => {
                if breakpoints[0] > 0.0 {
                    0.0
                } else {
                    values[0]
                }
            }
            PotentialKind::Sampled { grid, values, .. } => {
                if grid[0] > 0.0 {
                    0.0
                } else {
                    values[0]
                }
            }
            PotentialKind::LogWeighted { .. } => 0.0,
        }
    }
}

/// `ln(e^{2s} G(e^s))` for a half-line weight, branch-stable per family:
/// never returns NaN, uses `-inf` for a vanishing weight.
/// `ln(offset + e^s)`, branch-stable on both sides of `s = 0`.
fn ln_offset_plus_exp(offset: f64, s: f64) -> f64 {
    if s > 0.0 {
        s + (offset * (-s).exp()).ln_1p()
    } else {
        offset.ln() + (s.exp() / offset).ln_1p()
    }
}

fn weighted_exp_log(p: &Potential, s: f64) -> f64 {
    match &p.kind {
        PotentialKind::SquareWell { width } => {
            if s < width.ln() {
                2.0 * s
            } else {
                f64::NEG_INFINITY
            }
        }
        PotentialKind::ExpDecay { rate } => {
            let w = rate * s.exp();
            if w.is_infinite() {
                f64::NEG_INFINITY
            } else {
                2.0 * s - w
            }
        }
        PotentialKind::Gaussian { scale } => {
            let z = s - scale.ln();
            let w = (2.0 * z).exp();
            if w.is_infinite() {
                f64::NEG_INFINITY
            } else {
                2.0 * s - w
            }
        }
        PotentialKind::PowerTail { exponent, offset } => {
            let p_ = *exponent;
            if *offset == 0.0 {
                return (2.0 - p_) * s;
            }
            2.0 * s - p_ * ln_offset_plus_exp(*offset, s)
        }
        PotentialKind::LogBorderline { q } => {
            // e^{2s} * e^{-2s} s^{-1/q} for e^s > e.
            if s > 1.0 {
                -(s.ln()) / q
            } else {
                f64::NEG_INFINITY
            }
        }
        PotentialKind::PiecewiseConstant { .. } | PotentialKind::Sampled { .. } => {
            let sup = p.support_sup();
            if s > sup.ln() + 1.0 {
                return f64::NEG_INFINITY;
            }
            let t = s.exp();
            let g = p.eval_plain(t);
            if g == 0.0 {
                f64::NEG_INFINITY
            } else {
                2.0 * s + g.ln()
            }
        }
        PotentialKind::LogWeighted { .. } => {
            unreachable!("weighted_exp_log is for half-line weights")
        }
    }
}

/// `ln(e^{2t} F(e^t))` for a half-line profile `F` evaluated at a *line*
/// coordinate `t` (used by the log-weighted kind). Identical to
/// `weighted_exp_log` but tolerant of `t = +-inf`.
fn weighted_exp_log_line(profile: &Potential, t: f64) -> f64 {
    if t == f64::NEG_INFINITY {
        // e^{2t} -> 0 dominates unless F blows up at 0 faster than t^{-2}.
        return match &profile.kind {
            PotentialKind::PowerTail { exponent, offset } if *offset == 0.0 => {
                if *exponent > 2.0 {
                    f64::INFINITY
                } else if *exponent == 2.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => f64::NEG_INFINITY,
        };
    }
    if t == f64::INFINITY {
        return match &profile.kind {
            PotentialKind::PowerTail { exponent, .. } if *exponent < 2.0 => f64::INFINITY,
            PotentialKind::PowerTail { exponent, .. } if *exponent == 2.0 => 0.0,
            _ => f64::NEG_INFINITY,
        };
    }
    weighted_exp_log(profile, t)
}

impl Potential {
    /// Logarithmic change of variables: maps a half-line profile `F` to
    /// the line potential `e^{2t} F(e^t)` (`Derivation`) or
    /// `e^{2|t|} F(e^t)` (`Theorem`).
    pub fn log_transform(&self, convention: Convention) -> Result<Potential> {
        if self.domain != Domain::HalfLine {
            return Err(Error::Domain("log transform expects a half-line profile".into()));
        }
        Potential::new(
            PotentialKind::LogWeighted {
                profile: Box::new(self.clone()),
                symmetrized: convention == Convention::Theorem,
            },
            Domain::WholeLine,
        )
    }
}

fn piecewise_value(breakpoints: &[f64], values: &[f64], x: f64) -> f64 {
    if x < breakpoints[0] || x >= *breakpoints.last().unwrap() {
        return 0.0;
    }
    // partition_point: first bp > x, so the piece index is that - 1.
    let i = breakpoints.partition_point(|b| *b <= x);
    values[(i - 1).min(values.len() - 1)]
}

fn sampled_value(grid: &[f64], values: &[f64], interp: Interpolation, x: f64) -> f64 {
    if x < grid[0] || x > *grid.last().unwrap() {
        return 0.0;
    }
    let i = grid.partition_point(|g| *g <= x);
    if i == 0 {
        return values[0];
    }
    if i == grid.len() {
        return *values.last().unwrap();
    }
    match interp {
        Interpolation::Step => values[i - 1],
        Interpolation::Linear => {
            let (ga, gb) = (grid[i - 1], grid[i]);
            let w = (x - ga) / (gb - ga);
            values[i - 1] * (1.0 - w) + values[i] * w
        }
    }
}

fn powik(t: f64, k: u32) -> f64 {
    match k {
        0 => 1.0,
        1 => t,
        _ => t * t,
    }
}

fn validate_kind(kind: &PotentialKind, domain: Domain) -> Result<()> {
    let pos = |name: &str, v: f64| -> Result<()> {
        if v.is_finite() && v > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidPotential(format!("{name} must be positive and finite, got {v}")))
        }
    };
    match kind {
        PotentialKind::SquareWell { width } => pos("width", *width),
        PotentialKind::ExpDecay { rate } => pos("rate", *rate),
        PotentialKind::Gaussian { scale } => pos("scale", *scale),
        PotentialKind::PowerTail { exponent, offset } => {
            pos("exponent", *exponent)?;
            if offset.is_finite() && *offset >= 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidPotential(format!("offset must be >= 0, got {offset}")))
            }
        }
        PotentialKind::LogBorderline { q } => pos("q", *q),
        PotentialKind::PiecewiseConstant { breakpoints, values } => {
            if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
                return Err(Error::InvalidPotential(
                    "piecewise-constant needs n+1 breakpoints for n values".into(),
                ));
            }
            if !breakpoints.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidPotential(
                    "breakpoints must be strictly increasing".into(),
                ));
            }
            if breakpoints.iter().any(|b| !b.is_finite()) {
                return Err(Error::InvalidPotential("non-finite breakpoint".into()));
            }
            if domain == Domain::HalfLine && breakpoints[0] < 0.0 {
                return Err(Error::InvalidPotential(
                    "half-line breakpoints must be nonnegative".into(),
                ));
            }
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidPotential("values must be finite and >= 0".into()));
            }
            Ok(())
        }
        PotentialKind::Sampled { grid, values, .. } => {
            if grid.len() < 2 || grid.len() != values.len() {
                return Err(Error::InvalidPotential(
                    "sampled grid and values must match, length >= 2".into(),
                ));
            }
            if !grid.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::InvalidPotential("grid must be strictly increasing".into()));
            }
            if grid.iter().any(|g| !g.is_finite()) {
                return Err(Error::InvalidPotential("non-finite grid point".into()));
            }
            if domain == Domain::HalfLine && grid[0] < 0.0 {
                return Err(Error::InvalidPotential("half-line grid must be nonnegative".into()));
            }
            if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::InvalidPotential("values must be finite and >= 0".into()));
            }
            Ok(())
        }
        PotentialKind::LogWeighted { profile, .. } => {
            if profile.domain != Domain::HalfLine {
                return Err(Error::InvalidPotential(
                    "log-weighted profile must live on the half-line".into(),
                ));
            }
            if domain != Domain::WholeLine {
                return Err(Error::InvalidPotential(
                    "log-weighted potentials live on the whole line".into(),
                ));
            }
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaMode {
    /// Shells over all of `(0, inf)`, indexed by `j` in `Z`.
    Dirichlet,
    /// `j >= 0`, with the `j = 0` entry collapsing everything below 1:
    /// `int_0^1 G`.
    Neumann,
    /// Shells in `|t|` on the line, `j >= 0`, `j = 0` entry `int_{-1}^1 G`.
    WholeLine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZetaWeight {
    /// `c^j int_{I_j} G dt` (the primary definition).
    PowerOfBase,
    /// `int_{I_j} t G dt` (equivalent up to two-sided constants).
    FirstMoment,
}

/// Alternative shell conventions: dyadic base `c > 1` and the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZetaConvention {
    pub base: f64,
    pub weight: ZetaWeight,
}

impl Default for ZetaConvention {
    fn default() -> Self {
        ZetaConvention { base: 2.0, weight: ZetaWeight::PowerOfBase }
    }
}

impl ZetaConvention {
    fn validate(&self) -> Result<()> {
        if self.base.is_finite() && self.base > 1.0 {
            Ok(())
        } else {
            Err(Error::Domain(format!("shell base must be > 1, got {}", self.base)))
        }
    }
}

/// Windowed shell sequence; entries are nonnegative and window-stable
/// (recomputing a wider window reproduces shared entries).
#[derive(Debug, Clone, PartialEq)]
pub struct ZetaSequence {
    pub mode: ZetaMode,
    pub j_min: i64,
    pub j_max: i64,
    pub entries: Vec<f64>,
    pub quadrature_tol: f64,
}

impl ZetaSequence {
    pub fn entry(&self, j: i64) -> Option<f64> {
        if j < self.j_min || j > self.j_max {
            None
        } else {
            Some(self.entries[(j - self.j_min) as usize])
        }
    }

    /// `sup_j zeta_j` over the window.
    pub fn max_entry(&self) -> f64 {
        self.entries.iter().copied().fold(0.0, f64::max)
    }

    /// `sum_j zeta_j^{1/2}` over the window.
    pub fn sqrt_sum(&self) -> f64 {
        self.entries.iter().map(|e| e.sqrt()).sum()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }
}

// ---------------------------------------------------------------------------
// Text interfaces.

/// Parses a potential description: lines of `key = value`, or a single
/// line of whitespace-separated `key=value` tokens. Lists accept commas
/// or (in the line form) whitespace. Keys: `family` (or `kind`),
/// `domain`, and the family parameters (`width`, `rate`, `scale`,
/// `exponent`, `offset`, `q`, `breakpoints`, `values`, `grid`,
/// `interpolation`).
pub fn from_spec_text(text: &str) -> Result<Potential> {
    let mut map: Vec<(String, String)> = Vec::new();
    for raw_line in text.lines() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let eq_count = line.matches('=').count();
        if eq_count == 0 {
            return Err(Error::Parse(format!("expected key=value, got {line:?}")));
        }
        if eq_count == 1 {
            let (k, v) = line.split_once('=').unwrap();
            map.push((k.trim().to_lowercase(), v.trim().to_string()));
        } else {
            for tok in line.split_whitespace() {
                let (k, v) = tok
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("expected key=value, got {tok:?}")))?;
                map.push((k.trim().to_lowercase(), v.trim().to_string()));
            }
        }
    }
    let get = |key: &str| -> Option<&str> {
        map.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    };
    let family = get("family")
        .or_else(|| get("kind"))
        .ok_or_else(|| Error::Parse("missing 'family' field".into()))?
        .to_lowercase();
    let domain = match get("domain").map(|d| d.to_lowercase()) {
        None => Domain::HalfLine,
        Some(d) => match d.as_str() {
            "half_line" | "halfline" | "half-line" => Domain::HalfLine,
            "whole_line" | "wholeline" | "whole-line" | "line" | "r" => Domain::WholeLine,
            other => return Err(Error::Parse(format!("unknown domain {other:?}"))),
        },
    };
    let num = |key: &str, default: Option<f64>| -> Result<f64> {
        match get(key) {
            Some(v) => v
                .parse::<f64>()
                .map_err(|_| Error::Parse(format!("field {key:?}: cannot parse {v:?} as a number"))),
            None => default.ok_or_else(|| Error::Parse(format!("missing field {key:?}"))),
        }
    };
    let list = |key: &str| -> Result<Vec<f64>> {
        let v = get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))?;
        v.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("field {key:?}: cannot parse {s:?}")))
            })
            .collect()
    };
    let kind = match family.as_str() {
        "square_well" | "squarewell" | "well" => {
            PotentialKind::SquareWell { width: num("width", Some(1.0))? }
        }
        "exp_decay" | "expdecay" | "exp" => PotentialKind::ExpDecay { rate: num("rate", Some(1.0))? },
        "gaussian" | "gauss" => PotentialKind::Gaussian { scale: num("scale", Some(1.0))? },
        "power_tail" | "powertail" | "power" => PotentialKind::PowerTail {
            exponent: num("exponent", None)?,
            offset: num("offset", Some(0.0))?,
        },
        "log_borderline" | "logborderline" | "borderline" => {
            PotentialKind::LogBorderline { q: num("q", None)? }
        }
        "piecewise_constant" | "piecewise" | "pc" => PotentialKind::PiecewiseConstant {
            breakpoints: list("breakpoints")?,
            values: list("values")?,
        },
        "sampled" | "table" => {
            let interpolation = match get("interpolation").map(|s| s.to_lowercase()) {
                None => Interpolation::Linear,
                Some(s) => match s.as_str() {
                    "linear" => Interpolation::Linear,
                    "step" => Interpolation::Step,
                    other => return Err(Error::Parse(format!("unknown interpolation {other:?}"))),
                },
            };
            PotentialKind::Sampled { grid: list("grid")?, values: list("values")?, interpolation }
        }
        other => return Err(Error::Parse(format!("unknown family {other:?}"))),
    };
    Potential::new(kind, domain).map_err(|e| Error::Parse(e.to_string()))
}

/// Parses a two-column table `t  G(t)` (whitespace separated, `#`
/// comments) into a sampled potential.
pub fn from_two_column(text: &str, interpolation: Interpolation) -> Result<Potential> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut cols = line.split_whitespace();
        let t: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("line {}: bad abscissa", lineno + 1)))?;
        let v: f64 = cols
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse(format!("line {}: bad value", lineno + 1)))?;
        if cols.next().is_some() {
            return Err(Error::Parse(format!("line {}: expected two columns", lineno + 1)));
        }
        grid.push(t);
        values.push(v);
    }
    Potential::new(PotentialKind::Sampled { grid, values, interpolation }, Domain::HalfLine)
        .map_err(|e| Error::Parse(e.to_string()))
}
