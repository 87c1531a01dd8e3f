//! Constructive interval partitions controlling the functional
//! `Phi(Xi) = max_k (t_k - t_{k-1})^a int_{I_k} G`.
//!
//! For any integrable weight, `n` pieces suffice to push `Phi` down to
//! `l^a n^{-1-a} int G`. The construction peels pieces off the right
//! edge: with `m` pieces left to place on `(lo, hi)`, the next
//! breakpoint `x` solves
//!
//! ```text
//! (hi - x)^a int_x^hi G  =  m^{-1-a} (hi - lo)^a int_lo^hi G,
//! ```
//!
//! which makes the peeled piece hit the local target exactly, and the
//! remainder's target can only shrink (the worst case, where it stays
//! flat, is the constant weight). The residual is continuous and
//! decreasing from a nonnegative value to `-target`, so bisection
//! always brackets.

use crate::error::{Error, Result};
use crate::potential::{Domain, Potential};
use crate::quad::{quad_with_breaks, QuadCtrl};

/// A finite partition of an interval, tagged with the exponent it was
/// built for.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub interval: (f64, f64),
    /// Strictly increasing, strictly inside the interval.
    pub breakpoints: Vec<f64>,
    pub a: f64,
}

impl Partition {
    /// Number of pieces.
    pub fn n(&self) -> usize {
        self.breakpoints.len() + 1
    }

    /// Piece edges including both interval ends.
    pub fn edges(&self) -> Vec<f64> {
        let mut e = Vec::with_capacity(self.breakpoints.len() + 2);
        e.push(self.interval.0);
        e.extend_from_slice(&self.breakpoints);
        e.push(self.interval.1);
        e
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.interval;
        if !(lo.is_finite() && hi.is_finite() && hi > lo) {
            return Err(Error::Domain(format!("bad partition interval ({lo}, {hi})")));
        }
        let e = self.edges();
        if e.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("partition breakpoints must increase strictly inside the interval".into()));
        }
        Ok(())
    }
}

/// Evenly spaced pieces; what the builder falls back to when the
/// weight has no mass left to balance.
pub fn uniform_partition(interval: (f64, f64), n: usize, a: f64) -> Result<Partition> {
    let (lo, hi) = interval;
    if !(lo.is_finite() && hi.is_finite() && hi > lo) {
        return Err(Error::Domain(format!("bad partition interval ({lo}, {hi})")));
    }
    if n == 0 {
        return Err(Error::Domain("a partition needs at least one piece".into()));
    }
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("exponent must be positive, got {a}")));
    }
    let breakpoints = (1..n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect();
    Ok(Partition { interval, breakpoints, a })
}

fn piece_quad_ctrl() -> QuadCtrl {
    QuadCtrl { rel_tol: 1e-12, abs_tol: 1e-16, max_segments: 4000 }
}

fn mass_on(p: &Potential, lo: f64, hi: f64, breaks: &[f64], ctrl: &QuadCtrl) -> Result<f64> {
    if lo >= hi {
        return Ok(0.0);
    }
    quad_with_breaks(|t| p.eval_plain(t), lo, hi, breaks, ctrl)
}

/// The target the lemma guarantees: `l^a n^{-1-a} int G` over the
/// interval.
pub fn phi_bound(p: &Potential, interval: (f64, f64), n: usize, a: f64) -> Result<f64> {
    let part = uniform_partition(interval, n, a)?; // argument validation
    let (lo, hi) = part.interval;
    let mass = mass_on(p, lo, hi, &p.natural_breaks(), &piece_quad_ctrl())?;
    Ok((hi - lo).powf(a) * (n as f64).powf(-1.0 - a) * mass)
}

/// Builds the lemma's partition of `interval` into `n` pieces.
///
/// Every piece `I_k` of the result satisfies
/// `|I_k|^a int_{I_k} G <= l^a n^{-1-a} int G` up to the bisection
/// tolerance. A weight with zero mass on the interval (or on what is
/// left of it mid-build) gets a uniform split, which satisfies the
/// bound trivially.
pub fn build_partition(p: &Potential, interval: (f64, f64), n: usize, a: f64) -> Result<Partition> {
    let (lo, hi) = interval;
    uniform_partition(interval, n, a)?; // argument validation
    if p.domain() == Domain::HalfLine && lo < 0.0 {
        return Err(Error::Domain("interval extends left of the domain".into()));
    }
    let breaks = p.natural_breaks();
    let ctrl = piece_quad_ctrl();
    let total_mass = mass_on(p, lo, hi, &breaks, &ctrl)?;
    if !total_mass.is_finite() {
        return Err(Error::Domain("the weight's mass on the interval is not finite".into()));
    }
    if total_mass <= 0.0 || n == 1 {
        let mut part = uniform_partition(interval, n, a)?;
        part.a = a;
        return Ok(part);
    }

    let mut rev_breakpoints: Vec<f64> = Vec::with_capacity(n - 1);
    let mut right = hi;
    for m in (2..=n).rev() {
        let len = right - lo;
        let mass = mass_on(p, lo, right, &breaks, &ctrl)?;
        if mass <= 0.0 {
            // all remaining pieces carry zero mass; split evenly
            for k in (1..m).rev() {
                rev_breakpoints.push(lo + len * k as f64 / m as f64);
            }
            break;
        }
        // normalized residual: (1-y)^a * tail(y)/mass - m^{-1-a},
        // y the position scaled to (0,1) on the remaining interval
        let target = (m as f64).powf(-1.0 - a);
        let residual = |y: f64| -> Result<f64> {
            let x = lo + len * y;
            let tail = mass_on(p, x, right, &breaks, &ctrl)?;
            Ok((1.0 - y).powf(a) * (tail / mass) - target)
        };
        let mut y_lo = 0.0f64;
        let mut y_hi = 1.0f64;
        let mut y = 0.5;
        let mut converged = false;
        for _ in 0..200 {
            y = 0.5 * (y_lo + y_hi);
            let r = residual(y)?;
            if r.abs() <= 1e-12 {
                converged = true;
                break;
            }
            if r > 0.0 {
                y_lo = y;
            } else {
                y_hi = y;
            }
            if y_hi - y_lo < f64::EPSILON {
                break;
            }
        }
        if !converged {
            // the bracket collapsed without meeting the residual
            // tolerance; only a pathological weight gets here
            let r = residual(y)?;
            if r.abs() > 1e-9 {
                return Err(Error::Numeric(format!(
                    "breakpoint residual stalled at {r:.3e} with {m} pieces left"
                )));
            }
        }
        let x = lo + len * y;
        if x <= lo || x >= right {
            return Err(Error::Numeric(format!(
                "degenerate piece while peeling ({m} pieces left)"
            )));
        }
        rev_breakpoints.push(x);
        right = x;
    }
    rev_breakpoints.reverse();
    let part = Partition { interval, breakpoints: rev_breakpoints, a };
    part.validate()?;
    Ok(part)
}

/// `Phi(Xi) = max_k (t_k - t_{k-1})^a int_{I_k} G` by quadrature.
pub fn phi(p: &Potential, partition: &Partition, a: f64) -> Result<f64> {
    partition.validate()?;
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::Domain(format!("exponent must be positive, got {a}")));
    }
    let breaks = p.natural_breaks();
    let ctrl = piece_quad_ctrl();
    let edges = partition.edges();
    let mut best = 0.0f64;
    for w in edges.windows(2) {
        let piece = (w[1] - w[0]).powf(a) * mass_on(p, w[0], w[1], &breaks, &ctrl)?;
        best = best.max(piece);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Interpolation, PotentialKind};

    fn ramp() -> Potential {
        // G = 2t on (0,1), zero outside
        Potential::new(
            PotentialKind::Sampled {
                grid: vec![0.0, 1.0],
                values: vec![0.0, 2.0],
                interpolation: Interpolation::Linear,
            },
            Domain::HalfLine,
        )
        .unwrap()
    }

    #[test]
    fn constant_weight_splits_uniformly() {
        let p = Potential::square_well(1.0).unwrap();
        let part = build_partition(&p, (0.0, 1.0), 3, 1.0).unwrap();
        assert_eq!(part.breakpoints.len(), 2);
        assert!((part.breakpoints[0] - 1.0 / 3.0).abs() < 1e-9, "{:?}", part.breakpoints);
        assert!((part.breakpoints[1] - 2.0 / 3.0).abs() < 1e-9);
        let v = phi(&p, &part, 1.0).unwrap();
        assert!((v - 1.0 / 9.0).abs() < 1e-9);
    }

    #[test]
    fn single_piece_is_the_whole_interval() {
        let p = Potential::square_well(1.0).unwrap();
        let part = build_partition(&p, (0.0, 0.5), 1, 2.0).unwrap();
        assert!(part.breakpoints.is_empty());
        let v = phi(&p, &part, 2.0).unwrap();
        assert!((v - 0.25 * 0.5).abs() < 1e-12);
    }

    #[test]
    fn ramp_breakpoint_solves_the_cubic() {
        // (1-x)^2 (1+x) = 1/4 at x = 0.6053779404795958
        let part = build_partition(&ramp(), (0.0, 1.0), 2, 1.0).unwrap();
        assert_eq!(part.breakpoints.len(), 1);
        let x = part.breakpoints[0];
        assert!((x - 0.6053779404795958).abs() < 1e-9, "{x}");
        let v = phi(&ramp(), &part, 1.0).unwrap();
        assert!((v - 0.25).abs() < 1e-6, "{v}");
        // the left piece sits strictly below the target
        assert!((x.powi(3) - 0.2218603912989129).abs() < 1e-8);
    }

    #[test]
    fn uniform_phi_closed_forms() {
        let p = Potential::square_well(1.0).unwrap();
        for n in [1usize, 2, 4, 7] {
            let part = uniform_partition((0.0, 1.0), n, 1.0).unwrap();
            let v1 = phi(&p, &part, 1.0).unwrap();
            assert!((v1 - (n as f64).powi(-2)).abs() < 1e-12, "n={n}: {v1}");
            let v2 = phi(&p, &part, 2.0).unwrap();
            assert!((v2 - (n as f64).powi(-3)).abs() < 1e-12, "n={n}: {v2}");
        }
    }

    #[test]
    fn lemma_bound_holds_on_varied_weights() {
        let weights = [
            Potential::square_well(1.0).unwrap(),
            Potential::exp_decay(1.0).unwrap(),
            Potential::gaussian(1.0).unwrap(),
            Potential::power_tail(3.0, 1.0).unwrap(),
            ramp(),
        ];
        for p in &weights {
            let mass = p.moment(0, Some((0.0, 8.0))).unwrap().finite().unwrap();
            for n in [1usize, 2, 5, 16, 64] {
                for a in [0.5, 1.0, 2.0] {
                    let part = build_partition(p, (0.0, 8.0), n, a).unwrap();
                    assert_eq!(part.n(), n);
                    let v = phi(p, &part, a).unwrap();
                    let bound = phi_bound(p, (0.0, 8.0), n, a).unwrap();
                    assert!(
                        v <= bound + 1e-9 * mass,
                        "{} n={n} a={a}: phi {v} > bound {bound}",
                        p.kind().name()
                    );
                }
            }
        }
    }

    #[test]
    fn bound_decreases_and_construction_follows() {
        let p = Potential::exp_decay(1.0).unwrap();
        let a = 1.0;
        let mass = p.moment(0, Some((0.0, 8.0))).unwrap().finite().unwrap();
        let mut prev_bound = f64::INFINITY;
        for n in 1..=16 {
            let bound = phi_bound(&p, (0.0, 8.0), n, a).unwrap();
            assert!(bound < prev_bound, "bound must decrease: n={n}");
            let v = phi(&p, &build_partition(&p, (0.0, 8.0), n, a).unwrap(), a).unwrap();
            assert!(v <= bound + 1e-9 * mass, "n={n}: {v} vs {bound}");
            prev_bound = bound;
        }
    }

    #[test]
    fn mass_exhaustion_splits_the_remainder_evenly() {
        // all mass in (0.9, 1): after the first peel the rest is empty
        let p = Potential::piecewise_constant(vec![0.9, 1.0], vec![1.0]).unwrap();
        let part = build_partition(&p, (0.0, 1.0), 3, 1.0).unwrap();
        assert_eq!(part.breakpoints.len(), 2);
        let v = phi(&p, &part, 1.0).unwrap();
        let bound = phi_bound(&p, (0.0, 1.0), 3, 1.0).unwrap();
        assert!(v <= bound + 1e-9 * 0.1, "{v} vs {bound}");
        // zero-mass pieces split the leftover evenly
        let gap = part.breakpoints[1] - part.breakpoints[0];
        assert!((part.breakpoints[0] - gap).abs() < 1e-9, "{:?}", part.breakpoints);
    }

    #[test]
    fn zero_weight_gets_uniform_partition() {
        let part = build_partition(&Potential::zero(), (0.0, 2.0), 4, 0.5).unwrap();
        assert_eq!(part.breakpoints, vec![0.5, 1.0, 1.5]);
        assert_eq!(phi(&Potential::zero(), &part, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let p = Potential::square_well(1.0).unwrap();
        assert!(build_partition(&p, (1.0, 0.0), 2, 1.0).is_err());
        assert!(build_partition(&p, (0.0, 1.0), 0, 1.0).is_err());
        assert!(build_partition(&p, (0.0, 1.0), 2, 0.0).is_err());
        assert!(build_partition(&p, (-1.0, 1.0), 2, 1.0).is_err());
        let bad = Partition { interval: (0.0, 1.0), breakpoints: vec![0.7, 0.3], a: 1.0 };
        assert!(phi(&p, &bad, 1.0).is_err());
    }
}
