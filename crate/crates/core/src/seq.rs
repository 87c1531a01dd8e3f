//! Weak-`l_q` analytics on finite nonnegative sequences, and log-log
//! growth fitting for `(alpha, N)` samples.
//!
//! The counting function `n_plus` uses strict inequality throughout. The
//! weak quasi-norm is realized exactly on finite data as
//! `max_k x_(k)^q * k` over the descending rearrangement (the sup over
//! continuous `s` is approached from below at each entry value); the
//! function returns the `q`-th power `||x||_{q,inf}^q`.

use crate::error::{Error, Result};

/// `#{k : x_k > s}`, strict.
pub fn n_plus(s: f64, x: &[f64]) -> Result<usize> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain(format!("threshold must be positive, got {s}")));
    }
    Ok(x.iter().filter(|v| **v > s).count())
}

fn checked_abs_sorted_desc(x: &[f64]) -> Result<Vec<f64>> {
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("sequence contains a non-finite entry".into()));
    }
    let mut v: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(v)
}

/// `||x||_{q,inf}^q = sup_s s^q n_+(s, |x|)`, exact on finite data.
pub fn weak_quasinorm(x: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let sorted = checked_abs_sorted_desc(x)?;
    let mut best = 0.0f64;
    for (k, v) in sorted.iter().enumerate() {
        if *v == 0.0 {
            break;
        }
        best = best.max(v.powf(q) * (k + 1) as f64);
    }
    Ok(best)
}

/// `(sum |x_k|^q)^{1/q}`.
pub fn lq_quasinorm(x: &[f64], q: f64) -> Result<f64> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("sequence contains a non-finite entry".into()));
    }
    let s: f64 = x.iter().map(|v| v.abs().powf(q)).sum();
    Ok(s.powf(1.0 / q))
}

/// Finite-window estimates of the limiting tail functionals
/// `Delta_q = limsup_{s->0} s^q n_+` and `delta_q = liminf`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailReport {
    pub q: f64,
    /// `||x||_{q,inf}^q` over the whole sequence.
    pub weak_qnorm_q: f64,
    /// Max of `s^q n_+(s)` over candidate `s` in the window (limit from
    /// below at each entry, i.e. ties count).
    pub delta_upper: f64,
    /// Min of `s^q n_+(s)` over the same candidates (strict count).
    pub delta_lower: f64,
    /// The `s`-range the candidates were drawn from.
    pub window: (f64, f64),
}

/// Window extrema of `s^q n_+(s, x)`; candidates are the distinct entry
/// values inside the window (default: the smallest decade of distinct
/// positive values). These are finite-window *estimates* — finite data
/// cannot realize a limit.
pub fn tail_functionals(x: &[f64], q: f64, window: Option<(f64, f64)>) -> Result<TailReport> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    let sorted = checked_abs_sorted_desc(x)?;
    let mut distinct: Vec<f64> = sorted.iter().copied().filter(|v| *v > 0.0).collect();
    distinct.dedup();
    if distinct.is_empty() {
        return Err(Error::InsufficientData("no positive entries".into()));
    }
    let (lo, hi) = match window {
        Some((a, b)) => {
            if !(a > 0.0 && b > a) {
                return Err(Error::Domain("window must satisfy 0 < lo < hi".into()));
            }
            (a, b)
        }
        None => {
            let v_min = *distinct.last().unwrap();
            (v_min, 10.0 * v_min)
        }
    };
    let in_window: Vec<f64> =
        distinct.iter().copied().filter(|v| *v >= lo && *v <= hi).collect();
    if in_window.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "window [{lo:e}, {hi:e}] contains {} distinct entries, need 3",
            in_window.len()
        )));
    }
    // sorted is descending: count_ge(v) = # entries >= v, count_gt strict.
    let count_ge = |v: f64| sorted.partition_point(|e| *e >= v);
    let count_gt = |v: f64| sorted.partition_point(|e| *e > v);
    let mut delta_upper = 0.0f64;
    let mut delta_lower = f64::INFINITY;
    for w in &in_window {
        delta_upper = delta_upper.max(w.powf(q) * count_ge(*w) as f64);
        delta_lower = delta_lower.min(w.powf(q) * count_gt(*w) as f64);
    }
    Ok(TailReport {
        q,
        weak_qnorm_q: weak_quasinorm(x, q)?,
        delta_upper,
        delta_lower,
        window: (lo, hi),
    })
}

/// Ordinary least squares for `y = a + b x`; returns `(b, stderr_b)`.
fn ols_slope(xs: &[f64], ys: &[f64]) -> Result<(f64, f64)> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx <= 0.0 {
        return Err(Error::DegenerateFit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let dof = (xs.len() as f64 - 2.0).max(1.0);
    let stderr = (ssr / dof / sxx).sqrt();
    Ok((slope, stderr))
}

/// Least-squares slope of `log N` vs `log alpha` over the top two decades
/// of `alpha` (all samples if that leaves fewer than 5). Returns the
/// fitted exponent and its standard error.
pub fn growth_exponent(samples: &[(f64, f64)]) -> Result<(f64, f64)> {
    if samples.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need at least 5 samples, got {}",
            samples.len()
        )));
    }
    if !samples.windows(2).all(|w| w[0].0 < w[1].0) {
        return Err(Error::Domain("alpha values must be strictly increasing".into()));
    }
    if samples.iter().any(|(a, n)| !(*a > 0.0) || !(*n >= 1.0) || !a.is_finite() || !n.is_finite())
    {
        return Err(Error::Domain("samples require alpha > 0 and N >= 1".into()));
    }
    let first_n = samples[0].1;
    if samples.iter().all(|(_, n)| *n == first_n) {
        return Err(Error::DegenerateFit("all counts equal".into()));
    }
    let a_max = samples.last().unwrap().0;
    let cut = a_max / 100.0;
    let top: Vec<&(f64, f64)> = samples.iter().filter(|(a, _)| *a >= cut).collect();
    let use_all = top.len() < 5;
    let sel: Vec<&(f64, f64)> = if use_all { samples.iter().collect() } else { top };
    let xs: Vec<f64> = sel.iter().map(|(a, _)| a.ln()).collect();
    let ys: Vec<f64> = sel.iter().map(|(_, n)| n.ln()).collect();
    ols_slope(&xs, &ys)
}

/// Log-log decay slope of a positive sequence against its index
/// (used to read an exponent off shell-sequence tails). Returns
/// `(slope, stderr)`; entries must be positive at the supplied indices.
pub fn decay_exponent(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    let filtered: Vec<&(f64, f64)> =
        pairs.iter().filter(|(j, e)| *j > 0.0 && *e > 0.0).collect();
    if filtered.len() < 5 {
        return Err(Error::InsufficientData(format!(
            "need at least 5 positive pairs, got {}",
            filtered.len()
        )));
    }
    let xs: Vec<f64> = filtered.iter().map(|(j, _)| j.ln()).collect();
    let ys: Vec<f64> = filtered.iter().map(|(_, e)| e.ln()).collect();
    ols_slope(&xs, &ys)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n_plus_is_strict() {
        assert_eq!(n_plus(0.5, &[1.0, 0.5, 0.25]).unwrap(), 1);
        assert_eq!(n_plus(10.0, &[1.0, 3.0, 10.0]).unwrap(), 0);
        let harmonic: Vec<f64> = (1..=100).map(|k| 1.0 / k as f64).collect();
        assert_eq!(n_plus(1.0 / 7.0, &harmonic).unwrap(), 6);
        assert!(n_plus(0.0, &[1.0]).is_err());
    }

    #[test]
    fn weak_quasinorm_conventions() {
        let harmonic: Vec<f64> = (1..=1000).map(|k| 1.0 / k as f64).collect();
        // (1/k)^1 * k = 1 for every k: the sup is exactly 1.
        assert_eq!(weak_quasinorm(&harmonic, 1.0).unwrap(), 1.0);
        assert!((weak_quasinorm(&[0.7], 2.0).unwrap() - 0.49).abs() < 1e-15);
        assert_eq!(weak_quasinorm(&[0.0, 0.0], 3.0).unwrap(), 0.0);
    }

    #[test]
    fn weak_quasinorm_scaling() {
        let x = [0.9, 0.4, 0.1, 0.05];
        let c = 3.5f64;
        let scaled: Vec<f64> = x.iter().map(|v| c * v).collect();
        let q = 0.5;
        let a = weak_quasinorm(&scaled, q).unwrap();
        let b = c.powf(q) * weak_quasinorm(&x, q).unwrap();
        assert!((a - b).abs() < 1e-14 * b);
    }

    #[test]
    fn lq_quasinorm_values() {
        assert!((lq_quasinorm(&[3.0, 4.0], 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert_eq!(lq_quasinorm(&[1.0], 0.5).unwrap(), 1.0);
        assert!((lq_quasinorm(&[0.25, 0.25], 0.5).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn lq_dominates_weak() {
        let x = [0.8, 0.31, 0.11, 0.04, 0.01];
        for q in [0.5, 1.0, 2.0] {
            let lq = lq_quasinorm(&x, q).unwrap().powf(q);
            let wk = weak_quasinorm(&x, q).unwrap();
            assert!(lq >= wk - 1e-14, "q={q}: {lq} < {wk}");
        }
    }

    #[test]
    fn tail_functionals_geometric() {
        let x: Vec<f64> = (1..=30).map(|k| 2f64.powi(-k)).collect();
        let r = tail_functionals(&x, 1.0, None).unwrap();
        // Window = smallest decade [2^-30, 10*2^-30]; candidates are
        // 2^-30..2^-27. Frozen brute-force values of the extrema there.
        assert!((r.delta_upper - 27.0 * 2f64.powi(-27)).abs() < 1e-20);
        assert!((r.delta_lower - 29.0 * 2f64.powi(-30)).abs() < 1e-20);
        assert!(r.delta_lower <= r.delta_upper);
        assert!(r.delta_upper <= r.weak_qnorm_q);
        assert!((r.weak_qnorm_q - 0.5).abs() < 1e-15);
    }

    #[test]
    fn tail_functionals_near_critical() {
        // x_k ~ 1/k is exactly critical for q = 1: s * n_+(s) -> 1.
        let x: Vec<f64> = (1..=4000).map(|k| 1.0 / k as f64).collect();
        let r = tail_functionals(&x, 1.0, None).unwrap();
        assert!(r.delta_upper <= 1.0 + 1e-12);
        assert!(r.delta_upper > 0.9, "{}", r.delta_upper);
        assert!(r.delta_lower > 0.8, "{}", r.delta_lower);
    }

    #[test]
    fn tail_functionals_insufficient_data() {
        let constant = [0.5; 40];
        assert!(matches!(
            tail_functionals(&constant, 1.0, None),
            Err(Error::InsufficientData(_))
        ));
        assert!(tail_functionals(&[], 1.0, None).is_err());
    }

    #[test]
    fn growth_exponent_synthetic() {
        let alphas: Vec<f64> = (0..40).map(|i| 100.0 * 100f64.powf(i as f64 / 39.0)).collect();
        let sqrt_like: Vec<(f64, f64)> =
            alphas.iter().map(|a| (*a, (3.0 * a.sqrt()).round())).collect();
        let (q, err) = growth_exponent(&sqrt_like).unwrap();
        assert!((q - 0.5).abs() < 0.02, "q = {q}");
        assert!(err < 0.02);
        let linear: Vec<(f64, f64)> = alphas.iter().map(|a| (*a, (a / 2.0).round())).collect();
        let (q, _) = growth_exponent(&linear).unwrap();
        assert!((q - 1.0).abs() < 0.02, "q = {q}");
    }

    #[test]
    fn growth_exponent_errors() {
        let flat: Vec<(f64, f64)> = (1..=10).map(|i| (i as f64, 7.0)).collect();
        assert!(matches!(growth_exponent(&flat), Err(Error::DegenerateFit(_))));
        let short = [(1.0, 1.0), (2.0, 2.0)];
        assert!(matches!(growth_exponent(&short), Err(Error::InsufficientData(_))));
        let unsorted = [(1.0, 1.0), (3.0, 2.0), (2.0, 2.0), (4.0, 3.0), (5.0, 3.0)];
        assert!(growth_exponent(&unsorted).is_err());
    }

    #[test]
    fn decay_exponent_reads_power_law() {
        let pairs: Vec<(f64, f64)> =
            (10..200).map(|j| (j as f64, 2.0 * (j as f64).powf(-0.5))).collect();
        let (slope, _) = decay_exponent(&pairs).unwrap();
        assert!((slope + 0.5).abs() < 1e-10);
    }
}
