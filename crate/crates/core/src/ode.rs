//! Scalar Dormand-Prince 5(4) integrator with step observer.
//!
//! The oscillation counters integrate a single phase angle whose
//! right-hand side is smooth between potential breakpoints, so a scalar
//! embedded Runge-Kutta pair with FSAL reuse and standard PI-free step
//! control is all that is needed. The observer sees every *accepted*
//! step; phase-crossing counts only require accepted-step samples because
//! the angle crosses multiples of pi monotonically.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeCtrl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_steps: usize,
}

impl Default for OdeCtrl {
    fn default() -> Self {
        OdeCtrl { rel_tol: 1e-8, abs_tol: 1e-10, max_steps: 50_000_000 }
    }
}

impl OdeCtrl {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        OdeCtrl { rel_tol, abs_tol: (rel_tol * 1e-2).min(1e-10), ..OdeCtrl::default() }
    }
}

// Dormand-Prince coefficients.
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th- and 4th-order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

/// Integrates `y' = f(t, y)` from `t0` to `t1` (either direction),
/// invoking `observer(t, y)` at the initial point and after every
/// accepted step. Returns `y(t1)`.
pub fn integrate<F, O>(f: F, t0: f64, y0: f64, t1: f64, ctrl: &OdeCtrl, mut observer: O) -> Result<f64>
where
    F: Fn(f64, f64) -> f64,
    O: FnMut(f64, f64),
{
    if !(t0.is_finite() && t1.is_finite() && y0.is_finite()) {
        return Err(Error::Domain("ode endpoints and initial value must be finite".into()));
    }
    observer(t0, y0);
    if t0 == t1 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, y);
    if !k1.is_finite() {
        return Err(Error::Numeric(format!("rhs non-finite at t = {t:e}")));
    }
    let mut h = dir * (span.abs() / 10.0).min(1.0 / (1.0 + k1.abs()));
    let h_min = span.abs() * 1e-15;
    let mut steps = 0usize;

    while (t1 - t) * dir > 0.0 {
        steps += 1;
        if steps > ctrl.max_steps {
            return Err(Error::Integration {
                location: format!("t = {t:e}"),
                reason: format!("step budget {} exhausted", ctrl.max_steps),
            });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        let k2 = f(t + C2 * h, y + h * (A21 * k1));
        let k3 = f(t + C3 * h, y + h * (A31 * k1 + A32 * k2));
        let k4 = f(t + C4 * h, y + h * (A41 * k1 + A42 * k2 + A43 * k3));
        let k5 = f(t + C5 * h, y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4));
        let k6 = f(t + h, y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4 + A65 * k5));
        let y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6);
        let k7 = f(t + h, y_new);

        let finite =
            k2.is_finite() && k3.is_finite() && k4.is_finite() && k5.is_finite()
                && k6.is_finite() && k7.is_finite() && y_new.is_finite();
        let err_raw = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = ctrl.abs_tol + ctrl.rel_tol * y.abs().max(y_new.abs());
        let err = if finite { (err_raw / scale).abs() } else { f64::INFINITY };

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7; // FSAL
            observer(t, y);
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            let shrink = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h *= shrink;
            if h.abs() < h_min {
                return Err(Error::Integration {
                    location: format!("t = {t:e}"),
                    reason: "step size underflow".into(),
                });
            }
        }
    }
    Ok(y)
}

/// Convenience wrapper without an observer.
pub fn solve<F: Fn(f64, f64) -> f64>(f: F, t0: f64, y0: f64, t1: f64, ctrl: &OdeCtrl) -> Result<f64> {
    integrate(f, t0, y0, t1, ctrl, |_, _| {})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_growth() {
        let y = solve(|_, y| y, 0.0, 1.0, 1.0, &OdeCtrl::default()).unwrap();
        assert!((y - std::f64::consts::E).abs() < 1e-7);
    }

    #[test]
    fn sine_from_cosine() {
        let y = solve(|t, _| t.cos(), 0.0, 0.0, 10.0, &OdeCtrl::default()).unwrap();
        assert!((y - 10.0f64.sin()).abs() < 1e-7);
    }

    #[test]
    fn backward_integration() {
        let y = solve(|_, y| y, 1.0, std::f64::consts::E, 0.0, &OdeCtrl::default()).unwrap();
        assert!((y - 1.0).abs() < 1e-7);
    }

    #[test]
    fn stiff_decay_is_stable() {
        let y = solve(|_, y| -50.0 * y, 0.0, 1.0, 2.0, &OdeCtrl::default()).unwrap();
        assert!((y - (-100.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn observer_sees_monotone_grid_ending_at_t1() {
        let mut ts: Vec<f64> = Vec::new();
        let _ = integrate(|t, _| (t * t).sin(), 0.0, 0.0, 3.0, &OdeCtrl::default(), |t, _| {
            ts.push(t)
        })
        .unwrap();
        assert_eq!(ts[0], 0.0);
        assert_eq!(*ts.last().unwrap(), 3.0);
        assert!(ts.windows(2).all(|w| w[1] > w[0]));
    }

    /// Phase equation with constant effective potential -1/4: the angle
    /// relaxes to arctan(2) and never crosses pi/2... it stays below.
    #[test]
    fn phase_angle_saturates() {
        let w = -0.25;
        let y = solve(
            |_, th: f64| th.cos().powi(2) + w * th.sin().powi(2),
            0.0,
            0.0,
            200.0,
            &OdeCtrl::default(),
        )
        .unwrap();
        assert!((y - 2.0f64.atan()).abs() < 1e-6, "angle {y}");
    }

    #[test]
    fn tighter_tolerance_improves_accuracy() {
        let loose = solve(|t, y| t * y, 0.0, 1.0, 2.0, &OdeCtrl::with_rel_tol(1e-4)).unwrap();
        let tight = solve(|t, y| t * y, 0.0, 1.0, 2.0, &OdeCtrl::with_rel_tol(1e-12)).unwrap();
        let exact = (2.0f64).exp();
        assert!((tight - exact).abs() <= (loose - exact).abs() + 1e-12);
        assert!((tight - exact).abs() < 1e-9);
    }
}
