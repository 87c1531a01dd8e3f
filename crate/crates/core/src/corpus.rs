//! The built-in potential corpus and calibration grids.
//!
//! Calibrated estimate factors (see the `constants` module) are defined
//! as the smallest values dominating the exact counts over *these*
//! potentials and *these* coupling grids. The canonical description
//! below is hashed (FNV-1a) into the constants file so a calibration can
//! never be paired with a corpus it was not computed on.

use crate::constants::fnv1a;
use crate::potential::{Domain, Potential, PotentialKind};

/// The five reference weights: indicator, exponential, Gaussian, cubic
/// power tail, and the borderline `t^{-2} (ln t)^{-1/2}` family whose
/// shell sequence decays too slowly to be square-root summable.
pub fn standard_corpus() -> Vec<(&'static str, Potential)> {
    vec![
        ("square_well", Potential::square_well(1.0).unwrap()),
        ("exp_decay", Potential::exp_decay(1.0).unwrap()),
        ("gaussian", Potential::gaussian(1.0).unwrap()),
        ("power_tail_3", Potential::power_tail(3.0, 1.0).unwrap()),
        ("log_borderline_2", Potential::log_borderline(2.0).unwrap()),
    ]
}

/// Whole-line (even) variants of the decaying corpus members, used to
/// calibrate the line estimate.
pub fn line_corpus() -> Vec<(&'static str, Potential)> {
    let lift = |kind: PotentialKind| Potential::new(kind, Domain::WholeLine).unwrap();
    vec![
        ("square_well_line", lift(PotentialKind::SquareWell { width: 1.0 })),
        ("exp_decay_line", lift(PotentialKind::ExpDecay { rate: 1.0 })),
        ("gaussian_line", lift(PotentialKind::Gaussian { scale: 1.0 })),
        ("power_tail_3_line", lift(PotentialKind::PowerTail { exponent: 3.0, offset: 1.0 })),
    ]
}

/// Radial profiles for the planar estimate calibration.
pub fn radial_corpus() -> Vec<(&'static str, Potential)> {
    vec![
        ("exp_profile", Potential::exp_decay(1.0).unwrap()),
        ("gaussian_profile", Potential::gaussian(1.0).unwrap()),
    ]
}

/// Log-spaced grid of `n` couplings over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && lo > 0.0 && hi > lo);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Coupling grid for calibrating the half-line and line factors. Starts
/// below every binding threshold so near-threshold couplings (which
/// maximize the count-to-estimate ratio) are sampled.
pub fn calibration_alphas() -> Vec<f64> {
    log_grid(0.1, 1e4, 60)
}

/// Coupling grid for calibrating the planar radial factor.
pub fn radial_calibration_alphas() -> Vec<f64> {
    log_grid(1.0, 100.0, 20)
}

/// Canonical text describing the corpus and grids; its FNV-1a hash is
/// the `calibration_corpus_hash` pinned in the constants file.
pub fn canonical_description() -> String {
    let mut s = String::from("calibration corpus v1\n");
    for (name, p) in standard_corpus() {
        s.push_str(&format!("halfline {name} {:?}\n", p.kind()));
    }
    for (name, p) in line_corpus() {
        s.push_str(&format!("line {name} {:?}\n", p.kind()));
    }
    for (name, p) in radial_corpus() {
        s.push_str(&format!("radial {name} {:?}\n", p.kind()));
    }
    s.push_str("alphas: log 0.1 to 1e4, 60 points\n");
    s.push_str("radial alphas: log 1 to 1e2, 20 points\n");
    s
}

/// FNV-1a hash of [`canonical_description`].
pub fn corpus_hash() -> u64 {
    fnv1a(canonical_description().as_bytes())
}
