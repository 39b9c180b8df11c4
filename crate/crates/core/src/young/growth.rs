//! Doubling-type growth conditions and dominance.
//!
//! Closed forms are decided by their limiting index `t a(t)/A(t)` and the
//! grid only supplies the constant. Tables are decided from the grid alone:
//! a ratio counts as diverging when it grows like a positive power of
//! `ln t`, which separates the catalog's `t log t`/`exp t` behaviors from
//! bounded ones at every range reachable in double precision.

use serde::{Deserialize, Serialize};

use super::YoungFunction;

/// Thresholds scanned for conditions near infinity.
pub const NEAR_INFINITY_THRESHOLDS: [f64; 4] = [1.0, 10.0, 100.0, 1000.0];
/// Lower end of the grid for global checks.
pub const GLOBAL_START: f64 = 1e-12;
/// Grid density (points per decade); stability is checked at twice this.
pub const POINTS_PER_DECADE: f64 = 16.0;
/// Relative drift allowed between the two grids.
pub const STABILITY_DRIFT: f64 = 0.05;
/// A log-power growth exponent above this counts as divergence.
pub const TREND_LIMIT: f64 = 0.5;
/// Values beyond this are treated as leaving the floating range.
pub const SCAN_CEILING: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Threshold {
    Global,
    From(f64),
}

impl Threshold {
    pub fn value(&self) -> f64 {
        match self {
            Threshold::Global => 0.0,
            Threshold::From(t) => *t,
        }
    }
}

impl std::fmt::Display for Threshold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Threshold::Global => write!(f, "0"),
            Threshold::From(t) => write!(f, "{t}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub holds: bool,
    pub threshold_t0: Threshold,
    pub witness_constant: f64,
    /// Arguments at which the tested ratio degrades (non-empty on failure).
    pub failure_certificate: Vec<f64>,
    /// `(t, ratio)` samples backing the verdict.
    pub diagnostic: Vec<(f64, f64)>,
}

impl GrowthVerdict {
    fn failed(threshold: Threshold, constant: f64, certificate: Vec<f64>, diagnostic: Vec<(f64, f64)>) -> Self {
        GrowthVerdict { holds: false, threshold_t0: threshold, witness_constant: constant, failure_certificate: certificate, diagnostic }
    }
}

pub(crate) fn log_grid(lo: f64, hi: f64, per_decade: f64) -> Vec<f64> {
    if !(hi > lo) {
        return vec![lo];
    }
    let span = hi.ln() - lo.ln();
    let n = (span / std::f64::consts::LN_10 * per_decade).ceil().max(1.0) as usize;
    let step = span / n as f64;
    let l0 = lo.ln();
    (0..=n).map(|i| if i == 0 { lo } else if i == n { hi } else { (l0 + step * i as f64).exp() }).collect()
}

/// Exponent `γ` in `q(t) ≈ (ln t)^γ` fitted between the middle and the end
/// of the sampled range (windows in `λ = ln t`).
pub(crate) fn trend_exponent(samples: &[(f64, f64)]) -> f64 {
    let tail: Vec<&(f64, f64)> = samples.iter().filter(|(t, _)| *t > 1.0).collect();
    if tail.len() < 4 {
        return 0.0;
    }
    let lam_a = tail[0].0.ln().max(1.0);
    let (t_end, q_end) = *tail[tail.len() - 1];
    let lam_c = t_end.ln();
    if lam_c < 1.5 * lam_a {
        return 0.0;
    }
    let lam_b = (lam_a * lam_c).sqrt();
    let (_, q_mid) = **tail.iter().find(|(t, _)| t.ln() >= lam_b).unwrap();
    ratio_exponent(q_mid, q_end, (lam_c / lam_b).ln())
}

/// Exponent in `q(t) ≈ t^γ` between the geometric middle and the end.
pub(crate) fn power_trend_exponent(samples: &[(f64, f64)]) -> f64 {
    if samples.len() < 4 {
        return 0.0;
    }
    let (t0, _) = samples[0];
    let (t_end, q_end) = samples[samples.len() - 1];
    let t_mid = (t0 * t_end).sqrt();
    let (tm, q_mid) = *samples.iter().find(|(t, _)| *t >= t_mid).unwrap();
    if !(t_end > tm) {
        return 0.0;
    }
    ratio_exponent(q_mid, q_end, (t_end / tm).ln())
}

fn ratio_exponent(q_mid: f64, q_end: f64, log_span: f64) -> f64 {
    if !q_end.is_finite() {
        return f64::INFINITY;
    }
    if !(q_end > 0.0) {
        return 0.0;
    }
    if !(q_mid > 0.0) {
        return f64::INFINITY;
    }
    (q_end / q_mid).ln() / log_span
}

/// `(t, A(2t)/A(t))` on a log grid, stopping before `A(2t)` leaves range.
fn doubling_samples(a: &YoungFunction, lo: f64, per_decade: f64) -> Vec<(f64, f64)> {
    let hi = (a.reliable_limit() / 2.0).min(SCAN_CEILING);
    let mut out = Vec::new();
    for t in log_grid(lo, hi.max(lo), per_decade) {
        let (at, a2t) = (a.eval(t), a.eval(2.0 * t));
        if !(a2t <= SCAN_CEILING) {
            break;
        }
        let rho = if at > 0.0 {
            a2t / at
        } else if a2t > 0.0 {
            f64::INFINITY
        } else {
            continue;
        };
        out.push((t, rho));
    }
    out
}

/// Arguments of the last record highs of `q`.
pub(crate) fn record_highs(samples: &[(f64, f64)], keep: usize) -> Vec<f64> {
    let mut best = f64::NEG_INFINITY;
    let mut records = Vec::new();
    for &(t, q) in samples {
        if q > best {
            best = q;
            records.push(t);
        }
    }
    let skip = records.len().saturating_sub(keep);
    records.split_off(skip)
}

fn tail_points(samples: &[(f64, f64)], keep: usize) -> Vec<f64> {
    samples.iter().rev().take(keep).map(|p| p.0).rev().collect()
}

pub(crate) fn thin(samples: &[(f64, f64)], keep: usize) -> Vec<(f64, f64)> {
    if samples.len() <= keep {
        return samples.to_vec();
    }
    let stride = samples.len().div_ceil(keep);
    let mut out: Vec<(f64, f64)> = samples.iter().step_by(stride).copied().collect();
    if out.last() != samples.last() {
        out.push(*samples.last().unwrap());
    }
    out
}

pub(crate) fn sup(samples: &[(f64, f64)]) -> f64 {
    samples.iter().map(|p| p.1).fold(0.0, f64::max)
}

fn inf(samples: &[(f64, f64)]) -> f64 {
    samples.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
}

pub(crate) fn drift(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// `A(2t) <= C A(t)` for `t >= t0`, or for all `t` when `near_infinity` is false.
pub fn check_delta2(a: &YoungFunction, near_infinity: bool) -> GrowthVerdict {
    if let Some(t_inf) = a.infinity_threshold() {
        let cert: Vec<f64> = [0.6, 0.75, 0.9, 0.99].iter().map(|f| f * t_inf).collect();
        let diag = cert.iter().map(|&t| (t, f64::INFINITY)).collect();
        return GrowthVerdict::failed(Threshold::Global, f64::INFINITY, cert, diag);
    }
    if let super::Kind::Power { p, .. } = a.kind() {
        let c = 2f64.powf(*p);
        let threshold = if near_infinity { Threshold::From(1.0) } else { Threshold::Global };
        let diag = vec![(1.0, c)];
        return GrowthVerdict { holds: true, threshold_t0: threshold, witness_constant: c, failure_certificate: vec![], diagnostic: diag };
    }
    let analytic = a.index_at_infinity().map(|(_, u)| u);
    let analytic_zero = a.index_at_zero().map(|(_, u)| u);
    let starts: Vec<f64> = if near_infinity { NEAR_INFINITY_THRESHOLDS.to_vec() } else { vec![GLOBAL_START] };
    let mut last_samples = Vec::new();
    for &t0 in &starts {
        let samples = doubling_samples(a, t0, POINTS_PER_DECADE);
        if samples.is_empty() {
            continue;
        }
        let s = sup(&samples);
        let (holds, diverging) = match analytic {
            Some(u) => {
                let ok = u.is_finite() && s.is_finite() && (near_infinity || analytic_zero.is_some_and(|z| z.is_finite()));
                (ok, !u.is_finite())
            }
            None => {
                let g: Vec<(f64, f64)> = samples.iter().map(|&(t, r)| (t, r.log2())).collect();
                let g_end = g.last().unwrap().1;
                let diverging = !g_end.is_finite()
                    || trend_exponent(&g) > TREND_LIMIT
                    || (power_trend_exponent(&g) > TREND_LIMIT && g_end > 8.0);
                let fine = doubling_samples(a, t0, 2.0 * POINTS_PER_DECADE);
                (!diverging && s.is_finite() && drift(s, sup(&fine)) < STABILITY_DRIFT, diverging)
            }
        };
        if holds {
            let mut c = s;
            if let Some(u) = analytic {
                c = c.max(2f64.powf(u));
            }
            if let (false, Some(z)) = (near_infinity, analytic_zero) {
                c = c.max(2f64.powf(z));
            }
            let threshold = if near_infinity { Threshold::From(t0) } else { Threshold::Global };
            return GrowthVerdict {
                holds: true,
                threshold_t0: threshold,
                witness_constant: c * (1.0 + 1e-12),
                failure_certificate: vec![],
                diagnostic: thin(&samples, 64),
            };
        }
        last_samples = samples;
        if diverging {
            break;
        }
    }
    let cert = record_highs(&last_samples, 8);
    let threshold = if near_infinity { Threshold::From(*starts.last().unwrap()) } else { Threshold::Global };
    GrowthVerdict::failed(threshold, f64::INFINITY, cert, thin(&last_samples, 64))
}

/// `A(2t) >= C A(t)` with some `C > 2`, for `t >= t0` or globally.
pub fn check_nabla2(a: &YoungFunction, near_infinity: bool) -> GrowthVerdict {
    if let super::Kind::Indicator { .. } = a.kind() {
        return GrowthVerdict { holds: true, threshold_t0: Threshold::Global, witness_constant: 4.0, failure_certificate: vec![], diagnostic: vec![] };
    }
    if let super::Kind::Power { p, .. } = a.kind() {
        let c = 2f64.powf(*p);
        let threshold = if near_infinity { Threshold::From(1.0) } else { Threshold::Global };
        if *p > 1.0 {
            return GrowthVerdict { holds: true, threshold_t0: threshold, witness_constant: c, failure_certificate: vec![], diagnostic: vec![(1.0, c)] };
        }
        let cert = vec![1.0, 10.0, 100.0, 1000.0];
        let diag = cert.iter().map(|&t| (t, 2.0)).collect();
        return GrowthVerdict::failed(threshold, 2.0, cert, diag);
    }
    if let Some(t_inf) = a.infinity_threshold() {
        if near_infinity {
            return GrowthVerdict {
                holds: true,
                threshold_t0: Threshold::From(t_inf / 2.0),
                witness_constant: 4.0,
                failure_certificate: vec![],
                diagnostic: vec![(t_inf, f64::INFINITY)],
            };
        }
    }
    let analytic = a.index_at_infinity().map(|(l, _)| l);
    let analytic_zero = a.index_at_zero().map(|(l, _)| l);
    let starts: Vec<f64> = if near_infinity { NEAR_INFINITY_THRESHOLDS.to_vec() } else { vec![GLOBAL_START] };
    let mut last_samples = Vec::new();
    for &t0 in &starts {
        let mut samples = doubling_samples(a, t0, POINTS_PER_DECADE);
        if let (Some(t_inf), false) = (a.infinity_threshold(), near_infinity) {
            samples.retain(|&(t, _)| t < t_inf / 2.0);
        }
        if samples.is_empty() {
            continue;
        }
        let m = inf(&samples);
        let (holds, decaying) = match analytic {
            Some(l) => (l > 1.0 && m > 2.0 && (near_infinity || analytic_zero.is_some_and(|z| z > 1.0)), l <= 1.0),
            None => {
                let e: Vec<(f64, f64)> = samples.iter().map(|&(t, r)| (t, r.log2() - 1.0)).collect();
                let min_excess = inf(&e);
                let e_end = e.last().unwrap().1;
                let lam_end = e.last().unwrap().0.ln();
                let lam_a = e[0].0.ln().max(1.0);
                let lam_b = (lam_a * lam_end).sqrt();
                let e_mid = e.iter().find(|(t, _)| t.ln() >= lam_b).map(|p| p.1).unwrap_or(e_end);
                let decaying = e_end / e_mid < 0.75 && e_end < 0.25;
                let fine = doubling_samples(a, t0, 2.0 * POINTS_PER_DECADE);
                (min_excess >= 0.005 && !decaying && drift(m, inf(&fine)) < STABILITY_DRIFT, decaying)
            }
        };
        if holds {
            let threshold = if near_infinity { Threshold::From(t0) } else { Threshold::Global };
            return GrowthVerdict {
                holds: true,
                threshold_t0: threshold,
                witness_constant: m * (1.0 - 1e-12),
                failure_certificate: vec![],
                diagnostic: thin(&samples, 64),
            };
        }
        last_samples = samples;
        if decaying {
            break;
        }
    }
    let cert = tail_points(&last_samples, 8);
    let threshold = if near_infinity { Threshold::From(*starts.last().unwrap()) } else { Threshold::Global };
    let c = inf(&last_samples).min(2.0);
    GrowthVerdict::failed(threshold, c, cert, thin(&last_samples, 64))
}

/// Samples of `q(t) = A_lower^{-1}(B(t)) / t`, the least admissible `C` at `t`.
fn dominance_samples(a: &YoungFunction, b: &YoungFunction, lo: f64, per_decade: f64) -> Vec<(f64, f64)> {
    let hi = a.reliable_limit().min(b.reliable_limit()).min(SCAN_CEILING);
    let mut out = Vec::new();
    for t in log_grid(lo, hi.max(lo), per_decade) {
        let bt = b.eval(t);
        if !(bt <= SCAN_CEILING) {
            if bt.is_infinite() && a.eval(hi) < f64::INFINITY {
                out.push((t, f64::INFINITY));
            }
            break;
        }
        out.push((t, a.lower_inverse(bt) / t));
    }
    out
}

/// `B(t) <= A(C t)` for `t >= t0` (or all `t`), `C` reported as a power of two.
pub fn dominates(a: &YoungFunction, b: &YoungFunction, near_infinity: bool) -> GrowthVerdict {
    let starts: Vec<f64> = if near_infinity { NEAR_INFINITY_THRESHOLDS.to_vec() } else { vec![GLOBAL_START] };
    let mut last_samples = Vec::new();
    for &t0 in &starts {
        let samples = dominance_samples(a, b, t0, POINTS_PER_DECADE);
        if samples.is_empty() {
            continue;
        }
        let s = sup(&samples);
        let fine = dominance_samples(a, b, t0, 2.0 * POINTS_PER_DECADE);
        let diverging = !samples.last().unwrap().1.is_finite() || trend_exponent(&samples) > TREND_LIMIT;
        let holds = !diverging && s <= 1024.0 && drift(s, sup(&fine)) < STABILITY_DRIFT;
        if holds {
            let c = power_of_two_above(s.max(sup(&fine)));
            let threshold = if near_infinity { Threshold::From(t0) } else { Threshold::Global };
            return GrowthVerdict { holds: true, threshold_t0: threshold, witness_constant: c, failure_certificate: vec![], diagnostic: thin(&samples, 64) };
        }
        last_samples = samples;
        if diverging {
            break;
        }
    }
    let threshold = if near_infinity { Threshold::From(*starts.last().unwrap()) } else { Threshold::Global };
    GrowthVerdict::failed(threshold, f64::INFINITY, record_highs(&last_samples, 8), thin(&last_samples, 64))
}

/// Dominance both ways.
pub fn equivalent(a: &YoungFunction, b: &YoungFunction, near_infinity: bool) -> (GrowthVerdict, GrowthVerdict) {
    (dominates(a, b, near_infinity), dominates(b, a, near_infinity))
}

/// Smallest `2^k >= x` with `k` in `[-10, 10]`; `+∞` beyond.
pub(crate) fn power_of_two_above(x: f64) -> f64 {
    for k in -10..=10 {
        let c = 2f64.powi(k);
        if c >= x * (1.0 + 1e-12) {
            return c;
        }
    }
    f64::INFINITY
}
