//! The balance conditions between a pair of Young functions `(A, B)`:
//!
//! ```text
//! t ∫_{t0}^t B(s)/s² ds <= A(c t)        (first condition)
//! t ∫_{t0}^t Ã(s)/s² ds <= B̃(c t)        (second condition)
//! ```
//!
//! For each threshold the least admissible constant at `t` is
//! `q(t) = A_lower^{-1}(LHS(t)) / t`; a condition holds when `q` stays bounded,
//! shows no logarithmic drift, and its supremum survives grid refinement.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::young::catalog::{self, ExamplePair, EXAMPLE_PAIRS};
use crate::young::growth::{drift, log_grid, power_of_two_above, record_highs, sup, thin, trend_exponent, TREND_LIMIT};
use crate::young::{GrowthVerdict, Threshold, YoungFunction};

pub const THRESHOLDS: [f64; 5] = [0.0, 1.0, 10.0, 100.0, 1000.0];
pub const C_MIN: f64 = 1.0 / 1024.0;
pub const C_MAX: f64 = 1024.0;
pub const POINTS_PER_DECADE: f64 = 8.0;
const ZERO_START: f64 = 1e-12;
const LHS_CEILING: f64 = 1e290;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceReport {
    pub cond_1_1: GrowthVerdict,
    pub cond_1_2: GrowthVerdict,
    /// Common constant when both conditions hold, `+∞` otherwise.
    pub witness_c: f64,
    pub threshold_t0: f64,
}

impl BalanceReport {
    pub fn holds(&self) -> bool {
        self.cond_1_1.holds && self.cond_1_2.holds
    }
}

/// `t ∫_{t0}^t B(s)/s² ds`.
pub fn lhs_integral(b: &YoungFunction, t0: f64, t: f64) -> Result<f64> {
    if !(t0 >= 0.0) || !(t >= t0) {
        return Err(Error::Domain(format!("need 0 <= t0 <= t, got t0 = {t0}, t = {t}")));
    }
    Ok(t * b.integral_over_square(t0, t))
}

/// `(t, q(t), LHS(t))` samples for one threshold.
fn samples(a: &YoungFunction, b: &YoungFunction, t0: f64, per_decade: f64) -> Vec<(f64, f64, f64)> {
    let start = if t0 == 0.0 { ZERO_START } else { t0 };
    let hi = a.reliable_limit().min(b.reliable_limit()).min(1e300);
    let a_ceiling = if a.reliable_limit() < f64::MAX { a.eval(a.reliable_limit()) } else { f64::INFINITY };
    let mut out = Vec::new();
    let mut integral = if t0 == 0.0 { b.integral_over_square(0.0, start) } else { 0.0 };
    let mut prev = start;
    for t in log_grid(start, hi.max(start), per_decade) {
        if !(b.eval(t) <= LHS_CEILING) && b.eval(prev) > 0.0 {
            break;
        }
        integral += b.integral_over_square(prev, t);
        prev = t;
        let lhs = t * integral;
        if lhs.is_infinite() || lhs.is_nan() {
            // an infinite left side is admissible where A is infinite too
            match a.infinity_threshold() {
                Some(ta) if lhs.is_infinite() => {
                    out.push((t, ta / t, f64::INFINITY));
                    continue;
                }
                _ => {
                    out.push((t, f64::INFINITY, f64::INFINITY));
                    break;
                }
            }
        }
        if lhs > LHS_CEILING || lhs > a_ceiling {
            break;
        }
        out.push((t, a.lower_inverse(lhs) / t, lhs));
    }
    out
}

/// Tests `t ∫_{t0}^t B/s² <= A(c t)` over the threshold grid (only `t0 = 0` when `global`).
pub fn check_condition(a: &YoungFunction, b: &YoungFunction, global: bool) -> GrowthVerdict {
    let starts: &[f64] = if global { &THRESHOLDS[..1] } else { &THRESHOLDS };
    let mut last: Vec<(f64, f64, f64)> = Vec::new();
    for &t0 in starts {
        let coarse = samples(a, b, t0, POINTS_PER_DECADE);
        if coarse.is_empty() {
            continue;
        }
        let q: Vec<(f64, f64)> = coarse.iter().map(|s| (s.0, s.1)).collect();
        let s = sup(&q);
        let diverging = trend_exponent(&q) > TREND_LIMIT;
        let holds = !diverging && s.is_finite() && s <= C_MAX && {
            let fine = samples(a, b, t0, 2.0 * POINTS_PER_DECADE);
            let qf: Vec<(f64, f64)> = fine.iter().map(|s| (s.0, s.1)).collect();
            let sf = sup(&qf);
            let same_constant = power_of_two_above(sf) == power_of_two_above(s);
            (same_constant || drift(s, sf) < crate::young::growth::STABILITY_DRIFT) && sf <= C_MAX
        };
        if holds {
            let fine = samples(a, b, t0, 2.0 * POINTS_PER_DECADE);
            let sf = fine.iter().map(|s| s.1).fold(s, f64::max);
            let c = power_of_two_above(sf).max(C_MIN);
            let threshold = if t0 == 0.0 { Threshold::Global } else { Threshold::From(t0) };
            return GrowthVerdict { holds: true, threshold_t0: threshold, witness_constant: c, failure_certificate: vec![], diagnostic: thin(&q, 64) };
        }
        last = coarse;
        if diverging {
            break;
        }
    }
    failure(a, &last, starts)
}

fn failure(a: &YoungFunction, last: &[(f64, f64, f64)], starts: &[f64]) -> GrowthVerdict {
    let q: Vec<(f64, f64)> = last.iter().map(|s| (s.0, s.1)).collect();
    let mut cert: Vec<f64> = record_highs(&q, 8);
    if cert.is_empty() {
        cert = last.iter().map(|s| s.0).collect();
    }
    // divergence diagnostic: LHS(t) / A(c t) at the largest searched c
    let diag: Vec<(f64, f64)> = last.iter().map(|&(t, _, lhs)| (t, lhs / a.eval(C_MAX * t))).collect();
    let t0 = last.first().map(|s| s.0).unwrap_or(*starts.last().unwrap());
    let threshold = if t0 <= ZERO_START { Threshold::Global } else { Threshold::From(t0) };
    GrowthVerdict { holds: false, threshold_t0: threshold, witness_constant: f64::INFINITY, failure_certificate: cert, diagnostic: thin(&diag, 64) }
}

/// Both conditions; the second runs on the conjugates computed by [`YoungFunction::conjugate`].
pub fn check_balance(a: &YoungFunction, b: &YoungFunction) -> BalanceReport {
    check_balance_mode(a, b, false)
}

pub fn check_balance_mode(a: &YoungFunction, b: &YoungFunction, global: bool) -> BalanceReport {
    let (cond_1_1, cond_1_2) = rayon::join(
        || check_condition(a, b, global),
        || {
            let (ac, bc) = rayon::join(|| a.conjugate(), || b.conjugate());
            check_condition(&bc, &ac, global)
        },
    );
    let both = cond_1_1.holds && cond_1_2.holds;
    let witness_c = if both { cond_1_1.witness_constant.max(cond_1_2.witness_constant) } else { f64::INFINITY };
    let threshold_t0 = if both { cond_1_1.threshold_t0.value().max(cond_1_2.threshold_t0.value()) } else { f64::NAN };
    BalanceReport { cond_1_1, cond_1_2, witness_c, threshold_t0 }
}

/// One report per shipped example pair, in catalog order.
pub fn classify_catalog_pairs() -> Vec<(ExamplePair, BalanceReport)> {
    EXAMPLE_PAIRS
        .par_iter()
        .map(|pair| {
            let a = catalog::lookup(pair.a).expect("example pair uses catalog names");
            let b = catalog::lookup(pair.b).expect("example pair uses catalog names");
            (*pair, check_balance(&a, &b))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lhs_closed_forms() {
        let sq = YoungFunction::power(2.0);
        assert!((lhs_integral(&sq, 0.0, 4.0).unwrap() - 16.0).abs() < 1e-12);
        let lin = YoungFunction::power(1.0);
        let e = std::f64::consts::E;
        assert!((lhs_integral(&lin, 1.0, e).unwrap() - e).abs() < 1e-12);
        assert!(lhs_integral(&lin, 2.0, 1.0).is_err());
    }

    #[test]
    fn lhs_linear_log_against_midpoint_rule() {
        let b = YoungFunction::linear_log();
        let n = 1_000_000;
        let h = 9.0 / n as f64;
        let mid: f64 = (0..n)
            .map(|i| {
                let s = 1.0 + (i as f64 + 0.5) * h;
                s.ln_1p() / s
            })
            .sum::<f64>()
            * h
            * 10.0;
        let got = lhs_integral(&b, 1.0, 10.0).unwrap();
        assert!((got - mid).abs() <= 1e-6 * mid, "{got} vs {mid}");
    }

    #[test]
    fn square_pair_holds_globally() {
        let sq = YoungFunction::power(2.0);
        let r = check_balance_mode(&sq, &sq, true);
        assert!(r.holds());
        assert_eq!(r.threshold_t0, 0.0);
    }

    #[test]
    fn linear_log_pair_fails_first_condition() {
        let a = YoungFunction::linear_log();
        let r = check_balance(&a, &a);
        assert!(!r.cond_1_1.holds && !r.cond_1_1.failure_certificate.is_empty());
        assert!(r.cond_1_2.holds);
    }

    #[test]
    fn exponential_pair_fails_second_condition() {
        let a = YoungFunction::exp_power(1.0).unwrap();
        let r = check_balance(&a, &a);
        assert!(r.cond_1_1.holds);
        assert!(!r.cond_1_2.holds);
    }
}
