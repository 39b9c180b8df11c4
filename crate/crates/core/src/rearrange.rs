//! Step functions on finite measure spaces, decreasing rearrangements and
//! Luxemburg norms.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::pairwise_sum;
use crate::young::YoungFunction;

/// Relative width of the final Luxemburg bracket.
pub const LUXEMBURG_TOL: f64 = 1e-10;
const PAR_THRESHOLD: usize = 1 << 14;

/// A step function: `values[i]` on a cell of measure `weights[i]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFunction {
    pub values: Vec<f64>,
    pub weights: Vec<f64>,
    pub total_measure: f64,
}

impl SampledFunction {
    pub fn new(values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() {
            return Err(Error::Domain(format!("{} values but {} weights", values.len(), weights.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::Domain(format!("cell weight {w} is not positive")));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN value".into()));
        }
        let total_measure = pairwise_sum(&weights);
        Ok(Self { values, weights, total_measure })
    }

    /// `n` equal cells covering a set of the given measure.
    pub fn uniform(values: Vec<f64>, measure: f64) -> Result<Self> {
        let n = values.len().max(1) as f64;
        let w = vec![measure / n; values.len()];
        let mut f = Self::new(values, w)?;
        f.total_measure = measure;
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Same cells, new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        if values.len() != self.len() {
            return Err(Error::Domain("value count does not match the cells".into()));
        }
        Ok(Self { values, weights: self.weights.clone(), total_measure: self.total_measure })
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `|{x : |u(x)| > t}|`.
    pub fn distribution(&self, t: f64) -> f64 {
        let picked: Vec<f64> = self.values.iter().zip(&self.weights).filter(|(v, _)| v.abs() > t).map(|(_, w)| *w).collect();
        pairwise_sum(&picked)
    }

    /// Left end of each cell when the cells are laid out in order on `(0, |Ω|)`.
    pub fn cell_starts(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.weights
            .iter()
            .map(|w| {
                let s = acc;
                acc += w;
                s
            })
            .collect()
    }

    /// Value of the step function at `s ∈ (0, |Ω|)`, cells laid out in order (right-continuous).
    pub fn value_at(&self, s: f64) -> f64 {
        let mut acc = 0.0;
        for (v, w) in self.values.iter().zip(&self.weights) {
            acc += w;
            if s < acc {
                return *v;
            }
        }
        0.0
    }

    pub fn integral(&self) -> f64 {
        self.terms(|v, w| v * w)
    }

    fn terms<F: Fn(f64, f64) -> f64 + Sync>(&self, f: F) -> f64 {
        let t: Vec<f64> = if self.len() >= PAR_THRESHOLD {
            self.values.par_iter().zip(self.weights.par_iter()).map(|(v, w)| f(*v, *w)).collect()
        } else {
            self.values.iter().zip(&self.weights).map(|(v, w)| f(*v, *w)).collect()
        };
        pairwise_sum(&t)
    }
}

/// Decreasing rearrangement `u*` on `(0, |Ω|)`: absolute values sorted in
/// decreasing order, weights carried along, ties kept in index order.
pub fn rearrangement(u: &SampledFunction) -> SampledFunction {
    let mut idx: Vec<usize> = (0..u.len()).collect();
    idx.sort_by(|&i, &j| u.values[j].abs().total_cmp(&u.values[i].abs()));
    SampledFunction {
        values: idx.iter().map(|&i| u.values[i].abs()).collect(),
        weights: idx.iter().map(|&i| u.weights[i]).collect(),
        total_measure: u.total_measure,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuxemburgNorm {
    pub value: f64,
    pub lambda_bracket: (f64, f64),
}

/// `Σ wᵢ A(|uᵢ|/λ)`.
pub fn modular(a: &YoungFunction, u: &SampledFunction, lambda: f64) -> f64 {
    u.terms(|v, w| if v == 0.0 { 0.0 } else { w * a.eval(v.abs() / lambda) })
}

/// `inf{λ > 0 : Σ wᵢ A(|uᵢ|/λ) <= 1}`.
pub fn luxemburg(a: &YoungFunction, u: &SampledFunction) -> LuxemburgNorm {
    let m = u.max_abs();
    if m == 0.0 || u.is_empty() {
        return LuxemburgNorm { value: 0.0, lambda_bracket: (0.0, 0.0) };
    }
    let wmin = u.weights.iter().cloned().fold(f64::INFINITY, f64::min);
    // below lo some single cell already carries modular > 1
    let mut lo = m / a.inverse(1.0 / wmin);
    let mut hi = m / a.inverse(1.0 / u.total_measure);
    if !(lo > 0.0) || !lo.is_finite() {
        lo = m * 1e-12;
    }
    if !hi.is_finite() || hi < lo {
        hi = lo;
    }
    if modular(a, u, lo) <= 1.0 {
        return LuxemburgNorm { value: lo, lambda_bracket: (lo, lo) };
    }
    while modular(a, u, hi) > 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > LUXEMBURG_TOL * hi {
        let mid = 0.5 * (lo + hi);
        if modular(a, u, mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    LuxemburgNorm { value: hi, lambda_bracket: (lo, hi) }
}

/// `∫ u v / (‖u‖_A ‖v‖_Ã)`, at most 2 by the Hölder inequality in Orlicz spaces.
pub fn holder_check(a: &YoungFunction, u: &SampledFunction, v: &SampledFunction) -> Result<f64> {
    if u.weights != v.weights {
        return Err(Error::Domain("u and v live on different cells".into()));
    }
    let nu = luxemburg(a, u).value;
    let nv = luxemburg(&a.conjugate(), v).value;
    let den = nu * nv;
    if !(den > 0.0) || !den.is_finite() {
        return Err(Error::Degenerate(format!("norm product {den}")));
    }
    let uv = u.with_values(u.values.iter().zip(&v.values).map(|(x, y)| x * y).collect())?;
    Ok(uv.integral() / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ones(n: usize) -> Vec<f64> {
        vec![1.0; n]
    }

    #[test]
    fn sorts_by_absolute_value() {
        let u = SampledFunction::new(vec![1.0, 3.0, 2.0], ones(3)).unwrap();
        let r = rearrangement(&u);
        assert_eq!(r.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(r.weights, ones(3));
        let c = SampledFunction::new(vec![4.0; 5], ones(5)).unwrap();
        assert_eq!(rearrangement(&c), c);
    }

    #[test]
    fn distribution_functions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 10_000;
        let vals: Vec<f64> = (0..n).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
        let u = SampledFunction::new(vals, w).unwrap();
        let r = rearrangement(&u);
        for k in 0..50 {
            let t = k as f64 * 0.1;
            let brute: f64 = u.values.iter().zip(&u.weights).filter(|(v, _)| v.abs() > t).map(|(_, w)| w).sum();
            assert!((r.distribution(t) - brute).abs() <= 1e-9 * u.total_measure);
        }
        assert!(r.values.windows(2).all(|p| p[0] >= p[1]));
    }

    #[test]
    fn constant_in_l2() {
        let u = SampledFunction::uniform(vec![3.0; 10], 1.0).unwrap();
        let n = luxemburg(&YoungFunction::power(2.0), &u);
        assert!((n.value - 3.0).abs() <= 1e-9);
        let m = modular(&YoungFunction::power(2.0), &u, n.value);
        assert!(m <= 1.0 && m >= 1.0 - 1e-9);
    }

    #[test]
    fn indicator_gives_the_sup() {
        let u = SampledFunction::new(vec![1.0, -7.0, 2.0], vec![0.5, 0.25, 0.25]).unwrap();
        assert_eq!(luxemburg(&YoungFunction::indicator(1.0).unwrap(), &u).value, 7.0);
    }

    #[test]
    fn zero_function_has_zero_norm() {
        let u = SampledFunction::uniform(vec![0.0; 4], 2.0).unwrap();
        assert_eq!(luxemburg(&YoungFunction::linear_log(), &u).value, 0.0);
    }

    #[test]
    fn holder_on_squares() {
        let u = SampledFunction::uniform(vec![1.0, 2.0, 3.0, 0.5], 1.0).unwrap();
        // the conjugate of t² is t²/4, so the ratio is 2 for u = v
        let r = holder_check(&YoungFunction::power(2.0), &u, &u).unwrap();
        assert!((r - 2.0).abs() < 1e-8, "{r}");
        let zero = u.with_values(vec![0.0; 4]).unwrap();
        assert!(holder_check(&YoungFunction::power(2.0), &u, &zero).is_err());
    }

    #[test]
    fn rejects_bad_cells() {
        assert!(SampledFunction::new(vec![1.0], vec![0.0]).is_err());
        assert!(SampledFunction::new(vec![1.0, 2.0], vec![1.0]).is_err());
    }
}
