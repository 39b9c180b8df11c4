//! The averaging operator `Hf(s) = (1/s)∫_0^s f` and its dual
//! `H*f(s) = ∫_s^L f(r)/r dr` on step functions over `(0, L)`, together with an
//! empirical search for the worst ratio `‖Tf‖_B / ‖f‖_A`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::balance::{check_balance, BalanceReport};
use crate::error::{Error, Result};
use crate::rearrange::{luxemburg, SampledFunction};
use crate::young::YoungFunction;

pub const TRIAL_FAMILY_VERSION: &str = "1";
pub const POWER_SPIKES: usize = 16;
pub const LOG_SPIKES: usize = 8;
pub const DEFAULT_RANDOM_TRIALS: usize = 64;
pub const DEFAULT_PER_DECADE: usize = 16;
/// Decades resolved below `L` by the graded grid.
pub const DECADES: usize = 12;
pub const SEED: u64 = 0x4841_5244;
/// Relative change of the worst ratio accepted under grid refinement.
pub const REFINEMENT_DRIFT: f64 = 0.05;
/// Exponent of `ratio ~ log(1/δ)^γ` above which the spike sweep counts as growing.
pub const GROWTH_LIMIT: f64 = 0.3;

/// Cell widths of `(0, L)`: one cell `(0, L·10^-decades)` then `per_decade`
/// geometric cells per decade.
pub fn graded_cells(l: f64, per_decade: usize, decades: usize) -> Vec<f64> {
    let n = per_decade * decades;
    let node = |k: usize| l * 10f64.powf(-((n - k) as f64) / per_decade as f64);
    let mut w = vec![node(0)];
    w.extend((0..n).map(|k| if k + 1 == n { l - node(k) } else { node(k + 1) - node(k) }));
    w
}

fn midpoints(f: &SampledFunction) -> Vec<f64> {
    f.cell_starts().iter().zip(&f.weights).map(|(s, w)| s + 0.5 * w).collect()
}

/// `(1/s)∫_0^s f` at the cell midpoints.
pub fn averaging_operator(f: &SampledFunction) -> SampledFunction {
    let mut prefix = 0.0;
    let mut start = 0.0;
    let mut out = Vec::with_capacity(f.len());
    for (v, w) in f.values.iter().zip(&f.weights) {
        let m = start + 0.5 * w;
        out.push((prefix + v * 0.5 * w) / m);
        prefix += v * w;
        start += w;
    }
    SampledFunction { values: out, weights: f.weights.clone(), total_measure: f.total_measure }
}

/// `∫_s^L f(r)/r dr` at the cell midpoints.
pub fn dual_operator(f: &SampledFunction) -> SampledFunction {
    let starts = f.cell_starts();
    let n = f.len();
    let mut out = vec![0.0; n];
    let mut suffix = 0.0;
    for i in (0..n).rev() {
        let (s, w, v) = (starts[i], f.weights[i], f.values[i]);
        let m = s + 0.5 * w;
        out[i] = suffix + v * ((s + w) / m).ln();
        if s > 0.0 {
            suffix += v * ((s + w) / s).ln();
        } else {
            suffix = f64::INFINITY * v.signum();
        }
    }
    SampledFunction { values: out, weights: f.weights.clone(), total_measure: f.total_measure }
}

/// `Hf(s)` at an arbitrary `s ∈ (0, L]`.
pub fn averaging_at(f: &SampledFunction, s: f64) -> f64 {
    let mut acc = 0.0;
    let mut start = 0.0;
    for (v, w) in f.values.iter().zip(&f.weights) {
        if s <= start + w {
            return (acc + v * (s - start)) / s;
        }
        acc += v * w;
        start += w;
    }
    acc / s
}

/// `H*f(s)` at an arbitrary `s ∈ (0, L]`.
pub fn dual_at(f: &SampledFunction, s: f64) -> f64 {
    let mut acc = 0.0;
    let mut start = 0.0;
    for (v, w) in f.values.iter().zip(&f.weights) {
        let end = start + w;
        if end > s && *v != 0.0 {
            acc += v * (end / start.max(s)).ln();
        }
        start = end;
    }
    acc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyTrial {
    pub label: String,
    pub f: SampledFunction,
    #[serde(rename = "L")]
    pub l: f64,
    pub ratio_avg: f64,
    pub ratio_dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub delta: f64,
    pub ratio_avg: f64,
    pub ratio_dual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardyReport {
    pub worst_avg: HardyTrial,
    pub worst_dual: HardyTrial,
    /// Worst ratios on the grid with twice as many cells per decade.
    pub refined_avg: f64,
    pub refined_dual: f64,
    pub stable: bool,
    pub sweep: Vec<SweepPoint>,
    pub growth_avg: f64,
    pub growth_dual: f64,
    pub balance_holds: bool,
    /// Every trial as `(label, ratio_avg, ratio_dual)`.
    pub ratios: Vec<(String, f64, f64)>,
}

impl HardyReport {
    pub fn bounded(&self) -> bool {
        self.stable && self.growth_avg <= GROWTH_LIMIT && self.growth_dual <= GROWTH_LIMIT
    }
}

/// A trial profile in relative coordinates `x = s/L ∈ (0, 1)`.
#[derive(Debug, Clone)]
enum Profile {
    Steps { breaks: Vec<f64>, values: Vec<f64> },
    Power { theta: f64 },
    Log { k: f64 },
    Level { height: f64, x: f64 },
}

impl Profile {
    fn at(&self, x: f64) -> f64 {
        match self {
            Profile::Steps { breaks, values } => values[breaks.partition_point(|b| *b <= x)],
            Profile::Power { theta } => x.powf(-theta),
            Profile::Log { k } => (1.0 - x.ln()).powf(*k),
            Profile::Level { height, x: edge } => {
                if x < *edge {
                    *height
                } else {
                    0.0
                }
            }
        }
    }

    fn label(&self, i: usize) -> String {
        match self {
            Profile::Steps { .. } => format!("random-{i}"),
            Profile::Power { theta } => format!("power-{theta:.4}"),
            Profile::Log { k } => format!("log-{k:.3}"),
            Profile::Level { height, x } => format!("level-{height:.4e}-{x:.3e}"),
        }
    }
}

fn trial_family(a: &YoungFunction, random: usize, certificate_levels: &[f64]) -> Vec<Profile> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut out = Vec::new();
    for _ in 0..random {
        let k = rng.gen_range(1..12);
        let mut breaks: Vec<f64> = (0..k).map(|_| 10f64.powf(-rng.gen_range(0.0..DECADES as f64 - 1.0))).collect();
        breaks.sort_by(f64::total_cmp);
        let mut values: Vec<f64> = (0..=k).map(|_| rng.gen_range(0.0..10.0)).collect();
        if rng.gen_bool(0.5) {
            values.sort_by(|x, y| y.total_cmp(x));
        }
        out.push(Profile::Steps { breaks, values });
    }
    for i in 0..POWER_SPIKES {
        // the last exponents sit close to the critical 1/p of the power case
        out.push(Profile::Power { theta: 0.95 * (i + 1) as f64 / POWER_SPIKES as f64 });
    }
    for i in 0..LOG_SPIKES {
        out.push(Profile::Log { k: 0.5 * (i + 1) as f64 });
    }
    for &t in certificate_levels {
        let m = a.eval(t);
        if !(m > 1.0) || !m.is_finite() {
            continue;
        }
        let x = 1.0 / m;
        if x > 10f64.powi(-(DECADES as i32) + 1) {
            out.push(Profile::Level { height: t, x });
        }
    }
    out
}

fn sample(profile: &Profile, l: f64, per_decade: usize) -> SampledFunction {
    let w = graded_cells(l, per_decade, DECADES);
    let mut f = SampledFunction { values: vec![0.0; w.len()], weights: w, total_measure: l };
    let mids = midpoints(&f);
    f.values = mids.iter().map(|m| profile.at(m / l)).collect();
    f
}

fn ratios(a: &YoungFunction, b: &YoungFunction, f: &SampledFunction) -> (f64, f64) {
    let nf = luxemburg(a, f).value;
    if !(nf > 0.0) {
        return (0.0, 0.0);
    }
    (luxemburg(b, &averaging_operator(f)).value / nf, luxemburg(b, &dual_operator(f)).value / nf)
}

fn worst_over(a: &YoungFunction, b: &YoungFunction, l: f64, family: &[Profile], per_decade: usize) -> Vec<HardyTrial> {
    family
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let f = sample(p, l, per_decade);
            let (ratio_avg, ratio_dual) = ratios(a, b, &f);
            HardyTrial { label: p.label(i), f, l, ratio_avg, ratio_dual }
        })
        .collect()
}

/// Ratios along the normalized spike family `A⁻¹(1/δ)·χ_(0,δ)`.
pub fn spike_sweep(a: &YoungFunction, b: &YoungFunction, l: f64) -> Vec<SweepPoint> {
    (1..DECADES - 1)
        .into_par_iter()
        .map(|k| {
            let delta = l * 10f64.powi(-(k as i32));
            let p = Profile::Level { height: a.inverse(1.0 / delta).min(1e150), x: delta / l };
            let f = sample(&p, l, DEFAULT_PER_DECADE);
            let (ratio_avg, ratio_dual) = ratios(a, b, &f);
            SweepPoint { delta, ratio_avg, ratio_dual }
        })
        .collect()
}

/// Exponent `γ` of `ratio ≈ log(L/δ)^γ` between the middle and the end of the sweep.
pub fn growth_exponent(sweep: &[(f64, f64)], l: f64) -> f64 {
    if sweep.len() < 4 {
        return 0.0;
    }
    let (dm, rm) = sweep[sweep.len() / 2];
    let (de, re) = sweep[sweep.len() - 1];
    if !re.is_finite() {
        return f64::INFINITY;
    }
    if !(rm > 0.0 && re > 0.0) {
        return 0.0;
    }
    let (lm, le) = (1.0 + (l / dm).ln(), 1.0 + (l / de).ln());
    ((re / rm).ln() / (le / lm).ln()).max(0.0)
}

/// Worst trial ratios for both operators on `(0, L)`.
pub fn verify_hardy(a: &YoungFunction, b: &YoungFunction, l: f64, trials: usize) -> Result<HardyReport> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(Error::Domain(format!("interval length {l} must be positive")));
    }
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    let balance = check_balance(a, b);
    Ok(verify_with_balance(a, b, l, trials, &balance))
}

pub fn verify_with_balance(a: &YoungFunction, b: &YoungFunction, l: f64, trials: usize, balance: &BalanceReport) -> HardyReport {
    let mut levels = balance.cond_1_1.failure_certificate.clone();
    levels.extend(&balance.cond_1_2.failure_certificate);
    let family = trial_family(a, trials, &levels);
    let coarse = worst_over(a, b, l, &family, DEFAULT_PER_DECADE);
    let fine = worst_over(a, b, l, &family, 2 * DEFAULT_PER_DECADE);
    let pick = |v: &[HardyTrial], key: fn(&HardyTrial) -> f64| v.iter().max_by(|x, y| key(x).total_cmp(&key(y))).cloned().unwrap();
    let worst_avg = pick(&coarse, |t| t.ratio_avg);
    let worst_dual = pick(&coarse, |t| t.ratio_dual);
    let refined_avg = fine.iter().map(|t| t.ratio_avg).fold(0.0, f64::max);
    let refined_dual = fine.iter().map(|t| t.ratio_dual).fold(0.0, f64::max);
    let close = |x: f64, y: f64| x.is_finite() && y.is_finite() && (x - y).abs() <= REFINEMENT_DRIFT * x.max(y);
    let stable = close(worst_avg.ratio_avg, refined_avg) && close(worst_dual.ratio_dual, refined_dual);
    let sweep = spike_sweep(a, b, l);
    let growth_avg = growth_exponent(&sweep.iter().map(|p| (p.delta, p.ratio_avg)).collect::<Vec<_>>(), l);
    let growth_dual = growth_exponent(&sweep.iter().map(|p| (p.delta, p.ratio_dual)).collect::<Vec<_>>(), l);
    let ratios = coarse.iter().map(|t| (t.label.clone(), t.ratio_avg, t.ratio_dual)).collect();
    HardyReport { worst_avg, worst_dual, refined_avg, refined_dual, stable, sweep, growth_avg, growth_dual, balance_holds: balance.holds(), ratios }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionCheck {
    pub holds: bool,
    /// `‖Hψ + H*ψ‖_B / ‖ψ‖_A`.
    pub ratio: f64,
    pub balance_holds: bool,
}

/// Compares `‖Hψ* + H*ψ*‖_B` with `‖ψ‖_A` for a decreasing `ψ >= 0` on `(0, L)`.
pub fn rearrangement_reduction_check(a: &YoungFunction, b: &YoungFunction, psi: &SampledFunction) -> Result<ReductionCheck> {
    let balance = check_balance(a, b);
    reduction_with_balance(a, b, psi, balance.holds())
}

pub fn reduction_with_balance(a: &YoungFunction, b: &YoungFunction, psi: &SampledFunction, balance_holds: bool) -> Result<ReductionCheck> {
    if psi.values.iter().any(|v| *v < 0.0) || psi.values.windows(2).any(|w| w[1] > w[0]) {
        return Err(Error::Domain("psi must be non-negative and decreasing".into()));
    }
    let (h, d) = (averaging_operator(psi), dual_operator(psi));
    let sum = psi.with_values(h.values.iter().zip(&d.values).map(|(x, y)| x + y).collect())?;
    let (ng, np) = (luxemburg(b, &sum).value, luxemburg(a, psi).value);
    let ratio = if np > 0.0 { ng / np } else { 0.0 };
    Ok(ReductionCheck { holds: balance_holds && ratio.is_finite() && np.is_finite(), ratio, balance_holds })
}

/// `A⁻¹(1/δ)·χ_(0,δ)` on the graded grid of `(0, L)`; `δ` should be a power of ten times `L`.
pub fn normalized_spike(a: &YoungFunction, l: f64, delta: f64) -> SampledFunction {
    sample(&Profile::Level { height: a.inverse(1.0 / delta), x: delta / l }, l, DEFAULT_PER_DECADE)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform(values: Vec<f64>, l: f64) -> SampledFunction {
        SampledFunction::uniform(values, l).unwrap()
    }

    #[test]
    fn averaging_constants_and_steps() {
        let f = uniform(vec![1.0; 8], 2.0);
        assert!(averaging_operator(&f).values.iter().all(|v| (v - 1.0).abs() < 1e-15));
        let g = uniform(vec![1.0, 1.0, 0.0, 0.0], 1.0);
        for s in [0.1, 0.3, 0.5, 0.6, 0.9, 1.0] {
            let want = if s <= 0.5 { 1.0 } else { 0.5 / s };
            assert!((averaging_at(&g, s) - want).abs() < 1e-15);
        }
        let h = averaging_operator(&g);
        assert!((h.values[3] - 0.5 / 0.875).abs() < 1e-15);
    }

    #[test]
    fn dual_of_one_is_a_log() {
        let f = uniform(vec![1.0; 10], 3.0);
        let d = dual_operator(&f);
        for (m, v) in midpoints(&f).iter().zip(&d.values) {
            assert!((v - (3.0 / m).ln()).abs() < 1e-13);
        }
        assert_eq!(dual_at(&f, 3.0), 0.0);
        let g = uniform(vec![0.0, 0.0, 2.0, 1.0], 1.0);
        let first = dual_at(&g, 0.1);
        assert!((dual_at(&g, 0.4) - first).abs() < 1e-15);
        assert!((dual_at(&g, 0.1) - (2.0 * (0.75f64 / 0.5).ln() + (1.0f64 / 0.75).ln())).abs() < 1e-15);
    }

    #[test]
    fn averages_dominate_decreasing_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut v: Vec<f64> = (0..200).map(|_| rng.gen_range(0.0..5.0)).collect();
        v.sort_by(|x, y| y.total_cmp(x));
        let w: Vec<f64> = (0..200).map(|_| rng.gen_range(0.1..1.0)).collect();
        let f = SampledFunction::new(v, w).unwrap();
        let starts = f.cell_starts();
        for (i, s) in starts.iter().enumerate().skip(1) {
            // brute force: average of the first i cells at a cell edge
            let avg: f64 = (0..i).map(|j| f.values[j] * f.weights[j]).sum::<f64>() / s;
            assert!(avg >= f.values[i] - 1e-12);
            assert!((averaging_at(&f, *s) - avg).abs() <= 1e-12 * avg.max(1.0));
        }
    }

    #[test]
    fn operators_are_linear_and_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let w = graded_cells(1.0, 4, 3);
        let f = SampledFunction::new((0..w.len()).map(|_| rng.gen_range(0.0..3.0)).collect(), w.clone()).unwrap();
        let g = f.with_values((0..w.len()).map(|_| rng.gen_range(0.0..3.0)).collect()).unwrap();
        let c = 2.5;
        let comb = f.with_values(f.values.iter().zip(&g.values).map(|(x, y)| c * x + y).collect()).unwrap();
        for op in [averaging_operator, dual_operator] {
            let (of, og, oc) = (op(&f), op(&g), op(&comb));
            for i in 0..w.len() {
                assert!((oc.values[i] - (c * of.values[i] + og.values[i])).abs() <= 1e-12 * oc.values[i].max(1.0));
                assert!(of.values[i] >= 0.0);
            }
        }
    }

    #[test]
    fn graded_cells_cover_the_interval() {
        let w = graded_cells(2.0, 16, 12);
        assert_eq!(w.len(), 16 * 12 + 1);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!(w.iter().all(|x| *x > 0.0));
    }

    #[test]
    fn non_decreasing_psi_is_rejected() {
        let psi = uniform(vec![1.0, 2.0], 1.0);
        let a = YoungFunction::power(2.0);
        assert!(reduction_with_balance(&a, &a, &psi, true).is_err());
        let ok = uniform(vec![1.0, 1.0], 1.0);
        assert!(reduction_with_balance(&a, &a, &ok, true).unwrap().holds);
    }
}
