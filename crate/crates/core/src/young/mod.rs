//! Young functions: evaluation, densities, generalized inverses and conjugation.
//!
//! A Young function is a convex, left-continuous map `A: [0,∞) → [0,∞]` with
//! `A(0) = 0`. Values are extended reals: `f64::INFINITY` stands for `+∞`.
//! Closed-form kinds keep closed-form conjugates where one is known; every
//! other kind is conjugated through the numerical Legendre transform in
//! [`legendre`], which returns a [`Table`].

pub mod catalog;
pub mod growth;
pub mod legendre;
mod table;

use std::f64::consts::E;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;

pub use growth::{check_delta2, check_nabla2, dominates, equivalent, GrowthVerdict, Threshold};
pub use table::{Table, DEFAULT_SLOPE_CAP};

/// `e^e`, the shift that makes `ln ln(e^e + t) >= 1`.
const E_E: f64 = 15.154_262_241_479_262;

fn one() -> f64 {
    1.0
}

/// The constructors Young functions are closed under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params")]
pub enum Kind {
    /// `coef · t^p`, `p >= 1`.
    Power {
        p: f64,
        #[serde(default = "one")]
        coef: f64,
    },
    /// `t^p · ln(e+t)^alpha`.
    PowerLog { p: f64, alpha: f64 },
    /// `t^p · ln(e+t)^alpha · (ln ln(e^e+t))^gamma`.
    PowerLogLog { p: f64, alpha: f64, gamma: f64 },
    /// `exp(t^beta) − 1`, convexified below the inflection point when `beta < 1`.
    ExpPower { beta: f64 },
    /// `t · ln(1+t)`.
    LinearLog,
    /// `exp(a · ln(1+t)^beta) − 1`.
    ExpLogPower { a: f64, beta: f64 },
    /// `exp(a · (ln(1+t) + shift · ln ln(e+t))^beta) − 1`.
    ExpLogPowerLog { a: f64, beta: f64, shift: f64 },
    /// `0` on `[0, t1]`, `+∞` beyond: the `L^∞` Young function.
    Indicator { t1: f64 },
    Tabulated(Table),
    /// Pointwise Legendre transform of another Young function.
    Conjugate(Box<YoungFunction>),
    /// `A(t) / m`.
    Scaled { m: f64, of: Box<YoungFunction> },
    /// `A(k·t)`.
    Dilated { k: f64, of: Box<YoungFunction> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct YoungFunction {
    kind: Kind,
}

impl YoungFunction {
    /// Validates parameters and spot-checks convexity on a log grid.
    pub fn new(kind: Kind) -> Result<Self> {
        let f = YoungFunction { kind };
        f.validate()?;
        Ok(f)
    }

    fn raw(kind: Kind) -> Self {
        YoungFunction { kind }
    }

    pub fn power(p: f64) -> Self {
        Self::new(Kind::Power { p, coef: 1.0 }).expect("valid power")
    }

    pub fn power_coef(p: f64, coef: f64) -> Result<Self> {
        Self::new(Kind::Power { p, coef })
    }

    pub fn power_log(p: f64, alpha: f64) -> Result<Self> {
        Self::new(Kind::PowerLog { p, alpha })
    }

    pub fn power_log_log(p: f64, alpha: f64, gamma: f64) -> Result<Self> {
        Self::new(Kind::PowerLogLog { p, alpha, gamma })
    }

    pub fn exp_power(beta: f64) -> Result<Self> {
        Self::new(Kind::ExpPower { beta })
    }

    pub fn linear_log() -> Self {
        Self::raw(Kind::LinearLog)
    }

    pub fn exp_log_power(a: f64, beta: f64) -> Result<Self> {
        Self::new(Kind::ExpLogPower { a, beta })
    }

    pub fn exp_log_power_log(a: f64, beta: f64, shift: f64) -> Result<Self> {
        Self::new(Kind::ExpLogPowerLog { a, beta, shift })
    }

    pub fn indicator(t1: f64) -> Result<Self> {
        Self::new(Kind::Indicator { t1 })
    }

    pub fn tabulated(table: Table) -> Self {
        Self::raw(Kind::Tabulated(table))
    }

    pub fn scaled(m: f64, of: YoungFunction) -> Result<Self> {
        Self::new(Kind::Scaled { m, of: Box::new(of) })
    }

    pub fn dilated(k: f64, of: YoungFunction) -> Result<Self> {
        Self::new(Kind::Dilated { k, of: Box::new(of) })
    }

    /// Lazily evaluated Legendre transform (no tabulation).
    pub fn pointwise_conjugate(of: YoungFunction) -> Self {
        Self::raw(Kind::Conjugate(Box::new(of)))
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidYoung(msg.to_string()));
        match &self.kind {
            Kind::Power { p, coef } => {
                if !(*p >= 1.0 && p.is_finite()) || !(*coef > 0.0 && coef.is_finite()) {
                    return bad("Power needs p >= 1 and coef > 0");
                }
            }
            Kind::PowerLog { p, alpha } | Kind::PowerLogLog { p, alpha, .. } => {
                if !(*p >= 1.0) || !alpha.is_finite() {
                    return bad("PowerLog needs p >= 1");
                }
            }
            Kind::ExpPower { beta } => {
                if !(*beta > 0.0 && beta.is_finite()) {
                    return bad("ExpPower needs beta > 0");
                }
            }
            Kind::ExpLogPower { a, beta } => {
                if !(*a > 0.0) || !(*beta >= 1.0) || (*beta == 1.0 && *a < 1.0) {
                    return bad("ExpLogPower needs a > 0, beta >= 1 (a >= 1 when beta = 1)");
                }
            }
            Kind::ExpLogPowerLog { a, beta, shift } => {
                if !(*a > 0.0) || !(*beta > 1.0) || !(*shift > -E) {
                    return bad("ExpLogPowerLog needs a > 0, beta > 1 and shift > -e");
                }
            }
            Kind::Indicator { t1 } => {
                if !(*t1 > 0.0 && t1.is_finite()) {
                    return bad("Indicator needs t1 > 0");
                }
            }
            Kind::Scaled { m, .. } => {
                if !(*m > 0.0 && m.is_finite()) {
                    return bad("Scaled needs M > 0");
                }
            }
            Kind::Dilated { k, .. } => {
                if !(*k > 0.0 && k.is_finite()) {
                    return bad("Dilated needs k > 0");
                }
            }
            Kind::LinearLog | Kind::Tabulated(_) | Kind::Conjugate(_) => {}
        }
        if let Some(t) = self.convexity_violation() {
            return Err(Error::InvalidYoung(format!("secant slopes decrease near t = {t:e}")));
        }
        Ok(())
    }

    /// First grid point where secant slopes decrease, if any.
    pub fn convexity_violation(&self) -> Option<f64> {
        let n = 241;
        let ts: Vec<f64> = (0..n).map(|i| 10f64.powf(-6.0 + 12.0 * i as f64 / (n - 1) as f64)).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| self.eval(t)).collect();
        let mut prev = vals[0] / ts[0];
        for i in 1..n {
            if !vals[i].is_finite() {
                break;
            }
            let s = (vals[i] - vals[i - 1]) / (ts[i] - ts[i - 1]);
            if s < prev * (1.0 - 1e-7) - 1e-300 {
                return Some(ts[i]);
            }
            prev = s;
        }
        None
    }

    /// `A(t)` for `t >= 0`.
    pub fn value(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) || t.is_infinite() {
            return Err(Error::Domain(format!("Young functions are evaluated at finite t >= 0, got {t}")));
        }
        Ok(self.eval(t))
    }

    /// `A(t)`; negative arguments are treated as 0.
    pub fn eval(&self, t: f64) -> f64 {
        if !(t > 0.0) {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p, coef } => coef * t.powf(*p),
            Kind::PowerLog { p, alpha } => power_log_log(t, *p, *alpha, 0.0).0,
            Kind::PowerLogLog { p, alpha, gamma } => power_log_log(t, *p, *alpha, *gamma).0,
            Kind::ExpPower { beta } => exp_power(t, *beta).0,
            Kind::LinearLog => t * t.ln_1p(),
            Kind::ExpLogPower { a, beta } => {
                let u = t.ln_1p();
                (a * u.powf(*beta)).exp_m1()
            }
            Kind::ExpLogPowerLog { a, beta, shift } => {
                let g = shifted_log(t, *shift).0;
                (a * g.powf(*beta)).exp_m1()
            }
            Kind::Indicator { t1 } => {
                if t <= *t1 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Tabulated(tab) => tab.eval(t),
            Kind::Conjugate(inner) => legendre_point(inner, t).0,
            Kind::Scaled { m, of } => of.eval(t) / m,
            Kind::Dilated { k, of } => of.eval(k * t),
        }
    }

    /// Left-continuous density `a(t)` with `A(t) = ∫_0^t a`.
    pub fn density(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match &self.kind {
            Kind::Power { p, coef } => {
                if *p == 1.0 {
                    *coef
                } else {
                    coef * p * t.powf(p - 1.0)
                }
            }
            Kind::PowerLog { p, alpha } => power_log_log(t, *p, *alpha, 0.0).1,
            Kind::PowerLogLog { p, alpha, gamma } => power_log_log(t, *p, *alpha, *gamma).1,
            Kind::ExpPower { beta } => exp_power(t, *beta).1,
            Kind::LinearLog => t.ln_1p() + t / (1.0 + t),
            Kind::ExpLogPower { a, beta } => {
                if t == 0.0 {
                    return if *beta == 1.0 { *a } else { 0.0 };
                }
                let u = t.ln_1p();
                a * beta * u.powf(beta - 1.0) / (1.0 + t) * (a * u.powf(*beta)).exp()
            }
            Kind::ExpLogPowerLog { a, beta, shift } => {
                if t == 0.0 {
                    return 0.0;
                }
                let (g, dg) = shifted_log(t, *shift);
                a * beta * g.powf(beta - 1.0) * dg * (a * g.powf(*beta)).exp()
            }
            Kind::Indicator { t1 } => {
                if t <= *t1 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Tabulated(tab) => tab.density(t),
            Kind::Conjugate(inner) => legendre_point(inner, t).1,
            Kind::Scaled { m, of } => of.density(t) / m,
            Kind::Dilated { k, of } => k * of.density(k * t),
        }
    }

    pub fn is_finite_valued(&self) -> bool {
        match &self.kind {
            Kind::Indicator { .. } => false,
            Kind::Tabulated(t) => t.is_finite_valued(),
            Kind::Scaled { of, .. } | Kind::Dilated { of, .. } => of.is_finite_valued(),
            // the conjugate of a function with bounded density is infinite somewhere
            Kind::Conjugate(inner) => matches!(inner.index_at_infinity(), Some((l, _)) if l > 1.0),
            _ => true,
        }
    }

    /// Where `A` jumps to `+∞`, for functions that are not finite-valued.
    pub fn infinity_threshold(&self) -> Option<f64> {
        match &self.kind {
            Kind::Indicator { t1 } => Some(*t1),
            Kind::Tabulated(t) if !t.is_finite_valued() => Some(t.last_knot()),
            Kind::Scaled { of, .. } => of.infinity_threshold(),
            Kind::Dilated { k, of } => of.infinity_threshold().map(|t| t / k),
            _ => None,
        }
    }

    /// Largest argument at which the representation is trusted.
    pub fn reliable_limit(&self) -> f64 {
        match &self.kind {
            Kind::Tabulated(t) => t.last_knot(),
            Kind::Scaled { of, .. } => of.reliable_limit(),
            Kind::Dilated { k, of } => of.reliable_limit() / k,
            _ => f64::MAX,
        }
    }

    /// Right-continuous generalized inverse `sup{t : A(t) <= r}`.
    pub fn inverse(&self, r: f64) -> f64 {
        if r.is_nan() || r < 0.0 {
            return 0.0;
        }
        if r.is_infinite() {
            return f64::INFINITY;
        }
        match &self.kind {
            Kind::Power { p, coef } => (r / coef).powf(1.0 / p),
            Kind::Indicator { t1 } => *t1,
            Kind::Tabulated(t) => t.inverse(r),
            Kind::Scaled { m, of } => of.inverse(m * r),
            Kind::Dilated { k, of } => of.inverse(r) / k,
            Kind::ExpPower { beta } if *beta >= 1.0 => r.ln_1p().powf(1.0 / beta),
            _ => bisect_sup(|t| self.eval(t) <= r),
        }
    }

    /// Left generalized inverse `inf{t : A(t) >= r}`.
    pub fn lower_inverse(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p, coef } => (r / coef).powf(1.0 / p),
            Kind::Indicator { t1 } => *t1,
            Kind::Tabulated(t) => t.lower_inverse(r),
            Kind::Scaled { m, of } => of.lower_inverse(m * r),
            Kind::Dilated { k, of } => of.lower_inverse(r) / k,
            Kind::ExpPower { beta } if *beta >= 1.0 && r.is_finite() => r.ln_1p().powf(1.0 / beta),
            _ => {
                if r.is_infinite() {
                    return self.infinity_threshold().unwrap_or(f64::INFINITY);
                }
                bisect_inf(|t| self.eval(t) >= r)
            }
        }
    }

    /// Young conjugate `Ã(s) = sup{ r s − A(r) }`.
    pub fn conjugate(&self) -> YoungFunction {
        match &self.kind {
            Kind::Power { p, coef } => {
                if *p == 1.0 {
                    Self::raw(Kind::Indicator { t1: *coef })
                } else {
                    let q = p / (p - 1.0);
                    let c = (p - 1.0) * coef * (coef * p).powf(-q);
                    Self::raw(Kind::Power { p: q, coef: c })
                }
            }
            Kind::Indicator { t1 } => Self::raw(Kind::Power { p: 1.0, coef: *t1 }),
            Kind::Tabulated(t) => Self::raw(Kind::Tabulated(t.conjugate())),
            Kind::Conjugate(inner) => (**inner).clone(),
            Kind::Scaled { m, of } => Self::raw(Kind::Scaled {
                m: *m,
                of: Box::new(Self::raw(Kind::Dilated { k: *m, of: Box::new(of.conjugate()) })),
            }),
            Kind::Dilated { k, of } => Self::raw(Kind::Dilated { k: 1.0 / k, of: Box::new(of.conjugate()) }),
            _ => Self::raw(Kind::Tabulated(legendre::tabulate_conjugate(self))),
        }
    }

    /// Limits `(liminf, limsup)` of `t a(t) / A(t)` as `t → ∞`, when known in closed form.
    pub fn index_at_infinity(&self) -> Option<(f64, f64)> {
        let inf = f64::INFINITY;
        match &self.kind {
            Kind::Power { p, .. } | Kind::PowerLog { p, .. } | Kind::PowerLogLog { p, .. } => Some((*p, *p)),
            Kind::LinearLog => Some((1.0, 1.0)),
            Kind::ExpPower { .. } | Kind::ExpLogPowerLog { .. } | Kind::Indicator { .. } => Some((inf, inf)),
            Kind::ExpLogPower { a, beta } => {
                if *beta > 1.0 {
                    Some((inf, inf))
                } else {
                    Some((*a, *a))
                }
            }
            Kind::Tabulated(_) => None,
            Kind::Conjugate(inner) => inner.index_at_infinity().map(|(l, u)| (dual_index(u), dual_index(l))),
            Kind::Scaled { of, .. } | Kind::Dilated { of, .. } => of.index_at_infinity(),
        }
    }

    /// Limits of `t a(t) / A(t)` as `t → 0+`, when known in closed form.
    pub fn index_at_zero(&self) -> Option<(f64, f64)> {
        match &self.kind {
            Kind::Power { p, .. } | Kind::PowerLog { p, .. } | Kind::PowerLogLog { p, .. } => Some((*p, *p)),
            Kind::LinearLog => Some((2.0, 2.0)),
            Kind::ExpPower { beta } => {
                let i = if *beta >= 1.0 { *beta } else { 2.0 };
                Some((i, i))
            }
            Kind::ExpLogPower { beta, .. } | Kind::ExpLogPowerLog { beta, .. } => Some((*beta, *beta)),
            Kind::Indicator { .. } | Kind::Tabulated(_) => None,
            Kind::Conjugate(inner) => inner.index_at_zero().map(|(l, u)| (dual_index(u), dual_index(l))),
            Kind::Scaled { of, .. } | Kind::Dilated { of, .. } => of.index_at_zero(),
        }
    }

    /// `∫_x^y A(s)/s² ds` for `0 <= x <= y`; closed form where available.
    pub fn integral_over_square(&self, x: f64, y: f64) -> f64 {
        if !(y > x) {
            return 0.0;
        }
        match &self.kind {
            Kind::Power { p, coef } => {
                if x == 0.0 && *p <= 1.0 {
                    return f64::INFINITY;
                }
                if *p == 1.0 {
                    coef * (y / x).ln()
                } else {
                    coef * (y.powf(p - 1.0) - x.powf(p - 1.0)) / (p - 1.0)
                }
            }
            Kind::Indicator { t1 } => {
                if y <= *t1 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Kind::Tabulated(t) => t.integral_over_square(x, y),
            Kind::Scaled { m, of } => of.integral_over_square(x, y) / m,
            Kind::Dilated { k, of } => k * of.integral_over_square(k * x, k * y),
            _ => {
                let (mut total, lo) = if x > 0.0 {
                    (0.0, x)
                } else {
                    // integrate (0, ε] through the local exponent at zero
                    let eps = (y * 1e-20).min(1e-20);
                    let p0 = self
                        .index_at_zero()
                        .map(|(l, _)| l)
                        .unwrap_or_else(|| ((self.eval(2.0 * eps) / self.eval(eps)).ln() / 2f64.ln()).max(0.0));
                    if !(p0 > 1.0) {
                        return f64::INFINITY;
                    }
                    (self.eval(eps) / (eps * (p0 - 1.0)), eps)
                };
                total += quad::chunked_simpson(
                    |u| {
                        let s = u.exp();
                        self.eval(s) / s
                    },
                    lo.ln(),
                    y.ln(),
                    0.5,
                );
                total
            }
        }
    }

    /// Short human-readable formula.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for YoungFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Power { p, coef } if *coef == 1.0 => write!(f, "t^{p}"),
            Kind::Power { p, coef } => write!(f, "{coef}·t^{p}"),
            Kind::PowerLog { p, alpha } => write!(f, "t^{p}·log(e+t)^{alpha}"),
            Kind::PowerLogLog { p, alpha, gamma } => write!(f, "t^{p}·log(e+t)^{alpha}·loglog^{gamma}"),
            Kind::ExpPower { beta } => write!(f, "exp(t^{beta})-1"),
            Kind::LinearLog => write!(f, "t·log(1+t)"),
            Kind::ExpLogPower { a, beta } => write!(f, "exp({a}·log(1+t)^{beta})-1"),
            Kind::ExpLogPowerLog { a, beta, shift } => write!(f, "exp({a}·(log(1+t)+{shift}·loglog)^{beta})-1"),
            Kind::Indicator { t1 } => write!(f, "∞·χ(t>{t1})"),
            Kind::Tabulated(t) => write!(f, "table[{} knots]", t.breakpoints().len()),
            Kind::Conjugate(inner) => write!(f, "conj({inner})"),
            Kind::Scaled { m, of } => write!(f, "({of})/{m}"),
            Kind::Dilated { k, of } => write!(f, "({of})∘({k}t)"),
        }
    }
}

fn dual_index(i: f64) -> f64 {
    if i.is_infinite() {
        1.0
    } else if i <= 1.0 {
        f64::INFINITY
    } else {
        i / (i - 1.0)
    }
}

/// `(A, a)` for `t^p · ln(e+t)^α · (ln ln(e^e+t))^γ`.
fn power_log_log(t: f64, p: f64, alpha: f64, gamma: f64) -> (f64, f64) {
    let l = (E + t).ln();
    let ll_inner = (E_E + t).ln();
    let ll = ll_inner.ln();
    let base = l.powf(alpha) * ll.powf(gamma);
    let value = t.powf(p) * base;
    let bracket = p + alpha * t / ((E + t) * l) + gamma * t / ((E_E + t) * ll_inner * ll);
    let density = if p == 1.0 { base * bracket } else { t.powf(p - 1.0) * base * bracket };
    (value, density)
}

/// `(A, a)` for `exp(t^β) − 1`, with a quadratic piece below the inflection point when `β < 1`.
fn exp_power(t: f64, beta: f64) -> (f64, f64) {
    let raw_density = |t: f64| beta * t.powf(beta - 1.0) * t.powf(beta).exp();
    if beta >= 1.0 {
        let d = if t == 0.0 {
            if beta == 1.0 {
                1.0
            } else {
                0.0
            }
        } else {
            raw_density(t)
        };
        return (t.powf(beta).exp_m1(), d);
    }
    let tb = ((1.0 - beta) / beta).powf(1.0 / beta);
    let ab = raw_density(tb);
    if t < tb {
        (ab * t * t / (2.0 * tb), ab * t / tb)
    } else {
        let v = ab * tb / 2.0 + (t.powf(beta).exp() - tb.powf(beta).exp());
        (v, raw_density(t))
    }
}

/// `(g, g')` with `g = ln(1+t) + shift · ln ln(e+t)`.
fn shifted_log(t: f64, shift: f64) -> (f64, f64) {
    let l = (E + t).ln();
    let g = t.ln_1p() + shift * l.ln();
    let dg = 1.0 / (1.0 + t) + shift / ((E + t) * l);
    (g.max(0.0), dg)
}

/// `sup_r (r s − A(r))` together with the maximizer.
fn legendre_point(inner: &YoungFunction, s: f64) -> (f64, f64) {
    if !(s > 0.0) {
        return (0.0, 0.0);
    }
    // maximizer: sup{ r : a(r) <= s }
    let r = bisect_sup(|r| inner.density(r) <= s);
    if r.is_infinite() {
        return (f64::INFINITY, f64::INFINITY);
    }
    let v = r * s - inner.eval(r);
    (if v.is_nan() { f64::INFINITY } else { v.max(0.0) }, r)
}

/// Largest `t` for which the monotone predicate holds (`true` on an initial interval).
pub(crate) fn bisect_sup<P: Fn(f64) -> bool>(pred: P) -> f64 {
    let mut hi = 1.0;
    if pred(hi) {
        loop {
            hi *= 16.0;
            if hi > 1e300 {
                return if pred(f64::MAX) { f64::INFINITY } else { geometric_bisect(&pred, 1e300, f64::MAX) };
            }
            if !pred(hi) {
                break;
            }
        }
    }
    let mut lo = hi / 16.0;
    while !pred(lo) {
        lo /= 16.0;
        if lo < 1e-300 {
            return 0.0;
        }
    }
    geometric_bisect(&pred, lo, hi)
}

/// Smallest `t` for which the monotone predicate holds (`true` on a final interval).
pub(crate) fn bisect_inf<P: Fn(f64) -> bool>(pred: P) -> f64 {
    let not = |t: f64| !pred(t);
    let t = bisect_sup(not);
    if t == 0.0 || t.is_infinite() {
        return t;
    }
    // bisect_sup returns the last failing point; step to the first passing one
    let mut hi = t * (1.0 + 1e-15);
    while !pred(hi) {
        hi *= 1.0 + 1e-15;
    }
    hi
}

fn geometric_bisect<P: Fn(f64) -> bool>(pred: &P, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        if hi / lo <= 1.0 + 4e-16 {
            break;
        }
        let mid = (lo.sqrt() * hi.sqrt()).clamp(lo, hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivial_values() {
        assert_eq!(YoungFunction::power(2.0).value(3.0).unwrap(), 9.0);
        assert!((YoungFunction::linear_log().value(1.0).unwrap() - 2f64.ln()).abs() < 1e-15);
        for f in catalog::shipped_functions() {
            assert_eq!(f.1.value(0.0).unwrap(), 0.0, "{}", f.0);
        }
    }

    #[test]
    fn negative_argument_is_domain_error() {
        assert!(matches!(YoungFunction::power(2.0).value(-1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn power_inverse() {
        assert!((YoungFunction::power(2.0).inverse(9.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn self_conjugate_half_square() {
        let a = YoungFunction::power_coef(2.0, 0.5).unwrap();
        let c = a.conjugate();
        for t in [0.1, 1.0, 7.5] {
            assert!((c.eval(t) - t * t / 2.0).abs() < 1e-12 * t * t);
        }
    }

    #[test]
    fn indicator_conjugates_to_linear() {
        let a = YoungFunction::indicator(3.0).unwrap();
        let c = a.conjugate();
        assert_eq!(c.eval(2.0), 6.0);
        assert_eq!(c.conjugate(), a);
    }

    #[test]
    fn indicator_inverses() {
        let a = YoungFunction::indicator(1.0).unwrap();
        assert_eq!(a.inverse(0.0), 1.0);
        assert_eq!(a.inverse(5.0), 1.0);
        assert_eq!(a.lower_inverse(5.0), 1.0);
        assert_eq!(a.lower_inverse(0.0), 0.0);
    }

    #[test]
    fn bisection_inverse_sandwich() {
        let a = YoungFunction::linear_log();
        for r in [1e-8, 0.3, 10.0, 1e12] {
            let t = a.inverse(r);
            assert!(a.eval(t) <= r);
            assert!(a.eval(t * (1.0 + 1e-12)) > r);
        }
    }

    #[test]
    fn densities_integrate_to_values() {
        for (name, f) in catalog::shipped_functions() {
            if !f.is_finite_valued() {
                continue;
            }
            for t in [0.5, 3.0, 40.0] {
                let a = f.eval(t);
                if !a.is_finite() {
                    continue;
                }
                let v = quad::adaptive_simpson(|r| f.density(r), 0.0, t, 1e-11, 1e-14);
                assert!((v - a).abs() <= 1e-6 * a.max(1e-12), "{name} at {t}: {v} vs {a}");
            }
        }
    }

    #[test]
    fn glued_exp_power_is_continuous() {
        let f = YoungFunction::exp_power(0.5).unwrap();
        let tb = 1.0;
        assert!((f.eval(tb * (1.0 - 1e-12)) - f.eval(tb * (1.0 + 1e-12))).abs() < 1e-9);
        assert!(f.convexity_violation().is_none());
    }

    #[test]
    fn pointwise_conjugate_matches_closed_form() {
        let a = YoungFunction::power(3.0);
        let lazy = YoungFunction::pointwise_conjugate(a.clone());
        let closed = a.conjugate();
        for s in [0.2, 1.0, 9.0] {
            assert!((lazy.eval(s) - closed.eval(s)).abs() < 1e-9 * closed.eval(s));
        }
    }

    #[test]
    fn catalog_round_trips_through_json() {
        let f = YoungFunction::scaled(2.0, YoungFunction::power_log(2.0, 1.0).unwrap()).unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let back: YoungFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
    }
}
