use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest finite slope a table will store; larger finite slopes are clamped.
pub const DEFAULT_SLOPE_CAP: f64 = 1e300;

/// Piecewise-linear Young function described by its piecewise-constant density.
///
/// The density equals `slopes[j]` on `(knots[j], knots[j+1]]` and `slopes[last]`
/// beyond the final knot. A terminal slope of `+inf` means the function is
/// infinite past the final knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TableRepr", into = "TableRepr")]
pub struct Table {
    knots: Vec<f64>,
    slopes: Vec<f64>,
    values: Vec<f64>,
    capped: bool,
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    #[serde(default)]
    slope_cap: Option<f64>,
}

impl TryFrom<TableRepr> for Table {
    type Error = Error;

    fn try_from(r: TableRepr) -> Result<Self> {
        Table::with_cap(r.breakpoints, r.slopes, r.slope_cap.unwrap_or(DEFAULT_SLOPE_CAP))
    }
}

impl From<Table> for TableRepr {
    fn from(t: Table) -> Self {
        TableRepr { breakpoints: t.knots, slopes: t.slopes, slope_cap: None }
    }
}

impl Table {
    pub fn new(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        Self::with_cap(breakpoints, slopes, DEFAULT_SLOPE_CAP)
    }

    /// Builds a table, clamping finite slopes above `cap`. An infinite slope
    /// before the last segment truncates the table there.
    pub fn with_cap(mut knots: Vec<f64>, mut slopes: Vec<f64>, cap: f64) -> Result<Self> {
        if knots.is_empty() || knots.len() != slopes.len() {
            return Err(Error::InvalidYoung(format!(
                "table needs matching non-empty breakpoints/slopes (got {} and {})",
                knots.len(),
                slopes.len()
            )));
        }
        if knots[0] != 0.0 {
            return Err(Error::InvalidYoung("first breakpoint must be 0".into()));
        }
        if let Some(pos) = slopes.iter().position(|s| s.is_infinite()) {
            knots.truncate(pos + 1);
            slopes.truncate(pos + 1);
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(Error::InvalidYoung("breakpoints must be finite and increasing".into()));
            }
        }
        for w in slopes.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidYoung("slopes must be non-decreasing (convexity)".into()));
            }
        }
        if slopes[0] < 0.0 || slopes.iter().any(|s| s.is_nan()) {
            return Err(Error::InvalidYoung("slopes must be non-negative".into()));
        }
        if slopes.iter().all(|&s| s == 0.0) {
            return Err(Error::InvalidYoung("a Young function cannot vanish identically".into()));
        }
        let mut capped = false;
        for s in slopes.iter_mut() {
            if s.is_finite() && *s > cap {
                *s = cap;
                capped = true;
            }
        }
        let mut values = Vec::with_capacity(knots.len());
        values.push(0.0);
        for j in 1..knots.len() {
            let v = values[j - 1] + slopes[j - 1] * (knots[j] - knots[j - 1]);
            values.push(v);
        }
        Ok(Table { knots, slopes, values, capped })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.knots
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Whether the slope cap was applied during construction.
    pub fn cap_binds(&self) -> bool {
        self.capped
    }

    pub fn is_finite_valued(&self) -> bool {
        self.slopes.last().is_some_and(|s| s.is_finite())
    }

    pub fn last_knot(&self) -> f64 {
        *self.knots.last().unwrap()
    }

    /// Index `j` of the segment `(knots[j], knots[j+1]]` containing `t > 0`.
    fn segment(&self, t: f64) -> usize {
        // first knot >= t, minus one
        let k = self.knots.partition_point(|&c| c < t);
        k.saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let j = self.segment(t);
        let s = self.slopes[j];
        if s.is_infinite() {
            return f64::INFINITY;
        }
        self.values[j] + s * (t - self.knots[j])
    }

    pub fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.slopes[0];
        }
        self.slopes[self.segment(t)]
    }

    /// `sup { t : A(t) <= r }`.
    pub fn inverse(&self, r: f64) -> f64 {
        if r.is_nan() || r < 0.0 {
            return 0.0;
        }
        let last = self.knots.len() - 1;
        // largest j with values[j] <= r
        let j = self.values.partition_point(|&v| v <= r).saturating_sub(1);
        if j == last {
            let s = self.slopes[last];
            return if s.is_infinite() {
                self.knots[last]
            } else if s == 0.0 || r.is_infinite() {
                f64::INFINITY
            } else {
                self.knots[last] + (r - self.values[last]) / s
            };
        }
        self.knots[j] + (r - self.values[j]) / self.slopes[j]
    }

    /// `inf { t : A(t) >= r }`.
    pub fn lower_inverse(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let last = self.knots.len() - 1;
        // first knot index with values >= r
        let k = self.values.partition_point(|&v| v < r);
        if k > last {
            let s = self.slopes[last];
            return if s.is_infinite() {
                self.knots[last]
            } else if s == 0.0 || r.is_infinite() {
                f64::INFINITY
            } else {
                self.knots[last] + (r - self.values[last]) / s
            };
        }
        // values[k-1] < r <= values[k]
        let j = k - 1;
        self.knots[j] + (r - self.values[j]) / self.slopes[j]
    }

    /// Exact Legendre transform of the piecewise-linear function.
    pub fn conjugate(&self) -> Table {
        let m = self.knots.len() - 1;
        let mut knots = Vec::with_capacity(m + 2);
        let mut slopes = Vec::with_capacity(m + 2);
        knots.push(0.0);
        slopes.push(self.knots[0]);
        for j in 0..m {
            knots.push(self.slopes[j]);
            slopes.push(self.knots[j + 1]);
        }
        let tail = self.slopes[m];
        if tail.is_finite() {
            knots.push(tail);
            slopes.push(f64::INFINITY);
        }
        // drop zero-length segments
        let mut k2 = Vec::with_capacity(knots.len());
        let mut s2 = Vec::with_capacity(knots.len());
        for i in 0..knots.len() {
            if i + 1 < knots.len() && knots[i + 1] == knots[i] {
                continue;
            }
            k2.push(knots[i]);
            s2.push(slopes[i]);
        }
        Table::new(k2, s2).expect("conjugate of a valid table is valid")
    }

    /// `∫_x^y A(s)/s² ds` in closed form, `0 <= x <= y`.
    pub fn integral_over_square(&self, x: f64, y: f64) -> f64 {
        if y <= x {
            return 0.0;
        }
        let mut total = 0.0;
        let mut lo = x;
        let mut j = if x <= 0.0 { 0 } else { self.segment(x) };
        // move to the segment that actually contains points just above x
        while j + 1 < self.knots.len() && self.knots[j + 1] <= lo {
            j += 1;
        }
        loop {
            let hi = if j + 1 < self.knots.len() { self.knots[j + 1].min(y) } else { y };
            if hi > lo {
                let d = self.slopes[j];
                if d.is_infinite() {
                    return f64::INFINITY;
                }
                let alpha = self.values[j] - d * self.knots[j];
                if lo == 0.0 {
                    if d > 0.0 || alpha > 0.0 {
                        return f64::INFINITY;
                    }
                } else {
                    let inv = (hi - lo) / (lo * hi);
                    total += alpha * inv + d * ((hi - lo) / lo).ln_1p();
                }
            }
            if hi >= y || j + 1 >= self.knots.len() {
                break;
            }
            lo = hi;
            j += 1;
        }
        total.max(0.0)
    }
}
