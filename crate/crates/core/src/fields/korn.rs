use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::calculus::{dev_sym_gradient, gradient, sym_gradient};
use super::grid::GridField;
use super::kernel::{KernelBasis, KernelKind};
use crate::error::{Error, Result};
use crate::young::YoungFunction;

/// Denominators below this fraction of `‖∇u‖` count as kernel membership.
pub const KERNEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Fields vanishing on the boundary, no projection.
    #[value(name = "zero_bc")]
    ZeroBc,
    /// Arbitrary fields, kernel component removed by projection.
    #[value(name = "full", alias = "full_domain")]
    FullDomain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
pub enum Operator {
    /// Symmetric gradient, kernel `𝓡`.
    #[value(name = "E")]
    E,
    /// Trace-free symmetric gradient, kernel `Σ`.
    #[value(name = "ED")]
    ED,
}

impl Operator {
    pub fn kernel(self) -> KernelKind {
        match self {
            Operator::E => KernelKind::Rigid,
            Operator::ED => KernelKind::Sigma,
        }
    }
}

fn check_setup(u: &GridField, mode: Mode, op: Operator) -> Result<()> {
    if op == Operator::ED && u.dim() < 3 {
        return Err(Error::Config("the trace-free operator needs n >= 3; use operator E on planar grids".into()));
    }
    if mode == Mode::ZeroBc && !u.boundary_flag {
        return Err(Error::Config("zero_bc mode needs a field vanishing on the boundary".into()));
    }
    Ok(())
}

/// `u − Πu` for the mode (the identity in zero_bc mode).
pub fn remove_kernel(u: &GridField, mode: Mode, op: Operator) -> Result<GridField> {
    match mode {
        Mode::ZeroBc => Ok(u.clone()),
        Mode::FullDomain => KernelBasis::for_kind(op.kernel(), &u.grid)?.residual(u),
    }
}

/// `‖∇(u − Πu)‖_B / ‖𝓔ᴰu‖_A` (or with `𝓔` for operator E).
///
/// The projection is the discrete `L²` one, so the numerator bounds the
/// infimum over the kernel from above.
pub fn korn_ratio(a: &YoungFunction, b: &YoungFunction, u: &GridField, mode: Mode, op: Operator) -> Result<f64> {
    check_setup(u, mode, op)?;
    let e = match op {
        Operator::E => sym_gradient(u),
        Operator::ED => dev_sym_gradient(u),
    };
    let den = e.orlicz_norm(a);
    let scale = gradient(u).orlicz_norm(a);
    if !(den > KERNEL_TOL * scale) {
        return Err(Error::KernelMembership { denominator: den });
    }
    let num = gradient(&remove_kernel(u, mode, op)?).orlicz_norm(b);
    Ok(num / den)
}

/// `‖u − Πu‖_A / ‖𝓔ᴰu‖_A` (or with `𝓔` for operator E).
pub fn poincare_ratio(a: &YoungFunction, u: &GridField, mode: Mode, op: Operator) -> Result<f64> {
    check_setup(u, mode, op)?;
    let e = match op {
        Operator::E => sym_gradient(u),
        Operator::ED => dev_sym_gradient(u),
    };
    let den = e.orlicz_norm(a);
    let scale = gradient(u).orlicz_norm(a);
    if !(den > KERNEL_TOL * scale) {
        return Err(Error::KernelMembership { denominator: den });
    }
    Ok(remove_kernel(u, mode, op)?.orlicz_norm(a) / den)
}

/// Ratios over a suite, summarised by the maximum and by the median of the top decile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub ratios: Vec<f64>,
    pub max: f64,
    pub top_decile_median: f64,
    /// Fields skipped because they lie in the kernel.
    pub kernel_members: usize,
}

impl SuiteSummary {
    pub fn from_ratios(ratios: Vec<f64>, kernel_members: usize) -> Self {
        let mut sorted = ratios.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let max = sorted.first().copied().unwrap_or(0.0);
        let top = (sorted.len().div_ceil(10)).max(1).min(sorted.len());
        let top_decile_median = if top == 0 { 0.0 } else { sorted[top / 2] };
        Self { ratios, max, top_decile_median, kernel_members }
    }

    pub fn is_finite(&self) -> bool {
        self.max.is_finite()
    }
}

fn summarize(results: Vec<Result<f64>>) -> Result<SuiteSummary> {
    let mut ratios = Vec::new();
    let mut kernel = 0;
    for r in results {
        match r {
            Ok(v) => ratios.push(v),
            Err(Error::KernelMembership { .. }) => kernel += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(SuiteSummary::from_ratios(ratios, kernel))
}

pub fn korn_suite(a: &YoungFunction, b: &YoungFunction, fields: &[GridField], mode: Mode, op: Operator) -> Result<SuiteSummary> {
    summarize(fields.par_iter().map(|u| korn_ratio(a, b, u, mode, op)).collect())
}

pub fn poincare_suite(a: &YoungFunction, fields: &[GridField], mode: Mode, op: Operator) -> Result<SuiteSummary> {
    summarize(fields.par_iter().map(|u| poincare_ratio(a, u, mode, op)).collect())
}
