//! The laminates `μ^(m)` built from the matrices `G(a,b) = [[0,a],[b,0]]`,
//! their moments, the blow-up table and a Lipschitz realization on `(0,r)²`.

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fields::grid::{Grid, GridField};
use crate::quad::pairwise_sum;
use crate::young::YoungFunction;

pub type Q = Ratio<i64>;

/// Orders above this overflow the 64-bit weight denominators.
pub const MAX_ORDER: usize = 40;
pub const QUADRATURE_SEED: u64 = 0x4c41_4d49;

/// A real 2×2 matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2(pub [[f64; 2]; 2]);

impl Matrix2 {
    pub fn g(a: f64, b: f64) -> Self {
        Matrix2([[0.0, a], [b, 0.0]])
    }

    pub fn sym(&self) -> Self {
        let m = self.0;
        let o = 0.5 * (m[0][1] + m[1][0]);
        Matrix2([[m[0][0], o], [o, m[1][1]]])
    }

    pub fn sub(&self, other: &Matrix2) -> Self {
        let (a, b) = (self.0, other.0);
        Matrix2([[a[0][0] - b[0][0], a[0][1] - b[0][1]], [a[1][0] - b[1][0], a[1][1] - b[1][1]]])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self) -> bool {
        self.0[0][1] == self.0[1][0]
    }

    pub fn is_skew(&self) -> bool {
        self.0[0][1] == -self.0[1][0] && self.0[0][0] == 0.0 && self.0[1][1] == 0.0
    }
}

/// `G(a t, b t)` with exact rational `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactG {
    pub a: Q,
    pub b: Q,
}

impl ExactG {
    pub fn new(a: Q, b: Q) -> Self {
        Self { a, b }
    }

    pub fn matrix(&self, t: f64) -> Matrix2 {
        Matrix2::g(to_f64(self.a) * t, to_f64(self.b) * t)
    }
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

fn q(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

fn pow2(k: usize) -> i64 {
    1i64 << k
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Atom {
    pub weight: Q,
    pub at: ExactG,
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Atom", 3)?;
        st.serialize_field("weight", &self.weight.to_string())?;
        st.serialize_field("a", &self.at.a.to_string())?;
        st.serialize_field("b", &self.at.b.to_string())?;
        st.end()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Laminate {
    pub atoms: Vec<Atom>,
    pub order: usize,
    pub scale: f64,
}

fn check_order(m: usize) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::Config(format!("laminate order {m} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

/// `μ^(m)` from its closed form: `2^-m` at `G(t,t)`, and for `k = 1..m`
/// weight `2^(k-m)/3` at `G(2^-k t, -2^-k t)` and `2^(k-m)/6` at `G(-2^(1-k) t, 2^(1-k) t)`.
pub fn build_laminate(m: usize, t: f64) -> Result<Laminate> {
    check_order(m)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("laminate scale must be positive, got {t}")));
    }
    let one = Q::from_integer(1);
    let mut atoms = vec![Atom { weight: q(1, pow2(m)), at: ExactG::new(one, one) }];
    for k in 1..=m {
        let w = q(pow2(k), pow2(m));
        let s = q(1, pow2(k));
        atoms.push(Atom { weight: w / 3, at: ExactG::new(s, -s) });
        atoms.push(Atom { weight: w / 6, at: ExactG::new(-s * 2, s * 2) });
    }
    Ok(Laminate { atoms, order: m, scale: t })
}

/// One rank-one splitting `parent = λ·atom + (1−λ)·continuation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Split {
    pub parent: ExactG,
    pub atom: ExactG,
    pub continuation: ExactG,
    pub lambda: Q,
}

impl Split {
    /// `atom − continuation = a ⊗ n` as (amplitude vector in units of `t`, normal axis).
    pub fn rank_one(&self) -> Result<([Q; 2], usize)> {
        let (da, db) = (self.atom.a - self.continuation.a, self.atom.b - self.continuation.b);
        let zero = Q::from_integer(0);
        match (da == zero, db == zero) {
            (false, true) => Ok(([da, zero], 1)),
            (true, false) => Ok(([zero, db], 0)),
            _ => Err(Error::NotRankOne(format!("G({da}, {db}) does not have rank one"))),
        }
    }
}

/// The chain of `2m` splittings behind `μ^(m)`: at scale `s = 2^-j t`,
/// `G(s,s) = ⅓ G(s,−s) + ⅔ G(s,2s)` then `G(s,2s) = ¼ G(−2s,2s) + ¾ G(2s,2s)`.
pub fn split_chain(m: usize) -> Result<Vec<Split>> {
    check_order(m)?;
    let mut out = Vec::with_capacity(2 * m);
    for j in (1..=m).rev() {
        let s = q(1, pow2(j));
        let mid = ExactG::new(s, s * 2);
        out.push(Split { parent: ExactG::new(s, s), atom: ExactG::new(s, -s), continuation: mid, lambda: q(1, 3) });
        out.push(Split { parent: mid, atom: ExactG::new(-s * 2, s * 2), continuation: ExactG::new(s * 2, s * 2), lambda: q(1, 4) });
    }
    for sp in &out {
        sp.rank_one()?;
        let avg_a = sp.lambda * sp.atom.a + (Q::from_integer(1) - sp.lambda) * sp.continuation.a;
        let avg_b = sp.lambda * sp.atom.b + (Q::from_integer(1) - sp.lambda) * sp.continuation.b;
        if avg_a != sp.parent.a || avg_b != sp.parent.b {
            return Err(Error::NotRankOne(format!("split of {:?} does not average to its parent", sp.parent)));
        }
    }
    Ok(out)
}

/// `μ^(m)` obtained by following the splitting chain.
pub fn build_by_recursion(m: usize, t: f64) -> Result<Laminate> {
    let mut atoms = Vec::new();
    let mut mass = Q::from_integer(1);
    let mut last = ExactG::new(Q::from_integer(1), Q::from_integer(1));
    for sp in split_chain(m)? {
        atoms.push(Atom { weight: mass * sp.lambda, at: sp.atom });
        mass *= Q::from_integer(1) - sp.lambda;
        last = sp.continuation;
    }
    atoms.push(Atom { weight: mass, at: last });
    Ok(Laminate { atoms, order: m, scale: t })
}

impl Laminate {
    pub fn total_mass(&self) -> Q {
        self.atoms.iter().map(|a| a.weight).sum()
    }

    /// Barycentre in units of `t`.
    pub fn barycenter(&self) -> ExactG {
        let a = self.atoms.iter().map(|x| x.weight * x.at.a).sum();
        let b = self.atoms.iter().map(|x| x.weight * x.at.b).sum();
        ExactG::new(a, b)
    }

    pub fn average(&self) -> Matrix2 {
        self.barycenter().matrix(self.scale)
    }

    /// Atoms sorted by position, for comparing constructions.
    pub fn canonical(&self) -> Vec<Atom> {
        let mut v = self.atoms.clone();
        v.sort_by_key(|a| a.at);
        v
    }

    pub fn with_scale(&self, t: f64) -> Laminate {
        Laminate { scale: t, ..self.clone() }
    }
}

/// `Σ wᵢ Φ(Xᵢ)`.
pub fn moment<F: Fn(&Matrix2) -> f64>(l: &Laminate, phi: F) -> f64 {
    let terms: Vec<f64> = l.atoms.iter().map(|a| to_f64(a.weight) * phi(&a.at.matrix(l.scale))).collect();
    pairwise_sum(&terms)
}

/// `Σ wᵢ Φ(Xᵢ)` in exact arithmetic, for `Φ` acting on the exact coefficients.
pub fn moment_exact<F: Fn(&ExactG) -> Q>(l: &Laminate, phi: F) -> Q {
    l.atoms.iter().map(|a| a.weight * phi(&a.at)).sum()
}

/// `∫|X − avg| dμ / ∫|X^sym − avg| dμ` at `t = 1`.
pub fn first_moment_ratio(m: usize) -> Result<f64> {
    let l = build_laminate(m, 1.0)?;
    let avg = l.average();
    let full = moment(&l, |x| x.sub(&avg).norm());
    let sym = moment(&l, |x| x.sym().sub(&avg).norm());
    Ok(moment_ratio(full, sym))
}

/// `full / sym`, with `0/0 = 0` for the point mass at `m = 0`.
fn moment_ratio(full: f64, sym: f64) -> f64 {
    if full == 0.0 {
        0.0
    } else if sym > 0.0 {
        full / sym
    } else {
        f64::INFINITY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlowupRow {
    pub m: usize,
    pub t_m: f64,
    pub sym_moment: f64,
    pub full_moment: f64,
    pub ratio: f64,
}

/// Solves `r² 2^-m A(2|G(t,t)|) = ½` for `t` by bisection in log scale.
pub fn solve_scale(a: &YoungFunction, m: usize, r: f64) -> Result<f64> {
    let target = 0.5 * 2f64.powi(m as i32) / (r * r);
    let g = |t: f64| a.eval(2.0 * std::f64::consts::SQRT_2 * t) - target;
    let (mut lo, mut hi) = (1e-300f64, 1.0f64);
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::Domain(format!("A never reaches {target}")));
        }
    }
    while g(lo) > 0.0 {
        lo *= 0.5;
        if lo == 0.0 {
            return Err(Error::Domain("A is positive at the origin".into()));
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Per order `m`: `t_m`, `∫A(|X^sym − avg|) dμ`, `∫B(|X − avg|) dμ` and their ratio.
pub fn blowup_curve(a: &YoungFunction, b: &YoungFunction, m_max: usize, r: f64) -> Result<Vec<BlowupRow>> {
    if !a.is_finite_valued() {
        return Err(Error::Domain("A must be finite-valued; for A infinite at large t the condition holds trivially".into()));
    }
    if !(r > 0.0) {
        return Err(Error::Domain(format!("r must be positive, got {r}")));
    }
    (0..=m_max)
        .map(|m| {
            let t_m = solve_scale(a, m, r)?;
            let l = build_laminate(m, t_m)?;
            let avg = l.average();
            let sym_moment = moment(&l, |x| a.eval(x.sym().sub(&avg).norm()));
            let full_moment = moment(&l, |x| b.eval(x.sub(&avg).norm()));
            let ratio = moment_ratio(full_moment, sym_moment);
            Ok(BlowupRow { m, t_m, sym_moment, full_moment, ratio })
        })
        .collect()
}

/// One lamination level: sawtooth of period `eps` along axis `normal`.
#[derive(Debug, Clone, Copy)]
struct Level {
    amplitude: [f64; 2],
    normal: usize,
    lambda: f64,
    eps: f64,
}

/// `u(x) = C x + Σ_l a_l min(h_l(x), R_l(x))` on `(0,r)²`: nested sawtooth
/// laminations, each cut off by a room function vanishing where its parent
/// level is not in its continuation phase, so `u = C x` on the boundary.
#[derive(Debug, Clone)]
pub struct Realization {
    pub laminate: Laminate,
    pub side: f64,
    pub depth: usize,
    levels: Vec<Level>,
}

/// Value and gradient of a Lipschitz function.
type Jet = (f64, [f64; 2]);

fn jet_min(x: Jet, y: Jet) -> Jet {
    if x.0 <= y.0 {
        x
    } else {
        y
    }
}

impl Realization {
    /// `depth` sawtooth periods across the coarsest level and across each
    /// continuation strip of the next.
    pub fn new(l: &Laminate, side: f64, depth: usize) -> Result<Self> {
        if depth == 0 || !(side > 0.0) {
            return Err(Error::Config("depth and side must be positive".into()));
        }
        let t = l.scale;
        let chain = split_chain(l.order)?;
        let mut levels = Vec::with_capacity(chain.len());
        let mut eps = side / depth as f64;
        for sp in &chain {
            let (a, normal) = sp.rank_one()?;
            let lambda = to_f64(sp.lambda);
            levels.push(Level { amplitude: [to_f64(a[0]) * t, to_f64(a[1]) * t], normal, lambda, eps });
            eps *= (1.0 - lambda) / depth as f64;
        }
        Ok(Self { laminate: l.clone(), side, depth, levels })
    }

    /// `v = u − C x` and `∇u` at `x ∈ (0,r)²`.
    pub fn evaluate(&self, x: [f64; 2]) -> ([f64; 2], Matrix2) {
        let c = self.laminate.average();
        let mut v = [0.0; 2];
        let mut grad = c.0;
        let s = self.side;
        // distance to the boundary of the square
        let mut room: Jet = [(x[0], [1.0, 0.0]), (s - x[0], [-1.0, 0.0]), (x[1], [0.0, 1.0]), (s - x[1], [0.0, -1.0])].into_iter().fold((f64::INFINITY, [0.0; 2]), jet_min);
        for lv in &self.levels {
            if room.0 <= 0.0 {
                break;
            }
            let k = lv.normal;
            let phase = (x[k] / lv.eps).rem_euclid(1.0);
            let mut e = [0.0; 2];
            e[k] = 1.0;
            // sawtooth rising with slope 1−λ on [0,λ), falling with slope −λ on [λ,1)
            let h: Jet = if phase < lv.lambda {
                (lv.eps * (1.0 - lv.lambda) * phase, [(1.0 - lv.lambda) * e[0], (1.0 - lv.lambda) * e[1]])
            } else {
                (lv.eps * lv.lambda * (1.0 - phase), [-lv.lambda * e[0], -lv.lambda * e[1]])
            };
            let p = jet_min(h, room);
            for i in 0..2 {
                v[i] += lv.amplitude[i] * p.0;
                for j in 0..2 {
                    grad[i][j] += lv.amplitude[i] * p.1[j];
                }
            }
            if phase < lv.lambda || h.0 >= room.0 {
                break;
            }
            let slack = (room.0 - h.0, [room.1[0] - h.1[0], room.1[1] - h.1[1]]);
            let strip = jet_min((lv.eps * (phase - lv.lambda), [e[0], e[1]]), (lv.eps * (1.0 - phase), [-e[0], -e[1]]));
            room = jet_min(slack, strip);
        }
        (v, Matrix2(grad))
    }

    /// `(1/r²)∫_{(0,r)²} Φ(∇u)` by Monte Carlo with a fixed seed.
    pub fn mean_of<F: Fn(&Matrix2) -> f64 + Sync>(&self, phi: F, samples: usize) -> f64 {
        let chunks = 64usize;
        let per = samples.div_ceil(chunks);
        let sums: Vec<f64> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(QUADRATURE_SEED ^ c as u64);
                let vals: Vec<f64> = (0..per).map(|_| phi(&self.evaluate([rng.gen::<f64>() * self.side, rng.gen::<f64>() * self.side]).1)).collect();
                pairwise_sum(&vals)
            })
            .collect();
        pairwise_sum(&sums) / (per * chunks) as f64
    }

    /// `v = u − C x` sampled at the nodes of a `cells × cells` grid on `(0,r)²`.
    pub fn sample(&self, cells: usize) -> Result<GridField> {
        let grid = Grid::cube(2, cells, 0.0, self.side)?;
        Ok(GridField::from_fn_zero_bc(&grid, |x| {
            let (v, _) = self.evaluate([x[0], x[1]]);
            [v[0], v[1], 0.0]
        }))
    }
}

/// The laminate realized on `(0,r)²` and sampled on a `cells²` grid, minus its affine part.
pub fn realize_field(l: &Laminate, r: f64, depth: usize, cells: usize) -> Result<GridField> {
    Realization::new(l, r, depth)?.sample(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_is_a_point_mass() {
        let l = build_laminate(0, 2.0).unwrap();
        assert_eq!(l.atoms.len(), 1);
        assert_eq!(l.atoms[0].weight, Q::from_integer(1));
        assert_eq!(l.average(), Matrix2::g(2.0, 2.0));
    }

    #[test]
    fn order_one_atoms() {
        let l = build_laminate(1, 1.0).unwrap();
        let want = [(q(1, 2), (1, 1), (1, 1)), (q(1, 3), (1, 2), (-1, 2)), (q(1, 6), (-1, 1), (1, 1))];
        for (atom, (w, a, b)) in l.atoms.iter().zip(want) {
            assert_eq!(atom.weight, w);
            assert_eq!(atom.at, ExactG::new(q(a.0, a.1), q(b.0, b.1)));
        }
        assert_eq!(l.barycenter(), ExactG::new(q(1, 2), q(1, 2)));
    }

    #[test]
    fn splits_are_rank_one() {
        for sp in split_chain(5).unwrap() {
            let (a, n) = sp.rank_one().unwrap();
            assert!(a[n] == Q::from_integer(0));
        }
        let bad = Split { parent: ExactG::new(q(0, 1), q(0, 1)), atom: ExactG::new(q(1, 1), q(1, 1)), continuation: ExactG::new(q(-1, 1), q(-1, 1)), lambda: q(1, 2) };
        assert!(matches!(bad.rank_one(), Err(Error::NotRankOne(_))));
    }

    #[test]
    fn scale_solution_inverts_a() {
        let a = YoungFunction::power(2.0);
        for m in 0..6 {
            let t = solve_scale(&a, m, 0.5).unwrap();
            let lhs = 0.25 * 2f64.powi(-(m as i32)) * a.eval(2.0 * std::f64::consts::SQRT_2 * t);
            assert!((lhs - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn order_zero_realization_is_affine() {
        let l = build_laminate(0, 1.0).unwrap();
        let u = realize_field(&l, 1.0, 8, 8).unwrap();
        assert_eq!(u.max_abs(), 0.0);
    }

    #[test]
    fn realization_matches_the_boundary_values() {
        let l = build_laminate(2, 1.0).unwrap();
        let rz = Realization::new(&l, 1.0, 4).unwrap();
        for s in [0.0, 0.13, 0.5, 0.77, 1.0] {
            for x in [[s, 0.0], [s, 1.0], [0.0, s], [1.0, s]] {
                assert_eq!(rz.evaluate(x).0, [0.0, 0.0]);
            }
        }
    }
}
