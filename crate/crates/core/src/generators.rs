//! Named fixtures and seeded instance generators.
//!
//! Every generator is a pure function of `(seed, SizeParams)`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::hypotheses::full_report;
use crate::model::{CouplingMap, Instance, InstanceParts, ModelError, OperatorTable, SpaceSpec};
use crate::numerics::{kernel_is_trivial, mat_apply, NumericsError, Rational, RationalMatrix, RationalVector};
use crate::orders::{ConeOrder, OrderSpec};
use crate::solver::pi_table;

pub const FIXTURE_NAMES: [&str; 5] = ["E1", "E2", "E3_antichain", "E4_nonlinearA", "E1_negA"];

/// Upper limits on generated instances; chain enumeration stays cheap below them.
pub const MAX_GEN_POINTS: usize = 12;
pub const MAX_GEN_DIM: usize = 3;

const SATISFYING_BUDGET: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GenerationError {
    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),
    #[error("invalid size parameters: {0}")]
    Params(String),
    #[error("no valid instance for seed {seed} within {attempts} attempts")]
    BudgetExhausted { seed: u64, attempts: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// `points` bounds `|C|` and `|D|`; `dim` bounds every space dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SizeParams {
    pub points: usize,
    pub dim: usize,
}

impl Default for SizeParams {
    fn default() -> Self {
        SizeParams { points: 8, dim: 2 }
    }
}

impl SizeParams {
    fn validate(&self) -> Result<(), GenerationError> {
        if !(1..=MAX_GEN_POINTS).contains(&self.points) {
            return Err(GenerationError::Params(format!("points must be in 1..={MAX_GEN_POINTS}, got {}", self.points)));
        }
        if !(1..=MAX_GEN_DIM).contains(&self.dim) {
            return Err(GenerationError::Params(format!("dim must be in 1..={MAX_GEN_DIM}, got {}", self.dim)));
        }
        Ok(())
    }
}

fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

fn v(xs: &[i64]) -> RationalVector {
    RationalVector::from_i64s(xs)
}

fn cw(dim: usize) -> SpaceSpec {
    SpaceSpec::componentwise(dim).expect("positive dimension")
}

fn e1_parts() -> InstanceParts {
    let one = RationalMatrix::from_i64_rows(&[&[1]]);
    InstanceParts {
        x: cw(1),
        y: cw(1),
        u: cw(1),
        v: cw(1),
        c: vec![v(&[0]), v(&[1]), v(&[2])],
        d: vec![v(&[0]), v(&[2]), v(&[4])],
        f: OperatorTable::constant(one.clone(), 3),
        g: OperatorTable::constant(one, 3),
        a: CouplingMap::Linear(RationalMatrix::from_i64_rows(&[&[2]])),
        x_prime: Some(0),
        meta: None,
    }
}

fn square() -> Vec<RationalVector> {
    vec![v(&[0, 0]), v(&[1, 0]), v(&[0, 1]), v(&[1, 1])]
}

fn e2_parts() -> InstanceParts {
    let sum = RationalMatrix::from_i64_rows(&[&[1, 1]]);
    InstanceParts {
        x: cw(2),
        y: cw(2),
        u: cw(1),
        v: cw(1),
        c: square(),
        d: square(),
        f: OperatorTable::constant(sum.clone(), 4),
        g: OperatorTable::constant(sum, 4),
        a: CouplingMap::Linear(RationalMatrix::identity(2)),
        x_prime: Some(0),
        meta: None,
    }
}

/// `f(0) = f(1) = (t ↦ (t, −t))` takes antichain values on `C = {0, 1, 2}`,
/// so `π` is empty there; `f(2) = (t ↦ (t, t))` is minimized at 0, which
/// is not a fixed point. No solutions.
fn e3_parts() -> InstanceParts {
    let split = RationalMatrix::from_i64_rows(&[&[1], &[-1]]);
    let diag = RationalMatrix::from_i64_rows(&[&[1], &[1]]);
    let line = vec![v(&[0]), v(&[1]), v(&[2])];
    InstanceParts {
        x: cw(1),
        y: cw(1),
        u: cw(2),
        v: cw(1),
        c: line.clone(),
        d: line,
        f: OperatorTable { matrices: vec![split.clone(), split, diag] },
        g: OperatorTable::constant(RationalMatrix::from_i64_rows(&[&[1]]), 3),
        a: CouplingMap::Linear(RationalMatrix::identity(1)),
        x_prime: None,
        meta: None,
    }
}

/// E2's `C` with the nonlinear, order-increasing `A(a, b) = (a·b, max(a, b))`
/// tabulated onto `D = A(C)`.
fn e4_parts() -> InstanceParts {
    let sum = RationalMatrix::from_i64_rows(&[&[1, 1]]);
    let d = vec![v(&[0, 0]), v(&[0, 1]), v(&[1, 1])];
    InstanceParts {
        x: cw(2),
        y: cw(2),
        u: cw(1),
        v: cw(1),
        c: square(),
        d,
        f: OperatorTable::constant(sum.clone(), 4),
        g: OperatorTable::constant(sum, 3),
        a: CouplingMap::Table(vec![v(&[0, 0]), v(&[0, 1]), v(&[0, 1]), v(&[1, 1])]),
        x_prime: Some(0),
        meta: None,
    }
}

/// E1 with `A = [−1]` and `D = {0, −1, −2}`: not order-increasing and not
/// nonnegative preserving.
fn e1_neg_a_parts() -> InstanceParts {
    InstanceParts {
        d: vec![v(&[0]), v(&[-1]), v(&[-2])],
        a: CouplingMap::Linear(RationalMatrix::from_i64_rows(&[&[-1]])),
        ..e1_parts()
    }
}

pub fn fixture(name: &str) -> Result<Instance, GenerationError> {
    let parts = match name {
        "E1" => e1_parts(),
        "E2" => e2_parts(),
        "E3_antichain" => e3_parts(),
        "E4_nonlinearA" => e4_parts(),
        "E1_negA" => e1_neg_a_parts(),
        other => return Err(GenerationError::UnknownFixture(other.to_string())),
    };
    Ok(Instance::from_parts(parts)?)
}

/// Mostly small integers, sometimes halves.
fn small(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_bool(0.85) {
        int(rng.gen_range(-2..=2))
    } else {
        Rational::new(rng.gen_range(-3..=3) * 2 + 1, 2).expect("nonzero denominator")
    }
}

fn coordinate(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_bool(0.8) {
        int(rng.gen_range(-3..=3))
    } else {
        Rational::new(rng.gen_range(-3..=2) * 2 + 1, 2).expect("nonzero denominator")
    }
}

fn nonnegative_coordinate(rng: &mut ChaCha8Rng) -> Rational {
    if rng.gen_bool(0.8) {
        int(rng.gen_range(0..=3))
    } else {
        Rational::new(rng.gen_range(0..=2) * 2 + 1, 2).expect("nonzero denominator")
    }
}

fn random_vector(rng: &mut ChaCha8Rng, dim: usize, coord: fn(&mut ChaCha8Rng) -> Rational) -> RationalVector {
    RationalVector::new((0..dim).map(|_| coord(rng)).collect()).expect("positive dimension")
}

/// Up to `n` distinct points; fewer only if the coordinate range runs dry.
fn distinct_points(
    rng: &mut ChaCha8Rng,
    n: usize,
    dim: usize,
    coord: fn(&mut ChaCha8Rng) -> Rational,
) -> Vec<RationalVector> {
    let mut out: Vec<RationalVector> = Vec::with_capacity(n);
    for _ in 0..200 * n {
        if out.len() == n {
            break;
        }
        let p = random_vector(rng, dim, coord);
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RationalMatrix {
    RationalMatrix::new(rows, cols, (0..rows * cols).map(|_| small(rng)).collect()).expect("positive shape")
}

/// Componentwise half the time, otherwise a random pointed cone.
fn random_order(rng: &mut ChaCha8Rng, dim: usize) -> ConeOrder {
    if rng.gen_bool(0.5) {
        return ConeOrder::componentwise(dim).expect("positive dimension");
    }
    for _ in 0..100 {
        let rows = dim + rng.gen_range(0..=1);
        let g = RationalMatrix::new(rows, dim, (0..rows * dim).map(|_| int(rng.gen_range(-2..=2))).collect())
            .expect("positive shape");
        if kernel_is_trivial(&g) {
            return ConeOrder::new(dim, OrderSpec::Cone { generators: g }).expect("pointed cone");
        }
    }
    ConeOrder::componentwise(dim).expect("positive dimension")
}

fn random_space(rng: &mut ChaCha8Rng, dim: usize) -> SpaceSpec {
    SpaceSpec::from_order(random_order(rng, dim))
}

/// `A = P·diag(a)` with positive `a` and a random permutation `P`, with its
/// inverse. Nonnegative entries keep `A` increasing for the componentwise order.
fn scaled_permutation(rng: &mut ChaCha8Rng, n: usize) -> (RationalMatrix, RationalMatrix) {
    let scales = [Rational::new(1, 2).unwrap(), int(1), int(2), int(3)];
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut a = RationalMatrix::zeros(n, n);
    let mut a_inv = RationalMatrix::zeros(n, n);
    for (row, &col) in perm.iter().enumerate() {
        let s = scales.choose(rng).expect("nonempty").clone();
        a_inv.set(col, row, s.recip().expect("positive scale"));
        a.set(row, col, s);
    }
    (a, a_inv)
}

/// `1 + Σ (p_i − min_i)`: positive and increasing for the componentwise order.
fn monotone_weight(points: &[RationalVector], p: &RationalVector) -> Rational {
    (0..p.dim())
        .map(|k| {
            let min = points.iter().map(|q| &q.entries()[k]).min().expect("nonempty set");
            &p.entries()[k] - min
        })
        .sum::<Rational>()
        + int(1)
}

/// A `rows × cols` functional; half the time every row is a positive multiple
/// of one row, which keeps the value set totally ordered.
fn base_functional(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> RationalMatrix {
    if rows > 1 && rng.gen_bool(0.5) {
        let base = random_matrix(rng, 1, cols);
        let multipliers = [int(1), int(2), Rational::new(1, 2).unwrap()];
        let entries = (0..rows)
            .flat_map(|_| {
                let m = multipliers.choose(rng).expect("nonempty").clone();
                base.entries().iter().map(move |x| x * &m).collect::<Vec<_>>()
            })
            .collect();
        RationalMatrix::new(rows, cols, entries).expect("positive shape")
    } else {
        random_matrix(rng, rows, cols)
    }
}

/// Strictly increasing and nonlinear on each coordinate: `t ↦ t·|t| + t`.
fn bend(p: &RationalVector) -> RationalVector {
    RationalVector::new(p.entries().iter().map(|t| t * &t.abs() + t).collect()).expect("positive dimension")
}

fn meta(kind: &str, seed: u64, params: &SizeParams) -> serde_json::Value {
    json!({"generator": kind, "seed": seed, "points": params.points, "dim": params.dim})
}

/// An arbitrary valid instance: `A(C) ⊆ D` holds, nothing else is promised.
pub fn gen_unconstrained(seed: u64, params: &SizeParams) -> Result<Instance, GenerationError> {
    params.validate()?;
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let [xd, yd, ud, vd] = [(); 4].map(|_| rng.gen_range(1..=params.dim));
    let (x, y, u, vs) = (random_space(rng, xd), random_space(rng, yd), random_space(rng, ud), random_space(rng, vd));

    let n_c = rng.gen_range(1..=params.points);
    let c = distinct_points(rng, n_c, xd, coordinate);
    let a = if rng.gen_bool(0.5) {
        CouplingMap::Linear(random_matrix(rng, yd, xd))
    } else {
        // few distinct values, so that tables often collide
        let pool = distinct_points(rng, c.len().div_ceil(2).max(1), yd, coordinate);
        CouplingMap::Table(c.iter().map(|_| pool.choose(rng).expect("nonempty").clone()).collect())
    };
    let images: Vec<RationalVector> = match &a {
        CouplingMap::Linear(m) => c.iter().map(|p| mat_apply(m, p)).collect::<Result<_, _>>()?,
        CouplingMap::Table(values) => values.clone(),
    };
    let mut d: Vec<RationalVector> = Vec::new();
    for w in images {
        if !d.contains(&w) {
            d.push(w);
        }
    }
    let room = params.points.saturating_sub(d.len());
    let extra = rng.gen_range(0..=room);
    for p in distinct_points(rng, extra, yd, coordinate) {
        if !d.contains(&p) {
            d.push(p);
        }
    }
    d.shuffle(rng);

    let f = random_table(rng, c.len(), ud, xd);
    let g = random_table(rng, d.len(), vd, yd);
    let x_prime = rng.gen_bool(0.5).then(|| rng.gen_range(0..c.len()));
    Ok(Instance::from_parts(InstanceParts {
        x,
        y,
        u,
        v: vs,
        c,
        d,
        f,
        g,
        a,
        x_prime,
        meta: Some(meta("unconstrained", seed, params)),
    })?)
}

/// Constant 30% of the time, otherwise independent per point.
fn random_table(rng: &mut ChaCha8Rng, len: usize, rows: usize, cols: usize) -> OperatorTable {
    if rng.gen_bool(0.3) {
        OperatorTable::constant(random_matrix(rng, rows, cols), len)
    } else {
        OperatorTable { matrices: (0..len).map(|_| random_matrix(rng, rows, cols)).collect() }
    }
}

/// An instance satisfying every hypothesis (V1–V6 where applicable, A1–A3),
/// with the V3 witness recorded as `x′`.
///
/// All orders are componentwise and `X = Y`, `U = V` in dimension. With
/// `f(c) = λ(c)·B` and `g(d) = μ(d)·B'` for positive monotone weights, both
/// tables are order-positive over any probes. `A` is either a positive scaled
/// permutation with `B' = B·A⁻¹` (so `⟨g(Ax), At⟩` is a positive multiple of
/// `⟨f(x), t⟩`), or, when `dim(U) > 1`, a coordinatewise increasing
/// nonlinear table. `D = A(C)`. Draws are rejected until every `π(x)` is
/// nonempty and the full report is clean.
pub fn gen_satisfying(seed: u64, params: &SizeParams) -> Result<Instance, GenerationError> {
    params.validate()?;
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..SATISFYING_BUDGET {
        if let Some(i) = try_satisfying(rng, seed, params)? {
            return Ok(i);
        }
    }
    Err(GenerationError::BudgetExhausted { seed, attempts: SATISFYING_BUDGET })
}

fn try_satisfying(rng: &mut ChaCha8Rng, seed: u64, params: &SizeParams) -> Result<Option<Instance>, GenerationError> {
    let n = rng.gen_range(1..=params.dim);
    let p = rng.gen_range(1..=params.dim);
    let n_c = rng.gen_range(2.min(params.points)..=params.points);
    let c = distinct_points(rng, n_c, n, nonnegative_coordinate);

    let bf = base_functional(rng, p, n);
    let (a, d, bg) = if p > 1 && rng.gen_bool(0.5) {
        let images: Vec<_> = c.iter().map(bend).collect();
        (CouplingMap::Table(images.clone()), images, base_functional(rng, p, n))
    } else {
        let (a, a_inv) = scaled_permutation(rng, n);
        let images = c.iter().map(|x| mat_apply(&a, x)).collect::<Result<Vec<_>, _>>()?;
        let bg = bf.mul(&a_inv)?;
        (CouplingMap::Linear(a), images, bg)
    };
    let f = OperatorTable { matrices: c.iter().map(|x| bf.scale(&monotone_weight(&c, x))).collect() };
    let g = OperatorTable { matrices: d.iter().map(|y| bg.scale(&monotone_weight(&d, y))).collect() };

    let mut parts = InstanceParts {
        x: cw(n),
        y: cw(n),
        u: cw(p),
        v: cw(p),
        c,
        d,
        f,
        g,
        a,
        x_prime: None,
        meta: Some(meta("satisfying", seed, params)),
    };
    let draft = Instance::from_parts(parts.clone())?;
    let pis = pi_table(&draft);
    if pis.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    // Prefer a start strictly below its witness so the ascent has work to do.
    let poset = draft.c();
    let strict = (0..poset.len()).find(|&x| pis[x].iter().any(|&u| poset.lt(x, u)));
    let reflexive = (0..poset.len()).find(|&x| pis[x].contains(&x));
    let Some(x_prime) = strict.or(reflexive) else {
        return Ok(None);
    };
    parts.x_prime = Some(x_prime);
    let instance = Instance::from_parts(parts)?;
    if !full_report(&instance, None).all_applicable_hold() {
        return Ok(None);
    }
    Ok(Some(instance))
}

/// A scalar instance with linear `A`, `A(C) = D`, and `⟨g(Ax), A·⟩` a positive
/// multiple of `⟨f(x), ·⟩` for every `x`, so nonnegative preservation holds
/// for every direction, not only for points of `C`.
pub fn gen_lemma41(seed: u64, params: &SizeParams) -> Result<Instance, GenerationError> {
    params.validate()?;
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=params.dim);
    let x = random_space(rng, n);
    let y = random_space(rng, n);
    let n_c = rng.gen_range(1..=params.points);
    let c = distinct_points(rng, n_c, n, coordinate);
    let (a, a_inv) = scaled_permutation(rng, n);
    let d = c.iter().map(|p| mat_apply(&a, p)).collect::<Result<Vec<_>, _>>()?;
    let f: Vec<RationalMatrix> = c.iter().map(|_| random_matrix(rng, 1, n)).collect();
    let scales = [Rational::new(1, 2).unwrap(), int(1), int(2), int(3)];
    let g = f
        .iter()
        .map(|row| Ok(row.mul(&a_inv)?.scale(scales.choose(rng).expect("nonempty"))))
        .collect::<Result<Vec<_>, NumericsError>>()?;
    Ok(Instance::from_parts(InstanceParts {
        x,
        y,
        u: cw(1),
        v: cw(1),
        c,
        d,
        f: OperatorTable { matrices: f },
        g: OperatorTable { matrices: g },
        a: CouplingMap::Linear(a),
        x_prime: None,
        meta: Some(meta("lemma41", seed, params)),
    })?)
}

/// `X = Y`, `U = V`, `C = D`, `f = g`, `A = I` (as a matrix or a table).
pub fn gen_ovi(seed: u64, params: &SizeParams) -> Result<Instance, GenerationError> {
    params.validate()?;
    let rng = &mut ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=params.dim);
    let p = rng.gen_range(1..=params.dim);
    let x = random_space(rng, n);
    let u = random_space(rng, p);
    let n_c = rng.gen_range(1..=params.points);
    let c = distinct_points(rng, n_c, n, coordinate);
    let f = random_table(rng, c.len(), p, n);
    let a = if rng.gen_bool(0.5) {
        CouplingMap::Linear(RationalMatrix::identity(n))
    } else {
        CouplingMap::Table(c.clone())
    };
    let x_prime = rng.gen_bool(0.5).then(|| rng.gen_range(0..c.len()));
    Ok(Instance::from_parts(InstanceParts {
        y: x.clone(),
        x,
        v: u.clone(),
        u,
        d: c.clone(),
        c,
        g: f.clone(),
        f,
        a,
        x_prime,
        meta: Some(meta("ovi", seed, params)),
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{load_instance, save_instance};

    #[test]
    fn fixtures_load() {
        for name in FIXTURE_NAMES {
            let i = fixture(name).unwrap();
            assert_eq!(load_instance(&save_instance(&i)).unwrap(), i);
        }
        assert!(matches!(fixture("E9"), Err(GenerationError::UnknownFixture(_))));
    }

    #[test]
    fn generators_are_deterministic() {
        let p = SizeParams { points: 10, dim: 3 };
        for seed in 0..5 {
            assert_eq!(gen_unconstrained(seed, &p).unwrap(), gen_unconstrained(seed, &p).unwrap());
            assert_eq!(gen_satisfying(seed, &p).unwrap(), gen_satisfying(seed, &p).unwrap());
            assert_eq!(gen_lemma41(seed, &p).unwrap(), gen_lemma41(seed, &p).unwrap());
            assert_eq!(gen_ovi(seed, &p).unwrap(), gen_ovi(seed, &p).unwrap());
        }
        assert_ne!(gen_unconstrained(1, &p).unwrap(), gen_unconstrained(2, &p).unwrap());
    }

    #[test]
    fn params_are_checked() {
        assert!(matches!(gen_unconstrained(0, &SizeParams { points: 13, dim: 2 }), Err(GenerationError::Params(_))));
        assert!(matches!(gen_satisfying(0, &SizeParams { points: 4, dim: 0 }), Err(GenerationError::Params(_))));
    }

    #[test]
    fn satisfying_instances_report_clean() {
        let p = SizeParams { points: 8, dim: 3 };
        for seed in 1..=3 {
            let i = gen_satisfying(seed, &p).unwrap();
            let r = full_report(&i, None);
            assert!(r.all_applicable_hold(), "seed {seed}: {:?}", r.failures());
            assert!(r.existence_hypotheses_hold());
        }
    }

    #[test]
    fn bend_is_increasing() {
        let pts: Vec<_> = (-4..=4).map(|k| RationalVector::new(vec![Rational::new(k, 2).unwrap()]).unwrap()).collect();
        for w in pts.windows(2) {
            assert!(bend(&w[0]).entries()[0] < bend(&w[1]).entries()[0]);
        }
    }
}
