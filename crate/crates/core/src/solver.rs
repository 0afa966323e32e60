//! The set-valued map `F = π` whose fixed points are the solutions, its
//! scalar specialization `m`, the order-ascending fixed-point search, and the
//! direct enumeration of the solution set.
//!
//! `π(x)` collects the points `z ∈ C` at which `f(x)(z)` is the smallest
//! element of `{f(x)(t) : t ∈ C}` and `g(Ax)(Az)` is the smallest element of
//! `{g(Ax)(s) : s ∈ D}`. When either set has no smallest element, `π(x)` is
//! empty.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::hypotheses::find_v3_witness;
use crate::model::Instance;
use crate::numerics::{mat_apply, Rational, RationalVector};
use crate::orders::{is_inductive, smallest_index};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error("scalar pairing required: dim(U) = {u_dim}, dim(V) = {v_dim}")]
    UnsupportedRegime { u_dim: usize, v_dim: usize },
}

/// `π(C[c])` as ascending indices into `C`.
pub fn pi_map(i: &Instance, c: usize) -> Vec<usize> {
    let f = i.f_matrix(c);
    let f_values: Vec<RationalVector> = i
        .c()
        .points()
        .iter()
        .map(|t| mat_apply(f, t).expect("validated shape"))
        .collect();
    let Some(f_min) = smallest_index(&f_values, i.u_space().order()) else {
        return Vec::new();
    };

    let g = i.g_matrix(i.image_index(c));
    let g_values: Vec<RationalVector> = i
        .d()
        .points()
        .iter()
        .map(|s| mat_apply(g, s).expect("validated shape"))
        .collect();
    let Some(g_min) = smallest_index(&g_values, i.v_space().order()) else {
        return Vec::new();
    };

    (0..i.c().len())
        .filter(|&z| f_values[z] == f_values[f_min] && g_values[i.image_index(z)] == g_values[g_min])
        .collect()
}

/// `π` evaluated at every point of `C`.
pub fn pi_table(i: &Instance) -> Vec<Vec<usize>> {
    (0..i.c().len()).map(|c| pi_map(i, c)).collect()
}

fn scalar(v: RationalVector) -> Rational {
    v.into_entries().swap_remove(0)
}

fn argmin(values: &[Rational]) -> Vec<usize> {
    let Some(min) = values.iter().min() else {
        return Vec::new();
    };
    (0..values.len()).filter(|&k| &values[k] == min).collect()
}

/// The scalar-pairing map `m(C[c])`: points minimizing `⟨f(x), ·⟩` over `C`
/// whose image minimizes `⟨g(Ax), ·⟩` over `D`. Minima are taken in the
/// usual order of the rationals.
pub fn m_map(i: &Instance, c: usize) -> Result<Vec<usize>, SolverError> {
    if !i.is_scalar() {
        return Err(SolverError::UnsupportedRegime { u_dim: i.u_space().dim(), v_dim: i.v_space().dim() });
    }
    let f = i.f_matrix(c);
    let f_values: Vec<Rational> = i.c().points().iter().map(|t| scalar(mat_apply(f, t).expect("validated shape"))).collect();
    let g = i.g_matrix(i.image_index(c));
    let g_values: Vec<Rational> = i.d().points().iter().map(|s| scalar(mat_apply(g, s).expect("validated shape"))).collect();

    let f_best = argmin(&f_values);
    let g_best = argmin(&g_values);
    Ok(f_best
        .into_iter()
        .filter(|&z| g_best.contains(&i.image_index(z)))
        .collect())
}

/// A run of the ascending fixed-point search.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Ascent {
    pub start: usize,
    /// Visited points, starting with `start`; strictly increasing after it.
    pub trace: Vec<usize>,
    pub fixed_point: Option<usize>,
}

impl Ascent {
    /// Number of successor selections made.
    pub fn selections(&self) -> usize {
        self.trace.len() - 1
    }
}

/// Climbs from `start`: while `x ∉ F(x)`, moves to a `≼`-maximal element of
/// `F(x) ∩ [x)` (smallest index on ties). Stops at a fixed point, or with
/// `fixed_point = None` when `F(x) ∩ [x)` is empty.
pub fn ascend(i: &Instance, start: usize) -> Ascent {
    ascend_with(i, &pi_table(i), start)
}

/// [`ascend`] over a precomputed `π` table.
pub fn ascend_with(i: &Instance, pis: &[Vec<usize>], start: usize) -> Ascent {
    let poset = i.c();
    let mut x = start;
    let mut trace = vec![start];
    // Every step is strict, so at most |C| points are visited.
    while trace.len() <= poset.len() {
        let image = &pis[x];
        if image.contains(&x) {
            return Ascent { start, trace, fixed_point: Some(x) };
        }
        let above: Vec<usize> = image.iter().copied().filter(|&u| poset.le(x, u)).collect();
        let next = above
            .iter()
            .copied()
            .find(|&u| !above.iter().any(|&w| poset.lt(u, w)));
        match next {
            Some(u) => {
                x = u;
                trace.push(u);
            }
            None => break,
        }
    }
    Ascent { start, trace, fixed_point: None }
}

/// `c` satisfies both defining inequalities: `f(c)(x − c) ≽U 0` for all
/// `x ∈ C` and `g(Ac)(y − Ac) ≽V 0` for all `y ∈ D`.
pub fn is_solution(i: &Instance, c: usize) -> bool {
    let xc = i.c().point(c);
    let f = i.f_matrix(c);
    let u_order = i.u_space().order();
    let first = i
        .c()
        .points()
        .iter()
        .all(|x| u_order.in_cone(&mat_apply(f, &(x - xc)).expect("validated shape")));
    if !first {
        return false;
    }
    let yc = i.image(c);
    let g = i.g_matrix(i.image_index(c));
    let v_order = i.v_space().order();
    i.d()
        .points()
        .iter()
        .all(|y| v_order.in_cone(&mat_apply(g, &(y - yc)).expect("validated shape")))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SolutionStructure {
    pub solutions_inductive: bool,
    /// `None` when the instance has no `x′`.
    pub above_inductive: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolveMethod {
    Ascend,
    Enumerate,
    #[default]
    Both,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SolveReport {
    pub solutions: Vec<usize>,
    pub fixed_points: Vec<usize>,
    pub ascent: Option<Ascent>,
    pub maximal_solutions: Vec<usize>,
    pub solutions_above_x_prime: Option<Vec<usize>>,
    pub structure: SolutionStructure,
    /// `Some(false)` when the ascent ended at a point the enumeration does not list.
    pub consistent: Option<bool>,
    pub notes: Vec<String>,
}

/// Solutions straight from the defining inequalities, fixed points of `π`,
/// maximal solutions, and the solutions above `x′`.
pub fn enumerate_solutions(i: &Instance) -> SolveReport {
    let pis = pi_table(i);
    enumerate_with(i, &pis)
}

fn enumerate_with(i: &Instance, pis: &[Vec<usize>]) -> SolveReport {
    let poset = i.c();
    let solutions: Vec<usize> = (0..poset.len()).filter(|&c| is_solution(i, c)).collect();
    let fixed_points: Vec<usize> = (0..poset.len()).filter(|&c| pis[c].contains(&c)).collect();

    let solution_poset = poset.subposet(&solutions);
    let maximal_solutions = solution_poset
        .maximal_indices()
        .into_iter()
        .map(|k| solutions[k])
        .collect();

    let above = i.x_prime().map(|xp| {
        solutions
            .iter()
            .copied()
            .filter(|&s| poset.le(xp, s))
            .collect::<Vec<_>>()
    });
    let structure = SolutionStructure {
        solutions_inductive: is_inductive(&solution_poset),
        above_inductive: above.as_ref().map(|a| is_inductive(&poset.subposet(a))),
    };

    SolveReport {
        solutions,
        fixed_points,
        ascent: None,
        maximal_solutions,
        solutions_above_x_prime: above,
        structure,
        consistent: None,
        notes: Vec::new(),
    }
}

/// Runs the requested method. Enumeration always runs: it is cheap at this
/// scale and is the completeness backstop when the ascent has no start or
/// gets stuck. The ascent starts from `x′`, or from the first `V3` witness
/// when `x′` is absent.
pub fn solve(i: &Instance, method: SolveMethod) -> SolveReport {
    let pis = pi_table(i);
    let mut report = enumerate_with(i, &pis);
    if method == SolveMethod::Enumerate {
        return report;
    }

    let start = match i.x_prime() {
        Some(xp) => Some(xp),
        None => find_v3_witness(i).map(|(c, _)| c),
    };
    let Some(start) = start else {
        report.notes.push("ascent skipped: no x′ and no V3 witness; enumeration governs".to_string());
        return report;
    };
    let ascent = ascend_with(i, &pis, start);
    if ascent.fixed_point.is_none() {
        report.notes.push(format!("ascent from C[{start}] found no ascending successor"));
    }
    if method == SolveMethod::Both {
        report.consistent = Some(ascent.fixed_point.is_none_or(|p| report.solutions.contains(&p)));
    }
    report.ascent = Some(ascent);
    report
}

fn indexed(i: &Instance, indices: &[usize]) -> Value {
    Value::Array(
        indices
            .iter()
            .map(|&k| json!({"index": k, "point": i.c().point(k)}))
            .collect(),
    )
}

impl SolveReport {
    /// JSON with each `C` index accompanied by its coordinates.
    pub fn to_json(&self, i: &Instance) -> Value {
        json!({
            "solutions": indexed(i, &self.solutions),
            "fixed_points": indexed(i, &self.fixed_points),
            "ascent": self.ascent.as_ref().map(|a| json!({
                "start": a.start,
                "trace": indexed(i, &a.trace),
                "fixed_point": a.fixed_point.map(|p| json!({"index": p, "point": i.c().point(p)})),
            })),
            "maximal_solutions": indexed(i, &self.maximal_solutions),
            "solutions_above_x_prime": self.solutions_above_x_prime.as_ref().map(|a| indexed(i, a)),
            "structure": self.structure,
            "consistent": self.consistent,
            "notes": self.notes,
        })
    }
}
