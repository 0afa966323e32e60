//! Brute-force verifiers that certify the theorems on concrete instances.
//!
//! The set computations here are written against the numerics and orders
//! primitives only; they read the raw operator tables and coupling map rather
//! than the cached images and `π` used by [`crate::solver`]. Disagreement
//! between the two is a defect in one of them.
//!
//! A theorem whose hypotheses fail on an instance is reported as
//! [`OracleVerdict::NotApplicable`], never as a failure.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hypotheses::{check_v5, check_v6, full_report, Witness};
use crate::model::{CouplingMap, Instance};
use crate::numerics::{mat_apply, Rational, RationalMatrix, RationalVector};
use crate::orders::{is_chain_complete, is_inductive, maximal_elements, smallest_element};
use crate::solver::{enumerate_solutions, m_map};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleWitness {
    /// Membership of `C[index]` in the fixed-point set and the solution set,
    /// as computed here and by the solver.
    Eq15Mismatch {
        index: usize,
        fixed_point: bool,
        solution: bool,
        solver_fixed_point: bool,
        solver_solution: bool,
    },
    /// A conclusion of the existence theorem that did not hold.
    Conclusion { name: String, solutions: Vec<usize>, x_prime: usize },
    /// `m(index)` differs from the plain argmin set or is empty.
    ArgminCollapse { index: usize, m_map: Vec<usize>, argmin: Vec<usize> },
    /// The split problem and the single inequality disagree at `index`.
    Reduction { index: usize, split: bool, single: bool },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleVerdict {
    Holds,
    Fails(OracleWitness),
    NotApplicable(String),
}

impl OracleVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, OracleVerdict::Holds)
    }

    pub fn fails(&self) -> bool {
        matches!(self, OracleVerdict::Fails(_))
    }
}

impl Serialize for OracleVerdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self {
            OracleVerdict::Holds => map.serialize_entry("verdict", "holds")?,
            OracleVerdict::Fails(w) => {
                map.serialize_entry("verdict", "fails")?;
                map.serialize_entry("witness", w)?;
            }
            OracleVerdict::NotApplicable(reason) => {
                map.serialize_entry("verdict", "not-applicable")?;
                map.serialize_entry("reason", reason)?;
            }
        }
        map.end()
    }
}

/// `A(C[c])` straight from the coupling map.
fn coupled(i: &Instance, c: usize) -> RationalVector {
    match i.coupling() {
        CouplingMap::Linear(m) => mat_apply(m, i.c().point(c)).expect("validated shape"),
        CouplingMap::Table(values) => values[c].clone(),
    }
}

/// `g` at a point of `D`, located by coordinates.
fn g_at<'a>(i: &'a Instance, y: &RationalVector) -> &'a RationalMatrix {
    let k = i.d().points().iter().position(|p| p == y).expect("A maps C into D");
    &i.g().matrices[k]
}

/// `c ∈ π(c)`: `f(c)(c)` is the smallest value of `f(c)` over `C`, and
/// `g(Ac)(Ac)` the smallest value of `g(Ac)` over `D`.
fn oracle_fixed_point(i: &Instance, c: usize) -> bool {
    let xc = i.c().point(c);
    let f = &i.f().matrices[c];
    let f_values: Vec<RationalVector> = i.c().points().iter().map(|t| mat_apply(f, t).unwrap()).collect();
    let at_c = mat_apply(f, xc).unwrap();
    if smallest_element(&f_values, i.u_space().order()) != Some(at_c) {
        return false;
    }
    let yc = coupled(i, c);
    let g = g_at(i, &yc);
    let g_values: Vec<RationalVector> = i.d().points().iter().map(|s| mat_apply(g, s).unwrap()).collect();
    smallest_element(&g_values, i.v_space().order()) == Some(mat_apply(g, &yc).unwrap())
}

/// `c` solves the first inequality: `f(c)(x − c) ≽U 0` for all `x ∈ C`.
fn oracle_first_inequality(i: &Instance, c: usize) -> bool {
    let xc = i.c().point(c);
    let f = &i.f().matrices[c];
    i.c()
        .points()
        .iter()
        .all(|x| i.u_space().order().in_cone(&mat_apply(f, &(x - xc)).unwrap()))
}

/// `c` solves both inequalities.
fn oracle_solution(i: &Instance, c: usize) -> bool {
    if !oracle_first_inequality(i, c) {
        return false;
    }
    let yc = coupled(i, c);
    let g = g_at(i, &yc);
    i.d()
        .points()
        .iter()
        .all(|y| i.v_space().order().in_cone(&mat_apply(g, &(y - &yc)).unwrap()))
}

/// The solution set, computed from the defining inequalities.
pub fn oracle_solutions(i: &Instance) -> Vec<usize> {
    (0..i.c().len()).filter(|&c| oracle_solution(i, c)).collect()
}

/// The fixed-point set of `π`, computed from smallest elements.
pub fn oracle_fixed_points(i: &Instance) -> Vec<usize> {
    (0..i.c().len()).filter(|&c| oracle_fixed_point(i, c)).collect()
}

/// The fixed points of `π` are exactly the solutions, and the solver agrees.
pub fn verify_eq15(i: &Instance) -> OracleVerdict {
    let solver = enumerate_solutions(i);
    for c in 0..i.c().len() {
        let fixed_point = oracle_fixed_point(i, c);
        let solution = oracle_solution(i, c);
        let solver_fixed_point = solver.fixed_points.contains(&c);
        let solver_solution = solver.solutions.contains(&c);
        if fixed_point != solution || fixed_point != solver_fixed_point || solution != solver_solution {
            return OracleVerdict::Fails(OracleWitness::Eq15Mismatch {
                index: c,
                fixed_point,
                solution,
                solver_fixed_point,
                solver_solution,
            });
        }
    }
    OracleVerdict::Holds
}

/// When V1–V4 hold (and `C` is chain-complete), the solution set is a
/// nonempty inductive poset, so is its part above `x′`, and some maximal
/// solution lies above `x′`.
pub fn verify_theorem32(i: &Instance) -> OracleVerdict {
    let report = full_report(i, None);
    let mut unmet: Vec<&str> = [
        ("V1_f", &report.v1_f),
        ("V1_g", &report.v1_g),
        ("V2", &report.v2),
        ("V3", &report.v3),
        ("V4", &report.v4),
    ]
    .into_iter()
    .filter(|(_, v)| !v.holds())
    .map(|(k, _)| k)
    .collect();
    if !is_chain_complete(i.c()) {
        unmet.push("C chain-complete");
    }
    if !unmet.is_empty() {
        return OracleVerdict::NotApplicable(format!("hypotheses not met: {}", unmet.join(", ")));
    }
    let Some(Witness::Ascending { x_prime, .. }) = report.v3.witness().cloned() else {
        unreachable!("a holding V3 verdict carries its witness");
    };

    let solutions = oracle_solutions(i);
    let fail = |name: &str| {
        OracleVerdict::Fails(OracleWitness::Conclusion { name: name.to_string(), solutions: solutions.clone(), x_prime })
    };
    let poset = i.c();
    let sol_poset = poset.subposet(&solutions);
    if solutions.is_empty() || !is_inductive(&sol_poset) {
        return fail("(i) solution set is a nonempty inductive poset");
    }
    let above: Vec<usize> = solutions.iter().copied().filter(|&s| poset.le(x_prime, s)).collect();
    if above.is_empty() || !is_inductive(&poset.subposet(&above)) {
        return fail("(ii) solutions above x′ form a nonempty inductive poset");
    }
    let maximal = maximal_elements(&sol_poset);
    if maximal.is_empty() {
        return fail("(i)′ a maximal solution exists");
    }
    let xp = poset.point(x_prime);
    if !maximal.iter().any(|m| poset.order().le(xp, m)) {
        return fail("(ii)′ a maximal solution lies above x′");
    }
    OracleVerdict::Holds
}

/// Under `A(C) = D` and nonnegative preservation, `m(x)` is the plain argmin
/// set of `⟨f(x), ·⟩` over `C`, and is nonempty.
pub fn verify_lemma41(i: &Instance) -> Result<OracleVerdict, OracleError> {
    if !matches!(i.coupling(), CouplingMap::Linear(_)) {
        return Err(OracleError::UnsupportedRegime("A must be linear".to_string()));
    }
    if !i.is_scalar() {
        return Err(OracleError::UnsupportedRegime(format!(
            "pairings must be scalar, got dim(U) = {}, dim(V) = {}",
            i.u_space().dim(),
            i.v_space().dim()
        )));
    }
    let v5 = check_v5(i);
    let v6 = check_v6(i).expect("scalar regime checked above");
    if !v5.holds() || !v6.holds() {
        let which: Vec<&str> = [("V5", v5.holds()), ("V6", v6.holds())]
            .into_iter()
            .filter(|(_, ok)| !ok)
            .map(|(k, _)| k)
            .collect();
        return Ok(OracleVerdict::NotApplicable(format!("hypotheses not met: {}", which.join(", "))));
    }
    for c in 0..i.c().len() {
        let pairing: Vec<Rational> = i
            .c()
            .points()
            .iter()
            .map(|t| mat_apply(&i.f().matrices[c], t).unwrap().entries()[0].clone())
            .collect();
        let min = pairing.iter().min().expect("C is nonempty");
        let argmin: Vec<usize> = (0..pairing.len()).filter(|&k| &pairing[k] == min).collect();
        let m = m_map(i, c).expect("scalar regime checked above");
        if m.is_empty() || m != argmin {
            return Ok(OracleVerdict::Fails(OracleWitness::ArgminCollapse { index: c, m_map: m, argmin }));
        }
    }
    Ok(OracleVerdict::Holds)
}

/// Why the instance is not of the form `X = Y, U = V, C = D, f = g, A = I`.
fn reduction_shape_mismatch(i: &Instance) -> Option<&'static str> {
    if i.x_space() != i.y_space() {
        return Some("X ≠ Y");
    }
    if i.u_space() != i.v_space() {
        return Some("U ≠ V");
    }
    let mut c_sorted = i.c().points().to_vec();
    let mut d_sorted = i.d().points().to_vec();
    c_sorted.sort();
    d_sorted.sort();
    if c_sorted != d_sorted {
        return Some("C ≠ D");
    }
    let identity = match i.coupling() {
        CouplingMap::Linear(m) => *m == RationalMatrix::identity(i.x_space().dim()),
        CouplingMap::Table(values) => values.as_slice() == i.c().points(),
    };
    if !identity {
        return Some("A is not the identity");
    }
    let same_operator = (0..i.c().len()).all(|c| &i.f().matrices[c] == g_at(i, i.c().point(c)));
    if !same_operator {
        return Some("f ≠ g");
    }
    None
}

/// With `X = Y, U = V, C = D, f = g, A = I`, the split problem has the same
/// solutions as the single ordered inequality over `C`.
pub fn verify_ovi_reduction(i: &Instance) -> OracleVerdict {
    if let Some(reason) = reduction_shape_mismatch(i) {
        return OracleVerdict::NotApplicable(format!("not reduction-shaped: {reason}"));
    }
    let split = enumerate_solutions(i).solutions;
    for c in 0..i.c().len() {
        let single = oracle_first_inequality(i, c);
        if single != split.contains(&c) {
            return OracleVerdict::Fails(OracleWitness::Reduction { index: c, split: !single, single });
        }
    }
    OracleVerdict::Holds
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fixture;
    use crate::model::{InstanceParts, OperatorTable};

    fn with(name: &str, edit: impl FnOnce(&mut InstanceParts)) -> Instance {
        let mut parts = fixture(name).unwrap().to_parts();
        edit(&mut parts);
        Instance::from_parts(parts).unwrap()
    }

    #[test]
    fn eq15_on_fixtures() {
        let e1 = fixture("E1").unwrap();
        assert_eq!(verify_eq15(&e1), OracleVerdict::Holds);
        assert_eq!(oracle_solutions(&e1), vec![0]);
        assert_eq!(oracle_fixed_points(&e1), vec![0]);
        let e2 = fixture("E2").unwrap();
        assert_eq!(verify_eq15(&e2), OracleVerdict::Holds);
        assert_eq!(oracle_solutions(&e2), vec![0]);
        for name in ["E3_antichain", "E4_nonlinearA", "E1_negA"] {
            assert!(verify_eq15(&fixture(name).unwrap()).holds(), "{name}");
        }
    }

    #[test]
    fn theorem32_examples() {
        assert!(verify_theorem32(&fixture("E1").unwrap()).holds());
        assert!(matches!(verify_theorem32(&fixture("E1_negA").unwrap()), OracleVerdict::NotApplicable(_)));
        assert!(matches!(verify_theorem32(&fixture("E3_antichain").unwrap()), OracleVerdict::NotApplicable(_)));
    }

    #[test]
    fn lemma41_examples() {
        assert_eq!(verify_lemma41(&fixture("E1").unwrap()), Ok(OracleVerdict::Holds));
        assert_eq!(m_map(&fixture("E1").unwrap(), 1).unwrap(), vec![0]);
        let wide_d = with("E1", |p| {
            p.d.push(RationalVector::from_i64s(&[6]));
            p.g = OperatorTable::constant(RationalMatrix::from_i64_rows(&[&[1]]), 4);
        });
        assert!(matches!(verify_lemma41(&wide_d), Ok(OracleVerdict::NotApplicable(r)) if r.contains("V5")));
        assert!(matches!(
            verify_lemma41(&fixture("E1_negA").unwrap()),
            Ok(OracleVerdict::NotApplicable(r)) if r.contains("V6")
        ));
        assert!(verify_lemma41(&fixture("E4_nonlinearA").unwrap()).is_err());
        assert!(verify_lemma41(&fixture("E3_antichain").unwrap()).is_err());
    }

    /// V6 only quantifies over points of C; the collapse needs it on
    /// differences too. Here V5 and V6 hold yet `m` is empty everywhere.
    #[test]
    fn lemma41_gap_is_reported_as_a_failure() {
        let i = with("E1", |p| {
            p.c = vec![RationalVector::from_i64s(&[-1]), RationalVector::from_i64s(&[-2])];
            p.d = p.c.clone();
            p.f = OperatorTable::constant(RationalMatrix::from_i64_rows(&[&[1]]), 2);
            p.g = OperatorTable::constant(RationalMatrix::from_i64_rows(&[&[-1]]), 2);
            p.a = CouplingMap::Linear(RationalMatrix::identity(1));
            p.x_prime = None;
        });
        assert!(check_v5(&i).holds());
        assert!(check_v6(&i).unwrap().holds());
        assert_eq!(
            verify_lemma41(&i),
            Ok(OracleVerdict::Fails(OracleWitness::ArgminCollapse { index: 0, m_map: vec![], argmin: vec![1] }))
        );
    }

    #[test]
    fn ovi_reduction_examples() {
        assert!(verify_ovi_reduction(&fixture("E2").unwrap()).holds());
        let perturbed = with("E2", |p| {
            let m = RationalMatrix::from_i64_rows(&[&[2, -1]]);
            p.f.matrices[1] = m.clone();
            p.g.matrices[1] = m;
        });
        assert!(verify_ovi_reduction(&perturbed).holds());
        let OracleVerdict::NotApplicable(reason) = verify_ovi_reduction(&fixture("E1").unwrap()) else {
            panic!("E1 is not reduction-shaped");
        };
        assert!(reason.contains("C ≠ D"));
    }

    #[test]
    fn verdict_json() {
        assert_eq!(serde_json::to_value(OracleVerdict::Holds).unwrap(), serde_json::json!({"verdict": "holds"}));
        let v = serde_json::to_value(verify_ovi_reduction(&fixture("E1").unwrap())).unwrap();
        assert_eq!(v["verdict"], "not-applicable");
        let w = OracleVerdict::Fails(OracleWitness::Reduction { index: 2, split: true, single: false });
        assert_eq!(
            serde_json::to_value(w).unwrap(),
            serde_json::json!({"verdict": "fails", "witness": {"kind": "reduction", "index": 2, "split": true, "single": false}})
        );
    }
}
