//! Decision procedures for the existence hypotheses.
//!
//! | key  | condition                                                      |
//! |------|----------------------------------------------------------------|
//! | V1   | `f` and `g` are order-positive (checked over a probe set)       |
//! | V2   | every `π(x)` is nonempty and universally inductive in `C`       |
//! | V3   | some `x′ ∈ C` has `u′ ∈ π(x′)` with `x′ ≼ u′`                   |
//! | V4   | `A` is order-increasing on `C`                                  |
//! | V5   | `A(C) = D`                                                      |
//! | V6   | `⟨f(x), t⟩ ≥ 0 ⇒ ⟨g(Ax), At⟩ ≥ 0` for `x, t ∈ C` (scalar only)  |
//! | A1   | `π` is increasing upward                                        |
//! | A2   | same as V2                                                      |
//! | A3   | same as V3                                                      |
//!
//! Order-positivity quantifies over every `z ∈ X`; here it is checked over a
//! finite [`ProbeSet`]. The default probes `{t − z : t, z ∈ C}` for `f` and
//! `{s − A(z) : s ∈ D, z ∈ C}` for `g` are exactly the directions needed to
//! push `π(x₁)` into `π(x₂)` when `x₁ ≼ x₂`.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::model::Instance;
use crate::numerics::{mat_apply, NumericsError, RationalVector};
use crate::orders::is_universally_inductive;
use crate::solver::pi_table;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypothesisError {
    #[error("nonnegative preservation needs scalar pairings: dim(U) = {u_dim}, dim(V) = {v_dim}")]
    UnsupportedRegime { u_dim: usize, v_dim: usize },
    #[error("probe set must be nonempty")]
    EmptyProbes,
    #[error("probe {index} has dimension {found}, expected {expected}")]
    ProbeDimension { index: usize, expected: usize, found: usize },
}

/// Finite stand-in for the quantifier "for all z" in order-positivity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSet {
    vectors: Vec<RationalVector>,
}

impl ProbeSet {
    /// Probes for a space of dimension `dim`; duplicates are dropped.
    pub fn new(vectors: Vec<RationalVector>, dim: usize) -> Result<Self, HypothesisError> {
        if vectors.is_empty() {
            return Err(HypothesisError::EmptyProbes);
        }
        if let Some((index, v)) = vectors.iter().enumerate().find(|(_, v)| v.dim() != dim) {
            return Err(HypothesisError::ProbeDimension { index, expected: dim, found: v.dim() });
        }
        Ok(ProbeSet { vectors: dedup(vectors) })
    }

    /// `{t − z : t, z ∈ C}`.
    pub fn default_f(i: &Instance) -> Self {
        let pts = i.c().points();
        let diffs = pts.iter().flat_map(|t| pts.iter().map(move |z| t - z)).collect();
        ProbeSet { vectors: dedup(diffs) }
    }

    /// `{s − A(z) : s ∈ D, z ∈ C}`.
    pub fn default_g(i: &Instance) -> Self {
        let diffs = i
            .d()
            .points()
            .iter()
            .flat_map(|s| (0..i.c().len()).map(move |z| s - i.image(z)))
            .collect();
        ProbeSet { vectors: dedup(diffs) }
    }

    pub fn vectors(&self) -> &[RationalVector] {
        &self.vectors
    }
}

fn dedup(vectors: Vec<RationalVector>) -> Vec<RationalVector> {
    let mut out: Vec<RationalVector> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if !out.contains(&v) {
            out.push(v);
        }
    }
    out
}

/// Probe overrides for [`full_report`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProbeSets {
    pub f: ProbeSet,
    pub g: ProbeSet,
}

/// Concrete evidence attached to a verdict. Indices refer to `C` unless noted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `f(lower)(probe) ≽ 0` but not `f(upper)(probe) ≽ 0`; for `g` the
    /// indices refer to `D`.
    OrderPositive { lower: usize, upper: usize, probe: RationalVector },
    /// `lower ≼ upper` in `C` but `A(lower) ⋠ A(upper)`.
    NotIncreasing { lower: usize, upper: usize },
    /// `π(index)` is empty or not universally inductive.
    BadImage { index: usize, image: Vec<usize> },
    /// `u_prime ∈ π(x_prime)` with `x_prime ≼ u_prime`.
    Ascending { x_prime: usize, u_prime: usize },
    /// None of these starting points has an ascending element in its image.
    NoAscendingStart { searched: Vec<usize> },
    /// Points of `D` (as `D` indices) outside `A(C)`.
    Uncovered { d_indices: Vec<usize> },
    /// `⟨f(x), t⟩ ≥ 0` but `⟨g(Ax), At⟩ < 0`.
    Pairing { x: usize, t: usize },
    /// `lower ≼ upper`, `z ∈ π(lower)`, but no `w ∈ π(upper)` with `z ≼ w`.
    NotIncreasingUpward { lower: usize, upper: usize, z: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds(Option<Witness>),
    Fails(Witness),
    NotApplicable(String),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds(_))
    }

    pub fn fails(&self) -> bool {
        matches!(self, Verdict::Fails(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds(w) => w.as_ref(),
            Verdict::Fails(w) => Some(w),
            Verdict::NotApplicable(_) => None,
        }
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(None)?;
        match self {
            Verdict::Holds(w) => {
                map.serialize_entry("holds", &true)?;
                if let Some(w) = w {
                    map.serialize_entry("witness", w)?;
                }
            }
            Verdict::Fails(w) => {
                map.serialize_entry("holds", &false)?;
                map.serialize_entry("witness", w)?;
            }
            Verdict::NotApplicable(reason) => {
                map.serialize_entry("holds", &Option::<bool>::None)?;
                map.serialize_entry("reason", reason)?;
            }
        }
        map.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    #[serde(rename = "V1_f")]
    pub v1_f: Verdict,
    #[serde(rename = "V1_g")]
    pub v1_g: Verdict,
    #[serde(rename = "V2")]
    pub v2: Verdict,
    #[serde(rename = "V3")]
    pub v3: Verdict,
    #[serde(rename = "V4")]
    pub v4: Verdict,
    #[serde(rename = "V5")]
    pub v5: Verdict,
    #[serde(rename = "V6")]
    pub v6: Verdict,
    #[serde(rename = "A1")]
    pub a1: Verdict,
    #[serde(rename = "A2")]
    pub a2: Verdict,
    #[serde(rename = "A3")]
    pub a3: Verdict,
}

impl HypothesisReport {
    pub fn entries(&self) -> [(&'static str, &Verdict); 10] {
        [
            ("V1_f", &self.v1_f),
            ("V1_g", &self.v1_g),
            ("V2", &self.v2),
            ("V3", &self.v3),
            ("V4", &self.v4),
            ("V5", &self.v5),
            ("V6", &self.v6),
            ("A1", &self.a1),
            ("A2", &self.a2),
            ("A3", &self.a3),
        ]
    }

    /// Names of the conditions that fail.
    pub fn failures(&self) -> Vec<&'static str> {
        self.entries().into_iter().filter(|(_, v)| v.fails()).map(|(k, _)| k).collect()
    }

    /// No applicable condition fails.
    pub fn all_applicable_hold(&self) -> bool {
        self.failures().is_empty()
    }

    /// The hypotheses of the main existence theorem: V1 (both), V2, V3, V4.
    pub fn existence_hypotheses_hold(&self) -> bool {
        [&self.v1_f, &self.v1_g, &self.v2, &self.v3, &self.v4].iter().all(|v| v.holds())
    }
}

/// Checks order-positivity of a table of linear maps over an ordered index set.
///
/// `maps[k]` is applied to each probe; `le(a, b)` is the order on the index
/// set and `in_cone` tests nonnegativity in the target space.
fn order_positive(
    n: usize,
    le: impl Fn(usize, usize) -> bool,
    nonnegative: impl Fn(usize, &RationalVector) -> bool,
    probes: &ProbeSet,
) -> Verdict {
    let table: Vec<Vec<bool>> = (0..n)
        .map(|k| probes.vectors().iter().map(|z| nonnegative(k, z)).collect())
        .collect();
    for lower in 0..n {
        for upper in 0..n {
            if lower == upper || !le(lower, upper) {
                continue;
            }
            if let Some(p) = (0..probes.vectors().len()).find(|&p| table[lower][p] && !table[upper][p]) {
                return Verdict::Fails(Witness::OrderPositive { lower, upper, probe: probes.vectors()[p].clone() });
            }
        }
    }
    Verdict::Holds(None)
}

/// Order-positivity of `f` over `probes` (vectors of `X`).
pub fn check_order_positive_f(i: &Instance, probes: &ProbeSet) -> Verdict {
    let order = i.u_space().order();
    order_positive(
        i.c().len(),
        |a, b| i.c().le(a, b),
        |k, z| order.in_cone(&mat_apply(i.f_matrix(k), z).expect("probe dimension matches X")),
        probes,
    )
}

/// Order-positivity of `g` over `probes` (vectors of `Y`); witnesses index `D`.
pub fn check_order_positive_g(i: &Instance, probes: &ProbeSet) -> Verdict {
    let order = i.v_space().order();
    order_positive(
        i.d().len(),
        |a, b| i.d().le(a, b),
        |k, z| order.in_cone(&mat_apply(i.g_matrix(k), z).expect("probe dimension matches Y")),
        probes,
    )
}

pub fn check_a_increasing(i: &Instance) -> Verdict {
    let n = i.c().len();
    for lower in 0..n {
        for upper in 0..n {
            if i.c().lt(lower, upper) && !i.d().le(i.image_index(lower), i.image_index(upper)) {
                return Verdict::Fails(Witness::NotIncreasing { lower, upper });
            }
        }
    }
    Verdict::Holds(None)
}

pub fn check_v2(i: &Instance) -> Verdict {
    check_v2_with(i, &pi_table(i))
}

fn check_v2_with(i: &Instance, pis: &[Vec<usize>]) -> Verdict {
    for (c, image) in pis.iter().enumerate() {
        let ok = !image.is_empty() && is_universally_inductive(&i.c().subposet(image), i.c());
        if !ok {
            return Verdict::Fails(Witness::BadImage { index: c, image: image.clone() });
        }
    }
    Verdict::Holds(None)
}

/// A pair `(x′, u′)` with `u′ ∈ π(x′)` and `x′ ≼ u′`. Uses the instance's
/// `x′` when present, otherwise scans `C` in index order.
pub fn find_v3_witness(i: &Instance) -> Option<(usize, usize)> {
    find_v3_with(i, &pi_table(i))
}

fn v3_candidates(i: &Instance) -> Vec<usize> {
    match i.x_prime() {
        Some(xp) => vec![xp],
        None => (0..i.c().len()).collect(),
    }
}

fn find_v3_with(i: &Instance, pis: &[Vec<usize>]) -> Option<(usize, usize)> {
    v3_candidates(i)
        .into_iter()
        .find_map(|c| pis[c].iter().find(|&&u| i.c().le(c, u)).map(|&u| (c, u)))
}

fn v3_verdict(i: &Instance, pis: &[Vec<usize>]) -> Verdict {
    match find_v3_with(i, pis) {
        Some((x_prime, u_prime)) => Verdict::Holds(Some(Witness::Ascending { x_prime, u_prime })),
        None => Verdict::Fails(Witness::NoAscendingStart { searched: v3_candidates(i) }),
    }
}

/// `A(C) = D` as sets.
pub fn check_v5(i: &Instance) -> Verdict {
    let hit: Vec<usize> = (0..i.c().len()).map(|c| i.image_index(c)).collect();
    let uncovered: Vec<usize> = (0..i.d().len()).filter(|d| !hit.contains(d)).collect();
    if uncovered.is_empty() {
        Verdict::Holds(None)
    } else {
        Verdict::Fails(Witness::Uncovered { d_indices: uncovered })
    }
}

/// Nonnegative preservation: for all `x, t ∈ C`, `⟨f(x), t⟩ ≥ 0` implies
/// `⟨g(Ax), A t⟩ ≥ 0`, with `≥` the usual order of the rationals.
pub fn check_v6(i: &Instance) -> Result<Verdict, HypothesisError> {
    if !i.is_scalar() {
        return Err(HypothesisError::UnsupportedRegime { u_dim: i.u_space().dim(), v_dim: i.v_space().dim() });
    }
    let pair = |m, w| -> Result<bool, NumericsError> { Ok(!mat_apply(m, w)?.entries()[0].is_negative()) };
    let n = i.c().len();
    for x in 0..n {
        let g = i.g_matrix(i.image_index(x));
        for t in 0..n {
            let premise = pair(i.f_matrix(x), i.c().point(t)).expect("validated shape");
            if premise && !pair(g, i.image(t)).expect("validated shape") {
                return Ok(Verdict::Fails(Witness::Pairing { x, t }));
            }
        }
    }
    Ok(Verdict::Holds(None))
}

/// `π` is increasing upward: `x₁ ≼ x₂` and `z ∈ π(x₁)` give some
/// `w ∈ π(x₂)` with `z ≼ w`.
pub fn check_a1(i: &Instance) -> Verdict {
    check_a1_with(i, &pi_table(i))
}

fn check_a1_with(i: &Instance, pis: &[Vec<usize>]) -> Verdict {
    let poset = i.c();
    for lower in 0..poset.len() {
        for upper in 0..poset.len() {
            if !poset.le(lower, upper) {
                continue;
            }
            if let Some(&z) = pis[lower].iter().find(|&&z| !pis[upper].iter().any(|&w| poset.le(z, w))) {
                return Verdict::Fails(Witness::NotIncreasingUpward { lower, upper, z });
            }
        }
    }
    Verdict::Holds(None)
}

/// Every condition, with the default probe sets unless `probes` is given.
pub fn full_report(i: &Instance, probes: Option<&ProbeSets>) -> HypothesisReport {
    let pis = pi_table(i);
    let (pf, pg) = match probes {
        Some(p) => (p.f.clone(), p.g.clone()),
        None => (ProbeSet::default_f(i), ProbeSet::default_g(i)),
    };
    let v2 = check_v2_with(i, &pis);
    let v3 = v3_verdict(i, &pis);
    HypothesisReport {
        v1_f: check_order_positive_f(i, &pf),
        v1_g: check_order_positive_g(i, &pg),
        a2: v2.clone(),
        a3: v3.clone(),
        v2,
        v3,
        v4: check_a_increasing(i),
        v5: check_v5(i),
        v6: check_v6(i).unwrap_or_else(|e| Verdict::NotApplicable(e.to_string())),
        a1: check_a1_with(i, &pis),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::fixture;
    use crate::model::{CouplingMap, Instance, InstanceParts, OperatorTable, SpaceSpec};
    use crate::numerics::{Rational, RationalMatrix};

    fn m(x: i64) -> RationalMatrix {
        RationalMatrix::from_i64_rows(&[&[x]])
    }

    fn v(xs: &[i64]) -> RationalVector {
        RationalVector::from_i64s(xs)
    }

    /// Scalar instance on the line with the given sets, tables and coupling.
    fn line(c: &[i64], d: &[i64], f: &[i64], g: &[i64], a: i64) -> Instance {
        let s = || SpaceSpec::componentwise(1).unwrap();
        Instance::from_parts(InstanceParts {
            x: s(),
            y: s(),
            u: s(),
            v: s(),
            c: c.iter().map(|&k| v(&[k])).collect(),
            d: d.iter().map(|&k| v(&[k])).collect(),
            f: OperatorTable { matrices: f.iter().map(|&k| m(k)).collect() },
            g: OperatorTable { matrices: g.iter().map(|&k| m(k)).collect() },
            a: CouplingMap::Linear(m(a)),
            x_prime: None,
            meta: None,
        })
        .unwrap()
    }

    #[test]
    fn order_positive_f_examples() {
        let e1 = fixture("E1").unwrap();
        assert!(check_order_positive_f(&e1, &ProbeSet::default_f(&e1)).holds());

        // f(c) = s(c)·B with s positive and monotone
        let mut parts = fixture("E2").unwrap().to_parts();
        let base = RationalMatrix::from_i64_rows(&[&[1, -2]]);
        parts.f.matrices = (1..=4).map(|s| base.scale(&Rational::from_integer(s))).collect();
        let scaled = Instance::from_parts(parts).unwrap();
        let wide = ProbeSet::new(
            (-2..=2).flat_map(|a| (-2..=2).map(move |b| v(&[a, b]))).collect(),
            2,
        )
        .unwrap();
        assert!(check_order_positive_f(&scaled, &wide).holds());

        let flip = line(&[0, 1], &[0, 1], &[1, -1], &[1, 1], 1);
        let probes = ProbeSet::new(vec![v(&[1])], 1).unwrap();
        assert_eq!(
            check_order_positive_f(&flip, &probes),
            Verdict::Fails(Witness::OrderPositive { lower: 0, upper: 1, probe: v(&[1]) })
        );
    }

    #[test]
    fn order_positive_g_examples() {
        let e1 = fixture("E1").unwrap();
        assert!(check_order_positive_g(&e1, &ProbeSet::default_g(&e1)).holds());

        let constant = line(&[0, 1], &[0, 1], &[1, 1], &[3, 3], 1);
        assert!(check_order_positive_g(&constant, &ProbeSet::default_g(&constant)).holds());

        let flip = line(&[0, 1], &[0, 2], &[1, 1], &[1, -1], 2);
        let probes = ProbeSet::new(vec![v(&[1])], 1).unwrap();
        assert_eq!(
            check_order_positive_g(&flip, &probes),
            Verdict::Fails(Witness::OrderPositive { lower: 0, upper: 1, probe: v(&[1]) })
        );
    }

    #[test]
    fn a_increasing_examples() {
        assert!(check_a_increasing(&fixture("E1").unwrap()).holds());
        assert!(check_a_increasing(&fixture("E2").unwrap()).holds());
        let neg = line(&[0, 1], &[0, -1], &[1, 1], &[1, 1], -1);
        assert_eq!(check_a_increasing(&neg), Verdict::Fails(Witness::NotIncreasing { lower: 0, upper: 1 }));
    }

    #[test]
    fn v2_examples() {
        assert!(check_v2(&fixture("E1").unwrap()).holds());
        assert!(check_v2(&fixture("E2").unwrap()).holds());
        let e3 = fixture("E3_antichain").unwrap();
        assert_eq!(check_v2(&e3), Verdict::Fails(Witness::BadImage { index: 0, image: vec![] }));
    }

    #[test]
    fn v3_examples() {
        let e1 = fixture("E1").unwrap();
        assert_eq!(find_v3_witness(&e1), Some((0, 0)));
        let mut parts = e1.to_parts();
        parts.x_prime = Some(2);
        assert_eq!(find_v3_witness(&Instance::from_parts(parts).unwrap()), None);
        parts = e1.to_parts();
        parts.x_prime = None;
        assert_eq!(find_v3_witness(&Instance::from_parts(parts).unwrap()), Some((0, 0)));
    }

    #[test]
    fn v5_examples() {
        assert!(check_v5(&fixture("E1").unwrap()).holds());
        let wider = line(&[0, 1, 2], &[0, 2, 4, 6], &[1, 1, 1], &[1, 1, 1, 1], 2);
        assert_eq!(check_v5(&wider), Verdict::Fails(Witness::Uncovered { d_indices: vec![3] }));
        assert!(check_v5(&fixture("E2").unwrap()).holds());
    }

    #[test]
    fn v6_examples() {
        assert!(check_v6(&fixture("E1").unwrap()).unwrap().holds());
        let neg = line(&[0, 1], &[0, -1], &[1, 1], &[1, 1], -1);
        assert_eq!(check_v6(&neg).unwrap(), Verdict::Fails(Witness::Pairing { x: 0, t: 1 }));
        let zero = line(&[0, 1], &[0, -1], &[1, -1], &[0, 0], -1);
        assert!(check_v6(&zero).unwrap().holds());
        assert!(matches!(
            check_v6(&fixture("E3_antichain").unwrap()),
            Err(HypothesisError::UnsupportedRegime { u_dim: 2, v_dim: 1 })
        ));
    }

    #[test]
    fn full_report_on_e1_and_variants() {
        let r = full_report(&fixture("E1").unwrap(), None);
        assert!(r.all_applicable_hold(), "{:?}", r.failures());
        assert!(r.entries().iter().all(|(_, v)| v.holds()));

        let r = full_report(&fixture("E1_negA").unwrap(), None);
        let failures = r.failures();
        assert!(failures.contains(&"V4") && failures.contains(&"V6"), "{failures:?}");

        let r = full_report(&fixture("E3_antichain").unwrap(), None);
        assert!(r.v2.fails() && r.a2.fails());
    }

    #[test]
    fn probe_set_validation() {
        assert_eq!(ProbeSet::new(vec![], 1), Err(HypothesisError::EmptyProbes));
        assert!(matches!(ProbeSet::new(vec![v(&[1]), v(&[1, 2])], 1), Err(HypothesisError::ProbeDimension { index: 1, .. })));
        assert_eq!(ProbeSet::new(vec![v(&[1]), v(&[1])], 1).unwrap().vectors().len(), 1);
    }

    #[test]
    fn verdict_json() {
        let j = serde_json::to_value(Verdict::Fails(Witness::Pairing { x: 0, t: 1 })).unwrap();
        assert_eq!(j, serde_json::json!({"holds": false, "witness": {"kind": "pairing", "x": 0, "t": 1}}));
        let j = serde_json::to_value(Verdict::NotApplicable("n/a".into())).unwrap();
        assert_eq!(j, serde_json::json!({"holds": null, "reason": "n/a"}));
    }
}
