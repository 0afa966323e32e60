//! Polyhedral cone orders and the finite-poset predicates built on them.
//!
//! An order on `Q^n` is either the componentwise order or the order induced by
//! a pointed polyhedral cone `{w : G·w >= 0}`: `u ≼ v` iff `G·(v − u) >= 0`.
//! Cone orders are automatically translation invariant and preserved by
//! nonnegative scaling; pointedness (`ker G = {0}`) gives antisymmetry.
//!
//! The chain predicates enumerate maximal chains and are exponential in the
//! worst case, so [`FinitePoset`] enforces a point cap ([`DEFAULT_MAX_POINTS`]).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{kernel_is_trivial, mat_apply, RationalMatrix, RationalVector};

/// Hard cap on the number of points in a [`FinitePoset`] unless overridden.
pub const DEFAULT_MAX_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("dimension mismatch: order has dimension {expected}, vector has {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone generators have {found} columns, expected {expected}")]
    GeneratorShape { expected: usize, found: usize },
    #[error("cone is not pointed: generator matrix has a nontrivial kernel")]
    NotPointed,
    #[error("order dimension must be positive")]
    ZeroDimension,
    #[error("point {second} duplicates point {first}")]
    DuplicatePoint { first: usize, second: usize },
    #[error("{count} points exceed the cap of {cap}")]
    TooManyPoints { count: usize, cap: usize },
}

/// Serialized form of an order, without its dimension.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum OrderSpec {
    Componentwise,
    Cone { generators: RationalMatrix },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeOrder {
    dim: usize,
    spec: OrderSpec,
}

impl ConeOrder {
    pub fn componentwise(dim: usize) -> Result<Self, OrderError> {
        Self::new(dim, OrderSpec::Componentwise)
    }

    /// The order whose cone is `{w : generators · w >= 0}`.
    pub fn cone(generators: RationalMatrix) -> Result<Self, OrderError> {
        let dim = generators.cols();
        Self::new(dim, OrderSpec::Cone { generators })
    }

    pub fn new(dim: usize, spec: OrderSpec) -> Result<Self, OrderError> {
        if dim == 0 {
            return Err(OrderError::ZeroDimension);
        }
        if let OrderSpec::Cone { generators } = &spec {
            if generators.cols() != dim {
                return Err(OrderError::GeneratorShape { expected: dim, found: generators.cols() });
            }
            if !kernel_is_trivial(generators) {
                return Err(OrderError::NotPointed);
            }
        }
        Ok(ConeOrder { dim, spec })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &OrderSpec {
        &self.spec
    }

    /// `w` lies in the order cone, i.e. `w ≽ 0`.
    pub fn in_cone(&self, w: &RationalVector) -> bool {
        assert_eq!(w.dim(), self.dim, "order dimension mismatch");
        match &self.spec {
            OrderSpec::Componentwise => w.is_nonnegative(),
            OrderSpec::Cone { generators } => mat_apply(generators, w)
                .expect("generator columns equal the order dimension")
                .is_nonnegative(),
        }
    }

    /// `u ≼ v`. Panics on a dimension mismatch; see [`leq`] for the checked form.
    pub fn le(&self, u: &RationalVector, v: &RationalVector) -> bool {
        self.in_cone(&(v - u))
    }

    fn check_dim(&self, v: &RationalVector) -> Result<(), OrderError> {
        if v.dim() != self.dim {
            return Err(OrderError::DimensionMismatch { expected: self.dim, found: v.dim() });
        }
        Ok(())
    }
}

/// `u ≼ v` under `o`: `v − u` lies in the order cone.
pub fn leq(o: &ConeOrder, u: &RationalVector, v: &RationalVector) -> Result<bool, OrderError> {
    o.check_dim(u)?;
    o.check_dim(v)?;
    Ok(o.le(u, v))
}

/// Position of the first value that is `≼` every value, if one exists.
pub fn smallest_index(values: &[RationalVector], o: &ConeOrder) -> Option<usize> {
    values
        .iter()
        .position(|w| values.iter().all(|v| o.le(w, v)))
}

/// The `≼`-smallest member of `values`, or `None` when there is none.
pub fn smallest_element(values: &[RationalVector], o: &ConeOrder) -> Option<RationalVector> {
    smallest_index(values, o).map(|k| values[k].clone())
}

/// A finite set of distinct points ordered by a cone order.
///
/// The pairwise relation is tabulated once at construction.
#[derive(Debug, Clone)]
pub struct FinitePoset {
    points: Vec<RationalVector>,
    order: ConeOrder,
    relation: Vec<bool>,
}

impl PartialEq for FinitePoset {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points && self.order == other.order
    }
}

impl Eq for FinitePoset {}

impl FinitePoset {
    pub fn new(points: Vec<RationalVector>, order: ConeOrder) -> Result<Self, OrderError> {
        Self::with_cap(points, order, DEFAULT_MAX_POINTS)
    }

    pub fn with_cap(points: Vec<RationalVector>, order: ConeOrder, cap: usize) -> Result<Self, OrderError> {
        if points.len() > cap {
            return Err(OrderError::TooManyPoints { count: points.len(), cap });
        }
        for p in &points {
            order.check_dim(p)?;
        }
        for (j, p) in points.iter().enumerate() {
            if let Some(i) = points[..j].iter().position(|q| q == p) {
                return Err(OrderError::DuplicatePoint { first: i, second: j });
            }
        }
        let n = points.len();
        let mut relation = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                relation[i * n + j] = i == j || order.le(&points[i], &points[j]);
            }
        }
        Ok(FinitePoset { points, order, relation })
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    pub fn point(&self, k: usize) -> &RationalVector {
        &self.points[k]
    }

    pub fn order(&self) -> &ConeOrder {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, v: &RationalVector) -> Option<usize> {
        self.points.iter().position(|p| p == v)
    }

    /// `points[i] ≼ points[j]`.
    pub fn le(&self, i: usize, j: usize) -> bool {
        self.relation[i * self.len() + j]
    }

    /// `points[i] ≺ points[j]` (strictly).
    pub fn lt(&self, i: usize, j: usize) -> bool {
        i != j && self.le(i, j)
    }

    /// The sub-poset on the given indices, in the given order.
    pub fn subposet(&self, indices: &[usize]) -> FinitePoset {
        let n = indices.len();
        let points: Vec<_> = indices.iter().map(|&k| self.points[k].clone()).collect();
        let mut relation = vec![false; n * n];
        for (a, &i) in indices.iter().enumerate() {
            for (b, &j) in indices.iter().enumerate() {
                relation[a * n + b] = self.le(i, j);
            }
        }
        FinitePoset { points, order: self.order.clone(), relation }
    }

    /// Indices of the elements with nothing strictly above them.
    pub fn maximal_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| !(0..self.len()).any(|v| self.lt(w, v)))
            .collect()
    }

    fn minimal_indices(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| !(0..self.len()).any(|v| self.lt(v, w)))
            .collect()
    }

    /// `j` covers `i`: `i ≺ j` with nothing strictly between.
    fn covers(&self, i: usize, j: usize) -> bool {
        self.lt(i, j) && !(0..self.len()).any(|k| self.lt(i, k) && self.lt(k, j))
    }

    /// Every maximal chain, each listed bottom to top.
    ///
    /// Maximal chains of a finite poset are exactly the paths of its Hasse
    /// diagram from a minimal element to a maximal one.
    pub fn maximal_chains(&self) -> Vec<Vec<usize>> {
        let mut chains = Vec::new();
        let mut stack: Vec<Vec<usize>> = self.minimal_indices().into_iter().map(|m| vec![m]).collect();
        stack.reverse();
        while let Some(chain) = stack.pop() {
            let top = *chain.last().expect("chains are nonempty");
            let next: Vec<usize> = (0..self.len()).filter(|&j| self.covers(top, j)).collect();
            if next.is_empty() {
                chains.push(chain);
                continue;
            }
            for &j in next.iter().rev() {
                let mut extended = chain.clone();
                extended.push(j);
                stack.push(extended);
            }
        }
        chains
    }

    /// Calls `visit` on every nonempty prefix of every maximal chain.
    ///
    /// A finite chain's upper bounds depend only on its top element, and every
    /// element tops some such prefix, so this covers every chain up to the
    /// quantities the predicates below inspect.
    fn all_chain_prefixes(&self, mut visit: impl FnMut(&[usize]) -> bool) -> bool {
        self.maximal_chains()
            .iter()
            .all(|chain| (1..=chain.len()).all(|k| visit(&chain[..k])))
    }

    fn upper_bounds(&self, chain: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&b| chain.iter().all(|&c| self.le(c, b)))
            .collect()
    }
}

/// Every nonempty chain has a least upper bound inside `p`. The empty poset is
/// rejected by convention.
pub fn is_chain_complete(p: &FinitePoset) -> bool {
    if p.is_empty() {
        return false;
    }
    p.all_chain_prefixes(|chain| {
        let bounds = p.upper_bounds(chain);
        bounds.iter().any(|&b| bounds.iter().all(|&other| p.le(b, other)))
    })
}

/// `subset` is universally inductive in `ambient`: every chain of `ambient`
/// whose elements each have an upper cover in `subset` has an upper bound in
/// `subset`. The empty chain qualifies vacuously, so an empty `subset` fails.
pub fn is_universally_inductive(subset: &FinitePoset, ambient: &FinitePoset) -> bool {
    debug_assert_eq!(subset.order(), ambient.order());
    if subset.is_empty() {
        return false;
    }
    let order = ambient.order();
    let covered = |x: &RationalVector| subset.points().iter().any(|s| order.le(x, s));
    ambient.all_chain_prefixes(|chain| {
        let pts: Vec<_> = chain.iter().map(|&k| ambient.point(k)).collect();
        if !pts.iter().all(|x| covered(x)) {
            return true;
        }
        subset
            .points()
            .iter()
            .any(|s| pts.iter().all(|x| order.le(x, s)))
    })
}

/// Every chain has an upper bound in `p`; the empty poset fails.
pub fn is_inductive(p: &FinitePoset) -> bool {
    if p.is_empty() {
        return false;
    }
    p.all_chain_prefixes(|chain| !p.upper_bounds(chain).is_empty())
}

pub fn maximal_elements(p: &FinitePoset) -> Vec<RationalVector> {
    p.maximal_indices().into_iter().map(|k| p.point(k).clone()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> RationalVector {
        RationalVector::from_i64s(xs)
    }

    fn cw(dim: usize) -> ConeOrder {
        ConeOrder::componentwise(dim).unwrap()
    }

    fn poset(points: &[&[i64]]) -> FinitePoset {
        let dim = points.first().map_or(1, |p| p.len());
        FinitePoset::new(points.iter().map(|p| v(p)).collect(), cw(dim)).unwrap()
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&cw(2), &v(&[1, 2]), &v(&[1, 3])).unwrap());
        assert!(!leq(&cw(2), &v(&[1, 2]), &v(&[2, 1])).unwrap());
        let g = ConeOrder::cone(RationalMatrix::from_i64_rows(&[&[1, 1], &[1, -1]])).unwrap();
        assert!(leq(&g, &v(&[0, 0]), &v(&[2, 1])).unwrap());
        assert!(!leq(&g, &v(&[0, 0]), &v(&[1, 2])).unwrap());
    }

    #[test]
    fn leq_rejects_dimension_mismatch() {
        assert_eq!(
            leq(&cw(2), &v(&[1]), &v(&[1, 2])),
            Err(OrderError::DimensionMismatch { expected: 2, found: 1 })
        );
    }

    #[test]
    fn cone_must_be_pointed() {
        let flat = RationalMatrix::from_i64_rows(&[&[1, 1]]);
        assert_eq!(ConeOrder::cone(flat), Err(OrderError::NotPointed));
        let wrong = RationalMatrix::from_i64_rows(&[&[1, 0]]);
        assert_eq!(
            ConeOrder::new(3, OrderSpec::Cone { generators: wrong }),
            Err(OrderError::GeneratorShape { expected: 3, found: 2 })
        );
    }

    #[test]
    fn smallest_element_examples() {
        let o1 = cw(1);
        assert_eq!(smallest_element(&[v(&[0]), v(&[1]), v(&[2])], &o1), Some(v(&[0])));
        assert_eq!(smallest_element(&[v(&[1, 0]), v(&[0, 1])], &cw(2)), None);
        assert_eq!(smallest_element(&[v(&[0, 0]), v(&[1, 0]), v(&[0, 1])], &cw(2)), Some(v(&[0, 0])));
        // duplicated values still have a smallest element
        assert_eq!(smallest_element(&[v(&[3]), v(&[1]), v(&[1])], &o1), Some(v(&[1])));
    }

    #[test]
    fn chain_predicates_on_small_cases() {
        let empty = FinitePoset::new(vec![], cw(2)).unwrap();
        assert!(!is_chain_complete(&empty));
        assert!(!is_inductive(&empty));
        let single = poset(&[&[0, 0]]);
        assert!(is_chain_complete(&single));
        assert!(is_inductive(&single));
        let anti = poset(&[&[1, 0], &[0, 1]]);
        assert!(is_inductive(&anti));
        assert!(is_chain_complete(&anti));
    }

    #[test]
    fn universally_inductive_edge_cases() {
        let ambient = poset(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        let empty = ambient.subposet(&[]);
        assert!(!is_universally_inductive(&empty, &ambient));
        assert!(is_universally_inductive(&ambient, &ambient));
        assert!(is_universally_inductive(&ambient.subposet(&[1]), &ambient));
    }

    #[test]
    fn maximal_element_examples() {
        assert_eq!(maximal_elements(&poset(&[&[0], &[1], &[2]])), vec![v(&[2])]);
        assert_eq!(maximal_elements(&poset(&[&[1, 0], &[0, 1]])), vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(maximal_elements(&poset(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]])), vec![v(&[1, 1])]);
    }

    #[test]
    fn maximal_chains_of_the_square() {
        let sq = poset(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]);
        assert_eq!(sq.maximal_chains(), vec![vec![0, 1, 3], vec![0, 2, 3]]);
    }

    #[test]
    fn duplicates_and_cap_are_rejected() {
        let err = FinitePoset::new(vec![v(&[1]), v(&[2]), v(&[1])], cw(1)).unwrap_err();
        assert_eq!(err, OrderError::DuplicatePoint { first: 0, second: 2 });
        let pts: Vec<_> = (0..5).map(|k| v(&[k])).collect();
        assert_eq!(
            FinitePoset::with_cap(pts, cw(1), 4).unwrap_err(),
            OrderError::TooManyPoints { count: 5, cap: 4 }
        );
    }

    #[test]
    fn order_spec_json() {
        let spec: OrderSpec = serde_json::from_str(r#"{"type":"cone","generators":[["1",1],[1,"-1"]]}"#).unwrap();
        let o = ConeOrder::new(2, spec.clone()).unwrap();
        assert!(o.le(&v(&[0, 0]), &v(&[2, 1])));
        assert_eq!(serde_json::to_string(&spec).unwrap(), r#"{"type":"cone","generators":[[1,1],[1,-1]]}"#);
        let cw: OrderSpec = serde_json::from_str(r#"{"type":"componentwise"}"#).unwrap();
        assert_eq!(cw, OrderSpec::Componentwise);
    }
}
