#![allow(dead_code)]

use ovi_core::model::{Instance, OperatorTable};
use ovi_core::numerics::Rational;
use ovi_core::orders::FinitePoset;

/// Every nonempty chain of `p` as an index list, by subset enumeration.
pub fn all_chains(p: &FinitePoset) -> Vec<Vec<usize>> {
    let n = p.len();
    assert!(n <= 16, "brute force is exponential");
    (1u32..(1 << n))
        .map(|mask| (0..n).filter(|&k| mask & (1 << k) != 0).collect::<Vec<_>>())
        .filter(|s| s.iter().all(|&a| s.iter().all(|&b| p.le(a, b) || p.le(b, a))))
        .collect()
}

fn upper_bounds(p: &FinitePoset, chain: &[usize]) -> Vec<usize> {
    (0..p.len()).filter(|&b| chain.iter().all(|&c| p.le(c, b))).collect()
}

pub fn brute_chain_complete(p: &FinitePoset) -> bool {
    !p.is_empty()
        && all_chains(p).iter().all(|chain| {
            let ub = upper_bounds(p, chain);
            ub.iter().any(|&b| ub.iter().all(|&o| p.le(b, o)))
        })
}

pub fn brute_inductive(p: &FinitePoset) -> bool {
    !p.is_empty() && all_chains(p).iter().all(|chain| !upper_bounds(p, chain).is_empty())
}

pub fn brute_universally_inductive(subset: &FinitePoset, ambient: &FinitePoset) -> bool {
    let o = ambient.order();
    !subset.is_empty()
        && all_chains(ambient).iter().all(|chain| {
            let pts: Vec<_> = chain.iter().map(|&k| ambient.point(k)).collect();
            let covered = pts.iter().all(|x| subset.points().iter().any(|s| o.le(x, s)));
            !covered || subset.points().iter().any(|s| pts.iter().all(|x| o.le(x, s)))
        })
}

/// `f(c)` replaced by `λ(c)·f(c)`.
pub fn scale_f(i: &Instance, lambdas: &[Rational]) -> Instance {
    let mut parts = i.to_parts();
    parts.f = OperatorTable {
        matrices: parts.f.matrices.iter().zip(lambdas).map(|(m, l)| m.scale(l)).collect(),
    };
    Instance::from_parts(parts).expect("scaling keeps the instance valid")
}

/// `g(d)` replaced by `μ(d)·g(d)`.
pub fn scale_g(i: &Instance, mus: &[Rational]) -> Instance {
    let mut parts = i.to_parts();
    parts.g = OperatorTable {
        matrices: parts.g.matrices.iter().zip(mus).map(|(m, l)| m.scale(l)).collect(),
    };
    Instance::from_parts(parts).expect("scaling keeps the instance valid")
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.contains(x))
}
