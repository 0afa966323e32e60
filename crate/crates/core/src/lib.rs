//! Exact finite-instance toolkit for split ordered variational inequalities
//! over partially ordered vector spaces.
//!
//! Instances are finite: the feasible sets `C ⊂ X` and `D ⊂ Y` are explicit
//! point lists, the operators `f: C → L(X, U)` and `g: D → L(Y, V)` are
//! tables of rational matrices, and every order is a polyhedral cone order.
//! All arithmetic is exact.

pub mod generators;
pub mod hypotheses;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod orders;
pub mod solver;
