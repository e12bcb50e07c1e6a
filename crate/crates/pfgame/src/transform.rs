//! Structural rewrites of operators.
//!
//! These transformations act on the expression trees of an [`Operator`] and
//! return a new operator:
//!
//! * [`signature`] — the qualitative skeleton of a mean-class operator. It
//!   forgets every additive constant and replaces each finite-parameter mean
//!   by its limiting form, which is exactly the data the infinite-limit
//!   oracle depends on.
//! * [`recession`] — the positively homogeneous limit `x ↦ lim k⁻¹·T(kx)`.
//! * [`shift_input`] / [`normalize_at`] — precompose with a translation
//!   (and, for the latter, subtract an eigenvalue and base point), used to
//!   recenter an operator at a candidate eigenvector.
//! * [`permute`] — relabel the coordinates by a permutation.

use crate::expr::{Expr, ExtValue, Operator};
use crate::nodeset::NodeSet;
use thiserror::Error;

/// Errors produced by the structural rewrites in this module.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum TransformError {
    /// The operator contains a `supmix`/`infmix` node. Those lie outside the
    /// mean class, so they have no signature.
    #[error("coordinate {coord} contains a mixture node, which has no signature")]
    MixedNode {
        /// 1-based coordinate whose expression contains the offending node.
        coord: usize,
    },
    /// A supplied point does not have one entry per coordinate.
    #[error("expected a point with {expected} entries, got {got}")]
    PointLength { expected: usize, got: usize },
    /// A supplied point has a NaN or infinite entry.
    #[error("point entry {index} is not finite")]
    NonFinitePoint {
        /// 1-based position of the offending entry.
        index: usize,
    },
    /// A supplied eigenvalue is NaN or infinite.
    #[error("eigenvalue is not finite")]
    NonFiniteEigenvalue,
    /// The supplied relabeling is not a permutation of the coordinates.
    #[error("invalid permutation: {reason}")]
    NotAPermutation { reason: String },
}

/// Sign class of a mean parameter: negative, zero, or positive.
enum MeanClass {
    Negative,
    Zero,
    Positive,
}

fn mean_class(r: ExtValue) -> MeanClass {
    match r {
        ExtValue::NegInf => MeanClass::Negative,
        ExtValue::PosInf => MeanClass::Positive,
        ExtValue::Finite(v) => {
            if v < 0.0 {
                MeanClass::Negative
            } else if v > 0.0 {
                MeanClass::Positive
            } else {
                MeanClass::Zero
            }
        }
    }
}

fn uniform_items(children: Vec<Expr>) -> Vec<(f64, Expr)> {
    let w = 1.0 / children.len() as f64;
    children.into_iter().map(|c| (w, c)).collect()
}

/// Computes the signature of a mean-class operator.
///
/// The rewrite drops every `Shift` constant, turns each mean with a finite
/// positive (resp. negative) parameter into the corresponding `+inf`
/// (resp. `-inf`) mean with the same weights, and replaces every
/// zero-parameter mean — weighted averages included — by the uniform average
/// of its children. `min`/`max` nodes are kept as they are. The result is
/// idempotent: applying the rewrite twice gives the same operator.
///
/// Two operators with equal signatures have identical infinite-limit
/// behavior, so every decision taken at infinity coincides for them.
///
/// # Errors
///
/// [`TransformError::MixedNode`] if some coordinate contains a
/// `supmix`/`infmix` node.
pub fn signature(op: &Operator) -> Result<Operator, TransformError> {
    let coords = op
        .coords()
        .iter()
        .enumerate()
        .map(|(i, e)| signature_expr(e, i + 1))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Operator::new(op.n(), coords).expect("signature rewrite preserves operator validity"))
}

fn signature_expr(e: &Expr, coord: usize) -> Result<Expr, TransformError> {
    match e {
        Expr::Var(j) => Ok(Expr::Var(*j)),
        Expr::Shift(_, inner) => signature_expr(inner, coord),
        Expr::Min(children) => Ok(Expr::Min(
            children
                .iter()
                .map(|c| signature_expr(c, coord))
                .collect::<Result<_, _>>()?,
        )),
        Expr::Max(children) => Ok(Expr::Max(
            children
                .iter()
                .map(|c| signature_expr(c, coord))
                .collect::<Result<_, _>>()?,
        )),
        Expr::Avg(items) => {
            let children = items
                .iter()
                .map(|(_, c)| signature_expr(c, coord))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Expr::Avg(uniform_items(children)))
        }
        Expr::Mean(r, items) => {
            let children = items
                .iter()
                .map(|(_, c)| signature_expr(c, coord))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(match mean_class(*r) {
                MeanClass::Zero => Expr::Avg(uniform_items(children)),
                MeanClass::Positive => Expr::Mean(
                    ExtValue::PosInf,
                    items
                        .iter()
                        .map(|(w, _)| *w)
                        .zip(children)
                        .collect(),
                ),
                MeanClass::Negative => Expr::Mean(
                    ExtValue::NegInf,
                    items
                        .iter()
                        .map(|(w, _)| *w)
                        .zip(children)
                        .collect(),
                ),
            })
        }
        Expr::SupMix(_, _) | Expr::InfMix(_, _) => Err(TransformError::MixedNode { coord }),
    }
}

/// Computes the recession operator `T̂(x) = lim_{k→∞} k⁻¹·T(kx)`.
///
/// The limit exists for every operator of this crate and is obtained by a
/// node rewrite: shifts are dropped, means with positive (resp. negative)
/// parameter become `max` (resp. `min`) over their children, zero-parameter
/// means and weighted averages keep their weights, and `supmix`/`infmix`
/// relax to `max`/`min` of their two children.
pub fn recession(op: &Operator) -> Operator {
    let coords = op.coords().iter().map(recession_expr).collect();
    Operator::new(op.n(), coords).expect("recession rewrite preserves operator validity")
}

fn recession_expr(e: &Expr) -> Expr {
    match e {
        Expr::Var(j) => Expr::Var(*j),
        Expr::Shift(_, inner) => recession_expr(inner),
        Expr::Min(children) => Expr::Min(children.iter().map(recession_expr).collect()),
        Expr::Max(children) => Expr::Max(children.iter().map(recession_expr).collect()),
        Expr::Avg(items) => Expr::Avg(
            items
                .iter()
                .map(|(w, c)| (*w, recession_expr(c)))
                .collect(),
        ),
        Expr::Mean(r, items) => {
            let children: Vec<Expr> = items.iter().map(|(_, c)| recession_expr(c)).collect();
            match mean_class(*r) {
                MeanClass::Zero => Expr::Avg(
                    items
                        .iter()
                        .map(|(w, _)| *w)
                        .zip(children)
                        .collect(),
                ),
                MeanClass::Positive => Expr::Max(children),
                MeanClass::Negative => Expr::Min(children),
            }
        }
        Expr::SupMix(a, b) => Expr::Max(vec![recession_expr(a), recession_expr(b)]),
        Expr::InfMix(a, b) => Expr::Min(vec![recession_expr(a), recession_expr(b)]),
    }
}

fn check_point(n: usize, u: &[f64]) -> Result<(), TransformError> {
    if u.len() != n {
        return Err(TransformError::PointLength {
            expected: n,
            got: u.len(),
        });
    }
    if let Some(k) = u.iter().position(|v| !v.is_finite()) {
        return Err(TransformError::NonFinitePoint { index: k + 1 });
    }
    Ok(())
}

/// Precomposes the operator with a translation: returns `x ↦ T(u + x)`.
///
/// # Errors
///
/// [`TransformError::PointLength`] / [`TransformError::NonFinitePoint`] if
/// `u` does not have one finite entry per coordinate.
pub fn shift_input(op: &Operator, u: &[f64]) -> Result<Operator, TransformError> {
    check_point(op.n(), u)?;
    let coords = op.coords().iter().map(|e| shift_vars(e, u)).collect();
    Ok(Operator::new(op.n(), coords).expect("input translation preserves operator validity"))
}

fn shift_vars(e: &Expr, u: &[f64]) -> Expr {
    match e {
        Expr::Var(j) => {
            if u[*j] == 0.0 {
                Expr::Var(*j)
            } else {
                Expr::Shift(u[*j], Box::new(Expr::Var(*j)))
            }
        }
        Expr::Shift(c, inner) => Expr::Shift(*c, Box::new(shift_vars(inner, u))),
        Expr::Min(children) => Expr::Min(children.iter().map(|c| shift_vars(c, u)).collect()),
        Expr::Max(children) => Expr::Max(children.iter().map(|c| shift_vars(c, u)).collect()),
        Expr::Avg(items) => Expr::Avg(
            items
                .iter()
                .map(|(w, c)| (*w, shift_vars(c, u)))
                .collect(),
        ),
        Expr::Mean(r, items) => Expr::Mean(
            *r,
            items
                .iter()
                .map(|(w, c)| (*w, shift_vars(c, u)))
                .collect(),
        ),
        Expr::SupMix(a, b) => Expr::SupMix(
            Box::new(shift_vars(a, u)),
            Box::new(shift_vars(b, u)),
        ),
        Expr::InfMix(a, b) => Expr::InfMix(
            Box::new(shift_vars(a, u)),
            Box::new(shift_vars(b, u)),
        ),
    }
}

/// Recenters the operator at a candidate eigenpair: returns
/// `x ↦ T(u + x) − λe − u`.
///
/// If `(λ, u)` solves the ergodic equation `T(u) = λe + u`, the result fixes
/// the origin, and its behavior near `0` mirrors the behavior of `T`
/// near `u`.
///
/// # Errors
///
/// [`TransformError::NonFiniteEigenvalue`] if `lambda` is NaN or infinite,
/// and the same point errors as [`shift_input`].
pub fn normalize_at(op: &Operator, u: &[f64], lambda: f64) -> Result<Operator, TransformError> {
    if !lambda.is_finite() {
        return Err(TransformError::NonFiniteEigenvalue);
    }
    check_point(op.n(), u)?;
    let coords = op
        .coords()
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let shifted = shift_vars(e, u);
            let offset = -lambda - u[i];
            if offset == 0.0 {
                shifted
            } else {
                Expr::Shift(offset, Box::new(shifted))
            }
        })
        .collect();
    Ok(Operator::new(op.n(), coords).expect("recentering preserves operator validity"))
}

/// Relabels the coordinates by a permutation.
///
/// `perm` maps old indices to new ones (0-based): coordinate `i` of the
/// input becomes coordinate `perm[i]` of the output, with every variable
/// `x_j` rewritten to `x_{perm[j]}`. Writing `P` for the induced linear
/// relabeling of vectors, the result is `P ∘ T ∘ P⁻¹`, so eigenvectors,
/// dominions, and verdicts all map through `perm`.
///
/// # Errors
///
/// [`TransformError::NotAPermutation`] if `perm` is not a permutation of
/// `0..n`.
pub fn permute(op: &Operator, perm: &[usize]) -> Result<Operator, TransformError> {
    let n = op.n();
    if perm.len() != n {
        return Err(TransformError::NotAPermutation {
            reason: format!("expected {n} images, got {}", perm.len()),
        });
    }
    let mut seen = NodeSet::empty();
    for &p in perm {
        if p >= n {
            return Err(TransformError::NotAPermutation {
                reason: format!("image {} is out of range for {n} coordinates", p + 1),
            });
        }
        if seen.contains(p) {
            return Err(TransformError::NotAPermutation {
                reason: format!("image {} appears twice", p + 1),
            });
        }
        seen = seen.insert(p);
    }
    let mut coords = vec![Expr::Var(0); n];
    for (i, e) in op.coords().iter().enumerate() {
        coords[perm[i]] = relabel(e, perm);
    }
    Ok(Operator::new(n, coords).expect("relabeling preserves operator validity"))
}

fn relabel(e: &Expr, perm: &[usize]) -> Expr {
    match e {
        Expr::Var(j) => Expr::Var(perm[*j]),
        Expr::Shift(c, inner) => Expr::Shift(*c, Box::new(relabel(inner, perm))),
        Expr::Min(children) => Expr::Min(children.iter().map(|c| relabel(c, perm)).collect()),
        Expr::Max(children) => Expr::Max(children.iter().map(|c| relabel(c, perm)).collect()),
        Expr::Avg(items) => Expr::Avg(
            items
                .iter()
                .map(|(w, c)| (*w, relabel(c, perm)))
                .collect(),
        ),
        Expr::Mean(r, items) => Expr::Mean(
            *r,
            items
                .iter()
                .map(|(w, c)| (*w, relabel(c, perm)))
                .collect(),
        ),
        Expr::SupMix(a, b) => Expr::SupMix(
            Box::new(relabel(a, perm)),
            Box::new(relabel(b, perm)),
        ),
        Expr::InfMix(a, b) => Expr::InfMix(
            Box::new(relabel(a, perm)),
            Box::new(relabel(b, perm)),
        ),
    }
}
