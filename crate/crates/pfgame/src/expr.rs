//! Expression trees for monotone additively homogeneous operators, together
//! with the three evaluation modes everything else is built on:
//!
//! * [`Operator::eval`] — plain evaluation at a finite vector;
//! * [`Operator::eval_ext`] — the exact extended-real limit of a coordinate
//!   when a subset of the variables is pushed to `+∞` or `−∞` and the rest
//!   are pinned at `0`;
//! * [`Operator::constancy`] — an exact, tie-aware decision of whether a
//!   coordinate is constant on a one-sided segment `u + [0, ε]·(±e_S)`,
//!   including a usable radius `ε`.
//!
//! Every node type below is monotone (componentwise nondecreasing),
//! commutes with adding a constant to all inputs, and is nonexpansive in the
//! sup norm. Those three facts are what the limit and constancy analyses
//! lean on, and they are enforced structurally: there is no node that could
//! break them.

use crate::nodeset::NodeSet;
use thiserror::Error;

/// Relative tie tolerance used when deciding which children of a `min`/`max`
/// attain the extremum: `v` attains `m` iff `|v − m| ≤ TIE_TOL · (1 + |m|)`.
pub const TIE_TOL: f64 = 1e-9;

/// An extended real: `−∞`, a finite value, or `+∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExtValue {
    NegInf,
    Finite(f64),
    PosInf,
}

/// The coarse class of an [`ExtValue`], ignoring the finite payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ValueTag {
    NegInf,
    Finite,
    PosInf,
}

impl ExtValue {
    pub fn tag(self) -> ValueTag {
        match self {
            ExtValue::NegInf => ValueTag::NegInf,
            ExtValue::Finite(_) => ValueTag::Finite,
            ExtValue::PosInf => ValueTag::PosInf,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtValue::Finite(_))
    }

    /// The finite payload, if any.
    pub fn finite(self) -> Option<f64> {
        match self {
            ExtValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Adds a finite constant; infinities absorb it.
    #[must_use]
    pub fn add_const(self, c: f64) -> Self {
        match self {
            ExtValue::Finite(v) => ExtValue::Finite(v + c),
            inf => inf,
        }
    }

    /// Total order rank used by the lattice operations (finite values compare
    /// by value; no NaN ever enters an `ExtValue` built by this crate).
    fn rank(self) -> (i8, f64) {
        match self {
            ExtValue::NegInf => (-1, 0.0),
            ExtValue::Finite(v) => (0, v),
            ExtValue::PosInf => (1, 0.0),
        }
    }
}

/// Lattice minimum on extended reals.
pub fn ext_min(a: ExtValue, b: ExtValue) -> ExtValue {
    let (ra, rb) = (a.rank(), b.rank());
    if (ra.0, ra.1) <= (rb.0, rb.1) {
        a
    } else {
        b
    }
}

/// Lattice maximum on extended reals.
pub fn ext_max(a: ExtValue, b: ExtValue) -> ExtValue {
    let (ra, rb) = (a.rank(), b.rank());
    if (ra.0, ra.1) >= (rb.0, rb.1) {
        a
    } else {
        b
    }
}

impl std::fmt::Display for ExtValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExtValue::NegInf => write!(f, "-inf"),
            ExtValue::Finite(v) => write!(f, "{v}"),
            ExtValue::PosInf => write!(f, "+inf"),
        }
    }
}

/// Direction of a one-sided limit or perturbation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Orientation of the one-sided segment in a constancy query: `Increase`
/// looks at `u + α·e_S`, `Decrease` at `u − α·e_S`, for `α ∈ [0, ε]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Increase,
    Decrease,
}

/// Outcome of a constancy query. By monotonicity, a coordinate restricted to
/// the segment is either constant on some `[0, ε]` or differs from its base
/// value for every `α > 0`; there is no third case.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Constancy {
    /// Constant on `[0, eps]`; `eps` may be `f64::INFINITY` when the
    /// coordinate does not depend on the moving variables at all.
    Constant { eps: f64 },
    /// Strictly changed for every `α > 0`.
    Varies,
}

impl Constancy {
    pub fn is_constant(self) -> bool {
        matches!(self, Constancy::Constant { .. })
    }

    fn eps(self) -> Option<f64> {
        match self {
            Constancy::Constant { eps } => Some(eps),
            Constancy::Varies => None,
        }
    }
}

/// Expression node of one operator coordinate, in additive coordinates.
///
/// Weighted nodes (`Avg`, `Mean`) carry `(weight, child)` pairs; weights are
/// positive and sum to one (exact zeros are pruned at operator construction).
/// `Mean(r, ·)` is the weighted power-mean family in additive form:
/// `r = 0` is the weighted arithmetic average, finite `r ≠ 0` is
/// `(1/r)·log Σ wᵏ exp(r·childᵏ)`, and `r = ±∞` degenerate to max/min.
/// `SupMix(a, b) = a + h(b − a)` and `InfMix(a, b) = a − h(a − b)` with
/// `h(z) = z` for `z ≥ −1` and `h(z) = −1 − log(−z)` for `z ≤ −1`
/// (equivalently `h(z) = sup_{0<p≤1} (log p + p·z)`).
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(usize),
    Shift(f64, Box<Expr>),
    Min(Vec<Expr>),
    Max(Vec<Expr>),
    Avg(Vec<(f64, Expr)>),
    Mean(ExtValue, Vec<(f64, Expr)>),
    SupMix(Box<Expr>, Box<Expr>),
    InfMix(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn var(j: usize) -> Expr {
        Expr::Var(j)
    }
    pub fn shift(c: f64, e: Expr) -> Expr {
        Expr::Shift(c, Box::new(e))
    }
    pub fn min(children: Vec<Expr>) -> Expr {
        Expr::Min(children)
    }
    pub fn max(children: Vec<Expr>) -> Expr {
        Expr::Max(children)
    }
    pub fn avg(children: Vec<(f64, Expr)>) -> Expr {
        Expr::Avg(children)
    }
    pub fn mean(r: ExtValue, children: Vec<(f64, Expr)>) -> Expr {
        Expr::Mean(r, children)
    }
    pub fn supmix(a: Expr, b: Expr) -> Expr {
        Expr::SupMix(Box::new(a), Box::new(b))
    }
    pub fn infmix(a: Expr, b: Expr) -> Expr {
        Expr::InfMix(Box::new(a), Box::new(b))
    }
}

/// Whether every coordinate of the operator is (syntactically) convex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convexity {
    /// No `Min`, no `Mean` with negative or `−∞` parameter, no `InfMix`
    /// anywhere: each coordinate is a convex function.
    Convex,
    /// At least one potentially concave node is present.
    Unknown,
}

/// Errors from operator construction and evaluation.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("operator declares {expected} coordinates but {got} were provided")]
    CoordinateCount { expected: usize, got: usize },
    #[error("dimension {n} is out of range (need 1..={max})", max = crate::nodeset::MAX_NODES)]
    BadDimension { n: usize },
    #[error("variable x{} out of range for dimension {n}", var + 1)]
    VarOutOfRange { var: usize, n: usize },
    #[error("negative weight {value}")]
    NegativeWeight { value: f64 },
    #[error("weight is not a finite number")]
    NonFiniteWeight,
    #[error("weights sum to {sum}, expected 1 (tolerance 1e-12)")]
    WeightSum { sum: f64 },
    #[error("a min/max/avg/mean node has no children with positive weight")]
    EmptyNode,
    #[error("shift constant is not a finite number")]
    NonFiniteShift,
    #[error("mean parameter is NaN")]
    InvalidMeanParameter,
    #[error("input vector has length {got}, operator has dimension {expected}")]
    InputLength { expected: usize, got: usize },
    #[error("input coordinate {} is not finite", index + 1)]
    NonFiniteInput { index: usize },
}

/// A monotone additively homogeneous operator `T : ℝⁿ → ℝⁿ`, one expression
/// tree per coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n: usize,
    coords: Vec<Expr>,
    convexity: Convexity,
}

/// `h(z) = sup_{0<p≤1} (log p + p·z)`: identity above `−1`, logarithmic
/// below. `C¹` at the junction (both branches have slope 1 at `z = −1`).
fn h(z: f64) -> f64 {
    if z >= -1.0 {
        z
    } else {
        -1.0 - (-z).ln()
    }
}

/// Stable `(1/r)·log Σ w·exp(r·v)` for finite `r ≠ 0`. Factors out the
/// extreme value so every exponent is `≤ 0`; exact even when the weights sum
/// to less than one (as happens when `−∞` children have been dropped).
fn weighted_lse(r: f64, items: &[(f64, f64)]) -> f64 {
    debug_assert!(r != 0.0 && r.is_finite() && !items.is_empty());
    let m = if r > 0.0 {
        items.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max)
    } else {
        items.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min)
    };
    let s: f64 = items.iter().map(|&(w, v)| w * (r * (v - m)).exp()).sum();
    m + s.ln() / r
}

pub(crate) fn validate_expr(e: &mut Expr, n: usize) -> Result<(), OperatorError> {
    match e {
        Expr::Var(j) => {
            if *j >= n {
                return Err(OperatorError::VarOutOfRange { var: *j, n });
            }
        }
        Expr::Shift(c, child) => {
            if !c.is_finite() {
                return Err(OperatorError::NonFiniteShift);
            }
            validate_expr(child, n)?;
        }
        Expr::Min(children) | Expr::Max(children) => {
            if children.is_empty() {
                return Err(OperatorError::EmptyNode);
            }
            for c in children {
                validate_expr(c, n)?;
            }
        }
        Expr::Avg(items) => validate_weighted(items, n)?,
        Expr::Mean(r, items) => {
            if matches!(r, ExtValue::Finite(x) if x.is_nan()) {
                return Err(OperatorError::InvalidMeanParameter);
            }
            validate_weighted(items, n)?;
        }
        Expr::SupMix(a, b) | Expr::InfMix(a, b) => {
            validate_expr(a, n)?;
            validate_expr(b, n)?;
        }
    }
    Ok(())
}

fn validate_weighted(items: &mut Vec<(f64, Expr)>, n: usize) -> Result<(), OperatorError> {
    for (w, _) in items.iter() {
        if w.is_nan() || w.is_infinite() {
            return Err(OperatorError::NonFiniteWeight);
        }
        if *w < 0.0 {
            return Err(OperatorError::NegativeWeight { value: *w });
        }
    }
    let sum: f64 = items.iter().map(|(w, _)| *w).sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(OperatorError::WeightSum { sum });
    }
    items.retain(|(w, _)| *w != 0.0);
    if items.is_empty() {
        return Err(OperatorError::EmptyNode);
    }
    for (_, c) in items.iter_mut() {
        validate_expr(c, n)?;
    }
    Ok(())
}

/// Syntactic convexity of a single expression.
pub fn expr_is_convex(e: &Expr) -> bool {
    match e {
        Expr::Var(_) => true,
        Expr::Shift(_, c) => expr_is_convex(c),
        Expr::Min(_) => false,
        Expr::Max(children) => children.iter().all(expr_is_convex),
        Expr::Avg(items) => items.iter().all(|(_, c)| expr_is_convex(c)),
        Expr::Mean(r, items) => {
            let r_ok = match r {
                ExtValue::NegInf => false,
                ExtValue::Finite(x) => *x >= 0.0,
                ExtValue::PosInf => true,
            };
            r_ok && items.iter().all(|(_, c)| expr_is_convex(c))
        }
        Expr::SupMix(a, b) => expr_is_convex(a) && expr_is_convex(b),
        Expr::InfMix(_, _) => false,
    }
}

impl Operator {
    /// Validates the coordinate expressions (dimension, variable ranges,
    /// weight positivity and normalization), prunes children with exact zero
    /// weight, and classifies convexity.
    pub fn new(n: usize, coords: Vec<Expr>) -> Result<Operator, OperatorError> {
        if n == 0 || n > crate::nodeset::MAX_NODES {
            return Err(OperatorError::BadDimension { n });
        }
        if coords.len() != n {
            return Err(OperatorError::CoordinateCount { expected: n, got: coords.len() });
        }
        let mut coords = coords;
        for c in &mut coords {
            validate_expr(c, n)?;
        }
        let convexity = if coords.iter().all(expr_is_convex) {
            Convexity::Convex
        } else {
            Convexity::Unknown
        };
        Ok(Operator { n, coords, convexity })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn coordinate(&self, i: usize) -> &Expr {
        &self.coords[i]
    }

    pub fn coords(&self) -> &[Expr] {
        &self.coords
    }

    pub fn convexity(&self) -> Convexity {
        self.convexity
    }

    fn check_input(&self, x: &[f64]) -> Result<(), OperatorError> {
        if x.len() != self.n {
            return Err(OperatorError::InputLength { expected: self.n, got: x.len() });
        }
        for (i, v) in x.iter().enumerate() {
            if !v.is_finite() {
                return Err(OperatorError::NonFiniteInput { index: i });
            }
        }
        Ok(())
    }

    /// Applies the operator to a finite vector.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>, OperatorError> {
        self.check_input(x)?;
        Ok(self.coords.iter().map(|e| eval_expr(e, x)).collect())
    }

    /// Evaluates one coordinate at a finite vector.
    pub fn eval_coord(&self, i: usize, x: &[f64]) -> Result<f64, OperatorError> {
        self.check_input(x)?;
        Ok(eval_expr(&self.coords[i], x))
    }

    /// The exact limit of coordinate `i` as the variables in `toward` tend to
    /// `sign·∞` together, with all other variables pinned at `0`. By
    /// monotonicity the limit exists in the extended reals and, when `sign`
    /// is `Plus`, is never `−∞` (dually for `Minus`).
    pub fn eval_ext(&self, i: usize, toward: NodeSet, sign: Sign) -> ExtValue {
        let v = eval_ext_expr(&self.coords[i], toward, sign);
        debug_assert!(
            match sign {
                Sign::Plus => v != ExtValue::NegInf,
                Sign::Minus => v != ExtValue::PosInf,
            },
            "one-sided limit produced an infinity of the wrong sign"
        );
        v
    }

    /// Exact constancy analysis of coordinate `i` along the one-sided segment
    /// `α ↦ u + α·(±e_moving)`, `α ≥ 0`.
    pub fn constancy(
        &self,
        i: usize,
        u: &[f64],
        moving: NodeSet,
        orientation: Orientation,
    ) -> Result<Constancy, OperatorError> {
        self.check_input(u)?;
        Ok(constancy_expr(&self.coords[i], u, moving, orientation).1)
    }

    /// Whether coordinate `i` is constant on some segment
    /// `u + [0, ε]·(±e_moving)` with `ε > 0`.
    pub fn locally_constant(
        &self,
        i: usize,
        u: &[f64],
        moving: NodeSet,
        orientation: Orientation,
    ) -> Result<bool, OperatorError> {
        Ok(self.constancy(i, u, moving, orientation)?.is_constant())
    }

    /// The support of coordinate `i`: the variables `j` whose divergence
    /// drags `T_i` along, read off the one-sided limit oracle. For a convex
    /// coordinate this is exactly the set of variables the coordinate
    /// depends on, which is why the coordinate must be syntactically convex.
    pub fn support(&self, i: usize) -> NodeSet {
        assert!(
            expr_is_convex(&self.coords[i]),
            "support is only characterized by limits for convex coordinates"
        );
        (0..self.n)
            .filter(|&j| self.eval_ext(i, NodeSet::singleton(j), Sign::Plus) == ExtValue::PosInf)
            .collect()
    }
}

fn eval_expr(e: &Expr, x: &[f64]) -> f64 {
    match e {
        Expr::Var(j) => x[*j],
        Expr::Shift(c, child) => c + eval_expr(child, x),
        Expr::Min(children) => children
            .iter()
            .map(|c| eval_expr(c, x))
            .fold(f64::INFINITY, f64::min),
        Expr::Max(children) => children
            .iter()
            .map(|c| eval_expr(c, x))
            .fold(f64::NEG_INFINITY, f64::max),
        Expr::Avg(items) => items.iter().map(|(w, c)| w * eval_expr(c, x)).sum(),
        Expr::Mean(r, items) => match r {
            ExtValue::NegInf => items
                .iter()
                .map(|(_, c)| eval_expr(c, x))
                .fold(f64::INFINITY, f64::min),
            ExtValue::PosInf => items
                .iter()
                .map(|(_, c)| eval_expr(c, x))
                .fold(f64::NEG_INFINITY, f64::max),
            ExtValue::Finite(r) if *r == 0.0 => {
                items.iter().map(|(w, c)| w * eval_expr(c, x)).sum()
            }
            ExtValue::Finite(r) => {
                let vals: Vec<(f64, f64)> =
                    items.iter().map(|(w, c)| (*w, eval_expr(c, x))).collect();
                weighted_lse(*r, &vals)
            }
        },
        Expr::SupMix(a, b) => {
            let (va, vb) = (eval_expr(a, x), eval_expr(b, x));
            va + h(vb - va)
        }
        Expr::InfMix(a, b) => {
            let (va, vb) = (eval_expr(a, x), eval_expr(b, x));
            va - h(va - vb)
        }
    }
}

fn eval_ext_expr(e: &Expr, toward: NodeSet, sign: Sign) -> ExtValue {
    use ExtValue::*;
    match e {
        Expr::Var(j) => {
            if toward.contains(*j) {
                match sign {
                    Sign::Plus => PosInf,
                    Sign::Minus => NegInf,
                }
            } else {
                Finite(0.0)
            }
        }
        Expr::Shift(c, child) => eval_ext_expr(child, toward, sign).add_const(*c),
        Expr::Min(children) => children
            .iter()
            .map(|c| eval_ext_expr(c, toward, sign))
            .fold(PosInf, ext_min),
        Expr::Max(children) => children
            .iter()
            .map(|c| eval_ext_expr(c, toward, sign))
            .fold(NegInf, ext_max),
        Expr::Avg(items) => {
            let vals: Vec<ExtValue> =
                items.iter().map(|(_, c)| eval_ext_expr(c, toward, sign)).collect();
            let has_pos = vals.contains(&PosInf);
            let has_neg = vals.contains(&NegInf);
            match (has_pos, has_neg) {
                (true, true) => unreachable!("single-sign limit cannot mix infinities"),
                (true, false) => PosInf,
                (false, true) => NegInf,
                (false, false) => Finite(
                    items
                        .iter()
                        .zip(&vals)
                        .map(|((w, _), v)| w * v.finite().unwrap())
                        .sum(),
                ),
            }
        }
        Expr::Mean(r, items) => {
            let vals: Vec<ExtValue> =
                items.iter().map(|(_, c)| eval_ext_expr(c, toward, sign)).collect();
            let has_pos = vals.contains(&PosInf);
            let has_neg = vals.contains(&NegInf);
            let all_pos = vals.iter().all(|v| *v == PosInf);
            let all_neg = vals.iter().all(|v| *v == NegInf);
            let finite: Vec<(f64, f64)> = items
                .iter()
                .zip(&vals)
                .filter_map(|((w, _), v)| v.finite().map(|x| (*w, x)))
                .collect();
            match r {
                // Max-like: any +∞ dominates; −∞ children merely drop out.
                ExtValue::PosInf => {
                    if has_pos {
                        PosInf
                    } else if all_neg {
                        NegInf
                    } else {
                        Finite(finite.iter().map(|&(_, v)| v).fold(f64::NEG_INFINITY, f64::max))
                    }
                }
                ExtValue::NegInf => {
                    if has_neg {
                        NegInf
                    } else if all_pos {
                        PosInf
                    } else {
                        Finite(finite.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min))
                    }
                }
                ExtValue::Finite(r) if *r == 0.0 => match (has_pos, has_neg) {
                    (true, true) => unreachable!("single-sign limit cannot mix infinities"),
                    (true, false) => PosInf,
                    (false, true) => NegInf,
                    (false, false) => {
                        Finite(finite.iter().map(|&(w, v)| w * v).sum())
                    }
                },
                ExtValue::Finite(r) if *r > 0.0 => {
                    // exp(r·(−∞)) = 0: −∞ children vanish from the sum,
                    // without reweighting — the limit keeps original weights.
                    if has_pos {
                        PosInf
                    } else if all_neg {
                        NegInf
                    } else {
                        Finite(weighted_lse(*r, &finite))
                    }
                }
                ExtValue::Finite(r) => {
                    // r < 0 mirrors: exp(r·(+∞)) = 0.
                    if has_neg {
                        NegInf
                    } else if all_pos {
                        PosInf
                    } else {
                        Finite(weighted_lse(*r, &finite))
                    }
                }
            }
        }
        Expr::SupMix(a, b) => {
            let (va, vb) = (
                eval_ext_expr(a, toward, sign),
                eval_ext_expr(b, toward, sign),
            );
            match (va, vb) {
                (PosInf, _) | (_, PosInf) => PosInf,
                (NegInf, b) => b,
                (Finite(_), NegInf) => NegInf,
                (Finite(x), Finite(y)) => Finite(x + h(y - x)),
            }
        }
        Expr::InfMix(a, b) => {
            let (va, vb) = (
                eval_ext_expr(a, toward, sign),
                eval_ext_expr(b, toward, sign),
            );
            match (va, vb) {
                (NegInf, _) | (_, NegInf) => NegInf,
                (PosInf, b) => b,
                (Finite(x), PosInf) => {
                    // InfMix(a, b) = a + 1 + log(b − a) once b ≥ a + 1.
                    let _ = x;
                    PosInf
                }
                (Finite(x), Finite(y)) => Finite(x - h(x - y)),
            }
        }
    }
}

/// Recursive constancy analysis. Returns the value at `α = 0` and the
/// verdict for the segment `α ↦ u + α·(±e_moving)`.
///
/// The correctness of each rule rests on three structural facts: every node
/// value is monotone in `α` (nondecreasing under `Increase`, nonincreasing
/// under `Decrease`); every node value moves by at most `α` (sup-norm
/// nonexpansiveness), so a value gap of `g` protects a non-attaining child
/// up to radius `g`; and a monotone function of `α` that returns to its base
/// value at some `α > 0` is constant on `[0, α]`.
fn constancy_expr(
    e: &Expr,
    u: &[f64],
    moving: NodeSet,
    o: Orientation,
) -> (f64, Constancy) {
    use Constancy::*;
    match e {
        Expr::Var(j) => {
            let c = if moving.contains(*j) {
                Varies
            } else {
                Constant { eps: f64::INFINITY }
            };
            (u[*j], c)
        }
        Expr::Shift(c, child) => {
            let (v, ct) = constancy_expr(child, u, moving, o);
            (c + v, ct)
        }
        Expr::Min(children) => {
            let kids: Vec<(f64, Constancy)> =
                children.iter().map(|c| constancy_expr(c, u, moving, o)).collect();
            let m = kids.iter().map(|&(v, _)| v).fold(f64::INFINITY, f64::min);
            (m, extremum_constancy(&kids, m, true, o))
        }
        Expr::Max(children) => {
            let kids: Vec<(f64, Constancy)> =
                children.iter().map(|c| constancy_expr(c, u, moving, o)).collect();
            let m = kids.iter().map(|&(v, _)| v).fold(f64::NEG_INFINITY, f64::max);
            (m, extremum_constancy(&kids, m, false, o))
        }
        Expr::Avg(items) => {
            let kids: Vec<(f64, Constancy)> =
                items.iter().map(|(_, c)| constancy_expr(c, u, moving, o)).collect();
            let v = items.iter().zip(&kids).map(|((w, _), (x, _))| w * x).sum();
            (v, smooth_constancy(&kids))
        }
        Expr::Mean(r, items) => {
            let kids: Vec<(f64, Constancy)> =
                items.iter().map(|(_, c)| constancy_expr(c, u, moving, o)).collect();
            match r {
                // Degenerate means are min/max over their children.
                ExtValue::NegInf => {
                    let m = kids.iter().map(|&(v, _)| v).fold(f64::INFINITY, f64::min);
                    (m, extremum_constancy(&kids, m, true, o))
                }
                ExtValue::PosInf => {
                    let m = kids.iter().map(|&(v, _)| v).fold(f64::NEG_INFINITY, f64::max);
                    (m, extremum_constancy(&kids, m, false, o))
                }
                ExtValue::Finite(r) => {
                    // Strictly increasing in every child: constant iff all
                    // children are.
                    let v = if *r == 0.0 {
                        items.iter().zip(&kids).map(|((w, _), (x, _))| w * x).sum()
                    } else {
                        let vals: Vec<(f64, f64)> =
                            items.iter().zip(&kids).map(|((w, _), (x, _))| (*w, *x)).collect();
                        weighted_lse(*r, &vals)
                    };
                    (v, smooth_constancy(&kids))
                }
            }
        }
        Expr::SupMix(a, b) => {
            let (va, ca) = constancy_expr(a, u, moving, o);
            let (vb, cb) = constancy_expr(b, u, moving, o);
            let z0 = vb - va;
            let value = va + h(z0);
            let verdict = match cb {
                Varies => Varies,
                Constant { eps: eb } => {
                    // SupMix equals b exactly on the saturated region
                    // b − a ≥ −1; elsewhere it moves strictly with a.
                    let mut best: Option<f64> = None;
                    if let Constant { eps: ea } = ca {
                        best = Some(ea.min(eb));
                    }
                    match o {
                        Orientation::Increase => {
                            // a climbs at most α, so z ≥ z0 − α keeps the
                            // saturation alive up to radius z0 + 1.
                            if z0 > -1.0 {
                                let c = eb.min(z0 + 1.0);
                                best = Some(best.map_or(c, |b0| b0.max(c)));
                            }
                        }
                        Orientation::Decrease => {
                            // a falls, so z = b − a only grows: saturation,
                            // once present, persists while b is constant.
                            if z0 >= -1.0 {
                                best = Some(best.map_or(eb, |b0| b0.max(eb)));
                            }
                        }
                    }
                    match best {
                        Some(eps) => Constant { eps },
                        None => Varies,
                    }
                }
            };
            (value, verdict)
        }
        Expr::InfMix(a, b) => {
            let (va, ca) = constancy_expr(a, u, moving, o);
            let (vb, cb) = constancy_expr(b, u, moving, o);
            let w0 = va - vb;
            let value = va - h(w0);
            let verdict = match cb {
                Varies => Varies,
                Constant { eps: eb } => {
                    // InfMix equals b exactly on the saturated region
                    // a − b ≥ −1.
                    let mut best: Option<f64> = None;
                    if let Constant { eps: ea } = ca {
                        best = Some(ea.min(eb));
                    }
                    match o {
                        Orientation::Increase => {
                            // a climbs, so w = a − b only grows.
                            if w0 >= -1.0 {
                                best = Some(best.map_or(eb, |b0| b0.max(eb)));
                            }
                        }
                        Orientation::Decrease => {
                            // a falls at most α: w ≥ w0 − α up to w0 + 1.
                            if w0 > -1.0 {
                                let c = eb.min(w0 + 1.0);
                                best = Some(best.map_or(c, |b0| b0.max(c)));
                            }
                        }
                    }
                    match best {
                        Some(eps) => Constant { eps },
                        None => Varies,
                    }
                }
            };
            (value, verdict)
        }
    }
}

/// Constancy of a weighted node that is strictly increasing in every child:
/// constant exactly when all children are.
fn smooth_constancy(kids: &[(f64, Constancy)]) -> Constancy {
    let mut eps = f64::INFINITY;
    for (_, c) in kids {
        match c.eps() {
            Some(e) => eps = eps.min(e),
            None => return Constancy::Varies,
        }
    }
    Constancy::Constant { eps }
}

/// Constancy of a min (`lower = true`) or max node over evaluated children.
///
/// Ties at the extremum are recognized with tolerance [`TIE_TOL`]. In the
/// direction that moves the extremum outward (min under increase, max under
/// decrease), one constant attaining child pins the node; in the inward
/// direction every attaining child must hold still, and the verdict radius
/// is additionally capped by the value gap to the nearest non-attaining
/// child, which is a valid radius because children are 1-Lipschitz in `α`.
fn extremum_constancy(
    kids: &[(f64, Constancy)],
    m: f64,
    lower: bool,
    o: Orientation,
) -> Constancy {
    let tol = TIE_TOL * (1.0 + m.abs());
    let attaining = |v: f64| (v - m).abs() <= tol;
    let exists_rule = match (lower, o) {
        (true, Orientation::Increase) => true,
        (true, Orientation::Decrease) => false,
        (false, Orientation::Increase) => false,
        (false, Orientation::Decrease) => true,
    };
    if exists_rule {
        // The extremum cannot move outward while one attaining child stays.
        let mut best: Option<f64> = None;
        for &(v, c) in kids {
            if attaining(v) {
                if let Some(e) = c.eps() {
                    best = Some(best.map_or(e, |b| b.max(e)));
                }
            }
        }
        match best {
            Some(eps) => Constancy::Constant { eps },
            None => Constancy::Varies,
        }
    } else {
        // The extremum follows its attaining children inward; all must hold,
        // and non-attaining children stay clear within their value gap.
        let mut eps = f64::INFINITY;
        for &(v, c) in kids {
            if attaining(v) {
                match c.eps() {
                    Some(e) => eps = eps.min(e),
                    None => return Constancy::Varies,
                }
            } else {
                let gap = (v - m).abs();
                eps = eps.min(gap);
            }
        }
        Constancy::Constant { eps }
    }
}
