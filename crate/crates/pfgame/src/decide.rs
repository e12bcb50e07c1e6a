//! Decision procedures for robust existence and uniqueness of eigenvectors.
//!
//! *Existence*: all slice spaces of `T` are bounded — equivalently, the
//! ergodic equation `T(u) = λe + u` is solvable for every additive
//! perturbation `g + T` — exactly when Min and Max have no disjoint
//! dominions in the game at infinity. *Uniqueness*: an eigenvector `u` is
//! unique up to additive constants exactly when the local game at `u`
//! admits no disjoint dominions.
//!
//! Both questions reduce to hypergraph reachability. The general procedure
//! enumerates candidate Min dominions `I` in ascending (size, bitmask)
//! order and, for each, chases the decrease-direction hypergraph: if the
//! closure `R = reach(I)` misses part of the state space, the complement of
//! `R` is a Max dominion disjoint from `I`, and the pair is returned as a
//! witness. For syntactically convex operators the search collapses to
//! final classes of a digraph on singleton directions.
//!
//! Positive verdicts are backed by constructive artifacts:
//! [`certify_disjoint_dominions`] turns a disjoint pair at infinity into
//! explicit bounds making the perturbed mean payoff provably nonconstant,
//! and [`second_eigenvector`] turns a disjoint pair in the local game into
//! a second eigenvector differing from `u` by a nonconstant vector.

use crate::expr::{Constancy, Operator, OperatorError, Orientation, Sign};
use crate::games::{
    build_digraph, hypergraph_oracle, is_dominion, GameKind, Player,
};
use crate::nodeset::{nonempty_subsets, NodeSet};
use crate::transform::normalize_at;
use serde_json::json;
use thiserror::Error;

/// Outcome of a disjoint-dominion search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// Every Min dominion meets every Max dominion.
    NoDisjointDominions,
    /// A Min dominion and a Max dominion that do not intersect.
    DisjointDominions {
        min_dominion: NodeSet,
        max_dominion: NodeSet,
    },
}

/// Which search produced a report.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchPath {
    /// Subset enumeration with dominion pruning.
    General,
    /// Final classes of the singleton digraph (convex operators only).
    ConvexFast,
}

/// Result of a decision procedure, carrying the witness if one exists.
#[derive(Clone, Debug, PartialEq)]
pub struct DecisionReport {
    pub verdict: Verdict,
    /// The game that was searched.
    pub game: GameKind,
    /// Number of exact limit/constancy queries issued.
    pub oracle_calls: usize,
    pub path: SearchPath,
}

impl DecisionReport {
    /// JSON form with 1-based witness sets; `I`/`J` appear only on a
    /// disjoint verdict.
    pub fn to_json_value(&self) -> serde_json::Value {
        let game = match &self.game {
            GameKind::AtInfinity => json!("infinity"),
            GameKind::LocalAt(u) => json!({ "local_at": u }),
        };
        let path = match self.path {
            SearchPath::General => "general",
            SearchPath::ConvexFast => "convex-fast",
        };
        match &self.verdict {
            Verdict::NoDisjointDominions => json!({
                "verdict": "no-disjoint-dominions",
                "game": game,
                "oracle_calls": self.oracle_calls,
                "path": path,
            }),
            Verdict::DisjointDominions {
                min_dominion,
                max_dominion,
            } => json!({
                "verdict": "disjoint-dominions",
                "I": min_dominion.one_based(),
                "J": max_dominion.one_based(),
                "game": game,
                "oracle_calls": self.oracle_calls,
                "path": path,
            }),
        }
    }
}

/// Errors from the decision procedures.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum DecideError {
    /// The requested search is exponential and the operator exceeds its
    /// practical size limit.
    #[error("{n} states exceed the limit of {limit} for this search")]
    TooLarge { n: usize, limit: usize },
    /// The base point fails the ergodic equation beyond tolerance, so the
    /// local game does not speak about uniqueness there.
    #[error("point is not an eigenvector: residual {residual:e} exceeds 1e-8")]
    NotAnEigenvector { residual: f64 },
    /// The base point is malformed.
    #[error(transparent)]
    Input(#[from] OperatorError),
}

/// Practical cap for the subset-enumeration path.
const GENERAL_LIMIT: usize = 24;
/// Cap for the all-pairs brute-force reference search.
const BRUTE_FORCE_LIMIT: usize = 5;
/// A candidate eigenvector may miss the ergodic equation by this much.
const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Decides whether Min and Max have disjoint dominions in the game at
/// infinity: `NoDisjointDominions` means every additively perturbed
/// operator `g + T` has an eigenvector (all slice spaces are bounded).
///
/// Convex operators take the digraph fast path; otherwise subsets are
/// enumerated (limit `n ≤ 24`).
pub fn decide_existence(op: &Operator) -> Result<DecisionReport, DecideError> {
    decide(op, GameKind::AtInfinity)
}

/// [`decide_existence`] forced onto the general subset-enumeration path,
/// regardless of convexity. Used to cross-check the fast path.
pub fn decide_existence_general(op: &Operator) -> Result<DecisionReport, DecideError> {
    decide_general(op, GameKind::AtInfinity)
}

/// Decides whether the eigenvector `u` is unique up to an additive
/// constant, by searching the local game at `u` for disjoint dominions.
///
/// # Errors
///
/// [`DecideError::NotAnEigenvector`] if `‖T(u) − λe − u‖_∞ > 1e-8` for the
/// best constant `λ`.
pub fn decide_uniqueness(op: &Operator, u: &[f64]) -> Result<DecisionReport, DecideError> {
    check_eigenvector(op, u)?;
    decide(op, GameKind::LocalAt(u.to_vec()))
}

/// [`decide_uniqueness`] forced onto the general path.
pub fn decide_uniqueness_general(
    op: &Operator,
    u: &[f64],
) -> Result<DecisionReport, DecideError> {
    check_eigenvector(op, u)?;
    decide_general(op, GameKind::LocalAt(u.to_vec()))
}

/// The best eigenvalue candidate at `u` and the worst coordinate residual:
/// `λ = (max + min)/2` of `T(u) − u`, residual `‖T(u) − λe − u‖_∞`.
pub fn eigenvalue_at(op: &Operator, u: &[f64]) -> Result<(f64, f64), OperatorError> {
    let tu = op.eval(u)?;
    let drift: Vec<f64> = tu.iter().zip(u).map(|(t, x)| t - x).collect();
    let max = drift.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = drift.iter().cloned().fold(f64::INFINITY, f64::min);
    let lambda = 0.5 * (max + min);
    Ok((lambda, 0.5 * (max - min)))
}

fn check_eigenvector(op: &Operator, u: &[f64]) -> Result<f64, DecideError> {
    let (lambda, residual) = eigenvalue_at(op, u)?;
    if residual > EIGEN_RESIDUAL_TOL {
        return Err(DecideError::NotAnEigenvector { residual });
    }
    Ok(lambda)
}

fn decide(op: &Operator, game: GameKind) -> Result<DecisionReport, DecideError> {
    if op.convexity() == crate::expr::Convexity::Convex {
        decide_convex(op, game)
    } else {
        decide_general(op, game)
    }
}

fn decide_general(op: &Operator, game: GameKind) -> Result<DecisionReport, DecideError> {
    let n = op.n();
    if n > GENERAL_LIMIT {
        return Err(DecideError::TooLarge {
            n,
            limit: GENERAL_LIMIT,
        });
    }
    let (verdict, oracle_calls) = {
        let plus = hypergraph_oracle(op, &game, Sign::Plus);
        let minus = hypergraph_oracle(op, &game, Sign::Minus);
        let full = NodeSet::full(n);
        let mut verdict = Verdict::NoDisjointDominions;
        for candidate in nonempty_subsets(n) {
            if candidate == full {
                continue;
            }
            // `candidate` is a Min dominion iff no state inside it is
            // forced out along the complementary direction.
            let complement = candidate.complement(n);
            if candidate.iter().any(|i| plus.is_hyperarc(complement, i)) {
                continue;
            }
            let reached = minus.reach(candidate);
            if reached != full {
                verdict = Verdict::DisjointDominions {
                    min_dominion: candidate,
                    max_dominion: reached.complement(n),
                };
                break;
            }
        }
        (verdict, plus.calls() + minus.calls())
    };
    let report = DecisionReport {
        verdict,
        oracle_calls,
        game,
        path: SearchPath::General,
    };
    debug_assert!(witness_is_valid(op, &report));
    Ok(report)
}

fn decide_convex(op: &Operator, game: GameKind) -> Result<DecisionReport, DecideError> {
    let n = op.n();
    let (verdict, oracle_calls) = {
        let digraph = build_digraph(op, &game).expect("caller checked convexity");
        let classes = digraph.final_classes();
        let minus = hypergraph_oracle(op, &game, Sign::Minus);
        let verdict = if classes.len() >= 2 {
            // Distinct final classes are dominions of both players, so any
            // two of them witness disjointness.
            Verdict::DisjointDominions {
                min_dominion: classes[0],
                max_dominion: classes[1],
            }
        } else {
            let class = classes[0];
            let reached = minus.reach(class);
            if reached == NodeSet::full(n) {
                Verdict::NoDisjointDominions
            } else {
                Verdict::DisjointDominions {
                    min_dominion: class,
                    max_dominion: reached.complement(n),
                }
            }
        };
        (verdict, n * n + minus.calls())
    };
    let report = DecisionReport {
        verdict,
        oracle_calls,
        game,
        path: SearchPath::ConvexFast,
    };
    debug_assert!(witness_is_valid(op, &report));
    Ok(report)
}

fn witness_is_valid(op: &Operator, report: &DecisionReport) -> bool {
    match &report.verdict {
        Verdict::NoDisjointDominions => true,
        Verdict::DisjointDominions {
            min_dominion,
            max_dominion,
        } => {
            min_dominion.intersection(*max_dominion).is_empty()
                && is_dominion(op, &report.game, Player::Min, *min_dominion)
                && is_dominion(op, &report.game, Player::Max, *max_dominion)
        }
    }
}

/// Reference search: tests every pair of disjoint nonempty sets directly
/// against the dominion definition, in ascending (size, bitmask) order on
/// both components. Exponential twice over; limited to `n ≤ 5`.
pub fn brute_force_existence(op: &Operator) -> Result<DecisionReport, DecideError> {
    let n = op.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(DecideError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let game = GameKind::AtInfinity;
    let mut verdict = Verdict::NoDisjointDominions;
    'outer: for i_set in nonempty_subsets(n) {
        if !is_dominion(op, &game, Player::Min, i_set) {
            continue;
        }
        for j_set in nonempty_subsets(n) {
            if !i_set.intersection(j_set).is_empty() {
                continue;
            }
            if is_dominion(op, &game, Player::Max, j_set) {
                verdict = Verdict::DisjointDominions {
                    min_dominion: i_set,
                    max_dominion: j_set,
                };
                break 'outer;
            }
        }
    }
    Ok(DecisionReport {
        verdict,
        game,
        oracle_calls: 0,
        path: SearchPath::General,
    })
}

/// Explicit bounds certifying a disjoint-dominion verdict at infinity.
///
/// With `I` a Min dominion and `J` a Max dominion, the exact limits supply
/// `β ≥ T_i(k·e_Ī)` for all `i ∈ I, k ≥ 0` and `α ≤ T_j(k·e_J) − k` for
/// all `j ∈ J, k ≥ 0`, widened so that `α ≤ T_ℓ(0) ≤ β` everywhere. For
/// any integer `s > β − α`, the perturbed map `S = s·e_J + T` then
/// satisfies the sandwich
/// `k(s·e_J + αe) ≤ Sᵏ(0) ≤ k(s·e_Ī + βe)`,
/// which keeps the mean payoff of coordinates in `J` at least
/// `s − (β − α) > 0` above those in `I` — no additive perturbation of `T`
/// can have an eigenvector.
#[derive(Clone, Debug, PartialEq)]
pub struct DominionCertificate {
    /// Lower bound: `α ≤ T_j(k·e_J) − k` on `J`, and `α ≤ T_ℓ(0)`.
    pub alpha: f64,
    /// Upper bound: `T_i(k·e_Ī) ≤ β` on `I`, and `T_ℓ(0) ≤ β`.
    pub beta: f64,
    /// The integer perturbation size `s = ⌈β − α⌉ + 1 > β − α`.
    pub s: f64,
    /// Number of iterates over which the inequalities were verified.
    pub horizon: usize,
    /// Whether every checked inequality held (a theorem; `false` would
    /// indicate an implementation bug).
    pub verified: bool,
}

/// Errors from certificate construction.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum CertifyError {
    /// Only reports about the game at infinity can be certified this way.
    #[error("certificate applies to the game at infinity only")]
    WrongGame,
    /// The report's verdict carries no witness pair.
    #[error("report has no disjoint-dominion witness to certify")]
    MissingWitness,
    /// A claimed dominion fails the dominion re-check.
    #[error("{set:?} is not a dominion of {player:?} in the game at infinity")]
    NotADominion { player: Player, set: Vec<usize> },
}

/// Number of iterates checked by [`certify_disjoint_dominions`].
const CERTIFY_HORIZON: usize = 50;

/// Builds and checks a [`DominionCertificate`] from a disjoint-dominion
/// report about the game at infinity.
///
/// # Errors
///
/// Rejects reports about the local game, reports without a witness, and
/// witness sets that fail the dominion re-check.
pub fn certify_disjoint_dominions(
    op: &Operator,
    report: &DecisionReport,
) -> Result<DominionCertificate, CertifyError> {
    if report.game != GameKind::AtInfinity {
        return Err(CertifyError::WrongGame);
    }
    let (i_set, j_set) = match &report.verdict {
        Verdict::DisjointDominions {
            min_dominion,
            max_dominion,
        } => (*min_dominion, *max_dominion),
        Verdict::NoDisjointDominions => return Err(CertifyError::MissingWitness),
    };
    for (player, set) in [(Player::Min, i_set), (Player::Max, j_set)] {
        if !is_dominion(op, &GameKind::AtInfinity, player, set) {
            return Err(CertifyError::NotADominion {
                player,
                set: set.one_based(),
            });
        }
    }

    let n = op.n();
    let origin = vec![0.0; n];
    let t0 = op.eval(&origin).expect("origin is a valid point");

    // β: exact limits along +∞·e_Ī over I (finite by the dominion
    // property, and an upper bound for every finite scale by monotonicity),
    // widened by the values at the origin.
    let icomp = i_set.complement(n);
    let mut beta = t0.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    for i in i_set.iter() {
        let limit = op
            .eval_ext(i, icomp, Sign::Plus)
            .finite()
            .expect("Min dominion keeps the limit finite");
        beta = beta.max(limit);
    }
    // α: dually, exact limits along −∞·e_J̄ over J, widened by the origin.
    let jcomp = j_set.complement(n);
    let mut alpha = t0.iter().cloned().fold(f64::INFINITY, f64::min);
    for j in j_set.iter() {
        let limit = op
            .eval_ext(j, jcomp, Sign::Minus)
            .finite()
            .expect("Max dominion keeps the limit finite");
        alpha = alpha.min(limit);
    }

    let s = (beta - alpha).ceil() + 1.0;
    let slack = |bound: f64| 1e-9 * (1.0 + bound.abs());

    let mut verified = true;
    // Dominion inequalities at integer scales.
    for k in 0..=CERTIFY_HORIZON {
        let scale = k as f64;
        let on_icomp: Vec<f64> = (0..n)
            .map(|l| if icomp.contains(l) { scale } else { 0.0 })
            .collect();
        for i in i_set.iter() {
            let v = op.eval_coord(i, &on_icomp).expect("valid point");
            if v > beta + slack(beta) {
                verified = false;
            }
        }
        let on_j: Vec<f64> = (0..n)
            .map(|l| if j_set.contains(l) { scale } else { 0.0 })
            .collect();
        for j in j_set.iter() {
            let v = op.eval_coord(j, &on_j).expect("valid point");
            let bound = scale + alpha;
            if v < bound - slack(bound) {
                verified = false;
            }
        }
    }
    // Sandwich on the iterates of S = s·e_J + T.
    let mut y = origin;
    for k in 1..=CERTIFY_HORIZON {
        let ty = op.eval(&y).expect("iterates stay finite");
        y = ty
            .iter()
            .enumerate()
            .map(|(l, v)| if j_set.contains(l) { v + s } else { *v })
            .collect();
        let scale = k as f64;
        for (l, value) in y.iter().enumerate() {
            let lower = scale * (if j_set.contains(l) { s } else { 0.0 } + alpha);
            let upper = scale * (if icomp.contains(l) { s } else { 0.0 } + beta);
            if *value < lower - slack(lower) || *value > upper + slack(upper) {
                verified = false;
            }
        }
    }

    Ok(DominionCertificate {
        alpha,
        beta,
        s,
        horizon: CERTIFY_HORIZON,
        verified,
    })
}

/// Errors from the second-eigenvector construction.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum SecondEigError {
    /// The base point is malformed.
    #[error(transparent)]
    Input(#[from] OperatorError),
    /// The base point fails the ergodic equation beyond tolerance.
    #[error("point is not an eigenvector: residual {residual:e} exceeds 1e-8")]
    NotAnEigenvector { residual: f64 },
    /// The witness sets overlap or are empty.
    #[error("witness sets must be nonempty and disjoint")]
    BadWitness,
    /// A witness set is not a dominion of the local game at the point.
    #[error("{set:?} is not a dominion of {player:?} in the local game")]
    NotADominion { player: Player, set: Vec<usize> },
    /// The monotone iteration did not settle within its cap.
    #[error("iteration cap of {iterations} reached; last step {last_step:e}")]
    IterationCap { iterations: usize, last_step: f64 },
    /// The result failed its own validity check (indicates a bug).
    #[error("constructed vector fails the ergodic equation: residual {residual:e}")]
    Postcondition { residual: f64 },
}

/// Step threshold for the monotone iteration.
const ITERATION_STEP_TOL: f64 = 1e-12;
/// Iteration cap for the monotone iteration.
const ITERATION_CAP: usize = 100_000;

/// Builds a second eigenvector from a disjoint-dominion pair `(I, J)` of
/// the local game at the eigenvector `u`.
///
/// In the setting recentered at `(λ, u)`, local constancy gives an
/// `ε > 0` with `T̃(x) = 0` on the faces `x = ε·e_Ī`-below for `I` and
/// `x = ε·e_J`-above for `J`. The returned vector is `u + v` where
/// `v_i = 0` on `I`, `v_j = ε` on `J`, and the remaining coordinates are
/// the limit of a componentwise-nonincreasing monotone iteration started
/// at the top corner of `[0, ε]^L`. The output satisfies
/// `‖T(v) − λe − v‖_∞` within tolerance, and `v − u` has spread at least
/// `ε/2`, so `u` is not unique up to constants.
pub fn second_eigenvector(
    op: &Operator,
    u: &[f64],
    min_dominion: NodeSet,
    max_dominion: NodeSet,
) -> Result<Vec<f64>, SecondEigError> {
    let n = op.n();
    let (lambda, residual_u) = eigenvalue_at(op, u)?;
    if residual_u > EIGEN_RESIDUAL_TOL {
        return Err(SecondEigError::NotAnEigenvector {
            residual: residual_u,
        });
    }
    if min_dominion.is_empty()
        || max_dominion.is_empty()
        || !min_dominion.intersection(max_dominion).is_empty()
        || !min_dominion.union(max_dominion).is_subset(NodeSet::full(n))
    {
        return Err(SecondEigError::BadWitness);
    }

    // Collect the constancy certificates behind the dominion property; the
    // smallest finite breakpoint bounds how far the faces stay flat.
    let mut eps_min = f64::INFINITY;
    let icomp = min_dominion.complement(n);
    for i in min_dominion.iter() {
        match op.constancy(i, u, icomp, Orientation::Increase)? {
            Constancy::Constant { eps } => eps_min = eps_min.min(eps),
            Constancy::Varies => {
                return Err(SecondEigError::NotADominion {
                    player: Player::Min,
                    set: min_dominion.one_based(),
                })
            }
        }
    }
    let jcomp = max_dominion.complement(n);
    for j in max_dominion.iter() {
        match op.constancy(j, u, jcomp, Orientation::Decrease)? {
            Constancy::Constant { eps } => eps_min = eps_min.min(eps),
            Constancy::Varies => {
                return Err(SecondEigError::NotADominion {
                    player: Player::Max,
                    set: max_dominion.one_based(),
                })
            }
        }
    }
    let eps = if eps_min.is_finite() {
        0.5 * eps_min
    } else {
        1.0
    };

    let tilde = normalize_at(op, u, lambda).expect("validated eigenpair");
    let rest = min_dominion
        .union(max_dominion)
        .complement(n);

    // v agrees with 0 on I and ε on J; the free coordinates start at the
    // top corner and slide down monotonically to the greatest fixed point.
    let embed = |x: &[f64]| -> Vec<f64> {
        let mut point = vec![0.0; n];
        for j in max_dominion.iter() {
            point[j] = eps;
        }
        for (slot, l) in rest.iter().enumerate() {
            point[l] = x[slot];
        }
        point
    };
    let free = rest.len();
    let mut x = vec![eps; free];
    if free > 0 {
        let mut settled = false;
        let mut last_step = f64::INFINITY;
        for _ in 0..ITERATION_CAP {
            let image = tilde.eval(&embed(&x)).expect("iterates stay finite");
            let next: Vec<f64> = rest
                .iter()
                .map(|l| image[l].clamp(0.0, eps))
                .collect();
            last_step = x
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            x = next;
            if last_step < ITERATION_STEP_TOL {
                settled = true;
                break;
            }
        }
        if !settled {
            return Err(SecondEigError::IterationCap {
                iterations: ITERATION_CAP,
                last_step,
            });
        }
    }

    let offset = embed(&x);
    let v: Vec<f64> = u.iter().zip(&offset).map(|(a, b)| a + b).collect();

    // Validity: v solves the ergodic equation for the same λ, and differs
    // from u by a nonconstant vector.
    let tv = op.eval(&v).expect("valid point");
    let residual = tv
        .iter()
        .zip(&v)
        .map(|(t, w)| (t - lambda - w).abs())
        .fold(0.0, f64::max);
    let tol = 1e-9 + 2.0 * residual_u;
    if residual > tol {
        return Err(SecondEigError::Postcondition { residual });
    }
    let spread = offset.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - offset.iter().cloned().fold(f64::INFINITY, f64::min);
    if spread < 0.5 * eps {
        return Err(SecondEigError::Postcondition { residual: spread });
    }
    Ok(v)
}
