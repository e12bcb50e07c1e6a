//! The two set-choice games attached to an operator, and their graphs.
//!
//! For a monotone additively homogeneous `T`, two games on the state space
//! `[n]` drive every decision in this crate. In the *game at infinity*, an
//! action set `S` is admissible for Min in state `i` when `T_i` stays
//! bounded above along the ray `+α·e_{S̄}` (and dually for Max at `−∞`). In
//! the *local game* at a point `u`, admissibility asks for one-sided local
//! constancy of `T_i` at `u` along the complementary direction. A set `Δ` is
//! a *dominion* of a player if it is admissible in every one of its own
//! states.
//!
//! Dominions are complements of invariant sets of the associated
//! hypergraphs, which this module builds as lazy oracles over the exact
//! limit and constancy queries of [`Operator`]; for convex operators a
//! digraph on singleton directions suffices. Tensors get a direct
//! pattern-based fast path that never touches expression evaluation.

use crate::expr::{Operator, Orientation, Sign};
use crate::hypergraph::{Digraph, HeadOracle, Hypergraph};
use crate::nodeset::{nonempty_subsets, NodeSet};
use crate::tensor::Tensor;
use thiserror::Error;

/// Which game is being played: at infinity, or locally at a point.
#[derive(Clone, Debug, PartialEq)]
pub enum GameKind {
    /// The game whose Min (resp. Max) actions are constrained by limits at
    /// `+∞` (resp. `−∞`).
    AtInfinity,
    /// The local game at the given point, with actions constrained by
    /// one-sided local constancy. The point must be finite with one entry
    /// per coordinate.
    LocalAt(Vec<f64>),
}

/// The two players of the set-choice games.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Player {
    Min,
    Max,
}

/// Errors from the game constructions.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum GameError {
    /// The digraph reduction is only sound for certified convex operators.
    #[error("the digraph fast path requires a syntactically convex operator")]
    NotConvex,
}

/// Whether action set `S` is admissible for `player` in `state`.
///
/// The full action `S = [n]` is always admissible and short-circuits
/// without consulting the operator. Otherwise the complement `S̄` is fed to
/// the exact oracles: at infinity, Min needs `lim_{α→+∞} T_i(α e_S̄)`
/// finite and Max the dual limit at `−∞`; locally at `u`, Min needs `T_i`
/// constant on a right-neighborhood along `+e_S̄` and Max along `−e_S̄`.
///
/// # Panics
///
/// If `state ≥ n`, if `action` is empty or contains states `≥ n`, or if a
/// `LocalAt` base point is malformed.
pub fn action_ok(
    op: &Operator,
    game: &GameKind,
    player: Player,
    state: usize,
    action: NodeSet,
) -> bool {
    let n = op.n();
    assert!(state < n, "state out of range");
    assert!(!action.is_empty(), "actions are nonempty sets of states");
    assert!(
        action.is_subset(NodeSet::full(n)),
        "action must consist of states"
    );
    let complement = action.complement(n);
    if complement.is_empty() {
        return true;
    }
    match (game, player) {
        (GameKind::AtInfinity, Player::Min) => {
            op.eval_ext(state, complement, Sign::Plus).is_finite()
        }
        (GameKind::AtInfinity, Player::Max) => {
            op.eval_ext(state, complement, Sign::Minus).is_finite()
        }
        (GameKind::LocalAt(u), Player::Min) => op
            .locally_constant(state, u, complement, Orientation::Increase)
            .expect("local game base point must be finite with one entry per coordinate"),
        (GameKind::LocalAt(u), Player::Max) => op
            .locally_constant(state, u, complement, Orientation::Decrease)
            .expect("local game base point must be finite with one entry per coordinate"),
    }
}

/// Whether `delta` is a dominion of `player`: admissible as an action in
/// every one of its own states.
///
/// # Panics
///
/// If `delta` is empty or malformed (see [`action_ok`]).
pub fn is_dominion(op: &Operator, game: &GameKind, player: Player, delta: NodeSet) -> bool {
    assert!(!delta.is_empty(), "dominions are nonempty");
    delta
        .iter()
        .all(|i| action_ok(op, game, player, i, delta))
}

/// Enumerates the admissible actions of `player` in `state`, in ascending
/// (size, bitmask) order. Exponential in `n`; guarded to `n ≤ 20`.
pub fn admissible_actions(
    op: &Operator,
    game: &GameKind,
    player: Player,
    state: usize,
) -> Vec<NodeSet> {
    assert!(op.n() <= 20, "action enumeration is exponential; n ≤ 20 required");
    nonempty_subsets(op.n())
        .filter(|s| action_ok(op, game, player, state, *s))
        .collect()
}

/// Enumerates the dominions of `player`, in ascending (size, bitmask)
/// order. Exponential in `n`; guarded to `n ≤ 20`.
pub fn dominions(op: &Operator, game: &GameKind, player: Player) -> Vec<NodeSet> {
    assert!(op.n() <= 20, "dominion enumeration is exponential; n ≤ 20 required");
    nonempty_subsets(op.n())
        .filter(|s| is_dominion(op, game, player, *s))
        .collect()
}

/// The lazy hyperarc oracle of the game's hypergraph in the given
/// direction.
///
/// `(J, {i})` is a hyperarc (for `i ∉ J`) exactly when the blocking oracle
/// fires: with `Sign::Plus`, `T_i` grows without bound along `+α e_J` (at
/// infinity) or strictly increases locally (local game); with
/// `Sign::Minus`, the mirror conditions at `−∞` / decrease. Invariant sets
/// of the `Plus` (resp. `Minus`) hypergraph are exactly the complements of
/// Min (resp. Max) dominions.
pub fn hypergraph_oracle<'a>(
    op: &'a Operator,
    game: &'a GameKind,
    sign: Sign,
) -> HeadOracle<'a> {
    if let GameKind::LocalAt(u) = game {
        // Validate the base point once up front, so oracle queries cannot
        // fail later.
        op.eval(u)
            .expect("local game base point must be finite with one entry per coordinate");
    }
    let test = move |tail: NodeSet, head: usize| -> bool {
        match (game, sign) {
            (GameKind::AtInfinity, Sign::Plus) => {
                op.eval_ext(head, tail, Sign::Plus) == crate::expr::ExtValue::PosInf
            }
            (GameKind::AtInfinity, Sign::Minus) => {
                op.eval_ext(head, tail, Sign::Minus) == crate::expr::ExtValue::NegInf
            }
            (GameKind::LocalAt(u), Sign::Plus) => !op
                .locally_constant(head, u, tail, Orientation::Increase)
                .expect("validated base point"),
            (GameKind::LocalAt(u), Sign::Minus) => !op
                .locally_constant(head, u, tail, Orientation::Decrease)
                .expect("validated base point"),
        }
    };
    HeadOracle::new(op.n(), test)
}

/// Materializes the game hypergraph by exhaustive oracle queries.
/// Exponential in `n`; guarded to `n ≤ 20`.
pub fn build_hypergraph(op: &Operator, game: &GameKind, sign: Sign) -> Hypergraph {
    hypergraph_oracle(op, game, sign).materialize()
}

/// The digraph on singleton directions, sound for convex operators only:
/// edge `i → j` when `T_i` grows without bound along `+α e_j` (at
/// infinity), or strictly increases at `u` along `+e_j` (local game).
///
/// For a convex operator, the final classes of this digraph are Min
/// dominions, and every Min dominion contains one, which collapses the
/// exponential dominion search to strongly connected components.
///
/// # Errors
///
/// [`GameError::NotConvex`] unless the operator is certified convex.
pub fn build_digraph(op: &Operator, game: &GameKind) -> Result<Digraph, GameError> {
    if op.convexity() != crate::expr::Convexity::Convex {
        return Err(GameError::NotConvex);
    }
    if let GameKind::LocalAt(u) = game {
        op.eval(u)
            .expect("local game base point must be finite with one entry per coordinate");
    }
    let n = op.n();
    let mut g = Digraph::new(n);
    for i in 0..n {
        for j in 0..n {
            let edge = match game {
                GameKind::AtInfinity => {
                    op.eval_ext(i, NodeSet::singleton(j), Sign::Plus)
                        == crate::expr::ExtValue::PosInf
                }
                GameKind::LocalAt(u) => !op
                    .locally_constant(i, u, NodeSet::singleton(j), Orientation::Increase)
                    .expect("validated base point"),
            };
            if edge {
                g.add_edge(i, j);
            }
        }
    }
    Ok(g)
}

/// The pattern-based hyperarc oracle of a tensor: `(J, {i})` is a hyperarc
/// (for `i ∉ J`) when every positive entry of row `i` has one of its later
/// indices in `J`. Agrees with the `Minus` hypergraph of the conjugated
/// operator, while looking only at the pattern.
pub fn tensor_hypergraph(t: &Tensor) -> HeadOracle<'_> {
    let test = move |tail: NodeSet, head: usize| -> bool {
        t.later_sets(head)
            .iter()
            .all(|s| !s.intersection(tail).is_empty())
    };
    HeadOracle::new(t.n(), test)
}

/// The pattern digraph of a tensor: edge `i → j` when `j` appears as a
/// later index of some positive entry of row `i`. Agrees with the digraph
/// of the conjugated operator at infinity.
pub fn tensor_digraph(t: &Tensor) -> Digraph {
    let mut g = Digraph::new(t.n());
    for i in 0..t.n() {
        for s in t.later_sets(i) {
            for j in s.iter() {
                g.add_edge(i, j);
            }
        }
    }
    g
}
