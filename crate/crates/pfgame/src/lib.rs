//! Deciding eigenvector existence and uniqueness for monotone, additively
//! homogeneous operators.
//!
//! An operator `T: R^n -> R^n` built from shifts, minima, maxima, weighted
//! averages, and power means is *monotone* (`x <= y` implies `T(x) <= T(y)`)
//! and *additively homogeneous* (`T(x + c) = T(x) + c` for constants `c`).
//! Such a map need not have an additive eigenvector — a solution of
//! `T(u) = lambda + u` — and when it does, the eigenvector need not be unique
//! up to additive constants. This crate answers both questions exactly, by
//! combinatorial means, and then backs every verdict with a numerical
//! certificate:
//!
//! - **Robust existence** ([`decide_existence`]): does `g + T` have an
//!   eigenvector for *every* perturbation vector `g`? Equivalently, are all
//!   slice spaces `{x : alpha + x <= T(x) <= beta + x}` bounded in the
//!   Hilbert seminorm? The answer is *no* exactly when two derived
//!   hypergraphs admit a pair of disjoint *dominions* — state sets one player
//!   of an associated two-player game can keep the play inside.
//! - **Uniqueness at an eigenvector** ([`decide_uniqueness`]): given `u` with
//!   `T(u) = lambda + u`, is every other eigenvector of the form `u + c`?
//!   The same dominion criterion applies to a localized game at `u`, and a
//!   negative answer comes with an explicit second eigenvector
//!   ([`second_eigenvector`]).
//!
//! Verdicts are produced by hypergraph reachability over *limit oracles* —
//! exact directional limits of each coordinate expression — so no floating
//! point tolerance enters the decision itself. A negative existence verdict
//! can be validated independently by [`certify_disjoint_dominions`], which
//! exhibits a perturbed operator whose iterates provably drift apart.
//!
//! Numerical companions: [`numerics::solve_ergodic`] finds eigenvectors by
//! damped fixed-point iteration, [`numerics::mean_payoff`] computes iterate
//! averages, and [`numerics::tensor_eigenpair`] solves the positive
//! eigenproblem for entrywise-nonnegative tensors through an additive
//! conjugate (multiplicative power means become averages after taking logs).
//!
//! # Quick start
//!
//! ```
//! use pfgame::{decide_existence, parse_operator, Verdict};
//!
//! let op = parse_operator(
//!     "operator n=2\n\
//!      T1 := avg(0.5:x1, 0.5:x2)\n\
//!      T2 := max(-1 + x1, x2)\n",
//! )
//! .unwrap();
//! let report = decide_existence(&op).unwrap();
//! assert_eq!(report.verdict, Verdict::NoDisjointDominions);
//! ```
//!
//! The `examples/` directory walks through every capability end to end, and
//! the `pfgame` binary exposes the same operations as subcommands.

pub mod cli;
pub mod decide;
pub mod dsl;
pub mod expr;
pub mod games;
pub mod generate;
pub mod hypergraph;
pub mod nodeset;
pub mod numerics;
pub mod tensor;
pub mod transform;

pub use decide::{
    brute_force_existence, certify_disjoint_dominions, decide_existence,
    decide_existence_general, decide_uniqueness, decide_uniqueness_general, eigenvalue_at,
    second_eigenvector, CertifyError, DecideError, DecisionReport, DominionCertificate,
    SearchPath, SecondEigError, Verdict,
};
pub use dsl::{parse_operator, print_operator, ParseError};
pub use expr::{
    Constancy, Convexity, Expr, ExtValue, Operator, OperatorError, Orientation, Sign,
};
pub use games::{
    build_digraph, build_hypergraph, dominions, hypergraph_oracle, is_dominion,
    tensor_digraph, tensor_hypergraph, GameError, GameKind, Player,
};
pub use hypergraph::{Digraph, GraphError, HeadOracle, Hyperarc, Hypergraph};
pub use nodeset::NodeSet;
pub use numerics::{
    hilbert_seminorm, mean_payoff, perturb_diagonal, slice_membership, solve_ergodic,
    tensor_eigenpair, EigWitness, SolveConfig, SolveError, TensorEigenpair,
};
pub use tensor::{tensor_to_operator, Tensor, TensorError};
pub use transform::{normalize_at, permute, recession, shift_input, signature, TransformError};
