//! Single-trial property checks shared by the property harness and the
//! acceptance gate. Each function runs one fully seeded trial and panics
//! with a descriptive message on violation, so callers can drive them from
//! a property-test runner or a plain counted loop.
//!
//! Each integration target compiles its own copy and uses its own subset,
//! so unused-item lints are suppressed here.
#![allow(dead_code)]

use pfgame::expr::{Expr, ExtValue, Sign};
use pfgame::games::{admissible_actions, hypergraph_oracle, is_dominion, GameKind, Player};
use pfgame::generate::{
    random_minmax_affine, random_operator, random_permutation, random_point, rng,
};
use pfgame::nodeset::{nonempty_subsets, NodeSet};
use pfgame::numerics::{hilbert_seminorm, perturb_diagonal};
use pfgame::transform::permute;
use pfgame::{decide_existence, Operator, Verdict};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Draws an operator from the full grammar: min/max/affine shapes, power
/// means, or coordinates wrapped in mixture nodes — so the properties are
/// exercised on every node kind.
pub fn trial_operator(r: &mut ChaCha8Rng, n: usize) -> Operator {
    match r.gen_range(0..3u8) {
        0 => random_operator(r, n),
        1 => pfgame::generate::random_mbar(r, n),
        _ => {
            let coords = (0..n)
                .map(|_| {
                    let a = random_minmax_affine(r, n);
                    let b = random_minmax_affine(r, n);
                    if r.gen_bool(0.5) {
                        Expr::SupMix(Box::new(a), Box::new(b))
                    } else {
                        Expr::InfMix(Box::new(a), Box::new(b))
                    }
                })
                .collect();
            Operator::new(n, coords).expect("generated coordinates are well-formed")
        }
    }
}

fn trial_size(r: &mut ChaCha8Rng) -> usize {
    r.gen_range(2..=4)
}

/// Componentwise `x ≤ y` implies `T(x) ≤ T(y)`, exactly: every node kind
/// is a composition of weakly monotone rounded primitives.
pub fn check_monotonicity(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let x = random_point(&mut r, n);
    let y: Vec<f64> = x.iter().map(|v| v + r.gen_range(0.0..2.0)).collect();
    let tx = op.eval(&x).expect("in-domain point");
    let ty = op.eval(&y).expect("in-domain point");
    for i in 0..n {
        assert!(
            tx[i] <= ty[i],
            "monotonicity violated in coordinate {} (seed {seed}): {} > {}",
            i + 1,
            tx[i],
            ty[i]
        );
    }
}

/// `T(x + c·e) = T(x) + c` to `1e-10` for random constants `c`.
pub fn check_homogeneity(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let x = random_point(&mut r, n);
    let c: f64 = r.gen_range(-5.0..5.0);
    let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
    let tx = op.eval(&x).expect("in-domain point");
    let ts = op.eval(&shifted).expect("in-domain point");
    for i in 0..n {
        assert!(
            (ts[i] - tx[i] - c).abs() <= 1e-10,
            "additive homogeneity violated in coordinate {} (seed {seed}): {} vs {} + {c}",
            i + 1,
            ts[i],
            tx[i]
        );
    }
}

/// `‖T(x) − T(y)‖_H ≤ ‖x − y‖_H`, up to `1e-10` of rounding slack.
pub fn check_nonexpansive(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let x = random_point(&mut r, n);
    let y = random_point(&mut r, n);
    let tx = op.eval(&x).expect("in-domain point");
    let ty = op.eval(&y).expect("in-domain point");
    let image: Vec<f64> = tx.iter().zip(&ty).map(|(a, b)| a - b).collect();
    let source: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a - b).collect();
    let lhs = hilbert_seminorm(&image);
    let rhs = hilbert_seminorm(&source);
    assert!(
        lhs <= rhs + 1e-10,
        "seminorm expansion (seed {seed}): {lhs} > {rhs}"
    );
}

/// Growing the pushed set can only push harder: `J ⊆ J′` with the oracle
/// firing on `J` means it fires on `J′` too, in both directions.
pub fn check_tail_monotone(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let i = r.gen_range(0..n);
    let mut large = NodeSet::empty();
    for j in 0..n {
        if j != i && r.gen_bool(0.7) {
            large = large.insert(j);
        }
    }
    if large.is_empty() {
        large = large.insert(if i == 0 { n - 1 } else { i - 1 });
    }
    let mut small = NodeSet::empty();
    for j in large.iter() {
        if r.gen_bool(0.5) {
            small = small.insert(j);
        }
    }
    if small.is_empty() {
        small = NodeSet::singleton(large.min_element().expect("nonempty"));
    }
    for (sign, tag) in [(Sign::Plus, ExtValue::PosInf), (Sign::Minus, ExtValue::NegInf)] {
        if op.eval_ext(i, small, sign) == tag {
            assert_eq!(
                op.eval_ext(i, large, sign),
                tag,
                "tail monotonicity violated (seed {seed}): \
                 coordinate {} diverges along {small} but not along {large}",
                i + 1
            );
        }
    }
}

/// Reachability closure is extensive, idempotent, and monotone.
pub fn check_reach_laws(seed: u64) {
    let mut r = rng(seed);
    let n = r.gen_range(2..=5);
    let op = trial_operator(&mut r, n);
    let game = GameKind::AtInfinity;
    let mut small = NodeSet::singleton(r.gen_range(0..n));
    let mut big = small;
    for j in 0..n {
        if r.gen_bool(0.4) {
            small = small.insert(j);
        }
        if small.contains(j) || r.gen_bool(0.4) {
            big = big.insert(j);
        }
    }
    for sign in [Sign::Plus, Sign::Minus] {
        let oracle = hypergraph_oracle(&op, &game, sign);
        let closed = oracle.reach(small);
        assert!(
            small.is_subset(closed),
            "reach is not extensive (seed {seed}): {small} ⊄ {closed}"
        );
        assert_eq!(
            oracle.reach(closed),
            closed,
            "reach is not idempotent (seed {seed}) from {small}"
        );
        let closed_big = oracle.reach(big);
        assert!(
            closed.is_subset(closed_big),
            "reach is not monotone (seed {seed}): reach({small}) ⊄ reach({big})"
        );
    }
}

/// In every state, every admissible Min action intersects every admissible
/// Max action — checked exhaustively over all action pairs.
pub fn check_action_intersection(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let game = if r.gen_bool(0.5) {
        GameKind::AtInfinity
    } else {
        GameKind::LocalAt(random_point(&mut r, n))
    };
    for state in 0..n {
        let mins = admissible_actions(&op, &game, Player::Min, state);
        let maxs = admissible_actions(&op, &game, Player::Max, state);
        for &a in &mins {
            for &b in &maxs {
                assert!(
                    !a.intersection(b).is_empty(),
                    "disjoint admissible actions in state {} (seed {seed}): \
                     Min can pick {a}, Max can pick {b}",
                    state + 1
                );
            }
        }
    }
}

/// Additive perturbations leave the at-infinity hypergraphs unchanged
/// arc-for-arc.
pub fn check_shift_invariance(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let g = random_point(&mut r, n);
    let perturbed = perturb_diagonal(&op, &g);
    let game = GameKind::AtInfinity;
    for sign in [Sign::Plus, Sign::Minus] {
        let base = hypergraph_oracle(&op, &game, sign);
        let moved = hypergraph_oracle(&perturbed, &game, sign);
        for head in 0..n {
            for tail in nonempty_subsets(n) {
                if tail.contains(head) {
                    continue;
                }
                assert_eq!(
                    base.is_hyperarc(tail, head),
                    moved.is_hyperarc(tail, head),
                    "perturbation changed arc ({tail}, {}) (seed {seed})",
                    head + 1
                );
            }
        }
    }
}

/// Relabeling states relabels the verdict: the decision kind is preserved
/// and witness dominions map through the permutation.
pub fn check_permutation_equivariance(seed: u64) {
    let mut r = rng(seed);
    let n = trial_size(&mut r);
    let op = trial_operator(&mut r, n);
    let perm = random_permutation(&mut r, n);
    let relabeled = permute(&op, &perm).expect("valid permutation");
    let base = decide_existence(&op).expect("small instance");
    let moved = decide_existence(&relabeled).expect("small instance");
    match (&base.verdict, &moved.verdict) {
        (Verdict::NoDisjointDominions, Verdict::NoDisjointDominions) => {}
        (
            Verdict::DisjointDominions {
                min_dominion,
                max_dominion,
            },
            Verdict::DisjointDominions { .. },
        ) => {
            let image = |s: NodeSet| s.iter().map(|i| perm[i]).collect::<NodeSet>();
            let (i_set, j_set) = (image(*min_dominion), image(*max_dominion));
            assert!(
                i_set.intersection(j_set).is_empty(),
                "permuted witnesses overlap (seed {seed})"
            );
            assert!(
                is_dominion(&relabeled, &GameKind::AtInfinity, Player::Min, i_set),
                "π-image {i_set} is not a Min dominion of the relabeled operator (seed {seed})"
            );
            assert!(
                is_dominion(&relabeled, &GameKind::AtInfinity, Player::Max, j_set),
                "π-image {j_set} is not a Max dominion of the relabeled operator (seed {seed})"
            );
        }
        (a, b) => panic!("verdict changed under relabeling (seed {seed}): {a:?} vs {b:?}"),
    }
}

/// A named single-trial check, keyed by seed.
pub type NamedCheck = (&'static str, fn(u64));

/// All eight single-trial checks, name first, for counted sweeps.
pub const PROPERTY_CHECKS: [NamedCheck; 8] = [
    ("monotonicity", check_monotonicity),
    ("additive homogeneity", check_homogeneity),
    ("nonexpansiveness", check_nonexpansive),
    ("oracle tail monotonicity", check_tail_monotone),
    ("reach closure laws", check_reach_laws),
    ("action intersection", check_action_intersection),
    ("hyperarc shift invariance", check_shift_invariance),
    ("verdict permutation equivariance", check_permutation_equivariance),
];
