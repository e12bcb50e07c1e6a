//! Decides robust eigenvector existence for a three-state operator.
//!
//! The operator mixes minima, maxima and weighted averages, so whether the
//! ergodic equation `T(u) = lambda + u` stays solvable under every additive
//! perturbation depends on the two-player game at infinity: the answer is
//! yes exactly when the players have no disjoint dominions. This walks the
//! whole pipeline — action sets, dominions, the decision, and a numerical
//! eigenvector confirming the positive verdict.

use pfgame::games::{admissible_actions, dominions, GameKind, Player};
use pfgame::numerics::{slice_membership, solve_ergodic, SolveConfig};
use pfgame::{decide_existence, parse_operator, print_operator, Verdict};
use std::path::Path;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/running_example.op");
    let text = std::fs::read_to_string(&path).expect("bundled operator file");
    let op = parse_operator(&text).expect("well-formed operator");

    println!("operator under study:\n{}", print_operator(&op));

    let game = GameKind::AtInfinity;
    for (player, name) in [(Player::Min, "Min"), (Player::Max, "Max")] {
        println!("admissible actions of {name} in the game at infinity:");
        for state in 0..op.n() {
            let actions: Vec<String> = admissible_actions(&op, &game, player, state)
                .into_iter()
                .map(|s| s.to_string())
                .collect();
            println!("  state {}: {}", state + 1, actions.join(", "));
        }
        let doms: Vec<String> = dominions(&op, &game, player)
            .into_iter()
            .map(|s| s.to_string())
            .collect();
        println!("  dominions of {name}: {}", doms.join(", "));
    }

    let report = decide_existence(&op).expect("three states is well within limits");
    println!(
        "\ndecision ({:?} path, {} oracle calls):",
        report.path, report.oracle_calls
    );
    match report.verdict {
        Verdict::NoDisjointDominions => println!(
            "  no disjoint dominions — every additive perturbation g + T has an eigenvector"
        ),
        Verdict::DisjointDominions {
            min_dominion,
            max_dominion,
        } => println!(
            "  disjoint dominions {min_dominion} / {max_dominion} — some perturbation has none"
        ),
    }

    let witness = solve_ergodic(&op, &[0.0; 3], &SolveConfig::default())
        .expect("the positive verdict guarantees an eigenvector");
    // Eigenvectors are only defined up to an additive constant; pin the first
    // coordinate to zero before printing.
    let anchored: Vec<f64> = witness.u.iter().map(|v| v - witness.u[0]).collect();
    println!(
        "\neigenvector found in {} iterations: lambda = {:.6}, u = {:.6?} (residual {:.2e})",
        witness.iterations, witness.lambda, anchored, witness.residual
    );

    let inside = slice_membership(
        &op,
        &witness.u,
        witness.lambda - 1e-8,
        witness.lambda + 1e-8,
    )
    .expect("finite witness");
    println!("witness lies in the slice around lambda: {inside}");
}
