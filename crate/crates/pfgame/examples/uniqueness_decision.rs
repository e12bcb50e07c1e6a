//! Tests whether a known eigenvector is the only one (up to a constant).
//!
//! Even when every perturbation of an operator keeps an eigenvector, the
//! eigenvector itself may fail to be unique. Uniqueness is governed by a
//! *local* game played on the tangent behaviour at the eigenvector `u`:
//! disjoint dominions there mean a second, genuinely different eigenvector
//! exists — and this example goes on to construct one.

use pfgame::games::{admissible_actions, dominions, GameKind, Player};
use pfgame::numerics::hilbert_seminorm;
use pfgame::{decide_uniqueness, eigenvalue_at, parse_operator, second_eigenvector, Verdict};
use std::path::Path;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/running_example.op");
    let text = std::fs::read_to_string(&path).expect("bundled operator file");
    let op = parse_operator(&text).expect("well-formed operator");

    let u = vec![0.0, 0.0, 2.0];
    let (lambda, residual) = eigenvalue_at(&op, &u).expect("finite evaluation");
    println!(
        "known eigenvector u = {u:?}: T(u) - u is constant {lambda:.3} (residual {residual:.1e})"
    );

    let game = GameKind::LocalAt(u.clone());
    for (player, name) in [(Player::Min, "Min"), (Player::Max, "Max")] {
        println!("admissible actions of {name} in the local game at u:");
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

    let report = decide_uniqueness(&op, &u).expect("u is an eigenvector");
    match report.verdict {
        Verdict::NoDisjointDominions => {
            println!("\nno disjoint dominions in the local game: u is the unique eigenvector");
        }
        Verdict::DisjointDominions {
            min_dominion,
            max_dominion,
        } => {
            println!(
                "\ndisjoint dominions in the local game: Min holds {min_dominion}, Max holds {max_dominion}"
            );
            println!("so u is NOT unique — constructing a second eigenvector:");

            let v = second_eigenvector(&op, &u, min_dominion, max_dominion)
                .expect("disjoint local dominions always yield one");
            let (lambda_v, residual_v) = eigenvalue_at(&op, &v).expect("finite evaluation");
            let gap = hilbert_seminorm(
                &v.iter().zip(&u).map(|(a, b)| a - b).collect::<Vec<f64>>(),
            );
            println!("  v = {v:.3?}");
            println!("  T(v) - v is constant {lambda_v:.3} (residual {residual_v:.1e})");
            println!("  v - u has Hilbert seminorm {gap:.3}, so v is not a shift of u");
        }
    }
}
