//! Materializes the limit hypergraphs of an operator and renders them.
//!
//! The existence and uniqueness decisions consult two directed hypergraphs:
//! an arc from a *set* of states J to a state i records that pushing the
//! coordinates in J to infinity (positively or negatively) drags T_i along.
//! This example builds both graphs for the three-state operator, trims each
//! to its minimal tails — the arcs that actually constrain reachability —
//! and emits Graphviz DOT, plus a JSON form for downstream tooling.

use pfgame::games::{build_hypergraph, GameKind};
use pfgame::{parse_operator, Sign};
use std::path::Path;

fn main() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/running_example.op");
    let text = std::fs::read_to_string(&path).expect("bundled operator file");
    let op = parse_operator(&text).expect("well-formed operator");

    for (sign, name) in [(Sign::Plus, "positive"), (Sign::Minus, "negative")] {
        let graph = build_hypergraph(&op, &GameKind::AtInfinity, sign);
        println!(
            "{name}-limit hypergraph: {} arcs in full, {} after keeping minimal tails",
            graph.arcs().len(),
            graph.minimal_tails().arcs().len()
        );
        for arc in graph.minimal_tails().arcs_sorted() {
            println!("  {} -> {}", arc.tail, arc.head + 1);
        }
    }

    // The negative-limit graph of this operator has only singleton tails, so
    // it is an ordinary digraph and renders with plain edges; the positive
    // one needs a joint tail {2,3} -> 1 and keeps the hyperarc notation.
    let minus = build_hypergraph(&op, &GameKind::AtInfinity, Sign::Minus);
    match minus.minimal_tails().to_digraph() {
        Some(_) => println!("\nthe minimal negative-limit graph is an ordinary digraph"),
        None => println!("\nthe minimal negative-limit graph has genuine hyperarcs"),
    }

    let plus = build_hypergraph(&op, &GameKind::AtInfinity, Sign::Plus);
    println!("\nGraphviz DOT for the minimal positive-limit hypergraph:");
    println!("{}", plus.to_dot(true));

    println!("JSON form of the same graph:");
    let value = plus.minimal_tails().to_json_value();
    println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
}
