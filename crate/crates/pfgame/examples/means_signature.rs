//! Reduces an operator built from power means to its signature form.
//!
//! Weighted power means — geometric, harmonic, p-th order — become, after
//! the logarithmic change of variables, `mean(r; ...)` nodes with a real
//! exponent plus additive shifts. For the existence and uniqueness
//! decisions almost all of that detail is noise: only the *sign* of each
//! exponent matters, and additive constants matter not at all. The
//! signature transform erases exactly the irrelevant parts, and this
//! example verifies the two facts that justify it: the collapsed `mean(0)`
//! nodes agree with plain weighted averages pointwise, and the limit
//! oracles — the sole input to every decision — fire identically on the
//! original and the signature.

use pfgame::nodeset::nonempty_subsets;
use pfgame::{
    parse_operator, print_operator, signature, Expr, ExtValue, Operator, Sign,
};
use rand::Rng;
use rand_chacha::{rand_core::SeedableRng, ChaCha8Rng};

fn main() {
    // T1 multiplexes three flavours of mean; T2 is a scaled geometric mean,
    // i.e. an additively shifted average after the change of variables.
    let nested = Expr::mean(
        ExtValue::Finite(-3.0),
        vec![
            (
                0.5,
                Expr::min(vec![
                    Expr::var(0),
                    Expr::shift(std::f64::consts::LN_2, Expr::var(1)),
                ]),
            ),
            (0.5, Expr::shift(std::f64::consts::PI.ln(), Expr::var(0))),
        ],
    );
    let scaled_geometric = Expr::shift(
        18f64.ln(),
        Expr::avg(vec![(0.25, Expr::var(0)), (0.75, Expr::var(1))]),
    );
    let op = Operator::new(
        2,
        vec![Expr::max(vec![nested, scaled_geometric]), Expr::var(1)],
    )
    .expect("valid operator");

    println!("original operator:\n{}", print_operator(&op));

    let sig = signature(&op).expect("all means have finite weights");
    println!("signature:\n{}", print_operator(&sig));
    println!(
        "shifts are gone, nonzero exponents kept only their sign, zero-exponent \
         averages went uniform on their support\n"
    );

    // In the signature, mean(-inf; ...) evaluates as a plain minimum, and
    // min(x1, x2) can never beat the average of x1 and x2 inside the outer
    // max — so coordinate 1 collapses, pointwise, to the uniform average.
    let uniform_avg = |x: &[f64]| 0.5 * (x[0] + x[1]);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let x = [rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0)];
        let got = sig.eval_coord(0, &x).expect("finite input");
        worst = worst.max((got - uniform_avg(&x)).abs());
    }
    assert!(worst < 1e-12);
    println!("signature coordinate 1 equals the uniform average (1000 points, max error {worst:.1e})");

    // The decisions only ever consult eval_ext — the value of coordinate i
    // when the coordinates in J are pushed to +inf or -inf together. Those
    // limits classify as -inf / finite / +inf, and the classification is
    // untouched by the signature rewrite.
    let class = |v: ExtValue| match v {
        ExtValue::NegInf => "-inf",
        ExtValue::Finite(_) => "finite",
        ExtValue::PosInf => "+inf",
    };
    println!("\nlimit-oracle classification, original vs signature:");
    let mut all_equal = true;
    for sign in [Sign::Plus, Sign::Minus] {
        for i in 0..op.n() {
            for j in nonempty_subsets(op.n()).filter(|j| !j.contains(i)) {
                let a = class(op.eval_ext(i, j, sign));
                let b = class(sig.eval_ext(i, j, sign));
                all_equal &= a == b;
                let arrow = if sign == Sign::Plus { "+inf" } else { "-inf" };
                println!("  T{} as x[{j}] -> {arrow}: {a} vs {b}", i + 1);
            }
        }
    }
    assert!(all_equal);
    println!("every classification agrees: the two operators share all verdicts");

    // Round-trip sanity: the signature prints in the same language it was
    // born from.
    let reparsed = parse_operator(&print_operator(&sig)).expect("printer output reparses");
    assert_eq!(print_operator(&reparsed), print_operator(&sig));
}
