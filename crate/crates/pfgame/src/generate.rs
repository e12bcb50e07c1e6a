//! Seeded generators for randomized and exhaustive verification.
//!
//! Everything here is deterministic given a seed, so failures reproduce.
//! The generators come in three flavors: an exhaustive min/max-affine
//! catalog small enough to sweep completely, random instances of the
//! operator classes the library handles (min/max-affine, generalized
//! means, positive tensors), and *planted* instances built around a known
//! disjoint-dominion pair, for exercising the positive-verdict paths on
//! demand.

use crate::expr::{Expr, ExtValue, Operator};
use crate::tensor::Tensor;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The reproducible generator used throughout the test batteries.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A fixed 32-expression catalog of monotone homogeneous coordinates in
/// three variables: plain and shifted variables, averages, and min/max
/// combinations up to depth two. Choosing each of the three coordinates
/// from the catalog yields `32³ = 32768` operators — small enough to sweep
/// exhaustively against the brute-force reference, varied enough to hit
/// both convex and genuinely min/max coordinates.
pub fn coordinate_catalog() -> Vec<Expr> {
    use Expr as E;
    let v = |j: usize| E::var(j);
    let pair = |a: usize, b: usize| E::avg(vec![(0.5, v(a)), (0.5, v(b))]);
    let third = 1.0 / 3.0;
    vec![
        v(0),
        v(1),
        v(2),
        E::shift(1.0, v(0)),
        E::shift(1.0, v(1)),
        E::shift(1.0, v(2)),
        E::shift(-1.0, v(0)),
        E::shift(-1.0, v(1)),
        E::shift(-1.0, v(2)),
        pair(0, 1),
        pair(0, 2),
        pair(1, 2),
        E::avg(vec![(third, v(0)), (third, v(1)), (1.0 - 2.0 * third, v(2))]),
        E::min(vec![v(0), v(1)]),
        E::min(vec![v(0), v(2)]),
        E::min(vec![v(1), v(2)]),
        E::max(vec![v(0), v(1)]),
        E::max(vec![v(0), v(2)]),
        E::max(vec![v(1), v(2)]),
        E::min(vec![v(0), v(1), v(2)]),
        E::max(vec![v(0), v(1), v(2)]),
        E::min(vec![E::shift(1.0, v(0)), v(1)]),
        E::min(vec![E::shift(1.0, v(1)), v(2)]),
        E::min(vec![E::shift(1.0, v(2)), v(0)]),
        E::max(vec![E::shift(-1.0, v(0)), v(1)]),
        E::max(vec![E::shift(-1.0, v(1)), v(2)]),
        E::max(vec![E::shift(-1.0, v(2)), v(0)]),
        E::min(vec![v(0), E::max(vec![v(1), E::shift(-1.0, v(2))])]),
        E::max(vec![v(2), E::min(vec![v(0), E::shift(1.0, v(1))])]),
        E::min(vec![pair(0, 1), E::shift(1.0, v(2))]),
        E::max(vec![pair(1, 2), E::shift(-1.0, v(0))]),
        E::min(vec![E::max(vec![v(0), v(1)]), E::shift(1.0, pair(0, 2))]),
    ]
}

/// Every operator whose three coordinates are drawn from
/// [`coordinate_catalog`], in lexicographic catalog order.
pub fn exhaustive_operators() -> impl Iterator<Item = Operator> {
    let catalog = coordinate_catalog();
    let m = catalog.len();
    (0..m * m * m).map(move |code| {
        let coords = vec![
            catalog[code / (m * m)].clone(),
            catalog[(code / m) % m].clone(),
            catalog[code % m].clone(),
        ];
        Operator::new(3, coords).expect("catalog entries are valid coordinates")
    })
}

/// Shift constants for random affine atoms: small half-integers, so planted
/// breakpoints sit away from floating-point noise.
const SHIFTS: [f64; 6] = [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0];

fn random_affine_atom(rng: &mut ChaCha8Rng, n: usize) -> Expr {
    let j = rng.gen_range(0..n);
    match rng.gen_range(0..3) {
        0 => Expr::var(j),
        1 => Expr::shift(*SHIFTS.choose(rng).unwrap(), Expr::var(j)),
        _ => {
            let k = rng.gen_range(2..=n.min(3));
            let mut vars: Vec<usize> = (0..n).collect();
            vars.shuffle(rng);
            Expr::avg(uniform_weights(
                vars[..k].iter().map(|&v| Expr::var(v)).collect(),
            ))
        }
    }
}

fn uniform_weights(children: Vec<Expr>) -> Vec<(f64, Expr)> {
    let k = children.len();
    let w = 1.0 / k as f64;
    let mut items: Vec<(f64, Expr)> = children.into_iter().map(|c| (w, c)).collect();
    // Pin the total to exactly 1 regardless of rounding.
    let partial: f64 = items[..k - 1].iter().map(|(w, _)| *w).sum();
    items[k - 1].0 = 1.0 - partial;
    items
}

fn random_weights(rng: &mut ChaCha8Rng, children: Vec<Expr>) -> Vec<(f64, Expr)> {
    let k = children.len();
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut items: Vec<(f64, Expr)> = raw
        .iter()
        .zip(children)
        .map(|(w, c)| (w / total, c))
        .collect();
    let partial: f64 = items[..k - 1].iter().map(|(w, _)| *w).sum();
    items[k - 1].0 = 1.0 - partial;
    items
}

/// A random min/max-affine coordinate in `n` variables: an outer min or
/// max over up to three members, each an affine atom or one level of the
/// opposite combinator.
pub fn random_minmax_affine(rng: &mut ChaCha8Rng, n: usize) -> Expr {
    let outer_min = rng.gen_bool(0.5);
    let k = rng.gen_range(1..=3);
    let children: Vec<Expr> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.45) {
                random_affine_atom(rng, n)
            } else {
                let inner: Vec<Expr> = (0..rng.gen_range(2..=3))
                    .map(|_| random_affine_atom(rng, n))
                    .collect();
                if outer_min {
                    Expr::max(inner)
                } else {
                    Expr::min(inner)
                }
            }
        })
        .collect();
    if outer_min {
        Expr::min(children)
    } else {
        Expr::max(children)
    }
}

/// A random operator with min/max-affine coordinates.
pub fn random_operator(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    let coords = (0..n).map(|_| random_minmax_affine(rng, n)).collect();
    Operator::new(n, coords).expect("generated coordinates are valid")
}

/// A random operator from the generalized-means class: shifts, min, max,
/// and weighted `r`-means (including `r = 0` and `r = ±∞`), but no
/// mixtures — exactly the operators the signature transform accepts.
pub fn random_mbar(rng: &mut ChaCha8Rng, n: usize) -> Operator {
    fn node(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Expr {
        if depth == 0 || rng.gen_bool(0.3) {
            let base = Expr::var(rng.gen_range(0..n));
            return if rng.gen_bool(0.4) {
                Expr::shift(*SHIFTS.choose(rng).unwrap(), base)
            } else {
                base
            };
        }
        let k = rng.gen_range(2..=3);
        let children: Vec<Expr> = (0..k).map(|_| node(rng, n, depth - 1)).collect();
        match rng.gen_range(0..4) {
            0 => Expr::min(children),
            1 => Expr::max(children),
            2 => Expr::avg(random_weights(rng, children)),
            _ => {
                let r = *[
                    ExtValue::NegInf,
                    ExtValue::Finite(-2.0),
                    ExtValue::Finite(-1.0),
                    ExtValue::Finite(0.0),
                    ExtValue::Finite(1.0),
                    ExtValue::Finite(3.0),
                    ExtValue::PosInf,
                ]
                .choose(rng)
                .unwrap();
                Expr::mean(r, random_weights(rng, children))
            }
        }
    }
    let coords = (0..n).map(|_| node(rng, n, 2)).collect();
    Operator::new(n, coords).expect("generated coordinates are valid")
}

/// A uniformly random point with coordinates in `(-3, 3)`.
pub fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()
}

/// A uniformly random permutation of `0..n`, as the image list
/// `i ↦ perm[i]`.
pub fn random_permutation(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

/// An operator with a *planted* disjoint-dominion pair in the game at
/// infinity: states of `I` see only `I` (a Min dominion by construction),
/// states of `J` see only `J` under max (a Max dominion), and the
/// remaining states behave arbitrarily. Returns the operator together
/// with the planted pair; the decision procedure must find *some*
/// disjoint pair, not necessarily this one.
pub fn planted_infinity(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (Operator, crate::nodeset::NodeSet, crate::nodeset::NodeSet) {
    assert!(n >= 2, "a disjoint pair needs at least two states");
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let i_len = rng.gen_range(1..n);
    let j_len = rng.gen_range(1..=n - i_len);
    let i_set: crate::nodeset::NodeSet = states[..i_len].iter().cloned().collect();
    let j_set: crate::nodeset::NodeSet = states[i_len..i_len + j_len].iter().cloned().collect();

    let combine_over = |rng: &mut ChaCha8Rng, members: Vec<usize>, min: bool| {
        let children: Vec<Expr> = members
            .into_iter()
            .map(|j| {
                if rng.gen_bool(0.5) {
                    Expr::shift(*SHIFTS.choose(rng).unwrap(), Expr::var(j))
                } else {
                    Expr::var(j)
                }
            })
            .collect();
        match (children.len(), min) {
            (1, _) => children.into_iter().next().unwrap(),
            (_, true) => Expr::min(children),
            (_, false) => Expr::max(children),
        }
    };
    let coords = (0..n)
        .map(|state| {
            if i_set.contains(state) {
                combine_over(rng, i_set.iter().collect(), true)
            } else if j_set.contains(state) {
                combine_over(rng, j_set.iter().collect(), false)
            } else {
                random_minmax_affine(rng, n)
            }
        })
        .collect();
    let op = Operator::new(n, coords).expect("planted coordinates are valid");
    (op, i_set, j_set)
}

/// An operator fixing the origin exactly (`T(0) = 0`) with a planted
/// disjoint-dominion pair in the local game at `u = 0`: coordinates in `I`
/// are minima over `I`-variables (locally constant away from `I`),
/// coordinates in `J` are maxima over `J`-variables, and free coordinates
/// average everything. Off-attaining shifted decoys keep the constancy
/// intervals finite without moving the values at the origin.
pub fn planted_local(
    rng: &mut ChaCha8Rng,
    n: usize,
) -> (Operator, crate::nodeset::NodeSet, crate::nodeset::NodeSet) {
    assert!(n >= 2, "a disjoint pair needs at least two states");
    let mut states: Vec<usize> = (0..n).collect();
    states.shuffle(rng);
    let i_len = rng.gen_range(1..n);
    let j_len = rng.gen_range(1..=n - i_len);
    let i_set: crate::nodeset::NodeSet = states[..i_len].iter().cloned().collect();
    let j_set: crate::nodeset::NodeSet = states[i_len..i_len + j_len].iter().cloned().collect();

    let coords = (0..n)
        .map(|state| {
            if i_set.contains(state) {
                let mut children: Vec<Expr> = i_set.iter().map(Expr::var).collect();
                if rng.gen_bool(0.5) {
                    // Non-attaining at the origin: min(…, 1 + x_m) = min(…)
                    // there, and stays so on a unit-sized interval.
                    children.push(Expr::shift(1.0, Expr::var(rng.gen_range(0..n))));
                }
                if children.len() == 1 {
                    children.into_iter().next().unwrap()
                } else {
                    Expr::min(children)
                }
            } else if j_set.contains(state) {
                let mut children: Vec<Expr> = j_set.iter().map(Expr::var).collect();
                if rng.gen_bool(0.5) {
                    children.push(Expr::shift(-1.0, Expr::var(rng.gen_range(0..n))));
                }
                if children.len() == 1 {
                    children.into_iter().next().unwrap()
                } else {
                    Expr::max(children)
                }
            } else {
                Expr::avg(uniform_weights((0..n).map(Expr::var).collect()))
            }
        })
        .collect();
    let op = Operator::new(n, coords).expect("planted coordinates are valid");
    (op, i_set, j_set)
}

/// A random positive tensor of order `d` and dimension `n`: every slice
/// `i` carries one to three distinct multi-indices with coefficients in
/// `(0.2, 3.0)`.
pub fn random_tensor(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Tensor {
    assert!(d >= 2 && n >= 1);
    let universe = (1..d).fold(1usize, |acc, _| acc.saturating_mul(n));
    let mut entries: Vec<(Vec<usize>, f64)> = Vec::new();
    for i in 0..n {
        let want = rng.gen_range(1..=universe.min(3));
        let mut seen: Vec<Vec<usize>> = Vec::new();
        while seen.len() < want {
            let mut idx = vec![i];
            idx.extend((1..d).map(|_| rng.gen_range(0..n)));
            if !seen.contains(&idx) {
                seen.push(idx);
            }
        }
        for idx in seen {
            entries.push((idx, rng.gen_range(0.2..3.0)));
        }
    }
    Tensor::new(d, n, entries).expect("generated entries are valid")
}

/// The same pattern as `t` with fresh random coefficients in `(0.2, 3.0)`.
/// Existence decisions depend only on the pattern, so they must agree
/// between `t` and any reweighting.
pub fn reweighted(rng: &mut ChaCha8Rng, t: &Tensor) -> Tensor {
    let entries = t
        .entries()
        .iter()
        .map(|(idx, _)| (idx.clone(), rng.gen_range(0.2..3.0)))
        .collect();
    Tensor::new(t.d(), t.n(), entries).expect("reweighting preserves validity")
}
