//! Nonnegative tensors and their additive conjugates.
//!
//! A nonnegative tensor of order `d` and dimension `n` acts on positive
//! vectors by
//! `(F u^{(d−1)})_i = Σ a_{i i₂…i_d} · u_{i₂} ⋯ u_{i_d}`,
//! summing over the stored (positive) entries of row `i`. Conjugating by
//! `log`/`exp` and dividing by `d−1` turns the positive eigenproblem
//! `F u^{(d−1)} = λ u^{(d−1)}` into the additive ergodic equation for a
//! monotone additively homogeneous operator, which [`tensor_to_operator`]
//! builds symbolically.

use crate::expr::{Expr, ExtValue, Operator};
use crate::nodeset::{NodeSet, MAX_NODES};
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Errors from tensor construction or parsing.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum TensorError {
    /// A line of the text form could not be read.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// The order is too small.
    #[error("order must be at least 2, got {0}")]
    Order(usize),
    /// The dimension is out of the supported range.
    #[error("dimension must be between 1 and {MAX_NODES}, got {0}")]
    Dimension(usize),
    /// An entry has the wrong number of indices.
    #[error("entry has {got} indices, expected {expected}")]
    IndexCount { expected: usize, got: usize },
    /// An entry index is outside `1..=n`.
    #[error("index {index} is out of range 1..={n}")]
    IndexRange { index: usize, n: usize },
    /// An entry value is zero, negative, or not finite.
    #[error("entry value {0} is not positive and finite")]
    Value(f64),
    /// The same multi-index appears twice.
    #[error("duplicate entry for indices {0:?}")]
    Duplicate(Vec<usize>),
    /// Some coordinate has no positive entry, so its row would be
    /// identically zero.
    #[error("coordinate {0} has no positive entry")]
    EmptyRow(usize),
}

/// A nonnegative tensor stored sparsely: only positive entries are kept.
///
/// Indices are 0-based internally; the text form ([`FromStr`]/[`fmt::Display`])
/// is 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    d: usize,
    n: usize,
    /// `(multi-index, value)` pairs; each multi-index has length `d` and
    /// entries in `0..n`, and each value is positive.
    entries: Vec<(Vec<usize>, f64)>,
    /// For each row `i`, the distinct sets `{i₂, …, i_d}` of later indices
    /// over the entries of that row, sorted by bitmask.
    later: Vec<Vec<NodeSet>>,
}

impl Tensor {
    /// Builds a tensor from positive entries given as
    /// `(multi-index, value)` pairs with 0-based indices.
    pub fn new(d: usize, n: usize, entries: Vec<(Vec<usize>, f64)>) -> Result<Self, TensorError> {
        if d < 2 {
            return Err(TensorError::Order(d));
        }
        if n == 0 || n > MAX_NODES {
            return Err(TensorError::Dimension(n));
        }
        let mut seen: HashMap<&[usize], ()> = HashMap::new();
        for (idx, value) in &entries {
            if idx.len() != d {
                return Err(TensorError::IndexCount {
                    expected: d,
                    got: idx.len(),
                });
            }
            if let Some(&i) = idx.iter().find(|&&i| i >= n) {
                return Err(TensorError::IndexRange { index: i + 1, n });
            }
            if !(value.is_finite() && *value > 0.0) {
                return Err(TensorError::Value(*value));
            }
            if seen.insert(idx.as_slice(), ()).is_some() {
                return Err(TensorError::Duplicate(idx.iter().map(|i| i + 1).collect()));
            }
        }
        let mut later = vec![Vec::new(); n];
        for (idx, _) in &entries {
            let set: NodeSet = idx[1..].iter().copied().collect();
            let row = &mut later[idx[0]];
            if !row.contains(&set) {
                row.push(set);
            }
        }
        for (i, row) in later.iter_mut().enumerate() {
            if row.is_empty() {
                return Err(TensorError::EmptyRow(i + 1));
            }
            row.sort();
        }
        Ok(Tensor {
            d,
            n,
            entries,
            later,
        })
    }

    /// Order `d` (number of indices per entry).
    pub fn d(&self) -> usize {
        self.d
    }

    /// Dimension `n` (each index ranges over `0..n`).
    pub fn n(&self) -> usize {
        self.n
    }

    /// The stored positive entries, 0-based.
    pub fn entries(&self) -> &[(Vec<usize>, f64)] {
        &self.entries
    }

    /// The distinct later-index sets `{i₂,…,i_d}` of row `i`, sorted by
    /// bitmask. These determine the pattern-dependent graphs of the tensor.
    pub fn later_sets(&self, i: usize) -> &[NodeSet] {
        &self.later[i]
    }

    /// Applies the tensor to a positive vector:
    /// `(F u^{(d−1)})_i = Σ a_{i i₂…i_d} u_{i₂} ⋯ u_{i_d}`.
    ///
    /// # Panics
    ///
    /// If `u` does not have length `n` or has a nonpositive entry.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.n, "point has wrong dimension");
        assert!(
            u.iter().all(|&v| v > 0.0),
            "tensor application needs a positive vector"
        );
        let mut out = vec![0.0; self.n];
        for (idx, value) in &self.entries {
            let mut term = *value;
            for &j in &idx[1..] {
                term *= u[j];
            }
            out[idx[0]] += term;
        }
        out
    }
}

impl FromStr for Tensor {
    type Err = TensorError;

    /// Parses the text form: a header `tensor <d> <n>`, then one line per
    /// positive entry, `i1 i2 … id value` with 1-based indices. Blank lines
    /// and `#` comments are ignored.
    fn from_str(text: &str) -> Result<Self, TensorError> {
        let mut d = 0usize;
        let mut n = 0usize;
        let mut header_seen = false;
        let mut entries: Vec<(Vec<usize>, f64)> = Vec::new();
        let mut seen: std::collections::HashSet<Vec<usize>> = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = lineno + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let fields: Vec<&str> = content.split_whitespace().collect();
            if !header_seen {
                if fields.len() != 3 || fields[0] != "tensor" {
                    return Err(TensorError::Parse {
                        line,
                        message: "expected header `tensor <order> <dimension>`".into(),
                    });
                }
                d = fields[1].parse().map_err(|_| TensorError::Parse {
                    line,
                    message: format!("invalid order `{}`", fields[1]),
                })?;
                n = fields[2].parse().map_err(|_| TensorError::Parse {
                    line,
                    message: format!("invalid dimension `{}`", fields[2]),
                })?;
                if d < 2 {
                    return Err(TensorError::Parse {
                        line,
                        message: format!("order must be at least 2, got {d}"),
                    });
                }
                if n == 0 || n > MAX_NODES {
                    return Err(TensorError::Parse {
                        line,
                        message: format!("dimension must be between 1 and {MAX_NODES}, got {n}"),
                    });
                }
                header_seen = true;
                continue;
            }
            if fields.len() != d + 1 {
                return Err(TensorError::Parse {
                    line,
                    message: format!("expected {d} indices and a value, got {} fields", fields.len()),
                });
            }
            let mut idx = Vec::with_capacity(d);
            for f in &fields[..d] {
                let i: usize = f.parse().map_err(|_| TensorError::Parse {
                    line,
                    message: format!("invalid index `{f}`"),
                })?;
                if i == 0 || i > n {
                    return Err(TensorError::Parse {
                        line,
                        message: format!("index {i} is out of range 1..={n}"),
                    });
                }
                idx.push(i - 1);
            }
            let value: f64 = fields[d].parse().map_err(|_| TensorError::Parse {
                line,
                message: format!("invalid value `{}`", fields[d]),
            })?;
            if !(value.is_finite() && value > 0.0) {
                return Err(TensorError::Parse {
                    line,
                    message: format!("entry value {value} is not positive"),
                });
            }
            if !seen.insert(idx.clone()) {
                let shown: Vec<usize> = idx.iter().map(|i| i + 1).collect();
                return Err(TensorError::Parse {
                    line,
                    message: format!("duplicate entry for indices {shown:?}"),
                });
            }
            entries.push((idx, value));
        }
        if !header_seen {
            return Err(TensorError::Parse {
                line: 1,
                message: "missing header `tensor <order> <dimension>`".into(),
            });
        }
        Tensor::new(d, n, entries)
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tensor {} {}", self.d, self.n)?;
        for (idx, value) in &self.entries {
            for i in idx {
                write!(f, "{} ", i + 1)?;
            }
            writeln!(f, "{value}")?;
        }
        Ok(())
    }
}

/// Conjugates a tensor into an additive operator:
/// `T_i(x) = (d−1)⁻¹ · log Σ a_{i i₂…i_d} exp(x_{i₂} + … + x_{i_d})`.
///
/// Coordinate `i` is built as a `(d−1)`-mean of weighted averages: weights
/// proportional to the entry values, one child per entry averaging its later
/// indices with weight `1/(d−1)` each, and an outer shift of
/// `(d−1)⁻¹·log Σ a`. Eigenpairs translate back via `λ = exp(μ(d−1))`,
/// `u = exp(v)`. The result is syntactically convex.
pub fn tensor_to_operator(t: &Tensor) -> Operator {
    let n = t.n();
    let dm1 = (t.d() - 1) as f64;
    let mut rows: Vec<Vec<(&[usize], f64)>> = vec![Vec::new(); n];
    for (idx, value) in t.entries() {
        rows[idx[0]].push((idx.as_slice(), *value));
    }
    let coords = rows
        .into_iter()
        .map(|row| {
            let total: f64 = row.iter().map(|(_, v)| v).sum();
            let items = row
                .iter()
                .map(|(idx, value)| {
                    // Merge repeated indices of one entry into a single
                    // average term per variable.
                    let mut weight_of: HashMap<usize, f64> = HashMap::new();
                    for &j in &idx[1..] {
                        *weight_of.entry(j).or_insert(0.0) += 1.0 / dm1;
                    }
                    let mut vars: Vec<usize> = weight_of.keys().copied().collect();
                    vars.sort_unstable();
                    let child = Expr::avg(
                        vars.into_iter()
                            .map(|j| (weight_of[&j], Expr::var(j)))
                            .collect(),
                    );
                    (value / total, child)
                })
                .collect();
            Expr::shift(total.ln() / dm1, Expr::mean(ExtValue::Finite(dm1), items))
        })
        .collect();
    Operator::new(n, coords).expect("a valid tensor conjugates to a valid operator")
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::expr::Convexity;
    use crate::expr::Expr as E;

    /// The order-3, dimension-4 tensor whose positive entries are
    /// 112, 122, 211, 212, 222, 311, 312, 323, 414, 433 (1-based), all
    /// equal to 1.
    pub(crate) fn four_state_cubic() -> Tensor {
        let idx: [[usize; 3]; 10] = [
            [1, 1, 2],
            [1, 2, 2],
            [2, 1, 1],
            [2, 1, 2],
            [2, 2, 2],
            [3, 1, 1],
            [3, 1, 2],
            [3, 2, 3],
            [4, 1, 4],
            [4, 3, 3],
        ];
        Tensor::new(
            3,
            4,
            idx.iter()
                .map(|ijk| (ijk.iter().map(|i| i - 1).collect(), 1.0))
                .collect(),
        )
        .unwrap()
    }

    pub(crate) const FOUR_STATE_CUBIC_TEXT: &str = "\
tensor 3 4
1 1 2 1
1 2 2 1
2 1 1 1
2 1 2 1
2 2 2 1
3 1 1 1
3 1 2 1
3 2 3 1
4 1 4 1
4 3 3 1
";

    fn ns(elems: &[usize]) -> NodeSet {
        elems.iter().map(|i| i - 1).collect()
    }

    #[test]
    fn parse_and_roundtrip() {
        let t: Tensor = FOUR_STATE_CUBIC_TEXT.parse().unwrap();
        assert_eq!(t, four_state_cubic());
        let reparsed: Tensor = t.to_string().parse().unwrap();
        assert_eq!(reparsed, t);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases = [
            ("tensor 3\n", 1, "header"),
            ("tensor 1 4\n1 1 1\n", 1, "order"),
            ("tensor 2 2\n1 1\n", 2, "value"),
            ("tensor 2 2\n1 3 1.0\n", 2, "range"),
            ("tensor 2 2\n1 1 -2.0\n", 2, "positive"),
            ("tensor 2 2\n1 1 1\n1 1 2\n2 1 1\n", 3, "duplicate"),
        ];
        for (text, line, hint) in cases {
            match text.parse::<Tensor>() {
                Err(TensorError::Parse { line: l, message }) => {
                    assert_eq!(l, line, "wrong line for {hint}: {message}");
                }
                other => panic!("expected parse error for {hint}, got {other:?}"),
            }
        }
        assert_eq!(
            "tensor 2 2\n1 1 1\n".parse::<Tensor>().unwrap_err(),
            TensorError::EmptyRow(2)
        );
    }

    #[test]
    fn later_sets_follow_the_pattern() {
        let t = four_state_cubic();
        assert_eq!(t.later_sets(0), &[ns(&[2]), ns(&[1, 2])]);
        assert_eq!(t.later_sets(1), &[ns(&[1]), ns(&[2]), ns(&[1, 2])]);
        assert_eq!(t.later_sets(2), &[ns(&[1]), ns(&[1, 2]), ns(&[2, 3])]);
        assert_eq!(t.later_sets(3), &[ns(&[3]), ns(&[1, 4])]);
    }

    #[test]
    fn conjugated_operator_structure() {
        let op = tensor_to_operator(&four_state_cubic());
        assert_eq!(op.convexity(), Convexity::Convex);

        // Row 4 holds entries 414 and 433, total 2: the coordinate is
        // ½·log(exp(x₁+x₄) + exp(2x₃)).
        let expected = E::shift(
            2f64.ln() / 2.0,
            E::mean(
                ExtValue::Finite(2.0),
                vec![
                    (
                        0.5,
                        E::avg(vec![(0.5, E::var(0)), (0.5, E::var(3))]),
                    ),
                    (0.5, E::avg(vec![(1.0, E::var(2))])),
                ],
            ),
        );
        assert_eq!(op.coordinate(3), &expected);

        // The support of the first coordinate is {1,2}.
        assert_eq!(op.support(0), ns(&[1, 2]));
    }

    #[test]
    fn conjugation_identity() {
        // eval(T, log u) agrees with (d−1)⁻¹ log(F u^{(d−1)}) componentwise.
        let t = four_state_cubic();
        let op = tensor_to_operator(&t);
        let u = [1.0f64, 2.0, 1.0, 1.0];
        let logu: Vec<f64> = u.iter().map(|v| v.ln()).collect();
        let lhs = op.eval(&logu).unwrap();
        let rhs: Vec<f64> = t.apply(&u).iter().map(|v| v.ln() / 2.0).collect();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!((a - b).abs() <= 1e-12, "conjugation identity off: {a} vs {b}");
        }
    }

    #[test]
    fn order_two_tensor_is_a_matrix() {
        // d = 2: the conjugate is log ∘ (matrix product) ∘ exp.
        let m = [[1.0, 2.0], [3.0, 4.0]];
        let mut entries = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                entries.push((vec![i, j], v));
            }
        }
        let t = Tensor::new(2, 2, entries).unwrap();
        let op = tensor_to_operator(&t);
        let x = [0.3, -1.1];
        let val = op.eval(&x).unwrap();
        for i in 0..2 {
            let want = (m[i][0] * x[0].exp() + m[i][1] * x[1].exp()).ln();
            assert!((val[i] - want).abs() <= 1e-12);
        }
    }
}
