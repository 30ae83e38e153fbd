use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::Rational;

/// Symmetric integer pairing on a labelled basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionForm {
    pub matrix: Vec<Vec<i64>>,
    pub labels: Vec<String>,
}

impl IntersectionForm {
    pub fn new(matrix: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        let n = matrix.len();
        if matrix.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidModel(
                "intersection matrix must be square".into(),
            ));
        }
        if labels.len() != n {
            return Err(Error::InvalidModel(format!(
                "{} labels for a {n}x{n} form",
                labels.len()
            )));
        }
        for i in 0..n {
            for j in 0..i {
                if matrix[i][j] != matrix[j][i] {
                    return Err(Error::InvalidModel(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        Ok(Self { matrix, labels })
    }

    /// Labels `e1, e2, …`.
    pub fn unlabeled(matrix: Vec<Vec<i64>>) -> Result<Self> {
        let labels = (1..=matrix.len()).map(|i| format!("e{i}")).collect();
        Self::new(matrix, labels)
    }

    pub fn diagonal(entries: &[i64]) -> Self {
        let n = entries.len();
        let matrix = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { entries[i] } else { 0 })
                    .collect()
            })
            .collect();
        Self::unlabeled(matrix).expect("diagonal is symmetric")
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    /// Orthogonal sum `Q ⊕ Q'`.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (n, m) = (self.dim(), other.dim());
        let mut matrix = vec![vec![0; n + m]; n + m];
        for i in 0..n {
            matrix[i][..n].copy_from_slice(&self.matrix[i]);
        }
        for i in 0..m {
            matrix[n + i][n..].copy_from_slice(&other.matrix[i]);
        }
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Self { matrix, labels }
    }

    /// `Pᵀ Q P` in exact integers.
    pub fn congruent(&self, p: &[Vec<i64>]) -> Self {
        let n = self.dim();
        let big = |v: i64| BigInt::from(v);
        let mut out = vec![vec![0i64; n]; n];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, o) in row.iter_mut().enumerate() {
                let mut s = BigInt::zero();
                for a in 0..n {
                    for b in 0..n {
                        s += big(p[a][i]) * big(self.matrix[a][b]) * big(p[b][j]);
                    }
                }
                *o = i64::try_from(s).expect("congruent form overflows i64");
            }
        }
        Self {
            matrix: out,
            labels: self.labels.clone(),
        }
    }
}

/// Inertia `(n₊, n₋, n₀)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// Symmetric elimination over `ℚ`. Returns the pivots and the number of
/// null directions left over.
fn ldl_pivots(form: &IntersectionForm) -> (Vec<Rational>, usize) {
    let n = form.dim();
    let mut a: Vec<Vec<Rational>> = form
        .matrix
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| Rational::from_integer(v.into()))
                .collect()
        })
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    while !active.is_empty() {
        let pivot = active.iter().position(|&i| !a[i][i].is_zero());
        let pos = match pivot {
            Some(p) => p,
            None => {
                // Zero diagonal: the congruence e_i ↦ e_i + e_j makes the
                // (i, i) entry 2a_ij.
                let pair = active.iter().enumerate().find_map(|(pi, &i)| {
                    active
                        .iter()
                        .find(|&&j| j != i && !a[i][j].is_zero())
                        .map(|&j| (pi, i, j))
                });
                let Some((pi, i, j)) = pair else {
                    return (pivots, active.len());
                };
                for &k in &active {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for &k in &active {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                pi
            }
        };
        let i = active.remove(pos);
        let d = a[i][i].clone();
        for &j in &active {
            if a[j][i].is_zero() {
                continue;
            }
            let f = &a[j][i] / &d;
            for &k in &active {
                let v = &f * &a[i][k];
                a[j][k] -= v;
            }
        }
        pivots.push(d);
    }
    (pivots, 0)
}

pub fn signature(form: &IntersectionForm) -> Signature {
    let (pivots, zero) = ldl_pivots(form);
    let positive = pivots.iter().filter(|p| p.is_positive()).count();
    Signature {
        positive,
        negative: pivots.len() - positive,
        zero,
    }
}

/// Number of positive eigenvalues, exactly.
pub fn b_plus(form: &IntersectionForm) -> usize {
    signature(form).positive
}

/// Exact determinant (1 for the empty form).
pub fn determinant(form: &IntersectionForm) -> BigInt {
    let (pivots, zero) = ldl_pivots(form);
    if zero > 0 {
        return BigInt::zero();
    }
    let det = pivots.iter().fold(Rational::one(), |acc, p| acc * p);
    debug_assert!(det.is_integer());
    det.to_integer()
}

/// Number of classes with positive square in a Gram block whose positive
/// classes are pairwise orthogonal. Such classes span a positive subspace,
/// so the count is a lower bound for `b₊` of any ambient form.
pub fn ends_bound(surface_gram: &IntersectionForm) -> Result<usize> {
    let q = &surface_gram.matrix;
    let selected: Vec<usize> = (0..q.len()).filter(|&i| q[i][i] > 0).collect();
    for (a, &i) in selected.iter().enumerate() {
        for &j in &selected[a + 1..] {
            if q[i][j] != 0 {
                return Err(Error::InconsistentBlock(i, j, q[i][j].to_string()));
            }
        }
    }
    Ok(selected.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EndsCheck {
    pub ends: usize,
    pub b_plus: usize,
    /// `ends ≤ b₊`; `false` is a contradiction with the ambient form.
    pub consistent: bool,
}

pub fn ends_versus_ambient(
    surface_gram: &IntersectionForm,
    ambient: &IntersectionForm,
) -> Result<EndsCheck> {
    let ends = ends_bound(surface_gram)?;
    let bp = b_plus(ambient);
    Ok(EndsCheck {
        ends,
        b_plus: bp,
        consistent: ends <= bp,
    })
}
