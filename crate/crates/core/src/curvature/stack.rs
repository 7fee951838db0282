use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The shape operators `A^α` of `D` at one point, `α = 1..l`.
///
/// `a[α][(i, j)]` is `A^α_j^i`: row `i` carries the upper index, column `j`
/// the lower one, i.e. column `j` holds the components of `A^α(e_j)`. No
/// symmetry is assumed; the matrices are generally non-symmetric when `D`
/// is not integrable.
#[derive(Debug)]
pub struct ShapeOperatorStack<T = f64> {
    n: usize,
    l: usize,
    a: Vec<Matrix<T>>,
    pairs: OnceLock<Vec<T>>,
}

impl<T: Scalar> Clone for ShapeOperatorStack<T> {
    fn clone(&self) -> Self {
        ShapeOperatorStack { n: self.n, l: self.l, a: self.a.clone(), pairs: OnceLock::new() }
    }
}

impl<T: Scalar> PartialEq for ShapeOperatorStack<T> {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.l == other.l && self.a == other.a
    }
}

impl<T: Scalar> ShapeOperatorStack<T> {
    pub fn new(matrices: Vec<Matrix<T>>) -> Result<Self> {
        let l = matrices.len();
        if l == 0 {
            return Err(Error::validation("a stack needs at least one shape operator (l ≥ 1)"));
        }
        let n = matrices[0].dim();
        if n == 0 {
            return Err(Error::validation("dim D must be at least 1"));
        }
        if let Some(bad) = matrices.iter().position(|m| m.dim() != n) {
            return Err(Error::validation(format!(
                "shape operator {} is {}×{}, expected {n}×{n}",
                bad + 1,
                matrices[bad].dim(),
                matrices[bad].dim()
            )));
        }
        Ok(ShapeOperatorStack { n, l, a: matrices, pairs: OnceLock::new() })
    }

    pub fn from_rows(rows: &[Vec<Vec<T>>]) -> Result<Self> {
        let mats = rows
            .iter()
            .enumerate()
            .map(|(k, m)| {
                Matrix::from_rows(m).ok_or_else(|| Error::validation(format!("shape operator {} is not square", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(mats)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn matrices(&self) -> &[Matrix<T>] {
        &self.a
    }

    /// `A^α` with 1-based `alpha`.
    pub fn shape_operator(&self, alpha: usize) -> Result<&Matrix<T>> {
        if alpha == 0 || alpha > self.l {
            return Err(Error::validation(format!("normal index {alpha} outside 1..={}", self.l)));
        }
        Ok(&self.a[alpha - 1])
    }

    /// `⟨B_{i1}^{j1}, B_{i2}^{j2}⟩ = Σ_α A^α_{i1}^{j1} A^α_{i2}^{j2}`, 1-based.
    pub fn b_inner(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> Result<T> {
        let n = self.n;
        for v in [i1, j1, i2, j2] {
            if v == 0 || v > n {
                return Err(Error::validation(format!("index {v} outside 1..={n}")));
            }
        }
        Ok(self.pair(i1 - 1, j1 - 1, i2 - 1, j2 - 1))
    }

    /// `A^α_i^j` (lower `i`, upper `j`), 0-based; that is matrix entry `(j, i)`.
    #[inline]
    pub(crate) fn lower_upper(&self, alpha: usize, i: usize, j: usize) -> &T {
        &self.a[alpha][(j, i)]
    }

    /// Memoized pairing, 0-based.
    #[inline]
    pub(crate) fn pair(&self, i1: usize, j1: usize, i2: usize, j2: usize) -> T {
        let n = self.n;
        let table = self.pair_table();
        table[((i1 * n + j1) * n + i2) * n + j2].clone()
    }

    /// The `(n²)×(n²)` table of pairings, built on first use.
    pub(crate) fn pair_table(&self) -> &[T] {
        self.pairs.get_or_init(|| {
            let n = self.n;
            let mut table = vec![T::zero(); n * n * n * n];
            for i1 in 0..n {
                for j1 in 0..n {
                    let row = i1 * n + j1;
                    for i2 in 0..n {
                        for j2 in 0..n {
                            let col = i2 * n + j2;
                            if col < row {
                                table[row * n * n + col] = table[col * n * n + row].clone();
                                continue;
                            }
                            let mut acc = T::zero();
                            for alpha in 0..self.l {
                                acc = acc
                                    + self.lower_upper(alpha, i1, j1).clone() * self.lower_upper(alpha, i2, j2).clone();
                            }
                            table[row * n * n + col] = acc;
                        }
                    }
                }
            }
            table
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> ShapeOperatorStack<U> {
        ShapeOperatorStack {
            n: self.n,
            l: self.l,
            a: self.a.iter().map(|m| m.map(&f)).collect(),
            pairs: OnceLock::new(),
        }
    }

    /// Scales every shape operator by `t`.
    pub fn scaled(&self, t: &T) -> Self {
        Self::new(self.a.iter().map(|m| m.scale(t)).collect()).expect("shape preserved")
    }

    /// Tangent frame change: `A^α ↦ Q A^α Qᵀ` for orthogonal `Q`.
    pub fn rotate_tangent(&self, q: &Matrix<T>) -> Result<Self> {
        if q.dim() != self.n {
            return Err(Error::validation("tangent rotation has the wrong size"));
        }
        let qt = q.transpose();
        Self::new(self.a.iter().map(|m| q.matmul(m).matmul(&qt)).collect())
    }

    /// Normal frame change: `A'^β = Σ_α R_{βα} A^α` for orthogonal `R`.
    pub fn rotate_normal(&self, r: &Matrix<T>) -> Result<Self> {
        if r.dim() != self.l {
            return Err(Error::validation("normal rotation has the wrong size"));
        }
        let mats = (0..self.l)
            .map(|beta| {
                (0..self.l).fold(Matrix::zeros(self.n), |acc, alpha| acc.add(&self.a[alpha].scale(&r[(beta, alpha)])))
            })
            .collect();
        Self::new(mats)
    }
}

#[derive(Serialize, Deserialize)]
struct StackDocument {
    n: usize,
    l: usize,
    #[serde(rename = "A")]
    a: Vec<Vec<Vec<f64>>>,
}

impl ShapeOperatorStack<f64> {
    /// Parses `{"n": int, "l": int, "A": [[[real]]]}` with
    /// `A[α-1][i-1][j-1] = A^α_j^i`.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: StackDocument = serde_json::from_str(text)?;
        if doc.a.len() != doc.l {
            return Err(Error::validation(format!("declared l = {} but {} matrices given", doc.l, doc.a.len())));
        }
        if doc.a.iter().flatten().flatten().any(|v| !v.is_finite()) {
            return Err(Error::validation("shape operator entries must be finite"));
        }
        let stack = Self::from_rows(&doc.a)?;
        if stack.n != doc.n {
            return Err(Error::validation(format!("declared n = {} but matrices are {}×{}", doc.n, stack.n, stack.n)));
        }
        Ok(stack)
    }

    pub fn to_json(&self) -> String {
        let doc = StackDocument { n: self.n, l: self.l, a: self.a.iter().map(Matrix::to_rows).collect() };
        serde_json::to_string(&doc).expect("stack serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_stack(a: f64, b: f64) -> ShapeOperatorStack {
        ShapeOperatorStack::from_rows(&[vec![vec![a, 0.0], vec![0.0, b]]]).unwrap()
    }

    #[test]
    fn b_inner_diagonal() {
        let s = diag_stack(2.0, 3.0);
        assert_eq!(s.b_inner(1, 1, 2, 2).unwrap(), 6.0);
        assert_eq!(s.b_inner(1, 2, 2, 2).unwrap(), 0.0);
    }

    #[test]
    fn b_inner_identity_stack() {
        let s = ShapeOperatorStack::from_rows(&[
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 0.0], vec![0.0, 0.0]],
        ])
        .unwrap();
        assert_eq!(s.b_inner(1, 1, 1, 1).unwrap(), 1.0);
    }

    #[test]
    fn b_inner_pair_symmetry() {
        let s = ShapeOperatorStack::from_rows(&[
            vec![vec![0.3, -1.2], vec![0.7, 0.1]],
            vec![vec![-0.5, 0.4], vec![2.0, -0.9]],
        ])
        .unwrap();
        for p in 1..=2 {
            for q in 1..=2 {
                for r in 1..=2 {
                    for t in 1..=2 {
                        assert_eq!(s.b_inner(p, q, r, t).unwrap(), s.b_inner(r, t, p, q).unwrap());
                    }
                }
            }
        }
        // lower i, upper j reads matrix entry (j, i)
        assert_eq!(s.b_inner(1, 2, 1, 1).unwrap(), 0.7 * 0.3 + 2.0 * -0.5);
    }

    #[test]
    fn b_inner_rejects_out_of_range() {
        assert!(diag_stack(1.0, 1.0).b_inner(0, 1, 1, 1).is_err());
        assert!(diag_stack(1.0, 1.0).b_inner(1, 3, 1, 1).is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let s = ShapeOperatorStack::from_rows(&[vec![vec![0.0, -1.0], vec![1.0, 0.0]]]).unwrap();
        let text = s.to_json();
        assert_eq!(text, r#"{"n":2,"l":1,"A":[[[0.0,-1.0],[1.0,0.0]]]}"#);
        assert_eq!(ShapeOperatorStack::from_json(&text).unwrap(), s);
        assert!(ShapeOperatorStack::from_json(r#"{"n":3,"l":1,"A":[[[0.0,-1.0],[1.0,0.0]]]}"#).is_err());
        assert!(ShapeOperatorStack::from_json(r#"{"n":2,"l":2,"A":[[[0.0,-1.0],[1.0,0.0]]]}"#).is_err());
        assert!(ShapeOperatorStack::from_json(r#"{"n":2,"l":1,"A":[[[0.0,-1.0],[1.0]]]}"#).is_err());
    }

    #[test]
    fn empty_stack_rejected() {
        assert!(ShapeOperatorStack::<f64>::new(vec![]).is_err());
        assert!(ShapeOperatorStack::new(vec![Matrix::<f64>::zeros(0)]).is_err());
    }
}
