use serde::{Deserialize, Serialize};

use super::contraction::{factorial, Contractor};
use super::matrix::Matrix;
use super::stack::ShapeOperatorStack;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A generalized Newton transformation `T_r` (when `alpha` is `None`) or its
/// odd-order companion `T_q^α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonTransform<T = f64> {
    pub order: usize,
    /// 1-based normal index for `T_q^α`.
    pub alpha: Option<usize>,
    pub matrix: Matrix<T>,
}

/// Components of a vector in `F` along `e_{n+1}, …, e_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalVector<T = f64> {
    pub coeffs: Vec<T>,
}

impl<T: Scalar> NormalVector<T> {
    pub fn zeros(l: usize) -> Self {
        NormalVector { coeffs: vec![T::zero(); l] }
    }

    pub fn norm_squared(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |acc, c| acc + c.clone() * c.clone())
    }
}

pub(crate) fn require_even(r: usize, what: &'static str) -> Result<()> {
    if r % 2 == 1 {
        return Err(Error::UnsupportedOrder { order: r, reason: what });
    }
    Ok(())
}

/// `S_r = (1/r!) δ^{i_1…i_r}_{j_1…j_r} ⟨B_{i_1}^{j_1}, B_{i_2}^{j_2}⟩ ⋯`.
///
/// `S_0 = 1` and `S_{n+1} = 0`. Odd orders are rejected.
pub fn s_r_direct<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<T> {
    require_even(r, "S_r is defined only for even r")?;
    let n = stack.n();
    if r == 0 {
        return Ok(T::one());
    }
    if r > n + 1 {
        return Err(Error::validation(format!("S_{r} needs r ≤ n + 1 = {}", n + 1)));
    }
    if r == n + 1 {
        return Ok(T::zero());
    }
    Ok(Contractor::new(stack, r / 2, None).eval(&[], &[]) / factorial(r))
}

/// Sum of the `r×r` principal minors of a single matrix.
///
/// For `l = 1` this equals the Kronecker contraction defining `S_r`; it is
/// kept as an independent oracle.
pub fn s_r_minor_oracle<T: Scalar>(a: &Matrix<T>, r: usize) -> Result<T> {
    let n = a.dim();
    if r > n {
        return Err(Error::validation(format!("principal minors need r ≤ n = {n}")));
    }
    let mut total = T::zero();
    for tuple in crate::multiindex::increasing_tuples(n, r) {
        let idx: Vec<usize> = tuple.entries().iter().map(|i| i - 1).collect();
        let sub = Matrix::from_fn(r, |p, q| a[(idx[p], idx[q])].clone());
        total = total + sub.determinant();
    }
    Ok(total)
}

/// `T_r` from its defining contraction; `T_0 = I`, `T_n = 0`.
pub fn newton_direct<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<NewtonTransform<T>> {
    require_even(r, "T_r is defined only for even r")?;
    let n = stack.n();
    if r > n {
        return Err(Error::validation(format!("T_{r} needs r ≤ n = {n}")));
    }
    let c = Contractor::new(stack, r / 2, None);
    let norm: T = factorial(r);
    let matrix = Matrix::from_fn(n, |i, j| c.eval(&[i], &[j]) / norm.clone());
    Ok(NewtonTransform { order: r, alpha: None, matrix })
}

/// `T_q^α` for odd `q`: `(q-1)/2` pairings and one bare `A^α` factor.
pub fn newton_alpha_direct<T: Scalar>(
    stack: &ShapeOperatorStack<T>,
    q: usize,
    alpha: usize,
) -> Result<NewtonTransform<T>> {
    if q.is_multiple_of(2) {
        return Err(Error::UnsupportedOrder { order: q, reason: "T_q^α is defined only for odd q" });
    }
    let n = stack.n();
    if q + 1 > n {
        return Err(Error::validation(format!("T_{q}^α needs q ≤ n - 1 = {}", n - 1)));
    }
    stack.shape_operator(alpha)?;
    let c = Contractor::new(stack, (q - 1) / 2, Some(alpha - 1));
    let norm: T = factorial(q);
    let matrix = Matrix::from_fn(n, |i, j| c.eval(&[i], &[j]) / norm.clone());
    Ok(NewtonTransform { order: q, alpha: Some(alpha), matrix })
}

/// `T_r = S_r I - Σ_α A^α T_{r-1}^α`.
pub fn newton_recursive<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<NewtonTransform<T>> {
    require_even(r, "T_r is defined only for even r")?;
    let n = stack.n();
    if r > n {
        return Err(Error::validation(format!("T_{r} needs r ≤ n = {n}")));
    }
    if r == 0 {
        return Ok(NewtonTransform { order: 0, alpha: None, matrix: Matrix::identity(n) });
    }
    let s_r = s_r_direct(stack, r)?;
    let mut matrix = Matrix::identity(n).scale(&s_r);
    for alpha in 1..=stack.l() {
        let t_alpha = newton_alpha_direct(stack, r - 1, alpha)?;
        matrix = matrix.sub(&stack.shape_operator(alpha)?.matmul(&t_alpha.matrix));
    }
    Ok(NewtonTransform { order: r, alpha: None, matrix })
}

/// `S_{r+1}` with coefficients `tr(T_r A^α) / (r+1)`; zero for `r = n`.
pub fn mean_curvature_vector<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<NormalVector<T>> {
    require_even(r, "S_{r+1} is defined only for even r")?;
    let n = stack.n();
    if r > n {
        return Err(Error::validation(format!("S_(r+1) needs r ≤ n = {n}")));
    }
    if r == n {
        return Ok(NormalVector::zeros(stack.l()));
    }
    let t_r = newton_direct(stack, r)?;
    let denom = T::from_count(r + 1);
    let coeffs = stack.matrices().iter().map(|a| t_r.matrix.trace_of_product(a) / denom.clone()).collect();
    Ok(NormalVector { coeffs })
}

/// `S_{r+1}` from its defining contraction with a bare `B` factor.
pub fn mean_curvature_vector_direct<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<NormalVector<T>> {
    require_even(r, "S_{r+1} is defined only for even r")?;
    let n = stack.n();
    if r > n {
        return Err(Error::validation(format!("S_(r+1) needs r ≤ n = {n}")));
    }
    let norm: T = factorial(r + 1);
    let coeffs =
        (0..stack.l()).map(|alpha| Contractor::new(stack, r / 2, Some(alpha)).eval(&[], &[]) / norm.clone()).collect();
    Ok(NormalVector { coeffs })
}

/// Normalized mean curvature `H_r = S_r / C(n, r)`.
pub fn h_r<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<T> {
    let n = stack.n();
    require_even(r, "H_r is defined only for even r")?;
    if r > n {
        return Err(Error::validation(format!("H_{r} needs r ≤ n = {n}")));
    }
    let binom = (0..r).fold(1usize, |acc, k| acc * (n - k) / (k + 1));
    Ok(s_r_direct(stack, r)? / T::from_count(binom))
}
