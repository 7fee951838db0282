//! Residuals of the trace and recursion identities linking `S_r`, `T_r`,
//! `T_q^α` and `S_{r+1}`.
//!
//! Each check computes both sides independently and returns a
//! [`Discrepancy`], which is exactly zero in the rational path.

use super::matrix::Matrix;
use super::newton::{
    mean_curvature_vector, mean_curvature_vector_direct, newton_alpha_direct, newton_direct, newton_recursive,
    require_even, s_r_direct,
};
use super::stack::ShapeOperatorStack;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Largest absolute gap between two sides, and the largest magnitude seen.
#[derive(Debug, Clone, PartialEq)]
pub struct Discrepancy<T = f64> {
    pub abs: T,
    pub magnitude: T,
}

impl<T: Scalar> Discrepancy<T> {
    pub fn zero() -> Self {
        Discrepancy { abs: T::zero(), magnitude: T::zero() }
    }

    pub fn between(lhs: &T, rhs: &T) -> Self {
        let (a, b) = (lhs.abs(), rhs.abs());
        Discrepancy { abs: (lhs.clone() - rhs.clone()).abs(), magnitude: if a > b { a } else { b } }
    }

    pub fn between_matrices(lhs: &Matrix<T>, rhs: &Matrix<T>) -> Self {
        lhs.entries().iter().zip(rhs.entries()).fold(Self::zero(), |acc, (a, b)| acc.max(Self::between(a, b)))
    }

    pub fn max(self, other: Self) -> Self {
        Discrepancy {
            abs: if other.abs > self.abs { other.abs } else { self.abs },
            magnitude: if other.magnitude > self.magnitude { other.magnitude } else { self.magnitude },
        }
    }

    /// `|lhs − rhs| / (1 + max(|lhs|, |rhs|))` as a float.
    pub fn relative(&self) -> f64 {
        self.abs.to_f64_lossy() / (1.0 + self.magnitude.to_f64_lossy())
    }

    pub fn is_exact_zero(&self) -> bool {
        self.abs.is_zero()
    }
}

fn check_even_range(r: usize, n: usize, min: usize) -> Result<()> {
    require_even(r, "identity is stated for even r")?;
    if r < min || r > n {
        return Err(Error::validation(format!("identity needs {min} ≤ r ≤ n = {n}, got {r}")));
    }
    Ok(())
}

/// `S_r = (1/r) Σ_α tr(T_{r-1}^α A^α)`, even `r ≥ 2`.
pub fn trace_alpha_identity<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<Discrepancy<T>> {
    check_even_range(r, stack.n(), 2)?;
    let lhs = s_r_direct(stack, r)?;
    let mut sum = T::zero();
    for alpha in 1..=stack.l() {
        let t = newton_alpha_direct(stack, r - 1, alpha)?;
        sum = sum + t.matrix.trace_of_product(stack.shape_operator(alpha)?);
    }
    Ok(Discrepancy::between(&lhs, &(sum / T::from_count(r))))
}

/// `S_{r+1} = (1/(r+1)) tr(T_r A^α) e_α` against the defining contraction.
pub fn mean_curvature_vector_identity<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<Discrepancy<T>> {
    check_even_range(r, stack.n(), 0)?;
    let direct = mean_curvature_vector_direct(stack, r)?;
    let traced = mean_curvature_vector(stack, r)?;
    Ok(direct
        .coeffs
        .iter()
        .zip(&traced.coeffs)
        .fold(Discrepancy::zero(), |acc, (a, b)| acc.max(Discrepancy::between(a, b))))
}

/// `tr(T_r) = (n − r) S_r`.
pub fn newton_trace_identity<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<Discrepancy<T>> {
    check_even_range(r, stack.n(), 0)?;
    let lhs = newton_direct(stack, r)?.matrix.trace();
    let rhs = T::from_count(stack.n() - r) * s_r_direct(stack, r)?;
    Ok(Discrepancy::between(&lhs, &rhs))
}

/// `T_r = S_r I − A^α T_{r−1}^α`, entrywise.
pub fn recursion_identity<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<Discrepancy<T>> {
    check_even_range(r, stack.n(), 0)?;
    let direct = newton_direct(stack, r)?;
    let recursive = newton_recursive(stack, r)?;
    Ok(Discrepancy::between_matrices(&direct.matrix, &recursive.matrix))
}

/// For odd `q` and each `α`: `tr(T_q^α) = ((n − q)/q) tr(T_{q−1} A^α)`.
pub fn odd_trace_identity<T: Scalar>(stack: &ShapeOperatorStack<T>, q: usize) -> Result<Discrepancy<T>> {
    if q.is_multiple_of(2) {
        return Err(Error::UnsupportedOrder { order: q, reason: "the odd trace identity needs odd q" });
    }
    let n = stack.n();
    if q + 1 > n {
        return Err(Error::validation(format!("odd trace identity needs q ≤ n − 1 = {}", n - 1)));
    }
    let t_prev = newton_direct(stack, q - 1)?;
    let factor = T::from_count(n - q) / T::from_count(q);
    let mut worst = Discrepancy::zero();
    for alpha in 1..=stack.l() {
        let lhs = newton_alpha_direct(stack, q, alpha)?.matrix.trace();
        let rhs = factor.clone() * t_prev.matrix.trace_of_product(stack.shape_operator(alpha)?);
        worst = worst.max(Discrepancy::between(&lhs, &rhs));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn sample(n: usize, l: usize) -> ShapeOperatorStack {
        let mats =
            (0..l).map(|a| Matrix::from_fn(n, |i, j| (((i * 7 + j * 3 + a * 5) % 11) as f64) / 5.0 - 1.0)).collect();
        ShapeOperatorStack::new(mats).unwrap()
    }

    #[test]
    fn identities_hold_exactly_on_rational_sample() {
        let s = sample(4, 2).map(|v| Rational::from_f64_exact(*v));
        for r in [2, 4] {
            assert!(trace_alpha_identity(&s, r).unwrap().is_exact_zero());
            assert!(newton_trace_identity(&s, r).unwrap().is_exact_zero());
            assert!(recursion_identity(&s, r).unwrap().is_exact_zero());
            assert!(mean_curvature_vector_identity(&s, r).unwrap().is_exact_zero());
        }
        for q in [1, 3] {
            assert!(odd_trace_identity(&s, q).unwrap().is_exact_zero());
        }
    }

    #[test]
    fn range_errors() {
        let s = sample(3, 1);
        assert!(trace_alpha_identity(&s, 0).is_err());
        assert!(trace_alpha_identity(&s, 4).is_err());
        assert!(odd_trace_identity(&s, 3).is_err());
        assert!(odd_trace_identity(&s, 2).is_err());
    }

    #[test]
    fn discrepancy_relative_scaling() {
        let d = Discrepancy::between(&3.0, &1.0);
        assert_eq!(d.abs, 2.0);
        assert_eq!(d.relative(), 0.5);
    }
}
