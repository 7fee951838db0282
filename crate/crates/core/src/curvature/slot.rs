use super::contraction::{factorial, Contractor};
use super::identities::Discrepancy;
use super::newton::{newton_direct, require_even};
use super::stack::ShapeOperatorStack;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// `T_r` with two or three extra antisymmetrized slot pairs,
/// e.g. `T_r^{i_{r+1} i_{r+2}}_{j_{r+1} j_{r+2}}`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotTensor<T = f64> {
    pub order: usize,
    pub rank: usize,
    n: usize,
    values: Vec<T>,
}

impl<T: Scalar> SlotTensor<T> {
    fn offset(&self, upper: &[usize], lower: &[usize]) -> usize {
        upper.iter().chain(lower).fold(0, |acc, &v| acc * self.n + v)
    }

    /// 0-based lookup.
    pub(crate) fn at(&self, upper: &[usize], lower: &[usize]) -> &T {
        &self.values[self.offset(upper, lower)]
    }

    /// 1-based lookup.
    pub fn value(&self, upper: &[usize], lower: &[usize]) -> Result<&T> {
        if upper.len() != self.rank || lower.len() != self.rank {
            return Err(Error::validation(format!("slot tensor has rank {}", self.rank)));
        }
        if upper.iter().chain(lower).any(|&v| v == 0 || v > self.n) {
            return Err(Error::validation(format!("slot index outside 1..={}", self.n)));
        }
        let u: Vec<usize> = upper.iter().map(|v| v - 1).collect();
        let l: Vec<usize> = lower.iter().map(|v| v - 1).collect();
        Ok(self.at(&u, &l))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(T::is_zero)
    }

    /// Every index assignment `(upper, lower)`, 0-based, in storage order.
    pub(crate) fn index_space(n: usize, rank: usize) -> impl Iterator<Item = (Vec<usize>, Vec<usize>)> {
        let total = n.pow(2 * rank as u32);
        (0..total).map(move |mut flat| {
            let mut digits = vec![0; 2 * rank];
            for d in digits.iter_mut().rev() {
                *d = flat % n;
                flat /= n;
            }
            let lower = digits.split_off(rank);
            (digits, lower)
        })
    }
}

/// `T_r^{U}_{L} = (1/r!) δ^{i_1…i_r U}_{j_1…j_r L} ⟨B,B⟩⋯` for `|U| = |L| = rank`.
///
/// Identically zero when `r + rank > n`.
pub fn slot_tensor<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize, rank: usize) -> Result<SlotTensor<T>> {
    require_even(r, "slot tensors are defined only for even r")?;
    if !(2..=3).contains(&rank) {
        return Err(Error::validation(format!("slot rank must be 2 or 3, got {rank}")));
    }
    let n = stack.n();
    let size = n.pow(2 * rank as u32);
    if r + rank > n {
        return Ok(SlotTensor { order: r, rank, n, values: vec![T::zero(); size] });
    }
    let c = Contractor::new(stack, r / 2, None);
    let norm: T = factorial(r);
    let values = SlotTensor::<T>::index_space(n, rank).map(|(u, l)| c.eval(&u, &l) / norm.clone()).collect();
    Ok(SlotTensor { order: r, rank, n, values })
}

/// Largest entrywise gap between the two sides of
///
/// ```text
/// T_r^{ab}_{cd} = δ^b_d T_r^a_c − δ^b_c T_r^a_d
///               − 1/(r−1) T_{r−2}^{p a q}_{u c d} A^α_p^u A^α{}^b_q
/// ```
///
/// with `p, u, q, α` summed.
pub fn lemma3_residual<T: Scalar>(stack: &ShapeOperatorStack<T>, r: usize) -> Result<Discrepancy<T>> {
    require_even(r, "the slot contraction identity needs even r")?;
    if r < 2 {
        return Err(Error::UnsupportedOrder { order: r, reason: "the slot contraction identity needs r ≥ 2" });
    }
    let n = stack.n();
    let l = stack.l();
    let lhs = slot_tensor(stack, r, 2)?;
    let t_r = newton_direct(stack, r)?.matrix;
    let t3 = slot_tensor(stack, r - 2, 3)?;

    // folded[α][a][q][c][d] = Σ_{p,u} T_{r-2}^{p a q}_{u c d} A^α_p^u
    let idx = |alpha: usize, a: usize, q: usize, c: usize, d: usize| (((alpha * n + a) * n + q) * n + c) * n + d;
    let mut folded = vec![T::zero(); l * n.pow(4)];
    if !t3.is_zero() {
        for alpha in 0..l {
            for a in 0..n {
                for q in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut acc = T::zero();
                            for p in 0..n {
                                for u in 0..n {
                                    let t = t3.at(&[p, a, q], &[u, c, d]);
                                    if !t.is_zero() {
                                        acc = acc + t.clone() * stack.lower_upper(alpha, p, u).clone();
                                    }
                                }
                            }
                            folded[idx(alpha, a, q, c, d)] = acc;
                        }
                    }
                }
            }
        }
    }

    let inv = T::one() / T::from_count(r - 1);
    let mut worst = Discrepancy::zero();
    for (upper, lower) in SlotTensor::<T>::index_space(n, 2) {
        let (a, b, c, d) = (upper[0], upper[1], lower[0], lower[1]);
        let mut rhs = T::zero();
        if b == d {
            rhs = rhs + t_r[(a, c)].clone();
        }
        if b == c {
            rhs = rhs - t_r[(a, d)].clone();
        }
        let mut third = T::zero();
        for alpha in 0..l {
            let m = &stack.matrices()[alpha];
            for q in 0..n {
                third = third + folded[idx(alpha, a, q, c, d)].clone() * m[(b, q)].clone();
            }
        }
        rhs = rhs - third * inv.clone();
        worst = worst.max(Discrepancy::between(lhs.at(&upper, &lower), &rhs));
    }
    Ok(worst)
}
