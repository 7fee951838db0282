//! The generalized Kronecker contraction shared by every curvature quantity.
//!
//! All of `S_r`, `T_r`, `T_q^α`, `S_{r+1}` and the slot tensors have the form
//!
//! ```text
//! δ^{i_1 … i_p U}_{j_1 … j_p L} ⟨B_{i_1}^{j_1}, B_{i_2}^{j_2}⟩ ⋯ [A^α_{i_p}^{j_p}]
//! ```
//!
//! with `s` pairings, an optional bare shape-operator factor, and fixed free
//! index tuples `U` (upper) and `L` (lower). The symbol vanishes unless the
//! contracted upper indices `I` avoid `U` and are distinct, and the lower
//! indices `J ∪ L` rearrange `I ∪ U`. So for each increasing choice of the
//! set of `I` the set of `J` is forced, and only orderings of the two sets
//! are summed.
//!
//! Reordering `I` and `J` by the same position permutation leaves both the
//! sign and the term unchanged whenever it only swaps whole pairs or swaps
//! the two members of a pair. Summing over one canonical upper ordering per
//! orbit of that group (size `2^s s!`) and multiplying back is exact.

use itertools::Itertools;

use super::stack::ShapeOperatorStack;
use crate::multiindex::{kronecker_sign, signed_permutations};
use crate::scalar::Scalar;

pub(crate) struct Contractor<'a, T> {
    stack: &'a ShapeOperatorStack<T>,
    pairs: usize,
    bare: Option<usize>,
    all: Vec<(Vec<usize>, i8)>,
    canonical: Vec<(Vec<usize>, i8)>,
    multiplicity: T,
}

impl<'a, T: Scalar> Contractor<'a, T> {
    /// `bare` is a 0-based normal index.
    pub(crate) fn new(stack: &'a ShapeOperatorStack<T>, pairs: usize, bare: Option<usize>) -> Self {
        let p = 2 * pairs + usize::from(bare.is_some());
        let all = signed_permutations(p);
        let canonical = all
            .iter()
            .filter(|(perm, _)| {
                (0..pairs).all(|k| perm[2 * k] < perm[2 * k + 1] && (k + 1 == pairs || perm[2 * k] < perm[2 * k + 2]))
            })
            .cloned()
            .collect();
        let orbit = (1..=pairs).product::<usize>() << pairs;
        // make sure the pair table exists before contraction loops run
        if pairs > 0 {
            stack.pair_table();
        }
        Contractor { stack, pairs, bare, all, canonical, multiplicity: T::from_count(orbit) }
    }

    fn order(&self) -> usize {
        2 * self.pairs + usize::from(self.bare.is_some())
    }

    /// Unnormalized contraction with 0-based free indices.
    pub(crate) fn eval(&self, upper_free: &[usize], lower_free: &[usize]) -> T {
        debug_assert_eq!(upper_free.len(), lower_free.len());
        let n = self.stack.n();
        let p = self.order();
        if p + upper_free.len() > n || has_repeat(upper_free) || has_repeat(lower_free) {
            return T::zero();
        }
        let available: Vec<usize> = (0..n).filter(|i| !upper_free.contains(i)).collect();
        let mut total = T::zero();
        let mut upper = vec![0usize; p];
        let mut lower = vec![0usize; p];
        for set_i in available.into_iter().combinations(p) {
            if lower_free.iter().any(|j| !set_i.contains(j) && !upper_free.contains(j)) {
                continue;
            }
            let set_j: Vec<usize> =
                set_i.iter().chain(upper_free).copied().filter(|j| !lower_free.contains(j)).sorted_unstable().collect();
            let full_upper: Vec<usize> = set_i.iter().chain(upper_free).copied().collect();
            let full_lower: Vec<usize> = set_j.iter().chain(lower_free).copied().collect();
            let base = kronecker_sign(&full_upper, &full_lower);
            debug_assert_ne!(base, 0);

            for (pi, s_pi) in &self.canonical {
                for (slot, &k) in upper.iter_mut().zip(pi) {
                    *slot = set_i[k];
                }
                for (rho, s_rho) in &self.all {
                    for (slot, &k) in lower.iter_mut().zip(rho) {
                        *slot = set_j[k];
                    }
                    let term = self.term(&upper, &lower);
                    if base * s_pi * s_rho > 0 {
                        total = total + term;
                    } else {
                        total = total - term;
                    }
                }
            }
        }
        total * self.multiplicity.clone()
    }

    fn term(&self, upper: &[usize], lower: &[usize]) -> T {
        let mut acc = match self.bare {
            Some(alpha) => {
                let last = upper.len() - 1;
                self.stack.lower_upper(alpha, upper[last], lower[last]).clone()
            }
            None => T::one(),
        };
        for k in 0..self.pairs {
            let v = self.stack.pair(upper[2 * k], lower[2 * k], upper[2 * k + 1], lower[2 * k + 1]);
            if v.is_zero() {
                return T::zero();
            }
            acc = acc * v;
        }
        acc
    }
}

fn has_repeat(v: &[usize]) -> bool {
    v.iter().enumerate().any(|(k, x)| v[..k].contains(x))
}

pub(crate) fn factorial<T: Scalar>(k: usize) -> T {
    T::from_count((1..=k).product::<usize>())
}
