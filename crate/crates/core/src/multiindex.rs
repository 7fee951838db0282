//! Permutation signs, strictly increasing index tuples and the generalized
//! Kronecker symbol.
//!
//! Public types use 1-based indices. The `pub(crate)` helpers at the bottom
//! work on 0-based slices and are what the contraction loops call.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An ordered tuple of 1-based indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexTuple(Vec<usize>);

impl IndexTuple {
    /// Builds a tuple, checking every entry lies in `1..=n`.
    pub fn new(entries: Vec<usize>, n: usize) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e == 0 || e > n) {
            return Err(Error::validation(format!("index {bad} outside 1..={n}")));
        }
        Ok(IndexTuple(entries))
    }

    /// Builds a tuple without a range check.
    pub fn from_entries(entries: impl Into<Vec<usize>>) -> Self {
        IndexTuple(entries.into())
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_increasing(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }
}

/// A bijection of `{1, …, r}` stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let r = image.len();
        let mut seen = vec![false; r];
        for &v in &image {
            if v == 0 || v > r || seen[v - 1] {
                return Err(Error::validation(format!("{image:?} is not a permutation of 1..={r}")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { image })
    }

    pub fn identity(r: usize) -> Self {
        Permutation { image: (1..=r).collect() }
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    pub fn sign(&self) -> i8 {
        perm_sign(self)
    }
}

/// `(-1)^inversions` of a permutation.
pub fn perm_sign(p: &Permutation) -> i8 {
    let mut scratch = p.image.clone();
    parity_sign(count_inversions(&mut scratch))
}

/// The generalized Kronecker symbol `δ^{upper}_{lower}`.
///
/// `±1` when the upper entries are distinct and the lower tuple is an even
/// or odd rearrangement of them, `0` otherwise.
pub fn generalized_kronecker(upper: &IndexTuple, lower: &IndexTuple) -> Result<i8> {
    if upper.len() != lower.len() {
        return Err(Error::validation(format!(
            "Kronecker symbol needs equal lengths, got {} and {}",
            upper.len(),
            lower.len()
        )));
    }
    Ok(kronecker_sign(&upper.0, &lower.0))
}

/// All strictly increasing `r`-tuples over `1..=n` in lexicographic order.
///
/// Yields `C(n, r)` tuples; empty when `r > n`.
pub fn increasing_tuples(n: usize, r: usize) -> impl Iterator<Item = IndexTuple> {
    (1..=n).combinations(r).map(IndexTuple)
}

pub(crate) fn parity_sign(inversions: usize) -> i8 {
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Merge-sorts `v` in place and returns the number of inversions.
pub(crate) fn count_inversions(v: &mut [usize]) -> usize {
    let len = v.len();
    if len < 2 {
        return 0;
    }
    if len <= 8 {
        // insertion sort; each shift is one inversion
        let mut inv = 0;
        for i in 1..len {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                inv += 1;
                j -= 1;
            }
        }
        return inv;
    }
    let mid = len / 2;
    let mut inv = count_inversions(&mut v[..mid]) + count_inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(len);
    let (mut a, mut b) = (0, mid);
    while a < mid && b < len {
        if v[a] <= v[b] {
            merged.push(v[a]);
            a += 1;
        } else {
            merged.push(v[b]);
            inv += mid - a;
            b += 1;
        }
    }
    merged.extend_from_slice(&v[a..mid]);
    merged.extend_from_slice(&v[b..len]);
    v.copy_from_slice(&merged);
    inv
}

/// Generalized Kronecker symbol on raw slices (any index base).
pub(crate) fn kronecker_sign(upper: &[usize], lower: &[usize]) -> i8 {
    if upper.len() != lower.len() {
        return 0;
    }
    let mut u = upper.to_vec();
    let mut l = lower.to_vec();
    let inv_u = count_inversions(&mut u);
    let inv_l = count_inversions(&mut l);
    if u.windows(2).any(|w| w[0] == w[1]) || u != l {
        return 0;
    }
    parity_sign(inv_u + inv_l)
}

/// Every permutation of `0..p` together with its sign, in lexicographic order.
pub(crate) fn signed_permutations(p: usize) -> Vec<(Vec<usize>, i8)> {
    (0..p)
        .permutations(p)
        .map(|perm| {
            let mut scratch = perm.clone();
            let s = parity_sign(count_inversions(&mut scratch));
            (perm, s)
        })
        .collect()
}
