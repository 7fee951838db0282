//! Sparse alternating forms on an oriented orthonormal `m`-frame and the
//! Brito–Naveira `n`-forms `Γ_r`.
//!
//! A form is a map from strictly increasing 1-based index tuples to
//! coefficients on `θ^{i_1} ∧ ⋯ ∧ θ^{i_k}`. `Γ_r` is built from the
//! connection forms `ω^{iα} = −A^α_j^i θ^j + X^{iα}_β θ^β`; only the
//! tangential part survives the wedge with `ν = θ^{n+1} ∧ ⋯ ∧ θ^m`.

use std::collections::BTreeMap;

use itertools::Itertools;

use crate::curvature::{s_r_direct, ShapeOperatorStack};
use crate::error::{Error, Result};
use crate::multiindex::{count_inversions, parity_sign, signed_permutations};

/// Largest `n` for which `Γ_r` is summed over all of `Σ_n`.
pub const MAX_GAMMA_DIM: usize = 7;

#[derive(Debug, Clone, PartialEq)]
pub struct AlternatingForm {
    m: usize,
    degree: usize,
    coeffs: BTreeMap<Vec<usize>, f64>,
}

impl AlternatingForm {
    pub fn zero(m: usize, degree: usize) -> Self {
        AlternatingForm { m, degree, coeffs: BTreeMap::new() }
    }

    /// The constant 0-form `c`.
    pub fn constant(m: usize, c: f64) -> Self {
        let mut f = Self::zero(m, 0);
        f.add_term(vec![], c);
        f
    }

    /// `θ^i`, 1-based.
    pub fn basis(m: usize, i: usize) -> Result<Self> {
        Self::monomial(m, &[i], 1.0)
    }

    /// `c θ^{i_1} ∧ ⋯ ∧ θ^{i_k}` for any (not necessarily sorted) tuple.
    pub fn monomial(m: usize, indices: &[usize], c: f64) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i == 0 || i > m) {
            return Err(Error::validation(format!("form index {bad} outside 1..={m}")));
        }
        let mut f = Self::zero(m, indices.len());
        let mut key = indices.to_vec();
        let inversions = count_inversions(&mut key);
        if key.windows(2).all(|w| w[0] < w[1]) {
            f.add_term(key, c * f64::from(parity_sign(inversions)));
        }
        Ok(f)
    }

    /// The volume form `θ^1 ∧ ⋯ ∧ θ^m`.
    pub fn volume(m: usize) -> Self {
        let mut f = Self::zero(m, m);
        f.add_term((1..=m).collect(), 1.0);
        f
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient on an increasing 1-based tuple.
    pub fn coefficient(&self, tuple: &[usize]) -> f64 {
        self.coeffs.get(tuple).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.values().all(|v| *v == 0.0)
    }

    fn add_term(&mut self, key: Vec<usize>, value: f64) {
        if value != 0.0 {
            *self.coeffs.entry(key).or_insert(0.0) += value;
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.m != other.m || self.degree != other.degree {
            return Err(Error::validation("forms of different dimension or degree"));
        }
        let mut out = self.clone();
        for (k, v) in &other.coeffs {
            out.add_term(k.clone(), *v);
        }
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Self {
        AlternatingForm {
            m: self.m,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    fn add_scaled(&mut self, other: &Self, c: f64) {
        for (k, v) in &other.coeffs {
            self.add_term(k.clone(), c * v);
        }
    }
}

/// Exterior product, with the merge sign from inversion counting.
pub fn wedge(f: &AlternatingForm, g: &AlternatingForm) -> Result<AlternatingForm> {
    if f.m != g.m {
        return Err(Error::validation(format!("wedge of forms on frames of size {} and {}", f.m, g.m)));
    }
    let mut out = AlternatingForm::zero(f.m, f.degree + g.degree);
    if out.degree > out.m {
        return Ok(out);
    }
    let mut scratch = Vec::with_capacity(out.degree);
    for (a, x) in &f.coeffs {
        for (b, y) in &g.coeffs {
            if a.iter().any(|i| b.binary_search(i).is_ok()) {
                continue;
            }
            scratch.clear();
            scratch.extend_from_slice(a);
            scratch.extend_from_slice(b);
            let sign = parity_sign(count_inversions(&mut scratch));
            out.add_term(scratch.clone(), f64::from(sign) * x * y);
        }
    }
    Ok(out)
}

/// Coefficient of `θ^1 ∧ ⋯ ∧ θ^m`.
pub fn top_coefficient(f: &AlternatingForm) -> Result<f64> {
    if f.degree != f.m {
        return Err(Error::validation(format!("top coefficient needs a degree-{} form, got degree {}", f.m, f.degree)));
    }
    Ok(f.coefficient(&(1..=f.m).collect::<Vec<_>>()))
}

/// `ν = θ^{n+1} ∧ ⋯ ∧ θ^m`.
pub fn normal_volume(n: usize, m: usize) -> AlternatingForm {
    let mut f = AlternatingForm::zero(m, m - n);
    f.add_term((n + 1..=m).collect(), 1.0);
    f
}

/// Connection forms `ω^{iα}` evaluated on the adapted frame.
#[derive(Debug, Clone)]
pub struct ConnectionData {
    n: usize,
    l: usize,
    /// `ω^{iα}(e_j) = −A^α_j^i`, stored at `[(α n + i) n + j]`.
    tangential: Vec<f64>,
    /// `X^{iα}_β`, stored at `[(α n + i) l + β]`.
    normal: Vec<f64>,
}

impl ConnectionData {
    /// `x` holds `X^{iα}_β` at `[(α n + i) l + β]` (0-based); an empty slice
    /// means `X = 0`.
    pub fn new(stack: &ShapeOperatorStack, x: &[f64]) -> Result<Self> {
        let (n, l) = (stack.n(), stack.l());
        let normal = if x.is_empty() { vec![0.0; n * l * l] } else { x.to_vec() };
        if normal.len() != n * l * l {
            return Err(Error::validation(format!("X needs n·l·l = {} entries, got {}", n * l * l, x.len())));
        }
        let mut tangential = Vec::with_capacity(l * n * n);
        for a in stack.matrices() {
            for i in 0..n {
                for j in 0..n {
                    tangential.push(-a[(i, j)]);
                }
            }
        }
        Ok(ConnectionData { n, l, tangential, normal })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.n + self.l
    }

    /// The 1-form `ω^{iα}`, 0-based `i` and `alpha`.
    pub fn omega(&self, i: usize, alpha: usize) -> AlternatingForm {
        let (n, l) = (self.n, self.l);
        let mut f = AlternatingForm::zero(self.m(), 1);
        for j in 0..n {
            f.add_term(vec![j + 1], self.tangential[(alpha * n + i) * n + j]);
        }
        for beta in 0..l {
            f.add_term(vec![n + beta + 1], self.normal[(alpha * n + i) * l + beta]);
        }
        f
    }
}

/// `Γ_r = Σ_σ ε(σ) (ω^{σ(1)β_1} ∧ ω^{σ(2)β_1}) ∧ ⋯ ∧ θ^{σ(2s+1)} ∧ ⋯ ∧ θ^{σ(n)}`.
///
/// Each `β_k` runs over `1..l` independently, so the sum over `β_k` is
/// folded into its pair before the chain of wedges.
pub fn gamma_r(conn: &ConnectionData, r: usize) -> Result<AlternatingForm> {
    if r % 2 == 1 {
        return Err(Error::UnsupportedOrder { order: r, reason: "Γ_r is defined only for even r" });
    }
    let (n, m) = (conn.n, conn.m());
    if r > n {
        return Err(Error::validation(format!("Γ_{r} needs r ≤ n = {n}")));
    }
    if n > MAX_GAMMA_DIM {
        return Err(Error::validation(format!("Γ_r sums over n! permutations; n ≤ {MAX_GAMMA_DIM} required")));
    }
    let omegas: Vec<Vec<AlternatingForm>> = (0..n).map(|i| (0..conn.l).map(|a| conn.omega(i, a)).collect()).collect();
    let mut pair_forms: BTreeMap<(usize, usize), AlternatingForm> = BTreeMap::new();
    if r > 0 {
        for (i, k) in (0..n).cartesian_product(0..n).filter(|(i, k)| i != k) {
            let mut acc = AlternatingForm::zero(m, 2);
            for (wi, wk) in omegas[i].iter().zip(&omegas[k]) {
                acc.add_scaled(&wedge(wi, wk)?, 1.0);
            }
            pair_forms.insert((i, k), acc);
        }
    }
    let thetas: Vec<AlternatingForm> = (1..=n).map(|i| AlternatingForm::basis(m, i)).collect::<Result<_>>()?;

    let s = r / 2;
    let mut gamma = AlternatingForm::zero(m, n);
    for (sigma, sign) in signed_permutations(n) {
        let mut acc = AlternatingForm::constant(m, 1.0);
        for k in 0..s {
            acc = wedge(&acc, &pair_forms[&(sigma[2 * k], sigma[2 * k + 1])])?;
        }
        for &idx in &sigma[2 * s..] {
            acc = wedge(&acc, &thetas[idx])?;
        }
        gamma.add_scaled(&acc, f64::from(sign));
    }
    Ok(gamma)
}

/// `top(Γ_r ∧ ν) / (r! (n − r)!)`.
pub fn normalized_gamma_top(conn: &ConnectionData, r: usize) -> Result<f64> {
    let n = conn.n;
    let gamma = gamma_r(conn, r)?;
    let form = wedge(&gamma, &normal_volume(n, conn.m()))?;
    let norm = (1..=r).product::<usize>() * (1..=n.saturating_sub(r)).product::<usize>();
    Ok(top_coefficient(&form)? / norm as f64)
}

/// `|top(Γ_r ∧ ν)/(r!(n−r)!) − S_r|` for the connection built from `stack`
/// and the normal part `x`.
pub fn verify_theorem1(stack: &ShapeOperatorStack, x: &[f64], r: usize) -> Result<f64> {
    let conn = ConnectionData::new(stack, x)?;
    let lhs = normalized_gamma_top(&conn, r)?;
    Ok((lhs - s_r_direct(stack, r)?).abs())
}
