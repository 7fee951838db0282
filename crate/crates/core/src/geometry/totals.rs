//! Total mean curvatures by quadrature, the closed-form totals for constant
//! curvature, and the two-step recurrence between them.

use serde::{Deserialize, Serialize};

use super::chart::{ChartGeometry, DistributionSpec};
use super::frame::{frame_point, FdOptions, GramSchmidtFrame};
use super::pointwise::{divergence_with, TOTALLY_GEODESIC_TOL};
use super::quadrature::{collapsed_nodes, evaluate_on, invariant_axes, weighted_sum, Resolution};
use crate::curvature::s_r_direct;
use crate::error::{Error, Result};

/// Integrals of `S_r` for several even orders, with the largest frame
/// defects seen at any node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureTotals {
    pub orders: Vec<usize>,
    pub totals: Vec<f64>,
    /// `∫_M |S_r| dvol`, in the same order.
    pub absolute: Vec<f64>,
    /// Quadrature volume, `∫_M 1`.
    pub volume: f64,
    pub max_frame_defect: f64,
    pub max_totally_geodesic: f64,
    pub resolution: Resolution,
}

impl CurvatureTotals {
    pub fn total(&self, r: usize) -> Option<f64> {
        self.orders.iter().position(|&o| o == r).map(|k| self.totals[k])
    }
}

fn s_r_or_zero(stack: &crate::curvature::ShapeOperatorStack, r: usize) -> Result<f64> {
    if r > stack.n() {
        Ok(0.0)
    } else {
        s_r_direct(stack, r)
    }
}

/// `∫_M S_r dvol` for every `r` in `orders`, all from one pass over the grid.
pub fn curvature_totals(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    orders: &[usize],
    res: Resolution,
) -> Result<CurvatureTotals> {
    if let Some(&odd) = orders.iter().find(|&&r| r % 2 == 1) {
        return Err(Error::UnsupportedOrder { order: odd, reason: "S_r is defined only for even r" });
    }
    let field = GramSchmidtFrame::new(geom, dist);
    let fd = FdOptions::default();
    let k = orders.len();
    let (nodes, values) = evaluate_on(collapsed_nodes(geom, res, &invariant_axes(geom, dist))?, |x| {
        let fp = frame_point(&field, x, &fd)?;
        let mut v = Vec::with_capacity(2 * k + 2);
        for &r in orders {
            v.push(s_r_or_zero(&fp.stack, r)?);
        }
        for c in 0..k {
            v.push(v[c].abs());
        }
        v.push(fp.orthonormality_defect());
        v.push(fp.totally_geodesic_residual());
        Ok(v)
    })?;
    let max_of = |c: usize| values.iter().fold(0.0, |acc: f64, v| acc.max(v[c]));
    Ok(CurvatureTotals {
        orders: orders.to_vec(),
        totals: (0..k).map(|c| weighted_sum(&nodes, &values, c)).collect(),
        volume: super::quadrature::pairwise_sum(&nodes.iter().map(|n| n.weight).collect::<Vec<_>>()),
        absolute: (k..2 * k).map(|c| weighted_sum(&nodes, &values, c)).collect(),
        max_frame_defect: max_of(2 * k),
        max_totally_geodesic: max_of(2 * k + 1),
        resolution: res,
    })
}

/// `S_r^T = ∫_M S_r dvol`.
pub fn total_mean_curvature(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    r: usize,
    res: Resolution,
) -> Result<f64> {
    Ok(curvature_totals(geom, dist, &[r], res)?.totals[0])
}

/// `∫_M div S_{r+1} dvol`, which vanishes on a closed manifold.
pub fn divergence_integral(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    r: usize,
    res: Resolution,
) -> Result<f64> {
    let field = GramSchmidtFrame::new(geom, dist);
    let fd = FdOptions::default();
    let nodes = collapsed_nodes(geom, res, &invariant_axes(geom, dist))?;
    let (nodes, values) = evaluate_on(nodes, |x| Ok(vec![divergence_with(&field, r, x, &fd)?]))?;
    Ok(weighted_sum(&nodes, &values, 0))
}

/// `x(x−1)⋯(x−s+1)/s!` for real `x`.
pub fn generalized_binomial(x: f64, s: usize) -> f64 {
    (0..s).fold(1.0, |acc, k| acc * (x - k as f64) / (k + 1) as f64)
}

/// Which branch of the closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormCase {
    /// `n` even, `l` odd.
    EvenOdd,
    /// `n` and `l` even.
    EvenEven,
    Otherwise,
}

impl ClosedFormCase {
    pub fn of(n: usize, l: usize) -> Self {
        match (n % 2, l % 2) {
            (0, 1) => ClosedFormCase::EvenOdd,
            (0, 0) => ClosedFormCase::EvenEven,
            _ => ClosedFormCase::Otherwise,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            ClosedFormCase::EvenOdd => "n even, l odd",
            ClosedFormCase::EvenEven => "n even, l even",
            ClosedFormCase::Otherwise => "otherwise",
        }
    }
}

/// Closed-form `S_{2s}^T` on a closed manifold of constant curvature
/// `c ≥ 0` and volume `vol` carrying a totally geodesic `F`.
pub fn theorem2_closed_form(n: usize, l: usize, s: usize, c: f64, vol: f64) -> Result<f64> {
    if n < 1 || l < 1 {
        return Err(Error::validation(format!("need n, l ≥ 1, got n = {n}, l = {l}")));
    }
    if s < 1 {
        return Err(Error::validation("need s ≥ 1"));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::validation(format!("curvature must be finite and nonnegative, got {c}")));
    }
    if !vol.is_finite() || vol < 0.0 {
        return Err(Error::validation(format!("volume must be finite and nonnegative, got {vol}")));
    }
    let cs = c.powi(s as i32) * vol;
    let (nf, lf) = (n as f64, l as f64);
    Ok(match ClosedFormCase::of(n, l) {
        ClosedFormCase::EvenOdd => {
            let top = lf + 2.0 * s as f64 - 1.0;
            generalized_binomial(nf / 2.0, s) * generalized_binomial(top, 2 * s) / generalized_binomial(top / 2.0, s)
                * cs
        }
        ClosedFormCase::EvenEven => {
            let fact = |k: usize| (1..=k).fold(1.0, |acc, v| acc * v as f64);
            4f64.powi(s as i32) * fact(s) * fact(s) / fact(2 * s)
                * generalized_binomial(lf / 2.0 + s as f64 - 1.0, s)
                * generalized_binomial(nf / 2.0, s)
                * cs
        }
        ClosedFormCase::Otherwise => 0.0,
    })
}

/// `c(n−r)(l+r) / ((r+1)(r+2))`.
pub fn recurrence_coefficient(n: usize, l: usize, r: usize, c: f64) -> f64 {
    if r > n {
        return 0.0;
    }
    c * (n - r) as f64 * (l + r) as f64 / ((r + 1) * (r + 2)) as f64
}

/// Both totals entering the recurrence and its relative residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecurrenceCheck {
    pub total_r: f64,
    pub total_r_plus_2: f64,
    pub coefficient: f64,
}

impl RecurrenceCheck {
    /// `|S_{r+2}^T − coef · S_r^T| / (1 + |S_r^T|)`.
    pub fn residual(&self) -> f64 {
        (self.total_r_plus_2 - self.coefficient * self.total_r).abs() / (1.0 + self.total_r.abs())
    }
}

/// Evaluates the recurrence from quadrature after checking its hypotheses.
pub fn recurrence_check(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    r: usize,
    res: Resolution,
) -> Result<RecurrenceCheck> {
    if !geom.is_closed() {
        return Err(Error::HypothesisViolation(format!("{} is not a closed manifold", geom.name())));
    }
    if geom.curvature() < 0.0 {
        return Err(Error::HypothesisViolation("curvature must be nonnegative".into()));
    }
    let totals = curvature_totals(geom, dist, &[r, r + 2], res)?;
    if totals.max_totally_geodesic >= TOTALLY_GEODESIC_TOL {
        return Err(Error::HypothesisViolation(format!(
            "F is not totally geodesic: residual {:.3e} at some node",
            totals.max_totally_geodesic
        )));
    }
    let n = geom.dim() - dist.rank();
    Ok(RecurrenceCheck {
        total_r: totals.totals[0],
        total_r_plus_2: totals.totals[1],
        coefficient: recurrence_coefficient(n, dist.rank(), r, geom.curvature()),
    })
}

/// `|S_{r+2}^T − c(n−r)(l+r)/((r+1)(r+2)) · S_r^T| / (1 + |S_r^T|)`.
pub fn corollary1_residual(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    r: usize,
    res: Resolution,
) -> Result<f64> {
    Ok(recurrence_check(geom, dist, r, res)?.residual())
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::chart::{ConstantSpan, FlatTorus, RoundS3, RoundS5, TiltedLine};

    #[test]
    fn closed_form_examples() {
        let v = 7.5;
        assert!((theorem2_closed_form(2, 1, 1, 1.0, v).unwrap() - v).abs() < 1e-14);
        assert!((theorem2_closed_form(4, 1, 1, 1.0, v).unwrap() - 2.0 * v).abs() < 1e-14);
        assert!((theorem2_closed_form(4, 1, 2, 1.0, v).unwrap() - v).abs() < 1e-14);
        assert!((theorem2_closed_form(2, 2, 1, 1.0, v).unwrap() - 2.0 * v).abs() < 1e-14);
        assert_eq!(theorem2_closed_form(3, 2, 1, 1.0, v).unwrap(), 0.0);
        assert_eq!(theorem2_closed_form(4, 1, 1, 0.0, v).unwrap(), 0.0);
        assert_eq!(theorem2_closed_form(2, 1, 2, 1.0, v).unwrap(), 0.0);
    }

    #[test]
    fn closed_form_rejects_invalid_input() {
        assert!(theorem2_closed_form(2, 1, 1, -1.0, 1.0).is_err());
        assert!(theorem2_closed_form(2, 1, 0, 1.0, 1.0).is_err());
        assert!(theorem2_closed_form(0, 1, 1, 1.0, 1.0).is_err());
        assert!(theorem2_closed_form(2, 0, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn closed_form_obeys_recurrence() {
        for n in 1..=10 {
            for l in 1..=6 {
                let mut prev = 1.0;
                for s in 1..=n / 2 + 1 {
                    let cur = theorem2_closed_form(n, l, s, 1.0, 1.0).unwrap();
                    let coef = recurrence_coefficient(n, l, 2 * s - 2, 1.0);
                    if n % 2 == 0 {
                        assert!((cur - coef * prev).abs() < 1e-9 * cur.abs().max(1.0), "n={n} l={l} s={s}");
                    }
                    prev = cur;
                }
            }
        }
    }

    #[test]
    fn generalized_binomials() {
        assert_eq!(generalized_binomial(5.0, 2), 10.0);
        assert_eq!(generalized_binomial(2.0, 3), 0.0);
        assert!((generalized_binomial(1.5, 2) - 0.375).abs() < 1e-15);
        assert_eq!(generalized_binomial(-1.0, 0), 1.0);
    }

    #[test]
    fn hopf_s3_totals() {
        let s3 = RoundS3::default();
        let hopf = ConstantSpan::hopf(3, 2);
        let t = curvature_totals(&s3, &hopf, &[0, 2], Resolution::default()).unwrap();
        let vol = 2.0 * PI * PI;
        assert!((t.total(2).unwrap() / vol - 1.0).abs() < 5e-3);
        assert!(t.max_frame_defect < 1e-10 && t.max_totally_geodesic < 1e-6);
        assert!(corollary1_residual(&s3, &hopf, 0, Resolution::default()).unwrap() < 5e-3);
    }

    #[test]
    fn flat_torus_totals_vanish() {
        let torus = FlatTorus::new(3);
        let f = ConstantSpan::new("z", vec![vec![0.0, 0.0, 1.0]]);
        assert!(total_mean_curvature(&torus, &f, 2, Resolution::from_nodes(8)).unwrap().abs() < 1e-8);
        assert!(corollary1_residual(&torus, &f, 0, Resolution::from_nodes(8)).unwrap() < 1e-8);
    }

    #[test]
    fn tilted_torus_fails_recurrence_hypothesis() {
        let torus = FlatTorus::new(3);
        let res = Resolution::from_nodes(16);
        let err = corollary1_residual(&torus, &TiltedLine { amplitude: 0.3 }, 0, res);
        assert!(matches!(err, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn s5_totals_coarse() {
        let s5 = RoundS5::default();
        let hopf = ConstantSpan::hopf(5, 3);
        let t = curvature_totals(&s5, &hopf, &[2, 4], Resolution::from_nodes(8)).unwrap();
        assert!((t.total(2).unwrap() / (2.0 * PI.powi(3)) - 1.0).abs() < 2e-2);
        assert!((t.total(4).unwrap() / PI.powi(3) - 1.0).abs() < 2e-2);
    }
}
