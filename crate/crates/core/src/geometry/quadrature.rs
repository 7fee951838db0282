//! Tensor-product midpoint quadrature over a chart's parameter box.
//!
//! Periodic axes along which the integrand is known to be constant may be
//! collapsed to a single node, which is exact there.
//!
//! Nodes are enumerated in a fixed lexicographic order, evaluated in
//! parallel, and reduced by pairwise summation in that order, so results do
//! not depend on the number of worker threads.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chart::{ChartGeometry, DistributionSpec};
use crate::error::{Error, Result};
use crate::random::trial_rng;

/// Nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub bounded: usize,
    /// The midpoint rule is spectrally accurate on periodic axes, so these
    /// need fewer nodes.
    pub periodic: usize,
}

impl Resolution {
    pub const DEFAULT_NODES: usize = 16;

    /// `nodes` per bounded axis and `⌈nodes/2⌉` per periodic axis.
    pub fn from_nodes(nodes: usize) -> Self {
        let nodes = nodes.max(1);
        Resolution { bounded: nodes, periodic: nodes.div_ceil(2) }
    }

    /// Halves the step on bounded axes.
    pub fn refined(&self) -> Self {
        Resolution { bounded: 2 * self.bounded, periodic: self.periodic }
    }

    fn nodes_for(&self, periodic: bool) -> usize {
        if periodic {
            self.periodic
        } else {
            self.bounded
        }
    }
}

impl Default for Resolution {
    fn default() -> Self {
        Resolution::from_nodes(Self::DEFAULT_NODES)
    }
}

/// A quadrature node and its weight, volume density included.
#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub point: Vec<f64>,
    pub weight: f64,
}

/// Periodic axes along which every quantity derived from the metric and
/// `dist` is constant: the chart translates isometrically along them and
/// the spanning fields do not vary.
pub fn invariant_axes(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec) -> Vec<bool> {
    let iso = geom.isometry_axes();
    geom.domain().iter().enumerate().map(|(a, ax)| ax.periodic && iso.contains(&a) && !dist.depends_on(a)).collect()
}

/// All nodes of the tensor-product midpoint rule, in lexicographic order.
pub fn quadrature_nodes(geom: &dyn ChartGeometry, res: Resolution) -> Result<Vec<Node>> {
    collapsed_nodes(geom, res, &vec![false; geom.dim()])
}

/// Like [`quadrature_nodes`], with one node on every axis marked in
/// `collapse`.
pub fn collapsed_nodes(geom: &dyn ChartGeometry, res: Resolution, collapse: &[bool]) -> Result<Vec<Node>> {
    if res.bounded == 0 || res.periodic == 0 {
        return Err(Error::validation("resolution must be positive"));
    }
    let axes = geom.domain();
    if collapse.len() != axes.len() {
        return Err(Error::validation("collapse mask must have one entry per axis"));
    }
    let counts: Vec<usize> =
        axes.iter().zip(collapse).map(|(ax, &c)| if c { 1 } else { res.nodes_for(ax.periodic) }).collect();
    let total: usize = counts.iter().product();
    let cell: f64 = axes.iter().zip(&counts).map(|(ax, &k)| ax.width() / k as f64).product();
    let nodes = (0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut point = vec![0.0; axes.len()];
            for d in (0..axes.len()).rev() {
                let k = rest % counts[d];
                rest /= counts[d];
                let h = axes[d].width() / counts[d] as f64;
                point[d] = axes[d].lo + (k as f64 + 0.5) * h;
            }
            let weight = cell * geom.volume_density(&point);
            Node { point, weight }
        })
        .collect();
    Ok(nodes)
}

/// Sum in a fixed binary-tree order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len if len <= 8 => values.iter().sum(),
        len => {
            let mid = len / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Evaluates `field` at every node in parallel, keeping node order.
pub fn evaluate_nodes<F>(geom: &dyn ChartGeometry, field: F, res: Resolution) -> Result<(Vec<Node>, Vec<Vec<f64>>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    evaluate_on(quadrature_nodes(geom, res)?, field)
}

/// Evaluates `field` at the given nodes in parallel, keeping their order.
pub fn evaluate_on<F>(nodes: Vec<Node>, field: F) -> Result<(Vec<Node>, Vec<Vec<f64>>)>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let values: Vec<Vec<f64>> = nodes
        .par_iter()
        .map(|node| {
            let v = field(&node.point)?;
            if let Some(&bad) = v.iter().find(|x| !x.is_finite()) {
                return Err(Error::Integration { point: node.point.clone(), value: bad });
            }
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let width = values.first().map_or(0, Vec::len);
    if values.iter().any(|v| v.len() != width) {
        return Err(Error::validation("integrand component count changed between nodes"));
    }
    Ok((nodes, values))
}

/// Weighted pairwise sum of component `c` of per-node values.
pub fn weighted_sum(nodes: &[Node], values: &[Vec<f64>], c: usize) -> f64 {
    let weighted: Vec<f64> = values.iter().zip(nodes).map(|(v, node)| v[c] * node.weight).collect();
    pairwise_sum(&weighted)
}

/// Integrates several scalar fields at once; `field` returns one value per
/// component, the same count at every node.
pub fn integrate_many<F>(geom: &dyn ChartGeometry, field: F, res: Resolution) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let (nodes, values) = evaluate_nodes(geom, field, res)?;
    let width = values.first().map_or(0, Vec::len);
    Ok((0..width).map(|c| weighted_sum(&nodes, &values, c)).collect())
}

/// `∫_M f dvol` over the chart.
pub fn integrate_scalar<F>(geom: &dyn ChartGeometry, field: F, res: Resolution) -> Result<f64>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    Ok(integrate_many(geom, |x| Ok(vec![field(x)]), res)?[0])
}

/// Seeded interior points, kept a fraction `margin` of the axis width away
/// from the ends of bounded axes.
pub fn sample_points(geom: &dyn ChartGeometry, count: usize, seed: u64, margin: f64) -> Vec<Vec<f64>> {
    let mut rng = trial_rng(seed, 0);
    (0..count)
        .map(|_| {
            geom.domain()
                .iter()
                .map(|ax| {
                    let pad = if ax.periodic { 0.0 } else { margin * ax.width() };
                    rng.random_range(ax.lo + pad..ax.hi - pad)
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::geometry::chart::{FlatTorus, RoundS3, RoundS5};

    #[test]
    fn volumes() {
        let res = Resolution::default();
        let torus = integrate_scalar(&FlatTorus::new(3), |_| 1.0, res).unwrap();
        assert!((torus - 1.0).abs() < 1e-10);
        let s3 = integrate_scalar(&RoundS3::default(), |_| 1.0, res).unwrap();
        assert!((s3 / (2.0 * PI * PI) - 1.0).abs() < 2e-3, "{s3}");
        let s5 = integrate_scalar(&RoundS5::default(), |_| 1.0, res).unwrap();
        assert!((s5 / PI.powi(3) - 1.0).abs() < 5e-3, "{s5}");
    }

    #[test]
    fn refinement_reduces_error() {
        let s3 = RoundS3::default();
        let exact = 2.0 * PI * PI;
        let coarse = integrate_scalar(&s3, |_| 1.0, Resolution::default()).unwrap();
        let fine = integrate_scalar(&s3, |_| 1.0, Resolution::default().refined()).unwrap();
        assert!((fine - exact).abs() < (coarse - exact).abs() / 3.0);
    }

    #[test]
    fn non_finite_samples_are_reported() {
        let err = integrate_scalar(
            &FlatTorus::new(2),
            |x| if x[0] > 0.5 { f64::NAN } else { 0.0 },
            Resolution::from_nodes(16),
        );
        assert!(matches!(err, Err(Error::Integration { .. })));
    }

    #[test]
    fn pairwise_sum_of_many_terms() {
        let v = vec![0.1; 1000];
        assert!((pairwise_sum(&v) - 100.0).abs() < 1e-12);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn samples_are_interior_and_reproducible() {
        let s5 = RoundS5::default();
        let a = sample_points(&s5, 50, 3, 0.05);
        assert_eq!(a, sample_points(&s5, 50, 3, 0.05));
        assert!(a.iter().all(|p| s5.contains(p)));
    }
}
