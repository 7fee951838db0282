//! Adapted orthonormal frames and their connection coefficients.

use nalgebra::{DMatrix, DVector};

use super::chart::{ChartGeometry, DistributionSpec};
use super::connection::{christoffel_at, ensure_interior};
use crate::curvature::{Matrix, ShapeOperatorStack};
use crate::error::{Error, Result};

/// Finite-difference settings for derivatives of frame fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Base step, scaled by `max(1, |x_a|)` on each axis.
    pub step: f64,
    /// Combine steps `h` and `h/2` to cancel the `h²` error term.
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions { step: 1e-5, richardson: false }
    }
}

impl FdOptions {
    pub(crate) fn step_for(&self, coord: f64) -> f64 {
        self.step * coord.abs().max(1.0)
    }

    /// Central-difference derivative of a vector-valued function along a
    /// direction `v` in parameter space (unscaled step).
    pub(crate) fn directional<F>(&self, p: &[f64], v: &[f64], h: f64, f: F) -> Result<Vec<f64>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        let central = |h: f64| -> Result<Vec<f64>> {
            let xp: Vec<f64> = p.iter().zip(v).map(|(a, b)| a + h * b).collect();
            let xm: Vec<f64> = p.iter().zip(v).map(|(a, b)| a - h * b).collect();
            let (fp, fm) = (f(&xp)?, f(&xm)?);
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let d = central(h)?;
        if !self.richardson {
            return Ok(d);
        }
        let d2 = central(h / 2.0)?;
        Ok(d.iter().zip(&d2).map(|(a, b)| (4.0 * b - a) / 3.0).collect())
    }

    /// `∂_a f` for each coordinate `a`.
    pub(crate) fn partials<F>(&self, p: &[f64], f: F) -> Result<Vec<Vec<f64>>>
    where
        F: Fn(&[f64]) -> Result<Vec<f64>>,
    {
        (0..p.len())
            .map(|a| {
                let mut e = vec![0.0; p.len()];
                e[a] = 1.0;
                self.directional(p, &e, self.step_for(p[a]), &f)
            })
            .collect()
    }
}

/// Order in which coordinate vectors seed the Gram–Schmidt completion of
/// `D`. Seeds nearly dependent on earlier vectors are skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameSeeds(Vec<usize>);

impl FrameSeeds {
    pub fn coordinate(m: usize) -> Self {
        FrameSeeds((0..m).collect())
    }

    pub fn reversed(m: usize) -> Self {
        FrameSeeds((0..m).rev().collect())
    }

    pub fn custom(order: Vec<usize>, m: usize) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if sorted != (0..m).collect::<Vec<_>>() {
            return Err(Error::validation(format!("seed order {order:?} is not a permutation of 0..{m}")));
        }
        Ok(FrameSeeds(order))
    }
}

/// A smooth local orthonormal frame, first `n` vectors spanning `D` and the
/// remaining `l` spanning `F`, as coordinate components.
pub trait FrameField: Sync {
    fn geometry(&self) -> &dyn ChartGeometry;

    /// `l = dim F`.
    fn rank(&self) -> usize;

    fn frame(&self, x: &[f64]) -> Result<Vec<DVector<f64>>>;
}

/// The frame obtained from Gram–Schmidt on `F`'s spanning fields followed by
/// seeded completion of `D = F^⊥`.
pub struct GramSchmidtFrame<'a> {
    geom: &'a dyn ChartGeometry,
    dist: &'a dyn DistributionSpec,
    seeds: FrameSeeds,
}

impl<'a> GramSchmidtFrame<'a> {
    pub fn new(geom: &'a dyn ChartGeometry, dist: &'a dyn DistributionSpec) -> Self {
        GramSchmidtFrame { geom, dist, seeds: FrameSeeds::coordinate(geom.dim()) }
    }

    pub fn with_seeds(geom: &'a dyn ChartGeometry, dist: &'a dyn DistributionSpec, seeds: FrameSeeds) -> Self {
        GramSchmidtFrame { geom, dist, seeds }
    }
}

fn inner(g: &DMatrix<f64>, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
    (u.transpose() * g * v)[0]
}

/// Removes the components of `v` along `basis` (two passes) and returns the
/// remaining norm.
fn orthogonalize(g: &DMatrix<f64>, basis: &[DVector<f64>], v: &mut DVector<f64>) -> f64 {
    for _ in 0..2 {
        for b in basis {
            let c = inner(g, b, v);
            *v -= b * c;
        }
    }
    inner(g, v, v).max(0.0).sqrt()
}

impl FrameField for GramSchmidtFrame<'_> {
    fn geometry(&self) -> &dyn ChartGeometry {
        self.geom
    }

    fn rank(&self) -> usize {
        self.dist.rank()
    }

    fn frame(&self, x: &[f64]) -> Result<Vec<DVector<f64>>> {
        let m = self.geom.dim();
        let g = self.geom.metric(x);
        let degenerate = || Error::DegenerateDistribution { point: x.to_vec() };

        let mut f_basis: Vec<DVector<f64>> = Vec::with_capacity(self.dist.rank());
        for mut v in self.dist.spanning_fields(x) {
            if v.len() != m {
                return Err(Error::validation(format!("spanning field has {} components, expected {m}", v.len())));
            }
            let original = inner(&g, &v, &v).max(0.0).sqrt();
            let norm = orthogonalize(&g, &f_basis, &mut v);
            if !norm.is_finite() || norm <= 1e-8 * original.max(1e-300) {
                return Err(degenerate());
            }
            f_basis.push(v / norm);
        }
        let l = f_basis.len();
        let n = m.checked_sub(l).filter(|&n| n > 0).ok_or_else(degenerate)?;

        let mut all = f_basis.clone();
        let mut d_basis = Vec::with_capacity(n);
        for &c in &self.seeds.0 {
            if d_basis.len() == n {
                break;
            }
            let mut v = DVector::zeros(m);
            v[c] = 1.0;
            let original = g[(c, c)].sqrt();
            let norm = orthogonalize(&g, &all, &mut v);
            if norm > 1e-3 * original {
                let e = v / norm;
                all.push(e.clone());
                d_basis.push(e);
            }
        }
        if d_basis.len() < n {
            return Err(degenerate());
        }

        let mut frame: Vec<DVector<f64>> = d_basis.into_iter().chain(f_basis).collect();
        let columns = DMatrix::from_columns(&frame);
        if columns.determinant() < 0.0 {
            frame[n - 1] *= -1.0;
        }
        Ok(frame)
    }
}

/// An adapted frame at a point together with its first-order data.
#[derive(Debug, Clone)]
pub struct AdaptedFramePoint {
    pub point: Vec<f64>,
    pub n: usize,
    pub l: usize,
    /// Coordinate components of `e_1, …, e_m`.
    pub frame: Vec<DVector<f64>>,
    pub stack: ShapeOperatorStack,
    /// `⟨∇_{e_A} e_B, e_C⟩` at `[(A m + B) m + C]`, 0-based.
    connection: Vec<f64>,
    /// `∇_{∂_a} e_B` at `[a m + B]`.
    coordinate_derivatives: Vec<DVector<f64>>,
    metric: DMatrix<f64>,
}

impl AdaptedFramePoint {
    pub fn m(&self) -> usize {
        self.n + self.l
    }

    /// `⟨∇_{e_A} e_B, e_C⟩`, 0-based frame indices.
    pub fn connection(&self, a: usize, b: usize, c: usize) -> f64 {
        let m = self.m();
        self.connection[(a * m + b) * m + c]
    }

    /// `⟨∇_{∂_a} e_B, e_C⟩` for a coordinate direction `a`.
    pub fn coordinate_connection(&self, a: usize, b: usize, c: usize) -> f64 {
        inner(&self.metric, &self.coordinate_derivatives[a * self.m() + b], &self.frame[c])
    }

    /// `max |⟨e_A, e_B⟩ − δ_AB|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.m();
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((inner(&self.metric, &self.frame[a], &self.frame[b]) - target).abs());
            }
        }
        worst
    }

    /// `⟨e_i, e_α⟩` largest in magnitude.
    pub fn mixed_inner_max(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for alpha in self.n..self.m() {
                worst = worst.max(inner(&self.metric, &self.frame[i], &self.frame[alpha]).abs());
            }
        }
        worst
    }

    /// `max |⟨∇_{e_α} e_β, e_i⟩|`.
    pub fn totally_geodesic_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for alpha in self.n..self.m() {
            for beta in self.n..self.m() {
                for i in 0..self.n {
                    worst = worst.max(self.connection(alpha, beta, i).abs());
                }
            }
        }
        worst
    }

    /// `max |⟨∇_{e_A} e_i, e_j⟩|` and `max |⟨∇_{e_A} e_α, e_β⟩|` combined.
    pub fn tangential_connection_max(&self) -> f64 {
        let (n, m) = (self.n, self.m());
        let mut worst: f64 = 0.0;
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    if (b < n) == (c < n) {
                        worst = worst.max(self.connection(a, b, c).abs());
                    }
                }
            }
        }
        worst
    }
}

/// Frame, connection coefficients and shape operators of `field` at `p`.
pub fn frame_point(field: &dyn FrameField, p: &[f64], fd: &FdOptions) -> Result<AdaptedFramePoint> {
    let geom = field.geometry();
    ensure_interior(geom, p)?;
    let m = geom.dim();
    let l = field.rank();
    let n = m - l;
    let frame = field.frame(p)?;
    let flat = |x: &[f64]| -> Result<Vec<f64>> {
        Ok(field.frame(x)?.iter().flat_map(|v| v.iter().copied().collect::<Vec<_>>()).collect())
    };
    let partials = fd.partials(p, flat)?;
    let gamma = christoffel_at(geom, p);
    let metric = geom.metric(p);

    let mut coordinate_derivatives = Vec::with_capacity(m * m);
    for a in 0..m {
        let mut dir = DVector::zeros(m);
        dir[a] = 1.0;
        for b in 0..m {
            // ∂_a e_B from the flattened partials, then add Γ(∂_a, e_B)
            let mut dy = vec![DVector::zeros(m); m];
            dy[a] = DVector::from_fn(m, |k, _| partials[a][b * m + k]);
            coordinate_derivatives.push(gamma.covariant(&dir, &frame[b], &dy));
        }
    }

    let mut connection = vec![0.0; m * m * m];
    for a_frame in 0..m {
        for b in 0..m {
            let mut nabla = DVector::zeros(m);
            for a in 0..m {
                nabla += &coordinate_derivatives[a * m + b] * frame[a_frame][a];
            }
            for c in 0..m {
                connection[(a_frame * m + b) * m + c] = inner(&metric, &nabla, &frame[c]);
            }
        }
    }

    let matrices: Vec<Matrix> =
        (0..l).map(|alpha| Matrix::from_fn(n, |i, j| -connection[(j * m + n + alpha) * m + i])).collect();
    let stack = ShapeOperatorStack::new(matrices)?;
    Ok(AdaptedFramePoint { point: p.to_vec(), n, l, frame, stack, connection, coordinate_derivatives, metric })
}

/// Adapted frame from Gram–Schmidt with coordinate seeds.
pub fn adapted_frame(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, p: &[f64]) -> Result<AdaptedFramePoint> {
    frame_point(&GramSchmidtFrame::new(geom, dist), p, &FdOptions::default())
}

/// `A^α_j^i = −⟨∇_{e_j} e_α, e_i⟩` at `p`.
pub fn shape_operators(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, p: &[f64]) -> Result<ShapeOperatorStack> {
    Ok(adapted_frame(geom, dist, p)?.stack)
}

/// `max |⟨∇_{e_α} e_β, e_i⟩|` at `p`.
pub fn totally_geodesic_residual(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, p: &[f64]) -> Result<f64> {
    Ok(adapted_frame(geom, dist, p)?.totally_geodesic_residual())
}
