//! Pointwise identities: the divergence of `S_{r+1}` and the derivative of
//! the shape operators in a gauge-fixed frame.

use nalgebra::{DMatrix, DVector};

use super::chart::{ChartGeometry, DistributionSpec};
use super::connection::christoffel_at;
use super::frame::{frame_point, AdaptedFramePoint, FdOptions, FrameField, GramSchmidtFrame};
use crate::curvature::{mean_curvature_vector, s_r_direct};
use crate::error::{Error, Result};

/// Largest `|⟨∇_{e_α} e_β, e_i⟩|` accepted as totally geodesic.
pub const TOTALLY_GEODESIC_TOL: f64 = 1e-6;

/// `√g · S_{r+1}` in coordinate components at `x`.
fn weighted_mean_curvature_field(field: &dyn FrameField, r: usize, x: &[f64], fd: &FdOptions) -> Result<Vec<f64>> {
    let fp = frame_point(field, x, fd)?;
    let coeffs = mean_curvature_vector(&fp.stack, r)?.coeffs;
    let rho = field.geometry().volume_density(x);
    let mut v = DVector::zeros(fp.m());
    for (alpha, c) in coeffs.iter().enumerate() {
        v += &fp.frame[fp.n + alpha] * *c;
    }
    Ok(v.iter().map(|c| rho * c).collect())
}

/// `div S_{r+1} = (1/√g) ∂_a(√g S^a_{r+1})` by central differences.
pub fn divergence_with(field: &dyn FrameField, r: usize, p: &[f64], fd: &FdOptions) -> Result<f64> {
    let geom = field.geometry();
    super::connection::ensure_interior(geom, p)?;
    let partials = fd.partials(p, |x| weighted_mean_curvature_field(field, r, x, fd))?;
    let div: f64 = (0..p.len()).map(|a| partials[a][a]).sum();
    Ok(div / geom.volume_density(p))
}

/// Numerical `div S_{r+1}` at `p` in the Gram–Schmidt frame.
pub fn divergence_numeric(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, r: usize, p: &[f64]) -> Result<f64> {
    divergence_with(&GramSchmidtFrame::new(geom, dist), r, p, &FdOptions::default())
}

/// Both sides of the divergence formula at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Theorem3Sample {
    pub divergence: f64,
    /// `−(r+2) S_{r+2} + c(n−r)(l+r)/(r+1) S_r`.
    pub predicted: f64,
    pub totally_geodesic: f64,
}

impl Theorem3Sample {
    pub fn residual(&self) -> f64 {
        (self.divergence - self.predicted).abs()
    }
}

/// Right side of the divergence formula from the pointwise stack.
pub fn theorem3_prediction(fp: &AdaptedFramePoint, c: f64, r: usize) -> Result<f64> {
    let (n, l) = (fp.n, fp.l);
    if r > n {
        return Err(Error::validation(format!("r = {r} exceeds n = {n}")));
    }
    let s_r = s_r_direct(&fp.stack, r)?;
    let s_r2 = if r + 2 > n { 0.0 } else { s_r_direct(&fp.stack, r + 2)? };
    let coef = c * (n - r) as f64 * (l + r) as f64 / (r + 1) as f64;
    Ok(-((r + 2) as f64) * s_r2 + coef * s_r)
}

/// Evaluates both sides after checking that `F` is totally geodesic at `p`.
pub fn theorem3_sample(
    geom: &dyn ChartGeometry,
    dist: &dyn DistributionSpec,
    r: usize,
    p: &[f64],
) -> Result<Theorem3Sample> {
    let field = GramSchmidtFrame::new(geom, dist);
    let fd = FdOptions::default();
    let fp = frame_point(&field, p, &fd)?;
    let tg = fp.totally_geodesic_residual();
    if tg >= TOTALLY_GEODESIC_TOL {
        return Err(Error::HypothesisViolation(format!("F is not totally geodesic at {p:?}: |(∇_F F)^D| = {tg:.3e}")));
    }
    let predicted = theorem3_prediction(&fp, geom.curvature(), r)?;
    let divergence = divergence_with(&field, r, p, &fd)?;
    Ok(Theorem3Sample { divergence, predicted, totally_geodesic: tg })
}

/// `|div S_{r+1} − (−(r+2)S_{r+2} + c(n−r)(l+r)/(r+1)·S_r)|` at `p`.
pub fn theorem3_residual(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, r: usize, p: &[f64]) -> Result<f64> {
    Ok(theorem3_sample(geom, dist, r, p)?.residual())
}

/// `(I − K/2)^{-1} (I + K/2)`, orthogonal for antisymmetric `K`.
fn cayley(k: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = k.nrows();
    let half = k * 0.5;
    let id = DMatrix::identity(dim, dim);
    (&id - &half).lu().solve(&(&id + &half)).expect("I − K/2 is invertible for antisymmetric K")
}

/// The base frame rotated within `D` and within `F` so that the tangential
/// connection coefficients vanish at `p`.
struct GaugedFrame<'a> {
    base: &'a dyn FrameField,
    p: Vec<f64>,
    n: usize,
    /// `C_a[(j, i)] = ⟨∇_{∂_a} e_i, e_j⟩` over `D` and over `F`.
    d_gen: Vec<DMatrix<f64>>,
    f_gen: Vec<DMatrix<f64>>,
}

impl<'a> GaugedFrame<'a> {
    fn new(base: &'a dyn FrameField, at_p: &AdaptedFramePoint) -> Self {
        let (n, l, m) = (at_p.n, at_p.l, at_p.m());
        let block = |off: usize, k: usize| -> Vec<DMatrix<f64>> {
            (0..m)
                .map(|a| {
                    let raw = DMatrix::from_fn(k, k, |j, i| at_p.coordinate_connection(a, off + i, off + j));
                    // exact antisymmetrization removes finite-difference noise
                    (&raw - raw.transpose()) * 0.5
                })
                .collect()
        };
        GaugedFrame { base, p: at_p.point.clone(), n, d_gen: block(0, n), f_gen: block(n, l) }
    }

    fn rotation(&self, gens: &[DMatrix<f64>], x: &[f64]) -> DMatrix<f64> {
        let k = gens[0].nrows();
        let mut kmat = DMatrix::zeros(k, k);
        for (a, c) in gens.iter().enumerate() {
            kmat -= c * (x[a] - self.p[a]);
        }
        cayley(&kmat)
    }
}

impl FrameField for GaugedFrame<'_> {
    fn geometry(&self) -> &dyn ChartGeometry {
        self.base.geometry()
    }

    fn rank(&self) -> usize {
        self.base.rank()
    }

    fn frame(&self, x: &[f64]) -> Result<Vec<DVector<f64>>> {
        let e = self.base.frame(x)?;
        let n = self.n;
        let rd = self.rotation(&self.d_gen, x);
        let rf = self.rotation(&self.f_gen, x);
        let m = e.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..n {
            out.push((0..n).fold(DVector::zeros(m), |acc, k| acc + &e[k] * rd[(k, i)]));
        }
        for alpha in 0..m - n {
            out.push((0..m - n).fold(DVector::zeros(m), |acc, k| acc + &e[n + k] * rf[(k, alpha)]));
        }
        Ok(out)
    }
}

/// Outcome of the shape-operator derivative check at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma2Report {
    /// Largest entry of `|e_α(A^β{}^i_j) − right side|`.
    pub residual: f64,
    /// Largest tangential connection coefficient left after gauge fixing.
    pub gauge_residual: f64,
    /// Largest `|e_α(A^β{}^i_j)|`, for scale.
    pub derivative_max: f64,
}

/// Checks
/// `e_α(A^β{}^i_j) = (A^β A^α)^i_j − ⟨R(e_j,e_α)e_i,e_β⟩
///   + ⟨(∇_{e_α}e_γ)^⊤,e_j⟩⟨e_i,(∇_{e_γ}e_β)^⊤⟩ − ⟨∇_{e_j}(∇_{e_α}e_β)^⊤,e_i⟩`
/// at `p`, with the curvature term `−c δ_ij δ_αβ` of constant curvature.
pub fn lemma2_report(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, p: &[f64]) -> Result<Lemma2Report> {
    let fd = FdOptions { richardson: true, ..FdOptions::default() };
    let base = GramSchmidtFrame::new(geom, dist);
    let at_p = frame_point(&base, p, &fd)?;
    let gauged = GaugedFrame::new(&base, &at_p);
    let fp = frame_point(&gauged, p, &fd)?;
    let (n, l, m) = (fp.n, fp.l, fp.m());
    let c = geom.curvature();

    let stack_entries = |x: &[f64]| -> Result<Vec<f64>> {
        let q = frame_point(&gauged, x, &fd)?;
        Ok(q.stack.matrices().iter().flat_map(|a| a.entries().to_vec()).collect())
    };
    // (∇_{e_α} e_β)^⊤ for every (α, β), flattened
    let tangential_parts = |x: &[f64]| -> Result<Vec<f64>> {
        let q = frame_point(&gauged, x, &fd)?;
        let mut out = Vec::with_capacity(l * l * m);
        for alpha in 0..l {
            for beta in 0..l {
                let y =
                    (0..n).fold(DVector::zeros(m), |acc, k| acc + &q.frame[k] * q.connection(n + alpha, n + beta, k));
                out.extend(y.iter());
            }
        }
        Ok(out)
    };

    let derivatives: Vec<Vec<f64>> = (0..l)
        .map(|alpha| {
            let v: Vec<f64> = fp.frame[n + alpha].iter().copied().collect();
            fd.directional(p, &v, fd.step, stack_entries)
        })
        .collect::<Result<_>>()?;

    let y_here = tangential_parts(p)?;
    let y_partials = fd.partials(p, tangential_parts)?;
    let gamma = christoffel_at(geom, p);
    let g = geom.metric(p);

    let a = fp.stack.matrices();
    let mut residual: f64 = 0.0;
    let mut derivative_max: f64 = 0.0;
    for alpha in 0..l {
        for beta in 0..l {
            let product = a[beta].matmul(&a[alpha]);
            let slot = (alpha * l + beta) * m;
            let y = DVector::from_fn(m, |k, _| y_here[slot + k]);
            let dy: Vec<DVector<f64>> = (0..m).map(|d| DVector::from_fn(m, |k, _| y_partials[d][slot + k])).collect();
            for j in 0..n {
                let nabla_y = gamma.covariant(&fp.frame[j], &y, &dy);
                for i in 0..n {
                    let lhs = derivatives[alpha][(beta * n + i) * n + j];
                    let curvature = if i == j && alpha == beta { c } else { 0.0 };
                    let coupling: f64 =
                        (0..l).map(|gm| fp.connection(n + alpha, n + gm, j) * fp.connection(n + gm, n + beta, i)).sum();
                    let transport = (nabla_y.transpose() * &g * &fp.frame[i])[0];
                    let rhs = product[(i, j)] + curvature + coupling - transport;
                    residual = residual.max((lhs - rhs).abs());
                    derivative_max = derivative_max.max(lhs.abs());
                }
            }
        }
    }
    Ok(Lemma2Report { residual, gauge_residual: fp.tangential_connection_max(), derivative_max })
}

/// Largest entry residual of the shape-operator derivative identity at `p`.
pub fn verify_lemma2(geom: &dyn ChartGeometry, dist: &dyn DistributionSpec, p: &[f64]) -> Result<f64> {
    Ok(lemma2_report(geom, dist, p)?.residual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{ConstantSpan, FlatTorus, RoundS3, RoundS5, TiltedLine};

    #[test]
    fn flat_torus_divergence_and_theorem3_vanish() {
        let torus = FlatTorus::new(3);
        let f = ConstantSpan::new("z", vec![vec![0.0, 0.0, 1.0]]);
        let p = [0.2, 0.7, 0.4];
        for r in [0, 2] {
            assert!(divergence_numeric(&torus, &f, r, &p).unwrap().abs() < 1e-8);
        }
        assert_eq!(theorem3_residual(&torus, &f, 0, &p).unwrap(), 0.0);
    }

    #[test]
    fn hopf_divergence_vanishes() {
        let s3 = RoundS3::default();
        assert!(divergence_numeric(&s3, &ConstantSpan::hopf(3, 2), 0, &[0.5, 1.0, 2.0]).unwrap().abs() < 1e-4);
        let s5 = RoundS5::default();
        let p = [0.6, 0.8, 0.3, 2.0, 4.0];
        assert!(divergence_numeric(&s5, &ConstantSpan::hopf(5, 3), 0, &p).unwrap().abs() < 1e-4);
    }

    #[test]
    fn hopf_theorem3_balances() {
        let s3 = RoundS3::default();
        let t = theorem3_sample(&s3, &ConstantSpan::hopf(3, 2), 0, &[0.9, 0.3, 5.0]).unwrap();
        assert!(t.predicted.abs() < 1e-6 && t.residual() < 1e-3);
        let s5 = RoundS5::default();
        let p = [0.6, 0.8, 0.3, 2.0, 4.0];
        for r in [0, 2] {
            assert!(theorem3_residual(&s5, &ConstantSpan::hopf(5, 3), r, &p).unwrap() < 1e-3);
        }
    }

    #[test]
    fn tilted_line_trips_gate() {
        let torus = FlatTorus::new(3);
        let err = theorem3_residual(&torus, &TiltedLine { amplitude: 0.3 }, 0, &[0.1, 0.2, 0.05]);
        assert!(matches!(err, Err(Error::HypothesisViolation(_))));
    }

    #[test]
    fn lemma2_on_flat_and_hopf() {
        let torus = FlatTorus::new(3);
        let f = ConstantSpan::new("z", vec![vec![0.0, 0.0, 1.0]]);
        let flat = lemma2_report(&torus, &f, &[0.2, 0.3, 0.4]).unwrap();
        assert!(flat.residual < 1e-8 && flat.gauge_residual < 1e-8);

        let s3 = RoundS3::default();
        let hopf = lemma2_report(&s3, &ConstantSpan::hopf(3, 2), &[0.7, 1.0, 2.0]).unwrap();
        assert!(hopf.gauge_residual < 1e-8, "{hopf:?}");
        assert!(hopf.residual < 1e-3, "{hopf:?}");
    }

    #[test]
    fn lemma2_without_geodesic_fibres() {
        // Neither check below is totally geodesic, so all four terms are live.
        let torus = FlatTorus::new(3);
        let tilted = lemma2_report(&torus, &TiltedLine { amplitude: 0.3 }, &[0.1, 0.2, 0.13]).unwrap();
        assert!(tilted.gauge_residual < 1e-8, "{tilted:?}");
        assert!(tilted.residual < 1e-3, "{tilted:?}");

        let s3 = RoundS3::default();
        let skew = ConstantSpan::new("skew", vec![vec![0.3, 1.0, 2.0]]);
        let rep = lemma2_report(&s3, &skew, &[0.6, 1.0, 2.0]).unwrap();
        assert!(rep.gauge_residual < 1e-8, "{rep:?}");
        assert!(rep.residual < 1e-3, "{rep:?}");
        assert!(tilted.derivative_max > 0.1 && rep.derivative_max > 0.1);
    }
}
