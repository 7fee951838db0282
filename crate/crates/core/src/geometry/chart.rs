//! Coordinate charts with closed-form metrics, and the spanning fields of
//! the distribution `F`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};

/// One coordinate axis of a chart's parameter box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    /// Periodic axes are identified end to end.
    pub periodic: bool,
}

impl Axis {
    pub const fn bounded(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: false }
    }

    pub const fn periodic(lo: f64, hi: f64) -> Self {
        Axis { lo, hi, periodic: true }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// A Riemannian manifold of constant sectional curvature given on one chart
/// that covers it up to a set of measure zero.
pub trait ChartGeometry: Send + Sync {
    fn name(&self) -> &str;

    /// The ambient dimension `m`.
    fn dim(&self) -> usize;

    fn domain(&self) -> &[Axis];

    /// Metric components `g_{ab}` at a parameter point.
    fn metric(&self, x: &[f64]) -> DMatrix<f64>;

    /// `∂_c g_{ab}` for each coordinate `c`; central differences unless the
    /// chart supplies closed forms.
    fn metric_partials(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let h = 1e-5;
        (0..self.dim())
            .map(|c| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[c] += h;
                xm[c] -= h;
                (self.metric(&xp) - self.metric(&xm)) / (2.0 * h)
            })
            .collect()
    }

    /// `√det g`.
    fn volume_density(&self, x: &[f64]) -> f64 {
        self.metric(x).determinant().sqrt()
    }

    /// The sectional curvature constant `c`, an input rather than inferred.
    fn curvature(&self) -> f64;

    /// Exact total volume, when known in closed form.
    fn known_volume(&self) -> Option<f64> {
        None
    }

    /// `true` when the chart interior is the whole manifold up to measure
    /// zero, so integrals over the box are integrals over a closed manifold.
    fn is_closed(&self) -> bool {
        true
    }

    /// Coordinates the metric does not depend on, so that translating along
    /// them is an isometry.
    fn isometry_axes(&self) -> Vec<usize> {
        Vec::new()
    }

    /// Whether `x` lies in the chart (open on bounded axes).
    fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.domain())
                .all(|(&v, ax)| v.is_finite() && if ax.periodic { true } else { v > ax.lo && v < ax.hi })
    }
}

/// Spanning vector fields of `F`, in coordinate components.
pub trait DistributionSpec: Send + Sync {
    fn name(&self) -> &str;

    /// `l = dim F`.
    fn rank(&self) -> usize;

    fn spanning_fields(&self, x: &[f64]) -> Vec<DVector<f64>>;

    /// Whether the coordinate components of the spanning fields vary with
    /// coordinate `axis`.
    fn depends_on(&self, axis: usize) -> bool {
        let _ = axis;
        true
    }
}

/// The unit cube `[0,1]^m` with the Euclidean metric and periodic
/// identification.
#[derive(Debug, Clone)]
pub struct FlatTorus {
    axes: Vec<Axis>,
}

impl FlatTorus {
    pub fn new(m: usize) -> Self {
        FlatTorus { axes: vec![Axis::periodic(0.0, 1.0); m] }
    }
}

impl ChartGeometry for FlatTorus {
    fn name(&self) -> &str {
        "flat-torus"
    }

    fn dim(&self) -> usize {
        self.axes.len()
    }

    fn domain(&self) -> &[Axis] {
        &self.axes
    }

    fn metric(&self, _x: &[f64]) -> DMatrix<f64> {
        DMatrix::identity(self.dim(), self.dim())
    }

    fn metric_partials(&self, _x: &[f64]) -> Vec<DMatrix<f64>> {
        vec![DMatrix::zeros(self.dim(), self.dim()); self.dim()]
    }

    fn volume_density(&self, _x: &[f64]) -> f64 {
        1.0
    }

    fn curvature(&self) -> f64 {
        0.0
    }

    fn known_volume(&self) -> Option<f64> {
        Some(1.0)
    }

    fn isometry_axes(&self) -> Vec<usize> {
        (0..self.axes.len()).collect()
    }
}

/// Unit `S³ ⊂ C²` in Hopf coordinates `(η, ξ₁, ξ₂)`,
/// `z = (cos η e^{iξ₁}, sin η e^{iξ₂})`, with metric
/// `dη² + cos²η dξ₁² + sin²η dξ₂²`.
#[derive(Debug, Clone)]
pub struct RoundS3 {
    axes: [Axis; 3],
}

impl Default for RoundS3 {
    fn default() -> Self {
        RoundS3 { axes: [Axis::bounded(0.0, PI / 2.0), Axis::periodic(0.0, TAU), Axis::periodic(0.0, TAU)] }
    }
}

impl ChartGeometry for RoundS3 {
    fn name(&self) -> &str {
        "round-s3"
    }

    fn dim(&self) -> usize {
        3
    }

    fn domain(&self) -> &[Axis] {
        &self.axes
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let (s, c) = x[0].sin_cos();
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, c * c, s * s]))
    }

    fn metric_partials(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let (s, c) = x[0].sin_cos();
        let d_eta = DMatrix::from_diagonal(&DVector::from_vec(vec![0.0, -2.0 * c * s, 2.0 * s * c]));
        vec![d_eta, DMatrix::zeros(3, 3), DMatrix::zeros(3, 3)]
    }

    fn volume_density(&self, x: &[f64]) -> f64 {
        let (s, c) = x[0].sin_cos();
        c * s
    }

    fn curvature(&self) -> f64 {
        1.0
    }

    fn known_volume(&self) -> Option<f64> {
        Some(2.0 * PI * PI)
    }

    fn isometry_axes(&self) -> Vec<usize> {
        vec![1, 2]
    }
}

/// Unit `S⁵ ⊂ C³` with `z_k = μ_k e^{iξ_k}`, where
/// `μ = (cos η₁, sin η₁ cos η₂, sin η₁ sin η₂)` lies on the positive octant
/// of `S²`. Coordinates are `(η₁, η₂, ξ₁, ξ₂, ξ₃)` and the metric is
/// `dη₁² + sin²η₁ dη₂² + Σ μ_k² dξ_k²`.
#[derive(Debug, Clone)]
pub struct RoundS5 {
    axes: [Axis; 5],
}

impl Default for RoundS5 {
    fn default() -> Self {
        RoundS5 {
            axes: [
                Axis::bounded(0.0, PI / 2.0),
                Axis::bounded(0.0, PI / 2.0),
                Axis::periodic(0.0, TAU),
                Axis::periodic(0.0, TAU),
                Axis::periodic(0.0, TAU),
            ],
        }
    }
}

impl ChartGeometry for RoundS5 {
    fn name(&self) -> &str {
        "round-s5"
    }

    fn dim(&self) -> usize {
        5
    }

    fn domain(&self) -> &[Axis] {
        &self.axes
    }

    fn metric(&self, x: &[f64]) -> DMatrix<f64> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let mu = [c1, s1 * c2, s1 * s2];
        DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, s1 * s1, mu[0] * mu[0], mu[1] * mu[1], mu[2] * mu[2]]))
    }

    fn metric_partials(&self, x: &[f64]) -> Vec<DMatrix<f64>> {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let diag = |v: Vec<f64>| DMatrix::from_diagonal(&DVector::from_vec(v));
        let d1 = diag(vec![0.0, 2.0 * s1 * c1, -2.0 * c1 * s1, 2.0 * s1 * c1 * c2 * c2, 2.0 * s1 * c1 * s2 * s2]);
        let d2 = diag(vec![0.0, 0.0, 0.0, -2.0 * s1 * s1 * c2 * s2, 2.0 * s1 * s1 * s2 * c2]);
        vec![d1, d2, DMatrix::zeros(5, 5), DMatrix::zeros(5, 5), DMatrix::zeros(5, 5)]
    }

    fn volume_density(&self, x: &[f64]) -> f64 {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        s1 * c1 * (s1 * c2) * (s1 * s2)
    }

    fn curvature(&self) -> f64 {
        1.0
    }

    fn known_volume(&self) -> Option<f64> {
        Some(PI * PI * PI)
    }

    fn isometry_axes(&self) -> Vec<usize> {
        vec![2, 3, 4]
    }
}

/// `F` spanned by fields with constant coordinate components.
#[derive(Debug, Clone)]
pub struct ConstantSpan {
    name: String,
    vectors: Vec<DVector<f64>>,
}

impl ConstantSpan {
    pub fn new(name: impl Into<String>, vectors: Vec<Vec<f64>>) -> Self {
        ConstantSpan { name: name.into(), vectors: vectors.into_iter().map(DVector::from_vec).collect() }
    }

    /// The Hopf field `Σ_k ∂_{ξ_k}` on a chart whose last `k` coordinates
    /// are the fiber angles.
    pub fn hopf(m: usize, fiber_angles: usize) -> Self {
        let mut v = vec![0.0; m];
        for c in &mut v[m - fiber_angles..] {
            *c = 1.0;
        }
        ConstantSpan::new("hopf", vec![v])
    }
}

impl DistributionSpec for ConstantSpan {
    fn name(&self) -> &str {
        &self.name
    }

    fn rank(&self) -> usize {
        self.vectors.len()
    }

    fn spanning_fields(&self, _x: &[f64]) -> Vec<DVector<f64>> {
        self.vectors.clone()
    }

    fn depends_on(&self, _axis: usize) -> bool {
        false
    }
}

/// On the flat 3-torus, the unit field `(sin θ(z), 0, cos θ(z))` with
/// `θ(z) = a sin(2πz)`. Its integral curves bend, so it is not totally
/// geodesic for `a ≠ 0`.
#[derive(Debug, Clone)]
pub struct TiltedLine {
    pub amplitude: f64,
}

impl DistributionSpec for TiltedLine {
    fn name(&self) -> &str {
        "tilted"
    }

    fn rank(&self) -> usize {
        1
    }

    fn spanning_fields(&self, x: &[f64]) -> Vec<DVector<f64>> {
        let theta = self.amplitude * (TAU * x[2]).sin();
        vec![DVector::from_vec(vec![theta.sin(), 0.0, theta.cos()])]
    }

    fn depends_on(&self, axis: usize) -> bool {
        axis == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_partials(chart: &dyn ChartGeometry, x: &[f64]) {
        let closed = chart.metric_partials(x);
        let h = 1e-6;
        for (c, d) in closed.iter().enumerate() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            let fd = (chart.metric(&xp) - chart.metric(&xm)) / (2.0 * h);
            assert!((d - fd).amax() < 1e-8, "{} partial {c}", chart.name());
        }
    }

    #[test]
    fn closed_form_partials_match_differences() {
        check_partials(&RoundS3::default(), &[0.7, 1.0, 2.0]);
        check_partials(&RoundS5::default(), &[0.4, 1.1, 0.3, 2.0, 5.0]);
        check_partials(&FlatTorus::new(3), &[0.1, 0.2, 0.3]);
    }

    #[test]
    fn densities_match_sqrt_det() {
        for (chart, x) in [
            (&RoundS3::default() as &dyn ChartGeometry, vec![0.3, 0.1, 0.2]),
            (&RoundS5::default(), vec![0.9, 0.5, 0.1, 0.2, 0.3]),
        ] {
            let det = chart.metric(&x).determinant().sqrt();
            assert!((chart.volume_density(&x) - det).abs() < 1e-14);
        }
    }

    #[test]
    fn hopf_field_is_unit() {
        let f = ConstantSpan::hopf(5, 3);
        let g = RoundS5::default().metric(&[0.9, 0.5, 0.1, 0.2, 0.3]);
        let v = &f.spanning_fields(&[])[0];
        assert!(((v.transpose() * &g * v)[0] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn domain_membership() {
        let s3 = RoundS3::default();
        assert!(s3.contains(&[0.5, 10.0, -3.0]));
        assert!(!s3.contains(&[0.0, 1.0, 1.0]));
        assert!(!s3.contains(&[0.5, 1.0]));
    }
}
