//! Christoffel symbols and the Riemann tensor on a chart.

use nalgebra::DVector;

use super::chart::ChartGeometry;
use crate::error::{Error, Result};

/// `Γ^k_{ij}` with `∇_{∂_i} ∂_j = Γ^k_{ij} ∂_k`, indices 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    m: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.m + i) * self.m + j]
    }

    /// `∇_X Y` at a point where `dy[a]` holds `∂_a Y`.
    pub(crate) fn covariant(&self, x: &DVector<f64>, y: &DVector<f64>, dy: &[DVector<f64>]) -> DVector<f64> {
        let m = self.m;
        DVector::from_fn(m, |k, _| {
            let mut acc = 0.0;
            for a in 0..m {
                if x[a] == 0.0 {
                    continue;
                }
                let mut inner = dy[a][k];
                for b in 0..m {
                    inner += self.get(k, a, b) * y[b];
                }
                acc += x[a] * inner;
            }
            acc
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn ensure_interior(geom: &dyn ChartGeometry, p: &[f64]) -> Result<()> {
    if geom.contains(p) {
        Ok(())
    } else {
        Err(Error::Domain { point: p.to_vec() })
    }
}

/// Christoffel symbols from the chart's metric partials.
pub fn christoffel(geom: &dyn ChartGeometry, p: &[f64]) -> Result<Christoffel> {
    ensure_interior(geom, p)?;
    Ok(christoffel_at(geom, p))
}

pub(crate) fn christoffel_at(geom: &dyn ChartGeometry, p: &[f64]) -> Christoffel {
    let m = geom.dim();
    let g = geom.metric(p);
    let ginv = g.clone().try_inverse().unwrap_or_else(|| g.pseudo_inverse(0.0).unwrap());
    let dg = geom.metric_partials(p);
    let mut data = vec![0.0; m * m * m];
    for i in 0..m {
        for j in i..m {
            // lowered symbol Γ_{l,ij}
            let lowered: Vec<f64> = (0..m).map(|l| 0.5 * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])).collect();
            for k in 0..m {
                let v: f64 = (0..m).map(|l| ginv[(k, l)] * lowered[l]).sum();
                data[(k * m + i) * m + j] = v;
                data[(k * m + j) * m + i] = v;
            }
        }
    }
    Christoffel { m, data }
}

/// `R^l_{kij}` with `R(∂_i, ∂_j) ∂_k = R^l_{kij} ∂_l`, where
/// `R(X,Y) = ∇_X ∇_Y − ∇_Y ∇_X − ∇_{[X,Y]}`.
#[derive(Debug, Clone)]
pub struct Riemann {
    m: usize,
    data: Vec<f64>,
}

impl Riemann {
    pub fn get(&self, l: usize, k: usize, i: usize, j: usize) -> f64 {
        let m = self.m;
        self.data[((l * m + k) * m + i) * m + j]
    }
}

/// Riemann tensor from differences of the Christoffel symbols.
pub fn riemann(geom: &dyn ChartGeometry, p: &[f64], step: f64) -> Result<Riemann> {
    ensure_interior(geom, p)?;
    let m = geom.dim();
    let gamma = christoffel_at(geom, p);
    // Richardson-extrapolated central differences
    let d_gamma: Vec<Christoffel> = (0..m)
        .map(|a| {
            let central = |h: f64| -> Vec<f64> {
                let mut xp = p.to_vec();
                let mut xm = p.to_vec();
                xp[a] += h;
                xm[a] -= h;
                let (gp, gm) = (christoffel_at(geom, &xp), christoffel_at(geom, &xm));
                gp.data.iter().zip(&gm.data).map(|(u, v)| (u - v) / (2.0 * h)).collect()
            };
            let h = step * p[a].abs().max(1.0);
            let (coarse, fine) = (central(h), central(h / 2.0));
            let data = coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
            Christoffel { m, data }
        })
        .collect();
    let mut data = vec![0.0; m * m * m * m];
    for l in 0..m {
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let mut v = d_gamma[i].get(l, j, k) - d_gamma[j].get(l, i, k);
                    for q in 0..m {
                        v += gamma.get(l, i, q) * gamma.get(q, j, k) - gamma.get(l, j, q) * gamma.get(q, i, k);
                    }
                    data[((l * m + k) * m + i) * m + j] = v;
                }
            }
        }
    }
    Ok(Riemann { m, data })
}

/// `K(X, Y) = ⟨R(X,Y)Y, X⟩ / (|X|²|Y|² − ⟨X,Y⟩²)` from the numerical
/// Riemann tensor.
pub fn sectional_curvature(
    geom: &dyn ChartGeometry,
    p: &[f64],
    x: &DVector<f64>,
    y: &DVector<f64>,
    step: f64,
) -> Result<f64> {
    let m = geom.dim();
    if x.len() != m || y.len() != m {
        return Err(Error::validation(format!("plane vectors must have {m} components")));
    }
    let rm = riemann(geom, p, step)?;
    let g = geom.metric(p);
    let mut ryyx = DVector::zeros(m);
    for l in 0..m {
        let mut v = 0.0;
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    v += rm.get(l, k, i, j) * x[i] * y[j] * y[k];
                }
            }
        }
        ryyx[l] = v;
    }
    let num = (x.transpose() * &g * ryyx)[0];
    let xx = (x.transpose() * &g * x)[0];
    let yy = (y.transpose() * &g * y)[0];
    let xy = (x.transpose() * &g * y)[0];
    let den = xx * yy - xy * xy;
    if den <= 1e-14 * xx * yy {
        return Err(Error::validation("plane vectors are linearly dependent"));
    }
    Ok(num / den)
}

/// Largest `|K − c|` over all coordinate 2-planes at `p`.
pub fn sectional_curvature_residual(geom: &dyn ChartGeometry, p: &[f64], step: f64) -> Result<f64> {
    let m = geom.dim();
    let c = geom.curvature();
    let mut worst: f64 = 0.0;
    for a in 0..m {
        for b in a + 1..m {
            let ea = DVector::from_fn(m, |k, _| f64::from(u8::from(k == a)));
            let eb = DVector::from_fn(m, |k, _| f64::from(u8::from(k == b)));
            // a tilted pair as well, so mixed components are exercised
            let tilt = &ea + &eb * 0.5;
            worst = worst.max((sectional_curvature(geom, p, &ea, &eb, step)? - c).abs());
            worst = worst.max((sectional_curvature(geom, p, &tilt, &eb, step)? - c).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::chart::{FlatTorus, RoundS3, RoundS5};

    #[test]
    fn flat_torus_symbols_vanish() {
        let g = christoffel(&FlatTorus::new(3), &[0.2, 0.5, 0.9]).unwrap();
        assert_eq!(g.max_abs(), 0.0);
    }

    #[test]
    fn torsion_free_symmetry_is_exact() {
        let g = christoffel(&RoundS5::default(), &[0.4, 0.8, 1.0, 2.0, 3.0]).unwrap();
        for k in 0..5 {
            for i in 0..5 {
                for j in 0..5 {
                    assert_eq!(g.get(k, i, j), g.get(k, j, i));
                }
            }
        }
    }

    #[test]
    fn s3_hopf_chart_symbols() {
        // Γ^η_{ξ1ξ1} = cos η sin η, Γ^{ξ1}_{η ξ1} = −tan η
        let eta: f64 = 0.6;
        let g = christoffel(&RoundS3::default(), &[eta, 0.0, 0.0]).unwrap();
        assert!((g.get(0, 1, 1) - eta.cos() * eta.sin()).abs() < 1e-14);
        assert!((g.get(1, 0, 1) + eta.tan()).abs() < 1e-14);
    }

    #[test]
    fn round_spheres_have_unit_sectional_curvature() {
        let s3 = RoundS3::default();
        for p in [[0.3, 1.0, 2.0], [1.1, 4.0, 0.5]] {
            assert!(sectional_curvature_residual(&s3, &p, 1e-4).unwrap() < 1e-6);
        }
        let s5 = RoundS5::default();
        let p = [0.7, 0.9, 0.1, 2.2, 4.0];
        assert!(sectional_curvature_residual(&s5, &p, 1e-4).unwrap() < 1e-6);
    }

    #[test]
    fn outside_domain_is_rejected() {
        assert!(matches!(christoffel(&RoundS3::default(), &[2.0, 0.0, 0.0]), Err(Error::Domain { .. })));
    }
}
