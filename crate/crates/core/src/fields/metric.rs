use std::sync::Arc;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

use super::form::map_points;

pub type MetricFn = Arc<dyn Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync>;

/// Default tolerance for curvature checks.
pub const DEFAULT_CURVATURE_TOL: f64 = 1e-5;

/// A field of symmetric bilinear forms on an open set of ℝⁿ.
#[derive(Clone)]
pub struct MetricField {
    dim: usize,
    eval: MetricFn,
}

impl std::fmt::Debug for MetricField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "MetricField(dim {})", self.dim)
    }
}

/// `Γ[k][i][j] = Γ^k_{ij}`.
pub type Christoffel = Vec<Vec<Vec<f64>>>;
/// `R[l][k][i][j] = R^l_{kij}`.
pub type Riemann = Vec<Vec<Vec<Vec<f64>>>>;

impl MetricField {
    pub fn new(dim: usize, eval: impl Fn(&[f64]) -> Result<DMatrix<f64>> + Send + Sync + 'static) -> Self {
        Self { dim, eval: Arc::new(eval) }
    }

    pub fn constant(g: DMatrix<f64>) -> Self {
        Self::new(g.nrows(), move |_| Ok(g.clone()))
    }

    /// `x ↦ J(x)ᵀ g₀ J(x)`, the pullback of a constant metric.
    pub fn pullback_constant(g0: DMatrix<f64>, jac: impl Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static) -> Self {
        Self::new(g0.nrows(), move |x| {
            let j = jac(x);
            Ok(j.transpose() * &g0 * j)
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn at(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        if x.len() != self.dim {
            return Err(Error::Invalid(format!("point of dimension {} for a {}-dim metric", x.len(), self.dim)));
        }
        let g = (self.eval)(x)?;
        if g.nrows() != self.dim || g.ncols() != self.dim || g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("metric evaluation failed at {x:?}")));
        }
        Ok(g)
    }

    fn partials(&self, x: &[f64], h: f64) -> Result<Vec<DMatrix<f64>>> {
        (0..self.dim)
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                Ok((self.at(&xp)? - self.at(&xm)?) / (2.0 * h))
            })
            .collect()
    }

    /// `Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})`.
    pub fn christoffel(&self, x: &[f64], h: f64) -> Result<Christoffel> {
        let n = self.dim;
        let ginv = self.at(x)?.try_inverse().ok_or(Error::Singular)?;
        let dg = self.partials(x, h)?;
        let mut gam = vec![vec![vec![0.0; n]; n]; n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let v: f64 =
                        (0..n).map(|l| ginv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)])).sum::<f64>()
                            * 0.5;
                    gam[k][i][j] = v;
                    gam[k][j][i] = v;
                }
            }
        }
        Ok(gam)
    }

    /// `R^l_{kij} = ∂_iΓ^l_{jk} − ∂_jΓ^l_{ik} + Γ^l_{im}Γ^m_{jk} − Γ^l_{jm}Γ^m_{ik}`.
    pub fn riemann(&self, x: &[f64], h: f64) -> Result<Riemann> {
        let n = self.dim;
        let gam = self.christoffel(x, h)?;
        let dgam: Vec<Christoffel> = (0..n)
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                let (gp, gm) = (self.christoffel(&xp, h)?, self.christoffel(&xm, h)?);
                Ok((0..n)
                    .map(|a| {
                        (0..n).map(|b| (0..n).map(|c| (gp[a][b][c] - gm[a][b][c]) / (2.0 * h)).collect()).collect()
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        let mut r = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for l in 0..n {
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        let quad: f64 = (0..n).map(|m| gam[l][i][m] * gam[m][j][k] - gam[l][j][m] * gam[m][i][k]).sum();
                        r[l][k][i][j] = dgam[i][l][j][k] - dgam[j][l][i][k] + quad;
                    }
                }
            }
        }
        Ok(r)
    }

    /// `R_{lkij} = g_{lm} R^m_{kij}`.
    pub fn riemann_lowered(&self, x: &[f64], h: f64) -> Result<Riemann> {
        let n = self.dim;
        let g = self.at(x)?;
        let r = self.riemann(x, h)?;
        Ok((0..n)
            .map(|l| {
                (0..n)
                    .map(|k| {
                        (0..n)
                            .map(|i| (0..n).map(|j| (0..n).map(|m| g[(l, m)] * r[m][k][i][j]).sum()).collect())
                            .collect()
                    })
                    .collect()
            })
            .collect())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlatnessReport {
    pub checked: usize,
    pub max_curvature: f64,
    pub h: f64,
    pub tol: f64,
    pub pass: bool,
}

/// Flat iff every `|R^l_{kij}| ≤ tol` at every point.
pub fn flatness_check(g: &MetricField, points: &[Vec<f64>], h: f64, tol: f64) -> Result<FlatnessReport> {
    let maxes = map_points(points, false, |x| -> Result<f64> {
        let r = g.riemann(x, h)?;
        Ok(r.iter().flatten().flatten().flatten().fold(0.0f64, |m, v| m.max(v.abs())))
    });
    let mut max_curvature = 0.0f64;
    for m in maxes {
        max_curvature = max_curvature.max(m?);
    }
    Ok(FlatnessReport { checked: points.len(), max_curvature, h, tol, pass: max_curvature <= tol })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_metric_is_exactly_flat() {
        let g = MetricField::constant(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, -2.0, 3.0])));
        let r = g.riemann(&[0.3, 0.1, 7.0], 1e-4).unwrap();
        assert!(r.iter().flatten().flatten().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn sphere_curvature() {
        let g = MetricField::new(2, |x| Ok(DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)])));
        for t in [0.4, 1.0, 2.0] {
            let r = g.riemann_lowered(&[t, 0.3], 1e-4).unwrap();
            let expect = t.sin().powi(2);
            assert!((r[0][1][0][1] - expect).abs() < 1e-4 * expect.max(1.0), "{} vs {expect}", r[0][1][0][1]);
        }
    }

    #[test]
    fn singular_metric_errors() {
        let g = MetricField::constant(DMatrix::zeros(2, 2));
        assert!(matches!(g.christoffel(&[0.0, 0.0], 1e-4), Err(Error::Singular)));
    }
}
