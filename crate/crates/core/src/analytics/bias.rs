use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares polynomial of engagement against sentiment score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasFit {
    pub degree: usize,
    /// Ascending powers: `c[0] + c[1] x + c[2] x^2 + ...`.
    pub coefficients: Vec<f64>,
    pub n_points: usize,
    pub rmse: f64,
}

impl BiasFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
}

/// Relative singular-value cutoff below which the design is rank deficient.
const RANK_TOL: f64 = 1e-12;

/// Fit a polynomial of `degree` by least squares (SVD of the Vandermonde
/// design matrix).
pub fn fit_bias_curve(points: &[(f64, f64)], degree: usize) -> Result<BiasFit> {
    let n = points.len();
    let cols = degree + 1;
    if n < cols {
        return Err(Error::Fit(format!(
            "degree {degree} needs at least {cols} points, got {n}"
        )));
    }
    if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::Fit("points must be finite".into()));
    }
    let design = DMatrix::from_fn(n, cols, |i, j| points[i].0.powi(j as i32));
    let target = DVector::from_iterator(n, points.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let max_sv = svd.singular_values.max();
    let min_sv = svd.singular_values.min();
    if max_sv == 0.0 || min_sv <= RANK_TOL * max_sv {
        return Err(Error::Fit(format!(
            "design matrix is rank deficient (singular values {min_sv:e} .. {max_sv:e})"
        )));
    }
    let coef = svd
        .solve(&target, RANK_TOL * max_sv)
        .map_err(|e| Error::Fit(e.to_string()))?;
    let residual = &design * &coef - &target;
    let rmse = (residual.norm_squared() / n as f64).sqrt();
    Ok(BiasFit {
        degree,
        coefficients: coef.iter().copied().collect(),
        n_points: n,
        rmse,
    })
}
