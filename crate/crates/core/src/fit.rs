//! Least-squares fit of `eps(alpha) = C alpha^(d-2) (alpha^2 + a1 alpha + a2 + a3/alpha)`
//! for total complex dimension `d`.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};

/// Largest accepted condition number of the column-scaled design matrix.
pub const MAX_CONDITION: f64 = 1e10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpansionFit {
    pub alphas: Vec<f64>,
    pub values: Vec<f64>,
    pub c: f64,
    pub a1_hat: f64,
    pub a2_hat: f64,
    pub a3_hat: f64,
    /// Root-mean-square relative residual of the fitted model.
    pub residual: f64,
    pub condition: f64,
}

/// Fit for total complex dimension 2.
pub fn fit_expansion(alphas: &[f64], values: &[f64]) -> Result<ExpansionFit> {
    fit_expansion_dim(alphas, values, 2)
}

pub fn fit_expansion_dim(alphas: &[f64], values: &[f64], dim: u32) -> Result<ExpansionFit> {
    if alphas.len() != values.len() {
        return Err(Error::Fit("alphas and values differ in length".into()));
    }
    let mut sorted = alphas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < 5 {
        return Err(Error::Fit("need at least 5 distinct alpha values".into()));
    }
    if alphas.iter().any(|&a| !(a > 0.0)) || values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Fit("alphas must be positive and values finite".into()));
    }
    // Rows are divided by alpha^dim so every sample has relative weight.
    let m = alphas.len();
    let mut a = DMatrix::from_fn(m, 4, |i, j| alphas[i].powi(-(j as i32)));
    let b = DVector::from_fn(m, |i, _| values[i] / alphas[i].powi(dim as i32));
    let norms: Vec<f64> = (0..4).map(|j| a.column(j).norm()).collect();
    for (j, nj) in norms.iter().enumerate() {
        a.column_mut(j).scale_mut(1.0 / nj);
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = smax / smin;
    if !(condition < MAX_CONDITION) {
        return Err(Error::Fit(format!("design matrix is ill-conditioned ({condition:e}); use a wider alpha spread")));
    }
    let x = svd.solve(&b, 1e-14 * smax).map_err(|e| Error::Fit(e.to_string()))?;
    let coef: Vec<f64> = (0..4).map(|j| x[j] / norms[j]).collect();
    let r = &a * &x - &b;
    let residual = (r.iter().zip(b.iter()).map(|(ri, bi)| (ri / bi).powi(2)).sum::<f64>() / m as f64).sqrt();
    let c = coef[0];
    Ok(ExpansionFit {
        alphas: alphas.to_vec(),
        values: values.to_vec(),
        c,
        a1_hat: coef[1] / c,
        a2_hat: coef[2] / c,
        a3_hat: coef[3] / c,
        residual,
        condition,
    })
}
