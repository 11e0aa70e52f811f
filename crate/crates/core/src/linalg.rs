//! Small dense least-squares helper shared by the membership fit and the
//! drift diagnostics.

use nalgebra::{DMatrix, DVector};

use crate::error::Error;

#[derive(Debug, Clone)]
pub struct LstsqSolution {
    /// Coefficients in the caller's (unscaled) column units.
    pub coefficients: Vec<f64>,
    /// `(s_max / s_min)^2` of the column-scaled design, i.e. the condition
    /// number of the scaled normal system.
    pub normal_condition: f64,
}

/// Column-scaled, Tikhonov-regularised least squares via SVD.
///
/// Columns are scaled to unit 2-norm. The ridge is expressed in singular
/// value units: with `rho = ridge_factor * s_max` each component is filtered
/// by `s / (s^2 + rho^2)`. Columns that are identically zero are left with a
/// zero coefficient.
pub fn scaled_ridge_lstsq(
    rows: &[Vec<f64>],
    rhs: &[f64],
    ridge_factor: f64,
) -> Result<LstsqSolution, Error> {
    let n_rows = rows.len();
    let n_cols = rows.first().map_or(0, Vec::len);
    if n_rows < n_cols || n_cols == 0 || rhs.len() != n_rows {
        return Err(Error::Invalid(format!(
            "least squares needs at least as many rows ({n_rows}) as columns ({n_cols})"
        )));
    }
    let mut x = DMatrix::from_fn(n_rows, n_cols, |i, j| rows[i][j]);
    let norms: Vec<f64> = (0..n_cols).map(|j| x.column(j).norm()).collect();
    for (j, &nrm) in norms.iter().enumerate() {
        if nrm > 0.0 {
            x.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
    let y = DVector::from_column_slice(rhs);
    let svd = x.svd(true, true);
    let (u, v_t) = match (svd.u, svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => return Err(Error::Invalid("SVD did not converge".into())),
    };
    let s = &svd.singular_values;
    let s_max = s.max();
    let s_min = s.min();
    let normal_condition = if s_min > 0.0 {
        (s_max / s_min).powi(2)
    } else {
        f64::INFINITY
    };
    let ridge = (ridge_factor * s_max).powi(2);
    let uty = u.transpose() * &y;
    let mut c = DVector::zeros(n_cols);
    for i in 0..s.len() {
        let si = s[i];
        if si > 0.0 {
            let w = si / (si * si + ridge);
            c += v_t.row(i).transpose() * (w * uty[i]);
        }
    }
    let coefficients = (0..n_cols)
        .map(|j| if norms[j] > 0.0 { c[j] / norms[j] } else { 0.0 })
        .collect();
    Ok(LstsqSolution {
        coefficients,
        normal_condition,
    })
}

/// `sqrt(mean(r^2)) / sqrt(mean(y^2))` for residuals of `coefficients` on
/// the given rows; falls back to the absolute rms when `y` vanishes.
pub fn relative_rms(rows: &[Vec<f64>], rhs: &[f64], coefficients: &[f64]) -> f64 {
    let mut sum_r = 0.0;
    let mut sum_y = 0.0;
    for (row, &y) in rows.iter().zip(rhs) {
        let fit: f64 = row.iter().zip(coefficients).map(|(a, c)| a * c).sum();
        sum_r += (fit - y).powi(2);
        sum_y += y * y;
    }
    if sum_y > 0.0 {
        (sum_r / sum_y).sqrt()
    } else {
        (sum_r / rows.len().max(1) as f64).sqrt()
    }
}
