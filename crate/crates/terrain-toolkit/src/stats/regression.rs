//! Multiple linear regression of perception scores on the ten geomorphon
//! coverages, solved by Householder QR rather than normal equations.

use crate::error::{Result, TerrainError};
use crate::geomorphon::{GeomorphonClass, CLASS_COUNT};
use crate::stats::special::f_upper_tail_p;

/// Result of fitting scores = intercept + weights . features.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub intercept: f64,
    pub coefficients: [f64; CLASS_COUNT],
    /// Fraction of score variance explained; 0 for a constant target.
    pub r_squared: f64,
    /// Standard error of the regression, sqrt(SSres / (n - p)).
    pub std_error: f64,
    pub residuals: Vec<f64>,
    pub f_statistic: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

/// Least-squares fit with an implicit intercept over arbitrary feature
/// columns. Used by [`fit_mlr`] and by the calibration refit (which may
/// drop degenerate columns first).
#[derive(Debug, Clone)]
pub(crate) struct GeneralFit {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub std_error: f64,
    pub residuals: Vec<f64>,
    pub f_statistic: f64,
    pub df_num: usize,
    pub df_den: usize,
    pub p_value: f64,
}

pub(crate) fn fit_with_intercept(
    rows: &[Vec<f64>],
    scores: &[f64],
    column_label: &dyn Fn(usize) -> String,
) -> Result<GeneralFit> {
    let n = rows.len();
    let k = rows.first().map_or(0, |r| r.len());
    let p = k + 1;
    if scores.len() != n {
        return Err(TerrainError::InvalidParameter(format!(
            "{n} feature rows but {} scores",
            scores.len()
        )));
    }
    if n <= p {
        return Err(TerrainError::InvalidParameter(format!(
            "need more than {p} observations to fit {p} coefficients, got {n}"
        )));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != k {
            return Err(TerrainError::InvalidParameter(format!(
                "feature row {i} has {} columns, expected {k}",
                row.len()
            )));
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(TerrainError::NonFinite(format!("feature row {i}")));
        }
    }
    if scores.iter().any(|v| !v.is_finite()) {
        return Err(TerrainError::NonFinite("score vector".into()));
    }

    // Design matrix with a leading intercept column, row major.
    let mut design = vec![0.0f64; n * p];
    for (i, row) in rows.iter().enumerate() {
        design[i * p] = 1.0;
        design[i * p + 1..(i + 1) * p].copy_from_slice(row);
    }
    let mut rhs = scores.to_vec();
    let beta = householder_solve(&mut design, &mut rhs, n, p).map_err(|columns| {
        TerrainError::RankDeficient {
            columns: columns.into_iter().map(column_label).collect(),
        }
    })?;

    let mut residuals = Vec::with_capacity(n);
    let mut ss_res = 0.0;
    for (i, row) in rows.iter().enumerate() {
        let mut fitted = beta[0];
        for (j, &x) in row.iter().enumerate() {
            fitted += beta[j + 1] * x;
        }
        let r = scores[i] - fitted;
        residuals.push(r);
        ss_res += r * r;
    }
    let mean = scores.iter().sum::<f64>() / n as f64;
    let ss_tot: f64 = scores.iter().map(|&y| (y - mean) * (y - mean)).sum();
    let r_squared = if ss_tot > 0.0 {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let df_num = k;
    let df_den = n - p;
    let std_error = (ss_res / df_den as f64).sqrt();
    let mse_res = ss_res / df_den as f64;
    let f_statistic = if mse_res > 0.0 {
        ((ss_tot - ss_res) / df_num.max(1) as f64) / mse_res
    } else {
        f64::INFINITY
    };
    let p_value = f_upper_tail_p(f_statistic, df_num.max(1) as f64, df_den as f64);

    Ok(GeneralFit {
        intercept: beta[0],
        coefficients: beta[1..].to_vec(),
        r_squared,
        std_error,
        residuals,
        f_statistic,
        df_num,
        df_den,
        p_value,
    })
}

/// Least-squares fit of an intercept plus the ten geomorphon weights.
///
/// Requires n > 11 observations and a full-rank design matrix; near
/// collinear columns are reported by name.
pub fn fit_mlr(features: &[[f64; CLASS_COUNT]], scores: &[f64]) -> Result<RegressionFit> {
    let rows: Vec<Vec<f64>> = features.iter().map(|r| r.to_vec()).collect();
    let fit = fit_with_intercept(&rows, scores, &|index| {
        if index == 0 {
            "intercept".to_string()
        } else {
            GeomorphonClass::ALL[index - 1].name().to_string()
        }
    })?;
    let mut coefficients = [0.0; CLASS_COUNT];
    coefficients.copy_from_slice(&fit.coefficients);
    Ok(RegressionFit {
        intercept: fit.intercept,
        coefficients,
        r_squared: fit.r_squared,
        std_error: fit.std_error,
        residuals: fit.residuals,
        f_statistic: fit.f_statistic,
        df_num: fit.df_num,
        df_den: fit.df_den,
        p_value: fit.p_value,
    })
}

/// Fit like [`fit_with_intercept`], but drop exactly-collinear feature
/// columns instead of failing: aliased columns get coefficient 0, the way
/// most statistics packages resolve them. Returns the fit over the kept
/// columns (coefficients re-expanded to the original width) and the
/// dropped column indices. Still fails if the intercept itself collapses.
pub(crate) fn fit_dropping_collinear(
    rows: &[Vec<f64>],
    scores: &[f64],
    column_label: &dyn Fn(usize) -> String,
) -> Result<(GeneralFit, Vec<usize>)> {
    let width = rows.first().map_or(0, |r| r.len());
    let mut kept: Vec<usize> = (0..width).collect();
    let mut dropped: Vec<usize> = Vec::new();
    loop {
        let sub_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| kept.iter().map(|&j| r[j]).collect())
            .collect();
        let kept_now = kept.clone();
        let label = |index: usize| {
            if index == 0 {
                column_label(0)
            } else {
                column_label(kept_now[index - 1] + 1)
            }
        };
        match fit_with_intercept(&sub_rows, scores, &label) {
            Ok(mut fit) => {
                let mut coefficients = vec![0.0; width];
                for (slot, &j) in kept.iter().enumerate() {
                    coefficients[j] = fit.coefficients[slot];
                }
                fit.coefficients = coefficients;
                dropped.sort_unstable();
                return Ok((fit, dropped));
            }
            Err(TerrainError::RankDeficient { columns }) => {
                // Translate collapsed names back to kept slots via a dry
                // run of the solver on indices.
                let n = rows.len();
                let p = kept.len() + 1;
                let mut design = vec![0.0f64; n * p];
                for (i, row) in sub_rows.iter().enumerate() {
                    design[i * p] = 1.0;
                    design[i * p + 1..(i + 1) * p].copy_from_slice(row);
                }
                let mut rhs = scores.to_vec();
                let collapsed = match householder_solve(&mut design, &mut rhs, n, p) {
                    Err(collapsed) => collapsed,
                    Ok(_) => {
                        return Err(TerrainError::RankDeficient { columns });
                    }
                };
                if collapsed.contains(&0) {
                    return Err(TerrainError::RankDeficient { columns });
                }
                let mut to_drop: Vec<usize> =
                    collapsed.into_iter().map(|slot| kept[slot - 1]).collect();
                to_drop.sort_unstable();
                kept.retain(|j| !to_drop.contains(j));
                dropped.extend(to_drop);
                if kept.is_empty() {
                    return Err(TerrainError::RankDeficient { columns });
                }
            }
            Err(other) => return Err(other),
        }
    }
}

/// In-place Householder QR least squares on an n x p row-major matrix.
/// Returns the p coefficients, or the indices of columns whose pivot
/// collapsed (rank deficiency).
fn householder_solve(
    a: &mut [f64],
    y: &mut [f64],
    n: usize,
    p: usize,
) -> std::result::Result<Vec<f64>, Vec<usize>> {
    let mut max_column_norm = 0.0f64;
    for j in 0..p {
        let norm: f64 = (0..n).map(|i| a[i * p + j] * a[i * p + j]).sum::<f64>().sqrt();
        max_column_norm = max_column_norm.max(norm);
    }
    let pivot_tolerance = 1e-10 * max_column_norm.max(1.0);

    let mut degenerate = Vec::new();
    for k in 0..p {
        // Householder vector for column k below the diagonal.
        let mut norm: f64 = (k..n).map(|i| a[i * p + k] * a[i * p + k]).sum::<f64>().sqrt();
        if norm <= pivot_tolerance {
            degenerate.push(k);
            continue;
        }
        // Give the pivot the diagonal's sign so v_k = 1 + |a_kk|/norm
        // avoids cancellation.
        if a[k * p + k] < 0.0 {
            norm = -norm;
        }
        for i in k..n {
            a[i * p + k] /= norm;
        }
        a[k * p + k] += 1.0;

        // Apply the reflection to the remaining columns and the rhs.
        for j in (k + 1)..p {
            let mut s = 0.0;
            for i in k..n {
                s += a[i * p + k] * a[i * p + j];
            }
            s = -s / a[k * p + k];
            for i in k..n {
                a[i * p + j] += s * a[i * p + k];
            }
        }
        let mut s = 0.0;
        for i in k..n {
            s += a[i * p + k] * y[i];
        }
        s = -s / a[k * p + k];
        for i in k..n {
            y[i] += s * a[i * p + k];
        }
        // The reflection maps the column onto -norm * e_k; store R's
        // diagonal in place of the spent Householder head.
        a[k * p + k] = -norm;
    }
    if !degenerate.is_empty() {
        return Err(degenerate);
    }

    // Back substitution on the upper triangle.
    let mut beta = vec![0.0f64; p];
    for k in (0..p).rev() {
        let mut s = y[k];
        for j in (k + 1)..p {
            s -= a[k * p + j] * beta[j];
        }
        let diag = a[k * p + k];
        if diag.abs() <= pivot_tolerance {
            return Err(vec![k]);
        }
        beta[k] = s / diag;
    }
    Ok(beta)
}
