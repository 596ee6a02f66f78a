//! Log-log decay-rate fitting for running-minimum trace columns.
//!
//! The engines guarantee that the best-so-far stationarity measures decay
//! like `C/t`; fitting `log y` against `log t` by least squares turns that
//! into a single empirical number (slope `-1` matches the guarantee
//! exactly, anything steeper beats it). The fit uses only the second half
//! of the rounds so the transient does not pollute the slope, and it
//! refuses columns that are not non-increasing — those are not
//! running-minimum columns and a decay rate would be meaningless.

use std::path::Path;

use crate::error::{CliError, Result};

/// Columns eligible for automatic selection, in preference order. The
/// `_mean` variants appear in aggregate files.
pub const FIT_COLUMNS: &[&str] = &[
    "min_residual",
    "min_residual_mean",
    "min_grad_map_sq",
    "min_grad_map_sq_mean",
];

/// Result of a log-log least-squares fit `log y = slope * log t + intercept`.
#[derive(Debug, Clone)]
pub struct RateFit {
    /// Column the fit ran on.
    pub column: String,
    pub slope: f64,
    pub intercept: f64,
    /// Coefficient of determination on the log-log points.
    pub r_squared: f64,
    /// Number of fitted points.
    pub points: usize,
    /// First round in the fitted window.
    pub t_first: usize,
    /// Last round in the fitted window.
    pub t_last: usize,
}

/// Fits the decay exponent of `ys` over `ts`.
///
/// The whole column must be non-increasing; the fit itself uses the second
/// half of the rounds with `t >= 1` (round zero has no logarithm), all of
/// which must be strictly positive.
pub fn fit_decay(ts: &[usize], ys: &[f64], column: &str) -> Result<RateFit> {
    if ts.len() != ys.len() {
        return Err(CliError::Numerical(format!(
            "column {column}: {} rounds but {} values",
            ts.len(),
            ys.len()
        )));
    }
    for pair in ys.windows(2) {
        if !(pair[1] <= pair[0]) {
            return Err(CliError::Numerical(format!(
                "column {column} is not non-increasing ({} then {}); \
                 decay fitting needs a running-minimum column",
                pair[0], pair[1]
            )));
        }
    }
    let positive_t: Vec<(usize, f64)> = ts
        .iter()
        .zip(ys.iter())
        .filter(|(&t, _)| t >= 1)
        .map(|(&t, &y)| (t, y))
        .collect();
    let window = &positive_t[positive_t.len() / 2..];
    if window.len() < 2 {
        return Err(CliError::Numerical(format!(
            "column {column}: only {} usable rounds; need at least 4 to fit the second half",
            positive_t.len()
        )));
    }
    if let Some((t, y)) = window.iter().find(|(_, y)| !(y.is_finite() && *y > 0.0)) {
        return Err(CliError::Numerical(format!(
            "column {column} is {y} at round {t}; \
             log-log fitting needs strictly positive values"
        )));
    }

    // A constant window is an exact zero-slope fit; computing it through
    // the normal equations would leave rounding residue of order epsilon.
    if window.iter().all(|(_, y)| *y == window[0].1) {
        return Ok(RateFit {
            column: column.to_string(),
            slope: 0.0,
            intercept: window[0].1.ln(),
            r_squared: 1.0,
            points: window.len(),
            t_first: window[0].0,
            t_last: window[window.len() - 1].0,
        });
    }

    let pts: Vec<(f64, f64)> = window
        .iter()
        .map(|(t, y)| ((*t as f64).ln(), y.ln()))
        .collect();
    let m = pts.len() as f64;
    let mean_x = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_tot: f64 = pts.iter().map(|p| (p.1 - mean_y) * (p.1 - mean_y)).sum();
    let ss_res: f64 = pts
        .iter()
        .map(|p| {
            let r = p.1 - (slope * p.0 + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res <= f64::EPSILON {
        1.0
    } else {
        0.0
    };
    Ok(RateFit {
        column: column.to_string(),
        slope,
        intercept,
        r_squared,
        points: window.len(),
        t_first: window[0].0,
        t_last: window[window.len() - 1].0,
    })
}

/// Reads any trace or aggregate CSV written by this tool: a header line of
/// column names and float cells (`NaN`, `inf`, `-inf` spelled out).
pub fn read_csv_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines();
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| CliError::Numerical(format!("{}: empty file", path.display())))?
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != header.len() {
            return Err(CliError::Numerical(format!(
                "{}: line {} has {} cells, header has {}",
                path.display(),
                lineno + 2,
                cells.len(),
                header.len()
            )));
        }
        for (col, cell) in columns.iter_mut().zip(cells) {
            let v = cell.trim().parse::<f64>().map_err(|_| {
                CliError::Numerical(format!(
                    "{}: line {} has a non-numeric cell {cell:?}",
                    path.display(),
                    lineno + 2
                ))
            })?;
            col.push(v);
        }
    }
    Ok((header, columns))
}

/// Fits a decay rate from a CSV file. Picks `column` when given, otherwise
/// the first of [`FIT_COLUMNS`] present in the header.
pub fn fit_from_csv(path: &Path, column: Option<&str>) -> Result<RateFit> {
    let (header, columns) = read_csv_columns(path)?;
    let t_idx = header.iter().position(|h| h == "t").ok_or_else(|| {
        CliError::Numerical(format!("{}: no t column", path.display()))
    })?;
    let name = match column {
        Some(c) => c.to_string(),
        None => FIT_COLUMNS
            .iter()
            .find(|c| header.iter().any(|h| h == *c))
            .map(|c| c.to_string())
            .ok_or_else(|| {
                CliError::Numerical(format!(
                    "{}: no running-minimum column (looked for {})",
                    path.display(),
                    FIT_COLUMNS.join(", ")
                ))
            })?,
    };
    let y_idx = header.iter().position(|h| *h == name).ok_or_else(|| {
        CliError::Numerical(format!("{}: no column named {name:?}", path.display()))
    })?;
    let ts: Vec<usize> = columns[t_idx].iter().map(|&v| v as usize).collect();
    fit_decay(&ts, &columns[y_idx], &name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reciprocal_decay_fits_slope_minus_one() {
        let ts: Vec<usize> = (0..=400).collect();
        let ys: Vec<f64> = ts
            .iter()
            .map(|&t| if t == 0 { f64::INFINITY } else { 3.2 / t as f64 })
            .collect();
        // Replace the untouched t=0 sentinel with a larger finite value so
        // the column stays non-increasing.
        let mut ys = ys;
        ys[0] = 10.0;
        let fit = fit_decay(&ts, &ys, "min_residual").unwrap();
        assert!((fit.slope + 1.0).abs() <= 1e-6, "slope {}", fit.slope);
        assert!((fit.intercept - 3.2_f64.ln()).abs() <= 1e-6);
        assert!(fit.r_squared > 0.999_999);
        assert!(fit.t_first >= 200 && fit.t_last == 400);
    }

    #[test]
    fn constant_column_fits_slope_zero() {
        let ts: Vec<usize> = (1..=64).collect();
        let ys = vec![0.75; 64];
        let fit = fit_decay(&ts, &ys, "min_residual").unwrap();
        assert_eq!(fit.slope, 0.0);
        assert_eq!(fit.r_squared, 1.0);
    }

    #[test]
    fn power_law_decay_recovers_its_exponent() {
        let ts: Vec<usize> = (1..=500).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| 2.0 * (t as f64).powf(-1.7)).collect();
        let fit = fit_decay(&ts, &ys, "x").unwrap();
        assert!((fit.slope + 1.7).abs() <= 1e-9, "slope {}", fit.slope);
    }

    #[test]
    fn non_monotone_columns_are_rejected() {
        let ts: Vec<usize> = (1..=10).collect();
        let mut ys: Vec<f64> = ts.iter().map(|&t| 1.0 / t as f64).collect();
        ys[7] = 1.0;
        let err = fit_decay(&ts, &ys, "cost").unwrap_err();
        assert!(matches!(err, CliError::Numerical(_)));
        assert!(err.to_string().contains("non-increasing"));
    }

    #[test]
    fn zero_values_in_the_window_are_rejected() {
        let ts: Vec<usize> = (1..=20).collect();
        let ys: Vec<f64> = ts.iter().map(|&t| if t > 15 { 0.0 } else { 1.0 / t as f64 }).collect();
        let err = fit_decay(&ts, &ys, "min_residual").unwrap_err();
        assert!(err.to_string().contains("strictly positive"));
    }

    #[test]
    fn too_few_rounds_are_rejected() {
        let err = fit_decay(&[0, 1], &[2.0, 1.0], "m").unwrap_err();
        assert!(matches!(err, CliError::Numerical(_)));
    }

    #[test]
    fn csv_round_trip_selects_the_min_column_automatically() {
        let dir = std::env::temp_dir().join(format!("dualavg-ratefit-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("trace.csv");
        let mut text = String::from("t,cost,min_residual\n");
        for t in 0..=100usize {
            let y = if t == 0 { 8.0 } else { 4.0 / t as f64 };
            text.push_str(&format!("{t},{},{y}\n", -1.0 - t as f64 * 1e-3));
        }
        std::fs::write(&path, text).unwrap();
        let fit = fit_from_csv(&path, None).unwrap();
        assert_eq!(fit.column, "min_residual");
        assert!((fit.slope + 1.0).abs() <= 1e-6);
        // Explicit selection of a non-monotone column errors.
        let err = fit_from_csv(&path, Some("t")).unwrap_err();
        assert!(err.to_string().contains("non-increasing"));
        std::fs::remove_dir_all(&dir).ok();
    }
}
