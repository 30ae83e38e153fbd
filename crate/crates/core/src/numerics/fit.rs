use crate::error::{Error, Result};
use crate::scalar::Real;

/// Least-squares slope of `ln y` against `ln x`. Points with non-positive
/// `y` are skipped; `None` if fewer than two usable points remain.
pub fn loglog_slope<T: Real>(xs: &[T], ys: &[T]) -> Option<T> {
    let pts: Vec<(T, T)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > T::zero() && **y > T::zero() && y.is_finite())
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx <= T::zero() {
        return None;
    }
    Some(sxy / sxx)
}

/// Linear least squares via modified Gram–Schmidt on the given columns.
/// Returns the coefficients and the residual sum of squares, or `None` if
/// the columns are numerically dependent.
pub fn least_squares<T: Real>(columns: &[Vec<T>], y: &[T]) -> Option<(Vec<T>, T)> {
    let k = columns.len();
    let n = y.len();
    let mut q: Vec<Vec<T>> = columns.to_vec();
    let mut r = vec![vec![T::zero(); k]; k];
    for j in 0..k {
        let orig = q[j].iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
        for i in 0..j {
            let d = (0..n).fold(T::zero(), |s, t| s + q[i][t] * q[j][t]);
            r[i][j] = d;
            for t in 0..n {
                q[j][t] = q[j][t] - d * q[i][t];
            }
        }
        let nrm = q[j].iter().fold(T::zero(), |s, v| s + *v * *v).sqrt();
        if !(nrm > orig * T::epsilon() * T::lit(1e3)) {
            return None;
        }
        r[j][j] = nrm;
        for t in 0..n {
            q[j][t] = q[j][t] / nrm;
        }
    }
    let mut qty = vec![T::zero(); k];
    let mut resid = y.to_vec();
    for j in 0..k {
        qty[j] = (0..n).fold(T::zero(), |s, t| s + q[j][t] * resid[t]);
        for t in 0..n {
            resid[t] = resid[t] - qty[j] * q[j][t];
        }
    }
    let mut coef = vec![T::zero(); k];
    for j in (0..k).rev() {
        let mut s = qty[j];
        for i in (j + 1)..k {
            s = s - r[j][i] * coef[i];
        }
        coef[j] = s / r[j][j];
    }
    let rss = resid.iter().fold(T::zero(), |s, v| s + *v * *v);
    Some((coef, rss))
}

/// Fit of `y ≈ limit + amplitude·x^{−κ} [+ amplitude2·x^{−κ−1}]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerLawFit<T> {
    pub limit: T,
    pub amplitude: T,
    pub exponent: T,
    pub amplitude2: Option<T>,
    /// Root-mean-square residual of the accepted model.
    pub residual: T,
    /// Samples were constant to within round-off; no decay was fitted.
    pub constant: bool,
}

const KAPPA_MIN: f64 = -6.0;
const KAPPA_MAX: f64 = 12.0;
const KAPPA_GRID: usize = 901;

/// Nonlinear least-squares fit of a power-law approach to a limit.
///
/// The exponent is found by variable projection: for each trial κ the
/// linear coefficients are solved exactly and the residual minimised over κ
/// (grid scan, then golden-section refinement). The two-term model is tried
/// only when the one-term RMS residual exceeds `two_term_threshold`.
pub fn fit_power_law<T: Real>(
    xs: &[T],
    ys: &[T],
    kappa_init: T,
    two_term_threshold: T,
) -> Result<PowerLawFit<T>> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::FitDivergence(format!(
            "need at least 3 samples, got {}",
            xs.len().min(ys.len())
        )));
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) || xs.iter().any(|x| *x <= T::zero()) {
        return Err(Error::NonFinite("power-law fit samples"));
    }
    let n = T::from_usize_lossy(ys.len());
    let mean = ys.iter().copied().sum::<T>() / n;
    let scale = ys.iter().fold(T::zero(), |m, y| m.max(y.abs()));
    let (lo, hi) = ys
        .iter()
        .fold((ys[0], ys[0]), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    if hi - lo <= T::epsilon() * T::lit(1e4) * scale.max(T::min_positive_value()) {
        let rss = ys
            .iter()
            .fold(T::zero(), |s, y| s + (*y - mean) * (*y - mean));
        return Ok(PowerLawFit {
            limit: mean,
            amplitude: T::zero(),
            exponent: kappa_init,
            amplitude2: None,
            residual: (rss / n).sqrt(),
            constant: true,
        });
    }

    // Normalise abscissae by their geometric mean for conditioning.
    let xref = (xs.iter().map(|x| x.ln()).sum::<T>() / n).exp();
    let xn: Vec<T> = xs.iter().map(|x| *x / xref).collect();

    let one = fit_with_terms(&xn, ys, 1, kappa_init)?;
    let rms_one = (one.1 / n).sqrt();
    let mut best = (one, 1usize, rms_one);
    if rms_one > two_term_threshold && ys.len() >= 5 {
        if let Ok(two) = fit_with_terms(&xn, ys, 2, kappa_init) {
            let rms_two = (two.1 / n).sqrt();
            if rms_two < rms_one {
                best = (two, 2, rms_two);
            }
        }
    }
    let ((kappa, _, coef), terms, rms) = ((best.0 .0, best.0 .1, best.0 .2), best.1, best.2);
    // Undo the abscissa normalisation: A·(x/xref)^{−κ} = (A·xref^κ)·x^{−κ}.
    let amplitude = coef[1] * xref.powf(kappa);
    let amplitude2 = if terms == 2 {
        Some(coef[2] * xref.powf(kappa + T::one()))
    } else {
        None
    };
    let fit = PowerLawFit {
        limit: coef[0],
        amplitude,
        exponent: kappa,
        amplitude2,
        residual: rms,
        constant: false,
    };
    if !fit.limit.is_finite() || !fit.amplitude.is_finite() {
        return Err(Error::FitDivergence("non-finite coefficients".into()));
    }
    Ok(fit)
}

/// Returns `(κ, rss, coefficients)` of the best fit with `terms` power terms.
fn fit_with_terms<T: Real>(
    xn: &[T],
    ys: &[T],
    terms: usize,
    kappa_init: T,
) -> Result<(T, T, Vec<T>)> {
    let eval = |kappa: T| -> Option<(T, Vec<T>)> {
        let mut cols = vec![vec![T::one(); xn.len()]];
        for t in 0..terms {
            let e = kappa + T::from_usize_lossy(t);
            cols.push(xn.iter().map(|x| x.powf(-e)).collect());
        }
        if cols.iter().flatten().any(|v| !v.is_finite()) {
            return None;
        }
        least_squares(&cols, ys).map(|(c, rss)| (rss, c))
    };
    let kmin = T::lit(KAPPA_MIN);
    let kmax = T::lit(KAPPA_MAX);
    let step = (kmax - kmin) / T::from_usize_lossy(KAPPA_GRID - 1);
    let mut best: Option<(usize, T)> = None;
    for i in 0..KAPPA_GRID {
        let k = kmin + step * T::from_usize_lossy(i);
        let r = eval(k).map(|(rss, _)| rss);
        if let Some(rss) = r {
            if best.is_none_or(|(_, b)| rss < b) {
                best = Some((i, rss));
            }
        }
    }
    let (ibest, rss_best) =
        best.ok_or_else(|| Error::FitDivergence("no admissible exponent".into()))?;
    let mut grid_best = kmin + step * T::from_usize_lossy(ibest);
    // The initial guess competes with the grid; ties go to the guess.
    if let Some((rss_init, _)) = eval(kappa_init) {
        if rss_init <= rss_best && kappa_init > kmin && kappa_init < kmax {
            grid_best = kappa_init;
        }
    }
    // Golden-section refinement on the bracketing cells.
    let mut a = (grid_best - step).max(kmin);
    let mut b = (grid_best + step).min(kmax);
    let f = |k: T| eval(k).map_or(T::infinity(), |(rss, _)| rss);
    let g = T::lit(0.618_033_988_749_895);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() <= T::epsilon().sqrt() * T::lit(1e-3) * (T::one() + c.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    let mut kappa = (a + b) * T::lit(0.5);
    let mut sol = eval(kappa);
    if let Some((rss_grid, _)) = eval(grid_best) {
        if sol.as_ref().is_none_or(|(r, _)| *r > rss_grid) {
            kappa = grid_best;
            sol = eval(grid_best);
        }
    }
    let (rss, coef) =
        sol.ok_or_else(|| Error::FitDivergence("refinement left the admissible set".into()))?;
    Ok((kappa, rss, coef))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_exact_power_law() {
        let xs: Vec<f64> = (0..10).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(-1.7)).collect();
        assert!((loglog_slope(&xs, &ys).unwrap() + 1.7).abs() < 1e-12);
        assert!(loglog_slope(&xs, &[0.0; 10]).is_none());
    }

    #[test]
    fn recovers_limit_and_exponent() {
        let xs: Vec<f64> = (3..=10).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.25 + 4.0 * x.powf(-1.3)).collect();
        let fit = fit_power_law(&xs, &ys, 1.0, 1e-6).unwrap();
        assert!((fit.limit - 0.25).abs() < 1e-9, "{fit:?}");
        assert!((fit.exponent - 1.3).abs() < 1e-6);
        assert!((fit.amplitude - 4.0).abs() < 1e-5);
        assert!(!fit.constant);
    }

    #[test]
    fn constant_samples_short_circuit() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let fit = fit_power_law(&xs, &[0.7; 4], 1.0, 1e-6).unwrap();
        assert!(fit.constant);
        assert_eq!(fit.limit, 0.7);
    }

    #[test]
    fn growing_samples_give_negative_exponent() {
        let xs: Vec<f64> = (3..=10).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 0.1 * x.powf(1.6)).collect();
        let fit = fit_power_law(&xs, &ys, 0.5, 1e-6).unwrap();
        assert!((fit.exponent + 1.6).abs() < 1e-4, "{fit:?}");
    }

    #[test]
    fn two_term_model_engages_on_mixed_decay() {
        let xs: Vec<f64> = (0..10).map(|k| 2f64.powi(k)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 + 2.0 / x + 5.0 / (x * x)).collect();
        let fit = fit_power_law(&xs, &ys, 1.0, 1e-6).unwrap();
        assert!(fit.amplitude2.is_some());
        assert!((fit.limit - 1.0).abs() < 1e-8, "{fit:?}");
    }

    #[test]
    fn least_squares_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (c, rss): (Vec<f64>, f64) = least_squares(&[vec![1.0; 4], x.to_vec()], &y).unwrap();
        assert!((c[0] - 1.0).abs() < 1e-14 && (c[1] - 2.0).abs() < 1e-14);
        assert!(rss < 1e-24);
    }
}
