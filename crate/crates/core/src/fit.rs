//! Threshold extraction from Monte Carlo failure-rate curves.
//!
//! Near a threshold `p_th` the failure rates of a code family collapse onto
//! one curve in the rescaled variable `x = (p - p_th) * L^(1/mu)`. The fit
//! approximates that curve by a quadratic and minimizes the weighted squared
//! error over `(p_th, mu)` with a Nelder-Mead search; the inner quadratic is
//! a closed-form weighted least-squares solve. [`plateau_fit`] extrapolates a
//! sequence of per-round-count thresholds to its sustainable limit.

use alloc::vec::Vec;
use core::fmt;

use crate::float;

/// One measured failure rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitPoint {
    /// Physical error rate of the run.
    pub p: f64,
    /// Linear system size.
    pub size: usize,
    /// Observed failure rate.
    pub rate: f64,
    /// One-sigma error bar of `rate`.
    pub err: f64,
}

/// A fitted threshold with its scaling exponent.
#[derive(Debug, Clone, Copy)]
pub struct ThresholdFit {
    /// Crossing point of the failure-rate curves.
    pub p_th: f64,
    /// Scaling exponent in `x = (p - p_th) * L^(1/mu)`.
    pub mu: f64,
    /// Coefficients `(a, b, c)` of the collapsed quadratic `a + b x + c x²`.
    pub quadratic: [f64; 3],
    /// Chi-squared per degree of freedom at the optimum.
    pub residual: f64,
    /// Points inside the fit window.
    pub points_used: usize,
}

/// Extrapolation of thresholds over round counts to the sustainable limit.
#[derive(Debug, Clone, Copy)]
pub struct PlateauFit {
    /// Extrapolated threshold at infinitely many rounds.
    pub sustainable: f64,
    /// Coefficient of the decaying `2^(-rounds)` term.
    pub slope: f64,
}

/// Reasons a fit cannot be performed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitError {
    /// Fewer points than fit parameters.
    TooFewPoints,
    /// All points share one system size, so no crossing exists.
    SingleSize,
    /// The design matrix is singular.
    Degenerate,
}

impl fmt::Display for FitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewPoints => write!(f, "not enough points for the fit"),
            Self::SingleSize => write!(f, "need at least two system sizes"),
            Self::Degenerate => write!(f, "degenerate fit system"),
        }
    }
}

impl core::error::Error for FitError {}

const FIT_PARAMS: usize = 5;
const WINDOW_FRACTION: f64 = 0.3;

/// Fits a threshold to failure-rate curves of at least two sizes.
///
/// Points with a zero error bar carry no least-squares weight and are
/// dropped; points outside a `±30%` window around an initial crossing
/// estimate are discarded before fitting.
pub fn fit_threshold(points: &[FitPoint]) -> Result<ThresholdFit, FitError> {
    let informative: Vec<FitPoint> = points
        .iter()
        .copied()
        .filter(|pt| pt.err > 0.0)
        .collect();
    let p0 = initial_crossing(&informative)?;
    let window: Vec<FitPoint> = informative
        .iter()
        .copied()
        .filter(|pt| float::abs(pt.p - p0) <= WINDOW_FRACTION * p0)
        .collect();
    check_enough(&window)?;

    let objective = |p_th: f64, ln_mu: f64| -> f64 {
        if !(p_th > 0.0) || float::abs(ln_mu) > 7.0 {
            return f64::INFINITY;
        }
        match quadratic_chi2(&window, p_th, float::exp(ln_mu)) {
            Some((chi2, _)) => chi2,
            None => f64::INFINITY,
        }
    };
    let (p_th, ln_mu) = nelder_mead(&objective, (p0, 0.0), (0.05 * p0, 0.4), 400);
    let mu = float::exp(ln_mu);
    let (chi2, quadratic) = quadratic_chi2(&window, p_th, mu).ok_or(FitError::Degenerate)?;
    let dof = window.len().saturating_sub(FIT_PARAMS).max(1);
    Ok(ThresholdFit {
        p_th,
        mu,
        quadratic,
        residual: chi2 / dof as f64,
        points_used: window.len(),
    })
}

/// Fits `p_th(rounds) = sustainable + slope * 2^(-rounds)`.
pub fn plateau_fit(points: &[(usize, f64)]) -> Result<PlateauFit, FitError> {
    if points.len() < 2 {
        return Err(FitError::TooFewPoints);
    }
    let n = points.len() as f64;
    let mut su = 0.0;
    let mut sy = 0.0;
    let mut suu = 0.0;
    let mut suy = 0.0;
    for &(rounds, p_th) in points {
        let u = float::exp(-(rounds as f64) * core::f64::consts::LN_2);
        su += u;
        sy += p_th;
        suu += u * u;
        suy += u * p_th;
    }
    let det = n * suu - su * su;
    if float::abs(det) < 1e-300 {
        return Err(FitError::Degenerate);
    }
    let slope = (n * suy - su * sy) / det;
    let sustainable = (sy - slope * su) / n;
    Ok(PlateauFit { sustainable, slope })
}

fn check_enough(points: &[FitPoint]) -> Result<(), FitError> {
    if points.len() < FIT_PARAMS {
        return Err(FitError::TooFewPoints);
    }
    let first = points[0].size;
    if points.iter().all(|pt| pt.size == first) {
        return Err(FitError::SingleSize);
    }
    Ok(())
}

/// Initial threshold estimate: the crossing of the two largest-size curves,
/// falling back to the median `p` when they do not cross.
fn initial_crossing(points: &[FitPoint]) -> Result<f64, FitError> {
    check_enough(points)?;
    let mut sizes: Vec<usize> = points.iter().map(|pt| pt.size).collect();
    sizes.sort_unstable();
    sizes.dedup();
    let large = sizes[sizes.len() - 1];
    let small = sizes[sizes.len() - 2];
    let curve = |size: usize| -> Vec<(f64, f64)> {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .filter(|pt| pt.size == size)
            .map(|pt| (pt.p, pt.rate))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts
    };
    let big_curve = curve(large);
    let small_curve = curve(small);
    let mut crossing = None;
    let mut prev: Option<(f64, f64)> = None;
    for &(p, big_rate) in &big_curve {
        if let Some(small_rate) = interpolate(&small_curve, p) {
            let diff = big_rate - small_rate;
            if let Some((prev_p, prev_diff)) = prev {
                if prev_diff == 0.0 {
                    crossing = Some(prev_p);
                    break;
                }
                if (prev_diff < 0.0) != (diff < 0.0) {
                    let t = prev_diff / (prev_diff - diff);
                    crossing = Some(prev_p + t * (p - prev_p));
                    break;
                }
            }
            prev = Some((p, diff));
        }
    }
    Ok(crossing.unwrap_or_else(|| median_p(points)))
}

fn interpolate(curve: &[(f64, f64)], p: f64) -> Option<f64> {
    if curve.is_empty() || p < curve[0].0 || p > curve[curve.len() - 1].0 {
        return None;
    }
    for pair in curve.windows(2) {
        let (p0, y0) = pair[0];
        let (p1, y1) = pair[1];
        if p >= p0 && p <= p1 {
            if p1 == p0 {
                return Some(y0);
            }
            let t = (p - p0) / (p1 - p0);
            return Some(y0 + t * (y1 - y0));
        }
    }
    Some(curve[curve.len() - 1].1)
}

fn median_p(points: &[FitPoint]) -> f64 {
    let mut ps: Vec<f64> = points.iter().map(|pt| pt.p).collect();
    ps.sort_by(f64::total_cmp);
    ps[ps.len() / 2]
}

/// Weighted quadratic least squares in the rescaled variable; returns the
/// chi-squared and the coefficients, or `None` when singular or non-finite.
fn quadratic_chi2(points: &[FitPoint], p_th: f64, mu: f64) -> Option<(f64, [f64; 3])> {
    let mut normal = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for pt in points {
        let scale = float::exp(float::ln(pt.size as f64) / mu);
        let x = (pt.p - p_th) * scale;
        if !x.is_finite() {
            return None;
        }
        let w = 1.0 / (pt.err * pt.err);
        let basis = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                normal[i][j] += w * basis[i] * basis[j];
            }
            rhs[i] += w * basis[i] * pt.rate;
        }
    }
    let coeffs = solve3(normal, rhs)?;
    let mut chi2 = 0.0;
    for pt in points {
        let scale = float::exp(float::ln(pt.size as f64) / mu);
        let x = (pt.p - p_th) * scale;
        let model = coeffs[0] + coeffs[1] * x + coeffs[2] * x * x;
        let r = (pt.rate - model) / pt.err;
        chi2 += r * r;
    }
    if chi2.is_finite() {
        Some((chi2, coeffs))
    } else {
        None
    }
}

fn solve3(mut a: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot = (col..3).max_by(|&i, &j| float::abs(a[i][col]).total_cmp(&float::abs(a[j][col])))?;
        if float::abs(a[pivot][col]) < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in 0..3 {
            if row == col {
                continue;
            }
            let f = a[row][col] / a[col][col];
            for k in col..3 {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    Some([b[0] / a[0][0], b[1] / a[1][1], b[2] / a[2][2]])
}

/// Two-dimensional Nelder-Mead minimization.
fn nelder_mead<F: Fn(f64, f64) -> f64>(
    f: &F,
    start: (f64, f64),
    step: (f64, f64),
    iters: usize,
) -> (f64, f64) {
    let mut simplex = [
        (start.0, start.1),
        (start.0 + step.0, start.1),
        (start.0, start.1 + step.1),
    ];
    let mut values = [
        f(simplex[0].0, simplex[0].1),
        f(simplex[1].0, simplex[1].1),
        f(simplex[2].0, simplex[2].1),
    ];
    for _ in 0..iters {
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
        let [best, mid, worst] = order;
        if values[worst] - values[best] < 1e-14 * (1.0 + float::abs(values[best])) {
            break;
        }
        let centroid = (
            (simplex[best].0 + simplex[mid].0) / 2.0,
            (simplex[best].1 + simplex[mid].1) / 2.0,
        );
        let reflect = (
            centroid.0 + (centroid.0 - simplex[worst].0),
            centroid.1 + (centroid.1 - simplex[worst].1),
        );
        let fr = f(reflect.0, reflect.1);
        if fr < values[best] {
            let expand = (
                centroid.0 + 2.0 * (centroid.0 - simplex[worst].0),
                centroid.1 + 2.0 * (centroid.1 - simplex[worst].1),
            );
            let fe = f(expand.0, expand.1);
            if fe < fr {
                simplex[worst] = expand;
                values[worst] = fe;
            } else {
                simplex[worst] = reflect;
                values[worst] = fr;
            }
        } else if fr < values[mid] {
            simplex[worst] = reflect;
            values[worst] = fr;
        } else {
            let contract = (
                centroid.0 + 0.5 * (simplex[worst].0 - centroid.0),
                centroid.1 + 0.5 * (simplex[worst].1 - centroid.1),
            );
            let fc = f(contract.0, contract.1);
            if fc < values[worst] {
                simplex[worst] = contract;
                values[worst] = fc;
            } else {
                for i in [mid, worst] {
                    simplex[i] = (
                        simplex[best].0 + 0.5 * (simplex[i].0 - simplex[best].0),
                        simplex[best].1 + 0.5 * (simplex[i].1 - simplex[best].1),
                    );
                    values[i] = f(simplex[i].0, simplex[i].1);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    simplex[best]
}
