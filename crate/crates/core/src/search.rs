//! Numerical search for the minimal penalty gap achieving a requested
//! spectral error, and scaling-exponent extraction from (eps, Delta_min) data.

use crate::error::{Error, Result};
use crate::gadgets::{GadgetBuild, TargetSpec};
use crate::pauli::OperatorSum;

/// Relative tolerance on the achieved error, matching the reproduction
/// precision of the optimized-gap data.
pub const DEFAULT_TOL_REL: f64 = 1e-5;

const MAX_PROBES: usize = 200;
const DOUBLING_CAP_EXP: i32 = 40;

/// Outcome of a minimal-gap search.
#[derive(Debug, Clone)]
pub struct DeltaSearchResult {
    pub delta_min: f64,
    pub achieved_error: f64,
    pub bracket: (f64, f64),
    pub probes: usize,
    /// True iff |achieved_error - eps| <= tol_rel * eps.
    pub converged: bool,
    /// False on degenerate profiles where no bisection was needed.
    pub bisected: bool,
    /// True when a non-monotone profile forced the grid-scan fallback.
    pub grid_fallback: bool,
}

/// Bisection for the smallest Delta with err(Delta) = eps, given an error
/// functional and an initial bracket hint. The error profile is expected to
/// decrease in Delta; a sampled violation triggers a grid-scan fallback
/// around the first crossing.
pub fn minimal_delta_fn(
    err: &dyn Fn(f64) -> Result<f64>,
    bracket_lo: f64,
    bracket_hi: Option<f64>,
    epsilon: f64,
    tol_rel: f64,
) -> Result<DeltaSearchResult> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    if bracket_lo.is_nan() || bracket_lo <= 0.0 {
        return Err(Error::InvalidParameter(
            "lower bracket must be positive".into(),
        ));
    }
    let probes = std::cell::Cell::new(0usize);
    let eval = |d: f64| -> Result<f64> {
        probes.set(probes.get() + 1);
        err(d)
    };

    let err_lo = eval(bracket_lo)?;
    if err_lo <= epsilon {
        // degenerate: already within tolerance at the bracket floor
        return Ok(DeltaSearchResult {
            delta_min: bracket_lo,
            achieved_error: err_lo,
            bracket: (bracket_lo, bracket_lo),
            probes: probes.get(),
            converged: (err_lo - epsilon).abs() <= tol_rel * epsilon,
            bisected: false,
            grid_fallback: false,
        });
    }

    // upper bracket: supplied, else doubling search
    let mut hi = match bracket_hi {
        Some(h) if h > bracket_lo => h,
        _ => bracket_lo * 2.0,
    };
    let mut err_hi = eval(hi)?;
    let mut doubles = 0;
    while err_hi > epsilon {
        doubles += 1;
        if doubles > DOUBLING_CAP_EXP {
            return Err(Error::BracketFailure(format!(
                "error stayed above {} up to delta = {:.3e}",
                epsilon, hi
            )));
        }
        hi *= 2.0;
        err_hi = eval(hi)?;
    }

    let mut lo = bracket_lo;
    let mut err_lo = err_lo;

    // sampled monotonicity check across the bracket
    let mut monotone = true;
    {
        let mut samples = vec![(lo, err_lo)];
        for k in 1..=3 {
            let d = lo + (hi - lo) * k as f64 / 4.0;
            samples.push((d, eval(d)?));
        }
        samples.push((hi, err_hi));
        for w in samples.windows(2) {
            if w[1].1 > w[0].1 * (1.0 + 1e-9) + 1e-15 {
                monotone = false;
            }
        }
        if !monotone {
            // fall back to a grid scan for the first crossing, then bisect
            // locally within that cell
            let mut cross = None;
            let mut grid = Vec::with_capacity(64);
            for k in 0..=63 {
                let d = lo + (hi - lo) * k as f64 / 63.0;
                let e = eval(d)?;
                grid.push((d, e));
                if e <= epsilon {
                    cross = Some(k);
                    break;
                }
            }
            match cross {
                Some(k) if k > 0 => {
                    lo = grid[k - 1].0;
                    err_lo = grid[k - 1].1;
                    hi = grid[k].0;
                    err_hi = grid[k].1;
                }
                _ => return Err(Error::NonMonotoneProfile { samples: grid }),
            }
        }
    }

    // standard bisection, terminating on the achieved-error tolerance
    let mut best = (hi, err_hi);
    while probes.get() < MAX_PROBES {
        if (best.1 - epsilon).abs() <= tol_rel * epsilon {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // bracket exhausted in f64
        }
        let err_mid = eval(mid)?;
        if err_mid <= epsilon {
            hi = mid;
            err_hi = err_mid;
            best = (mid, err_mid);
        } else {
            lo = mid;
            err_lo = err_mid;
        }
    }
    let _ = (err_lo, err_hi);

    Ok(DeltaSearchResult {
        delta_min: best.0,
        achieved_error: best.1,
        bracket: (lo, hi),
        probes: probes.get(),
        converged: (best.1 - epsilon).abs() <= tol_rel * epsilon,
        bisected: true,
        grid_fallback: !monotone,
    })
}

/// Convergence floor below which the perturbative picture is meaningless:
/// 2 ||H_else|| + sum |alpha_i| + eps + 1e-6.
pub fn default_bracket_lo(target: &TargetSpec, epsilon: f64) -> Result<f64> {
    let h = target.h_else_norm()?;
    let abs_sum: f64 = target.alphas().iter().map(|a| a.abs()).sum();
    Ok(2.0 * h + abs_sum + epsilon + 1e-6)
}

/// Minimal Delta for a gadget constructor, measured by the spectral error
/// of the built gadget against the target operator.
pub fn minimal_delta(
    builder: &dyn Fn(f64) -> Result<GadgetBuild>,
    target: &OperatorSum,
    bracket_lo: f64,
    bracket_hi: Option<f64>,
    epsilon: f64,
    tol_rel: f64,
) -> Result<DeltaSearchResult> {
    let err = |delta: f64| -> Result<f64> {
        let g = builder(delta)?;
        Ok(g.spectral_error(target)?.max_error)
    };
    minimal_delta_fn(&err, bracket_lo, bracket_hi, epsilon, tol_rel)
}

/// Least-squares fit of ln Delta_min against ln eps^-1.
#[derive(Debug, Clone)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

/// Ordinary least squares on log-log pairs. Points where the optimizer did
/// not converge are discarded; at least four spanning a decade must survive.
pub fn scaling_slope(
    epsilons: &[f64],
    delta_for_eps: &dyn Fn(f64) -> Result<DeltaSearchResult>,
) -> Result<SlopeFit> {
    if epsilons.len() < 4 {
        return Err(Error::InvalidParameter(
            "need at least 4 epsilon points".into(),
        ));
    }
    let lo = epsilons.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = epsilons.iter().cloned().fold(0.0f64, f64::max);
    if hi / lo < 10.0 {
        return Err(Error::InvalidParameter(
            "epsilon grid must span at least one decade".into(),
        ));
    }
    let mut points = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let res = delta_for_eps(eps)?;
        if res.converged {
            points.push(((1.0 / eps).ln(), res.delta_min.ln()));
        } else {
            log::warn!(
                "discarding eps = {:.3e}: optimizer did not converge (err {:.3e})",
                eps,
                res.achieved_error
            );
        }
    }
    fit_points(points)
}

/// Least-squares line through pre-assembled (ln x, ln y) points.
pub fn fit_points(points: Vec<(f64, f64)>) -> Result<SlopeFit> {
    if points.len() < 4 {
        return Err(Error::BracketFailure(format!(
            "only {} converged points survive for the slope fit",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let sx: f64 = points.iter().map(|p| p.0).sum();
    let sy: f64 = points.iter().map(|p| p.1).sum();
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let syy: f64 = points.iter().map(|p| p.1 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-30 {
        return Err(Error::InvalidParameter("degenerate abscissae".into()));
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    let ss_tot = syy - sy * sy / n;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r_squared = if ss_tot <= 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(SlopeFit {
        slope,
        intercept,
        r_squared,
        points,
    })
}

/// Log-spaced grid of epsilon values, descending from `hi` to `lo`.
pub fn log_epsilon_grid(hi: f64, lo: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2 && hi > lo && lo > 0.0);
    (0..points)
        .map(|i| {
            let t = i as f64 / (points - 1) as f64;
            10f64.powf(hi.log10() + t * (lo.log10() - hi.log10()))
        })
        .collect()
}
