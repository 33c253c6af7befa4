//! Closed-form lower bounds on the penalty gap Delta for each gadget family.

use crate::error::{Error, Result};
use crate::pauli::OperatorSum;
use crate::spectral::operator_norm;

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive, got {}",
            epsilon
        )));
    }
    Ok(())
}

/// Subdivision gadget: Delta >= (2|a|/eps + 1)(2 ||H_else|| + |a| + eps).
pub fn subdivision_delta_bound(alpha: f64, h_else_norm: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let a = alpha.abs();
    Ok((2.0 * a / epsilon + 1.0) * (2.0 * h_else_norm + a + epsilon))
}

/// Prior subdivision assignment, as a pure closed form with
/// ||H_else + |a| I|| replaced by its triangle-inequality bound.
pub fn ot06_subdivision_delta_bound(alpha: f64, h_else_norm: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let a = alpha.abs();
    let shifted = h_else_norm + a;
    Ok((shifted + (2.0 * a).sqrt()).powi(6) / (epsilon * epsilon))
}

/// Same bound with ||H_else + |a| I|| evaluated exactly from the operator.
pub fn ot06_subdivision_delta_bound_exact(
    h_else: &OperatorSum,
    alpha: f64,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let a = alpha.abs();
    let shifted = h_else.add(&OperatorSum::identity(h_else.n_qubits(), a))?;
    let norm = operator_norm(&shifted)?;
    Ok((norm + (2.0 * a).sqrt()).powi(6) / (epsilon * epsilon))
}

/// Parallel subdivision over m terms:
/// Delta >= [2 (sum sqrt|a_i|)^2 / eps + 1](2 ||H_else|| + 2 sum |a_i| + eps).
pub fn parallel_subdivision_delta_bound(
    alphas: &[f64],
    h_else_norm: f64,
    epsilon: f64,
) -> Result<f64> {
    check_epsilon(epsilon)?;
    let root_sum: f64 = alphas.iter().map(|a| a.abs().sqrt()).sum();
    let abs_sum: f64 = alphas.iter().map(|a| a.abs()).sum();
    Ok((2.0 * root_sum * root_sum / epsilon + 1.0) * (2.0 * h_else_norm + 2.0 * abs_sum + epsilon))
}

/// Improved 3-to-2-body gadget at r = 3/4:
/// Delta >= 1/4 (-b + sqrt(b^2 - 4c))^2 with the quoted b, c, eta, xi.
pub fn three_to_two_delta_bound(alpha: f64, h_else_norm: f64, epsilon: f64) -> Result<f64> {
    check_epsilon(epsilon)?;
    let a = alpha.abs();
    let max_z = h_else_norm + a + epsilon;
    let eta = h_else_norm + 2f64.powf(2.0 / 3.0) * a.powf(4.0 / 3.0);
    let xi = 2f64.powf(-1.0 / 3.0) * a.powf(1.0 / 3.0) + 2f64.powf(1.0 / 3.0) * a.powf(2.0 / 3.0);
    let lever = 2f64.powf(4.0 / 3.0) * a.powf(2.0 / 3.0) / epsilon;
    let b = -(xi + lever * (max_z + eta + xi * xi));
    let c = -(1.0 + lever * xi) * (max_z + eta);
    let root = (-b + (b * b - 4.0 * c).sqrt()) / 2.0;
    Ok(root * root)
}

use super::three_to_two::ThreeToTwoVariant;

/// Dominant power of Delta among the error terms, as a function of the
/// coefficient exponent r in (1/2, 1).
pub fn f_exponent(r: f64, variant: ThreeToTwoVariant) -> Result<f64> {
    if !(r > 0.5 && r < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "r must lie in (1/2, 1), got {}",
            r
        )));
    }
    Ok(match variant {
        ThreeToTwoVariant::Improved => (1.0 - 2.0 * r).max(6.0 * r - 5.0),
        ThreeToTwoVariant::Ot06 => (1.0 - 2.0 * r)
            .max(2.0 * r - 2.0)
            .max(4.0 * r - 3.0)
            .max(6.0 * r - 5.0),
    })
}

/// Norm bound for high-order series terms of the parallel 3-to-2 gadget.
#[derive(Debug, Clone)]
pub struct HighOrderBound {
    /// Upper bound on ||V-+ (G+ V+)^k G+ V+-|| for the requested k.
    pub order_bound: f64,
    /// Closed-form bound on the full tail sum over k >= 3.
    pub tail_bound: f64,
    pub v_s: f64,
    pub v_f: f64,
}

/// Flip counts that contribute to the order-(k+2) term.
fn flip_counts(k: usize) -> Vec<usize> {
    let start = if k.is_multiple_of(2) { k } else { k - 1 };
    (1..=start / 2).map(|i| 2 * i).rev().collect()
}

/// Bound on the order-(k+2) perturbative term of the parallel 3-to-2 gadget,
/// plus the summed tail bound. Errors when the stated convergence conditions
/// 2 m v_f < Delta - max_z and m v_f / v_s > 1 fail.
pub fn parallel_high_order_bound(
    k: usize,
    m: usize,
    alphas: &[f64],
    h_else_norm: f64,
    delta: f64,
    max_z: f64,
) -> Result<HighOrderBound> {
    if k < 2 {
        return Err(Error::InvalidParameter(
            "order index k must be at least 2".into(),
        ));
    }
    if m == 0 || alphas.len() != m {
        return Err(Error::InvalidParameter(format!(
            "need m = {} coupling strengths, got {}",
            m,
            alphas.len()
        )));
    }
    let s13: f64 = alphas.iter().map(|a| a.abs().powf(1.0 / 3.0)).sum();
    let s23: f64 = alphas.iter().map(|a| a.abs().powf(2.0 / 3.0)).sum();
    let s1: f64 = alphas.iter().map(|a| a.abs()).sum();
    let s43: f64 = alphas.iter().map(|a| a.abs().powf(4.0 / 3.0)).sum();
    let mut cross = 0.0;
    for (i, ai) in alphas.iter().enumerate() {
        for (j, aj) in alphas.iter().enumerate() {
            if i != j {
                cross += 8.0
                    * 2f64.powf(-4.0 / 3.0)
                    * ai.abs().powf(2.0 / 3.0)
                    * aj.abs().powf(2.0 / 3.0);
            }
        }
    }
    let v_f = 2f64.powf(2.0 / 3.0) * delta.powf(0.75) * s13;
    let v_s = h_else_norm
        + 2f64.powf(-1.0 / 3.0) * delta.sqrt() * s13
        + 2f64.powf(4.0 / 3.0) * delta.sqrt() * s23
        + s1
        + 2f64.powf(8.0 / 3.0) * s43
        + cross;

    let gap = delta - max_z;
    if gap <= 0.0 {
        return Err(Error::ConvergenceCondition(format!(
            "delta {} must exceed max_z {}",
            delta, max_z
        )));
    }
    if v_f == 0.0 {
        return Ok(HighOrderBound {
            order_bound: 0.0,
            tail_bound: 0.0,
            v_s,
            v_f,
        });
    }
    let mf = m as f64;
    if 2.0 * mf * v_f >= gap {
        return Err(Error::ConvergenceCondition(format!(
            "2 m v_f = {:.6e} must be below delta - max_z = {:.6e}",
            2.0 * mf * v_f,
            gap
        )));
    }
    if mf * v_f / v_s <= 1.0 {
        return Err(Error::ConvergenceCondition(format!(
            "m v_f / v_s = {:.6e} must exceed 1",
            mf * v_f / v_s
        )));
    }

    let prefactor = mf + (mf - 1.0) / mf;
    let mut sum = 0.0;
    for kf in flip_counts(k) {
        sum += (mf * v_f).powi(kf as i32) * v_s.powi((k - kf) as i32);
    }
    let order_bound = prefactor * 2f64.powi(k as i32) * v_f * v_f * sum / gap.powi(k as i32 + 1);

    let x = mf * v_f / v_s;
    let y = 2.0 * mf * v_f / gap;
    let tail_bound = (v_f * v_f / gap)
        * (x * x / (x * x - 1.0))
        * (y * y / (1.0 - y * y))
        * (mf + 1.0)
        * (y * y + 2.0 * v_s / gap);

    Ok(HighOrderBound {
        order_bound,
        tail_bound,
        v_s,
        v_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn subdivision_bound_values() {
        assert_relative_eq!(
            subdivision_delta_bound(1.0, 0.0, 0.05).unwrap(),
            43.05,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            subdivision_delta_bound(0.0, 0.0, 0.05).unwrap(),
            0.05,
            max_relative = 1e-12
        );
        assert!(subdivision_delta_bound(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn ot06_bound_values() {
        let v = ot06_subdivision_delta_bound(1.0, 0.0, 0.05).unwrap();
        assert_relative_eq!(
            v,
            (1.0 + 2f64.sqrt()).powi(6) / 0.0025,
            max_relative = 1e-12
        );
        assert!((v - 7.92e4).abs() / 7.92e4 < 2e-3);
        assert_eq!(ot06_subdivision_delta_bound(0.0, 0.0, 0.05).unwrap(), 0.0);
        // improved bound beats the prior one here
        assert!(subdivision_delta_bound(1.0, 0.0, 0.05).unwrap() < v);
    }

    #[test]
    fn parallel_bound_values() {
        assert_relative_eq!(
            parallel_subdivision_delta_bound(&[1.0], 0.0, 0.05).unwrap(),
            84.05,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            parallel_subdivision_delta_bound(&[1.0, 1.0], 0.0, 0.05).unwrap(),
            652.05,
            max_relative = 1e-12
        );
        // m = 1 parallel form is looser than the single-gadget bound
        assert!(
            parallel_subdivision_delta_bound(&[1.0], 0.0, 0.05).unwrap()
                > subdivision_delta_bound(1.0, 0.0, 0.05).unwrap()
        );
        let floor = parallel_subdivision_delta_bound(&[0.0, 0.0], 0.0, 0.05).unwrap();
        assert_relative_eq!(floor, 0.05, max_relative = 1e-12);
    }

    #[test]
    fn three_to_two_bound_value() {
        let v = three_to_two_delta_bound(1.0, 0.0, 0.01).unwrap();
        assert!((v - 2.96e6).abs() / 2.96e6 < 0.01, "got {}", v);
        // Theta(eps^-2): halving eps grows the bound by ~4x
        let v2 = three_to_two_delta_bound(1.0, 0.0, 0.005).unwrap();
        assert!((v2 / v - 4.0).abs() < 0.25, "ratio {}", v2 / v);
        // monotone decreasing in eps
        let mut prev = f64::INFINITY;
        for i in 0..20 {
            let eps = 10f64.powf(-2.0 + i as f64 * 0.1);
            let b = three_to_two_delta_bound(1.0, 0.0, eps).unwrap();
            assert!(b < prev);
            prev = b;
        }
    }

    #[test]
    fn exponent_minima() {
        assert_relative_eq!(
            f_exponent(0.75, ThreeToTwoVariant::Improved).unwrap(),
            -0.5,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            f_exponent(2.0 / 3.0, ThreeToTwoVariant::Ot06).unwrap(),
            -1.0 / 3.0,
            max_relative = 1e-9
        );
        assert_relative_eq!(
            f_exponent(0.999999, ThreeToTwoVariant::Improved).unwrap(),
            6.0 * 0.999999 - 5.0,
            max_relative = 1e-9
        );
        assert!(f_exponent(0.5, ThreeToTwoVariant::Improved).is_err());
    }

    #[test]
    fn high_order_bound_behaviour() {
        let alphas = [0.1, -0.2];
        // zero couplings give a zero bound
        let z = parallel_high_order_bound(3, 2, &[0.0, 0.0], 0.0, 100.0, 0.31).unwrap();
        assert_eq!(z.order_bound, 0.0);
        assert_eq!(z.tail_bound, 0.0);

        let b1 = parallel_high_order_bound(4, 2, &alphas, 0.0, 5e4, 0.31).unwrap();
        let b2 = parallel_high_order_bound(4, 2, &alphas, 0.0, 1e5, 0.31).unwrap();
        assert!(b2.order_bound < b1.order_bound);

        // tight delta violates the convergence condition
        assert!(parallel_high_order_bound(4, 2, &alphas, 0.0, 1.0, 0.31).is_err());
    }
}
