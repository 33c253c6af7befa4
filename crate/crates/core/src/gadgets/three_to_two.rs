//! 3-to-2-body gadgets: generate a 3-body effective term at third order from
//! 2-body interactions, in the compensated (improved) and prior (ot06) forms.

use crate::error::{Error, Result};
use crate::pauli::{projector_term, Axis, OperatorSum, PauliString};

use super::{
    assemble, coupled_sum, effective_target_op, penalty_hamiltonian, sgn, weighted_pair,
    GadgetBuild, TargetSpec,
};

/// Which compensation scheme to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeToTwoVariant {
    /// Projected compensation V1, V2 at r = 3/4; gap scales as eps^-2.
    Improved,
    /// Prior unprojected compensation V1' at r = 2/3; gap scales as eps^-3.
    Ot06,
}

pub(crate) fn validate_three_body(
    factors: &[PauliString],
) -> Result<(&PauliString, &PauliString, &PauliString)> {
    match factors {
        [a, b, c] => {
            for f in [a, b, c] {
                if f.weight() != 1 {
                    return Err(Error::Schema(
                        "3-to-2 factors must be single-qubit Pauli operators".into(),
                    ));
                }
            }
            Ok((a, b, c))
        }
        _ => Err(Error::Schema(
            "3-to-2 gadget needs exactly three factor groups".into(),
        )),
    }
}

/// Improved coefficients: kappa = sgn(a)(|a|/2)^(1/3) D^(3/4),
/// lambda = (|a|/2)^(1/3) D^(3/4), mu = (|a|/2)^(1/3) D^(1/2).
pub(crate) fn improved_coefficients(alpha: f64, delta: f64) -> (f64, f64, f64) {
    let c = (alpha.abs() / 2.0).powf(1.0 / 3.0);
    (
        sgn(alpha) * c * delta.powf(0.75),
        c * delta.powf(0.75),
        c * delta.sqrt(),
    )
}

/// Prior-construction coefficients at r = 2/3. The printed form carries both
/// a 1/sqrt(2) and a (alpha/2)^(1/3), which yields an effective coupling of
/// alpha/2; the cube-root argument is taken as plain alpha here so that
/// 2 kappa lambda mu / Delta^2 = alpha, preserving the printed sign and
/// ratio structure. The sign of alpha rides on mu.
pub(crate) fn ot06_coefficients(alpha: f64, delta: f64) -> (f64, f64, f64) {
    let c = alpha.abs().powf(1.0 / 3.0) * delta.powf(2.0 / 3.0);
    (-c / 2f64.sqrt(), c / 2f64.sqrt(), -sgn(alpha) * c)
}

/// 3-to-2-body gadget for H_else + alpha A (x) B (x) C with one ancilla.
pub fn build_three_to_two_gadget(
    target: &TargetSpec,
    delta: f64,
    variant: ThreeToTwoVariant,
) -> Result<GadgetBuild> {
    let (alpha, a, b, c) = match target.interactions() {
        [(alpha, factors)] => {
            let (a, b, c) = validate_three_body(factors)?;
            (*alpha, a, b, c)
        }
        _ => {
            return Err(Error::Schema(
                "3-to-2 gadget handles exactly one interaction".into(),
            ))
        }
    };
    let n_sys = target.n_qubits();
    let n = n_sys + 1;
    let w = n_sys;

    let (kappa, lambda, mu) = match variant {
        ThreeToTwoVariant::Improved => improved_coefficients(alpha, delta),
        ThreeToTwoVariant::Ot06 => ot06_coefficients(alpha, delta),
    };

    let p0 = projector_term(n, w, 0)?;
    let p1 = projector_term(n, w, 1)?;
    let c_op = OperatorSum::single(n, 1.0, c.clone())?;
    let ab = {
        let (_, s) = crate::pauli::multiply(a, b);
        OperatorSum::single(n, 1.0, s)?
    };
    let xw = PauliString::single(w, Axis::X);

    let mut v = target.h_else().embedded(n)?;
    v = v.add(&c_op.scale(mu).product(&p1)?.into_real()?)?;
    v = v.add(&coupled_sum(n, &[(kappa, a), (lambda, b)], &xw)?)?;

    let kk_ll = kappa * kappa + lambda * lambda;
    match variant {
        ThreeToTwoVariant::Improved => {
            // V1 = (kappa^2+lambda^2)/D |0><0| + 2 kappa lambda / D A B
            //      - (kappa^2+lambda^2) mu / D^2 C |0><0|
            let mut v1 = p0.scale(kk_ll / delta);
            v1 = v1.add(&ab.scale(2.0 * kappa * lambda / delta))?;
            v1 = v1.add(
                &c_op
                    .scale(-kk_ll * mu / (delta * delta))
                    .product(&p0)?
                    .into_real()?,
            )?;
            // V2 = -(2 kappa lambda / D^3) sgn(alpha)
            //      [(kappa^2+lambda^2)|0><0| + 2 kappa lambda A B]
            let pref = -2.0 * kappa * lambda * sgn(alpha) / delta.powi(3);
            let v2 = p0
                .scale(pref * kk_ll)
                .add(&ab.scale(pref * 2.0 * kappa * lambda))?;
            v = v.add(&v1)?.add(&v2)?;
        }
        ThreeToTwoVariant::Ot06 => {
            // V1' = (kappa A + lambda B)^2 / D - (kappa^2 A^2 + lambda^2 B^2) mu C / D^2
            let pair = weighted_pair(n, kappa, a, lambda, b)?;
            let mut v1 = pair.square()?.scale(1.0 / delta);
            v1 = v1.add(&c_op.scale(-kk_ll * mu / (delta * delta)))?;
            v = v.add(&v1)?;
        }
    }

    let penalty = penalty_hamiltonian(n, &[w], delta)?;
    let effective = effective_target_op(&target.operator()?, n, &[w])?;
    let cap = 2.max(target.h_else().locality());
    assemble(
        penalty,
        v,
        vec![("w".into(), w)],
        delta,
        effective,
        n_sys,
        cap,
    )
}
