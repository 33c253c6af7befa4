//! Subdivision gadgets: halve the locality of product interactions by
//! coupling both halves to a penalized ancilla through X.

use crate::error::{Error, Result};
use crate::pauli::{projector_term, Axis, OperatorSum, PauliString};

use super::{
    assemble, coupled_sum, effective_target_op, penalty_hamiltonian, sgn, GadgetBuild, TargetSpec,
};

fn subdivision_coefficients(alpha: f64, delta: f64) -> (f64, f64) {
    let magnitude = (alpha.abs() * delta / 2.0).sqrt();
    (sgn(alpha) * magnitude, -magnitude)
}

/// Subdivision gadget for H_else + alpha A (x) B with one ancilla:
/// V = H_else + (kappa^2 A^2 + lambda^2 B^2)/Delta (x) |0><0|_w plus
/// (kappa A + lambda B) (x) X_w, with kappa = sgn(alpha)
/// sqrt(|alpha| Delta / 2) and lambda = -sqrt(|alpha| Delta / 2).
pub fn build_subdivision_gadget(target: &TargetSpec, delta: f64) -> Result<GadgetBuild> {
    let (alpha, a, b) = match target.interactions() {
        [(alpha, factors)] => match factors.as_slice() {
            [a, b] => (*alpha, a, b),
            _ => {
                return Err(Error::Schema(
                    "subdivision gadget needs exactly two factor groups".into(),
                ))
            }
        },
        _ => {
            return Err(Error::Schema(
                "subdivision gadget handles exactly one interaction".into(),
            ))
        }
    };
    let n_sys = target.n_qubits();
    let n = n_sys + 1;
    let w = n_sys;
    let (kappa, lambda) = subdivision_coefficients(alpha, delta);

    let mut v = target.h_else().embedded(n)?;
    // (kappa^2 A^2 + lambda^2 B^2)/Delta (x) |0><0|_w; A^2 = B^2 = identity
    let a_op = OperatorSum::single(n, 1.0, a.clone())?;
    let b_op = OperatorSum::single(n, 1.0, b.clone())?;
    let squares = a_op
        .square()?
        .scale(kappa * kappa)
        .add(&b_op.square()?.scale(lambda * lambda))?
        .scale(1.0 / delta);
    let p0 = projector_term(n, w, 0)?;
    v = v.add(&squares.product(&p0)?.into_real()?)?;
    let xw = PauliString::single(w, Axis::X);
    v = v.add(&coupled_sum(n, &[(kappa, a), (lambda, b)], &xw)?)?;

    // Summary form of the same perturbation:
    // H_else + |alpha| |0><0|_w + sqrt(|alpha| Delta / 2)(sgn(alpha) A - B) X_w
    // (equal after A^2 = B^2 = I simplification, up to coefficient rounding)
    debug_assert!({
        let root = (alpha.abs() * delta / 2.0).sqrt();
        let summary = target
            .h_else()
            .embedded(n)
            .and_then(|h| h.add(&p0.scale(alpha.abs())))
            .and_then(|h| h.add(&coupled_sum(n, &[(root * sgn(alpha), a), (-root, b)], &xw)?))
            .expect("summary form assembles");
        let scale = delta.max(1.0);
        summary
            .sub(&v)
            .expect("same register")
            .terms()
            .iter()
            .all(|t| t.coeff.abs() <= 1e-12 * scale)
    });

    let penalty = penalty_hamiltonian(n, &[w], delta)?;
    let effective = effective_target_op(&target.operator()?, n, &[w])?;
    let k = a.weight() + b.weight();
    let cap = (a.weight().max(b.weight()) + 1)
        .max(target.h_else().locality())
        .max(k.div_ceil(2) + 1);
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

/// Parallel subdivision over m product terms, one ancilla per term. The
/// square compensation enters with an identity instead of the ancilla
/// projector: the all-zero projector is not 2-body realizable for m >= 3.
pub fn build_parallel_subdivision_gadget(target: &TargetSpec, delta: f64) -> Result<GadgetBuild> {
    if target.interactions().is_empty() {
        return Err(Error::Schema(
            "parallel subdivision needs at least one interaction".into(),
        ));
    }
    for (_, factors) in target.interactions() {
        if factors.len() != 2 {
            return Err(Error::Schema(
                "parallel subdivision needs two factor groups per interaction".into(),
            ));
        }
    }
    let n_sys = target.n_qubits();
    let m = target.interactions().len();
    let n = n_sys + m;
    let ancillas: Vec<usize> = (0..m).map(|i| n_sys + i).collect();

    let mut v = target.h_else().embedded(n)?;
    for (i, (alpha, factors)) in target.interactions().iter().enumerate() {
        let (a, b) = (&factors[0], &factors[1]);
        let (kappa, lambda) = subdivision_coefficients(*alpha, delta);
        // (kappa^2 A^2 + lambda^2 B^2)/Delta, without the ancilla projector
        let a_op = OperatorSum::single(n, 1.0, a.clone())?;
        let b_op = OperatorSum::single(n, 1.0, b.clone())?;
        let squares = a_op
            .square()?
            .scale(kappa * kappa)
            .add(&b_op.square()?.scale(lambda * lambda))?
            .scale(1.0 / delta);
        v = v.add(&squares)?;
        let xw = PauliString::single(ancillas[i], Axis::X);
        v = v.add(&coupled_sum(n, &[(kappa, a), (lambda, b)], &xw)?)?;
    }

    let penalty = penalty_hamiltonian(n, &ancillas, delta)?;
    let effective = effective_target_op(&target.operator()?, n, &ancillas)?;
    let cap = target
        .interactions()
        .iter()
        .map(|(_, f)| f[0].weight().max(f[1].weight()) + 1)
        .max()
        .unwrap_or(1)
        .max(target.h_else().locality())
        .max(2);
    let labels = ancillas
        .iter()
        .enumerate()
        .map(|(i, &q)| (format!("w{}", i + 1), q))
        .collect();
    assemble(penalty, v, labels, delta, effective, n_sys, cap)
}
