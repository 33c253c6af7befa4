//! Fifth-order ZZZ gadget: builds alpha Z_i Z_j Z_k from a transverse-field
//! Ising Hamiltonian, with the 3-body term arising at fifth order.

use crate::error::{Error, Result};
use crate::pauli::{projector_term, Axis, OperatorSum, PauliString, PauliTerm};

use super::{assemble, effective_target_op, penalty_hamiltonian, sgn, GadgetBuild, TargetSpec};

/// True iff every string lies in the transverse Ising family
/// {I, X_i, Z_i, Z_i Z_j}.
pub fn is_transverse_ising_family(op: &OperatorSum) -> bool {
    op.terms().iter().all(|t| {
        let f = t.string.factors();
        match f.len() {
            0 => true,
            1 => f[0].1 != Axis::Y,
            2 => f.iter().all(|&(_, ax)| ax == Axis::Z),
            _ => false,
        }
    })
}

/// Fifth-order gadget for H_else + alpha Z_i Z_j Z_k:
/// V = H_else + mu (Z_i+Z_j+Z_k) (x) |1><1|_w + mu X_w + V_comp,
/// mu = sgn(alpha) |alpha Delta^4 / 6|^(1/5). Negative alpha is absorbed by
/// the sign of mu, which flips all odd powers consistently.
pub fn build_fifth_order_zzz_gadget(target: &TargetSpec, delta: f64) -> Result<GadgetBuild> {
    let (alpha, qubits) = match target.interactions() {
        [(alpha, factors)] => {
            let (a, b, c) = super::three_to_two::validate_three_body(factors)?;
            for f in [a, b, c] {
                if f.factors()[0].1 != Axis::Z {
                    return Err(Error::Schema(
                        "fifth-order gadget factors must all be Z".into(),
                    ));
                }
            }
            (
                *alpha,
                [a.factors()[0].0, b.factors()[0].0, c.factors()[0].0],
            )
        }
        _ => {
            return Err(Error::Schema(
                "fifth-order gadget handles exactly one interaction".into(),
            ))
        }
    };
    let n_sys = target.n_qubits();
    let n = n_sys + 1;
    let w = n_sys;
    let mu = sgn(alpha) * (alpha.abs() * delta.powi(4) / 6.0).powf(0.2);

    let z_sum = OperatorSum::from_terms(
        n,
        qubits
            .iter()
            .map(|&q| PauliTerm::new(1.0, PauliString::single(q, Axis::Z)))
            .collect(),
    )?;
    let p0 = projector_term(n, w, 0)?;
    let p1 = projector_term(n, w, 1)?;

    let mut v = target.h_else().embedded(n)?;
    v = v.add(&z_sum.scale(mu).product(&p1)?.into_real()?)?;
    v = v.add(&OperatorSum::single(
        n,
        mu,
        PauliString::single(w, Axis::X),
    )?)?;

    // V_comp = mu^2/D |0><0| - (mu^3/D^2 + 7 mu^5/D^4)(Z_i+Z_j+Z_k) |0><0|
    //          + mu^4/D^3 (3 I + 2 Z_i Z_j + 2 Z_i Z_k + 2 Z_j Z_k)
    let d = delta;
    v = v.add(&p0.scale(mu.powi(2) / d))?;
    let odd = mu.powi(3) / d.powi(2) + 7.0 * mu.powi(5) / d.powi(4);
    v = v.add(&z_sum.scale(-odd).product(&p0)?.into_real()?)?;
    let mut pairs = OperatorSum::identity(n, 3.0);
    for (x, y) in [(0, 1), (0, 2), (1, 2)] {
        let zz = PauliString::new(vec![(qubits[x], Axis::Z), (qubits[y], Axis::Z)])?;
        pairs = pairs.add(&OperatorSum::single(n, 2.0, zz)?)?;
    }
    v = v.add(&pairs.scale(mu.powi(4) / d.powi(3)))?;

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
