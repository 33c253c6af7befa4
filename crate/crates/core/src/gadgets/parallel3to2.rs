//! Parallel 3-to-2-body gadget: reduces a sum of 3-body terms concurrently,
//! one ancilla per term, with cross-gadget compensation terms keyed to the
//! commutation relations between the factor operators.

use crate::error::{Error, Result};
use crate::pauli::{commutes, projector_term, Axis, OperatorSum, PauliString};

use super::three_to_two::{improved_coefficients, ot06_coefficients, validate_three_body};
use super::{
    assemble, coupled_sum, effective_target_op, penalty_hamiltonian, GadgetBuild, TargetSpec,
    ThreeToTwoVariant,
};

/// Commutation flags between two 3-body interactions (i, j):
/// s11 fires when exactly one same-letter pair anticommutes, s12 when a
/// cross pair anticommutes, s2 when both same-letter pairs anticommute,
/// s0 when all four pairs commute. s1 = min(s11 + s12, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommutationProfile {
    pub s0: u8,
    pub s11: u8,
    pub s12: u8,
    pub s1: u8,
    pub s2: u8,
}

/// How the s1 factor in the cross compensation is read: as an indicator
/// (default) or as the literal count s11 + s12. Under the increasing
/// qubit-order convention the two never differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum S1Mode {
    #[default]
    Indicator,
    Count,
}

/// Classifies the commutation relations between two 3-body interactions.
pub fn commutation_profile(
    factors_i: &[PauliString],
    factors_j: &[PauliString],
) -> Result<CommutationProfile> {
    let (ai, bi, _) = validate_three_body(factors_i)?;
    let (aj, bj, _) = validate_three_body(factors_j)?;
    let aa = commutes(ai, aj);
    let bb = commutes(bi, bj);
    let ab = commutes(ai, bj);
    let ba = commutes(bi, aj);
    let s11 = u8::from((!aa && bb) || (!bb && aa));
    let s12 = u8::from(!ab || !ba);
    let s2 = u8::from(!aa && !bb);
    let s0 = u8::from(aa && bb && ab && ba);
    Ok(CommutationProfile {
        s0,
        s11,
        s12,
        s1: (s11 + s12).min(1),
        s2,
    })
}

/// Options for the parallel 3-to-2 construction.
#[derive(Debug, Clone)]
pub struct ParallelThreeToTwoOptions {
    /// Include the cross-gadget compensation V3 (and everything keyed to it).
    pub include_v3: bool,
    /// Replace 4-operator compensation products with dedicated sub-gadgets
    /// and compensate the sub-gadget channel interference with 2-body terms.
    pub include_4local_gadgets: bool,
    pub s1_mode: S1Mode,
    pub variant: ThreeToTwoVariant,
}

impl Default for ParallelThreeToTwoOptions {
    fn default() -> Self {
        ParallelThreeToTwoOptions {
            include_v3: true,
            include_4local_gadgets: true,
            s1_mode: S1Mode::Indicator,
            variant: ThreeToTwoVariant::Improved,
        }
    }
}

struct TermData {
    kappa: f64,
    lambda: f64,
    mu: f64,
    a: PauliString,
    b: PauliString,
    c: PauliString,
    ancilla: usize,
}

/// Parallel 3-to-2-body gadget for H_else + sum_i alpha_i A_i B_i C_i.
/// Factor qubits must be strictly increasing within each term.
pub fn build_parallel_three_to_two_gadget(
    target: &TargetSpec,
    delta: f64,
    options: &ParallelThreeToTwoOptions,
) -> Result<GadgetBuild> {
    let m = target.interactions().len();
    if m == 0 {
        return Err(Error::Schema(
            "parallel 3-to-2 needs at least one interaction".into(),
        ));
    }
    for (_, factors) in target.interactions() {
        let (a, b, c) = validate_three_body(factors)?;
        let (qa, qb, qc) = (a.factors()[0].0, b.factors()[0].0, c.factors()[0].0);
        if !(qa < qb && qb < qc) {
            return Err(Error::Schema(format!(
                "factor qubits must be strictly increasing, got ({}, {}, {})",
                qa, qb, qc
            )));
        }
    }
    let n_sys = target.n_qubits();

    // primary ancillas u_1..u_m, then one ancilla per s2 pair when sub-gadgets
    // are requested
    let improved = options.variant == ThreeToTwoVariant::Improved;
    let with_subs = improved && options.include_v3 && options.include_4local_gadgets;
    let mut sub_pairs: Vec<(usize, usize)> = Vec::new();
    if with_subs {
        for i in 0..m {
            for j in (i + 1)..m {
                let prof =
                    commutation_profile(&target.interactions()[i].1, &target.interactions()[j].1)?;
                if prof.s2 == 1 {
                    sub_pairs.push((i, j));
                }
            }
        }
    }
    let n = n_sys + m + sub_pairs.len();

    let mut terms = Vec::with_capacity(m);
    for (i, (alpha, factors)) in target.interactions().iter().enumerate() {
        let (kappa, lambda, mu) = match options.variant {
            ThreeToTwoVariant::Improved => improved_coefficients(*alpha, delta),
            ThreeToTwoVariant::Ot06 => ot06_coefficients(*alpha, delta),
        };
        terms.push(TermData {
            kappa,
            lambda,
            mu,
            a: factors[0].clone(),
            b: factors[1].clone(),
            c: factors[2].clone(),
            ancilla: n_sys + i,
        });
    }

    let pair_op = |t: &TermData| -> Result<OperatorSum> {
        super::weighted_pair(n, t.kappa, &t.a, t.lambda, &t.b)
    };

    let mut v = target.h_else().embedded(n)?;
    for t in &terms {
        let p1 = projector_term(n, t.ancilla, 1)?;
        let c_op = OperatorSum::single(n, t.mu, t.c.clone())?;
        v = v.add(&c_op.product(&p1)?.into_real()?)?;
        let xw = PauliString::single(t.ancilla, Axis::X);
        v = v.add(&coupled_sum(n, &[(t.kappa, &t.a), (t.lambda, &t.b)], &xw)?)?;
        // V1: (kappa A + lambda B)^2 / D - (kappa^2 + lambda^2) mu C / D^2
        let w = pair_op(t)?;
        v = v.add(&w.square()?.scale(1.0 / delta))?;
        let kk_ll = t.kappa * t.kappa + t.lambda * t.lambda;
        v = v.add(&OperatorSum::single(
            n,
            -kk_ll * t.mu / (delta * delta),
            t.c.clone(),
        )?)?;
        if improved {
            // V2: -(kappa A + lambda B)^4 / D^3
            let w2 = w.square()?;
            v = v.add(&w2.square()?.scale(-1.0 / delta.powi(3)))?;
        }
    }

    if improved && options.include_v3 {
        // V3 = sum over ordered pairs of Vbar_ij
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                let prof =
                    commutation_profile(&target.interactions()[i].1, &target.interactions()[j].1)?;
                let s1 = match options.s1_mode {
                    S1Mode::Indicator => prof.s1 as f64,
                    S1Mode::Count => (prof.s11 + prof.s12) as f64,
                };
                let (ti, tj) = (&terms[i], &terms[j]);
                let kk2 = (ti.kappa * tj.kappa).powi(2);
                let mut shift = -s1 * kk2 / delta.powi(3);
                if prof.s2 == 1 {
                    shift -= 2.0 * kk2 / delta.powi(3);
                }
                if shift != 0.0 {
                    v = v.add(&OperatorSum::identity(n, shift))?;
                }
                if prof.s2 == 1 && !with_subs {
                    // raw 4-operator compensation + (2/D^3) k_i k_j l_i l_j A_i A_j B_i B_j
                    let prod = OperatorSum::single(n, 1.0, ti.a.clone())?
                        .product(&OperatorSum::single(n, 1.0, tj.a.clone())?)?
                        .right_mul(&OperatorSum::single(n, 1.0, ti.b.clone())?)?
                        .right_mul(&OperatorSum::single(n, 1.0, tj.b.clone())?)?
                        .into_real()?;
                    let coeff = 2.0 * ti.kappa * tj.kappa * ti.lambda * tj.lambda / delta.powi(3);
                    v = v.add(&prod.scale(coeff))?;
                }
            }
        }
    }

    // sub-gadgets generating the 4-operator compensation for s2 pairs
    let mut sub_channels: Vec<OperatorSum> = Vec::new();
    let mut ancilla_labels: Vec<(String, usize)> = terms
        .iter()
        .enumerate()
        .map(|(i, t)| (format!("u{}", i + 1), t.ancilla))
        .collect();
    for (k, &(i, j)) in sub_pairs.iter().enumerate() {
        let u = n_sys + m + k;
        ancilla_labels.push((format!("u{}_{}", i + 1, j + 1), u));
        let (ti, tj) = (&terms[i], &terms[j]);
        // X coupling P = kappa_i A_i + lambda_j B_j; penalized coupling
        // Q = kappa_j A_j - lambda_i B_i. The relative sign makes the
        // fourth-order product come out at +4 k k l l A_i A_j B_i B_j / D^3.
        let p = super::weighted_pair(n, ti.kappa, &ti.a, tj.lambda, &tj.b)?;
        let xw = PauliString::single(u, Axis::X);
        v = v.add(&coupled_sum(
            n,
            &[(ti.kappa, &ti.a), (tj.lambda, &tj.b)],
            &xw,
        )?)?;
        let q = super::weighted_pair(n, tj.kappa, &tj.a, -ti.lambda, &ti.b)?;
        let p1 = projector_term(n, u, 1)?;
        v = v.add(&q.product(&p1)?.into_real()?)?;

        // compensations: second order, self-channel third order, and the
        // fourth-order residues outside the wanted 4-operator term
        let p2 = p.square()?;
        v = v.add(&p2.scale(1.0 / delta))?;
        v = v.add(&p2.square()?.scale(-1.0 / delta.powi(3)))?;
        let kk_ll = tj.kappa * tj.kappa + ti.lambda * ti.lambda;
        v = v.add(&p2.scale(kk_ll / delta.powi(3)))?;
        let ajbi = tj.a.join_disjoint(&ti.b)?;
        let coeff = 2.0 * tj.kappa * ti.lambda * (ti.kappa * ti.kappa + tj.lambda * tj.lambda)
            / delta.powi(3);
        v = v.add(&OperatorSum::single(n, coeff, ajbi)?)?;
        let r = super::weighted_pair(n, tj.kappa, &tj.a, ti.lambda, &ti.b)?;
        let third = tj.lambda * tj.lambda - ti.kappa * ti.kappa;
        v = v.add(&r.scale(-third / (delta * delta)))?;

        sub_channels.push(p);
    }

    // channel interference between sub-gadgets and everything else is a
    // case-1-style Theta(1) shift; compensate with +[W_p, W_q]^2 / (2 D^3)
    if !sub_channels.is_empty() {
        let mut channels: Vec<OperatorSum> = Vec::new();
        for t in &terms {
            channels.push(pair_op(t)?);
        }
        let first_sub = channels.len();
        channels.extend(sub_channels.iter().cloned());
        for p in 0..channels.len() {
            for q in (p + 1)..channels.len() {
                if q < first_sub {
                    continue; // main-main pairs are already covered by V3
                }
                let comm = channels[p].commutator(&channels[q])?;
                let comp = comm.square_real()?.scale(0.5 / delta.powi(3));
                if comp.is_zero() {
                    continue;
                }
                let kept: Vec<_> = comp
                    .terms()
                    .iter()
                    .filter(|t| t.string.weight() <= 2)
                    .cloned()
                    .collect();
                if kept.len() != comp.terms().len() {
                    log::warn!("dropping >2-local channel-interference compensation terms");
                }
                v = v.add(&OperatorSum::from_terms(n, kept)?)?;
            }
        }
    }

    let ancilla_indices: Vec<usize> = ancilla_labels.iter().map(|&(_, q)| q).collect();
    let penalty = penalty_hamiltonian(n, &ancilla_indices, delta)?;
    let effective = effective_target_op(&target.operator()?, n, &ancilla_indices)?;
    let cap = 2.max(target.h_else().locality());
    assemble(penalty, v, ancilla_labels, delta, effective, n_sys, cap)
}
