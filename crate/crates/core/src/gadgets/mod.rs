//! Gadget Hamiltonian constructors and closed-form penalty-gap bounds.
//!
//! Every constructor assembles the same shape: a penalty Hamiltonian putting
//! an energy gap `delta` on freshly introduced ancilla qubits, plus a
//! perturbation engineered so the low-lying spectrum of penalty+perturbation
//! reproduces a target Hamiltonian. Ancillas are appended after the system
//! qubits in order of introduction.

mod bounds;
mod fifth_order;
mod parallel3to2;
mod subdivision;
mod three_to_two;
mod yy;

pub use bounds::{
    f_exponent, ot06_subdivision_delta_bound, ot06_subdivision_delta_bound_exact,
    parallel_high_order_bound, parallel_subdivision_delta_bound, subdivision_delta_bound,
    three_to_two_delta_bound, HighOrderBound,
};
pub use fifth_order::{build_fifth_order_zzz_gadget, is_transverse_ising_family};
pub use parallel3to2::{
    build_parallel_three_to_two_gadget, commutation_profile, CommutationProfile,
    ParallelThreeToTwoOptions, S1Mode,
};
pub use subdivision::{build_parallel_subdivision_gadget, build_subdivision_gadget};
pub use three_to_two::{build_three_to_two_gadget, ThreeToTwoVariant};
pub use yy::{build_yy_gadget, is_zzxx_family};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{projector_all_zero, projector_term, OperatorSum, PauliString, PauliTerm};
use crate::spectral::{self, SpectralReport, SubspaceSplit};

/// sgn with sgn(0) := +1, as used by every coefficient formula.
pub(crate) fn sgn(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// One gadgeted interaction: a coupling strength and the operator factors it
/// multiplies, acting on pairwise disjoint qubit sets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interaction {
    pub alpha: f64,
    pub factors: Vec<PauliStringRepr>,
}

/// Serialization shape of a Pauli string: a list of (qubit, axis) pairs.
pub type PauliStringRepr = Vec<(usize, crate::pauli::Axis)>;

/// A target Hamiltonian split into a spectator part and tagged interactions.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    h_else: OperatorSum,
    interactions: Vec<(f64, Vec<PauliString>)>,
}

impl TargetSpec {
    pub fn new(h_else: OperatorSum, interactions: Vec<(f64, Vec<PauliString>)>) -> Result<Self> {
        let n = h_else.n_qubits();
        for (alpha, factors) in &interactions {
            if !alpha.is_finite() {
                return Err(Error::InvalidParameter("alpha must be finite".into()));
            }
            if factors.is_empty() {
                return Err(Error::Schema(
                    "interaction needs at least one factor".into(),
                ));
            }
            let mut seen = std::collections::BTreeSet::new();
            for f in factors {
                if f.is_identity() {
                    return Err(Error::Schema("interaction factor must be non-empty".into()));
                }
                for q in f.support() {
                    if q >= n {
                        return Err(Error::QubitOutOfRange {
                            qubit: q,
                            n_qubits: n,
                        });
                    }
                    if !seen.insert(q) {
                        return Err(Error::OverlappingSupports { qubit: q });
                    }
                }
            }
        }
        Ok(TargetSpec {
            h_else,
            interactions,
        })
    }

    /// Target with no spectator part, a single interaction.
    pub fn product(n_qubits: usize, alpha: f64, factors: Vec<PauliString>) -> Result<Self> {
        TargetSpec::new(OperatorSum::zero(n_qubits), vec![(alpha, factors)])
    }

    pub fn n_qubits(&self) -> usize {
        self.h_else.n_qubits()
    }

    pub fn h_else(&self) -> &OperatorSum {
        &self.h_else
    }

    pub fn interactions(&self) -> &[(f64, Vec<PauliString>)] {
        &self.interactions
    }

    pub fn h_else_norm(&self) -> Result<f64> {
        spectral::operator_norm(&self.h_else)
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.interactions.iter().map(|&(a, _)| a).collect()
    }

    /// Full product string of one interaction (factors are disjoint).
    pub fn interaction_string(&self, idx: usize) -> Result<PauliString> {
        let (_, factors) = self
            .interactions
            .get(idx)
            .ok_or_else(|| Error::InvalidParameter(format!("no interaction {}", idx)))?;
        let mut s = PauliString::identity();
        for f in factors {
            s = s.join_disjoint(f)?;
        }
        Ok(s)
    }

    /// The represented Hamiltonian H_else + sum_i alpha_i * prod(factors_i).
    pub fn operator(&self) -> Result<OperatorSum> {
        let mut op = self.h_else.clone();
        for idx in 0..self.interactions.len() {
            let s = self.interaction_string(idx)?;
            let term = OperatorSum::single(self.n_qubits(), self.interactions[idx].0, s)?;
            op = op.add(&term)?;
        }
        Ok(op)
    }
}

// JSON shape: the pauli_core operator schema plus an `interactions` section.
#[derive(Serialize, Deserialize)]
struct TargetSpecRepr {
    #[serde(flatten)]
    h_else: OperatorSum,
    #[serde(default)]
    interactions: Vec<Interaction>,
}

impl Serialize for TargetSpec {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = TargetSpecRepr {
            h_else: self.h_else.clone(),
            interactions: self
                .interactions
                .iter()
                .map(|(alpha, factors)| Interaction {
                    alpha: *alpha,
                    factors: factors.iter().map(|f| f.factors().to_vec()).collect(),
                })
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for TargetSpec {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = TargetSpecRepr::deserialize(de)?;
        let interactions = repr
            .interactions
            .into_iter()
            .map(|i| {
                let factors = i
                    .factors
                    .into_iter()
                    .map(PauliString::new)
                    .collect::<Result<Vec<_>>>()
                    .map_err(serde::de::Error::custom)?;
                Ok((i.alpha, factors))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        TargetSpec::new(repr.h_else, interactions).map_err(serde::de::Error::custom)
    }
}

/// A constructed gadget: penalty H, perturbation V, their sum, and the
/// effective Hamiltonian the low-lying spectrum is meant to reproduce.
#[derive(Debug, Clone)]
pub struct GadgetBuild {
    pub penalty: OperatorSum,
    pub perturbation: OperatorSum,
    pub total: OperatorSum,
    pub ancillas: Vec<(String, usize)>,
    pub delta: f64,
    pub effective_target: OperatorSum,
    pub system_qubits: usize,
    pub locality_cap: usize,
}

impl GadgetBuild {
    pub fn n_qubits(&self) -> usize {
        self.total.n_qubits()
    }

    pub fn ancilla_indices(&self) -> Vec<usize> {
        self.ancillas.iter().map(|&(_, q)| q).collect()
    }

    /// Low/high split at cutoff Delta/2 over the ancilla register.
    pub fn split(&self) -> SubspaceSplit {
        SubspaceSplit::ancilla_ground(self.n_qubits(), &self.ancilla_indices(), self.delta / 2.0)
    }

    /// Lowest 2^n eigenvalues of the gadget against the target spectrum.
    pub fn spectral_error(&self, target: &OperatorSum) -> Result<SpectralReport> {
        spectral::spectral_error_ops(&self.total, self.system_qubits, target)
    }
}

/// Sum of Delta |1><1| over the listed ancillas.
pub(crate) fn penalty_hamiltonian(
    n_qubits: usize,
    ancillas: &[usize],
    delta: f64,
) -> Result<OperatorSum> {
    let mut h = OperatorSum::zero(n_qubits);
    for &a in ancillas {
        h = h.add(&projector_term(n_qubits, a, 1)?.scale(delta))?;
    }
    Ok(h)
}

/// H_targ tensored with the projector onto the all-ancilla-zero sector.
pub(crate) fn effective_target_op(
    target_on_system: &OperatorSum,
    n_qubits: usize,
    ancillas: &[usize],
) -> Result<OperatorSum> {
    let p = projector_all_zero(n_qubits, ancillas)?;
    target_on_system
        .embedded(n_qubits)?
        .product(&p)?
        .into_real()
}

/// Shared final assembly and invariant checks.
pub(crate) fn assemble(
    penalty: OperatorSum,
    perturbation: OperatorSum,
    ancillas: Vec<(String, usize)>,
    delta: f64,
    effective_target: OperatorSum,
    system_qubits: usize,
    locality_cap: usize,
) -> Result<GadgetBuild> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    let total = penalty.add(&perturbation)?;
    let built = GadgetBuild {
        penalty,
        perturbation,
        total,
        ancillas,
        delta,
        effective_target,
        system_qubits,
        locality_cap,
    };
    debug_assert!(
        built.total.locality() <= built.locality_cap,
        "locality {} exceeds declared cap {}",
        built.total.locality(),
        built.locality_cap
    );
    Ok(built)
}

/// Helper: coefficient-weighted sum of factor strings coupled to one shared
/// string (e.g. kappa A (x) X_w + lambda B (x) X_w).
pub(crate) fn coupled_sum(
    n_qubits: usize,
    weighted: &[(f64, &PauliString)],
    shared: &PauliString,
) -> Result<OperatorSum> {
    let terms = weighted
        .iter()
        .map(|&(c, s)| Ok(PauliTerm::new(c, s.join_disjoint(shared)?)))
        .collect::<Result<Vec<_>>>()?;
    OperatorSum::from_terms(n_qubits, terms)
}

/// Helper: kappa A + lambda B as an operator on `n_qubits`.
pub(crate) fn weighted_pair(
    n_qubits: usize,
    kappa: f64,
    a: &PauliString,
    lambda: f64,
    b: &PauliString,
) -> Result<OperatorSum> {
    OperatorSum::from_terms(
        n_qubits,
        vec![
            PauliTerm::new(kappa, a.clone()),
            PauliTerm::new(lambda, b.clone()),
        ],
    )
}
