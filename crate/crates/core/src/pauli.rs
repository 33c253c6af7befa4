//! Real-weighted Pauli-string algebra.
//!
//! Hermitian operators on `n` qubits are stored as canonical sums of Pauli
//! strings with real coefficients. Products of strings carry a quarter phase
//! (±1, ±i); products of operator sums accumulate complex coefficients
//! internally and are converted back to real sums once the expression is
//! Hermitian. Qubit 0 is the least significant bit of the basis index.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped during canonicalization.
pub const COEFF_TOL: f64 = 1e-12;

/// Default cap on dense realizations, overridable via `GADGETFORGE_MAX_QUBITS`.
pub const DEFAULT_MAX_QUBITS: usize = 14;

/// Dense-matrix qubit cap currently in effect.
pub fn max_qubits() -> usize {
    std::env::var("GADGETFORGE_MAX_QUBITS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::X => "X",
            Axis::Y => "Y",
            Axis::Z => "Z",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Quarter phase i^k accumulated by Pauli-string products.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Phase(u8);

impl Phase {
    pub const ONE: Phase = Phase(0);
    pub const I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn times(self, other: Phase) -> Phase {
        Phase((self.0 + other.0) % 4)
    }

    pub fn as_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

/// Product table for single-qubit Paulis: returns (phase, result axis or identity).
fn axis_product(a: Axis, b: Axis) -> (Phase, Option<Axis>) {
    use Axis::*;
    if a == b {
        return (Phase::ONE, None);
    }
    match (a, b) {
        (X, Y) => (Phase::I, Some(Z)),
        (Y, X) => (Phase::MINUS_I, Some(Z)),
        (Y, Z) => (Phase::I, Some(X)),
        (Z, Y) => (Phase::MINUS_I, Some(X)),
        (Z, X) => (Phase::I, Some(Y)),
        (X, Z) => (Phase::MINUS_I, Some(Y)),
        _ => unreachable!(),
    }
}

/// Tensor product of single-qubit Paulis on strictly increasing qubit indices.
/// The empty string is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PauliString {
    factors: Vec<(usize, Axis)>,
}

impl PauliString {
    pub fn identity() -> Self {
        PauliString::default()
    }

    pub fn single(qubit: usize, axis: Axis) -> Self {
        PauliString {
            factors: vec![(qubit, axis)],
        }
    }

    /// Builds a string from factors in any order; duplicate qubits are rejected.
    pub fn new(mut factors: Vec<(usize, Axis)>) -> Result<Self> {
        factors.sort_by_key(|&(q, _)| q);
        for w in factors.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DuplicateQubit { qubit: w[0].0 });
            }
        }
        Ok(PauliString { factors })
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.factors.len()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.iter().map(|&(q, _)| q)
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.factors.last().map(|&(q, _)| q)
    }

    pub fn axis_on(&self, qubit: usize) -> Option<Axis> {
        self.factors
            .binary_search_by_key(&qubit, |&(q, _)| q)
            .ok()
            .map(|i| self.factors[i].1)
    }

    /// Whether the supports of `self` and `other` are disjoint.
    pub fn disjoint(&self, other: &PauliString) -> bool {
        self.factors
            .iter()
            .all(|&(q, _)| other.axis_on(q).is_none())
    }

    /// Union of two strings on disjoint supports.
    pub fn join_disjoint(&self, other: &PauliString) -> Result<PauliString> {
        for &(q, _) in &other.factors {
            if self.axis_on(q).is_some() {
                return Err(Error::OverlappingSupports { qubit: q });
            }
        }
        let mut factors = self.factors.clone();
        factors.extend_from_slice(&other.factors);
        PauliString::new(factors)
    }

    /// Relabels qubits through `perm` (old index -> new index).
    pub fn permute(&self, perm: &[usize]) -> Result<PauliString> {
        let factors = self
            .factors
            .iter()
            .map(|&(q, ax)| {
                perm.get(q).map(|&p| (p, ax)).ok_or(Error::QubitOutOfRange {
                    qubit: q,
                    n_qubits: perm.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliString::new(factors)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return f.write_str("I");
        }
        for (i, (q, ax)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}{}", ax, q)?;
        }
        Ok(())
    }
}

/// Product of two Pauli strings: realized matrices satisfy
/// `M(a) * M(b) = phase * M(product)`.
pub fn multiply(a: &PauliString, b: &PauliString) -> (Phase, PauliString) {
    let mut phase = Phase::ONE;
    let mut factors = Vec::with_capacity(a.factors.len() + b.factors.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.factors.len() || j < b.factors.len() {
        match (a.factors.get(i), b.factors.get(j)) {
            (Some(&(qa, xa)), Some(&(qb, xb))) if qa == qb => {
                let (p, ax) = axis_product(xa, xb);
                phase = phase.times(p);
                if let Some(ax) = ax {
                    factors.push((qa, ax));
                }
                i += 1;
                j += 1;
            }
            (Some(&(qa, xa)), Some(&(qb, _))) if qa < qb => {
                factors.push((qa, xa));
                i += 1;
            }
            (Some(_), Some(&(qb, xb))) => {
                factors.push((qb, xb));
                j += 1;
            }
            (Some(&(qa, xa)), None) => {
                factors.push((qa, xa));
                i += 1;
            }
            (None, Some(&(qb, xb))) => {
                factors.push((qb, xb));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    (phase, PauliString { factors })
}

/// True iff the realized matrices commute: the number of qubit positions
/// where both strings act with different axes must be even.
pub fn commutes(a: &PauliString, b: &PauliString) -> bool {
    let mut clashes = 0usize;
    for &(q, xa) in &a.factors {
        if let Some(xb) = b.axis_on(q) {
            if xa != xb {
                clashes += 1;
            }
        }
    }
    clashes.is_multiple_of(2)
}

/// One Hermitian term: a real coefficient on a Pauli string.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub coeff: f64,
    pub string: PauliString,
}

impl PauliTerm {
    pub fn new(coeff: f64, string: PauliString) -> Self {
        PauliTerm { coeff, string }
    }
}

/// Canonical real-weighted sum of Pauli strings on a fixed qubit register.
///
/// Canonical form: at most one term per distinct string, terms sorted by
/// string, coefficients with |c| < [`COEFF_TOL`] removed.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSum {
    n_qubits: usize,
    terms: Vec<PauliTerm>,
}

impl OperatorSum {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits > 0, "operator needs a positive qubit count");
        OperatorSum {
            n_qubits,
            terms: Vec::new(),
        }
    }

    pub fn identity(n_qubits: usize, coeff: f64) -> Self {
        Self::from_terms(
            n_qubits,
            vec![PauliTerm::new(coeff, PauliString::identity())],
        )
        .expect("identity is always valid")
    }

    pub fn from_terms(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        for t in &terms {
            if let Some(q) = t.string.max_qubit() {
                if q >= n_qubits {
                    return Err(Error::QubitOutOfRange { qubit: q, n_qubits });
                }
            }
            if !t.coeff.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "non-finite coefficient {} on {}",
                    t.coeff, t.string
                )));
            }
        }
        let mut op = OperatorSum { n_qubits, terms };
        op.canonicalize();
        Ok(op)
    }

    pub fn single(n_qubits: usize, coeff: f64, string: PauliString) -> Result<Self> {
        Self::from_terms(n_qubits, vec![PauliTerm::new(coeff, string)])
    }

    fn canonicalize(&mut self) {
        // like-term coefficients are sorted before summation so the merged
        // value does not depend on the input term order
        let mut merged: BTreeMap<PauliString, Vec<f64>> = BTreeMap::new();
        for t in self.terms.drain(..) {
            merged.entry(t.string).or_default().push(t.coeff);
        }
        self.terms = merged
            .into_iter()
            .filter_map(|(s, mut cs)| {
                cs.sort_by(f64::total_cmp);
                let c: f64 = cs.iter().sum();
                (c.abs() >= COEFF_TOL).then(|| PauliTerm::new(c, s))
            })
            .collect();
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        self.terms
            .binary_search_by(|t| t.string.cmp(string))
            .map(|i| self.terms[i].coeff)
            .unwrap_or(0.0)
    }

    /// Reinterprets this operator on a larger register (indices unchanged).
    pub fn embedded(&self, n_qubits: usize) -> Result<OperatorSum> {
        if n_qubits < self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: n_qubits,
            });
        }
        Ok(OperatorSum {
            n_qubits,
            terms: self.terms.clone(),
        })
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        OperatorSum::from_terms(self.n_qubits, terms)
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, c: f64) -> OperatorSum {
        let mut op = OperatorSum {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| PauliTerm::new(t.coeff * c, t.string.clone()))
                .collect(),
        };
        op.canonicalize();
        op
    }

    pub fn add_assign(&mut self, other: &OperatorSum) -> Result<()> {
        *self = self.add(other)?;
        Ok(())
    }

    /// Maximum number of qubit factors over all terms; 0 for zero/identity.
    pub fn locality(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.string.weight())
            .max()
            .unwrap_or(0)
    }

    /// Sum of |coefficients|, an upper bound on the operator norm.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.abs()).sum()
    }

    /// Product with complex bookkeeping; see [`ComplexOpSum::into_real`].
    pub fn product(&self, other: &OperatorSum) -> Result<ComplexOpSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut out = ComplexOpSum::zero(self.n_qubits);
        for a in &self.terms {
            for b in &other.terms {
                let (phase, string) = multiply(&a.string, &b.string);
                let c = phase.as_complex() * Complex64::new(a.coeff * b.coeff, 0.0);
                out.accumulate(string, c);
            }
        }
        Ok(out)
    }

    /// `self * self`; Hermitian, so the result is again a real sum.
    pub fn square(&self) -> Result<OperatorSum> {
        self.product(self)?.into_real()
    }

    /// `outer * inner * outer` for Hermitian `outer`, `inner`.
    pub fn sandwich(&self, inner: &OperatorSum) -> Result<OperatorSum> {
        let oi = self.product(inner)?;
        oi.right_mul(self)?.into_real()
    }

    /// Commutator `[self, other]` (anti-Hermitian, kept complex).
    pub fn commutator(&self, other: &OperatorSum) -> Result<ComplexOpSum> {
        let ab = self.product(other)?;
        let ba = other.product(self)?;
        Ok(ab.sub(&ba))
    }

    /// Relabels qubits through `perm` (old index -> new index; a bijection on 0..n).
    pub fn permute_qubits(&self, perm: &[usize]) -> Result<OperatorSum> {
        if perm.len() != self.n_qubits {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: perm.len(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Ok(PauliTerm::new(t.coeff, t.string.permute(perm)?)))
            .collect::<Result<Vec<_>>>()?;
        OperatorSum::from_terms(self.n_qubits, terms)
    }

    /// True iff the dense realization has no imaginary entries
    /// (every term carries an even number of Y factors).
    pub fn is_real_matrix(&self) -> bool {
        self.terms.iter().all(|t| {
            t.string
                .factors()
                .iter()
                .filter(|&&(_, ax)| ax == Axis::Y)
                .count()
                % 2
                == 0
        })
    }

    /// True iff every string is diagonal (Z factors only).
    pub fn is_diagonal(&self) -> bool {
        self.terms
            .iter()
            .all(|t| t.string.factors().iter().all(|&(_, ax)| ax == Axis::Z))
    }

    /// Diagonal of the realization, available without the dense matrix when
    /// the operator is diagonal.
    pub fn diagonal(&self) -> Result<Vec<f64>> {
        if !self.is_diagonal() {
            return Err(Error::NonDiagonalPenalty);
        }
        self.check_dim()?;
        let dim = 1usize << self.n_qubits;
        let mut diag = vec![0.0; dim];
        for t in &self.terms {
            for (j, d) in diag.iter_mut().enumerate() {
                let mut sign = 1.0;
                for &(q, _) in t.string.factors() {
                    if (j >> q) & 1 == 1 {
                        sign = -sign;
                    }
                }
                *d += t.coeff * sign;
            }
        }
        Ok(diag)
    }

    fn check_dim(&self) -> Result<()> {
        let cap = max_qubits();
        if self.n_qubits > cap {
            return Err(Error::DimensionOverflow {
                qubits: self.n_qubits,
                max: cap,
            });
        }
        Ok(())
    }

    /// Dense Hermitian realization; qubit 0 is the least significant bit.
    pub fn to_matrix(&self) -> Result<DMatrix<Complex64>> {
        self.check_dim()?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for t in &self.terms {
            for col in 0..dim {
                let (row, amp) = apply_string(&t.string, col);
                m[(row, col)] += amp * t.coeff;
            }
        }
        Ok(m)
    }

    /// Dense real realization; `None` when the operator has imaginary entries.
    pub fn to_matrix_real(&self) -> Result<Option<DMatrix<f64>>> {
        if !self.is_real_matrix() {
            return Ok(None);
        }
        self.check_dim()?;
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for t in &self.terms {
            for col in 0..dim {
                let (row, amp) = apply_string(&t.string, col);
                debug_assert!(amp.im == 0.0);
                m[(row, col)] += amp.re * t.coeff;
            }
        }
        Ok(Some(m))
    }
}

/// Action of a Pauli string on basis state `col`: returns the image basis
/// state and amplitude.
fn apply_string(s: &PauliString, col: usize) -> (usize, Complex64) {
    let mut row = col;
    let mut amp = Complex64::new(1.0, 0.0);
    for &(q, ax) in s.factors() {
        let bit = (col >> q) & 1;
        match ax {
            Axis::X => row ^= 1 << q,
            Axis::Y => {
                row ^= 1 << q;
                amp *= if bit == 0 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(0.0, -1.0)
                };
            }
            Axis::Z => {
                if bit == 1 {
                    amp = -amp;
                }
            }
        }
    }
    (row, amp)
}

/// Projector onto level 0 or 1 of one qubit, expanded as (I ± Z)/2.
pub fn projector_term(n_qubits: usize, qubit: usize, level: u8) -> Result<OperatorSum> {
    if qubit >= n_qubits {
        return Err(Error::QubitOutOfRange { qubit, n_qubits });
    }
    let sign = if level == 0 { 0.5 } else { -0.5 };
    OperatorSum::from_terms(
        n_qubits,
        vec![
            PauliTerm::new(0.5, PauliString::identity()),
            PauliTerm::new(sign, PauliString::single(qubit, Axis::Z)),
        ],
    )
}

/// Projector onto the all-zero state of the listed qubits.
pub fn projector_all_zero(n_qubits: usize, qubits: &[usize]) -> Result<OperatorSum> {
    let mut p = OperatorSum::identity(n_qubits, 1.0);
    for &q in qubits {
        let pq = projector_term(n_qubits, q, 0)?;
        p = p.product(&pq)?.into_real()?;
    }
    Ok(p)
}

/// Intermediate complex-weighted sum used while multiplying operators.
/// Hermitian expressions collapse back to real sums via [`Self::into_real`].
#[derive(Debug, Clone)]
pub struct ComplexOpSum {
    n_qubits: usize,
    terms: BTreeMap<PauliString, Complex64>,
}

impl ComplexOpSum {
    pub fn zero(n_qubits: usize) -> Self {
        ComplexOpSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn accumulate(&mut self, string: PauliString, c: Complex64) {
        let e = self.terms.entry(string).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
    }

    pub fn sub(&self, other: &ComplexOpSum) -> ComplexOpSum {
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.accumulate(s.clone(), -c);
        }
        out
    }

    pub fn right_mul(&self, op: &OperatorSum) -> Result<ComplexOpSum> {
        if self.n_qubits != op.n_qubits() {
            return Err(Error::QubitCountMismatch {
                left: self.n_qubits,
                right: op.n_qubits(),
            });
        }
        let mut out = ComplexOpSum::zero(self.n_qubits);
        for (s, c) in &self.terms {
            for b in op.terms() {
                let (phase, string) = multiply(s, &b.string);
                out.accumulate(string, c * phase.as_complex() * b.coeff);
            }
        }
        Ok(out)
    }

    /// Converts to a real sum; errors if imaginary parts survive beyond
    /// cancellation dust.
    pub fn into_real(self) -> Result<OperatorSum> {
        let scale = self
            .terms
            .values()
            .map(|c| c.norm())
            .fold(0.0f64, f64::max)
            .max(1.0);
        let mut max_imag = 0.0f64;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (s, c) in self.terms {
            max_imag = max_imag.max(c.im.abs());
            terms.push(PauliTerm::new(c.re, s));
        }
        if max_imag > 1e-9 * scale {
            return Err(Error::NonRealCoefficients { max_imag });
        }
        OperatorSum::from_terms(self.n_qubits, terms)
    }

    /// Squares this (possibly anti-Hermitian) sum; the result of squaring a
    /// commutator of Hermitian operators is Hermitian.
    pub fn square_real(&self) -> Result<OperatorSum> {
        let mut out = ComplexOpSum::zero(self.n_qubits);
        for (sa, ca) in &self.terms {
            for (sb, cb) in &self.terms {
                let (phase, string) = multiply(sa, sb);
                out.accumulate(string, ca * cb * phase.as_complex());
            }
        }
        out.into_real()
    }
}

// ---------------------------------------------------------------------------
// JSON form: {"n_qubits": 3, "terms": [{"coeff": 0.1, "paulis": [[0,"X"]]}]}
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermRepr {
    coeff: f64,
    paulis: Vec<(usize, Axis)>,
}

#[derive(Serialize, Deserialize)]
struct OperatorSumRepr {
    n_qubits: usize,
    terms: Vec<TermRepr>,
}

impl Serialize for OperatorSum {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = OperatorSumRepr {
            n_qubits: self.n_qubits,
            terms: self
                .terms
                .iter()
                .map(|t| TermRepr {
                    coeff: t.coeff,
                    paulis: t.string.factors().to_vec(),
                })
                .collect(),
        };
        repr.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for OperatorSum {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let repr = OperatorSumRepr::deserialize(de)?;
        let terms = repr
            .terms
            .into_iter()
            .map(|t| {
                Ok(PauliTerm::new(
                    t.coeff,
                    PauliString::new(t.paulis).map_err(serde::de::Error::custom)?,
                ))
            })
            .collect::<std::result::Result<Vec<_>, D::Error>>()?;
        OperatorSum::from_terms(repr.n_qubits, terms).map_err(serde::de::Error::custom)
    }
}
