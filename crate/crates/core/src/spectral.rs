//! Exact diagonalization, subspace projections, operator-valued resolvents,
//! self-energy (exact and series-truncated), and spectral-error metrics.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::dd;
use crate::error::{Error, Result};
use crate::pauli::{max_qubits, OperatorSum};

/// Matrices up to this dimension are diagonalized in double-double precision,
/// so spectral errors stay resolvable under penalty gaps up to ~1e12.
pub const DD_DIM_CAP: usize = 64;

/// Hermiticity tolerance (relative) for matrix inputs.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<Complex64>,
}

fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let mut max_entry = 0.0f64;
    let mut max_dev = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            max_entry = max_entry.max(m[(i, j)].norm());
            max_dev = max_dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    max_dev / max_entry.max(1.0)
}

fn check_matrix(m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidParameter(format!(
            "matrix is {}x{}, expected square",
            m.nrows(),
            m.ncols()
        )));
    }
    let cap = 1usize << max_qubits();
    if m.nrows() > cap {
        return Err(Error::DimensionOverflow {
            qubits: m.nrows().ilog2() as usize,
            max: max_qubits(),
        });
    }
    let dev = hermiticity_deviation(m);
    if dev > HERMITICITY_TOL {
        return Err(Error::NonHermitian { deviation: dev });
    }
    Ok(())
}

/// Full eigendecomposition with ascending eigenvalues.
pub fn eigh(m: &DMatrix<Complex64>) -> Result<EigenSystem> {
    check_matrix(m)?;
    let se = m.clone().symmetric_eigen();
    let n = m.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        se.eigenvalues[a]
            .partial_cmp(&se.eigenvalues[b])
            .expect("finite eigenvalues")
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        eigenvectors.set_column(new_col, &se.eigenvectors.column(old_col));
    }
    Ok(EigenSystem {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues of a Hermitian matrix, f64 path.
pub fn matrix_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_matrix(m)?;
    let mut ev: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    Ok(ev)
}

/// Ascending eigenvalues of a Hermitian matrix, double-double path for small
/// dimensions, f64 otherwise. `real` selects the cheaper real-symmetric route.
pub fn matrix_eigenvalues_auto(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    check_matrix(m)?;
    if m.nrows() <= DD_DIM_CAP {
        let real = m.iter().all(|c| c.im == 0.0);
        if real {
            let re = m.map(|c| c.re);
            return Ok(dd::symmetric_eigenvalues_dd(&re));
        }
        return Ok(dd::hermitian_eigenvalues_dd(m));
    }
    matrix_eigenvalues(m)
}

/// Ascending eigenvalues of an operator, choosing real/complex and
/// double-double/f64 paths by size and content.
pub fn hermitian_eigenvalues(op: &OperatorSum) -> Result<Vec<f64>> {
    let dim = 1usize
        .checked_shl(op.n_qubits() as u32)
        .ok_or(Error::DimensionOverflow {
            qubits: op.n_qubits(),
            max: max_qubits(),
        })?;
    if dim <= DD_DIM_CAP {
        if let Some(re) = op.to_matrix_real()? {
            return Ok(dd::symmetric_eigenvalues_dd(&re));
        }
        let m = op.to_matrix()?;
        return Ok(dd::hermitian_eigenvalues_dd(&m));
    }
    if let Some(re) = op.to_matrix_real()? {
        let mut ev: Vec<f64> = re.symmetric_eigenvalues().iter().cloned().collect();
        ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        return Ok(ev);
    }
    matrix_eigenvalues(&op.to_matrix()?)
}

/// Spectral norm max |eigenvalue| of a Hermitian operator.
pub fn operator_norm(op: &OperatorSum) -> Result<f64> {
    if op.is_zero() {
        return Ok(0.0);
    }
    let ev = hermitian_eigenvalues(op)?;
    Ok(ev.iter().fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

/// Spectral norm of a Hermitian matrix (symmetrized first to shave round-off).
pub fn matrix_operator_norm(m: &DMatrix<Complex64>) -> Result<f64> {
    let sym = symmetrize(m);
    let ev = matrix_eigenvalues_auto(&sym)?;
    Ok(ev.iter().fold(0.0f64, |acc, &l| acc.max(l.abs())))
}

fn symmetrize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let adj = m.adjoint();
    (m + adj) * Complex64::new(0.5, 0.0)
}

/// Partition of the computational basis into low and high penalty sectors.
///
/// All penalties here are diagonal in the computational basis, so the split
/// is stored as exact index sets rather than numeric projectors.
#[derive(Debug, Clone)]
pub struct SubspaceSplit {
    dim: usize,
    cutoff: f64,
    low: Vec<usize>,
    high: Vec<usize>,
}

impl SubspaceSplit {
    /// Low space = all listed ancilla qubits in |0>.
    pub fn ancilla_ground(n_qubits: usize, ancillas: &[usize], cutoff: f64) -> Self {
        let dim = 1usize << n_qubits;
        let mask: usize = ancillas.iter().map(|&q| 1usize << q).sum();
        let (mut low, mut high) = (Vec::new(), Vec::new());
        for i in 0..dim {
            if i & mask == 0 {
                low.push(i);
            } else {
                high.push(i);
            }
        }
        SubspaceSplit {
            dim,
            cutoff,
            low,
            high,
        }
    }

    /// Split by diagonal penalty values against a cutoff.
    pub fn from_diagonal(diag: &[f64], cutoff: f64) -> Self {
        let (mut low, mut high) = (Vec::new(), Vec::new());
        for (i, &d) in diag.iter().enumerate() {
            if d <= cutoff {
                low.push(i);
            } else {
                high.push(i);
            }
        }
        SubspaceSplit {
            dim: diag.len(),
            cutoff,
            low,
            high,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn low_indices(&self) -> &[usize] {
        &self.low
    }

    pub fn high_indices(&self) -> &[usize] {
        &self.high
    }

    pub fn projector_minus(&self) -> DMatrix<Complex64> {
        let mut p = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for &i in &self.low {
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
        p
    }

    pub fn projector_plus(&self) -> DMatrix<Complex64> {
        let mut p = DMatrix::<Complex64>::zeros(self.dim, self.dim);
        for &i in &self.high {
            p[(i, i)] = Complex64::new(1.0, 0.0);
        }
        p
    }
}

/// Submatrix on the given row/column index sets.
pub fn block(m: &DMatrix<Complex64>, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
    let mut out = DMatrix::<Complex64>::zeros(rows.len(), cols.len());
    for (bi, &i) in rows.iter().enumerate() {
        for (bj, &j) in cols.iter().enumerate() {
            out[(bi, bj)] = m[(i, j)];
        }
    }
    out
}

const POLE_TOL: f64 = 1e-10;

/// Operator-valued resolvent of an m-ancilla penalty, restricted to the
/// excited sector: diagonal entries 1/(z - h(x) Delta) for x != 0...0 and a
/// zero row/column on the ground string.
pub fn penalty_resolvent_plus(z: f64, m_ancillas: usize, delta: f64) -> Result<DMatrix<f64>> {
    if delta <= 0.0 {
        return Err(Error::InvalidParameter("delta must be positive".into()));
    }
    for h in 1..=m_ancillas {
        let level = h as f64 * delta;
        if (z - level).abs() <= POLE_TOL * level.max(1.0) {
            return Err(Error::PoleCollision { z, level });
        }
    }
    let dim = 1usize << m_ancillas;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for x in 1..dim {
        let h = x.count_ones() as f64;
        g[(x, x)] = 1.0 / (z - h * delta);
    }
    Ok(g)
}

/// Exact self-energy zI - ((zI - H~)^-1 restricted to the low sector)^-1,
/// evaluated through the equivalent Schur form
/// Sigma(z) = H~__ + H~_-+ (zI - H~_++)^-1 H~_+-,
/// which stays regular at z values inside the low spectral window where the
/// full resolvent itself has poles.
pub fn self_energy_exact(
    h_tilde: &OperatorSum,
    split: &SubspaceSplit,
    z: f64,
) -> Result<DMatrix<Complex64>> {
    let m = h_tilde.to_matrix()?;
    self_energy_exact_matrix(&m, split, z)
}

pub fn self_energy_exact_matrix(
    m: &DMatrix<Complex64>,
    split: &SubspaceSplit,
    z: f64,
) -> Result<DMatrix<Complex64>> {
    let low = split.low_indices();
    let high = split.high_indices();
    let zc = Complex64::new(z, 0.0);
    let mut sigma = block(m, low, low);
    if !high.is_empty() {
        let mut a = -block(m, high, high);
        for i in 0..high.len() {
            a[(i, i)] += zc;
        }
        let g = a.try_inverse().ok_or(Error::SingularBlock)?;
        let m_lh = block(m, low, high);
        let m_hl = block(m, high, low);
        sigma += &m_lh * &g * &m_hl;
    }
    Ok(symmetrize(&sigma))
}

/// Resolvent of the penalty compressed to the high sector, as a dense block.
fn g_plus_block(h: &OperatorSum, split: &SubspaceSplit, z: f64) -> Result<DMatrix<Complex64>> {
    if h.is_diagonal() {
        let diag = h.diagonal()?;
        let mut g =
            DMatrix::<Complex64>::zeros(split.high_indices().len(), split.high_indices().len());
        for (bi, &i) in split.high_indices().iter().enumerate() {
            let denom = z - diag[i];
            if denom.abs() <= POLE_TOL * diag[i].abs().max(1.0) {
                return Err(Error::PoleCollision { z, level: diag[i] });
            }
            g[(bi, bi)] = Complex64::new(1.0 / denom, 0.0);
        }
        return Ok(g);
    }
    let m = h.to_matrix()?;
    let mut a = -block(&m, split.high_indices(), split.high_indices());
    let zc = Complex64::new(z, 0.0);
    for i in 0..a.nrows() {
        a[(i, i)] += zc;
    }
    a.try_inverse().ok_or(Error::SingularBlock)
}

/// Gap between the lowest and the next distinct penalty level, used for
/// the ||V|| <= Delta/2 advisory.
fn penalty_gap(h: &OperatorSum) -> Result<(f64, f64)> {
    let diag = h.diagonal()?;
    let ground = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let gap = diag
        .iter()
        .cloned()
        .filter(|&d| d > ground + 1e-9 * (1.0 + ground.abs()))
        .fold(f64::INFINITY, f64::min)
        - ground;
    Ok((ground, gap))
}

/// Self-energy series through the term with (order - 1) interior V+ factors:
/// order 1 gives H- + V-, order 2 adds V-+ G+ V+-, and so on.
pub fn self_energy_series(
    h: &OperatorSum,
    v: &OperatorSum,
    split: &SubspaceSplit,
    z: f64,
    order: usize,
) -> Result<DMatrix<Complex64>> {
    if order == 0 {
        return Err(Error::InvalidParameter("series order must be >= 1".into()));
    }
    if let Ok((_, gap)) = penalty_gap(h) {
        if gap.is_finite() {
            let vn = operator_norm(v)?;
            if vn > 0.5 * gap {
                log::warn!(
                    "perturbation norm {:.3e} exceeds half the penalty gap {:.3e}; series may diverge",
                    vn,
                    gap
                );
            }
        }
    }
    let hm = h.to_matrix()?;
    let vm = v.to_matrix()?;
    let low = split.low_indices();
    let high = split.high_indices();

    let mut sigma = block(&hm, low, low) + block(&vm, low, low);
    if order == 1 {
        return Ok(symmetrize(&sigma));
    }
    let g = g_plus_block(h, split, z)?;
    let v_mp = block(&vm, low, high);
    let v_pm = block(&vm, high, low);
    let v_pp = block(&vm, high, high);

    // walker = (G+ V+)^k G+ V+-  built up incrementally
    let mut walker = &g * &v_pm;
    sigma += &v_mp * &walker;
    for _ in 3..=order {
        walker = &g * (&v_pp * &walker);
        sigma += &v_mp * &walker;
    }
    Ok(symmetrize(&sigma))
}

/// Exact norm of the order-(k+2) series term V-+ (G+ V+)^k G+ V+-.
pub fn high_order_term_norm(
    h: &OperatorSum,
    v: &OperatorSum,
    split: &SubspaceSplit,
    z: f64,
    k: usize,
) -> Result<f64> {
    let hm = h.to_matrix()?;
    let _ = hm;
    let vm = v.to_matrix()?;
    let low = split.low_indices();
    let high = split.high_indices();
    let g = g_plus_block(h, split, z)?;
    let v_mp = block(&vm, low, high);
    let v_pm = block(&vm, high, low);
    let v_pp = block(&vm, high, high);
    let mut walker = &g * &v_pm;
    for _ in 0..k {
        walker = &g * (&v_pp * &walker);
    }
    let term = &v_mp * &walker;
    matrix_operator_norm(&term)
}

/// How a self-energy matrix was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaMode {
    Exact,
    Series { order: usize },
}

/// Self-energy at one z together with its deviation from an effective
/// Hamiltonian restricted to the low sector.
#[derive(Debug, Clone)]
pub struct SelfEnergyEval {
    pub z: f64,
    pub mode: SigmaMode,
    pub sigma: DMatrix<Complex64>,
    pub deviation: f64,
}

/// Evaluates the self-energy in the requested mode and measures
/// ||Sigma(z) - H_eff|_low||.
pub fn self_energy_eval(
    h: &OperatorSum,
    v: &OperatorSum,
    split: &SubspaceSplit,
    z: f64,
    mode: SigmaMode,
    h_eff: &OperatorSum,
) -> Result<SelfEnergyEval> {
    let sigma = match mode {
        SigmaMode::Exact => {
            let total = h.add(v)?;
            self_energy_exact(&total, split, z)?
        }
        SigmaMode::Series { order } => self_energy_series(h, v, split, z, order)?,
    };
    let eff = block(
        &h_eff.to_matrix()?,
        split.low_indices(),
        split.low_indices(),
    );
    let deviation = matrix_operator_norm(&(&sigma - &eff))?;
    Ok(SelfEnergyEval {
        z,
        mode,
        sigma,
        deviation,
    })
}

/// Paired low-lying gadget spectrum against the full target spectrum.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub gadget_levels: Vec<f64>,
    pub target_levels: Vec<f64>,
    pub per_level_error: Vec<f64>,
    pub max_error: f64,
}

/// Compares the lowest 2^n eigenvalues of `total` with the spectrum of the
/// n-qubit `target`, pairing by sorted order.
pub fn spectral_error_ops(
    total: &OperatorSum,
    system_qubits: usize,
    target: &OperatorSum,
) -> Result<SpectralReport> {
    if target.n_qubits() != system_qubits {
        return Err(Error::QubitCountMismatch {
            left: target.n_qubits(),
            right: system_qubits,
        });
    }
    let d = 1usize << system_qubits;
    let gadget_all = hermitian_eigenvalues(total)?;
    let gadget_levels: Vec<f64> = gadget_all.into_iter().take(d).collect();
    let target_levels = hermitian_eigenvalues(target)?;
    let per_level_error: Vec<f64> = gadget_levels
        .iter()
        .zip(&target_levels)
        .map(|(g, t)| (g - t).abs())
        .collect();
    let max_error = per_level_error.iter().cloned().fold(0.0, f64::max);
    Ok(SpectralReport {
        gadget_levels,
        target_levels,
        per_level_error,
        max_error,
    })
}

/// Maximum difference between the lowest `reference_levels.len()`
/// eigenvalues of `big` and the reference spectrum, paired in sorted order.
pub fn low_spectrum_error(big: &OperatorSum, reference_levels: &[f64]) -> Result<f64> {
    let levels = hermitian_eigenvalues(big)?;
    if levels.len() < reference_levels.len() {
        return Err(Error::InvalidParameter(format!(
            "operator has {} levels, reference needs {}",
            levels.len(),
            reference_levels.len()
        )));
    }
    Ok(levels
        .iter()
        .zip(reference_levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Maximum difference between the spectrum of `big` compressed onto the
/// all-zero sector of `zero_qubits` and a reference spectrum.
pub fn compressed_spectral_error(
    big: &OperatorSum,
    zero_qubits: &[usize],
    reference_levels: &[f64],
) -> Result<f64> {
    let split = SubspaceSplit::ancilla_ground(big.n_qubits(), zero_qubits, 0.0);
    if split.low_indices().len() != reference_levels.len() {
        return Err(Error::InvalidParameter(format!(
            "compressed dimension {} does not match reference spectrum length {}",
            split.low_indices().len(),
            reference_levels.len()
        )));
    }
    let levels = if let Some(re) = big.to_matrix_real()? {
        let n = split.low_indices().len();
        let mut sub = DMatrix::<f64>::zeros(n, n);
        for (bi, &i) in split.low_indices().iter().enumerate() {
            for (bj, &j) in split.low_indices().iter().enumerate() {
                sub[(bi, bj)] = re[(i, j)];
            }
        }
        if n <= DD_DIM_CAP {
            dd::symmetric_eigenvalues_dd(&sub)
        } else {
            let mut ev: Vec<f64> = sub.symmetric_eigenvalues().iter().cloned().collect();
            ev.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
            ev
        }
    } else {
        let m = big.to_matrix()?;
        let sub = block(&m, split.low_indices(), split.low_indices());
        matrix_eigenvalues_auto(&sub)?
    };
    Ok(levels
        .iter()
        .zip(reference_levels)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Uniform grid of 2n+1-style points over [-max_z, max_z], inclusive.
pub fn symmetric_z_grid(max_z: f64, points: usize) -> Vec<f64> {
    assert!(points >= 2);
    (0..points)
        .map(|i| -max_z + 2.0 * max_z * (i as f64) / ((points - 1) as f64))
        .collect()
}

/// Outcome of the gadget-theorem condition check.
#[derive(Debug, Clone)]
pub struct Theorem1Report {
    pub passed: bool,
    pub v_norm: f64,
    pub v_norm_ok: bool,
    pub delta: f64,
    pub window: (f64, f64),
    pub window_ok: bool,
    pub max_deviation: f64,
    pub worst_z: f64,
}

/// Checks the sufficient condition: ||V|| <= Delta/2, the effective spectrum
/// window fits below Delta/2 - epsilon, and ||Sigma(z) - H_eff|| <= epsilon
/// over the whole z grid. Returns the worst z and deviation as witness.
pub fn theorem1_check(
    h: &OperatorSum,
    v: &OperatorSum,
    h_eff: &OperatorSum,
    epsilon: f64,
    z_grid: &[f64],
) -> Result<Theorem1Report> {
    if epsilon <= 0.0 {
        return Err(Error::InvalidParameter("epsilon must be positive".into()));
    }
    let diag = h.diagonal()?;
    let ground = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let scale = diag.iter().cloned().fold(0.0f64, |a, d| a.max(d.abs()));
    if ground.abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "penalty ground energy {} is not zero",
            ground
        )));
    }
    let (_, delta) = penalty_gap(h)?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::InvalidParameter(
            "penalty has no spectral gap".into(),
        ));
    }
    let split = SubspaceSplit::from_diagonal(&diag, delta / 2.0);

    // the closed-form gap bounds saturate the hypothesis exactly (deviation
    // == epsilon at the worst z when the spectator part vanishes), so the
    // <= comparisons carry a relative slack at rounding scale
    let slack = 1.0 + 1e-9;
    let v_norm = operator_norm(v)?;
    let v_norm_ok = v_norm <= delta / 2.0 * slack;

    let eff_low = block(
        &h_eff.to_matrix()?,
        split.low_indices(),
        split.low_indices(),
    );
    let eff_levels = matrix_eigenvalues_auto(&eff_low)?;
    let window = (
        eff_levels.first().cloned().unwrap_or(0.0),
        eff_levels.last().cloned().unwrap_or(0.0),
    );
    let window_ok = window.1 + epsilon < delta / 2.0;

    let total = h.add(v)?;
    let total_m = total.to_matrix()?;
    let eff_m = h_eff.to_matrix()?;
    let eff_block = block(&eff_m, split.low_indices(), split.low_indices());

    let mut max_deviation = 0.0f64;
    let mut worst_z = z_grid.first().cloned().unwrap_or(0.0);
    for &z in z_grid {
        let dev = match self_energy_exact_matrix(&total_m, &split, z) {
            Ok(sigma) => matrix_operator_norm(&(&sigma - &eff_block))?,
            Err(_) => f64::INFINITY,
        };
        if dev > max_deviation {
            max_deviation = dev;
            worst_z = z;
        }
    }

    Ok(Theorem1Report {
        passed: v_norm_ok && window_ok && max_deviation <= epsilon * slack,
        v_norm,
        v_norm_ok,
        delta,
        window,
        window_ok,
        max_deviation,
        worst_z,
    })
}
