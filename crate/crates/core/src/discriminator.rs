//! The programmable-discriminator POVM families and their structural checks.
//!
//! All devices built here follow the covariant ansatz `Π_i = c·I_i ⊗ Φ(n)_ī`
//! on `n` program registers plus one data register, with `Π_0` absorbing the
//! remainder of the identity. The scale `c` is `n/(n+1)` when `m = n` and
//! `1/n` when `m > n`; `covariance_gram` reproduces both constants from the
//! spectrum of the Gram matrix of the defining vector family.

use crate::antisym::{
    antisym_basis, antisym_projector, factorial, increasing_tuples, tensor_all, StateVector,
};
use crate::error::CoreError;
use crate::gram::{gram_det, gram_matrix};
use crate::matrix::{
    hermitian_eig, identity, kron, quadratic_form, zeros, CMatrix, CVector, HermitianOperator,
};
use crate::registers::{partial_trace, permute_subsystems, permute_vector, Permutation, RegisterLayout};
use ndarray::Array2;
use num_complex::Complex64;

/// Device family tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PovmKind {
    /// Optimal device for `m = n`, `c = n/(n+1)`.
    OptimalEqual,
    /// Universal device for `m > n`, `c = 1/n`.
    Universal,
    /// All-inconclusive device `Π_i = Φ(n+1)/n`.
    Trivial,
    /// Anything loaded from outside; nothing is assumed about it.
    Custom,
}

impl PovmKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PovmKind::OptimalEqual => "optimal-equal",
            PovmKind::Universal => "universal",
            PovmKind::Trivial => "trivial",
            PovmKind::Custom => "custom",
        }
    }

    pub fn parse(s: &str) -> Option<PovmKind> {
        match s {
            "optimal-equal" => Some(PovmKind::OptimalEqual),
            "universal" => Some(PovmKind::Universal),
            "trivial" => Some(PovmKind::Trivial),
            "custom" => Some(PovmKind::Custom),
            _ => None,
        }
    }
}

/// Ordered measurement `[Π_0, Π_1, …, Π_n]` on the full input space.
#[derive(Debug, Clone)]
pub struct Povm {
    layout: RegisterLayout,
    elements: Vec<HermitianOperator>,
    kind: PovmKind,
    /// The ansatz scale `c`, when the device has one.
    scale: Option<f64>,
    /// Set when a trivial device collapses to `Π_0 = I` (m ≤ n).
    degenerate: bool,
}

impl Povm {
    pub fn custom(layout: RegisterLayout, elements: Vec<HermitianOperator>) -> Result<Self, CoreError> {
        if elements.len() != layout.n + 1 {
            return Err(CoreError::InvalidConfig(format!(
                "expected {} elements, got {}",
                layout.n + 1,
                elements.len()
            )));
        }
        for e in &elements {
            if e.dim() != layout.total_dim() {
                return Err(CoreError::DimensionMismatch {
                    expected: layout.total_dim(),
                    got: e.dim(),
                });
            }
        }
        Ok(Self {
            layout,
            elements,
            kind: PovmKind::Custom,
            scale: None,
            degenerate: false,
        })
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn n(&self) -> usize {
        self.layout.n
    }

    pub fn m(&self) -> usize {
        self.layout.m
    }

    pub fn kind(&self) -> PovmKind {
        self.kind
    }

    pub fn scale(&self) -> Option<f64> {
        self.scale
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// `Π_i`, `0 ≤ i ≤ n`.
    pub fn element(&self, i: usize) -> &HermitianOperator {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[HermitianOperator] {
        &self.elements
    }
}

/// Program states plus the index of the state copied into the data register.
#[derive(Debug, Clone)]
pub struct ProgramInput {
    pub states: Vec<StateVector>,
    /// 0-based index into `states`.
    pub data_index: usize,
}

/// The total input state `|ψ_1⟩…|ψ_n⟩|ψ_j⟩` with the data register last.
pub fn input_state(prog: &ProgramInput) -> Result<StateVector, CoreError> {
    let n = prog.states.len();
    if prog.data_index >= n {
        return Err(CoreError::IndexOutOfRange {
            index: prog.data_index + 1,
            n,
        });
    }
    let m = prog.states[0].dim();
    for s in &prog.states {
        if s.dim() != m {
            return Err(CoreError::MixedDims(m, s.dim()));
        }
    }
    let mut factors = prog.states.clone();
    factors.push(prog.states[prog.data_index].clone());
    tensor_all(&factors)
}

/// Routes subsystem `i` to the front: `W = U_π`, `π = (i, 0, …, î, …, n)`.
fn front_permutation(n_plus_1: usize, i: usize) -> Permutation {
    let mut images = vec![i];
    images.extend((0..n_plus_1).filter(|&k| k != i));
    Permutation::new(images).expect("valid routing permutation")
}

/// `I_i ⊗ Φ(n)_ī` on the full space, built by conjugating `I ⊗ Φ(n)` with the
/// permutation that routes subsystem `i` to the front.
fn embed_identity_with_projector(
    layout: &RegisterLayout,
    i: usize,
    phi: &HermitianOperator,
) -> CMatrix {
    let front = kron(&identity(layout.m), phi.matrix());
    let pi = front_permutation(layout.total_subsystems(), i);
    permute_subsystems(&front, layout.m, &pi.inverse())
}

/// Same routing applied to a vector family member `|k⟩_i ⊗ |φ⟩_ī`.
fn embed_front_vector(layout: &RegisterLayout, i: usize, k: usize, phi: &StateVector) -> CVector {
    let front = StateVector::basis(layout.m, k).tensor(phi);
    let pi = front_permutation(layout.total_subsystems(), i);
    permute_vector(front.amplitudes(), layout.m, &pi.inverse())
}

/// Builds the covariant-ansatz device `Π_i = c·I_i⊗Φ(n)_ī` for an arbitrary
/// scale `c` (no feasibility check; `Π_0` may fail positivity).
pub fn build_ansatz(n: usize, m: usize, c: f64, kind: PovmKind) -> Result<Povm, CoreError> {
    if n < 2 {
        return Err(CoreError::InvalidConfig("ansatz devices need n ≥ 2".into()));
    }
    if m < n {
        return Err(CoreError::InvalidConfig(format!(
            "local dimension m={m} must be at least n={n}"
        )));
    }
    let layout = RegisterLayout::new(n, m);
    let phi = antisym_projector(n, m)?;
    let mut elements = Vec::with_capacity(n + 1);
    let mut sum = zeros(layout.total_dim(), layout.total_dim());
    elements.push(HermitianOperator::zero(layout.total_dim())); // placeholder Π_0
    for i in 0..n {
        let mat = embed_identity_with_projector(&layout, i, &phi).mapv(|z| z * c);
        sum = sum + &mat;
        elements.push(HermitianOperator::new(mat)?);
    }
    let pi0 = identity(layout.total_dim()) - sum;
    elements[0] = HermitianOperator::new(pi0)?;
    Ok(Povm {
        layout,
        elements,
        kind,
        scale: Some(c),
        degenerate: false,
    })
}

/// Optimal equal-dimension device: `m = n`, `c = n/(n+1)`.
pub fn build_optimal_equal(n: usize) -> Result<Povm, CoreError> {
    if n < 2 {
        return Err(CoreError::InvalidConfig(
            "optimal-equal device needs n ≥ 2".into(),
        ));
    }
    build_ansatz(n, n, n as f64 / (n as f64 + 1.0), PovmKind::OptimalEqual)
}

/// Universal device: `m > n`, `c = 1/n`.
pub fn build_universal(n: usize, m: usize) -> Result<Povm, CoreError> {
    if n < 2 {
        return Err(CoreError::InvalidConfig("universal device needs n ≥ 2".into()));
    }
    if m <= n {
        return Err(CoreError::InvalidConfig(format!(
            "universal device needs m > n (got n={n}, m={m}); use the optimal-equal device at m = n"
        )));
    }
    build_ansatz(n, m, 1.0 / n as f64, PovmKind::Universal)
}

/// All-inconclusive device: `Π_i = Φ(n+1)/n` for `i ≥ 1`, `Π_0 = I − Φ(n+1)`.
///
/// For `m ≤ n` the projector `Φ(n+1)` vanishes and the device degenerates to
/// `Π_0 = I`; this is flagged, not rejected.
pub fn build_trivial(n: usize, m: usize) -> Result<Povm, CoreError> {
    if n < 1 {
        return Err(CoreError::InvalidConfig("trivial device needs n ≥ 1".into()));
    }
    let layout = RegisterLayout::new(n, m);
    let phi = antisym_projector(n + 1, m)?;
    let degenerate = n + 1 > m;
    let mut elements = Vec::with_capacity(n + 1);
    elements.push(HermitianOperator::new(
        identity(layout.total_dim()) - phi.matrix(),
    )?);
    for _ in 0..n {
        elements.push(HermitianOperator::new(
            phi.matrix().mapv(|z| z / n as f64),
        )?);
    }
    Ok(Povm {
        layout,
        elements,
        kind: PovmKind::Trivial,
        scale: None,
        degenerate,
    })
}

/// POVM validity report: completeness and elementwise positivity.
#[derive(Debug, Clone)]
pub struct PovmValidation {
    pub completeness_residual: f64,
    pub min_eig_per_element: Vec<f64>,
    pub tol: f64,
    pub pass: bool,
}

pub fn validate_povm(p: &Povm, tol: f64) -> Result<PovmValidation, CoreError> {
    let dim = p.layout.total_dim();
    let mut sum = zeros(dim, dim);
    for e in p.elements() {
        sum = sum + e.matrix();
    }
    let completeness_residual = crate::matrix::max_norm(&(sum - identity(dim)));
    let mut min_eig_per_element = Vec::with_capacity(p.elements().len());
    for e in p.elements() {
        let eig = hermitian_eig(e)?;
        min_eig_per_element.push(eig.values.first().copied().unwrap_or(0.0));
    }
    let pass = completeness_residual <= tol && min_eig_per_element.iter().all(|&v| v >= -tol);
    Ok(PovmValidation {
        completeness_residual,
        min_eig_per_element,
        tol,
        pass,
    })
}

/// Per-register unambiguity residual `trace((I − Φ(n))·Tr_i(Π_i))`.
///
/// `Tr_i(Π_i)` is positive semidefinite, so a vanishing residual exactly
/// characterizes its support lying inside `∧ⁿH`.
#[derive(Debug, Clone)]
pub struct UnambiguityRecord {
    /// 1-based outcome index.
    pub outcome: usize,
    pub residual: f64,
    pub trace: f64,
    pub pass: bool,
}

pub fn check_unambiguity_structure(
    p: &Povm,
    tol: f64,
) -> Result<Vec<UnambiguityRecord>, CoreError> {
    let n = p.n();
    let m = p.m();
    let phi = antisym_projector(n, m)?;
    let keep_all: Vec<usize> = (0..p.layout.total_subsystems()).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let keep: Vec<usize> = keep_all.iter().copied().filter(|&k| k != i).collect();
        let reduced = partial_trace(p.element(i + 1), &p.layout, &keep)?;
        let trace = reduced.trace();
        let overlap: f64 = phi
            .matrix()
            .iter()
            .zip(reduced.matrix().t().iter())
            .map(|(a, b)| (a * b).re)
            .sum();
        let residual = trace - overlap;
        let pass = residual <= tol * trace || residual.abs() <= 1e-15;
        out.push(UnambiguityRecord {
            outcome: i + 1,
            residual,
            trace,
            pass,
        });
    }
    Ok(out)
}

/// Per-register fit of `Tr_ī(Π_i)` to a scalar multiple of the identity.
#[derive(Debug, Clone)]
pub struct SupportReductionRecord {
    pub outcome: usize,
    pub fitted_scale: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone)]
pub struct SupportReductionReport {
    pub records: Vec<SupportReductionRecord>,
    pub scale_spread: f64,
    pub pass: bool,
}

pub fn check_support_reduction(p: &Povm, tol: f64) -> Result<SupportReductionReport, CoreError> {
    let m = p.m();
    let mut records = Vec::with_capacity(p.n());
    for i in 0..p.n() {
        let reduced = partial_trace(p.element(i + 1), &p.layout, &[i])?;
        let fitted_scale = reduced.trace() / m as f64;
        let dev = crate::matrix::max_norm(
            &(reduced.matrix() - &identity(m).mapv(|z| z * fitted_scale)),
        );
        records.push(SupportReductionRecord {
            outcome: i + 1,
            fitted_scale,
            deviation: dev,
        });
    }
    let cs: Vec<f64> = records.iter().map(|r| r.fitted_scale).collect();
    let spread = cs.iter().cloned().fold(f64::MIN, f64::max)
        - cs.iter().cloned().fold(f64::MAX, f64::min);
    let pass = records.iter().all(|r| r.deviation <= tol) && spread.abs() <= tol;
    Ok(SupportReductionReport {
        records,
        scale_spread: spread,
        pass,
    })
}

/// The `n × (n+1)` probability table `P[j][i] = ⟨ψⁿ_j|Π_i|ψⁿ_j⟩`, column 0
/// being the inconclusive outcome.
pub fn success_probabilities(
    p: &Povm,
    states: &[StateVector],
) -> Result<Array2<f64>, CoreError> {
    let n = p.n();
    if states.len() != n {
        return Err(CoreError::InvalidConfig(format!(
            "expected {n} program states, got {}",
            states.len()
        )));
    }
    for s in states {
        if s.dim() != p.m() {
            return Err(CoreError::MixedDims(p.m(), s.dim()));
        }
    }
    let mut table = Array2::zeros((n, n + 1));
    for j in 0..n {
        let psi = input_state(&ProgramInput {
            states: states.to_vec(),
            data_index: j,
        })?;
        for i in 0..=n {
            let v = quadratic_form(p.element(i).matrix(), psi.amplitudes());
            table[(j, i)] = v.re;
        }
    }
    Ok(table)
}

/// Closed-form success probability of the built devices:
/// `n/(n+1)!·det(X)` for the optimal equal-dimension device and
/// `det(X)/(n·n!)` for the universal device.
pub fn closed_form_success(states: &[StateVector], kind: PovmKind) -> Result<f64, CoreError> {
    let n = states.len();
    let det = gram_det(&gram_matrix(states)?)?;
    match kind {
        PovmKind::OptimalEqual => Ok(n as f64 / factorial(n + 1) as f64 * det),
        PovmKind::Universal => Ok(det / (n as f64 * factorial(n) as f64)),
        PovmKind::Trivial => Ok(0.0),
        PovmKind::Custom => Err(CoreError::InvalidConfig(
            "no closed form for custom devices".into(),
        )),
    }
}

/// Spectral analysis of the Gram matrix `G` of the defining vector family
/// `{|k⟩_i|φ_ς⟩_ī}`, together with its analytic block decomposition.
#[derive(Debug, Clone)]
pub struct CovarianceGram {
    pub n: usize,
    pub m: usize,
    /// Numerically assembled Gram matrix of the full family.
    pub full: HermitianOperator,
    /// Analytic blocks indexed by increasing n-tuples (one per tuple; the
    /// register level lies inside the tuple).
    pub gamma_blocks: Vec<HermitianOperator>,
    /// Analytic blocks indexed by increasing (n+1)-tuples (the register level
    /// extends the tuple); empty when m = n.
    pub lambda_blocks: Vec<HermitianOperator>,
    /// Largest eigenvalue over the gamma blocks.
    pub gamma_max: f64,
    /// Largest eigenvalue over the lambda blocks, when any exist.
    pub lambda_block_max: Option<f64>,
    /// Largest eigenvalue of the full matrix.
    pub lambda_max: f64,
    /// Maximal feasible ansatz scale, `1/lambda_max`.
    pub c_max: f64,
    /// Max absolute difference between the sorted spectrum of the full matrix
    /// and the sorted union of the block spectra.
    pub spectrum_residual: f64,
}

pub fn covariance_gram(n: usize, m: usize) -> Result<CovarianceGram, CoreError> {
    if n < 2 || m < n {
        return Err(CoreError::InvalidConfig(format!(
            "covariance analysis needs 2 ≤ n ≤ m (got n={n}, m={m})"
        )));
    }
    let layout = RegisterLayout::new(n, m);
    let basis = antisym_basis(n, m)?;
    let tuples = increasing_tuples(n, m)?;

    // numeric Gram of the full family, ordered (i, k, ς)
    let mut vectors: Vec<CVector> = Vec::with_capacity(n * m * basis.len());
    for i in 0..n {
        for k in 0..m {
            for phi in &basis {
                vectors.push(embed_front_vector(&layout, i, k, phi));
            }
        }
    }
    let nn = vectors.len();
    let mut g = zeros(nn, nn);
    for a in 0..nn {
        for b in 0..nn {
            g[(a, b)] = vectors[a]
                .iter()
                .zip(vectors[b].iter())
                .map(|(x, y)| x.conj() * y)
                .sum();
        }
    }
    let full = HermitianOperator::new(g)?;

    // analytic gamma block (identical for every n-tuple): index (i, a) with a
    // running over the tuple entries
    let gamma = {
        let size = n * n;
        let mut mat = zeros(size, size);
        for i in 0..n {
            for a in 0..n {
                for j in 0..n {
                    for b in 0..n {
                        let v = if i == j {
                            if a == b {
                                1.0
                            } else {
                                0.0
                            }
                        } else if a == b {
                            sign_pow(i as i64 - j as i64 + 1) / n as f64
                        } else {
                            0.0
                        };
                        mat[(i * n + a, j * n + b)] = Complex64::new(v, 0.0);
                    }
                }
            }
        }
        HermitianOperator::new(mat)?
    };
    let gamma_blocks: Vec<HermitianOperator> = tuples.iter().map(|_| gamma.clone()).collect();

    // analytic lambda block for each (n+1)-tuple: index (i, a) with a the
    // position of the register level inside the tuple
    let lambda_tuples = if m > n {
        increasing_tuples(n + 1, m)?
    } else {
        Vec::new()
    };
    let lambda_blocks: Vec<HermitianOperator> = lambda_tuples
        .iter()
        .map(|_| {
            let width = n + 1;
            let size = n * width;
            let mut mat = zeros(size, size);
            for i in 0..n {
                for a in 0..width {
                    for j in 0..n {
                        for b in 0..width {
                            let v = if i == j && a == b {
                                1.0
                            } else if i != j && a != b {
                                sign_pow(i as i64 - j as i64 + a as i64 - b as i64) / n as f64
                            } else {
                                0.0
                            };
                            mat[(i * width + a, j * width + b)] = Complex64::new(v, 0.0);
                        }
                    }
                }
            }
            HermitianOperator::new(mat)
        })
        .collect::<Result<_, _>>()?;

    let mut block_spectrum: Vec<f64> = Vec::with_capacity(nn);
    let mut gamma_max = f64::MIN;
    for b in &gamma_blocks {
        let eig = hermitian_eig(b)?;
        gamma_max = gamma_max.max(*eig.values.last().unwrap());
        block_spectrum.extend(eig.values);
    }
    let mut lambda_block_max = None;
    for b in &lambda_blocks {
        let eig = hermitian_eig(b)?;
        let top = *eig.values.last().unwrap();
        lambda_block_max = Some(lambda_block_max.map_or(top, |v: f64| v.max(top)));
        block_spectrum.extend(eig.values);
    }
    block_spectrum.sort_by(f64::total_cmp);

    let full_eig = hermitian_eig(&full)?;
    let lambda_max = *full_eig.values.last().unwrap();
    let spectrum_residual = if block_spectrum.len() == full_eig.values.len() {
        full_eig
            .values
            .iter()
            .zip(block_spectrum.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    } else {
        f64::INFINITY
    };

    Ok(CovarianceGram {
        n,
        m,
        full,
        gamma_blocks,
        lambda_blocks,
        gamma_max,
        lambda_block_max,
        lambda_max,
        c_max: 1.0 / lambda_max,
        spectrum_residual,
    })
}

fn sign_pow(e: i64) -> f64 {
    if e.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Maximal feasible `c` by bisection on a direct positivity check of
/// `I − c·Σ_i I_i⊗Φ(n)_ī` over the window `[0, 2]`.
pub fn bisect_max_c(n: usize, m: usize) -> Result<f64, CoreError> {
    if n < 2 || m < n {
        return Err(CoreError::InvalidConfig(format!(
            "bisection needs 2 ≤ n ≤ m (got n={n}, m={m})"
        )));
    }
    let layout = RegisterLayout::new(n, m);
    let phi = antisym_projector(n, m)?;
    let dim = layout.total_dim();
    let mut sum = zeros(dim, dim);
    for i in 0..n {
        sum = sum + &embed_identity_with_projector(&layout, i, &phi);
    }
    let feasible = |c: f64| -> Result<bool, CoreError> {
        let op = HermitianOperator::new(identity(dim) - &sum.mapv(|z| z * c))?;
        crate::matrix::is_psd(&op, 1e-12)
    };
    let (mut lo, mut hi) = (0.0f64, 2.0f64);
    for _ in 0..40 {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Maximal feasible ansatz scale, from the covariance Gram spectrum and
/// cross-validated against [`bisect_max_c`] within 1e-6.
pub fn max_feasible_c(n: usize, m: usize) -> Result<f64, CoreError> {
    let analytic = covariance_gram(n, m)?.c_max;
    let bisected = bisect_max_c(n, m)?;
    if (analytic - bisected).abs() > 1e-6 {
        return Err(CoreError::CrossValidationFailed {
            analytic,
            bisected,
        });
    }
    Ok(analytic)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{max_norm, CVector};
    use crate::registers::{digits_to_index, index_to_digits};

    fn c64(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// Direct-entry oracle for `I_i ⊗ Φ(n)_ī`:
    /// `M[r,c] = δ_{r_i,c_i} · Φ[idx(r_ī), idx(c_ī)]`.
    fn embed_oracle(layout: &RegisterLayout, i: usize, phi: &HermitianOperator) -> CMatrix {
        let dims = layout.dims();
        let sub_dims = vec![layout.m; layout.n];
        let dim = layout.total_dim();
        let mut out = zeros(dim, dim);
        let mut rd = vec![0usize; dims.len()];
        let mut cd = vec![0usize; dims.len()];
        for r in 0..dim {
            index_to_digits(r, &dims, &mut rd);
            for c in 0..dim {
                index_to_digits(c, &dims, &mut cd);
                if rd[i] != cd[i] {
                    continue;
                }
                let rr: Vec<usize> = rd
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, &d)| d)
                    .collect();
                let cc: Vec<usize> = cd
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i)
                    .map(|(_, &d)| d)
                    .collect();
                out[(r, c)] = phi.matrix()[(
                    digits_to_index(&rr, &sub_dims),
                    digits_to_index(&cc, &sub_dims),
                )];
            }
        }
        out
    }

    #[test]
    fn embedding_matches_direct_entry_formula() {
        for (n, m) in [(2, 2), (2, 3), (3, 3)] {
            let layout = RegisterLayout::new(n, m);
            let phi = antisym_projector(n, m).unwrap();
            for i in 0..n {
                let fast = embed_identity_with_projector(&layout, i, &phi);
                let oracle = embed_oracle(&layout, i, &phi);
                assert!(max_norm(&(&fast - &oracle)) < 1e-13, "n={n} m={m} i={i}");
            }
        }
    }

    #[test]
    fn input_state_ordering() {
        let states = vec![StateVector::basis(2, 0), StateVector::basis(2, 1)];
        let psi = input_state(&ProgramInput {
            states,
            data_index: 0,
        })
        .unwrap();
        // |0⟩|1⟩|0⟩ -> index 0*4 + 1*2 + 0 = 2
        assert!((psi.amplitudes()[2].re - 1.0).abs() < 1e-15);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn input_state_single_register() {
        let a = StateVector::new(CVector::from(vec![c64(0.6), c64(0.8)]));
        let psi = input_state(&ProgramInput {
            states: vec![a.clone()],
            data_index: 0,
        })
        .unwrap();
        let direct = a.tensor(&a);
        let resid: f64 = (psi.amplitudes() - direct.amplitudes())
            .iter()
            .map(|z| z.norm())
            .sum();
        assert!(resid < 1e-15);
    }

    #[test]
    fn optimal_equal_n2_traces_and_positivity() {
        let p = build_optimal_equal(2).unwrap();
        assert_eq!(p.element(1).dim(), 8);
        // trace(Π_1) = (2/3)·m·rank(Φ) = (2/3)·2·1
        assert!((p.element(1).trace() - 4.0 / 3.0).abs() < 1e-12);
        let val = validate_povm(&p, 1e-9).unwrap();
        assert!(val.pass, "{val:?}");
        // c is maximal: Π_0 has a zero eigenvalue
        let eig = hermitian_eig(p.element(0)).unwrap();
        assert!(eig.values[0] >= -1e-10);
        assert!(eig.values[0].abs() < 1e-10);
    }

    #[test]
    fn inflated_scale_breaks_positivity() {
        let inflated = build_ansatz(3, 3, 1.01 * 0.75, PovmKind::Custom).unwrap();
        let eig = hermitian_eig(inflated.element(0)).unwrap();
        assert!(eig.values[0] < -1e-9);
    }

    #[test]
    fn universal_n2_m3_traces_and_positivity() {
        let p = build_universal(2, 3).unwrap();
        // trace(Π_1) = (1/2)·3·C(3,2) = 4.5
        assert!((p.element(1).trace() - 4.5).abs() < 1e-12);
        let val = validate_povm(&p, 1e-9).unwrap();
        assert!(val.pass);
        assert!(build_universal(3, 3).is_err());
    }

    #[test]
    fn trivial_device_properties() {
        let p = build_trivial(2, 3).unwrap();
        assert!(!p.is_degenerate());
        // trace(Π_i) = (1/2)·C(3,3)
        assert!((p.element(1).trace() - 0.5).abs() < 1e-12);
        assert!(validate_povm(&p, 1e-9).unwrap().pass);
        let states = vec![StateVector::basis(3, 0), StateVector::basis(3, 1)];
        let table = success_probabilities(&p, &states).unwrap();
        for j in 0..2 {
            for i in 1..=2 {
                assert!(table[(j, i)].abs() < 1e-12);
            }
        }
        let degen = build_trivial(2, 2).unwrap();
        assert!(degen.is_degenerate());
        assert!(max_norm(&(degen.element(0).matrix() - &identity(8))) < 1e-12);
    }

    #[test]
    fn validate_rejects_bad_completeness() {
        let layout = RegisterLayout::new(1, 2);
        let half = HermitianOperator::new(identity(4).mapv(|z| z * 0.5)).unwrap();
        let p = Povm::custom(layout, vec![half.clone(), half.clone()]).unwrap();
        assert!(validate_povm(&p, 1e-10).unwrap().pass);
        let bad = Povm::custom(layout, vec![half.clone(), HermitianOperator::new(identity(4)).unwrap()])
            .unwrap();
        assert!(!validate_povm(&bad, 1e-10).unwrap().pass);
    }

    #[test]
    fn unambiguity_structure_built_vs_custom() {
        let p = build_optimal_equal(2).unwrap();
        for r in check_unambiguity_structure(&p, 1e-12).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        let p = build_trivial(2, 3).unwrap();
        for r in check_unambiguity_structure(&p, 1e-10).unwrap() {
            assert!(r.pass, "{r:?}");
        }
        // Π_i = I/n is not supported on the antisymmetric sector
        let layout = RegisterLayout::new(2, 2);
        let third = HermitianOperator::new(identity(8).mapv(|z| z / 3.0)).unwrap();
        let flat = Povm::custom(layout, vec![third.clone(), third.clone(), third]).unwrap();
        let recs = check_unambiguity_structure(&flat, 1e-10).unwrap();
        assert!(recs.iter().all(|r| !r.pass && r.residual > 0.1));
    }

    #[test]
    fn support_reduction_structure() {
        for p in [build_optimal_equal(2).unwrap(), build_universal(2, 3).unwrap()] {
            let rep = check_support_reduction(&p, 1e-12).unwrap();
            assert!(rep.pass, "{rep:?}");
        }
        // asymmetric custom POVM fails
        let layout = RegisterLayout::new(1, 2);
        let mut a = zeros(4, 4);
        a[(0, 0)] = c64(1.0);
        let pi1 = HermitianOperator::new(a).unwrap();
        let pi0 = HermitianOperator::new(identity(4) - pi1.matrix()).unwrap();
        let p = Povm::custom(layout, vec![pi0, pi1]).unwrap();
        assert!(!check_support_reduction(&p, 1e-10).unwrap().pass);
    }

    #[test]
    fn success_probabilities_orthonormal_pairs() {
        let states2 = vec![StateVector::basis(2, 0), StateVector::basis(2, 1)];
        let p = build_optimal_equal(2).unwrap();
        let table = success_probabilities(&p, &states2).unwrap();
        for j in 0..2 {
            assert!((table[(j, j + 1)] - 1.0 / 3.0).abs() < 1e-12);
            let other = 2 - j;
            assert!(table[(j, other)].abs() < 1e-12);
            let row: f64 = (0..3).map(|i| table[(j, i)]).sum();
            assert!((row - 1.0).abs() < 1e-12);
        }

        let states3 = vec![StateVector::basis(3, 0), StateVector::basis(3, 1)];
        let p = build_universal(2, 3).unwrap();
        let table = success_probabilities(&p, &states3).unwrap();
        for j in 0..2 {
            assert!((table[(j, j + 1)] - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_forms() {
        let s = 0.6f64;
        let t = (1.0 - s * s).sqrt();
        let a = StateVector::basis(2, 0);
        let b = StateVector::new(CVector::from(vec![c64(s), c64(t)]));
        let states = vec![a, b];
        let opt = closed_form_success(&states, PovmKind::OptimalEqual).unwrap();
        assert!((opt - (1.0 - s * s) / 3.0).abs() < 1e-12);
        let uni = closed_form_success(&states, PovmKind::Universal).unwrap();
        assert!((uni - (1.0 - s * s) / 4.0).abs() < 1e-12);
        let dep = vec![StateVector::basis(2, 0), StateVector::basis(2, 0)];
        assert!(closed_form_success(&dep, PovmKind::OptimalEqual)
            .unwrap()
            .abs()
            < 1e-12);
        assert!(closed_form_success(&dep, PovmKind::Universal)
            .unwrap()
            .abs()
            < 1e-12);
    }

    #[test]
    fn covariance_gram_constants() {
        let cg = covariance_gram(2, 2).unwrap();
        assert!((cg.lambda_max - 1.5).abs() < 1e-10);
        assert!((cg.c_max - 2.0 / 3.0).abs() < 1e-10);
        assert!(cg.lambda_blocks.is_empty());
        assert!(cg.spectrum_residual < 1e-10);

        let cg = covariance_gram(2, 3).unwrap();
        assert!((cg.gamma_max - 1.5).abs() < 1e-10);
        assert!((cg.lambda_block_max.unwrap() - 2.0).abs() < 1e-10);
        assert!((cg.c_max - 0.5).abs() < 1e-10);
        assert!(cg.spectrum_residual < 1e-10);

        let cg = covariance_gram(3, 4).unwrap();
        assert!((cg.gamma_max - 4.0 / 3.0).abs() < 1e-10);
        assert!((cg.lambda_block_max.unwrap() - 3.0).abs() < 1e-10);
        assert!(cg.spectrum_residual < 1e-10);
    }

    #[test]
    fn max_c_cross_validation() {
        assert!((max_feasible_c(2, 2).unwrap() - 2.0 / 3.0).abs() < 1e-6);
        assert!((max_feasible_c(2, 4).unwrap() - 0.5).abs() < 1e-6);
    }
}
