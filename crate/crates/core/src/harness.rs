//! Seeded Monte Carlo driver: random state generation, the positive-operator
//! product-state inequality oracle, and closed-form comparison experiments.
//!
//! RNG protocol: ChaCha12, seeded from the experiment seed, with the trial
//! index selecting the stream. Gaussians come from Box–Muller, so the sampling
//! protocol is reproducible from this description alone; exact streams are
//! only guaranteed stable within this implementation.

use crate::antisym::{factorial, StateVector};
use crate::discriminator::{
    build_optimal_equal, build_trivial, build_universal, closed_form_success,
    success_probabilities, Povm, PovmKind,
};
use crate::error::CoreError;
use crate::gram::{gram_det, gram_matrix, is_linearly_independent, min_eigenvalue};
use crate::matrix::{quadratic_form, zeros, CMatrix, CVector};
use crate::registers::partial_trace_dims;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

/// Number of rejected draws tolerated by [`random_program`].
pub const REJECTION_CAP: usize = 10_000;

/// The per-trial RNG: stream `trial` of a ChaCha12 generator seeded with
/// `seed`. Independent of trial evaluation order.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// One standard-normal pair by Box–Muller.
fn normal_pair<R: Rng>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = rng.gen();
    let u2: f64 = rng.gen();
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

fn complex_gaussian<R: Rng>(rng: &mut R) -> Complex64 {
    let (re, im) = normal_pair(rng);
    Complex64::new(re, im)
}

/// Haar-distributed pure state: independent standard complex Gaussian
/// amplitudes, normalized.
pub fn haar_random_state<R: Rng>(m: usize, rng: &mut R) -> StateVector {
    let amps: CVector = (0..m).map(|_| complex_gaussian(rng)).collect();
    StateVector::new(amps).normalize()
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the phase
/// convention fixed by a positive-real R diagonal.
pub fn haar_random_unitary<R: Rng>(m: usize, rng: &mut R) -> CMatrix {
    let mut cols: Vec<CVector> = Vec::with_capacity(m);
    for _ in 0..m {
        let mut v: CVector = (0..m).map(|_| complex_gaussian(rng)).collect();
        // Gram-Schmidt against previous columns, twice for stability
        for _ in 0..2 {
            for q in &cols {
                let ip: Complex64 = q.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum();
                v = &v - &q.mapv(|z| z * ip);
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.mapv(|z| z / norm));
    }
    let mut u = zeros(m, m);
    for (j, col) in cols.iter().enumerate() {
        for i in 0..m {
            u[(i, j)] = col[i];
        }
    }
    u
}

/// Draws `n` Haar states in dimension `m` until they pass the linear
/// independence test; returns the states and the rejection count.
pub fn random_program<R: Rng>(
    n: usize,
    m: usize,
    rng: &mut R,
    independence_tol: f64,
) -> Result<(Vec<StateVector>, usize), CoreError> {
    if n > m {
        return Err(CoreError::RejectionCapExceeded { cap: REJECTION_CAP });
    }
    let mut rejections = 0;
    loop {
        let states: Vec<StateVector> = (0..n).map(|_| haar_random_state(m, rng)).collect();
        if is_linearly_independent(&states, independence_tol)? {
            return Ok((states, rejections));
        }
        rejections += 1;
        if rejections >= REJECTION_CAP {
            return Err(CoreError::RejectionCapExceeded { cap: REJECTION_CAP });
        }
    }
}

/// Result of the product-state inequality sweep for positive operators:
/// `⟨φ|Ω|φ⟩² ≤ ⟨φ_a|Tr_B(Ω)|φ_a⟩·⟨φ_b|Tr_A(Ω)|φ_b⟩`.
///
/// The square on the left is essential: `⟨φ|Ω|φ⟩ ≤ ⟨φ_a|Tr_B(Ω)|φ_a⟩`
/// follows by completing `|φ_b⟩` to a basis of B (and symmetrically for A),
/// and the product of the two one-sided bounds gives the inequality. The
/// unsquared variant `⟨φ|Ω|φ⟩·Tr(Ω) ≤ rhs` fails already for a rank-one
/// maximally entangled `Ω`.
#[derive(Debug, Clone)]
pub struct ProductBoundReport {
    pub trials: usize,
    pub violations: usize,
    /// Minimum of `(rhs - lhs)/Tr(Ω)²` over all trials (negative = violation
    /// beyond round-off).
    pub worst_slack: f64,
}

/// Sweeps random Wishart-like positive operators `Ω = MM†` against random
/// product states. The slack is scaled by `Tr(Ω)²` since both sides are
/// degree 2 in `Ω`.
pub fn product_bound_oracle<R: Rng>(
    trials: usize,
    dim_a: usize,
    dim_b: usize,
    rng: &mut R,
) -> Result<ProductBoundReport, CoreError> {
    let dim = dim_a * dim_b;
    let mut violations = 0;
    let mut worst_slack = f64::INFINITY;
    for _ in 0..trials {
        let m = CMatrix::from_shape_fn((dim, dim), |_| complex_gaussian(rng));
        let omega = m.dot(&m.t().mapv(|z| z.conj()));
        let a = haar_random_state(dim_a, rng);
        let b = haar_random_state(dim_b, rng);
        let (slack, _) = product_bound_slack(&omega, dim_a, dim_b, &a, &b)?;
        worst_slack = worst_slack.min(slack);
        if slack < -1e-10 {
            violations += 1;
        }
    }
    Ok(ProductBoundReport {
        trials,
        violations,
        worst_slack,
    })
}

/// `(rhs - lhs)/Tr(Ω)²` and the raw `(lhs, rhs)` pair for one instance.
pub fn product_bound_slack(
    omega: &CMatrix,
    dim_a: usize,
    dim_b: usize,
    a: &StateVector,
    b: &StateVector,
) -> Result<(f64, (f64, f64)), CoreError> {
    let dims = [dim_a, dim_b];
    let trace: f64 = omega.diag().iter().map(|z| z.re).sum();
    let product = a.tensor(b);
    let expectation = quadratic_form(omega, product.amplitudes()).re;
    let lhs = expectation * expectation;
    let tr_b = partial_trace_dims(omega, &dims, &[0])?;
    let tr_a = partial_trace_dims(omega, &dims, &[1])?;
    let rhs = quadratic_form(&tr_b, a.amplitudes()).re
        * quadratic_form(&tr_a, b.amplitudes()).re;
    let scale = (trace * trace).max(f64::MIN_POSITIVE);
    Ok(((rhs - lhs) / scale, (lhs, rhs)))
}

/// Tolerances for one experiment sweep.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub unambiguity: f64,
    pub closed_form: f64,
    pub psd: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unambiguity: 1e-10,
            closed_form: 1e-10,
            psd: 1e-9,
        }
    }
}

/// Configuration of a Monte Carlo sweep against one built device.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub kind: PovmKind,
    pub tolerances: Tolerances,
    pub independence_tol: f64,
}

impl ExperimentConfig {
    pub fn new(n: usize, m: usize, trials: usize, seed: u64, kind: PovmKind) -> Self {
        Self {
            n,
            m,
            trials,
            seed,
            kind,
            tolerances: Tolerances::default(),
            independence_tol: 1e-10,
        }
    }

    fn validate(&self) -> Result<(), CoreError> {
        if self.trials < 1 || self.n < 2 || self.m < self.n {
            return Err(CoreError::InvalidConfig(format!(
                "need trials ≥ 1, n ≥ 2, m ≥ n (got trials={}, n={}, m={})",
                self.trials, self.n, self.m
            )));
        }
        Ok(())
    }
}

/// One Monte Carlo trial: the measured table against the closed form and the
/// known-state benchmark sandwich.
#[derive(Debug, Clone)]
pub struct ExperimentRecord {
    pub trial: usize,
    pub seed: u64,
    pub rejections: usize,
    pub gram_det: f64,
    /// Minimum Gram eigenvalue: the known-state minimax benchmark.
    pub p_s: f64,
    /// Measured diagonal success probabilities, one per program state.
    pub measured: Vec<f64>,
    pub closed_form: f64,
    /// Largest misidentification entry `P[j][i]`, `i ≥ 1`, `i ≠ j`.
    pub max_error_entry: f64,
    pub row_sum_residual: f64,
    pub sandwich_lo: f64,
    pub sandwich_hi: f64,
    pub pass_unambiguity: bool,
    pub pass_closed_form: bool,
    pub pass_sandwich: bool,
    pub pass: bool,
}

/// Aggregate over an experiment's records.
#[derive(Debug, Clone)]
pub struct ExperimentSummary {
    pub records: Vec<ExperimentRecord>,
    pub max_error_entry: f64,
    pub max_closed_form_residual: f64,
    pub max_row_sum_residual: f64,
    pub failures: usize,
}

/// Builds the configured device.
pub fn build_device(cfg: &ExperimentConfig) -> Result<Povm, CoreError> {
    match cfg.kind {
        PovmKind::OptimalEqual => {
            if cfg.m != cfg.n {
                return Err(CoreError::InvalidConfig(format!(
                    "optimal-equal device requires m = n (got n={}, m={})",
                    cfg.n, cfg.m
                )));
            }
            build_optimal_equal(cfg.n)
        }
        PovmKind::Universal => build_universal(cfg.n, cfg.m),
        PovmKind::Trivial => build_trivial(cfg.n, cfg.m),
        PovmKind::Custom => Err(CoreError::InvalidConfig(
            "experiments require a buildable device kind".into(),
        )),
    }
}

/// Runs the sweep. Trials are evaluated in parallel; each trial derives its
/// own RNG stream from `(seed, trial)`, so results are order-independent and
/// bit-identical across reruns.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentSummary, CoreError> {
    cfg.validate()?;
    let device = build_device(cfg)?;
    let records: Result<Vec<ExperimentRecord>, CoreError> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| run_trial(cfg, &device, trial))
        .collect();
    let records = records?;
    let max_error_entry = records
        .iter()
        .map(|r| r.max_error_entry)
        .fold(0.0, f64::max);
    let max_closed_form_residual = records
        .iter()
        .flat_map(|r| r.measured.iter().map(move |&p| (p - r.closed_form).abs()))
        .fold(0.0, f64::max);
    let max_row_sum_residual = records
        .iter()
        .map(|r| r.row_sum_residual)
        .fold(0.0, f64::max);
    let failures = records.iter().filter(|r| !r.pass).count();
    Ok(ExperimentSummary {
        records,
        max_error_entry,
        max_closed_form_residual,
        max_row_sum_residual,
        failures,
    })
}

fn run_trial(
    cfg: &ExperimentConfig,
    device: &Povm,
    trial: usize,
) -> Result<ExperimentRecord, CoreError> {
    let mut rng = trial_rng(cfg.seed, trial as u64);
    let (states, rejections) = random_program(cfg.n, cfg.m, &mut rng, cfg.independence_tol)?;
    let x = gram_matrix(&states)?;
    let det = gram_det(&x)?;
    let p_s = min_eigenvalue(&x)?;
    let table = success_probabilities(device, &states)?;
    let n = cfg.n;

    let measured: Vec<f64> = (0..n).map(|j| table[(j, j + 1)]).collect();
    let mut max_error_entry: f64 = 0.0;
    let mut row_sum_residual: f64 = 0.0;
    for j in 0..n {
        let mut row = 0.0;
        for i in 0..=n {
            row += table[(j, i)];
            if i >= 1 && i != j + 1 {
                max_error_entry = max_error_entry.max(table[(j, i)].abs());
            }
        }
        row_sum_residual = row_sum_residual.max((row - 1.0).abs());
    }
    let closed_form = closed_form_success(&states, device.kind())?;

    // Known-state baseline comparison, scaled by the device's c/n!.
    // `sandwich_lo` is a guaranteed floor: det(X) ≥ p_s^n since every Gram
    // eigenvalue is ≥ p_s. `sandwich_hi` is the baseline value c·p_s/n!
    // reported for comparison; it is NOT an upper envelope — the device can
    // beat the worst-case baseline (already at n = 2, det = 1 - s² exceeds
    // p_s = 1 - s for any overlap 0 < s < 1). The provable ceiling used for
    // the pass flag combines det(X) ≤ 1 with det(X) ≤ n^{n-1}·p_s (the
    // latter from det(X/n) ≤ λ_min(X/n), all trace-one eigenvalues ≤ 1).
    let scale = device.scale().unwrap_or(0.0) / factorial(n) as f64;
    let sandwich_lo = scale * p_s.powi(n as i32);
    let sandwich_hi = scale * p_s;
    let ceiling = scale * ((n as f64).powi(n as i32 - 1) * p_s).min(1.0);

    let tol = cfg.tolerances;
    let pass_unambiguity =
        max_error_entry <= tol.unambiguity && row_sum_residual <= tol.unambiguity;
    let pass_closed_form = measured
        .iter()
        .all(|&p| (p - closed_form).abs() <= tol.closed_form);
    let pass_sandwich = measured
        .iter()
        .all(|&p| p >= sandwich_lo - 1e-10 && p <= ceiling + 1e-10);
    let pass = pass_unambiguity && pass_closed_form && pass_sandwich;
    Ok(ExperimentRecord {
        trial,
        seed: cfg.seed,
        rejections,
        gram_det: det,
        p_s,
        measured,
        closed_form,
        max_error_entry,
        row_sum_residual,
        sandwich_lo,
        sandwich_hi,
        pass_unambiguity,
        pass_closed_form,
        pass_sandwich,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{dagger, identity, max_norm};

    #[test]
    fn haar_state_is_normalized_and_deterministic() {
        let mut rng = trial_rng(7, 0);
        let a = haar_random_state(4, &mut rng);
        assert!((a.norm() - 1.0).abs() < 1e-12);
        let mut rng = trial_rng(7, 0);
        let b = haar_random_state(4, &mut rng);
        assert_eq!(a.amplitudes(), b.amplitudes());
        // m = 1: phase only
        let mut rng = trial_rng(7, 1);
        let p = haar_random_state(1, &mut rng);
        assert!((p.amplitudes()[0].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn haar_first_component_moment() {
        // E|⟨e_1|ψ⟩|² = 1/m by unitary invariance
        let m = 4;
        let trials = 20_000;
        let mut rng = trial_rng(11, 0);
        let mean: f64 = (0..trials)
            .map(|_| haar_random_state(m, &mut rng).amplitudes()[0].norm_sqr())
            .sum::<f64>()
            / trials as f64;
        assert!((mean - 0.25).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = trial_rng(3, 0);
        let u = haar_random_unitary(4, &mut rng);
        let resid = max_norm(&(&u.dot(&dagger(&u)) - &identity(4)));
        assert!(resid < 1e-12);
    }

    #[test]
    fn random_program_accepts_and_caps() {
        let mut rng = trial_rng(5, 0);
        let (states, rejections) = random_program(2, 2, &mut rng, 1e-10).unwrap();
        assert_eq!(states.len(), 2);
        assert_eq!(rejections, 0);
        let mut rng = trial_rng(5, 1);
        assert!(random_program(3, 2, &mut rng, 1e-10).is_err());
    }

    #[test]
    fn product_bound_rank_one_saturation() {
        // Ω = |φ⟩⟨φ| with the tested product state: equality
        let mut rng = trial_rng(9, 0);
        let a = haar_random_state(2, &mut rng);
        let b = haar_random_state(3, &mut rng);
        let phi = a.tensor(&b);
        let dim = 6;
        let mut omega = crate::matrix::zeros(dim, dim);
        for (r, zr) in phi.amplitudes().iter().enumerate() {
            for (c, zc) in phi.amplitudes().iter().enumerate() {
                omega[(r, c)] = zr * zc.conj();
            }
        }
        let (slack, (lhs, rhs)) = product_bound_slack(&omega, 2, 3, &a, &b).unwrap();
        assert!(slack.abs() < 1e-12, "slack {slack} lhs {lhs} rhs {rhs}");
    }

    #[test]
    fn product_bound_identity_operator() {
        let (da, db) = (2, 3);
        let omega = identity(da * db);
        let mut rng = trial_rng(13, 0);
        let a = haar_random_state(da, &mut rng);
        let b = haar_random_state(db, &mut rng);
        let (slack, (lhs, rhs)) = product_bound_slack(&omega, da, db, &a, &b).unwrap();
        assert!((lhs - 1.0).abs() < 1e-10);
        assert!((rhs - (da * db) as f64).abs() < 1e-10);
        assert!(slack > 0.0);
    }

    #[test]
    fn unsquared_variant_is_not_a_bound() {
        // Ω = |Ψ⟩⟨Ψ| for the maximally entangled Ψ, tested at |00⟩:
        // ⟨φ|Ω|φ⟩·Tr(Ω) = 1/2 while the marginal product is 1/4, so only
        // the squared form survives (1/4 ≤ 1/4, tight).
        let half = Complex64::new(0.5, 0.0);
        let mut omega = zeros(4, 4);
        for &r in &[0usize, 3] {
            for &c in &[0usize, 3] {
                omega[(r, c)] = half;
            }
        }
        let e0 = StateVector::basis(2, 0);
        let (slack, (lhs, rhs)) = product_bound_slack(&omega, 2, 2, &e0, &e0).unwrap();
        assert!((lhs - 0.25).abs() < 1e-12);
        assert!((rhs - 0.25).abs() < 1e-12);
        assert!(slack.abs() < 1e-12);
        let expectation_times_trace = 0.5;
        assert!(expectation_times_trace > rhs + 0.2);
    }

    #[test]
    fn product_bound_random_sweep_small() {
        let mut rng = trial_rng(17, 0);
        let report = product_bound_oracle(500, 2, 2, &mut rng).unwrap();
        assert_eq!(report.violations, 0, "worst slack {}", report.worst_slack);
    }

    #[test]
    fn experiment_is_deterministic_and_passes() {
        let cfg = ExperimentConfig::new(2, 3, 50, 42, PovmKind::Universal);
        let s1 = run_experiment(&cfg).unwrap();
        let s2 = run_experiment(&cfg).unwrap();
        assert_eq!(s1.records.len(), 50);
        assert_eq!(s1.failures, 0, "max err {}", s1.max_error_entry);
        for (a, b) in s1.records.iter().zip(s2.records.iter()) {
            assert_eq!(a.gram_det.to_bits(), b.gram_det.to_bits());
            assert_eq!(a.measured, b.measured);
        }
        // the baseline value is a comparison point, not a ceiling: generic
        // programs beat it
        assert!(s1
            .records
            .iter()
            .any(|r| r.measured.iter().any(|&p| p > r.sandwich_hi + 1e-6)));
    }

    #[test]
    fn trivial_device_experiment_all_zero() {
        let cfg = ExperimentConfig::new(2, 3, 20, 1, PovmKind::Trivial);
        let s = run_experiment(&cfg).unwrap();
        for r in &s.records {
            for &p in &r.measured {
                assert!(p.abs() < 1e-12);
            }
            assert_eq!(r.sandwich_lo, 0.0);
            assert_eq!(r.sandwich_hi, 0.0);
            assert!(r.pass, "{r:?}");
        }
    }
}
