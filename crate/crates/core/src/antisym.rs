//! Wedge products, the antisymmetric subspace projector and its
//! increasing-tuple basis.

use crate::error::CoreError;
use crate::matrix::{quadratic_form, zeros, CVector, HermitianOperator};
use crate::registers::{digits_to_index, index_to_digits, Permutation};
use num_complex::Complex64;

/// Complex amplitude vector over a register space.
///
/// `normalized` marks vectors with unit 2-norm (within 1e-12); wedge outputs
/// are left unnormalized with their norm recorded.
#[derive(Debug, Clone)]
pub struct StateVector {
    amps: CVector,
    norm: f64,
    normalized: bool,
}

impl StateVector {
    /// Wraps raw amplitudes, recording the norm.
    pub fn new(amps: CVector) -> Self {
        let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        Self {
            amps,
            norm,
            normalized: (norm - 1.0).abs() <= 1e-12,
        }
    }

    /// Scales to unit norm.
    pub fn normalize(mut self) -> Self {
        if self.norm > 0.0 {
            let inv = 1.0 / self.norm;
            self.amps.mapv_inplace(|z| z * inv);
        }
        self.norm = if self.norm > 0.0 { 1.0 } else { 0.0 };
        self.normalized = self.norm == 1.0;
        self
    }

    /// The `k`-th standard basis vector of dimension `dim`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut amps = CVector::zeros(dim);
        amps[k] = Complex64::new(1.0, 0.0);
        Self {
            amps,
            norm: 1.0,
            normalized: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    /// `⟨self|other⟩`, conjugate-linear in the first slot.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64, CoreError> {
        if self.dim() != other.dim() {
            return Err(CoreError::MixedDims(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Tensor product `self ⊗ other` (self most significant).
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = CVector::zeros(self.dim() * other.dim());
        for (i, a) in self.amps.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * other.dim() + j] = a * b;
            }
        }
        StateVector::new(amps)
    }
}

/// Tensor product of a list of states, left to right.
pub fn tensor_all(states: &[StateVector]) -> Result<StateVector, CoreError> {
    let mut iter = states.iter();
    let first = iter
        .next()
        .ok_or_else(|| CoreError::InvalidConfig("empty state list".into()))?;
    let mut acc = first.clone();
    for s in iter {
        acc = acc.tensor(s);
    }
    Ok(acc)
}

/// A strictly increasing tuple of levels in `{0..m-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncreasingTuple {
    entries: Vec<usize>,
}

impl IncreasingTuple {
    pub fn new(entries: Vec<usize>) -> Result<Self, CoreError> {
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CoreError::InvalidConfig(format!(
                "tuple {entries:?} is not strictly increasing"
            )));
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn contains(&self, level: usize) -> bool {
        self.entries.binary_search(&level).is_ok()
    }

    /// Position of `level` in the tuple, if present.
    pub fn position(&self, level: usize) -> Option<usize> {
        self.entries.binary_search(&level).ok()
    }

    /// The `(len+1)`-tuple obtained by inserting `level` (must be absent).
    pub fn insert(&self, level: usize) -> IncreasingTuple {
        let mut entries = self.entries.clone();
        let pos = entries.partition_point(|&e| e < level);
        entries.insert(pos, level);
        IncreasingTuple { entries }
    }

    /// The `(len-1)`-tuple with `level` removed.
    pub fn remove(&self, level: usize) -> IncreasingTuple {
        let entries = self
            .entries
            .iter()
            .copied()
            .filter(|&e| e != level)
            .collect();
        IncreasingTuple { entries }
    }
}

/// All strictly increasing `n`-tuples from `{0..m-1}`, lexicographic.
///
/// `n > m` is an error: the set is empty, which is distinct from returning an
/// empty list.
pub fn increasing_tuples(n: usize, m: usize) -> Result<Vec<IncreasingTuple>, CoreError> {
    if n == 0 || n > m {
        return Err(CoreError::EmptyTupleSet { n, m });
    }
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(IncreasingTuple {
            entries: cur.clone(),
        });
        // advance to the next lexicographic combination
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            if cur[k] < m - (n - k) {
                cur[k] += 1;
                for j in k + 1..n {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The wedge product `(1/√n!) Σ_σ sgn(σ) |v_{σ(0)}⟩⊗…⊗|v_{σ(n-1)}⟩`.
///
/// The output is generally not normalized; its norm² equals the Gram
/// determinant of the factors.
pub fn wedge(vectors: &[StateVector]) -> Result<StateVector, CoreError> {
    let n = vectors.len();
    if n == 0 {
        return Err(CoreError::InvalidConfig("wedge of zero vectors".into()));
    }
    let m = vectors[0].dim();
    for v in vectors {
        if v.dim() != m {
            return Err(CoreError::MixedDims(m, v.dim()));
        }
    }
    let dim = m.pow(n as u32);
    let mut amps = CVector::zeros(dim);
    let scale = 1.0 / (factorial(n) as f64).sqrt();
    for sigma in Permutation::all(n) {
        let sign = sigma.sign() as f64;
        let permuted: Vec<&StateVector> = (0..n).map(|k| &vectors[sigma.apply(k)]).collect();
        add_product(&mut amps, &permuted, sign * scale, m);
    }
    Ok(StateVector::new(amps))
}

fn add_product(amps: &mut CVector, factors: &[&StateVector], coeff: f64, m: usize) {
    let n = factors.len();
    let dims = vec![m; n];
    let mut digits = vec![0usize; n];
    for idx in 0..amps.len() {
        index_to_digits(idx, &dims, &mut digits);
        let mut term = Complex64::new(coeff, 0.0);
        for (k, f) in factors.iter().enumerate() {
            term *= f.amplitudes()[digits[k]];
            if term == Complex64::new(0.0, 0.0) {
                break;
            }
        }
        amps[idx] += term;
    }
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

/// Orthonormal basis `{|φ_ς⟩}` of `∧ⁿH`, one vector per increasing tuple.
pub fn antisym_basis(n: usize, m: usize) -> Result<Vec<StateVector>, CoreError> {
    let tuples = increasing_tuples(n, m)?;
    tuples
        .iter()
        .map(|t| {
            let factors: Vec<StateVector> = t
                .entries()
                .iter()
                .map(|&k| StateVector::basis(m, k))
                .collect();
            wedge(&factors).map(|w| w.normalize())
        })
        .collect()
}

/// The projector `Φ(n) = (1/n!) Σ_σ sgn(σ) U_σ` onto `∧ⁿH` in `H^{⊗n}`.
///
/// Zero when `n > m`. The increasing-tuple basis gives the same operator;
/// that construction is kept as an independent cross-check in the tests.
pub fn antisym_projector(n: usize, m: usize) -> Result<HermitianOperator, CoreError> {
    if n == 0 {
        return Err(CoreError::InvalidConfig("projector needs n ≥ 1".into()));
    }
    let dims = vec![m; n];
    let dim = m.pow(n as u32);
    if n > m {
        return Ok(HermitianOperator::zero(dim));
    }
    let mut mat = zeros(dim, dim);
    let inv_fact = 1.0 / factorial(n) as f64;
    let mut digits = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for sigma in Permutation::all(n) {
        let coeff = sigma.sign() as f64 * inv_fact;
        for col in 0..dim {
            index_to_digits(col, &dims, &mut digits);
            for k in 0..n {
                permuted[k] = digits[sigma.apply(k)];
            }
            mat[(digits_to_index(&permuted, &dims), col)] += Complex64::new(coeff, 0.0);
        }
    }
    HermitianOperator::new(mat)
}

/// `⟨φ|Φ(n)|φ⟩` for the product state assembled from the inputs, evaluated
/// through the projector matrix. Equals `det(X)/n!` by the Gram identity.
pub fn antisym_overlap(product_states: &[StateVector]) -> Result<f64, CoreError> {
    let n = product_states.len();
    if n == 0 {
        return Err(CoreError::InvalidConfig("empty state list".into()));
    }
    let m = product_states[0].dim();
    for v in product_states {
        if v.dim() != m {
            return Err(CoreError::MixedDims(m, v.dim()));
        }
    }
    let phi = antisym_projector(n, m)?;
    let product = tensor_all(product_states)?;
    let val = quadratic_form(phi.matrix(), product.amplitudes());
    Ok(val.re)
}
