//! Composite register spaces: subsystem indexing, permutation operators,
//! partial traces and local-unitary conjugation.
//!
//! Index convention: subsystem 0 is the most significant digit of a composite
//! basis index (big-endian over registers), matching left-to-right tensor
//! product order. For a layout with `n` program registers, subsystems `0..n`
//! are the program registers and subsystem `n` is the data register.

use crate::error::CoreError;
use crate::matrix::{zeros, CMatrix, CVector, HermitianOperator};
use num_complex::Complex64;

/// `n` program registers plus one data register, each of local dimension `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    pub n: usize,
    pub m: usize,
}

impl RegisterLayout {
    pub fn new(n: usize, m: usize) -> Self {
        Self { n, m }
    }

    pub fn total_subsystems(&self) -> usize {
        self.n + 1
    }

    pub fn total_dim(&self) -> usize {
        self.m.pow(self.total_subsystems() as u32)
    }

    /// Index of the data register.
    pub fn data_subsystem(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.m; self.total_subsystems()]
    }
}

/// Decomposes `index` into big-endian digits for the given subsystem dims.
pub fn index_to_digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

/// Composite basis index of big-endian digits.
pub fn digits_to_index(digits: &[usize], dims: &[usize]) -> usize {
    let mut idx = 0;
    for (d, &dim) in digits.iter().zip(dims) {
        idx = idx * dim + d;
    }
    idx
}

/// A permutation of `{0..n-1}` given by its image sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self, CoreError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return Err(CoreError::InvalidPermutation(images));
            }
            seen[i] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// Transposition of `a` and `b` in a degree-`n` permutation.
    pub fn transposition(n: usize, a: usize, b: usize) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.swap(a, b);
        Self { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn apply(&self, k: usize) -> usize {
        self.images[k]
    }

    /// Signature via cycle decomposition: `(-1)^(n - #cycles)`.
    pub fn sign(&self) -> i32 {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut cycles = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut k = start;
            while !seen[k] {
                seen[k] = true;
                k = self.images[k];
            }
        }
        if (n - cycles) % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn inverse(&self) -> Self {
        let mut images = vec![0; self.degree()];
        for (k, &v) in self.images.iter().enumerate() {
            images[v] = k;
        }
        Self { images }
    }

    /// Composition matching operator multiplication:
    /// `permutation_operator(a.compose(b)) = permutation_operator(a) · permutation_operator(b)`.
    pub fn compose(&self, other: &Permutation) -> Self {
        let images = self.images.iter().map(|&k| other.images[k]).collect();
        Self { images }
    }

    /// Extends to degree `n`, fixing the appended points.
    pub fn extend(&self, n: usize) -> Self {
        let mut images = self.images.clone();
        images.extend(self.degree()..n);
        Self { images }
    }

    /// All permutations of degree `n` (lexicographic in image sequence).
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut images: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: images.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| images[i] < images[i + 1])
            else {
                break;
            };
            let j = (i + 1..n).rev().find(|&j| images[j] > images[i]).unwrap();
            images.swap(i, j);
            images[i + 1..].reverse();
        }
        out
    }
}

/// The unitary realigning `n` subsystems of local dimension `m`:
/// maps `|ω_0…ω_{n-1}⟩` to `|ω_{σ(0)}…ω_{σ(n-1)}⟩`.
pub fn permutation_operator(sigma: &Permutation, m: usize) -> CMatrix {
    let n = sigma.degree();
    let dims = vec![m; n];
    let dim = m.pow(n as u32);
    let mut out = zeros(dim, dim);
    let mut digits = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for col in 0..dim {
        index_to_digits(col, &dims, &mut digits);
        for k in 0..n {
            permuted[k] = digits[sigma.apply(k)];
        }
        let row = digits_to_index(&permuted, &dims);
        out[(row, col)] = Complex64::new(1.0, 0.0);
    }
    out
}

/// Conjugation `U_σ · op · U_σ†` implemented as a pure reindexing.
pub fn permute_subsystems(op: &CMatrix, m: usize, sigma: &Permutation) -> CMatrix {
    let n = sigma.degree();
    let dims = vec![m; n];
    let dim = op.nrows();
    debug_assert_eq!(dim, m.pow(n as u32));
    // U e_ω = e_{P(ω)} with P(ω)_k = ω_{σ(k)}, so (U·A·U†)[r,c] = A[P⁻¹(r), P⁻¹(c)].
    let mut inv_map = vec![0usize; dim];
    let mut digits = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for idx in 0..dim {
        index_to_digits(idx, &dims, &mut digits);
        for k in 0..n {
            permuted[k] = digits[sigma.apply(k)];
        }
        inv_map[digits_to_index(&permuted, &dims)] = idx;
    }
    let mut out = zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(r, c)] = op[(inv_map[r], inv_map[c])];
        }
    }
    out
}

/// `U_σ v` for a composite vector.
pub fn permute_vector(v: &CVector, m: usize, sigma: &Permutation) -> CVector {
    let n = sigma.degree();
    let dims = vec![m; n];
    let dim = v.len();
    let mut out = CVector::zeros(dim);
    let mut digits = vec![0usize; n];
    let mut permuted = vec![0usize; n];
    for col in 0..dim {
        index_to_digits(col, &dims, &mut digits);
        for k in 0..n {
            permuted[k] = digits[sigma.apply(k)];
        }
        out[digits_to_index(&permuted, &dims)] = v[col];
    }
    out
}

/// Partial trace keeping the listed subsystems (heterogeneous dims allowed).
///
/// The kept subsystems appear in ascending order in the reduced operator.
pub fn partial_trace_dims(
    op: &CMatrix,
    dims: &[usize],
    keep: &[usize],
) -> Result<CMatrix, CoreError> {
    let total: usize = dims.iter().product();
    if op.nrows() != total || op.ncols() != total {
        return Err(CoreError::DimensionMismatch {
            expected: total,
            got: op.nrows(),
        });
    }
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if keep.is_empty() || keep.iter().any(|&k| k >= dims.len()) {
        return Err(CoreError::InvalidConfig(format!(
            "keep set {keep:?} invalid for {} subsystems",
            dims.len()
        )));
    }
    let drop: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let keep_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let drop_dims: Vec<usize> = drop.iter().map(|&k| dims[k]).collect();
    let kdim: usize = keep_dims.iter().product();
    let ddim: usize = drop_dims.iter().product::<usize>().max(1);

    let mut out = zeros(kdim, kdim);
    let mut kr = vec![0usize; keep.len()];
    let mut kc = vec![0usize; keep.len()];
    let mut dd = vec![0usize; drop.len()];
    let mut full_r = vec![0usize; dims.len()];
    let mut full_c = vec![0usize; dims.len()];
    for r in 0..kdim {
        index_to_digits(r, &keep_dims, &mut kr);
        for c in 0..kdim {
            index_to_digits(c, &keep_dims, &mut kc);
            let mut acc = Complex64::new(0.0, 0.0);
            for t in 0..ddim {
                index_to_digits(t, &drop_dims, &mut dd);
                for (pos, &k) in keep.iter().enumerate() {
                    full_r[k] = kr[pos];
                    full_c[k] = kc[pos];
                }
                for (pos, &d) in drop.iter().enumerate() {
                    full_r[d] = dd[pos];
                    full_c[d] = dd[pos];
                }
                acc += op[(
                    digits_to_index(&full_r, dims),
                    digits_to_index(&full_c, dims),
                )];
            }
            out[(r, c)] = acc;
        }
    }
    Ok(out)
}

/// Partial trace of an operator on a register layout, keeping `keep`
/// (0-based subsystem indices).
pub fn partial_trace(
    op: &HermitianOperator,
    layout: &RegisterLayout,
    keep: &[usize],
) -> Result<HermitianOperator, CoreError> {
    let reduced = partial_trace_dims(op.matrix(), &layout.dims(), keep)?;
    HermitianOperator::new(reduced)
}

/// Conjugates `op` by `u ⊗ u ⊗ … ⊗ u` (`sites` factors of local dimension `m`)
/// without forming the tensor-power matrix: one mode product per site and side.
pub fn conjugate_tensor_power(op: &CMatrix, u: &CMatrix, sites: usize) -> CMatrix {
    let m = u.nrows();
    let dim = op.nrows();
    debug_assert_eq!(dim, m.pow(sites as u32));
    let mut cur = op.clone();
    // left: rows of each site transformed by u
    for s in 0..sites {
        cur = apply_site_rows(&cur, u, s, sites, m);
    }
    // right: columns of each site transformed by u†
    for s in 0..sites {
        cur = apply_site_cols(&cur, u, s, sites, m);
    }
    cur
}

fn site_stride(s: usize, sites: usize, m: usize) -> usize {
    m.pow((sites - 1 - s) as u32)
}

fn apply_site_rows(a: &CMatrix, u: &CMatrix, s: usize, sites: usize, m: usize) -> CMatrix {
    let dim = a.nrows();
    let stride = site_stride(s, sites, m);
    let mut out = zeros(dim, dim);
    let block = stride * m;
    for c in 0..dim {
        for base in 0..dim / block {
            for inner in 0..stride {
                let origin = base * block + inner;
                for i in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..m {
                        acc += u[(i, j)] * a[(origin + j * stride, c)];
                    }
                    out[(origin + i * stride, c)] = acc;
                }
            }
        }
    }
    out
}

fn apply_site_cols(a: &CMatrix, u: &CMatrix, s: usize, sites: usize, m: usize) -> CMatrix {
    let dim = a.nrows();
    let stride = site_stride(s, sites, m);
    let mut out = zeros(dim, dim);
    let block = stride * m;
    for r in 0..dim {
        for base in 0..dim / block {
            for inner in 0..stride {
                let origin = base * block + inner;
                for i in 0..m {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..m {
                        // right-multiplication by u†: out[., i] = Σ_j a[., j] · conj(u[i, j])
                        acc += a[(r, origin + j * stride)] * u[(i, j)].conj();
                    }
                    out[(r, origin + i * stride)] = acc;
                }
            }
        }
    }
    out
}
