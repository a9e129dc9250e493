//! Dense complex matrices and Hermitian spectral routines.

use crate::error::CoreError;
use faer::{c64, Mat, Side};
use ndarray::{Array1, Array2};
use num_complex::Complex64;

/// Dense complex matrix, row-major semantics.
pub type CMatrix = Array2<Complex64>;
/// Dense complex vector.
pub type CVector = Array1<Complex64>;

pub fn identity(dim: usize) -> CMatrix {
    Array2::from_diag_elem(dim, Complex64::new(1.0, 0.0))
}

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    Array2::zeros((rows, cols))
}

/// Conjugate transpose.
pub fn dagger(a: &CMatrix) -> CMatrix {
    a.t().mapv(|z| z.conj())
}

/// Entrywise max-norm.
pub fn max_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn frobenius_norm(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Kronecker product. Entry `((ra*rb_n + rb), (ca*cb_n + cb)) = a[ra,ca]*b[rb,cb]`,
/// so the left factor is the most significant index.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for ra in 0..ar {
        for ca in 0..ac {
            let f = a[(ra, ca)];
            if f == Complex64::ZERO {
                continue;
            }
            for rb in 0..br {
                for cb in 0..bc {
                    out[(ra * br + rb, ca * bc + cb)] = f * b[(rb, cb)];
                }
            }
        }
    }
    out
}

/// `⟨v|M|v⟩`.
pub fn quadratic_form(m: &CMatrix, v: &CVector) -> Complex64 {
    let mv = m.dot(v);
    v.iter().zip(mv.iter()).map(|(a, b)| a.conj() * b).sum()
}

/// Determinant by partially pivoted Gaussian elimination.
pub fn det_lu(a: &CMatrix) -> Result<Complex64, CoreError> {
    let (r, c) = a.dim();
    if r != c {
        return Err(CoreError::NotSquare { rows: r, cols: c });
    }
    let n = r;
    let mut m = a.clone();
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let (pivot, _) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if m[(pivot, k)].norm() == 0.0 {
            return Ok(Complex64::ZERO);
        }
        if pivot != k {
            for j in 0..n {
                let tmp = m[(k, j)];
                m[(k, j)] = m[(pivot, j)];
                m[(pivot, j)] = tmp;
            }
            det = -det;
        }
        det *= m[(k, k)];
        for i in (k + 1)..n {
            let f = m[(i, k)] / m[(k, k)];
            for j in k..n {
                let sub = f * m[(k, j)];
                m[(i, j)] -= sub;
            }
        }
    }
    Ok(det)
}

/// Square complex matrix with Hermitian symmetry enforced on construction.
///
/// Accumulated kron/permutation round-off is symmetrized away via
/// `M ← (M + M†)/2` so downstream eigensolves see an exactly Hermitian input.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: CMatrix,
}

impl HermitianOperator {
    /// Builds the operator, symmetrizing the input.
    pub fn new(mat: CMatrix) -> Result<Self, CoreError> {
        let (r, c) = mat.dim();
        if r != c {
            return Err(CoreError::NotSquare { rows: r, cols: c });
        }
        let sym = (&mat + &dagger(&mat)).mapv(|z| z * 0.5);
        Ok(Self { mat: sym })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            mat: zeros(dim, dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self { mat: identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    /// Trace; the imaginary part is zero by symmetrization.
    pub fn trace(&self) -> f64 {
        self.mat.diag().iter().map(|z| z.re).sum()
    }
}

/// Eigendecomposition of a Hermitian operator.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Real eigenvalues, ascending.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, ordered like `values`.
    pub vectors: CMatrix,
}

/// Full spectral decomposition, eigenvalues sorted ascending.
///
/// Highly degenerate sparse spectra (e.g. projectors embedded in large
/// registers) can stall the backend's QR iteration; a diagonal shift
/// `A + tI` breaks the stall without changing eigenvectors, so failed
/// solves are retried shifted and the eigenvalues shifted back.
pub fn hermitian_eig(op: &HermitianOperator) -> Result<HermitianEig, CoreError> {
    let n = op.dim();
    if n == 0 {
        return Ok(HermitianEig {
            values: vec![],
            vectors: zeros(0, 0),
        });
    }
    let scale = max_norm(op.matrix()).max(1.0);
    let mut last_err = CoreError::EigenFailed;
    for shift in [scale, 0.0, scale * std::f64::consts::SQRT_2] {
        match hermitian_eig_shifted(op, shift) {
            Ok(eig) => return Ok(eig),
            Err(e) => last_err = e,
        }
    }
    Err(last_err)
}

fn hermitian_eig_shifted(op: &HermitianOperator, shift: f64) -> Result<HermitianEig, CoreError> {
    let n = op.dim();
    let a = Mat::from_fn(n, n, |i, j| {
        let z = op.matrix()[(i, j)];
        c64::new(z.re + if i == j { shift } else { 0.0 }, z.im)
    });
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| CoreError::EigenFailed)?;
    let s = evd.S();
    let u = evd.U();
    let mut order: Vec<usize> = (0..n).collect();
    let raw: Vec<f64> = (0..n).map(|i| s[i].re - shift).collect();
    order.sort_by(|&i, &j| raw[i].total_cmp(&raw[j]));
    let values: Vec<f64> = order.iter().map(|&i| raw[i]).collect();
    let mut vectors = zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            let z = u[(row, src)];
            vectors[(row, col)] = Complex64::new(z.re, z.im);
        }
    }
    Ok(HermitianEig { values, vectors })
}

/// True iff the smallest eigenvalue is `≥ -tol`.
pub fn is_psd(op: &HermitianOperator, tol: f64) -> Result<bool, CoreError> {
    if op.dim() == 0 {
        return Ok(true);
    }
    let eig = hermitian_eig(op)?;
    Ok(eig.values[0] >= -tol)
}
