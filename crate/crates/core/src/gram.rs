//! Gram matrices of state sets: determinants, extremal eigenvalues,
//! linear-independence tests.

use crate::antisym::StateVector;
use crate::error::CoreError;
use crate::matrix::{det_lu, hermitian_eig, zeros, HermitianOperator};

/// Default tolerance on the minimum Gram eigenvalue for independence tests.
/// The determinant underflows for large `n`; the eigenvalue is scale-stable.
pub const INDEPENDENCE_TOL: f64 = 1e-10;

/// Gram matrix `X_{ij} = ⟨ψ_i|ψ_j⟩` of a set of normalized states.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    op: HermitianOperator,
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.op.dim()
    }

    pub fn operator(&self) -> &HermitianOperator {
        &self.op
    }
}

/// Builds the Gram matrix; conjugate-linear in the first slot.
pub fn gram_matrix(states: &[StateVector]) -> Result<GramMatrix, CoreError> {
    let n = states.len();
    if n == 0 {
        return Err(CoreError::InvalidConfig("empty state list".into()));
    }
    let dim = states[0].dim();
    for s in states {
        if s.dim() != dim {
            return Err(CoreError::MixedDims(dim, s.dim()));
        }
    }
    let mut mat = zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            mat[(i, j)] = states[i].inner(&states[j])?;
        }
    }
    Ok(GramMatrix {
        op: HermitianOperator::new(mat)?,
    })
}

/// Determinant of the Gram matrix via pivoted LU. An imaginary residual above
/// 1e-10 signals a non-Hermitian input bug and is reported as an error.
pub fn gram_det(x: &GramMatrix) -> Result<f64, CoreError> {
    let d = det_lu(x.op.matrix())?;
    if d.im.abs() > 1e-10 {
        return Err(CoreError::NonHermitianDeterminant(d.im));
    }
    Ok(d.re)
}

/// Smallest eigenvalue of the Gram matrix (the known-state minimax benchmark
/// p_s), clamped to zero when within -1e-10 of it.
pub fn min_eigenvalue(x: &GramMatrix) -> Result<f64, CoreError> {
    let eig = hermitian_eig(&x.op)?;
    let min = eig.values[0];
    if min < 0.0 && min >= -1e-10 {
        Ok(0.0)
    } else {
        Ok(min)
    }
}

/// True iff the minimum Gram eigenvalue exceeds `tol`.
pub fn is_linearly_independent(states: &[StateVector], tol: f64) -> Result<bool, CoreError> {
    if states.len() > states[0].dim() {
        return Ok(false);
    }
    let x = gram_matrix(states)?;
    Ok(min_eigenvalue(&x)? > tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{max_norm, CVector};
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn angle_state(theta: f64) -> StateVector {
        StateVector::new(CVector::from(vec![
            c(theta.cos(), 0.0),
            c(theta.sin(), 0.0),
        ]))
    }

    #[test]
    fn orthonormal_set_gives_identity() {
        let states = vec![StateVector::basis(3, 0), StateVector::basis(3, 1)];
        let x = gram_matrix(&states).unwrap();
        assert!(max_norm(&(x.operator().matrix() - &crate::matrix::identity(2))) < 1e-15);
        assert!((gram_det(&x).unwrap() - 1.0).abs() < 1e-14);
        assert!((min_eigenvalue(&x).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_real_states_at_angle() {
        let theta = 0.7f64;
        let x = gram_matrix(&[angle_state(0.0), angle_state(theta)]).unwrap();
        assert!((x.operator().matrix()[(0, 1)].re - theta.cos()).abs() < 1e-14);
        let s = theta.cos();
        assert!((gram_det(&x).unwrap() - (1.0 - s * s)).abs() < 1e-12);
        // eigenvalues 1 ± s
        assert!((min_eigenvalue(&x).unwrap() - (1.0 - s)).abs() < 1e-12);
    }

    #[test]
    fn duplicated_state_is_singular() {
        let v = angle_state(0.3);
        let x = gram_matrix(&[v.clone(), v.clone()]).unwrap();
        assert!(gram_det(&x).unwrap().abs() < 1e-12);
        assert!((min_eigenvalue(&x).unwrap()).abs() < 1e-12);
        assert!(!is_linearly_independent(&[v.clone(), v], 1e-10).unwrap());
    }

    #[test]
    fn pigeonhole_dependence() {
        let states = vec![
            StateVector::basis(2, 0),
            StateVector::basis(2, 1),
            angle_state(0.4),
        ];
        assert!(!is_linearly_independent(&states, 1e-10).unwrap());
    }

    #[test]
    fn standard_basis_is_independent() {
        let states: Vec<StateVector> = (0..3).map(|k| StateVector::basis(3, k)).collect();
        assert!(is_linearly_independent(&states, 1e-10).unwrap());
    }

    #[test]
    fn det_equals_eigenvalue_product() {
        let states = vec![angle_state(0.1), angle_state(0.9)];
        let x = gram_matrix(&states).unwrap();
        let eig = hermitian_eig(x.operator()).unwrap();
        let prod: f64 = eig.values.iter().product();
        let det = gram_det(&x).unwrap();
        assert!((prod - det).abs() <= 1e-9 * det.abs().max(1.0));
    }
}
