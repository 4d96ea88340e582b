//! Exact discretisation of a linear SDE and its stationary covariance.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Transition matrix Φ = e^{AΔt} and the symmetric square root L of the
/// per-step noise covariance Q = ∫₀^Δt e^{As} B Bᵀ e^{Aᵀs} ds, both from one
/// block-matrix exponential.
pub fn van_loan(a: &DMatrix<f64>, b: &DMatrix<f64>, dt: f64) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    let bbt = b * b.transpose();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&(-a * dt));
    m.view_mut((0, n), (n, n)).copy_from(&(&bbt * dt));
    m.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * dt));
    let e = m.exp();
    let phi = e.view((n, n), (n, n)).transpose();
    let q = &phi * e.view((0, n), (n, n));
    let q = (&q + q.transpose()) * 0.5;
    Ok((phi.clone_owned(), psd_sqrt(&q)?))
}

/// Stationary covariance P solving A P + P Aᵀ + B Bᵀ = 0.
pub fn stationary_covariance(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    let eye = DMatrix::<f64>::identity(n, n);
    let lhs = eye.kronecker(a) + a.kronecker(&eye);
    let rhs = -(b * b.transpose());
    let vec = nalgebra::DVector::from_column_slice(rhs.as_slice());
    let sol = lhs
        .lu()
        .solve(&vec)
        .ok_or_else(|| Error::Singular("Lyapunov system for the stationary covariance".into()))?;
    let p = DMatrix::from_column_slice(n, n, sol.as_slice());
    Ok((&p + p.transpose()) * 0.5)
}

/// Symmetric square root of a positive semi-definite matrix; tiny negative
/// eigenvalues from rounding are clipped.
pub fn psd_sqrt(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let eig = q.clone().symmetric_eigen();
    let scale = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if eig.eigenvalues.iter().any(|&v| v < -1e-9 * scale) {
        return Err(Error::Instability("noise covariance is not positive semi-definite".into()));
    }
    let d = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    Ok(&eig.eigenvectors * DMatrix::from_diagonal(&d) * eig.eigenvectors.transpose())
}
