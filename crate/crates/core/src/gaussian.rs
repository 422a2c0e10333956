//! Covariance-matrix toolkit for one- and two-mode Gaussian states.
//!
//! Quadrature ordering is `(x, p)` per mode and the vacuum is `identity / 2`.

use nalgebra::{Complex, Matrix2, Matrix4, SymmetricEigen};

use crate::channel::omega;
use crate::error::{Error, Result};
use crate::numerics::eig_hermitian_2x2;

/// Tolerance on the smallest eigenvalue of `sigma + (i/2) Omega`.
pub const PHYSICALITY_TOL: f64 = 1e-8;

fn check_symmetric<const N: usize>(m: &nalgebra::SMatrix<f64, N, N>) -> Result<()> {
    let scale = m.amax().max(1.0);
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::Validation(format!(
            "covariance matrix is not symmetric (asymmetry {asym:.3e})"
        )));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "covariance matrix has non-finite entries".to_string(),
        ));
    }
    Ok(())
}

/// Covariance matrix of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeCov(Matrix2<f64>);

impl SingleModeCov {
    pub fn new(m: Matrix2<f64>) -> Result<Self> {
        check_symmetric(&m)?;
        Ok(Self(m))
    }

    pub fn vacuum() -> Self {
        Self(Matrix2::identity() * 0.5)
    }

    pub fn matrix(&self) -> &Matrix2<f64> {
        &self.0
    }

    /// Uncertainty principle `sigma + (i/2) Omega >= 0`.
    pub fn is_physical(&self) -> bool {
        let h = self.0.map(|v| Complex::new(v, 0.0)) + omega().map(|v| Complex::new(0.0, 0.5 * v));
        match eig_hermitian_2x2(&h) {
            Ok((lo, _)) => lo >= -PHYSICALITY_TOL,
            Err(_) => false,
        }
    }
}

/// The three 2x2 blocks of a two-mode covariance `[[A, C], [C^T, D]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeBlocks {
    pub a_block: Matrix2<f64>,
    pub d_block: Matrix2<f64>,
    pub c_block: Matrix2<f64>,
}

/// Covariance matrix of two modes, ordered `(x1, p1, x2, p2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCov(Matrix4<f64>);

impl TwoModeCov {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        check_symmetric(&m)?;
        Ok(Self(m))
    }

    pub fn vacuum() -> Self {
        Self(Matrix4::identity() * 0.5)
    }

    pub fn from_blocks(b: &TwoModeBlocks) -> Result<Self> {
        let mut m = Matrix4::zeros();
        m.fixed_view_mut::<2, 2>(0, 0).copy_from(&b.a_block);
        m.fixed_view_mut::<2, 2>(0, 2).copy_from(&b.c_block);
        m.fixed_view_mut::<2, 2>(2, 0)
            .copy_from(&b.c_block.transpose());
        m.fixed_view_mut::<2, 2>(2, 2).copy_from(&b.d_block);
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn blocks(&self) -> TwoModeBlocks {
        TwoModeBlocks {
            a_block: self.0.fixed_view::<2, 2>(0, 0).into_owned(),
            d_block: self.0.fixed_view::<2, 2>(2, 2).into_owned(),
            c_block: self.0.fixed_view::<2, 2>(0, 2).into_owned(),
        }
    }

    /// Uncertainty principle `sigma + (i/2) (Omega + Omega) >= 0`.
    pub fn is_physical(&self) -> bool {
        let om = two_mode_omega();
        let h: Matrix4<Complex<f64>> =
            self.0.map(|v| Complex::new(v, 0.0)) + om.map(|v| Complex::new(0.0, 0.5 * v));
        let eig = SymmetricEigen::new(h).eigenvalues;
        eig.min() >= -PHYSICALITY_TOL
    }
}

/// `Omega (+) Omega`.
pub fn two_mode_omega() -> Matrix4<f64> {
    let mut m = Matrix4::zeros();
    m.fixed_view_mut::<2, 2>(0, 0).copy_from(&omega());
    m.fixed_view_mut::<2, 2>(2, 2).copy_from(&omega());
    m
}

/// Two-mode squeezed vacuum with amplitude `r` and phase `phi`.
///
/// `sigma = 1/2 [[A, C], [C, A]]` with `A = cosh(2r) 1` and
/// `C = sinh(2r) [[cos phi, sin phi], [sin phi, -cos phi]]`.
pub fn tmsv_covariance(r: f64, phi: f64) -> Result<TwoModeCov> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::Domain(format!(
            "squeezing amplitude must be non-negative, got {r}"
        )));
    }
    let a = Matrix2::identity() * (0.5 * (2.0 * r).cosh());
    let (sn, cs) = phi.sin_cos();
    let c = Matrix2::new(cs, sn, sn, -cs) * (0.5 * (2.0 * r).sinh());
    TwoModeCov::from_blocks(&TwoModeBlocks {
        a_block: a,
        d_block: a,
        c_block: c,
    })
}

/// Fidelity between the coherent input and a Gaussian output with matched
/// first moments, `1 / sqrt(det(sigma_in + sigma_out))`.
pub fn gaussian_fidelity_coherent(sigma_out: &SingleModeCov) -> Result<f64> {
    if !sigma_out.is_physical() {
        return Err(Error::Validation(format!(
            "output covariance is not physical: {}",
            sigma_out.matrix()
        )));
    }
    let sum = SingleModeCov::vacuum().matrix() + sigma_out.matrix();
    let det = sum.determinant();
    if !(det > 0.0) {
        return Err(Error::Numeric(format!(
            "non-positive determinant {det} in fidelity"
        )));
    }
    Ok((1.0 / det.sqrt()).min(1.0))
}

/// Smallest symplectic eigenvalue of the partially transposed state.
///
/// Uses `Delta = det A + det D - 2 det C` and the root
/// `nu^2 = Delta/2 - sqrt(Delta^2 - 4 det sigma)/2`, evaluated in the
/// rationalised form `2 det sigma / (Delta + sqrt(Delta^2 - 4 det sigma))` to
/// avoid cancellation for strongly entangled states. Separable states have
/// `2 nu >= 1`.
pub fn pt_symplectic_eig_min(sigma: &TwoModeCov) -> Result<f64> {
    let b = sigma.blocks();
    let delta = b.a_block.determinant() + b.d_block.determinant() - 2.0 * b.c_block.determinant();
    let det = sigma.matrix().determinant();
    let disc = delta * delta - 4.0 * det;
    let scale = (delta * delta).max(1.0);
    if disc < -1e-10 * scale {
        return Err(Error::Numeric(format!(
            "negative discriminant {disc:.3e} in symplectic eigenvalue (unphysical state)"
        )));
    }
    let root = disc.max(0.0).sqrt();
    let denom = delta + root;
    if denom <= 0.0 {
        if det.abs() <= 1e-10 * scale {
            return Ok(0.0);
        }
        return Err(Error::Numeric(format!(
            "invalid symplectic invariants (Delta = {delta:.3e}, det = {det:.3e})"
        )));
    }
    let nu_sq = 2.0 * det / denom;
    if nu_sq < -1e-10 {
        return Err(Error::Numeric(format!(
            "negative squared symplectic eigenvalue {nu_sq:.3e}"
        )));
    }
    Ok(nu_sq.max(0.0).sqrt())
}

/// Logarithmic negativity `max(0, -ln(2 nu))` (natural logarithm).
pub fn log_negativity(nu_min: f64) -> Result<f64> {
    if !(nu_min > 0.0) {
        return Err(Error::Domain(format!(
            "symplectic eigenvalue must be positive, got {nu_min}"
        )));
    }
    Ok((-(2.0 * nu_min).ln()).max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::pt_symplectic_spectrum;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn tmsv_vacuum_and_r2() {
        for phi in [0.0, 1.0, PI] {
            assert_eq!(
                tmsv_covariance(0.0, phi).unwrap().matrix(),
                &(Matrix4::identity() * 0.5)
            );
        }
        let s = tmsv_covariance(2.0, PI).unwrap();
        let b = s.blocks();
        assert_relative_eq!(b.a_block[(0, 0)], 4.0f64.cosh() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(b.a_block[(0, 0)], 13.6541, epsilon = 1e-4);
        assert_relative_eq!(b.c_block[(0, 0)], -4.0f64.sinh() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(b.c_block[(1, 1)], 4.0f64.sinh() / 2.0, epsilon = 1e-12);
        assert_relative_eq!(b.c_block[(1, 1)], 13.6450, epsilon = 1e-4);
        assert!(b.c_block[(0, 1)].abs() < 1e-12);
        assert!(tmsv_covariance(-0.1, 0.0).is_err());
    }

    #[test]
    fn fidelity_examples() {
        assert_eq!(
            gaussian_fidelity_coherent(&SingleModeCov::vacuum()).unwrap(),
            1.0
        );
        let s = SingleModeCov::new(Matrix2::identity() * 1.5).unwrap();
        assert_relative_eq!(
            gaussian_fidelity_coherent(&s).unwrap(),
            0.5,
            epsilon = 1e-15
        );
        let s = SingleModeCov::new(Matrix2::new(0.5, 0.0, 0.0, 1.5)).unwrap();
        assert_relative_eq!(
            gaussian_fidelity_coherent(&s).unwrap(),
            1.0 / 2.0f64.sqrt(),
            epsilon = 1e-15
        );
        let bad = SingleModeCov::new(Matrix2::identity() * 0.1).unwrap();
        assert!(matches!(
            gaussian_fidelity_coherent(&bad),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn symplectic_examples() {
        assert_relative_eq!(
            pt_symplectic_eig_min(&TwoModeCov::vacuum()).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let nu = pt_symplectic_eig_min(&tmsv_covariance(2.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(2.0 * nu, (-4.0f64).exp(), max_relative = 1e-10);
        assert_relative_eq!(2.0 * nu, 0.018316, epsilon = 1e-6);
        let nu = pt_symplectic_eig_min(&tmsv_covariance(1.0, 0.0).unwrap()).unwrap();
        assert_relative_eq!(2.0 * nu, 0.135335, epsilon = 1e-6);
    }

    #[test]
    fn symplectic_matches_brute_force_for_tmsv() {
        for (r, phi) in [(0.3, 0.0), (1.0, 1.1), (2.0, PI)] {
            let s = tmsv_covariance(r, phi).unwrap();
            let brute = pt_symplectic_spectrum(s.matrix()).unwrap()[0];
            assert_relative_eq!(
                pt_symplectic_eig_min(&s).unwrap(),
                brute,
                max_relative = 1e-8
            );
            assert_relative_eq!(brute, 0.5 * (-2.0 * r).exp(), max_relative = 1e-8);
        }
    }

    #[test]
    fn log_negativity_examples() {
        assert_eq!(log_negativity(0.5).unwrap(), 0.0);
        assert_relative_eq!(
            log_negativity(0.5 * (-4.0f64).exp()).unwrap(),
            4.0,
            epsilon = 1e-14
        );
        assert_eq!(log_negativity(1.0).unwrap(), 0.0);
        assert!(matches!(log_negativity(0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn physicality_examples() {
        assert!(SingleModeCov::vacuum().is_physical());
        assert!(TwoModeCov::vacuum().is_physical());
        assert!(!SingleModeCov::new(Matrix2::identity() * 0.1)
            .unwrap()
            .is_physical());
        assert!(tmsv_covariance(2.0, 0.3).unwrap().is_physical());
        assert!(!TwoModeCov::new(Matrix4::identity() * 0.2)
            .unwrap()
            .is_physical());
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(SingleModeCov::new(Matrix2::new(1.0, 0.2, 0.0, 1.0)).is_err());
    }

    proptest! {
        #[test]
        fn tmsv_is_pure(r in 0.0..3.0f64, phi in 0.0..(2.0 * PI)) {
            let s = tmsv_covariance(r, phi).unwrap();
            let det = s.matrix().determinant();
            prop_assert!((det - 1.0 / 16.0).abs() < 1e-10, "det = {det}");
        }

        #[test]
        fn tmsv_entanglement_is_phase_independent(r in 0.0..3.0f64, phi in 0.0..(2.0 * PI)) {
            let a = pt_symplectic_eig_min(&tmsv_covariance(r, 0.0).unwrap()).unwrap();
            let b = pt_symplectic_eig_min(&tmsv_covariance(r, phi).unwrap()).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn tmsv_log_negativity_is_2r(r in 0.0..3.0f64) {
            let nu = pt_symplectic_eig_min(&tmsv_covariance(r, 0.7).unwrap()).unwrap();
            prop_assert!((log_negativity(nu).unwrap() - 2.0 * r).abs() < 1e-10);
        }

        #[test]
        fn fidelity_decreases_with_noise(a in 0.5..5.0f64, d in 0.5..5.0f64, da in 0.01..1.0f64) {
            let f0 = gaussian_fidelity_coherent(&SingleModeCov::new(Matrix2::new(a, 0.0, 0.0, d)).unwrap()).unwrap();
            let f1 = gaussian_fidelity_coherent(&SingleModeCov::new(Matrix2::new(a + da, 0.0, 0.0, d)).unwrap()).unwrap();
            prop_assert!(f1 < f0);
            prop_assert!(f0 > 0.0 && f0 <= 1.0);
        }
    }
}
