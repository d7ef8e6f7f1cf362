//! Covariant representations `(π, u)` of a partial automorphism, the
//! integrated form `π × u`, and recovery of `(π, u)` from a representation
//! of the realized covariance algebra.

use std::sync::Arc;

use rand::Rng;

use crate::algebra::{Element, FdAlgebra, PartialAutomorphism};
use crate::covalg::{u_element, LElement, Realization};
use crate::error::{Error, Result};
use crate::hom::{representation, StarHom};
use crate::linalg::{self, spectral_norm, Mat, ONE};

/// Gate on `‖u u* u - u‖` for downstream use.
pub const PARTIAL_ISOMETRY_TOL: f64 = 1e-9;

/// A representation `π` of `A` on `C^d` and a partial isometry `u` on `C^d`.
#[derive(Clone, Debug)]
pub struct CovariantRep {
    system: Arc<PartialAutomorphism>,
    pi: StarHom,
    u: Mat,
}

/// Per-condition residuals of a covariant representation.
#[derive(Clone, Debug, PartialEq)]
pub struct CovRepReport {
    pub homomorphism: f64,
    pub partial_isometry: f64,
    pub initial_space: f64,
    pub final_space: f64,
    pub covariance: f64,
}

impl CovRepReport {
    pub fn max_residual(&self) -> f64 {
        [
            self.homomorphism,
            self.partial_isometry,
            self.initial_space,
            self.final_space,
            self.covariance,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() < tol
    }
}

impl CovariantRep {
    /// `pi` is given by the images of the matrix units of `A`.
    pub fn new(system: Arc<PartialAutomorphism>, pi: Vec<Mat>, u: Mat) -> Result<Self> {
        let d = u.nrows();
        if u.ncols() != d {
            return Err(Error::InvalidRepresentation(format!(
                "u is {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        if pi.iter().any(|m| m.nrows() != d || m.ncols() != d) {
            return Err(Error::InvalidRepresentation(format!(
                "pi and u act on spaces of different dimension (u is {d}x{d})"
            )));
        }
        let pi = representation(system.algebra().clone(), pi)?;
        Ok(CovariantRep { system, pi, u })
    }

    pub fn system(&self) -> &Arc<PartialAutomorphism> {
        &self.system
    }

    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    pub fn u(&self) -> &Mat {
        &self.u
    }

    pub fn pi(&self, a: &Element) -> Mat {
        if self.dim() == 0 {
            return Mat::zeros(0, 0);
        }
        self.pi.apply(a).block(0).clone()
    }

    /// Checks the conditions of a covariant representation and reports the
    /// residual of each one.
    pub fn validate(&self) -> CovRepReport {
        let homomorphism = if self.dim() == 0 {
            0.0
        } else {
            self.pi.homomorphism_residual()
        };
        let u = &self.u;
        let partial_isometry = spectral_norm(&(u * u.adjoint() * u - u));
        let initial_space = spectral_norm(&(u.adjoint() * u - self.pi(&self.system.source().unit())));
        let final_space = spectral_norm(&(u * u.adjoint() - self.pi(&self.system.target().unit())));
        let alg = self.system.algebra();
        let mut covariance: f64 = 0.0;
        for unit in alg.matrix_units() {
            if !self.system.source().blocks().contains(&unit.block) {
                continue;
            }
            let e = alg.matrix_unit(unit);
            let lhs = self.pi(&self.system.apply(&e, 1).expect("unit lies in I"));
            let rhs = u * self.pi(&e) * u.adjoint();
            covariance = covariance.max(spectral_norm(&(lhs - rhs)));
        }
        CovRepReport {
            homomorphism,
            partial_isometry,
            initial_space,
            final_space,
            covariance,
        }
    }

    fn ensure_partial_isometry(&self) -> Result<()> {
        let r = spectral_norm(&(&self.u * self.u.adjoint() * &self.u - &self.u));
        if r > PARTIAL_ISOMETRY_TOL {
            return Err(Error::InvalidRepresentation(format!(
                "u is not a partial isometry (residual {r:.3e})"
            )));
        }
        Ok(())
    }

    /// `(π × u)(y) = Σ_n π(y(n)) u^n`.
    pub fn integrate(&self, y: &LElement) -> Result<Mat> {
        if !Arc::ptr_eq(y.system(), &self.system) && **y.system() != *self.system {
            return Err(Error::SystemMismatch);
        }
        self.ensure_partial_isometry()?;
        let d = self.dim();
        let mut out = Mat::zeros(d, d);
        for (&n, a) in y.terms() {
            out += self.pi(a) * pisometry_pow(&self.u, n);
        }
        Ok(out)
    }
}

/// `u^n` for `n ≥ 0` and `(u*)^{-n}` for `n < 0`.
pub fn pisometry_pow(u: &Mat, n: i64) -> Mat {
    let base = if n >= 0 { u.clone() } else { u.adjoint() };
    let mut out = Mat::identity(u.nrows(), u.ncols());
    for _ in 0..n.unsigned_abs() {
        out = &out * &base;
    }
    out
}

/// Free-function form of [`CovariantRep::integrate`].
pub fn pi_cross_u(r: &CovariantRep, y: &LElement) -> Result<Mat> {
    r.integrate(y)
}

/// Recovers `(π, u)` from a representation `σ` of the realized algebra:
/// `π(a) = σ(a δ_0)` and `u = σ(θ(e_I) δ_1)`.
pub fn extract_covrep(realization: &Realization, sigma: &StarHom, tol: f64) -> Result<CovariantRep> {
    if sigma.source() != realization.algebra() {
        return Err(Error::AlgebraMismatch);
    }
    let residual = sigma.homomorphism_residual();
    if residual > tol {
        return Err(Error::NotHomomorphism { residual });
    }
    let system = realization.system().clone();
    let d = sigma.target().carrier_dim();
    let to_mat = |x: &Element| -> Mat {
        if d == 0 {
            Mat::zeros(0, 0)
        } else {
            sigma.apply(x).to_matrix()
        }
    };
    let embedding = realization.embedding()?;
    let alg = system.algebra();
    let pi = alg
        .matrix_units()
        .into_iter()
        .map(|unit| to_mat(&embedding.apply(&alg.matrix_unit(unit))))
        .collect();
    let u = to_mat(&realization.to_abstract(&u_element(system.clone())));
    CovariantRep::new(system, pi, u)
}

/// Largest `‖(π × u)(e) - σ(e)‖` over the matrix-unit basis of `L`.
pub fn round_trip_residual(realization: &Realization, sigma: &StarHom, rep: &CovariantRep) -> Result<f64> {
    let system = realization.system().clone();
    let mut worst: f64 = 0.0;
    for e in realization.l_basis() {
        let y = e.to_l(system.clone());
        let lhs = rep.integrate(&y)?;
        let rhs = sigma.apply(&realization.to_abstract(&y)).to_matrix();
        worst = worst.max(spectral_norm(&(lhs - rhs)));
    }
    Ok(worst)
}

/// A random representation of a block algebra: each block repeated with a
/// random multiplicity in `0..=2` (at least one block present), conjugated
/// by a random unitary.
pub fn random_representation<R: Rng>(algebra: &FdAlgebra, rng: &mut R) -> Result<StarHom> {
    let k = algebra.num_blocks();
    let mut mult: Vec<usize> = (0..k).map(|_| rng.random_range(0..=2)).collect();
    if k > 0 && mult.iter().all(|&m| m == 0) {
        mult[rng.random_range(0..k)] = 1;
    }
    let d: usize = mult.iter().zip(algebra.block_sizes()).map(|(m, n)| m * n).sum();
    let w = linalg::random_unitary(d, rng);
    let mut images = Vec::with_capacity(algebra.dim());
    for unit in algebra.matrix_units() {
        let mut m = Mat::zeros(d, d);
        let mut offset = 0;
        for (b, (&mb, &nb)) in mult.iter().zip(algebra.block_sizes()).enumerate() {
            for _ in 0..mb {
                if b == unit.block {
                    m[(offset + unit.row, offset + unit.col)] = ONE;
                }
                offset += nb;
            }
        }
        images.push(&w * m * w.adjoint());
    }
    representation(algebra.clone(), images)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covalg::{realize_covariance, RealizeOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn shift(m: usize) -> Arc<PartialAutomorphism> {
        Arc::new(PartialAutomorphism::shift(m))
    }

    fn identity_rep(r: &Realization) -> StarHom {
        let alg = r.algebra().clone();
        let images = alg
            .matrix_units()
            .into_iter()
            .map(|u| alg.matrix_unit(u).to_matrix())
            .collect();
        representation(alg, images).unwrap()
    }

    #[test]
    fn pisometry_powers() {
        let mut s = Mat::zeros(3, 3);
        s[(1, 0)] = ONE;
        s[(2, 1)] = ONE;
        assert_eq!(pisometry_pow(&s, 0), Mat::identity(3, 3));
        assert_eq!(pisometry_pow(&s, -1), s.adjoint());
        let mut s2 = Mat::zeros(3, 3);
        s2[(2, 0)] = ONE;
        assert_eq!(pisometry_pow(&s, 2), s2);
    }

    #[test]
    fn regular_rep_pair_is_covariant() {
        let s = shift(2);
        let r = realize_covariance(s.clone(), &RealizeOptions::default()).unwrap();
        let rep = r.rep();
        let pi = s
            .algebra()
            .matrix_units()
            .into_iter()
            .map(|u| rep.monomial(&s.algebra().matrix_unit(u), 0))
            .collect();
        let u = r.concrete(&u_element(s.clone()));
        let cov = CovariantRep::new(s, pi, u).unwrap();
        assert!(cov.validate().passes(1e-10));
    }

    #[test]
    fn covariance_violation_is_reported() {
        // u = identity cannot intertwine the shift
        let s = shift(2);
        let pi = s
            .algebra()
            .matrix_units()
            .into_iter()
            .map(|u| s.algebra().matrix_unit(u).to_matrix())
            .collect();
        let cov = CovariantRep::new(s, pi, Mat::identity(2, 2)).unwrap();
        let report = cov.validate();
        assert!(report.covariance > 0.5);
        assert!(report.homomorphism < 1e-14);
    }

    #[test]
    fn zero_ideals_accept_zero_u() {
        let s = Arc::new(PartialAutomorphism::trivial(FdAlgebra::commutative(2)));
        let pi = s
            .algebra()
            .matrix_units()
            .into_iter()
            .map(|u| s.algebra().matrix_unit(u).to_matrix())
            .collect();
        let cov = CovariantRep::new(s, pi, Mat::zeros(2, 2)).unwrap();
        assert!(cov.validate().passes(1e-14));
    }

    #[test]
    fn identity_representation_round_trips() {
        let s = shift(2);
        let r = realize_covariance(s, &RealizeOptions::default()).unwrap();
        let sigma = identity_rep(&r);
        let cov = extract_covrep(&r, &sigma, 1e-9).unwrap();
        assert!(round_trip_residual(&r, &sigma, &cov).unwrap() < 1e-10);
        // u realizes e_21 up to the identification
        let u = cov.u();
        assert!((u[(1, 0)].norm() - 1.0).abs() < 1e-10);
        assert!(u[(0, 1)].norm() < 1e-10 && u[(0, 0)].norm() < 1e-10);
    }

    #[test]
    fn random_representations_round_trip() {
        let s = shift(3);
        let r = realize_covariance(s, &RealizeOptions::default()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..5 {
            let sigma = random_representation(r.algebra(), &mut rng).unwrap();
            let cov = extract_covrep(&r, &sigma, 1e-9).unwrap();
            assert!(cov.validate().passes(1e-9));
            assert!(round_trip_residual(&r, &sigma, &cov).unwrap() < 1e-9);
        }
    }
}
