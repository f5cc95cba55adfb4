//! Local Fermi wavenumber `k_F(R) = sqrt(2m(mu - V(R)))/hbar` and the
//! derivatives of `k_F^2`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Physical parameters shared by all kernels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FermiContext {
    pub d: usize,
    pub hbar: f64,
    pub m: f64,
    pub mu: f64,
    pub g: u32,
}

impl FermiContext {
    pub fn new(d: usize, hbar: f64, m: f64, mu: f64, g: u32) -> Result<Self> {
        let ctx = Self { d, hbar, m, mu, g };
        ctx.validate()?;
        Ok(ctx)
    }

    /// `hbar = m = 1`.
    pub fn natural(d: usize, mu: f64, g: u32) -> Result<Self> {
        Self::new(d, 1.0, 1.0, mu, g)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if self.d < 1 {
            return bad("dimension must be at least 1".into());
        }
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            return bad(format!("hbar must be positive, got {}", self.hbar));
        }
        if !(self.m.is_finite() && self.m > 0.0) {
            return bad(format!("mass must be positive, got {}", self.m));
        }
        if !self.mu.is_finite() {
            return bad(format!("mu must be finite, got {}", self.mu));
        }
        if !(self.g == 1 || self.g == 2) {
            return bad(format!("degeneracy must be 1 or 2, got {}", self.g));
        }
        Ok(())
    }

    /// `2m/hbar^2`, the factor turning energies into squared wavenumbers.
    pub fn kf2_per_energy(&self) -> f64 {
        2.0 * self.m / (self.hbar * self.hbar)
    }

    /// Default classically-allowed margin `1e-8 max(|mu|, |V|)` at a point
    /// where the potential takes the value `v`.
    pub fn default_eps_allowed(&self, v: f64) -> f64 {
        1e-8 * self.mu.abs().max(v.abs()).max(f64::MIN_POSITIVE)
    }

    pub(crate) fn check_point(&self, r: &[f64]) -> Result<()> {
        if r.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: r.len() });
        }
        Ok(())
    }
}

/// `k_F` and derivatives of `k_F^2` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct FermiFieldSample {
    pub kf: f64,
    pub grad_kf2: DVector<f64>,
    pub lap_kf2: f64,
    pub hess_kf2: DMatrix<f64>,
}

impl FermiFieldSample {
    /// `grad k_F^2 . u`
    pub fn grad_along(&self, u: &DVector<f64>) -> f64 {
        self.grad_kf2.dot(u)
    }

    /// `u^T (Hess k_F^2) u`
    pub fn hess_along(&self, u: &DVector<f64>) -> f64 {
        u.dot(&(&self.hess_kf2 * u))
    }

    /// `|grad k_F^2|^2`
    pub fn grad_sq(&self) -> f64 {
        self.grad_kf2.norm_squared()
    }
}

/// Samples the Fermi field at `r`, refusing points with `mu - V < eps_allowed`.
pub fn sample(ctx: &FermiContext, v: &Potential, r: &[f64], eps_allowed: f64) -> Result<FermiFieldSample> {
    ctx.validate()?;
    ctx.check_point(r)?;
    if !(eps_allowed > 0.0) {
        return Err(Error::InvalidParameter(format!("eps_allowed must be positive, got {eps_allowed}")));
    }
    let value = v.eval(r)?;
    let margin = ctx.mu - value;
    if !(margin >= eps_allowed) {
        return Err(Error::ForbiddenRegion { margin, eps: eps_allowed });
    }
    let c = -ctx.kf2_per_energy();
    let hess = v.hessian(r)?;
    Ok(FermiFieldSample {
        kf: (ctx.kf2_per_energy() * margin).sqrt(),
        grad_kf2: v.gradient(r)? * c,
        lap_kf2: c * hess.trace(),
        hess_kf2: hess * c,
    })
}

/// [`sample`] with the default margin.
pub fn sample_default(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<FermiFieldSample> {
    ctx.check_point(r)?;
    let eps = ctx.default_eps_allowed(v.eval(r)?);
    sample(ctx, v, r, eps)
}

/// `z = k_F |s|`.
pub fn z_of(sample: &FermiFieldSample, s: &[f64]) -> f64 {
    sample.kf * s.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn free_gas() {
        let ctx = FermiContext::natural(1, 2.0, 1).unwrap();
        let s = sample_default(&ctx, &Potential::zero(), &[0.7]).unwrap();
        assert_eq!(s.kf, 2.0);
        assert_eq!(s.grad_kf2[0], 0.0);
        assert_eq!(s.lap_kf2, 0.0);
        assert_eq!(z_of(&s, &[1.0]), 2.0);
        assert_eq!(z_of(&s, &[0.0]), 0.0);
    }

    #[test]
    fn harmonic() {
        let ctx = FermiContext::natural(1, 2.0, 1).unwrap();
        let v = Potential::harmonic(1.0, 1.0).unwrap();
        let s = sample_default(&ctx, &v, &[1.0]).unwrap();
        assert_relative_eq!(s.kf, 3f64.sqrt(), max_relative = 1e-15);
        assert_eq!(s.grad_kf2[0], -2.0);
        assert!(matches!(sample_default(&ctx, &v, &[2.0]), Err(Error::ForbiddenRegion { .. })));
        assert!(matches!(sample_default(&ctx, &v, &[3.0]), Err(Error::ForbiddenRegion { .. })));
    }

    #[test]
    fn z_in_two_dimensions() {
        let ctx = FermiContext::natural(2, 1.5, 1).unwrap();
        let s = sample_default(&ctx, &Potential::zero(), &[0.0, 0.0]).unwrap();
        assert_relative_eq!(z_of(&s, &[0.06, 0.08]), 0.1 * 3f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn context_validation() {
        assert!(FermiContext::new(0, 1.0, 1.0, 1.0, 1).is_err());
        assert!(FermiContext::new(1, 0.0, 1.0, 1.0, 1).is_err());
        assert!(FermiContext::new(1, 1.0, -1.0, 1.0, 1).is_err());
        assert!(FermiContext::new(1, 1.0, 1.0, 1.0, 3).is_err());
        let ctx = FermiContext::natural(2, 1.0, 1).unwrap();
        assert!(matches!(sample_default(&ctx, &Potential::zero(), &[0.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn gradient_consistency_and_hbar_scaling() {
        let v = Potential::gaussian_well(-3.0, 1.2).unwrap();
        let r = [0.4, -0.3];
        for hbar in [0.5, 1.0, 2.0] {
            let ctx = FermiContext::new(2, hbar, 1.7, 0.5, 2).unwrap();
            let s = sample_default(&ctx, &v, &r).unwrap();
            let resid = &s.grad_kf2 + v.gradient(&r).unwrap() * ctx.kf2_per_energy();
            assert!(resid.amax() <= 1e-15 * s.grad_kf2.amax());
        }
        let a = sample_default(&FermiContext::new(2, 1.0, 1.7, 0.5, 2).unwrap(), &v, &r).unwrap();
        let b = sample_default(&FermiContext::new(2, 2.0, 1.7, 0.5, 2).unwrap(), &v, &r).unwrap();
        assert_relative_eq!(b.kf, a.kf / 2.0, max_relative = 1e-15);
        assert!((&b.grad_kf2 - &a.grad_kf2 / 4.0).amax() <= 1e-15 * a.grad_kf2.amax());
    }
}
