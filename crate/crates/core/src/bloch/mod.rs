//! Bloch density matrix `C(r, r'; beta)` to second order in hbar, and the
//! inverse Laplace transforms that turn it into density-matrix terms.
//!
//! Conventions: `s = r - r'`, the momentum phase is `exp(+i p.s/hbar)`, and
//! `C_k/C_0` is a Laurent polynomial in beta obtained from Gaussian moments
//! of the corrections
//!
//! ```text
//! w1 = -(i beta^2 / 2m) p.grad V
//! w2 = -(beta^2/4m) lap V + (beta^3/6m) |grad V|^2
//!      + (beta^3/6m^2) p.Hess V.p - (beta^4/8m^2) (p.grad V)^2
//! ```

mod momentum;
mod poly;
mod symmetric;
mod talbot;

pub use momentum::{bloch_quadrature, momentum_integral, Orientation, DEFAULT_NODES};
pub use poly::{BetaPoly, GradientSeries};
pub use symmetric::{symmetric_expansion, symmetric_wk_odm, symmetrized_pieces, SymmetrizedPieces};
pub use talbot::{numeric_bromwich_check, talbot_invert, DEFAULT_TALBOT_NODES};

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::fermi::{sample_default, FermiContext};
use crate::odm::{OdmBreakdown, PairPoint};
use crate::potential::Potential;
use crate::special::{scaled_bessel, BesselOrder};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Values of `C_0, C_1, C_2` at one inverse energy `beta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochSample {
    pub beta: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
}

/// V and its first two derivatives at one point.
#[derive(Debug, Clone)]
pub struct LocalDerivatives {
    pub value: f64,
    pub grad: DVector<f64>,
    pub hess: DMatrix<f64>,
}

impl LocalDerivatives {
    pub fn at(v: &Potential, r: &[f64]) -> Result<Self> {
        Ok(Self { value: v.eval(r)?, grad: v.gradient(r)?, hess: v.hessian(r)? })
    }

    pub fn laplacian(&self) -> f64 {
        self.hess.trace()
    }
}

/// Gaussian momentum moments relative to `int exp(-beta p^2/2m + i p.s/hbar)`.
pub(crate) struct Moments<'a> {
    pub ctx: &'a FermiContext,
    pub s: &'a DVector<f64>,
}

impl Moments<'_> {
    /// `<p.a>`
    pub fn linear(&self, a: &DVector<f64>) -> BetaPoly {
        let c = I * self.ctx.m * a.dot(self.s) / self.ctx.hbar;
        BetaPoly::monomial(-1, c)
    }

    /// `<p.Q.p>`
    pub fn quadratic(&self, q: &DMatrix<f64>) -> BetaPoly {
        let m = self.ctx.m;
        let h2 = self.ctx.hbar * self.ctx.hbar;
        let sqs = self.s.dot(&(q * self.s));
        &BetaPoly::real(-1, m * q.trace()) + &BetaPoly::real(-2, -m * m * sqs / h2)
    }

    /// `hbar <w1>` for a given gradient.
    pub fn w1(&self, grad: &DVector<f64>) -> BetaPoly {
        let c = -I / (2.0 * self.ctx.m) * self.ctx.hbar;
        &BetaPoly::monomial(2, c) * &self.linear(grad)
    }

    /// `hbar^2 <w2>`.
    pub fn w2(&self, d: &LocalDerivatives) -> BetaPoly {
        let m = self.ctx.m;
        let h2 = self.ctx.hbar * self.ctx.hbar;
        let gg = &d.grad * d.grad.transpose();
        let mut out = BetaPoly::real(2, -d.laplacian() / (4.0 * m));
        out = &out + &BetaPoly::real(3, d.grad.norm_squared() / (6.0 * m));
        out = &out + &(&BetaPoly::real(3, 1.0 / (6.0 * m * m)) * &self.quadratic(&d.hess));
        out = &out + &(&BetaPoly::real(4, -1.0 / (8.0 * m * m)) * &self.quadratic(&gg));
        out.scale(Complex64::new(h2, 0.0))
    }
}

/// `hbar w1` evaluated at a (complex) momentum.
pub(crate) fn w1_at(ctx: &FermiContext, beta: f64, p: &[Complex64], grad: &[f64]) -> Complex64 {
    let pg: Complex64 = p.iter().zip(grad).map(|(a, b)| a * b).sum();
    -I * beta * beta / (2.0 * ctx.m) * pg * ctx.hbar
}

/// `hbar^2 w2` evaluated at a (complex) momentum.
pub(crate) fn w2_at(ctx: &FermiContext, beta: f64, p: &[Complex64], d: &LocalDerivatives) -> Complex64 {
    let m = ctx.m;
    let n = p.len();
    let pg: Complex64 = p.iter().zip(d.grad.iter()).map(|(a, b)| a * b).sum();
    let mut php = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            php += p[i] * d.hess[(i, j)] * p[j];
        }
    }
    let b2 = beta * beta;
    let v = -b2 / (4.0 * m) * d.laplacian()
        + b2 * beta / (6.0 * m) * d.grad.norm_squared()
        + b2 * beta / (6.0 * m * m) * php
        - b2 * b2 / (8.0 * m * m) * pg * pg;
    v * ctx.hbar * ctx.hbar
}

/// `C_k / C_0` for the non-symmetric Bloch matrix, derivatives at `r`.
pub fn bloch_expansion(ctx: &FermiContext, d: &LocalDerivatives, s: &DVector<f64>) -> [BetaPoly; 3] {
    let mom = Moments { ctx, s };
    [BetaPoly::real(0, 1.0), mom.w1(&d.grad), mom.w2(d)]
}

/// `g (m / (2 pi beta hbar^2))^{d/2} exp(-m s^2 / (2 hbar^2 beta))` at complex beta.
pub(crate) fn free_propagator(ctx: &FermiContext, s2: f64, beta: Complex64) -> Complex64 {
    let h2 = ctx.hbar * ctx.hbar;
    let half = ctx.d as f64 / 2.0;
    let lead = ctx.g as f64 * (ctx.m / (2.0 * PI * h2)).powf(half);
    lead * beta.powf(-half) * (-ctx.m * s2 / (2.0 * h2) / beta).exp()
}

fn check_beta(beta: f64) -> Result<()> {
    if !(beta.is_finite() && beta > 0.0) {
        return domain(format!("beta must be positive, got {beta}"));
    }
    Ok(())
}

fn separation(ctx: &FermiContext, p: &PairPoint) -> Result<DVector<f64>> {
    ctx.validate()?;
    ctx.check_point(&p.r)?;
    ctx.check_point(&p.r_prime)?;
    Ok(DVector::from_vec(p.separation()))
}

/// Closed-form Bloch matrix from Gaussian moments.
pub fn bloch_closed(ctx: &FermiContext, v: &Potential, p: &PairPoint, beta: f64) -> Result<BlochSample> {
    check_beta(beta)?;
    let s = separation(ctx, p)?;
    let d = LocalDerivatives::at(v, &p.r)?;
    let polys = bloch_expansion(ctx, &d, &s);
    let b = Complex64::new(beta, 0.0);
    let base = free_propagator(ctx, s.norm_squared(), b).re * (-beta * d.value).exp();
    let mut c = [0.0; 3];
    for (k, poly) in polys.iter().enumerate() {
        let val = poly.eval(b);
        if val.im.abs() > 1e-14 * val.norm().max(f64::MIN_POSITIVE) {
            return domain(format!("C_{k} has an imaginary residue {:e}", val.im));
        }
        c[k] = base * val.re;
    }
    Ok(BlochSample { beta, c0: c[0], c1: c[1], c2: c[2] })
}

/// The pieces of `C_1/beta` and `C_2/beta` with the Gaussian factor
/// `exp(-m s^2/(2 hbar^2 beta) - beta V)` removed, together with the beta
/// power each should carry.
///
/// `C_2` pieces are ordered: Laplacian, `|grad V|^2`, `(grad V.s)^2`,
/// directional Hessian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaPowerPieces {
    pub c1: (f64, f64),
    pub c2: [(f64, f64); 4],
}

pub fn beta_power_pieces(ctx: &FermiContext, v: &Potential, p: &PairPoint, beta: f64) -> Result<BetaPowerPieces> {
    check_beta(beta)?;
    let s = separation(ctx, p)?;
    let d = LocalDerivatives::at(v, &p.r)?;
    let half = ctx.d as f64 / 2.0;
    let lead = free_propagator(ctx, 0.0, Complex64::new(1.0, 0.0)).re;
    let at = |c: Complex64, n: i32| lead * c.re * beta.powf(n as f64 - half - 1.0);
    let full = bloch_expansion(ctx, &d, &s);
    let no_grad = LocalDerivatives { grad: DVector::zeros(ctx.d), ..d.clone() };
    let lap_only = bloch_expansion(ctx, &no_grad, &s)[2].coefficient(2);
    let c2 = &full[2];
    Ok(BetaPowerPieces {
        c1: (at(full[1].coefficient(1), 1), -half),
        c2: [
            (at(lap_only, 2), 1.0 - half),
            (at(c2.coefficient(3), 3), 2.0 - half),
            (at(c2.coefficient(2) - lap_only, 2), 1.0 - half),
            (at(c2.coefficient(1), 1), -half),
        ],
    })
}

/// `(hbar^4 k_F^2/(m^2 s^2))^{nu/2} J_nu(k_F s)`, `nu = d/2 + xi - 1`.
pub fn inverse_laplace_kernel(ctx: &FermiContext, kf: f64, s_norm: f64, xi: f64) -> Result<f64> {
    ctx.validate()?;
    if !(s_norm > 0.0) {
        return Err(Error::NonpositiveSeparation(s_norm));
    }
    laplace_kernel(ctx, kf, s_norm, xi)
}

/// As [`inverse_laplace_kernel`] but continuous at `s = 0`.
pub(crate) fn laplace_kernel(ctx: &FermiContext, kf: f64, s_norm: f64, xi: f64) -> Result<f64> {
    if !(kf.is_finite() && kf > 0.0) {
        return domain(format!("k_F must be positive, got {kf}"));
    }
    if !(xi.is_finite() && (-8.0..=8.0).contains(&xi)) {
        return domain(format!("xi = {xi} outside the supported range [-8, 8]"));
    }
    let nu = ctx.d as f64 / 2.0 + xi - 1.0;
    let e = ctx.hbar * ctx.hbar * kf * kf / ctx.m;
    Ok(e.powf(nu) * scaled_bessel(BesselOrder::new(nu)?, kf * s_norm)?)
}

/// Inverse Laplace transform of `free_propagator(beta) * exp(-beta V) * P(beta) / beta`
/// evaluated at `mu`.
pub(crate) fn invert_poly(ctx: &FermiContext, kf: f64, s_norm: f64, poly: &BetaPoly) -> Result<f64> {
    let lead = free_propagator(ctx, 0.0, Complex64::new(1.0, 0.0)).re;
    let mut sum = 0.0;
    let mut imag = 0.0f64;
    let mut scale = 0.0f64;
    for (n, c) in poly.terms() {
        let k = laplace_kernel(ctx, kf, s_norm, 1.0 - n as f64)?;
        sum += c.re * k;
        imag = imag.max((c.im * k).abs());
        scale = scale.max((c.re * k).abs());
    }
    if imag > 1e-13 * scale.max(f64::MIN_POSITIVE) {
        return domain(format!("imaginary residue {imag:e} in Laplace inversion"));
    }
    Ok(lead * sum)
}

/// KODM terms assembled from the Bloch coefficients and the analytic
/// inverse Laplace kernel.
pub fn laplace_route_odm(ctx: &FermiContext, v: &Potential, p: &PairPoint) -> Result<OdmBreakdown> {
    let s = separation(ctx, p)?;
    if s.iter().all(|x| *x == 0.0) {
        return Err(Error::DegenerateSeparation);
    }
    let kf = sample_default(ctx, v, &p.r)?.kf;
    let d = LocalDerivatives::at(v, &p.r)?;
    let polys = bloch_expansion(ctx, &d, &s);
    let sn = s.norm();
    Ok(OdmBreakdown::new(
        invert_poly(ctx, kf, sn, &polys[0])?,
        invert_poly(ctx, kf, sn, &polys[1])?,
        invert_poly(ctx, kf, sn, &polys[2])?,
    ))
}
