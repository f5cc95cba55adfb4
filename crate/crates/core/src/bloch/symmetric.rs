//! Bloch matrix in center-of-mass coordinates: `V(R + s/2)` is expanded
//! to second order about `R` and the result inverted term by term.
//!
//! A bookkeeping parameter `eps` counts gradients (`grad V ~ eps`,
//! `Hess V ~ eps^2`) so that the expansion can be truncated consistently.

use nalgebra::DVector;

use super::{invert_poly, BetaPoly, GradientSeries, LocalDerivatives, Moments};
use crate::error::Result;
use crate::fermi::{sample_default, FermiContext};
use crate::odm::{OdmBreakdown, SymmetricPoint};
use crate::potential::Potential;

/// `C_k(R, s; beta)` relative to the free propagator times `exp(-beta V(R))`.
#[derive(Debug, Clone)]
pub struct SymmetricExpansion {
    /// `exp(-beta [V(R+s/2) - V(R)])` to second order.
    pub taylor: GradientSeries,
    /// `hbar <w1>` with `grad V(R + s/2)` expanded about `R`.
    pub w1: GradientSeries,
    /// `hbar^2 <w2>` at `R` (already of second order).
    pub w2: BetaPoly,
}

impl SymmetricExpansion {
    pub fn c0(&self) -> BetaPoly {
        let t = &self.taylor.0;
        &(&t[0] + &t[1]) + &t[2]
    }

    pub fn c1(&self) -> BetaPoly {
        let prod = &self.w1 * &self.taylor;
        &prod.0[1] + &prod.0[2]
    }

    pub fn c2(&self) -> BetaPoly {
        self.w2.clone()
    }
}

pub fn symmetric_expansion(ctx: &FermiContext, d: &LocalDerivatives, s: &DVector<f64>) -> SymmetricExpansion {
    let a = 0.5 * d.grad.dot(s);
    let b = 0.125 * s.dot(&(&d.hess * s));
    let taylor = GradientSeries([
        BetaPoly::real(0, 1.0),
        BetaPoly::real(1, -a),
        &BetaPoly::real(1, -b) + &BetaPoly::real(2, 0.5 * a * a),
    ]);
    let mom = Moments { ctx, s };
    let half_hs = &d.hess * s * 0.5;
    let w1 = GradientSeries([BetaPoly::zero(), mom.w1(&d.grad), mom.w1(&half_hs)]);
    SymmetricExpansion { taylor, w1, w2: mom.w2(d) }
}

/// The intermediate terms of the symmetrized density matrix.
///
/// `x_*` split the zeroth-order term by beta power of the Taylor factor,
/// `y_*` split the first-order term: leading gradient, gradient times the
/// Taylor correction, and the Hessian part of `grad V(R + s/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetrizedPieces {
    pub x_a: f64,
    pub x_b: f64,
    pub x_c: f64,
    pub y_a: f64,
    pub y_b: f64,
    pub y_c: f64,
    pub second: f64,
}

pub fn symmetrized_pieces(ctx: &FermiContext, v: &Potential, q: &SymmetricPoint) -> Result<SymmetrizedPieces> {
    let kf = sample_default(ctx, v, &q.center)?.kf;
    ctx.check_point(&q.s)?;
    let d = LocalDerivatives::at(v, &q.center)?;
    let s = DVector::from_column_slice(&q.s);
    let sn = s.norm();
    let e = symmetric_expansion(ctx, &d, &s);
    let inv = |p: &BetaPoly| invert_poly(ctx, kf, sn, p);
    let c0 = e.c0();
    let power = |n: i32| BetaPoly::monomial(n, c0.coefficient(n));
    Ok(SymmetrizedPieces {
        x_a: inv(&power(0))?,
        x_b: inv(&power(1))?,
        x_c: inv(&power(2))?,
        y_a: inv(&e.w1.0[1])?,
        y_b: inv(&(&e.w1.0[1] * &e.taylor.0[1]))?,
        y_c: inv(&e.w1.0[2])?,
        second: inv(&e.w2)?,
    })
}

/// Symmetric-coordinate Wigner–Kirkwood terms.
pub fn symmetric_wk_odm(ctx: &FermiContext, v: &Potential, q: &SymmetricPoint) -> Result<OdmBreakdown> {
    let p = symmetrized_pieces(ctx, v, q)?;
    Ok(OdmBreakdown::new(p.x_a + p.x_b + p.x_c, p.y_a + p.y_b + p.y_c, p.second))
}
