//! Fixed-Talbot numerical inversion of Laplace transforms.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;

use super::{bloch_expansion, free_propagator, separation, LocalDerivatives};
use crate::error::{domain, Error, Result};
use crate::fermi::{sample_default, FermiContext};
use crate::odm::PairPoint;
use crate::potential::Potential;

/// Default number of contour nodes. Round-off grows like `eps exp(0.4 M)`,
/// so much larger values lose accuracy in double precision.
pub const DEFAULT_TALBOT_NODES: usize = 32;

/// Inverts `F` at `t > 0` on the fixed Talbot contour with `m` nodes.
pub fn talbot_invert(f: impl Fn(Complex64) -> Complex64, t: f64, m: usize) -> f64 {
    let mf = m as f64;
    let r = 2.0 * mf / (5.0 * t);
    let mut sum = 0.5 * (f(Complex64::new(r, 0.0)) * (r * t).exp()).re;
    for k in 1..m {
        let theta = k as f64 * PI / mf;
        let cot = 1.0 / theta.tan();
        let s = Complex64::new(r * theta * cot, r * theta);
        let sigma = theta + (theta * cot - 1.0) * cot;
        sum += ((s * t).exp() * f(s) * Complex64::new(1.0, sigma)).re;
    }
    r / mf * sum
}

/// Numerical inverse Laplace transform of `C_order / beta` at `mu`,
/// checked against half as many contour nodes.
pub fn numeric_bromwich_check(ctx: &FermiContext, v: &Potential, p: &PairPoint, order: usize, m: usize) -> Result<f64> {
    if order > 2 {
        return domain(format!("order must be 0, 1 or 2, got {order}"));
    }
    if m < 32 {
        return domain(format!("at least 32 contour nodes are required, got {m}"));
    }
    let s = separation(ctx, p)?;
    let kf = sample_default(ctx, v, &p.r)?.kf;
    let z = kf * s.norm();
    if z > 20.0 {
        return domain(format!("z = {z} exceeds the supported range z <= 20"));
    }
    let d = LocalDerivatives::at(v, &p.r)?;
    let poly = bloch_expansion(ctx, &d, &DVector::from(s.clone()))[order].clone();
    let s2 = s.norm_squared();
    // exp(-beta V) is pulled out: invert at t = mu - V
    let t = ctx.mu - d.value;
    let f = |beta: Complex64| free_propagator(ctx, s2, beta) * poly.eval(beta) / beta;
    let fine = talbot_invert(f, t, m);
    let coarse = talbot_invert(f, t, m / 2);
    let change = (fine - coarse).abs() / fine.abs().max(f64::MIN_POSITIVE);
    if fine != coarse && change > 1e-6 {
        return Err(Error::ContourNotConverged { change, tolerance: 1e-6 });
    }
    Ok(fine)
}
