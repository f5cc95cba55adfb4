//! Direct momentum integrals of the Bloch matrix by Gauss–Hermite
//! quadrature on a complex-shifted contour.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_beta, separation, w1_at, w2_at, BlochSample, LocalDerivatives};
use crate::error::{domain, Error, Result};
use crate::fermi::FermiContext;
use crate::odm::PairPoint;
use crate::potential::Potential;
use crate::quadrature::{gauss_hermite, Rule};

/// Default Gauss–Hermite nodes per axis.
pub const DEFAULT_NODES: usize = 48;

/// Which of the two equivalent momentum integrals to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// `int exp(-beta p^2/2m + i p.s/hbar) f(p) d^d p`
    Direct,
    /// `int exp(-beta p^2/2m - i p.s/hbar) f(-p) d^d p`
    Reflected,
}

/// Result of a momentum integral with the sum of absolute contributions.
struct Integral {
    value: Complex64,
    magnitude: f64,
}

fn integrate<F>(ctx: &FermiContext, beta: f64, s: &[f64], rule: &Rule, orientation: Orientation, mut f: F) -> Integral
where
    F: FnMut(&[Complex64]) -> Complex64,
{
    let d = s.len();
    let width = (2.0 * ctx.m / beta).sqrt();
    let sign = match orientation {
        Orientation::Direct => 1.0,
        Orientation::Reflected => -1.0,
    };
    // exponent -u^2 + i sign u.c, completed square at u = t + i sign c/2
    let c: Vec<f64> = s.iter().map(|x| width * x / ctx.hbar).collect();
    let c2: f64 = c.iter().map(|x| x * x).sum();
    let jac = width.powi(d as i32) * (-0.25 * c2).exp();

    let n = rule.nodes.len();
    let mut idx = vec![0usize; d];
    let mut p = vec![Complex64::new(0.0, 0.0); d];
    let mut value = Complex64::new(0.0, 0.0);
    let mut magnitude = 0.0;
    loop {
        let mut w = 1.0;
        for k in 0..d {
            let u = Complex64::new(rule.nodes[idx[k]], 0.5 * sign * c[k]);
            p[k] = width * u;
            if orientation == Orientation::Reflected {
                p[k] = -p[k];
            }
            w *= rule.weights[idx[k]];
        }
        let term = w * f(&p);
        value += term;
        magnitude += term.norm();
        let mut k = 0;
        while k < d {
            idx[k] += 1;
            if idx[k] < n {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }
    Integral { value: value * jac, magnitude: magnitude * jac }
}

/// `int exp(-beta p^2/2m +- i p.s/hbar) f(+-p) d^d p` with `n` nodes per axis.
pub fn momentum_integral<F>(
    ctx: &FermiContext,
    beta: f64,
    s: &[f64],
    n: usize,
    orientation: Orientation,
    f: F,
) -> Result<Complex64>
where
    F: FnMut(&[Complex64]) -> Complex64,
{
    check_beta(beta)?;
    if s.is_empty() || s.len() > 3 {
        return domain(format!("momentum quadrature supports 1 <= d <= 3, got {}", s.len()));
    }
    Ok(integrate(ctx, beta, s, &gauss_hermite(n), orientation, f).value)
}

fn evaluate(ctx: &FermiContext, d: &LocalDerivatives, s: &[f64], beta: f64, n: usize) -> Result<[f64; 3]> {
    let rule = gauss_hermite(n);
    let pre = ctx.g as f64 / (2.0 * PI * ctx.hbar).powi(ctx.d as i32) * (-beta * d.value).exp();
    let grad: Vec<f64> = d.grad.iter().copied().collect();
    let parts = [
        integrate(ctx, beta, s, &rule, Orientation::Direct, |_| Complex64::new(1.0, 0.0)),
        integrate(ctx, beta, s, &rule, Orientation::Direct, |p| w1_at(ctx, beta, p, &grad)),
        integrate(ctx, beta, s, &rule, Orientation::Direct, |p| w2_at(ctx, beta, p, d)),
    ];
    let mut out = [0.0; 3];
    for (k, part) in parts.iter().enumerate() {
        if part.value.im.abs() > 1e-14 * part.magnitude.max(f64::MIN_POSITIVE) {
            return domain(format!("C_{k} quadrature left an imaginary part {:e}", part.value.im));
        }
        out[k] = pre * part.value.re;
    }
    Ok(out)
}

/// Bloch matrix by direct momentum quadrature, `n` Gauss–Hermite nodes per
/// axis, checked against `2n` nodes.
pub fn bloch_quadrature(ctx: &FermiContext, v: &Potential, p: &PairPoint, beta: f64, n: usize) -> Result<BlochSample> {
    check_beta(beta)?;
    if n < 16 {
        return domain(format!("at least 16 nodes per axis are required, got {n}"));
    }
    let s = separation(ctx, p)?;
    if ctx.d > 3 {
        return domain(format!("momentum quadrature supports d <= 3, got {}", ctx.d));
    }
    let d = LocalDerivatives::at(v, &p.r)?;
    let s: Vec<f64> = s.iter().copied().collect();
    let a = evaluate(ctx, &d, &s, beta, n)?;
    let b = evaluate(ctx, &d, &s, beta, 2 * n)?;
    let scale = a[0].abs();
    for k in 0..3 {
        let change = (a[k] - b[k]).abs() / a[k].abs().max(1e-14 * scale).max(f64::MIN_POSITIVE);
        if change > 1e-8 {
            return Err(Error::QuadratureNotConverged { change, tolerance: 1e-8 });
        }
    }
    Ok(BlochSample { beta, c0: a[0], c1: a[1], c2: a[2] })
}
