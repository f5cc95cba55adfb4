//! Exact reference for the one-dimensional harmonic oscillator and
//! quadrature diagnostics (particle number, idempotency defect).

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fermi::FermiContext;
use crate::quadrature::{gauss_legendre, Rule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SpectrumModel {
    HarmonicOscillator1D { omega: f64 },
}

/// Model plus the number of occupied orbitals (per spin state).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSpec {
    pub model: SpectrumModel,
    pub n_occupied: usize,
}

impl SpectrumSpec {
    pub fn new(model: SpectrumModel, n_occupied: usize) -> Result<Self> {
        let SpectrumModel::HarmonicOscillator1D { omega } = model;
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!("omega must be positive, got {omega}")));
        }
        if n_occupied == 0 {
            return Err(Error::InvalidParameter("at least one orbital must be occupied".into()));
        }
        Ok(Self { model, n_occupied })
    }

    /// Fills every level with `hbar omega (n + 1/2) < mu`.
    pub fn harmonic_1d(ctx: &FermiContext, omega: f64) -> Result<Self> {
        ctx.validate()?;
        let e = ctx.hbar * omega;
        let mut n = 0usize;
        while e * (n as f64 + 0.5) < ctx.mu {
            n += 1;
        }
        Self::new(SpectrumModel::HarmonicOscillator1D { omega }, n)
    }

    pub fn omega(&self) -> f64 {
        let SpectrumModel::HarmonicOscillator1D { omega } = self.model;
        omega
    }
}

/// Oscillator length `sqrt(hbar / (m omega))`.
pub fn oscillator_length(ctx: &FermiContext, omega: f64) -> f64 {
    (ctx.hbar / (ctx.m * omega)).sqrt()
}

/// Classical turning point `sqrt(2 mu / (m omega^2))`.
pub fn turning_point(ctx: &FermiContext, omega: f64) -> f64 {
    (2.0 * ctx.mu / (ctx.m * omega * omega)).sqrt()
}

/// Width excluded next to each turning point in bulk comparisons,
/// `0.5 (hbar / (m omega k_F(0)))^{1/3}` (the Airy length up to a factor).
pub fn bulk_collar(ctx: &FermiContext, omega: f64) -> f64 {
    let kf0 = (2.0 * ctx.m * ctx.mu).sqrt() / ctx.hbar;
    0.5 * (ctx.hbar / (ctx.m * omega * kf0)).cbrt()
}

/// Symmetric bulk window between the collars.
pub fn bulk_window(ctx: &FermiContext, omega: f64) -> (f64, f64) {
    let x = turning_point(ctx, omega) - bulk_collar(ctx, omega);
    (-x, x)
}

/// Normalised Hermite functions `psi_0 .. psi_{n-1}` at `xi`, by the
/// three-term recurrence on the functions themselves.
pub fn hermite_functions(n: usize, xi: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    if n == 0 {
        return out;
    }
    let p0 = PI.powf(-0.25) * (-0.5 * xi * xi).exp();
    out.push(p0);
    if n > 1 {
        out.push(2f64.sqrt() * xi * p0);
    }
    for k in 2..n {
        let kf = k as f64;
        let v = (2.0 / kf).sqrt() * xi * out[k - 1] - ((kf - 1.0) / kf).sqrt() * out[k - 2];
        out.push(v);
    }
    out
}

/// `g sum_{n<N} phi_n(x) phi_n(x')`.
pub fn exact_odm(spec: &SpectrumSpec, ctx: &FermiContext, x: f64, x_prime: f64) -> Result<f64> {
    ctx.validate()?;
    if ctx.d != 1 {
        return Err(Error::ModelUnsupported(format!(
            "the oscillator reference is one-dimensional, context has d = {}",
            ctx.d
        )));
    }
    let b = oscillator_length(ctx, spec.omega());
    let a = hermite_functions(spec.n_occupied, x / b);
    let c = if x == x_prime { a.clone() } else { hermite_functions(spec.n_occupied, x_prime / b) };
    Ok(ctx.g as f64 / b * a.iter().zip(&c).map(|(p, q)| p * q).sum::<f64>())
}

/// Interval and node count for the idempotency defect.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IdempotencyGrid {
    pub lower: f64,
    pub upper: f64,
    pub nodes: usize,
}

fn kernel(eval: &dyn Fn(f64, f64) -> Result<f64>, xs: &[f64], ys: &[f64]) -> Result<DMatrix<f64>> {
    let mut m = DMatrix::zeros(xs.len(), ys.len());
    for (i, &x) in xs.iter().enumerate() {
        for (j, &y) in ys.iter().enumerate() {
            m[(i, j)] = eval(x, y)?;
        }
    }
    Ok(m)
}

fn compose(left: &DMatrix<f64>, rule: &Rule, right: &DMatrix<f64>) -> DMatrix<f64> {
    let mut weighted = left.clone();
    for (k, w) in rule.weights.iter().enumerate() {
        weighted.column_mut(k).scale_mut(*w);
    }
    weighted * right
}

/// `max_{i,j} |int rho(x_i, y) rho(y, x_j) dy - rho(x_i, x_j)|` over the
/// Gauss–Legendre nodes of the grid; the inner integral is repeated with
/// twice the nodes to bound the quadrature error.
pub fn idempotency_defect(eval: &dyn Fn(f64, f64) -> Result<f64>, grid: &IdempotencyGrid) -> Result<f64> {
    if !(grid.lower < grid.upper) || grid.nodes < 2 {
        return Err(Error::InvalidParameter("idempotency grid needs lower < upper and nodes >= 2".into()));
    }
    let coarse = gauss_legendre(grid.nodes).mapped(grid.lower, grid.upper);
    let fine = gauss_legendre(2 * grid.nodes).mapped(grid.lower, grid.upper);
    let xs = &coarse.nodes;
    let k = kernel(eval, xs, xs)?;
    let square = compose(&k, &coarse, &k);
    let square_fine = compose(&kernel(eval, xs, &fine.nodes)?, &fine, &kernel(eval, &fine.nodes, xs)?);
    let scale = k.amax().max(f64::MIN_POSITIVE);
    let change = (&square - &square_fine).amax() / scale;
    if change > 1e-8 {
        return Err(Error::QuadratureNotConverged { change, tolerance: 1e-8 });
    }
    Ok((square_fine - k).amax())
}

/// Endpoint behaviour of a density on its domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Endpoints {
    /// Smooth up to the ends.
    Regular,
    /// Vanishing like a square root at both ends (turning points);
    /// integrated after `x = mid + half sin(theta)`.
    SqrtVanishing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParticleDomain {
    pub lower: f64,
    pub upper: f64,
    pub nodes: usize,
    pub endpoints: Endpoints,
}

impl ParticleDomain {
    pub fn regular(lower: f64, upper: f64) -> Self {
        Self { lower, upper, nodes: 200, endpoints: Endpoints::Regular }
    }

    pub fn between_turning_points(lower: f64, upper: f64) -> Self {
        Self { lower, upper, nodes: 200, endpoints: Endpoints::SqrtVanishing }
    }
}

fn integrate_density(diag: &dyn Fn(f64) -> Result<f64>, dom: &ParticleDomain, n: usize) -> Result<f64> {
    // nodes inside the eps-collar of a turning point count as empty
    let diag = |x: f64| match diag(x) {
        Err(Error::ForbiddenRegion { .. }) => Ok(0.0),
        other => other,
    };
    let mid = 0.5 * (dom.lower + dom.upper);
    let half = 0.5 * (dom.upper - dom.lower);
    match dom.endpoints {
        Endpoints::Regular => {
            let rule = gauss_legendre(n).mapped(dom.lower, dom.upper);
            rule.nodes.iter().zip(&rule.weights).map(|(&x, &w)| Ok(w * diag(x)?)).sum()
        }
        Endpoints::SqrtVanishing => {
            let rule = gauss_legendre(n).mapped(-0.5 * PI, 0.5 * PI);
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(&t, &w)| Ok(w * half * t.cos() * diag(mid + half * t.sin())?))
                .sum()
        }
    }
}

/// Integral of a diagonal density over the domain, checked against twice
/// the nodes. Points reported as forbidden contribute nothing.
pub fn particle_number(diag: &dyn Fn(f64) -> Result<f64>, dom: &ParticleDomain) -> Result<f64> {
    if !(dom.lower < dom.upper) || dom.nodes < 2 {
        return Err(Error::InvalidParameter("particle domain needs lower < upper and nodes >= 2".into()));
    }
    let a = integrate_density(diag, dom, dom.nodes)?;
    let b = integrate_density(diag, dom, 2 * dom.nodes)?;
    let change = (a - b).abs() / b.abs().max(f64::MIN_POSITIVE);
    if change > 1e-9 {
        return Err(Error::QuadratureNotConverged { change, tolerance: 1e-9 });
    }
    Ok(b)
}
