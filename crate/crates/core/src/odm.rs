//! Second-order semiclassical density-matrix kernels: the non-symmetric
//! KODM terms, their symmetrized counterparts, the GVODM and the diagonal
//! limits.
//!
//! Every term is written as `g (2 pi)^{-d/2} k_F^a z^p S_nu(z)` with
//! `S_nu(z) = J_nu(z)/z^nu` and `p >= 0`, so nothing is singular at `z = 0`.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fermi::{sample_default, FermiContext, FermiFieldSample};
use crate::potential::Potential;
use crate::special::{scaled_bessel, scaled_bessel_at_origin, BesselOrder};

/// Contributions of order hbar^0, hbar^1, hbar^2 and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdmBreakdown {
    pub order0: f64,
    pub order1: f64,
    pub order2: f64,
    pub total: f64,
}

impl OdmBreakdown {
    pub fn new(order0: f64, order1: f64, order2: f64) -> Self {
        Self { order0, order1, order2, total: order0 + order1 + order2 }
    }

    pub fn orders(&self) -> [f64; 3] {
        [self.order0, self.order1, self.order2]
    }

    fn scaled(self, c: f64) -> Self {
        Self::new(c * self.order0, c * self.order1, c * self.order2)
    }
}

/// A pair of positions `(r, r')`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub r: Vec<f64>,
    pub r_prime: Vec<f64>,
}

/// Center of mass `R = (r + r')/2` and separation `s = r - r'`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricPoint {
    pub center: Vec<f64>,
    pub s: Vec<f64>,
}

impl PairPoint {
    pub fn new(r: Vec<f64>, r_prime: Vec<f64>) -> Result<Self> {
        same_len(&r, &r_prime)?;
        Ok(Self { r, r_prime })
    }

    pub fn separation(&self) -> Vec<f64> {
        self.r.iter().zip(&self.r_prime).map(|(a, b)| a - b).collect()
    }

    pub fn swapped(&self) -> Self {
        Self { r: self.r_prime.clone(), r_prime: self.r.clone() }
    }
}

impl SymmetricPoint {
    pub fn new(center: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        same_len(&center, &s)?;
        Ok(Self { center, s })
    }

    pub fn reflected(&self) -> Self {
        Self { center: self.center.clone(), s: self.s.iter().map(|x| -x).collect() }
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch { expected: a.len(), got: b.len() });
    }
    Ok(())
}

pub fn to_symmetric(p: &PairPoint) -> Result<SymmetricPoint> {
    same_len(&p.r, &p.r_prime)?;
    Ok(SymmetricPoint { center: p.r.iter().zip(&p.r_prime).map(|(a, b)| 0.5 * (a + b)).collect(), s: p.separation() })
}

pub fn to_pair(q: &SymmetricPoint) -> Result<PairPoint> {
    same_len(&q.center, &q.s)?;
    Ok(PairPoint {
        r: q.center.iter().zip(&q.s).map(|(c, s)| c + 0.5 * s).collect(),
        r_prime: q.center.iter().zip(&q.s).map(|(c, s)| c - 0.5 * s).collect(),
    })
}

/// `S_{d/2-k}(z)` for `k = 0..=3`.
pub(crate) fn scaled_kernels(d: usize, z: f64) -> Result<[f64; 4]> {
    let half = d as f64 / 2.0;
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = scaled_bessel(BesselOrder::new(half - k as f64)?, z)?;
    }
    Ok(out)
}

fn origin_kernels(d: usize) -> Result<[f64; 4]> {
    let half = d as f64 / 2.0;
    let mut out = [0.0; 4];
    for (k, o) in out.iter_mut().enumerate() {
        *o = scaled_bessel_at_origin(BesselOrder::new(half - k as f64)?);
    }
    Ok(out)
}

/// `g (2 pi)^{-d/2}`
pub(crate) fn prefactor(ctx: &FermiContext) -> f64 {
    ctx.g as f64 * (2.0 * PI).powf(-(ctx.d as f64) / 2.0)
}

/// Geometry shared by all kernels at one sample and separation.
struct Local {
    kf: f64,
    d: i32,
    z: f64,
    gs: f64,
    hss: f64,
    lap: f64,
    gsq: f64,
    s: [f64; 4],
}

impl Local {
    fn new(ctx: &FermiContext, f: &FermiFieldSample, sep: &[f64]) -> Result<Self> {
        let norm = sep.iter().map(|x| x * x).sum::<f64>().sqrt();
        let z = f.kf * norm;
        let (gs, hss) = if norm > 0.0 {
            let u = DVector::from_iterator(sep.len(), sep.iter().map(|x| x / norm));
            (f.grad_along(&u), f.hess_along(&u))
        } else {
            (0.0, 0.0)
        };
        Ok(Self {
            kf: f.kf,
            d: ctx.d as i32,
            z,
            gs,
            hss,
            lap: f.lap_kf2,
            gsq: f.grad_sq(),
            s: scaled_kernels(ctx.d, z)?,
        })
    }

    fn k(&self, shift: i32) -> f64 {
        self.kf.powi(self.d - shift)
    }

    /// The second-order expression shared by the KODM and symmetrized forms.
    fn second_order(&self) -> f64 {
        let z2 = self.z * self.z;
        self.k(4) * self.s[2] * self.lap / 24.0
            + self.k(6) * self.s[3] * self.gsq / 96.0
            + self.k(6) * z2 * self.s[2] * self.gs * self.gs / 32.0
            + self.k(4) * z2 * self.s[1] * self.hss / 12.0
    }
}

fn nonzero_separation(sep: &[f64]) -> Result<()> {
    if sep.iter().all(|x| *x == 0.0) {
        return Err(Error::DegenerateSeparation);
    }
    Ok(())
}

/// Non-symmetric KODM terms with every gradient taken at `r`.
pub fn kodm_terms(ctx: &FermiContext, v: &Potential, p: &PairPoint) -> Result<OdmBreakdown> {
    same_len(&p.r, &p.r_prime)?;
    let sep = p.separation();
    nonzero_separation(&sep)?;
    let f = sample_default(ctx, v, &p.r)?;
    let l = Local::new(ctx, &f, &sep)?;
    let order0 = l.k(0) * l.s[0];
    let order1 = -l.k(3) * l.z * l.s[1] * l.gs / 4.0;
    let order2 = l.second_order();
    Ok(OdmBreakdown::new(order0, order1, order2).scaled(prefactor(ctx)))
}

/// Symmetrized terms, all gradients at the center of mass `R`.
pub fn gvodm_terms(ctx: &FermiContext, v: &Potential, q: &SymmetricPoint) -> Result<OdmBreakdown> {
    same_len(&q.center, &q.s)?;
    let f = sample_default(ctx, v, &q.center)?;
    let l = Local::new(ctx, &f, &q.s)?;
    let z2 = l.z * l.z;
    let order0 = l.k(0) * l.s[0]
        + l.k(3) * l.z * l.s[1] * l.gs / 4.0
        + l.k(4) * z2 * l.s[1] * l.hss / 16.0
        + l.k(6) * z2 * l.s[2] * l.gs * l.gs / 32.0;
    let order1 = -l.k(3) * l.z * l.s[1] * l.gs / 4.0
        - l.k(6) * z2 * l.s[2] * l.gs * l.gs / 16.0
        - l.k(4) * z2 * l.s[1] * l.hss / 8.0;
    let order2 = l.second_order();
    Ok(OdmBreakdown::new(order0, order1, order2).scaled(prefactor(ctx)))
}

/// Simplified GVODM: TF term plus three gradient corrections, even in `s`.
pub fn gvodm_sum(ctx: &FermiContext, v: &Potential, q: &SymmetricPoint) -> Result<f64> {
    same_len(&q.center, &q.s)?;
    let f = sample_default(ctx, v, &q.center)?;
    let l = Local::new(ctx, &f, &q.s)?;
    let value = l.k(0) * l.s[0]
        + l.k(4) * l.s[2] * l.lap / 24.0
        + l.k(6) * l.s[3] * l.gsq / 96.0
        + l.k(4) * l.z * l.z * l.s[1] * l.hss / 48.0;
    Ok(prefactor(ctx) * value)
}

fn diagonal_terms(ctx: &FermiContext, f: &FermiFieldSample) -> Result<OdmBreakdown> {
    let c = origin_kernels(ctx.d)?;
    let d = ctx.d as i32;
    let order0 = f.kf.powi(d) * c[0];
    let order2 = f.kf.powi(d - 4) * c[2] * f.lap_kf2 / 24.0 + f.kf.powi(d - 6) * c[3] * f.grad_sq() / 96.0;
    Ok(OdmBreakdown::new(order0, 0.0, order2).scaled(prefactor(ctx)))
}

/// `s -> 0` limit of [`kodm_terms`] by order.
pub fn kodm_diagonal_terms(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<OdmBreakdown> {
    diagonal_terms(ctx, &sample_default(ctx, v, r)?)
}

/// `s -> 0` limit of [`gvodm_terms`] by order; the order-hbar part vanishes.
pub fn gvodm_diagonal_terms(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<OdmBreakdown> {
    diagonal_terms(ctx, &sample_default(ctx, v, r)?)
}

/// Semiclassical density from the KODM.
pub fn kodm_diagonal(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<f64> {
    Ok(kodm_diagonal_terms(ctx, v, r)?.total)
}

/// Semiclassical density from the GVODM.
pub fn gvodm_diagonal(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<f64> {
    Ok(gvodm_diagonal_terms(ctx, v, r)?.total)
}

/// Thomas–Fermi density `g k_F^d / ((4 pi)^{d/2} Gamma(d/2 + 1))`.
pub fn thomas_fermi_density(ctx: &FermiContext, v: &Potential, r: &[f64]) -> Result<f64> {
    let f = sample_default(ctx, v, r)?;
    let half = ctx.d as f64 / 2.0;
    Ok(ctx.g as f64 * f.kf.powi(ctx.d as i32) * (4.0 * PI).powf(-half) * crate::special::rgamma(half + 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::bessel_j;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn j(nu: f64, z: f64) -> f64 {
        bessel_j(BesselOrder::new(nu).unwrap(), z).unwrap()
    }

    fn ho() -> Potential {
        Potential::harmonic(1.0, 1.0).unwrap()
    }

    #[test]
    fn coordinates() {
        let p = PairPoint::new(vec![1.0, 0.0], vec![0.0, 0.0]).unwrap();
        let q = to_symmetric(&p).unwrap();
        assert_eq!(q.center, vec![0.5, 0.0]);
        assert_eq!(q.s, vec![1.0, 0.0]);
        assert_eq!(to_pair(&q).unwrap(), p);
        let q = to_symmetric(&PairPoint::new(vec![3.0], vec![3.0]).unwrap()).unwrap();
        assert_eq!((q.center[0], q.s[0]), (3.0, 0.0));
        assert!(matches!(PairPoint::new(vec![1.0], vec![1.0, 2.0]), Err(Error::DimensionMismatch { .. })));
        let bad = PairPoint { r: vec![1.0], r_prime: vec![] };
        assert!(matches!(to_symmetric(&bad), Err(Error::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn round_trip(r in prop::collection::vec(-8.0f64..8.0, 3), rp in prop::collection::vec(-8.0f64..8.0, 3)) {
            // exact for dyadic-friendly inputs; allow one ulp otherwise
            let p = PairPoint::new(r, rp).unwrap();
            let back = to_pair(&to_symmetric(&p).unwrap()).unwrap();
            for (a, b) in back.r.iter().chain(&back.r_prime).zip(p.r.iter().chain(&p.r_prime)) {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn free_gas_zero_of_sinc() {
        let ctx = FermiContext::natural(1, 2.0, 1).unwrap();
        let p = PairPoint::new(vec![PI / 2.0], vec![0.0]).unwrap();
        let b = kodm_terms(&ctx, &Potential::zero(), &p).unwrap();
        assert!(b.order0.abs() < 1e-16);
        assert_eq!((b.order1, b.order2), (0.0, 0.0));
        assert!(matches!(
            kodm_terms(&ctx, &Potential::zero(), &PairPoint::new(vec![1.0], vec![1.0]).unwrap()),
            Err(Error::DegenerateSeparation)
        ));
    }

    /// Literal transcription of the KODM terms with unscaled J and
    /// `(2 pi z)^{d/2}`, gradients by hand for the 1D oscillator.
    fn kodm_ho_literal(mu: f64, x: f64, xp: f64) -> [f64; 3] {
        let kf = (2.0 * (mu - 0.5 * x * x)).sqrt();
        let s = x - xp;
        let sh = s.signum();
        let z = kf * s.abs();
        let grad = -2.0 * x;
        let lap = -2.0;
        let pre = 1.0 / (2.0 * PI * z).sqrt();
        let a0 = pre * kf * j(0.5, z);
        let a1 = -pre * kf.powi(-2) * z * z / 4.0 * j(-0.5, z) * grad * sh;
        let a2 = pre
            * (kf.powi(-3) * z * z / 24.0 * j(-1.5, z) * lap
                + kf.powi(-5) * z.powi(3) / 96.0 * j(-2.5, z) * grad * grad
                + kf.powi(-5) * z.powi(4) / 32.0 * j(-1.5, z) * (grad * sh).powi(2)
                + kf.powi(-3) * z.powi(3) / 12.0 * j(-0.5, z) * lap);
        [a0, a1, a2]
    }

    #[test]
    fn kodm_matches_literal_transcription() {
        let ctx = FermiContext::natural(1, 10.5, 1).unwrap();
        for (x, xp) in [(0.3, 0.1), (0.1, 0.3), (-1.0, 0.5), (2.0, 2.7)] {
            let b = kodm_terms(&ctx, &ho(), &PairPoint::new(vec![x], vec![xp]).unwrap()).unwrap();
            let want = kodm_ho_literal(10.5, x, xp);
            for (got, want) in b.orders().iter().zip(want) {
                assert_relative_eq!(*got, want, max_relative = 1e-12);
            }
            assert_relative_eq!(b.total, want.iter().sum::<f64>(), max_relative = 1e-12);
        }
    }

    #[test]
    fn gvodm_forms_agree() {
        let ctx = FermiContext::natural(1, 10.5, 1).unwrap();
        let q = SymmetricPoint::new(vec![0.2], vec![0.05]).unwrap();
        let terms = gvodm_terms(&ctx, &ho(), &q).unwrap();
        assert_relative_eq!(terms.total, gvodm_sum(&ctx, &ho(), &q).unwrap(), max_relative = 1e-12);
    }

    #[test]
    fn free_gas_is_thomas_fermi() {
        for d in 1..=3 {
            let ctx = FermiContext::natural(d, 1.3, 2).unwrap();
            let kf = (2.0 * 1.3f64).sqrt();
            let q = SymmetricPoint::new(vec![0.1; d], vec![0.4; d]).unwrap();
            let b = gvodm_terms(&ctx, &Potential::zero(), &q).unwrap();
            let z = kf * (0.16 * d as f64).sqrt();
            let tf = 2.0 * kf.powi(d as i32) * (2.0 * PI * z).powf(-(d as f64) / 2.0) * j(d as f64 / 2.0, z);
            assert_relative_eq!(b.order0, tf, max_relative = 1e-13);
            assert_eq!((b.order1, b.order2), (0.0, 0.0));
        }
    }

    #[test]
    fn diagonal_values() {
        let ctx = FermiContext::natural(3, 0.5, 2).unwrap();
        let v = gvodm_diagonal(&ctx, &Potential::zero(), &[0.0; 3]).unwrap();
        assert_relative_eq!(v, 1.0 / (3.0 * PI * PI), max_relative = 1e-14);
        assert!((v - 0.03377).abs() < 1e-5);
        let ctx = FermiContext::natural(1, 2.0, 1).unwrap();
        assert_relative_eq!(gvodm_diagonal(&ctx, &Potential::zero(), &[0.0]).unwrap(), 2.0 / PI, max_relative = 1e-15);
    }

    #[test]
    fn diagonal_one_dimension_closed_form() {
        // (g/pi) [k - L/(24 k^3) + G^2/(32 k^5)]
        let ctx = FermiContext::natural(1, 10.5, 1).unwrap();
        let x: f64 = 1.3;
        let k = (2.0 * (10.5 - 0.5 * x * x)).sqrt();
        let want = (k - (-2.0) / (24.0 * k.powi(3)) + (2.0 * x).powi(2) / (32.0 * k.powi(5))) / PI;
        assert_relative_eq!(gvodm_diagonal(&ctx, &ho(), &[x]).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(kodm_diagonal(&ctx, &ho(), &[x]).unwrap(), want, max_relative = 1e-14);
    }

    #[test]
    fn diagonal_two_dimensions_has_no_correction() {
        let ctx = FermiContext::natural(2, 4.0, 1).unwrap();
        let b = gvodm_diagonal_terms(&ctx, &ho(), &[0.5, -0.2]).unwrap();
        assert_eq!(b.order2, 0.0);
        let tf = thomas_fermi_density(&ctx, &ho(), &[0.5, -0.2]).unwrap();
        assert_relative_eq!(b.total, tf, max_relative = 1e-14);
    }

    #[test]
    fn diagonal_limit_continuity() {
        let v = Potential::gaussian_well(-2.0, 1.0).unwrap();
        for d in 1..=3 {
            let ctx = FermiContext::natural(d, 0.7, 1).unwrap();
            let mut s = vec![0.0; d];
            s[0] = 1e-6;
            let center = vec![0.3; d];
            let off = gvodm_sum(&ctx, &v, &SymmetricPoint::new(center.clone(), s).unwrap()).unwrap();
            let diag = gvodm_diagonal(&ctx, &v, &center).unwrap();
            assert!((off - diag).abs() <= 1e-8 * diag.abs(), "d={d}: {off} vs {diag}");
        }
    }

    #[test]
    fn degeneracy_is_linear() {
        let v = Potential::gaussian_well(-2.0, 1.0).unwrap();
        let c1 = FermiContext::natural(2, 0.7, 1).unwrap();
        let c2 = FermiContext::natural(2, 0.7, 2).unwrap();
        let p = PairPoint::new(vec![0.3, 0.1], vec![-0.2, 0.4]).unwrap();
        let (a, b) = (kodm_terms(&c1, &v, &p).unwrap(), kodm_terms(&c2, &v, &p).unwrap());
        for (x, y) in a.orders().iter().zip(b.orders()) {
            assert_eq!(2.0 * x, y);
        }
    }

    proptest! {
        #[test]
        fn gvodm_is_even_and_consistent(
            d in 1usize..=3,
            c in prop::collection::vec(-1.0f64..1.0, 3),
            s in prop::collection::vec(-2.0f64..2.0, 3),
        ) {
            let ctx = FermiContext::natural(d, 0.9, 2).unwrap();
            let v = Potential::gaussian_well(-2.5, 1.3).unwrap();
            let q = SymmetricPoint::new(c[..d].to_vec(), s[..d].to_vec()).unwrap();
            let a = gvodm_sum(&ctx, &v, &q).unwrap();
            let b = gvodm_sum(&ctx, &v, &q.reflected()).unwrap();
            prop_assert!((a - b).abs() <= 1e-14 * a.abs());
            let t = gvodm_terms(&ctx, &v, &q).unwrap();
            let scale = t.order0.abs() + t.order1.abs() + t.order2.abs();
            prop_assert!((t.total - a).abs() <= 1e-12 * scale);
            prop_assert!((t.total - (t.order0 + t.order1 + t.order2)).abs() <= 1e-15 * scale);
        }
    }
}
