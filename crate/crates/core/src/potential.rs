//! External one-body potentials with value, gradient, Hessian and Laplacian.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::error::{domain, Error, Result};

/// User-supplied potential `V(r)`.
pub type CustomFn = dyn Fn(&[f64]) -> f64 + Send + Sync;

#[derive(Clone)]
pub enum PotentialKind {
    Zero,
    /// `m omega^2 |r|^2 / 2`
    IsotropicHarmonic {
        mass: f64,
        omega: f64,
    },
    /// `m sum_i omega_i^2 r_i^2 / 2`
    AnisotropicHarmonic {
        mass: f64,
        omegas: Vec<f64>,
    },
    /// `lambda |r|^4`
    Quartic {
        lambda: f64,
    },
    /// `depth * exp(-|r|^2 / (2 width^2))`
    GaussianWell {
        depth: f64,
        width: f64,
    },
    /// Arbitrary function, trusted only inside the box `[lower, upper]`.
    Custom {
        f: Arc<CustomFn>,
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
}

impl fmt::Debug for PotentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Zero => write!(f, "Zero"),
            Self::IsotropicHarmonic { mass, omega } => {
                write!(f, "IsotropicHarmonic {{ mass: {mass}, omega: {omega} }}")
            }
            Self::AnisotropicHarmonic { mass, omegas } => {
                write!(f, "AnisotropicHarmonic {{ mass: {mass}, omegas: {omegas:?} }}")
            }
            Self::Quartic { lambda } => write!(f, "Quartic {{ lambda: {lambda} }}"),
            Self::GaussianWell { depth, width } => {
                write!(f, "GaussianWell {{ depth: {depth}, width: {width} }}")
            }
            Self::Custom { lower, upper, .. } => {
                write!(f, "Custom {{ lower: {lower:?}, upper: {upper:?} }}")
            }
        }
    }
}

/// How derivatives are obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Differentiation {
    Analytic,
    /// Central differences with steps `h1 (1+|r|)` and `h2 (1+|r|)`.
    CentralDifference {
        h1: f64,
        h2: f64,
    },
}

impl Differentiation {
    /// Central differences with the usual round-off balanced steps.
    pub fn central() -> Self {
        Self::CentralDifference { h1: f64::EPSILON.powf(1.0 / 3.0), h2: f64::EPSILON.powf(0.25) }
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    kind: PotentialKind,
    differentiation: Differentiation,
}

impl Potential {
    pub fn new(kind: PotentialKind) -> Result<Self> {
        let differentiation = match &kind {
            PotentialKind::Custom { lower, upper, .. } => {
                if lower.len() != upper.len() {
                    return Err(Error::DimensionMismatch { expected: lower.len(), got: upper.len() });
                }
                if lower.is_empty() || lower.iter().zip(upper).any(|(a, b)| !(a < b)) {
                    return domain("custom potential needs a nonempty validity box");
                }
                Differentiation::central()
            }
            PotentialKind::IsotropicHarmonic { mass, omega } => {
                check_positive("mass", *mass)?;
                check_finite("omega", *omega)?;
                Differentiation::Analytic
            }
            PotentialKind::AnisotropicHarmonic { mass, omegas } => {
                check_positive("mass", *mass)?;
                if omegas.is_empty() {
                    return domain("anisotropic harmonic potential needs at least one frequency");
                }
                for w in omegas {
                    check_finite("omega", *w)?;
                }
                Differentiation::Analytic
            }
            PotentialKind::Quartic { lambda } => {
                check_finite("lambda", *lambda)?;
                Differentiation::Analytic
            }
            PotentialKind::GaussianWell { depth, width } => {
                check_finite("depth", *depth)?;
                check_positive("width", *width)?;
                Differentiation::Analytic
            }
            PotentialKind::Zero => Differentiation::Analytic,
        };
        Ok(Self { kind, differentiation })
    }

    pub fn zero() -> Self {
        Self { kind: PotentialKind::Zero, differentiation: Differentiation::Analytic }
    }

    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        Self::new(PotentialKind::IsotropicHarmonic { mass, omega })
    }

    pub fn anisotropic_harmonic(mass: f64, omegas: Vec<f64>) -> Result<Self> {
        Self::new(PotentialKind::AnisotropicHarmonic { mass, omegas })
    }

    pub fn quartic(lambda: f64) -> Result<Self> {
        Self::new(PotentialKind::Quartic { lambda })
    }

    pub fn gaussian_well(depth: f64, width: f64) -> Result<Self> {
        Self::new(PotentialKind::GaussianWell { depth, width })
    }

    pub fn custom<F>(f: F, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(PotentialKind::Custom { f: Arc::new(f), lower, upper })
    }

    /// Switches the differentiation mode. Custom potentials have no analytic
    /// derivatives.
    pub fn with_differentiation(mut self, mode: Differentiation) -> Result<Self> {
        if let Differentiation::CentralDifference { h1, h2 } = mode {
            check_positive("h1", h1)?;
            check_positive("h2", h2)?;
        }
        if matches!(self.kind, PotentialKind::Custom { .. }) && mode == Differentiation::Analytic {
            return domain("custom potentials only support central differences");
        }
        self.differentiation = mode;
        Ok(self)
    }

    pub fn kind(&self) -> &PotentialKind {
        &self.kind
    }

    pub fn differentiation(&self) -> Differentiation {
        self.differentiation
    }

    /// Dimension fixed by the potential itself, if any.
    pub fn dimension(&self) -> Option<usize> {
        match &self.kind {
            PotentialKind::AnisotropicHarmonic { omegas, .. } => Some(omegas.len()),
            PotentialKind::Custom { lower, .. } => Some(lower.len()),
            _ => None,
        }
    }

    /// True when V is a polynomial of degree at most two.
    pub fn is_quadratic(&self) -> bool {
        matches!(
            self.kind,
            PotentialKind::Zero | PotentialKind::IsotropicHarmonic { .. } | PotentialKind::AnisotropicHarmonic { .. }
        )
    }

    fn check(&self, r: &[f64]) -> Result<()> {
        if r.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, got: 0 });
        }
        if let Some(d) = self.dimension() {
            if d != r.len() {
                return Err(Error::DimensionMismatch { expected: d, got: r.len() });
            }
        }
        if r.iter().any(|x| !x.is_finite()) {
            return domain("position must be finite");
        }
        Ok(())
    }

    fn raw(&self, r: &[f64]) -> Result<f64> {
        Ok(match &self.kind {
            PotentialKind::Zero => 0.0,
            PotentialKind::IsotropicHarmonic { mass, omega } => 0.5 * mass * omega * omega * norm2(r),
            PotentialKind::AnisotropicHarmonic { mass, omegas } => {
                0.5 * mass * r.iter().zip(omegas).map(|(x, w)| w * w * x * x).sum::<f64>()
            }
            PotentialKind::Quartic { lambda } => lambda * norm2(r).powi(2),
            PotentialKind::GaussianWell { depth, width } => depth * (-norm2(r) / (2.0 * width * width)).exp(),
            PotentialKind::Custom { f, lower, upper } => {
                let inside = r.iter().zip(lower.iter().zip(upper)).all(|(x, (a, b))| a <= x && x <= b);
                if !inside {
                    return domain(format!("point {r:?} outside the custom potential's validity box"));
                }
                f(r)
            }
        })
    }

    /// `V(r)`.
    pub fn eval(&self, r: &[f64]) -> Result<f64> {
        self.check(r)?;
        self.raw(r)
    }

    /// `grad V(r)`.
    pub fn gradient(&self, r: &[f64]) -> Result<DVector<f64>> {
        self.check(r)?;
        let d = r.len();
        match self.differentiation {
            Differentiation::Analytic => Ok(match &self.kind {
                PotentialKind::Zero => DVector::zeros(d),
                PotentialKind::IsotropicHarmonic { mass, omega } => {
                    DVector::from_iterator(d, r.iter().map(|x| mass * omega * omega * x))
                }
                PotentialKind::AnisotropicHarmonic { mass, omegas } => {
                    DVector::from_iterator(d, r.iter().zip(omegas).map(|(x, w)| mass * w * w * x))
                }
                PotentialKind::Quartic { lambda } => {
                    let c = 4.0 * lambda * norm2(r);
                    DVector::from_iterator(d, r.iter().map(|x| c * x))
                }
                PotentialKind::GaussianWell { width, .. } => {
                    let v = self.raw(r)?;
                    let s2 = width * width;
                    DVector::from_iterator(d, r.iter().map(|x| -v * x / s2))
                }
                PotentialKind::Custom { .. } => unreachable!("custom potentials are never analytic"),
            }),
            Differentiation::CentralDifference { h1, .. } => {
                let h = h1 * (1.0 + norm2(r).sqrt());
                let mut y = r.to_vec();
                let mut g = DVector::zeros(d);
                for i in 0..d {
                    y[i] = r[i] + h;
                    let up = self.raw(&y)?;
                    y[i] = r[i] - h;
                    let dn = self.raw(&y)?;
                    y[i] = r[i];
                    g[i] = (up - dn) / (2.0 * h);
                }
                Ok(g)
            }
        }
    }

    /// Hessian matrix of V at r.
    pub fn hessian(&self, r: &[f64]) -> Result<DMatrix<f64>> {
        self.check(r)?;
        let d = r.len();
        match self.differentiation {
            Differentiation::Analytic => Ok(match &self.kind {
                PotentialKind::Zero => DMatrix::zeros(d, d),
                PotentialKind::IsotropicHarmonic { mass, omega } => DMatrix::identity(d, d) * (mass * omega * omega),
                PotentialKind::AnisotropicHarmonic { mass, omegas } => {
                    DMatrix::from_diagonal(&DVector::from_iterator(d, omegas.iter().map(|w| mass * w * w)))
                }
                PotentialKind::Quartic { lambda } => {
                    let x = DVector::from_column_slice(r);
                    (DMatrix::identity(d, d) * norm2(r) + &x * x.transpose() * 2.0) * (4.0 * lambda)
                }
                PotentialKind::GaussianWell { width, .. } => {
                    let v = self.raw(r)?;
                    let s2 = width * width;
                    let x = DVector::from_column_slice(r);
                    (&x * x.transpose() / (s2 * s2) - DMatrix::identity(d, d) / s2) * v
                }
                PotentialKind::Custom { .. } => unreachable!("custom potentials are never analytic"),
            }),
            Differentiation::CentralDifference { h2, .. } => {
                let h = h2 * (1.0 + norm2(r).sqrt());
                let mut y = r.to_vec();
                let at = |y: &mut Vec<f64>, di: f64, i: usize, dj: f64, j: usize| -> Result<f64> {
                    y[i] += di;
                    y[j] += dj;
                    let v = self.raw(y);
                    y[i] = r[i];
                    y[j] = r[j];
                    v
                };
                let v0 = self.raw(r)?;
                let mut hm = DMatrix::zeros(d, d);
                for i in 0..d {
                    let up = at(&mut y, h, i, 0.0, i)?;
                    let dn = at(&mut y, -h, i, 0.0, i)?;
                    hm[(i, i)] = (up - 2.0 * v0 + dn) / (h * h);
                    for j in 0..i {
                        let pp = at(&mut y, h, i, h, j)?;
                        let pm = at(&mut y, h, i, -h, j)?;
                        let mp = at(&mut y, -h, i, h, j)?;
                        let mm = at(&mut y, -h, i, -h, j)?;
                        let v = (pp - pm - mp + mm) / (4.0 * h * h);
                        hm[(i, j)] = v;
                        hm[(j, i)] = v;
                    }
                }
                Ok(hm)
            }
        }
    }

    /// Laplacian, the trace of the Hessian.
    pub fn laplacian(&self, r: &[f64]) -> Result<f64> {
        Ok(self.hessian(r)?.trace())
    }
}

fn norm2(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum()
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be positive and finite, got {v}")))
    }
}

fn check_finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn builtins(d: usize) -> Vec<Potential> {
        vec![
            Potential::harmonic(1.3, 0.7).unwrap(),
            Potential::anisotropic_harmonic(0.8, (0..d).map(|i| 0.5 + i as f64).collect()).unwrap(),
            Potential::quartic(0.2).unwrap(),
            Potential::gaussian_well(-2.0, 1.1).unwrap(),
        ]
    }

    #[test]
    fn examples() {
        let z = Potential::zero();
        assert_eq!(z.eval(&[1.0, -2.0]).unwrap(), 0.0);
        assert_eq!(z.gradient(&[1.0]).unwrap()[0], 0.0);
        assert_eq!(z.laplacian(&[1.0, 3.0]).unwrap(), 0.0);

        let ho = Potential::harmonic(1.0, 1.0).unwrap();
        assert_eq!(ho.eval(&[2.0]).unwrap(), 2.0);
        assert_eq!(ho.gradient(&[1.0]).unwrap()[0], 1.0);
        assert_eq!(ho.hessian(&[1.0]).unwrap()[(0, 0)], 1.0);
        assert_eq!(ho.laplacian(&[1.0]).unwrap(), 1.0);

        let g = Potential::gaussian_well(-1.0, 1.0).unwrap();
        assert_eq!(g.eval(&[0.0]).unwrap(), -1.0);
        assert_eq!(g.gradient(&[0.0]).unwrap()[0], 0.0);
        assert_eq!(g.hessian(&[0.0]).unwrap()[(0, 0)], 1.0);
    }

    #[test]
    fn dimension_checks() {
        let a = Potential::anisotropic_harmonic(1.0, vec![1.0, 2.0]).unwrap();
        assert!(matches!(a.eval(&[1.0]), Err(Error::DimensionMismatch { expected: 2, got: 1 })));
        assert!(matches!(Potential::zero().eval(&[]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn custom_box_and_modes() {
        let c = Potential::custom(|r| r[0].sin(), vec![-1.0], vec![1.0]).unwrap();
        assert!(matches!(c.differentiation(), Differentiation::CentralDifference { .. }));
        assert!(matches!(c.eval(&[2.0]), Err(Error::Domain(_))));
        assert!((c.gradient(&[0.3]).unwrap()[0] - 0.3f64.cos()).abs() < 1e-9);
        assert!((c.laplacian(&[0.3]).unwrap() + 0.3f64.sin()).abs() < 1e-6);
        assert!(c.with_differentiation(Differentiation::Analytic).is_err());
    }

    #[test]
    fn gaussian_hessian_matches_closed_form_1d() {
        let (v0, s) = (-1.5, 0.8);
        let g = Potential::gaussian_well(v0, s).unwrap();
        for x in [-1.2, 0.0, 0.4, 2.0] {
            let want = v0 * (x * x / s.powi(4) - 1.0 / (s * s)) * (-x * x / (2.0 * s * s)).exp();
            assert!((g.hessian(&[x]).unwrap()[(0, 0)] - want).abs() < 1e-14);
        }
    }

    proptest! {
        #[test]
        fn analytic_vs_central(d in 1usize..=3, raw in prop::collection::vec(-1.5f64..1.5, 3)) {
            let r = &raw[..d];
            for p in builtins(d) {
                let fd = p.clone().with_differentiation(Differentiation::central()).unwrap();
                let (ga, gf) = (p.gradient(r).unwrap(), fd.gradient(r).unwrap());
                let (ha, hf) = (p.hessian(r).unwrap(), fd.hessian(r).unwrap());
                // relative to max(|.|, 1) since derivatives vanish at isolated points
                let gs = ga.amax().max(1.0);
                let hs = ha.amax().max(1.0);
                prop_assert!((ga - gf).amax() <= 1e-6 * gs);
                prop_assert!((&ha - &hf).amax() <= 1e-6 * hs);
                prop_assert!((&ha - ha.transpose()).amax() <= 1e-12);
                prop_assert!((&hf - hf.transpose()).amax() <= 1e-8);
                prop_assert!((p.laplacian(r).unwrap() - ha.trace()).abs() <= 1e-14 * hs);
            }
        }
    }
}
