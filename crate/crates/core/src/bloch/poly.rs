//! Laurent polynomials in the Laplace variable beta, and truncated series
//! in a bookkeeping gradient parameter.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

use num_complex::Complex64;

/// `sum_n c_n beta^n` with integer (possibly negative) powers.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BetaPoly {
    terms: BTreeMap<i32, Complex64>,
}

impl BetaPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(power: i32, c: Complex64) -> Self {
        let mut p = Self::zero();
        p.push(power, c);
        p
    }

    pub fn real(power: i32, c: f64) -> Self {
        Self::monomial(power, Complex64::new(c, 0.0))
    }

    pub fn push(&mut self, power: i32, c: Complex64) {
        *self.terms.entry(power).or_default() += c;
    }

    pub fn terms(&self) -> impl Iterator<Item = (i32, Complex64)> + '_ {
        self.terms.iter().map(|(&n, &c)| (n, c))
    }

    pub fn coefficient(&self, power: i32) -> Complex64 {
        self.terms.get(&power).copied().unwrap_or_default()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { terms: self.terms.iter().map(|(&n, &v)| (n, v * c)).collect() }
    }

    pub fn eval(&self, beta: Complex64) -> Complex64 {
        self.terms.iter().map(|(&n, &c)| c * beta.powi(n)).sum()
    }

    /// Largest |Im c_n| relative to the largest |c_n|.
    pub fn relative_imag(&self) -> f64 {
        let big = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        if big == 0.0 {
            return 0.0;
        }
        self.terms.values().map(|c| c.im.abs()).fold(0.0, f64::max) / big
    }
}

impl Add for &BetaPoly {
    type Output = BetaPoly;
    fn add(self, rhs: &BetaPoly) -> BetaPoly {
        let mut out = self.clone();
        for (n, c) in rhs.terms() {
            out.push(n, c);
        }
        out
    }
}

impl Mul for &BetaPoly {
    type Output = BetaPoly;
    fn mul(self, rhs: &BetaPoly) -> BetaPoly {
        let mut out = BetaPoly::zero();
        for (n, a) in self.terms() {
            for (k, b) in rhs.terms() {
                out.push(n + k, a * b);
            }
        }
        out
    }
}

/// Series `a_0 + a_1 eps + a_2 eps^2`, truncated after second order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GradientSeries(pub [BetaPoly; 3]);

impl GradientSeries {
    pub fn order(&self, k: usize) -> &BetaPoly {
        &self.0[k]
    }
}

impl Mul for &GradientSeries {
    type Output = GradientSeries;
    fn mul(self, rhs: &GradientSeries) -> GradientSeries {
        let mut out = GradientSeries::default();
        for i in 0..3 {
            for j in 0..3 - i {
                out.0[i + j] = &out.0[i + j] + &(&self.0[i] * &rhs.0[j]);
            }
        }
        out
    }
}
