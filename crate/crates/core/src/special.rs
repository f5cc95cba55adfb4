//! Cylindrical Bessel functions of real order and the scaled kernel
//! `J_nu(z) / z^nu`.

use statrs::function::gamma::gamma;

use crate::error::{domain, Error, Result};

/// Largest supported |nu|.
pub const MAX_ORDER: f64 = 64.0;

/// Below this argument `scaled_bessel` switches to its ascending series.
pub const SCALED_SERIES_SWITCH: f64 = 1e-2;

const SERIES_MAX_Z: f64 = 2.0;

/// A validated Bessel order, finite with |nu| <= 64.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !nu.is_finite() {
            return domain(format!("Bessel order must be finite, got {nu}"));
        }
        if nu.abs() > MAX_ORDER {
            return Err(Error::OrderOutOfRange(nu));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    fn is_integer(self) -> bool {
        self.0.fract() == 0.0
    }

    fn is_half_integer(self) -> bool {
        !self.is_integer() && (2.0 * self.0).fract() == 0.0
    }
}

impl TryFrom<f64> for BesselOrder {
    type Error = Error;
    fn try_from(nu: f64) -> Result<Self> {
        Self::new(nu)
    }
}

/// Gamma function. Integer and half-integer arguments use exact products,
/// everything else the Lanczos approximation from `statrs`.
pub fn gamma_fn(x: f64) -> f64 {
    if x.fract() == 0.0 && (1.0..=171.0).contains(&x) {
        return (2..x as u32).fold(1.0, |acc, k| acc * k as f64);
    }
    if (2.0 * x).fract() == 0.0 && x.abs() < 100.0 {
        // half-integer: walk from Gamma(1/2) = sqrt(pi)
        let mut g = std::f64::consts::PI.sqrt();
        let mut a = 0.5;
        while a < x {
            g *= a;
            a += 1.0;
        }
        while a > x {
            a -= 1.0;
            g /= a;
        }
        return g;
    }
    gamma(x)
}

/// Reciprocal gamma function, zero at the poles of Gamma.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x.fract() == 0.0 {
        0.0
    } else {
        1.0 / gamma_fn(x)
    }
}

/// Value of `J_nu(z)/z^nu` at `z = 0`, i.e. `1/(2^nu Gamma(nu+1))`.
///
/// Vanishes for negative integer orders.
pub fn scaled_bessel_at_origin(nu: BesselOrder) -> f64 {
    let nu = nu.value();
    rgamma(nu + 1.0) * 2f64.powf(-nu)
}

/// `J_nu(z)` for real order and `z >= 0`.
pub fn bessel_j(nu: BesselOrder, z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return domain(format!("Bessel argument must be nonnegative, got {z}"));
    }
    let v = nu.value();
    if z == 0.0 {
        return if v == 0.0 {
            Ok(1.0)
        } else if v > 0.0 || nu.is_integer() {
            Ok(0.0)
        } else {
            domain(format!("J_{v}(0) diverges for negative non-integer order"))
        };
    }
    Ok(j_pair(nu, z).0)
}

/// `J_nu(z) / z^nu`, finite at `z = 0` for every real order.
///
/// Below [`SCALED_SERIES_SWITCH`] an eight-term ascending series is used.
pub fn scaled_bessel(nu: BesselOrder, z: f64) -> Result<f64> {
    if z.is_nan() || z < 0.0 {
        return domain(format!("Bessel argument must be nonnegative, got {z}"));
    }
    let v = nu.value();
    if z < SCALED_SERIES_SWITCH {
        let q = -0.25 * z * z;
        let mut sum = 0.0;
        let mut pow = 1.0;
        let mut fact = 1.0;
        for k in 0..8 {
            if k > 0 {
                pow *= q;
                fact *= k as f64;
            }
            sum += pow / fact * rgamma(v + k as f64 + 1.0);
        }
        return Ok(sum * 2f64.powf(-v));
    }
    Ok(j_pair(nu, z).0 / z.powf(v))
}

/// Returns `(J_nu(z), J_{nu+1}(z))` for `z > 0`.
pub(crate) fn j_pair(nu: BesselOrder, z: f64) -> (f64, f64) {
    let v = nu.value();
    if v >= 0.0 {
        return j_nonneg(v, z);
    }
    if nu.is_integer() {
        // J_{-n} = (-1)^n J_n
        let n = -v;
        let (a, b) = j_nonneg(n - 1.0, z);
        let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
        // J_{-n} = sign * J_n, J_{-n+1} = -sign * J_{n-1}
        let jn = if n == 0.0 { a } else { b };
        return (sign * jn, -sign * a);
    }
    if nu.is_half_integer() {
        let pre = (2.0 / (std::f64::consts::PI * z)).sqrt();
        let (s, c) = z.sin_cos();
        return recur_down(-0.5, pre * c, pre * s, v, z);
    }
    if z <= SERIES_MAX_Z {
        return (series(v, z), series(v + 1.0, z));
    }
    let base = v - v.floor();
    let (a, b) = j_nonneg(base, z);
    recur_down(base, a, b, v, z)
}

/// Downward recurrence `J_{mu-1} = 2 mu/z J_mu - J_{mu+1}` from
/// `(J_start, J_{start+1})` to order `target`.
fn recur_down(start: f64, j0: f64, j1: f64, target: f64, z: f64) -> (f64, f64) {
    let steps = (start - target).round() as usize;
    let (mut cur, mut next) = (j0, j1);
    let mut mu = start;
    for _ in 0..steps {
        let prev = 2.0 * mu / z * cur - next;
        next = cur;
        cur = prev;
        mu -= 1.0;
    }
    (cur, next)
}

fn j_nonneg(v: f64, z: f64) -> (f64, f64) {
    if z <= SERIES_MAX_Z || 0.25 * z * z <= v + 1.0 {
        (series(v, z), series(v + 1.0, z))
    } else {
        miller(v, z)
    }
}

/// Ascending series; callers keep it in its cancellation-free range.
fn series(v: f64, z: f64) -> f64 {
    let q = -0.25 * z * z;
    let lead = (0.5 * z).powf(v);
    if v < 0.0 && v.fract() == 0.0 {
        // only reached for J_{-n} via the integer branch; defensive
        let n = -v;
        let s = series(n, z);
        return if (n as i64) % 2 == 0 { s } else { -s };
    }
    let mut term = rgamma(v + 1.0);
    let mut sum = term;
    for k in 0..500 {
        let kf = k as f64;
        term *= q / ((kf + 1.0) * (v + kf + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

/// Miller's downward recurrence normalised with the Neumann sum
/// `(z/2)^a / Gamma(a+1) = sum_k c_k J_{a+2k}(z)`, `a = frac(v)`.
fn miller(v: f64, z: f64) -> (f64, f64) {
    let n = v.floor() as usize;
    let base = v - n as f64;
    let big = n.max(z.ceil() as usize);
    let mut top = big + 30 + (10.0 * (big as f64).sqrt()) as usize;
    if top % 2 == 1 {
        top += 1;
    }

    let mut weights = vec![0.0; top / 2 + 1];
    weights[0] = 1.0;
    let mut t = 1.0;
    for (k, w) in weights.iter_mut().enumerate().skip(1) {
        let kf = k as f64;
        *w = (base + 2.0 * kf) * t;
        t *= (base + kf) / (kf + 1.0);
    }

    let mut above = 0.0;
    let mut cur = 1e-30;
    let mut sum = weights[top / 2] * cur;
    let (mut jn, mut jn1) = (0.0, 0.0);
    for k in (1..=top).rev() {
        let below = 2.0 * (base + k as f64) / z * cur - above;
        above = cur;
        cur = below;
        let idx = k - 1;
        if idx == n {
            jn = cur;
        } else if idx == n + 1 {
            jn1 = cur;
        }
        if idx % 2 == 0 {
            sum += weights[idx / 2] * cur;
        }
        if cur.abs() > 1e250 {
            const S: f64 = 1e-250;
            cur *= S;
            above *= S;
            sum *= S;
            jn *= S;
            jn1 *= S;
        }
    }
    let norm = (0.5 * z).powf(base) * rgamma(base + 1.0) / sum;
    (jn * norm, jn1 * norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn j(nu: f64, z: f64) -> f64 {
        bessel_j(BesselOrder::new(nu).unwrap(), z).unwrap()
    }

    fn half_integer_closed(nu2: i32, z: f64) -> f64 {
        let pre = (2.0 / (PI * z)).sqrt();
        let (s, c) = z.sin_cos();
        match nu2 {
            1 => pre * s,
            -1 => pre * c,
            3 => pre * (s / z - c),
            -3 => pre * (-c / z - s),
            5 => pre * ((3.0 / (z * z) - 1.0) * s - 3.0 * c / z),
            -5 => pre * (3.0 * s / z + (3.0 / (z * z) - 1.0) * c),
            _ => unreachable!(),
        }
    }

    #[test]
    fn spot_values() {
        assert_eq!(j(0.0, 0.0), 1.0);
        assert!(j(0.5, PI).abs() < 1e-15);
        assert!((j(-1.5, 1.0) + 1.10250).abs() < 1e-5);
        assert_eq!(j(3.0, 0.0), 0.0);
        assert_eq!(j(-2.0, 0.0), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(bessel_j(BesselOrder::new(0.0).unwrap(), -1.0), Err(Error::Domain(_))));
        assert!(matches!(bessel_j(BesselOrder::new(-0.5).unwrap(), 0.0), Err(Error::Domain(_))));
        assert!(matches!(BesselOrder::new(64.5), Err(Error::OrderOutOfRange(_))));
        assert!(matches!(BesselOrder::new(f64::NAN), Err(Error::Domain(_))));
        assert!(BesselOrder::new(-64.0).is_ok());
    }

    // High-precision reference values (50-digit arithmetic, rounded).
    const REFERENCE: &[(f64, f64, f64)] = &[
        (0.0, 1.0, 0.765_197_686_557_966_6),
        (1.0, 10.0, 0.043_472_746_168_861_44),
        (5.0, 1.0, 2.497_577_302_112_344e-4),
        (10.0, 100.0, -0.054_732_176_935_472_01),
        (0.0, 100.0, 0.019_985_850_304_223_12),
        (2.5, 50.0, 0.023_037_219_509_625_53),
        (0.3, 30.0, -0.130_110_791_424_175_5),
        (-0.3, 30.0, -0.023_488_393_769_170_39),
        (-2.7, 15.0, 0.205_024_006_825_717_3),
        (-2.7, 3.0, 0.137_256_304_939_875_7),
        (7.25, 20.0, -0.177_661_227_843_085_3),
        (40.0, 12.0, 6.744_882_148_469_006e-18),
        (-7.0, 13.0, 0.240_570_949_586_160_5),
    ];

    #[test]
    fn matches_reference_table() {
        for &(nu, z, want) in REFERENCE {
            let got = j(nu, z);
            assert_relative_eq!(got, want, max_relative = 1e-12);
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for nu2 in [-5, -3, -1, 1, 3, 5] {
            for i in 1..=400 {
                let z = 0.25 * i as f64;
                let got = j(nu2 as f64 / 2.0, z);
                let want = half_integer_closed(nu2, z);
                assert!(
                    (got - want).abs() <= 1e-12 * want.abs().max(1e-3),
                    "nu={} z={z}: {got} vs {want}",
                    nu2 as f64 / 2.0
                );
            }
        }
    }

    #[test]
    fn gamma_values() {
        let sp = PI.sqrt();
        assert_eq!(gamma_fn(1.0), 1.0);
        assert_eq!(gamma_fn(5.0), 24.0);
        assert_relative_eq!(gamma_fn(0.5), sp, max_relative = 1e-15);
        assert_relative_eq!(gamma_fn(2.5), 0.75 * sp, max_relative = 1e-15);
        assert_relative_eq!(gamma_fn(-1.5), 4.0 * sp / 3.0, max_relative = 1e-15);
        assert_relative_eq!(gamma_fn(0.3), 2.991_568_987_687_590_6, max_relative = 1e-13);
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
    }

    #[test]
    fn scaled_examples() {
        let half = BesselOrder::new(0.5).unwrap();
        assert!((scaled_bessel(half, 0.0).unwrap() - 0.797885).abs() < 1e-6);
        assert_eq!(scaled_bessel(BesselOrder::new(0.0).unwrap(), 0.0).unwrap(), 1.0);
        let nu = BesselOrder::new(1.5).unwrap();
        let direct = j(1.5, 2.0) / 2f64.powf(1.5);
        assert_relative_eq!(scaled_bessel(nu, 2.0).unwrap(), direct, max_relative = 1e-12);
    }

    #[test]
    fn scaled_origin_negative_orders() {
        let c = (2.0 / PI).sqrt();
        let at = |nu: f64| scaled_bessel(BesselOrder::new(nu).unwrap(), 0.0).unwrap();
        assert_relative_eq!(at(-0.5), c, max_relative = 1e-14);
        assert_relative_eq!(at(-1.5), -c, max_relative = 1e-14);
        assert_relative_eq!(at(-2.5), 3.0 * c, max_relative = 1e-14);
        assert_eq!(at(-1.0), 0.0);
        assert_eq!(at(-2.0), 0.0);
    }

    #[test]
    fn scaled_is_continuous_across_switch() {
        for nu in [-2.5, -2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 3.0] {
            let o = BesselOrder::new(nu).unwrap();
            let below = scaled_bessel(o, SCALED_SERIES_SWITCH - 1e-18).unwrap();
            let above = scaled_bessel(o, SCALED_SERIES_SWITCH).unwrap();
            let scale = below.abs().max(scaled_bessel(o, 0.0).unwrap().abs()).max(1e-6);
            assert!((below - above).abs() <= 1e-12 * scale, "nu={nu}: {below} vs {above}");
        }
    }

    fn order() -> impl Strategy<Value = f64> {
        prop_oneof![(-5i32..=8).prop_map(|k| k as f64 / 2.0), -3.0f64..6.0]
    }

    proptest! {
        #[test]
        fn first_recurrence(nu in order(), z in 0.05f64..50.0) {
            let lhs = j(nu, z);
            let rhs = 2.0 * (nu + 1.0) / z * j(nu + 1.0, z) - j(nu + 2.0, z);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
        }

        #[test]
        fn second_recurrence(nu in order(), z in 0.05f64..50.0) {
            let lhs = j(nu, z);
            let rhs = ((4.0 * (nu + 1.0) * (nu + 2.0) - z * z) * j(nu + 2.0, z)
                - 2.0 * z * (nu + 1.0) * j(nu + 3.0, z)) / (z * z);
            prop_assert!((lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0));
        }

        #[test]
        fn derivative_identity(nu in order(), z in 0.2f64..50.0) {
            let f = |x: f64| j(nu, x) * x.powf(-nu);
            let h = 1e-5 * z.max(1.0);
            let fd = (f(z + h) - f(z - h)) / (2.0 * h);
            let want = -z.powf(-nu) * j(nu + 1.0, z);
            prop_assert!((fd - want).abs() <= 1e-6 * want.abs().max(f(z).abs()).max(1e-8));
        }

        #[test]
        fn scaled_matches_direct(nu in order(), z in 0.01f64..40.0) {
            let o = BesselOrder::new(nu).unwrap();
            let direct = j(nu, z) / z.powf(nu);
            prop_assert!((scaled_bessel(o, z).unwrap() - direct).abs() <= 1e-12 * direct.abs().max(1e-300));
        }
    }
}
