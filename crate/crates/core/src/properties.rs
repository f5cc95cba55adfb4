//! Property tests for invariants that span modules.

use num_complex::Complex64;
use proptest::prelude::*;

use crate::bloch::{beta_power_pieces, laplace_route_odm, momentum_integral, symmetric_wk_odm, Orientation};
use crate::fermi::{sample_default, FermiContext};
use crate::odm::{gvodm_terms, kodm_terms, to_symmetric, PairPoint, SymmetricPoint};
use crate::oracle::{exact_odm, SpectrumSpec};
use crate::potential::{Differentiation, Potential};
use crate::special::{bessel_j, scaled_bessel, BesselOrder};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn potential(kind: u8, d: usize) -> Potential {
    match kind % 4 {
        0 => Potential::harmonic(1.1, 0.9).unwrap(),
        1 => Potential::anisotropic_harmonic(0.8, (0..d).map(|i| 0.7 + 0.3 * i as f64).collect()).unwrap(),
        2 => Potential::gaussian_well(-3.0, 1.5).unwrap(),
        _ => Potential::quartic(0.05).unwrap(),
    }
}

/// A pair point with both ends comfortably allowed for `mu = 6`.
fn pair(d: usize) -> impl Strategy<Value = PairPoint> {
    (prop::collection::vec(-1.2f64..1.2, d), prop::collection::vec(-1.0f64..1.0, d))
        .prop_filter("nonzero separation", |(_, s)| s.iter().map(|x| x * x).sum::<f64>() > 1e-4)
        .prop_map(|(r, s)| {
            let rp = r.iter().zip(&s).map(|(a, b)| a - b).collect();
            PairPoint::new(r, rp).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn second_recurrence(k in 0usize..14, z in 0.05f64..50.0) {
        let nu = -2.5 + 0.5 * k as f64;
        let j = |n: f64| bessel_j(BesselOrder::new(n).unwrap(), z).unwrap();
        let a = 4.0 * (nu + 1.0) * (nu + 2.0) - z * z;
        let b = 2.0 * z * (nu + 1.0);
        let scale = (z * z * j(nu).abs()).max((a * j(nu + 2.0)).abs() + (b * j(nu + 3.0)).abs()).max(z * z);
        prop_assert!((z * z * j(nu) - a * j(nu + 2.0) + b * j(nu + 3.0)).abs() <= 1e-11 * scale);
    }

    #[test]
    fn derivative_by_central_differences(k in 0usize..14, z in 0.5f64..50.0) {
        let nu = -2.5 + 0.5 * k as f64;
        let s = |n: f64, x: f64| scaled_bessel(BesselOrder::new(n).unwrap(), x).unwrap();
        // the kernels oscillate with unit period in z
        let h = 1e-4;
        let fd = (s(nu, z + h) - s(nu, z - h)) / (2.0 * h);
        let want = -z * s(nu + 1.0, z);
        let scale = want.abs().max(s(nu, z).abs() / z).max(1e-300);
        prop_assert!((fd - want).abs() <= 1e-6 * scale, "{fd} vs {want}");
    }

    #[test]
    fn hessian_symmetric(kind in 0u8..4, d in 1usize..=3, r in prop::collection::vec(-1.5f64..1.5, 3)) {
        let v = potential(kind, d);
        let r = &r[..d];
        let h = v.hessian(r).unwrap();
        prop_assert!((&h - h.transpose()).amax() <= 1e-12);
        let c = v.clone().with_differentiation(Differentiation::central()).unwrap().hessian(r).unwrap();
        prop_assert!((&c - c.transpose()).amax() <= 1e-8);
    }

    #[test]
    fn fermi_field_consistency(kind in 0u8..4, d in 1usize..=3, r in prop::collection::vec(-1.0f64..1.0, 3)) {
        let v = potential(kind, d);
        let r = &r[..d];
        let ctx = FermiContext::new(d, 1.3, 0.7, 6.0, 1).unwrap();
        let f = sample_default(&ctx, &v, r).unwrap();
        let g = v.gradient(r).unwrap();
        let resid = &f.grad_kf2 + g * (2.0 * ctx.m / (ctx.hbar * ctx.hbar));
        prop_assert!(resid.amax() <= 1e-12 * f.grad_kf2.amax().max(1.0));

        // doubling hbar halves k_F and quarters grad k_F^2
        let ctx2 = FermiContext::new(d, 2.6, 0.7, 6.0, 1).unwrap();
        let f2 = sample_default(&ctx2, &v, r).unwrap();
        prop_assert!(close(f2.kf, 0.5 * f.kf, 1e-14));
        prop_assert!((&f2.grad_kf2 * 4.0 - &f.grad_kf2).amax() <= 1e-13 * f.grad_kf2.amax().max(1e-300));
    }

    #[test]
    fn degeneracy_and_breakdown(kind in 0u8..4, p in pair(2)) {
        let v = potential(kind, 2);
        let one = FermiContext::natural(2, 6.0, 1).unwrap();
        let two = FermiContext::natural(2, 6.0, 2).unwrap();
        let q = to_symmetric(&p).unwrap();
        for (a, b) in [
            (kodm_terms(&one, &v, &p).unwrap(), kodm_terms(&two, &v, &p).unwrap()),
            (gvodm_terms(&one, &v, &q).unwrap(), gvodm_terms(&two, &v, &q).unwrap()),
        ] {
            for (x, y) in a.orders().iter().zip(b.orders()) {
                prop_assert!(close(2.0 * x, y, 1e-15) || (x == &0.0 && y == 0.0));
            }
            let sum: f64 = a.orders().iter().sum();
            prop_assert!((a.total - sum).abs() <= 1e-15 * a.orders().iter().map(|x| x.abs()).sum::<f64>());
        }
    }

    #[test]
    fn routes_agree(kind in 0u8..4, d in 1usize..=3, seed in prop::collection::vec(-1.0f64..1.0, 6)) {
        let v = potential(kind, d);
        let ctx = FermiContext::new(d, 0.9, 1.1, 6.0, 2).unwrap();
        let r: Vec<f64> = seed[..d].to_vec();
        let s: Vec<f64> = seed[3..3 + d].iter().map(|x| x + 0.05 * x.signum()).collect();
        let rp: Vec<f64> = r.iter().zip(&s).map(|(a, b)| a - b).collect();
        let p = PairPoint::new(r, rp).unwrap();
        let q = to_symmetric(&p).unwrap();
        let (a, b) = (laplace_route_odm(&ctx, &v, &p).unwrap(), kodm_terms(&ctx, &v, &p).unwrap());
        let (c, e) = (symmetric_wk_odm(&ctx, &v, &q).unwrap(), gvodm_terms(&ctx, &v, &q).unwrap());
        for k in 0..3 {
            let (ak, bk, ck, ek) = (a.orders()[k], b.orders()[k], c.orders()[k], e.orders()[k]);
            let scale = b.order0.abs();
            prop_assert!((ak - bk).abs() <= 1e-10 * bk.abs().max(1e-6 * scale), "order {k}: {ak} vs {bk}");
            prop_assert!((ck - ek).abs() <= 1e-10 * ek.abs().max(1e-6 * scale), "order {k}: {ck} vs {ek}");
        }
    }

    #[test]
    fn beta_powers(kind in 0u8..4, d in 1usize..=3, p in pair(3), beta in 0.05f64..2.0) {
        let v = potential(kind, d);
        let ctx = FermiContext::new(d, 1.0, 1.0, 6.0, 1).unwrap();
        let p = PairPoint::new(p.r[..d].to_vec(), p.r_prime[..d].to_vec()).unwrap();
        let a = beta_power_pieces(&ctx, &v, &p, beta).unwrap();
        let b = beta_power_pieces(&ctx, &v, &p, 2.0 * beta).unwrap();
        for ((x, n), (y, _)) in std::iter::once(a.c1).chain(a.c2).zip(std::iter::once(b.c1).chain(b.c2)) {
            if x.abs() > 1e-12 {
                prop_assert!(close(y / x, 2f64.powf(n), 1e-10), "exponent {n}: ratio {}", y / x);
            }
        }
    }

    #[test]
    fn momentum_reflection(d in 1usize..=3, s in prop::collection::vec(-1.0f64..1.0, 3), beta in 0.2f64..2.0) {
        let ctx = FermiContext::new(d, 1.0, 1.0, 2.0, 1).unwrap();
        let s = &s[..d];
        let f = |p: &[Complex64]| p.iter().enumerate().map(|(i, x)| x * (1.0 + i as f64)).sum::<Complex64>().powi(2) + p[0];
        let a = momentum_integral(&ctx, beta, s, 32, Orientation::Direct, f).unwrap();
        let b = momentum_integral(&ctx, beta, s, 32, Orientation::Reflected, f).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-12));
    }

    #[test]
    fn exact_oracle_symmetric(x in -6.0f64..6.0, y in -6.0f64..6.0, mu in 1.0f64..60.0) {
        let ctx = FermiContext::natural(1, mu, 2).unwrap();
        let spec = SpectrumSpec::harmonic_1d(&ctx, 1.0).unwrap();
        let a = exact_odm(&spec, &ctx, x, y).unwrap();
        let b = exact_odm(&spec, &ctx, y, x).unwrap();
        prop_assert!((a - b).abs() <= 1e-14 * a.abs().max(1.0));
    }

    #[test]
    fn gvodm_even(kind in 0u8..4, c in prop::collection::vec(-1.0f64..1.0, 2), s in prop::collection::vec(-1.0f64..1.0, 2)) {
        let v = potential(kind, 2);
        let ctx = FermiContext::natural(2, 6.0, 1).unwrap();
        let q = SymmetricPoint::new(c, s).unwrap();
        let x = crate::odm::gvodm_sum(&ctx, &v, &q).unwrap();
        let y = crate::odm::gvodm_sum(&ctx, &v, &q.reflected()).unwrap();
        prop_assert!((x - y).abs() <= 1e-14 * x.abs().max(1e-300));
    }
}
