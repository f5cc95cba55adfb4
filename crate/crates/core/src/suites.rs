//! Named verification suites. Each returns one [`IdentityReport`] per check;
//! the `verify` subcommand prints them and exits nonzero if any fails.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bloch::{laplace_route_odm, numeric_bromwich_check, symmetric_wk_odm, DEFAULT_TALBOT_NODES};
use crate::error::{Error, Result};
use crate::fermi::{sample_default, FermiContext};
use crate::odm::{
    gvodm_diagonal, gvodm_sum, gvodm_terms, kodm_terms, thomas_fermi_density, to_symmetric, OdmBreakdown, PairPoint,
    SymmetricPoint,
};
use crate::oracle::{
    exact_odm, idempotency_defect, particle_number, turning_point, IdempotencyGrid, ParticleDomain, SpectrumSpec,
};
use crate::potential::Potential;
use crate::quadrature::gauss_legendre;
use crate::special::{scaled_bessel, BesselOrder};
use crate::symmetry::{
    check_gradient_identities, check_taylor_v, loglog_slope, logspace, IdentityOptions, IdentityReport,
};

pub const SUITES: [&str; 6] = ["bessel", "gradients", "laplace", "symmetrize", "hermiticity", "oracle"];

/// Seed of the random point sets.
pub const SEED: u64 = 20_240_917;

/// Runs a suite by name; `"all"` runs every suite in order.
pub fn run(name: &str) -> Result<Vec<IdentityReport>> {
    match name {
        "bessel" => Ok(bessel()),
        "gradients" => gradients(),
        "laplace" => laplace(),
        "symmetrize" => symmetrize(),
        "hermiticity" => hermiticity(),
        "oracle" => oracle(),
        "all" => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(run(s)?);
            }
            Ok(out)
        }
        other => Err(Error::InvalidParameter(format!(
            "unknown suite {other:?}; expected one of {} or all",
            SUITES.join(", ")
        ))),
    }
}

/// Orders `-5/2, -2, ..., 4`.
pub fn bessel_orders() -> Vec<f64> {
    (0..=13).map(|k| -2.5 + 0.5 * k as f64).collect()
}

/// 200 equispaced arguments in `(0, 50]`.
pub fn bessel_arguments() -> Vec<f64> {
    (1..=200).map(|i| 0.25 * i as f64).collect()
}

fn s_nu(nu: f64, z: f64) -> f64 {
    scaled_bessel(BesselOrder::new(nu).unwrap(), z).unwrap()
}

fn j_nu(nu: f64, z: f64) -> f64 {
    s_nu(nu, z) * z.powf(nu)
}

/// Both three-term recurrences and the derivative identity
/// `d/dz S_nu = -z S_{nu+1}` (checked in integrated form between
/// neighbouring sample points with 20-node Gauss–Legendre).
pub fn bessel() -> Vec<IdentityReport> {
    let orders = bessel_orders();
    let zs = bessel_arguments();
    let rule = gauss_legendre(20);
    let (mut r1, mut r2, mut r3) = (0.0f64, 0.0f64, 0.0f64);
    for &nu in &orders {
        let mut prev = 0.0;
        for &z in &zs {
            let j = [0, 1, 2, 3].map(|k| j_nu(nu + k as f64, z));
            let rhs = 2.0 * (nu + 1.0) / z * j[1] - j[2];
            r1 = r1.max((j[0] - rhs).abs() / j[0].abs().max(1.0));

            // multiplied through by z^2 and scaled by the size of the terms
            let a = 4.0 * (nu + 1.0) * (nu + 2.0) - z * z;
            let b = 2.0 * z * (nu + 1.0);
            let scale = (z * z * j[0].abs()).max((a * j[2]).abs() + (b * j[3]).abs()).max(z * z);
            r2 = r2.max((z * z * j[0] - (a * j[2] - b * j[3])).abs() / scale);

            let m = rule.mapped(prev, z);
            let (int, mag) = m.nodes.iter().zip(&m.weights).fold((0.0, 0.0), |(s, t), (&x, &w)| {
                let f = x * s_nu(nu + 1.0, x);
                (s + w * f, t + w * f.abs())
            });
            let (lo, hi) = (s_nu(nu, prev), s_nu(nu, z));
            let scale = lo.abs().max(hi.abs()).max(mag).max(1.0);
            r3 = r3.max((hi - lo + int).abs() / scale);
            prev = z;
        }
    }
    let n = orders.len() * zs.len();
    vec![
        IdentityReport::new("J_nu = 2(nu+1)/z J_{nu+1} - J_{nu+2}", r1, n, 1e-11),
        IdentityReport::new("z^2 J_nu = (4(nu+1)(nu+2) - z^2) J_{nu+2} - 2z(nu+1) J_{nu+3}", r2, n, 1e-11),
        IdentityReport::new("d/dz S_nu = -z S_{nu+1}", r3, n, 1e-11),
    ]
}

/// `mu = 20.5` oscillator in natural units.
pub fn oscillator_setup(mu: f64) -> (FermiContext, Potential) {
    (FermiContext::natural(1, mu, 1).unwrap(), Potential::harmonic(1.0, 1.0).unwrap())
}

/// Two-dimensional Gaussian well with `V < mu` everywhere.
pub fn well_setup() -> (FermiContext, Potential) {
    (FermiContext::natural(2, 1.0, 2).unwrap(), Potential::gaussian_well(-3.0, 1.5).unwrap())
}

/// `n` random pair points with both ends well inside the allowed region and
/// `k_F(r) |s| <= z_max`.
pub fn random_pairs(ctx: &FermiContext, v: &Potential, n: usize, seed: u64, z_max: f64) -> Vec<PairPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r: Vec<f64> = (0..ctx.d).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let s: Vec<f64> = (0..ctx.d).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let rp: Vec<f64> = r.iter().zip(&s).map(|(a, b)| a - b).collect();
        let ok = |x: &[f64]| v.eval(x).map(|e| e < ctx.mu - 0.05 * ctx.mu.abs()).unwrap_or(false);
        if !(ok(&r) && ok(&rp)) {
            continue;
        }
        let kf = sample_default(ctx, v, &r).unwrap().kf;
        if kf * s.iter().map(|x| x * x).sum::<f64>().sqrt() > z_max {
            continue;
        }
        out.push(PairPoint::new(r, rp).unwrap());
    }
    out
}

fn relative(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Largest order-by-order relative difference.
pub fn max_relative_by_order(a: &OdmBreakdown, b: &OdmBreakdown) -> f64 {
    a.orders().iter().zip(b.orders()).map(|(x, y)| relative(*x, y)).fold(0.0, f64::max)
}

fn compare_sets(
    name: &str,
    sets: &[(FermiContext, Potential, Vec<PairPoint>)],
    tol: f64,
    f: impl Fn(&FermiContext, &Potential, &PairPoint) -> Result<(OdmBreakdown, OdmBreakdown)>,
) -> Result<IdentityReport> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (ctx, v, pts) in sets {
        for p in pts {
            let (a, b) = f(ctx, v, p)?;
            worst = worst.max(max_relative_by_order(&a, &b));
            n += 1;
        }
    }
    Ok(IdentityReport::new(name, worst, n, tol))
}

fn point_sets() -> Vec<(FermiContext, Potential, Vec<PairPoint>)> {
    let (c1, v1) = oscillator_setup(20.5);
    let (c2, v2) = well_setup();
    let p1 = random_pairs(&c1, &v1, 200, SEED, f64::INFINITY);
    let p2 = random_pairs(&c2, &v2, 200, SEED + 1, f64::INFINITY);
    vec![(c1, v1, p1), (c2, v2, p2)]
}

fn gaussian_points(n: usize, seed: u64) -> Vec<SymmetricPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let c: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let s: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..1.0)).collect();
            SymmetricPoint::new(c, s).unwrap()
        })
        .collect()
}

/// Gradient identities on 100 random points of the Gaussian well, plus the
/// Taylor residual of `V(R + s/2)`.
pub fn gradients() -> Result<Vec<IdentityReport>> {
    let (_, v) = well_setup();
    let pts = gaussian_points(100, SEED + 2);
    let mut out = check_gradient_identities(&v, &pts);
    out.push(check_taylor_v(&v, &pts, &IdentityOptions::default()));
    Ok(out)
}

/// Laplace-route vs closed-form KODM, and fixed-Talbot inversion vs the
/// analytic zeroth order.
pub fn laplace() -> Result<Vec<IdentityReport>> {
    let sets = point_sets();
    let route = compare_sets("laplace route = kodm (order by order)", &sets, 1e-10, |c, v, p| {
        Ok((laplace_route_odm(c, v, p)?, kodm_terms(c, v, p)?))
    })?;

    let (ctx, v) = oscillator_setup(20.5);
    let pts = random_pairs(&ctx, &v, 20, SEED + 3, 20.0);
    let mut worst = 0.0f64;
    for p in &pts {
        let numeric = numeric_bromwich_check(&ctx, &v, p, 0, DEFAULT_TALBOT_NODES)?;
        worst = worst.max(relative(numeric, kodm_terms(&ctx, &v, p)?.order0));
    }
    let talbot = IdentityReport::new("talbot inversion = A0", worst, pts.len(), 1e-7);
    Ok(vec![route, talbot])
}

fn separations() -> Vec<f64> {
    logspace(1e-3, 1e-1, 9)
}

/// Symmetric Wigner–Kirkwood vs GVODM, and the order of
/// `|kodm(r, r') - gvodm(R, s)|` in `|s|` (claimed 3).
pub fn symmetrize() -> Result<Vec<IdentityReport>> {
    let sets = point_sets();
    let equal = compare_sets("symmetric wk = gvodm (order by order)", &sets, 1e-10, |c, v, p| {
        let q = to_symmetric(p)?;
        Ok((symmetric_wk_odm(c, v, &q)?, gvodm_terms(c, v, &q)?))
    })?;
    let (ctx, v) = oscillator_setup(20.5);
    let ss = separations();
    let diffs: Result<Vec<f64>> = ss
        .iter()
        .map(|&s| {
            let q = SymmetricPoint::new(vec![0.3], vec![s])?;
            let p = crate::odm::to_pair(&q)?;
            Ok((kodm_terms(&ctx, &v, &p)?.total - gvodm_terms(&ctx, &v, &q)?.total).abs())
        })
        .collect();
    let slope = loglog_slope(&ss, &diffs?);
    let order = IdentityReport::slope("|kodm - gvodm| = O(s^3)", slope, 3.0, ss.len())
        .with_detail("1D oscillator, mu = 20.5, R = 0.3, |s| in [1e-3, 1e-1]");
    Ok(vec![equal, order])
}

/// Evenness of the GVODM in `s` and the order of the KODM swap defect.
pub fn hermiticity() -> Result<Vec<IdentityReport>> {
    let mut worst = 0.0f64;
    let mut n = 0;
    for (ctx, v, pts) in point_sets() {
        for p in pts {
            let q = to_symmetric(&p)?;
            let a = gvodm_sum(&ctx, &v, &q)?;
            let b = gvodm_sum(&ctx, &v, &q.reflected())?;
            worst = worst.max(relative(a, b));
            n += 1;
        }
    }
    let even = IdentityReport::new("gvodm(R, s) = gvodm(R, -s)", worst, n, 1e-14);

    let (ctx, v) = oscillator_setup(20.5);
    let ss = separations();
    let defects: Result<Vec<f64>> = ss
        .iter()
        .map(|&s| {
            let p = crate::odm::to_pair(&SymmetricPoint::new(vec![0.3], vec![s])?)?;
            Ok((kodm_terms(&ctx, &v, &p)?.total - kodm_terms(&ctx, &v, &p.swapped())?.total).abs())
        })
        .collect();
    let slope = loglog_slope(&ss, &defects?);
    let swap = IdentityReport::slope("|kodm(r, r') - kodm(r', r)| = O(s^3)", slope, 3.0, ss.len())
        .with_detail("1D oscillator, mu = 20.5, R = 0.3, |s| in [1e-3, 1e-1]");
    Ok(vec![even, swap])
}

/// Largest relative error of a diagonal against the exact density on `|x| <= 2`.
pub fn diagonal_error(ctx: &FermiContext, f: &dyn Fn(f64) -> Result<f64>) -> Result<f64> {
    let spec = SpectrumSpec::harmonic_1d(ctx, 1.0)?;
    let mut worst = 0.0f64;
    for i in 0..=80 {
        let x = -2.0 + 0.05 * i as f64;
        let exact = exact_odm(&spec, ctx, x, x)?;
        worst = worst.max((f(x)? - exact).abs() / exact.abs());
    }
    Ok(worst)
}

/// `max_{|s| <= 1} |gvodm_sum(0, s) - exact(s/2, -s/2)| / exact(0, 0)`.
pub fn off_diagonal_error(ctx: &FermiContext, v: &Potential) -> Result<f64> {
    let spec = SpectrumSpec::harmonic_1d(ctx, 1.0)?;
    let peak = exact_odm(&spec, ctx, 0.0, 0.0)?;
    let mut worst = 0.0f64;
    for i in 0..=80 {
        let s = -1.0 + 0.025 * i as f64;
        let approx = if s == 0.0 {
            gvodm_diagonal(ctx, v, &[0.0])?
        } else {
            gvodm_sum(ctx, v, &SymmetricPoint::new(vec![0.0], vec![s])?)?
        };
        worst = worst.max((approx - exact_odm(&spec, ctx, 0.5 * s, -0.5 * s)?).abs() / peak);
    }
    Ok(worst)
}

/// GVODM as a two-point kernel, using the diagonal limit at `x = x'`.
pub fn gvodm_kernel(ctx: &FermiContext, v: &Potential, x: f64, y: f64) -> Result<f64> {
    if x == y {
        gvodm_diagonal(ctx, v, &[x])
    } else {
        gvodm_sum(ctx, v, &SymmetricPoint::new(vec![0.5 * (x + y)], vec![x - y])?)
    }
}

/// Window and node count of the GVODM idempotency comparison.
pub const BULK_GRID: IdempotencyGrid = IdempotencyGrid { lower: -3.0, upper: 3.0, nodes: 96 };

/// Bulk agreement, particle numbers and idempotency for the oscillator.
pub fn oracle() -> Result<Vec<IdentityReport>> {
    let (ctx, v) = oscillator_setup(20.5);
    let gv = diagonal_error(&ctx, &|x| gvodm_diagonal(&ctx, &v, &[x]))?;
    let tf = diagonal_error(&ctx, &|x| thomas_fermi_density(&ctx, &v, &[x]))?;
    let mut bulk = IdentityReport::new("gvodm diagonal vs exact, |x| <= 2", gv, 81, 2e-2)
        .with_detail(format!("thomas-fermi error {tf:.3e}"));
    bulk.passed &= gv < tf;
    let off =
        IdentityReport::new("gvodm off-diagonal vs exact, R = 0, |s| <= 1", off_diagonal_error(&ctx, &v)?, 81, 5e-2);

    let x = turning_point(&ctx, 1.0);
    let tf_count =
        particle_number(&|y| thomas_fermi_density(&ctx, &v, &[y]), &ParticleDomain::between_turning_points(-x, x))?;
    let spec = SpectrumSpec::harmonic_1d(&ctx, 1.0)?;
    let exact = |a: f64, b: f64| exact_odm(&spec, &ctx, a, b);
    let exact_count = particle_number(&|y| exact(y, y), &ParticleDomain::regular(-2.0 * x, 2.0 * x))?;

    let ideal = idempotency_defect(&exact, &IdempotencyGrid { lower: -2.0 * x, upper: 2.0 * x, nodes: 120 })?;
    let (hi, vh) = oscillator_setup(40.5);
    let d_lo = idempotency_defect(&|a, b| gvodm_kernel(&ctx, &v, a, b), &BULK_GRID)?;
    let d_hi = idempotency_defect(&|a, b| gvodm_kernel(&hi, &vh, a, b), &BULK_GRID)?;
    let mut shrink =
        IdentityReport::new("gvodm idempotency defect(mu=40.5) < defect(mu=20.5), |x| <= 3", d_hi / d_lo, 2, 1.0)
            .with_detail(format!("defects {d_hi:.4e} (mu=40.5), {d_lo:.4e} (mu=20.5)"));
    shrink.passed = d_hi < d_lo;

    Ok(vec![
        bulk,
        off,
        IdentityReport::new("thomas-fermi particle number = 20.5", (tf_count - 20.5).abs(), 1, 1e-6),
        IdentityReport::new("exact particle number = 20", (exact_count - 20.0).abs(), 1, 1e-6),
        IdentityReport::new("exact idempotency defect", ideal, 120 * 120, 1e-7),
        shrink,
    ])
}
