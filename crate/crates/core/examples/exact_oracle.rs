//! Exact oscillator density matrix against the semiclassical kernels:
//! bulk densities, particle numbers and idempotency defects.

use semiodm::fermi::FermiContext;
use semiodm::odm::{gvodm_diagonal, thomas_fermi_density};
use semiodm::oracle::{
    bulk_window, exact_odm, idempotency_defect, particle_number, turning_point, IdempotencyGrid, ParticleDomain,
    SpectrumSpec,
};
use semiodm::potential::Potential;
use semiodm::suites::gvodm_kernel;

fn main() -> semiodm::Result<()> {
    let ctx = FermiContext::natural(1, 20.5, 1)?;
    let v = Potential::harmonic(1.0, 1.0)?;
    let spec = SpectrumSpec::harmonic_1d(&ctx, 1.0)?;
    println!("occupied levels: {}", spec.n_occupied);

    println!("\n{:>6} {:>12} {:>12} {:>12}", "x", "exact", "gvodm", "TF");
    for x in [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0] {
        println!(
            "{x:>6} {:>12.8} {:>12.8} {:>12.8}",
            exact_odm(&spec, &ctx, x, x)?,
            gvodm_diagonal(&ctx, &v, &[x])?,
            thomas_fermi_density(&ctx, &v, &[x])?
        );
    }

    let xt = turning_point(&ctx, 1.0);
    let (a, b) = bulk_window(&ctx, 1.0);
    println!("\nturning point {xt:.6}, bulk window [{a:.6}, {b:.6}]");
    let tf =
        particle_number(&|x| thomas_fermi_density(&ctx, &v, &[x]), &ParticleDomain::between_turning_points(-xt, xt))?;
    let exact = particle_number(&|x| exact_odm(&spec, &ctx, x, x), &ParticleDomain::regular(-2.0 * xt, 2.0 * xt))?;
    println!("particle number: TF {tf:.10}, exact {exact:.10}");

    let grid = IdempotencyGrid { lower: -2.0 * xt, upper: 2.0 * xt, nodes: 120 };
    let d = idempotency_defect(&|x, y| exact_odm(&spec, &ctx, x, y), &grid)?;
    println!("exact idempotency defect: {d:.3e}");
    for mu in [20.5, 40.5] {
        let c = FermiContext::natural(1, mu, 1)?;
        let grid = IdempotencyGrid { lower: -3.0, upper: 3.0, nodes: 96 };
        let d = idempotency_defect(&|x, y| gvodm_kernel(&c, &v, x, y), &grid)?;
        println!("gvodm idempotency defect on [-3, 3], mu = {mu}: {d:.4e}");
    }
    Ok(())
}
