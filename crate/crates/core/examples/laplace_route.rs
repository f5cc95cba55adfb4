//! KODM terms rebuilt from the Bloch density matrix: closed form, momentum
//! quadrature, analytic inverse Laplace transform and fixed-Talbot inversion.

use semiodm::bloch::{
    bloch_closed, bloch_quadrature, inverse_laplace_kernel, laplace_route_odm, numeric_bromwich_check, DEFAULT_NODES,
    DEFAULT_TALBOT_NODES,
};
use semiodm::fermi::FermiContext;
use semiodm::odm::{kodm_terms, PairPoint};
use semiodm::potential::Potential;

fn main() -> semiodm::Result<()> {
    let ctx = FermiContext::natural(2, 1.0, 2)?;
    let v = Potential::gaussian_well(-3.0, 1.5)?;
    let p = PairPoint::new(vec![0.4, -0.2], vec![-0.1, 0.3])?;

    for beta in [0.2, 0.7] {
        let c = bloch_closed(&ctx, &v, &p, beta)?;
        let q = bloch_quadrature(&ctx, &v, &p, beta, DEFAULT_NODES)?;
        println!("beta = {beta}");
        println!("  closed     C0 {:.14e} C1 {:.14e} C2 {:.14e}", c.c0, c.c1, c.c2);
        println!("  quadrature C0 {:.14e} C1 {:.14e} C2 {:.14e}", q.c0, q.c1, q.c2);
    }

    let route = laplace_route_odm(&ctx, &v, &p)?;
    let direct = kodm_terms(&ctx, &v, &p)?;
    println!("\nlaplace route {:?}", route.orders());
    println!("closed form   {:?}", direct.orders());
    for order in 0..3 {
        let talbot = numeric_bromwich_check(&ctx, &v, &p, order, DEFAULT_TALBOT_NODES)?;
        println!("talbot order {order}: {talbot:.12e}");
    }

    println!("\ninverse Laplace kernels at k_F = 2, |s| = 0.5:");
    for xi in [1.0, 0.0, -1.0, -2.0] {
        println!("  xi = {xi:>4}: {:.12e}", inverse_laplace_kernel(&ctx, 2.0, 0.5, xi)?);
    }
    Ok(())
}
