//! Pair-point KODM against the symmetric-coordinate GVODM, order by order,
//! and their difference as the separation shrinks.

use semiodm::fermi::FermiContext;
use semiodm::odm::{gvodm_diagonal, gvodm_sum, gvodm_terms, kodm_terms, to_pair, SymmetricPoint};
use semiodm::potential::Potential;

fn main() -> semiodm::Result<()> {
    let ctx = FermiContext::natural(1, 20.5, 1)?;
    let v = Potential::harmonic(1.0, 1.0)?;
    let center = 0.3;

    println!("{:>8} {:>12} {:>12} {:>12} {:>12} {:>12}", "s", "kodm", "gvodm", "gvodm_sum", "|diff|", "swap");
    for s in [1.0, 0.5, 0.1, 0.05, 0.01, 0.005, 0.001] {
        let q = SymmetricPoint::new(vec![center], vec![s])?;
        let p = to_pair(&q)?;
        let k = kodm_terms(&ctx, &v, &p)?;
        let g = gvodm_terms(&ctx, &v, &q)?;
        let swap = (k.total - kodm_terms(&ctx, &v, &p.swapped())?.total).abs();
        println!(
            "{s:>8} {:>12.8} {:>12.8} {:>12.8} {:>12.3e} {:>12.3e}",
            k.total,
            g.total,
            gvodm_sum(&ctx, &v, &q)?,
            (k.total - g.total).abs(),
            swap
        );
    }

    let q = SymmetricPoint::new(vec![center], vec![0.4])?;
    let g = gvodm_terms(&ctx, &v, &q)?;
    println!("\norders at R = {center}, s = 0.4: {:?}", g.orders());
    println!("density at R: {:.12}", gvodm_diagonal(&ctx, &v, &[center])?);
    Ok(())
}
