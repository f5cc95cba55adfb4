//! Real-order Bessel functions and the scaled kernels S_nu(z) = J_nu(z)/z^nu.

use semiodm::special::{bessel_j, scaled_bessel, scaled_bessel_at_origin, BesselOrder};

fn main() -> semiodm::Result<()> {
    println!("{:>6} {:>8} {:>22} {:>22}", "nu", "z", "J_nu(z)", "S_nu(z)");
    for nu in [-2.5, -1.5, -0.5, 0.0, 0.5, 1.0, 1.5, 3.0] {
        let order = BesselOrder::new(nu)?;
        for z in [0.5, 5.0, 25.0] {
            println!("{nu:>6} {z:>8} {:>22.15e} {:>22.15e}", bessel_j(order, z)?, scaled_bessel(order, z)?);
        }
    }

    // the scaled kernel is finite at the origin for every order
    println!();
    for nu in [-2.5, -1.0, 0.5, 1.5] {
        let order = BesselOrder::new(nu)?;
        println!(
            "S_{nu}(0) = {:.15e}, S_{nu}(1e-6) = {:.15e}",
            scaled_bessel_at_origin(order),
            scaled_bessel(order, 1e-6)?
        );
    }

    // out-of-range orders are rejected
    println!("\nBesselOrder::new(70.0) -> {:?}", BesselOrder::new(70.0).err());
    Ok(())
}
