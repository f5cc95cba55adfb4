//! Local Fermi wavenumber and its gradients for a few potentials.

use semiodm::fermi::{sample_default, z_of, FermiContext};
use semiodm::potential::{Differentiation, Potential};

fn main() -> semiodm::Result<()> {
    let ctx = FermiContext::new(2, 1.0, 1.0, 4.0, 2)?;
    let potentials = [
        ("harmonic", Potential::harmonic(1.0, 1.0)?),
        ("anisotropic", Potential::anisotropic_harmonic(1.0, vec![1.0, 1.7])?),
        ("gaussian well", Potential::gaussian_well(-3.0, 1.5)?),
        ("quartic (finite differences)", Potential::quartic(0.2)?.with_differentiation(Differentiation::central())?),
    ];
    let r = [0.6, -0.4];
    for (name, v) in &potentials {
        let f = sample_default(&ctx, v, &r)?;
        println!("{name}");
        println!("  k_F           = {:.12}", f.kf);
        println!("  grad k_F^2    = [{:.10}, {:.10}]", f.grad_kf2[0], f.grad_kf2[1]);
        println!("  lap k_F^2     = {:.10}", f.lap_kf2);
        println!("  z at s=(0.3,0)= {:.10}", z_of(&f, &[0.3, 0.0]));
    }

    // outside the classically allowed region the field is undefined
    let err = sample_default(&ctx, &potentials[0].1, &[3.0, 0.0]).unwrap_err();
    println!("\nat r = (3, 0): {err}");
    Ok(())
}
