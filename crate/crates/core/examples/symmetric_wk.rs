//! The symmetric-coordinate Wigner–Kirkwood pieces and their sum, which
//! reproduces the GVODM.

use semiodm::bloch::{symmetric_wk_odm, symmetrized_pieces};
use semiodm::fermi::FermiContext;
use semiodm::odm::{gvodm_terms, SymmetricPoint};
use semiodm::potential::Potential;

fn main() -> semiodm::Result<()> {
    let ctx = FermiContext::natural(3, 2.0, 2)?;
    let v = Potential::anisotropic_harmonic(1.0, vec![0.8, 1.0, 1.3])?;
    let q = SymmetricPoint::new(vec![0.2, -0.3, 0.1], vec![0.5, 0.2, -0.4])?;

    let p = symmetrized_pieces(&ctx, &v, &q)?;
    println!("beta-power split of C0: {:.12e} {:.12e} {:.12e}", p.x_a, p.x_b, p.x_c);
    println!("first-order pieces:     {:.12e} {:.12e} {:.12e}", p.y_a, p.y_b, p.y_c);
    println!("second order:           {:.12e}", p.second);

    let wk = symmetric_wk_odm(&ctx, &v, &q)?;
    let gv = gvodm_terms(&ctx, &v, &q)?;
    for (k, (a, b)) in wk.orders().iter().zip(gv.orders()).enumerate() {
        println!("order {k}: wk {a:.15e}  gvodm {b:.15e}  diff {:.1e}", (a - b).abs());
    }
    Ok(())
}
