//! Numerical checks of the r- versus (R, s)-gradient relations.

use semiodm::odm::SymmetricPoint;
use semiodm::potential::Potential;
use semiodm::symmetry::{check_gradient_identities, check_taylor_v, taylor_v, IdentityOptions};

fn main() -> semiodm::Result<()> {
    let v = Potential::gaussian_well(-3.0, 1.5)?;
    let points = vec![
        SymmetricPoint::new(vec![0.3, -0.2], vec![0.4, 0.1])?,
        SymmetricPoint::new(vec![-1.1, 0.7], vec![-0.2, 0.5])?,
        SymmetricPoint::new(vec![0.9, 1.2], vec![0.05, -0.3])?,
    ];
    let mut reports = check_gradient_identities(&v, &points);
    reports.push(check_taylor_v(&v, &points, &IdentityOptions::default()));
    for r in &reports {
        let slope = r.fitted_slope.map(|s| format!(" slope {s:.3}")).unwrap_or_default();
        println!(
            "[{}] {:<62} residual {:.3e}{slope}",
            if r.passed { "ok" } else { "FAIL" },
            r.name,
            r.max_abs_residual
        );
    }

    let exact = v.eval(&[0.3 + 0.2, -0.2 + 0.05])?;
    let approx = taylor_v(&v, &[0.3, -0.2], &[0.4, 0.1])?;
    println!("\nV(R + s/2) = {exact:.12}, second-order Taylor = {approx:.12}");
    Ok(())
}
