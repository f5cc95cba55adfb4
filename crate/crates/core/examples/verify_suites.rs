//! Runs every verification suite and prints a one-line summary per check.

fn main() -> semiodm::Result<()> {
    for name in semiodm::suites::SUITES {
        for r in semiodm::suites::run(name)? {
            println!(
                "{:<11} [{}] {:<70} {:.3e} (tol {:.0e})",
                name,
                if r.passed { "ok" } else { "FAIL" },
                r.name,
                r.max_abs_residual,
                r.tolerance
            );
        }
    }
    Ok(())
}
