//! Building a run configuration in code, evaluating it and comparing two
//! methods, the same path the `semiodm` binary takes.

use semiodm::cli::config::{apply_override, Method, RunConfig};
use semiodm::cli::run::{difference, evaluate};
use serde_json::json;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut tree = json!({
        "context": { "d": 1, "mu": 20.5 },
        "potential": { "kind": "harmonic", "omega": 1.0 },
        "method": "gvodm",
        "grid": {
            "mode": "symmetric-points",
            "first": [{ "min": 0.0, "max": 0.0, "count": 1 }],
            "second": [{ "min": 0.1, "max": 1.0, "count": 4 }]
        }
    });
    apply_override(&mut tree, "context.mu=40.5")?;
    let cfg = RunConfig::from_tree(tree)?;

    let gv = evaluate(&cfg, Method::Gvodm, false)?;
    let ex = evaluate(&cfg, Method::Exact, false)?;
    for (a, b) in gv.iter().zip(&ex) {
        let (x, y) = (a.values.unwrap()[3].unwrap(), b.values.unwrap()[3].unwrap());
        println!("R = {:>4}, s = {:>4}: gvodm {x:.8}  exact {y:.8}", a.coords[0], a.coords[1]);
    }
    let (_, summary) =
        difference(&gv, &evaluate(&cfg, Method::WkSymmetric, false)?, [Method::Gvodm, Method::WkSymmetric]);
    println!("\ngvodm vs wk-symmetric: max relative difference {:.2e}", summary.max_relative);
    Ok(())
}
