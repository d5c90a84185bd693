//! Utilization of every architecture as battery spread grows, at a fixed budget.
//!
//! ```bash
//! cargo run --release -p hippp --example heterogeneity_sweep -- 0.2
//! ```

use hippp::evaluate::{sweep_heterogeneity, EvalSettings};
use hippp::ArchitectureKind;

fn main() -> hippp::Result<()> {
    let budget: f64 = std::env::args().nth(1).map_or(0.15, |a| a.parse().expect("rating budget"));
    let sigmas = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
    let records = sweep_heterogeneity(&ArchitectureKind::ALL, 1.0, 9, &sigmas, budget, &EvalSettings::default())?;

    print!("{:<8}", "σ̂");
    for s in sigmas {
        print!("{s:>8.2}");
    }
    println!();
    for chunk in records.chunks(sigmas.len()) {
        print!("{:<8}", chunk[0].kind.as_str());
        for r in chunk {
            print!("{:>8.4}", r.utilization);
        }
        println!();
    }
    Ok(())
}
