//! Compares FPP, C-PPP and LS-HiPPP at one aggregate converter rating.
//!
//! ```bash
//! cargo run --release -p hippp --example compare_architectures -- 0.15 0.2
//! ```
//! Arguments: rating budget R̂_p (default 0.15) and heterogeneity σ̂_p
//! (default 0.2).

use hippp::evaluate::{sweep_rating, EvalSettings};
use hippp::{ArchitectureKind, BatterySupply};

fn main() -> hippp::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<f64>().expect("numeric argument"));
    let budget = args.next().unwrap_or(0.15);
    let sigma = args.next().unwrap_or(0.2);

    let supply = BatterySupply::new(1.0, sigma, 9)?;
    let settings = EvalSettings::default();
    let records = sweep_rating(&ArchitectureKind::ALL, &supply, &[budget], &settings)?;

    println!("N = 9, σ̂ = {sigma}, R̂ = {budget}, {} trials, η_conv = {}", settings.trials, settings.converter_efficiency);
    println!("{:<8} {:>10} {:>10} {:>10} {:>10}", "arch", "rating", "util", "P̂_proc", "η_sys");
    for r in &records {
        println!(
            "{:<8} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            r.kind.to_string(),
            r.rating_norm,
            r.utilization,
            r.processed_norm,
            r.system_efficiency
        );
    }
    Ok(())
}
