//! Utilization against processed power and efficiency as the budget grows.

use hippp::evaluate::{first_reaching, tradeoff_frontier, EvalSettings};
use hippp::{ArchitectureKind, BatterySupply};

fn main() -> hippp::Result<()> {
    let supply = BatterySupply::new(1.0, 0.2, 9)?;
    let grid: Vec<f64> = (1..=12).map(|k| k as f64 * 0.05).collect();
    let settings = EvalSettings::default();

    for kind in [ArchitectureKind::Cppp, ArchitectureKind::LsHippp] {
        let points = tradeoff_frontier(kind, &supply, &grid, &settings)?;
        println!("{kind}");
        println!("  {:>6} {:>8} {:>8} {:>8}", "R̂", "util", "P̂_proc", "η_sys");
        for p in &points {
            println!(
                "  {:>6.2} {:>8.4} {:>8.4} {:>8.4}",
                p.rating_norm, p.utilization, p.processed_norm, p.system_efficiency
            );
        }
        match first_reaching(&points, 0.99) {
            Some(p) => println!("  reaches 0.99 at R̂ = {:.2} processing {:.4}", p.rating_norm, p.processed_norm),
            None => println!("  never reaches 0.99 on this grid"),
        }
    }
    Ok(())
}
