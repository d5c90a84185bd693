//! Monte Carlo utilization against the Layer-2 rating.

use hippp::design::{design_layer1, design_layer2};
use hippp::supply::flatten;
use hippp::{BatterySupply, DesignConfig};

fn main() -> hippp::Result<()> {
    let supply = BatterySupply::new(1.0, 0.2, 9)?;
    let cfg = DesignConfig::default();
    let layer1 = design_layer1(&flatten(&supply)?, &cfg)?;
    let curve = design_layer2(&layer1, &supply, &cfg)?;

    println!("{} trials per rating, seed {}", cfg.monte_carlo_trials, cfg.base_seed);
    for (r, u) in &curve.points {
        let bar = "#".repeat((u * 50.0).round() as usize);
        println!("{r:>6.3}  {u:.4}  {bar}");
    }
    if let Some((r, u)) = curve.first_reaching(0.99) {
        println!("utilization {u:.4} first reached at Layer-2 rating {r}");
    }
    Ok(())
}
