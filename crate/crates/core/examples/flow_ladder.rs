//! Operating point of one concrete string under C-PPP and LS-HiPPP.

use hippp::architecture::cppp_from_budget;
use hippp::design::{design_layer1, lshippp_from_budget};
use hippp::powerflow::optimal_flow;
use hippp::supply::{flatten, sample_against};
use hippp::{Architecture, BatterySupply, DesignConfig};

fn show(name: &str, caps: &[f64], arch: &Architecture) -> hippp::Result<()> {
    let sol = optimal_flow(caps, arch)?;
    println!(
        "{name}: I = {:.4}, P_out = {:.4}, processed = {:.4}, utilization = {:.4}",
        sol.string_current,
        sol.output_power,
        sol.processed_power,
        sol.utilization(caps)
    );
    for (e, f) in arch.battery_edges().iter().zip(&sol.converter_flows) {
        if f.abs() > 1e-9 {
            println!("  {} -> {}  {f:+.4}  (rating {:.4})", e.from_battery, e.to_battery, e.rating);
        }
    }
    Ok(())
}

fn main() -> hippp::Result<()> {
    let supply = BatterySupply::new(1.0, 0.2, 9)?;
    let expected = flatten(&supply)?;
    let sample = sample_against(&supply, &expected, 42)?;
    println!("capabilities {:.3?}", sample.capabilities);

    let budget = 0.15;
    show("C-PPP", &sample.capabilities, &cppp_from_budget(budget, &expected)?)?;
    let layer1 = design_layer1(&expected, &DesignConfig::default())?;
    show("LS-HiPPP", &sample.capabilities, &lshippp_from_budget(budget, &layer1, &expected)?)?;
    Ok(())
}
