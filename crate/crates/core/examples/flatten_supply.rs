//! Expected battery set from a Gaussian supply.
//!
//! ```bash
//! cargo run -p hippp --example flatten_supply -- 9 0.2
//! ```

use hippp::supply::{equal_probability_bounds, flatten};
use hippp::BatterySupply;

fn main() -> hippp::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(9, |a| a.parse().expect("battery count"));
    let sigma: f64 = args.next().map_or(0.2, |a| a.parse().expect("heterogeneity"));

    let supply = BatterySupply::new(1.0, sigma, n)?;
    let set = flatten(&supply)?;
    let bounds = equal_probability_bounds(&supply, n);

    println!("slot  interval                 expected power");
    for (k, p) in set.capabilities().iter().enumerate() {
        println!("{k:>4}  [{:>8.4}, {:>8.4})  {p:.6}", bounds[k], bounds[k + 1]);
    }
    println!("P̄_I = {:.6}", set.intrinsic_power());
    Ok(())
}
