//! Exhaustive Layer-1 placement on the expected set.
//!
//! ```bash
//! cargo run --release -p hippp --example design_layer1 -- 3 2
//! ```
//! Arguments: number of Layer-1 converters M and rating sets K.

use hippp::design::{design_layer1, interconnection_count};
use hippp::powerflow::layer1_design_lp;
use hippp::supply::flatten;
use hippp::{BatterySupply, DesignConfig};

fn main() -> hippp::Result<()> {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let m = args.next().unwrap_or(3);
    let k = args.next().unwrap_or(2);

    let expected = flatten(&BatterySupply::new(1.0, 0.2, 9)?)?;
    let cfg = DesignConfig {
        num_layer1: m,
        num_rating_sets: k,
        ..DesignConfig::default()
    };
    println!("{} candidate interconnections", interconnection_count(9, m));
    let design = design_layer1(&expected, &cfg)?;

    for (e, p) in design.edges.iter().zip(&design.processed_at_design) {
        println!("  {} <-> {}  p* {p:.5}  rating {:.5}", e.from_battery, e.to_battery, e.rating);
    }
    let edges: Vec<_> = design.edges.iter().map(|e| (e.from_battery, e.to_battery)).collect();
    let (_, out) = layer1_design_lp(expected.capabilities(), &edges)?;
    println!(
        "expected-set utilization {:.5}, Σ rating {:.5} over {} distinct values",
        out / expected.intrinsic_power(),
        design.total_rating(),
        design.distinct_ratings()
    );
    Ok(())
}
