//! All four protocols over a 20-seed ensemble on the default field.

use wsn_lifesim::{run_ensemble, NetworkConfig, Protocol};

fn main() -> wsn_lifesim::Result<()> {
    let seeds: Vec<u64> = (1..=20).collect();
    println!("{:<9} {:>8} {:>8} {:>8}", "protocol", "FND", "HND", "LND");
    let mut leach_fnd = None;
    for protocol in Protocol::ALL {
        let cfg = NetworkConfig {
            protocol,
            ..NetworkConfig::default()
        };
        let e = run_ensemble(&cfg, &seeds)?;
        println!(
            "{protocol:<9} {:>8.1} {:>8.1} {:>8.1}",
            e.fnd.median, e.hnd.median, e.lnd.median
        );
        match leach_fnd {
            None => leach_fnd = Some(e.fnd.median),
            Some(base) => println!(
                "{:>9} FND {:+.0}% vs leach",
                "",
                100.0 * (e.fnd.median / base - 1.0)
            ),
        }
    }
    Ok(())
}
