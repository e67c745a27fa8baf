//! Steps a layered network one round at a time and prints who did what.

use wsn_lifesim::engine::Simulation;
use wsn_lifesim::{NetworkConfig, Protocol};

fn main() -> wsn_lifesim::Result<()> {
    let cfg = NetworkConfig {
        protocol: Protocol::Propose1,
        node_count: 40,
        ..NetworkConfig::default()
    };
    let mut sim = Simulation::new(cfg)?;
    for _ in 0..3 {
        let o = sim.step()?;
        let a = &o.assignment;
        println!("round {}", o.metrics.round);
        println!("  gateways {:?}", a.gateways);
        println!("  dormant  {:?}", a.dormant);
        for (i, heads) in a.heads.iter().enumerate() {
            println!("  layer {} heads {heads:?}", i + 1);
        }
        for &h in a.heads.iter().flatten() {
            let route = o.tree.path(h);
            println!("  {h} -> {route:?}");
        }
        println!(
            "  spent {:.6} J, {} packets delivered",
            o.charged(),
            o.traffic.delivered
        );
    }
    Ok(())
}
