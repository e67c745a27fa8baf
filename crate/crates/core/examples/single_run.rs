//! One Propose2 run on the default field, with its per-round trace.
//!
//! `cargo run --example single_run -- trace.csv` also writes the CSV.

use std::path::PathBuf;

use wsn_lifesim::report::{emit_trace, trace_csv};
use wsn_lifesim::{run, NetworkConfig, Protocol};

fn main() -> wsn_lifesim::Result<()> {
    let cfg = NetworkConfig {
        protocol: Protocol::Propose2,
        rng_seed: 7,
        ..NetworkConfig::default()
    };
    let out = run(&cfg)?;
    let s = out.summary;
    println!(
        "{}: FND {:?}, HND {:?}, LND {:?} after {} rounds",
        cfg.protocol, s.first_node_death, s.half_nodes_death, s.last_node_death, s.rounds_executed
    );

    for m in out.metrics.iter().step_by(250) {
        println!(
            "round {:>5}  alive {:>3}  energy {:>8.4} J  heads {:>2}  gateways {:>2}  dormant {:>2}",
            m.round, m.alive, m.total_energy, m.ch_count, m.gateway_count, m.dormant_count
        );
    }

    match std::env::args().nth(1).map(PathBuf::from) {
        Some(path) => {
            emit_trace(&out.metrics, &path)?;
            println!("trace written to {}", path.display());
        }
        None => println!("{} trace lines", trace_csv(&out.metrics).lines().count()),
    }
    Ok(())
}
