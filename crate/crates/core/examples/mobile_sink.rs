//! A sink orbiting a 100 m field at three speeds, against a fixed sink.

use wsn_lifesim::sink::SinkState;
use wsn_lifesim::{run_ensemble, NetworkConfig, Protocol, SinkMode};

fn main() -> wsn_lifesim::Result<()> {
    let seeds: Vec<u64> = (1..=10).collect();
    let base = NetworkConfig {
        protocol: Protocol::Propose2,
        ..NetworkConfig::default().with_area(100.0, 100.0)
    };

    let orbit = SinkState::from_config(&NetworkConfig {
        sink_mode: SinkMode::Mobile,
        ..base.clone()
    });
    println!(
        "orbit centre ({}, {}), radius {:.1} m",
        orbit.orbit_center.x, orbit.orbit_center.y, orbit.orbit_radius
    );

    let fixed = run_ensemble(&base, &seeds)?;
    println!(
        "static        FND {:>7.1}  LND {:>7.1}",
        fixed.fnd.median, fixed.lnd.median
    );
    for speed in [10.0, 48.0, 96.0, 144.0] {
        let cfg = NetworkConfig {
            sink_mode: SinkMode::Mobile,
            sink_speed: speed,
            ..base.clone()
        };
        let e = run_ensemble(&cfg, &seeds)?;
        println!(
            "{speed:>5} m/round FND {:>7.1}  LND {:>7.1}",
            e.fnd.median, e.lnd.median
        );
    }
    Ok(())
}
