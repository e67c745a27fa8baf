//! Distance bands around the sink and how 100 random nodes fall into them.

use wsn_lifesim::layering::{assign_layers, compute_layers, Layering};
use wsn_lifesim::model::deploy_network;
use wsn_lifesim::rng::SimRng;
use wsn_lifesim::NetworkConfig;

fn main() {
    let bands = compute_layers(200.0);
    println!("widths for a 200 m span: {:?}", bands.widths);

    let cfg = NetworkConfig::default();
    let layering = Layering::for_sink(
        cfg.sink_initial,
        cfg.field_width,
        cfg.field_height,
        cfg.layer_fraction,
    );
    println!(
        "sink ({}, {}): origin {:.1} m, span {:.1} m, edges {:?}",
        cfg.sink_initial.x,
        cfg.sink_initial.y,
        layering.origin,
        layering.span(),
        layering
            .edges()
            .iter()
            .map(|e| (e * 10.0).round() / 10.0)
            .collect::<Vec<_>>()
    );

    let mut nodes = deploy_network(&cfg, &mut SimRng::new(cfg.rng_seed));
    assign_layers(&mut nodes, &layering, cfg.sink_initial);
    for layer in 1..=layering.len() {
        let n = nodes.iter().filter(|s| s.layer == Some(layer)).count();
        println!("layer {layer}: {n} nodes");
    }
}
