//! Per-hop radio costs for a 4000-bit packet at a few distances.

use wsn_lifesim::energy::{cpu_cost, hop_total_cost, rx_cost, tx_cost};
use wsn_lifesim::RadioParams;

fn main() {
    let table = RadioParams::literal_table();
    let sim = RadioParams::default();
    let k = table.packet_bits;

    println!(
        "rx {:.3e} J, cpu {:.3e} J per packet",
        rx_cost(&sim, k),
        cpu_cost(&sim, k)
    );
    println!(
        "{:>6} {:>14} {:>14} {:>14}",
        "d (m)", "tx literal", "tx default", "hop default"
    );
    for d in [0.0, 10.0, 50.0, 87.0, 100.0, 200.0, 300.0] {
        println!(
            "{d:>6} {:>14.6e} {:>14.6e} {:>14.6e}",
            tx_cost(&table, k, d),
            tx_cost(&sim, k, d),
            hop_total_cost(&sim, k, d)
        );
    }

    // two-ray regime beyond the crossover
    let multipath = RadioParams {
        gamma_far: 4.0,
        e_amp: 0.0013e-12,
        ..sim
    };
    println!(
        "d^4 past {} m: tx(150 m) = {:.6e} J",
        multipath.d_threshold,
        tx_cost(&multipath, k, 150.0)
    );
}
