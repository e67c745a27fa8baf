//! Node-count sweep for every protocol, written as a summary CSV.

use wsn_lifesim::report::{emit_summary, summary_csv, sweep, SweepDim};
use wsn_lifesim::{NetworkConfig, Protocol};

fn main() -> wsn_lifesim::Result<()> {
    let seeds = [1, 2, 3, 4, 5];
    let records = sweep(
        &NetworkConfig::default(),
        &SweepDim::Nodes(vec![100, 200, 300]),
        &Protocol::ALL,
        &seeds,
    )?;
    print!("{}", summary_csv(&records));
    if let Some(path) = std::env::args().nth(1) {
        emit_summary(&records, path.as_ref())?;
    }
    Ok(())
}
