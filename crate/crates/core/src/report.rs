//! CSV output: per-round traces and per-cell ensemble summaries.

use std::fs;
use std::path::Path;

use crate::engine::{run_ensemble, EnsembleResult};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Protocol, RoundMetrics};

pub const TRACE_HEADER: &str =
    "round,alive,total_energy_j,deaths,ch_count,gateway_count,dormant_count";

pub const SUMMARY_HEADER: &str = "protocol,nodes,area,sink_mode,sink_speed,seeds,\
fnd_median,fnd_mean,hnd_median,hnd_mean,lnd_median,lnd_mean";

/// Renders a trace. Energy is printed with 9 decimals.
pub fn trace_csv(metrics: &[RoundMetrics]) -> String {
    let mut w = csv::Writer::from_writer(Vec::with_capacity(48 * (metrics.len() + 1)));
    let mut write = || -> csv::Result<()> {
        w.write_record(TRACE_HEADER.split(','))?;
        for m in metrics {
            w.write_record([
                m.round.to_string(),
                m.alive.to_string(),
                format!("{:.9}", m.total_energy),
                m.deaths_this_round.to_string(),
                m.ch_count.to_string(),
                m.gateway_count.to_string(),
                m.dormant_count.to_string(),
            ])?;
        }
        Ok(())
    };
    write().expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii csv")
}

pub fn emit_trace(metrics: &[RoundMetrics], path: &Path) -> Result<()> {
    write_file(path, &trace_csv(metrics))
}

/// Parses a trace produced by [`trace_csv`]. Errors carry a 1-based line.
pub fn parse_trace(text: &str) -> std::result::Result<Vec<RoundMetrics>, (usize, String)> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut records = r.records();
    match records.next() {
        Some(Ok(h)) if h.iter().eq(TRACE_HEADER.split(',')) => {}
        Some(Ok(h)) => {
            return Err((
                1,
                format!(
                    "unexpected header {:?}",
                    h.iter().collect::<Vec<_>>().join(",")
                ),
            ))
        }
        Some(Err(e)) => return Err((1, e.to_string())),
        None => return Err((1, "empty trace".into())),
    }
    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let lineno = i + 2;
        let rec = rec.map_err(|e| (lineno, e.to_string()))?;
        if rec.len() != 7 {
            return Err((lineno, format!("expected 7 fields, found {}", rec.len())));
        }
        fn field<T: std::str::FromStr>(
            rec: &csv::StringRecord,
            i: usize,
            line: usize,
        ) -> std::result::Result<T, (usize, String)> {
            rec[i].parse().map_err(|_| {
                let name = TRACE_HEADER.split(',').nth(i).unwrap_or("?");
                (line, format!("bad {name} value `{}`", &rec[i]))
            })
        }
        rows.push(RoundMetrics {
            round: field(&rec, 0, lineno)?,
            alive: field(&rec, 1, lineno)?,
            total_energy: field(&rec, 2, lineno)?,
            deaths_this_round: field(&rec, 3, lineno)?,
            ch_count: field(&rec, 4, lineno)?,
            gateway_count: field(&rec, 5, lineno)?,
            dormant_count: field(&rec, 6, lineno)?,
        });
    }
    Ok(rows)
}

pub fn read_trace(path: &Path) -> Result<Vec<RoundMetrics>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_trace(&text).map_err(|(line, reason)| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    })
}

/// One ensemble cell of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRecord {
    pub protocol: Protocol,
    pub nodes: usize,
    pub width: f64,
    pub height: f64,
    pub sink_mode: crate::model::SinkMode,
    pub sink_speed: f64,
    pub result: EnsembleResult,
}

impl SummaryRecord {
    pub fn new(config: &NetworkConfig, result: EnsembleResult) -> Self {
        Self {
            protocol: config.protocol,
            nodes: config.node_count,
            width: config.field_width,
            height: config.field_height,
            sink_mode: config.sink_mode,
            sink_speed: config.sink_speed,
            result,
        }
    }

    pub fn seeds(&self) -> usize {
        self.result.per_seed.len()
    }
}

pub fn summary_csv(records: &[SummaryRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut write = || -> csv::Result<()> {
        w.write_record(SUMMARY_HEADER.split(','))?;
        for r in records {
            let s = &r.result;
            w.write_record([
                r.protocol.to_string(),
                r.nodes.to_string(),
                format!("{}x{}", r.width, r.height),
                r.sink_mode.to_string(),
                r.sink_speed.to_string(),
                r.seeds().to_string(),
                s.fnd.median.to_string(),
                s.fnd.mean.to_string(),
                s.hnd.median.to_string(),
                s.hnd.mean.to_string(),
                s.lnd.median.to_string(),
                s.lnd.mean.to_string(),
            ])?;
        }
        Ok(())
    };
    write().expect("writing to memory");
    String::from_utf8(w.into_inner().expect("writing to memory")).expect("ascii csv")
}

pub fn emit_summary(records: &[SummaryRecord], path: &Path) -> Result<()> {
    write_file(path, &summary_csv(records))
}

/// The experimental axis of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepDim {
    Nodes(Vec<usize>),
    /// Field sizes as (width, height).
    Area(Vec<(f64, f64)>),
    SinkSpeed(Vec<f64>),
    Protocol(Vec<Protocol>),
}

impl SweepDim {
    pub fn len(&self) -> usize {
        match self {
            SweepDim::Nodes(v) => v.len(),
            SweepDim::Area(v) => v.len(),
            SweepDim::SinkSpeed(v) => v.len(),
            SweepDim::Protocol(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn configs(&self, base: &NetworkConfig) -> Vec<NetworkConfig> {
        match self {
            SweepDim::Nodes(v) => v
                .iter()
                .map(|&n| NetworkConfig {
                    node_count: n,
                    ..base.clone()
                })
                .collect(),
            SweepDim::Area(v) => v
                .iter()
                .map(|&(w, h)| base.clone().with_area(w, h))
                .collect(),
            SweepDim::SinkSpeed(v) => v
                .iter()
                .map(|&s| NetworkConfig {
                    sink_speed: s,
                    ..base.clone()
                })
                .collect(),
            SweepDim::Protocol(v) => v
                .iter()
                .map(|&p| NetworkConfig {
                    protocol: p,
                    ..base.clone()
                })
                .collect(),
        }
    }
}

/// Runs every (protocol, value) cell over the same seeds.
///
/// Records are grouped by protocol, then ordered as `dim`'s values.
/// A `Protocol` sweep ignores `protocols`.
pub fn sweep(
    base: &NetworkConfig,
    dim: &SweepDim,
    protocols: &[Protocol],
    seeds: &[u64],
) -> Result<Vec<SummaryRecord>> {
    if dim.is_empty() {
        return Err(Error::config("sweep", "no values given"));
    }
    let protocols: Vec<Protocol> = match dim {
        SweepDim::Protocol(_) => vec![base.protocol],
        _ if protocols.is_empty() => vec![base.protocol],
        _ => protocols.to_vec(),
    };
    let mut records = Vec::new();
    for p in protocols {
        let proto_base = NetworkConfig {
            protocol: p,
            ..base.clone()
        };
        for cfg in dim.configs(&proto_base) {
            let result = run_ensemble(&cfg, seeds)?;
            records.push(SummaryRecord::new(&cfg, result));
        }
    }
    Ok(records)
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::run;

    fn short(protocol: Protocol, rounds: u32) -> NetworkConfig {
        NetworkConfig {
            protocol,
            rounds_max: rounds,
            node_count: 30,
            ..NetworkConfig::default()
        }
    }

    #[test]
    fn three_rounds_four_lines() {
        let out = run(&short(Protocol::Propose2, 3)).unwrap();
        let csv = trace_csv(&out.metrics);
        assert_eq!(csv.lines().count(), 4);
        assert!(csv.ends_with('\n'));
        assert_eq!(csv.lines().next(), Some(TRACE_HEADER));
    }

    #[test]
    fn trace_parses_back() {
        let out = run(&short(Protocol::Leach, 40)).unwrap();
        let parsed = parse_trace(&trace_csv(&out.metrics)).unwrap();
        assert_eq!(parsed.len(), out.metrics.len());
        for (a, b) in parsed.iter().zip(&out.metrics) {
            assert_eq!(a.round, b.round);
            assert_eq!(a.alive, b.alive);
            assert_eq!(
                a.total_energy,
                format!("{:.9}", b.total_energy).parse::<f64>().unwrap()
            );
            assert_eq!(a.deaths_this_round, b.deaths_this_round);
            assert_eq!(a.ch_count, b.ch_count);
        }
        assert_eq!(trace_csv(&parsed), trace_csv(&out.metrics));
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_trace("").is_err());
        assert!(parse_trace("a,b\n").is_err());
        let e = parse_trace(&format!("{TRACE_HEADER}\n1,2,3\n")).unwrap_err();
        assert_eq!(e.0, 2);
    }

    #[test]
    fn sweep_cell_count() {
        let base = short(Protocol::Leach, 20);
        let dim = SweepDim::Nodes(vec![10, 20, 30]);
        let recs = sweep(&base, &dim, &[Protocol::Leach, Protocol::Propose2], &[1, 2]).unwrap();
        assert_eq!(recs.len(), 6);
        assert_eq!(recs[0].protocol, Protocol::Leach);
        assert_eq!(recs[3].protocol, Protocol::Propose2);
        assert_eq!(recs[4].nodes, 20);
        let csv = summary_csv(&recs);
        assert_eq!(csv.lines().count(), 7);
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("leach,10,200x200,static,10,2,"));
    }

    #[test]
    fn single_value_single_cell() {
        let base = short(Protocol::Propose1, 10);
        let recs = sweep(&base, &SweepDim::SinkSpeed(vec![48.0]), &[], &[3]).unwrap();
        assert_eq!(recs.len(), 1);
        assert!(sweep(&base, &SweepDim::Nodes(vec![]), &[], &[3]).is_err());
    }

    #[test]
    fn io_error_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        fs::write(&blocker, "x").unwrap();
        let err = emit_trace(&[], &blocker.join("t.csv")).unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}
