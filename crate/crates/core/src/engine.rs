//! Round loop, lifetime summaries and seed ensembles.
//!
//! A round runs in a fixed order: move the sink (re-layering on boundary
//! crossings), form clusters, build the forwarding tree, play the traffic,
//! charge position announcements, record metrics. The loop stops once every
//! node is dead or `rounds_max` rounds have run.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::energy::{charge, rx_cost};
use crate::error::{Error, Result};
use crate::layering::{relayer_on_sink_move, Layering};
use crate::model::{
    deploy_network, ClusterAssignment, NetworkConfig, NodeState, Role, RoundMetrics, SinkMode,
};
use crate::protocols::{apply_roles, baseline_round_setup, layered_round_setup, ElectionState};
use crate::rng::SimRng;
use crate::routing::{build_forwarding_tree, execute_round_traffic, ForwardingTree, TrafficReport};
use crate::sink::{boundaries_crossed, SinkState};

/// Rounds at which the first node, half of the nodes and the last node
/// died. `None` means it had not happened when the run stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LifetimeSummary {
    pub first_node_death: Option<u32>,
    pub half_nodes_death: Option<u32>,
    pub last_node_death: Option<u32>,
    pub rounds_executed: u32,
}

impl LifetimeSummary {
    /// FND, HND and LND with unreached milestones censored at
    /// `rounds_executed`.
    pub fn censored(&self) -> [u32; 3] {
        let c = |v: Option<u32>| v.unwrap_or(self.rounds_executed);
        [
            c(self.first_node_death),
            c(self.half_nodes_death),
            c(self.last_node_death),
        ]
    }
}

/// Everything observable about one executed round.
#[derive(Clone, Debug)]
pub struct RoundOutcome {
    pub metrics: RoundMetrics,
    pub assignment: ClusterAssignment,
    pub tree: ForwardingTree,
    pub traffic: TrafficReport,
    /// Joules spent receiving position announcements, per node id.
    pub beacon_debits: Vec<f64>,
    /// Announcement boundaries the sink crossed at the start of the round.
    pub crossings: u64,
    pub energy_before: f64,
}

impl RoundOutcome {
    pub fn charged(&self) -> f64 {
        self.traffic.total() + self.beacon_debits.iter().sum::<f64>()
    }
}

/// A single run's mutable state.
#[derive(Clone, Debug)]
pub struct Simulation {
    config: NetworkConfig,
    nodes: Vec<NodeState>,
    sink: SinkState,
    layering: Option<Layering>,
    election: ElectionState,
    rng: SimRng,
    round: u32,
    dead: usize,
    first: Option<u32>,
    half: Option<u32>,
    last: Option<u32>,
}

impl Simulation {
    pub fn new(config: NetworkConfig) -> Result<Self> {
        config.validate()?;
        let mut rng = SimRng::new(config.rng_seed);
        let nodes = deploy_network(&config, &mut rng);
        Ok(Self::with_nodes(config, nodes, rng))
    }

    /// Starts from a hand-made deployment; the generator is seeded from the
    /// config but no deployment draws are taken.
    pub fn from_nodes(config: NetworkConfig, nodes: Vec<NodeState>) -> Result<Self> {
        config.validate()?;
        if nodes.len() != config.node_count {
            return Err(Error::config(
                "node_count",
                format!(
                    "{} nodes supplied for node_count {}",
                    nodes.len(),
                    config.node_count
                ),
            ));
        }
        let rng = SimRng::new(config.rng_seed);
        Ok(Self::with_nodes(config, nodes, rng))
    }

    fn with_nodes(config: NetworkConfig, nodes: Vec<NodeState>, rng: SimRng) -> Self {
        let sink = SinkState::from_config(&config);
        let election = ElectionState::new(nodes.len());
        let dead = nodes.iter().filter(|n| !n.is_alive()).count();
        Self {
            config,
            nodes,
            sink,
            layering: None,
            election,
            rng,
            round: 0,
            dead,
            first: None,
            half: None,
            last: None,
        }
    }

    pub fn config(&self) -> &NetworkConfig {
        &self.config
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn sink(&self) -> &SinkState {
        &self.sink
    }

    pub fn layering(&self) -> Option<&Layering> {
        self.layering.as_ref()
    }

    /// Rounds executed so far.
    pub fn round(&self) -> u32 {
        self.round
    }

    pub fn alive(&self) -> usize {
        self.nodes.len() - self.dead
    }

    pub fn total_energy(&self) -> f64 {
        self.nodes.iter().map(|n| n.energy).sum()
    }

    pub fn is_finished(&self) -> bool {
        self.alive() == 0 || self.round >= self.config.rounds_max
    }

    pub fn summary(&self) -> LifetimeSummary {
        LifetimeSummary {
            first_node_death: self.first,
            half_nodes_death: self.half,
            last_node_death: self.last,
            rounds_executed: self.round,
        }
    }

    /// Executes one round.
    pub fn step(&mut self) -> Result<RoundOutcome> {
        self.round += 1;
        let round = self.round;
        let r = round - 1;
        let energy_before = self.total_energy();

        let crossings = self.move_sink();
        let layered = !self.config.protocol.is_baseline();
        if layered && (self.layering.is_none() || crossings > 0) {
            self.layering = Some(relayer_on_sink_move(
                &mut self.nodes,
                self.sink.pos,
                self.config.field_width,
                self.config.field_height,
                self.config.layer_fraction,
            ));
        }

        let assignment = if layered {
            let layer_count = self.layering.as_ref().map_or(0, Layering::len);
            layered_round_setup(
                &self.nodes,
                layer_count,
                self.sink.pos,
                self.config.protocol.energy_weighted(),
                &mut self.election,
                r,
                &mut self.rng,
            )
        } else {
            baseline_round_setup(
                &self.nodes,
                self.config.protocol,
                self.config.ch_probability,
                &mut self.election,
                r,
                &mut self.rng,
            )
        };
        apply_roles(&mut self.nodes, &assignment);

        let tree = build_forwarding_tree(&self.nodes, &assignment, self.config.next_hop_rule)?;
        let traffic =
            execute_round_traffic(&tree, &self.config.radio, &mut self.nodes, self.sink.pos)?;
        let beacon_debits = self.charge_announcements(crossings)?;

        let alive_before = self.alive();
        self.dead = self.nodes.iter().filter(|n| !n.is_alive()).count();
        let deaths = alive_before - self.alive();
        let n = self.nodes.len();
        if self.dead > 0 && self.first.is_none() {
            self.first = Some(round);
        }
        if self.dead >= n.div_ceil(2) && self.half.is_none() {
            self.half = Some(round);
        }
        if self.dead == n && self.last.is_none() {
            self.last = Some(round);
        }

        let metrics = RoundMetrics {
            round,
            alive: self.alive(),
            total_energy: self.total_energy(),
            deaths_this_round: deaths,
            ch_count: assignment.head_count(),
            gateway_count: assignment.gateways.len(),
            dormant_count: assignment.dormant.len(),
        };
        Ok(RoundOutcome {
            metrics,
            assignment,
            tree,
            traffic,
            beacon_debits,
            crossings,
            energy_before,
        })
    }

    /// Jumps a mobile sink (from round 2 on) and returns the announcement
    /// boundaries it crossed.
    fn move_sink(&mut self) -> u64 {
        if self.config.sink_mode != SinkMode::Mobile || self.round == 1 {
            return 0;
        }
        let v = self.config.sink_speed;
        let moves_before = f64::from(self.round - 2);
        self.sink.advance();
        boundaries_crossed(
            moves_before * v,
            (moves_before + 1.0) * v,
            self.config.boundary_spacing,
        )
    }

    /// Every awake node receives one announcement per boundary crossed.
    fn charge_announcements(&mut self, crossings: u64) -> Result<Vec<f64>> {
        let mut debits = vec![0.0; self.nodes.len()];
        if crossings == 0 || self.config.beacon_bits == 0 {
            return Ok(debits);
        }
        let cost = crossings as f64 * rx_cost(&self.config.radio, self.config.beacon_bits);
        let threshold = self.config.radio.death_threshold();
        for node in self.nodes.iter_mut() {
            if matches!(node.role, Role::Dead | Role::Dormant) {
                continue;
            }
            debits[node.id] = charge(node, cost, threshold)?.debited;
        }
        Ok(debits)
    }
}

/// A finished run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub metrics: Vec<RoundMetrics>,
    pub summary: LifetimeSummary,
}

/// Runs `config` to completion.
pub fn run(config: &NetworkConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(config.clone())?;
    let mut metrics = Vec::new();
    while !sim.is_finished() {
        metrics.push(sim.step()?.metrics);
    }
    Ok(RunOutput {
        metrics,
        summary: sim.summary(),
    })
}

/// Median and mean of one lifetime milestone across seeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub median: f64,
    pub mean: f64,
}

impl Stats {
    pub fn of(values: &[u32]) -> Stats {
        assert!(!values.is_empty());
        let mut v: Vec<f64> = values.iter().map(|&x| f64::from(x)).collect();
        v.sort_by(f64::total_cmp);
        let n = v.len();
        let median = if n % 2 == 1 {
            v[n / 2]
        } else {
            0.5 * (v[n / 2 - 1] + v[n / 2])
        };
        Stats {
            median,
            mean: v.iter().sum::<f64>() / n as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleResult {
    pub per_seed: BTreeMap<u64, LifetimeSummary>,
    pub fnd: Stats,
    pub hnd: Stats,
    pub lnd: Stats,
}

impl EnsembleResult {
    /// Aggregates finished runs. Panics on an empty map.
    pub fn from_summaries(per_seed: BTreeMap<u64, LifetimeSummary>) -> Self {
        let column =
            |i: usize| -> Vec<u32> { per_seed.values().map(|s| s.censored()[i]).collect() };
        EnsembleResult {
            fnd: Stats::of(&column(0)),
            hnd: Stats::of(&column(1)),
            lnd: Stats::of(&column(2)),
            per_seed,
        }
    }
}

/// Runs `config` once per seed (in parallel) and aggregates FND/HND/LND.
/// Unreached milestones count as the rounds executed.
pub fn run_ensemble(config: &NetworkConfig, seeds: &[u64]) -> Result<EnsembleResult> {
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed is required"));
    }
    if seeds.iter().collect::<BTreeSet<_>>().len() != seeds.len() {
        return Err(Error::config("seeds", "seeds must be distinct"));
    }
    config.validate()?;
    let runs: Vec<(u64, LifetimeSummary)> = seeds
        .par_iter()
        .map(|&seed| {
            let cfg = NetworkConfig {
                rng_seed: seed,
                ..config.clone()
            };
            run(&cfg).map(|out| (seed, out.summary))
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleResult::from_summaries(runs.into_iter().collect()))
}
