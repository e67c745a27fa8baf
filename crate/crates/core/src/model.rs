//! Shared domain types: positions, node state, configuration, per-round
//! assignments and metrics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::energy::RadioParams;
use crate::error::{Error, Result};
use crate::rng::SimRng;

pub type NodeId = usize;

/// A point in the plane, in meters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Position) -> f64 {
        distance(self, other)
    }
}

/// Euclidean distance in meters.
pub fn distance(a: Position, b: Position) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Member,
    ClusterHead,
    Gateway,
    Dormant,
    Dead,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeState {
    pub id: NodeId,
    pub pos: Position,
    pub energy: f64,
    pub initial_energy: f64,
    /// 1-based band index, layer 1 nearest the sink. `None` until layered.
    pub layer: Option<usize>,
    pub role: Role,
}

impl NodeState {
    pub fn new(id: NodeId, pos: Position, initial_energy: f64) -> Self {
        Self {
            id,
            pos,
            energy: initial_energy,
            initial_energy,
            layer: None,
            role: Role::Member,
        }
    }

    pub fn is_alive(&self) -> bool {
        self.role != Role::Dead
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Protocol {
    Leach,
    ELeach,
    Propose1,
    Propose2,
}

impl Protocol {
    pub const ALL: [Protocol; 4] = [
        Protocol::Leach,
        Protocol::ELeach,
        Protocol::Propose1,
        Protocol::Propose2,
    ];

    pub fn is_baseline(self) -> bool {
        matches!(self, Protocol::Leach | Protocol::ELeach)
    }

    /// Whether the cluster-head lottery is weighted by residual energy.
    pub fn energy_weighted(self) -> bool {
        matches!(self, Protocol::ELeach | Protocol::Propose2)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Leach => "leach",
            Protocol::ELeach => "eleach",
            Protocol::Propose1 => "propose1",
            Protocol::Propose2 => "propose2",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "leach" => Ok(Protocol::Leach),
            "eleach" | "e-leach" => Ok(Protocol::ELeach),
            "propose1" => Ok(Protocol::Propose1),
            "propose2" => Ok(Protocol::Propose2),
            other => Err(format!(
                "unknown protocol `{other}` (expected leach, eleach, propose1 or propose2)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SinkMode {
    Static,
    Mobile,
}

impl SinkMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SinkMode::Static => "static",
            SinkMode::Mobile => "mobile",
        }
    }
}

impl fmt::Display for SinkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for SinkMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "static" => Ok(SinkMode::Static),
            "mobile" => Ok(SinkMode::Mobile),
            other => Err(format!(
                "unknown sink mode `{other}` (expected static or mobile)"
            )),
        }
    }
}

/// How a cluster head picks its upstream relay.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NextHopRule {
    /// Maximize `residual_energy / (distance² + 1 m²)`.
    Score,
    /// Highest residual energy, then nearest, then lowest id.
    EnergyFirst,
}

impl FromStr for NextHopRule {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "score" => Ok(NextHopRule::Score),
            "energy-first" | "energy" => Ok(NextHopRule::EnergyFirst),
            other => Err(format!(
                "unknown next-hop rule `{other}` (expected score or energy-first)"
            )),
        }
    }
}

/// Everything needed to reproduce one run.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkConfig {
    pub field_width: f64,
    pub field_height: f64,
    pub node_count: usize,
    /// Joules per node at deployment.
    pub initial_energy: f64,
    pub radio: RadioParams,
    pub sink_mode: SinkMode,
    /// May lie outside the field.
    pub sink_initial: Position,
    /// Meters per round along the orbit (mobile sink only).
    pub sink_speed: f64,
    /// Orbit center, defaults to the field center.
    pub orbit_center: Option<Position>,
    /// Orbit radius, defaults to the center-to-initial-sink distance.
    pub orbit_radius: Option<f64>,
    /// Arc length between the position-announcement boundaries on the orbit.
    pub boundary_spacing: f64,
    /// Size of the sink's position announcement, received by every awake
    /// node each time the sink crosses a boundary. Zero disables the cost.
    pub beacon_bits: u32,
    pub protocol: Protocol,
    pub rounds_max: u32,
    pub rng_seed: u64,
    /// Cluster-head probability of the baseline lotteries.
    pub ch_probability: f64,
    /// Seed fraction of the band recursion.
    pub layer_fraction: f64,
    pub next_hop_rule: NextHopRule,
}

impl Default for NetworkConfig {
    /// 200 m × 200 m field, 100 nodes at 0.5 J, sink 100 m beyond the top
    /// edge at (100, 300), LEACH, static sink.
    fn default() -> Self {
        Self {
            field_width: 200.0,
            field_height: 200.0,
            node_count: 100,
            initial_energy: 0.5,
            radio: RadioParams::default(),
            sink_mode: SinkMode::Static,
            sink_initial: Position::new(100.0, 300.0),
            sink_speed: 10.0,
            orbit_center: None,
            orbit_radius: None,
            boundary_spacing: 10.0,
            beacon_bits: 200,
            protocol: Protocol::Leach,
            rounds_max: 10_000,
            rng_seed: 1,
            ch_probability: 0.05,
            layer_fraction: 0.15,
            next_hop_rule: NextHopRule::Score,
        }
    }
}

impl NetworkConfig {
    /// Default sink placement for a field: centered horizontally, half a
    /// field height beyond the top edge. Reproduces (100, 300) on 200 × 200.
    pub fn default_sink_for(width: f64, height: f64) -> Position {
        Position::new(width / 2.0, height * 1.5)
    }

    /// Resizes the field and moves the sink to [`Self::default_sink_for`].
    pub fn with_area(mut self, width: f64, height: f64) -> Self {
        self.field_width = width;
        self.field_height = height;
        self.sink_initial = Self::default_sink_for(width, height);
        self
    }

    pub fn field_center(&self) -> Position {
        Position::new(self.field_width / 2.0, self.field_height / 2.0)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(
                    field,
                    format!("must be a positive finite number, got {v}"),
                ))
            }
        }
        positive("field_width", self.field_width)?;
        positive("field_height", self.field_height)?;
        if self.node_count == 0 {
            return Err(Error::config("node_count", "must be at least 1"));
        }
        positive("initial_energy", self.initial_energy)?;
        self.radio.validate()?;
        if !(self.sink_initial.x.is_finite() && self.sink_initial.y.is_finite()) {
            return Err(Error::config("sink_initial", "coordinates must be finite"));
        }
        if !(self.sink_speed.is_finite() && self.sink_speed >= 0.0) {
            return Err(Error::config("sink_speed", "must be a finite number ≥ 0"));
        }
        if let Some(c) = self.orbit_center {
            if !(c.x.is_finite() && c.y.is_finite()) {
                return Err(Error::config("orbit_center", "coordinates must be finite"));
            }
        }
        if let Some(r) = self.orbit_radius {
            positive("orbit_radius", r)?;
        }
        positive("boundary_spacing", self.boundary_spacing)?;
        if self.rounds_max == 0 {
            return Err(Error::config("rounds_max", "must be at least 1"));
        }
        if !(self.ch_probability > 0.0 && self.ch_probability < 1.0) {
            return Err(Error::config(
                "ch_probability",
                format!(
                    "must lie strictly between 0 and 1, got {}",
                    self.ch_probability
                ),
            ));
        }
        if !(self.layer_fraction > 0.0 && self.layer_fraction < 1.0) {
            return Err(Error::config(
                "layer_fraction",
                format!(
                    "must lie strictly between 0 and 1, got {}",
                    self.layer_fraction
                ),
            ));
        }
        Ok(())
    }
}

/// Scatters `config.node_count` nodes uniformly over the field.
///
/// Draws one `x` then one `y` per node in id order.
pub fn deploy_network(config: &NetworkConfig, rng: &mut SimRng) -> Vec<NodeState> {
    (0..config.node_count)
        .map(|id| {
            let x = rng.uniform(config.field_width);
            let y = rng.uniform(config.field_height);
            NodeState::new(id, Position::new(x, y), config.initial_energy)
        })
        .collect()
}

/// One round's roles and cluster membership.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ClusterAssignment {
    /// Cluster heads grouped by layer: `heads[i]` holds layer `i + 1`.
    /// Baseline protocols are unlayered and put every head in `heads[0]`.
    pub heads: Vec<Vec<NodeId>>,
    /// Member → the cluster head (or gateway) it reports to.
    pub members: BTreeMap<NodeId, NodeId>,
    /// First-layer relays to the sink.
    pub gateways: Vec<NodeId>,
    /// First-layer nodes asleep this round.
    pub dormant: Vec<NodeId>,
    /// Alive nodes with no cluster this round, transmitting straight to the
    /// sink (baselines when the lottery elects nobody).
    pub direct: Vec<NodeId>,
    /// Whether heads are layered (proposed protocols).
    pub layered: bool,
}

impl ClusterAssignment {
    pub fn head_count(&self) -> usize {
        self.heads.iter().map(Vec::len).sum()
    }

    pub fn all_heads(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.heads.iter().flatten().copied()
    }
}

/// Snapshot taken at the end of a round.
#[derive(Clone, Debug, PartialEq)]
pub struct RoundMetrics {
    pub round: u32,
    pub alive: usize,
    pub total_energy: f64,
    pub deaths_this_round: usize,
    pub ch_count: usize,
    pub gateway_count: usize,
    pub dormant_count: usize,
}
