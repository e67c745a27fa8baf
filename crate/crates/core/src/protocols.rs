//! Per-round cluster formation.
//!
//! Two families share the lottery machinery:
//!
//! * Baselines (LEACH, E-LEACH) run one network-wide lottery with a fixed
//!   probability; members join their nearest head without limit.
//! * The layered protocols size every band separately: the band nearest the
//!   sink gets at least two gateways and puts about half of its spare nodes
//!   to sleep, and every deeper band elects an exact number of heads whose
//!   clusters are capped to even out their load.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::model::{distance, ClusterAssignment, NodeId, NodeState, Position, Protocol, Role};
use crate::rng::SimRng;

/// Gateways for a first layer of `n1` alive nodes: 2 % of them, at least 2.
pub fn k_opt_first_layer(n1: usize) -> usize {
    if n1 == 0 {
        return 0;
    }
    ceil_count(0.02 * n1 as f64).max(2)
}

/// Heads for a deeper layer of `n_i` alive nodes whose nearer neighbour layer
/// targets `k_prev`: `⌈5 % · n_i + k_prev / 2⌉`, never more than `n_i`.
pub fn k_opt_layer(n_i: usize, k_prev: usize) -> usize {
    if n_i == 0 {
        return 0;
    }
    ceil_count(0.05 * n_i as f64 + 0.5 * k_prev as f64).min(n_i)
}

/// Member cap per cluster: `⌈⌊(n_i − k)/k⌋ · 0.9⌉`.
pub fn cluster_cap(n_i: usize, k_opt_i: usize) -> usize {
    assert!(k_opt_i >= 1 && n_i >= k_opt_i, "cap needs n_i ≥ k ≥ 1");
    let per_head = (n_i - k_opt_i) / k_opt_i;
    ceil_count(per_head as f64 * 0.9)
}

/// Sleepers in the first layer: `⌊(n1 − k_opt1)/2⌋`.
pub fn dormant_count(n1: usize, k_opt1: usize) -> usize {
    n1.saturating_sub(k_opt1) / 2
}

/// `⌈x⌉` for the small non-negative products above. Values within a few ulps
/// of an integer are snapped first so `0.02 · 150` gives 3, not 4.
fn ceil_count(x: f64) -> usize {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r as usize
    } else {
        x.ceil() as usize
    }
}

/// Rounds in one election epoch, `round(1/p)`.
pub fn epoch_length(p: f64) -> u32 {
    ((1.0 / p).round() as u32).max(1)
}

/// Election threshold `p / (1 − p·(r mod round(1/p)))` for nodes in G,
/// zero otherwise. Capped at 1.
pub fn leach_threshold(p: f64, r: u32, in_g: bool) -> f64 {
    if !in_g {
        return 0.0;
    }
    let phase = f64::from(r % epoch_length(p));
    (p / (1.0 - p * phase)).min(1.0)
}

/// [`leach_threshold`] scaled by the fraction of initial energy left.
pub fn eleach_threshold(p: f64, r: u32, in_g: bool, e: f64, e_m: f64) -> f64 {
    leach_threshold(p, r, in_g) * (e / e_m)
}

/// Tracks when each node last served as a cluster head, which decides
/// membership of the eligible set G.
#[derive(Clone, Debug, PartialEq)]
pub struct ElectionState {
    last_head_round: Vec<Option<u32>>,
}

impl ElectionState {
    pub fn new(node_count: usize) -> Self {
        Self {
            last_head_round: vec![None; node_count],
        }
    }

    /// Whether `id` has sat out at least one full epoch of `p` before round
    /// `r`.
    pub fn in_g(&self, id: NodeId, r: u32, p: f64) -> bool {
        match self.last_head_round[id] {
            None => true,
            Some(last) => r - last >= epoch_length(p),
        }
    }

    pub fn record_head(&mut self, id: NodeId, r: u32) {
        self.last_head_round[id] = Some(r);
    }

    pub fn last_head_round(&self, id: NodeId) -> Option<u32> {
        self.last_head_round[id]
    }
}

/// One lottery draw per candidate, ascending id, against the plain or
/// energy-weighted threshold. Returns the winners in id order.
fn lottery(
    nodes: &[NodeState],
    candidates: &[NodeId],
    p: f64,
    r: u32,
    energy_weighted: bool,
    election: &ElectionState,
    rng: &mut SimRng,
) -> Vec<NodeId> {
    let mut winners = Vec::new();
    for &id in candidates {
        let n = &nodes[id];
        let in_g = election.in_g(id, r, p);
        let t = if energy_weighted {
            eleach_threshold(p, r, in_g, n.energy, n.initial_energy)
        } else {
            leach_threshold(p, r, in_g)
        };
        if rng.unit() < t {
            winners.push(id);
        }
    }
    winners
}

/// Descending residual energy, then ascending id.
fn by_energy_desc(nodes: &[NodeState]) -> impl Fn(&NodeId, &NodeId) -> Ordering + '_ {
    move |&a, &b| nodes[b].energy.total_cmp(&nodes[a].energy).then(a.cmp(&b))
}

/// Elects exactly `k_target` heads among `layer` (alive node ids).
///
/// The lottery runs with the layer's effective probability
/// `p = k_target / n`. Surplus winners are trimmed to the highest-energy
/// ones; a shortfall is filled from non-winners in G by descending energy,
/// and from everyone else if G runs dry. Elected heads are recorded in
/// `election`.
pub fn elect_cluster_heads(
    nodes: &[NodeState],
    layer: &[NodeId],
    k_target: usize,
    energy_weighted: bool,
    election: &mut ElectionState,
    r: u32,
    rng: &mut SimRng,
) -> Vec<NodeId> {
    let n = layer.len();
    let k_target = k_target.min(n);
    if k_target == 0 {
        return Vec::new();
    }
    let mut ids: Vec<NodeId> = layer.to_vec();
    ids.sort_unstable();

    let mut heads = if k_target == n {
        ids.clone()
    } else {
        let p = k_target as f64 / n as f64;
        let mut winners = lottery(nodes, &ids, p, r, energy_weighted, election, rng);
        let cmp = by_energy_desc(nodes);
        if winners.len() > k_target {
            winners.sort_by(&cmp);
            winners.truncate(k_target);
        } else if winners.len() < k_target {
            let mut in_g: Vec<NodeId> = Vec::new();
            let mut rest: Vec<NodeId> = Vec::new();
            for &id in &ids {
                if winners.binary_search(&id).is_ok() {
                    continue;
                }
                if election.in_g(id, r, p) {
                    in_g.push(id);
                } else {
                    rest.push(id);
                }
            }
            in_g.sort_by(&cmp);
            rest.sort_by(&cmp);
            let need = k_target - winners.len();
            winners.extend(in_g.into_iter().chain(rest).take(need));
        }
        winners
    };
    heads.sort_unstable();
    for &h in &heads {
        election.record_head(h, r);
    }
    heads
}

/// Attaches every node of `members` to one of `heads`.
///
/// Phase 1 visits members by ascending distance to their nearest head and
/// lets each join the nearest head with fewer than `cap` members. Phase 2
/// sends whoever is left to their nearest head regardless of the cap.
pub fn form_clusters(
    nodes: &[NodeState],
    members: &[NodeId],
    heads: &[NodeId],
    cap: usize,
) -> BTreeMap<NodeId, NodeId> {
    let mut out = BTreeMap::new();
    if heads.is_empty() {
        return out;
    }
    // Per member: heads sorted by distance (ties by id).
    let ranked: Vec<(NodeId, Vec<(f64, NodeId)>)> = members
        .iter()
        .map(|&m| {
            let mut hs: Vec<(f64, NodeId)> = heads
                .iter()
                .map(|&h| (distance(nodes[m].pos, nodes[h].pos), h))
                .collect();
            hs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            (m, hs)
        })
        .collect();
    let mut order: Vec<usize> = (0..ranked.len()).collect();
    order.sort_by(|&a, &b| {
        ranked[a].1[0]
            .0
            .total_cmp(&ranked[b].1[0].0)
            .then(ranked[a].0.cmp(&ranked[b].0))
    });

    let mut load: BTreeMap<NodeId, usize> = heads.iter().map(|&h| (h, 0)).collect();
    let mut overflow = Vec::new();
    for i in order {
        let (m, hs) = &ranked[i];
        match hs.iter().find(|(_, h)| load[h] < cap) {
            Some(&(_, h)) => {
                *load.get_mut(&h).expect("known head") += 1;
                out.insert(*m, h);
            }
            None => overflow.push(i),
        }
    }
    for i in overflow {
        let (m, hs) = &ranked[i];
        out.insert(*m, hs[0].1);
    }
    out
}

/// First-layer split for one round.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FirstLayerRoles {
    pub gateways: Vec<NodeId>,
    pub dormant: Vec<NodeId>,
    /// Awake non-gateways with the gateway each reports to.
    pub active: BTreeMap<NodeId, NodeId>,
}

/// Ranks the first layer by descending energy (ties: nearer the sink, then
/// lower id). The top `k_opt1` become gateways, the next `dormant_k` sleep,
/// and the rest report to their nearest gateway.
pub fn select_first_layer_roles(
    nodes: &[NodeState],
    layer: &[NodeId],
    k_opt1: usize,
    dormant_k: usize,
    sink: Position,
) -> FirstLayerRoles {
    let mut ranked: Vec<NodeId> = layer.to_vec();
    ranked.sort_by(|&a, &b| {
        nodes[b]
            .energy
            .total_cmp(&nodes[a].energy)
            .then_with(|| distance(nodes[a].pos, sink).total_cmp(&distance(nodes[b].pos, sink)))
            .then(a.cmp(&b))
    });
    let g = k_opt1.min(ranked.len());
    let d = dormant_k.min(ranked.len() - g);
    let mut gateways = ranked[..g].to_vec();
    let mut dormant = ranked[g..g + d].to_vec();
    gateways.sort_unstable();
    dormant.sort_unstable();
    let active = ranked[g + d..]
        .iter()
        .map(|&m| {
            let gw = gateways
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    distance(nodes[m].pos, nodes[a].pos)
                        .total_cmp(&distance(nodes[m].pos, nodes[b].pos))
                        .then(a.cmp(&b))
                })
                .expect("non-empty layer has a gateway");
            (m, gw)
        })
        .collect();
    FirstLayerRoles {
        gateways,
        dormant,
        active,
    }
}

/// Network-wide LEACH / E-LEACH setup with head probability `p`.
///
/// If the lottery elects nobody every alive node goes straight to the sink.
pub fn baseline_round_setup(
    nodes: &[NodeState],
    protocol: Protocol,
    p: f64,
    election: &mut ElectionState,
    r: u32,
    rng: &mut SimRng,
) -> ClusterAssignment {
    debug_assert!(protocol.is_baseline());
    let alive: Vec<NodeId> = nodes
        .iter()
        .filter(|n| n.is_alive())
        .map(|n| n.id)
        .collect();
    let heads = lottery(
        nodes,
        &alive,
        p,
        r,
        protocol.energy_weighted(),
        election,
        rng,
    );
    for &h in &heads {
        election.record_head(h, r);
    }
    let mut a = ClusterAssignment::default();
    if heads.is_empty() {
        a.direct = alive;
        return a;
    }
    for &id in &alive {
        if heads.binary_search(&id).is_ok() {
            continue;
        }
        let nearest = heads
            .iter()
            .copied()
            .min_by(|&x, &y| {
                distance(nodes[id].pos, nodes[x].pos)
                    .total_cmp(&distance(nodes[id].pos, nodes[y].pos))
                    .then(x.cmp(&y))
            })
            .expect("non-empty");
        a.members.insert(id, nearest);
    }
    a.heads = vec![heads];
    a
}

/// Layered setup for the proposed protocols. Nodes must already carry their
/// layer index; `layer_count` is the number of bands.
pub fn layered_round_setup(
    nodes: &[NodeState],
    layer_count: usize,
    sink: Position,
    energy_weighted: bool,
    election: &mut ElectionState,
    r: u32,
    rng: &mut SimRng,
) -> ClusterAssignment {
    let mut by_layer: Vec<Vec<NodeId>> = vec![Vec::new(); layer_count];
    for n in nodes.iter().filter(|n| n.is_alive()) {
        let l = n.layer.expect("alive nodes are layered");
        by_layer[l - 1].push(n.id);
    }

    let mut a = ClusterAssignment {
        heads: vec![Vec::new(); layer_count],
        layered: true,
        ..ClusterAssignment::default()
    };
    if layer_count == 0 {
        return a;
    }

    let first = &by_layer[0];
    let k1 = k_opt_first_layer(first.len());
    if !first.is_empty() {
        let gateways = k1.min(first.len());
        let roles = select_first_layer_roles(
            nodes,
            first,
            gateways,
            dormant_count(first.len(), gateways),
            sink,
        );
        a.gateways = roles.gateways;
        a.dormant = roles.dormant;
        a.members.extend(roles.active);
    }

    let mut k_prev = k1;
    for (i, layer) in by_layer.iter().enumerate().skip(1) {
        let k = k_opt_layer(layer.len(), k_prev);
        k_prev = k;
        if k == 0 {
            continue;
        }
        let heads = elect_cluster_heads(nodes, layer, k, energy_weighted, election, r, rng);
        let cap = cluster_cap(layer.len(), heads.len());
        let members: Vec<NodeId> = layer
            .iter()
            .copied()
            .filter(|id| heads.binary_search(id).is_err())
            .collect();
        a.members
            .extend(form_clusters(nodes, &members, &heads, cap));
        a.heads[i] = heads;
    }
    a
}

/// Writes the assignment's roles onto the nodes. Dead nodes stay dead.
pub fn apply_roles(nodes: &mut [NodeState], a: &ClusterAssignment) {
    for n in nodes.iter_mut().filter(|n| n.is_alive()) {
        n.role = Role::Member;
    }
    for h in a.all_heads() {
        nodes[h].role = Role::ClusterHead;
    }
    for &g in &a.gateways {
        nodes[g].role = Role::Gateway;
    }
    for &d in &a.dormant {
        nodes[d].role = Role::Dormant;
    }
}
