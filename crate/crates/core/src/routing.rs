//! Per-round forwarding tree and traffic.
//!
//! Members report to their cluster head (first-layer members to a gateway).
//! Heads relay one aggregated packet to a head of the nearest nearer layer
//! that has any, or to a gateway, or straight to the sink when nothing nearer
//! is left. Gateways always deliver to the sink. Layer indices strictly
//! decrease along every path, so the tree cannot loop.

use crate::energy::{charge, cpu_cost, rx_cost, tx_cost, RadioParams};
use crate::error::{Error, Result};
use crate::model::{distance, ClusterAssignment, NextHopRule, NodeId, NodeState, Position};

/// Where a node sends its packet.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Hop {
    Node(NodeId),
    Sink,
}

/// Squared-distance softening for the relay score, m².
const SCORE_EPSILON: f64 = 1.0;

/// Best relay for `from` among `candidates`, or the sink if none is alive.
pub fn next_hop(
    nodes: &[NodeState],
    from: NodeId,
    candidates: &[NodeId],
    rule: NextHopRule,
) -> Hop {
    let origin = nodes[from].pos;
    let alive = candidates.iter().copied().filter(|&c| nodes[c].is_alive());
    let best = match rule {
        NextHopRule::Score => alive
            .map(|c| {
                let d = distance(origin, nodes[c].pos);
                (nodes[c].energy / (d * d + SCORE_EPSILON), c)
            })
            .max_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)))
            .map(|(_, c)| c),
        NextHopRule::EnergyFirst => alive
            .map(|c| (nodes[c].energy, distance(origin, nodes[c].pos), c))
            .max_by(|a, b| {
                a.0.total_cmp(&b.0)
                    .then(b.1.total_cmp(&a.1))
                    .then(b.2.cmp(&a.2))
            })
            .map(|(_, _, c)| c),
    };
    best.map_or(Hop::Sink, Hop::Node)
}

/// Parent pointers for one round plus a leaf-to-root schedule.
#[derive(Clone, Debug, PartialEq)]
pub struct ForwardingTree {
    /// `parent[id]` is `None` for nodes that do not transmit this round
    /// (dead or dormant).
    pub parent: Vec<Option<Hop>>,
    /// Hops from each transmitting node to the sink.
    pub depth: Vec<usize>,
    /// Transmitting nodes, deepest first, ties by ascending id.
    pub schedule: Vec<NodeId>,
}

impl ForwardingTree {
    /// Number of nodes whose parent is the sink.
    pub fn root_count(&self) -> usize {
        self.parent
            .iter()
            .filter(|p| **p == Some(Hop::Sink))
            .count()
    }

    /// Node ids along the path from `id` to the sink, starting with `id`.
    pub fn path(&self, id: NodeId) -> Vec<NodeId> {
        let mut path = vec![id];
        let mut cur = id;
        while let Some(Hop::Node(p)) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }
}

pub fn build_forwarding_tree(
    nodes: &[NodeState],
    assignment: &ClusterAssignment,
    rule: NextHopRule,
) -> Result<ForwardingTree> {
    let n = nodes.len();
    let mut parent: Vec<Option<Hop>> = vec![None; n];

    for &g in &assignment.gateways {
        parent[g] = Some(Hop::Sink);
    }
    for &d in &assignment.direct {
        parent[d] = Some(Hop::Sink);
    }
    for (&m, &h) in &assignment.members {
        parent[m] = Some(Hop::Node(h));
    }
    if assignment.layered {
        for (i, heads) in assignment.heads.iter().enumerate().skip(1) {
            // Nearest nearer layer with relays: deeper head layers, then the
            // gateways of layer 1.
            let candidates: &[NodeId] = assignment.heads[1..i]
                .iter()
                .rev()
                .find(|hs| hs.iter().any(|&h| nodes[h].is_alive()))
                .map(Vec::as_slice)
                .unwrap_or(&assignment.gateways);
            for &h in heads {
                parent[h] = Some(next_hop(nodes, h, candidates, rule));
            }
        }
        if let Some(first) = assignment.heads.first() {
            for &h in first {
                parent[h] = Some(Hop::Sink);
            }
        }
    } else {
        for h in assignment.all_heads() {
            parent[h] = Some(Hop::Sink);
        }
    }

    let mut depth = vec![0usize; n];
    for id in 0..n {
        if parent[id].is_none() {
            continue;
        }
        let mut steps = 1;
        let mut cur = id;
        while let Some(Hop::Node(p)) = parent[cur] {
            if steps > n {
                return Err(Error::ForwardingCycle(id));
            }
            steps += 1;
            cur = p;
        }
        depth[id] = steps;
    }
    let mut schedule: Vec<NodeId> = (0..n).filter(|&id| parent[id].is_some()).collect();
    schedule.sort_by(|&a, &b| depth[b].cmp(&depth[a]).then(a.cmp(&b)));
    Ok(ForwardingTree {
        parent,
        depth,
        schedule,
    })
}

/// Energy and delivery accounting for one round of traffic.
#[derive(Clone, Debug, PartialEq)]
pub struct TrafficReport {
    /// Joules debited per node id.
    pub debits: Vec<f64>,
    /// Packets that reached the sink.
    pub delivered: usize,
    /// Packets sent, including those lost to a dying sender or receiver.
    pub transmissions: usize,
}

impl TrafficReport {
    pub fn total(&self) -> f64 {
        self.debits.iter().sum()
    }
}

/// Plays the round's traffic in leaf-to-root order.
///
/// Each transmitting node sends one `packet_bits` packet to its parent,
/// paying `tx_cost` at that distance; the parent pays receive + processing
/// per packet that arrives. Relays forward a single aggregated packet no
/// matter how many they received. A node that dies stops acting for the
/// rest of the round and packets addressed to it are lost.
pub fn execute_round_traffic(
    tree: &ForwardingTree,
    radio: &RadioParams,
    nodes: &mut [NodeState],
    sink: Position,
) -> Result<TrafficReport> {
    let bits = radio.packet_bits;
    let threshold = radio.death_threshold();
    let rx = rx_cost(radio, bits) + cpu_cost(radio, bits);
    let mut report = TrafficReport {
        debits: vec![0.0; nodes.len()],
        delivered: 0,
        transmissions: 0,
    };
    for &id in &tree.schedule {
        if !nodes[id].is_alive() {
            continue;
        }
        let hop = tree.parent[id].expect("scheduled nodes have a parent");
        let target = match hop {
            Hop::Node(p) => nodes[p].pos,
            Hop::Sink => sink,
        };
        let cost = tx_cost(radio, bits, distance(nodes[id].pos, target));
        let sent = charge(&mut nodes[id], cost, threshold)?;
        report.debits[id] += sent.debited;
        if !sent.completed {
            continue;
        }
        report.transmissions += 1;
        match hop {
            Hop::Sink => report.delivered += 1,
            Hop::Node(p) => {
                if nodes[p].is_alive() {
                    let got = charge(&mut nodes[p], rx, threshold)?;
                    report.debits[p] += got.debited;
                }
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::RadioParams;
    use crate::model::{NextHopRule, Role};

    const RADIO: RadioParams = RadioParams::literal_table();

    fn node(id: NodeId, x: f64, y: f64, e: f64) -> NodeState {
        let mut n = NodeState::new(id, Position::new(x, y), 0.5);
        n.energy = e;
        n
    }

    #[test]
    fn next_hop_examples() {
        let nodes = vec![
            node(0, 0.0, 0.0, 0.5),
            node(1, 10.0, 0.0, 0.3),
            node(2, 20.0, 0.0, 0.3),
        ];
        assert_eq!(next_hop(&nodes, 0, &[2], NextHopRule::Score), Hop::Node(2));
        assert_eq!(
            next_hop(&nodes, 0, &[1, 2], NextHopRule::Score),
            Hop::Node(1)
        );
        assert_eq!(next_hop(&nodes, 0, &[], NextHopRule::Score), Hop::Sink);
        let mut dead = nodes.clone();
        dead[1].role = Role::Dead;
        dead[2].role = Role::Dead;
        assert_eq!(next_hop(&dead, 0, &[1, 2], NextHopRule::Score), Hop::Sink);
    }

    #[test]
    fn energy_first_rule_prefers_richer_relay() {
        let nodes = vec![
            node(0, 0.0, 0.0, 0.5),
            node(1, 10.0, 0.0, 0.1),
            node(2, 20.0, 0.0, 0.3),
        ];
        assert_eq!(
            next_hop(&nodes, 0, &[1, 2], NextHopRule::EnergyFirst),
            Hop::Node(2)
        );
        // Score: 0.1/101 ≈ 9.9e-4 vs 0.3/401 ≈ 7.5e-4.
        assert_eq!(
            next_hop(&nodes, 0, &[1, 2], NextHopRule::Score),
            Hop::Node(1)
        );
    }

    /// Four nodes: gateway 0 (layer 1), member 1 (layer 1), head 2 (layer 2),
    /// member 3 (layer 2).
    fn fixture() -> (Vec<NodeState>, ClusterAssignment) {
        let nodes = vec![
            node(0, 0.0, 10.0, 0.5),
            node(1, 5.0, 12.0, 0.5),
            node(2, 0.0, 40.0, 0.5),
            node(3, 10.0, 45.0, 0.5),
        ];
        let mut a = ClusterAssignment {
            heads: vec![vec![], vec![2]],
            gateways: vec![0],
            layered: true,
            ..ClusterAssignment::default()
        };
        a.members.insert(1, 0);
        a.members.insert(3, 2);
        (nodes, a)
    }

    #[test]
    fn two_layer_chain() {
        let (nodes, a) = fixture();
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        assert_eq!(t.parent[2], Some(Hop::Node(0)));
        assert_eq!(t.parent[0], Some(Hop::Sink));
        assert_eq!(t.path(3), vec![3, 2, 0]);
        assert_eq!(t.depth[3], 3);
        assert_eq!(t.schedule, vec![3, 1, 2, 0]);
        assert_eq!(t.root_count(), 1);
    }

    #[test]
    fn deep_layer_alone_goes_to_sink() {
        let nodes: Vec<_> = (0..3).map(|i| node(i, i as f64, 0.0, 0.5)).collect();
        let mut a = ClusterAssignment {
            heads: vec![vec![], vec![], vec![0]],
            layered: true,
            ..ClusterAssignment::default()
        };
        a.members.insert(1, 0);
        a.members.insert(2, 0);
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        assert_eq!(t.parent[0], Some(Hop::Sink));
    }

    #[test]
    fn empty_layer_is_bridged() {
        let nodes: Vec<_> = (0..3).map(|i| node(i, 0.0, 10.0 * i as f64, 0.5)).collect();
        let a = ClusterAssignment {
            heads: vec![vec![], vec![1], vec![], vec![2]],
            gateways: vec![0],
            layered: true,
            ..ClusterAssignment::default()
        };
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        assert_eq!(t.path(2), vec![2, 1, 0]);
    }

    #[test]
    fn single_direct_node_pays_one_hop() {
        let mut nodes = vec![node(0, 0.0, 0.0, 0.5)];
        let a = ClusterAssignment {
            direct: vec![0],
            ..ClusterAssignment::default()
        };
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        let sink = Position::new(0.0, 50.0);
        let r = execute_round_traffic(&t, &RADIO, &mut nodes, sink).unwrap();
        assert_eq!(r.debits[0], tx_cost(&RADIO, 4000, 50.0));
        assert_eq!(r.delivered, 1);
        assert!((nodes[0].energy - (0.5 - tx_cost(&RADIO, 4000, 50.0))).abs() < 1e-15);
    }

    #[test]
    fn head_charge_ledger() {
        // Head 0 with members 1..=3; sink 30 m above the head.
        let mut nodes = vec![
            node(0, 0.0, 0.0, 0.5),
            node(1, 3.0, 4.0, 0.5),
            node(2, -3.0, 4.0, 0.5),
            node(3, 0.0, -5.0, 0.5),
        ];
        let mut a = ClusterAssignment {
            heads: vec![vec![0]],
            ..ClusterAssignment::default()
        };
        for m in 1..=3 {
            a.members.insert(m, 0);
        }
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        let sink = Position::new(0.0, 30.0);
        let r = execute_round_traffic(&t, &RADIO, &mut nodes, sink).unwrap();
        let expected = 3.0 * rx_cost(&RADIO, 4000)
            + 3.0 * cpu_cost(&RADIO, 4000)
            + tx_cost(&RADIO, 4000, 30.0);
        assert!((r.debits[0] - expected).abs() <= 1e-12 * expected);
        for m in 1..=3 {
            assert_eq!(r.debits[m], tx_cost(&RADIO, 4000, 5.0));
        }
        assert_eq!(r.delivered, t.root_count());
        assert_eq!(r.transmissions, 4);
    }

    #[test]
    fn dying_relay_drops_later_packets() {
        // Head 0 can afford exactly one reception before it dies.
        let rx = rx_cost(&RADIO, 4000) + cpu_cost(&RADIO, 4000);
        let mut nodes = vec![
            node(0, 0.0, 0.0, rx * 1.5),
            node(1, 1.0, 0.0, 0.5),
            node(2, 2.0, 0.0, 0.5),
        ];
        let mut a = ClusterAssignment {
            heads: vec![vec![0]],
            ..ClusterAssignment::default()
        };
        a.members.insert(1, 0);
        a.members.insert(2, 0);
        let before: f64 = nodes.iter().map(|n| n.energy).sum();
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        let r = execute_round_traffic(&t, &RADIO, &mut nodes, Position::new(0.0, 100.0)).unwrap();
        assert_eq!(nodes[0].role, Role::Dead);
        assert_eq!(r.delivered, 0);
        let after: f64 = nodes.iter().map(|n| n.energy).sum();
        assert!(((before - after) - r.total()).abs() <= 1e-12 * before);
    }

    #[test]
    fn dormant_nodes_are_not_scheduled() {
        let (nodes, mut a) = fixture();
        a.members.remove(&1);
        a.dormant.push(1);
        let t = build_forwarding_tree(&nodes, &a, NextHopRule::Score).unwrap();
        assert_eq!(t.parent[1], None);
        assert!(!t.schedule.contains(&1));
    }
}
