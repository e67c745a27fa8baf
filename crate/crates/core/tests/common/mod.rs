//! Round-level invariant checks over random small networks.

use std::collections::BTreeSet;

use proptest::prelude::*;
use wsn_lifesim::engine::{RoundOutcome, Simulation};
use wsn_lifesim::protocols::cluster_cap;
use wsn_lifesim::routing::Hop;
use wsn_lifesim::{NetworkConfig, NextHopRule, NodeState, Position, Protocol, SinkMode};

#[derive(Debug, Clone)]
pub struct Case {
    pub config: NetworkConfig,
}

pub fn case() -> impl Strategy<Value = Case> {
    (
        1usize..=30,
        0usize..4,
        (20.0f64..300.0, 20.0f64..300.0),
        (-100.0f64..400.0, -100.0f64..500.0),
        (any::<bool>(), 0.0f64..150.0),
        0.002f64..0.2,
        any::<u64>(),
        1u32..60,
        any::<bool>(),
    )
        .prop_map(
            |(n, p, (w, h), (sx, sy), (mobile, speed), e0, seed, rounds, energy_first)| Case {
                config: NetworkConfig {
                    node_count: n,
                    protocol: Protocol::ALL[p],
                    field_width: w,
                    field_height: h,
                    sink_initial: Position { x: sx, y: sy },
                    sink_mode: if mobile {
                        SinkMode::Mobile
                    } else {
                        SinkMode::Static
                    },
                    sink_speed: speed,
                    initial_energy: e0,
                    rng_seed: seed,
                    rounds_max: rounds,
                    next_hop_rule: if energy_first {
                        NextHopRule::EnergyFirst
                    } else {
                        NextHopRule::Score
                    },
                    ..NetworkConfig::default()
                },
            },
        )
}

pub fn check_round(
    before: &[NodeState],
    after: &[NodeState],
    o: &RoundOutcome,
) -> Result<(), TestCaseError> {
    let a = &o.assignment;
    let alive: BTreeSet<usize> = before
        .iter()
        .filter(|n| n.is_alive())
        .map(|n| n.id)
        .collect();

    // role partition
    let mut seen = BTreeSet::new();
    let all = a
        .all_heads()
        .chain(a.gateways.iter().copied())
        .chain(a.dormant.iter().copied())
        .chain(a.members.keys().copied())
        .chain(a.direct.iter().copied());
    for id in all {
        prop_assert!(seen.insert(id), "node {} holds two roles", id);
    }
    prop_assert_eq!(&seen, &alive);

    // phase-1 cap: overflow only once every head in the layer is full
    if a.layered {
        for (i, heads) in a.heads.iter().enumerate().skip(1) {
            if heads.is_empty() {
                continue;
            }
            let counts: Vec<usize> = heads
                .iter()
                .map(|h| a.members.values().filter(|&&x| x == *h).count())
                .collect();
            let members: usize = counts.iter().sum();
            let layer_size = members + heads.len();
            let cap = cluster_cap(layer_size, heads.len());
            let within: usize = counts.iter().map(|&c| c.min(cap)).sum();
            prop_assert_eq!(within, members.min(cap * heads.len()), "layer {}", i + 1);
        }
    }

    // forwarding tree: members to their head, heads strictly inward
    let layer = |id: usize| after[id].layer;
    for id in &alive {
        let parent = o.tree.parent[*id];
        if a.dormant.contains(id) {
            prop_assert!(parent.is_none());
            continue;
        }
        prop_assert!(parent.is_some(), "node {} has no route", id);
        prop_assert!(o.tree.path(*id).len() <= before.len() + 1);
        if let Some(Hop::Node(p)) = parent {
            if let Some(&h) = a.members.get(id) {
                prop_assert_eq!(p, h);
            } else {
                prop_assert!(a.layered);
                prop_assert!(
                    layer(p) < layer(*id),
                    "{} (layer {:?}) -> {} (layer {:?})",
                    id,
                    layer(*id),
                    p,
                    layer(p)
                );
            }
        }
    }

    // ledger
    let spent: f64 =
        before.iter().map(|n| n.energy).sum::<f64>() - after.iter().map(|n| n.energy).sum::<f64>();
    let charged = o.charged();
    let scale = o.energy_before.max(1e-300);
    prop_assert!(
        ((spent - charged) / scale).abs() <= 1e-12,
        "spent {} charged {}",
        spent,
        charged
    );
    prop_assert!(
        (o.energy_before - before.iter().map(|n| n.energy).sum::<f64>()).abs() <= 1e-12 * scale
    );

    // monotone decay, per node
    for (b, c) in before.iter().zip(after) {
        prop_assert!(c.energy <= b.energy);
        prop_assert!(c.energy >= 0.0);
        prop_assert!(b.is_alive() || !c.is_alive());
    }

    // dormant nodes spend nothing
    for &d in &a.dormant {
        prop_assert_eq!(o.traffic.debits[d], 0.0);
        prop_assert_eq!(o.beacon_debits[d], 0.0);
        prop_assert_eq!(after[d].energy, before[d].energy);
    }
    Ok(())
}

/// Steps a whole run, checking every round.
pub fn check_run(c: &Case) -> Result<(), TestCaseError> {
    let mut sim = Simulation::new(c.config.clone()).unwrap();
    let mut last_alive = sim.alive();
    let mut last_energy = sim.total_energy();
    while !sim.is_finished() {
        let before = sim.nodes().to_vec();
        let o = sim.step().unwrap();
        check_round(&before, sim.nodes(), &o)?;
        prop_assert!(o.metrics.alive <= last_alive);
        prop_assert!(o.metrics.total_energy <= last_energy);
        prop_assert_eq!(o.metrics.deaths_this_round, last_alive - o.metrics.alive);
        last_alive = o.metrics.alive;
        last_energy = o.metrics.total_energy;
    }
    let s = sim.summary();
    let [f, h, l] = s.censored();
    prop_assert!(f <= h && h <= l && l <= s.rounds_executed);
    Ok(())
}
