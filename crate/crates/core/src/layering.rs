//! Concentric distance bands around the sink.
//!
//! The band widths follow a growing recursion: the first band takes a fixed
//! fraction `f` of the span `Y`; each further band is the previous width
//! plus `f` of whatever span is left, for as long as the leftover can hold
//! it. The leftover that cannot is folded into the last band, so the widths
//! always add up to `Y`.
//!
//! Bands are measured from the sink outward, starting at the closest point of
//! the field, so layer 1 is the band of nodes nearest the sink.

use crate::model::{distance, NodeState, Position};

pub const DEFAULT_LAYER_FRACTION: f64 = 0.15;

#[derive(Clone, Debug, PartialEq)]
pub struct Layering {
    /// Band widths, layer 1 first.
    pub widths: Vec<f64>,
    /// Distance from the sink at which layer 1 begins.
    pub origin: f64,
}

/// Band widths for a span of `y` meters with the default seed fraction.
pub fn compute_layers(y: f64) -> Layering {
    compute_layers_with(y, DEFAULT_LAYER_FRACTION)
}

pub fn compute_layers_with(y: f64, fraction: f64) -> Layering {
    assert!(y > 0.0 && y.is_finite(), "span must be positive, got {y}");
    assert!(fraction > 0.0 && fraction < 1.0);
    let mut widths = vec![fraction * y];
    let mut rest = y - widths[0];
    loop {
        let prev = *widths.last().expect("non-empty");
        let next = prev + fraction * rest;
        if rest >= next {
            widths.push(next);
            rest -= next;
        } else {
            break;
        }
    }
    // Close exactly on the span instead of trusting the running remainder.
    let n = widths.len();
    let head: f64 = widths[..n - 1].iter().sum();
    widths[n - 1] = y - head;
    Layering {
        widths,
        origin: 0.0,
    }
}

/// Shortest distance from `p` to the `[0, w] × [0, h]` rectangle.
fn distance_to_field(p: Position, w: f64, h: f64) -> f64 {
    let dx = (0.0 - p.x).max(p.x - w).max(0.0);
    let dy = (0.0 - p.y).max(p.y - h).max(0.0);
    dx.hypot(dy)
}

impl Layering {
    /// Bands spanning the field as seen from `sink`: from the nearest point
    /// of the field to its farthest corner.
    pub fn for_sink(sink: Position, width: f64, height: f64, fraction: f64) -> Layering {
        let near = distance_to_field(sink, width, height);
        let far = [
            Position::new(0.0, 0.0),
            Position::new(width, 0.0),
            Position::new(0.0, height),
            Position::new(width, height),
        ]
        .into_iter()
        .map(|c| distance(sink, c))
        .fold(0.0, f64::max);
        let mut layering = compute_layers_with(far - near, fraction);
        layering.origin = near;
        layering
    }

    pub fn len(&self) -> usize {
        self.widths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.widths.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.widths.iter().sum()
    }

    /// Outer edge of every band, as distances from the sink.
    pub fn edges(&self) -> Vec<f64> {
        self.widths
            .iter()
            .scan(self.origin, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect()
    }

    /// 1-based layer for a node `d` meters from the sink. A node exactly on
    /// an edge belongs to the nearer band; anything past the last edge falls
    /// into the last band.
    pub fn layer_of(&self, d: f64) -> usize {
        let mut edge = self.origin;
        for (i, w) in self.widths.iter().enumerate() {
            edge += w;
            if d <= edge {
                return i + 1;
            }
        }
        self.widths.len()
    }
}

/// Tags every alive node with its band. Dead nodes lose their layer.
pub fn assign_layers(nodes: &mut [NodeState], layering: &Layering, sink: Position) {
    for node in nodes.iter_mut() {
        node.layer = node
            .is_alive()
            .then(|| layering.layer_of(distance(node.pos, sink)));
    }
}

/// Recomputes the bands for a new sink position and re-tags the nodes.
/// Energies are untouched.
pub fn relayer_on_sink_move(
    nodes: &mut [NodeState],
    new_sink: Position,
    width: f64,
    height: f64,
    fraction: f64,
) -> Layering {
    let layering = Layering::for_sink(new_sink, width, height, fraction);
    assign_layers(nodes, &layering, new_sink);
    layering
}
