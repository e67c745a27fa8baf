//! Sink motion: static, or jumping along a circle around the field.
//!
//! A mobile sink advances a fixed arc per round. The arc `X` covered by an
//! angle of `t` degrees on a circle of radius `r` is `X = t·(π/180)·r`, so a
//! speed in meters per round converts to a per-round angular step.
//!
//! Announcement boundaries sit every `boundary_spacing` meters of arc. Each
//! crossing makes the sink broadcast its new position, which is when the
//! network re-layers.

use crate::model::{NetworkConfig, Position, SinkMode};

/// Arc length in meters swept by `t` degrees on a circle of radius `r`.
pub fn arc_step(t: f64, r: f64) -> f64 {
    t * (std::f64::consts::PI / 180.0) * r
}

/// Inverse of [`arc_step`]: degrees needed to cover `meters` of arc.
pub fn degrees_for_arc(meters: f64, r: f64) -> f64 {
    meters / r * (180.0 / std::f64::consts::PI)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SinkState {
    pub pos: Position,
    pub mode: SinkMode,
    pub orbit_center: Position,
    pub orbit_radius: f64,
    /// Current angle on the orbit, degrees in `[0, 360)`.
    pub angle: f64,
    pub step_degrees: f64,
    start_angle: f64,
    steps: u64,
}

impl SinkState {
    pub fn fixed(pos: Position) -> Self {
        Self {
            pos,
            mode: SinkMode::Static,
            orbit_center: pos,
            orbit_radius: 0.0,
            angle: 0.0,
            step_degrees: 0.0,
            start_angle: 0.0,
            steps: 0,
        }
    }

    /// Sink on a circle around `center` through `start`, moving `speed`
    /// meters of arc per round (counter-clockwise).
    pub fn orbiting(center: Position, radius: f64, start: Position, speed: f64) -> Self {
        let start_angle = if start == center {
            0.0
        } else {
            (start.y - center.y)
                .atan2(start.x - center.x)
                .to_degrees()
                .rem_euclid(360.0)
        };
        let mut s = Self {
            pos: center,
            mode: SinkMode::Mobile,
            orbit_center: center,
            orbit_radius: radius,
            angle: start_angle,
            step_degrees: degrees_for_arc(speed, radius),
            start_angle,
            steps: 0,
        };
        s.pos = s.point_at(start_angle);
        s
    }

    /// Builds the sink for a run. The orbit defaults to the field center with
    /// the radius reaching the configured initial position; a sink placed
    /// at or inside the field's half-diagonal orbits just outside the
    /// corners instead.
    pub fn from_config(config: &NetworkConfig) -> Self {
        match config.sink_mode {
            SinkMode::Static => Self::fixed(config.sink_initial),
            SinkMode::Mobile => {
                let center = config.orbit_center.unwrap_or_else(|| config.field_center());
                let half_diag = 0.5 * config.field_width.hypot(config.field_height);
                let radius = config.orbit_radius.unwrap_or_else(|| {
                    let r = center.distance(config.sink_initial);
                    if r > half_diag {
                        r
                    } else {
                        half_diag + 0.1 * half_diag
                    }
                });
                Self::orbiting(center, radius, config.sink_initial, config.sink_speed)
            }
        }
    }

    fn point_at(&self, angle_deg: f64) -> Position {
        let a = angle_deg.to_radians();
        Position::new(
            self.orbit_center.x + self.orbit_radius * a.cos(),
            self.orbit_center.y + self.orbit_radius * a.sin(),
        )
    }

    /// Arc length travelled so far.
    pub fn travelled(&self) -> f64 {
        arc_step(self.step_degrees * self.steps as f64, self.orbit_radius)
    }

    /// Moves the sink by `steps` rounds' worth of arc. Static sinks stay put.
    pub fn advance_by(&mut self, steps: u64) {
        if self.mode == SinkMode::Static {
            return;
        }
        self.steps += steps;
        // Angle from the start avoids drift from summing small increments.
        self.angle = (self.start_angle + self.step_degrees * self.steps as f64).rem_euclid(360.0);
        self.pos = self.point_at(self.angle);
    }

    /// One round's jump.
    pub fn advance(&mut self) {
        self.advance_by(1);
    }
}

/// Announcement boundaries crossed while the sink went from `before` to
/// `after` meters of cumulative arc.
pub fn boundaries_crossed(before: f64, after: f64, spacing: f64) -> u64 {
    let b = (before / spacing + 1e-9).floor();
    let a = (after / spacing + 1e-9).floor();
    (a - b).max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::distance;
    use proptest::prelude::*;

    #[test]
    fn arc_examples() {
        assert!((arc_step(10.0, 100.0) - 17.4533).abs() < 1e-3);
        assert_eq!(arc_step(0.0, 100.0), 0.0);
        assert!((arc_step(360.0, 42.0) - 2.0 * std::f64::consts::PI * 42.0).abs() < 1e-12);
        assert!((arc_step(degrees_for_arc(10.0, 200.0), 200.0) - 10.0).abs() < 1e-12);
    }

    #[test]
    fn table_sink_lies_on_default_orbit() {
        let config = NetworkConfig {
            sink_mode: SinkMode::Mobile,
            ..NetworkConfig::default()
        };
        let s = SinkState::from_config(&config);
        assert!((s.orbit_radius - 200.0).abs() < 1e-12);
        assert!(distance(s.pos, Position::new(100.0, 300.0)) < 1e-9);
        assert!(s.orbit_radius > 0.5 * 200f64.hypot(200.0));
    }

    #[test]
    fn ten_meters_per_round() {
        let config = NetworkConfig {
            sink_mode: SinkMode::Mobile,
            sink_speed: 10.0,
            ..NetworkConfig::default()
        };
        let mut s = SinkState::from_config(&config);
        s.advance();
        assert!((arc_step(s.step_degrees, s.orbit_radius) - 10.0).abs() < 1e-12);
        assert!((s.travelled() - 10.0).abs() < 1e-12);
        // Chord is just under the arc.
        let chord = distance(s.pos, Position::new(100.0, 300.0));
        assert!(chord < 10.0 && chord > 9.99);
    }

    #[test]
    fn full_orbit_returns_home() {
        let start = Position::new(100.0, 300.0);
        let mut s = SinkState::orbiting(Position::new(100.0, 100.0), 200.0, start, 0.0);
        s.step_degrees = 7.5;
        for _ in 0..48 {
            s.advance();
        }
        assert!(distance(s.pos, start) < 1e-9);
    }

    #[test]
    fn static_sink_never_moves() {
        let mut s = SinkState::fixed(Position::new(1.0, 2.0));
        s.advance_by(10);
        assert_eq!(s.pos, Position::new(1.0, 2.0));
        assert_eq!(s.travelled(), 0.0);
    }

    #[test]
    fn sink_inside_field_orbits_outside_corners() {
        let config = NetworkConfig {
            sink_mode: SinkMode::Mobile,
            sink_initial: Position::new(100.0, 100.0),
            ..NetworkConfig::default()
        };
        let s = SinkState::from_config(&config);
        assert!(s.orbit_radius > 0.5 * 200f64.hypot(200.0));
    }

    #[test]
    fn crossings() {
        assert_eq!(boundaries_crossed(0.0, 10.0, 10.0), 1);
        assert_eq!(boundaries_crossed(10.0, 58.0, 10.0), 4);
        assert_eq!(boundaries_crossed(58.0, 106.0, 10.0), 5);
        assert_eq!(boundaries_crossed(3.0, 8.0, 10.0), 0);
        assert_eq!(boundaries_crossed(5.0, 5.0, 10.0), 0);
    }

    proptest! {
        #[test]
        fn stays_on_orbit(speed in 0.0f64..200.0, rounds in 0u64..2000) {
            let mut s = SinkState::orbiting(Position::new(50.0, 50.0), 120.0, Position::new(50.0, 170.0), speed);
            s.advance_by(rounds);
            prop_assert!((distance(s.pos, s.orbit_center) - 120.0).abs() < 1e-9);
        }

        #[test]
        fn advances_commute(speed in 0.0f64..200.0, a in 0u64..500, b in 0u64..500) {
            let start = Position::new(100.0, 300.0);
            let mut one = SinkState::orbiting(Position::new(100.0, 100.0), 200.0, start, speed);
            let mut two = one.clone();
            one.advance_by(a);
            one.advance_by(b);
            two.advance_by(a + b);
            prop_assert!(distance(one.pos, two.pos) < 1e-9);
        }

        #[test]
        fn crossing_count_tracks_distance(speed in 0.5f64..200.0, rounds in 1u64..300) {
            let spacing = 10.0;
            let total: u64 = (0..rounds)
                .map(|k| boundaries_crossed(k as f64 * speed, (k + 1) as f64 * speed, spacing))
                .sum();
            let expected = (rounds as f64 * speed / spacing + 1e-9).floor() as u64;
            prop_assert_eq!(total, expected);
        }
    }
}
