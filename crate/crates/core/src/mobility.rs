//! Shortest-path map-based movement: walk to a random vertex along the
//! shortest path at a per-leg random speed, pause, repeat.

use rand::Rng;

use crate::config::{GroupConfig, Placement, Span};
use crate::map::{MapGraph, Path, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MovementMode {
    Moving,
    Paused,
    Stationary,
}

/// A path being walked, with the distance covered so far.
#[derive(Debug, Clone, PartialEq)]
pub struct Leg {
    pub path: Path,
    cumulative: Vec<f64>,
    progress: f64,
    segment: usize,
}

impl Leg {
    pub fn new(path: Path, map: &MapGraph) -> Leg {
        let mut cumulative = Vec::with_capacity(path.vertices.len());
        let mut acc = 0.0;
        cumulative.push(0.0);
        for w in path.vertices.windows(2) {
            acc += map.edge_length(w[0], w[1]).expect("path follows map edges");
            cumulative.push(acc);
        }
        Leg {
            path,
            cumulative,
            progress: 0.0,
            segment: 0,
        }
    }

    pub fn progress(&self) -> f64 {
        self.progress
    }

    pub fn length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    pub fn destination(&self) -> usize {
        *self.path.vertices.last().unwrap()
    }

    /// Current segment as `(from vertex, to vertex)`; `None` on a
    /// single-vertex path.
    pub fn current_segment(&self) -> Option<(usize, usize)> {
        let v = &self.path.vertices;
        (v.len() >= 2).then(|| (v[self.segment], v[self.segment + 1]))
    }

    fn set_progress(&mut self, progress: f64) {
        self.progress = progress.clamp(0.0, self.length());
        let last = self.cumulative.len().saturating_sub(2);
        while self.segment < last && self.cumulative[self.segment + 1] <= self.progress {
            self.segment += 1;
        }
    }

    fn position(&self, map: &MapGraph) -> Point {
        let Some((a, b)) = self.current_segment() else {
            return map.vertex(self.path.vertices[0]);
        };
        let start = self.cumulative[self.segment];
        let len = self.cumulative[self.segment + 1] - start;
        let t = ((self.progress - start) / len).clamp(0.0, 1.0);
        map.vertex(a).lerp(map.vertex(b), t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MovementState {
    pub mode: MovementMode,
    pub leg: Option<Leg>,
    /// m/s for the current leg
    pub speed: f64,
    pub pause_until: f64,
    pub position: Point,
    /// Last vertex reached (start vertex of the current leg).
    pub vertex: usize,
    pub legs_completed: u64,
    /// Meters walked since placement.
    pub distance: f64,
}

fn draw<R: Rng + ?Sized>(span: Span<f64>, rng: &mut R) -> f64 {
    if span.min >= span.max {
        span.min
    } else {
        rng.gen_range(span.min..=span.max)
    }
}

impl MovementState {
    fn at_vertex(mode: MovementMode, vertex: usize, map: &MapGraph) -> MovementState {
        MovementState {
            mode,
            leg: None,
            speed: 0.0,
            pause_until: 0.0,
            position: map.vertex(vertex),
            vertex,
            legs_completed: 0,
            distance: 0.0,
        }
    }

    /// A node already part-way along `path`.
    pub fn on_path(path: Path, map: &MapGraph, progress: f64, speed: f64) -> MovementState {
        let mut leg = Leg::new(path, map);
        leg.set_progress(progress);
        let vertex = leg.path.vertices[0];
        let position = leg.position(map);
        MovementState {
            mode: MovementMode::Moving,
            leg: Some(leg),
            speed,
            pause_until: 0.0,
            position,
            vertex,
            legs_completed: 0,
            distance: 0.0,
        }
    }

    /// Initial state for the `member`-th node of `group`.
    pub fn init_placement<R: Rng + ?Sized>(
        group: &GroupConfig,
        member: usize,
        map: &MapGraph,
        rng: &mut R,
    ) -> MovementState {
        let landmarks = map.landmarks();
        let spread = |list: &[usize]| list[member * list.len() / group.count.max(1) % list.len()];
        let vertex = match group.placement {
            Placement::Ring => spread(&landmarks.ring),
            Placement::Exit => spread(&landmarks.exits),
            Placement::Random => rng.gen_range(0..map.vertex_count()),
        };
        if group.is_mobile() {
            let mut s = MovementState::at_vertex(MovementMode::Paused, vertex, map);
            s.plan_next_leg(map, group, rng);
            s
        } else {
            MovementState::at_vertex(MovementMode::Stationary, vertex, map)
        }
    }

    /// Pick a new destination (uniform over vertices other than the current
    /// one), route to it and draw a fresh speed.
    pub fn plan_next_leg<R: Rng + ?Sized>(&mut self, map: &MapGraph, group: &GroupConfig, rng: &mut R) {
        let n = map.vertex_count();
        if n < 2 {
            return;
        }
        let mut dest = rng.gen_range(0..n - 1);
        if dest >= self.vertex {
            dest += 1;
        }
        let path = map
            .shortest_path(self.vertex, dest)
            .expect("validated maps are connected");
        self.leg = Some(Leg::new(path, map));
        self.speed = draw(group.speed, rng);
        self.mode = MovementMode::Moving;
    }

    /// Advance by `dt` seconds starting at simulation time `now`.
    ///
    /// Arriving nodes stop at the destination vertex (leftover time in the
    /// tick is discarded) and pause until `now + dt + pause`.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        map: &MapGraph,
        group: &GroupConfig,
        now: f64,
        dt: f64,
        rng: &mut R,
    ) {
        match self.mode {
            MovementMode::Stationary => return,
            MovementMode::Paused => {
                if now < self.pause_until {
                    return;
                }
                self.plan_next_leg(map, group, rng);
            }
            MovementMode::Moving => {}
        }
        let Some(leg) = self.leg.as_mut() else {
            return;
        };
        let before = leg.progress;
        leg.set_progress(before + self.speed * dt);
        self.distance += leg.progress - before;
        if leg.progress >= leg.length() {
            self.vertex = leg.destination();
            self.position = map.vertex(self.vertex);
            self.leg = None;
            self.legs_completed += 1;
            self.mode = MovementMode::Paused;
            self.pause_until = now + dt + draw(group.pause, rng);
        } else {
            self.position = leg.position(map);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Movement, Roles};
    use crate::map::MapGraph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(speed: (f64, f64), pause: (f64, f64), movement: Movement) -> GroupConfig {
        GroupConfig {
            id: "g".into(),
            count: 1,
            movement,
            speed: Span::new(speed.0, speed.1),
            pause: Span::new(pause.0, pause.1),
            interfaces: vec!["bt".into()],
            roles: Roles::default(),
            placement: Placement::Random,
        }
    }

    fn line_map() -> MapGraph {
        MapGraph::new(
            vec![Point::new(0.0, 0.0), Point::new(10.0, 0.0)],
            &[(0, 1)],
        )
        .unwrap()
    }

    #[test]
    fn stationary_never_moves() {
        let map = line_map();
        let g = group((0.0, 0.0), (0.0, 0.0), Movement::Stationary);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = MovementState::init_placement(&g, 0, &map, &mut rng);
        let start = s.position;
        for t in 0..100 {
            s.step(&map, &g, t as f64, 3.0, &mut rng);
        }
        assert_eq!(s.position, start);
        assert_eq!(s.mode, MovementMode::Stationary);
    }

    #[test]
    fn partial_progress_interpolates() {
        let map = line_map();
        let g = group((1.0, 1.0), (0.0, 0.0), Movement::ShortestPathMapBased);
        let path = map.shortest_path(0, 1).unwrap();
        let mut s = MovementState::on_path(path, &map, 5.0, 1.0);
        s.step(&map, &g, 0.0, 2.0, &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(s.leg.as_ref().unwrap().progress(), 7.0);
        assert_eq!(s.position, Point::new(7.0, 0.0));
    }

    #[test]
    fn arrival_truncates_and_pauses() {
        let map = line_map();
        let g = group((1.0, 1.0), (5.0, 5.0), Movement::ShortestPathMapBased);
        let path = map.shortest_path(0, 1).unwrap();
        let mut s = MovementState::on_path(path, &map, 9.5, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        s.step(&map, &g, 10.0, 2.0, &mut rng);
        assert_eq!(s.mode, MovementMode::Paused);
        assert_eq!(s.position, Point::new(10.0, 0.0));
        assert_eq!(s.distance, 0.5);
        assert_eq!(s.pause_until, 17.0);
        // Still paused before 17 s.
        s.step(&map, &g, 16.0, 1.0, &mut rng);
        assert_eq!(s.position, Point::new(10.0, 0.0));
        s.step(&map, &g, 17.0, 1.0, &mut rng);
        assert_eq!(s.mode, MovementMode::Moving);
        assert_eq!(s.position, Point::new(9.0, 0.0));
    }

    #[test]
    fn legs_never_end_where_they_start() {
        let map = line_map();
        let g = group((0.4, 1.0), (0.0, 0.0), Movement::ShortestPathMapBased);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut s = MovementState::init_placement(&g, 0, &map, &mut rng);
        for _ in 0..50 {
            let leg = s.leg.as_ref().unwrap();
            assert_ne!(leg.path.vertices[0], leg.destination());
            assert!((0.4..=1.0).contains(&s.speed));
            s.plan_next_leg(&map, &g, &mut rng);
        }
    }

    #[test]
    fn placement_is_deterministic() {
        let map = line_map();
        let g = group((0.4, 1.0), (0.0, 120.0), Movement::ShortestPathMapBased);
        let a = MovementState::init_placement(&g, 0, &map, &mut ChaCha8Rng::seed_from_u64(11));
        let b = MovementState::init_placement(&g, 0, &map, &mut ChaCha8Rng::seed_from_u64(11));
        assert_eq!(a, b);
        assert!(map.vertices().contains(&a.position));
    }
}
