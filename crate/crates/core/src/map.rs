//! Walkable map as an undirected weighted graph with deterministic
//! shortest paths.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::f64::consts::TAU;

use rand::Rng;
use thiserror::Error;

use crate::config::StadiumParams;

/// A point in the plane, meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn lerp(self, other: Point, t: f64) -> Point {
        Point::new(self.x + (other.x - self.x) * t, self.y + (other.y - self.y) * t)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("line {line}: malformed linestring: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: a linestring needs at least 2 points")]
    TooFewPoints { line: usize },
    #[error("self-loop or zero-length edge at vertex {0}")]
    ZeroLength(usize),
    #[error("map is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("map has no vertices")]
    Empty,
    #[error("vertex {0} out of range")]
    NoSuchVertex(usize),
    #[error("vertex {to} unreachable from {from}")]
    Unreachable { from: usize, to: usize },
    #[error("degenerate map parameters: {0}")]
    Degenerate(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub length: f64,
}

/// Vertices worth placing stationary nodes on.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Landmarks {
    pub ring: Vec<usize>,
    pub exits: Vec<usize>,
}

/// Connected undirected graph; immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct MapGraph {
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    /// Per vertex, `(neighbor, length)` sorted by neighbor index.
    adjacency: Vec<Vec<(usize, f64)>>,
    landmarks: Landmarks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    pub vertices: Vec<usize>,
    pub total_length: f64,
}

impl MapGraph {
    /// Build and validate a graph. Duplicate edges are merged; self-loops,
    /// zero-length edges and disconnected graphs are rejected.
    pub fn new(vertices: Vec<Point>, edge_list: &[(usize, usize)]) -> Result<MapGraph, MapError> {
        if vertices.is_empty() {
            return Err(MapError::Empty);
        }
        let mut adjacency: Vec<Vec<(usize, f64)>> = vec![Vec::new(); vertices.len()];
        let mut edges = Vec::new();
        for &(a, b) in edge_list {
            if a >= vertices.len() {
                return Err(MapError::NoSuchVertex(a));
            }
            if b >= vertices.len() {
                return Err(MapError::NoSuchVertex(b));
            }
            let length = vertices[a].distance(vertices[b]);
            if a == b || !(length > 0.0) {
                return Err(MapError::ZeroLength(a));
            }
            if adjacency[a].iter().any(|&(n, _)| n == b) {
                continue;
            }
            adjacency[a].push((b, length));
            adjacency[b].push((a, length));
            edges.push(Edge { a, b, length });
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(n, _)| n);
        }
        let graph = MapGraph {
            vertices,
            edges,
            adjacency,
            landmarks: Landmarks::default(),
        };
        let components = graph.component_count();
        if components != 1 {
            return Err(MapError::Disconnected { components });
        }
        Ok(graph)
    }

    pub fn with_landmarks(mut self, landmarks: Landmarks) -> Self {
        self.landmarks = landmarks;
        self
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn edge_length(&self, a: usize, b: usize) -> Option<f64> {
        self.adjacency
            .get(a)?
            .iter()
            .find(|&&(n, _)| n == b)
            .map(|&(_, l)| l)
    }

    /// Ring and exit vertices. Maps loaded from files have no tagged ring,
    /// so all vertices stand in for it and dead ends stand in for exits.
    pub fn landmarks(&self) -> Landmarks {
        let mut lm = self.landmarks.clone();
        if lm.ring.is_empty() {
            lm.ring = (0..self.vertices.len()).collect();
        }
        if lm.exits.is_empty() {
            lm.exits = (0..self.vertices.len())
                .filter(|&v| self.adjacency[v].len() == 1)
                .collect();
            if lm.exits.is_empty() {
                lm.exits = lm.ring.clone();
            }
        }
        lm
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.vertices.len()];
        let mut components = 0;
        for start in 0..self.vertices.len() {
            if seen[start] {
                continue;
            }
            components += 1;
            let mut stack = vec![start];
            seen[start] = true;
            while let Some(v) = stack.pop() {
                for &(n, _) in &self.adjacency[v] {
                    if !seen[n] {
                        seen[n] = true;
                        stack.push(n);
                    }
                }
            }
        }
        components
    }

    /// Distances from `target` to every vertex.
    fn distances_to(&self, target: usize) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.vertices.len()];
        let mut heap = BinaryHeap::new();
        dist[target] = 0.0;
        heap.push(QueueEntry {
            dist: 0.0,
            vertex: target,
        });
        while let Some(QueueEntry { dist: d, vertex: v }) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(n, len) in &self.adjacency[v] {
                let nd = d + len;
                if nd < dist[n] {
                    dist[n] = nd;
                    heap.push(QueueEntry { dist: nd, vertex: n });
                }
            }
        }
        dist
    }

    /// Minimum-length path. Among equally short paths the one with the
    /// lexicographically smallest vertex sequence wins, so results do not
    /// depend on heap internals.
    pub fn shortest_path(&self, from: usize, to: usize) -> Result<Path, MapError> {
        let n = self.vertices.len();
        if from >= n {
            return Err(MapError::NoSuchVertex(from));
        }
        if to >= n {
            return Err(MapError::NoSuchVertex(to));
        }
        if from == to {
            return Ok(Path {
                vertices: vec![from],
                total_length: 0.0,
            });
        }
        let dist = self.distances_to(to);
        if !dist[from].is_finite() {
            return Err(MapError::Unreachable { from, to });
        }
        // Walk forward, always stepping to the smallest-index neighbor that
        // stays on some shortest path.
        let mut vertices = vec![from];
        let mut total_length = 0.0;
        let mut at = from;
        while at != to {
            let remaining = dist[at];
            let tol = TIE_EPS * remaining.max(1.0);
            let (next, len) = self.adjacency[at]
                .iter()
                .copied()
                .find(|&(nb, len)| len + dist[nb] <= remaining + tol && dist[nb] < remaining)
                .ok_or(MapError::Unreachable { from, to })?;
            vertices.push(next);
            total_length += len;
            at = next;
        }
        Ok(Path {
            vertices,
            total_length,
        })
    }

    /// Vertex closest to `p`; ties go to the smaller index.
    pub fn nearest_vertex(&self, p: Point) -> usize {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, v) in self.vertices.iter().enumerate() {
            let d = (v.x - p.x).powi(2) + (v.y - p.y).powi(2);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        best
    }

    /// One `LINESTRING` per edge; `parse_map` reads it back.
    pub fn to_linestrings(&self) -> String {
        let mut s = String::new();
        for e in &self.edges {
            let a = self.vertices[e.a];
            let b = self.vertices[e.b];
            s.push_str(&format!("LINESTRING ({} {}, {} {})\n", a.x, a.y, b.x, b.y));
        }
        s
    }
}

/// Relative tolerance under which two path lengths count as a tie.
pub const TIE_EPS: f64 = 1e-9;

#[derive(Debug, PartialEq)]
struct QueueEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    // Reversed: BinaryHeap is a max-heap.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn parse_point(s: &str, line: usize) -> Result<Point, MapError> {
    let mut it = s.split_whitespace();
    let bad = |m: &str| MapError::Malformed {
        line,
        message: format!("{m}: `{}`", s.trim()),
    };
    let x: f64 = it
        .next()
        .ok_or_else(|| bad("missing x"))?
        .parse()
        .map_err(|_| bad("bad x"))?;
    let y: f64 = it
        .next()
        .ok_or_else(|| bad("missing y"))?
        .parse()
        .map_err(|_| bad("bad y"))?;
    if it.next().is_some() {
        return Err(bad("expected two coordinates"));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(bad("non-finite coordinate"));
    }
    Ok(Point::new(x, y))
}

/// Parse a map file: one `LINESTRING (x1 y1, x2 y2, ...)` per line.
/// Points with identical coordinates become one vertex.
pub fn parse_map(text: &str) -> Result<MapGraph, MapError> {
    let mut vertices: Vec<Point> = Vec::new();
    let mut index: HashMap<(u64, u64), usize> = HashMap::new();
    let mut edges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let l = raw.trim();
        if l.is_empty() || l.starts_with('#') {
            continue;
        }
        let rest = l
            .strip_prefix("LINESTRING")
            .ok_or_else(|| MapError::Malformed {
                line,
                message: "expected LINESTRING".into(),
            })?
            .trim();
        let inner = rest
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| MapError::Malformed {
                line,
                message: "expected parenthesised point list".into(),
            })?;
        let points = inner
            .split(',')
            .map(|p| parse_point(p, line))
            .collect::<Result<Vec<_>, _>>()?;
        if points.len() < 2 {
            return Err(MapError::TooFewPoints { line });
        }
        let ids: Vec<usize> = points
            .iter()
            .map(|p| {
                // +0.0 normalises -0.0 so both spellings dedupe.
                let key = ((p.x + 0.0).to_bits(), (p.y + 0.0).to_bits());
                *index.entry(key).or_insert_with(|| {
                    vertices.push(*p);
                    vertices.len() - 1
                })
            })
            .collect();
        for w in ids.windows(2) {
            edges.push((w[0], w[1]));
        }
    }
    MapGraph::new(vertices, &edges)
}

/// Farthest distance any synthetic-map vertex lies from the map center.
pub fn stadium_extent(p: &StadiumParams) -> f64 {
    p.ring_radius * EXIT_RADIUS_FACTOR + p.road_length
}

const EXIT_RADIUS_FACTOR: f64 = 1.3;
const ROAD_SEGMENTS: usize = 3;
const MAX_ROAD_BEND: f64 = 0.15;

/// Synthetic stadium: a polygonal concourse ring, radial corridors out to
/// exit vertices, and a road leading away from every exit.
pub fn generate_stadium_map<R: Rng + ?Sized>(
    params: &StadiumParams,
    center: Point,
    rng: &mut R,
) -> Result<MapGraph, MapError> {
    if !(params.ring_radius > 0.0) {
        return Err(MapError::Degenerate("ring radius must be positive".into()));
    }
    if params.exits < 2 {
        return Err(MapError::Degenerate("at least 2 exits required".into()));
    }
    if !(params.road_length > 0.0) {
        return Err(MapError::Degenerate("road length must be positive".into()));
    }
    let per_exit = 16usize.div_ceil(params.exits).max(2);
    let ring_n = per_exit * params.exits;

    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    let at = |radius: f64, angle: f64| {
        Point::new(center.x + radius * angle.cos(), center.y + radius * angle.sin())
    };

    for i in 0..ring_n {
        vertices.push(at(params.ring_radius, TAU * i as f64 / ring_n as f64));
        edges.push((i, (i + 1) % ring_n));
    }
    let ring: Vec<usize> = (0..ring_n).collect();

    let exit_radius = params.ring_radius * EXIT_RADIUS_FACTOR;
    let mut exits = Vec::with_capacity(params.exits);
    for k in 0..params.exits {
        let ring_vertex = k * per_exit;
        let angle = TAU * ring_vertex as f64 / ring_n as f64;
        let exit = vertices.len();
        vertices.push(at(exit_radius, angle));
        edges.push((ring_vertex, exit));
        exits.push(exit);

        let heading = angle + rng.gen_range(-MAX_ROAD_BEND..=MAX_ROAD_BEND);
        let start = vertices[exit];
        let step = params.road_length / ROAD_SEGMENTS as f64;
        let mut prev = exit;
        for s in 1..=ROAD_SEGMENTS {
            let lateral = if s < ROAD_SEGMENTS {
                rng.gen_range(-0.1..=0.1) * step
            } else {
                0.0
            };
            let along = step * s as f64;
            let p = Point::new(
                start.x + along * heading.cos() - lateral * heading.sin(),
                start.y + along * heading.sin() + lateral * heading.cos(),
            );
            let v = vertices.len();
            vertices.push(p);
            edges.push((prev, v));
            prev = v;
        }
    }

    Ok(MapGraph::new(vertices, &edges)?.with_landmarks(Landmarks { ring, exits }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_segment() {
        let g = parse_map("LINESTRING (0 0, 10 0)").unwrap();
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.edges()[0].length, 10.0);
    }

    #[test]
    fn shared_endpoint_dedups() {
        let g = parse_map("LINESTRING (0 0, 10 0)\nLINESTRING (10 0, 10 5)\n").unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn bad_maps() {
        assert_eq!(
            parse_map("LINESTRING (0 0)"),
            Err(MapError::TooFewPoints { line: 1 })
        );
        assert!(matches!(parse_map("POINT (0 0)"), Err(MapError::Malformed { .. })));
        assert!(matches!(
            parse_map("LINESTRING (0 0, a 1)"),
            Err(MapError::Malformed { .. })
        ));
        assert_eq!(
            parse_map("LINESTRING (0 0, 1 0)\nLINESTRING (5 5, 6 5)"),
            Err(MapError::Disconnected { components: 2 })
        );
        assert_eq!(
            parse_map("LINESTRING (0 0, 0 0)"),
            Err(MapError::ZeroLength(0))
        );
    }

    #[test]
    fn identity_path() {
        let g = parse_map("LINESTRING (0 0, 10 0)").unwrap();
        let p = g.shortest_path(1, 1).unwrap();
        assert_eq!(p.vertices, vec![1]);
        assert_eq!(p.total_length, 0.0);
        assert_eq!(g.shortest_path(0, 7), Err(MapError::NoSuchVertex(7)));
    }

    #[test]
    fn unequal_cycle_takes_short_arc() {
        // 0-(3)-1-(4)-2 and 0-(10)-3-(10)-2 as a 4-cycle.
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(3.0, 0.0),
            Point::new(3.0, 4.0),
            Point::new(-6.0, 8.0),
        ];
        let g = MapGraph::new(v, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = g.shortest_path(0, 2).unwrap();
        assert_eq!(p.vertices, vec![0, 1, 2]);
        assert_eq!(p.total_length, 7.0);
    }

    #[test]
    fn equal_arcs_take_smaller_next_vertex() {
        // Square: 0 and 2 opposite corners, both arcs length 20.
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(10.0, 10.0),
            Point::new(0.0, 10.0),
        ];
        let g = MapGraph::new(v, &[(0, 3), (3, 2), (2, 1), (1, 0)]).unwrap();
        assert_eq!(g.shortest_path(0, 2).unwrap().vertices, vec![0, 1, 2]);
        assert_eq!(g.shortest_path(2, 0).unwrap().vertices, vec![2, 1, 0]);
        assert_eq!(g.shortest_path(1, 3).unwrap().vertices, vec![1, 0, 3]);
    }

    #[test]
    fn nearest_vertex_ties_go_low() {
        let v = vec![
            Point::new(0.0, 0.0),
            Point::new(10.0, 0.0),
            Point::new(20.0, 0.0),
            Point::new(30.0, 0.0),
            Point::new(0.0, 20.0),
        ];
        let g = MapGraph::new(v, &[(0, 1), (1, 2), (2, 3), (0, 4)]).unwrap();
        assert_eq!(g.nearest_vertex(Point::new(30.0, 0.0)), 3);
        // (10, 12.5) is 12.5 m from both vertex 1 and vertex 4.
        assert_eq!(g.nearest_vertex(Point::new(10.0, 12.5)), 1);
    }

    #[test]
    fn stadium_map_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = StadiumParams {
            ring_radius: 100.0,
            exits: 8,
            road_length: 150.0,
        };
        let g = generate_stadium_map(&p, Point::new(400.0, 400.0), &mut rng).unwrap();
        let lm = g.landmarks();
        assert!(lm.ring.len() >= 8);
        assert_eq!(lm.exits.len(), 8);
        // Every exit carries exactly one road leading outward.
        for &e in &lm.exits {
            assert_eq!(g.neighbors(e).len(), 2);
        }
        let dead_ends = (0..g.vertex_count()).filter(|&v| g.neighbors(v).len() == 1).count();
        assert_eq!(dead_ends, 8);
        for v in g.vertices() {
            assert!(v.distance(Point::new(400.0, 400.0)) <= stadium_extent(&p) + 1e-9);
        }
    }

    #[test]
    fn stadium_map_small_and_deterministic() {
        let p = StadiumParams {
            ring_radius: 1e-3,
            exits: 2,
            road_length: 1e-3,
        };
        let g = generate_stadium_map(&p, Point::default(), &mut ChaCha8Rng::seed_from_u64(1));
        assert!(g.is_ok());

        let p = StadiumParams::default();
        let a = generate_stadium_map(&p, Point::default(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = generate_stadium_map(&p, Point::default(), &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);

        let bad = StadiumParams {
            ring_radius: 0.0,
            ..StadiumParams::default()
        };
        assert!(matches!(
            generate_stadium_map(&bad, Point::default(), &mut ChaCha8Rng::seed_from_u64(3)),
            Err(MapError::Degenerate(_))
        ));
    }
}
