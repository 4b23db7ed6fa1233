//! Scenario description: types, the `key = value` file format, validation
//! and parameter sweeps.
//!
//! A scenario file is flat UTF-8 text with one `key = value` per line and
//! `#` comments. Compound settings use dotted keys:
//!
//! ```text
//! simDuration = 12h
//! bufferSize = 5M
//! interface.bluetooth.bandwidth = 250k
//! interface.bluetooth.range = 15
//! group.audience.count = 50
//! group.audience.movement = shortest-path-map-based
//! router.protocol = epidemic
//! ```
//!
//! Durations accept `s`, `m` and `h` suffixes (bare numbers are seconds).
//! Sizes accept decimal `k` (10^3) and `M` (10^6) suffixes.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Inclusive `[min, max]` range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span<T> {
    pub min: T,
    pub max: T,
}

impl<T> Span<T> {
    pub const fn new(min: T, max: T) -> Self {
        Span { min, max }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Movement {
    ShortestPathMapBased,
    Stationary,
}

impl Movement {
    pub fn as_str(self) -> &'static str {
        match self {
            Movement::ShortestPathMapBased => "shortest-path-map-based",
            Movement::Stationary => "stationary",
        }
    }
}

/// Where a group's nodes are put at time zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Uniformly random map vertex.
    Random,
    /// Spread evenly over the concourse ring vertices.
    Ring,
    /// Spread evenly over the exit vertices.
    Exit,
}

impl Placement {
    pub fn as_str(self) -> &'static str {
        match self {
            Placement::Random => "random",
            Placement::Ring => "ring",
            Placement::Exit => "exit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Protocol {
    Epidemic,
    SprayAndWait,
}

impl Protocol {
    pub fn as_str(self) -> &'static str {
        match self {
            Protocol::Epidemic => "epidemic",
            Protocol::SprayAndWait => "spray-and-wait",
        }
    }
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Protocol {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "epidemic" => Ok(Protocol::Epidemic),
            "spray-and-wait" => Ok(Protocol::SprayAndWait),
            other => Err(format!("unknown protocol `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Roles {
    pub source: bool,
    pub destination: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroupConfig {
    pub id: String,
    pub count: usize,
    pub movement: Movement,
    /// m/s
    pub speed: Span<f64>,
    /// seconds
    pub pause: Span<f64>,
    pub interfaces: Vec<String>,
    pub roles: Roles,
    pub placement: Placement,
}

impl GroupConfig {
    pub fn is_mobile(&self) -> bool {
        self.movement == Movement::ShortestPathMapBased
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceConfig {
    pub name: String,
    /// bytes per second
    pub bandwidth: f64,
    /// meters
    pub range: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficConfig {
    /// seconds between consecutive message creations
    pub interval: Span<f64>,
    /// bytes
    pub size: Span<u64>,
    /// seconds
    pub ttl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RouterConfig {
    pub protocol: Protocol,
    /// Initial spray-and-wait copy budget `L`.
    pub copies: u32,
    /// Binary spray (halve the budget on each hand-off) instead of source spray.
    pub binary: bool,
}

/// Parameters of the synthetic stadium map.
#[derive(Debug, Clone, PartialEq)]
pub struct StadiumParams {
    pub ring_radius: f64,
    pub exits: usize,
    pub road_length: f64,
}

impl Default for StadiumParams {
    fn default() -> Self {
        StadiumParams {
            ring_radius: 100.0,
            exits: 8,
            road_length: 150.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MapSource {
    Synthetic(StadiumParams),
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub sim_duration: f64,
    pub tick: f64,
    pub world_size: (f64, f64),
    pub groups: Vec<GroupConfig>,
    pub interfaces: BTreeMap<String, InterfaceConfig>,
    pub traffic: TrafficConfig,
    pub router: RouterConfig,
    pub buffer_bytes: u64,
    pub map_source: MapSource,
    pub seed: u64,
    /// Declared node total; when present the group counts must add up to it.
    pub total_nodes: Option<usize>,
}

pub const DEFAULT_TICK: f64 = 1.0;
pub const DEFAULT_WORLD: (f64, f64) = (800.0, 800.0);
pub const DEFAULT_COPIES: u32 = 10;
pub const DEFAULT_MOBILE_PAUSE: Span<f64> = Span::new(0.0, 120.0);

/// Built-in stadium scenario, identical to `scenarios/stadium.conf`.
pub const STADIUM_SCENARIO: &str = include_str!("../scenarios/stadium.conf");

impl ScenarioConfig {
    /// The stadium evacuation scenario shipped with the crate.
    pub fn stadium() -> ScenarioConfig {
        parse_scenario(STADIUM_SCENARIO).expect("shipped scenario parses")
    }

    pub fn node_count(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Rescale group counts so they add up to `total`, keeping proportions
    /// (largest remainder) and at least one node per group.
    pub fn scaled_to(&self, total: usize) -> ScenarioConfig {
        let mut out = self.clone();
        let current = self.node_count();
        let n = self.groups.len();
        if n == 0 || current == 0 || total < n {
            return out;
        }
        let exact: Vec<f64> = self
            .groups
            .iter()
            .map(|g| g.count as f64 * total as f64 / current as f64)
            .collect();
        let mut counts: Vec<usize> = exact.iter().map(|x| (x.floor() as usize).max(1)).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        let mut sum: usize = counts.iter().sum();
        let mut i = 0;
        while sum < total {
            counts[order[i % n]] += 1;
            sum += 1;
            i += 1;
        }
        // Only reachable when the one-per-group floor overshoots.
        while sum > total {
            let largest = (0..n).max_by_key(|&k| (counts[k], usize::MAX - k)).unwrap();
            counts[largest] -= 1;
            sum -= 1;
        }
        for (g, c) in out.groups.iter_mut().zip(counts) {
            g.count = c;
        }
        if out.total_nodes.is_some() {
            out.total_nodes = Some(total);
        }
        out
    }

    pub fn max_message_size(&self) -> u64 {
        self.traffic.size.max
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: syntax error: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: bad value for `{key}`: {message}")]
    Type {
        line: usize,
        key: String,
        message: String,
    },
    #[error("missing required key `{key}`")]
    Missing { key: String },
}

/// One violated invariant, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub field: String,
    pub rule: String,
}

impl Finding {
    fn new(field: impl Into<String>, rule: impl Into<String>) -> Self {
        Finding {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

// ---------------------------------------------------------------------------
// Value parsing
// ---------------------------------------------------------------------------

pub fn parse_duration(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last() {
        Some('s') => (&s[..s.len() - 1], 1.0),
        Some('m') => (&s[..s.len() - 1], 60.0),
        Some('h') => (&s[..s.len() - 1], 3600.0),
        _ => (s, 1.0),
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a duration"))?;
    if !v.is_finite() {
        return Err(format!("`{s}` is not finite"));
    }
    Ok(v * mult)
}

pub fn parse_size(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (num, mult) = match s.chars().last() {
        Some('k') => (&s[..s.len() - 1], 1_000.0),
        Some('M') => (&s[..s.len() - 1], 1_000_000.0),
        _ => (s, 1.0),
    };
    let v: f64 = num
        .trim()
        .parse()
        .map_err(|_| format!("`{s}` is not a size"))?;
    let bytes = v * mult;
    if !bytes.is_finite() || bytes < 0.0 || bytes.fract() != 0.0 || bytes > u64::MAX as f64 {
        return Err(format!("`{s}` is not a whole number of bytes"));
    }
    Ok(bytes as u64)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", s.trim()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("`{}` is not finite", s.trim()))
    }
}

fn parse_pair<T>(s: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<(T, T), String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected `min,max`, got `{}`", s.trim()));
    }
    Ok((item(parts[0])?, item(parts[1])?))
}

fn parse_span<T: PartialOrd + Copy>(
    s: &str,
    item: impl Fn(&str) -> Result<T, String>,
) -> Result<Span<T>, String> {
    let (min, max) = parse_pair(s, item)?;
    if min > max {
        return Err("min exceeds max".to_string());
    }
    Ok(Span { min, max })
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        other => Err(format!("`{other}` is not a boolean")),
    }
}

fn parse_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(str::to_string)
        .collect()
}

// ---------------------------------------------------------------------------
// parse_scenario
// ---------------------------------------------------------------------------

#[derive(Default)]
struct GroupDraft {
    line: usize,
    count: Option<usize>,
    movement: Option<Movement>,
    speed: Option<Span<f64>>,
    pause: Option<Span<f64>>,
    interfaces: Option<Vec<String>>,
    roles: Roles,
    placement: Option<Placement>,
}

#[derive(Default)]
struct InterfaceDraft {
    bandwidth: Option<f64>,
    range: Option<f64>,
}

/// Parse scenario text. Omitted optional keys take their documented
/// defaults; unknown keys are rejected.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();

    let mut sim_duration = None;
    let mut tick = None;
    let mut world_size = None;
    let mut buffer_bytes = None;
    let mut seed = None;
    let mut total_nodes = None;
    let mut map_kind: Option<String> = None;
    let mut stadium = StadiumParams::default();
    let mut interval = None;
    let mut size = None;
    let mut ttl = None;
    let mut protocol = None;
    let mut copies = None;
    let mut binary = None;

    let mut group_order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, GroupDraft> = BTreeMap::new();
    let mut ifaces: BTreeMap<String, InterfaceDraft> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("malformed key `{key}`"),
            });
        }
        if seen.insert(key.to_string(), line).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
        let bad = |message: String| ConfigError::Type {
            line,
            key: key.to_string(),
            message,
        };
        let unknown = || ConfigError::UnknownKey {
            line,
            key: key.to_string(),
        };
        // An empty value means "use the default".
        if value.is_empty() {
            continue;
        }

        let parts: Vec<&str> = key.split('.').collect();
        match parts.as_slice() {
            ["simDuration"] => sim_duration = Some(parse_duration(value).map_err(bad)?),
            ["tick"] => tick = Some(parse_duration(value).map_err(bad)?),
            ["worldSize"] => world_size = Some(parse_pair(value, parse_f64).map_err(bad)?),
            ["bufferSize"] => buffer_bytes = Some(parse_size(value).map_err(bad)?),
            ["seed"] => seed = Some(value.parse::<u64>().map_err(|e| bad(e.to_string()))?),
            ["totalNodes"] => {
                total_nodes = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?)
            }
            ["map"] => map_kind = Some(value.to_string()),
            ["map", "ringRadius"] => stadium.ring_radius = parse_f64(value).map_err(bad)?,
            ["map", "exits"] => {
                stadium.exits = value.parse::<usize>().map_err(|e| bad(e.to_string()))?
            }
            ["map", "roadLength"] => stadium.road_length = parse_f64(value).map_err(bad)?,
            ["traffic", "interval"] => interval = Some(parse_span(value, parse_duration).map_err(bad)?),
            ["traffic", "size"] => size = Some(parse_span(value, parse_size).map_err(bad)?),
            ["traffic", "ttl"] => ttl = Some(parse_duration(value).map_err(bad)?),
            ["router", "protocol"] => protocol = Some(value.parse::<Protocol>().map_err(bad)?),
            ["router", "copies"] => {
                copies = Some(value.parse::<u32>().map_err(|e| bad(e.to_string()))?)
            }
            ["router", "binary"] => binary = Some(parse_bool(value).map_err(bad)?),
            ["interface", name, field] => {
                let draft = ifaces.entry(name.to_string()).or_default();
                match *field {
                    "bandwidth" => draft.bandwidth = Some(parse_size(value).map_err(bad)? as f64),
                    "range" => draft.range = Some(parse_f64(value).map_err(bad)?),
                    _ => return Err(unknown()),
                }
            }
            ["group", name, field] => {
                if !groups.contains_key(*name) {
                    group_order.push(name.to_string());
                }
                let draft = groups.entry(name.to_string()).or_insert_with(|| GroupDraft {
                    line,
                    ..GroupDraft::default()
                });
                match *field {
                    "count" => {
                        draft.count = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?)
                    }
                    "movement" => {
                        draft.movement = Some(match value {
                            "shortest-path-map-based" => Movement::ShortestPathMapBased,
                            "stationary" => Movement::Stationary,
                            other => return Err(bad(format!("unknown movement `{other}`"))),
                        })
                    }
                    "speed" => draft.speed = Some(parse_span(value, parse_f64).map_err(bad)?),
                    "pause" => draft.pause = Some(parse_span(value, parse_duration).map_err(bad)?),
                    "interfaces" => draft.interfaces = Some(parse_list(value)),
                    "roles" => {
                        for role in parse_list(value) {
                            match role.as_str() {
                                "source" => draft.roles.source = true,
                                "destination" => draft.roles.destination = true,
                                other => return Err(bad(format!("unknown role `{other}`"))),
                            }
                        }
                    }
                    "placement" => {
                        draft.placement = Some(match value {
                            "random" => Placement::Random,
                            "ring" => Placement::Ring,
                            "exit" => Placement::Exit,
                            other => return Err(bad(format!("unknown placement `{other}`"))),
                        })
                    }
                    _ => return Err(unknown()),
                }
            }
            _ => return Err(unknown()),
        }
    }

    let missing = |key: &str| ConfigError::Missing {
        key: key.to_string(),
    };

    let mut interfaces = BTreeMap::new();
    for (name, draft) in ifaces {
        let bandwidth = draft
            .bandwidth
            .ok_or_else(|| missing(&format!("interface.{name}.bandwidth")))?;
        let range = draft
            .range
            .ok_or_else(|| missing(&format!("interface.{name}.range")))?;
        interfaces.insert(
            name.clone(),
            InterfaceConfig {
                name,
                bandwidth,
                range,
            },
        );
    }

    if group_order.is_empty() {
        return Err(missing("group.<id>.count"));
    }
    let mut out_groups = Vec::with_capacity(group_order.len());
    for id in group_order {
        let draft = groups.remove(&id).expect("group draft");
        let _ = draft.line;
        let count = draft
            .count
            .ok_or_else(|| missing(&format!("group.{id}.count")))?;
        let movement = draft
            .movement
            .ok_or_else(|| missing(&format!("group.{id}.movement")))?;
        let interfaces = draft
            .interfaces
            .ok_or_else(|| missing(&format!("group.{id}.interfaces")))?;
        let (speed, pause) = match movement {
            Movement::ShortestPathMapBased => (
                draft
                    .speed
                    .ok_or_else(|| missing(&format!("group.{id}.speed")))?,
                draft.pause.unwrap_or(DEFAULT_MOBILE_PAUSE),
            ),
            Movement::Stationary => (
                draft.speed.unwrap_or(Span::new(0.0, 0.0)),
                draft.pause.unwrap_or(Span::new(0.0, 0.0)),
            ),
        };
        out_groups.push(GroupConfig {
            id,
            count,
            movement,
            speed,
            pause,
            interfaces,
            roles: draft.roles,
            placement: draft.placement.unwrap_or(Placement::Random),
        });
    }

    let map_source = match map_kind.as_deref() {
        None | Some("synthetic") => MapSource::Synthetic(stadium),
        Some(path) => MapSource::File(PathBuf::from(path)),
    };

    Ok(ScenarioConfig {
        sim_duration: sim_duration.ok_or_else(|| missing("simDuration"))?,
        tick: tick.unwrap_or(DEFAULT_TICK),
        world_size: world_size.unwrap_or(DEFAULT_WORLD),
        groups: out_groups,
        interfaces,
        traffic: TrafficConfig {
            interval: interval.ok_or_else(|| missing("traffic.interval"))?,
            size: size.ok_or_else(|| missing("traffic.size"))?,
            ttl: ttl.ok_or_else(|| missing("traffic.ttl"))?,
        },
        router: RouterConfig {
            protocol: protocol.ok_or_else(|| missing("router.protocol"))?,
            copies: copies.unwrap_or(DEFAULT_COPIES),
            binary: binary.unwrap_or(true),
        },
        buffer_bytes: buffer_bytes.ok_or_else(|| missing("bufferSize"))?,
        map_source,
        seed: seed.unwrap_or(0),
        total_nodes,
    })
}

/// Write `cfg` back to scenario-file text. Every key is emitted, so the
/// output parses to an identical config.
pub fn serialize_scenario(cfg: &ScenarioConfig) -> String {
    use std::fmt::Write;
    let mut s = String::new();
    let _ = writeln!(s, "simDuration = {}", cfg.sim_duration);
    let _ = writeln!(s, "tick = {}", cfg.tick);
    let _ = writeln!(s, "worldSize = {},{}", cfg.world_size.0, cfg.world_size.1);
    let _ = writeln!(s, "bufferSize = {}", cfg.buffer_bytes);
    let _ = writeln!(s, "seed = {}", cfg.seed);
    if let Some(total) = cfg.total_nodes {
        let _ = writeln!(s, "totalNodes = {total}");
    }
    match &cfg.map_source {
        MapSource::Synthetic(p) => {
            let _ = writeln!(s, "map = synthetic");
            let _ = writeln!(s, "map.ringRadius = {}", p.ring_radius);
            let _ = writeln!(s, "map.exits = {}", p.exits);
            let _ = writeln!(s, "map.roadLength = {}", p.road_length);
        }
        MapSource::File(path) => {
            let _ = writeln!(s, "map = {}", path.display());
        }
    }
    for iface in cfg.interfaces.values() {
        let _ = writeln!(s, "interface.{}.bandwidth = {}", iface.name, iface.bandwidth);
        let _ = writeln!(s, "interface.{}.range = {}", iface.name, iface.range);
    }
    let t = &cfg.traffic;
    let _ = writeln!(s, "traffic.interval = {},{}", t.interval.min, t.interval.max);
    let _ = writeln!(s, "traffic.size = {},{}", t.size.min, t.size.max);
    let _ = writeln!(s, "traffic.ttl = {}", t.ttl);
    let _ = writeln!(s, "router.protocol = {}", cfg.router.protocol);
    let _ = writeln!(s, "router.copies = {}", cfg.router.copies);
    let _ = writeln!(s, "router.binary = {}", cfg.router.binary);
    for g in &cfg.groups {
        let p = format!("group.{}", g.id);
        let _ = writeln!(s, "{p}.count = {}", g.count);
        let _ = writeln!(s, "{p}.movement = {}", g.movement.as_str());
        let _ = writeln!(s, "{p}.speed = {},{}", g.speed.min, g.speed.max);
        let _ = writeln!(s, "{p}.pause = {},{}", g.pause.min, g.pause.max);
        let _ = writeln!(s, "{p}.interfaces = {}", g.interfaces.join(","));
        let mut roles = Vec::new();
        if g.roles.source {
            roles.push("source");
        }
        if g.roles.destination {
            roles.push("destination");
        }
        let _ = writeln!(s, "{p}.roles = {}", roles.join(","));
        let _ = writeln!(s, "{p}.placement = {}", g.placement.as_str());
    }
    s
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

/// Check every invariant; an empty result means the config is runnable.
pub fn validate(cfg: &ScenarioConfig) -> Vec<Finding> {
    let mut out = Vec::new();

    if !(cfg.sim_duration > 0.0) {
        out.push(Finding::new("simDuration", "must be positive"));
    }
    if !(cfg.tick > 0.0) {
        out.push(Finding::new("tick", "must be positive"));
    } else if cfg.tick > cfg.sim_duration {
        out.push(Finding::new("tick", "must not exceed simDuration"));
    }
    if !(cfg.world_size.0 > 0.0 && cfg.world_size.1 > 0.0) {
        out.push(Finding::new("worldSize", "both dimensions must be positive"));
    }

    let t = &cfg.traffic;
    if !(t.interval.min > 0.0 && t.interval.min <= t.interval.max) {
        out.push(Finding::new("traffic.interval", "requires 0 < min <= max"));
    }
    if !(t.size.min > 0 && t.size.min <= t.size.max) {
        out.push(Finding::new("traffic.size", "requires 0 < min <= max"));
    }
    if !(t.ttl > 0.0) {
        out.push(Finding::new("traffic.ttl", "must be positive"));
    }
    if cfg.buffer_bytes < t.size.max {
        out.push(Finding::new("bufferSize", "buffer smaller than max message"));
    }

    if cfg.router.protocol == Protocol::SprayAndWait && cfg.router.copies < 1 {
        out.push(Finding::new("router.copies", "must be at least 1 for spray-and-wait"));
    }

    for iface in cfg.interfaces.values() {
        if !(iface.bandwidth > 0.0) {
            out.push(Finding::new(
                format!("interface.{}.bandwidth", iface.name),
                "must be positive",
            ));
        }
        if !(iface.range > 0.0) {
            out.push(Finding::new(
                format!("interface.{}.range", iface.name),
                "must be positive",
            ));
        }
    }

    let mut ids = std::collections::BTreeSet::new();
    for g in &cfg.groups {
        let p = format!("group.{}", g.id);
        if !ids.insert(g.id.as_str()) {
            out.push(Finding::new(&p, "duplicate group id"));
        }
        if g.count < 1 {
            out.push(Finding::new(format!("{p}.count"), "must be at least 1"));
        }
        if g.speed.min > g.speed.max || g.speed.min < 0.0 {
            out.push(Finding::new(format!("{p}.speed"), "requires 0 <= min <= max"));
        }
        if g.movement == Movement::Stationary && (g.speed.min != 0.0 || g.speed.max != 0.0) {
            out.push(Finding::new(format!("{p}.speed"), "stationary groups must have speed 0,0"));
        }
        if g.is_mobile() && !(g.speed.max > 0.0) {
            out.push(Finding::new(format!("{p}.speed"), "mobile groups need a positive max speed"));
        }
        if g.pause.min > g.pause.max || g.pause.min < 0.0 {
            out.push(Finding::new(format!("{p}.pause"), "requires 0 <= min <= max"));
        }
        if g.interfaces.is_empty() {
            out.push(Finding::new(format!("{p}.interfaces"), "at least one interface required"));
        }
        for name in &g.interfaces {
            if !cfg.interfaces.contains_key(name) {
                out.push(Finding::new(
                    format!("{p}.interfaces"),
                    format!("group `{}` references undeclared interface `{name}`", g.id),
                ));
            }
        }
    }

    if let Some(total) = cfg.total_nodes {
        let sum = cfg.node_count();
        if sum != total {
            out.push(Finding::new(
                "totalNodes",
                format!("group counts sum to {sum}, expected {total}"),
            ));
        }
    }

    let sources: usize = cfg.groups.iter().filter(|g| g.roles.source).map(|g| g.count).sum();
    let destinations: usize = cfg
        .groups
        .iter()
        .filter(|g| g.roles.destination)
        .map(|g| g.count)
        .sum();
    if sources == 0 {
        out.push(Finding::new("group.*.roles", "no message source group"));
    }
    if destinations == 0 {
        out.push(Finding::new("group.*.roles", "no message destination group"));
    }
    if sources == 1 && destinations == 1 {
        let same = cfg
            .groups
            .iter()
            .any(|g| g.roles.source && g.roles.destination && g.count == 1);
        if same {
            out.push(Finding::new(
                "group.*.roles",
                "the only source is also the only destination",
            ));
        }
    }

    if let MapSource::Synthetic(p) = &cfg.map_source {
        if !(p.ring_radius > 0.0) {
            out.push(Finding::new("map.ringRadius", "must be positive"));
        }
        if p.exits < 2 {
            out.push(Finding::new("map.exits", "at least 2 exits required"));
        }
        if !(p.road_length > 0.0) {
            out.push(Finding::new("map.roadLength", "must be positive"));
        }
        let reach = crate::map::stadium_extent(p);
        let half = cfg.world_size.0.min(cfg.world_size.1) / 2.0;
        if reach > half {
            out.push(Finding::new(
                "worldSize",
                format!("synthetic map reaches {reach:.1} m from the center, world half-size is {half:.1} m"),
            ));
        }
    }

    out
}

// ---------------------------------------------------------------------------
// expand_sweep
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    BufferSize,
    Protocol,
}

impl std::str::FromStr for SweepAxis {
    type Err = SweepError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "bufferSize" | "buffer_bytes" => Ok(SweepAxis::BufferSize),
            "router.protocol" | "protocol" => Ok(SweepAxis::Protocol),
            other => Err(SweepError::NotSweepable(other.to_string())),
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SweepError {
    #[error("`{0}` is not a sweepable field (use bufferSize or router.protocol)")]
    NotSweepable(String),
    #[error("bad sweep value `{value}`: {message}")]
    BadValue { value: String, message: String },
}

/// One config per value, differing from `cfg` only in the swept field.
pub fn expand_sweep(
    cfg: &ScenarioConfig,
    axis: &str,
    values: &[&str],
) -> Result<Vec<ScenarioConfig>, SweepError> {
    let axis: SweepAxis = axis.parse()?;
    values
        .iter()
        .map(|v| {
            let mut c = cfg.clone();
            let bad = |message: String| SweepError::BadValue {
                value: v.to_string(),
                message,
            };
            match axis {
                SweepAxis::BufferSize => c.buffer_bytes = parse_size(v).map_err(bad)?,
                SweepAxis::Protocol => c.router.protocol = v.parse().map_err(bad)?,
            }
            Ok(c)
        })
        .collect()
}
