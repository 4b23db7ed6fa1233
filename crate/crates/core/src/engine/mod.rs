//! The simulation world and its fixed-order tick loop.
//!
//! Every tick runs these phases at `clock = tick_index * tick`:
//!
//! 1. purge expired copies from all buffers
//! 2. create messages that are due
//! 3. move every node, in node-id order
//! 4. recompute contacts
//! 5. offer messages: newly opened contacts first, then contacts that
//!    persist from the previous tick, each in (pair, interface) order
//! 6. push bytes through active transfers, aborting those whose contact
//!    went down
//! 7. hand over completed messages
//! 8. advance the clock
//!
//! A sender starts at most one transfer per interface at a time, and a
//! receiver never has the same message arriving twice. Offering again on
//! persistent contacts is what lets a long meeting carry more than one
//! message.

pub mod log;
pub mod rng;

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::path::PathBuf;

use thiserror::Error;

use crate::config::{validate, Finding, MapSource, Protocol, ScenarioConfig};
use crate::map::{generate_stadium_map, parse_map, MapError, MapGraph, Point};
use crate::mobility::MovementState;
use crate::net::{detect_contacts, Buffer, ContactKey, InterfaceId, Message, MessageId, NodeId, Transfer, Transfers};
use crate::reports::{compute_metrics, MetricsSummary};
use crate::routing::{CompletionOutcome, Receiver, Router, RouterState, SummaryVector};
use crate::traffic::{purge_expired, TrafficState};

pub use log::{AbortReason, Detail, DropReason, Event, EventKind, EventLog};
pub use rng::{mobility_label, rng_stream, SimRng};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("invalid scenario: {}", join(.0))]
    Invalid(Vec<Finding>),
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("cannot read map file {path}: {source}")]
    MapIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn join(findings: &[Finding]) -> String {
    findings.iter().map(Finding::to_string).collect::<Vec<_>>().join("; ")
}

#[derive(Debug, Clone)]
pub struct NodeState {
    pub group: usize,
    pub interfaces: Vec<InterfaceId>,
    pub movement: MovementState,
    pub buffer: Buffer,
    pub router: RouterState,
    rng: SimRng,
}

/// Contact forced up during `start <= t < end`, independent of positions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedContact {
    pub a: NodeId,
    pub b: NodeId,
    pub iface: InterfaceId,
    pub start: f64,
    pub end: f64,
}

/// Message injected at the first tick with `clock >= created_at`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScriptedMessage {
    pub src: NodeId,
    pub dst: NodeId,
    pub created_at: f64,
    pub size: u64,
    pub ttl: f64,
}

/// Bookkeeping checks gathered while the run progresses.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    /// Messages whose copies do not add up: one created copy plus one per
    /// relay must equal copies still buffered plus copies dropped.
    pub unbalanced: Vec<MessageId>,
    /// Spray-and-wait messages whose buffered plus dropped budget differs
    /// from the initial number of copies.
    pub budget_mismatches: Vec<MessageId>,
    /// Most RELAYED events seen for one message.
    pub max_relays: usize,
    /// Most simultaneously buffered copies of one message at a tick
    /// boundary. Only tracked with [`Simulation::track_copies`].
    pub max_live_copies: usize,
    /// Largest copy budget held across all buffers at a tick boundary.
    /// Only tracked with [`Simulation::track_copies`].
    pub max_live_budget: u32,
    /// Tick boundaries at which some buffer exceeded its capacity.
    pub capacity_violations: u64,
    /// Tick boundaries at which some sender had pushed more than
    /// `bandwidth * elapsed` plus one maximum-size message.
    pub throughput_violations: u64,
}

impl AuditReport {
    pub fn is_clean(&self) -> bool {
        self.unbalanced.is_empty()
            && self.budget_mismatches.is_empty()
            && self.capacity_violations == 0
            && self.throughput_violations == 0
    }
}

fn pair_mut<T>(v: &mut [T], i: usize, j: usize) -> (&mut T, &mut T) {
    assert_ne!(i, j);
    if i < j {
        let (l, r) = v.split_at_mut(j);
        (&mut l[i], &mut r[0])
    } else {
        let (l, r) = v.split_at_mut(i);
        (&mut r[0], &mut l[j])
    }
}

pub struct Simulation {
    cfg: ScenarioConfig,
    map: MapGraph,
    router: Router,
    interface_names: Vec<String>,
    ranges: Vec<f64>,
    bandwidth: Vec<f64>,
    nodes: Vec<NodeState>,
    node_ifaces: Vec<Vec<InterfaceId>>,
    contacts: BTreeSet<ContactKey>,
    transfers: Transfers,
    traffic: TrafficState,
    traffic_rng: SimRng,
    sources: Vec<NodeId>,
    destinations: Vec<NodeId>,
    scripted_contacts: Option<Vec<ScriptedContact>>,
    scripted_messages: Option<VecDeque<ScriptedMessage>>,
    scripted_ids: u64,
    created: Vec<Message>,
    log: EventLog,
    tick_index: u64,
    total_ticks: u64,
    /// Bytes pushed per `[node][interface]`, completed or aborted.
    sent_bytes: Vec<Vec<f64>>,
    track_copies: bool,
    audit: AuditReport,
}

fn load_map(cfg: &ScenarioConfig, seed: u64) -> Result<MapGraph, EngineError> {
    match &cfg.map_source {
        MapSource::Synthetic(params) => {
            let center = Point::new(cfg.world_size.0 / 2.0, cfg.world_size.1 / 2.0);
            Ok(generate_stadium_map(params, center, &mut rng_stream(seed, "map"))?)
        }
        MapSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| EngineError::MapIo {
                path: path.clone(),
                source,
            })?;
            Ok(parse_map(&text)?)
        }
    }
}

impl Simulation {
    pub fn new(cfg: &ScenarioConfig, seed: u64) -> Result<Simulation, EngineError> {
        let findings = validate(cfg);
        if !findings.is_empty() {
            return Err(EngineError::Invalid(findings));
        }
        let map = load_map(cfg, seed)?;
        let interface_names: Vec<String> = cfg.interfaces.keys().cloned().collect();
        let ranges = cfg.interfaces.values().map(|i| i.range).collect();
        let bandwidth = cfg.interfaces.values().map(|i| i.bandwidth).collect();

        let mut nodes = Vec::with_capacity(cfg.node_count());
        let mut sources = Vec::new();
        let mut destinations = Vec::new();
        for (gi, group) in cfg.groups.iter().enumerate() {
            let mut interfaces: Vec<InterfaceId> = group
                .interfaces
                .iter()
                .map(|n| interface_names.iter().position(|x| x == n).expect("validated"))
                .collect();
            interfaces.sort_unstable();
            interfaces.dedup();
            for member in 0..group.count {
                let id = nodes.len();
                let mut rng = rng_stream(seed, &mobility_label(id));
                let movement = MovementState::init_placement(group, member, &map, &mut rng);
                if group.roles.source {
                    sources.push(id);
                }
                if group.roles.destination {
                    destinations.push(id);
                }
                nodes.push(NodeState {
                    group: gi,
                    interfaces: interfaces.clone(),
                    movement,
                    buffer: Buffer::new(cfg.buffer_bytes),
                    router: RouterState::new(),
                    rng,
                });
            }
        }
        let node_ifaces = nodes.iter().map(|n| n.interfaces.clone()).collect();
        let mut traffic_rng = rng_stream(seed, "traffic");
        let traffic = TrafficState::new(&cfg.traffic, &mut traffic_rng);
        let total_ticks = (cfg.sim_duration / cfg.tick).ceil() as u64;
        let sent_bytes = vec![vec![0.0; interface_names.len()]; nodes.len()];

        Ok(Simulation {
            cfg: cfg.clone(),
            map,
            router: Router::new(&cfg.router),
            log: EventLog::new(interface_names.clone()),
            interface_names,
            ranges,
            bandwidth,
            nodes,
            node_ifaces,
            contacts: BTreeSet::new(),
            transfers: Transfers::new(),
            traffic,
            traffic_rng,
            sources,
            destinations,
            scripted_contacts: None,
            scripted_messages: None,
            scripted_ids: 0,
            created: Vec::new(),
            tick_index: 0,
            total_ticks,
            sent_bytes,
            track_copies: false,
            audit: AuditReport::default(),
        })
    }

    /// Replace range-based contact detection with a fixed schedule.
    pub fn with_contact_script(mut self, contacts: Vec<ScriptedContact>) -> Self {
        self.scripted_contacts = Some(contacts);
        self
    }

    /// Replace the random message generator with a fixed list.
    pub fn with_message_script(mut self, mut messages: Vec<ScriptedMessage>) -> Self {
        messages.sort_by(|x, y| x.created_at.total_cmp(&y.created_at));
        self.scripted_messages = Some(messages.into());
        self
    }

    /// Record per-message live copy counts at every tick boundary.
    pub fn track_copies(mut self, on: bool) -> Self {
        self.track_copies = on;
        self
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn map(&self) -> &MapGraph {
        &self.map
    }

    pub fn router(&self) -> Router {
        self.router
    }

    pub fn interface_names(&self) -> &[String] {
        &self.interface_names
    }

    pub fn clock(&self) -> f64 {
        self.tick_index as f64 * self.cfg.tick
    }

    pub fn tick_index(&self) -> u64 {
        self.tick_index
    }

    pub fn total_ticks(&self) -> u64 {
        self.total_ticks
    }

    pub fn is_finished(&self) -> bool {
        self.tick_index >= self.total_ticks
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn positions(&self) -> Vec<Point> {
        self.nodes.iter().map(|n| n.movement.position).collect()
    }

    pub fn contacts(&self) -> &BTreeSet<ContactKey> {
        &self.contacts
    }

    pub fn transfers(&self) -> &Transfers {
        &self.transfers
    }

    pub fn sent_bytes(&self, node: NodeId, iface: InterfaceId) -> f64 {
        self.sent_bytes[node][iface]
    }

    /// Every message as it was created, in creation order.
    pub fn created_messages(&self) -> &[Message] {
        &self.created
    }

    pub fn log(&self) -> &EventLog {
        &self.log
    }

    pub fn into_log(self) -> EventLog {
        self.log
    }

    fn emit(&mut self, kind: EventKind, msg: &Message, from: Option<NodeId>, to: Option<NodeId>, detail: Detail) {
        let mut e = Event::new(self.clock(), kind);
        e.msg = Some(msg.id);
        e.from = from;
        e.to = to;
        e.copies = msg.copies;
        e.detail = detail;
        if kind != EventKind::Dropped {
            e.hops = Some(msg.hops);
        }
        self.log.push(e);
    }

    fn drop_copy(&mut self, holder: NodeId, msg: &Message, reason: DropReason) {
        self.emit(EventKind::Dropped, msg, Some(holder), None, Detail::Drop(reason));
    }

    /// Put a fresh message into its source buffer.
    fn admit(&mut self, msg: Message) {
        self.emit(EventKind::Created, &msg, Some(msg.src), Some(msg.dst), Detail::None);
        self.created.push(msg.clone());
        let src = msg.src;
        let out = self.nodes[src].buffer.insert(msg.clone());
        for old in &out.evicted {
            self.drop_copy(src, old, DropReason::BufferOverflow);
        }
        if !out.accepted {
            self.drop_copy(src, &msg, DropReason::Oversize);
        }
    }

    fn create_messages(&mut self, now: f64) {
        let copies = self.router.initial_copies();
        if let Some(queue) = self.scripted_messages.as_mut() {
            let mut due = Vec::new();
            while queue.front().is_some_and(|m| m.created_at <= now) {
                due.push(queue.pop_front().unwrap());
            }
            for s in due {
                self.scripted_ids += 1;
                self.admit(Message {
                    id: MessageId(self.scripted_ids),
                    src: s.src,
                    dst: s.dst,
                    size: s.size,
                    created_at: now,
                    ttl: s.ttl,
                    hops: 0,
                    copies,
                });
            }
            return;
        }
        while self.traffic.is_due(now) {
            let msg = self.traffic.create_message(
                &self.cfg.traffic,
                &self.sources,
                &self.destinations,
                now,
                copies,
                &mut self.traffic_rng,
            );
            self.admit(msg);
        }
    }

    fn current_contacts(&self, now: f64) -> BTreeSet<ContactKey> {
        match &self.scripted_contacts {
            Some(script) => script
                .iter()
                .filter(|c| c.start <= now && now < c.end)
                .map(|c| ContactKey::new(c.a, c.b, c.iface))
                .collect(),
            None => detect_contacts(&self.positions(), &self.node_ifaces, &self.ranges, &BTreeSet::new()).current,
        }
    }

    fn offer(&mut self, key: ContactKey, now: f64) {
        for (from, to) in [(key.a, key.b), (key.b, key.a)] {
            if self.transfers.is_busy(from, key.iface) {
                continue;
            }
            let peer = &self.nodes[to];
            let sv = SummaryVector::new(&peer.buffer, &peer.router);
            let transfers = &self.transfers;
            let Some(intent) =
                self.router
                    .next_intent(&self.nodes[from].buffer, to, &sv, now, |id| transfers.is_incoming(to, id))
            else {
                continue;
            };
            let msg = self.nodes[from].buffer.get(intent.msg).expect("offered from own buffer");
            self.transfers
                .begin(key, from, msg, false, now)
                .expect("idle sender, receiver lacks the message");
        }
    }

    fn complete(&mut self, t: Transfer) {
        let (sender, receiver) = pair_mut(&mut self.nodes, t.from, t.to);
        let result = self.router.on_transfer_complete(
            &mut sender.buffer,
            Receiver {
                id: t.to,
                buffer: &mut receiver.buffer,
                state: &mut receiver.router,
            },
            t.msg,
        );
        let mut e = Event::new(self.clock(), EventKind::Aborted);
        e.msg = Some(t.msg);
        e.from = Some(t.from);
        e.to = Some(t.to);
        match result {
            Ok(CompletionOutcome::Delivered { hops }) => {
                e.kind = EventKind::Delivered;
                e.hops = Some(hops);
                self.log.push(e);
            }
            Ok(CompletionOutcome::Duplicate { hops }) => {
                e.kind = EventKind::Duplicate;
                e.hops = Some(hops);
                self.log.push(e);
            }
            Ok(CompletionOutcome::Relayed { hops, evicted, rejected }) => {
                e.kind = EventKind::Relayed;
                e.hops = Some(hops);
                e.copies = match &rejected {
                    Some(m) => m.copies,
                    None => self.nodes[t.to].buffer.get(t.msg).and_then(|m| m.copies),
                };
                self.log.push(e);
                for old in &evicted {
                    self.drop_copy(t.to, old, DropReason::BufferOverflow);
                }
                if let Some(m) = rejected {
                    self.drop_copy(t.to, &m, DropReason::Oversize);
                }
            }
            Ok(CompletionOutcome::SenderLost) => {
                e.detail = Detail::Abort(AbortReason::SenderDropped);
                self.log.push(e);
            }
            Err(_) => {
                e.detail = Detail::Abort(AbortReason::CopiesExhausted);
                self.log.push(e);
            }
        }
    }

    /// Run one tick. Does nothing once the run is finished.
    pub fn step(&mut self) {
        if self.is_finished() {
            return;
        }
        let now = self.clock();
        let dt = self.cfg.tick;

        // 1. expiry
        let expired = purge_expired(self.nodes.iter_mut().map(|n| &mut n.buffer), now);
        for (holder, m) in expired {
            self.drop_copy(holder, &m, DropReason::TtlExpiry);
        }

        // 2. traffic
        self.create_messages(now);

        // 3. mobility
        for node in &mut self.nodes {
            let group = &self.cfg.groups[node.group];
            node.movement.step(&self.map, group, now, dt, &mut node.rng);
        }

        // 4. contacts
        let current = self.current_contacts(now);
        let previous = std::mem::take(&mut self.contacts);
        for key in previous.difference(&current) {
            let mut e = Event::new(now, EventKind::ContactDown);
            e.from = Some(key.a);
            e.to = Some(key.b);
            e.detail = Detail::Interface(key.iface);
            self.log.push(e);
        }
        let opened: Vec<ContactKey> = current.difference(&previous).copied().collect();
        for key in &opened {
            let mut e = Event::new(now, EventKind::ContactUp);
            e.from = Some(key.a);
            e.to = Some(key.b);
            e.detail = Detail::Interface(key.iface);
            self.log.push(e);
        }
        let persistent: Vec<ContactKey> = current.intersection(&previous).copied().collect();
        self.contacts = current;

        // 5. offers
        for key in opened.into_iter().chain(persistent) {
            self.offer(key, now);
        }

        // 6. transfers
        let out = self.transfers.advance(&self.contacts, &self.bandwidth, dt);
        for t in &out.aborted {
            self.sent_bytes[t.from][t.contact.iface] += t.bytes_sent;
            let mut e = Event::new(now, EventKind::Aborted);
            e.msg = Some(t.msg);
            e.from = Some(t.from);
            e.to = Some(t.to);
            e.detail = Detail::Abort(AbortReason::ContactDown);
            self.log.push(e);
        }

        // 7. completions
        for t in out.completed {
            self.sent_bytes[t.from][t.contact.iface] += t.bytes_sent;
            self.complete(t);
        }

        // 8. clock
        self.tick_index += 1;
        self.check_tick_boundary();
    }

    fn check_tick_boundary(&mut self) {
        if self.nodes.iter().any(|n| n.buffer.occupancy() > n.buffer.capacity()) {
            self.audit.capacity_violations += 1;
        }
        debug_assert_eq!(self.audit.capacity_violations, 0, "buffer over capacity");
        let elapsed = self.clock();
        let slack = self.cfg.max_message_size() as f64;
        let over = self.sent_bytes.iter().any(|per_iface| {
            per_iface
                .iter()
                .zip(&self.bandwidth)
                .any(|(&sent, &bw)| sent > bw * elapsed + slack)
        });
        if over {
            self.audit.throughput_violations += 1;
        }
        if self.track_copies {
            let mut live: HashMap<MessageId, (usize, u32)> = HashMap::new();
            for n in &self.nodes {
                for m in n.buffer.iter() {
                    let entry = live.entry(m.id).or_default();
                    entry.0 += 1;
                    entry.1 += m.copies.unwrap_or(1);
                }
            }
            for (count, budget) in live.into_values() {
                self.audit.max_live_copies = self.audit.max_live_copies.max(count);
                self.audit.max_live_budget = self.audit.max_live_budget.max(budget);
            }
        }
    }

    pub fn run_to_end(&mut self) {
        while !self.is_finished() {
            self.step();
        }
    }

    /// Copies of each message still buffered: `(count, summed budget)`.
    pub fn buffered_copies(&self) -> HashMap<MessageId, (usize, u32)> {
        let mut out: HashMap<MessageId, (usize, u32)> = HashMap::new();
        for n in &self.nodes {
            for m in n.buffer.iter() {
                let e = out.entry(m.id).or_default();
                e.0 += 1;
                e.1 += m.copies.unwrap_or(0);
            }
        }
        out
    }

    /// Cross-check the log against the buffers as they stand now.
    pub fn audit(&self) -> AuditReport {
        let mut report = self.audit.clone();
        #[derive(Default)]
        struct Tally {
            relayed: usize,
            dropped: usize,
            dropped_budget: u32,
        }
        let mut tallies: HashMap<MessageId, Tally> = HashMap::new();
        let mut created = Vec::new();
        for e in self.log.events() {
            let Some(id) = e.msg else { continue };
            let t = tallies.entry(id).or_default();
            match e.kind {
                EventKind::Created => created.push(id),
                EventKind::Relayed => t.relayed += 1,
                EventKind::Dropped => {
                    t.dropped += 1;
                    t.dropped_budget += e.copies.unwrap_or(0);
                }
                _ => {}
            }
        }
        let buffered = self.buffered_copies();
        let spray = self.router.protocol == Protocol::SprayAndWait;
        for id in created {
            let t = &tallies[&id];
            let (held, budget) = buffered.get(&id).copied().unwrap_or_default();
            if 1 + t.relayed != held + t.dropped {
                report.unbalanced.push(id);
            }
            if spray && budget + t.dropped_budget != self.router.copies {
                report.budget_mismatches.push(id);
            }
            report.max_relays = report.max_relays.max(t.relayed);
        }
        report
    }
}

/// Simulate `cfg` to the end with `seed` and summarize the outcome.
pub fn run(cfg: &ScenarioConfig, seed: u64) -> Result<(EventLog, MetricsSummary), EngineError> {
    let mut sim = Simulation::new(cfg, seed)?;
    sim.run_to_end();
    let log = sim.into_log();
    let metrics = compute_metrics(&log);
    Ok((log, metrics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{GroupConfig, Movement, Placement, Roles, Span};

    fn tiny(nodes: usize) -> ScenarioConfig {
        let mut cfg = ScenarioConfig::stadium();
        cfg.groups = vec![GroupConfig {
            id: "n".into(),
            count: nodes,
            movement: Movement::Stationary,
            speed: Span::new(0.0, 0.0),
            pause: Span::new(0.0, 0.0),
            interfaces: vec!["wifi".into()],
            roles: Roles {
                source: true,
                destination: true,
            },
            placement: Placement::Random,
        }];
        cfg.total_nodes = None;
        cfg.sim_duration = 100.0;
        cfg
    }

    fn wifi(sim: &Simulation) -> InterfaceId {
        sim.interface_names().iter().position(|n| n == "wifi").unwrap()
    }

    fn script_msg(src: NodeId, dst: NodeId, at: f64) -> ScriptedMessage {
        ScriptedMessage {
            src,
            dst,
            created_at: at,
            size: 100_000,
            ttl: 1_000.0,
        }
    }

    #[test]
    fn relay_chain_over_scripted_contacts() {
        let sim = Simulation::new(&tiny(3), 1).unwrap();
        let w = wifi(&sim);
        let mut sim = sim
            .with_contact_script(vec![
                ScriptedContact { a: 0, b: 1, iface: w, start: 10.0, end: 11.0 },
                ScriptedContact { a: 1, b: 2, iface: w, start: 20.0, end: 21.0 },
            ])
            .with_message_script(vec![script_msg(0, 2, 0.0)]);
        sim.run_to_end();
        let delivered: Vec<&Event> = sim
            .log()
            .events()
            .iter()
            .filter(|e| e.kind == EventKind::Delivered)
            .collect();
        assert_eq!(delivered.len(), 1);
        assert_eq!((delivered[0].time, delivered[0].hops), (20.0, Some(2)));
        assert!(sim.audit().is_clean());
    }

    #[test]
    fn creation_precedes_offers_in_the_same_tick() {
        let sim = Simulation::new(&tiny(2), 1).unwrap();
        let w = wifi(&sim);
        let mut sim = sim
            .with_contact_script(vec![ScriptedContact { a: 0, b: 1, iface: w, start: 5.0, end: 6.0 }])
            .with_message_script(vec![script_msg(0, 1, 5.0)]);
        sim.run_to_end();
        let kinds: Vec<EventKind> = sim.log().events().iter().map(|e| e.kind).collect();
        assert_eq!(
            kinds,
            vec![EventKind::Created, EventKind::ContactUp, EventKind::Delivered, EventKind::ContactDown]
        );
        assert_eq!(sim.log().events()[2].time, 5.0);
    }

    #[test]
    fn broken_contact_aborts_in_same_tick() {
        let mut cfg = tiny(2);
        cfg.interfaces.get_mut("bluetooth").unwrap().bandwidth = 1_000.0;
        cfg.groups[0].interfaces = vec!["bluetooth".into()];
        let sim = Simulation::new(&cfg, 1).unwrap();
        let bt = sim.interface_names().iter().position(|n| n == "bluetooth").unwrap();
        let mut sim = sim
            .with_contact_script(vec![ScriptedContact { a: 0, b: 1, iface: bt, start: 0.0, end: 3.0 }])
            .with_message_script(vec![script_msg(0, 1, 0.0)]);
        sim.run_to_end();
        let aborted: Vec<&Event> = sim.log().events().iter().filter(|e| e.kind == EventKind::Aborted).collect();
        assert_eq!(aborted.len(), 1);
        assert_eq!(aborted[0].time, 3.0);
        assert_eq!(aborted[0].detail, Detail::Abort(AbortReason::ContactDown));
        assert_eq!(sim.sent_bytes(0, bt), 3_000.0);
        assert_eq!(sim.log().count(EventKind::Delivered), 0);
    }

    #[test]
    fn idle_world_only_advances_clock() {
        let sim = Simulation::new(&tiny(2), 1).unwrap();
        let mut sim = sim.with_contact_script(vec![]).with_message_script(vec![]);
        sim.step();
        sim.step();
        assert_eq!(sim.clock(), 2.0);
        assert!(sim.log().is_empty());
    }

    #[test]
    fn tick_count_rounds_up() {
        let mut cfg = tiny(2);
        cfg.sim_duration = 10.5;
        let sim = Simulation::new(&cfg, 1).unwrap();
        assert_eq!(sim.total_ticks(), 11);
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = tiny(2);
        cfg.buffer_bytes = 10;
        assert!(matches!(Simulation::new(&cfg, 1), Err(EngineError::Invalid(_))));
    }
}
