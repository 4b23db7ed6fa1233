//! Radio contacts, bandwidth-limited transfers and bounded FIFO buffers.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::map::Point;

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MessageId(pub u64);

impl fmt::Display for MessageId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.0)
    }
}

impl std::str::FromStr for MessageId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix('M')
            .and_then(|n| n.parse().ok())
            .map(MessageId)
            .ok_or_else(|| format!("bad message id `{s}`"))
    }
}

/// One buffered copy of a distress message.
#[derive(Debug, Clone, PartialEq)]
pub struct Message {
    pub id: MessageId,
    pub src: NodeId,
    pub dst: NodeId,
    /// bytes
    pub size: u64,
    pub created_at: f64,
    pub ttl: f64,
    /// Completed transfers on this copy's path.
    pub hops: u32,
    /// Remaining replication budget; `None` under epidemic routing.
    pub copies: Option<u32>,
}

impl Message {
    pub fn is_expired(&self, now: f64) -> bool {
        now - self.created_at > self.ttl
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InsertOutcome {
    pub accepted: bool,
    pub evicted: Vec<Message>,
}

/// Bounded store with drop-oldest eviction.
#[derive(Debug, Clone, PartialEq)]
pub struct Buffer {
    capacity: u64,
    queue: VecDeque<Message>,
    ids: HashSet<MessageId>,
    occupancy: u64,
}

impl Buffer {
    pub fn new(capacity: u64) -> Buffer {
        Buffer {
            capacity,
            queue: VecDeque::new(),
            ids: HashSet::new(),
            occupancy: 0,
        }
    }

    pub fn capacity(&self) -> u64 {
        self.capacity
    }

    pub fn occupancy(&self) -> u64 {
        self.occupancy
    }

    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.ids.contains(&id)
    }

    pub fn get(&self, id: MessageId) -> Option<&Message> {
        if !self.contains(id) {
            return None;
        }
        self.queue.iter().find(|m| m.id == id)
    }

    pub fn get_mut(&mut self, id: MessageId) -> Option<&mut Message> {
        if !self.contains(id) {
            return None;
        }
        self.queue.iter_mut().find(|m| m.id == id)
    }

    /// Messages in arrival order, oldest first.
    pub fn iter(&self) -> impl Iterator<Item = &Message> {
        self.queue.iter()
    }

    /// Append `msg`, evicting the oldest arrivals until it fits. Messages
    /// larger than the whole buffer, or already present, are refused.
    pub fn insert(&mut self, msg: Message) -> InsertOutcome {
        if msg.size > self.capacity || self.contains(msg.id) {
            return InsertOutcome::default();
        }
        let mut evicted = Vec::new();
        while self.capacity - self.occupancy < msg.size {
            let old = self.queue.pop_front().expect("occupancy > 0 implies a message");
            self.ids.remove(&old.id);
            self.occupancy -= old.size;
            evicted.push(old);
        }
        self.occupancy += msg.size;
        self.ids.insert(msg.id);
        self.queue.push_back(msg);
        InsertOutcome {
            accepted: true,
            evicted,
        }
    }

    pub fn remove(&mut self, id: MessageId) -> Option<Message> {
        if !self.ids.remove(&id) {
            return None;
        }
        let pos = self.queue.iter().position(|m| m.id == id)?;
        let msg = self.queue.remove(pos)?;
        self.occupancy -= msg.size;
        Some(msg)
    }

    /// Remove and return every message with `now - created_at > ttl`.
    pub fn purge_expired(&mut self, now: f64) -> Vec<Message> {
        if !self.queue.iter().any(|m| m.is_expired(now)) {
            return Vec::new();
        }
        let (expired, kept): (Vec<Message>, Vec<Message>) =
            self.queue.drain(..).partition(|m| m.is_expired(now));
        self.queue = kept.into();
        for m in &expired {
            self.ids.remove(&m.id);
            self.occupancy -= m.size;
        }
        expired
    }
}

/// Interface index into the scenario's sorted interface list.
pub type InterfaceId = usize;

/// Contact between two nodes on one interface; `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ContactKey {
    pub a: NodeId,
    pub b: NodeId,
    pub iface: InterfaceId,
}

impl ContactKey {
    pub fn new(x: NodeId, y: NodeId, iface: InterfaceId) -> ContactKey {
        ContactKey {
            a: x.min(y),
            b: x.max(y),
            iface,
        }
    }

    pub fn peer_of(&self, node: NodeId) -> NodeId {
        if node == self.a {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactDelta {
    pub up: Vec<ContactKey>,
    pub down: Vec<ContactKey>,
    pub current: BTreeSet<ContactKey>,
}

/// All contacts for this tick: every pair of nodes carrying the same
/// interface within its range. `node_ifaces[n]` lists node `n`'s
/// interfaces, `ranges[i]` is interface `i`'s range.
pub fn detect_contacts(
    positions: &[Point],
    node_ifaces: &[Vec<InterfaceId>],
    ranges: &[f64],
    previous: &BTreeSet<ContactKey>,
) -> ContactDelta {
    let mut carriers: Vec<Vec<NodeId>> = vec![Vec::new(); ranges.len()];
    for (node, ifaces) in node_ifaces.iter().enumerate() {
        for &i in ifaces {
            carriers[i].push(node);
        }
    }
    let mut current = BTreeSet::new();
    for (iface, nodes) in carriers.iter().enumerate() {
        let r2 = ranges[iface] * ranges[iface];
        for (k, &x) in nodes.iter().enumerate() {
            let px = positions[x];
            for &y in &nodes[k + 1..] {
                let py = positions[y];
                let d2 = (px.x - py.x).powi(2) + (px.y - py.y).powi(2);
                if d2 <= r2 {
                    current.insert(ContactKey::new(x, y, iface));
                }
            }
        }
    }
    ContactDelta {
        up: current.difference(previous).copied().collect(),
        down: previous.difference(&current).copied().collect(),
        current,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transfer {
    pub contact: ContactKey,
    pub from: NodeId,
    pub to: NodeId,
    pub msg: MessageId,
    pub size: u64,
    pub bytes_sent: f64,
    pub started_at: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum TransferError {
    #[error("node {node} is already sending on interface {iface}")]
    Busy { node: NodeId, iface: InterfaceId },
    #[error("receiver {node} already has {msg}")]
    Duplicate { node: NodeId, msg: MessageId },
    #[error("node {node} is not part of the contact")]
    NotInContact { node: NodeId },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AdvanceOutcome {
    pub completed: Vec<Transfer>,
    pub aborted: Vec<Transfer>,
}

/// Active transfers, at most one outgoing per (node, interface).
#[derive(Debug, Clone, Default)]
pub struct Transfers {
    active: BTreeMap<(NodeId, InterfaceId), Transfer>,
    /// Start order, so completions are handled deterministically.
    order: Vec<(NodeId, InterfaceId)>,
    incoming: HashSet<(NodeId, MessageId)>,
}

impl Transfers {
    pub fn new() -> Transfers {
        Transfers::default()
    }

    pub fn is_busy(&self, node: NodeId, iface: InterfaceId) -> bool {
        self.active.contains_key(&(node, iface))
    }

    /// Whether `msg` is already on its way to `node`.
    pub fn is_incoming(&self, node: NodeId, msg: MessageId) -> bool {
        self.incoming.contains(&(node, msg))
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Transfer> {
        self.order.iter().map(|k| &self.active[k])
    }

    /// Start sending `msg` from `from` over `contact`. `receiver_has` tells
    /// whether the receiver already buffers or has already been delivered
    /// the message.
    pub fn begin(
        &mut self,
        contact: ContactKey,
        from: NodeId,
        msg: &Message,
        receiver_has: bool,
        now: f64,
    ) -> Result<&Transfer, TransferError> {
        if from != contact.a && from != contact.b {
            return Err(TransferError::NotInContact { node: from });
        }
        let to = contact.peer_of(from);
        if self.is_busy(from, contact.iface) {
            return Err(TransferError::Busy {
                node: from,
                iface: contact.iface,
            });
        }
        if receiver_has || self.is_incoming(to, msg.id) {
            return Err(TransferError::Duplicate { node: to, msg: msg.id });
        }
        let key = (from, contact.iface);
        self.incoming.insert((to, msg.id));
        self.order.push(key);
        Ok(self.active.entry(key).or_insert(Transfer {
            contact,
            from,
            to,
            msg: msg.id,
            size: msg.size,
            bytes_sent: 0.0,
            started_at: now,
        }))
    }

    /// Abort transfers whose contact is gone, then push `bandwidth * dt`
    /// bytes through every remaining one.
    pub fn advance(
        &mut self,
        live: &BTreeSet<ContactKey>,
        bandwidth: &[f64],
        dt: f64,
    ) -> AdvanceOutcome {
        let mut out = AdvanceOutcome::default();
        let mut still = Vec::with_capacity(self.order.len());
        for key in std::mem::take(&mut self.order) {
            let mut t = self.active.remove(&key).expect("ordered transfer is active");
            if !live.contains(&t.contact) {
                self.incoming.remove(&(t.to, t.msg));
                out.aborted.push(t);
                continue;
            }
            t.bytes_sent += bandwidth[t.contact.iface] * dt;
            if t.bytes_sent >= t.size as f64 {
                t.bytes_sent = t.size as f64;
                self.incoming.remove(&(t.to, t.msg));
                out.completed.push(t);
            } else {
                self.active.insert(key, t);
                still.push(key);
            }
        }
        self.order = still;
        out
    }
}
