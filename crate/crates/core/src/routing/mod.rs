//! Forwarding decisions for Epidemic and Spray-and-Wait.
//!
//! Both protocols share one ordering rule for what to send over a contact:
//! messages addressed to the peer first, then everything else oldest
//! first. They differ only in which non-destination messages are eligible:
//! Epidemic offers every message the peer lacks; Spray-and-Wait offers only
//! messages whose copy budget can still be split (`copies >= 2`).

pub mod oracle;

use std::collections::HashSet;

use thiserror::Error;

use crate::config::{Protocol, RouterConfig};
use crate::net::{Buffer, Message, MessageId, NodeId};

/// Per-node routing state.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RouterState {
    delivered: HashSet<MessageId>,
}

impl RouterState {
    pub fn new() -> RouterState {
        RouterState::default()
    }

    /// Whether this node has received `id` as its final destination.
    pub fn has_delivered(&self, id: MessageId) -> bool {
        self.delivered.contains(&id)
    }

    pub fn delivered_count(&self) -> usize {
        self.delivered.len()
    }
}

/// What a node advertises on contact: its buffered ids plus the ids it
/// already received as destination.
#[derive(Debug, Clone, Copy)]
pub struct SummaryVector<'a> {
    buffer: &'a Buffer,
    state: &'a RouterState,
}

impl<'a> SummaryVector<'a> {
    pub fn new(buffer: &'a Buffer, state: &'a RouterState) -> Self {
        SummaryVector { buffer, state }
    }

    pub fn contains(&self, id: MessageId) -> bool {
        self.buffer.contains(id) || self.state.has_delivered(id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IntentKind {
    /// The peer is the destination.
    Direct,
    /// Hand a replica to an intermediate node.
    Replicate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TransferIntent {
    pub msg: MessageId,
    pub kind: IntentKind,
}

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum RoutingError {
    #[error("cannot split a budget of {0} copies")]
    CannotSplit(u32),
}

/// Split a copy budget at hand-off: `(kept by sender, given to receiver)`.
/// Binary spray halves it; source spray hands over a single copy.
pub fn split_copies(copies: u32, binary: bool) -> Result<(u32, u32), RoutingError> {
    if copies < 2 {
        return Err(RoutingError::CannotSplit(copies));
    }
    Ok(if binary {
        (copies.div_ceil(2), copies / 2)
    } else {
        (copies - 1, 1)
    })
}

/// Result of a completed transfer.
#[derive(Debug, Clone, PartialEq)]
pub enum CompletionOutcome {
    /// First arrival at the destination.
    Delivered { hops: u32 },
    /// Repeat arrival at the destination; not a delivery.
    Duplicate { hops: u32 },
    /// Stored at an intermediate node. `rejected` holds the copy when the
    /// receiver could not buffer it.
    Relayed {
        hops: u32,
        evicted: Vec<Message>,
        rejected: Option<Message>,
    },
    /// The sender no longer holds the message, so nothing was handed over.
    SenderLost,
}

/// Mutable view of the receiving node.
pub struct Receiver<'a> {
    pub id: NodeId,
    pub buffer: &'a mut Buffer,
    pub state: &'a mut RouterState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Router {
    pub protocol: Protocol,
    pub copies: u32,
    pub binary: bool,
}

impl Router {
    pub fn new(cfg: &RouterConfig) -> Router {
        Router {
            protocol: cfg.protocol,
            copies: cfg.copies,
            binary: cfg.binary,
        }
    }

    pub fn epidemic() -> Router {
        Router {
            protocol: Protocol::Epidemic,
            copies: 1,
            binary: true,
        }
    }

    pub fn spray_and_wait(copies: u32, binary: bool) -> Router {
        Router {
            protocol: Protocol::SprayAndWait,
            copies,
            binary,
        }
    }

    /// Budget stamped on freshly created messages.
    pub fn initial_copies(&self) -> Option<u32> {
        match self.protocol {
            Protocol::Epidemic => None,
            Protocol::SprayAndWait => Some(self.copies),
        }
    }

    fn eligibility(&self, m: &Message, peer: NodeId, peer_sv: &SummaryVector<'_>, now: f64) -> Option<IntentKind> {
        if m.is_expired(now) || peer_sv.contains(m.id) {
            return None;
        }
        if m.dst == peer {
            return Some(IntentKind::Direct);
        }
        match self.protocol {
            Protocol::Epidemic => Some(IntentKind::Replicate),
            Protocol::SprayAndWait => (m.copies.unwrap_or(1) >= 2).then_some(IntentKind::Replicate),
        }
    }

    fn rank(kind: IntentKind, m: &Message) -> (IntentKind, f64, MessageId) {
        (kind, m.created_at, m.id)
    }

    /// Everything `own` would send to `peer`, in sending order.
    pub fn on_contact_up(
        &self,
        own: &Buffer,
        peer: NodeId,
        peer_sv: &SummaryVector<'_>,
        now: f64,
    ) -> Vec<TransferIntent> {
        let mut offers: Vec<(IntentKind, &Message)> = own
            .iter()
            .filter_map(|m| self.eligibility(m, peer, peer_sv, now).map(|k| (k, m)))
            .collect();
        offers.sort_by(|x, y| {
            let (kx, tx, ix) = Self::rank(x.0, x.1);
            let (ky, ty, iy) = Self::rank(y.0, y.1);
            kx.cmp(&ky).then(tx.total_cmp(&ty)).then(ix.cmp(&iy))
        });
        offers
            .into_iter()
            .map(|(kind, m)| TransferIntent { msg: m.id, kind })
            .collect()
    }

    /// First entry of [`Router::on_contact_up`] not rejected by `skip`,
    /// without sorting the whole buffer.
    pub fn next_intent(
        &self,
        own: &Buffer,
        peer: NodeId,
        peer_sv: &SummaryVector<'_>,
        now: f64,
        skip: impl Fn(MessageId) -> bool,
    ) -> Option<TransferIntent> {
        let mut best: Option<(IntentKind, &Message)> = None;
        for m in own.iter() {
            let Some(kind) = self.eligibility(m, peer, peer_sv, now) else {
                continue;
            };
            if skip(m.id) {
                continue;
            }
            let better = match best {
                None => true,
                Some((bk, bm)) => {
                    let (kx, tx, ix) = Self::rank(kind, m);
                    let (ky, ty, iy) = Self::rank(bk, bm);
                    kx.cmp(&ky).then(tx.total_cmp(&ty)).then(ix.cmp(&iy)).is_lt()
                }
            };
            if better {
                best = Some((kind, m));
            }
        }
        best.map(|(kind, m)| TransferIntent { msg: m.id, kind })
    }

    /// Hand `msg` from `sender` to `receiver` after the bytes arrived.
    pub fn on_transfer_complete(
        &self,
        sender: &mut Buffer,
        receiver: Receiver<'_>,
        msg: MessageId,
    ) -> Result<CompletionOutcome, RoutingError> {
        let Some(held) = sender.get_mut(msg) else {
            return Ok(CompletionOutcome::SenderLost);
        };
        let hops = held.hops + 1;
        if held.dst == receiver.id {
            return Ok(if receiver.state.delivered.insert(msg) {
                CompletionOutcome::Delivered { hops }
            } else {
                CompletionOutcome::Duplicate { hops }
            });
        }
        let mut copy = held.clone();
        copy.hops = hops;
        if self.protocol == Protocol::SprayAndWait {
            let (kept, given) = split_copies(held.copies.unwrap_or(1), self.binary)?;
            held.copies = Some(kept);
            copy.copies = Some(given);
        }
        let out = receiver.buffer.insert(copy.clone());
        Ok(CompletionOutcome::Relayed {
            hops,
            evicted: out.evicted,
            rejected: (!out.accepted).then_some(copy),
        })
    }
}
