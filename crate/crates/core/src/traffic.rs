//! Network-wide distress message generator.
//!
//! A single creation process fires every `interval` seconds (uniform draw
//! per gap). Each message goes from a random source-role node to a random
//! destination-role node. Gaps are added to the previous scheduled time,
//! not to the tick at which the creation was processed, so a coarse tick
//! does not stretch the schedule.

use rand::Rng;

use crate::config::{Span, TrafficConfig};
use crate::net::{Buffer, Message, MessageId, NodeId};

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficState {
    pub next_creation_at: f64,
    pub created_count: u64,
    next_id: u64,
}

fn draw_f64<R: Rng + ?Sized>(span: Span<f64>, rng: &mut R) -> f64 {
    if span.min >= span.max {
        span.min
    } else {
        rng.gen_range(span.min..=span.max)
    }
}

/// `now` plus one interval draw.
pub fn schedule_next<R: Rng + ?Sized>(interval: Span<f64>, now: f64, rng: &mut R) -> f64 {
    now + draw_f64(interval, rng)
}

impl TrafficState {
    /// State with the first creation one interval after time zero.
    pub fn new<R: Rng + ?Sized>(cfg: &TrafficConfig, rng: &mut R) -> TrafficState {
        TrafficState {
            next_creation_at: schedule_next(cfg.interval, 0.0, rng),
            created_count: 0,
            next_id: 1,
        }
    }

    pub fn is_due(&self, now: f64) -> bool {
        now >= self.next_creation_at
    }

    /// Draw the next message and advance the schedule. `copies` is the
    /// router's initial budget.
    pub fn create_message<R: Rng + ?Sized>(
        &mut self,
        cfg: &TrafficConfig,
        sources: &[NodeId],
        destinations: &[NodeId],
        now: f64,
        copies: Option<u32>,
        rng: &mut R,
    ) -> Message {
        let src = sources[rng.gen_range(0..sources.len())];
        let candidates: Vec<NodeId> = destinations.iter().copied().filter(|&d| d != src).collect();
        let dst = candidates[rng.gen_range(0..candidates.len())];
        let size = if cfg.size.min >= cfg.size.max {
            cfg.size.min
        } else {
            rng.gen_range(cfg.size.min..=cfg.size.max)
        };
        let id = MessageId(self.next_id);
        self.next_id += 1;
        self.created_count += 1;
        self.next_creation_at = schedule_next(cfg.interval, self.next_creation_at, rng);
        Message {
            id,
            src,
            dst,
            size,
            created_at: now,
            ttl: cfg.ttl,
            hops: 0,
            copies,
        }
    }
}

/// Remove expired copies from every buffer; returns `(holder, copy)` pairs
/// in node order.
pub fn purge_expired<'a>(
    buffers: impl IntoIterator<Item = &'a mut Buffer>,
    now: f64,
) -> Vec<(NodeId, Message)> {
    let mut out = Vec::new();
    for (node, b) in buffers.into_iter().enumerate() {
        out.extend(b.purge_expired(now).into_iter().map(|m| (node, m)));
    }
    out
}
