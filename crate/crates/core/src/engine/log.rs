//! Append-only record of everything that happened during a run.

use std::fmt;
use std::io::{self, Write};

use crate::net::{InterfaceId, MessageId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventKind {
    Created,
    Relayed,
    Delivered,
    Duplicate,
    Dropped,
    Aborted,
    ContactUp,
    ContactDown,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Created => "CREATED",
            EventKind::Relayed => "RELAYED",
            EventKind::Delivered => "DELIVERED",
            EventKind::Duplicate => "DUPLICATE",
            EventKind::Dropped => "DROPPED",
            EventKind::Aborted => "ABORTED",
            EventKind::ContactUp => "CONTACT_UP",
            EventKind::ContactDown => "CONTACT_DOWN",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DropReason {
    BufferOverflow,
    TtlExpiry,
    Oversize,
}

impl DropReason {
    pub fn as_str(self) -> &'static str {
        match self {
            DropReason::BufferOverflow => "buffer-overflow",
            DropReason::TtlExpiry => "ttl-expiry",
            DropReason::Oversize => "oversize",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AbortReason {
    /// The contact carrying the transfer went down.
    ContactDown,
    /// The sender lost its copy before the last byte arrived.
    SenderDropped,
    /// Another transfer of the same message used up the sender's budget.
    CopiesExhausted,
}

impl AbortReason {
    pub fn as_str(self) -> &'static str {
        match self {
            AbortReason::ContactDown => "contact-down",
            AbortReason::SenderDropped => "sender-dropped",
            AbortReason::CopiesExhausted => "copies-exhausted",
        }
    }
}

/// Contents of the `reason` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detail {
    None,
    Drop(DropReason),
    Abort(AbortReason),
    Interface(InterfaceId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub time: f64,
    pub kind: EventKind,
    pub msg: Option<MessageId>,
    /// Sender, holder of a dropped copy, or lower contact endpoint.
    pub from: Option<NodeId>,
    pub to: Option<NodeId>,
    pub hops: Option<u32>,
    /// Copy budget carried by the affected copy (spray-and-wait only).
    pub copies: Option<u32>,
    pub detail: Detail,
}

impl Event {
    pub fn new(time: f64, kind: EventKind) -> Event {
        Event {
            time,
            kind,
            msg: None,
            from: None,
            to: None,
            hops: None,
            copies: None,
            detail: Detail::None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EventLog {
    events: Vec<Event>,
    interfaces: Vec<String>,
}

impl EventLog {
    /// `interfaces` names interface ids in contact events.
    pub fn new(interfaces: Vec<String>) -> EventLog {
        EventLog {
            events: Vec::new(),
            interfaces,
        }
    }

    pub fn push(&mut self, event: Event) {
        debug_assert!(
            self.events.last().is_none_or(|e| e.time <= event.time),
            "event times must not decrease"
        );
        self.events.push(event);
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }

    fn reason(&self, d: Detail) -> &str {
        match d {
            Detail::None => "-",
            Detail::Drop(r) => r.as_str(),
            Detail::Abort(r) => r.as_str(),
            Detail::Interface(i) => self.interfaces.get(i).map_or("?", String::as_str),
        }
    }

    /// One tab-separated line per event:
    /// `time kind msg_id from to hops reason`, `-` for absent fields.
    pub fn write_tsv<W: Write>(&self, mut w: W) -> io::Result<()> {
        fn opt<T: fmt::Display>(v: Option<T>) -> String {
            v.map_or_else(|| "-".to_string(), |x| x.to_string())
        }
        for e in &self.events {
            writeln!(
                w,
                "{:.3}\t{}\t{}\t{}\t{}\t{}\t{}",
                e.time,
                e.kind,
                opt(e.msg),
                opt(e.from),
                opt(e.to),
                opt(e.hops),
                self.reason(e.detail)
            )?;
        }
        w.flush()
    }

    pub fn to_tsv(&self) -> String {
        let mut buf = Vec::new();
        self.write_tsv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("log is ASCII")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_layout() {
        let mut log = EventLog::new(vec!["bluetooth".into(), "wifi".into()]);
        let mut up = Event::new(0.0, EventKind::ContactUp);
        up.from = Some(0);
        up.to = Some(3);
        up.detail = Detail::Interface(1);
        log.push(up);
        let mut created = Event::new(31.5, EventKind::Created);
        created.msg = Some(MessageId(1));
        created.from = Some(2);
        created.to = Some(7);
        log.push(created);
        let mut drop = Event::new(40.0, EventKind::Dropped);
        drop.msg = Some(MessageId(1));
        drop.from = Some(2);
        drop.detail = Detail::Drop(DropReason::TtlExpiry);
        log.push(drop);
        assert_eq!(
            log.to_tsv(),
            "0.000\tCONTACT_UP\t-\t0\t3\t-\twifi\n\
             31.500\tCREATED\tM1\t2\t7\t-\t-\n\
             40.000\tDROPPED\tM1\t2\t-\t-\tttl-expiry\n"
        );
        assert_eq!(log.count(EventKind::Created), 1);
    }
}
