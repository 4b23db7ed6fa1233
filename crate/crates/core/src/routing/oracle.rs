//! Reference model of ideal epidemic spreading over a scripted contact
//! schedule: unlimited buffers and transfers that finish instantly.
//!
//! The schedule is swept in time order, which is a breadth-first walk of
//! the time-expanded contact graph. At each contact every message held by
//! one side and missing on the other crosses over. The destination keeps
//! no relay copy, so it never passes a message on; only the earliest
//! arrival there counts as the delivery. Contact times must be distinct; a
//! copy picked up at one contact can be passed on at any later one.

/// Instantaneous meeting of nodes `a` and `b` at `time`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledContact {
    pub time: f64,
    pub a: usize,
    pub b: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleMessage {
    pub src: usize,
    pub dst: usize,
    pub created_at: f64,
    pub ttl: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleDelivery {
    pub time: f64,
    pub hops: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    /// Earliest delivery per message, `None` if it never arrives alive.
    pub deliveries: Vec<Option<OracleDelivery>>,
    /// Largest number of messages crossing one contact in one direction.
    pub max_crossings: usize,
}

pub fn epidemic_oracle(
    node_count: usize,
    contacts: &[ScheduledContact],
    messages: &[OracleMessage],
) -> OracleReport {
    let mut schedule = contacts.to_vec();
    schedule.sort_by(|x, y| x.time.total_cmp(&y.time));
    assert!(
        schedule.windows(2).all(|w| w[0].time < w[1].time),
        "oracle requires distinct contact times"
    );

    // hops[m][n] = hop count of node n's copy of message m.
    let mut hops: Vec<Vec<Option<u32>>> = messages
        .iter()
        .map(|m| {
            let mut h = vec![None; node_count];
            h[m.src] = Some(0);
            h
        })
        .collect();
    let mut deliveries: Vec<Option<OracleDelivery>> = vec![None; messages.len()];
    let mut max_crossings = 0;

    for c in &schedule {
        let mut crossings = [0usize; 2];
        for (k, m) in messages.iter().enumerate() {
            let alive = c.time >= m.created_at && c.time - m.created_at <= m.ttl;
            if !alive {
                continue;
            }
            let sends = |n: usize| if n == m.dst { None } else { hops[k][n] };
            let lacks = |n: usize| {
                if n == m.dst {
                    deliveries[k].is_none()
                } else {
                    hops[k][n].is_none()
                }
            };
            let directions = [(c.b, sends(c.a), lacks(c.b)), (c.a, sends(c.b), lacks(c.a))];
            for (dir, (y, hx, missing)) in directions.into_iter().enumerate() {
                let (Some(h), true) = (hx, missing) else {
                    continue;
                };
                crossings[dir] += 1;
                if y == m.dst {
                    deliveries[k] = Some(OracleDelivery {
                        time: c.time,
                        hops: h + 1,
                    });
                } else {
                    hops[k][y] = Some(h + 1);
                }
            }
        }
        max_crossings = max_crossings.max(crossings[0]).max(crossings[1]);
    }

    OracleReport {
        deliveries,
        max_crossings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: usize = 0;
    const B: usize = 1;
    const C: usize = 2;

    fn msg(src: usize, dst: usize) -> OracleMessage {
        OracleMessage {
            src,
            dst,
            created_at: 0.0,
            ttl: 1_000.0,
        }
    }

    #[test]
    fn chain_delivers_at_second_contact() {
        let contacts = [
            ScheduledContact { time: 10.0, a: A, b: B },
            ScheduledContact { time: 20.0, a: B, b: C },
        ];
        let r = epidemic_oracle(3, &contacts, &[msg(A, C)]);
        assert_eq!(r.deliveries, vec![Some(OracleDelivery { time: 20.0, hops: 2 })]);
    }

    #[test]
    fn contact_order_matters() {
        let contacts = [
            ScheduledContact { time: 5.0, a: B, b: C },
            ScheduledContact { time: 10.0, a: A, b: B },
        ];
        let r = epidemic_oracle(3, &contacts, &[msg(A, C)]);
        assert_eq!(r.deliveries, vec![None]);
    }

    #[test]
    fn expired_messages_do_not_move() {
        let contacts = [ScheduledContact { time: 10.0, a: A, b: C }];
        let mut m = msg(A, C);
        m.ttl = 9.0;
        assert_eq!(epidemic_oracle(3, &contacts, &[m]).deliveries, vec![None]);
        m.ttl = 10.0;
        assert!(epidemic_oracle(3, &contacts, &[m]).deliveries[0].is_some());
    }

    #[test]
    fn destination_does_not_forward() {
        // C receives at 10 and would pass to B at 20 if it forwarded.
        let contacts = [
            ScheduledContact { time: 10.0, a: A, b: C },
            ScheduledContact { time: 20.0, a: C, b: B },
        ];
        let r = epidemic_oracle(3, &contacts, &[msg(A, C), msg(B, A)]);
        assert_eq!(r.deliveries[0], Some(OracleDelivery { time: 10.0, hops: 1 }));
        assert_eq!(r.deliveries[1], None);
        assert_eq!(r.max_crossings, 1);
    }
}
