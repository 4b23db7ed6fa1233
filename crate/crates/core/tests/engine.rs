use std::collections::{HashMap, HashSet};

use dtnsim::config::{Protocol, ScenarioConfig};
use dtnsim::engine::{run, EventKind, Simulation};
use dtnsim::net::MessageId;
use dtnsim::reports::compute_metrics;

fn small(protocol: Protocol, buffer: u64) -> ScenarioConfig {
    let mut cfg = ScenarioConfig::stadium().scaled_to(20);
    cfg.sim_duration = 1800.0;
    cfg.router.protocol = protocol;
    cfg.buffer_bytes = buffer;
    cfg
}

#[test]
fn same_seed_same_log() {
    let cfg = small(Protocol::Epidemic, 5_000_000);
    let (a, ma) = run(&cfg, 7).unwrap();
    let (b, mb) = run(&cfg, 7).unwrap();
    assert_eq!(a.to_tsv(), b.to_tsv());
    assert_eq!(format!("{ma:?}"), format!("{mb:?}"));
    let (c, _) = run(&cfg, 8).unwrap();
    assert_ne!(a.to_tsv(), c.to_tsv());
}

#[test]
fn movement_ignores_protocol_and_buffer() {
    let mut sims: Vec<Simulation> = [
        small(Protocol::Epidemic, 5_000_000),
        small(Protocol::SprayAndWait, 5_000_000),
        small(Protocol::Epidemic, 20_000_000),
    ]
    .iter()
    .map(|c| Simulation::new(c, 3).unwrap())
    .collect();
    while !sims[0].is_finished() {
        for s in &mut sims {
            s.step();
        }
        let p0 = sims[0].positions();
        for s in &sims[1..] {
            assert_eq!(s.positions(), p0);
            assert_eq!(s.contacts(), sims[0].contacts());
        }
    }
}

#[test]
fn log_is_consistent() {
    for protocol in [Protocol::Epidemic, Protocol::SprayAndWait] {
        let cfg = small(protocol, 5_000_000);
        let mut sim = Simulation::new(&cfg, 11).unwrap();
        sim.run_to_end();
        let log = sim.log();
        let mut last = 0.0;
        let mut created: HashMap<MessageId, f64> = HashMap::new();
        let mut delivered = HashSet::new();
        let mut up = HashSet::new();
        for e in log.events() {
            assert!(e.time >= last, "time went backwards at {}", e.time);
            last = e.time;
            match e.kind {
                EventKind::Created => {
                    assert!(created.insert(e.msg.unwrap(), e.time).is_none());
                }
                EventKind::Delivered => {
                    let id = e.msg.unwrap();
                    assert!(created.contains_key(&id));
                    assert!(delivered.insert(id), "{id} delivered twice");
                    assert!(e.hops.unwrap() >= 1);
                }
                EventKind::Duplicate => assert!(delivered.contains(&e.msg.unwrap())),
                EventKind::Relayed => assert!(created.contains_key(&e.msg.unwrap())),
                EventKind::ContactUp => assert!(up.insert((e.from, e.to, e.detail))),
                EventKind::ContactDown => assert!(up.remove(&(e.from, e.to, e.detail))),
                _ => {}
            }
        }
        let m = compute_metrics(log);
        assert_eq!(m.created as usize, sim.created_messages().len());
        assert!(m.delivered <= m.created);
        assert!(sim.audit().is_clean(), "{protocol}: {:?}", sim.audit());
    }
}

#[test]
fn epidemic_relays_at_least_as_much() {
    for seed in [1, 2, 3] {
        let (_, e) = run(&small(Protocol::Epidemic, 5_000_000), seed).unwrap();
        let (_, s) = run(&small(Protocol::SprayAndWait, 5_000_000), seed).unwrap();
        assert_eq!(e.created, s.created);
        assert!(e.relayed >= s.relayed, "seed {seed}: {} < {}", e.relayed, s.relayed);
    }
}

#[test]
fn spray_relays_bounded_by_budget() {
    let cfg = small(Protocol::SprayAndWait, 20_000_000);
    let (log, _) = run(&cfg, 5).unwrap();
    let mut relays: HashMap<MessageId, u32> = HashMap::new();
    for e in log.events() {
        if e.kind == EventKind::Relayed {
            *relays.entry(e.msg.unwrap()).or_default() += 1;
        }
    }
    let limit = cfg.router.copies - 1;
    assert!(relays.values().all(|&n| n <= limit));
}
