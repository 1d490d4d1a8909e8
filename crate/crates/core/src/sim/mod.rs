//! Deterministic packet-level discrete-event simulator.
//!
//! Sources inject source-routed data packets along a candidate path chosen
//! by the routing policy. Links are FIFO drop-tail queues with a
//! serialization delay of `size / capacity` followed by the propagation
//! delay. For learning policies every delivered data packet triggers an ack
//! that travels the reversed route through the same queues and feeds the
//! measured delay back to the sender.
//!
//! One simulation is a single-threaded event loop; given the same inputs
//! and seed it replays exactly.

pub mod event;
pub mod metrics;
pub mod packet;
pub mod queue;
pub mod traffic;

use std::rc::Rc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::policy::{PolicyError, PolicyState, QueueSnapshot};
use crate::topology::{validate_graph, Graph, LinkId, NodeId, Violation};

use event::{Action, EventQueue};
use metrics::{Totals, Window};
use packet::{Packet, PacketKind};
use queue::{Enqueue, LinkQueue};
use traffic::{poisson_interarrival, TrafficSource};

pub use metrics::{conservation_check, InFlight, MetricsSeries};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid graph: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidGraph(Vec<Violation>),
    #[error("invalid settings: {0}")]
    Settings(String),
    #[error("invalid traffic: {0}")]
    Traffic(String),
    #[error("policy table does not match the graph")]
    TableMismatch,
    #[error(transparent)]
    Policy(#[from] PolicyError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimSettings {
    /// Simulated seconds.
    pub duration: f64,
    /// Metrics window length in seconds.
    pub window: f64,
    pub data_size_bits: u64,
    pub ack_size_bits: u64,
    /// Keep a per-packet delivery log in the outcome.
    pub record_deliveries: bool,
}

impl Default for SimSettings {
    fn default() -> Self {
        SimSettings {
            duration: 300.0,
            window: 5.0,
            data_size_bits: 8192,
            ack_size_bits: 64,
            record_deliveries: false,
        }
    }
}

impl SimSettings {
    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: &str| Err(SimError::Settings(m.to_string()));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration must be positive");
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return bad("window must be positive");
        }
        if self.ack_size_bits == 0 || self.data_size_bits < self.ack_size_bits {
            return bad("packet sizes must satisfy data >= ack > 0");
        }
        Ok(())
    }
}

/// One delivered data packet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Delivery {
    pub source: NodeId,
    pub destination: NodeId,
    pub path_index: usize,
    pub created_at: f64,
    pub delivered_at: f64,
    /// Sum of propagation delays along the route.
    pub propagation: f64,
}

impl Delivery {
    pub fn delay(&self) -> f64 {
        self.delivered_at - self.created_at
    }
}

#[derive(Debug, Clone)]
pub struct SimOutcome {
    pub metrics: MetricsSeries,
    /// Packets still queued or on the wire at the end.
    pub in_flight: InFlight,
    pub events_processed: u64,
    /// Hash over the (time, kind) sequence of processed events.
    pub trace_digest: u64,
    /// Popped events whose time preceded the previous one. Always zero.
    pub time_regressions: u64,
    pub deliveries: Vec<Delivery>,
    /// Final routing state.
    pub policy: PolicyState,
}

struct Routes {
    forward: Rc<[LinkId]>,
    reverse: Rc<[LinkId]>,
    propagation: f64,
}

struct Engine<'a> {
    graph: &'a Graph,
    policy: PolicyState,
    traffic: &'a TrafficSource,
    settings: &'a SimSettings,
    events: EventQueue,
    queues: Vec<LinkQueue>,
    routes: Vec<Vec<Routes>>,
    /// Per node, per link: backlog seconds last advertised by the link's
    /// owner. Only maintained for queue-aware policies.
    advertised: Vec<Vec<f64>>,
    traffic_rng: ChaCha8Rng,
    policy_rng: ChaCha8Rng,
    epoch: u64,
    next_packet_id: u64,
    pending_arrivals: [u64; 2],
    totals: Totals,
    window: WindowAccumulator,
    windows: Vec<Window>,
    phase_changes: Vec<f64>,
    deliveries: Vec<Delivery>,
    trace: u64,
}

#[derive(Default)]
struct WindowAccumulator {
    delivered: u64,
    dropped: u64,
    control_bits: u64,
    delay_sum: f64,
}

const FNV_PRIME: u64 = 0x100_0000_01b3;

fn window_bounds(settings: &SimSettings) -> Vec<f64> {
    let mut ends = Vec::new();
    let mut i = 1u64;
    loop {
        let end = i as f64 * settings.window;
        if end >= settings.duration {
            ends.push(settings.duration);
            break;
        }
        ends.push(end);
        i += 1;
    }
    ends
}

impl<'a> Engine<'a> {
    fn new(
        graph: &'a Graph,
        policy: PolicyState,
        traffic: &'a TrafficSource,
        settings: &'a SimSettings,
        seed: u64,
    ) -> Self {
        let queues = graph
            .links()
            .iter()
            .map(|l| LinkQueue::new(l.queue_capacity, l.capacity))
            .collect();
        let table = policy.table();
        let n = graph.node_count();
        let routes = (0..n * n)
            .map(|pair| {
                table
                    .by_index(pair)
                    .paths
                    .iter()
                    .map(|p| {
                        let links: Vec<LinkId> = p.links(graph).collect();
                        let propagation = links.iter().map(|l| graph.link(*l).propagation_delay).sum();
                        let reverse: Vec<LinkId> = links
                            .iter()
                            .rev()
                            .map(|l| {
                                let link = graph.link(*l);
                                graph
                                    .link_between(link.to, link.from)
                                    .expect("links are bidirectional")
                            })
                            .collect();
                        Routes {
                            forward: Rc::from(links),
                            reverse: Rc::from(reverse),
                            propagation,
                        }
                    })
                    .collect()
            })
            .collect();
        let advertised = if policy.kind().uses_queue_state() {
            vec![vec![0.0; graph.link_count()]; n]
        } else {
            Vec::new()
        };
        let mut traffic_rng = ChaCha8Rng::seed_from_u64(seed);
        traffic_rng.set_stream(1);
        let mut policy_rng = ChaCha8Rng::seed_from_u64(seed);
        policy_rng.set_stream(2);
        Engine {
            graph,
            policy,
            traffic,
            settings,
            events: EventQueue::new(),
            queues,
            routes,
            advertised,
            traffic_rng,
            policy_rng,
            epoch: 0,
            next_packet_id: 0,
            pending_arrivals: [0; 2],
            totals: Totals::default(),
            window: WindowAccumulator::default(),
            windows: Vec::new(),
            phase_changes: Vec::new(),
            deliveries: Vec::new(),
            trace: 0xcbf2_9ce4_8422_2325,
        }
    }

    fn run(mut self) -> Result<SimOutcome, SimError> {
        for (i, end) in window_bounds(self.settings).into_iter().enumerate() {
            self.events.schedule(end, Action::WindowClose { index: i });
        }
        for (i, phase) in self.traffic.phases.iter().enumerate().skip(1) {
            if phase.start < self.settings.duration {
                self.events.schedule(phase.start, Action::PhaseChange { phase: i });
            }
        }
        self.arm_source(0.0, self.traffic.phases[0].lambda);

        let mut processed = 0u64;
        let mut regressions = 0u64;
        let mut now = 0.0f64;
        while let Some(t) = self.events.peek_time() {
            if t > self.settings.duration {
                break;
            }
            let ev = self.events.pop().expect("peeked");
            if ev.time < now {
                regressions += 1;
            }
            now = ev.time;
            processed += 1;
            self.trace = (self.trace ^ ev.time.to_bits()).wrapping_mul(FNV_PRIME);
            self.trace = (self.trace ^ ev.action.tag() as u64).wrapping_mul(FNV_PRIME);
            self.dispatch(now, ev.action)?;
        }

        let in_flight = self.in_flight();
        Ok(SimOutcome {
            metrics: MetricsSeries {
                window_length: self.settings.window,
                windows: self.windows,
                totals: self.totals,
                phase_changes: self.phase_changes,
            },
            in_flight,
            events_processed: processed,
            trace_digest: self.trace,
            time_regressions: regressions,
            deliveries: self.deliveries,
            policy: self.policy,
        })
    }

    fn dispatch(&mut self, now: f64, action: Action) -> Result<(), SimError> {
        match action {
            Action::SourceFire { epoch } => {
                if epoch == self.epoch {
                    self.fire(now)?;
                }
            }
            Action::Arrival { node, packet } => {
                self.pending_arrivals[packet.kind.slot()] -= 1;
                self.arrive(now, node, packet)?;
            }
            Action::TransmissionComplete { link } => self.transmitted(now, link),
            Action::WindowClose { index } => self.close_window(now, index),
            Action::PhaseChange { phase } => {
                self.phase_changes.push(now);
                self.arm_source(now, self.traffic.phases[phase].lambda);
            }
        }
        Ok(())
    }

    fn arm_source(&mut self, now: f64, lambda: f64) {
        self.epoch += 1;
        if lambda > 0.0 {
            let dt = poisson_interarrival(lambda, &mut self.traffic_rng);
            self.events.schedule(now + dt, Action::SourceFire { epoch: self.epoch });
        }
    }

    fn current_lambda(&self, now: f64) -> f64 {
        self.traffic
            .phases
            .iter()
            .rev()
            .find(|p| p.start <= now)
            .map_or(0.0, |p| p.lambda)
    }

    fn queue_snapshot(&self, s: NodeId, t: NodeId) -> QueueSnapshot {
        let pair = self.policy.table().pair_index(s, t);
        QueueSnapshot(
            self.routes[pair]
                .iter()
                .map(|r| {
                    let local = self.queues[r.forward[0].0].backlog_seconds();
                    let remote = r.forward.get(1).map_or(0.0, |l| self.advertised[s.0][l.0]);
                    local + remote
                })
                .collect(),
        )
    }

    fn fire(&mut self, now: f64) -> Result<(), SimError> {
        let (s, t) = self.traffic.draw_pair(self.graph.node_count(), &mut self.traffic_rng);
        let snapshot = self
            .policy
            .kind()
            .uses_queue_state()
            .then(|| self.queue_snapshot(s, t));
        let index = self.policy.select(s, t, snapshot.as_ref(), &mut self.policy_rng)?;
        let pair = self.policy.table().pair_index(s, t);
        let route = &self.routes[pair][index];
        let packet = Packet {
            id: self.next_packet_id,
            kind: PacketKind::Data,
            source: s,
            destination: t,
            path_index: index,
            route: route.forward.clone(),
            hop_index: 0,
            created_at: now,
            size_bits: self.settings.data_size_bits,
            carried_delay: 0.0,
            propagation: route.propagation,
            advert: None,
        };
        self.next_packet_id += 1;
        self.totals.data.generated += 1;
        self.forward(now, packet);

        let lambda = self.current_lambda(now);
        if lambda > 0.0 {
            let dt = poisson_interarrival(lambda, &mut self.traffic_rng);
            self.events.schedule(now + dt, Action::SourceFire { epoch: self.epoch });
        }
        Ok(())
    }

    fn forward(&mut self, now: f64, packet: Packet) {
        let link = packet.next_link().expect("forwarded packets have hops left");
        match self.queues[link.0].enqueue(packet, now) {
            Enqueue::Started { completes_at } => {
                self.events
                    .schedule(completes_at, Action::TransmissionComplete { link });
            }
            Enqueue::Waiting => {}
            Enqueue::Dropped(p) => {
                self.totals.counts_mut(p.kind).dropped += 1;
                if p.kind == PacketKind::Data {
                    self.window.dropped += 1;
                }
            }
        }
    }

    fn transmitted(&mut self, now: f64, link: LinkId) {
        let (mut packet, next) = self.queues[link.0].complete(now);
        if let Some(at) = next {
            self.events.schedule(at, Action::TransmissionComplete { link });
        }
        if packet.kind == PacketKind::Ack {
            self.totals.control_bits += packet.size_bits;
            self.window.control_bits += packet.size_bits;
        }
        let l = self.graph.link(link);
        if !self.advertised.is_empty() {
            packet.advert = Some(
                self.graph
                    .outgoing(l.from)
                    .iter()
                    .map(|o| self.queues[o.0].backlog_seconds())
                    .collect(),
            );
        }
        packet.hop_index += 1;
        self.pending_arrivals[packet.kind.slot()] += 1;
        self.events.schedule(
            now + l.propagation_delay,
            Action::Arrival {
                node: l.to,
                packet,
            },
        );
    }

    fn arrive(&mut self, now: f64, node: NodeId, mut packet: Packet) -> Result<(), SimError> {
        if let Some(advert) = packet.advert.take() {
            let from = self.graph.link(packet.route[packet.hop_index - 1]).from;
            for (o, backlog) in self.graph.outgoing(from).iter().zip(advert) {
                self.advertised[node.0][o.0] = backlog;
            }
        }
        if !packet.at_end() {
            self.forward(now, packet);
            return Ok(());
        }
        match packet.kind {
            PacketKind::Data => self.deliver(now, packet),
            PacketKind::Ack => {
                self.totals.ack.delivered += 1;
                self.policy.on_ack(
                    packet.source,
                    packet.destination,
                    packet.path_index,
                    packet.carried_delay,
                )?;
            }
        }
        Ok(())
    }

    fn deliver(&mut self, now: f64, packet: Packet) {
        let delay = now - packet.created_at;
        self.totals.data.delivered += 1;
        self.totals.delay_sum += delay;
        self.window.delivered += 1;
        self.window.delay_sum += delay;
        if self.settings.record_deliveries {
            self.deliveries.push(Delivery {
                source: packet.source,
                destination: packet.destination,
                path_index: packet.path_index,
                created_at: packet.created_at,
                delivered_at: now,
                propagation: packet.propagation,
            });
        }
        if !self.policy.kind().is_adaptive() {
            return;
        }
        let pair = self.policy.table().pair_index(packet.source, packet.destination);
        let ack = Packet {
            id: self.next_packet_id,
            kind: PacketKind::Ack,
            source: packet.source,
            destination: packet.destination,
            path_index: packet.path_index,
            route: self.routes[pair][packet.path_index].reverse.clone(),
            hop_index: 0,
            created_at: now,
            size_bits: self.settings.ack_size_bits,
            carried_delay: delay,
            propagation: packet.propagation,
            advert: None,
        };
        self.next_packet_id += 1;
        self.totals.ack.generated += 1;
        self.totals.control_packets += 1;
        self.forward(now, ack);
    }

    /// Counts packets in queues and on the wire, independently of the
    /// generated/delivered/dropped counters.
    fn in_flight(&self) -> InFlight {
        let queued = |kind| self.queues.iter().map(|q| q.count(kind) as u64).sum::<u64>();
        InFlight {
            data: queued(PacketKind::Data) + self.pending_arrivals[0],
            ack: queued(PacketKind::Ack) + self.pending_arrivals[1],
        }
    }

    fn close_window(&mut self, now: f64, index: usize) {
        let acc = std::mem::take(&mut self.window);
        let start = if index == 0 {
            0.0
        } else {
            index as f64 * self.settings.window
        };
        self.windows.push(Window {
            start,
            end: now,
            delivered: acc.delivered,
            dropped: acc.dropped,
            control_bits: acc.control_bits,
            delay_sum: acc.delay_sum,
            totals: self.totals,
            in_flight: self.in_flight(),
        });
    }
}

/// Runs one simulation to `settings.duration`.
pub fn run(
    graph: &Graph,
    policy: PolicyState,
    traffic: &TrafficSource,
    settings: &SimSettings,
    seed: u64,
) -> Result<SimOutcome, SimError> {
    let violations = validate_graph(graph);
    if !violations.is_empty() {
        return Err(SimError::InvalidGraph(violations));
    }
    settings.validate()?;
    traffic
        .validate(graph.node_count())
        .map_err(SimError::Traffic)?;
    if policy.table().node_count() != graph.node_count() {
        return Err(SimError::TableMismatch);
    }
    Engine::new(graph, policy, traffic, settings, seed).run()
}
