//! FIFO drop-tail output queue of one directed link.

use std::collections::VecDeque;

use super::packet::{Packet, PacketKind};

#[derive(Debug)]
pub enum Enqueue {
    /// The link was idle; the packet is on the wire until `completes_at`.
    Started { completes_at: f64 },
    /// Queued behind other packets.
    Waiting,
    /// Queue full; the packet is handed back.
    Dropped(Packet),
}

#[derive(Debug)]
pub struct LinkQueue {
    packets: VecDeque<Packet>,
    backlog_bits: u64,
    busy_until: f64,
    capacity_packets: usize,
    rate_bps: f64,
}

impl LinkQueue {
    pub fn new(capacity_packets: usize, rate_bps: f64) -> Self {
        LinkQueue {
            packets: VecDeque::new(),
            backlog_bits: 0,
            busy_until: 0.0,
            capacity_packets,
            rate_bps,
        }
    }

    /// Packets held, the one in transmission included.
    pub fn len(&self) -> usize {
        self.packets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.packets.is_empty()
    }

    pub fn backlog_bits(&self) -> u64 {
        self.backlog_bits
    }

    /// Time to clear the current backlog at line rate.
    pub fn backlog_seconds(&self) -> f64 {
        self.backlog_bits as f64 / self.rate_bps
    }

    pub fn busy_until(&self) -> f64 {
        self.busy_until
    }

    pub fn count(&self, kind: PacketKind) -> usize {
        self.packets.iter().filter(|p| p.kind == kind).count()
    }

    pub fn enqueue(&mut self, packet: Packet, now: f64) -> Enqueue {
        if self.packets.len() >= self.capacity_packets {
            return Enqueue::Dropped(packet);
        }
        self.backlog_bits += packet.size_bits;
        let size = packet.size_bits;
        self.packets.push_back(packet);
        if self.packets.len() == 1 {
            self.busy_until = now + size as f64 / self.rate_bps;
            Enqueue::Started {
                completes_at: self.busy_until,
            }
        } else {
            Enqueue::Waiting
        }
    }

    /// Removes the packet whose transmission just finished and starts the
    /// next one, returning its completion time.
    pub fn complete(&mut self, now: f64) -> (Packet, Option<f64>) {
        let done = self
            .packets
            .pop_front()
            .expect("transmission completes only on a busy link");
        self.backlog_bits -= done.size_bits;
        let next = self.packets.front().map(|p| {
            self.busy_until = now + p.size_bits as f64 / self.rate_bps;
            self.busy_until
        });
        (done, next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::{LinkId, NodeId};
    use std::rc::Rc;

    fn pkt(id: u64, bits: u64) -> Packet {
        Packet {
            id,
            kind: PacketKind::Data,
            source: NodeId(0),
            destination: NodeId(1),
            path_index: 0,
            route: Rc::from(vec![LinkId(0)]),
            hop_index: 0,
            created_at: 0.0,
            size_bits: bits,
            carried_delay: 0.0,
            propagation: 0.0,
            advert: None,
        }
    }

    #[test]
    fn empty_queue_starts_immediately() {
        let mut q = LinkQueue::new(4, 1e6);
        match q.enqueue(pkt(1, 1000), 0.5) {
            Enqueue::Started { completes_at } => assert_eq!(completes_at, 0.5 + 0.001),
            other => panic!("{other:?}"),
        }
        assert_eq!(q.backlog_bits(), 1000);
    }

    #[test]
    fn full_queue_drops() {
        let mut q = LinkQueue::new(2, 1e6);
        q.enqueue(pkt(1, 1000), 0.0);
        q.enqueue(pkt(2, 1000), 0.0);
        assert!(matches!(q.enqueue(pkt(3, 1000), 0.0), Enqueue::Dropped(p) if p.id == 3));
        assert_eq!(q.len(), 2);
        assert_eq!(q.backlog_bits(), 2000);
    }

    #[test]
    fn back_to_back_serialization() {
        let mut q = LinkQueue::new(8, 1e6);
        let start = 1.0;
        assert!(matches!(q.enqueue(pkt(1, 1000), start), Enqueue::Started { .. }));
        assert!(matches!(q.enqueue(pkt(2, 1000), start), Enqueue::Waiting));
        let first_done = q.busy_until();
        let (p1, next) = q.complete(first_done);
        assert_eq!(p1.id, 1);
        let second_done = next.unwrap();
        assert!((second_done - start - 0.002).abs() < 1e-15);
        let (p2, next) = q.complete(second_done);
        assert_eq!(p2.id, 2);
        assert!(next.is_none());
        assert_eq!(q.backlog_bits(), 0);
    }
}
