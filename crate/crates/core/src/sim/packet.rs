use std::rc::Rc;

use crate::topology::{LinkId, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PacketKind {
    Data,
    Ack,
}

impl PacketKind {
    pub(crate) fn slot(self) -> usize {
        match self {
            PacketKind::Data => 0,
            PacketKind::Ack => 1,
        }
    }
}

/// A source-routed packet. Acks travel the reversed data route and carry
/// the delay measured at the data packet's destination.
#[derive(Debug, Clone)]
pub struct Packet {
    pub id: u64,
    pub kind: PacketKind,
    /// Endpoints of the data flow the packet belongs to (for acks: the
    /// flow being acknowledged, so `source` is where the ack ends up).
    pub source: NodeId,
    pub destination: NodeId,
    /// Index of the candidate path the data packet was sent on.
    pub path_index: usize,
    /// Links in travel order.
    pub route: Rc<[LinkId]>,
    /// Links already traversed.
    pub hop_index: usize,
    pub created_at: f64,
    pub size_bits: u64,
    pub carried_delay: f64,
    /// Sum of propagation delays along the route.
    pub propagation: f64,
    /// Backlog (seconds) of each outgoing link of the previous hop, captured
    /// when the packet left it.
    pub advert: Option<Vec<f64>>,
}

impl Packet {
    pub fn at_end(&self) -> bool {
        self.hop_index == self.route.len()
    }

    pub fn next_link(&self) -> Option<LinkId> {
        self.route.get(self.hop_index).copied()
    }
}
