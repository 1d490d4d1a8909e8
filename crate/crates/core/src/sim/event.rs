//! Future event set ordered by (time, insertion sequence).

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::topology::{LinkId, NodeId};

use super::packet::Packet;

#[derive(Debug)]
pub enum Action {
    Arrival { node: NodeId, packet: Packet },
    TransmissionComplete { link: LinkId },
    SourceFire { epoch: u64 },
    WindowClose { index: usize },
    PhaseChange { phase: usize },
}

impl Action {
    pub fn tag(&self) -> u8 {
        match self {
            Action::Arrival { .. } => 0,
            Action::TransmissionComplete { .. } => 1,
            Action::SourceFire { .. } => 2,
            Action::WindowClose { .. } => 3,
            Action::PhaseChange { .. } => 4,
        }
    }
}

#[derive(Debug)]
pub struct Event {
    pub time: f64,
    pub sequence: u64,
    pub action: Action,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    // Reversed so the max-heap pops the earliest event.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .time
            .total_cmp(&self.time)
            .then_with(|| other.sequence.cmp(&self.sequence))
    }
}

#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Event>,
    next_sequence: u64,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn schedule(&mut self, time: f64, action: Action) {
        let sequence = self.next_sequence;
        self.next_sequence += 1;
        self.heap.push(Event {
            time,
            sequence,
            action,
        });
    }

    pub fn peek_time(&self) -> Option<f64> {
        self.heap.peek().map(|e| e.time)
    }

    pub fn pop(&mut self) -> Option<Event> {
        self.heap.pop()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Event> {
        self.heap.iter()
    }
}
