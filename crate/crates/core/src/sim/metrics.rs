//! Windowed delay series and packet accounting.

use super::packet::PacketKind;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counts {
    pub generated: u64,
    pub delivered: u64,
    pub dropped: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InFlight {
    pub data: u64,
    pub ack: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Totals {
    pub data: Counts,
    pub ack: Counts,
    /// Acks emitted.
    pub control_packets: u64,
    /// Ack bits put on the wire, counted per link traversal.
    pub control_bits: u64,
    /// Sum of delivery delays of all delivered data packets.
    pub delay_sum: f64,
}

impl Totals {
    pub(crate) fn counts_mut(&mut self, kind: PacketKind) -> &mut Counts {
        match kind {
            PacketKind::Data => &mut self.data,
            PacketKind::Ack => &mut self.ack,
        }
    }

    pub fn mean_delay(&self) -> Option<f64> {
        (self.data.delivered > 0).then(|| self.delay_sum / self.data.delivered as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub start: f64,
    pub end: f64,
    /// Data packets delivered inside the window.
    pub delivered: u64,
    /// Data packets dropped inside the window.
    pub dropped: u64,
    pub control_bits: u64,
    pub delay_sum: f64,
    /// Running totals at the window's close.
    pub totals: Totals,
    /// Packets queued or on the wire at the window's close.
    pub in_flight: InFlight,
}

impl Window {
    /// Mean delay of data packets delivered in the window; `None` when none
    /// were.
    pub fn mean_delay(&self) -> Option<f64> {
        (self.delivered > 0).then(|| self.delay_sum / self.delivered as f64)
    }

    /// Whether the accounting identity held when the window closed.
    pub fn conserved(&self) -> bool {
        conservation_check(&self.totals, self.in_flight)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsSeries {
    pub window_length: f64,
    pub windows: Vec<Window>,
    pub totals: Totals,
    /// Times at which the traffic rate changed after the start.
    pub phase_changes: Vec<f64>,
}

impl MetricsSeries {
    pub fn mean_delay(&self) -> Option<f64> {
        self.totals.mean_delay()
    }
}

/// `generated = delivered + dropped + in_flight`, for data and acks
/// separately.
pub fn conservation_check(totals: &Totals, in_flight: InFlight) -> bool {
    let holds = |c: &Counts, f: u64| c.generated == c.delivered + c.dropped + f;
    holds(&totals.data, in_flight.data) && holds(&totals.ack, in_flight.ack)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let t = Totals {
            data: Counts {
                generated: 10,
                delivered: 6,
                dropped: 1,
            },
            ack: Counts {
                generated: 6,
                delivered: 5,
                dropped: 0,
            },
            ..Totals::default()
        };
        assert!(conservation_check(&t, InFlight { data: 3, ack: 1 }));
        assert!(!conservation_check(&t, InFlight { data: 2, ack: 1 }));
        assert!(!conservation_check(&t, InFlight { data: 3, ack: 0 }));
    }

    #[test]
    fn drained_run_has_no_remainder() {
        let t = Totals {
            data: Counts {
                generated: 4,
                delivered: 3,
                dropped: 1,
            },
            ..Totals::default()
        };
        assert!(conservation_check(&t, InFlight::default()));
    }
}
