//! Poisson packet sources.

use rand::distributions::Open01;
use rand::Rng;

use crate::topology::NodeId;

/// Exponential interarrival time with mean `1/lambda`. Never zero.
pub fn poisson_interarrival<R: Rng + ?Sized>(lambda: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.sample(Open01);
    -u.ln() / lambda
}

/// Network-wide arrival rate from `start` onwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phase {
    pub start: f64,
    /// Packets per second.
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub enum PairSelection {
    /// Uniform over ordered pairs with distinct endpoints, redrawn per packet.
    #[default]
    Uniform,
    /// Uniform over the listed pairs.
    Fixed(Vec<(NodeId, NodeId)>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrafficSource {
    pub phases: Vec<Phase>,
    pub pairs: PairSelection,
}

impl TrafficSource {
    pub fn constant(lambda: f64) -> Self {
        TrafficSource {
            phases: vec![Phase { start: 0.0, lambda }],
            pairs: PairSelection::Uniform,
        }
    }

    /// Baseline load with one burst of `factor`× the rate over
    /// `[burst_start, burst_end)`.
    pub fn with_burst(lambda: f64, factor: f64, burst_start: f64, burst_end: f64) -> Self {
        TrafficSource {
            phases: vec![
                Phase { start: 0.0, lambda },
                Phase {
                    start: burst_start,
                    lambda: lambda * factor,
                },
                Phase {
                    start: burst_end,
                    lambda,
                },
            ],
            pairs: PairSelection::Uniform,
        }
    }

    pub fn validate(&self, node_count: usize) -> Result<(), String> {
        let first = self.phases.first().ok_or("traffic needs at least one phase")?;
        if first.start != 0.0 {
            return Err("the first traffic phase must start at 0".into());
        }
        for w in self.phases.windows(2) {
            if w[1].start <= w[0].start {
                return Err("traffic phases must start at increasing times".into());
            }
        }
        if self
            .phases
            .iter()
            .any(|p| !(p.lambda >= 0.0 && p.lambda.is_finite() && p.start.is_finite()))
        {
            return Err("arrival rates must be finite and non-negative".into());
        }
        match &self.pairs {
            PairSelection::Uniform if node_count < 2 => Err("uniform traffic needs two nodes".into()),
            PairSelection::Fixed(pairs) if pairs.is_empty() => Err("fixed pair list is empty".into()),
            PairSelection::Fixed(pairs) => {
                for (s, t) in pairs {
                    if s == t || s.0 >= node_count || t.0 >= node_count {
                        return Err(format!("invalid traffic pair {s}>{t}"));
                    }
                }
                Ok(())
            }
            PairSelection::Uniform => Ok(()),
        }
    }

    pub fn draw_pair<R: Rng + ?Sized>(&self, node_count: usize, rng: &mut R) -> (NodeId, NodeId) {
        match &self.pairs {
            PairSelection::Uniform => {
                let s = rng.gen_range(0..node_count);
                let mut t = rng.gen_range(0..node_count - 1);
                if t >= s {
                    t += 1;
                }
                (NodeId(s), NodeId(t))
            }
            PairSelection::Fixed(pairs) => pairs[rng.gen_range(0..pairs.len())],
        }
    }
}
