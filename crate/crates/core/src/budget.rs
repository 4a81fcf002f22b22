//! Run budgets and incumbent records shared by the anytime engines.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::schedule::Schedule;

/// How long an anytime engine may run.
///
/// Node budgets make runs reproducible: the amount of work done, and so the
/// incumbent sequence, no longer depends on machine speed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    WallClock(#[serde(with = "millis")] Duration),
    Nodes(u64),
}

impl Budget {
    pub fn millis(ms: u64) -> Self {
        Budget::WallClock(Duration::from_millis(ms))
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Budget::WallClock(d) => d.is_zero(),
            Budget::Nodes(n) => n == 0,
        }
    }

    /// Half of the budget, rounded down.
    pub fn half(&self) -> Self {
        match *self {
            Budget::WallClock(d) => Budget::WallClock(d / 2),
            Budget::Nodes(n) => Budget::Nodes(n / 2),
        }
    }

    /// What is left after `used` has been spent.
    pub fn remaining(&self, used: Spent) -> Self {
        match *self {
            Budget::WallClock(d) => Budget::WallClock(d.saturating_sub(used.elapsed)),
            Budget::Nodes(n) => Budget::Nodes(n.saturating_sub(used.nodes)),
        }
    }
}

/// Work done so far, in both units.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spent {
    #[serde(with = "millis")]
    pub elapsed: Duration,
    pub nodes: u64,
}

/// A schedule and the point in the run at which it was found.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Incumbent {
    pub schedule: Schedule,
    #[serde(flatten)]
    pub found_at: Spent,
}

/// Tracks spending against a budget.
#[derive(Debug, Clone)]
pub(crate) struct Meter {
    budget: Budget,
    started: Instant,
    nodes: u64,
}

impl Meter {
    pub fn new(budget: Budget) -> Self {
        Meter {
            budget,
            started: Instant::now(),
            nodes: 0,
        }
    }

    pub fn charge(&mut self, nodes: u64) {
        self.nodes = self.nodes.saturating_add(nodes);
    }

    pub fn exhausted(&self) -> bool {
        match self.budget {
            Budget::WallClock(d) => self.started.elapsed() >= d,
            Budget::Nodes(n) => self.nodes >= n,
        }
    }

    pub fn spent(&self) -> Spent {
        // whole microseconds, so reports survive a round trip through JSON
        let micros = self.started.elapsed().as_micros() as u64;
        Spent {
            elapsed: Duration::from_micros(micros),
            nodes: self.nodes,
        }
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        let micros = d.as_micros() as u64;
        if micros % 1000 == 0 {
            s.serialize_u64(micros / 1000)
        } else {
            s.serialize_f64(micros as f64 / 1000.0)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let ms = f64::deserialize(d)?;
        if !ms.is_finite() || ms < 0.0 {
            return Err(serde::de::Error::custom("elapsed must be a non-negative number of milliseconds"));
        }
        Ok(Duration::from_micros((ms * 1000.0).round() as u64))
    }
}
