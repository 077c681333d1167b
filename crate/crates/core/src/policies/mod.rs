//! Scheduling policies.
//!
//! Every size-based policy comes in an exact flavor reading `Job::size` and
//! an error-fed flavor reading `Job::estimate`; the code path is the same.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::engine::Policy;
use crate::model::{Job, EPSILON};

mod cs;
mod las;
mod ps;
mod psbs;
mod spt;
mod srpt;

pub use cs::{assign_class, ClassQueues, ComparisonSplitting, DEFAULT_WINDOW};
pub use las::LeastAttained;
pub use ps::ProcessorSharing;
pub use psbs::{Psbs, VirtualPs};
pub use spt::ShortestProcessingTime;
pub use srpt::ShortestRemaining;

/// Which job-size figure a size-based policy consults.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum SizeInfo {
    Exact,
    Estimated,
}

impl SizeInfo {
    pub fn of(self, job: &Job) -> f64 {
        match self {
            SizeInfo::Exact => job.size,
            SizeInfo::Estimated => job.estimate,
        }
    }
}

/// The twelve selectable policies, by canonical name.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyKind {
    Ps,
    Las,
    Srpt,
    Srpte,
    Spt,
    Spte,
    Fsp,
    Psbs,
    Cs,
    Cse,
    Mcss,
    Mcsse,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 12] = [
        PolicyKind::Ps,
        PolicyKind::Las,
        PolicyKind::Srpt,
        PolicyKind::Srpte,
        PolicyKind::Spt,
        PolicyKind::Spte,
        PolicyKind::Fsp,
        PolicyKind::Psbs,
        PolicyKind::Cs,
        PolicyKind::Cse,
        PolicyKind::Mcss,
        PolicyKind::Mcsse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PolicyKind::Ps => "ps",
            PolicyKind::Las => "las",
            PolicyKind::Srpt => "srpt",
            PolicyKind::Srpte => "srpte",
            PolicyKind::Spt => "spt",
            PolicyKind::Spte => "spte",
            PolicyKind::Fsp => "fsp",
            PolicyKind::Psbs => "psbs",
            PolicyKind::Cs => "cs",
            PolicyKind::Cse => "cse",
            PolicyKind::Mcss => "mcss",
            PolicyKind::Mcsse => "mcsse",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            PolicyKind::Ps => "processor sharing",
            PolicyKind::Las => "least attained service",
            PolicyKind::Srpt => "shortest remaining processing time, exact sizes",
            PolicyKind::Srpte => "shortest remaining processing time, estimated sizes",
            PolicyKind::Spt => "shortest processing time, exact sizes",
            PolicyKind::Spte => "shortest processing time, estimated sizes",
            PolicyKind::Fsp => "fair sojourn protocol (PSBS on exact sizes)",
            PolicyKind::Psbs => "practical size-based scheduling, estimated sizes",
            PolicyKind::Cs => "comparison splitting, exact sizes",
            PolicyKind::Cse => "comparison splitting, estimated sizes",
            PolicyKind::Mcss => "modified comparison splitting, exact sizes",
            PolicyKind::Mcsse => "modified comparison splitting, estimated sizes",
        }
    }

    /// Whether the policy reads job estimates rather than true sizes.
    pub fn uses_estimates(self) -> bool {
        matches!(
            self,
            PolicyKind::Srpte | PolicyKind::Spte | PolicyKind::Psbs | PolicyKind::Cse | PolicyKind::Mcsse
        )
    }

    fn size_info(self) -> SizeInfo {
        if self.uses_estimates() {
            SizeInfo::Estimated
        } else {
            SizeInfo::Exact
        }
    }

    /// Fresh single-run policy instance.
    pub fn build(self) -> Box<dyn Policy + Send> {
        let info = self.size_info();
        let name = self.name();
        match self {
            PolicyKind::Ps => Box::new(ProcessorSharing),
            PolicyKind::Las => Box::new(LeastAttained),
            PolicyKind::Srpt | PolicyKind::Srpte => Box::new(ShortestRemaining::new(name, info)),
            PolicyKind::Spt | PolicyKind::Spte => Box::new(ShortestProcessingTime::new(name, info)),
            PolicyKind::Fsp | PolicyKind::Psbs => Box::new(Psbs::new(name, info)),
            PolicyKind::Cs | PolicyKind::Cse => Box::new(ComparisonSplitting::new(name, info, DEFAULT_WINDOW, false)),
            PolicyKind::Mcss | PolicyKind::Mcsse => {
                Box::new(ComparisonSplitting::new(name, info, DEFAULT_WINDOW, true))
            }
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown policy {0:?}")]
pub struct UnknownPolicy(pub String);

impl FromStr for PolicyKind {
    type Err = UnknownPolicy;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| UnknownPolicy(s.to_string()))
    }
}

/// Keys within a relative `EPSILON` of each other count as equal.
pub(crate) fn nearly_equal(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPSILON * a.abs().max(b.abs())
}

/// True if `(key_a, a)` ranks strictly ahead of `(key_b, b)`: a smaller key
/// beyond tolerance, or an equal key and an earlier (arrival, id).
pub(crate) fn ranks_ahead(key_a: f64, a: &Job, key_b: f64, b: &Job) -> bool {
    if nearly_equal(key_a, key_b) {
        a.arrives_before(b)
    } else {
        key_a < key_b
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_ties_fall_back_to_arrival_order() {
        let a = Job::exact(0, 0.0, 1.0);
        let b = Job::exact(1, 1.0, 1.0);
        assert!(ranks_ahead(1.0 + 1e-12, &a, 1.0, &b));
        assert!(!ranks_ahead(1.0, &b, 1.0 + 1e-12, &a));
        assert!(ranks_ahead(0.5, &b, 1.0, &a));
        assert!(ranks_ahead(-3.0, &b, 1e-20, &a));
        assert!(ranks_ahead(1e-20, &b, 2e-20, &a));
    }

    #[test]
    fn names_round_trip() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
            assert_eq!(kind.build().name(), kind.name());
        }
        assert!("SPTE".parse::<PolicyKind>().is_ok());
        assert!("fifo".parse::<PolicyKind>().is_err());
    }
}
