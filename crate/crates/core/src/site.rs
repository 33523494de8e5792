use std::fmt;

use serde::{Deserialize, Serialize};

/// Identifies a replica. Two distinct replicas never share an id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SiteId(pub u64);

impl fmt::Display for SiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "site{}", self.0)
    }
}

impl From<u64> for SiteId {
    fn from(id: u64) -> Self {
        SiteId(id)
    }
}

/// Tie-break between two operations that claim the same position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriorityPolicy {
    /// The operation from the lower site id keeps its position.
    #[default]
    LowerSiteWins,
}

impl PriorityPolicy {
    /// Whether the operation from `first` keeps its position against one
    /// from `second`. Equal ids favour `first`.
    pub fn first_wins(self, first: SiteId, second: SiteId) -> bool {
        match self {
            PriorityPolicy::LowerSiteWins => first <= second,
        }
    }
}
