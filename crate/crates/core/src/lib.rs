//! Computational trust and reputation for agent communities.
//!
//! Two models live side by side:
//!
//! - [`arh`]: ordinal trust built from experience counters and recommendations
//!   corrected by each recommender's semantic distance, combined by weighted vote.
//! - [`risk_trust`]: a discrete `[0, 1]` metric, median-based general trust
//!   with a forgiveness weight, and a downside semi-deviation risk value,
//!   classified against user thresholds.
//!
//! [`simulator`] drives both through a seeded multi-agent community.

use std::fmt;

use serde::{Deserialize, Serialize};

pub mod arh;
pub mod format;
pub mod risk_trust;
pub mod simulator;
pub mod trust_metric;

pub use arh::{DirectTrustStore, RecommenderStore};
pub use risk_trust::{Characteristics, ModelParams, TrustState};
pub use trust_metric::{Banding, OrdinalDegree, SemanticShift, TrustTenths};

macro_rules! label {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(String);

        impl $name {
            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl From<&str> for $name {
            fn from(s: &str) -> Self {
                $name(s.to_string())
            }
        }

        impl From<String> for $name {
            fn from(s: String) -> Self {
                $name(s)
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }
    };
}

label!(
    /// Opaque agent identifier.
    AgentId
);
label!(
    /// Opaque trust context label, compared by equality only.
    Context
);
