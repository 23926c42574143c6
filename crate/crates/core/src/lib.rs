//! Online personalization of linear-quadratic controllers for repeatedly
//! operated switched linear systems.
//!
//! Each round the environment draws a hidden mode `ω` from a fixed
//! categorical distribution `θ`; the agent applies a static gain `K` and
//! observes the infinite-horizon cost `J(K, ω) = tr(P)`. The optimistic agent
//! identifies `ω` from the revealed cost, keeps counts, and picks the gain
//! minimizing the expected cost under the most favorable `θ` in an L1
//! confidence set.
//!
//! Mode indices are 0-based throughout the API.

pub mod belief;
pub mod error;
pub mod identify;
pub mod lqr;
pub mod select;
pub mod sim;

pub use belief::{BeliefState, ConfidenceSet, CountVector};
pub use error::{Error, Result};
pub use identify::IdentificationResult;
pub use lqr::{Controller, CostValue, CostWeights, SystemMode};
pub use select::{SelectionConfig, SelectionResult};
pub use sim::{AgentKind, AgentSpec, Environment, RoundRecord, SwitchedSystem};
