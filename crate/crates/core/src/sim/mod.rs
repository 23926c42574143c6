//! The repeated-operation environment, the agents, and the episode loop.

mod env;
mod episode;
mod experts;
mod system;

pub use env::{realized_cost, sample_mode, stream_rng, Environment, Stream};
pub use episode::{
    exploration_gains, explore_init, run_episode, AgentKind, AgentSpec, Exploration, RoundRecord,
    SelectionTrace,
};
pub use experts::ExpertsState;
pub use system::SwitchedSystem;
