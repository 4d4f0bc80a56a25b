//! Simulator and verification harness for loss-bounded learning in repeated
//! zero-sum games.
//!
//! A learner (player 1) repeatedly plays a zero-sum stage game drawn from a
//! parameterized family it knows, against an opponent (player 2) that knows
//! both the game and the learner's code. The learner's per-round loss is the
//! game value minus the utility it actually received; the crate measures how
//! much cumulative loss the learner must concede before it knows a maximin
//! strategy, and machine-checks the theoretical bounds for each family:
//!
//! - exact worst-case bounds by exhaustive search over the learner's
//!   reachable knowledge states,
//! - expected-loss bounds by exact adversarial dynamic programming,
//! - per-epoch loss/learning-probability ratio conditions by enumeration,
//! - approximate-learning bounds combining both.

pub mod families;
pub mod learners;
pub mod opponents;
pub mod sim;
pub mod stage_game;
pub mod verify;

pub mod cli;
pub mod config;

pub use families::{FamilyParams, FamilyShape, KnowledgeState, NatureDraw, RoundOutcome};
pub use learners::{LearnerMachine, LearnerSpec};
pub use opponents::{OpponentPolicy, OpponentSpec};
pub use stage_game::{MixedStrategy, SolveResult, StageGame};
