//! Learning strategies for player 1, as explicit state machines with a
//! uniform contract: `strategy()` yields the current epoch's stage-game
//! strategy, `observe()` consumes a round outcome, and `learned()` reports
//! whether the learner has pinned down a (possibly approximate) maximin
//! strategy it will play forever after.
//!
//! Learning events are deliberately conservative: each learner updates its
//! state only on the events its loss bound is proved from (losses, or
//! losses-and-draws), never on merely informative wins.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{
    to_stage_game, update_knowledge, FamilyError, FamilyParams, KnowledgeState, NatureDraw,
    RoundOutcome,
};
use crate::stage_game::{solve_maximin, GameError, MixedStrategy};

#[derive(Debug, Error, PartialEq)]
pub enum LearnerError {
    #[error("learner {learner} does not apply to family {family}")]
    UnsupportedFamily {
        learner: &'static str,
        family: &'static str,
    },
    #[error("loss budget r={budget} must satisfy 2^r < n (n = {n}); use the exact learner")]
    BudgetTooLarge { budget: u32, n: u32 },
    #[error("two-targets learner requires p1*r1 >= 2*p2*r2 (got {lhs} < {rhs})")]
    PreconditionViolated { lhs: f64, rhs: f64 },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("stage game: {0}")]
    Game(String),
}

impl From<GameError> for LearnerError {
    fn from(e: GameError) -> Self {
        LearnerError::Game(e.to_string())
    }
}

/// Which learner to run, plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum LearnerSpec {
    /// Get-close: play the midpoint of the remaining target interval.
    BinarySearch,
    /// Get-close with a loss budget `r`: binary search until `r` losses,
    /// then settle for uniform play over the remaining interval.
    ApproxBinarySearch { budget: u32 },
    /// Rps-with-duds: start at action 1, switch to whatever the opponent
    /// last won with.
    ChaseWinner,
    /// Random-orientation rps: any action that beats you once is a nondud,
    /// and any nondud is maximin.
    RandomOrientation,
    /// Two targets: binary-search the first target, ignoring rounds where
    /// the second was active.
    TwoTargets,
    /// Matching pennies with duds: randomize uniformly over actions not yet
    /// confirmed to be duds.
    DudElimination,
    /// Baseline that knows the hidden parameters and plays maximin from
    /// round 0.
    Omniscient,
    /// Baseline that plays uniform forever and never learns.
    Uniform,
    /// Run the inner learner until it has learned, then freeze its strategy
    /// unconditionally.
    WrapMaximin { inner: Box<LearnerSpec> },
}

impl LearnerSpec {
    pub fn name(&self) -> &'static str {
        match self {
            LearnerSpec::BinarySearch => "binary_search",
            LearnerSpec::ApproxBinarySearch { .. } => "approx_binary_search",
            LearnerSpec::ChaseWinner => "chase_winner",
            LearnerSpec::RandomOrientation => "random_orientation",
            LearnerSpec::TwoTargets => "two_targets",
            LearnerSpec::DudElimination => "dud_elimination",
            LearnerSpec::Omniscient => "omniscient",
            LearnerSpec::Uniform => "uniform",
            LearnerSpec::WrapMaximin { .. } => "wrap_maximin",
        }
    }

    pub fn describe(&self) -> String {
        match self {
            LearnerSpec::ApproxBinarySearch { budget } => {
                format!("approx_binary_search(r={budget})")
            }
            LearnerSpec::WrapMaximin { inner } => format!("wrap({})", inner.describe()),
            other => other.name().to_string(),
        }
    }
}

/// Hashable snapshot of everything that determines a learner's future
/// behavior. Epoch counters are excluded: states that act identically must
/// share a key so adversarial search can merge them.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BehaviorKey {
    Interval { lo: u32, hi: u32 },
    Approx { lo: u32, hi: u32, losses: u32, settled: bool },
    Chain { entries: Vec<u32>, current: u32, done: bool },
    Known { action: Option<u32> },
    Target { lo: u32, hi: u32 },
    Duds { duds: Vec<u32> },
    Fixed { learned: bool },
    Wrapped { inner: Box<BehaviorKey>, frozen: bool },
}

#[derive(Debug, Clone)]
enum Core {
    BinarySearch {
        knowledge: KnowledgeState,
    },
    Approx {
        knowledge: KnowledgeState,
        losses: u32,
        budget: u32,
        n: u32,
        settled: bool,
    },
    Chase {
        knowledge: KnowledgeState,
        m: u32,
        current: u32,
        done: bool,
    },
    RandomOrientation {
        knowledge: KnowledgeState,
    },
    TwoTargets {
        knowledge: KnowledgeState,
    },
    DudElimination {
        knowledge: KnowledgeState,
        n_duds: u32,
    },
    Fixed {
        learned: bool,
    },
    Wrapped {
        inner: Box<LearnerMachine>,
        frozen: bool,
    },
}

/// A learner's live state: knowledge, epoch index, and the cached strategy
/// for the current epoch. `observe` is the only mutator; it bumps the epoch
/// exactly at the learner's declared learning events, and only learning
/// events may change the cached strategy.
#[derive(Debug, Clone)]
pub struct LearnerMachine {
    core: Core,
    epoch: u32,
    strategy: MixedStrategy,
    epsilon: f64,
    total_actions: u32,
}

fn interval_of(knowledge: &KnowledgeState) -> (u32, u32) {
    match knowledge {
        KnowledgeState::Interval { lo, hi } | KnowledgeState::TargetInterval { lo, hi } => {
            (*lo, *hi)
        }
        _ => unreachable!("interval learner holds interval knowledge"),
    }
}

fn midpoint(lo: u32, hi: u32) -> u32 {
    (lo + hi) / 2
}

impl LearnerMachine {
    pub fn new(spec: &LearnerSpec, params: &FamilyParams) -> Result<Self, LearnerError> {
        params.validate()?;
        let unsupported = || LearnerError::UnsupportedFamily {
            learner: spec.name(),
            family: params.family_name(),
        };
        let total = params.actions();
        let core = match (spec, params) {
            (LearnerSpec::BinarySearch, FamilyParams::GetClose { n, .. }) => Core::BinarySearch {
                knowledge: KnowledgeState::interval(*n),
            },
            (LearnerSpec::ApproxBinarySearch { budget }, FamilyParams::GetClose { n, .. }) => {
                if *budget >= 32 || (1u64 << budget) >= u64::from(*n) {
                    return Err(LearnerError::BudgetTooLarge {
                        budget: *budget,
                        n: *n,
                    });
                }
                Core::Approx {
                    knowledge: KnowledgeState::interval(*n),
                    losses: 0,
                    budget: *budget,
                    n: *n,
                    settled: *budget == 0,
                }
            }
            (LearnerSpec::ChaseWinner, FamilyParams::RpsDuds { m, n, .. }) => Core::Chase {
                knowledge: KnowledgeState::chain(),
                m: *m,
                current: 1,
                done: *n == 0,
            },
            (LearnerSpec::RandomOrientation, FamilyParams::RandomOrientationRpsDuds { n, .. }) => {
                Core::RandomOrientation {
                    knowledge: if *n == 0 {
                        // No duds: action 1 is already a known nondud.
                        KnowledgeState::KnownNondud { action: Some(1) }
                    } else {
                        KnowledgeState::known_nondud()
                    },
                }
            }
            (
                LearnerSpec::TwoTargets,
                FamilyParams::TwoTargets { n, p1, p2, r1, r2, .. },
            ) => {
                let lhs = p1 * r1;
                let rhs = 2.0 * p2 * r2;
                if lhs < rhs {
                    return Err(LearnerError::PreconditionViolated { lhs, rhs });
                }
                Core::TwoTargets {
                    knowledge: KnowledgeState::target_interval(*n),
                }
            }
            (LearnerSpec::DudElimination, FamilyParams::MpDuds { n, .. }) => {
                Core::DudElimination {
                    knowledge: KnowledgeState::dud_set(),
                    n_duds: *n,
                }
            }
            (LearnerSpec::Omniscient, _) => Core::Fixed { learned: true },
            (LearnerSpec::Uniform, _) => Core::Fixed { learned: false },
            (LearnerSpec::WrapMaximin { inner }, _) => Core::Wrapped {
                inner: Box::new(LearnerMachine::new(inner, params)?),
                frozen: false,
            },
            _ => return Err(unsupported()),
        };
        let strategy = match (&core, spec) {
            (Core::Fixed { .. }, LearnerSpec::Omniscient) => {
                solve_maximin(&to_stage_game(params)?)?.strategy1
            }
            (Core::Fixed { .. }, _) | (Core::Wrapped { .. }, _) => MixedStrategy::uniform(total),
            _ => derive_strategy(&core, total),
        };
        let mut machine = LearnerMachine {
            core,
            epoch: 0,
            strategy,
            epsilon: 0.0,
            total_actions: total,
        };
        machine.refresh_epsilon();
        Ok(machine)
    }

    /// The stage-game strategy for the current epoch.
    pub fn strategy(&self) -> &MixedStrategy {
        match &self.core {
            Core::Wrapped { inner, .. } => inner.strategy(),
            _ => &self.strategy,
        }
    }

    pub fn learned(&self) -> bool {
        match &self.core {
            Core::BinarySearch { knowledge } | Core::TwoTargets { knowledge } => {
                let (lo, hi) = interval_of(knowledge);
                lo == hi
            }
            Core::Approx { knowledge, settled, .. } => {
                let (lo, hi) = interval_of(knowledge);
                *settled || lo == hi
            }
            Core::Chase { done, .. } => *done,
            Core::RandomOrientation { knowledge } => {
                matches!(knowledge, KnowledgeState::KnownNondud { action: Some(_) })
            }
            Core::DudElimination { knowledge, n_duds } => match knowledge {
                KnowledgeState::DudSet { duds } => duds.len() == *n_duds as usize,
                _ => unreachable!(),
            },
            Core::Fixed { learned } => *learned,
            Core::Wrapped { inner, frozen } => *frozen || inner.learned(),
        }
    }

    /// Precision target of the learned strategy: 0 for exact learners, the
    /// declared precision for budget-settled approximate ones.
    pub fn epsilon(&self) -> f64 {
        match &self.core {
            Core::Wrapped { inner, .. } => inner.epsilon(),
            _ => self.epsilon,
        }
    }

    pub fn epoch(&self) -> u32 {
        match &self.core {
            Core::Wrapped { inner, .. } => inner.epoch(),
            _ => self.epoch,
        }
    }

    pub fn knowledge(&self) -> Option<&KnowledgeState> {
        match &self.core {
            Core::BinarySearch { knowledge }
            | Core::Approx { knowledge, .. }
            | Core::Chase { knowledge, .. }
            | Core::RandomOrientation { knowledge }
            | Core::TwoTargets { knowledge }
            | Core::DudElimination { knowledge, .. } => Some(knowledge),
            Core::Fixed { .. } => None,
            Core::Wrapped { inner, .. } => inner.knowledge(),
        }
    }

    pub fn behavior_key(&self) -> BehaviorKey {
        match &self.core {
            Core::BinarySearch { knowledge } => {
                let (lo, hi) = interval_of(knowledge);
                BehaviorKey::Interval { lo, hi }
            }
            Core::Approx { knowledge, losses, settled, .. } => {
                let (lo, hi) = interval_of(knowledge);
                BehaviorKey::Approx {
                    lo,
                    hi,
                    losses: *losses,
                    settled: *settled,
                }
            }
            Core::Chase { knowledge, current, done, .. } => match knowledge {
                KnowledgeState::Chain { entries, .. } => BehaviorKey::Chain {
                    entries: entries.clone(),
                    current: *current,
                    done: *done,
                },
                _ => unreachable!(),
            },
            Core::RandomOrientation { knowledge } => match knowledge {
                KnowledgeState::KnownNondud { action } => BehaviorKey::Known { action: *action },
                _ => unreachable!(),
            },
            Core::TwoTargets { knowledge } => {
                let (lo, hi) = interval_of(knowledge);
                BehaviorKey::Target { lo, hi }
            }
            Core::DudElimination { knowledge, .. } => match knowledge {
                KnowledgeState::DudSet { duds } => BehaviorKey::Duds {
                    duds: duds.iter().copied().collect(),
                },
                _ => unreachable!(),
            },
            Core::Fixed { learned } => BehaviorKey::Fixed { learned: *learned },
            Core::Wrapped { inner, frozen } => BehaviorKey::Wrapped {
                inner: Box::new(inner.behavior_key()),
                frozen: *frozen,
            },
        }
    }

    /// Consume one round's outcome; bumps the epoch at learning events.
    pub fn observe(&mut self, obs: &RoundOutcome) -> Result<(), LearnerError> {
        if self.learned() {
            // Every learner in this module is absorbing once learned.
            if let Core::Wrapped { frozen, .. } = &mut self.core {
                *frozen = true;
            }
            return Ok(());
        }
        let mut event = false;
        match &mut self.core {
            Core::BinarySearch { knowledge } => {
                if obs.u1 <= 0.0 {
                    let next = update_knowledge(knowledge, obs)?;
                    if next != *knowledge {
                        *knowledge = next;
                        event = true;
                    }
                }
            }
            Core::Approx { knowledge, losses, budget, settled, .. } => {
                if obs.u1 <= 0.0 {
                    let next = update_knowledge(knowledge, obs)?;
                    let changed = next != *knowledge;
                    *knowledge = next;
                    if obs.u1 < 0.0 {
                        *losses += 1;
                        if losses == budget {
                            *settled = true;
                        }
                    }
                    event = changed || *settled;
                }
            }
            Core::Chase { knowledge, m, current, done } => {
                if obs.u1 < 0.0 {
                    *knowledge = update_knowledge(knowledge, obs)?;
                    *current = obs.a2;
                    if let KnowledgeState::Chain { entries, .. } = &*knowledge {
                        let target = if *m % 2 == 1 { *m } else { *m - 1 };
                        if entries.len() as u32 >= target {
                            *done = true;
                        }
                    }
                    event = true;
                }
            }
            Core::RandomOrientation { knowledge } => {
                if obs.u1 < 0.0 {
                    *knowledge = update_knowledge(knowledge, obs)?;
                    event = true;
                }
            }
            Core::TwoTargets { knowledge } => {
                if obs.nature == NatureDraw::ActiveTarget(1) {
                    let lost = obs.u1 == 0.0 && obs.u2 > 0.0;
                    let drew = obs.u1 > 0.0 && obs.u1 == obs.u2;
                    if lost || drew {
                        *knowledge = update_knowledge(knowledge, obs)?;
                        event = true;
                    }
                }
            }
            Core::DudElimination { knowledge, .. } => {
                let next = update_knowledge(knowledge, obs)?;
                if next != *knowledge {
                    *knowledge = next;
                    event = true;
                }
            }
            Core::Fixed { .. } => {}
            Core::Wrapped { inner, frozen } => {
                inner.observe(obs)?;
                if inner.learned() {
                    *frozen = true;
                }
            }
        }
        if event {
            self.epoch += 1;
            self.strategy = derive_strategy(&self.core, self.total_actions);
            self.refresh_epsilon();
        }
        Ok(())
    }

    fn refresh_epsilon(&mut self) {
        self.epsilon = match &self.core {
            Core::Approx { knowledge, budget, n, settled, .. } => {
                let (lo, hi) = interval_of(knowledge);
                if lo == hi {
                    0.0
                } else if *settled {
                    1.0 - f64::from(1u32 << *budget) / f64::from(*n)
                } else {
                    0.0
                }
            }
            _ => 0.0,
        };
    }
}

fn derive_strategy(core: &Core, total: u32) -> MixedStrategy {
    match core {
        Core::BinarySearch { knowledge } | Core::TwoTargets { knowledge } => {
            let (lo, hi) = interval_of(knowledge);
            MixedStrategy::pure(midpoint(lo, hi), total)
        }
        Core::Approx { knowledge, settled, .. } => {
            let (lo, hi) = interval_of(knowledge);
            if *settled && lo != hi {
                MixedStrategy::uniform_over(&(lo..=hi).collect::<Vec<_>>(), total)
            } else {
                MixedStrategy::pure(midpoint(lo, hi), total)
            }
        }
        Core::Chase { knowledge, m, current, done } => {
            let KnowledgeState::Chain { entries, .. } = knowledge else {
                unreachable!()
            };
            if !*done {
                return MixedStrategy::pure(*current, total);
            }
            if entries.is_empty() {
                // Dud-free game: uniform over everything is maximin.
                return MixedStrategy::uniform(total);
            }
            if *m % 2 == 1 {
                MixedStrategy::uniform_over(entries, total)
            } else {
                // Even circle: alternate chain elements share a parity class,
                // and the class containing the chain's start is maximin.
                let class: Vec<u32> = entries.iter().step_by(2).copied().collect();
                MixedStrategy::uniform_over(&class, total)
            }
        }
        Core::RandomOrientation { knowledge } => match knowledge {
            KnowledgeState::KnownNondud { action } => {
                MixedStrategy::pure(action.unwrap_or(1), total)
            }
            _ => unreachable!(),
        },
        Core::DudElimination { knowledge, .. } => match knowledge {
            KnowledgeState::DudSet { duds } => {
                let live: Vec<u32> = (1..=total).filter(|a| !duds.contains(a)).collect();
                MixedStrategy::uniform_over(&live, total)
            }
            _ => unreachable!(),
        },
        Core::Fixed { .. } | Core::Wrapped { .. } => {
            unreachable!("fixed and wrapped strategies are cached, not derived")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{resolve_outcome, sample_nature};
    use crate::stage_game::exploitability;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn observe_resolved(
        machine: &mut LearnerMachine,
        params: &FamilyParams,
        a1: u32,
        a2: u32,
        nature: NatureDraw,
    ) {
        let o = resolve_outcome(params, a1, a2, nature).unwrap();
        machine.observe(&o).unwrap();
    }

    #[test]
    fn binary_search_plays_midpoints_and_learns_on_draw() {
        let params = FamilyParams::GetClose { n: 16, k: 10 };
        let mut m = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        assert_eq!(m.strategy().as_pure(), Some(8));
        assert!(!m.learned());
        // Draw at (8, 12) reveals k = 10.
        observe_resolved(&mut m, &params, 8, 12, NatureDraw::None);
        assert!(m.learned());
        assert_eq!(m.strategy().as_pure(), Some(10));
        assert_eq!(m.epoch(), 1);
        // Absorbing thereafter.
        let key = m.behavior_key();
        observe_resolved(&mut m, &params, 10, 1, NatureDraw::None);
        assert_eq!(m.behavior_key(), key);
    }

    #[test]
    fn binary_search_halves_on_loss() {
        let params = FamilyParams::GetClose { n: 16, k: 3 };
        let mut m = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        // Opponent plays k = 3 < 8 and wins; interval drops to {1..7}.
        observe_resolved(&mut m, &params, 8, 3, NatureDraw::None);
        assert_eq!(m.behavior_key(), BehaviorKey::Interval { lo: 1, hi: 7 });
        assert_eq!(m.strategy().as_pure(), Some(4));
        // Wins change nothing.
        let key = m.behavior_key();
        observe_resolved(&mut m, &params, 4, 8, NatureDraw::None);
        assert_eq!(m.behavior_key(), key);
        assert_eq!(m.epoch(), 1);
    }

    #[test]
    fn singleton_interval_is_learned_at_birth() {
        let params = FamilyParams::GetClose { n: 1, k: 1 };
        let m = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        assert!(m.learned());
        assert_eq!(m.strategy().as_pure(), Some(1));
    }

    #[test]
    fn binary_search_loss_bound_holds() {
        // At most ceil(log2 n) losses against any play, for every k.
        for k in 1..=16 {
            let params = FamilyParams::GetClose { n: 16, k };
            let mut m = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(k));
            let mut losses = 0;
            for _ in 0..200 {
                if m.learned() {
                    break;
                }
                let a1 = m.strategy().as_pure().unwrap();
                let a2 = rng.random_range(1..=16);
                let o = resolve_outcome(&params, a1, a2, NatureDraw::None).unwrap();
                if o.u1 < 0.0 {
                    losses += 1;
                }
                m.observe(&o).unwrap();
            }
            assert!(losses <= 4, "k={k}: {losses} losses");
        }
    }

    /// After L losses the interval has at most n / 2^L candidates left.
    #[test]
    fn interval_halves_per_loss() {
        for k in 1..=16u32 {
            let params = FamilyParams::GetClose { n: 16, k };
            let mut m = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(u64::from(100 + k));
            let mut losses = 0u32;
            for _ in 0..100 {
                if m.learned() {
                    break;
                }
                let a1 = m.strategy().as_pure().unwrap();
                let a2 = rng.random_range(1..=16);
                let o = resolve_outcome(&params, a1, a2, NatureDraw::None).unwrap();
                if o.u1 < 0.0 {
                    losses += 1;
                }
                m.observe(&o).unwrap();
                let BehaviorKey::Interval { lo, hi } = m.behavior_key() else {
                    unreachable!()
                };
                let width = hi - lo + 1;
                assert!(
                    width as f64 <= 16.0 / 2f64.powi(losses as i32),
                    "k={k}: width {width} after {losses} losses"
                );
            }
        }
    }

    #[test]
    fn approx_binary_search_settles_after_budget() {
        let params = FamilyParams::GetClose { n: 16, k: 1 };
        let mut m =
            LearnerMachine::new(&LearnerSpec::ApproxBinarySearch { budget: 2 }, &params).unwrap();
        assert_eq!(m.epsilon(), 0.0);
        // Two losses: {1..16} -> {1..7} -> {1..3}.
        observe_resolved(&mut m, &params, 8, 1, NatureDraw::None);
        assert!(!m.learned());
        observe_resolved(&mut m, &params, 4, 1, NatureDraw::None);
        assert!(m.learned());
        assert_eq!(m.epsilon(), 1.0 - 4.0 / 16.0);
        for a in 1..=3 {
            assert!((m.strategy().prob(a) - 1.0 / 3.0).abs() < 1e-12);
        }
        // Settled is absorbing.
        let key = m.behavior_key();
        observe_resolved(&mut m, &params, 2, 1, NatureDraw::None);
        assert_eq!(m.behavior_key(), key);
    }

    #[test]
    fn approx_budget_zero_settles_immediately() {
        let params = FamilyParams::GetClose { n: 16, k: 5 };
        let m =
            LearnerMachine::new(&LearnerSpec::ApproxBinarySearch { budget: 0 }, &params).unwrap();
        assert!(m.learned());
        assert_eq!(m.epsilon(), 1.0 - 1.0 / 16.0);
        assert_eq!(m.strategy().as_pure(), None);
    }

    #[test]
    fn approx_budget_at_log_n_is_rejected() {
        let params = FamilyParams::GetClose { n: 8, k: 5 };
        assert_eq!(
            LearnerMachine::new(&LearnerSpec::ApproxBinarySearch { budget: 3 }, &params)
                .unwrap_err(),
            LearnerError::BudgetTooLarge { budget: 3, n: 8 }
        );
    }

    #[test]
    fn chase_winner_follows_the_circle() {
        let params = FamilyParams::RpsDuds {
            m: 3,
            n: 1,
            f: vec![1, 2, 3, 4],
        };
        let mut m = LearnerMachine::new(&LearnerSpec::ChaseWinner, &params).unwrap();
        assert_eq!(m.strategy().as_pure(), Some(1));
        // Opponent beats 1 with 2, then 2 with 3, then 3 with 1.
        observe_resolved(&mut m, &params, 1, 2, NatureDraw::None);
        assert_eq!(m.strategy().as_pure(), Some(2));
        observe_resolved(&mut m, &params, 2, 3, NatureDraw::None);
        assert_eq!(m.strategy().as_pure(), Some(3));
        assert!(!m.learned());
        observe_resolved(&mut m, &params, 3, 1, NatureDraw::None);
        assert!(m.learned());
        assert_eq!(m.epoch(), 3);
        for a in 1..=3u32 {
            assert!((m.strategy().prob(a) - 1.0 / 3.0).abs() < 1e-12);
        }
        assert_eq!(m.strategy().prob(4), 0.0);
        // Learned strategy is maximin for the true game.
        let g = to_stage_game(&params).unwrap();
        assert!(exploitability(&g, m.strategy()).unwrap() < 1e-9);
    }

    #[test]
    fn chase_winner_even_circle_needs_one_fewer() {
        let params = FamilyParams::RpsDuds {
            m: 4,
            n: 0,
            f: vec![2, 3, 4, 1],
        };
        // n = 0 learns immediately with uniform play over everything.
        let m = LearnerMachine::new(&LearnerSpec::ChaseWinner, &params).unwrap();
        assert!(m.learned());
        assert_eq!(m.strategy().as_pure(), None);

        let params = FamilyParams::RpsDuds {
            m: 4,
            n: 1,
            f: vec![2, 3, 4, 1, 5],
        };
        let mut m = LearnerMachine::new(&LearnerSpec::ChaseWinner, &params).unwrap();
        // Circle in action space: 4 -> 1 -> 2 -> 3 -> 4 (f values 1..4).
        observe_resolved(&mut m, &params, 1, 2, NatureDraw::None);
        observe_resolved(&mut m, &params, 2, 3, NatureDraw::None);
        assert!(!m.learned());
        observe_resolved(&mut m, &params, 3, 4, NatureDraw::None);
        assert!(m.learned(), "m - 1 = 3 losses suffice for even m");
        // Alternating class from the chain start {2, 4}.
        assert_eq!(m.strategy().prob(2), 0.5);
        assert_eq!(m.strategy().prob(4), 0.5);
        let g = to_stage_game(&params).unwrap();
        assert!(exploitability(&g, m.strategy()).unwrap() < 1e-9);
    }

    #[test]
    fn random_orientation_learns_from_one_beating() {
        let params = FamilyParams::RandomOrientationRpsDuds {
            m: 3,
            n: 1,
            f: vec![4, 1, 2, 3],
        };
        let mut m = LearnerMachine::new(&LearnerSpec::RandomOrientation, &params).unwrap();
        assert!(!m.learned());
        assert_eq!(m.strategy().as_pure(), Some(1));
        // Draws teach nothing.
        for _ in 0..100 {
            let o = RoundOutcome {
                a1: 1,
                a2: 1,
                nature: NatureDraw::Orientation(1),
                u1: 0.0,
                u2: 0.0,
            };
            m.observe(&o).unwrap();
        }
        assert!(!m.learned());
        observe_resolved(&mut m, &params, 1, 3, NatureDraw::Orientation(1));
        assert!(m.learned());
        assert_eq!(m.strategy().as_pure(), Some(3));
        let g = to_stage_game(&params).unwrap();
        assert!(exploitability(&g, m.strategy()).unwrap() < 1e-9);
    }

    #[test]
    fn random_orientation_without_duds_learns_at_birth() {
        let params = FamilyParams::RandomOrientationRpsDuds {
            m: 3,
            n: 0,
            f: vec![3, 1, 2],
        };
        let m = LearnerMachine::new(&LearnerSpec::RandomOrientation, &params).unwrap();
        assert!(m.learned());
        assert_eq!(m.strategy().as_pure(), Some(1));
    }

    #[test]
    fn two_targets_updates_only_on_active_first_target() {
        let params = FamilyParams::TwoTargets {
            n: 4,
            k1: 4,
            k2: 1,
            p1: 0.6,
            p2: 0.4,
            r1: 4.0,
            r2: 1.0,
        };
        let mut m = LearnerMachine::new(&LearnerSpec::TwoTargets, &params).unwrap();
        assert_eq!(m.strategy().as_pure(), Some(2));
        // Win while target 1 active: no event, epoch continues.
        observe_resolved(&mut m, &params, 2, 1, NatureDraw::ActiveTarget(1));
        assert_eq!(m.epoch(), 0);
        // Loss while target 2 active: ignored.
        observe_resolved(&mut m, &params, 2, 1, NatureDraw::ActiveTarget(2));
        assert_eq!(m.epoch(), 0);
        // Loss while target 1 active at (2, 3): k1 > 2.
        observe_resolved(&mut m, &params, 2, 3, NatureDraw::ActiveTarget(1));
        assert_eq!(m.behavior_key(), BehaviorKey::Target { lo: 3, hi: 4 });
        assert_eq!(m.epoch(), 1);
    }

    #[test]
    fn two_targets_rejects_weak_first_target() {
        let params = FamilyParams::TwoTargets {
            n: 4,
            k1: 1,
            k2: 3,
            p1: 0.5,
            p2: 0.5,
            r1: 1.5,
            r2: 1.0,
        };
        assert!(matches!(
            LearnerMachine::new(&LearnerSpec::TwoTargets, &params),
            Err(LearnerError::PreconditionViolated { .. })
        ));
    }

    #[test]
    fn dud_elimination_eliminates_on_informative_losses() {
        let params = FamilyParams::MpDuds {
            m: 2,
            n: 1,
            duds: BTreeSet::from([3]),
        };
        let mut m = LearnerMachine::new(&LearnerSpec::DudElimination, &params).unwrap();
        for a in 1..=3u32 {
            assert!((m.strategy().prob(a) - 1.0 / 3.0).abs() < 1e-12);
        }
        // Same-action loss: no change.
        observe_resolved(&mut m, &params, 1, 1, NatureDraw::None);
        assert_eq!(m.epoch(), 0);
        // Dud loss with distinct actions: eliminate and learn.
        observe_resolved(&mut m, &params, 3, 1, NatureDraw::None);
        assert!(m.learned());
        assert_eq!(m.strategy().prob(1), 0.5);
        assert_eq!(m.strategy().prob(2), 0.5);
        let g = to_stage_game(&params).unwrap();
        assert!(exploitability(&g, m.strategy()).unwrap() < 1e-9);
    }

    #[test]
    fn omniscient_and_uniform_baselines() {
        let params = FamilyParams::GetClose { n: 5, k: 3 };
        let o = LearnerMachine::new(&LearnerSpec::Omniscient, &params).unwrap();
        assert!(o.learned());
        assert_eq!(o.strategy().as_pure(), Some(3));

        let mp = FamilyParams::MpDuds {
            m: 2,
            n: 0,
            duds: BTreeSet::new(),
        };
        let o = LearnerMachine::new(&LearnerSpec::Omniscient, &mp).unwrap();
        assert_eq!(o.strategy().prob(1), 0.5);

        let u = LearnerMachine::new(&LearnerSpec::Uniform, &params).unwrap();
        assert!(!u.learned());
        for a in 1..=5 {
            assert!((u.strategy().prob(a) - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn wrapping_is_transparent_for_self_absorbing_learners() {
        let params = FamilyParams::GetClose { n: 16, k: 11 };
        let mut plain = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        let mut wrapped = LearnerMachine::new(
            &LearnerSpec::WrapMaximin {
                inner: Box::new(LearnerSpec::BinarySearch),
            },
            &params,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(plain.strategy().probs(), wrapped.strategy().probs());
            let a1 = plain.strategy().sample(&mut rng);
            let a2 = rng.random_range(1..=16);
            let o = resolve_outcome(&params, a1, a2, NatureDraw::None).unwrap();
            plain.observe(&o).unwrap();
            wrapped.observe(&o).unwrap();
        }
        assert_eq!(plain.learned(), wrapped.learned());
    }

    #[test]
    fn wrapped_learned_state_is_constant() {
        let params = FamilyParams::GetClose { n: 16, k: 11 };
        let mut m = LearnerMachine::new(
            &LearnerSpec::WrapMaximin {
                inner: Box::new(LearnerSpec::ApproxBinarySearch { budget: 2 }),
            },
            &params,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let a1 = m.strategy().sample(&mut rng);
            let o = resolve_outcome(&params, a1, 11, NatureDraw::None).unwrap();
            m.observe(&o).unwrap();
        }
        assert!(m.learned());
        let frozen = m.strategy().clone();
        for _ in 0..100 {
            let a1 = m.strategy().sample(&mut rng);
            let o = resolve_outcome(&params, a1, 11, NatureDraw::None).unwrap();
            m.observe(&o).unwrap();
            assert_eq!(m.strategy().probs(), frozen.probs());
        }
    }

    #[test]
    fn unsupported_family_is_rejected() {
        let params = FamilyParams::GetClose { n: 5, k: 3 };
        assert!(matches!(
            LearnerMachine::new(&LearnerSpec::ChaseWinner, &params),
            Err(LearnerError::UnsupportedFamily { .. })
        ));
    }

    /// Identical observation sequences produce identical state sequences,
    /// and the cached strategy changes only when the epoch advances.
    #[test]
    fn determinism_and_epoch_discipline() {
        let cases: Vec<(LearnerSpec, FamilyParams)> = vec![
            (LearnerSpec::BinarySearch, FamilyParams::GetClose { n: 16, k: 7 }),
            (
                LearnerSpec::ApproxBinarySearch { budget: 2 },
                FamilyParams::GetClose { n: 16, k: 13 },
            ),
            (
                LearnerSpec::ChaseWinner,
                FamilyParams::RpsDuds {
                    m: 3,
                    n: 2,
                    f: vec![4, 2, 1, 3, 5],
                },
            ),
            (
                LearnerSpec::DudElimination,
                FamilyParams::MpDuds {
                    m: 2,
                    n: 2,
                    duds: BTreeSet::from([1, 4]),
                },
            ),
            (
                LearnerSpec::TwoTargets,
                FamilyParams::TwoTargets {
                    n: 8,
                    k1: 3,
                    k2: 6,
                    p1: 0.8,
                    p2: 0.2,
                    r1: 2.0,
                    r2: 1.0,
                },
            ),
        ];
        for (spec, params) in cases {
            let total = params.actions();
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let mut outcomes = Vec::new();
            let mut m = LearnerMachine::new(&spec, &params).unwrap();
            let mut last_epoch = m.epoch();
            let mut last_strategy = m.strategy().clone();
            for _ in 0..120 {
                let a1 = m.strategy().sample(&mut rng);
                let a2 = rng.random_range(1..=total);
                let nature = sample_nature(&params, &mut rng);
                let o = resolve_outcome(&params, a1, a2, nature).unwrap();
                m.observe(&o).unwrap();
                if m.strategy().probs() != last_strategy.probs() {
                    assert!(m.epoch() > last_epoch, "strategy changed without epoch bump");
                }
                last_epoch = m.epoch();
                last_strategy = m.strategy().clone();
                outcomes.push(o);
            }
            // Replay produces the identical final state.
            let mut replay = LearnerMachine::new(&spec, &params).unwrap();
            for o in &outcomes {
                replay.observe(o).unwrap();
            }
            assert_eq!(replay.behavior_key(), m.behavior_key(), "{spec:?}");
            assert_eq!(replay.epoch(), m.epoch());
        }
    }

    /// Whenever a learner declares itself learned, its cached strategy is
    /// within its precision target of maximin for the true game.
    #[test]
    fn learned_strategies_meet_their_precision_targets() {
        let mut cases: Vec<(LearnerSpec, FamilyParams)> = Vec::new();
        for k in 1..=9 {
            cases.push((LearnerSpec::BinarySearch, FamilyParams::GetClose { n: 9, k }));
            cases.push((
                LearnerSpec::ApproxBinarySearch { budget: 2 },
                FamilyParams::GetClose { n: 9, k },
            ));
        }
        for f in [vec![1, 2, 3, 4], vec![3, 4, 1, 2], vec![2, 4, 3, 1]] {
            cases.push((
                LearnerSpec::ChaseWinner,
                FamilyParams::RpsDuds { m: 3, n: 1, f: f.clone() },
            ));
            cases.push((
                LearnerSpec::RandomOrientation,
                FamilyParams::RandomOrientationRpsDuds { m: 3, n: 1, f },
            ));
        }
        for duds in [[1u32], [2], [3]] {
            cases.push((
                LearnerSpec::DudElimination,
                FamilyParams::MpDuds {
                    m: 2,
                    n: 1,
                    duds: BTreeSet::from(duds),
                },
            ));
        }
        for (spec, params) in cases {
            let total = params.actions();
            let game = to_stage_game(&params).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(17);
            let mut m = LearnerMachine::new(&spec, &params).unwrap();
            for _ in 0..400 {
                let a1 = m.strategy().sample(&mut rng);
                let a2 = rng.random_range(1..=total);
                let nature = sample_nature(&params, &mut rng);
                let o = resolve_outcome(&params, a1, a2, nature).unwrap();
                m.observe(&o).unwrap();
                if m.learned() {
                    break;
                }
            }
            if m.learned() {
                let e = exploitability(&game, m.strategy()).unwrap();
                assert!(
                    e <= m.epsilon() + 1e-9,
                    "{spec:?} on {params}: exploitability {e} > {}",
                    m.epsilon()
                );
            }
        }
    }

    /// The hidden parameter stays consistent with every intermediate
    /// knowledge state across random episodes of every family.
    #[test]
    fn knowledge_soundness_across_families() {
        use crate::families::knowledge_consistent;
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        for episode in 0..2000u64 {
            let which = episode % 5;
            let (spec, params) = match which {
                0 => {
                    let n = rng.random_range(2..=12);
                    let k = rng.random_range(1..=n);
                    (LearnerSpec::BinarySearch, FamilyParams::GetClose { n, k })
                }
                1 => {
                    let m = rng.random_range(3..=5);
                    let n = rng.random_range(0..=2);
                    let f = random_permutation(&mut rng, m + n);
                    (LearnerSpec::ChaseWinner, FamilyParams::RpsDuds { m, n, f })
                }
                2 => {
                    let m = rng.random_range(3..=4);
                    let n = rng.random_range(0..=2);
                    let f = random_permutation(&mut rng, m + n);
                    (
                        LearnerSpec::RandomOrientation,
                        FamilyParams::RandomOrientationRpsDuds { m, n, f },
                    )
                }
                3 => {
                    let m = rng.random_range(1..=3);
                    let n = rng.random_range(0..=3);
                    let mut duds = BTreeSet::new();
                    while duds.len() < n as usize {
                        duds.insert(rng.random_range(1..=m + n));
                    }
                    (LearnerSpec::DudElimination, FamilyParams::MpDuds { m, n, duds })
                }
                _ => {
                    let n = rng.random_range(2..=8);
                    let k1 = rng.random_range(1..=n);
                    let mut k2 = rng.random_range(1..=n);
                    while k2 == k1 {
                        k2 = rng.random_range(1..=n);
                    }
                    (
                        LearnerSpec::TwoTargets,
                        FamilyParams::TwoTargets {
                            n,
                            k1,
                            k2,
                            p1: 0.8,
                            p2: 0.2,
                            r1: 2.0,
                            r2: 1.0,
                        },
                    )
                }
            };
            let total = params.actions();
            let mut m = LearnerMachine::new(&spec, &params).unwrap();
            let mut prev = m.knowledge().cloned();
            for _ in 0..30 {
                let a1 = m.strategy().sample(&mut rng);
                let a2 = rng.random_range(1..=total);
                let nature = sample_nature(&params, &mut rng);
                let o = resolve_outcome(&params, a1, a2, nature).unwrap();
                m.observe(&o).unwrap();
                let k = m.knowledge().unwrap();
                assert!(
                    knowledge_consistent(&params, k),
                    "inconsistent state {k:?} for {params}"
                );
                // Knowledge never un-learns: interval widths shrink, sets grow.
                if let (Some(p), k) = (&prev, k) {
                    assert!(!looser_than(k, p), "{k:?} looser than {p:?}");
                }
                prev = Some(k.clone());
            }
        }
    }

    fn random_permutation(rng: &mut ChaCha8Rng, total: u32) -> Vec<u32> {
        let mut f: Vec<u32> = (1..=total).collect();
        for i in (1..f.len()).rev() {
            let j = rng.random_range(0..=i);
            f.swap(i, j);
        }
        f
    }

    fn looser_than(now: &KnowledgeState, before: &KnowledgeState) -> bool {
        use KnowledgeState::*;
        match (now, before) {
            (Interval { lo: a, hi: b }, Interval { lo: c, hi: d })
            | (TargetInterval { lo: a, hi: b }, TargetInterval { lo: c, hi: d }) => {
                a < c || b > d
            }
            (Chain { entries: a, .. }, Chain { entries: b, .. }) => a.len() < b.len(),
            (KnownNondud { action: a }, KnownNondud { action: b }) => {
                a.is_none() && b.is_some()
            }
            (DudSet { duds: a }, DudSet { duds: b }) => !b.is_subset(a),
            _ => true,
        }
    }
}
