//! Adversaries for player 2. All of them know the true game; the worst-case
//! one also knows the learner's code and maximizes its expected cumulative
//! loss exactly, by backward induction over the learner's reachable states.

use std::collections::HashMap;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::families::{nature_support, resolve_outcome, FamilyError, FamilyParams};
use crate::learners::{BehaviorKey, LearnerError, LearnerMachine, LearnerSpec};
use crate::stage_game::{best_response, solve_maximin, GameError, Player, StageGame};

#[derive(Debug, Error)]
pub enum OpponentError {
    #[error("learner state space exceeds the cap of {cap} states; too large for exact verification")]
    CapExceeded { cap: usize },
    #[error("no precomputed action for this state/horizon; policy was built for horizon {horizon}")]
    PolicyMismatch { horizon: u32 },
    #[error("opponent {opponent} does not apply to family {family}")]
    UnsupportedFamily {
        opponent: &'static str,
        family: &'static str,
    },
    #[error("scripted opponent needs at least one action")]
    EmptyScript,
    #[error("scripted action {action} outside 1..={max}")]
    ScriptActionOutOfRange { action: u32, max: u32 },
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error("stage game: {0}")]
    Game(String),
}

impl From<GameError> for OpponentError {
    fn from(e: GameError) -> Self {
        OpponentError::Game(e.to_string())
    }
}

/// Which opponent to field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum OpponentSpec {
    /// Exact loss-maximizing adversary (backward induction).
    WorstCaseDp,
    /// Always plays the middle of the board.
    MiddleCamper,
    /// Myopic best response to the learner's current epoch strategy.
    BestResponse,
    /// Plays the learner's most probable action (lowest index on ties).
    MatchProbable,
    /// Uniformly random action each round.
    UniformRandom,
    /// Fixed action list, repeated cyclically.
    Scripted { actions: Vec<u32> },
}

impl OpponentSpec {
    pub fn name(&self) -> &'static str {
        match self {
            OpponentSpec::WorstCaseDp => "worst_case_dp",
            OpponentSpec::MiddleCamper => "middle_camper",
            OpponentSpec::BestResponse => "best_response",
            OpponentSpec::MatchProbable => "match_probable",
            OpponentSpec::UniformRandom => "uniform_random",
            OpponentSpec::Scripted { .. } => "scripted",
        }
    }

    /// Parse a plain-text action list, one integer per line.
    pub fn scripted_from_text(text: &str) -> Result<OpponentSpec, OpponentError> {
        let actions = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(|l| {
                l.parse::<u32>().map_err(|_| OpponentError::ScriptActionOutOfRange {
                    action: 0,
                    max: u32::MAX,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if actions.is_empty() {
            return Err(OpponentError::EmptyScript);
        }
        Ok(OpponentSpec::Scripted { actions })
    }
}

/// Limits for exact verification. One cap governs both the adversarial DP
/// and the exhaustive worst-case search.
#[derive(Debug, Clone, Copy)]
pub struct Caps {
    pub max_states: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { max_states: 500_000 }
    }
}

/// Everything an opponent may condition on: past knowledge via the learner's
/// state and strategy, never the current round's realized action.
pub struct OpponentContext<'a> {
    pub params: &'a FamilyParams,
    pub game: &'a StageGame,
    pub value: f64,
    pub learner: &'a LearnerMachine,
    pub round: u32,
    pub horizon: u32,
}

#[derive(Debug, Clone, Copy)]
struct Branch {
    prob: f64,
    loss: f64,
    next: usize,
}

struct StateRec {
    machine: LearnerMachine,
    learned: bool,
    /// Per opponent action: the branch distribution over (learner action,
    /// nature) with per-round losses and successor states.
    transitions: Vec<Vec<Branch>>,
    /// For learned (absorbing) states: worst per-round expected loss and the
    /// action attaining it.
    absorb_loss: f64,
    absorb_action: u32,
}

/// Precomputed worst-case opponent: an action table over (learner state,
/// rounds remaining), plus the exact adversarial expected cumulative loss
/// it attains for every horizon up to the one it was built for.
#[derive(Debug)]
pub struct DpPolicy {
    horizon: u32,
    values_by_horizon: Vec<f64>,
    table: HashMap<(BehaviorKey, u32), u32>,
    absorbing: HashMap<BehaviorKey, u32>,
}

impl DpPolicy {
    /// Exact adversarial expected cumulative loss over the full horizon.
    pub fn value(&self) -> f64 {
        self.values_by_horizon[self.horizon as usize]
    }

    /// Same, over the first `t` rounds (`t <= horizon`).
    pub fn value_at(&self, t: u32) -> f64 {
        self.values_by_horizon[t as usize]
    }

    pub fn horizon(&self) -> u32 {
        self.horizon
    }
}

/// Build the exact worst-case opponent against `learner` over `horizon`
/// rounds and compute its value.
///
/// The recursion is `W(s, 0) = 0` and
/// `W(s, t) = max_{a2} E_{a1 ~ sigma(s), nature}[loss + W(s', t - 1)]`.
/// Maximizing over pure opponent actions per step is lossless: given the
/// observed history the objective is linear in the opponent's per-round
/// mixture. Learned states are absorbing, worth `t` times the worst
/// per-round expected loss of the frozen strategy.
pub fn worst_case_dp(
    params: &FamilyParams,
    learner: &LearnerSpec,
    horizon: u32,
    caps: &Caps,
) -> Result<DpPolicy, OpponentError> {
    let game = crate::families::to_stage_game(params)?.expected_matrix();
    let value = solve_maximin(&game)?.value;
    let total = params.actions();
    let nature = nature_support(params);

    // Enumerate every reachable learner state breadth-first.
    let mut states: Vec<StateRec> = Vec::new();
    let mut index: HashMap<BehaviorKey, usize> = HashMap::new();
    let root = LearnerMachine::new(learner, params)?;
    index.insert(root.behavior_key(), 0);
    states.push(StateRec {
        machine: root,
        learned: false,
        transitions: Vec::new(),
        absorb_loss: 0.0,
        absorb_action: 1,
    });
    let mut cursor = 0;
    while cursor < states.len() {
        if states.len() > caps.max_states {
            return Err(OpponentError::CapExceeded { cap: caps.max_states });
        }
        let machine = states[cursor].machine.clone();
        if machine.learned() {
            let worst = game.worst_case_payoff(machine.strategy())?;
            let mut action = 1;
            for a2 in 1..=total {
                if game.payoff_vs_column(machine.strategy(), a2)? == worst {
                    action = a2;
                    break;
                }
            }
            states[cursor].learned = true;
            states[cursor].absorb_loss = value - worst;
            states[cursor].absorb_action = action;
            cursor += 1;
            continue;
        }
        let mut transitions = Vec::with_capacity(total as usize);
        for a2 in 1..=total {
            let mut branches = Vec::new();
            for (a1, p1) in machine.strategy().support() {
                for &(draw, q) in &nature {
                    let outcome = resolve_outcome(params, a1, a2, draw)?;
                    let mut next = machine.clone();
                    next.observe(&outcome)?;
                    let key = next.behavior_key();
                    let idx = match index.get(&key) {
                        Some(&i) => i,
                        None => {
                            let i = states.len();
                            index.insert(key, i);
                            states.push(StateRec {
                                machine: next,
                                learned: false,
                                transitions: Vec::new(),
                                absorb_loss: 0.0,
                                absorb_action: 1,
                            });
                            i
                        }
                    };
                    branches.push(Branch {
                        prob: p1 * q,
                        loss: value - outcome.u1,
                        next: idx,
                    });
                }
            }
            transitions.push(branches);
        }
        states[cursor].transitions = transitions;
        cursor += 1;
    }

    // Finite-horizon value iteration, recording the maximizing action.
    let count = states.len();
    let mut prev = vec![0.0f64; count];
    let mut table = HashMap::new();
    let mut values_by_horizon = vec![0.0f64; horizon as usize + 1];
    for t in 1..=horizon {
        let mut cur = vec![0.0f64; count];
        for (i, s) in states.iter().enumerate() {
            if s.learned {
                cur[i] = f64::from(t) * s.absorb_loss;
                continue;
            }
            let mut best = f64::NEG_INFINITY;
            let mut best_action = 1;
            for (j, branches) in s.transitions.iter().enumerate() {
                let v: f64 = branches
                    .iter()
                    .map(|b| b.prob * (b.loss + prev[b.next]))
                    .sum();
                if v > best {
                    best = v;
                    best_action = j as u32 + 1;
                }
            }
            cur[i] = best;
            table.insert((states[i].machine.behavior_key(), t), best_action);
        }
        values_by_horizon[t as usize] = cur[0];
        prev = cur;
    }

    let absorbing = states
        .iter()
        .filter(|s| s.learned)
        .map(|s| (s.machine.behavior_key(), s.absorb_action))
        .collect();

    Ok(DpPolicy {
        horizon,
        values_by_horizon,
        table,
        absorbing,
    })
}

/// A ready-to-play opponent.
pub enum OpponentPolicy {
    WorstCaseDp(DpPolicy),
    MiddleCamper,
    BestResponse,
    MatchProbable,
    UniformRandom,
    Scripted(Vec<u32>),
}

impl OpponentPolicy {
    /// Instantiate a policy for a concrete game and learner. The DP policy
    /// is precomputed here for the episode horizon.
    pub fn build(
        spec: &OpponentSpec,
        params: &FamilyParams,
        learner: &LearnerSpec,
        horizon: u32,
        caps: &Caps,
    ) -> Result<OpponentPolicy, OpponentError> {
        match spec {
            OpponentSpec::WorstCaseDp => Ok(OpponentPolicy::WorstCaseDp(worst_case_dp(
                params, learner, horizon, caps,
            )?)),
            OpponentSpec::MiddleCamper => {
                match params {
                    FamilyParams::GetClose { .. } | FamilyParams::TwoTargets { .. } => {}
                    _ => {
                        return Err(OpponentError::UnsupportedFamily {
                            opponent: "middle_camper",
                            family: params.family_name(),
                        })
                    }
                }
                Ok(OpponentPolicy::MiddleCamper)
            }
            OpponentSpec::BestResponse => Ok(OpponentPolicy::BestResponse),
            OpponentSpec::MatchProbable => Ok(OpponentPolicy::MatchProbable),
            OpponentSpec::UniformRandom => Ok(OpponentPolicy::UniformRandom),
            OpponentSpec::Scripted { actions } => {
                if actions.is_empty() {
                    return Err(OpponentError::EmptyScript);
                }
                let max = params.actions();
                if let Some(&bad) = actions.iter().find(|&&a| a == 0 || a > max) {
                    return Err(OpponentError::ScriptActionOutOfRange { action: bad, max });
                }
                Ok(OpponentPolicy::Scripted(actions.clone()))
            }
        }
    }

    pub fn act<R: Rng>(&self, ctx: &OpponentContext, rng: &mut R) -> Result<u32, OpponentError> {
        match self {
            OpponentPolicy::WorstCaseDp(dp) => {
                let key = ctx.learner.behavior_key();
                if ctx.learner.learned() {
                    if let Some(&a) = dp.absorbing.get(&key) {
                        return Ok(a);
                    }
                    // Learned state reached mid-episode but never enumerated
                    // as absorbing (cannot happen for states the DP built).
                    let (a, _) = best_response(ctx.game, ctx.learner.strategy(), Player::Two)?;
                    return Ok(a);
                }
                let remaining = ctx
                    .horizon
                    .checked_sub(ctx.round)
                    .filter(|r| *r >= 1 && ctx.horizon == dp.horizon)
                    .ok_or(OpponentError::PolicyMismatch { horizon: dp.horizon })?;
                dp.table
                    .get(&(key, remaining))
                    .copied()
                    .ok_or(OpponentError::PolicyMismatch { horizon: dp.horizon })
            }
            OpponentPolicy::MiddleCamper => Ok(ctx.params.actions().div_ceil(2)),
            OpponentPolicy::BestResponse => {
                let (a, _) = best_response(ctx.game, ctx.learner.strategy(), Player::Two)?;
                Ok(a)
            }
            OpponentPolicy::MatchProbable => {
                let probs = ctx.learner.strategy().probs();
                let mut best = 0;
                for (i, p) in probs.iter().enumerate() {
                    if *p > probs[best] {
                        best = i;
                    }
                }
                Ok(best as u32 + 1)
            }
            OpponentPolicy::UniformRandom => Ok(rng.random_range(1..=ctx.params.actions())),
            OpponentPolicy::Scripted(actions) => {
                Ok(actions[ctx.round as usize % actions.len()])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::NatureDraw;
    use crate::stage_game::MixedStrategy;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    /// Unmemoized expectimax over the raw game tree; the independent check
    /// for the memoized, absorbing-shortcut DP.
    fn oracle_tree_value(
        params: &FamilyParams,
        machine: &LearnerMachine,
        value: f64,
        t: u32,
    ) -> f64 {
        if t == 0 {
            return 0.0;
        }
        let mut best = f64::NEG_INFINITY;
        for a2 in 1..=params.actions() {
            let mut v = 0.0;
            for (a1, p1) in machine.strategy().support() {
                for (draw, q) in nature_support(params) {
                    let outcome = resolve_outcome(params, a1, a2, draw).unwrap();
                    let mut next = machine.clone();
                    next.observe(&outcome).unwrap();
                    v += p1 * q * (value - outcome.u1 + oracle_tree_value(params, &next, value, t - 1));
                }
            }
            best = best.max(v);
        }
        best
    }

    #[test]
    fn dp_matches_tree_oracle_on_get_close() {
        let params = FamilyParams::GetClose { n: 4, k: 4 };
        let dp = worst_case_dp(&params, &LearnerSpec::BinarySearch, 10, &Caps::default()).unwrap();
        assert_eq!(dp.value(), 2.0, "bound ceil(log2 4) = 2 is tight");

        let game = crate::families::to_stage_game(&params).unwrap();
        let value = solve_maximin(&game).unwrap().value;
        let machine = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        // Depth 6 suffices: the oracle has already converged by then.
        let oracle = oracle_tree_value(&params, &machine, value, 6);
        assert_eq!(dp.value_at(6), oracle);

        // Across all targets the worst case is exactly 2 and never more.
        let worst = (1..=4)
            .map(|k| {
                worst_case_dp(
                    &FamilyParams::GetClose { n: 4, k },
                    &LearnerSpec::BinarySearch,
                    10,
                    &Caps::default(),
                )
                .unwrap()
                .value()
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(worst, 2.0);
    }

    #[test]
    fn dp_matches_geometric_series_on_mp_duds() {
        // One dud among three actions: each epoch-0 round the best opponent
        // action yields expected loss 1/6 and ends the epoch w.p. 1/3, so
        // the exact value is (1/2) * (1 - (2/3)^N) -> 1/2.
        let params = FamilyParams::MpDuds {
            m: 2,
            n: 1,
            duds: BTreeSet::from([3]),
        };
        let dp = worst_case_dp(&params, &LearnerSpec::DudElimination, 30, &Caps::default())
            .unwrap();
        for t in 1..=30u32 {
            let closed_form = 0.5 * (1.0 - (2.0f64 / 3.0).powi(t as i32));
            assert!(
                (dp.value_at(t) - closed_form).abs() < 1e-9,
                "t={t}: dp {} vs closed form {closed_form}",
                dp.value_at(t)
            );
        }
    }

    #[test]
    fn dp_value_is_monotone_in_horizon() {
        let cases: Vec<(FamilyParams, LearnerSpec)> = vec![
            (FamilyParams::GetClose { n: 8, k: 5 }, LearnerSpec::BinarySearch),
            (
                FamilyParams::MpDuds {
                    m: 2,
                    n: 2,
                    duds: BTreeSet::from([1, 3]),
                },
                LearnerSpec::DudElimination,
            ),
            (
                FamilyParams::TwoTargets {
                    n: 4,
                    k1: 1,
                    k2: 3,
                    p1: 0.6,
                    p2: 0.4,
                    r1: 4.0,
                    r2: 1.0,
                },
                LearnerSpec::TwoTargets,
            ),
            (
                FamilyParams::RandomOrientationRpsDuds {
                    m: 3,
                    n: 1,
                    f: vec![2, 3, 1, 4],
                },
                LearnerSpec::RandomOrientation,
            ),
        ];
        for (params, learner) in cases {
            let dp = worst_case_dp(&params, &learner, 16, &Caps::default()).unwrap();
            for t in 1..=16u32 {
                assert!(
                    dp.value_at(t) + 1e-12 >= dp.value_at(t - 1),
                    "{params}: value decreased at t={t}"
                );
            }
        }
    }

    #[test]
    fn omniscient_learner_concedes_nothing() {
        let cases = vec![
            FamilyParams::GetClose { n: 6, k: 2 },
            FamilyParams::MpDuds {
                m: 2,
                n: 1,
                duds: BTreeSet::from([2]),
            },
            FamilyParams::RpsDuds {
                m: 3,
                n: 1,
                f: vec![4, 2, 3, 1],
            },
        ];
        for params in cases {
            let dp = worst_case_dp(&params, &LearnerSpec::Omniscient, 12, &Caps::default())
                .unwrap();
            assert!(dp.value() <= 1e-9, "{params}: {}", dp.value());
        }
    }

    #[test]
    fn tiny_cap_is_reported() {
        let params = FamilyParams::GetClose { n: 16, k: 11 };
        let err = worst_case_dp(
            &params,
            &LearnerSpec::BinarySearch,
            4,
            &Caps { max_states: 2 },
        )
        .unwrap_err();
        assert!(matches!(err, OpponentError::CapExceeded { cap: 2 }));
    }

    fn ctx_for<'a>(
        params: &'a FamilyParams,
        game: &'a StageGame,
        learner: &'a LearnerMachine,
        round: u32,
    ) -> OpponentContext<'a> {
        OpponentContext {
            params,
            game,
            value: 0.0,
            learner,
            round,
            horizon: 100,
        }
    }

    #[test]
    fn middle_camper_sits_still() {
        let params = FamilyParams::GetClose { n: 5, k: 5 };
        let game = crate::families::to_stage_game(&params).unwrap();
        let learner = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        let policy = OpponentPolicy::build(
            &OpponentSpec::MiddleCamper,
            &params,
            &LearnerSpec::BinarySearch,
            100,
            &Caps::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for round in 0..100 {
            let a = policy
                .act(&ctx_for(&params, &game, &learner, round), &mut rng)
                .unwrap();
            assert_eq!(a, 3);
        }
        let even = FamilyParams::GetClose { n: 4, k: 1 };
        let learner4 = LearnerMachine::new(&LearnerSpec::BinarySearch, &even).unwrap();
        let game4 = crate::families::to_stage_game(&even).unwrap();
        let a = policy
            .act(&ctx_for(&even, &game4, &learner4, 0), &mut rng)
            .unwrap();
        assert_eq!(a, 2);
    }

    #[test]
    fn middle_camper_rejects_circle_games() {
        let params = FamilyParams::RpsDuds {
            m: 3,
            n: 0,
            f: vec![1, 2, 3],
        };
        assert!(matches!(
            OpponentPolicy::build(
                &OpponentSpec::MiddleCamper,
                &params,
                &LearnerSpec::ChaseWinner,
                10,
                &Caps::default(),
            ),
            Err(OpponentError::UnsupportedFamily { .. })
        ));
    }

    #[test]
    fn myopic_best_response_punishes_fixed_play() {
        // Board of 5 with target 5: against a learner camped on 3, the
        // best response is 4 (ties at the target break to lower index 4).
        let params = FamilyParams::GetClose { n: 5, k: 5 };
        let game = crate::families::to_stage_game(&params).unwrap();
        let mut learner = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        let policy = OpponentPolicy::BestResponse;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let a = policy
            .act(&ctx_for(&params, &game, &learner, 0), &mut rng)
            .unwrap();
        assert_eq!(a, 4);
        // Against a learned (maximin) learner it achieves exactly the value.
        let o = resolve_outcome(&params, 3, a, NatureDraw::None).unwrap();
        learner.observe(&o).unwrap();
        let omniscient = LearnerMachine::new(&LearnerSpec::Omniscient, &params).unwrap();
        let a = policy
            .act(&ctx_for(&params, &game, &omniscient, 1), &mut rng)
            .unwrap();
        let payoff = game
            .payoff_vs_column(omniscient.strategy(), a)
            .unwrap();
        assert_eq!(payoff, solve_maximin(&game).unwrap().value);
    }

    #[test]
    fn match_probable_takes_the_argmax() {
        let params = FamilyParams::MpDuds {
            m: 2,
            n: 1,
            duds: BTreeSet::from([3]),
        };
        let game = crate::families::to_stage_game(&params).unwrap();
        let learner = LearnerMachine::new(&LearnerSpec::DudElimination, &params).unwrap();
        let policy = OpponentPolicy::MatchProbable;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Uniform over three actions: tie-break picks action 1.
        let a = policy
            .act(&ctx_for(&params, &game, &learner, 0), &mut rng)
            .unwrap();
        assert_eq!(a, 1);
        let skewed = MixedStrategy::new(vec![0.2, 0.5, 0.3]).unwrap();
        let mut best = 0;
        for (i, p) in skewed.probs().iter().enumerate() {
            if *p > skewed.probs()[best] {
                best = i;
            }
        }
        assert_eq!(best + 1, 2);
    }

    #[test]
    fn scripted_actions_cycle_and_validate() {
        let params = FamilyParams::GetClose { n: 4, k: 2 };
        let game = crate::families::to_stage_game(&params).unwrap();
        let learner = LearnerMachine::new(&LearnerSpec::BinarySearch, &params).unwrap();
        let policy = OpponentPolicy::build(
            &OpponentSpec::Scripted { actions: vec![4, 2] },
            &params,
            &LearnerSpec::BinarySearch,
            10,
            &Caps::default(),
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let acts: Vec<u32> = (0..5)
            .map(|r| policy.act(&ctx_for(&params, &game, &learner, r), &mut rng).unwrap())
            .collect();
        assert_eq!(acts, vec![4, 2, 4, 2, 4]);

        assert!(matches!(
            OpponentPolicy::build(
                &OpponentSpec::Scripted { actions: vec![9] },
                &params,
                &LearnerSpec::BinarySearch,
                10,
                &Caps::default(),
            ),
            Err(OpponentError::ScriptActionOutOfRange { action: 9, .. })
        ));
        assert!(OpponentSpec::scripted_from_text("3\n1\n\n2\n").is_ok());
        assert!(OpponentSpec::scripted_from_text("\n").is_err());
    }
}
