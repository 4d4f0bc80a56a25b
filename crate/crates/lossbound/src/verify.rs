//! Machine-checks for every loss bound: guaranteed bounds by exhaustive
//! search over the learner's reachable states, expected bounds by exact
//! adversarial dynamic programming, per-epoch ratio conditions by
//! enumeration, and approximate bounds combining both.
//!
//! "For any game in the family" is checked by exhaustive sweep over the
//! finite hidden-parameter set, within the size caps below.

use serde::Serialize;
use thiserror::Error;

use crate::families::{
    nature_support, resolve_outcome, to_stage_game, FamilyError, FamilyParams, FamilyShape,
    KnowledgeState, NatureDraw,
};
use crate::learners::{BehaviorKey, LearnerError, LearnerMachine, LearnerSpec};
use crate::opponents::{worst_case_dp, Caps, OpponentError, OpponentSpec};
use crate::sim::{SimError, Simulation};
use crate::stage_game::{exploitability, solve_maximin, GameError};

use std::collections::{HashMap, HashSet};

/// Exact-method tolerance on measured-vs-claimed comparisons.
pub const EXACT_TOLERANCE: f64 = 1e-9;
/// Expected one-round losses at or below this count as "no advantage".
pub const NO_ADVANTAGE_TOLERANCE: f64 = 1e-12;

/// Sweep caps: exhaustive quantification over hidden parameters is limited
/// to these sizes.
pub const SWEEP_MAX_GET_CLOSE_N: u32 = 32;
pub const SWEEP_MAX_RPS_TOTAL: u32 = 7;
pub const SWEEP_MAX_MP_TOTAL: u32 = 8;
pub const SWEEP_MAX_TWO_TARGETS_N: u32 = 8;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("sweep for {family} exceeds the configured cap ({detail})")]
    SweepTooLarge { family: &'static str, detail: String },
    #[error("lemma constants list has {given} entries but epoch {epoch} is reachable")]
    TooFewConstants { given: usize, epoch: u32 },
    #[error("negative demonstration needs per-round loss > 0 at the middle (got {per_round})")]
    NotDemonstrable { per_round: f64 },
    #[error("learner state graph has a cycle; exhaustive bound search is unsound")]
    StateCycle,
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Opponent(#[from] OpponentError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("stage game: {0}")]
    Game(String),
}

impl From<GameError> for VerifyError {
    fn from(e: GameError) -> Self {
        VerifyError::Game(e.to_string())
    }
}

impl VerifyError {
    /// Whether this error means "instance too large for exact verification".
    pub fn is_cap(&self) -> bool {
        matches!(self, VerifyError::SweepTooLarge { .. })
            || matches!(self, VerifyError::Opponent(OpponentError::CapExceeded { .. }))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Guaranteed,
    Expected,
    Approximate,
    Lemma,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Exhaustive,
    Dp,
    MonteCarlo,
    Enumeration,
}

/// Outcome of one bound check over a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub family: String,
    pub learner: String,
    pub check: CheckKind,
    pub claimed: f64,
    pub measured: f64,
    pub pass: bool,
    pub method: Method,
    pub instances: usize,
    pub worst_instance: Option<String>,
    pub note: Option<String>,
}

/// Integer ceil(log2 n) for n >= 1.
pub fn ceil_log2(n: u32) -> u32 {
    assert!(n >= 1);
    32 - (n - 1).leading_zeros()
}

/// The guaranteed loss bound claimed for this family, when one exists.
pub fn guaranteed_bound(shape: &FamilyShape) -> Option<f64> {
    match shape {
        FamilyShape::GetClose { n } => Some(f64::from(ceil_log2(*n))),
        FamilyShape::RpsDuds { m, n } => Some(if *n == 0 {
            0.0
        } else if m % 2 == 1 {
            f64::from(*m)
        } else {
            f64::from(m - 1)
        }),
        FamilyShape::RandomOrientationRpsDuds { n, .. } => {
            Some(if *n == 0 { 0.0 } else { 1.0 })
        }
        _ => None,
    }
}

/// The expected-loss bound claimed for this family. Guaranteed-learnable
/// families inherit their guaranteed bound.
pub fn expected_bound(shape: &FamilyShape) -> Option<f64> {
    match shape {
        FamilyShape::MpDuds { n, .. } => Some(f64::from(*n)),
        FamilyShape::TwoTargets { n, r1, .. } => Some(f64::from(ceil_log2(*n)) * r1),
        other => guaranteed_bound(other),
    }
}

/// Per-epoch ratio constants under which the family's bound follows: the
/// sum of the constants is the expected-loss bound.
pub fn lemma_constants(shape: &FamilyShape) -> Option<Vec<f64>> {
    match shape {
        FamilyShape::MpDuds { n, .. } => {
            let mut c = vec![1.0; *n as usize];
            c.push(0.0);
            Some(c)
        }
        FamilyShape::TwoTargets { n, r1, .. } => {
            let mut c = vec![*r1; ceil_log2(*n) as usize];
            c.push(0.0);
            Some(c)
        }
        _ => None,
    }
}

/// The learner each family's bound is proved for.
pub fn reference_learner(shape: &FamilyShape) -> LearnerSpec {
    match shape {
        FamilyShape::GetClose { .. } => LearnerSpec::BinarySearch,
        FamilyShape::RpsDuds { .. } => LearnerSpec::ChaseWinner,
        FamilyShape::RandomOrientationRpsDuds { .. } => LearnerSpec::RandomOrientation,
        FamilyShape::TwoTargets { .. } => LearnerSpec::TwoTargets,
        FamilyShape::MpDuds { .. } => LearnerSpec::DudElimination,
    }
}

/// Enumerate all hidden-parameter instances of a shape, enforcing sweep caps.
pub fn sweep_instances(shape: &FamilyShape) -> Result<Vec<FamilyParams>, VerifyError> {
    let over = |family: &'static str, detail: String| VerifyError::SweepTooLarge { family, detail };
    match shape {
        FamilyShape::GetClose { n } => {
            if *n > SWEEP_MAX_GET_CLOSE_N {
                return Err(over("get_close", format!("n = {n} > {SWEEP_MAX_GET_CLOSE_N}")));
            }
        }
        FamilyShape::RpsDuds { m, n } | FamilyShape::RandomOrientationRpsDuds { m, n } => {
            if m + n > SWEEP_MAX_RPS_TOTAL {
                return Err(over(
                    "rps_duds",
                    format!("m + n = {} > {SWEEP_MAX_RPS_TOTAL}", m + n),
                ));
            }
        }
        FamilyShape::MpDuds { m, n } => {
            if m + n > SWEEP_MAX_MP_TOTAL {
                return Err(over(
                    "mp_duds",
                    format!("m + n = {} > {SWEEP_MAX_MP_TOTAL}", m + n),
                ));
            }
        }
        FamilyShape::TwoTargets { n, .. } => {
            if *n > SWEEP_MAX_TWO_TARGETS_N {
                return Err(over(
                    "two_targets",
                    format!("n = {n} > {SWEEP_MAX_TWO_TARGETS_N}"),
                ));
            }
        }
    }
    Ok(shape.instances()?)
}

fn shape_description(instances: &[FamilyParams]) -> String {
    match FamilyShape::of(&instances[0]) {
        FamilyShape::GetClose { n } => format!("get_close(n={n})"),
        FamilyShape::RpsDuds { m, n } => format!("rps_duds(m={m}, n={n})"),
        FamilyShape::RandomOrientationRpsDuds { m, n } => {
            format!("random_orientation_rps_duds(m={m}, n={n})")
        }
        FamilyShape::TwoTargets { n, p1, p2, r1, r2 } => {
            format!("two_targets(n={n}, p1={p1}, p2={p2}, r1={r1}, r2={r2})")
        }
        FamilyShape::MpDuds { m, n } => format!("mp_duds(m={m}, n={n})"),
    }
}

/// Exact worst-case cumulative loss accrued strictly before the learner is
/// learned, over all opponent action sequences, Nature branches, and
/// realized learner actions. Infinite when the opponent can force positive
/// loss without ever triggering a learning event.
pub fn guaranteed_max_loss(
    params: &FamilyParams,
    learner: &LearnerSpec,
    caps: &Caps,
) -> Result<f64, VerifyError> {
    let game = to_stage_game(params)?.expected_matrix();
    let value = solve_maximin(&game)?.value;
    let machine = LearnerMachine::new(learner, params)?;
    let mut memo: HashMap<BehaviorKey, f64> = HashMap::new();
    let mut stack: HashSet<BehaviorKey> = HashSet::new();
    max_loss_rec(params, &machine, value, caps, &mut memo, &mut stack)
}

fn max_loss_rec(
    params: &FamilyParams,
    machine: &LearnerMachine,
    value: f64,
    caps: &Caps,
    memo: &mut HashMap<BehaviorKey, f64>,
    stack: &mut HashSet<BehaviorKey>,
) -> Result<f64, VerifyError> {
    if machine.learned() {
        return Ok(0.0);
    }
    let key = machine.behavior_key();
    if let Some(v) = memo.get(&key) {
        return Ok(*v);
    }
    if memo.len() > caps.max_states {
        return Err(VerifyError::Opponent(OpponentError::CapExceeded {
            cap: caps.max_states,
        }));
    }
    if !stack.insert(key.clone()) {
        return Err(VerifyError::StateCycle);
    }
    // Stalling forever accrues nothing more, so 0 is the floor.
    let mut best = 0.0f64;
    'outer: for a2 in 1..=params.actions() {
        for (a1, _) in machine.strategy().support() {
            for (draw, _) in nature_support(params) {
                let outcome = resolve_outcome(params, a1, a2, draw)?;
                let loss = value - outcome.u1;
                let mut next = machine.clone();
                next.observe(&outcome)?;
                if next.behavior_key() == key {
                    if loss > EXACT_TOLERANCE {
                        // Positive loss with no learning event: repeatable
                        // at will, so the loss before learning is unbounded.
                        best = f64::INFINITY;
                        break 'outer;
                    }
                } else {
                    let tail = max_loss_rec(params, &next, value, caps, memo, stack)?;
                    best = best.max(loss + tail);
                }
            }
        }
    }
    stack.remove(&key);
    memo.insert(key, best);
    Ok(best)
}

/// Check a guaranteed loss bound by exhaustive search over every instance.
pub fn check_guaranteed(
    instances: &[FamilyParams],
    learner: &LearnerSpec,
    bound: f64,
    caps: &Caps,
) -> Result<BoundReport, VerifyError> {
    let mut measured = f64::NEG_INFINITY;
    let mut worst = None;
    for params in instances {
        let loss = guaranteed_max_loss(params, learner, caps)?;
        if loss > measured {
            measured = loss;
            worst = Some(params.to_string());
        }
    }
    Ok(BoundReport {
        family: shape_description(instances),
        learner: learner.describe(),
        check: CheckKind::Guaranteed,
        claimed: bound,
        measured,
        pass: measured <= bound + EXACT_TOLERANCE,
        method: Method::Exhaustive,
        instances: instances.len(),
        worst_instance: worst,
        note: None,
    })
}

/// Check an expected loss bound: for every instance and every horizon in
/// `horizons`, the exact adversarial DP value must stay within the bound.
/// Instances that exceed the state cap fall back to a seeded Monte Carlo
/// run against the myopic best-response opponent, with a `mean <= bound +
/// 3 * stderr` pass criterion.
pub fn check_expected(
    instances: &[FamilyParams],
    learner: &LearnerSpec,
    bound: f64,
    horizons: &[u32],
    caps: &Caps,
) -> Result<BoundReport, VerifyError> {
    let max_horizon = *horizons.iter().max().expect("at least one horizon");
    let mut measured = f64::NEG_INFINITY;
    let mut worst = None;
    let mut downgraded = 0usize;
    let mut statistical_pass = true;
    for params in instances {
        match worst_case_dp(params, learner, max_horizon, caps) {
            Ok(dp) => {
                for &t in horizons {
                    let v = dp.value_at(t);
                    if v > measured {
                        measured = v;
                        worst = Some(format!("{params} at N={t}"));
                    }
                }
            }
            Err(OpponentError::CapExceeded { .. }) => {
                downgraded += 1;
                let sim = Simulation::new(
                    params,
                    learner,
                    &OpponentSpec::BestResponse,
                    max_horizon,
                    caps,
                )?;
                let est = sim.monte_carlo(10_000, 0)?;
                statistical_pass &= est.mean <= bound + 3.0 * est.std_error;
                if est.mean > measured {
                    measured = est.mean;
                    worst = Some(format!("{params} (monte carlo)"));
                }
            }
            Err(e) => return Err(e.into()),
        }
    }
    let exact_pass = measured <= bound + EXACT_TOLERANCE;
    Ok(BoundReport {
        family: shape_description(instances),
        learner: learner.describe(),
        check: CheckKind::Expected,
        claimed: bound,
        measured,
        pass: if downgraded == 0 {
            exact_pass
        } else {
            exact_pass && statistical_pass
        },
        method: if downgraded == 0 { Method::Dp } else { Method::MonteCarlo },
        instances: instances.len(),
        worst_instance: worst,
        note: (downgraded > 0).then(|| {
            format!(
                "{downgraded} instance(s) exceeded the state cap; checked statistically \
                 (10000 episodes, mean <= bound + 3*stderr)"
            )
        }),
    })
}

/// Check a guaranteed-approximate bound: worst-case loss before the learner
/// declares (epsilon-)learned stays within `bound`, every reachable learned
/// strategy has exploitability at most `epsilon`, and the wrapped learner's
/// DP value stays within `bound + N * epsilon` for every horizon.
pub fn check_approximate(
    instances: &[FamilyParams],
    learner: &LearnerSpec,
    bound: f64,
    epsilon: f64,
    horizons: &[u32],
    caps: &Caps,
) -> Result<BoundReport, VerifyError> {
    let max_horizon = *horizons.iter().max().expect("at least one horizon");
    let mut max_loss = f64::NEG_INFINITY;
    let mut max_exploit = f64::NEG_INFINITY;
    let mut max_excess = f64::NEG_INFINITY;
    let mut worst = None;
    let wrapped = LearnerSpec::WrapMaximin {
        inner: Box::new(learner.clone()),
    };
    for params in instances {
        let loss = guaranteed_max_loss(params, learner, caps)?;
        if loss > max_loss {
            max_loss = loss;
            worst = Some(params.to_string());
        }
        let game = to_stage_game(params)?;
        for state in reachable_states(params, learner, caps)? {
            if state.learned() {
                let e = exploitability(&game, state.strategy())?;
                max_exploit = max_exploit.max(e);
            }
        }
        let dp = worst_case_dp(params, &wrapped, max_horizon, caps)?;
        for &t in horizons {
            max_excess = max_excess.max(dp.value_at(t) - bound - f64::from(t) * epsilon);
        }
    }
    let pass = max_loss <= bound + EXACT_TOLERANCE
        && max_exploit <= epsilon + EXACT_TOLERANCE
        && max_excess <= EXACT_TOLERANCE;
    Ok(BoundReport {
        family: shape_description(instances),
        learner: learner.describe(),
        check: CheckKind::Approximate,
        claimed: bound,
        measured: max_loss,
        pass,
        method: Method::Exhaustive,
        instances: instances.len(),
        worst_instance: worst,
        note: Some(format!(
            "max exploitability {max_exploit:.6} (epsilon {epsilon}); \
             max DP excess over bound+N*epsilon {max_excess:.3e}"
        )),
    })
}

/// Every learner state reachable from the initial one under any play.
fn reachable_states(
    params: &FamilyParams,
    learner: &LearnerSpec,
    caps: &Caps,
) -> Result<Vec<LearnerMachine>, VerifyError> {
    let mut seen: HashSet<BehaviorKey> = HashSet::new();
    let mut queue = vec![LearnerMachine::new(learner, params)?];
    seen.insert(queue[0].behavior_key());
    let mut cursor = 0;
    while cursor < queue.len() {
        if queue.len() > caps.max_states {
            return Err(VerifyError::Opponent(OpponentError::CapExceeded {
                cap: caps.max_states,
            }));
        }
        let machine = queue[cursor].clone();
        cursor += 1;
        if machine.learned() {
            continue;
        }
        for a2 in 1..=params.actions() {
            for (a1, _) in machine.strategy().support() {
                for (draw, _) in nature_support(params) {
                    let outcome = resolve_outcome(params, a1, a2, draw)?;
                    let mut next = machine.clone();
                    next.observe(&outcome)?;
                    if seen.insert(next.behavior_key()) {
                        queue.push(next);
                    }
                }
            }
        }
    }
    Ok(queue)
}

/// One opponent action's row in an epoch's ratio table.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaRow {
    pub opponent_action: u32,
    /// Expected one-round loss to player 1.
    pub lambda: f64,
    /// Probability this round causes the learning event.
    pub p_event: f64,
    /// `lambda / p_event`, absent on no-advantage rows (p = 0).
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Ratio conditions for one reachable epoch state.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaRatioReport {
    pub epoch: u32,
    pub strategy: Vec<f64>,
    pub c: f64,
    pub rows: Vec<LemmaRow>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaCheck {
    pub reports: Vec<LemmaRatioReport>,
    /// Sum of the constants: the expected-loss bound these conditions imply.
    pub implied_bound: f64,
    pub pass: bool,
}

/// Verify the per-epoch conditions under which bounded expected loss
/// follows: every opponent action either cannot end the epoch and gives no
/// advantage (`lambda <= 0`), or ends it with probability `p` satisfying
/// `lambda / p <= c_i`. Pure opponent actions suffice: both quantities are
/// linear in the opponent's mixture, and a ratio of linear functions over
/// the simplex is maximized at a vertex.
pub fn lemma_ratio_check(
    params: &FamilyParams,
    learner: &LearnerSpec,
    constants: &[f64],
    caps: &Caps,
) -> Result<LemmaCheck, VerifyError> {
    let game = to_stage_game(params)?.expected_matrix();
    let value = solve_maximin(&game)?.value;
    let nature = nature_support(params);

    // Breadth-first over (behavior, epoch) pairs: the same knowledge state
    // reached after different event counts is checked against each epoch's
    // constant.
    let mut seen: HashSet<(BehaviorKey, u32)> = HashSet::new();
    let root = LearnerMachine::new(learner, params)?;
    seen.insert((root.behavior_key(), root.epoch()));
    let mut queue = vec![root];
    let mut reports = Vec::new();
    let mut cursor = 0;
    while cursor < queue.len() {
        if queue.len() > caps.max_states {
            return Err(VerifyError::Opponent(OpponentError::CapExceeded {
                cap: caps.max_states,
            }));
        }
        let machine = queue[cursor].clone();
        cursor += 1;
        let epoch = machine.epoch();
        let Some(&c) = constants.get(epoch as usize) else {
            return Err(VerifyError::TooFewConstants {
                given: constants.len(),
                epoch,
            });
        };
        let mut rows = Vec::with_capacity(params.actions() as usize);
        let mut all_pass = true;
        for a2 in 1..=params.actions() {
            let mut lambda = value;
            let mut p_event = 0.0;
            for (a1, p1) in machine.strategy().support() {
                for &(draw, q) in &nature {
                    let outcome = resolve_outcome(params, a1, a2, draw)?;
                    lambda -= p1 * q * outcome.u1;
                    let mut next = machine.clone();
                    next.observe(&outcome)?;
                    if next.epoch() != epoch {
                        p_event += p1 * q;
                    }
                    if !machine.learned()
                        && seen.insert((next.behavior_key(), next.epoch()))
                    {
                        queue.push(next);
                    }
                }
            }
            let (ratio, pass) = if p_event <= NO_ADVANTAGE_TOLERANCE {
                (None, lambda <= NO_ADVANTAGE_TOLERANCE)
            } else {
                let r = lambda / p_event;
                (Some(r), r <= c + EXACT_TOLERANCE)
            };
            all_pass &= pass;
            rows.push(LemmaRow {
                opponent_action: a2,
                lambda,
                p_event,
                ratio,
                pass,
            });
        }
        reports.push(LemmaRatioReport {
            epoch,
            strategy: machine.strategy().probs().to_vec(),
            c,
            rows,
            pass: all_pass,
        });
    }
    let pass = reports.iter().all(|r| r.pass);
    Ok(LemmaCheck {
        reports,
        implied_bound: constants.iter().sum(),
        pass,
    })
}

/// Aggregate of [`lemma_ratio_check`] over a parameter sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaSweepReport {
    pub family: String,
    pub learner: String,
    pub constants: Vec<f64>,
    pub implied_bound: f64,
    pub instances: usize,
    pub pass: bool,
    /// Largest loss/event-probability ratio seen across all epochs.
    pub worst_ratio: Option<f64>,
    pub worst_instance: Option<String>,
}

pub fn lemma_sweep(
    instances: &[FamilyParams],
    learner: &LearnerSpec,
    constants: &[f64],
    caps: &Caps,
) -> Result<LemmaSweepReport, VerifyError> {
    let mut pass = true;
    let mut worst_ratio: Option<f64> = None;
    let mut worst_instance = None;
    for params in instances {
        let check = lemma_ratio_check(params, learner, constants, caps)?;
        pass &= check.pass;
        for report in &check.reports {
            for row in &report.rows {
                if let Some(r) = row.ratio {
                    if worst_ratio.is_none_or(|w| r > w) {
                        worst_ratio = Some(r);
                        worst_instance = Some(params.to_string());
                    }
                }
            }
        }
    }
    Ok(LemmaSweepReport {
        family: shape_description(instances),
        learner: learner.describe(),
        constants: constants.to_vec(),
        implied_bound: constants.iter().sum(),
        instances: instances.len(),
        pass,
        worst_ratio,
        worst_instance,
    })
}

/// Evidence that two-targets is not guaranteed learnable: against a
/// middle-camping opponent with Nature pinned to the second target, the
/// learner bleeds loss at a constant rate while its interval for the first
/// target never shrinks.
#[derive(Debug, Clone, Serialize)]
pub struct NegativeDemo {
    pub budget: f64,
    pub rounds: u32,
    pub cumulative_loss: f64,
    /// Smallest interval width seen for the first target.
    pub min_interval: u32,
    pub board: u32,
    pub pass: bool,
}

pub fn negative_demonstration(
    params: &FamilyParams,
    budget: f64,
    caps: &Caps,
) -> Result<NegativeDemo, VerifyError> {
    let FamilyParams::TwoTargets { n, .. } = params else {
        return Err(VerifyError::Family(FamilyError::InvalidParam {
            field: "family",
            reason: "negative demonstration is defined for two_targets".into(),
        }));
    };
    let board = *n;
    let game = to_stage_game(params)?.expected_matrix();
    let value = solve_maximin(&game)?.value;
    let mid = board.div_ceil(2);
    // Both the learner's opening midpoint and the camper sit at `mid`; with
    // the second target active the round neither teaches nor breaks even.
    let probe = resolve_outcome(params, mid, mid, NatureDraw::ActiveTarget(2))?;
    let per_round = value - probe.u1;
    if per_round <= EXACT_TOLERANCE {
        return Err(VerifyError::NotDemonstrable { per_round });
    }
    let rounds = (budget / per_round).ceil() as u32 + 1;
    let sim = Simulation::new(
        params,
        &LearnerSpec::TwoTargets,
        &OpponentSpec::MiddleCamper,
        rounds,
        caps,
    )?;
    let script = vec![NatureDraw::ActiveTarget(2); rounds as usize];
    let trace = sim.run_episode_with_nature(0, &script)?;

    // Replay the learner over the trace to watch its interval.
    let mut machine = LearnerMachine::new(&LearnerSpec::TwoTargets, params)?;
    let mut min_interval = board;
    for row in &trace.rows {
        let outcome = resolve_outcome(params, row.a1, row.a2, row.nature)?;
        machine.observe(&outcome)?;
        if let Some(KnowledgeState::TargetInterval { lo, hi }) = machine.knowledge() {
            min_interval = min_interval.min(hi - lo + 1);
        }
    }
    let cumulative_loss = trace.cumulative_loss();
    Ok(NegativeDemo {
        budget,
        rounds,
        cumulative_loss,
        min_interval,
        board,
        pass: cumulative_loss > budget && 2 * min_interval >= board,
    })
}
