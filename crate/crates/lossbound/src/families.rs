//! The five parameterized game families: hidden parameters, round outcome
//! resolution (including Nature's moves), stage-game matrices, and the
//! learner-side knowledge states with their update rules.
//!
//! Actions are 1-indexed integers. The learner always knows the family and
//! its public size/probability/reward parameters; only the parameters called
//! out as hidden (`k`, `f`, `duds`, `k1`/`k2`) are unknown to it.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, RngExt};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::stage_game::{PayoffEntry, StageGame};

#[derive(Debug, Error, PartialEq)]
pub enum FamilyError {
    #[error("{field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },
    #[error("action {action} out of range 1..={max}")]
    ActionOutOfRange { action: u32, max: u32 },
    #[error("nature draw {got} does not match family {family}")]
    NatureMismatch { family: &'static str, got: String },
    #[error("observation inconsistent with knowledge state: {0}")]
    InconsistentObservation(String),
}

fn invalid(field: &'static str, reason: impl Into<String>) -> FamilyError {
    FamilyError::InvalidParam {
        field,
        reason: reason.into(),
    }
}

/// A fully specified game instance: family plus hidden parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyParams {
    /// Both players pick a board position; closer to the hidden target `k`
    /// wins (+1/-1, draws 0). Equal non-target picks favor the lower side.
    GetClose { n: u32, k: u32 },
    /// Rock-paper-scissors over a hidden circle of `m` nonduds plus `n`
    /// always-losing duds, both encoded by the permutation `f`
    /// (`f[i-1] = f(i)`; duds are the actions mapped above `m`).
    RpsDuds { m: u32, n: u32, f: Vec<u32> },
    /// Same as [`FamilyParams::RpsDuds`] but Nature flips the circle's
    /// orientation independently every round.
    RandomOrientationRpsDuds { m: u32, n: u32, f: Vec<u32> },
    /// Two hidden targets; Nature activates target `j` with probability
    /// `p_j`, the round is scored like get-close against the active target,
    /// the winner receives `r_j`, the loser 0, and draws split `r_j`.
    TwoTargets {
        n: u32,
        k1: u32,
        k2: u32,
        p1: f64,
        p2: f64,
        r1: f64,
        r2: f64,
    },
    /// Matching pennies over `m` nonduds plus a hidden dud set of size `n`:
    /// nonduds beat duds, matching actions win for player 2, distinct
    /// actions for player 1 (winner 1, loser 0).
    MpDuds { m: u32, n: u32, duds: BTreeSet<u32> },
}

impl FamilyParams {
    pub fn family_name(&self) -> &'static str {
        match self {
            FamilyParams::GetClose { .. } => "get_close",
            FamilyParams::RpsDuds { .. } => "rps_duds",
            FamilyParams::RandomOrientationRpsDuds { .. } => "random_orientation_rps_duds",
            FamilyParams::TwoTargets { .. } => "two_targets",
            FamilyParams::MpDuds { .. } => "mp_duds",
        }
    }

    /// Number of actions available to each player.
    pub fn actions(&self) -> u32 {
        match self {
            FamilyParams::GetClose { n, .. } => *n,
            FamilyParams::RpsDuds { m, n, .. }
            | FamilyParams::RandomOrientationRpsDuds { m, n, .. }
            | FamilyParams::MpDuds { m, n, .. } => m + n,
            FamilyParams::TwoTargets { n, .. } => *n,
        }
    }

    pub fn validate(&self) -> Result<(), FamilyError> {
        match self {
            FamilyParams::GetClose { n, k } => {
                if *n == 0 {
                    return Err(invalid("n", "board size must be positive"));
                }
                if *k == 0 || k > n {
                    return Err(invalid("k", format!("target must lie in 1..={n}")));
                }
            }
            FamilyParams::RpsDuds { m, n, f }
            | FamilyParams::RandomOrientationRpsDuds { m, n, f } => {
                if *m <= 2 {
                    return Err(invalid("m", "circle needs m > 2 nonduds"));
                }
                validate_permutation(f, m + n)?;
            }
            FamilyParams::TwoTargets {
                n,
                k1,
                k2,
                p1,
                p2,
                r1,
                r2,
            } => {
                if *n < 2 {
                    return Err(invalid("n", "two distinct targets need n >= 2"));
                }
                if *k1 == 0 || k1 > n {
                    return Err(invalid("k1", format!("target must lie in 1..={n}")));
                }
                if *k2 == 0 || k2 > n {
                    return Err(invalid("k2", format!("target must lie in 1..={n}")));
                }
                if k1 == k2 {
                    return Err(invalid("k2", "targets must differ (k1 != k2)"));
                }
                if !(0.0..=1.0).contains(p1) || !(0.0..=1.0).contains(p2) {
                    return Err(invalid("p1", "probabilities must lie in [0, 1]"));
                }
                if (p1 + p2 - 1.0).abs() > 1e-12 {
                    return Err(invalid("p2", format!("p1 + p2 must equal 1 (got {})", p1 + p2)));
                }
                if *r1 <= 0.0 || *r2 <= 0.0 {
                    return Err(invalid("r1", "rewards must be positive"));
                }
                if r1 == r2 {
                    return Err(invalid("r2", "rewards must differ (r1 != r2)"));
                }
            }
            FamilyParams::MpDuds { m, n, duds } => {
                if *m == 0 {
                    return Err(invalid("m", "need at least one nondud (m > 0)"));
                }
                if duds.len() != *n as usize {
                    return Err(invalid(
                        "duds",
                        format!("expected exactly n = {n} duds, got {}", duds.len()),
                    ));
                }
                let total = m + n;
                if let Some(&bad) = duds.iter().find(|&&d| d == 0 || d > total) {
                    return Err(invalid("duds", format!("dud {bad} outside 1..={total}")));
                }
            }
        }
        Ok(())
    }
}

fn validate_permutation(f: &[u32], total: u32) -> Result<(), FamilyError> {
    if f.len() != total as usize {
        return Err(invalid(
            "f",
            format!("permutation must have {total} entries, got {}", f.len()),
        ));
    }
    let mut seen = vec![false; total as usize];
    for &v in f {
        if v == 0 || v > total {
            return Err(invalid("f", format!("entry {v} outside 1..={total}")));
        }
        if seen[v as usize - 1] {
            return Err(invalid("f", format!("entry {v} repeats; f must be a bijection")));
        }
        seen[v as usize - 1] = true;
    }
    Ok(())
}

impl fmt::Display for FamilyParams {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyParams::GetClose { n, k } => write!(out, "get_close(n={n}, k={k})"),
            FamilyParams::RpsDuds { m, n, f } => {
                write!(out, "rps_duds(m={m}, n={n}, f={f:?})")
            }
            FamilyParams::RandomOrientationRpsDuds { m, n, f } => {
                write!(out, "random_orientation_rps_duds(m={m}, n={n}, f={f:?})")
            }
            FamilyParams::TwoTargets {
                n,
                k1,
                k2,
                p1,
                p2,
                r1,
                r2,
            } => write!(
                out,
                "two_targets(n={n}, k1={k1}, k2={k2}, p1={p1}, p2={p2}, r1={r1}, r2={r2})"
            ),
            FamilyParams::MpDuds { m, n, duds } => {
                write!(out, "mp_duds(m={m}, n={n}, duds={duds:?})")
            }
        }
    }
}

/// The public part of a family: everything except the hidden parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilyShape {
    GetClose { n: u32 },
    RpsDuds { m: u32, n: u32 },
    RandomOrientationRpsDuds { m: u32, n: u32 },
    TwoTargets { n: u32, p1: f64, p2: f64, r1: f64, r2: f64 },
    MpDuds { m: u32, n: u32 },
}

impl FamilyShape {
    pub fn of(params: &FamilyParams) -> FamilyShape {
        match params {
            FamilyParams::GetClose { n, .. } => FamilyShape::GetClose { n: *n },
            FamilyParams::RpsDuds { m, n, .. } => FamilyShape::RpsDuds { m: *m, n: *n },
            FamilyParams::RandomOrientationRpsDuds { m, n, .. } => {
                FamilyShape::RandomOrientationRpsDuds { m: *m, n: *n }
            }
            FamilyParams::TwoTargets { n, p1, p2, r1, r2, .. } => FamilyShape::TwoTargets {
                n: *n,
                p1: *p1,
                p2: *p2,
                r1: *r1,
                r2: *r2,
            },
            FamilyParams::MpDuds { m, n, .. } => FamilyShape::MpDuds { m: *m, n: *n },
        }
    }

    /// Every concrete instance with these public parameters.
    pub fn instances(&self) -> Result<Vec<FamilyParams>, FamilyError> {
        use itertools::Itertools;
        let out = match *self {
            FamilyShape::GetClose { n } => (1..=n)
                .map(|k| FamilyParams::GetClose { n, k })
                .collect::<Vec<_>>(),
            FamilyShape::RpsDuds { m, n } => (1..=m + n)
                .permutations((m + n) as usize)
                .map(|f| FamilyParams::RpsDuds { m, n, f })
                .collect(),
            FamilyShape::RandomOrientationRpsDuds { m, n } => (1..=m + n)
                .permutations((m + n) as usize)
                .map(|f| FamilyParams::RandomOrientationRpsDuds { m, n, f })
                .collect(),
            FamilyShape::TwoTargets { n, p1, p2, r1, r2 } => (1..=n)
                .cartesian_product(1..=n)
                .filter(|(k1, k2)| k1 != k2)
                .map(|(k1, k2)| FamilyParams::TwoTargets { n, k1, k2, p1, p2, r1, r2 })
                .collect(),
            FamilyShape::MpDuds { m, n } => (1..=m + n)
                .combinations(n as usize)
                .map(|d| FamilyParams::MpDuds {
                    m,
                    n,
                    duds: d.into_iter().collect(),
                })
                .collect(),
        };
        if out.is_empty() {
            return Err(invalid("family", "no instances (check size parameters)"));
        }
        for p in &out {
            p.validate()?;
        }
        Ok(out)
    }
}

/// Nature's move for one round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NatureDraw {
    None,
    /// +1 keeps the circle's orientation, -1 reverses it.
    Orientation(i8),
    /// Which of the two targets pays this round (1 or 2).
    ActiveTarget(u8),
}

impl fmt::Display for NatureDraw {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NatureDraw::None => write!(out, "none"),
            NatureDraw::Orientation(1) => write!(out, "+1"),
            NatureDraw::Orientation(_) => write!(out, "-1"),
            NatureDraw::ActiveTarget(j) => write!(out, "t{j}"),
        }
    }
}

/// Everything both players observe after a round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundOutcome {
    pub a1: u32,
    pub a2: u32,
    pub nature: NatureDraw,
    pub u1: f64,
    pub u2: f64,
}

/// Get-close scoring: +1 player 1 wins, -1 player 2 wins, 0 draw.
fn closeness_winner(k: u32, a1: u32, a2: u32) -> i32 {
    let d1 = a1.abs_diff(k);
    let d2 = a2.abs_diff(k);
    if d1 < d2 {
        1
    } else if d2 < d1 {
        -1
    } else if a1 == a2 && a1 != k {
        if a1 < k {
            1
        } else {
            -1
        }
    } else {
        0
    }
}

/// Whether circle position `fa` beats `fb` under the given orientation
/// (+1: fa follows fb on the circle of 1..=m; -1: fa precedes fb).
fn circle_beats(fa: u32, fb: u32, m: u32, orientation: i8) -> bool {
    let succ = fb % m + 1;
    let pred = (fb + m - 2) % m + 1;
    match orientation {
        1 => fa == succ,
        _ => fa == pred,
    }
}

fn check_action(a: u32, max: u32) -> Result<(), FamilyError> {
    if a == 0 || a > max {
        return Err(FamilyError::ActionOutOfRange { action: a, max });
    }
    Ok(())
}

/// Apply the family's outcome rule to one round.
pub fn resolve_outcome(
    params: &FamilyParams,
    a1: u32,
    a2: u32,
    nature: NatureDraw,
) -> Result<RoundOutcome, FamilyError> {
    let max = params.actions();
    check_action(a1, max)?;
    check_action(a2, max)?;
    let wrong_nature = || FamilyError::NatureMismatch {
        family: params.family_name(),
        got: nature.to_string(),
    };
    let (u1, u2) = match params {
        FamilyParams::GetClose { k, .. } => {
            if nature != NatureDraw::None {
                return Err(wrong_nature());
            }
            let u1 = f64::from(closeness_winner(*k, a1, a2));
            (u1, -u1)
        }
        FamilyParams::RpsDuds { m, f, .. } => {
            if nature != NatureDraw::None {
                return Err(wrong_nature());
            }
            let u1 = rps_utility(f, *m, a1, a2, 1);
            (u1, -u1)
        }
        FamilyParams::RandomOrientationRpsDuds { m, f, .. } => {
            let NatureDraw::Orientation(o) = nature else {
                return Err(wrong_nature());
            };
            if o != 1 && o != -1 {
                return Err(wrong_nature());
            }
            let u1 = rps_utility(f, *m, a1, a2, o);
            (u1, -u1)
        }
        FamilyParams::TwoTargets { k1, k2, r1, r2, .. } => {
            let NatureDraw::ActiveTarget(j) = nature else {
                return Err(wrong_nature());
            };
            let (k, r) = match j {
                1 => (*k1, *r1),
                2 => (*k2, *r2),
                _ => return Err(wrong_nature()),
            };
            match closeness_winner(k, a1, a2) {
                1 => (r, 0.0),
                -1 => (0.0, r),
                _ => (r / 2.0, r / 2.0),
            }
        }
        FamilyParams::MpDuds { duds, .. } => {
            if nature != NatureDraw::None {
                return Err(wrong_nature());
            }
            let d1 = duds.contains(&a1);
            let d2 = duds.contains(&a2);
            let u1 = if d1 != d2 {
                if d2 { 1.0 } else { 0.0 }
            } else if a1 == a2 {
                0.0
            } else {
                1.0
            };
            (u1, 1.0 - u1)
        }
    };
    Ok(RoundOutcome { a1, a2, nature, u1, u2 })
}

fn rps_utility(f: &[u32], m: u32, a1: u32, a2: u32, orientation: i8) -> f64 {
    let f1 = f[a1 as usize - 1];
    let f2 = f[a2 as usize - 1];
    let dud1 = f1 > m;
    let dud2 = f2 > m;
    if dud1 != dud2 {
        return if dud1 { -1.0 } else { 1.0 };
    }
    if dud1 && dud2 {
        return 0.0;
    }
    if circle_beats(f1, f2, m, orientation) {
        1.0
    } else if circle_beats(f2, f1, m, orientation) {
        -1.0
    } else {
        0.0
    }
}

/// Nature's distribution for the family, as `(draw, probability)` pairs.
pub fn nature_support(params: &FamilyParams) -> Vec<(NatureDraw, f64)> {
    match params {
        FamilyParams::GetClose { .. }
        | FamilyParams::RpsDuds { .. }
        | FamilyParams::MpDuds { .. } => vec![(NatureDraw::None, 1.0)],
        FamilyParams::RandomOrientationRpsDuds { .. } => vec![
            (NatureDraw::Orientation(1), 0.5),
            (NatureDraw::Orientation(-1), 0.5),
        ],
        FamilyParams::TwoTargets { p1, p2, .. } => vec![
            (NatureDraw::ActiveTarget(1), *p1),
            (NatureDraw::ActiveTarget(2), *p2),
        ],
    }
}

pub fn sample_nature<R: Rng>(params: &FamilyParams, rng: &mut R) -> NatureDraw {
    match params {
        FamilyParams::GetClose { .. }
        | FamilyParams::RpsDuds { .. }
        | FamilyParams::MpDuds { .. } => NatureDraw::None,
        FamilyParams::RandomOrientationRpsDuds { .. } => {
            if rng.random::<bool>() {
                NatureDraw::Orientation(1)
            } else {
                NatureDraw::Orientation(-1)
            }
        }
        FamilyParams::TwoTargets { p1, .. } => {
            if rng.random::<f64>() < *p1 {
                NatureDraw::ActiveTarget(1)
            } else {
                NatureDraw::ActiveTarget(2)
            }
        }
    }
}

/// The stage game induced by the family: each cell is the distribution over
/// player 1's utility under Nature's mixture.
pub fn to_stage_game(params: &FamilyParams) -> Result<StageGame, FamilyError> {
    params.validate()?;
    let total = params.actions();
    let support = nature_support(params);
    let constant_sum = match params {
        FamilyParams::GetClose { .. }
        | FamilyParams::RpsDuds { .. }
        | FamilyParams::RandomOrientationRpsDuds { .. } => Some(0.0),
        FamilyParams::MpDuds { .. } => Some(1.0),
        FamilyParams::TwoTargets { .. } => None,
    };
    let mut entries = Vec::with_capacity((total * total) as usize);
    for a1 in 1..=total {
        for a2 in 1..=total {
            if support.len() == 1 {
                let outcome = resolve_outcome(params, a1, a2, support[0].0)?;
                entries.push(PayoffEntry::Deterministic(outcome.u1));
            } else {
                let mut dist: Vec<(f64, f64)> = Vec::with_capacity(support.len());
                for &(draw, q) in &support {
                    let outcome = resolve_outcome(params, a1, a2, draw)?;
                    match dist.iter_mut().find(|(u, _)| *u == outcome.u1) {
                        Some((_, p)) => *p += q,
                        None => dist.push((outcome.u1, q)),
                    }
                }
                entries.push(PayoffEntry::Stochastic(dist));
            }
        }
    }
    StageGame::from_entries(entries, total, constant_sum)
        .map_err(|e| invalid("payoff", e.to_string()))
}

/// The learner's summary of hidden parameters still consistent with what it
/// has seen. Each variant matches one family.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum KnowledgeState {
    /// Remaining candidates for the get-close target, as `{lo..=hi}`.
    Interval { lo: u32, hi: u32 },
    /// Revealed arc of the nondud circle, in successor order, plus whether
    /// the first loss has happened yet.
    Chain { entries: Vec<u32>, first_loss: bool },
    /// A single action known to be a nondud, once beaten by it.
    KnownNondud { action: Option<u32> },
    /// Actions confirmed to be duds.
    DudSet { duds: BTreeSet<u32> },
    /// Remaining candidates for the first target `k1`.
    TargetInterval { lo: u32, hi: u32 },
}

impl KnowledgeState {
    pub fn interval(n: u32) -> Self {
        KnowledgeState::Interval { lo: 1, hi: n }
    }

    pub fn chain() -> Self {
        KnowledgeState::Chain {
            entries: Vec::new(),
            first_loss: false,
        }
    }

    pub fn known_nondud() -> Self {
        KnowledgeState::KnownNondud { action: None }
    }

    pub fn dud_set() -> Self {
        KnowledgeState::DudSet {
            duds: BTreeSet::new(),
        }
    }

    pub fn target_interval(n: u32) -> Self {
        KnowledgeState::TargetInterval { lo: 1, hi: n }
    }
}

fn halve_interval(lo: u32, hi: u32, a1: u32, a2: u32) -> Result<(u32, u32), FamilyError> {
    // A loss places the target strictly on the side of a1 where the
    // opponent played: a2 <= a1 means k < a1, a2 > a1 means k > a1.
    // Intersect with what is already known.
    let (new_lo, new_hi) = if a2 <= a1 {
        (lo, hi.min(a1.saturating_sub(1)))
    } else {
        (lo.max(a1 + 1), hi)
    };
    if new_lo > new_hi {
        return Err(FamilyError::InconsistentObservation(format!(
            "loss at a1={a1}, a2={a2} empties interval {{{lo}..{hi}}}"
        )));
    }
    Ok((new_lo, new_hi))
}

fn collapse_interval(lo: u32, hi: u32, a1: u32, a2: u32) -> Result<(u32, u32), FamilyError> {
    // A draw pins the target to the average of the two actions.
    let sum = a1 + a2;
    if !sum.is_multiple_of(2) {
        return Err(FamilyError::InconsistentObservation(format!(
            "draw at a1={a1}, a2={a2} has no integer midpoint"
        )));
    }
    let k = sum / 2;
    if k < lo || k > hi {
        return Err(FamilyError::InconsistentObservation(format!(
            "draw midpoint {k} outside interval {{{lo}..{hi}}}"
        )));
    }
    Ok((k, k))
}

/// Apply one observation to a knowledge state, returning the minimal
/// consistent refinement. Wins never change any state; each variant refines
/// only on the events its family's learner is entitled to use.
pub fn update_knowledge(
    state: &KnowledgeState,
    obs: &RoundOutcome,
) -> Result<KnowledgeState, FamilyError> {
    match state {
        KnowledgeState::Interval { lo, hi } => {
            if obs.u1 < 0.0 {
                let (lo, hi) = halve_interval(*lo, *hi, obs.a1, obs.a2)?;
                Ok(KnowledgeState::Interval { lo, hi })
            } else if obs.u1 == 0.0 {
                let (lo, hi) = collapse_interval(*lo, *hi, obs.a1, obs.a2)?;
                Ok(KnowledgeState::Interval { lo, hi })
            } else {
                Ok(state.clone())
            }
        }
        KnowledgeState::Chain { entries, .. } => {
            if obs.u1 >= 0.0 {
                return Ok(state.clone());
            }
            // Only a win by the opponent reveals circle structure: the first
            // winning action must be a nondud, and a win against the chain's
            // tail reveals the tail's successor.
            let mut entries = entries.clone();
            if entries.is_empty()
                || (entries.last() == Some(&obs.a1) && !entries.contains(&obs.a2))
            {
                entries.push(obs.a2);
            }
            Ok(KnowledgeState::Chain {
                entries,
                first_loss: true,
            })
        }
        KnowledgeState::KnownNondud { action } => {
            if obs.u1 < 0.0 && action.is_none() {
                Ok(KnowledgeState::KnownNondud {
                    action: Some(obs.a2),
                })
            } else {
                Ok(state.clone())
            }
        }
        KnowledgeState::DudSet { duds } => {
            // Losing with distinct actions is only possible when a1 was a
            // dud and a2 was not; same-action losses reveal nothing.
            if obs.u1 == 0.0 && obs.a1 != obs.a2 {
                let mut duds = duds.clone();
                duds.insert(obs.a1);
                Ok(KnowledgeState::DudSet { duds })
            } else {
                Ok(state.clone())
            }
        }
        KnowledgeState::TargetInterval { lo, hi } => {
            if obs.nature != NatureDraw::ActiveTarget(1) {
                return Ok(state.clone());
            }
            let lost = obs.u1 == 0.0 && obs.u2 > 0.0;
            let drew = obs.u1 > 0.0 && obs.u1 == obs.u2;
            if lost {
                let (lo, hi) = halve_interval(*lo, *hi, obs.a1, obs.a2)?;
                Ok(KnowledgeState::TargetInterval { lo, hi })
            } else if drew {
                let (lo, hi) = collapse_interval(*lo, *hi, obs.a1, obs.a2)?;
                Ok(KnowledgeState::TargetInterval { lo, hi })
            } else {
                Ok(state.clone())
            }
        }
    }
}

/// Whether the hidden parameters remain consistent with a knowledge state.
/// The simulator never produces inconsistent states; this is the test hook
/// that proves it.
pub fn knowledge_consistent(params: &FamilyParams, state: &KnowledgeState) -> bool {
    match (params, state) {
        (FamilyParams::GetClose { k, .. }, KnowledgeState::Interval { lo, hi }) => {
            lo <= k && k <= hi
        }
        (FamilyParams::RpsDuds { m, f, .. }, KnowledgeState::Chain { entries, .. })
        | (
            FamilyParams::RandomOrientationRpsDuds { m, f, .. },
            KnowledgeState::Chain { entries, .. },
        ) => {
            entries.iter().all(|&a| f[a as usize - 1] <= *m)
                && entries.windows(2).all(|w| {
                    circle_beats(f[w[1] as usize - 1], f[w[0] as usize - 1], *m, 1)
                })
        }
        (
            FamilyParams::RandomOrientationRpsDuds { m, f, .. },
            KnowledgeState::KnownNondud { action },
        ) => action.is_none_or(|a| f[a as usize - 1] <= *m),
        (FamilyParams::MpDuds { duds, .. }, KnowledgeState::DudSet { duds: known }) => {
            known.is_subset(duds)
        }
        (FamilyParams::TwoTargets { k1, .. }, KnowledgeState::TargetInterval { lo, hi }) => {
            lo <= k1 && k1 <= hi
        }
        _ => false,
    }
}
