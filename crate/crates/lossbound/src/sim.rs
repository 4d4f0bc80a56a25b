//! Repeated-game episodes: seeded round loops, per-round loss and epoch
//! accounting, Monte Carlo estimation, and trace export.
//!
//! Within a round the learner's mixed strategy is sampled first; the
//! opponent conditions only on past rounds plus its knowledge of the
//! learner's strategy, never on the current realized action.

use std::io::{self, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::families::{
    resolve_outcome, sample_nature, to_stage_game, FamilyError, FamilyParams, NatureDraw,
};
use crate::learners::{LearnerError, LearnerMachine, LearnerSpec};
use crate::opponents::{Caps, OpponentContext, OpponentError, OpponentPolicy, OpponentSpec};
use crate::stage_game::{solve_maximin, GameError, StageGame};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("horizon must be at least 1")]
    EmptyHorizon,
    #[error("monte carlo needs at least 2 episodes")]
    TooFewEpisodes,
    #[error("nature script is shorter ({got}) than the horizon ({want})")]
    ShortNatureScript { want: u32, got: usize },
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Learner(#[from] LearnerError),
    #[error(transparent)]
    Opponent(#[from] OpponentError),
    #[error("stage game: {0}")]
    Game(String),
}

impl From<GameError> for SimError {
    fn from(e: GameError) -> Self {
        SimError::Game(e.to_string())
    }
}

/// One round's record. `epoch` is the epoch the round was played in;
/// `learned` reports whether the learner had learned by the end of the
/// round (after observing the outcome).
#[derive(Debug, Clone, Serialize)]
pub struct TraceRow {
    pub round: u32,
    pub a1: u32,
    pub a2: u32,
    pub nature: NatureDraw,
    pub u1: f64,
    pub loss: f64,
    pub cum_loss: f64,
    pub epoch: u32,
    pub learned: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceHeader {
    pub family: FamilyParams,
    pub learner: LearnerSpec,
    pub opponent: OpponentSpec,
    pub rounds: u32,
    pub seed: u64,
    /// Game value of the true stage game (player 1's maximin utility).
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Trace {
    pub header: TraceHeader,
    pub rows: Vec<TraceRow>,
}

impl Trace {
    pub fn cumulative_loss(&self) -> f64 {
        self.rows.last().map_or(0.0, |r| r.cum_loss)
    }

    /// Cumulative loss at the first round whose observation completed
    /// learning, if any.
    pub fn loss_at_learning(&self) -> Option<f64> {
        self.rows.iter().find(|r| r.learned).map(|r| r.cum_loss)
    }
}

/// Write traces as CSV with one row per round, preceded by a header line.
pub fn write_traces_csv<W: Write>(traces: &[Trace], mut out: W) -> io::Result<()> {
    writeln!(
        out,
        "episode,round,a1,a2,nature,u1,loss,cum_loss,epoch,learned"
    )?;
    for (episode, trace) in traces.iter().enumerate() {
        for r in &trace.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                episode, r.round, r.a1, r.a2, r.nature, r.u1, r.loss, r.cum_loss, r.epoch,
                r.learned
            )?;
        }
    }
    Ok(())
}

/// Mean cumulative loss over independent episodes, with its standard error.
#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub episodes: u32,
    pub rounds: u32,
    pub seed: u64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based seed split: episode `i` of a run is reproducible in
/// isolation from `(master, i)` alone.
pub fn episode_seed(master: u64, episode: u64) -> u64 {
    splitmix64(splitmix64(master) ^ splitmix64(episode.wrapping_add(1)))
}

/// A configured (family, learner, opponent, horizon) quadruple with its
/// solved stage game and any precomputed opponent tables. Episodes can then
/// be run cheaply and in parallel.
pub struct Simulation {
    params: FamilyParams,
    learner: LearnerSpec,
    opponent: OpponentSpec,
    policy: OpponentPolicy,
    game: StageGame,
    value: f64,
    rounds: u32,
}

impl Simulation {
    pub fn new(
        params: &FamilyParams,
        learner: &LearnerSpec,
        opponent: &OpponentSpec,
        rounds: u32,
        caps: &Caps,
    ) -> Result<Self, SimError> {
        if rounds == 0 {
            return Err(SimError::EmptyHorizon);
        }
        params.validate()?;
        // Fail early on incompatible learner/family pairs.
        LearnerMachine::new(learner, params)?;
        let game = to_stage_game(params)?.expected_matrix();
        let value = solve_maximin(&game)?.value;
        let policy = OpponentPolicy::build(opponent, params, learner, rounds, caps)?;
        Ok(Simulation {
            params: params.clone(),
            learner: learner.clone(),
            opponent: opponent.clone(),
            policy,
            game,
            value,
            rounds,
        })
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn run_episode(&self, seed: u64) -> Result<Trace, SimError> {
        self.run(seed, None)
    }

    /// Run with Nature's draws forced from a script instead of sampled;
    /// used to demonstrate adversarial Nature.
    pub fn run_episode_with_nature(
        &self,
        seed: u64,
        script: &[NatureDraw],
    ) -> Result<Trace, SimError> {
        if script.len() < self.rounds as usize {
            return Err(SimError::ShortNatureScript {
                want: self.rounds,
                got: script.len(),
            });
        }
        self.run(seed, Some(script))
    }

    fn run(&self, seed: u64, nature_script: Option<&[NatureDraw]>) -> Result<Trace, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut learner = LearnerMachine::new(&self.learner, &self.params)?;
        let mut rows = Vec::with_capacity(self.rounds as usize);
        let mut cum = 0.0;
        for round in 0..self.rounds {
            let epoch = learner.epoch();
            let a1 = learner.strategy().sample(&mut rng);
            let ctx = OpponentContext {
                params: &self.params,
                game: &self.game,
                value: self.value,
                learner: &learner,
                round,
                horizon: self.rounds,
            };
            let a2 = self.policy.act(&ctx, &mut rng)?;
            let nature = match nature_script {
                Some(script) => script[round as usize],
                None => sample_nature(&self.params, &mut rng),
            };
            let outcome = resolve_outcome(&self.params, a1, a2, nature)?;
            let loss = self.value - outcome.u1;
            cum += loss;
            learner.observe(&outcome)?;
            rows.push(TraceRow {
                round,
                a1,
                a2,
                nature,
                u1: outcome.u1,
                loss,
                cum_loss: cum,
                epoch,
                learned: learner.learned(),
            });
        }
        Ok(Trace {
            header: TraceHeader {
                family: self.params.clone(),
                learner: self.learner.clone(),
                opponent: self.opponent.clone(),
                rounds: self.rounds,
                seed,
                value: self.value,
            },
            rows,
        })
    }

    /// Final cumulative loss of one episode, without building a trace.
    fn episode_loss(&self, seed: u64) -> Result<f64, SimError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut learner = LearnerMachine::new(&self.learner, &self.params)?;
        let mut cum = 0.0;
        for round in 0..self.rounds {
            let a1 = learner.strategy().sample(&mut rng);
            let ctx = OpponentContext {
                params: &self.params,
                game: &self.game,
                value: self.value,
                learner: &learner,
                round,
                horizon: self.rounds,
            };
            let a2 = self.policy.act(&ctx, &mut rng)?;
            let nature = sample_nature(&self.params, &mut rng);
            let outcome = resolve_outcome(&self.params, a1, a2, nature)?;
            cum += self.value - outcome.u1;
            learner.observe(&outcome)?;
        }
        Ok(cum)
    }

    /// Estimate expected cumulative loss over independent seeded episodes.
    /// Episodes run in parallel; aggregation order is fixed by episode index.
    pub fn monte_carlo(&self, episodes: u32, seed: u64) -> Result<MonteCarloEstimate, SimError> {
        if episodes < 2 {
            return Err(SimError::TooFewEpisodes);
        }
        let losses: Vec<f64> = (0..u64::from(episodes))
            .into_par_iter()
            .map(|i| self.episode_loss(episode_seed(seed, i)))
            .collect::<Result<_, _>>()?;
        let n = f64::from(episodes);
        let mean = losses.iter().sum::<f64>() / n;
        let var = losses.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(MonteCarloEstimate {
            mean,
            std_error: (var / n).sqrt(),
            episodes,
            rounds: self.rounds,
            seed,
        })
    }
}

/// Run one episode end to end.
pub fn run_episode(
    params: &FamilyParams,
    learner: &LearnerSpec,
    opponent: &OpponentSpec,
    rounds: u32,
    seed: u64,
) -> Result<Trace, SimError> {
    Simulation::new(params, learner, opponent, rounds, &Caps::default())?.run_episode(seed)
}

/// Estimate the expected cumulative loss over `episodes` independent runs.
pub fn monte_carlo_loss(
    params: &FamilyParams,
    learner: &LearnerSpec,
    opponent: &OpponentSpec,
    rounds: u32,
    episodes: u32,
    seed: u64,
) -> Result<MonteCarloEstimate, SimError> {
    Simulation::new(params, learner, opponent, rounds, &Caps::default())?
        .monte_carlo(episodes, seed)
}
