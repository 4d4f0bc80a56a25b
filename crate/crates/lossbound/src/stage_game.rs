//! Finite zero-sum stage games: representation, exact maximin solving,
//! exploitability, and best responses.
//!
//! Payoffs are stored as player-1 utilities only. Player 2's utility is
//! reconstructed from the game's declared constant sum when one exists
//! (`u2 = c - u1`); games without a constant sum are treated as strictly
//! adversarial on `u1` wherever a player-2 objective is needed.
//!
//! Actions are 1-indexed throughout.

use rand::{Rng, RngExt};
use thiserror::Error;

/// Numerical tolerance on game values and strategy guarantees.
pub const VALUE_TOLERANCE: f64 = 1e-9;
/// Tolerance on probability normalization.
pub const PROB_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum GameError {
    #[error("action sets must be nonempty")]
    EmptyActionSet,
    #[error("payoff matrix is ragged or does not match the declared action counts")]
    BadShape,
    #[error("strategy has {got} entries, expected {want}")]
    DimensionMismatch { want: usize, got: usize },
    #[error("probabilities must be finite, nonnegative and sum to 1 (sum = {sum})")]
    BadDistribution { sum: f64 },
    #[error("maximin solver failed to converge")]
    NotConverged,
}

/// A probability distribution over one player's actions (1-indexed).
#[derive(Debug, Clone, PartialEq)]
pub struct MixedStrategy {
    probs: Vec<f64>,
}

impl MixedStrategy {
    pub fn new(probs: Vec<f64>) -> Result<Self, GameError> {
        if probs.is_empty() {
            return Err(GameError::EmptyActionSet);
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(GameError::BadDistribution { sum: f64::NAN });
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOLERANCE {
            return Err(GameError::BadDistribution { sum });
        }
        Ok(Self { probs })
    }

    /// Point mass on `action` out of `num_actions`.
    pub fn pure(action: u32, num_actions: u32) -> Self {
        assert!(action >= 1 && action <= num_actions);
        let mut probs = vec![0.0; num_actions as usize];
        probs[action as usize - 1] = 1.0;
        Self { probs }
    }

    pub fn uniform(num_actions: u32) -> Self {
        assert!(num_actions >= 1);
        Self {
            probs: vec![1.0 / f64::from(num_actions); num_actions as usize],
        }
    }

    /// Uniform over the given subset of `1..=num_actions`.
    pub fn uniform_over(actions: &[u32], num_actions: u32) -> Self {
        assert!(!actions.is_empty());
        let mut probs = vec![0.0; num_actions as usize];
        let p = 1.0 / actions.len() as f64;
        for &a in actions {
            assert!(a >= 1 && a <= num_actions);
            probs[a as usize - 1] = p;
        }
        Self { probs }
    }

    pub fn num_actions(&self) -> u32 {
        self.probs.len() as u32
    }

    pub fn prob(&self, action: u32) -> f64 {
        self.probs[action as usize - 1]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Actions with positive probability, as `(action, prob)` pairs.
    pub fn support(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (i as u32 + 1, *p))
    }

    /// The single supported action, if the strategy is pure.
    pub fn as_pure(&self) -> Option<u32> {
        let mut it = self.support();
        match (it.next(), it.next()) {
            (Some((a, _)), None) => Some(a),
            _ => None,
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> u32 {
        if let Some(a) = self.as_pure() {
            return a;
        }
        let x: f64 = rng.random();
        let mut acc = 0.0;
        for (i, p) in self.probs.iter().enumerate() {
            acc += p;
            if x < acc {
                return i as u32 + 1;
            }
        }
        self.probs.len() as u32
    }
}

/// One cell of a payoff matrix: player 1's utility, possibly drawn by Nature.
#[derive(Debug, Clone, PartialEq)]
pub enum PayoffEntry {
    Deterministic(f64),
    /// Finite distribution as `(utility, probability)` pairs.
    Stochastic(Vec<(f64, f64)>),
}

impl PayoffEntry {
    pub fn expected(&self) -> f64 {
        match self {
            PayoffEntry::Deterministic(u) => *u,
            PayoffEntry::Stochastic(d) => d.iter().map(|(u, p)| u * p).sum(),
        }
    }

    fn validate(&self) -> Result<(), GameError> {
        match self {
            PayoffEntry::Deterministic(u) => {
                if !u.is_finite() {
                    return Err(GameError::BadDistribution { sum: f64::NAN });
                }
            }
            PayoffEntry::Stochastic(d) => {
                if d.is_empty() || d.iter().any(|(u, p)| !u.is_finite() || *p < 0.0) {
                    return Err(GameError::BadDistribution { sum: f64::NAN });
                }
                let sum: f64 = d.iter().map(|(_, p)| p).sum();
                if (sum - 1.0).abs() > PROB_TOLERANCE {
                    return Err(GameError::BadDistribution { sum });
                }
            }
        }
        Ok(())
    }
}

/// A finite two-player zero-sum stage game over player-1 utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct StageGame {
    actions1: u32,
    actions2: u32,
    entries: Vec<PayoffEntry>, // row-major: (a1-1) * actions2 + (a2-1)
    constant_sum: Option<f64>,
}

impl StageGame {
    pub fn deterministic(rows: Vec<Vec<f64>>, constant_sum: Option<f64>) -> Result<Self, GameError> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(GameError::EmptyActionSet);
        }
        let ncols = rows[0].len();
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(GameError::BadShape);
        }
        let entries = rows
            .into_iter()
            .flatten()
            .map(PayoffEntry::Deterministic)
            .collect();
        Self::from_entries(entries, ncols as u32, constant_sum)
    }

    /// Build from row-major entries; `actions2` is the number of columns.
    pub fn from_entries(
        entries: Vec<PayoffEntry>,
        actions2: u32,
        constant_sum: Option<f64>,
    ) -> Result<Self, GameError> {
        if entries.is_empty() || actions2 == 0 {
            return Err(GameError::EmptyActionSet);
        }
        if !entries.len().is_multiple_of(actions2 as usize) {
            return Err(GameError::BadShape);
        }
        for e in &entries {
            e.validate()?;
        }
        let actions1 = (entries.len() / actions2 as usize) as u32;
        Ok(Self {
            actions1,
            actions2,
            entries,
            constant_sum,
        })
    }

    pub fn actions1(&self) -> u32 {
        self.actions1
    }

    pub fn actions2(&self) -> u32 {
        self.actions2
    }

    pub fn constant_sum(&self) -> Option<f64> {
        self.constant_sum
    }

    pub fn entry(&self, a1: u32, a2: u32) -> &PayoffEntry {
        &self.entries[(a1 as usize - 1) * self.actions2 as usize + (a2 as usize - 1)]
    }

    pub fn expected_payoff(&self, a1: u32, a2: u32) -> f64 {
        self.entry(a1, a2).expected()
    }

    pub fn is_deterministic(&self) -> bool {
        self.entries
            .iter()
            .all(|e| matches!(e, PayoffEntry::Deterministic(_)))
    }

    /// Reduce every stochastic entry to its expectation. Valid for solving
    /// because both players commit to strategies before Nature moves.
    pub fn expected_matrix(&self) -> StageGame {
        StageGame {
            actions1: self.actions1,
            actions2: self.actions2,
            entries: self
                .entries
                .iter()
                .map(|e| PayoffEntry::Deterministic(e.expected()))
                .collect(),
            constant_sum: self.constant_sum,
        }
    }

    /// Player 1's expected payoff when playing `s1` against pure column `a2`.
    pub fn payoff_vs_column(&self, s1: &MixedStrategy, a2: u32) -> Result<f64, GameError> {
        if s1.num_actions() != self.actions1 {
            return Err(GameError::DimensionMismatch {
                want: self.actions1 as usize,
                got: s1.num_actions() as usize,
            });
        }
        Ok(s1
            .support()
            .map(|(a1, p)| p * self.expected_payoff(a1, a2))
            .sum())
    }

    /// Player 1's expected payoff when playing pure row `a1` against `s2`.
    pub fn payoff_vs_row(&self, a1: u32, s2: &MixedStrategy) -> Result<f64, GameError> {
        if s2.num_actions() != self.actions2 {
            return Err(GameError::DimensionMismatch {
                want: self.actions2 as usize,
                got: s2.num_actions() as usize,
            });
        }
        Ok(s2
            .support()
            .map(|(a2, p)| p * self.expected_payoff(a1, a2))
            .sum())
    }

    /// Player 1's guaranteed expected payoff under `s1`: the minimum over
    /// player 2's pure actions.
    pub fn worst_case_payoff(&self, s1: &MixedStrategy) -> Result<f64, GameError> {
        (1..=self.actions2)
            .map(|a2| self.payoff_vs_column(s1, a2))
            .try_fold(f64::INFINITY, |acc, v| v.map(|v| acc.min(v)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

/// Value and maximin strategies of a zero-sum stage game.
#[derive(Debug, Clone)]
pub struct SolveResult {
    /// Player 1's equilibrium expected utility.
    pub value: f64,
    pub strategy1: MixedStrategy,
    pub strategy2: MixedStrategy,
}

/// Compute the value and a maximin strategy pair, exact up to
/// [`VALUE_TOLERANCE`]. Stochastic entries are reduced to expectations first.
pub fn solve_maximin(game: &StageGame) -> Result<SolveResult, GameError> {
    let m = game.actions1 as usize;
    let n = game.actions2 as usize;
    let mut a = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            a[i * n + j] = game.expected_payoff(i as u32 + 1, j as u32 + 1);
        }
    }
    let (value, s1, s2) = solve_matrix(&a, m, n)?;
    let result = SolveResult {
        value,
        strategy1: MixedStrategy::new(s1).map_err(|_| GameError::NotConverged)?,
        strategy2: MixedStrategy::new(s2).map_err(|_| GameError::NotConverged)?,
    };
    // Verify both guarantees before handing the result out.
    let worst1 = game.worst_case_payoff(&result.strategy1)?;
    if worst1 < value - VALUE_TOLERANCE {
        return Err(GameError::NotConverged);
    }
    let best_against2 = (1..=game.actions1())
        .map(|a1| game.payoff_vs_row(a1, &result.strategy2))
        .try_fold(f64::NEG_INFINITY, |acc, v| v.map(|v| acc.max(v)))?;
    if best_against2 > value + VALUE_TOLERANCE {
        return Err(GameError::NotConverged);
    }
    Ok(result)
}

/// The gap between the game value and what `s1` guarantees. Zero (up to
/// tolerance) exactly when `s1` is maximin; never meaningfully negative.
pub fn exploitability(game: &StageGame, s1: &MixedStrategy) -> Result<f64, GameError> {
    let value = solve_maximin(game)?.value;
    Ok(value - game.worst_case_payoff(s1)?)
}

/// Pure action maximizing the responder's expected payoff against `s`,
/// together with that payoff. Ties break toward the lowest action index.
///
/// For player 2 the responder payoff is `c - u1` under a declared constant
/// sum `c`, and `-u1` otherwise.
pub fn best_response(
    game: &StageGame,
    s: &MixedStrategy,
    responder: Player,
) -> Result<(u32, f64), GameError> {
    let c = game.constant_sum.unwrap_or(0.0);
    let count = match responder {
        Player::One => game.actions1,
        Player::Two => game.actions2,
    };
    let mut best: Option<(u32, f64)> = None;
    for a in 1..=count {
        let v = match responder {
            Player::One => game.payoff_vs_row(a, s)?,
            Player::Two => c - game.payoff_vs_column(s, a)?,
        };
        match best {
            Some((_, bv)) if v <= bv => {}
            _ => best = Some((a, v)),
        }
    }
    best.ok_or(GameError::EmptyActionSet)
}

/// Dense matrix-game pivot solver.
///
/// The matrix is shifted so every entry is >= 1 (the shifted value is then
/// strictly positive), bordered, and pivoted until the bottom row is
/// nonnegative; both players' strategies are read off the final labels.
fn solve_matrix(a: &[f64], m: usize, n: usize) -> Result<(f64, Vec<f64>, Vec<f64>), GameError> {
    let min = a.iter().cloned().fold(f64::INFINITY, f64::min);
    let shift = 1.0 - min;
    let cols = n + 1;
    let rows = m + 1;
    let mut t = vec![0.0; rows * cols];
    for i in 0..m {
        for j in 0..n {
            t[i * cols + j] = a[i * n + j] + shift;
        }
        t[i * cols + n] = 1.0;
    }
    for j in 0..n {
        t[m * cols + j] = -1.0;
    }
    let mut d = 1.0;
    let mut left: Vec<Option<usize>> = (0..m).map(Some).collect();
    let mut top: Vec<Option<usize>> = (0..n).map(Some).collect();
    let mut right: Vec<Option<usize>> = vec![None; m];
    let mut bottom: Vec<Option<usize>> = vec![None; n];

    let bland_after = 200 + 8 * (m + n);
    let max_iters = 10_000 + 64 * (m + n);
    let mut iter = 0;
    loop {
        // Entering column: most negative bottom entry; switch to Bland's
        // lowest-index rule if the run is long enough to suspect cycling.
        let mut col = None;
        if iter < bland_after {
            let mut best = -PROB_TOLERANCE;
            for j in 0..n {
                let v = t[m * cols + j];
                if v < best {
                    best = v;
                    col = Some(j);
                }
            }
        } else {
            col = (0..n).find(|&j| t[m * cols + j] < -PROB_TOLERANCE);
        }
        let Some(c) = col else { break };
        let mut row = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            let p = t[i * cols + c];
            if p > PROB_TOLERANCE {
                let ratio = t[i * cols + n] / p;
                if ratio < best_ratio {
                    best_ratio = ratio;
                    row = Some(i);
                }
            }
        }
        let Some(r) = row else {
            return Err(GameError::NotConverged);
        };
        let p = t[r * cols + c];
        for i in 0..rows {
            if i == r {
                continue;
            }
            for j in 0..cols {
                if j == c {
                    continue;
                }
                t[i * cols + j] = (t[i * cols + j] * p - t[i * cols + c] * t[r * cols + j]) / d;
            }
        }
        for i in 0..rows {
            if i != r {
                t[i * cols + c] = -t[i * cols + c];
            }
        }
        t[r * cols + c] = d;
        d = p;
        std::mem::swap(&mut left[r], &mut bottom[c]);
        std::mem::swap(&mut right[r], &mut top[c]);

        iter += 1;
        if iter > max_iters {
            return Err(GameError::NotConverged);
        }
    }

    let corner = t[m * cols + n];
    if corner <= 0.0 || d <= 0.0 {
        return Err(GameError::NotConverged);
    }
    let value = d / corner - shift;

    // Row-player weights surface in the bottom margins (slots labeled by
    // former row names); column-player weights in the right margins.
    let mut s1 = vec![0.0; m];
    for j in 0..n {
        if let Some(s) = bottom[j] {
            s1[s] = t[m * cols + j].max(0.0);
        }
    }
    let mut s2 = vec![0.0; n];
    for i in 0..m {
        if let Some(s) = right[i] {
            s2[s] = t[i * cols + n].max(0.0);
        }
    }
    Ok((value, normalize(s1)?, normalize(s2)?))
}

/// Renormalize so the entries sum to exactly 1, absorbing float residue
/// into the largest entry.
fn normalize(mut v: Vec<f64>) -> Result<Vec<f64>, GameError> {
    let sum: f64 = v.iter().sum();
    if sum <= 0.0 {
        return Err(GameError::NotConverged);
    }
    for x in v.iter_mut() {
        *x /= sum;
    }
    let residue = 1.0 - v.iter().sum::<f64>();
    if residue != 0.0 {
        let imax = v
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap();
        v[imax] += residue;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn det(rows: Vec<Vec<f64>>) -> StageGame {
        StageGame::deterministic(rows, None).unwrap()
    }

    /// Independent 2x2 oracle: pure saddle points by enumeration, else the
    /// closed-form mixed solution.
    fn oracle_2x2(a: [[f64; 2]; 2]) -> (f64, [f64; 2]) {
        for i in 0..2 {
            for j in 0..2 {
                let row_min_at = a[i][j] <= a[i][1 - j];
                let col_max_at = a[i][j] >= a[1 - i][j];
                if row_min_at && col_max_at {
                    let mut s = [0.0, 0.0];
                    s[i] = 1.0;
                    return (a[i][j], s);
                }
            }
        }
        let denom = a[0][0] - a[0][1] - a[1][0] + a[1][1];
        let p = (a[1][1] - a[1][0]) / denom;
        let value = (a[0][0] * a[1][1] - a[0][1] * a[1][0]) / denom;
        (value, [p, 1.0 - p])
    }

    #[test]
    fn matching_pennies_solves_exactly() {
        let g = det(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let r = solve_maximin(&g).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.strategy1.probs(), &[0.5, 0.5]);
        assert_eq!(r.strategy2.probs(), &[0.5, 0.5]);
    }

    #[test]
    fn classic_rps_is_uniform_value_zero() {
        let g = det(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ]);
        let r = solve_maximin(&g).unwrap();
        assert!(r.value.abs() < VALUE_TOLERANCE);
        for p in r.strategy1.probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_by_two_matches_support_enumeration_oracle() {
        let a = [[3.0, 1.0], [1.0, 2.0]];
        let (ov, os) = oracle_2x2(a);
        assert!((ov - 5.0 / 3.0).abs() < 1e-12);
        assert!((os[0] - 1.0 / 3.0).abs() < 1e-12);

        let g = det(vec![a[0].to_vec(), a[1].to_vec()]);
        let r = solve_maximin(&g).unwrap();
        assert!((r.value - ov).abs() < VALUE_TOLERANCE);
        assert!((r.strategy1.prob(1) - os[0]).abs() < VALUE_TOLERANCE);
        assert!((r.strategy1.prob(2) - os[1]).abs() < VALUE_TOLERANCE);
    }

    #[test]
    fn rejects_empty_and_ragged() {
        assert_eq!(
            StageGame::deterministic(vec![], None).unwrap_err(),
            GameError::EmptyActionSet
        );
        assert_eq!(
            StageGame::deterministic(vec![vec![1.0], vec![1.0, 2.0]], None).unwrap_err(),
            GameError::BadShape
        );
    }

    #[test]
    fn expected_matrix_is_identity_on_deterministic() {
        let g = det(vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
        assert_eq!(g.expected_matrix(), g);
    }

    #[test]
    fn expected_matrix_takes_means() {
        let fair = PayoffEntry::Stochastic(vec![(1.0, 0.5), (-1.0, 0.5)]);
        let g = StageGame::from_entries(
            vec![fair, PayoffEntry::Deterministic(0.25)],
            2,
            Some(0.0),
        )
        .unwrap();
        let e = g.expected_matrix();
        assert_eq!(e.expected_payoff(1, 1), 0.0);
        assert_eq!(e.expected_payoff(1, 2), 0.25);
    }

    #[test]
    fn exploitability_of_maximin_is_zero() {
        let g = det(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let e = exploitability(&g, &MixedStrategy::uniform(2)).unwrap();
        assert!(e.abs() < VALUE_TOLERANCE);
    }

    #[test]
    fn exploitability_of_pure_action_in_matching_pennies() {
        // Opponent best response matches; enumerate both opponent actions.
        let g = det(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        let s = MixedStrategy::pure(1, 2);
        let worst = (1..=2)
            .map(|a2| g.payoff_vs_column(&s, a2).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert_eq!(worst, 0.0);
        assert!((exploitability(&g, &s).unwrap() - 0.5).abs() < VALUE_TOLERANCE);
    }

    #[test]
    fn exploitability_rejects_dimension_mismatch() {
        let g = det(vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        assert!(matches!(
            exploitability(&g, &MixedStrategy::uniform(3)),
            Err(GameError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn best_response_breaks_ties_low() {
        // RPS vs uniform: all responses tie at 0; lowest index wins.
        let g = det(vec![
            vec![0.0, -1.0, 1.0],
            vec![1.0, 0.0, -1.0],
            vec![-1.0, 1.0, 0.0],
        ]);
        let (a, v) = best_response(&g, &MixedStrategy::uniform(3), Player::Two).unwrap();
        assert_eq!(a, 1);
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn best_response_in_matching_pennies() {
        // Player 1 always plays 1; matching wins for player 2 (u2 = 1 - u1).
        let g = StageGame::deterministic(
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            Some(1.0),
        )
        .unwrap();
        let (a, v) = best_response(&g, &MixedStrategy::pure(1, 2), Player::Two).unwrap();
        assert_eq!(a, 1);
        assert_eq!(v, 1.0);
    }

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
        (0..m)
            .map(|_| (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect())
            .collect()
    }

    #[test]
    fn hundred_random_4x4_games_have_tight_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for _ in 0..100 {
            let rows = random_matrix(&mut rng, 4, 4);
            let g = det(rows);
            let r = solve_maximin(&g).unwrap();
            let e = r.value - g.worst_case_payoff(&r.strategy1).unwrap();
            assert!(e <= VALUE_TOLERANCE, "exploitability {e} too large");
        }
    }

    #[test]
    fn duality_on_random_games() {
        // Negating and transposing swaps the players' roles.
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let rows = random_matrix(&mut rng, 4, 4);
            let g = det(rows.clone());
            let mut tr = vec![vec![0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    tr[j][i] = -rows[i][j];
                }
            }
            let gt = det(tr);
            let v = solve_maximin(&g).unwrap().value;
            let vt = solve_maximin(&gt).unwrap().value;
            assert!((v + vt).abs() < VALUE_TOLERANCE);
        }
    }

    #[test]
    fn exploitability_invariant_under_column_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..20 {
            let rows = random_matrix(&mut rng, 3, 4);
            let perm = [2usize, 0, 3, 1];
            let permuted: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| perm.iter().map(|&j| r[j]).collect())
                .collect();
            let s = MixedStrategy::new(vec![0.2, 0.5, 0.3]).unwrap();
            let e1 = exploitability(&det(rows), &s).unwrap();
            let e2 = exploitability(&det(permuted), &s).unwrap();
            assert!((e1 - e2).abs() < VALUE_TOLERANCE);
        }
    }

    #[test]
    fn mixed_strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(matches!(
            MixedStrategy::new(vec![0.5, 0.6]),
            Err(GameError::BadDistribution { .. })
        ));
        assert!(matches!(
            MixedStrategy::new(vec![-0.1, 1.1]),
            Err(GameError::BadDistribution { .. })
        ));
        assert_eq!(MixedStrategy::pure(2, 3).as_pure(), Some(2));
        assert_eq!(MixedStrategy::uniform(3).as_pure(), None);
    }

    #[test]
    fn sampling_respects_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = MixedStrategy::uniform_over(&[1, 3], 3);
        for _ in 0..200 {
            let a = s.sample(&mut rng);
            assert!(a == 1 || a == 3);
        }
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn matrix() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
            ((2usize..=6), (2usize..=6)).prop_flat_map(|(m, n)| {
                prop::collection::vec(-1.0f64..1.0, m * n).prop_map(move |v| (m, n, v))
            })
        }

        proptest! {
            /// Both returned strategies meet the value they promise, and
            /// negating-and-transposing flips the value's sign.
            #[test]
            fn solver_is_tight_and_self_dual((m, n, cells) in matrix()) {
                let rows: Vec<Vec<f64>> =
                    cells.chunks(n).map(<[f64]>::to_vec).collect();
                let g = StageGame::deterministic(rows.clone(), None).unwrap();
                let r = solve_maximin(&g).unwrap();
                let worst = g.worst_case_payoff(&r.strategy1).unwrap();
                prop_assert!(r.value - worst <= VALUE_TOLERANCE);
                let best = (1..=g.actions1())
                    .map(|a1| g.payoff_vs_row(a1, &r.strategy2).unwrap())
                    .fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(best - r.value <= VALUE_TOLERANCE);

                let mut negated = vec![vec![0.0; m]; n];
                for (i, row) in rows.iter().enumerate() {
                    for (j, v) in row.iter().enumerate() {
                        negated[j][i] = -v;
                    }
                }
                let gt = StageGame::deterministic(negated, None).unwrap();
                let vt = solve_maximin(&gt).unwrap().value;
                prop_assert!((r.value + vt).abs() <= VALUE_TOLERANCE);
            }
        }
    }
}
