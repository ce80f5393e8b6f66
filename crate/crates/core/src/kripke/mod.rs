//! Finite counterfactual structures `(Ω, s, f, PR_1..PR_n)` over a game, and
//! plain probability structures (the same without `f`).

mod io;
mod validate;

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::{Game, Profile};
use crate::rational::Rational;

pub use io::{
    load_structure, parse_structure, serialize_structure, structure_from_value, structure_game,
    structure_to_value,
};
pub use validate::{
    epsilon_closeness, respects_unilateral_deviations, validate_appropriate,
    validate_probability, validate_strongly_appropriate, Condition, ValidationReport, Violation,
};

pub type StateId = usize;

/// A probability distribution on states with exact weights. Only states
/// with positive weight are stored, so equality is equality of measures.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Distribution {
    weights: BTreeMap<StateId, Rational>,
}

impl Distribution {
    /// Duplicate states are merged; zero weights are dropped.
    pub fn new(weights: impl IntoIterator<Item = (StateId, Rational)>) -> Result<Self> {
        let mut merged: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (state, w) in weights {
            if w.is_negative() {
                return Err(Error::Structure(format!("negative weight {w} on state {state}")));
            }
            *merged.entry(state).or_default() += w;
        }
        merged.retain(|_, w| !w.is_zero());
        let total: Rational = merged.values().sum();
        if !total.is_one() {
            return Err(Error::Structure(format!(
                "weights sum {}/{} ≠ 1",
                total.numer(),
                total.denom()
            )));
        }
        Ok(Distribution { weights: merged })
    }

    pub fn point(state: StateId) -> Self {
        Distribution {
            weights: BTreeMap::from([(state, Rational::one())]),
        }
    }

    /// Uniform over a nonempty list of distinct states.
    pub fn uniform(states: &[StateId]) -> Result<Self> {
        let n = states.len() as i64;
        if n == 0 {
            return Err(Error::Structure("uniform distribution over no states".into()));
        }
        Distribution::new(states.iter().map(|&s| (s, Rational::new(1, n))))
    }

    pub fn prob(&self, state: StateId) -> Rational {
        self.weights.get(&state).cloned().unwrap_or_default()
    }

    pub fn support(&self) -> impl Iterator<Item = StateId> + '_ {
        self.weights.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> {
        self.weights.iter().map(|(&s, w)| (s, w))
    }

    pub fn support_len(&self) -> usize {
        self.weights.len()
    }

    pub fn max_state(&self) -> StateId {
        *self.weights.keys().next_back().expect("distributions are nonempty")
    }

    /// Probability of the event `{ω : pred(ω)}`.
    pub fn mass(&self, pred: impl Fn(StateId) -> bool) -> Rational {
        self.iter().filter(|(s, _)| pred(*s)).map(|(_, w)| w).sum()
    }

    /// True iff the event `{ω : pred(ω)}` has probability 1.
    pub fn certain(&self, pred: impl Fn(StateId) -> bool) -> bool {
        self.support().all(pred)
    }

    pub fn pushforward(&self, map: impl Fn(StateId) -> StateId) -> Distribution {
        let mut out: BTreeMap<StateId, Rational> = BTreeMap::new();
        for (s, w) in self.iter() {
            *out.entry(map(s)).or_default() += w;
        }
        Distribution { weights: out }
    }
}

/// Read access shared by counterfactual and probability structures.
pub trait Frame {
    fn game(&self) -> &Game;
    fn num_states(&self) -> usize;
    fn strategies(&self, state: StateId) -> &Profile;
    fn belief(&self, player: usize, state: StateId) -> &Distribution;
    /// `f(state, player, strategy)`; `None` when the frame has no closest-state function.
    fn closest(&self, state: StateId, player: usize, strategy: usize) -> Option<StateId>;
}

fn check_common(game: &Game, s: &[Profile], beliefs: &[Vec<Distribution>]) -> Result<()> {
    let n = s.len();
    if n == 0 {
        return Err(Error::Structure("a structure needs at least one state".into()));
    }
    for (state, p) in s.iter().enumerate() {
        game.check_profile(p)
            .map_err(|e| Error::Structure(format!("state {state}: {e}")))?;
    }
    if beliefs.len() != game.num_players() {
        return Err(Error::Structure(format!(
            "beliefs given for {} players, game has {}",
            beliefs.len(),
            game.num_players()
        )));
    }
    for (player, per_state) in beliefs.iter().enumerate() {
        if per_state.len() != n {
            return Err(Error::Structure(format!(
                "player {player} has beliefs for {} states, expected {n}",
                per_state.len()
            )));
        }
        for (state, d) in per_state.iter().enumerate() {
            if d.max_state() >= n {
                return Err(Error::Structure(format!(
                    "belief of player {player} at state {state} mentions state {} (only {n} states)",
                    d.max_state()
                )));
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterfactualStructure {
    game: Game,
    s: Vec<Profile>,
    /// Indexed `[state][player][strategy]`.
    f: Vec<Vec<Vec<StateId>>>,
    /// Indexed `[player][state]`.
    beliefs: Vec<Vec<Distribution>>,
}

impl CounterfactualStructure {
    /// Checks that all maps are total and in range. Appropriateness is not
    /// checked here.
    pub fn new(
        game: Game,
        s: Vec<Profile>,
        f: Vec<Vec<Vec<StateId>>>,
        beliefs: Vec<Vec<Distribution>>,
    ) -> Result<Self> {
        check_common(&game, &s, &beliefs)?;
        let n = s.len();
        if f.len() != n {
            return Err(Error::Structure(format!(
                "closest-state table covers {} states, expected {n}",
                f.len()
            )));
        }
        for (state, per_player) in f.iter().enumerate() {
            if per_player.len() != game.num_players() {
                return Err(Error::Structure(format!(
                    "closest-state table at state {state} has {} players",
                    per_player.len()
                )));
            }
            for (player, targets) in per_player.iter().enumerate() {
                if targets.len() != game.num_strategies(player) {
                    return Err(Error::Structure(format!(
                        "closest-state table at state {state}, player {player} is not total"
                    )));
                }
                if let Some(&bad) = targets.iter().find(|&&t| t >= n) {
                    return Err(Error::Structure(format!(
                        "f({state},{player},·) points to state {bad} (only {n} states)"
                    )));
                }
            }
        }
        Ok(CounterfactualStructure { game, s, f, beliefs })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn num_states(&self) -> usize {
        self.s.len()
    }

    pub fn strategies(&self, state: StateId) -> &Profile {
        &self.s[state]
    }

    pub fn closest(&self, state: StateId, player: usize, strategy: usize) -> StateId {
        self.f[state][player][strategy]
    }

    pub fn belief(&self, player: usize, state: StateId) -> &Distribution {
        &self.beliefs[player][state]
    }

    pub fn strategy_map(&self) -> &[Profile] {
        &self.s
    }

    pub fn closest_table(&self) -> &[Vec<Vec<StateId>>] {
        &self.f
    }

    pub fn belief_table(&self) -> &[Vec<Distribution>] {
        &self.beliefs
    }

    /// `PR^c_{player,strategy}(state)`: the belief pushed through `f(·, player, strategy)`.
    pub fn counterfactual_belief(&self, state: StateId, player: usize, strategy: usize) -> Distribution {
        self.beliefs[player][state].pushforward(|w| self.f[w][player][strategy])
    }

    /// Forgets `f`.
    pub fn to_probability_structure(&self) -> ProbabilityStructure {
        ProbabilityStructure {
            game: self.game.clone(),
            s: self.s.clone(),
            beliefs: self.beliefs.clone(),
        }
    }
}

impl Frame for CounterfactualStructure {
    fn game(&self) -> &Game {
        &self.game
    }
    fn num_states(&self) -> usize {
        self.s.len()
    }
    fn strategies(&self, state: StateId) -> &Profile {
        &self.s[state]
    }
    fn belief(&self, player: usize, state: StateId) -> &Distribution {
        &self.beliefs[player][state]
    }
    fn closest(&self, state: StateId, player: usize, strategy: usize) -> Option<StateId> {
        Some(self.f[state][player][strategy])
    }
}

/// A structure without counterfactuals: states, strategy map and beliefs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityStructure {
    game: Game,
    s: Vec<Profile>,
    beliefs: Vec<Vec<Distribution>>,
}

impl ProbabilityStructure {
    pub fn new(game: Game, s: Vec<Profile>, beliefs: Vec<Vec<Distribution>>) -> Result<Self> {
        check_common(&game, &s, &beliefs)?;
        Ok(ProbabilityStructure { game, s, beliefs })
    }

    pub fn game(&self) -> &Game {
        &self.game
    }

    pub fn num_states(&self) -> usize {
        self.s.len()
    }

    pub fn strategies(&self, state: StateId) -> &Profile {
        &self.s[state]
    }

    pub fn belief(&self, player: usize, state: StateId) -> &Distribution {
        &self.beliefs[player][state]
    }

    pub fn strategy_map(&self) -> &[Profile] {
        &self.s
    }

    pub fn belief_table(&self) -> &[Vec<Distribution>] {
        &self.beliefs
    }
}

impl Frame for ProbabilityStructure {
    fn game(&self) -> &Game {
        &self.game
    }
    fn num_states(&self) -> usize {
        self.s.len()
    }
    fn strategies(&self, state: StateId) -> &Profile {
        &self.s[state]
    }
    fn belief(&self, player: usize, state: StateId) -> &Distribution {
        &self.beliefs[player][state]
    }
    fn closest(&self, _: StateId, _: usize, _: usize) -> Option<StateId> {
        None
    }
}
