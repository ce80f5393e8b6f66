//! Finite normal-form games with exact payoffs.
//!
//! Players and strategies are identified by dense indices; names are kept
//! only for display and for resolving user input.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Rational;

/// One pure strategy per player, in player order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Profile(pub Vec<usize>);

impl Profile {
    pub fn new(choices: Vec<usize>) -> Self {
        Profile(choices)
    }

    pub fn get(&self, player: usize) -> usize {
        self.0[player]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// Same profile with `player`'s choice replaced.
    pub fn with(&self, player: usize, strategy: usize) -> Profile {
        let mut choices = self.0.clone();
        choices[player] = strategy;
        Profile(choices)
    }

    /// True when the two profiles agree on every player except `player`.
    pub fn same_opponents(&self, other: &Profile, player: usize) -> bool {
        self.0
            .iter()
            .zip(&other.0)
            .enumerate()
            .all(|(j, (a, b))| j == player || a == b)
    }
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<usize>> for Profile {
    fn from(choices: Vec<usize>) -> Self {
        Profile(choices)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StrategyId {
    pub player: usize,
    pub index: usize,
}

impl StrategyId {
    pub fn new(player: usize, index: usize) -> Self {
        StrategyId { player, index }
    }
}

/// Iterates the cartesian product of per-player index sets, player 0 most
/// significant.
pub struct ProductIter {
    sets: Vec<Vec<usize>>,
    cursor: Option<Vec<usize>>,
}

impl ProductIter {
    pub fn new(sets: Vec<Vec<usize>>) -> Self {
        let cursor = if sets.iter().any(Vec::is_empty) {
            None
        } else {
            Some(vec![0; sets.len()])
        };
        ProductIter { sets, cursor }
    }
}

impl Iterator for ProductIter {
    type Item = Profile;

    fn next(&mut self) -> Option<Profile> {
        let cursor = self.cursor.as_mut()?;
        let item = Profile(
            cursor
                .iter()
                .zip(&self.sets)
                .map(|(&c, set)| set[c])
                .collect(),
        );
        let mut advanced = false;
        for pos in (0..cursor.len()).rev() {
            cursor[pos] += 1;
            if cursor[pos] < self.sets[pos].len() {
                advanced = true;
                break;
            }
            cursor[pos] = 0;
        }
        if !advanced {
            self.cursor = None;
        }
        Some(item)
    }
}

/// Per-player nonempty strategy subsets (a product set of profiles).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Restriction {
    sets: Vec<BTreeSet<usize>>,
}

impl Restriction {
    pub fn full(game: &Game) -> Self {
        Restriction {
            sets: game
                .strategy_counts()
                .iter()
                .map(|&count| (0..count).collect())
                .collect(),
        }
    }

    pub fn new(game: &Game, sets: Vec<BTreeSet<usize>>) -> Result<Self> {
        if sets.len() != game.num_players() {
            return Err(Error::Structure(format!(
                "restriction has {} components, game has {} players",
                sets.len(),
                game.num_players()
            )));
        }
        for (player, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Structure(format!(
                    "restriction is empty for player {player}"
                )));
            }
            if let Some(&bad) = set.iter().find(|&&s| s >= game.num_strategies(player)) {
                return Err(Error::Structure(format!(
                    "strategy {bad} out of range for player {player}"
                )));
            }
        }
        Ok(Restriction { sets })
    }

    pub fn from_profile(game: &Game, profile: &Profile) -> Result<Self> {
        game.check_profile(profile)?;
        Ok(Restriction {
            sets: profile.0.iter().map(|&s| BTreeSet::from([s])).collect(),
        })
    }

    pub fn num_players(&self) -> usize {
        self.sets.len()
    }

    pub fn set(&self, player: usize) -> &BTreeSet<usize> {
        &self.sets[player]
    }

    pub fn sets(&self) -> &[BTreeSet<usize>] {
        &self.sets
    }

    pub fn contains(&self, player: usize, strategy: usize) -> bool {
        self.sets[player].contains(&strategy)
    }

    pub fn contains_profile(&self, profile: &Profile) -> bool {
        profile.len() == self.sets.len()
            && profile
                .0
                .iter()
                .zip(&self.sets)
                .all(|(s, set)| set.contains(s))
    }

    pub fn is_subset_of(&self, other: &Restriction) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(a, b)| a.is_subset(b))
    }

    pub fn size(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).sum()
    }

    pub fn num_profiles(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).product()
    }

    /// All profiles in the product set, lexicographic with player 0 most significant.
    pub fn profiles(&self) -> ProductIter {
        ProductIter::new(self.sets.iter().map(|s| s.iter().copied().collect()).collect())
    }

    /// Profiles whose `player` component is `strategy` and whose other
    /// components range over this restriction. The restriction's own entry
    /// for `player` is ignored.
    pub fn profiles_with(&self, player: usize, strategy: usize) -> ProductIter {
        ProductIter::new(
            self.sets
                .iter()
                .enumerate()
                .map(|(j, s)| {
                    if j == player {
                        vec![strategy]
                    } else {
                        s.iter().copied().collect()
                    }
                })
                .collect(),
        )
    }

    /// True when every component other than `player`'s is nonempty.
    pub fn opponents_nonempty(&self, player: usize) -> bool {
        self.sets
            .iter()
            .enumerate()
            .all(|(j, s)| j == player || !s.is_empty())
    }

    /// Replaces one component. Emptiness is not checked; callers use this
    /// only to build opponent views.
    pub fn with_set(&self, player: usize, set: BTreeSet<usize>) -> Restriction {
        let mut sets = self.sets.clone();
        sets[player] = set;
        Restriction { sets }
    }

    pub fn to_vecs(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.iter().copied().collect()).collect()
    }
}

/// A finite game in strategic form.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Game {
    player_names: Vec<String>,
    strategy_names: Vec<Vec<String>>,
    /// Indexed by profile index, then player.
    payoffs: Vec<Vec<Rational>>,
    strides: Vec<usize>,
}

impl Game {
    /// `payoffs` lists one utility vector per profile, in the order of
    /// [`Restriction::profiles`] over the full game.
    pub fn new(
        player_names: Vec<String>,
        strategy_names: Vec<Vec<String>>,
        payoffs: Vec<Vec<Rational>>,
    ) -> Result<Self> {
        let n = player_names.len();
        if n == 0 {
            return Err(Error::Structure("a game needs at least one player".into()));
        }
        if strategy_names.len() != n {
            return Err(Error::Structure(format!(
                "{} players but {} strategy lists",
                n,
                strategy_names.len()
            )));
        }
        if let Some(i) = strategy_names.iter().position(Vec::is_empty) {
            return Err(Error::Structure(format!("player {i} has no strategies")));
        }
        let mut strides = vec![1; n];
        for i in (0..n.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * strategy_names[i + 1].len();
        }
        let total: usize = strategy_names.iter().map(Vec::len).product();
        if payoffs.len() != total {
            return Err(Error::Structure(format!(
                "expected {} payoff vectors, got {}",
                total,
                payoffs.len()
            )));
        }
        if let Some(k) = payoffs.iter().position(|v| v.len() != n) {
            return Err(Error::Structure(format!(
                "payoff vector {k} has wrong length (expected {n})"
            )));
        }
        Ok(Game {
            player_names,
            strategy_names,
            payoffs,
            strides,
        })
    }

    /// Builds a game by evaluating `utility` at every profile.
    pub fn from_fn(
        player_names: Vec<String>,
        strategy_names: Vec<Vec<String>>,
        utility: impl Fn(&[usize]) -> Vec<Rational>,
    ) -> Result<Self> {
        let sets = strategy_names.iter().map(|s| (0..s.len()).collect()).collect();
        let payoffs = ProductIter::new(sets).map(|p| utility(&p.0)).collect();
        Game::new(player_names, strategy_names, payoffs)
    }

    pub fn num_players(&self) -> usize {
        self.player_names.len()
    }

    pub fn num_strategies(&self, player: usize) -> usize {
        self.strategy_names[player].len()
    }

    pub fn strategy_counts(&self) -> Vec<usize> {
        self.strategy_names.iter().map(Vec::len).collect()
    }

    pub fn num_profiles(&self) -> usize {
        self.payoffs.len()
    }

    pub fn player_names(&self) -> &[String] {
        &self.player_names
    }

    pub fn strategy_names(&self) -> &[Vec<String>] {
        &self.strategy_names
    }

    pub fn strategy_name(&self, player: usize, strategy: usize) -> &str {
        &self.strategy_names[player][strategy]
    }

    /// Resolves a strategy by name, falling back to a numeric index when no
    /// strategy carries that name.
    pub fn resolve_strategy(&self, player: usize, token: &str) -> Option<usize> {
        let names = self.strategy_names.get(player)?;
        names.iter().position(|n| n == token).or_else(|| {
            token
                .parse::<usize>()
                .ok()
                .filter(|&idx| idx < names.len())
        })
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player < self.num_players() {
            Ok(())
        } else {
            Err(Error::Structure(format!(
                "player {player} out of range (game has {})",
                self.num_players()
            )))
        }
    }

    pub fn check_profile(&self, profile: &Profile) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(Error::Structure(format!(
                "profile {:?} has {} entries, game has {} players",
                profile,
                profile.len(),
                self.num_players()
            )));
        }
        for (player, &s) in profile.0.iter().enumerate() {
            if s >= self.num_strategies(player) {
                return Err(Error::Structure(format!(
                    "strategy {s} out of range for player {player}"
                )));
            }
        }
        Ok(())
    }

    pub fn profile_index(&self, profile: &Profile) -> usize {
        profile
            .0
            .iter()
            .zip(&self.strides)
            .map(|(s, stride)| s * stride)
            .sum()
    }

    pub fn profile_at(&self, mut index: usize) -> Profile {
        Profile(
            self.strides
                .iter()
                .map(|&stride| {
                    let s = index / stride;
                    index %= stride;
                    s
                })
                .collect(),
        )
    }

    /// All profiles in index order.
    pub fn profiles(&self) -> ProductIter {
        Restriction::full(self).profiles()
    }

    /// `u_player(profile)`, checked.
    pub fn utility(&self, profile: &Profile, player: usize) -> Result<Rational> {
        self.check_profile(profile)?;
        self.check_player(player)?;
        Ok(self.payoff(profile, player).clone())
    }

    /// Unchecked accessor; panics on malformed input.
    pub fn payoff(&self, profile: &Profile, player: usize) -> &Rational {
        &self.payoffs[self.profile_index(profile)][player]
    }

    /// Payoff to `player` when they switch to `strategy` and everyone else
    /// keeps their part of `profile`.
    pub fn deviation_payoff(&self, profile: &Profile, player: usize, strategy: usize) -> &Rational {
        let index = self.profile_index(profile) - profile.0[player] * self.strides[player] + strategy * self.strides[player];
        &self.payoffs[index][player]
    }

    pub fn payoff_vector(&self, profile: &Profile) -> &[Rational] {
        &self.payoffs[self.profile_index(profile)]
    }

    pub fn display_profile(&self, profile: &Profile) -> String {
        let names: Vec<&str> = profile
            .0
            .iter()
            .enumerate()
            .map(|(i, &s)| self.strategy_name(i, s))
            .collect();
        format!("({})", names.join(","))
    }
}
