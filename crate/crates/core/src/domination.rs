//! Minimax domination and everything built on it: iterated deletion,
//! minimax rationalizability, maximin values and individual rationality.
//!
//! Strategy `a` minimax-dominates `b` for player `i` with respect to an
//! opponent restriction `Z` when the worst payoff of `a` against `Z` is
//! strictly larger than the best payoff of `b` against `Z`. Only pure
//! dominators are considered.
//!
//! Functions that take an opponent restriction ignore the component that
//! belongs to the player under consideration.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::game::{Game, Profile, Restriction, StrategyId};
use crate::rational::Rational;
use crate::trace::{Deletion, DeletionRound, DeletionTrace, Dominator};

fn check_opponents(game: &Game, player: usize, opponents: &Restriction) -> Result<()> {
    game.check_player(player)?;
    if opponents.num_players() != game.num_players() {
        return Err(Error::Structure(format!(
            "restriction has {} components, game has {} players",
            opponents.num_players(),
            game.num_players()
        )));
    }
    if !opponents.opponents_nonempty(player) {
        return Err(Error::Precondition(format!(
            "empty opponent restriction for player {player}"
        )));
    }
    Ok(())
}

/// `min` over opponent profiles in `opponents` of `u_player(strategy, ·)`.
pub(crate) fn worst_case(game: &Game, player: usize, strategy: usize, opponents: &Restriction) -> Rational {
    opponents
        .profiles_with(player, strategy)
        .map(|p| game.payoff(&p, player).clone())
        .min()
        .expect("opponent restriction is nonempty")
}

pub(crate) fn best_case(game: &Game, player: usize, strategy: usize, opponents: &Restriction) -> Rational {
    opponents
        .profiles_with(player, strategy)
        .map(|p| game.payoff(&p, player).clone())
        .max()
        .expect("opponent restriction is nonempty")
}

pub fn minimax_dominates(
    game: &Game,
    player: usize,
    dominator: usize,
    dominated: usize,
    opponents: &Restriction,
) -> Result<bool> {
    check_opponents(game, player, opponents)?;
    for s in [dominator, dominated] {
        if s >= game.num_strategies(player) {
            return Err(Error::Structure(format!(
                "strategy {s} out of range for player {player}"
            )));
        }
    }
    Ok(worst_case(game, player, dominator, opponents) > best_case(game, player, dominated, opponents))
}

/// Which strategies may serve as dominators in a deletion round.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DominatorPool {
    /// Every strategy of the game.
    Full,
    /// Only strategies that survived so far.
    Survivors,
}

/// How many of the currently dominated strategies a round removes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeletionPolicy {
    /// Remove every dominated strategy.
    Maximal,
    /// Remove a pseudo-random nonempty subset of the dominated strategies.
    RandomSubset { seed: u64 },
}

/// Dominated strategies in `current`, each with its lowest-index dominator.
fn dominated_in(game: &Game, current: &Restriction, pool: DominatorPool) -> Vec<Deletion> {
    let mut out = Vec::new();
    for player in 0..game.num_players() {
        let candidates: Vec<usize> = match pool {
            DominatorPool::Full => (0..game.num_strategies(player)).collect(),
            DominatorPool::Survivors => current.set(player).iter().copied().collect(),
        };
        let worst: Vec<(usize, Rational)> = candidates
            .iter()
            .map(|&s| (s, worst_case(game, player, s, current)))
            .collect();
        for &s in current.set(player) {
            let best = best_case(game, player, s, current);
            if let Some(&(d, _)) = worst.iter().find(|(_, w)| *w > best) {
                out.push(Deletion {
                    strategy: StrategyId::new(player, s),
                    dominator: Dominator::Pure(d),
                });
            }
        }
    }
    out
}

fn remove(current: &Restriction, deleted: &[Deletion]) -> Restriction {
    let mut sets: Vec<BTreeSet<usize>> = current.sets().to_vec();
    for d in deleted {
        sets[d.strategy.player].remove(&d.strategy.index);
    }
    let mut next = current.clone();
    for (player, set) in sets.into_iter().enumerate() {
        next = next.with_set(player, set);
    }
    next
}

fn check_restriction(game: &Game, current: &Restriction) -> Result<()> {
    Restriction::new(game, current.sets().to_vec()).map(|_| ())
}

/// One maximal deletion round with dominators drawn from the full game.
pub fn nsd_step(game: &Game, current: &Restriction) -> Result<(Restriction, DeletionRound)> {
    check_restriction(game, current)?;
    let deleted = dominated_in(game, current, DominatorPool::Full);
    let survivors = remove(current, &deleted);
    Ok((
        survivors.clone(),
        DeletionRound {
            before: current.clone(),
            deleted,
            survivors,
        },
    ))
}

/// Iterated deletion under an explicit dominator pool and policy.
pub fn nsd_run(game: &Game, pool: DominatorPool, policy: DeletionPolicy) -> DeletionTrace {
    let start = Restriction::full(game);
    let mut current = start.clone();
    let mut rounds = Vec::new();
    let mut rng = match policy {
        DeletionPolicy::RandomSubset { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        DeletionPolicy::Maximal => None,
    };
    loop {
        let dominated = dominated_in(game, &current, pool);
        if dominated.is_empty() {
            break;
        }
        let deleted = match rng.as_mut() {
            None => dominated,
            Some(rng) => {
                let mut chosen: Vec<Deletion> = dominated
                    .iter()
                    .filter(|_| rng.gen_bool(0.5))
                    .cloned()
                    .collect();
                if chosen.is_empty() {
                    chosen.push(dominated[rng.gen_range(0..dominated.len())].clone());
                }
                chosen
            }
        };
        let survivors = remove(&current, &deleted);
        rounds.push(DeletionRound {
            before: current,
            deleted,
            survivors: survivors.clone(),
        });
        current = survivors;
    }
    DeletionTrace { start, rounds }
}

/// `NSD^∞` by maximal deletion; round `k` of the trace holds `NSD^k`.
pub fn nsd_fixpoint(game: &Game) -> DeletionTrace {
    nsd_run(game, DominatorPool::Full, DeletionPolicy::Maximal)
}

/// Deletes a seeded random nonempty subset of the dominated strategies each round.
pub fn nsd_fixpoint_with_order(game: &Game, seed: u64) -> DeletionTrace {
    nsd_run(game, DominatorPool::Full, DeletionPolicy::RandomSubset { seed })
}

/// Maximal deletion where dominators must themselves have survived.
pub fn nsd_fixpoint_restricted_dominators(game: &Game) -> DeletionTrace {
    nsd_run(game, DominatorPool::Survivors, DeletionPolicy::Maximal)
}

/// Checks the structural invariants of a minimax deletion trace: strict
/// shrinking, valid witnesses, and a final restriction with nothing left
/// to delete.
pub fn verify_nsd_trace(game: &Game, trace: &DeletionTrace) -> std::result::Result<(), String> {
    let mut current = trace.start.clone();
    for (k, round) in trace.rounds.iter().enumerate() {
        if round.before != current {
            return Err(format!("round {k} does not start where the previous ended"));
        }
        if round.deleted.is_empty() || round.survivors.size() >= current.size() {
            return Err(format!("round {k} does not strictly shrink"));
        }
        if !round.survivors.is_subset_of(&current) {
            return Err(format!("round {k} adds strategies"));
        }
        for d in &round.deleted {
            let Dominator::Pure(w) = d.dominator else {
                return Err(format!("round {k} has a mixed witness"));
            };
            let ok = minimax_dominates(game, d.strategy.player, w, d.strategy.index, &current)
                .map_err(|e| e.to_string())?;
            if !ok {
                return Err(format!(
                    "round {k}: {w} does not dominate {:?}",
                    d.strategy
                ));
            }
            if round.survivors.contains(d.strategy.player, d.strategy.index) {
                return Err(format!("round {k}: deleted strategy survived"));
            }
        }
        current = round.survivors.clone();
    }
    if !dominated_in(game, &current, DominatorPool::Full).is_empty() {
        return Err("final restriction still has dominated strategies".into());
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaximinReport {
    pub player: usize,
    pub opponents: Restriction,
    pub value: Rational,
    pub argmax_strategy: StrategyId,
}

/// `max_{s ∈ candidates} min_{τ ∈ opponents} u_player(s, τ)`, lowest index on ties.
fn maximin_over(
    game: &Game,
    player: usize,
    candidates: impl Iterator<Item = usize>,
    opponents: &Restriction,
) -> (usize, Rational) {
    let mut best: Option<(usize, Rational)> = None;
    for s in candidates {
        let w = worst_case(game, player, s, opponents);
        if best.as_ref().map_or(true, |(_, v)| w > *v) {
            best = Some((s, w));
        }
    }
    best.expect("candidate set is nonempty")
}

/// Pure-strategy maximin value of `player` against `opponents`.
pub fn maximin(game: &Game, player: usize, opponents: &Restriction) -> Result<MaximinReport> {
    check_opponents(game, player, opponents)?;
    let (s, value) = maximin_over(game, player, 0..game.num_strategies(player), opponents);
    Ok(MaximinReport {
        player,
        opponents: opponents.clone(),
        value,
        argmax_strategy: StrategyId::new(player, s),
    })
}

fn ir_filter(game: &Game, z: &Restriction, thresholds: &[Rational]) -> Vec<Profile> {
    z.profiles()
        .filter(|p| (0..game.num_players()).all(|i| game.payoff(p, i) >= &thresholds[i]))
        .collect()
}

/// Individually rational profiles of the whole game.
pub fn ir_set(game: &Game) -> Vec<Profile> {
    let full = Restriction::full(game);
    ir_relative(game, &full).expect("full restriction is valid")
}

/// `IR(Z, Γ)`: individual rationality inside the subgame `Z`.
pub fn ir_relative(game: &Game, z: &Restriction) -> Result<Vec<Profile>> {
    check_restriction(game, z)?;
    let thresholds: Vec<Rational> = (0..game.num_players())
        .map(|i| maximin_over(game, i, z.set(i).iter().copied(), z).1)
        .collect();
    Ok(ir_filter(game, z, &thresholds))
}

/// `IR'(Z, Γ)`: as [`ir_relative`], but the guaranteed payoff may use any
/// strategy of the full game.
pub fn ir_prime(game: &Game, z: &Restriction) -> Result<Vec<Profile>> {
    check_restriction(game, z)?;
    let thresholds: Vec<Rational> = (0..game.num_players())
        .map(|i| maximin_over(game, i, 0..game.num_strategies(i), z).1)
        .collect();
    Ok(ir_filter(game, z, &thresholds))
}

/// Why a family of sets fails to witness minimax rationalizability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ZSetViolation {
    Malformed(String),
    /// The profile's strategy for `player` is not in `Z_player`.
    NotMember { player: usize },
    /// `kept ∈ Z_player` has best case below the worst case of `alternative`.
    Dominated {
        player: usize,
        kept: usize,
        alternative: usize,
    },
}

impl fmt::Display for ZSetViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ZSetViolation::Malformed(m) => write!(f, "malformed sets: {m}"),
            ZSetViolation::NotMember { player } => {
                write!(f, "membership: player {player}'s strategy is not in its set")
            }
            ZSetViolation::Dominated {
                player,
                kept,
                alternative,
            } => write!(
                f,
                "max-min condition: for player {player}, strategy {kept} is minimax dominated by {alternative} within the sets"
            ),
        }
    }
}

/// Checks the two conditions of minimax rationalizability for `profile`
/// with candidate sets `z`.
pub fn check_z_sets(game: &Game, profile: &Profile, z: &Restriction) -> std::result::Result<(), ZSetViolation> {
    game.check_profile(profile)
        .map_err(|e| ZSetViolation::Malformed(e.to_string()))?;
    check_restriction(game, z).map_err(|e| ZSetViolation::Malformed(e.to_string()))?;
    for player in 0..game.num_players() {
        if !z.contains(player, profile.get(player)) {
            return Err(ZSetViolation::NotMember { player });
        }
    }
    for player in 0..game.num_players() {
        let worst: Vec<Rational> = (0..game.num_strategies(player))
            .map(|s| worst_case(game, player, s, z))
            .collect();
        for &kept in z.set(player) {
            let best = best_case(game, player, kept, z);
            if let Some(alternative) = worst.iter().position(|w| best < *w) {
                return Err(ZSetViolation::Dominated {
                    player,
                    kept,
                    alternative,
                });
            }
        }
    }
    Ok(())
}

/// Witness sets for minimax rationalizability: `NSD^∞` when the profile
/// survives deletion, otherwise `None`.
pub fn minimax_rationalizable(game: &Game, profile: &Profile) -> Result<Option<Restriction>> {
    game.check_profile(profile)?;
    let survivors = nsd_fixpoint(game).final_restriction().clone();
    Ok(survivors.contains_profile(profile).then_some(survivors))
}
