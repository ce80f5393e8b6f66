//! Classical rationalizability: iterated deletion of strategies that are
//! never a best response to a correlated belief about the opponents.
//!
//! A strategy is a best response to some belief iff no mixture of the
//! player's strategies strictly beats it against every opponent profile;
//! both sides are computed by exact LP and returned as witnesses.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Profile, Restriction, StrategyId};
use crate::json::rational_to_value;
use crate::lp::{find_feasible, Constraint, Relation};
use crate::rational::Rational;
use crate::trace::{Deletion, DeletionRound, DeletionTrace, Dominator};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MixedStrategy {
    pub player: usize,
    /// Strategy index to weight; zero weights are omitted.
    pub weights: BTreeMap<usize, Rational>,
}

impl MixedStrategy {
    pub fn pure(player: usize, strategy: usize) -> Self {
        MixedStrategy {
            player,
            weights: BTreeMap::from([(strategy, Rational::one())]),
        }
    }

    /// Expected utility of the mixture against a fixed opponent sub-profile.
    pub fn utility_against(&self, game: &Game, opponents: &[usize]) -> Rational {
        self.weights
            .iter()
            .map(|(&s, w)| w * game.payoff(&join(self.player, s, opponents), self.player))
            .sum()
    }

    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        for (s, w) in &self.weights {
            map.insert(s.to_string(), rational_to_value(w));
        }
        Value::Object(map)
    }
}

/// A correlated belief of `player` over opponent sub-profiles. Keys list the
/// opponents' strategies in player order with `player` left out.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Belief {
    pub player: usize,
    pub weights: BTreeMap<Vec<usize>, Rational>,
}

impl Belief {
    pub fn expected_utility(&self, game: &Game, strategy: usize) -> Rational {
        self.weights
            .iter()
            .map(|(tau, w)| w * game.payoff(&join(self.player, strategy, tau), self.player))
            .sum()
    }

    /// Keys are comma-separated strategy indices.
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        for (tau, w) in &self.weights {
            let key: Vec<String> = tau.iter().map(usize::to_string).collect();
            map.insert(key.join(","), rational_to_value(w));
        }
        Value::Object(map)
    }
}

/// Inserts `strategy` for `player` into an opponent sub-profile.
pub(crate) fn join(player: usize, strategy: usize, opponents: &[usize]) -> Profile {
    let mut v = opponents.to_vec();
    v.insert(player, strategy);
    Profile(v)
}

pub(crate) fn opponent_profiles(z: &Restriction, player: usize) -> Vec<Vec<usize>> {
    z.profiles_with(player, 0)
        .map(|p| {
            let mut v = p.0;
            v.remove(player);
            v
        })
        .collect()
}

fn check_query(game: &Game, player: usize, sigma: usize, opponents: &Restriction) -> Result<()> {
    game.check_player(player)?;
    if sigma >= game.num_strategies(player) {
        return Err(Error::Structure(format!(
            "strategy {sigma} out of range for player {player}"
        )));
    }
    if opponents.num_players() != game.num_players() {
        return Err(Error::Structure("restriction does not match the game".into()));
    }
    if !opponents.opponents_nonempty(player) {
        return Err(Error::Precondition(format!(
            "empty opponent restriction for player {player}"
        )));
    }
    Ok(())
}

/// A belief over `opponents` (the entry for `player` is ignored) against
/// which `sigma` is a best response among all of the player's strategies.
pub fn best_response_to_some_belief(
    game: &Game,
    player: usize,
    sigma: usize,
    opponents: &Restriction,
) -> Result<Option<Belief>> {
    check_query(game, player, sigma, opponents)?;
    let taus = opponent_profiles(opponents, player);
    let mut constraints = vec![Constraint::new(
        vec![Rational::one(); taus.len()],
        Relation::Eq,
        Rational::one(),
    )];
    for alt in (0..game.num_strategies(player)).filter(|&a| a != sigma) {
        let coeffs = taus
            .iter()
            .map(|tau| {
                game.payoff(&join(player, sigma, tau), player)
                    - game.payoff(&join(player, alt, tau), player)
            })
            .collect();
        constraints.push(Constraint::new(coeffs, Relation::Ge, Rational::zero()));
    }
    Ok(find_feasible(taus.len(), &constraints).map(|w| Belief {
        player,
        weights: taus
            .into_iter()
            .zip(w)
            .filter(|(_, w)| !w.is_zero())
            .collect(),
    }))
}

/// A mixture of the player's strategies that strictly beats `sigma` against
/// every opponent profile in `opponents`.
pub fn mixed_dominance_certificate(
    game: &Game,
    player: usize,
    sigma: usize,
    opponents: &Restriction,
) -> Result<Option<MixedStrategy>> {
    check_query(game, player, sigma, opponents)?;
    let n = game.num_strategies(player);
    let constraints: Vec<Constraint> = opponent_profiles(opponents, player)
        .iter()
        .map(|tau| {
            let base = game.payoff(&join(player, sigma, tau), player);
            let coeffs = (0..n)
                .map(|s| game.payoff(&join(player, s, tau), player) - base)
                .collect();
            Constraint::new(coeffs, Relation::Ge, Rational::one())
        })
        .collect();
    Ok(find_feasible(n, &constraints).map(|y| {
        let total: Rational = y.iter().sum();
        MixedStrategy {
            player,
            weights: y
                .into_iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(s, w)| (s, w / &total))
                .collect(),
        }
    }))
}

/// Checks by direct arithmetic that `belief` supports `sigma`.
pub fn verify_belief(game: &Game, belief: &Belief, sigma: usize, opponents: &Restriction) -> bool {
    let player = belief.player;
    let total: Rational = belief.weights.values().sum();
    let in_support = belief.weights.iter().all(|(tau, w)| {
        !w.is_negative()
            && tau.len() + 1 == game.num_players()
            && tau.iter().enumerate().all(|(k, &s)| {
                let j = if k < player { k } else { k + 1 };
                opponents.contains(j, s)
            })
    });
    let eu = belief.expected_utility(game, sigma);
    total.is_one()
        && in_support
        && (0..game.num_strategies(player)).all(|a| belief.expected_utility(game, a) <= eu)
}

/// Checks by direct arithmetic that `mix` strictly dominates `sigma` on `opponents`.
pub fn verify_certificate(game: &Game, mix: &MixedStrategy, sigma: usize, opponents: &Restriction) -> bool {
    let player = mix.player;
    let total: Rational = mix.weights.values().sum();
    total.is_one()
        && mix.weights.values().all(|w| !w.is_negative())
        && opponent_profiles(opponents, player).iter().all(|tau| {
            mix.utility_against(game, tau) > *game.payoff(&join(player, sigma, tau), player)
        })
}

/// Iterated deletion of never-best-responses; the final restriction holds
/// the rationalizable strategies.
pub fn rationalizable_set(game: &Game) -> DeletionTrace {
    let start = Restriction::full(game);
    let mut current = start.clone();
    let mut rounds = Vec::new();
    loop {
        let mut deleted = Vec::new();
        for player in 0..game.num_players() {
            for &s in current.set(player) {
                let cert = mixed_dominance_certificate(game, player, s, &current)
                    .expect("current restriction is nonempty");
                if let Some(mix) = cert {
                    deleted.push(Deletion {
                        strategy: StrategyId::new(player, s),
                        dominator: Dominator::Mixed(mix),
                    });
                }
            }
        }
        if deleted.is_empty() {
            break;
        }
        let mut next = current.clone();
        for d in &deleted {
            let mut set = next.set(d.strategy.player).clone();
            set.remove(&d.strategy.index);
            next = next.with_set(d.strategy.player, set);
        }
        rounds.push(DeletionRound {
            before: current,
            deleted,
            survivors: next.clone(),
        });
        current = next;
    }
    DeletionTrace { start, rounds }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    fn pd() -> Game {
        builtin::pd(Rational::from(1), Rational::from(2)).unwrap()
    }

    #[test]
    fn cooperate_is_never_a_best_response() {
        let g = pd();
        let all = Restriction::full(&g);
        assert!(best_response_to_some_belief(&g, 0, 0, &all).unwrap().is_none());
        let cert = mixed_dominance_certificate(&g, 0, 0, &all).unwrap().unwrap();
        assert_eq!(cert, MixedStrategy::pure(0, 1));
        assert!(verify_certificate(&g, &cert, 0, &all));
    }

    #[test]
    fn matching_pennies_supports_everything() {
        let g = builtin::matching_pennies();
        let all = Restriction::full(&g);
        for player in 0..2 {
            for s in 0..2 {
                let b = best_response_to_some_belief(&g, player, s, &all).unwrap().unwrap();
                assert!(verify_belief(&g, &b, s, &all));
                assert!(mixed_dominance_certificate(&g, player, s, &all).unwrap().is_none());
            }
        }
        let trace = rationalizable_set(&g);
        assert_eq!(trace.final_restriction(), &all);
    }

    #[test]
    fn single_strategy_player_gets_a_point_belief() {
        let g = builtin::constant(&[1, 1], Rational::zero()).unwrap();
        let all = Restriction::full(&g);
        let b = best_response_to_some_belief(&g, 0, 0, &all).unwrap().unwrap();
        assert_eq!(b.weights, BTreeMap::from([(vec![0], Rational::one())]));
        assert_eq!(rationalizable_set(&g).num_rounds(), 0);
    }

    #[test]
    fn columnwise_maximum_has_no_certificate() {
        let g = builtin::ex2();
        let all = Restriction::full(&g);
        // b is at least as good as a in column c only; neither beats the other strictly everywhere
        assert!(mixed_dominance_certificate(&g, 0, 0, &all).unwrap().is_none());
        assert!(mixed_dominance_certificate(&g, 0, 1, &all).unwrap().is_none());
    }

    #[test]
    fn classical_pd_leaves_mutual_suing() {
        let trace = rationalizable_set(&pd());
        assert_eq!(trace.final_restriction().to_vecs(), vec![vec![1], vec![1]]);
    }

    #[test]
    fn strictly_mixed_certificate() {
        // Middle row is beaten only by the half-half mixture of the outer rows.
        let rows = [[3, 0], [1, 1], [0, 3]];
        let g = Game::from_fn(
            vec!["1".into(), "2".into()],
            vec![
                vec!["t".into(), "m".into(), "b".into()],
                vec!["l".into(), "r".into()],
            ],
            |s| vec![Rational::from(rows[s[0]][s[1]]), Rational::zero()],
        )
        .unwrap();
        let all = Restriction::full(&g);
        let cert = mixed_dominance_certificate(&g, 0, 1, &all).unwrap().unwrap();
        assert!(verify_certificate(&g, &cert, 1, &all));
        assert_eq!(cert.weights.len(), 2);
        assert!(best_response_to_some_belief(&g, 0, 1, &all).unwrap().is_none());
    }

    #[test]
    fn empty_opponents_rejected() {
        let g = pd();
        let z = Restriction::full(&g).with_set(1, Default::default());
        assert!(matches!(
            best_response_to_some_belief(&g, 0, 0, &z),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn belief_json_uses_fraction_strings() {
        let g = builtin::matching_pennies();
        let all = Restriction::full(&g);
        let b = best_response_to_some_belief(&g, 0, 0, &all).unwrap().unwrap();
        let v = b.to_value();
        for w in v.as_object().unwrap().values() {
            assert!(w.is_string());
        }
    }
}
