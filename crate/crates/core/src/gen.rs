//! Random games, structures and formulas for property tests and the
//! acceptance suite.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::game::{Game, Profile};
use crate::kripke::{CounterfactualStructure, Distribution, ProbabilityStructure, StateId};
use crate::logic::Formula;
use crate::rational::Rational;

/// A game with `players` players, per-player strategy counts drawn from
/// `strategies`, and integer payoffs drawn from `payoffs`.
pub fn random_game_with<R: Rng>(
    rng: &mut R,
    players: usize,
    strategies: std::ops::RangeInclusive<usize>,
    payoffs: std::ops::RangeInclusive<i64>,
) -> Game {
    let counts: Vec<usize> = (0..players).map(|_| rng.gen_range(strategies.clone())).collect();
    let total: usize = counts.iter().product();
    let table: Vec<Vec<Rational>> = (0..total)
        .map(|_| (0..players).map(|_| Rational::from(rng.gen_range(payoffs.clone()))).collect())
        .collect();
    Game::new(
        (1..=players).map(|i| i.to_string()).collect(),
        counts
            .iter()
            .map(|&c| (0..c).map(|s| format!("s{s}")).collect())
            .collect(),
        table,
    )
    .expect("dimensions agree")
}

/// 2 or 3 players, 2 to 4 strategies each, payoffs in `-3..=3`.
pub fn random_game<R: Rng>(rng: &mut R) -> Game {
    let players = rng.gen_range(2..=3);
    random_game_with(rng, players, 2..=4, -3..=3)
}

fn random_profile<R: Rng>(rng: &mut R, game: &Game) -> Profile {
    Profile((0..game.num_players()).map(|i| rng.gen_range(0..game.num_strategies(i))).collect())
}

/// Random state profiles in which every strategy of every player occurs.
fn random_states<R: Rng>(rng: &mut R, game: &Game, max_states: usize) -> Vec<Profile> {
    let n = game.num_players();
    let cover = (0..n).map(|i| game.num_strategies(i)).max().unwrap_or(1);
    let count = rng.gen_range(cover..=max_states.max(cover));
    let mut states: Vec<Profile> = (0..count)
        .map(|t| {
            if t < cover {
                Profile(
                    (0..n)
                        .map(|i| {
                            if t < game.num_strategies(i) {
                                t
                            } else {
                                rng.gen_range(0..game.num_strategies(i))
                            }
                        })
                        .collect(),
                )
            } else {
                random_profile(rng, game)
            }
        })
        .collect();
    states.shuffle(rng);
    states
}

fn random_distribution<R: Rng>(rng: &mut R, support: &[StateId]) -> Distribution {
    let weights: Vec<i64> = support.iter().map(|_| rng.gen_range(1..=4)).collect();
    let total: i64 = weights.iter().sum();
    Distribution::new(
        support
            .iter()
            .zip(weights)
            .map(|(&w, x)| (w, Rational::new(x, total))),
    )
    .expect("weights sum to one")
}

/// Beliefs satisfying P1 and P2: each player's states are split into blocks
/// inside which the player's own strategy is constant, and every state of a
/// block carries the block's distribution. About half the blocks are
/// singletons with a point belief.
fn random_beliefs<R: Rng>(rng: &mut R, game: &Game, states: &[Profile]) -> Vec<Vec<Distribution>> {
    let n = game.num_players();
    (0..n)
        .map(|i| {
            let mut beliefs: Vec<Option<Distribution>> = vec![None; states.len()];
            for own in 0..game.num_strategies(i) {
                let mut group: Vec<StateId> = (0..states.len()).filter(|&w| states[w].get(i) == own).collect();
                group.shuffle(rng);
                while !group.is_empty() {
                    let size = if rng.gen_bool(0.5) { 1 } else { rng.gen_range(1..=group.len()) };
                    let block: Vec<StateId> = group.drain(..size).collect();
                    let support_len = rng.gen_range(1..=block.len());
                    let d = random_distribution(rng, &block[..support_len]);
                    for &w in &block {
                        beliefs[w] = Some(d.clone());
                    }
                }
            }
            beliefs.into_iter().map(|d| d.expect("every state is in a block")).collect()
        })
        .collect()
}

/// A random probability structure satisfying P1 and P2.
pub fn random_probability_structure<R: Rng>(rng: &mut R, game: &Game, max_states: usize) -> ProbabilityStructure {
    let states = random_states(rng, game, max_states);
    let beliefs = random_beliefs(rng, game, &states);
    ProbabilityStructure::new(game.clone(), states, beliefs).expect("well formed")
}

/// Closest-state function sending each deviation to a random state that
/// plays it.
fn random_closest<R: Rng>(rng: &mut R, game: &Game, states: &[Profile]) -> Vec<Vec<Vec<StateId>>> {
    states
        .iter()
        .enumerate()
        .map(|(w, p)| {
            (0..game.num_players())
                .map(|i| {
                    (0..game.num_strategies(i))
                        .map(|x| {
                            if x == p.get(i) {
                                w
                            } else {
                                let targets: Vec<StateId> =
                                    (0..states.len()).filter(|&v| states[v].get(i) == x).collect();
                                *targets.choose(rng).expect("every strategy occurs")
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// A random appropriate counterfactual structure with at most `max_states`
/// states.
pub fn random_appropriate_structure<R: Rng>(
    rng: &mut R,
    game: &Game,
    max_states: usize,
) -> CounterfactualStructure {
    let states = random_states(rng, game, max_states);
    let beliefs = random_beliefs(rng, game, &states);
    let f = random_closest(rng, game, &states);
    CounterfactualStructure::new(game.clone(), states, f, beliefs).expect("well formed")
}

/// Like [`random_appropriate_structure`], but every player is certain of
/// the actual state, so KS holds everywhere. Such structures are strongly
/// appropriate.
pub fn random_self_believing_structure<R: Rng>(
    rng: &mut R,
    game: &Game,
    max_states: usize,
) -> CounterfactualStructure {
    let states = random_states(rng, game, max_states);
    let beliefs = (0..game.num_players())
        .map(|_| (0..states.len()).map(Distribution::point).collect())
        .collect();
    let f = random_closest(rng, game, &states);
    CounterfactualStructure::new(game.clone(), states, f, beliefs).expect("well formed")
}

/// A random formula of the classical fragment (no counterfactual belief)
/// with at most `depth` nested connectives.
pub fn random_classical_formula<R: Rng>(rng: &mut R, game: &Game, depth: usize) -> Formula {
    let n = game.num_players();
    let leaf = |rng: &mut R| match rng.gen_range(0..3) {
        0 => Formula::True,
        1 => {
            let i = rng.gen_range(0..n);
            Formula::Play(i, rng.gen_range(0..game.num_strategies(i)))
        }
        _ => Formula::Rat(rng.gen_range(0..n)),
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(random_classical_formula(rng, game, depth - 1)),
        1 => Formula::and(
            random_classical_formula(rng, game, depth - 1),
            random_classical_formula(rng, game, depth - 1),
        ),
        2 => Formula::b(rng.gen_range(0..n), random_classical_formula(rng, game, depth - 1)),
        3 => Formula::eb(random_classical_formula(rng, game, depth - 1)),
        4 => Formula::cb(random_classical_formula(rng, game, depth - 1)),
        _ => Formula::WRat(rng.gen_range(0..=3), Some(rng.gen_range(0..n))),
    }
}

/// A formula over the whole language, including counterfactual operators.
pub fn random_formula<R: Rng>(rng: &mut R, game: &Game, depth: usize) -> Formula {
    let n = game.num_players();
    if depth == 0 || rng.gen_bool(0.3) {
        return match rng.gen_range(0..5) {
            0 => Formula::KS,
            1 => Formula::KR,
            2 => Formula::KW,
            3 => Formula::SRat(rng.gen_range(0..=3), None),
            _ => random_classical_formula(rng, game, 0),
        };
    }
    match rng.gen_range(0..5) {
        0 => Formula::not(random_formula(rng, game, depth - 1)),
        1 => Formula::and(random_formula(rng, game, depth - 1), random_formula(rng, game, depth - 1)),
        2 => Formula::k(rng.gen_range(0..n), random_formula(rng, game, depth - 1)),
        3 => Formula::b(rng.gen_range(0..n), random_formula(rng, game, depth - 1)),
        _ => Formula::cb_star(random_formula(rng, game, depth - 1)),
    }
}

/// An appropriate structure over `pd(1,2)` that is not strongly
/// appropriate: player 1 is unsure at `(S,·)` states, but imagines a single
/// one when deviating from `C`.
pub fn weakly_appropriate_pd() -> CounterfactualStructure {
    let game = crate::builtin::pd(Rational::from(1), Rational::from(2)).expect("valid parameters");
    let s = vec![
        Profile(vec![0, 0]),
        Profile(vec![0, 1]),
        Profile(vec![1, 0]),
        Profile(vec![1, 1]),
    ];
    let index = |p: [usize; 2]| p[0] * 2 + p[1];
    let f = s
        .iter()
        .enumerate()
        .map(|(w, p)| {
            let own0 = (0..2)
                .map(|x| if x == p.get(0) { w } else if x == 1 { 2 } else { index([0, p.get(1)]) })
                .collect();
            let own1 = (0..2).map(|x| index([p.get(0), x])).collect();
            vec![own0, own1]
        })
        .collect();
    let unsure = Distribution::uniform(&[2, 3]).expect("nonempty");
    let beliefs = vec![
        vec![Distribution::point(0), Distribution::point(1), unsure.clone(), unsure],
        (0..4).map(Distribution::point).collect(),
    ];
    CounterfactualStructure::new(game, s, f, beliefs).expect("well formed")
}
