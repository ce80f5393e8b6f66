//! Brute-force recomputation of deletion and individual rationality by
//! plain enumeration over payoff indices. Shares nothing with
//! [`crate::domination`] beyond payoff lookup, so the two can be compared.

use serde_json::{json, Value};

use crate::game::{Game, Profile};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    /// Surviving strategy indices after each round that deleted something.
    pub rounds: Vec<Vec<Vec<usize>>>,
    pub survivors: Vec<Vec<usize>>,
    pub ir: Vec<Profile>,
    /// IR' relative to the surviving sets.
    pub ir_prime: Vec<Profile>,
}

impl OracleReport {
    pub fn to_value(&self) -> Value {
        let profiles = |ps: &[Profile]| -> Value { ps.iter().map(|p| json!(p.0)).collect() };
        json!({
            "rounds": self.rounds,
            "survivors": self.survivors,
            "ir": profiles(&self.ir),
            "ir_prime": profiles(&self.ir_prime),
        })
    }
}

/// Every profile whose entries are alive.
fn alive_profiles(game: &Game, alive: &[Vec<bool>]) -> Vec<Profile> {
    let mut out = Vec::new();
    let n = game.num_players();
    let mut cur = vec![0usize; n];
    'outer: loop {
        if (0..n).all(|i| alive[i][cur[i]]) {
            out.push(Profile(cur.clone()));
        }
        let mut i = n;
        loop {
            if i == 0 {
                break 'outer;
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < game.num_strategies(i) {
                break;
            }
            cur[i] = 0;
        }
    }
    out
}

fn payoffs_with(game: &Game, profiles: &[Profile], player: usize, strategy: usize) -> Vec<Rational> {
    profiles
        .iter()
        .map(|p| {
            let mut q = p.0.clone();
            q[player] = strategy;
            game.payoff(&Profile(q), player).clone()
        })
        .collect()
}

fn lowest(values: Vec<Rational>) -> Rational {
    values.into_iter().min().expect("nonempty")
}

fn highest(values: Vec<Rational>) -> Rational {
    values.into_iter().max().expect("nonempty")
}

/// Maximal simultaneous deletion to the fixpoint, then IR and IR'.
pub fn oracle(game: &Game) -> OracleReport {
    let n = game.num_players();
    let mut alive: Vec<Vec<bool>> = (0..n).map(|i| vec![true; game.num_strategies(i)]).collect();
    let mut rounds = Vec::new();
    loop {
        let context = alive_profiles(game, &alive);
        let mut next = alive.clone();
        let mut changed = false;
        for i in 0..n {
            for s in 0..game.num_strategies(i) {
                if !alive[i][s] {
                    continue;
                }
                let best = highest(payoffs_with(game, &context, i, s));
                let dominated = (0..game.num_strategies(i))
                    .any(|t| lowest(payoffs_with(game, &context, i, t)) > best);
                if dominated {
                    next[i][s] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
        alive = next;
        rounds.push(indices(&alive));
    }

    let everything: Vec<Vec<bool>> = (0..n).map(|i| vec![true; game.num_strategies(i)]).collect();
    let all_profiles = alive_profiles(game, &everything);
    let surviving = alive_profiles(game, &alive);
    let guarantee = |context: &[Profile], i: usize| -> Rational {
        highest(
            (0..game.num_strategies(i))
                .map(|t| lowest(payoffs_with(game, context, i, t)))
                .collect(),
        )
    };
    let ir_thresholds: Vec<Rational> = (0..n).map(|i| guarantee(&all_profiles, i)).collect();
    let prime_thresholds: Vec<Rational> = (0..n).map(|i| guarantee(&surviving, i)).collect();
    let meets = |p: &Profile, t: &[Rational]| (0..n).all(|i| *game.payoff(p, i) >= t[i]);
    OracleReport {
        rounds,
        survivors: indices(&alive),
        ir: all_profiles.iter().filter(|p| meets(p, &ir_thresholds)).cloned().collect(),
        ir_prime: surviving.iter().filter(|p| meets(p, &prime_thresholds)).cloned().collect(),
    }
}

fn indices(alive: &[Vec<bool>]) -> Vec<Vec<usize>> {
    alive
        .iter()
        .map(|row| row.iter().enumerate().filter(|(_, &a)| a).map(|(s, _)| s).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;

    #[test]
    fn reverse_traveler_rounds() {
        let g = builtin::reverse_traveler(5, Rational::new(1, 2)).unwrap();
        let r = oracle(&g);
        assert_eq!(r.rounds.len(), 4);
        assert_eq!(r.survivors, vec![vec![4], vec![4]]);
        assert_eq!(r.ir_prime, vec![Profile(vec![4, 4])]);
    }

    #[test]
    fn ex2_everything_survives_but_bd_is_not_ir() {
        let r = oracle(&builtin::ex2());
        assert!(r.rounds.is_empty());
        assert_eq!(r.ir.len(), 3);
        assert!(!r.ir.contains(&Profile(vec![1, 1])));
    }
}
