//! Parameterized constructors for the standard example games.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::game::Game;
use crate::rational::Rational;

fn two_players() -> Vec<String> {
    vec!["1".to_string(), "2".to_string()]
}

/// Prisoner's dilemma with cooperate/sue: suing gains `r`, being sued costs `p`.
///
/// `u(C,C) = (0,0)`, `u(C,S) = (-p,r)`, `u(S,C) = (r,-p)`, `u(S,S) = (r-p,r-p)`.
pub fn pd(r: Rational, p: Rational) -> Result<Game> {
    if !r.is_positive() || !p.is_positive() {
        return Err(Error::Precondition(format!(
            "pd requires r > 0 and p > 0 (got r={r}, p={p})"
        )));
    }
    let names = vec!["C".to_string(), "S".to_string()];
    Game::from_fn(two_players(), vec![names.clone(), names], |s| {
        let gain = |me: usize, other: usize| {
            let mut u = Rational::zero();
            if me == 1 {
                u = u + &r;
            }
            if other == 1 {
                u = u - &p;
            }
            u
        };
        vec![gain(s[0], s[1]), gain(s[1], s[0])]
    })
}

/// Both players announce a value in `1..=k`; both receive the smaller value
/// and whoever announced the larger one also receives `p`.
pub fn reverse_traveler(k: usize, p: Rational) -> Result<Game> {
    if k < 1 {
        return Err(Error::Precondition("reverse_traveler requires k >= 1".into()));
    }
    if !p.is_positive() || p >= Rational::one() {
        return Err(Error::Precondition(format!(
            "reverse_traveler requires 0 < p < 1 (got {p})"
        )));
    }
    let names: Vec<String> = (1..=k).map(|v| v.to_string()).collect();
    Game::from_fn(two_players(), vec![names.clone(), names], |s| {
        let x = Rational::from((s[0] + 1) as i64);
        let y = Rational::from((s[1] + 1) as i64);
        match s[0].cmp(&s[1]) {
            std::cmp::Ordering::Greater => vec![y.clone() + &p, y],
            std::cmp::Ordering::Less => vec![x.clone(), x + &p],
            std::cmp::Ordering::Equal => vec![x.clone(), x],
        }
    })
}

/// Row player chooses a or b, column player c or d; the column player is
/// indifferent everywhere.
pub fn ex2() -> Game {
    let table = [[100, 0], [100, 0], [150, 0], [50, 0]];
    Game::new(
        two_players(),
        vec![
            vec!["a".to_string(), "b".to_string()],
            vec!["c".to_string(), "d".to_string()],
        ],
        table
            .iter()
            .map(|row| row.iter().map(|&v| Rational::from(v)).collect())
            .collect(),
    )
    .expect("static table is well formed")
}

pub fn matching_pennies() -> Game {
    let names = vec!["H".to_string(), "T".to_string()];
    Game::from_fn(two_players(), vec![names.clone(), names], |s| {
        let v = if s[0] == s[1] { 1 } else { -1 };
        vec![Rational::from(v), Rational::from(-v)]
    })
    .expect("static table is well formed")
}

/// Every player receives `value` at every profile.
pub fn constant(strategy_counts: &[usize], value: Rational) -> Result<Game> {
    let players = (1..=strategy_counts.len()).map(|i| i.to_string()).collect();
    let names = strategy_counts
        .iter()
        .map(|&c| (0..c).map(|s| format!("s{s}")).collect())
        .collect();
    Game::from_fn(players, names, |_| vec![value.clone(); strategy_counts.len()])
}

/// The example games under their default parameters.
pub fn builtin_games() -> BTreeMap<&'static str, Game> {
    let half = Rational::new(1, 2);
    BTreeMap::from([
        ("pd", pd(Rational::from(1), Rational::from(2)).expect("valid parameters")),
        (
            "reverse_traveler",
            reverse_traveler(10, half).expect("valid parameters"),
        ),
        ("ex2", ex2()),
        ("matching_pennies", matching_pennies()),
    ])
}
