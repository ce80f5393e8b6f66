//! Formulas of the epistemic language over a game, their concrete syntax,
//! and the model checker.
//!
//! Player numbers in formula text are 1-based (`RAT_1` is the first
//! player); the AST stores 0-based indices.

mod check;
mod parse;

use crate::error::{Error, Result};
use crate::game::{Game, Profile};

pub use check::{
    ccbr_check, extension, rat_holds, rat_holds_f_form, satisfies, states_of, Checker, Extension,
    StateSet,
};
pub use parse::parse_formula;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    /// Player plays the strategy.
    Play(usize, usize),
    Rat(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    B(usize, Box<Formula>),
    K(usize, Box<Formula>),
    EB(Box<Formula>),
    EBStar(Box<Formula>),
    CB(Box<Formula>),
    CBStar(Box<Formula>),
    KS,
    KR,
    KW,
    /// `SRAT^k_i`, or the conjunction over all players when no player is given.
    SRat(usize, Option<usize>),
    WRat(usize, Option<usize>),
    /// `RAT_1 ∧ … ∧ RAT_n`.
    RatAll,
    PlayProfile(Profile),
}

impl Formula {
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn b(i: usize, f: Formula) -> Formula {
        Formula::B(i, Box::new(f))
    }

    pub fn k(i: usize, f: Formula) -> Formula {
        Formula::K(i, Box::new(f))
    }

    pub fn cb(f: Formula) -> Formula {
        Formula::CB(Box::new(f))
    }

    pub fn cb_star(f: Formula) -> Formula {
        Formula::CBStar(Box::new(f))
    }

    pub fn eb(f: Formula) -> Formula {
        Formula::EB(Box::new(f))
    }

    /// Left-nested conjunction; `True` for an empty list.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::True,
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// True iff the formula avoids `K`, `EB*`, `CB*`, `KR` and the `SRAT`
    /// macros, i.e. it never mentions counterfactual belief.
    pub fn is_classical(&self) -> bool {
        use Formula::*;
        match self {
            True | Play(..) | Rat(_) | KS | KW | RatAll | PlayProfile(_) | WRat(..) => true,
            K(..) | EBStar(_) | CBStar(_) | KR | SRat(..) => false,
            Not(f) | B(_, f) | EB(f) | CB(f) => f.is_classical(),
            And(a, b) => a.is_classical() && b.is_classical(),
        }
    }

    /// Checks player and strategy indices against the game.
    pub fn check(&self, game: &Game) -> Result<()> {
        use Formula::*;
        let player = |i: usize| game.check_player(i);
        match self {
            True | KS | KR | KW | RatAll => Ok(()),
            Play(i, s) => {
                player(*i)?;
                if *s < game.num_strategies(*i) {
                    Ok(())
                } else {
                    Err(Error::Structure(format!("strategy {s} out of range for player {i}")))
                }
            }
            Rat(i) => player(*i),
            SRat(_, i) | WRat(_, i) => i.map_or(Ok(()), player),
            Not(f) | EB(f) | EBStar(f) | CB(f) | CBStar(f) => f.check(game),
            B(i, f) | K(i, f) => {
                player(*i)?;
                f.check(game)
            }
            And(a, b) => {
                a.check(game)?;
                b.check(game)
            }
            PlayProfile(p) => game.check_profile(p),
        }
    }

    /// Concrete syntax that [`parse_formula`] reads back to the same tree.
    pub fn to_text(&self, game: &Game) -> String {
        use Formula::*;
        let unary = |op: String, f: &Formula| format!("{op} {}", f.to_text(game));
        match self {
            True => "true".into(),
            Play(i, s) => format!("play_{}({})", i + 1, game.strategy_name(*i, *s)),
            Rat(i) => format!("RAT_{}", i + 1),
            Not(f) => format!("!{}", f.to_text(game)),
            And(a, b) => format!("({} & {})", a.to_text(game), b.to_text(game)),
            B(i, f) => unary(format!("B_{}", i + 1), f),
            K(i, f) => unary(format!("K_{}", i + 1), f),
            EB(f) => unary("EB".into(), f),
            EBStar(f) => unary("EB*".into(), f),
            CB(f) => unary("CB".into(), f),
            CBStar(f) => unary("CB*".into(), f),
            KS => "KS".into(),
            KR => "KR".into(),
            KW => "KW".into(),
            SRat(k, None) => format!("SRAT^{k}"),
            SRat(k, Some(i)) => format!("SRAT^{k}_{}", i + 1),
            WRat(k, None) => format!("WRAT^{k}"),
            WRat(k, Some(i)) => format!("WRAT^{k}_{}", i + 1),
            RatAll => "RAT".into(),
            PlayProfile(p) => {
                let names: Vec<&str> = p
                    .0
                    .iter()
                    .enumerate()
                    .map(|(i, &s)| game.strategy_name(i, s))
                    .collect();
                format!("play({})", names.join(","))
            }
        }
    }
}

fn tower(k: usize, i: usize, n: usize, counterfactual: bool) -> Formula {
    if k == 0 {
        return Formula::True;
    }
    let others = Formula::conj((0..n).filter(|&j| j != i).map(|j| tower(k - 1, j, n, counterfactual)));
    let belief = if counterfactual {
        Formula::k(i, others)
    } else {
        Formula::b(i, others)
    };
    Formula::and(Formula::Rat(i), belief)
}

/// Rewrites `SRAT`, `WRAT`, `RAT`, `EB*` and `play(σ⃗)` into core operators.
/// The result can be exponentially larger than the input.
pub fn expand_macros(formula: &Formula, game: &Game) -> Formula {
    use Formula::*;
    let n = game.num_players();
    let all = |f: &dyn Fn(usize) -> Formula| Formula::conj((0..n).map(f));
    match formula {
        True | Play(..) | Rat(_) | KS | KR | KW => formula.clone(),
        Not(f) => Formula::not(expand_macros(f, game)),
        And(a, b) => Formula::and(expand_macros(a, game), expand_macros(b, game)),
        B(i, f) => Formula::b(*i, expand_macros(f, game)),
        K(i, f) => Formula::k(*i, expand_macros(f, game)),
        EB(f) => Formula::eb(expand_macros(f, game)),
        CB(f) => Formula::cb(expand_macros(f, game)),
        CBStar(f) => Formula::cb_star(expand_macros(f, game)),
        EBStar(f) => {
            let inner = expand_macros(f, game);
            all(&|i| Formula::k(i, inner.clone()))
        }
        SRat(k, Some(i)) => tower(*k, *i, n, true),
        WRat(k, Some(i)) => tower(*k, *i, n, false),
        SRat(k, None) => all(&|i| tower(*k, i, n, true)),
        WRat(k, None) => all(&|i| tower(*k, i, n, false)),
        RatAll => all(&|i| Formula::Rat(i)),
        PlayProfile(p) => Formula::conj(p.0.iter().enumerate().map(|(i, &s)| Play(i, s))),
    }
}
