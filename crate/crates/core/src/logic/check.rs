//! Model checking by memoized bottom-up evaluation of extensions.
//!
//! `SRAT`/`WRAT` towers are evaluated level by level on per-player state
//! vectors rather than through their (exponentially large) expansions.

use std::collections::HashMap;
use std::rc::Rc;

use super::Formula;
use crate::error::{Error, Result};
use crate::kripke::{CounterfactualStructure, Distribution, Frame, StateId};
use crate::rational::Rational;

/// Membership vector indexed by state.
pub type StateSet = Vec<bool>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    pub formula: Formula,
    pub states: Vec<StateId>,
}

pub struct Checker<'a, F: Frame + ?Sized> {
    frame: &'a F,
    cache: HashMap<Formula, Rc<StateSet>>,
    rat: Option<Rc<Vec<StateSet>>>,
    /// `levels[k][i]` is the extension of `SRAT^k_i` (or `WRAT^k_i`).
    srat: Vec<Vec<StateSet>>,
    wrat: Vec<Vec<StateSet>>,
}

fn unsupported(what: &str) -> Error {
    Error::Unsupported(format!("{what} needs a closest-state function"))
}

fn intersect(a: &StateSet, b: &StateSet) -> StateSet {
    a.iter().zip(b).map(|(x, y)| *x && *y).collect()
}

impl<'a, F: Frame + ?Sized> Checker<'a, F> {
    pub fn new(frame: &'a F) -> Self {
        Checker {
            frame,
            cache: HashMap::new(),
            rat: None,
            srat: Vec::new(),
            wrat: Vec::new(),
        }
    }

    pub fn frame(&self) -> &F {
        self.frame
    }

    fn n_states(&self) -> usize {
        self.frame.num_states()
    }

    fn n_players(&self) -> usize {
        self.frame.game().num_players()
    }

    fn closest(&self, state: StateId, player: usize, strategy: usize, what: &str) -> Result<StateId> {
        self.frame
            .closest(state, player, strategy)
            .ok_or_else(|| unsupported(what))
    }

    /// `PR^c_{player,strategy}(state)`.
    pub fn counterfactual_belief(&self, state: StateId, player: usize, strategy: usize) -> Result<Distribution> {
        // Probe once so the pushforward below cannot fail.
        self.closest(state, player, strategy, "counterfactual belief")?;
        Ok(self
            .frame
            .belief(player, state)
            .pushforward(|w| self.frame.closest(w, player, strategy).expect("probed")))
    }

    /// `{ω : PR_i(ω)(X) = 1}`.
    pub fn believes(&self, player: usize, x: &StateSet) -> StateSet {
        (0..self.n_states())
            .map(|w| self.frame.belief(player, w).certain(|v| x[v]))
            .collect()
    }

    /// `{ω : PR^c_{i,σ'}(ω)(X) = 1 for every σ'}`.
    pub fn knows(&self, player: usize, x: &StateSet) -> Result<StateSet> {
        let strategies = self.frame.game().num_strategies(player);
        let mut out = Vec::with_capacity(self.n_states());
        for w in 0..self.n_states() {
            let mut ok = true;
            'outer: for sigma in 0..strategies {
                for v in self.frame.belief(player, w).support() {
                    if !x[self.closest(v, player, sigma, "K")?] {
                        ok = false;
                        break 'outer;
                    }
                }
            }
            out.push(ok);
        }
        Ok(out)
    }

    fn everyone(&self, x: &StateSet, counterfactual: bool) -> Result<StateSet> {
        let mut acc = vec![true; self.n_states()];
        for i in 0..self.n_players() {
            let part = if counterfactual {
                self.knows(i, x)?
            } else {
                self.believes(i, x)
            };
            acc = intersect(&acc, &part);
        }
        Ok(acc)
    }

    /// `∩_{k≥1} E^k(X)`, iterating `X_{t+1} = E(X_t) ∩ X_t` from `X_1 = E(X)`.
    fn common(&self, x: &StateSet, counterfactual: bool) -> Result<StateSet> {
        let mut cur = self.everyone(x, counterfactual)?;
        loop {
            let next = intersect(&self.everyone(&cur, counterfactual)?, &cur);
            if next == cur {
                return Ok(cur);
            }
            cur = next;
        }
    }

    fn expected_actual(&self, state: StateId, player: usize) -> Rational {
        let own = self.frame.strategies(state).get(player);
        self.expected_under(self.frame.belief(player, state), player, own)
    }

    fn expected_under(&self, d: &Distribution, player: usize, strategy: usize) -> Rational {
        let game = self.frame.game();
        let mut total = Rational::zero();
        for (w, p) in d.iter() {
            let u = game.deviation_payoff(self.frame.strategies(w), player, strategy);
            if p.is_one() {
                total += u;
            } else {
                total += p * u;
            }
        }
        total
    }

    /// `RAT_i` at `state`. With a closest-state function the alternatives are
    /// evaluated under counterfactual beliefs; without one, under the
    /// actual belief.
    pub fn rat_at(&self, state: StateId, player: usize) -> bool {
        let actual = self.expected_actual(state, player);
        let belief = self.frame.belief(player, state);
        (0..self.frame.game().num_strategies(player)).all(|sigma| {
            let alt = match self.frame.closest(state, player, sigma) {
                Some(_) => {
                    let cf = self
                        .counterfactual_belief(state, player, sigma)
                        .expect("frame has a closest-state function");
                    self.expected_under(&cf, player, sigma)
                }
                None => self.expected_under(belief, player, sigma),
            };
            alt <= actual
        })
    }

    /// `RAT_i` with each alternative's payoff computed at `f(ω', i, σ')`
    /// state by state, without forming the counterfactual belief.
    pub fn rat_at_f_form(&self, state: StateId, player: usize) -> Result<bool> {
        let game = self.frame.game();
        let actual = self.expected_actual(state, player);
        for sigma in 0..game.num_strategies(player) {
            let mut alt = Rational::zero();
            for (w, p) in self.frame.belief(player, state).iter() {
                let to = self.closest(w, player, sigma, "RAT f-form")?;
                alt += p * game.payoff(&self.frame.strategies(to).with(player, sigma), player);
            }
            if alt > actual {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn rat_sets(&mut self) -> Rc<Vec<StateSet>> {
        if self.rat.is_none() {
            let sets = (0..self.n_players())
                .map(|i| (0..self.n_states()).map(|w| self.rat_at(w, i)).collect())
                .collect();
            self.rat = Some(Rc::new(sets));
        }
        self.rat.clone().expect("just filled")
    }

    fn extend_tower(&mut self, k: usize, counterfactual: bool) -> Result<()> {
        let n = self.n_players();
        let all = vec![true; self.n_states()];
        let rat = self.rat_sets();
        loop {
            let levels = if counterfactual { &self.srat } else { &self.wrat };
            if levels.len() > k {
                return Ok(());
            }
            let next = match levels.last() {
                None => vec![all.clone(); n],
                Some(prev) => {
                    let prev = prev.clone();
                    let mut next = Vec::with_capacity(n);
                    for i in 0..n {
                        let others = (0..n)
                            .filter(|&j| j != i)
                            .fold(all.clone(), |acc, j| intersect(&acc, &prev[j]));
                        let belief = if counterfactual {
                            self.knows(i, &others)?
                        } else {
                            self.believes(i, &others)
                        };
                        next.push(intersect(&rat[i], &belief));
                    }
                    next
                }
            };
            if counterfactual {
                self.srat.push(next);
            } else {
                self.wrat.push(next);
            }
        }
    }

    /// Extension of `SRAT^k_i`.
    pub fn srat_level(&mut self, k: usize, player: usize) -> Result<StateSet> {
        self.extend_tower(k, true)?;
        Ok(self.srat[k][player].clone())
    }

    /// Extension of `WRAT^k_i`.
    pub fn wrat_level(&mut self, k: usize, player: usize) -> Result<StateSet> {
        self.extend_tower(k, false)?;
        Ok(self.wrat[k][player].clone())
    }

    fn tower_all(&mut self, k: usize, counterfactual: bool) -> Result<StateSet> {
        self.extend_tower(k, counterfactual)?;
        let levels = if counterfactual { &self.srat } else { &self.wrat };
        Ok(levels[k]
            .iter()
            .fold(vec![true; self.n_states()], |acc, x| intersect(&acc, x)))
    }

    /// First `k ≥ 1` at which every player's `SRAT^k` equals `SRAT^{k-1}`,
    /// and the joint extension at that level.
    pub fn srat_fixpoint(&mut self) -> Result<(usize, StateSet)> {
        self.tower_fixpoint(true)
    }

    pub fn wrat_fixpoint(&mut self) -> Result<(usize, StateSet)> {
        self.tower_fixpoint(false)
    }

    fn tower_fixpoint(&mut self, counterfactual: bool) -> Result<(usize, StateSet)> {
        let mut k = 1;
        loop {
            self.extend_tower(k, counterfactual)?;
            let levels = if counterfactual { &self.srat } else { &self.wrat };
            if levels[k] == levels[k - 1] {
                return Ok((k, self.tower_all(k, counterfactual)?));
            }
            k += 1;
        }
    }

    /// CCBR at `state`, with the stabilization level.
    pub fn ccbr(&mut self, state: StateId) -> Result<(bool, usize)> {
        let (k, set) = self.srat_fixpoint()?;
        Ok((set[state], k))
    }

    pub fn eval(&mut self, formula: &Formula) -> Result<Rc<StateSet>> {
        if let Some(hit) = self.cache.get(formula) {
            return Ok(hit.clone());
        }
        use Formula::*;
        let n_states = self.n_states();
        let n = self.n_players();
        let game = self.frame.game();
        let set: StateSet = match formula {
            True => vec![true; n_states],
            Play(i, s) => (0..n_states).map(|w| self.frame.strategies(w).get(*i) == *s).collect(),
            PlayProfile(p) => (0..n_states).map(|w| self.frame.strategies(w) == p).collect(),
            Rat(i) => self.rat_sets()[*i].clone(),
            RatAll => {
                let rat = self.rat_sets();
                rat.iter().fold(vec![true; n_states], |acc, x| intersect(&acc, x))
            }
            Not(f) => self.eval(f)?.iter().map(|x| !x).collect(),
            And(a, b) => {
                let a = self.eval(a)?;
                let b = self.eval(b)?;
                intersect(&a, &b)
            }
            B(i, f) => {
                let x = self.eval(f)?;
                self.believes(*i, &x)
            }
            K(i, f) => {
                let x = self.eval(f)?;
                self.knows(*i, &x)?
            }
            EB(f) => {
                let x = self.eval(f)?;
                self.everyone(&x, false)?
            }
            EBStar(f) => {
                let x = self.eval(f)?;
                self.everyone(&x, true)?
            }
            CB(f) => {
                let x = self.eval(f)?;
                self.common(&x, false)?
            }
            CBStar(f) => {
                let x = self.eval(f)?;
                self.common(&x, true)?
            }
            KS => (0..n_states)
                .map(|w| {
                    let s = self.frame.strategies(w);
                    (0..n).all(|i| {
                        self.frame
                            .belief(i, w)
                            .certain(|v| self.frame.strategies(v).same_opponents(s, i))
                    })
                })
                .collect(),
            KR => {
                let mut out = Vec::with_capacity(n_states);
                for w in 0..n_states {
                    let mut ok = true;
                    for i in 0..n {
                        for sigma in 0..game.num_strategies(i) {
                            let target = self.frame.strategies(self.closest(w, i, sigma, "KR")?);
                            let cf = self.counterfactual_belief(w, i, sigma)?;
                            ok &= cf.certain(|v| self.frame.strategies(v).same_opponents(target, i));
                        }
                    }
                    out.push(ok);
                }
                out
            }
            KW => (0..n_states)
                .map(|w| (0..n).all(|i| self.frame.belief(i, w).prob(w).is_one()))
                .collect(),
            SRat(k, Some(i)) => self.srat_level(*k, *i)?,
            WRat(k, Some(i)) => self.wrat_level(*k, *i)?,
            SRat(k, None) => self.tower_all(*k, true)?,
            WRat(k, None) => self.tower_all(*k, false)?,
        };
        let set = Rc::new(set);
        self.cache.insert(formula.clone(), set.clone());
        Ok(set)
    }

    pub fn holds(&mut self, state: StateId, formula: &Formula) -> Result<bool> {
        if state >= self.n_states() {
            return Err(Error::Structure(format!(
                "state {state} out of range ({} states)",
                self.n_states()
            )));
        }
        Ok(self.eval(formula)?[state])
    }

    pub fn extension(&mut self, formula: &Formula) -> Result<Extension> {
        let set = self.eval(formula)?;
        Ok(Extension {
            formula: formula.clone(),
            states: states_of(&set),
        })
    }

    /// Extensions of every distinct subformula, children before parents.
    pub fn explain(&mut self, formula: &Formula) -> Result<Vec<Extension>> {
        let mut order = Vec::new();
        collect_subformulas(formula, &mut order);
        order.into_iter().map(|f| self.extension(&f)).collect()
    }
}

fn collect_subformulas(f: &Formula, out: &mut Vec<Formula>) {
    use Formula::*;
    match f {
        Not(g) | B(_, g) | K(_, g) | EB(g) | EBStar(g) | CB(g) | CBStar(g) => collect_subformulas(g, out),
        And(a, b) => {
            collect_subformulas(a, out);
            collect_subformulas(b, out);
        }
        _ => {}
    }
    if !out.contains(f) {
        out.push(f.clone());
    }
}

pub fn states_of(set: &StateSet) -> Vec<StateId> {
    set.iter()
        .enumerate()
        .filter(|(_, x)| **x)
        .map(|(w, _)| w)
        .collect()
}

pub fn satisfies(m: &CounterfactualStructure, state: StateId, formula: &Formula) -> Result<bool> {
    formula.check(m.game())?;
    Checker::new(m).holds(state, formula)
}

pub fn extension(m: &CounterfactualStructure, formula: &Formula) -> Result<Extension> {
    formula.check(m.game())?;
    Checker::new(m).extension(formula)
}

pub fn rat_holds(m: &CounterfactualStructure, state: StateId, player: usize) -> bool {
    Checker::new(m).rat_at(state, player)
}

pub fn rat_holds_f_form(m: &CounterfactualStructure, state: StateId, player: usize) -> bool {
    Checker::new(m)
        .rat_at_f_form(state, player)
        .expect("counterfactual structures have a closest-state function")
}

/// Whether `SRAT^k` holds at `state` for every `k`, and the level at which
/// the tower stabilizes.
pub fn ccbr_check(m: &CounterfactualStructure, state: StateId) -> (bool, usize) {
    Checker::new(m)
        .ccbr(state)
        .expect("counterfactual structures have a closest-state function")
}
