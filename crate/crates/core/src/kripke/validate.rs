use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde_json::{json, Value};

use super::{CounterfactualStructure, Distribution, Frame, ProbabilityStructure, StateId};
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Condition {
    /// Beliefs are certain of the player's own strategy.
    P1,
    /// Beliefs are certain of the player's own beliefs.
    P2,
    /// `f(ω,i,σ')` plays `σ'` for `i`.
    F1,
    /// `f(ω,i,s_i(ω)) = ω`.
    F2,
    /// Counterfactual beliefs are certain of themselves.
    SA,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::P1 => "P1",
            Condition::P2 => "P2",
            Condition::F1 => "F1",
            Condition::F2 => "F2",
            Condition::SA => "SA",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub condition: Condition,
    pub state: StateId,
    pub player: usize,
    pub strategy: Option<usize>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn to_value(&self) -> Value {
        let violations: Vec<Value> = self
            .violations
            .iter()
            .map(|v| {
                json!({
                    "condition": v.condition.to_string(),
                    "state": v.state,
                    "player": v.player,
                    "strategy": v.strategy,
                    "detail": v.detail,
                })
            })
            .collect();
        json!({"ok": self.ok(), "violations": violations})
    }
}

fn check_beliefs<F: Frame>(m: &F, report: &mut ValidationReport) {
    let n = m.game().num_players();
    for state in 0..m.num_states() {
        for player in 0..n {
            let own = m.strategies(state).get(player);
            let d = m.belief(player, state);
            for w in d.support() {
                if m.strategies(w).get(player) != own {
                    report.violations.push(Violation {
                        condition: Condition::P1,
                        state,
                        player,
                        strategy: None,
                        detail: format!(
                            "belief puts weight {} on state {w}, where the player plays {} instead of {}",
                            d.prob(w),
                            m.strategies(w).get(player),
                            own
                        ),
                    });
                }
            }
            for w in d.support() {
                if m.belief(player, w) != d {
                    report.violations.push(Violation {
                        condition: Condition::P2,
                        state,
                        player,
                        strategy: None,
                        detail: format!(
                            "belief puts weight {} on state {w}, where the player's belief differs",
                            d.prob(w)
                        ),
                    });
                }
            }
        }
    }
}

/// Checks P1 and P2 on a probability structure.
pub fn validate_probability(m: &ProbabilityStructure) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_beliefs(m, &mut report);
    report
}

/// Checks P1, P2, F1 and F2, reporting every violation.
pub fn validate_appropriate(m: &CounterfactualStructure) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_beliefs(m, &mut report);
    let game = m.game();
    for state in 0..m.num_states() {
        for player in 0..game.num_players() {
            for sigma in 0..game.num_strategies(player) {
                let to = m.closest(state, player, sigma);
                let played = m.strategies(to).get(player);
                if played != sigma {
                    report.violations.push(Violation {
                        condition: Condition::F1,
                        state,
                        player,
                        strategy: Some(sigma),
                        detail: format!("f points to state {to}, where the player plays {played}"),
                    });
                }
                if sigma == m.strategies(state).get(player) && to != state {
                    report.violations.push(Violation {
                        condition: Condition::F2,
                        state,
                        player,
                        strategy: Some(sigma),
                        detail: format!("f at the played strategy points to state {to}"),
                    });
                }
            }
        }
    }
    report
}

/// All counterfactual beliefs, indexed `[player][strategy][state]`.
pub(crate) fn counterfactual_table(m: &CounterfactualStructure) -> Vec<Vec<Vec<Distribution>>> {
    let game = m.game();
    (0..game.num_players())
        .map(|i| {
            (0..game.num_strategies(i))
                .map(|s| (0..m.num_states()).map(|w| m.counterfactual_belief(w, i, s)).collect())
                .collect()
        })
        .collect()
}

/// [`validate_appropriate`] plus the SA condition: each `PR^c_{i,σ'}(ω)` is
/// certain of states where `PR^c_{i,σ'}` is the same distribution.
pub fn validate_strongly_appropriate(m: &CounterfactualStructure) -> ValidationReport {
    let mut report = validate_appropriate(m);
    let table = counterfactual_table(m);
    for (player, per_strategy) in table.iter().enumerate() {
        for (sigma, per_state) in per_strategy.iter().enumerate() {
            for (state, c) in per_state.iter().enumerate() {
                for w in c.support() {
                    if per_state[w] != *c {
                        report.violations.push(Violation {
                            condition: Condition::SA,
                            state,
                            player,
                            strategy: Some(sigma),
                            detail: format!(
                                "counterfactual belief puts weight {} on state {w}, where it differs",
                                c.prob(w)
                            ),
                        });
                    }
                }
            }
        }
    }
    report
}

/// True iff a deviation by `i` never changes the other players' strategies
/// or beliefs.
pub fn respects_unilateral_deviations(m: &CounterfactualStructure) -> bool {
    let game = m.game();
    let n = game.num_players();
    (0..m.num_states()).all(|state| {
        (0..n).all(|i| {
            (0..game.num_strategies(i)).all(|sigma| {
                let to = m.closest(state, i, sigma);
                m.strategies(to).same_opponents(m.strategies(state), i)
                    && (0..n).all(|j| j == i || m.belief(j, to) == m.belief(j, state))
            })
        })
    })
}

/// Largest total variation distance, over `(ω, i, σ')`, between the
/// projections of `PR^c_{i,σ'}(ω)` and `PR_i(ω)` onto the opponents'
/// strategies and beliefs.
pub fn epsilon_closeness(m: &CounterfactualStructure) -> Rational {
    let game = m.game();
    let n = game.num_players();
    // Belief atoms are compared by identity of the distribution.
    let mut ids: Vec<HashMap<&Distribution, usize>> = vec![HashMap::new(); n];
    let mut belief_id = vec![vec![0usize; m.num_states()]; n];
    for j in 0..n {
        for w in 0..m.num_states() {
            let d = m.belief(j, w);
            let next = ids[j].len();
            belief_id[j][w] = *ids[j].entry(d).or_insert(next);
        }
    }
    let atom = |i: usize, w: StateId| -> (Vec<usize>, Vec<usize>) {
        let p = m.strategies(w);
        let strategies = (0..n).filter(|&j| j != i).map(|j| p.get(j)).collect();
        let beliefs = (0..n).filter(|&j| j != i).map(|j| belief_id[j][w]).collect();
        (strategies, beliefs)
    };
    let mut eps = Rational::zero();
    for state in 0..m.num_states() {
        for i in 0..n {
            let actual = m.belief(i, state);
            for sigma in 0..game.num_strategies(i) {
                let cf = m.counterfactual_belief(state, i, sigma);
                let mut diff: BTreeMap<(Vec<usize>, Vec<usize>), Rational> = BTreeMap::new();
                for (w, p) in actual.iter() {
                    *diff.entry(atom(i, w)).or_default() += p;
                }
                for (w, p) in cf.iter() {
                    *diff.entry(atom(i, w)).or_default() += -p;
                }
                let l1: Rational = diff.values().map(Rational::abs).sum();
                let tv = l1 * Rational::new(1, 2);
                if tv > eps {
                    eps = tv;
                }
            }
        }
    }
    eps
}
