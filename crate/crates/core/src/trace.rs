//! Records of iterated deletion procedures.

use serde_json::{json, Map, Value};

use crate::game::{Restriction, StrategyId};
use crate::json::{rational_to_value, restriction_to_value};
use crate::rationalizability::MixedStrategy;

/// What justified a deletion.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dominator {
    /// A pure strategy of the same player (minimax domination).
    Pure(usize),
    /// A mixture that strictly beats the deleted strategy everywhere.
    Mixed(MixedStrategy),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Deletion {
    pub strategy: StrategyId,
    pub dominator: Dominator,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionRound {
    pub before: Restriction,
    pub deleted: Vec<Deletion>,
    pub survivors: Restriction,
}

/// Rounds that removed at least one strategy, in order. A trace with no
/// rounds means the starting restriction was already a fixpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeletionTrace {
    pub start: Restriction,
    pub rounds: Vec<DeletionRound>,
}

impl DeletionTrace {
    pub fn final_restriction(&self) -> &Restriction {
        self.rounds
            .last()
            .map(|r| &r.survivors)
            .unwrap_or(&self.start)
    }

    pub fn num_rounds(&self) -> usize {
        self.rounds.len()
    }

    /// Survivors after `k` rounds; stays at the fixpoint for `k` past the end.
    pub fn survivors_after(&self, k: usize) -> &Restriction {
        if k == 0 {
            &self.start
        } else {
            self.rounds
                .get(k - 1)
                .map(|r| &r.survivors)
                .unwrap_or_else(|| self.final_restriction())
        }
    }

    /// `{"rounds": [{"deleted": [...], "survivors": [[...]]}], "survivors": [[...]]}`.
    pub fn to_value(&self) -> Value {
        let rounds: Vec<Value> = self
            .rounds
            .iter()
            .map(|round| {
                let deleted: Vec<Value> = round
                    .deleted
                    .iter()
                    .map(|d| {
                        json!({
                            "player": d.strategy.player,
                            "strategy": d.strategy.index,
                            "dominator": dominator_to_value(&d.dominator),
                        })
                    })
                    .collect();
                json!({
                    "deleted": deleted,
                    "survivors": restriction_to_value(&round.survivors),
                })
            })
            .collect();
        json!({
            "rounds": rounds,
            "survivors": restriction_to_value(self.final_restriction()),
        })
    }
}

fn dominator_to_value(d: &Dominator) -> Value {
    match d {
        Dominator::Pure(s) => json!(s),
        Dominator::Mixed(mix) => {
            let mut map = Map::new();
            for (s, w) in &mix.weights {
                map.insert(s.to_string(), rational_to_value(w));
            }
            Value::Object(map)
        }
    }
}
