//! Builders for the structures behind the characterization results:
//! a strongly appropriate structure with a CCBR state for every minimax
//! rationalizable profile (optionally also satisfying KW), a flat structure
//! with common belief of rationality for every individually rational
//! profile, and the lift of a probability structure to a counterfactual
//! structure that respects unilateral deviations.
//!
//! Every builder model-checks its own output and reports
//! [`Error::Construction`] if the result does not have the promised
//! properties.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde_json::{json, Value};

use crate::domination::{check_z_sets, ir_prime, ir_set};
use crate::error::{Error, Result};
use crate::game::{Game, Profile, Restriction};
use crate::json::profile_to_value;
use crate::kripke::{
    respects_unilateral_deviations, validate_probability, validate_strongly_appropriate,
    CounterfactualStructure, Distribution, ProbabilityStructure, StateId, ValidationReport,
};
use crate::logic::{ccbr_check, Checker, Formula};
use crate::rational::Rational;
use crate::rationalizability::{join, opponent_profiles};

/// Tie-breaking order on opponent sub-profiles for argmax*/argmin*.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TotalOrder {
    /// Lexicographic by player, then strategy index; the maximum wins.
    #[default]
    Lexicographic,
    /// The reverse of [`TotalOrder::Lexicographic`].
    Reversed,
}

impl TotalOrder {
    pub fn compare(&self, a: &[usize], b: &[usize]) -> Ordering {
        match self {
            TotalOrder::Lexicographic => a.cmp(b),
            TotalOrder::Reversed => b.cmp(a),
        }
    }

    /// The order-maximum among the candidates attaining the best value.
    fn extremal(
        &self,
        candidates: &[Vec<usize>],
        value: impl Fn(&[usize]) -> Rational,
        maximize: bool,
    ) -> Vec<usize> {
        let mut best: Option<(Rational, &Vec<usize>)> = None;
        for c in candidates {
            let v = value(c);
            let replace = match &best {
                None => true,
                Some((bv, bc)) => {
                    let by_value = if maximize { v.cmp(bv) } else { bv.cmp(&v) };
                    by_value == Ordering::Greater
                        || (by_value == Ordering::Equal && self.compare(c, bc) == Ordering::Greater)
                }
            };
            if replace {
                best = Some((v, c));
            }
        }
        best.expect("candidate set is nonempty").1.clone()
    }
}

/// Which base state a lifted state copies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LiftBase {
    Base(StateId),
    /// A self-believing state added for this profile.
    Added(Profile),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaggedState {
    /// A state where everyone is rational at every level.
    W0(Profile),
    /// A state reached when the player deviates.
    Wi(usize, Profile),
    Lifted { profile: Profile, base: LiftBase },
    /// One state per profile.
    Flat(Profile),
}

impl TaggedState {
    pub fn to_value(&self) -> Value {
        match self {
            TaggedState::W0(p) => json!({"kind": "W0", "profile": profile_to_value(p)}),
            TaggedState::Wi(i, p) => json!({"kind": "W", "player": i, "profile": profile_to_value(p)}),
            TaggedState::Flat(p) => json!({"kind": "flat", "profile": profile_to_value(p)}),
            TaggedState::Lifted { profile, base } => match base {
                LiftBase::Base(w) => {
                    json!({"kind": "lifted", "profile": profile_to_value(profile), "base": w})
                }
                LiftBase::Added(q) => json!({
                    "kind": "lifted",
                    "profile": profile_to_value(profile),
                    "added": profile_to_value(q),
                }),
            },
        }
    }
}

#[derive(Clone, Debug)]
pub struct Witness {
    pub structure: CounterfactualStructure,
    pub designated: StateId,
    pub tags: Vec<TaggedState>,
}

impl Witness {
    /// `{"designated": state, "tags": [...]}`.
    pub fn sidecar(&self) -> Value {
        json!({
            "designated": self.designated,
            "tags": self.tags.iter().map(TaggedState::to_value).collect::<Vec<_>>(),
        })
    }
}

#[derive(Clone, Debug)]
pub struct Lift {
    pub structure: CounterfactualStructure,
    pub tags: Vec<TaggedState>,
    /// Base state `ω` to the lifted state `(s(ω), ω)`.
    pub state_map: Vec<StateId>,
}

fn summarize(report: &ValidationReport) -> String {
    let shown: Vec<String> = report
        .violations
        .iter()
        .take(5)
        .map(|v| format!("{} at state {} player {}: {}", v.condition, v.state, v.player, v.detail))
        .collect();
    let more = report.violations.len().saturating_sub(shown.len());
    let mut s = shown.join("; ");
    if more > 0 {
        s.push_str(&format!("; and {more} more"));
    }
    s
}

fn require_strong(m: &CounterfactualStructure) -> Result<()> {
    let report = validate_strongly_appropriate(m);
    if report.ok() {
        Ok(())
    } else {
        Err(Error::Construction(format!(
            "output is not strongly appropriate: {}",
            summarize(&report)
        )))
    }
}

/// Number of states [`build_ccbr_witness`] produces for `z`.
pub fn ccbr_witness_size(game: &Game, z: &Restriction) -> usize {
    let others: usize = (0..game.num_players())
        .map(|i| z.num_profiles() / z.set(i).len() * game.num_strategies(i))
        .sum();
    z.num_profiles() + others
}

fn nsd_structure(
    game: &Game,
    profile: &Profile,
    z: &Restriction,
    order: TotalOrder,
    know_world: bool,
) -> Result<Witness> {
    let n = game.num_players();
    // Blocks: None is W^0, Some(i) is W^i.
    let mut tags = Vec::new();
    let mut index: HashMap<(Option<usize>, Profile), StateId> = HashMap::new();
    for p in z.profiles() {
        index.insert((None, p.clone()), tags.len());
        tags.push(TaggedState::W0(p));
    }
    for i in 0..n {
        let full = z.with_set(i, (0..game.num_strategies(i)).collect());
        for p in full.profiles() {
            index.insert((Some(i), p.clone()), tags.len());
            tags.push(TaggedState::Wi(i, p));
        }
    }
    let state = |block: Option<usize>, p: Profile| -> StateId { index[&(block, p)] };

    let opponents: Vec<Vec<Vec<usize>>> = (0..n).map(|j| opponent_profiles(z, j)).collect();
    let worst: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|j| {
            (0..game.num_strategies(j))
                .map(|s| order.extremal(&opponents[j], |t| game.payoff(&join(j, s, t), j).clone(), false))
                .collect()
        })
        .collect();
    let best: Vec<Vec<Option<Vec<usize>>>> = (0..n)
        .map(|j| {
            (0..game.num_strategies(j))
                .map(|s| {
                    z.contains(j, s).then(|| {
                        order.extremal(&opponents[j], |t| game.payoff(&join(j, s, t), j).clone(), true)
                    })
                })
                .collect()
        })
        .collect();

    let designated = state(None, profile.clone());
    let mut s = Vec::with_capacity(tags.len());
    let mut f = Vec::with_capacity(tags.len());
    let mut beliefs: Vec<Vec<Distribution>> = vec![Vec::with_capacity(tags.len()); n];
    for (w, tag) in tags.iter().enumerate() {
        let (block, p) = match tag {
            TaggedState::W0(p) => (None, p),
            TaggedState::Wi(i, p) => (Some(*i), p),
            _ => unreachable!("only W states are built here"),
        };
        s.push(p.clone());
        f.push(
            (0..n)
                .map(|j| {
                    (0..game.num_strategies(j))
                        .map(|x| {
                            if x == p.get(j) {
                                w
                            } else {
                                state(Some(j), join(j, x, &worst[j][x]))
                            }
                        })
                        .collect()
                })
                .collect(),
        );
        for (j, row) in beliefs.iter_mut().enumerate() {
            let own = p.get(j);
            let target = if know_world && w == designated {
                w
            } else if block == Some(j) {
                state(Some(j), join(j, own, &worst[j][own]))
            } else {
                let t = best[j][own].as_ref().expect("non-deviating players play inside z");
                state(None, join(j, own, t))
            };
            row.push(Distribution::point(target));
        }
    }
    let structure = CounterfactualStructure::new(game.clone(), s, f, beliefs)?;
    Ok(Witness {
        structure,
        designated,
        tags,
    })
}

fn check_z(game: &Game, profile: &Profile, z: &Restriction) -> Result<()> {
    check_z_sets(game, profile, z).map_err(|v| Error::Precondition(v.to_string()))
}

/// A strongly appropriate structure with a state playing `profile` where
/// `SRAT^k` holds for every `k`. `z` must witness minimax rationalizability
/// of `profile`.
pub fn build_ccbr_witness(game: &Game, profile: &Profile, z: &Restriction, order: TotalOrder) -> Result<Witness> {
    check_z(game, profile, z)?;
    let w = nsd_structure(game, profile, z, order, false)?;
    require_strong(&w.structure)?;
    if !ccbr_check(&w.structure, w.designated).0 {
        return Err(Error::Construction("CCBR fails at the designated state".into()));
    }
    Ok(w)
}

/// As [`build_ccbr_witness`], with every player certain of the designated
/// state there, so KW also holds. Requires `profile ∈ IR'(z)`.
pub fn build_kw_witness(game: &Game, profile: &Profile, z: &Restriction, order: TotalOrder) -> Result<Witness> {
    check_z(game, profile, z)?;
    if !ir_prime(game, z)?.contains(profile) {
        return Err(Error::Precondition(format!(
            "{} is not individually rational against deviations to any strategy within z",
            game.display_profile(profile)
        )));
    }
    let w = nsd_structure(game, profile, z, order, true)?;
    require_strong(&w.structure)?;
    let mut checker = Checker::new(&w.structure);
    if !checker.holds(w.designated, &Formula::KW)? || !checker.ccbr(w.designated)?.0 {
        return Err(Error::Construction("KW and CCBR do not both hold at the designated state".into()));
    }
    Ok(w)
}

/// One state per profile with self point beliefs; a deviator expects the
/// others to punish with the worst response over the full game. Requires
/// `profile` to be individually rational.
pub fn build_ir_witness(game: &Game, profile: &Profile, order: TotalOrder) -> Result<Witness> {
    game.check_profile(profile)?;
    if !ir_set(game).contains(profile) {
        return Err(Error::Precondition(format!(
            "{} is not individually rational",
            game.display_profile(profile)
        )));
    }
    let n = game.num_players();
    let full = Restriction::full(game);
    let opponents: Vec<Vec<Vec<usize>>> = (0..n).map(|j| opponent_profiles(&full, j)).collect();
    let punish: Vec<Vec<Profile>> = (0..n)
        .map(|j| {
            (0..game.num_strategies(j))
                .map(|x| {
                    let t = order.extremal(&opponents[j], |t| game.payoff(&join(j, x, t), j).clone(), false);
                    join(j, x, &t)
                })
                .collect()
        })
        .collect();
    let s: Vec<Profile> = game.profiles().collect();
    let f = s
        .iter()
        .enumerate()
        .map(|(w, p)| {
            (0..n)
                .map(|j| {
                    (0..game.num_strategies(j))
                        .map(|x| if x == p.get(j) { w } else { game.profile_index(&punish[j][x]) })
                        .collect()
                })
                .collect()
        })
        .collect();
    let beliefs = vec![(0..s.len()).map(Distribution::point).collect(); n];
    let tags = s.iter().cloned().map(TaggedState::Flat).collect();
    let structure = CounterfactualStructure::new(game.clone(), s, f, beliefs)?;
    let designated = game.profile_index(profile);
    require_strong(&structure)?;
    let goal = Formula::conj([
        Formula::KW,
        Formula::PlayProfile(profile.clone()),
        Formula::cb(Formula::RatAll),
    ]);
    if !Checker::new(&structure).holds(designated, &goal)? {
        return Err(Error::Construction(
            "KW, play and CB(RAT) do not all hold at the designated state".into(),
        ));
    }
    Ok(Witness {
        structure,
        designated,
        tags,
    })
}

/// True iff every player is certain of `state` at `state`.
fn self_believing(base: &ProbabilityStructure, state: StateId) -> bool {
    (0..base.game().num_players()).all(|i| base.belief(i, state).prob(state).is_one())
}

/// Lifts a probability structure to a strongly appropriate counterfactual
/// structure that respects unilateral deviations, with `(s(ω), ω)`
/// satisfying the same classical formulas as `ω`.
///
/// States are pairs `(σ⃗, ω)` with `ω` ranging over the base states plus
/// one added self-believing state for each profile that lacks one. At
/// `(σ⃗, ω)` player `j` keeps its own strategy `σ_j` and believes the
/// others play as in its base belief at `ω`:
/// `PR'_j(σ⃗, ω) = Σ_{ω''} PR_j(ω)(ω'') · δ((σ_j, s_{-j}(ω'')), ω'')`.
pub fn lift_unilateral(base: &ProbabilityStructure) -> Result<Lift> {
    let report = validate_probability(base);
    if !report.ok() {
        return Err(Error::Precondition(format!(
            "base structure is not appropriate: {}",
            summarize(&report)
        )));
    }
    let game = base.game();
    let n = game.num_players();
    let profiles: Vec<Profile> = game.profiles().collect();
    let np = profiles.len();

    // Augmented base: original states, then added ones.
    let mut aug_s: Vec<Profile> = base.strategy_map().to_vec();
    let mut aug_beliefs: Vec<Vec<Distribution>> = base.belief_table().to_vec();
    let mut aug_tags: Vec<LiftBase> = (0..base.num_states()).map(LiftBase::Base).collect();
    for p in &profiles {
        let present = (0..base.num_states()).any(|w| base.strategies(w) == p && self_believing(base, w));
        if !present {
            let w = aug_s.len();
            aug_s.push(p.clone());
            for row in aug_beliefs.iter_mut() {
                row.push(Distribution::point(w));
            }
            aug_tags.push(LiftBase::Added(p.clone()));
        }
    }

    let idx = |a: StateId, p: &Profile| a * np + game.profile_index(p);
    let total = aug_s.len() * np;
    let mut s = Vec::with_capacity(total);
    let mut f = Vec::with_capacity(total);
    let mut beliefs: Vec<Vec<Distribution>> = vec![Vec::with_capacity(total); n];
    let mut tags = Vec::with_capacity(total);
    for (a, base_tag) in aug_tags.iter().enumerate() {
        for p in &profiles {
            s.push(p.clone());
            tags.push(TaggedState::Lifted {
                profile: p.clone(),
                base: base_tag.clone(),
            });
            f.push(
                (0..n)
                    .map(|i| (0..game.num_strategies(i)).map(|x| idx(a, &p.with(i, x))).collect())
                    .collect(),
            );
            for (j, row) in beliefs.iter_mut().enumerate() {
                let d = aug_beliefs[j][a].pushforward(|w| idx(w, &aug_s[w].with(j, p.get(j))));
                row.push(d);
            }
        }
    }
    let structure = CounterfactualStructure::new(game.clone(), s, f, beliefs)?;
    require_strong(&structure)?;
    if !respects_unilateral_deviations(&structure) {
        return Err(Error::Construction("lift does not respect unilateral deviations".into()));
    }
    let state_map = (0..base.num_states()).map(|w| idx(w, base.strategies(w))).collect();
    Ok(Lift {
        structure,
        tags,
        state_map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::domination::nsd_fixpoint;
    use crate::kripke::{epsilon_closeness, validate_appropriate};

    fn pd() -> Game {
        builtin::pd(Rational::from(1), Rational::from(2)).unwrap()
    }

    #[test]
    fn order_picks_maximum_among_ties() {
        let cands = vec![vec![0, 1], vec![1, 0], vec![0, 0]];
        let v = |_: &[usize]| Rational::zero();
        assert_eq!(TotalOrder::Lexicographic.extremal(&cands, v, true), vec![1, 0]);
        assert_eq!(TotalOrder::Reversed.extremal(&cands, v, false), vec![0, 0]);
        let v = |t: &[usize]| Rational::from(t[1] as i64);
        assert_eq!(TotalOrder::Lexicographic.extremal(&cands, v, true), vec![0, 1]);
    }

    #[test]
    fn pd_cooperation_survives_in_the_ccbr_witness() {
        let g = pd();
        let z = Restriction::full(&g);
        let w = build_ccbr_witness(&g, &Profile(vec![0, 0]), &z, TotalOrder::Lexicographic).unwrap();
        assert_eq!(w.structure.num_states(), ccbr_witness_size(&g, &z));
        assert_eq!(w.structure.num_states(), 12);
        // deviating to S is believed to meet S
        let d = w.structure.counterfactual_belief(w.designated, 0, 1);
        let target = d.support().next().unwrap();
        assert_eq!(d.support_len(), 1);
        assert_eq!(w.tags[target], TaggedState::Wi(0, Profile(vec![1, 1])));
        assert!(!respects_unilateral_deviations(&w.structure));
    }

    #[test]
    fn reverse_traveler_witness() {
        let g = builtin::reverse_traveler(10, Rational::new(1, 2)).unwrap();
        let z = nsd_fixpoint(&g).final_restriction().clone();
        let profile = Profile(vec![9, 9]);
        let w = build_ccbr_witness(&g, &profile, &z, TotalOrder::Lexicographic).unwrap();
        assert_eq!(ccbr_check(&w.structure, w.designated).0, true);
        assert!(!respects_unilateral_deviations(&w.structure));
        let kw = build_kw_witness(&g, &profile, &z, TotalOrder::Lexicographic).unwrap();
        assert!(Checker::new(&kw.structure).holds(kw.designated, &Formula::KW).unwrap());
    }

    #[test]
    fn ex2_preconditions() {
        let g = builtin::ex2();
        let z = Restriction::full(&g);
        let bd = Profile(vec![1, 1]);
        assert!(build_ccbr_witness(&g, &bd, &z, TotalOrder::Lexicographic).is_ok());
        assert!(matches!(
            build_kw_witness(&g, &bd, &z, TotalOrder::Lexicographic),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            build_ir_witness(&g, &bd, TotalOrder::Lexicographic),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn invalid_z_names_the_condition() {
        let g = builtin::reverse_traveler(3, Rational::new(1, 2)).unwrap();
        let err = build_ccbr_witness(&g, &Profile(vec![0, 0]), &Restriction::full(&g), TotalOrder::Lexicographic)
            .unwrap_err();
        assert!(err.to_string().contains("max-min"), "{err}");
    }

    #[test]
    fn ir_witness_for_pd() {
        let g = pd();
        let w = build_ir_witness(&g, &Profile(vec![0, 0]), TotalOrder::Lexicographic).unwrap();
        assert_eq!(w.designated, 0);
        assert!(validate_appropriate(&w.structure).ok());
        assert_eq!(epsilon_closeness(&w.structure), Rational::one());
    }

    #[test]
    fn constant_game_ir_witness_everywhere() {
        let g = builtin::constant(&[2, 3], Rational::new(1, 3)).unwrap();
        for p in g.profiles() {
            build_ir_witness(&g, &p, TotalOrder::Reversed).unwrap();
        }
    }

    fn two_state_pd_base() -> ProbabilityStructure {
        // player 1 unsure whether player 2 cooperates; player 2 certain of the state
        let g = pd();
        let half = Distribution::uniform(&[0, 1]).unwrap();
        ProbabilityStructure::new(
            g,
            vec![Profile(vec![0, 0]), Profile(vec![0, 1])],
            vec![
                vec![half.clone(), half],
                vec![Distribution::point(0), Distribution::point(1)],
            ],
        )
        .unwrap()
    }

    #[test]
    fn lift_counts_added_states() {
        let base = two_state_pd_base();
        let lift = lift_unilateral(&base).unwrap();
        // neither base state is self-believing for player 1, so all four profiles get one
        assert_eq!(lift.structure.num_states(), 4 * (2 + 4));
        assert_eq!(lift.state_map, vec![0, 5]);
        assert_eq!(epsilon_closeness(&lift.structure), Rational::zero());
    }

    #[test]
    fn lift_rejects_inappropriate_base() {
        let g = pd();
        let base = ProbabilityStructure::new(
            g,
            vec![Profile(vec![0, 0]), Profile(vec![1, 0])],
            vec![
                vec![Distribution::point(1), Distribution::point(1)],
                vec![Distribution::point(0), Distribution::point(1)],
            ],
        )
        .unwrap();
        assert!(matches!(lift_unilateral(&base), Err(Error::Precondition(_))));
    }

    /// The belief rule that sends every off-diagonal state `(σ⃗, ω)` to a
    /// point mass on `(σ⃗, ω_σ⃗)` fails to respect unilateral deviations.
    #[test]
    fn point_mass_off_diagonal_rule_breaks_unilateral_respect() {
        let g = pd();
        // base: one state per profile, all self-believing
        let profiles: Vec<Profile> = g.profiles().collect();
        let np = profiles.len();
        let idx = |a: usize, p: &Profile| a * np + g.profile_index(p);
        let mut s = Vec::new();
        let mut f = Vec::new();
        let mut beliefs = vec![Vec::new(), Vec::new()];
        for a in 0..np {
            for p in &profiles {
                s.push(p.clone());
                f.push(
                    (0..2)
                        .map(|i| (0..2).map(|x| idx(a, &p.with(i, x))).collect())
                        .collect::<Vec<Vec<usize>>>(),
                );
                for row in beliefs.iter_mut() {
                    let target = if *p == profiles[a] {
                        idx(a, p)
                    } else {
                        idx(g.profile_index(p), p)
                    };
                    row.push(Distribution::point(target));
                }
            }
        }
        let m = CounterfactualStructure::new(g, s, f, beliefs).unwrap();
        assert!(validate_appropriate(&m).ok());
        assert!(!respects_unilateral_deviations(&m));
        // the corrected rule on the same base does respect them
        let base = m.to_probability_structure();
        let flat = ProbabilityStructure::new(
            base.game().clone(),
            profiles.clone(),
            vec![(0..np).map(Distribution::point).collect(); 2],
        )
        .unwrap();
        assert!(respects_unilateral_deviations(&lift_unilateral(&flat).unwrap().structure));
    }
}
