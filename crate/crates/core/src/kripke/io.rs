//! Structure documents:
//! `{"game": <game or path>, "states": N, "s": [[strategy per player] per state],
//!   "f": [{"state", "player", "strategy", "to"}, ...],
//!   "beliefs": [[{"state": "num/den", ...} per state] per player]}`.
//! A `witness` field, as written by the witness builders, is ignored.

use std::path::Path;

use serde_json::{json, Map, Value};

use super::{CounterfactualStructure, Distribution, StateId};
use crate::error::{Error, Result};
use crate::game::{Game, Profile};
use crate::json::{
    as_array, as_index, as_object, check_fields, game_from_value, game_to_value, parse_game,
    parse_text, rational_from_value, rational_to_value, required, strategy_from_value,
};

pub fn structure_to_value(m: &CounterfactualStructure) -> Value {
    let game = m.game();
    let mut f = Vec::new();
    for state in 0..m.num_states() {
        for player in 0..game.num_players() {
            for strategy in 0..game.num_strategies(player) {
                f.push(json!({
                    "state": state,
                    "player": player,
                    "strategy": strategy,
                    "to": m.closest(state, player, strategy),
                }));
            }
        }
    }
    let beliefs: Vec<Value> = m
        .belief_table()
        .iter()
        .map(|per_state| {
            Value::Array(
                per_state
                    .iter()
                    .map(|d| {
                        let mut map = Map::new();
                        for (w, p) in d.iter() {
                            map.insert(w.to_string(), rational_to_value(p));
                        }
                        Value::Object(map)
                    })
                    .collect(),
            )
        })
        .collect();
    json!({
        "game": game_to_value(game),
        "states": m.num_states(),
        "s": m.strategy_map().iter().map(|p| json!(p.0)).collect::<Vec<_>>(),
        "f": f,
        "beliefs": beliefs,
    })
}

pub fn serialize_structure(m: &CounterfactualStructure) -> String {
    structure_to_value(m).to_string()
}

/// Parses a structure over a known game; the document's `game` field is
/// not consulted.
pub fn parse_structure(text: &str, game: &Game) -> Result<CounterfactualStructure> {
    structure_from_value(&parse_text(text)?, game)
}

/// Parses a structure whose `game` is inline or a path relative to `base_dir`.
pub fn load_structure(text: &str, base_dir: Option<&Path>) -> Result<CounterfactualStructure> {
    let value = parse_text(text)?;
    let game = structure_game(&value, base_dir)?;
    structure_from_value(&value, &game)
}

/// Resolves the `game` field of a structure document.
pub fn structure_game(value: &Value, base_dir: Option<&Path>) -> Result<Game> {
    let obj = as_object(value, "$")?;
    match required(obj, "game", "$")? {
        Value::String(path) => {
            let full = match base_dir {
                Some(dir) => dir.join(path),
                None => Path::new(path).to_path_buf(),
            };
            let text = std::fs::read_to_string(&full).map_err(|e| {
                Error::parse("$.game", format!("cannot read {}: {e}", full.display()))
            })?;
            parse_game(&text)
        }
        inline => game_from_value(inline, "$.game"),
    }
}

pub fn structure_from_value(value: &Value, game: &Game) -> Result<CounterfactualStructure> {
    let obj = as_object(value, "$")?;
    check_fields(obj, &["game", "states", "s", "f", "beliefs", "witness"], "$")?;
    let n = as_index(required(obj, "states", "$")?, "$.states")?;
    if n == 0 {
        return Err(Error::parse("$.states", "a structure needs at least one state"));
    }
    let in_range = |v: &Value, path: &str| -> Result<StateId> {
        let w = as_index(v, path)?;
        if w < n {
            Ok(w)
        } else {
            Err(Error::parse(path, format!("state {w} out of range ({n} states)")))
        }
    };

    let s_list = as_array(required(obj, "s", "$")?, "$.s")?;
    if s_list.len() != n {
        return Err(Error::parse(
            "$.s",
            format!("{} entries for {n} states", s_list.len()),
        ));
    }
    let mut s = Vec::with_capacity(n);
    for (state, entry) in s_list.iter().enumerate() {
        let path = format!("$.s[{state}]");
        let items = as_array(entry, &path)?;
        if items.len() != game.num_players() {
            return Err(Error::parse(
                &path,
                format!("{} strategies for {} players", items.len(), game.num_players()),
            ));
        }
        let profile = items
            .iter()
            .enumerate()
            .map(|(player, v)| strategy_from_value(game, player, v, &format!("{path}[{player}]")))
            .collect::<Result<Vec<_>>>()?;
        s.push(Profile(profile));
    }

    let mut f: Vec<Vec<Vec<Option<StateId>>>> = (0..n)
        .map(|_| {
            (0..game.num_players())
                .map(|i| vec![None; game.num_strategies(i)])
                .collect()
        })
        .collect();
    for (k, entry) in as_array(required(obj, "f", "$")?, "$.f")?.iter().enumerate() {
        let path = format!("$.f[{k}]");
        let e = as_object(entry, &path)?;
        check_fields(e, &["state", "player", "strategy", "to"], &path)?;
        let state = in_range(required(e, "state", &path)?, &format!("{path}.state"))?;
        let player = as_index(required(e, "player", &path)?, &format!("{path}.player"))?;
        if player >= game.num_players() {
            return Err(Error::parse(
                format!("{path}.player"),
                format!("player {player} out of range"),
            ));
        }
        let strategy = strategy_from_value(
            game,
            player,
            required(e, "strategy", &path)?,
            &format!("{path}.strategy"),
        )?;
        let to = in_range(required(e, "to", &path)?, &format!("{path}.to"))?;
        let slot = &mut f[state][player][strategy];
        if slot.is_some() {
            return Err(Error::parse(
                &path,
                format!("duplicate entry for state {state}, player {player}, strategy {strategy}"),
            ));
        }
        *slot = Some(to);
    }
    let mut table = Vec::with_capacity(n);
    for (state, per_player) in f.into_iter().enumerate() {
        let mut row = Vec::with_capacity(per_player.len());
        for (player, targets) in per_player.into_iter().enumerate() {
            let mut out = Vec::with_capacity(targets.len());
            for (strategy, t) in targets.into_iter().enumerate() {
                out.push(t.ok_or_else(|| {
                    Error::parse(
                        "$.f",
                        format!("missing entry for state {state}, player {player}, strategy {strategy}"),
                    )
                })?);
            }
            row.push(out);
        }
        table.push(row);
    }

    let b_list = as_array(required(obj, "beliefs", "$")?, "$.beliefs")?;
    if b_list.len() != game.num_players() {
        return Err(Error::parse(
            "$.beliefs",
            format!("{} entries for {} players", b_list.len(), game.num_players()),
        ));
    }
    let mut beliefs = Vec::with_capacity(b_list.len());
    for (player, per_state) in b_list.iter().enumerate() {
        let path = format!("$.beliefs[{player}]");
        let items = as_array(per_state, &path)?;
        if items.len() != n {
            return Err(Error::parse(&path, format!("{} entries for {n} states", items.len())));
        }
        let mut row = Vec::with_capacity(n);
        for (state, d) in items.iter().enumerate() {
            let path = format!("{path}[{state}]");
            let mut weights = Vec::new();
            for (key, w) in as_object(d, &path)? {
                let key_path = format!("{path}.{key}");
                let target: StateId = key
                    .parse()
                    .map_err(|_| Error::parse(&key_path, format!("{key:?} is not a state index")))?;
                if target >= n {
                    return Err(Error::parse(
                        &key_path,
                        format!("state {target} out of range ({n} states)"),
                    ));
                }
                weights.push((target, rational_from_value(w, &key_path)?));
            }
            row.push(Distribution::new(weights).map_err(|e| match e {
                Error::Structure(msg) => Error::parse(&path, msg),
                other => other,
            })?);
        }
        beliefs.push(row);
    }

    CounterfactualStructure::new(game.clone(), s, table, beliefs)
}
