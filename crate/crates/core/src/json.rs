//! JSON encodings shared by the file formats: rationals, games,
//! restrictions and profiles.
//!
//! Game documents look like
//! `{"players": [...], "strategies": [[...], ...], "payoffs": <nested>}`
//! where `payoffs` is nested once per player (indexed by that player's
//! strategy) and the innermost level is an array with one utility per
//! player. Utilities are `"num/den"` strings or plain integers.
//! Serialization is canonical: sorted keys, lowest-terms strings.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::game::{Game, Profile, ProductIter, Restriction};
use crate::rational::Rational;

pub(crate) fn rational_from_value(value: &Value, path: &str) -> Result<Rational> {
    match value {
        Value::String(s) => s
            .parse::<Rational>()
            .map_err(|e| Error::parse(path, e.to_string())),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from(i))
            } else if let Some(u) = n.as_u64() {
                u.to_string()
                    .parse::<Rational>()
                    .map_err(|e| Error::parse(path, e.to_string()))
            } else {
                Err(Error::parse(
                    path,
                    format!("{n} is not an integer; write fractions as \"num/den\" strings"),
                ))
            }
        }
        other => Err(Error::parse(
            path,
            format!("expected a rational, found {}", kind(other)),
        )),
    }
}

pub(crate) fn rational_to_value(r: &Rational) -> Value {
    Value::String(r.to_canonical_string())
}

pub(crate) fn kind(value: &Value) -> &'static str {
    match value {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

pub(crate) fn as_object<'a>(value: &'a Value, path: &str) -> Result<&'a Map<String, Value>> {
    value
        .as_object()
        .ok_or_else(|| Error::parse(path, format!("expected an object, found {}", kind(value))))
}

pub(crate) fn as_array<'a>(value: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    value
        .as_array()
        .ok_or_else(|| Error::parse(path, format!("expected an array, found {}", kind(value))))
}

pub(crate) fn as_index(value: &Value, path: &str) -> Result<usize> {
    value
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| {
            Error::parse(
                path,
                format!("expected a nonnegative integer, found {}", kind(value)),
            )
        })
}

pub(crate) fn check_fields(obj: &Map<String, Value>, allowed: &[&str], path: &str) -> Result<()> {
    for key in obj.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(Error::parse(
                format!("{path}.{key}"),
                format!("unknown field {key:?}"),
            ));
        }
    }
    Ok(())
}

pub(crate) fn required<'a>(obj: &'a Map<String, Value>, key: &str, path: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::parse(path, format!("missing field {key:?}")))
}

pub(crate) fn parse_text(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse("$", format!("invalid JSON: {e}")))
}

/// Parses a game document.
pub fn parse_game(text: &str) -> Result<Game> {
    game_from_value(&parse_text(text)?, "$")
}

pub fn game_from_value(value: &Value, path: &str) -> Result<Game> {
    let obj = as_object(value, path)?;
    check_fields(obj, &["players", "strategies", "payoffs"], path)?;

    let players_path = format!("{path}.players");
    let players = as_array(required(obj, "players", path)?, &players_path)?
        .iter()
        .enumerate()
        .map(|(i, v)| {
            v.as_str()
                .map(str::to_string)
                .ok_or_else(|| Error::parse(format!("{players_path}[{i}]"), "expected a string"))
        })
        .collect::<Result<Vec<_>>>()?;
    if players.is_empty() {
        return Err(Error::parse(players_path, "a game needs at least one player"));
    }

    let strategies_path = format!("{path}.strategies");
    let strategy_lists = as_array(required(obj, "strategies", path)?, &strategies_path)?;
    if strategy_lists.len() != players.len() {
        return Err(Error::parse(
            strategies_path,
            format!(
                "expected {} strategy lists, found {}",
                players.len(),
                strategy_lists.len()
            ),
        ));
    }
    let mut strategies = Vec::with_capacity(players.len());
    for (i, list) in strategy_lists.iter().enumerate() {
        let list_path = format!("{strategies_path}[{i}]");
        let names = as_array(list, &list_path)?
            .iter()
            .enumerate()
            .map(|(s, v)| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::parse(format!("{list_path}[{s}]"), "expected a string"))
            })
            .collect::<Result<Vec<_>>>()?;
        if names.is_empty() {
            return Err(Error::parse(list_path, "every player needs at least one strategy"));
        }
        strategies.push(names);
    }

    let counts: Vec<usize> = strategies.iter().map(Vec::len).collect();
    let payoff_root = required(obj, "payoffs", path)?;
    let n = players.len();
    let mut payoffs = Vec::new();
    let sets = counts.iter().map(|&c| (0..c).collect()).collect();
    for profile in ProductIter::new(sets) {
        let mut cursor = payoff_root;
        let mut cell_path = format!("{path}.payoffs");
        for (depth, &s) in profile.0.iter().enumerate() {
            let arr = as_array(cursor, &cell_path)?;
            if arr.len() != counts[depth] {
                return Err(Error::parse(
                    cell_path,
                    format!(
                        "expected {} entries for player {}, found {}",
                        counts[depth],
                        depth,
                        arr.len()
                    ),
                ));
            }
            cursor = &arr[s];
            cell_path = format!("{cell_path}[{s}]");
        }
        let cell = as_array(cursor, &cell_path)?;
        if cell.len() != n {
            return Err(Error::parse(
                cell_path,
                format!("expected {} utilities, found {}", n, cell.len()),
            ));
        }
        let utilities = cell
            .iter()
            .enumerate()
            .map(|(i, v)| rational_from_value(v, &format!("{cell_path}[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        payoffs.push(utilities);
    }
    Game::new(players, strategies, payoffs).map_err(|e| Error::parse(path, e.to_string()))
}

pub fn game_to_value(game: &Game) -> Value {
    fn nest(game: &Game, prefix: &mut Vec<usize>) -> Value {
        let depth = prefix.len();
        if depth == game.num_players() {
            let profile = Profile(prefix.clone());
            return Value::Array(game.payoff_vector(&profile).iter().map(rational_to_value).collect());
        }
        let mut out = Vec::with_capacity(game.num_strategies(depth));
        for s in 0..game.num_strategies(depth) {
            prefix.push(s);
            out.push(nest(game, prefix));
            prefix.pop();
        }
        Value::Array(out)
    }
    json!({
        "players": game.player_names(),
        "strategies": game.strategy_names(),
        "payoffs": nest(game, &mut Vec::new()),
    })
}

/// Canonical compact encoding; `parse_game(serialize_game(g)) == g`.
pub fn serialize_game(game: &Game) -> String {
    game_to_value(game).to_string()
}

pub fn restriction_to_value(z: &Restriction) -> Value {
    json!(z.to_vecs())
}

/// Reads `[[s, ...], ...]`, where each entry is a strategy index or name.
pub fn restriction_from_value(game: &Game, value: &Value, path: &str) -> Result<Restriction> {
    let lists = as_array(value, path)?;
    let mut sets = Vec::with_capacity(lists.len());
    for (player, list) in lists.iter().enumerate() {
        let list_path = format!("{path}[{player}]");
        let mut set = std::collections::BTreeSet::new();
        for (k, entry) in as_array(list, &list_path)?.iter().enumerate() {
            let entry_path = format!("{list_path}[{k}]");
            set.insert(strategy_from_value(game, player, entry, &entry_path)?);
        }
        sets.push(set);
    }
    Restriction::new(game, sets).map_err(|e| Error::parse(path, e.to_string()))
}

pub(crate) fn strategy_from_value(game: &Game, player: usize, value: &Value, path: &str) -> Result<usize> {
    if player >= game.num_players() {
        return Err(Error::parse(path, format!("player {player} out of range")));
    }
    match value {
        Value::String(s) => game
            .resolve_strategy(player, s)
            .ok_or_else(|| Error::parse(path, format!("unknown strategy {s:?} for player {player}"))),
        Value::Number(_) => {
            let idx = as_index(value, path)?;
            if idx < game.num_strategies(player) {
                Ok(idx)
            } else {
                Err(Error::parse(path, format!("strategy {idx} out of range for player {player}")))
            }
        }
        other => Err(Error::parse(path, format!("expected a strategy, found {}", kind(other)))),
    }
}

pub fn profile_to_value(p: &Profile) -> Value {
    json!(p.0)
}

pub fn profiles_to_value<'a>(ps: impl IntoIterator<Item = &'a Profile>) -> Value {
    Value::Array(ps.into_iter().map(profile_to_value).collect())
}
