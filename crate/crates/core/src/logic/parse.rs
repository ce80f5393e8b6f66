//! Recursive-descent parser for formula text.
//!
//! ```text
//! φ ::= "true" | "RAT" | "RAT_" INT | "play_" INT "(" NAME ")" | "play(" NAME ("," NAME)* ")"
//!     | "B_" INT φ | "K_" INT φ | "EB" φ | "EB*" φ | "CB" φ | "CB*" φ
//!     | "SRAT^" INT ["_" INT] | "WRAT^" INT ["_" INT] | "KS" | "KR" | "KW"
//!     | "!" φ | "(" φ ")" | φ "&" φ
//! ```

use super::Formula;
use crate::error::{Error, Result};
use crate::game::{Game, Profile};

pub fn parse_formula(text: &str, game: &Game) -> Result<Formula> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        game,
    };
    let f = p.conjunction()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.error(p.pos, format!("unexpected {:?}", p.chars[p.pos])));
    }
    Ok(f)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    game: &'a Game,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '^'
}

impl Parser<'_> {
    fn error(&self, pos: usize, message: impl Into<String>) -> Error {
        Error::Formula {
            column: pos + 1,
            message: message.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            let found = self.peek().map_or("end of input".to_string(), |x| format!("{x:?}"));
            Err(self.error(self.pos, format!("expected {c:?}, found {found}")))
        }
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut left = self.unary()?;
        loop {
            self.skip_ws();
            if self.peek() == Some('&') {
                self.pos += 1;
                let right = self.unary()?;
                left = Formula::and(left, right);
            } else {
                return Ok(left);
            }
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            None => Err(self.error(start, "unexpected end of input")),
            Some('!') => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some('(') => {
                self.pos += 1;
                let f = self.conjunction()?;
                self.expect(')')?;
                Ok(f)
            }
            Some(c) if is_word_char(c) => self.word(start),
            Some(c) => Err(self.error(start, format!("unexpected {c:?}"))),
        }
    }

    fn word(&mut self, start: usize) -> Result<Formula> {
        while self.peek().is_some_and(is_word_char) {
            self.pos += 1;
        }
        let mut word: String = self.chars[start..self.pos].iter().collect();
        if (word == "EB" || word == "CB") && self.peek() == Some('*') {
            self.pos += 1;
            word.push('*');
        }
        match word.as_str() {
            "true" => Ok(Formula::True),
            "RAT" => Ok(Formula::RatAll),
            "KS" => Ok(Formula::KS),
            "KR" => Ok(Formula::KR),
            "KW" => Ok(Formula::KW),
            "EB" => Ok(Formula::eb(self.unary()?)),
            "EB*" => Ok(Formula::EBStar(Box::new(self.unary()?))),
            "CB" => Ok(Formula::cb(self.unary()?)),
            "CB*" => Ok(Formula::cb_star(self.unary()?)),
            "play" => self.profile(start),
            _ => {
                if let Some(rest) = word.strip_prefix("RAT_") {
                    Ok(Formula::Rat(self.player(rest, start + 4)?))
                } else if let Some(rest) = word.strip_prefix("B_") {
                    let i = self.player(rest, start + 2)?;
                    Ok(Formula::b(i, self.unary()?))
                } else if let Some(rest) = word.strip_prefix("K_") {
                    let i = self.player(rest, start + 2)?;
                    Ok(Formula::k(i, self.unary()?))
                } else if let Some(rest) = word.strip_prefix("play_") {
                    let i = self.player(rest, start + 5)?;
                    self.expect('(')?;
                    let (name, at) = self.name()?;
                    let s = self.strategy(i, &name, at)?;
                    self.expect(')')?;
                    Ok(Formula::Play(i, s))
                } else if let Some(rest) = word.strip_prefix("SRAT^") {
                    let (k, i) = self.superscript(rest, start + 5)?;
                    Ok(Formula::SRat(k, i))
                } else if let Some(rest) = word.strip_prefix("WRAT^") {
                    let (k, i) = self.superscript(rest, start + 5)?;
                    Ok(Formula::WRat(k, i))
                } else if word.starts_with("SRAT") || word.starts_with("WRAT") {
                    Err(self.error(start + 4, "malformed superscript: expected '^' and a level"))
                } else {
                    Err(self.error(start, format!("unknown token {word:?}")))
                }
            }
        }
    }

    /// A 1-based player number starting at `at`.
    fn player(&self, digits: &str, at: usize) -> Result<usize> {
        let n: usize = digits
            .parse()
            .map_err(|_| self.error(at, format!("expected a player number, found {digits:?}")))?;
        if n == 0 || n > self.game.num_players() {
            return Err(self.error(
                at,
                format!("unknown player {n} (players are 1..{})", self.game.num_players()),
            ));
        }
        Ok(n - 1)
    }

    fn superscript(&self, rest: &str, at: usize) -> Result<(usize, Option<usize>)> {
        let (level, player) = match rest.split_once('_') {
            Some((l, p)) => (l, Some(p)),
            None => (rest, None),
        };
        let k: usize = level
            .parse()
            .map_err(|_| self.error(at, format!("malformed superscript {level:?}")))?;
        let i = match player {
            Some(p) => Some(self.player(p, at + level.len() + 1)?),
            None => None,
        };
        Ok((k, i))
    }

    /// A strategy name: everything up to `,` or `)`, trimmed.
    fn name(&mut self) -> Result<(String, usize)> {
        self.skip_ws();
        let start = self.pos;
        while self.peek().is_some_and(|c| c != ',' && c != ')') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        let name = name.trim().to_string();
        if name.is_empty() {
            return Err(self.error(start, "expected a strategy name"));
        }
        Ok((name, start))
    }

    fn strategy(&self, player: usize, name: &str, at: usize) -> Result<usize> {
        self.game
            .resolve_strategy(player, name)
            .ok_or_else(|| self.error(at, format!("unknown strategy {name:?} for player {}", player + 1)))
    }

    fn profile(&mut self, start: usize) -> Result<Formula> {
        self.expect('(')?;
        let mut choices = Vec::new();
        loop {
            let (name, at) = self.name()?;
            let player = choices.len();
            if player >= self.game.num_players() {
                return Err(self.error(at, "too many strategies in profile"));
            }
            choices.push(self.strategy(player, &name, at)?);
            self.skip_ws();
            match self.peek() {
                Some(',') => self.pos += 1,
                _ => break,
            }
        }
        self.expect(')')?;
        if choices.len() != self.game.num_players() {
            return Err(self.error(
                start,
                format!("profile names {} strategies for {} players", choices.len(), self.game.num_players()),
            ));
        }
        Ok(Formula::PlayProfile(Profile(choices)))
    }
}
