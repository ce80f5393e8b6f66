//! The `translucent` command line. Every command prints one JSON document on
//! stdout; failures print `{"error": {...}}` on stderr.
//!
//! Exit codes: 0 success, 1 negative answer (a formula is false, a
//! requested property does not hold), 2 validation failure (a structure is
//! not appropriate, a witness precondition fails), 3 bad input.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::domination::{ir_prime, ir_relative, ir_set, nsd_fixpoint};
use crate::error::Error;
use crate::game::{Game, Profile, Restriction};
use crate::json::{
    parse_game, parse_text, profiles_to_value, rational_to_value, restriction_from_value,
    restriction_to_value,
};
use crate::kripke::{
    epsilon_closeness, load_structure, respects_unilateral_deviations, structure_to_value,
    validate_appropriate, validate_strongly_appropriate, CounterfactualStructure,
};
use crate::logic::{parse_formula, Checker};
use crate::oracle::oracle;
use crate::rationalizability::rationalizable_set;
use crate::witness::{
    build_ccbr_witness, build_ir_witness, build_kw_witness, ccbr_witness_size, TotalOrder,
};

const DEFAULT_MAX_STATES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "translucent", version, about = "Analyze games with translucent players")]
struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Iterated minimax domination to the fixpoint.
    Analyze { game: PathBuf },
    /// Individually rational profiles.
    Ir {
        game: PathBuf,
        /// Restrict to the subgame given as per-player strategy lists.
        #[arg(long)]
        restrict: Option<PathBuf>,
        /// Let guarantees use strategies outside the restriction.
        #[arg(long)]
        prime: bool,
    },
    /// Classical rationalizability by iterated deletion.
    Rationalizable { game: PathBuf },
    /// Validate a counterfactual structure.
    CheckStructure {
        structure: PathBuf,
        #[arg(long)]
        strong: bool,
        #[arg(long)]
        unilateral: bool,
        #[arg(long)]
        epsilon: bool,
    },
    /// Evaluate a formula at a state.
    ModelCheck {
        structure: PathBuf,
        #[arg(long)]
        state: usize,
        #[arg(long)]
        formula: String,
        /// Also list the extension of every subformula.
        #[arg(long)]
        explain: bool,
    },
    /// Build a witness structure for a profile.
    Witness {
        game: PathBuf,
        /// Comma-separated strategy names or indices.
        #[arg(long)]
        profile: String,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Sets for the ccbr and kw constructions; defaults to the survivors of deletion.
        #[arg(long)]
        z: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Order::Lexicographic)]
        order: Order,
    },
    /// Recompute deletion and IR by naive enumeration.
    Oracle { game: PathBuf },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Ccbr,
    Kw,
    Ir,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Lexicographic,
    Reversed,
}

enum Failure {
    Lib(Error),
    Io { path: PathBuf, message: String },
    TooLarge { states: usize, limit: usize },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Lib(Error::Precondition(_) | Error::Construction(_)) => 2,
            _ => 3,
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Failure::Lib(e) => {
                let mut v = json!({"message": e.to_string()});
                let kind = match e {
                    Error::Parse { path, .. } => {
                        v["path"] = json!(path);
                        "parse"
                    }
                    Error::Formula { column, .. } => {
                        v["column"] = json!(column);
                        "formula"
                    }
                    Error::Structure(_) => "structure",
                    Error::Precondition(_) => "precondition",
                    Error::Unsupported(_) => "unsupported",
                    Error::Construction(_) => "construction",
                };
                v["kind"] = json!(kind);
                json!({ "error": v })
            }
            Failure::Io { path, message } => json!({"error": {
                "kind": "io",
                "path": path.display().to_string(),
                "message": message,
            }}),
            Failure::TooLarge { states, limit } => json!({"error": {
                "kind": "limit",
                "message": format!("structure would have {states} states; TG_MAX_STATES is {limit}"),
            }}),
        }
    }
}

type Outcome = std::result::Result<(Value, i32), Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Io {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn load_game(path: &Path) -> std::result::Result<Game, Failure> {
    Ok(parse_game(&read(path)?)?)
}

fn load_restriction(game: &Game, path: &Path) -> std::result::Result<Restriction, Failure> {
    let value = parse_text(&read(path)?)?;
    Ok(restriction_from_value(game, &value, "$")?)
}

fn max_states() -> usize {
    std::env::var("TG_MAX_STATES")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_STATES)
}

fn check_size(states: usize) -> std::result::Result<(), Failure> {
    let limit = max_states();
    if states > limit {
        Err(Failure::TooLarge { states, limit })
    } else {
        Ok(())
    }
}

fn load_checked_structure(path: &Path) -> std::result::Result<CounterfactualStructure, Failure> {
    let text = read(path)?;
    let m = load_structure(&text, path.parent())?;
    check_size(m.num_states())?;
    Ok(m)
}

fn parse_profile(game: &Game, text: &str) -> std::result::Result<Profile, Failure> {
    let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
    if tokens.len() != game.num_players() {
        return Err(Error::Structure(format!(
            "profile {text:?} names {} strategies for {} players",
            tokens.len(),
            game.num_players()
        ))
        .into());
    }
    let choices = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            game.resolve_strategy(i, t)
                .ok_or_else(|| Error::Structure(format!("unknown strategy {t:?} for player {i}")))
        })
        .collect::<crate::error::Result<Vec<usize>>>()?;
    Ok(Profile(choices))
}

fn analyze(path: &Path) -> Outcome {
    let game = load_game(path)?;
    let trace = nsd_fixpoint(&game);
    let z = trace.final_restriction().clone();
    let profiles: Vec<Profile> = z.profiles().collect();
    Ok((
        json!({
            "trace": trace.to_value(),
            "rounds": trace.num_rounds(),
            "survivors": restriction_to_value(&z),
            "minimax_rationalizable": {
                "z": restriction_to_value(&z),
                "profiles": profiles_to_value(&profiles),
            },
        }),
        0,
    ))
}

fn ir(path: &Path, restrict: Option<&Path>, prime: bool) -> Outcome {
    let game = load_game(path)?;
    let z = match restrict {
        Some(p) => load_restriction(&game, p)?,
        None => Restriction::full(&game),
    };
    let profiles = match (restrict.is_some(), prime) {
        (false, _) => ir_set(&game),
        (true, false) => ir_relative(&game, &z)?,
        (true, true) => ir_prime(&game, &z)?,
    };
    Ok((
        json!({
            "restriction": restriction_to_value(&z),
            "prime": prime,
            "profiles": profiles_to_value(&profiles),
        }),
        0,
    ))
}

fn rationalizable(path: &Path) -> Outcome {
    let game = load_game(path)?;
    let trace = rationalizable_set(&game);
    Ok((
        json!({
            "trace": trace.to_value(),
            "rounds": trace.num_rounds(),
            "survivors": restriction_to_value(trace.final_restriction()),
        }),
        0,
    ))
}

fn check_structure(path: &Path, strong: bool, unilateral: bool, epsilon: bool) -> Outcome {
    let m = load_checked_structure(path)?;
    let report = if strong {
        validate_strongly_appropriate(&m)
    } else {
        validate_appropriate(&m)
    };
    let mut out = json!({"report": report.to_value()});
    let mut code = if report.ok() { 0 } else { 2 };
    if unilateral {
        let holds = respects_unilateral_deviations(&m);
        out["unilateral"] = json!(holds);
        if !holds && code == 0 {
            code = 1;
        }
    }
    if epsilon {
        out["epsilon"] = rational_to_value(&epsilon_closeness(&m));
    }
    Ok((out, code))
}

fn model_check(path: &Path, state: usize, text: &str, explain: bool) -> Outcome {
    let m = load_checked_structure(path)?;
    if state >= m.num_states() {
        return Err(Error::Structure(format!(
            "state {state} out of range (structure has {} states)",
            m.num_states()
        ))
        .into());
    }
    let formula = parse_formula(text, m.game())?;
    let mut checker = Checker::new(&m);
    let holds = checker.holds(state, &formula)?;
    let mut out = json!({
        "state": state,
        "formula": formula.to_text(m.game()),
        "holds": holds,
    });
    if explain {
        let parts: Vec<Value> = checker
            .explain(&formula)?
            .into_iter()
            .map(|e| json!({"formula": e.formula.to_text(m.game()), "states": e.states}))
            .collect();
        out["subformulas"] = Value::Array(parts);
    }
    Ok((out, if holds { 0 } else { 1 }))
}

fn witness(path: &Path, profile: &str, kind: Kind, z: Option<&Path>, order: Order) -> Outcome {
    let game = load_game(path)?;
    let profile = parse_profile(&game, profile)?;
    let order = match order {
        Order::Lexicographic => TotalOrder::Lexicographic,
        Order::Reversed => TotalOrder::Reversed,
    };
    let sets = |game: &Game| -> std::result::Result<Restriction, Failure> {
        match z {
            Some(p) => load_restriction(game, p),
            None => Ok(nsd_fixpoint(game).final_restriction().clone()),
        }
    };
    let w = match kind {
        Kind::Ccbr | Kind::Kw => {
            let z = sets(&game)?;
            check_size(ccbr_witness_size(&game, &z))?;
            if matches!(kind, Kind::Ccbr) {
                build_ccbr_witness(&game, &profile, &z, order)?
            } else {
                build_kw_witness(&game, &profile, &z, order)?
            }
        }
        Kind::Ir => {
            check_size(game.num_profiles())?;
            build_ir_witness(&game, &profile, order)?
        }
    };
    let mut out = structure_to_value(&w.structure);
    out["witness"] = w.sidecar();
    Ok((out, 0))
}

fn run_oracle(path: &Path) -> Outcome {
    let game = load_game(path)?;
    Ok((oracle(&game).to_value(), 0))
}

fn dispatch(command: &Command) -> Outcome {
    match command {
        Command::Analyze { game } => analyze(game),
        Command::Ir {
            game,
            restrict,
            prime,
        } => ir(game, restrict.as_deref(), *prime),
        Command::Rationalizable { game } => rationalizable(game),
        Command::CheckStructure {
            structure,
            strong,
            unilateral,
            epsilon,
        } => check_structure(structure, *strong, *unilateral, *epsilon),
        Command::ModelCheck {
            structure,
            state,
            formula,
            explain,
        } => model_check(structure, *state, formula, *explain),
        Command::Witness {
            game,
            profile,
            kind,
            z,
            order,
        } => witness(game, profile, *kind, z.as_deref(), *order),
        Command::Oracle { game } => run_oracle(game),
    }
}

fn render(value: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(value).expect("values serialize")
    } else {
        value.to_string()
    }
}

/// Runs the command line `argv` (program name first) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let v = json!({"error": {"kind": "usage", "message": e.to_string().trim_end()}});
            let _ = writeln!(err, "{v}");
            return 3;
        }
    };
    match dispatch(&cli.command) {
        Ok((value, code)) => {
            let _ = writeln!(out, "{}", render(&value, cli.pretty));
            code
        }
        Err(failure) => {
            let _ = writeln!(err, "{}", render(&failure.to_value(), cli.pretty));
            failure.exit_code()
        }
    }
}
