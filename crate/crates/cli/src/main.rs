//! `amnesia`: validate, analyse, transform and solve games written in the
//! `.efx` format, and rerun the bundled scenarios.

mod render;

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use amnesia::equilibrium::{
    check_pbe, check_spe, consistent_beliefs, enumerate_pure_spe, grid_search_equilibria, is_epsilon_nash,
    BehavioralProfile, BeliefSystem, OffPathRule,
};
use amnesia::gdl::{
    export_dot, parse_beliefs, parse_document, parse_profile, serialize_game, DotOptions, GameDocument,
};
use amnesia::models::{reproduce, Scenario, ScenarioParams};
use amnesia::recall::classify_recall;
use amnesia::xform::{apply_x, validate_x_properties};
use amnesia::{Error, Game};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "amnesia", version, about = "Extensive-form games with credible forgetting")]
struct Cli {
    /// Print one JSON document instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a game file for structural problems.
    Validate { file: PathBuf },
    /// Classify the recall of one player, or of every player.
    Recall {
        file: PathBuf,
        #[arg(long)]
        player: Option<String>,
    },
    /// Apply the forget block of the named taker.
    Transform {
        file: PathBuf,
        /// Taker named in one of the file's forget blocks.
        #[arg(long)]
        forget: String,
        /// Where to write the transformed game; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check whether a profile is an equilibrium.
    Check {
        file: PathBuf,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long, value_enum, default_value_t = ConceptArg::Nash)]
        concept: ConceptArg,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
        /// Beliefs for `pbe`; Bayes posteriors with uniform off-path beliefs when omitted.
        #[arg(long)]
        beliefs: Option<PathBuf>,
    },
    /// List equilibria.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Spe)]
        method: Method,
        /// Grid step for `grid`.
        #[arg(long, default_value_t = 0.5)]
        step: f64,
        #[arg(long, default_value_t = 1e-9)]
        eps: f64,
    },
    /// Rebuild a bundled scenario and compare with its targets.
    Reproduce {
        scenario: String,
        /// Scenario parameter as `key=value`; repeatable.
        #[arg(long = "param", value_name = "KEY=VALUE")]
        params: Vec<String>,
    },
    /// Write the game tree in Graphviz DOT.
    ExportDot {
        file: PathBuf,
        /// Connect members of each information set.
        #[arg(long)]
        infosets: bool,
        /// Draw X edges in bold.
        #[arg(long)]
        highlight_x: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ConceptArg {
    Nash,
    Spe,
    Pbe,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Spe,
    Grid,
}

/// Why a command did not succeed, and with which exit code.
#[derive(Debug)]
enum Failure {
    /// A check ran and did not pass; the report has been printed.
    Failed,
    Usage(String),
    Refused(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        if e.is_refusal() {
            Failure::Refused(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Failed => 1,
            Failure::Usage(_) => 2,
            Failure::Refused(_) => 3,
        }
    }
}

type Outcome = Result<(), Failure>;

struct Out {
    json: bool,
    buf: String,
}

impl Out {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) {
        if self.json {
            self.buf.push_str(&serde_json::to_string_pretty(value).expect("reports serialize"));
            self.buf.push('\n');
        } else {
            self.buf.push_str(&text());
        }
    }
}

fn read_input(path: &Path) -> Result<String, Failure> {
    if path == Path::new("-") {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_document(path: &Path) -> Result<GameDocument, Failure> {
    parse_document(&read_input(path)?).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    Ok(load_document(path)?.game)
}

fn pass_or_fail(pass: bool) -> Outcome {
    if pass {
        Ok(())
    } else {
        Err(Failure::Failed)
    }
}

fn validate(out: &mut Out, file: &Path) -> Outcome {
    let text = read_input(file)?;
    match parse_document(&text) {
        Ok(_) => {
            out.emit(&json!({ "valid": true, "errors": [] }), String::new);
            Ok(())
        }
        Err(e) => {
            out.emit(&json!({ "valid": false, "errors": [e] }), || format!("{}:{e}\n", file.display()));
            Err(Failure::Failed)
        }
    }
}

fn recall(out: &mut Out, file: &Path, player: Option<&str>) -> Outcome {
    let g = load_game(file)?;
    let players: Vec<String> = match player {
        Some(p) => vec![p.to_string()],
        None => g.players().to_vec(),
    };
    let mut reports = Vec::new();
    for p in &players {
        reports.push(classify_recall(&g, g.player_id(p)?)?);
    }
    out.emit(&reports, || reports.iter().map(|r| render::recall(&g, r)).collect());
    Ok(())
}

fn transform(out: &mut Out, file: &Path, taker: &str, dest: Option<&Path>) -> Outcome {
    let doc = load_document(file)?;
    let spec = doc.forget(taker).ok_or_else(|| Failure::Usage(format!("no forget block for `{taker}`")))?;
    let xg = apply_x(&doc.game, spec)?;
    let props = validate_x_properties(&doc.game, &xg)?;
    let text = serialize_game(&xg.game);
    match dest {
        Some(path) => {
            fs::write(path, format!("{text}\n")).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
            out.emit(&json!({ "properties": props, "written": path.display().to_string() }), || {
                render::properties(&xg.game, &props)
            });
        }
        None if out.json => out.emit(&json!({ "properties": props, "game": text }), String::new),
        None => {
            out.buf.push_str(&text);
            out.buf.push('\n');
            eprint!("{}", render::properties(&xg.game, &props));
        }
    }
    pass_or_fail(props.all_pass())
}

fn check(out: &mut Out, file: &Path, profile: &Path, concept: ConceptArg, eps: f64, beliefs: Option<&Path>) -> Outcome {
    let g = load_game(file)?;
    let sigma = parse_profile(&read_input(profile)?, &g)?;
    let report = match concept {
        ConceptArg::Nash => is_epsilon_nash(&g, &sigma, eps)?,
        ConceptArg::Spe => check_spe(&g, &sigma, eps)?,
        ConceptArg::Pbe => match beliefs {
            Some(path) => {
                let mu = parse_beliefs(&read_input(path)?, &g)?;
                check_pbe(&g, &sigma, &mu, eps, &OffPathRule::Prescribed(mu.clone()))?
            }
            None => {
                let mu = consistent_beliefs(&g, &sigma, &BeliefSystem::uniform(&g))?;
                check_pbe(&g, &sigma, &mu, eps, &OffPathRule::Unrestricted)?
            }
        },
    };
    out.emit(&report, || render::equilibrium(&report));
    pass_or_fail(report.pass)
}

fn solve(out: &mut Out, file: &Path, method: Method, step: f64, eps: f64) -> Outcome {
    let g = load_game(file)?;
    let found: Vec<BehavioralProfile> = match method {
        Method::Spe => enumerate_pure_spe(&g)?.iter().map(|p| BehavioralProfile::from_pure(&g, p)).collect(),
        Method::Grid => grid_search_equilibria(&g, step, eps)?,
    };
    let listed: Vec<_> = found.iter().map(|s| render::profile_map(&g, s)).collect();
    out.emit(&json!({ "count": found.len(), "profiles": listed }), || render::profiles(&g, &found));
    Ok(())
}

fn reproduce_cmd(out: &mut Out, scenario: &str, params: &[String]) -> Outcome {
    let scenario: Scenario = scenario.parse()?;
    let mut p = ScenarioParams::new(scenario);
    for kv in params {
        let (k, v) = kv.split_once('=').ok_or_else(|| Failure::Usage(format!("expected key=value, got `{kv}`")))?;
        p.set(k.trim(), v.trim())?;
    }
    let report = reproduce(&p)?;
    out.emit(&report, || report.to_string());
    pass_or_fail(report.pass)
}

fn export(out: &mut Out, file: &Path, infosets: bool, highlight_x: bool) -> Outcome {
    let g = load_game(file)?;
    let dot = export_dot(&g, &DotOptions { show_infosets: infosets, highlight_x, ..DotOptions::default() });
    out.emit(&json!({ "dot": dot }), || dot.clone());
    Ok(())
}

fn run(cli: &Cli, out: &mut Out) -> Outcome {
    match &cli.command {
        Command::Validate { file } => validate(out, file),
        Command::Recall { file, player } => recall(out, file, player.as_deref()),
        Command::Transform { file, forget, out: dest } => transform(out, file, forget, dest.as_deref()),
        Command::Check { file, profile, concept, eps, beliefs } => {
            check(out, file, profile, *concept, *eps, beliefs.as_deref())
        }
        Command::Solve { file, method, step, eps } => solve(out, file, *method, *step, *eps),
        Command::Reproduce { scenario, params } => reproduce_cmd(out, scenario, params),
        Command::ExportDot { file, infosets, highlight_x } => export(out, file, *infosets, *highlight_x),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are not errors.
            let code = if e.use_stderr() { 2 } else { 0 };
            if code == 2 && std::env::args().any(|a| a == "--json") {
                let reason = e.kind().to_string();
                println!("{}", serde_json::to_string_pretty(&json!({ "error": reason, "exit_code": 2 })).unwrap());
            }
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut out = Out { json: cli.json, buf: String::new() };
    let result = run(&cli, &mut out);
    let code = match &result {
        Ok(()) => 0,
        Err(f) => f.code(),
    };
    if let Err(Failure::Usage(reason) | Failure::Refused(reason)) = &result {
        eprintln!("error: {reason}");
        if cli.json {
            out.buf = serde_json::to_string_pretty(&json!({ "error": reason, "exit_code": code })).unwrap() + "\n";
        }
    }
    let mut stdout = io::stdout().lock();
    let _ = stdout.write_all(out.buf.as_bytes());
    let _ = stdout.flush();
    ExitCode::from(code)
}
