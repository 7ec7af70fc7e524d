use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use gaussmoves::demo;
use gaussmoves::invariants::{profile, DEFAULT_N_MAX};
use gaussmoves::realizability::genus;
use gaussmoves::rewriter::{rewrite_to_generating_set, GeneratingSet, MoveSequence, RewriteError};
use gaussmoves::verify::{self, Suite, VerifyConfig};
use gaussmoves::{
    apply_move, classify, enumerate_insertion_sites, enumerate_r3_sites, enumerate_removal_sites, parse_gauss_code,
    serialize, DiagramState, GaussDiagram, MoveError, MoveSite,
};

const EXIT_FAIL: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_INAPPLICABLE: u8 = 3;

#[derive(Parser)]
#[command(name = "gaussmoves", version, about = "Gauss diagrams, Reidemeister move classes and arrow-diagram invariants")]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Writhe, A_n, D_n and W_n of a diagram.
    Invariants {
        code: String,
        /// Winding number of the input; printed only when given.
        #[arg(long, allow_hyphen_values = true)]
        winding_seed: Option<i64>,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: usize,
    },
    /// List or apply Reidemeister moves.
    Moves {
        #[command(subcommand)]
        action: MovesAction,
    },
    /// Rewrite one move into the generating set.
    Rewrite {
        code: String,
        site: String,
        #[arg(long, default_value = "primary")]
        set: GeneratingSet,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        winding_seed: i64,
    },
    /// Run a randomized property suite.
    Verify {
        suite: Suite,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_arrows: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Only planar diagrams.
        #[arg(long)]
        classical: bool,
        /// Sample this many Ω2 insertions per diagram instead of trying all.
        #[arg(long)]
        r2_samples: Option<usize>,
    },
    /// Worked certificates.
    Demo {
        #[command(subcommand)]
        which: DemoName,
    },
    /// Genus of the surface carrying the diagram.
    Realizable { code: String },
}

#[derive(Subcommand)]
enum MovesAction {
    /// Every applicable site with its class and direction.
    List { code: String },
    /// Apply one move.
    Apply {
        code: String,
        site: String,
        #[arg(long, allow_hyphen_values = true)]
        winding_seed: Option<i64>,
    },
}

#[derive(Subcommand)]
enum DemoName {
    /// The figure-eight knot against its inverse.
    Fig8 {
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        winding_seed: i64,
    },
    /// `d # a # ã` for a searched unknot diagram `a`.
    Thm3 {
        code: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        winding_seed: i64,
        #[arg(long, default_value_t = demo::SEARCH_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = demo::SEARCH_ARROWS)]
        max_arrows: usize,
    },
}

enum Failure {
    Parse(String),
    Inapplicable(String),
    Failed(String),
}

impl From<MoveError> for Failure {
    fn from(e: MoveError) -> Failure {
        match e {
            MoveError::SiteSyntax(_) => Failure::Parse(e.to_string()),
            _ => Failure::Inapplicable(e.to_string()),
        }
    }
}

impl From<RewriteError> for Failure {
    fn from(e: RewriteError) -> Failure {
        match e {
            RewriteError::Move(m) => m.into(),
            other => Failure::Failed(other.to_string()),
        }
    }
}

struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Output {
        Output { text, json, ok: true }
    }
}

fn parse(code: &str) -> Result<GaussDiagram, Failure> {
    parse_gauss_code(code).map_err(|e| Failure::Parse(e.to_string()))
}

fn parse_site(site: &str) -> Result<MoveSite, Failure> {
    site.parse::<MoveSite>().map_err(|e| Failure::Parse(e.to_string()))
}

fn steps_json(seq: &MoveSequence) -> Value {
    seq.steps()
        .iter()
        .map(|(site, c)| json!({"site": site.to_string(), "class": c.class.to_string(), "direction": c.direction.to_i32()}))
        .collect()
}

fn invariants(code: &str, seed: Option<i64>, n_max: usize) -> Result<Output, Failure> {
    if n_max < 4 {
        return Err(Failure::Parse(format!("--n-max must be at least 4, got {n_max}")));
    }
    let d = parse(code)?;
    let p = profile(&DiagramState::new(d.clone(), seed.unwrap_or(0)), n_max);
    let mut text = format!("writhe {}\n", p.writhe);
    if let Some(w) = seed {
        text += &format!("winding {w}\n");
    }
    for (letter, map) in [("A", &p.a), ("D", &p.d), ("W", &p.w)] {
        for (n, v) in map {
            text += &format!("{letter}{n} {v}\n");
        }
    }
    let json = json!({
        "code": serialize(&d),
        "writhe": p.writhe,
        "winding": seed,
        "A": p.a,
        "D": p.d,
        "W": p.w,
    });
    Ok(Output::ok(text, json))
}

fn moves_list(code: &str) -> Result<Output, Failure> {
    let d = parse(code)?;
    let mut rows = Vec::new();
    for (site, c) in enumerate_removal_sites(&d) {
        rows.push((site, c));
    }
    for site in enumerate_r3_sites(&d) {
        rows.push((site, classify(&site, &d)?));
    }
    for site in enumerate_insertion_sites(&d) {
        rows.push((site, classify(&site, &d)?));
    }
    let text = rows.iter().map(|(s, c)| format!("{s}\t{c}\n")).collect();
    let json = json!({
        "code": serialize(&d),
        "sites": rows
            .iter()
            .map(|(s, c)| json!({"site": s.to_string(), "class": c.class.to_string(), "direction": c.direction.to_i32()}))
            .collect::<Vec<_>>(),
    });
    Ok(Output::ok(text, json))
}

fn moves_apply(code: &str, site: &str, seed: Option<i64>) -> Result<Output, Failure> {
    let d = parse(code)?;
    let site = parse_site(site)?;
    let class = classify(&site, &d)?;
    let before = DiagramState::new(d, seed.unwrap_or(0));
    let after = apply_move(&before, &site)?;
    let delta = after.winding() - before.winding();
    let mut text = format!("{class}\n{}\nwinding delta {delta:+}\n", serialize(after.diagram()));
    if seed.is_some() {
        text += &format!("winding {}\n", after.winding());
    }
    let json = json!({
        "site": site.to_string(),
        "class": class.class.to_string(),
        "direction": class.direction.to_i32(),
        "code": serialize(after.diagram()),
        "winding_delta": delta,
        "winding": seed.map(|_| after.winding()),
    });
    Ok(Output::ok(text, json))
}

fn rewrite(code: &str, site: &str, set: GeneratingSet, seed: i64) -> Result<Output, Failure> {
    let d = parse(code)?;
    let site = parse_site(site)?;
    let state = DiagramState::new(d, seed);
    let seq = rewrite_to_generating_set(&state, &site, set)?;
    let end = seq.replay(&state)?;
    let direct = apply_move(&state, &site)?;
    let matches = gaussmoves::canonical_form(end.diagram()) == gaussmoves::canonical_form(direct.diagram())
        && end.winding() == direct.winding();
    let mut text = seq.render(&state)?;
    if !matches {
        text += "end state differs from the direct move\n";
    }
    let json = json!({
        "site": site.to_string(),
        "set": set.to_string(),
        "steps": steps_json(&seq),
        "code": serialize(end.diagram()),
        "winding": end.winding(),
        "matches_direct": matches,
    });
    Ok(Output { text, json, ok: matches })
}

fn run_verify(suite: Suite, cfg: VerifyConfig) -> Result<Output, Failure> {
    if cfg.trials == 0 || cfg.max_arrows == 0 {
        return Err(Failure::Parse("--trials and --max-arrows must be positive".into()));
    }
    let report = verify::run(suite, &cfg);
    let json = serde_json::to_value(&report).expect("report serializes");
    Ok(Output { text: report.to_string(), ok: report.pass, json })
}

fn fig8(seed: i64) -> Result<Output, Failure> {
    let cert = demo::fig8(seed)
        .ok_or_else(|| Failure::Failed("no member of {F, mirror, reverse, both} has the expected A_4, D_4".into()))?;
    let json = json!({
        "F": serialize(&cert.diagram),
        "reverse": serialize(&gaussmoves::reverse_orientation(&cert.diagram)),
        "profile": cert.forward,
        "reverse_profile": cert.inverse,
        "report": cert.report,
    });
    Ok(Output::ok(cert.to_string(), json))
}

fn thm3(code: &str, seed: i64, depth: usize, max_arrows: usize) -> Result<Output, Failure> {
    let d = DiagramState::new(parse(code)?, seed);
    let cert = demo::thm3_with(&d, depth, max_arrows).ok_or_else(|| {
        Failure::Failed(format!(
            "no unknot diagram with (A_4, D_4, writhe, winding) = {:?} within depth {depth} and {max_arrows} arrows",
            demo::UNKNOT_TARGET
        ))
    })?;
    let json = json!({
        "a": serialize(cert.search.a.diagram()),
        "a_winding": cert.search.a.winding(),
        "a_start_winding": cert.search.start_winding,
        "a_moves": steps_json(&cert.search.moves),
        "d": serialize(cert.d.diagram()),
        "k": serialize(cert.k.diagram()),
        "d_profile": cert.d_profile,
        "k_profile": cert.k_profile,
        "report": cert.report,
    });
    Ok(Output::ok(cert.to_string(), json))
}

fn realizable(code: &str) -> Result<Output, Failure> {
    let d = parse(code)?;
    let g = genus(&d);
    let text = format!("genus {g}\n{}\n", if g == 0 { "realizable" } else { "not realizable" });
    Ok(Output::ok(text, json!({"code": serialize(&d), "genus": g, "realizable": g == 0})))
}

fn dispatch(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Invariants { code, winding_seed, n_max } => invariants(code, *winding_seed, *n_max),
        Command::Moves { action: MovesAction::List { code } } => moves_list(code),
        Command::Moves { action: MovesAction::Apply { code, site, winding_seed } } => {
            moves_apply(code, site, *winding_seed)
        }
        Command::Rewrite { code, site, set, winding_seed } => rewrite(code, site, *set, *winding_seed),
        Command::Verify { suite, trials, max_arrows, seed, classical, r2_samples } => run_verify(
            *suite,
            VerifyConfig {
                trials: *trials,
                max_arrows: *max_arrows,
                seed: *seed,
                classical: *classical,
                r2_samples: *r2_samples,
            },
        ),
        Command::Demo { which: DemoName::Fig8 { winding_seed } } => fig8(*winding_seed),
        Command::Demo { which: DemoName::Thm3 { code, winding_seed, depth, max_arrows } } => {
            thm3(code, *winding_seed, *depth, *max_arrows)
        }
        Command::Realizable { code } => realizable(code),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("json"));
            } else {
                print!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
        Err(f) => {
            let (code, msg) = match f {
                Failure::Parse(m) => (EXIT_PARSE, m),
                Failure::Inapplicable(m) => (EXIT_INAPPLICABLE, m),
                Failure::Failed(m) => (EXIT_FAIL, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
