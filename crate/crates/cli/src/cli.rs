//! Argument parsing and subcommand dispatch for the `cagame` binary.

use std::ffi::OsString;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use cagame::analysis::Region;
use cagame::render::{render, Format};
use cagame::TakeAway;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::api::{self, ApiError, Limits, PositionDoc, TrianglePositionDoc};
use crate::play::{play, Side};
use crate::spec::SpecDocument;

#[derive(Debug, Parser)]
#[command(
    name = "cagame",
    version,
    about = "Cellular automata CA(A, γ, Γ) and the games that emulate them"
)]
pub struct Cli {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Print results as JSON, in the same shape the service returns.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest number of automaton cells one command may evaluate.
    #[arg(long, global = true, default_value_t = api::DEFAULT_CELL_BUDGET)]
    pub cell_budget: u64,
    /// Largest number of solver states one command may explore.
    #[arg(long, global = true, default_value_t = api::DEFAULT_STATE_BUDGET)]
    pub state_budget: u64,
    #[command(subcommand)]
    pub command: Command,
}

/// Either `--spec FILE` or inline fields; inline fields default to rule 60
/// over `...000111...`.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    /// JSON spec document: {"gamma","Gamma","L","C","R","xi"}.
    #[arg(long, global = true, conflicts_with_all = ["gamma", "big_gamma", "left", "center", "right", "xi"])]
    pub spec: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub gamma: u32,
    #[arg(long = "Gamma", global = true, default_value_t = 0)]
    pub big_gamma: u32,
    /// Left tail word, repeated leftward.
    #[arg(long, alias = "L", global = true, default_value = "0")]
    pub left: String,
    /// Center word, starting at x = 1.
    #[arg(long, alias = "C", global = true, default_value = "")]
    pub center: String,
    /// Right tail word, repeated rightward.
    #[arg(long, alias = "R", global = true, default_value = "1")]
    pub right: String,
    #[arg(
        long,
        global = true,
        default_value_t = 0,
        allow_negative_numbers = true
    )]
    pub xi: i64,
}

impl SpecArgs {
    pub fn load(&self) -> Result<SpecDocument, ApiError> {
        match &self.spec {
            Some(path) => read_spec(path),
            None => {
                let doc = SpecDocument {
                    gamma: self.gamma,
                    big_gamma: self.big_gamma,
                    left: self.left.clone(),
                    center: self.center.clone(),
                    right: self.right.clone(),
                    xi: self.xi,
                };
                doc.validate()?;
                Ok(doc)
            }
        }
    }
}

fn read_spec(path: &PathBuf) -> Result<SpecDocument, ApiError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ApiError::malformed("malformed-spec", format!("{}: {e}", path.display())))?;
    SpecDocument::from_json(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Pbm,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evolve a window of the spacetime diagram and render it.
    Evolve {
        #[arg(long, allow_negative_numbers = true)]
        x0: i64,
        #[arg(long, allow_negative_numbers = true)]
        x1: i64,
        #[arg(long)]
        rows: u32,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a take-away position.
    Solve {
        #[arg(long = "X")]
        tokens: u32,
        #[arg(long = "Y")]
        matches: u32,
        #[arg(long)]
        mp: u32,
        #[arg(long)]
        best_move: bool,
    },
    /// Solve a triangle-placing position and evaluate its automaton predicate.
    TriSolve {
        #[arg(long, allow_negative_numbers = true)]
        x: i64,
        #[arg(long)]
        y: u32,
        #[arg(long)]
        h: u32,
    },
    /// Compare take-away outcomes with the automaton predicate.
    VerifyThm2 {
        #[arg(long)]
        xmax: u32,
        #[arg(long)]
        ymax: u32,
        #[arg(long)]
        mpmax: u32,
    },
    /// Compare triangle outcomes with the automaton predicate.
    VerifyThm3 {
        #[arg(long, allow_negative_numbers = true)]
        xmin: i64,
        #[arg(long, allow_negative_numbers = true)]
        xmax: i64,
        #[arg(long)]
        ymax: u32,
        #[arg(long)]
        hmax: u32,
    },
    /// Search for an eventual spacetime period.
    Periodicity {
        #[arg(long)]
        dmax: u32,
        #[arg(long)]
        rmax: u32,
        #[arg(long, default_value_t = 0)]
        burnin: u32,
        /// Last row scanned.
        #[arg(long)]
        window: u32,
    },
    /// Look for a cell where two automata differ.
    Converge {
        #[arg(long)]
        spec2: PathBuf,
        #[arg(long)]
        yfrom: u32,
        #[arg(long)]
        yto: u32,
        /// Columns as X0:X1.
        #[arg(long, value_parser = parse_columns, allow_hyphen_values = true)]
        window: (i64, i64),
    },
    /// Find a bit pattern in the diagram.
    Search {
        #[arg(long)]
        pattern: String,
        #[arg(long)]
        no_reverse: bool,
        #[arg(long, default_value_t = 0)]
        yfrom: u32,
        #[arg(long)]
        ymax: u32,
        /// Columns as X0:X1; defaults to everything the core reaches.
        #[arg(long, value_parser = parse_columns, allow_hyphen_values = true)]
        window: Option<(i64, i64)>,
    },
    /// Check that a move sequence is optimal for the side moving last.
    PathCheck {
        #[arg(long = "X")]
        tokens: u32,
        #[arg(long = "Y")]
        matches: u32,
        #[arg(long)]
        mp: u32,
        /// Moves as "t,m;t,m;...".
        #[arg(long)]
        path: String,
    },
    /// Play a take-away game against the engine on stdin/stdout.
    Play {
        #[arg(long = "X")]
        tokens: u32,
        #[arg(long = "Y")]
        matches: u32,
        #[arg(long)]
        mp: u32,
        #[arg(long)]
        engine_first: bool,
    },
    /// Serve the JSON API on 127.0.0.1.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
    },
}

fn parse_columns(s: &str) -> Result<(i64, i64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected X0:X1, got {s:?}"))?;
    let a = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    Ok((a, b))
}

enum Failure {
    Api(ApiError),
    Io(std::io::Error),
}

impl From<ApiError> for Failure {
    fn from(e: ApiError) -> Self {
        Failure::Api(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T, R, W, E>(args: I, input: R, out: &mut W, err: &mut E) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    R: BufRead,
    W: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return code;
        }
    };
    match execute(&cli, input, out) {
        Ok(code) => code,
        Err(Failure::Api(e)) => {
            let _ = writeln!(err, "error: {e}");
            if let Some(clause) = e.clause {
                let _ = writeln!(err, "clause: {clause}");
            }
            e.exit_code()
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn emit<W: Write, T: Serialize>(out: &mut W, value: &T) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(value).expect("results serialize")
    )
}

fn execute<R: BufRead, W: Write>(cli: &Cli, input: R, out: &mut W) -> Result<u8, Failure> {
    let limits = Limits {
        cells: cli.cell_budget,
        states: cli.state_budget,
    };
    let spec = cli.spec.load()?;
    match &cli.command {
        Command::Evolve {
            x0,
            x1,
            rows,
            format,
            out: path,
        } => {
            let bytes = if cli.json {
                let mut v = serde_json::to_vec(&api::ca_window(&spec, *x0, *x1, *rows, limits)?)
                    .expect("serializes");
                v.push(b'\n');
                v
            } else {
                let window = api::evolve(&spec, *x0, *x1, *rows, limits)?;
                let format = match format {
                    OutputFormat::Text => Format::Text,
                    OutputFormat::Pbm => Format::Pbm,
                };
                render(&window, format)
            };
            match path {
                Some(p) => std::fs::write(p, bytes)?,
                None => out.write_all(&bytes)?,
            }
            Ok(0)
        }
        Command::Solve {
            tokens,
            matches,
            mp,
            best_move,
        } => {
            let pos = PositionDoc {
                tokens: *tokens,
                matches: *matches,
                mp: *mp,
            };
            let r = api::game_outcome(&spec, pos, limits)?;
            if cli.json {
                emit(out, &r)?;
            } else {
                writeln!(out, "{}", r.outcome)?;
                if *best_move {
                    match r.best_move {
                        Some(m) => writeln!(out, "t={},m={}", m.t, m.m)?,
                        None => writeln!(out, "none")?,
                    }
                }
            }
            Ok(0)
        }
        Command::TriSolve { x, y, h } => {
            let r = api::triangle_outcome(
                &spec,
                TrianglePositionDoc {
                    x: *x,
                    y: *y,
                    h: *h,
                },
                limits,
            )?;
            if cli.json {
                emit(out, &r)?;
            } else {
                writeln!(out, "{}", r.outcome)?;
                writeln!(out, "predicate {}", r.predicate)?;
            }
            Ok(0)
        }
        Command::VerifyThm2 { xmax, ymax, mpmax } => {
            let r = api::verify_thm2(&spec, *xmax, *ymax, *mpmax, limits)?;
            report(cli.json, out, &r, |p| {
                format!("({},{},{})", p.tokens, p.matches, p.mp)
            })
        }
        Command::VerifyThm3 {
            xmin,
            xmax,
            ymax,
            hmax,
        } => {
            let r = api::verify_thm3(&spec, *xmin, *xmax, *ymax, *hmax, limits)?;
            report(cli.json, out, &r, |p| format!("({},{},{})", p.x, p.y, p.h))
        }
        Command::Periodicity {
            dmax,
            rmax,
            burnin,
            window,
        } => {
            let r = api::periodicity(&spec, *dmax, *rmax, *burnin, *window, limits)?;
            if cli.json {
                emit(out, &r)?;
            } else {
                match r {
                    api::PeriodicityDoc::Periodic { drift, period, onset, game_drift } => writeln!(
                        out,
                        "periodic: drift {drift}, period {period}, from row {onset}; game period ({game_drift}, {period})"
                    )?,
                    api::PeriodicityDoc::UnknownWithinBounds { drift_max, period_max, rows } => writeln!(
                        out,
                        "unknown within bounds: no drift <= {drift_max} with period <= {period_max} through row {rows}"
                    )?,
                }
            }
            Ok(0)
        }
        Command::Converge {
            spec2,
            yfrom,
            yto,
            window,
        } => {
            let other = read_spec(spec2)?;
            let r = api::converge(
                &spec,
                &other,
                Region::new(window.0, window.1, *yfrom, *yto),
                limits,
            )?;
            if cli.json {
                emit(out, &r)?;
            } else {
                match r {
                    api::ConvergenceDoc::DivergenceWitness { x, y } => {
                        writeln!(out, "differ at x={x}, y={y}")?
                    }
                    api::ConvergenceDoc::AgreeOnTested { region: g } => writeln!(
                        out,
                        "agree on x in [{}, {}], y in [{}, {}] (not a proof of convergence)",
                        g.x0, g.x1, g.y_from, g.y_to
                    )?,
                }
            }
            Ok(0)
        }
        Command::Search {
            pattern,
            no_reverse,
            yfrom,
            ymax,
            window,
        } => {
            let r = api::search(&spec, pattern, !no_reverse, *window, *yfrom, *ymax, limits)?;
            if cli.json {
                emit(out, &r)?;
            } else {
                for h in &r.hits {
                    writeln!(
                        out,
                        "y={} x={}{}",
                        h.y,
                        h.x,
                        if h.reversed { " reversed" } else { "" }
                    )?;
                }
                writeln!(
                    out,
                    "{} hits in x [{}, {}]",
                    r.hits.len(),
                    r.region.x0,
                    r.region.x1
                )?;
            }
            Ok(0)
        }
        Command::PathCheck {
            tokens,
            matches,
            mp,
            path,
        } => {
            let moves = api::parse_path(path)?;
            let start = PositionDoc {
                tokens: *tokens,
                matches: *matches,
                mp: *mp,
            };
            let r = api::path_check(&spec, start, &moves, limits)?;
            if cli.json {
                emit(out, &r)?;
            } else {
                match &r {
                    api::PathDoc::Optimal => writeln!(out, "optimal")?,
                    api::PathDoc::Failure { index, reason } => {
                        writeln!(out, "failure at move {index}: {reason}")?
                    }
                }
            }
            Ok(u8::from(r != api::PathDoc::Optimal))
        }
        Command::Play {
            tokens,
            matches,
            mp,
            engine_first,
        } => {
            let start = PositionDoc {
                tokens: *tokens,
                matches: *matches,
                mp: *mp,
            };
            // The solver is used on every turn; check the start once.
            api::game_outcome(&spec, start, limits)?;
            let game = TakeAway::new(spec.params(), spec.background()?);
            let session = play(&game, start.into(), *engine_first, input, &mut *out)?;
            if cli.json {
                emit(
                    out,
                    &serde_json::json!({
                        "transcript": session.transcript.iter().map(|&m| api::MoveDoc::from(m)).collect::<Vec<_>>(),
                        "winner": session.winner.map(|w| if w == Side::Human { "human" } else { "engine" }),
                    }),
                )?;
            }
            Ok(0)
        }
        Command::Serve { port } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(crate::service::serve(*port, limits))?;
            Ok(0)
        }
    }
}

fn report<W: Write, P: Serialize + Copy>(
    json: bool,
    out: &mut W,
    r: &api::VerifyResult<P>,
    show: impl Fn(&P) -> String,
) -> Result<u8, Failure> {
    if json {
        emit(out, r)?;
    } else {
        for m in r.mismatches.iter().take(20) {
            writeln!(
                out,
                "{}: solver {}, predicate {}",
                show(&m.position),
                m.observed,
                m.expected
            )?;
        }
        writeln!(
            out,
            "{} positions checked, {} mismatches",
            r.checked,
            r.mismatches.len()
        )?;
    }
    Ok(u8::from(!r.is_clean()))
}
