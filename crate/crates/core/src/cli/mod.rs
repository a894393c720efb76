//! The `qident` command-line tool.
//!
//! Exit codes: 0 identified (or verification passed), 1 usage, parse or
//! contract error, 2 not identified, 3 verification failed.

mod graph_file;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::condid::{conditional_effect_with, EffectOptions, NotIdentifiedReason, Verdict};
use crate::expr::{display_names, render_with, RenderFormat, RenderOptions};
use crate::graph::{Admg, VarSet};
use crate::oracle::{verify_query, VerifyError, VerifyOptions, DEFAULT_STATE_CAP};
use crate::qcomp::ContextMode;

pub use graph_file::{parse_graph, serialize_graph, GraphFileError};
pub use report::{
    BlockJson, DiagnosticsJson, IdentifyJson, PartitionJson, QueryJson, ReasonJson, StepJson, VerifyJson,
    SCHEMA_VERSION,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_IDENTIFIED: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Overrides the oracle's bound on enumerated joint states.
pub const STATE_CAP_ENV: &str = "QIDENT_STATE_CAP";

#[derive(Debug, Parser)]
#[command(
    name = "qident",
    version,
    about = "Identify conditional causal effects in graphs with latent confounders"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Derive an expression for P_do(outcome | given) from observed data.
    Identify(IdentifyArgs),
    /// Identify, then check the expression against random explicit models.
    Verify(VerifyArgs),
    /// List the c-components of the graph or of an induced subgraph.
    Components(ComponentsArgs),
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Intervened variables, comma separated.
    #[arg(long = "do", value_name = "VARS")]
    pub treatment: String,
    #[arg(long, value_name = "VARS")]
    pub outcome: String,
    #[arg(long, value_name = "VARS", default_value = "")]
    pub given: String,
    /// Condition each observed factor on a minimal set of earlier variables.
    #[arg(long)]
    pub minimal_contexts: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Latex,
    Json,
}

#[derive(Debug, Args)]
pub struct IdentifyArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Print Q-factors as Q[..] instead of their derivation.
    #[arg(long)]
    pub collapse_q: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub query: QueryArgs,
    #[arg(long, default_value_t = 100)]
    pub models: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Values per observed variable.
    #[arg(long, default_value_t = 2)]
    pub card: usize,
    /// Values per latent confounder.
    #[arg(long, default_value_t = 2)]
    pub latent_card: usize,
}

#[derive(Debug, Args)]
pub struct ComponentsArgs {
    #[arg(long, value_name = "FILE")]
    pub graph: PathBuf,
    /// Restrict to the subgraph induced by these variables.
    #[arg(long, value_name = "VARS")]
    pub scope: Option<String>,
}

/// A failure that maps to exit code 1.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn load_graph(path: &Path) -> Result<Admg, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    parse_graph(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn var_list(g: &Admg, list: &str, what: &str) -> Result<VarSet, Failure> {
    let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    g.var_set(&names).map_err(|e| Failure(format!("{what}: {e}")))
}

fn state_cap() -> Result<u64, Failure> {
    match std::env::var(STATE_CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure(format!("{STATE_CAP_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_STATE_CAP),
    }
}

struct Query {
    g: Admg,
    t: VarSet,
    s: VarSet,
    c: VarSet,
    effect: EffectOptions,
}

impl Query {
    fn load(args: &QueryArgs) -> Result<Self, Failure> {
        let g = load_graph(&args.graph)?;
        let t = var_list(&g, &args.treatment, "--do")?;
        let s = var_list(&g, &args.outcome, "--outcome")?;
        let c = var_list(&g, &args.given, "--given")?;
        let contexts = if args.minimal_contexts {
            ContextMode::Minimal
        } else {
            ContextMode::Full
        };
        Ok(Query {
            g,
            t,
            s,
            c,
            effect: EffectOptions { contexts },
        })
    }

    fn json(&self) -> QueryJson {
        QueryJson::new(&self.g, &self.t, &self.s, &self.c)
    }

    /// `P_x(y | w)` in the rendering's naming scheme.
    fn label(&self, latex: bool) -> String {
        let shown = display_names(self.g.names(), true);
        let list = |s: &VarSet| s.iter().map(|v| shown[v].clone()).collect::<Vec<_>>().join(",");
        let bar = if latex { " \\mid " } else { " | " };
        let sub = if latex || self.t.len() > 1 {
            format!("_{{{}}}", list(&self.t))
        } else {
            format!("_{}", list(&self.t))
        };
        if self.c.is_empty() {
            format!("P{sub}({})", list(&self.s))
        } else {
            format!("P{sub}({}{bar}{})", list(&self.s), list(&self.c))
        }
    }

    fn braces(&self, s: &VarSet) -> String {
        format!("{{{}}}", self.g.set_names(s).join(","))
    }
}

fn identify_cmd(args: &IdentifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let q = Query::load(&args.query)?;
    let result = conditional_effect_with(&q.g, &q.t, &q.s, &q.c, &q.effect)?;
    let code = if result.is_identifiable() {
        EXIT_OK
    } else {
        EXIT_NOT_IDENTIFIED
    };
    let format = match args.format {
        Format::Text => RenderFormat::Text,
        Format::Latex => RenderFormat::Latex,
        Format::Json => RenderFormat::Json,
    };
    let opts = RenderOptions {
        collapse_q: args.collapse_q,
        ..RenderOptions::for_format(format)
    };
    if args.format == Format::Json {
        let doc = IdentifyJson::new(&q.g, q.json(), &result, &RenderOptions::text());
        writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
        return Ok(code);
    }
    let label = q.label(args.format == Format::Latex);
    match &result.verdict {
        Verdict::Identifiable(e) => writeln!(out, "{label} = {}", render_with(e, q.g.names(), &opts))?,
        Verdict::NotIdentified(reason) => {
            writeln!(out, "{label} is not identified")?;
            match reason {
                NotIdentifiedReason::FailedBlocks { blocks } => {
                    let list: Vec<String> = blocks.iter().map(|b| format!("Q[{}]", q.braces(b))).collect();
                    writeln!(out, "unidentified factors: {}", list.join(" "))?;
                }
                NotIdentifiedReason::Overlap { witnesses } => {
                    writeln!(
                        out,
                        "outcome variables tied to unidentified factors: {}",
                        q.braces(witnesses)
                    )?;
                    let failed: Vec<String> = result
                        .diagnostics
                        .blocks
                        .iter()
                        .filter(|b| b.factor().is_none())
                        .map(|b| format!("Q[{}]", q.braces(&b.block)))
                        .collect();
                    writeln!(out, "unidentified factors: {}", failed.join(" "))?;
                }
            }
        }
    }
    Ok(code)
}

fn verify_cmd(args: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let q = Query::load(&args.query)?;
    let opts = VerifyOptions {
        n_models: args.models,
        seed: args.seed,
        tol: args.tol,
        observed_card: args.card,
        latent_card: args.latent_card,
        state_cap: state_cap()?,
        effect: q.effect,
    };
    match verify_query(&q.g, &q.t, &q.s, &q.c, &opts) {
        Ok(report) => {
            let code = if report.pass { EXIT_OK } else { EXIT_VERIFY_FAILED };
            let doc = VerifyJson {
                schema_version: SCHEMA_VERSION,
                query: q.json(),
                report,
            };
            writeln!(out, "{}", serde_json::to_string_pretty(&doc)?)?;
            Ok(code)
        }
        Err(VerifyError::NotIdentified(_)) => {
            writeln!(err, "{} is not identified; nothing to verify", q.label(false))?;
            Ok(EXIT_NOT_IDENTIFIED)
        }
        Err(e) => Err(e.into()),
    }
}

fn components_cmd(args: &ComponentsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let g = load_graph(&args.graph)?;
    let scope = match args.scope.as_deref().map(str::trim) {
        None | Some("") => g.all(),
        Some(list) => var_list(&g, list, "--scope")?,
    };
    let blocks: Vec<String> = g
        .c_components(&scope)
        .iter()
        .map(|b| format!("{{{}}}", g.set_names(b).join(",")))
        .collect();
    writeln!(out, "{}", blocks.join(" "))?;
    Ok(EXIT_OK)
}

/// Parse `args` (including the program name) and run the command, writing
/// to `out` and `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Identify(a) => identify_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out, err),
        Command::Components(a) => components_cmd(a, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_ERROR
        }
    }
}
