use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use facetforge_core::evaluation::display_score;
use facetforge_core::{demo, Workspace};
use serde::Serialize;

use crate::error::ApiError;
use crate::ops;
use crate::server::{self, ServeConfig, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(name = "facetforge", version, about = "Collaborative faceted semantic-web engine")]
pub struct Cli {
    /// N-Triples store file.
    #[arg(long, global = true, env = "FACETFORGE_DATA", default_value = "facetforge.nt")]
    pub data: PathBuf,
    /// Print the JSON body the HTTP service would return.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Merge an N-Triples file ("-" for stdin) into the store.
    Ingest { file: PathBuf },
    /// Add a folksonomy tag to a portlet.
    Tag {
        #[arg(long)]
        portlet: String,
        #[arg(long)]
        label: String,
        /// Defaults to the portlet's owner.
        #[arg(long)]
        owner: Option<String>,
    },
    /// Learn matcher weights from `conceptA,conceptB,{0|1}` lines.
    Learn {
        training: PathBuf,
        /// `key=value` learning config file.
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Form superconcepts from the stored taxonomy and ontology.
    Match {
        #[arg(long)]
        theta: Option<f64>,
    },
    /// Resolve the joint-meaning labels of a portlet.
    Resolve {
        #[arg(long)]
        portlet: String,
        /// Defaults to the portlet's owner.
        #[arg(long)]
        speaker: Option<String>,
        /// Print only this user's view.
        #[arg(long)]
        viewer: Option<String>,
    },
    /// Plan the shortest path from a node to the nearest goal.
    Navigate {
        #[arg(long)]
        start: String,
        #[arg(long = "goal", required = true, value_delimiter = ',')]
        goals: Vec<String>,
        /// Skip nodes that share no interest with this user.
        #[arg(long)]
        user: Option<String>,
    },
    /// Score a usability matrix file.
    Eval { file: PathBuf },
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "FACETFORGE_PORT", default_value_t = DEFAULT_PORT)]
        port: u16,
    },
    /// Merge the demo community, ontology, portlets and navigation graph into the store.
    SeedDemo,
}

fn read_input(path: &Path) -> Result<String, ApiError> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| ApiError::invalid(format!("stdin: {e}")))?;
        return Ok(s);
    }
    fs::read_to_string(path).map_err(|e| ApiError::invalid(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<Workspace, ApiError> {
    server::load_store(path).map_err(|e| ApiError::storage(e.to_string()))
}

fn save(ws: &Workspace, path: &Path) -> Result<(), ApiError> {
    ws.save(path).map_err(|e| ApiError::storage(e.to_string()))
}

fn emit<T: Serialize>(out: &mut dyn Write, json: bool, value: &T, text: impl FnOnce() -> String) -> io::Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(value).expect("responses serialize"))
    } else {
        writeln!(out, "{}", text())
    }
}

/// Runs one command. Returns the process exit code: 0 on success, 1 on a
/// runtime error, 2 on a usage error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), Box<dyn std::error::Error>> {
    let data = cli.data.as_path();
    let json = cli.json;
    match cli.command {
        Command::Ingest { file } => {
            let text = read_input(&file)?;
            let mut ws = open(data)?;
            let r = ops::ingest(&mut ws, &text)?;
            save(&ws, data)?;
            emit(out, json, &r, || format!("added {} triples ({} total)", r.added, r.total))?;
        }
        Command::Tag { portlet, label, owner } => {
            let mut ws = open(data)?;
            let r = ops::add_tag(&mut ws, ops::TagBody { portlet, label, owner })?;
            save(&ws, data)?;
            emit(out, json, &r, || format!("tagged {} with {:?} (owner {})", r.portlet, r.label, r.owner))?;
        }
        Command::Learn { training, config } => {
            let body = ops::LearnBody {
                training: read_input(&training)?,
                config: config.as_deref().map(read_input).transpose()?,
            };
            let mut ws = open(data)?;
            let r = ops::learn(&mut ws, body)?;
            save(&ws, data)?;
            emit(out, json, &r, || {
                let w: Vec<String> = r.weights.iter().map(|x| display_score(*x)).collect();
                let holdout = r.holdout_accuracy.map(display_score).unwrap_or_else(|| "n/a".into());
                format!(
                    "weights={} threshold={} train_accuracy={} holdout_accuracy={holdout}",
                    w.join(","),
                    display_score(r.threshold),
                    display_score(r.train_accuracy)
                )
            })?;
        }
        Command::Match { theta } => {
            let ws = open(data)?;
            let r = ops::superconcepts(&ws, ops::SuperconceptBody { theta })?;
            emit(out, json, &r, || {
                r.iter()
                    .map(|s| format!("{}: {} [tags: {}]", s.id, s.members.join(" "), s.tags.join(" ")))
                    .collect::<Vec<_>>()
                    .join("\n")
            })?;
        }
        Command::Resolve { portlet, speaker, viewer } => {
            let ws = open(data)?;
            match viewer {
                Some(v) => {
                    let r = ops::view(&ws, &v, &portlet, speaker.as_deref())?;
                    emit(out, json, &r, || r.labels.values().cloned().collect::<Vec<_>>().join("\n"))?;
                }
                None => {
                    let r = ops::resolve_all(&ws, &portlet, speaker.as_deref())?;
                    emit(out, json, &r, || {
                        r.iter()
                            .map(|(u, v)| format!("{u}\t{}", v.labels.values().cloned().collect::<Vec<_>>().join(", ")))
                            .collect::<Vec<_>>()
                            .join("\n")
                    })?;
                }
            }
        }
        Command::Navigate { start, goals, user } => {
            let ws = open(data)?;
            let r = ops::navigate(&ws, &ops::NavigateQuery { start, goals: goals.join(","), user })?;
            emit(out, json, &r, || {
                std::iter::once(r.start.as_str()).chain(r.path.iter().map(String::as_str)).collect::<Vec<_>>().join(" -> ")
            })?;
        }
        Command::Eval { file } => {
            let r = ops::eval(ops::EvalBody::Text { csv: read_input(&file)? })?;
            emit(out, json, &r, || format!("average={} weighted={}", display_score(r.average), display_score(r.weighted)))?;
        }
        Command::Serve { port } => {
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(server::serve(ServeConfig { port, data: Some(data.to_owned()) }))?;
        }
        Command::SeedDemo => {
            let mut ws = open(data)?;
            let seeded = demo::seed()?;
            let r = ops::ingest(&mut ws, &seeded.store().to_ntriples())?;
            save(&ws, data)?;
            let table = ops::eval(ops::EvalBody::Matrix(demo::usability_matrix()))?;
            emit(out, json, &r, || {
                format!(
                    "seeded {} triples into {} ({} total)\nsample matrix: average={} weighted={}",
                    r.added,
                    data.display(),
                    r.total,
                    display_score(table.average),
                    display_score(table.weighted)
                )
            })?;
        }
    }
    Ok(())
}
