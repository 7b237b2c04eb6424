//! `fqgeom`: batch front end for the finite-field geometry audits.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fqgeom::constructions::{RecipeKind, SharpnessRecipe};
use fqgeom::manifest::ExperimentManifest;

use output::Format;

const GENERATOR_HELP: &str = "\
Random corpora come from a 64-bit linear congruential generator:
  state <- state * 6364136223846793005 + 1442695040888963407 (mod 2^64)
  output = state >> 32, below(n) = output mod n
Trial t at order q starts from state seed * 6364136223846793005 + (q << 32 | t).

Exit status: 0 on success, 1 on a ceiling regression or failed exact check,
2 on a usage or library error.";

#[derive(Parser, Debug)]
#[command(name = "fqgeom", version, about = "Exact incidence geometry over finite fields", after_help = GENERATOR_HELP)]
pub struct Cli {
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Run past size guardrails (logged).
    #[arg(long, global = true)]
    pub force: bool,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Ceiling file to judge against (default: the committed one).
    #[arg(long, global = true)]
    pub ceilings: Option<PathBuf>,
    /// Replay an experiment manifest, a sharpness recipe, or a ceiling file.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    /// Print the manifest of this invocation and exit.
    #[arg(long, global = true)]
    pub emit_manifest: bool,
    #[command(subcommand)]
    pub cmd: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Field order, modulus and element table.
    Field(FieldArgs),
    /// Orthogonal group and motion universe sizes.
    Group(GroupArgs),
    /// Audit a family of bounds over a seeded corpus.
    Audit {
        #[command(subcommand)]
        which: AuditCmd,
    },
    /// Congruence class census of (k+1)-tuples.
    Census(CensusArgs),
    /// Apex witness counts against the discriminant rule, for every triple of norms.
    MuTable(MuArgs),
    /// Lines of F_q^3 attached to pairs of points.
    Lines(LinesArgs),
    /// Replay a sharpness construction.
    Sharpness {
        #[command(subcommand)]
        which: SharpCmd,
    },
    /// Run the calibration corpus and print the ceiling file.
    Calibrate(CalArgs),
}

#[derive(Args, Debug)]
pub struct FieldArgs {
    #[arg(long)]
    pub q: u32,
    /// List every element.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug)]
pub struct GroupArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// general, so2, translation, sf or sf-prime.
    #[arg(long, default_value = "general")]
    pub class: String,
    /// List the motions of the class.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug, Clone)]
pub struct CorpusArgs {
    #[arg(long, default_value_t = 7)]
    pub q: u32,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 50)]
    pub trials: u64,
}

#[derive(Subcommand, Debug)]
pub enum AuditCmd {
    /// Incidence bounds (T2.1, T2.3(1), T2.3(2), T2.4, T2.6, T8.2, CS3.1, CS3.3).
    Incidence {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        theorem: Option<String>,
    },
    /// Distance count with the explicit constant 4 (T3.1).
    Distance {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Rich-motion and moment bounds (C2.2, C2.5, P5.1, P5.2, C8.3).
    Moment {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        bound: Option<String>,
    },
    /// Exact triple correlation against its Hölder bounds.
    Triple {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Point-line incidences of the line world (T7.2).
    Kollar {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Most lines of L(U x U) in one plane.
    Plane {
        #[command(flatten)]
        corpus: CorpusArgs,
    },
    /// Furstenberg image bounds (T1.8, T1.9(1), T1.9(2), T1.10, T1.11).
    Fur {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        theorem: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct CensusArgs {
    #[arg(long)]
    pub q: u32,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Simplex order: tuples have k+1 vertices.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// full-plane, random:N, or a file with one point per line.
    #[arg(long, default_value = "full-plane")]
    pub set: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct MuArgs {
    #[arg(long)]
    pub q: u32,
}

#[derive(Args, Debug)]
pub struct LinesArgs {
    #[arg(long)]
    pub q: u32,
    /// Points separated by ';', e.g. "[0,0];[1,2]", or random:N.
    #[arg(long)]
    pub points: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Subcommand, Debug)]
pub enum SharpCmd {
    /// Orbit sets of a rotation of order k over F_(p^3).
    Sec3 {
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long)]
        k: u64,
        /// Comma-separated element indices.
        #[arg(long, default_value = "")]
        x: String,
    },
    /// Strip A = F_q^(d-1) x X with R = O(d-1) x A.
    Fur1 {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 2)]
        d: usize,
        #[arg(long)]
        x: String,
    },
    /// Subfield pairs and motions inside F_(p^3).
    Subfield {
        #[arg(long, default_value_t = 3)]
        p: u32,
        /// |U|; defaults to round(p^(3/2)).
        #[arg(long)]
        u: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
pub struct CalArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trials: u64,
    /// Comma-separated field orders.
    #[arg(long, default_value = "3,7,11")]
    pub qs: String,
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Compare with the ceiling file instead of printing; exit 1 on difference.
    #[arg(long)]
    pub check: bool,
}

/// Flags that do not change what is computed, with whether they take a value.
const TRANSIENT: [(&str, bool); 3] = [("workers", true), ("manifest", true), ("emit-manifest", false)];
/// Global flags that can appear before the subcommand.
const GLOBAL: [(&str, bool); 4] = [("force", false), ("format", true), ("out", true), ("ceilings", true)];

/// Splits off the global flags so the rest reads as `command words --key value ...`.
fn split_globals(args: &[String]) -> (Vec<String>, Vec<String>, Vec<String>) {
    let (mut transient, mut global, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        let name = a.strip_prefix("--").map(|n| n.split('=').next().unwrap_or(n));
        let hit = |table: &[(&'static str, bool)]| -> Option<bool> {
            name.and_then(|n| table.iter().find(|(k, _)| *k == n).map(|e| e.1))
        };
        let (bucket, takes) = match (hit(&TRANSIENT), hit(&GLOBAL)) {
            (Some(t), _) => (&mut transient, t),
            (_, Some(t)) => (&mut global, t),
            _ => (&mut rest, false),
        };
        bucket.push(a.clone());
        if takes && !a.contains('=') && i + 1 < args.len() {
            i += 1;
            bucket.push(args[i].clone());
        }
        i += 1;
    }
    (transient, global, rest)
}

/// The manifest describing an invocation.
pub fn manifest_of(args: &[String]) -> Result<ExperimentManifest, String> {
    let (_, global, rest) = split_globals(args);
    let mut joined = rest;
    joined.extend(global);
    ExperimentManifest::from_args(&joined).map_err(|e| e.to_string())
}

fn recipe_manifest(r: &SharpnessRecipe) -> ExperimentManifest {
    let mut m = ExperimentManifest::default();
    let join = |x: &[u32]| x.iter().map(u32::to_string).collect::<Vec<_>>().join(",");
    match r.kind {
        RecipeKind::Sec3Cyclic => {
            m.command = "sharpness sec3".into();
            m.params.insert("p".into(), r.p.to_string());
            if let Some(k) = r.k {
                m.params.insert("k".into(), k.to_string());
            }
            if !r.x.is_empty() {
                m.params.insert("x".into(), join(&r.x));
            }
        }
        RecipeKind::Fur1Strip => {
            m.command = "sharpness fur1".into();
            m.field = Some(fqgeom::manifest::FieldSpec { p: r.p, r: r.r });
            m.d = Some(r.d);
            m.params.insert("x".into(), join(&r.x));
        }
        RecipeKind::InciSubfield => {
            m.command = "sharpness subfield".into();
            m.params.insert("p".into(), r.p.to_string());
            if let Some(k) = r.k {
                m.params.insert("u".into(), k.to_string());
            }
            m.seed = Some(r.seed);
        }
    }
    m
}

fn load_manifest(path: &PathBuf) -> Result<ExperimentManifest, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("--manifest {}: {e}", path.display()))?;
    match ExperimentManifest::from_text(&text) {
        Ok(m) if !m.command.is_empty() => Ok(m),
        first => match serde_json::from_str::<SharpnessRecipe>(text.trim()) {
            Ok(r) => Ok(recipe_manifest(&r)),
            Err(_) => Err(match first {
                Err(e) => format!("--manifest: {e}"),
                Ok(_) => "--manifest: missing field `command`".into(),
            }),
        },
    }
}

fn run(raw: Vec<String>) -> Result<bool, String> {
    let cli = Cli::try_parse_from(&raw).unwrap_or_else(|e| e.exit());
    let args = &raw[1..];
    if cli.emit_manifest {
        let m = match &cli.manifest {
            Some(p) => load_manifest(p)?,
            None => manifest_of(args)?,
        };
        println!("{}", m.to_json());
        return Ok(true);
    }
    if let Some(path) = &cli.manifest {
        let m = load_manifest(path)?;
        let mut replay = vec![raw[0].clone()];
        replay.extend(m.to_args());
        // command-line globals fill in whatever the manifest leaves open
        let (_, global, _) = split_globals(args);
        let mut i = 0;
        while i < global.len() {
            let name = global[i].split('=').next().unwrap_or_default().to_string();
            let takes = !global[i].contains('=') && name != "--force";
            let n = if takes { 2 } else { 1 };
            if !replay.iter().any(|a| a.split('=').next() == Some(name.as_str())) {
                replay.extend(global[i..(i + n).min(global.len())].iter().cloned());
            }
            i += n;
        }
        let cli = Cli::try_parse_from(&replay).unwrap_or_else(|e| e.exit());
        return commands::dispatch(&cli);
    }
    commands::dispatch(&cli)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let raw: Vec<String> = std::env::args().collect();
    let workers = Cli::try_parse_from(&raw).ok().and_then(|c| c.workers);
    let go = move || run(raw);
    let result = match workers {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(go),
            Err(e) => Err(format!("--workers: {e}")),
        },
        None => go(),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            if !msg.is_empty() {
                eprintln!("error: {msg}");
            }
            ExitCode::from(2)
        }
    }
}
