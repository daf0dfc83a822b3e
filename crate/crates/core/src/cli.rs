//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a command fails or validation finds
//! violations, 2 on usage errors.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::actions::{classify_actions, detect_manipulation_contacts, ActionsFile};
use crate::motion_model::{parse_motion, parse_scene, MotionSequence, Scene};
use crate::posegraph::{build_graph, stats, to_dot, DotOptions};
use crate::segmentation::{run_pipeline, PipelineConfig, SegmentReport, DEFAULT_SPEED_THRESHOLD};
use crate::signal::{FilterSpec, SpeedTrace, DEFAULT_CUTOFF_HZ};
use crate::contact::DEFAULT_CONTACT_EPSILON;
use crate::taxonomy::{validate, TaxonomyFile, TaxonomyGraph, DEFAULT_TAXONOMY};
use crate::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "wbpose", version, about = "Whole-body support pose taxonomy and motion analysis")]
pub struct Cli {
    /// Taxonomy JSON to use instead of the built-in table.
    #[arg(long, global = true, value_name = "FILE")]
    pub taxonomy_file: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect the support pose taxonomy.
    #[command(subcommand)]
    Taxonomy(TaxonomyCommand),
    /// Filtered end-effector speeds as CSV.
    Speeds {
        #[arg(long, value_name = "FILE")]
        motion: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CUTOFF_HZ)]
        cutoff_hz: f64,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Detect supports and split a motion into labelled segments.
    Segment {
        #[arg(long, value_name = "FILE")]
        motion: PathBuf,
        #[arg(long, value_name = "FILE")]
        scene: PathBuf,
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Pose transition graph of a segment report, as DOT.
    Graph {
        #[arg(long, value_name = "FILE")]
        report: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
        /// Also print visit counts, step count and compliance as JSON.
        #[arg(long)]
        stats: bool,
    },
    /// Classify a segmented motion into action spans.
    Actions {
        #[arg(long, value_name = "FILE")]
        report: PathBuf,
        #[arg(long, value_name = "FILE")]
        motion: PathBuf,
        #[arg(long, value_name = "FILE")]
        scene: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum TaxonomyCommand {
    /// Check class counts, categories and the neighbor relation.
    Validate,
    /// List the neighbors of a class.
    Neighbors { id: String },
    /// Class id of a support multiset such as "Leg:Foot,Arm:Hold".
    Classify {
        #[arg(long)]
        supports: String,
    },
    /// Write the taxonomy table as JSON.
    Export {
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, Args)]
pub struct ConfigArgs {
    #[arg(long, default_value_t = DEFAULT_CUTOFF_HZ)]
    pub cutoff_hz: f64,
    /// Speed threshold in m/s.
    #[arg(long, default_value_t = DEFAULT_SPEED_THRESHOLD)]
    pub threshold: f64,
    /// Contact tolerance in m.
    #[arg(long, default_value_t = DEFAULT_CONTACT_EPSILON)]
    pub contact_eps: f64,
    #[arg(long, default_value_t = 1)]
    pub min_frames: usize,
}

impl From<ConfigArgs> for PipelineConfig {
    fn from(a: ConfigArgs) -> Self {
        PipelineConfig {
            cutoff_hz: a.cutoff_hz,
            speed_threshold: a.threshold,
            contact_epsilon: a.contact_eps,
            min_segment_frames: a.min_frames,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => out
            .write_all(content.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write output: {e}"))),
    }
}

fn load_motion(path: &Path) -> Result<MotionSequence> {
    Ok(parse_motion(&read(path)?)?)
}

fn load_scene(path: &Path) -> Result<Scene> {
    Ok(parse_scene(&read(path)?)?)
}

fn taxonomy_source(cli: &Cli) -> Result<String> {
    match &cli.taxonomy_file {
        Some(p) => read(p),
        None => Ok(DEFAULT_TAXONOMY.to_string()),
    }
}

fn load_taxonomy(cli: &Cli) -> Result<TaxonomyGraph> {
    match &cli.taxonomy_file {
        Some(p) => Ok(TaxonomyGraph::load(&read(p)?)?),
        None => Ok(TaxonomyGraph::builtin().clone()),
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Taxonomy(TaxonomyCommand::Validate) => {
            let file = TaxonomyFile::parse(&taxonomy_source(cli)?)?;
            let (graph, mut violations) = file.build();
            let mut report = validate(&graph);
            violations.append(&mut report.violations);
            report.violations = violations;
            let mut text = format!("{report}\n");
            for v in &report.violations {
                text.push_str(&format!("  {v}\n"));
            }
            emit(out, None, &text)?;
            Ok(if report.is_clean() { 0 } else { 1 })
        }
        Command::Taxonomy(TaxonomyCommand::Neighbors { id }) => {
            let graph = load_taxonomy(cli)?;
            let ids: Vec<String> = graph.neighbors(id)?.iter().map(|c| c.to_string()).collect();
            emit(out, None, &format!("{}\n", ids.join(" ")))?;
            Ok(0)
        }
        Command::Taxonomy(TaxonomyCommand::Classify { supports }) => {
            let graph = load_taxonomy(cli)?;
            let id = graph.classify(&supports.parse()?)?;
            emit(out, None, &format!("{id}\n"))?;
            Ok(0)
        }
        Command::Taxonomy(TaxonomyCommand::Export { out: path }) => {
            let graph = load_taxonomy(cli)?;
            emit(out, path.as_deref(), &TaxonomyFile::from_graph(&graph).to_json())?;
            Ok(0)
        }
        Command::Speeds { motion, cutoff_hz, out: path } => {
            let motion = load_motion(motion)?;
            let trace = SpeedTrace::end_effectors(&motion, &FilterSpec::new(*cutoff_hz))?;
            emit(out, path.as_deref(), &trace.to_csv())?;
            Ok(0)
        }
        Command::Segment {
            motion,
            scene,
            config,
            out: path,
        } => {
            let graph = load_taxonomy(cli)?;
            let report = run_pipeline(&load_motion(motion)?, &load_scene(scene)?, &(*config).into(), &graph)?;
            emit(out, path.as_deref(), &report.to_json())?;
            Ok(0)
        }
        Command::Graph {
            report,
            out: path,
            stats: with_stats,
        } => {
            let report = SegmentReport::from_json(&read(report)?)?;
            let graph = build_graph(&report)?;
            emit(out, path.as_deref(), &to_dot(&graph, &DotOptions::default()))?;
            if *with_stats {
                let s = stats(&graph, &load_taxonomy(cli)?);
                let mut text = serde_json::to_string_pretty(&s).expect("stats serialize");
                text.push('\n');
                emit(out, None, &text)?;
            }
            Ok(0)
        }
        Command::Actions {
            report,
            motion,
            scene,
            out: path,
        } => {
            let report = SegmentReport::from_json(&read(report)?)?;
            let motion = load_motion(motion)?;
            let scene = load_scene(scene)?;
            let contacts = detect_manipulation_contacts(&motion, &scene, &report.config)?;
            let spans = classify_actions(&report, &contacts);
            emit(out, path.as_deref(), &ActionsFile { contacts, spans }.to_json())?;
            Ok(0)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
