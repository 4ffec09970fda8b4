use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use log::info;

use plexrules_core::datagen::{generate, SynthConfig};
use plexrules_core::eval::{
    ensemble, kfold_split, roc_auc, temporal_split, ClassicMethod, ClassicScorer, EvalReport,
    RuleScorer, Scorer, SharmaScorer, Split, Universe,
};
use plexrules_core::graph::{load_multiplex, load_temporal, MultiplexGraph};
use plexrules_core::miner::{mine, MiningConfig, Support, CODE_SCHEME_VERSION};
use plexrules_core::pattern::Strategy;
use plexrules_core::predictor::{apply_rules, LinkClass, PredictOptions, Segment};
use plexrules_core::rules::{derive_rules_posthoc, mine_with_rules, RuleSet, DEFAULT_MIN_CONFIDENCE};
use plexrules_core::signed::{frustration_report, SignMap};
use plexrules_core::Error;

const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (code scheme v1)");

#[derive(Parser)]
#[command(name = "plexrules", version = VERSION, about = "Graph association rules for multiplex link prediction")]
struct Cli {
    /// Worker threads; 1 runs everything sequentially.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write phase timings as TSV to this file, or `-` for stderr.
    #[arg(long, global = true, value_name = "PATH|-")]
    timings: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GraphArgs {
    /// Edge file: `u<TAB>v<TAB>layer` (plus `<TAB>t` for temporal runs).
    #[arg(long)]
    edges: PathBuf,
    /// Attribute file: `node<TAB>label`.
    #[arg(long)]
    attrs: Option<PathBuf>,
    #[arg(long)]
    directed: bool,
}

#[derive(Args)]
struct MineArgs {
    /// Minimum support: a node count, `40%` or `0.4`.
    #[arg(long, default_value = "1")]
    support: Support,
    /// Maximum pattern size in nodes.
    #[arg(long, default_value_t = 4)]
    size: usize,
    #[arg(long, default_value_t = DEFAULT_MIN_CONFIDENCE)]
    confidence: f64,
    #[arg(long, default_value = "bfs")]
    strategy: Strategy,
    /// Drop stored embeddings of patterns with more occurrences than this.
    #[arg(long)]
    embedding_cap: Option<usize>,
}

impl MineArgs {
    fn config(&self) -> MiningConfig {
        MiningConfig {
            support: self.support,
            max_nodes: self.size,
            strategy: self.strategy,
            embedding_cap: self.embedding_cap,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Mine frequent patterns and association rules.
    Mine {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        mining: MineArgs,
        /// Derive rules from the finished pattern set instead of during
        /// the search.
        #[arg(long)]
        legacy_rules: bool,
        /// With --legacy-rules, also build rules during the search and
        /// fail unless both rule sets agree.
        #[arg(long, requires = "legacy_rules")]
        check_modes: bool,
        #[arg(long)]
        patterns_out: Option<PathBuf>,
        /// Rule dump destination; stdout when absent.
        #[arg(long)]
        rules_out: Option<PathBuf>,
    },
    /// Score candidate links with a rule dump.
    Predict {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long, default_value = "all")]
        segment: Segment,
        /// Keep only the best K candidates.
        #[arg(long)]
        top_k: Option<usize>,
        /// Count each rule at most once per candidate.
        #[arg(long)]
        dedupe_firings: bool,
        /// Score dump destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-validate or time-split a scorer and report ROC AUC.
    Evaluate {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        mining: MineArgs,
        /// rules, sharma, ra, ja, pa, aa, ensemble-base or ensemble-opt.
        #[arg(long, default_value = "rules")]
        method: String,
        #[arg(long, conflicts_with = "temporal")]
        kfold: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Train up to T, test on (T, T + DELTA].
        #[arg(long, num_args = 2, value_names = ["T", "DELTA"])]
        temporal: Option<Vec<i64>>,
        #[arg(long, default_value = "full")]
        universe: Universe,
        #[arg(long, default_value = "all")]
        segment: Segment,
        #[arg(long)]
        dedupe_firings: bool,
        /// Write every ROC curve as `fold<TAB>fpr<TAB>tpr`.
        #[arg(long)]
        roc_out: Option<PathBuf>,
    },
    /// Classify rules by how they change structural balance.
    Frustration {
        /// Graph the rules were mined from, for layer names.
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        rules: PathBuf,
        /// `pardus-preset` or `layer=+,layer=-,...`.
        #[arg(long)]
        signs: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic power-law clustered multiplex graph.
    Generate {
        #[arg(long, default_value_t = 500)]
        nodes: usize,
        #[arg(long, default_value_t = 7)]
        layers: usize,
        #[arg(long, default_value_t = 8)]
        avg_degree: usize,
        #[arg(long, default_value_t = 0.5)]
        p_triangle: f64,
        #[arg(long, default_value_t = 4)]
        labels: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        edges_out: PathBuf,
        #[arg(long)]
        attrs_out: Option<PathBuf>,
    },
}

#[derive(Default)]
struct Timings(Vec<(&'static str, f64)>);

impl Timings {
    fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.0.push((phase, start.elapsed().as_secs_f64()));
        out
    }

    fn write(&self, dest: &str) -> io::Result<()> {
        let mut text = String::from("phase\tseconds\n");
        for (phase, s) in &self.0 {
            text.push_str(&format!("{phase}\t{s:.6}\n"));
        }
        if dest == "-" {
            io::stderr().write_all(text.as_bytes())
        } else {
            std::fs::write(dest, text)
        }
    }
}

enum Failure {
    Core(Error),
    Io(PathBuf, io::Error),
    Assertion(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(Error::Parse { .. } | Error::UnknownNode(_) | Error::Io { .. }) | Failure::Io(..) => 1,
            Failure::Core(Error::InvalidParam(_) | Error::Rejected(_)) => 2,
            Failure::Core(Error::Corrupt(_) | Error::Disconnected) | Failure::Assertion(_) => 3,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Core(e) => e.to_string(),
            Failure::Io(p, e) => format!("i/o error on {}: {e}", p.display()),
            Failure::Assertion(m) => m.clone(),
        }
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

fn output(path: Option<&Path>, write: impl FnOnce(&mut dyn Write) -> io::Result<()>) -> Outcome<()> {
    let result = match path {
        Some(p) => File::create(p).and_then(|f| {
            let mut w = BufWriter::new(f);
            write(&mut w)?;
            w.flush()
        }),
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            write(&mut w).and_then(|_| w.flush())
        }
    };
    result.map_err(|e| Failure::Io(path.map_or_else(|| PathBuf::from("<stdout>"), Path::to_path_buf), e))
}

fn load(g: &GraphArgs) -> Outcome<MultiplexGraph> {
    Ok(load_multiplex(&g.edges, g.attrs.as_deref(), g.directed)?)
}

fn cmd_mine(
    graph: &GraphArgs,
    mining: &MineArgs,
    legacy_rules: bool,
    check_modes: bool,
    patterns_out: Option<&Path>,
    rules_out: Option<&Path>,
    timings: &mut Timings,
) -> Outcome<()> {
    let g = timings.time("preprocess_s", || load(graph))?;
    let cfg = mining.config();
    let (patterns, rules) = if legacy_rules {
        let patterns = timings.time("mining_s", || mine(&g, &cfg, None))?;
        let rules = timings.time("rule_posthoc_s", || derive_rules_posthoc(&patterns, mining.confidence))?;
        if check_modes {
            let (_, embedded) = mine_with_rules(&g, &cfg, mining.confidence)?;
            if embedded != rules {
                return Err(Failure::Assertion(format!(
                    "post-hoc and embedded rule sets differ ({} vs {} rules)",
                    rules.len(),
                    embedded.len()
                )));
            }
            info!("post-hoc and embedded rule sets agree");
        }
        (patterns, rules)
    } else {
        timings.time("mining_s", || mine_with_rules(&g, &cfg, mining.confidence))?
    };
    info!("{} patterns, {} rules", patterns.len(), rules.len());
    if let Some(p) = patterns_out {
        output(Some(p), |w| patterns.write_dump(w))?;
    }
    output(rules_out, |w| rules.write_dump(w))
}

fn cmd_predict(
    graph: &GraphArgs,
    rules: &Path,
    segment: Segment,
    top_k: Option<usize>,
    dedupe_firings: bool,
    out: Option<&Path>,
    timings: &mut Timings,
) -> Outcome<()> {
    let g = timings.time("preprocess_s", || load(graph))?;
    let rules = RuleSet::load(rules)?;
    let opts = PredictOptions { dedupe_rule_firings: dedupe_firings };
    let table = timings.time("apply_s", || apply_rules(&g, &rules, opts))?;
    let mut kept = plexrules_core::predictor::ScoreTable::new(g.directed());
    let ranked = match top_k {
        Some(k) => table.top_k(k, segment)?,
        None => table.ranked(segment),
    };
    for (c, s) in ranked {
        kept.add(c, s);
    }
    output(out, |w| kept.write_dump(&g, w))
}

fn scorers_for(method: &str, mining: &MineArgs, dedupe: bool, g: &MultiplexGraph) -> Outcome<Vec<Box<dyn Scorer>>> {
    let rules = || -> Box<dyn Scorer> {
        Box::new(RuleScorer {
            mining: mining.config(),
            min_confidence: mining.confidence,
            predict: PredictOptions { dedupe_rule_firings: dedupe },
        })
    };
    Ok(match method {
        "rules" => vec![rules()],
        "sharma" => vec![Box::new(SharmaScorer)],
        "ensemble-base" | "ensemble-opt" => {
            let mut all = vec![rules()];
            if g.layer_count() > 1 {
                all.push(Box::new(SharmaScorer));
            }
            for m in ClassicMethod::ALL {
                all.push(Box::new(ClassicScorer(m)));
            }
            all
        }
        other => vec![Box::new(ClassicScorer(other.parse()?))],
    })
}

fn segment_auc(r: &EvalReport, segment: Segment) -> Option<f64> {
    match segment {
        Segment::Both => Some(r.auc),
        Segment::OldOld => r.segment_auc(LinkClass::OldOld),
        Segment::OldNew => r.segment_auc(LinkClass::OldNew),
    }
}

fn fmt_auc(a: Option<f64>) -> String {
    a.map_or_else(|| "NA".into(), |x| format!("{x:.6}"))
}

#[allow(clippy::too_many_arguments)]
fn cmd_evaluate(
    graph: &GraphArgs,
    mining: &MineArgs,
    method: &str,
    kfold: Option<usize>,
    seed: u64,
    temporal: Option<&[i64]>,
    universe: Universe,
    segment: Segment,
    dedupe_firings: bool,
    roc_out: Option<&Path>,
    timings: &mut Timings,
) -> Outcome<()> {
    let splits: Vec<Split> = match temporal {
        Some(td) => {
            let tg = timings.time("preprocess_s", || load_temporal(&graph.edges, graph.attrs.as_deref(), graph.directed))?;
            vec![temporal_split(&tg, td[0], td[1])?]
        }
        None => {
            let g = timings.time("preprocess_s", || load(graph))?;
            kfold_split(&g, kfold.unwrap_or(10), seed)?
        }
    };
    let scorers = scorers_for(method, mining, dedupe_firings, &splits[0].train)?;
    let refs: Vec<&dyn Scorer> = scorers.iter().map(Box::as_ref).collect();
    let start = Instant::now();
    let reports: Vec<EvalReport> = if method.starts_with("ensemble") {
        let optimize = method == "ensemble-opt";
        splits
            .iter()
            .map(|s| roc_auc(&ensemble(&refs, s, optimize, seed)?, s, universe))
            .collect::<plexrules_core::Result<_>>()?
    } else {
        splits
            .iter()
            .map(|s| roc_auc(&refs[0].score(&s.train)?, s, universe))
            .collect::<plexrules_core::Result<_>>()?
    };
    timings.0.push(("evaluate_s", start.elapsed().as_secs_f64()));
    let chosen: Vec<f64> = reports.iter().filter_map(|r| segment_auc(r, segment)).collect();
    output(None, |w| {
        writeln!(w, "fold\tauc\tauc_{}\tauc_{}\tpositives\tnegatives", LinkClass::OldOld, LinkClass::OldNew)?;
        for (i, r) in reports.iter().enumerate() {
            writeln!(
                w,
                "{i}\t{}\t{}\t{}\t{}\t{}",
                fmt_auc(segment_auc(r, segment)),
                fmt_auc(r.segment_auc(LinkClass::OldOld)),
                fmt_auc(r.segment_auc(LinkClass::OldNew)),
                r.positives,
                r.negatives
            )?;
        }
        let mean = if chosen.is_empty() {
            None
        } else {
            Some(chosen.iter().sum::<f64>() / chosen.len() as f64)
        };
        writeln!(w, "mean\t{}", fmt_auc(mean))
    })?;
    if let Some(p) = roc_out {
        output(Some(p), |w| {
            writeln!(w, "fold\tfpr\ttpr")?;
            for (i, r) in reports.iter().enumerate() {
                for (x, y) in &r.roc_points {
                    writeln!(w, "{i}\t{x}\t{y}")?;
                }
            }
            Ok(())
        })?;
    }
    Ok(())
}

fn cmd_frustration(graph: &GraphArgs, rules: &Path, signs: &str, out: Option<&Path>) -> Outcome<()> {
    let g = load(graph)?;
    let rules = RuleSet::load(rules)?;
    let signs = if signs == "pardus-preset" {
        SignMap::pardus(g.layer_names())?
    } else {
        SignMap::parse(signs, g.layer_names())?
    };
    let report = frustration_report(&rules, &signs)?;
    output(out, |w| report.write_tsv(w))
}

fn run(cli: Cli, timings: &mut Timings) -> Outcome<()> {
    match &cli.command {
        Command::Mine {
            graph,
            mining,
            legacy_rules,
            check_modes,
            patterns_out,
            rules_out,
        } => cmd_mine(
            graph,
            mining,
            *legacy_rules,
            *check_modes,
            patterns_out.as_deref(),
            rules_out.as_deref(),
            timings,
        ),
        Command::Predict {
            graph,
            rules,
            segment,
            top_k,
            dedupe_firings,
            out,
        } => cmd_predict(graph, rules, *segment, *top_k, *dedupe_firings, out.as_deref(), timings),
        Command::Evaluate {
            graph,
            mining,
            method,
            kfold,
            seed,
            temporal,
            universe,
            segment,
            dedupe_firings,
            roc_out,
        } => cmd_evaluate(
            graph,
            mining,
            method,
            *kfold,
            *seed,
            temporal.as_deref(),
            *universe,
            *segment,
            *dedupe_firings,
            roc_out.as_deref(),
            timings,
        ),
        Command::Frustration {
            graph,
            rules,
            signs,
            out,
        } => cmd_frustration(graph, rules, signs, out.as_deref()),
        Command::Generate {
            nodes,
            layers,
            avg_degree,
            p_triangle,
            labels,
            seed,
            edges_out,
            attrs_out,
        } => {
            let cfg = SynthConfig {
                n: *nodes,
                layers: *layers,
                avg_degree: *avg_degree,
                p_triangle: *p_triangle,
                n_labels: *labels,
                seed: *seed,
            };
            let g = generate(&cfg)?;
            output(Some(edges_out), |w| g.write_edges(w))?;
            if let Some(p) = attrs_out {
                output(Some(p), |w| g.write_attributes(w))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    debug_assert_eq!(CODE_SCHEME_VERSION, 1);
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .expect("thread pool is configured once");
    }
    let timings_dest = cli.timings.clone();
    let mut timings = Timings::default();
    let result = run(cli, &mut timings);
    if let Some(dest) = timings_dest {
        if let Err(e) = timings.write(&dest) {
            eprintln!("error: cannot write timings to {dest}: {e}");
        }
    }
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.exit_code())
        }
    }
}
