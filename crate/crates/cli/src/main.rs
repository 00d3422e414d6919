mod formats;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anime_core::forge::{
    gen_access_control, gen_fattree, gen_isp, observe_subset, AccessControlSpec, AccessVariant, FatTreeSpec,
    GeneratedDataset, IspSpec,
};
use anime_core::{
    evaluate, infer, infer_many, metrics, text, BatchSize, Error, FeatureType, InferenceConfig, IntentSet, Label,
};
use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use formats::{IntentRecord, ReportRecord};

#[derive(Parser)]
#[command(
    name = "anime",
    version,
    about = "Infer compact intents from observed forwarding paths"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset.
    Generate {
        #[command(subcommand)]
        dataset: Dataset,
    },
    /// Infer at most k intents covering the given paths.
    Infer(InferArgs),
    /// Score intents against reference paths.
    Eval(EvalArgs),
    /// Infer and evaluate over a range of k and several seeds.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct GenCommon {
    #[arg(long)]
    seed: u64,
    /// Fraction of paths kept in paths.jsonl.
    #[arg(long, default_value_t = 1.0)]
    observe: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Dataset {
    /// Servers in overlapping-free groups with group/server access intents.
    AccessControl {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        min: usize,
        #[arg(long)]
        max: usize,
        #[arg(long)]
        m: usize,
        /// Use flat server labels instead of group labels.
        #[arg(long)]
        flat: bool,
        #[command(flatten)]
        common: GenCommon,
    },
    /// ISP routing records (organization, ingress, egress).
    Isp {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        egresses: usize,
        #[arg(long)]
        destinations: usize,
        #[command(flatten)]
        common: GenCommon,
    },
    /// Fat-tree data center paths as HRE strings.
    Fattree {
        #[arg(long)]
        c: usize,
        #[arg(long)]
        f: usize,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        l: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        g: usize,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        d: usize,
        #[command(flatten)]
        common: GenCommon,
    },
}

#[derive(Args)]
struct InferArgs {
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    feature: PathBuf,
    #[arg(long)]
    k: usize,
    /// Partner clusters sampled per event, or "all".
    #[arg(long, default_value = "all")]
    b: BatchSize,
    #[arg(long)]
    seed: u64,
    /// Stop at exactly k clusters even when further merges are free.
    #[arg(long)]
    no_free_merges: bool,
    /// Print every merge to stderr.
    #[arg(long)]
    trace: bool,
    /// Intents file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    intents: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    feature: PathBuf,
    /// Report file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = metrics::DEFAULT_CAP)]
    cap: u128,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    paths: PathBuf,
    #[arg(long)]
    reference: PathBuf,
    #[arg(long)]
    feature: PathBuf,
    #[arg(long)]
    k_min: usize,
    #[arg(long)]
    k_max: usize,
    #[arg(long, default_value_t = 1)]
    k_step: usize,
    #[arg(long, default_value = "all")]
    b: BatchSize,
    /// Comma-separated seeds.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    #[arg(long)]
    no_free_merges: bool,
    /// Serve every k of a seed from one clustering pass; runtime_ms is then
    /// the time of that shared pass.
    #[arg(long)]
    single_pass: bool,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = metrics::DEFAULT_CAP)]
    cap: u128,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e
                .chain()
                .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::Invariant(_))));
            ExitCode::from(if internal { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { dataset } => generate(dataset),
        Command::Infer(a) => cmd_infer(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Sweep(a) => cmd_sweep(a),
    }
}

fn generate(dataset: Dataset) -> Result<()> {
    let (ds, common) = match dataset {
        Dataset::AccessControl {
            n,
            g,
            min,
            max,
            m,
            flat,
            common,
        } => {
            let spec = AccessControlSpec {
                n,
                g,
                min_size: min,
                max_size: max,
                m,
                seed: common.seed,
            };
            let variant = if flat {
                AccessVariant::Flat
            } else {
                AccessVariant::Hierarchical
            };
            (gen_access_control(&spec, variant)?, common)
        }
        Dataset::Isp {
            nodes,
            egresses,
            destinations,
            common,
        } => (
            gen_isp(&IspSpec {
                nodes,
                egresses,
                destinations,
                seed: common.seed,
            })?,
            common,
        ),
        Dataset::Fattree {
            c,
            f,
            p,
            l,
            r,
            s,
            g,
            i,
            d,
            common,
        } => (
            gen_fattree(&FatTreeSpec {
                c,
                f,
                p,
                l,
                r,
                s,
                g,
                i,
                d,
                seed: common.seed,
            })?,
            common,
        ),
    };
    let ds = if common.observe < 1.0 {
        observe_subset(&ds, common.observe, common.seed)?
    } else {
        ds
    };
    write_dataset(&common.out_dir, &ds)?;
    eprintln!(
        "wrote {} observed and {} possible paths, {} truth intents to {}",
        ds.observed.len(),
        ds.possible.len(),
        ds.truth.len(),
        common.out_dir.display()
    );
    Ok(())
}

fn write_dataset(dir: &Path, ds: &GeneratedDataset) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    formats::write_paths(&dir.join(formats::PATHS), &ds.feature, &ds.observed)?;
    formats::write_paths(&dir.join(formats::POSSIBLE), &ds.feature, &ds.possible)?;
    formats::write_feature(&dir.join(formats::FEATURE), &ds.feature)?;
    formats::write_truth(&dir.join(formats::TRUTH), &ds.feature, &ds.truth)
}

fn cmd_infer(a: InferArgs) -> Result<()> {
    if a.k == 0 {
        bail!(Error::Usage("--k must be at least 1".into()));
    }
    let feature = formats::read_feature(&a.feature)?;
    let paths = formats::read_paths(&a.paths, &feature)?;
    let config = InferenceConfig::new(a.k)
        .batch(a.b)
        .seed(a.seed)
        .merge_nonpositive(!a.no_free_merges)
        .trace(a.trace);
    let start = Instant::now();
    let r = infer::<f64>(&paths, &feature, &config)?;
    let elapsed = start.elapsed();
    if a.trace {
        for s in &r.trace {
            eprintln!(
                "merge {}: {} + {} -> {} distance {} live {} total {} {}",
                s.step,
                s.merged.0,
                s.merged.1,
                s.new_id,
                s.distance,
                s.live,
                s.total_cost,
                text::render(&feature, &s.representative)
            );
        }
        eprintln!(
            "{} paths ({} distinct), {} intents, cost {}, {} queue ops, {:.1} ms",
            paths.len(),
            r.stats.distinct_paths,
            r.intents.len(),
            r.total_cost,
            r.stats.queue_ops(),
            elapsed.as_secs_f64() * 1e3
        );
    }
    let mut members = vec![0usize; r.intents.len()];
    for &i in &r.assignments {
        members[i] += 1;
    }
    let mut out = String::new();
    for (l, m) in r.intents.intents().iter().zip(members) {
        let rec = IntentRecord {
            intent: text::format_label(&feature, l),
            members: m,
            cost: feature.cost(l),
        };
        out += &serde_json::to_string(&rec)?;
        out.push('\n');
    }
    formats::emit(a.out.as_deref(), &out)
}

fn cmd_eval(a: EvalArgs) -> Result<()> {
    let feature = formats::read_feature(&a.feature)?;
    let intents = formats::read_intents(&a.intents, &feature)?;
    let reference = formats::read_paths(&a.reference, &feature)?;
    let set = IntentSet::unbounded(&feature, intents)?;
    let report = evaluate::<f64>(&feature, &set, &reference, a.cap)?;
    let doc = serde_json::to_string_pretty(&ReportRecord::new(&feature, &report))? + "\n";
    formats::emit(a.out.as_deref(), &doc)?;
    let bound = if report.fp_exact { "" } else { " (fp is an upper bound)" };
    let summary = format!(
        "precision={:.4}, recall={:.4}, f={:.4}{bound}",
        report.precision, report.recall, report.f_score
    );
    if a.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

struct Row {
    k: usize,
    seed: u64,
    tp: u128,
    fn_: u128,
    fp: u128,
    fp_exact: bool,
    precision: f64,
    recall: f64,
    f_score: f64,
    runtime_ms: f64,
}

fn sweep_config(a: &SweepArgs, k: usize, seed: u64) -> InferenceConfig {
    InferenceConfig::new(k)
        .batch(a.b)
        .seed(seed)
        .merge_nonpositive(!a.no_free_merges)
}

fn sweep_cell(
    feature: &FeatureType,
    paths: &[Label],
    reference: &[Label],
    a: &SweepArgs,
    k: usize,
    seed: u64,
) -> Result<Row> {
    let start = Instant::now();
    let r = infer::<f64>(paths, feature, &sweep_config(a, k, seed))?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    row(feature, &r.intents, reference, a, k, seed, runtime_ms)
}

fn sweep_seed(
    feature: &FeatureType,
    paths: &[Label],
    reference: &[Label],
    a: &SweepArgs,
    ks: &[usize],
    seed: u64,
) -> Result<Vec<Row>> {
    let start = Instant::now();
    let results = infer_many::<f64>(paths, feature, &sweep_config(a, 1, seed), ks)?;
    let runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    ks.iter()
        .zip(&results)
        .map(|(&k, r)| row(feature, &r.intents, reference, a, k, seed, runtime_ms))
        .collect()
}

fn row(
    feature: &FeatureType,
    intents: &IntentSet,
    reference: &[Label],
    a: &SweepArgs,
    k: usize,
    seed: u64,
    runtime_ms: f64,
) -> Result<Row> {
    let e = evaluate::<f64>(feature, intents, reference, a.cap)?;
    Ok(Row {
        k,
        seed,
        tp: e.tp,
        fn_: e.fn_,
        fp: e.fp,
        fp_exact: e.fp_exact,
        precision: e.precision,
        recall: e.recall,
        f_score: e.f_score,
        runtime_ms,
    })
}

fn cmd_sweep(a: SweepArgs) -> Result<()> {
    if a.k_min == 0 || a.k_min > a.k_max || a.k_step == 0 {
        bail!(Error::Usage(format!(
            "need 1 <= k-min <= k-max and k-step >= 1, got {}..{} step {}",
            a.k_min, a.k_max, a.k_step
        )));
    }
    let feature = formats::read_feature(&a.feature)?;
    let paths = formats::read_paths(&a.paths, &feature)?;
    let reference = formats::read_paths(&a.reference, &feature)?;
    let ks: Vec<usize> = (a.k_min..=a.k_max).step_by(a.k_step).collect();
    let mut rows: Vec<Row> = if a.single_pass {
        let per_seed: Vec<Vec<Row>> = a
            .seeds
            .par_iter()
            .map(|&seed| sweep_seed(&feature, &paths, &reference, &a, &ks, seed))
            .collect::<Result<_>>()?;
        per_seed.into_iter().flatten().collect()
    } else {
        let cells: Vec<(usize, u64)> = ks.iter().flat_map(|&k| a.seeds.iter().map(move |&s| (k, s))).collect();
        cells
            .par_iter()
            .map(|&(k, seed)| sweep_cell(&feature, &paths, &reference, &a, k, seed))
            .collect::<Result<_>>()?
    };
    rows.sort_by_key(|r| (r.k, r.seed));

    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "k",
        "seed",
        "tp",
        "fn",
        "fp",
        "fp_exact",
        "precision",
        "recall",
        "f_score",
        "runtime_ms",
    ])?;
    for r in &rows {
        w.write_record([
            r.k.to_string(),
            r.seed.to_string(),
            r.tp.to_string(),
            r.fn_.to_string(),
            r.fp.to_string(),
            r.fp_exact.to_string(),
            format!("{:.6}", r.precision),
            format!("{:.6}", r.recall),
            format!("{:.6}", r.f_score),
            format!("{:.3}", r.runtime_ms),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?;
    formats::emit(a.csv.as_deref(), &String::from_utf8(bytes)?)
}
