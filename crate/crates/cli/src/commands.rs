use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use fastpi::graph::write_degree_csv;
use fastpi::regression::{evaluate, split, train, write_eval_csv, EvalRow, SplitSpec};
use fastpi::{
    fastpi as run_fastpi, reorder as run_reorder, run_method, synth_generate, to_bipartite,
    FastPiConfig, Method, MultiLabelDataset, RegressionCorpusSpec, SparseMatrix, SynthSpec,
};

use crate::Failure;

const DEFAULT_ALPHAS: &str = "0.01,0.05,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";

#[derive(Args)]
pub struct ReorderArgs {
    #[arg(long)]
    input: PathBuf,
    /// Hub selection ratio.
    #[arg(long, default_value_t = 0.01)]
    k: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct SvdArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value = "fastpi")]
    method: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Hub selection ratio (fastpi only).
    #[arg(long, default_value_t = 0.01)]
    k: f64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct PinvArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.01)]
    k: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the per-stage timing CSV here.
    #[arg(long)]
    timings: Option<PathBuf>,
}

#[derive(Args)]
pub struct RegressArgs {
    #[arg(long)]
    dataset: PathBuf,
    /// One or more rank ratios, comma separated.
    #[arg(long)]
    alpha: String,
    /// One or more methods, comma separated.
    #[arg(long, default_value = "fastpi")]
    method: String,
    #[arg(long, default_value_t = 0.01)]
    k: f64,
    /// Training fraction.
    #[arg(long, default_value_t = 0.9)]
    split: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "1,3,5")]
    pk: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

#[derive(Args)]
pub struct BenchArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = DEFAULT_ALPHAS)]
    alphas: String,
    #[arg(long, default_value = "fastpi,randpi,dense")]
    methods: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    k: f64,
    /// Timed runs per cell (bench-time only).
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    plot_script: Option<PathBuf>,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    density: f64,
    #[arg(long, default_value_t = 2.0)]
    exponent: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of planted labels; 0 writes a bare feature matrix.
    #[arg(long, default_value_t = 0)]
    labels: usize,
    /// Fraction of the feature dimension that carries label signal.
    #[arg(long, default_value_t = 0.3)]
    rank_ratio: f64,
    #[arg(long, default_value_t = 3)]
    labels_per_row: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
pub struct DegreesArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>, Failure> {
    let items: Result<Vec<T>, _> = text
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>())
        .collect();
    match items {
        Ok(v) if !v.is_empty() => Ok(v),
        _ => Err(Failure::Usage(format!("invalid {what} list '{text}'"))),
    }
}

fn parse_alphas(text: &str) -> Result<Vec<f64>, Failure> {
    let alphas: Vec<f64> = parse_list(text, "alpha")?;
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && **a <= 1.0)) {
        return Err(Failure::Usage(format!("alpha {a} outside (0, 1]")));
    }
    Ok(alphas)
}

fn parse_methods(text: &str) -> Result<Vec<Method>, Failure> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.parse::<Method>().map_err(|e| Failure::Usage(e.to_string())))
        .collect::<Result<Vec<_>, _>>()
        .and_then(|v| {
            if v.is_empty() {
                Err(Failure::Usage("empty method list".into()))
            } else {
                Ok(v)
            }
        })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn load_features(path: &Path) -> Result<SparseMatrix, Failure> {
    Ok(load_dataset(path)?.into_parts().0)
}

fn load_dataset(path: &Path) -> Result<MultiLabelDataset, Failure> {
    MultiLabelDataset::load(path).map_err(|e| match e {
        fastpi::Error::Io(io) => Failure::Usage(format!("cannot read {}: {io}", path.display())),
        other => Failure::Lib(other),
    })
}

fn write_plot_script(path: &Path, csv: &Path, x: &str, y: &str, group: &str) -> Result<(), Failure> {
    let mut w = create(path)?;
    writeln!(w, "import pandas as pd")?;
    writeln!(w, "import matplotlib.pyplot as plt")?;
    writeln!(w)?;
    writeln!(w, "df = pd.read_csv({:?})", csv.display().to_string())?;
    writeln!(w, "fig, ax = plt.subplots()")?;
    writeln!(w, "for key, part in df.groupby({group:?}):")?;
    writeln!(w, "    part = part.sort_values({x:?})")?;
    writeln!(w, "    ax.plot(part[{x:?}], part[{y:?}], marker='o', label=str(key))")?;
    writeln!(w, "ax.set_xlabel({x:?})")?;
    writeln!(w, "ax.set_ylabel({y:?})")?;
    writeln!(w, "ax.legend()")?;
    writeln!(w, "fig.savefig({:?})", csv.with_extension("png").display().to_string())?;
    w.flush()?;
    Ok(())
}

pub fn reorder(args: ReorderArgs) -> Result<(), Failure> {
    let a = load_features(&args.input)?;
    let result = run_reorder(&to_bipartite(&a), args.k)?;
    let mut w = create(&args.out)?;
    result.write_text(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn svd(args: SvdArgs) -> Result<(), Failure> {
    let method: Method = args.method.parse().map_err(|e: fastpi::Error| Failure::Usage(e.to_string()))?;
    let a = load_features(&args.input)?;
    let run = run_method(method, &a, args.alpha, args.k, args.seed)?;
    let mut w = create(&args.out)?;
    run.svd.write_binary(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn pinv(args: PinvArgs) -> Result<(), Failure> {
    let a = load_features(&args.input)?;
    let cfg = FastPiConfig::new(args.alpha).with_k(args.k).with_seed(args.seed);
    let out = run_fastpi(&a, &cfg)?;
    for note in &out.diagnostics {
        eprintln!("note: {note}");
    }
    let mut w = create(&args.out)?;
    out.pinv.to_factors().write_binary(&mut w)?;
    w.flush()?;
    if let Some(path) = args.timings {
        let mut w = create(&path)?;
        out.timings.write_csv(&mut w)?;
        w.flush()?;
    }
    Ok(())
}

pub fn regress(args: RegressArgs) -> Result<(), Failure> {
    let alphas = parse_alphas(&args.alpha)?;
    let methods = parse_methods(&args.method)?;
    let ks: Vec<usize> = parse_list(&args.pk, "precision cutoff")?;
    let ds = load_dataset(&args.dataset)?;
    let spec = SplitSpec {
        train_fraction: args.split,
        seed: args.seed,
    };
    let (train_set, test_set) = split(&ds, &spec)?;
    let mut rows = Vec::new();
    for &method in &methods {
        for &alpha in &alphas {
            let model = train(&train_set, method, alpha, args.k, args.seed)?;
            let precisions = evaluate(&model, &test_set, &ks)?;
            for (&k, &precision) in ks.iter().zip(&precisions) {
                rows.push(EvalRow {
                    method: method.name().to_string(),
                    alpha,
                    k,
                    precision,
                    train_seconds: model.train_seconds,
                    seed: args.seed,
                });
            }
        }
    }
    let mut w = create(&args.out)?;
    write_eval_csv(&mut w, &rows)?;
    w.flush()?;
    if let Some(path) = args.plot_script {
        write_plot_script(&path, &args.out, "alpha", "precision", "method")?;
    }
    Ok(())
}

pub fn bench_error(args: BenchArgs) -> Result<(), Failure> {
    let alphas = parse_alphas(&args.alphas)?;
    let methods = parse_methods(&args.methods)?;
    let a = load_features(&args.input)?;
    let mut w = create(&args.out)?;
    writeln!(w, "method,alpha,frobenius_error")?;
    for &method in &methods {
        for &alpha in &alphas {
            let run = run_method(method, &a, alpha, args.k, args.seed)?;
            let err = run.svd.residual(&a)?;
            writeln!(w, "{method},{alpha},{err:.16e}")?;
        }
    }
    w.flush()?;
    if let Some(path) = args.plot_script {
        write_plot_script(&path, &args.out, "alpha", "frobenius_error", "method")?;
    }
    Ok(())
}

/// Per-run stage CSV path: `<out stem>_<method>_<alpha>_<repeat>.stages.csv`.
fn stage_path(out: &Path, method: Method, alpha: f64, repeat: usize) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "bench".into());
    out.with_file_name(format!("{stem}_{method}_{alpha}_{repeat}.stages.csv"))
}

pub fn bench_time(args: BenchArgs) -> Result<(), Failure> {
    let alphas = parse_alphas(&args.alphas)?;
    let methods = parse_methods(&args.methods)?;
    if args.repeats == 0 {
        return Err(Failure::Usage("repeats must be at least 1".into()));
    }
    let a = load_features(&args.input)?;
    let mut w = create(&args.out)?;
    writeln!(w, "method,alpha,total_seconds")?;
    for &method in &methods {
        for &alpha in &alphas {
            // warm-up, discarded
            run_method(method, &a, alpha, args.k, args.seed)?;
            for repeat in 0..args.repeats {
                let start = Instant::now();
                let run = run_method(method, &a, alpha, args.k, args.seed)?;
                let total = start.elapsed().as_secs_f64();
                writeln!(w, "{method},{alpha},{total:.9}")?;
                let mut sw = create(&stage_path(&args.out, method, alpha, repeat))?;
                run.timings.write_csv(&mut sw)?;
                sw.flush()?;
            }
        }
    }
    w.flush()?;
    if let Some(path) = args.plot_script {
        write_plot_script(&path, &args.out, "alpha", "total_seconds", "method")?;
    }
    Ok(())
}

pub fn synth(args: SynthArgs) -> Result<(), Failure> {
    let spec = SynthSpec::new(args.m, args.n, args.density, args.exponent, args.seed);
    let ds = if args.labels == 0 {
        MultiLabelDataset::unlabeled(synth_generate(&spec)?)
    } else {
        fastpi::regression_corpus(&RegressionCorpusSpec {
            features: spec,
            n_labels: args.labels,
            rank_ratio: args.rank_ratio,
            labels_per_row: args.labels_per_row,
        })?
    };
    let mut w = create(&args.out)?;
    ds.write(&mut w)?;
    w.flush()?;
    Ok(())
}

pub fn degrees(args: DegreesArgs) -> Result<(), Failure> {
    let a = load_features(&args.input)?;
    let (inst, feat) = to_bipartite(&a).degree_histograms();
    let mut w = create(&args.out)?;
    write_degree_csv(&mut w, &inst, &feat)?;
    w.flush()?;
    Ok(())
}
