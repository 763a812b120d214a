//! Command-line front door: generate corpus permutations, compute bound
//! reports, run the instrumented sorts, build and verify point-set
//! witnesses, render SVG, and sweep the benchmark grid.
//!
//! Exit codes: 0 success, 1 verification or invariant failure, 2 usage
//! error (bad flags, bad inputs, unreadable files).

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use arbor_core::adaptive_sort::{
    par_mergesort, partition_sort_via_duality, seq_mergesort, union_mergesort, ExecMode, SortReport,
};
use arbor_core::bounds::{compute_bounds, compute_bounds_with_tree, BoundReport, InterleaveTree};
use arbor_core::geometry::{
    arboral_mergesort, is_satisfied, plot, render_svg, satisfy_mergesort, satisfy_quicksort,
    PointSet,
};
use arbor_core::permutation::{
    default_block_size, gen_bit_reversal, gen_block_bit_reversal, gen_random, gen_reversed,
    gen_sorted,
};
use arbor_core::Permutation;

#[derive(Parser)]
#[command(
    name = "arbor",
    about = "Adaptive mergesort, interleave-bound calculators, and arboral point-set witnesses",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a permutation file from one of the corpus families.
    Gen {
        family: Family,
        /// Number of keys; bitrev requires a power of two.
        n: usize,
        /// Block size for blockbitrev; defaults to ~lg n.
        #[arg(long)]
        block: Option<usize>,
        /// Seed for the random family.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Compute the interleave and log-interleave bounds of a permutation.
    Bounds {
        input: PathBuf,
        /// Reference tree shape as nested parentheses (`.` leaf, `(LR)`
        /// vertex); defaults to the balanced tree.
        #[arg(long)]
        tree_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = BoundsFormat::Csv)]
        format: BoundsFormat,
        #[command(flatten)]
        out: Output,
    },
    /// Sort a permutation file and report the metered cost as CSV.
    Sort {
        input: PathBuf,
        #[arg(long, value_enum)]
        algo: Algo,
        /// Family label for the CSV row.
        #[arg(long, default_value = "file")]
        family: String,
        /// Seed label for the CSV row.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Arborally satisfy a plotted permutation and emit the point set.
    Satisfy {
        input: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Pivot seed for the quicksort method.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        out: Output,
    },
    /// Check a point-set file for arboral satisfaction.
    Verify { input: PathBuf },
    /// Render a point-set file as SVG.
    Svg {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Run sorts across a size/family/seed grid and emit aggregate CSV.
    Bench {
        /// Comma-separated sizes, e.g. 16,64,256.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Comma-separated families.
        #[arg(long, value_delimiter = ',', required = true)]
        families: Vec<Family>,
        /// Comma-separated seeds (random family only; one row per seed).
        #[arg(long, value_delimiter = ',', default_value = "0")]
        seeds: Vec<u64>,
        /// Algorithms to run.
        #[arg(long, value_delimiter = ',', default_values_t = vec![Algo::Seq, Algo::Par, Algo::UnionBaseline, Algo::PartitionDual])]
        algos: Vec<Algo>,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Output {
    fn emit(&self, text: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => fs::write(path, text)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display()))),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Sorted,
    Reversed,
    Random,
    Bitrev,
    Blockbitrev,
}

impl Family {
    fn name(&self) -> &'static str {
        match self {
            Family::Sorted => "sorted",
            Family::Reversed => "reversed",
            Family::Random => "random",
            Family::Bitrev => "bitrev",
            Family::Blockbitrev => "blockbitrev",
        }
    }

    fn generate(&self, n: usize, block: Option<usize>, seed: u64) -> Result<Permutation, CliError> {
        let made = match self {
            Family::Sorted => gen_sorted(n),
            Family::Reversed => gen_reversed(n),
            Family::Random => gen_random(n, seed),
            Family::Bitrev => gen_bit_reversal(n),
            Family::Blockbitrev => {
                let block = block.unwrap_or_else(|| default_block_size(n.max(1)));
                gen_block_bit_reversal(n, block)
            }
        };
        made.map_err(|e| CliError::Usage(format!("cannot generate {} {n}: {e}", self.name())))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Seq,
    Par,
    UnionBaseline,
    PartitionDual,
}

impl std::fmt::Display for Algo {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Algo::Seq => "seq",
            Algo::Par => "par",
            Algo::UnionBaseline => "union-baseline",
            Algo::PartitionDual => "partition-dual",
        };
        f.write_str(s)
    }
}

impl Algo {
    fn run(&self, p: &Permutation) -> Result<SortReport, CliError> {
        let run = match self {
            Algo::Seq => seq_mergesort(p),
            Algo::Par => par_mergesort(p),
            Algo::UnionBaseline => union_mergesort(p, ExecMode::Parallel),
            Algo::PartitionDual => partition_sort_via_duality(p),
        };
        run.map_err(|e| CliError::Verification(format!("{self} failed: {e}")))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Quicksort,
    Mergesort,
    Trace,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundsFormat {
    Csv,
    Text,
}

enum CliError {
    /// Bad invocation or unreadable/invalid inputs: exit 2.
    Usage(String),
    /// A check the command performs came out false: exit 1.
    Verification(String),
}

fn read_permutation(path: &PathBuf) -> Result<Permutation, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    Permutation::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn read_point_set(path: &PathBuf) -> Result<PointSet, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    PointSet::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn bounds_text(report: &BoundReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "n = {}", report.n);
    for v in &report.per_vertex {
        let _ = writeln!(
            out,
            "vertex ({}, {}): leaves {} ib {} lib {:.6} runs {:?}",
            v.level, v.index, v.leaves, v.ib, v.lib, v.runs
        );
    }
    let _ = writeln!(
        out,
        "totals: ib {} lib {:.6}",
        report.ib_total, report.lib_total
    );
    out
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen {
            family,
            n,
            block,
            seed,
            out,
        } => {
            let p = family.generate(n, block, seed)?;
            out.emit(&p.serialize())
        }

        Command::Bounds {
            input,
            tree_file,
            format,
            out,
        } => {
            let p = read_permutation(&input)?;
            let report = match tree_file {
                Some(path) => {
                    let text = fs::read_to_string(&path).map_err(|e| {
                        CliError::Usage(format!("cannot read {}: {e}", path.display()))
                    })?;
                    let tree = InterleaveTree::from_parens(&text)
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                    if tree.n() != p.len() {
                        return Err(CliError::Usage(format!(
                            "tree has {} leaves but the permutation has {}",
                            tree.n(),
                            p.len()
                        )));
                    }
                    compute_bounds_with_tree(&p, &tree)
                }
                None => compute_bounds(&p),
            };
            match format {
                BoundsFormat::Csv => out.emit(&report.to_csv()),
                BoundsFormat::Text => out.emit(&bounds_text(&report)),
            }
        }

        Command::Sort {
            input,
            algo,
            family,
            seed,
            out,
        } => {
            let p = read_permutation(&input)?;
            let report = algo.run(&p)?;
            if report.output != (0..p.len()).collect::<Vec<_>>() {
                return Err(CliError::Verification(format!(
                    "{algo}: output failed the sortedness self-check"
                )));
            }
            let mut text = String::new();
            let _ = writeln!(text, "{}", SortReport::csv_header());
            let _ = writeln!(text, "{}", report.csv_row(&family, seed));
            out.emit(&text)
        }

        Command::Satisfy {
            input,
            method,
            seed,
            out,
        } => {
            let p = read_permutation(&input)?;
            let plotted = plot(&p);
            let satisfied = match method {
                Method::Quicksort => satisfy_quicksort(&plotted, seed),
                Method::Mergesort => satisfy_mergesort(&plotted),
                Method::Trace => {
                    let report = Algo::Seq.run(&p)?;
                    arboral_mergesort(&p, &report.trace)
                        .map_err(|e| CliError::Verification(format!("trace replay failed: {e}")))?
                }
            };
            out.emit(&satisfied.serialize())
        }

        Command::Verify { input } => {
            let s = read_point_set(&input)?;
            let report = is_satisfied(&s);
            match report.violation {
                None => {
                    println!("satisfied: {} points", s.len());
                    Ok(())
                }
                Some(((ax, ay), (bx, by))) => Err(CliError::Verification(format!(
                    "unsatisfied: empty rectangle between ({ax}, {ay}) and ({bx}, {by})"
                ))),
            }
        }

        Command::Svg { input, out } => {
            let s = read_point_set(&input)?;
            out.emit(&render_svg(&s))
        }

        Command::Bench {
            sizes,
            families,
            seeds,
            algos,
            out,
        } => {
            if sizes.is_empty() || families.is_empty() || seeds.is_empty() || algos.is_empty() {
                return Err(CliError::Usage("bench grid is empty".into()));
            }
            let mut text = String::new();
            let _ = writeln!(
                text,
                "{},work_over_lib,lib_over_ib",
                SortReport::csv_header()
            );
            for &n in &sizes {
                for family in &families {
                    for &seed in &seeds {
                        let p = family.generate(n, None, seed)?;
                        for algo in &algos {
                            let cell =
                                format!("algo={algo} family={} n={n} seed={seed}", family.name());
                            let report = algo.run(&p)?;
                            if report.output != (0..n).collect::<Vec<_>>() {
                                return Err(CliError::Verification(format!(
                                    "bench cell failed ({cell}): output not sorted"
                                )));
                            }
                            if (report.ib as f64) > report.lib + 1e-9 {
                                return Err(CliError::Verification(format!(
                                    "bench cell failed ({cell}): ib exceeds lib"
                                )));
                            }
                            if report.span_depth > report.meter.accesses {
                                return Err(CliError::Verification(format!(
                                    "bench cell failed ({cell}): span exceeds work"
                                )));
                            }
                            let work_over_lib = report.meter.accesses as f64 / report.lib.max(1.0);
                            let lib_over_ib = report.lib / (report.ib.max(1) as f64);
                            let _ = writeln!(
                                text,
                                "{},{:.4},{:.4}",
                                report.csv_row(family.name(), seed),
                                work_over_lib,
                                lib_over_ib
                            );
                        }
                    }
                }
            }
            out.emit(&text)
        }
    }
}

fn main() -> ExitCode {
    // Optional thread-count override for the fork-join pool; affects timing
    // only, never output bytes.
    if let Ok(threads) = std::env::var("ARBOR_THREADS") {
        if let Ok(t) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
