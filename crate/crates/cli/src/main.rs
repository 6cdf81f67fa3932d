//! `maxtree`: construct, count, enumerate, and verify maximally probable
//! strictly r-furcating tree shapes.
//!
//! Exit codes: 0 success / verified, 1 verification failure, 2 usage error,
//! 3 resource-guard abort. Output for a fixed invocation is byte-identical
//! across runs; `--jobs` changes wall time only.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;

use maxtree_core::enumerate::{ShapeEnumerator, count_shapes};
use maxtree_core::error::Error as CoreError;
use maxtree_core::histories::{TieCounter, count_histories_closed, count_tie_permitting};
use maxtree_core::huffman::{
    DEFAULT_STATE_CAP, WeightVector, huffman_all_shapes_with_cap, huffman_tree,
};
use maxtree_core::maxprob::{
    ColumnContext, EventTable, TableColumn, TableOptions, VerifyReport, column_chunk,
    column_finish, column_merge, guard_shape_count, maxprob_shape, nonunique_family, verify_chunk,
    verify_context, verify_finish, verify_merge,
};
use maxtree_core::selftest;
use maxtree_core::{BigCount, TreeShape};

#[derive(Parser)]
#[command(
    name = "maxtree",
    version,
    about = "Maximally probable r-furcating tree shapes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Default, ValueEnum)]
enum ShapeFormat {
    #[default]
    Shape,
    Ascii,
}

#[derive(Subcommand)]
enum Command {
    /// List every shape with n leaves, one per line in canonical order.
    Enumerate {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
        /// Print only the number of shapes (computed by recurrence).
        #[arg(long)]
        count_only: bool,
    },
    /// Run the Huffman construction on an explicit weight vector.
    Huffman {
        #[arg(long)]
        r: u32,
        /// Comma-separated positive integers, e.g. 5,6,7,8.
        #[arg(long)]
        weights: String,
        /// Explore every tie resolution and print all reachable shapes.
        #[arg(long)]
        all_ties: bool,
    },
    /// Count labeled histories of a tree given inline or as @file.
    Count {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        tree: String,
        /// Count tie-permitting histories instead of plain ones.
        #[arg(long)]
        ties: bool,
        /// Event count for --ties.
        #[arg(long, requires = "ties", conflicts_with = "all_z")]
        z: Option<u64>,
        /// With --ties, print counts for every achievable event count.
        #[arg(long, requires = "ties")]
        all_z: bool,
        /// Append a float approximation column.
        #[arg(long)]
        sci: bool,
    },
    /// Print the maximally probable shape on n leaves.
    Maxprob {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value_t)]
        format: ShapeFormat,
    },
    /// Exhaustively verify the construction at one (r, n).
    Verify {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Emit the CSV table of maximal tie-permitting counts.
    Table {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n_max: u64,
        /// Write to a file (atomically) instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Check the tie-permitting maximizer conjecture at one (r, n).
    Conjecture {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Construct the two-member family of tied tie-permitting maximizers.
    Nonunique {
        #[arg(long)]
        r: u32,
        #[arg(long)]
        k: u32,
    },
    /// Run the desk-scale acceptance suite.
    Selftest {
        /// Trim the sweeps for a fast smoke run.
        #[arg(long)]
        quick: bool,
    },
}

fn main() -> ExitCode {
    // Die quietly when a downstream pipe closes early.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                CoreError::StateCapExceeded { .. } | CoreError::ShapeCapExceeded { .. } => {
                    ExitCode::from(3)
                }
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CoreError> {
    match command {
        Command::Enumerate { r, n, count_only } => {
            if count_only {
                println!("{}", count_shapes(r, n)?);
            } else {
                use std::io::Write;
                let mut enumerator = ShapeEnumerator::new(r)?;
                let stdout = std::io::stdout();
                let mut out = std::io::BufWriter::new(stdout.lock());
                for shape in enumerator.shapes(n)?.iter() {
                    writeln!(out, "{shape}").expect("stdout write");
                }
                out.flush().expect("stdout flush");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Huffman {
            r,
            weights,
            all_ties,
        } => {
            let weights = parse_weights(&weights)?;
            if all_ties {
                let shapes = huffman_all_shapes_with_cap(&weights, r, state_cap())?;
                for shape in &shapes {
                    println!("{shape}");
                }
                let run = huffman_tree(&weights, r)?;
                println!("{}", run.weight_sequence);
            } else {
                let run = huffman_tree(&weights, r)?;
                println!("{}", run.shape);
                println!("{}", run.weight_sequence);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Count {
            r,
            tree,
            ties,
            z,
            all_z,
            sci,
        } => {
            let tree = load_tree(&tree, r)?;
            if !ties {
                print_count(&count_histories_closed(&tree), sci);
            } else if all_z {
                let mut counter = TieCounter::new();
                let profile = counter.profile(&tree);
                let stats = tree.node_stats();
                let start = stats.height as usize;
                for value in &profile[start.min(profile.len() - 1)..] {
                    print_count(value, sci);
                }
            } else {
                let z = z.ok_or_else(|| {
                    CoreError::InvalidParameter("--ties requires --z or --all-z".to_string())
                })?;
                print_count(&count_tie_permitting(&tree, z), sci);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Maxprob { r, n, format } => {
            let shape = maxprob_shape(n, r)?;
            match format {
                ShapeFormat::Shape => println!("{shape}"),
                ShapeFormat::Ascii => print!("{}", ascii_render(&shape)),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify { r, n, jobs } => {
            let report = run_verify(r, n, jobs)?;
            print_verify_report(&report);
            Ok(exit_for(report.passed()))
        }
        Command::Table {
            r,
            n_max,
            out,
            jobs,
        } => {
            let table = run_table(r, n_max, jobs)?;
            let csv = table.to_csv();
            match out {
                Some(path) => write_atomically(&path, csv.as_bytes())?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Conjecture { r, n, jobs } => {
            let column = run_column(r, n, jobs, &TableOptions::default())?;
            let part_one = column.total_is_construction && column.total_unique;
            let part_two = column.construction_attains_all_cells;
            println!("conjecture check r={r} n={n}");
            println!("  construction: {}", column.construction);
            println!("  total maximum: {}", column.total_max);
            println!(
                "  part (i) unique total maximizer is the construction: {}",
                yes_no(part_one)
            );
            println!(
                "  part (ii) construction attains every cell maximum: {}",
                yes_no(part_two)
            );
            for z in 1..=column.w {
                let idx = (z - 1) as usize;
                if column.cell_max[idx] == BigCount::from(0u32) {
                    continue;
                }
                println!(
                    "  z={z}: max {} with {} maximizer(s)",
                    column.cell_max[idx], column.cell_argmax_count[idx]
                );
                for shape in &column.cell_argmax[idx] {
                    println!("    {shape}");
                }
            }
            Ok(exit_for(part_one && part_two))
        }
        Command::Nonunique { r, k } => {
            let pair = nonunique_family(r, k)?;
            println!("n: {}", pair.n);
            println!("z: {}", pair.events);
            println!("first:  {}", pair.first);
            println!("second: {}", pair.second);
            println!("counts: {} and {}", pair.first_count, pair.second_count);
            println!("distinct: {}", yes_no(pair.distinct()));
            println!("counts equal: {}", yes_no(pair.counts_equal()));
            Ok(exit_for(pair.distinct() && pair.counts_equal()))
        }
        Command::Selftest { quick } => {
            let outcomes = selftest::run_all(quick)?;
            let mut all_passed = true;
            for outcome in &outcomes {
                println!("{}", outcome.summary_line());
                for detail in &outcome.details {
                    println!("  {detail}");
                }
                all_passed &= outcome.passed;
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("result: {passed}/{} criteria passed", outcomes.len());
            Ok(exit_for(all_passed))
        }
    }
}

fn exit_for(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn yes_no(b: bool) -> &'static str {
    if b { "yes" } else { "no" }
}

fn state_cap() -> usize {
    std::env::var("MAXTREE_STATE_CAP")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_STATE_CAP)
}

fn parse_weights(text: &str) -> Result<WeightVector, CoreError> {
    let values = text
        .split(',')
        .map(|part| part.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CoreError::InvalidParameter(format!("bad weight list {text:?}")))?;
    WeightVector::new(values)
}

fn load_tree(source: &str, r: u32) -> Result<TreeShape, CoreError> {
    let text = match source.strip_prefix('@') {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CoreError::InvalidParameter(format!("cannot read {path}: {e}")))?,
        None => source.to_string(),
    };
    TreeShape::parse(text.trim(), r)
}

fn print_count(value: &BigCount, sci: bool) {
    if sci {
        let approx = value.to_f64().unwrap_or(f64::INFINITY);
        println!("{value}\t{approx:.6e}");
    } else {
        println!("{value}");
    }
}

fn print_verify_report(report: &VerifyReport) {
    println!("verify r={} n={}", report.r, report.n);
    println!("  shapes enumerated: {}", report.shape_count);
    println!("  max labeled histories: {}", report.max_histories);
    for shape in &report.argmax {
        println!("  argmax: {shape}");
    }
    println!("  argmax unique: {}", yes_no(report.argmax_unique));
    println!(
        "  equals construction: {}",
        yes_no(report.matches_construction)
    );
    println!(
        "  equals uniform huffman shape: {}",
        yes_no(report.matches_huffman)
    );
    println!("  min product objective: {}", report.min_product);
    println!(
        "  argmin product equals argmax histories: {}",
        yes_no(report.objective_agreement)
    );
    println!(
        "  weight sequences below construction: {}",
        yes_no(report.supermajorization_holds)
    );
    println!(
        "  recursion spot-checks: {} ({})",
        report.spot_checks,
        if report.spot_checks_passed {
            "ok"
        } else {
            "mismatch"
        }
    );
    println!("result: {}", if report.passed() { "PASS" } else { "FAIL" });
}

fn run_verify(r: u32, n: u64, jobs: usize) -> Result<VerifyReport, CoreError> {
    guard_shape_count(r, n, maxtree_core::maxprob::DEFAULT_SHAPE_CAP)?;
    let ctx = verify_context(r, n)?;
    let mut enumerator = ShapeEnumerator::new(r)?;
    let chunks = enumerator.partitioned(n, jobs.max(1))?;
    let mut offsets = Vec::with_capacity(chunks.len());
    let mut offset = 0usize;
    for chunk in &chunks {
        offsets.push(offset);
        offset += chunk.len();
    }
    let partials: Vec<_> = if jobs <= 1 || chunks.len() <= 1 {
        chunks
            .iter()
            .zip(&offsets)
            .map(|(chunk, &off)| verify_chunk(&ctx, chunk, off))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .zip(&offsets)
                .map(|(chunk, &off)| {
                    let ctx = &ctx;
                    scope.spawn(move || verify_chunk(ctx, chunk, off))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let merged = partials
        .into_iter()
        .reduce(verify_merge)
        .expect("at least one chunk");
    Ok(verify_finish(&ctx, merged))
}

fn run_column(
    r: u32,
    n: u64,
    jobs: usize,
    options: &TableOptions,
) -> Result<TableColumn, CoreError> {
    guard_shape_count(r, n, options.shape_cap)?;
    let ctx = ColumnContext::new(r, n, options.maximizer_cap)?;
    let mut enumerator = ShapeEnumerator::new(r)?;
    let chunks = enumerator.partitioned(n, jobs.max(1))?;
    let partials: Vec<_> = if jobs <= 1 || chunks.len() <= 1 {
        chunks
            .iter()
            .map(|chunk| column_chunk(&ctx, chunk))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    let ctx = &ctx;
                    scope.spawn(move || column_chunk(ctx, chunk))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .collect()
        })
    };
    let merged = partials
        .into_iter()
        .reduce(|a, b| column_merge(&ctx, a, b))
        .expect("at least one chunk");
    column_finish(&ctx, merged)
}

fn run_table(r: u32, n_max: u64, jobs: usize) -> Result<EventTable, CoreError> {
    if r < 2 {
        return Err(CoreError::InvalidArity(r));
    }
    let step = r as u64 - 1;
    if n_max % step != 1 % step || n_max < r as u64 {
        return Err(CoreError::InvalidLeafCount {
            n: n_max,
            modulus: r - 1,
        });
    }
    let options = TableOptions::default();
    let mut columns = Vec::new();
    let mut n = r as u64;
    while n <= n_max {
        columns.push(run_column(r, n, jobs, &options)?);
        n += step;
    }
    Ok(EventTable {
        r,
        n_max,
        z_max: (n_max - 1) / step,
        columns,
    })
}

fn write_atomically(path: &PathBuf, bytes: &[u8]) -> Result<(), CoreError> {
    let mut tmp = path.clone();
    let mut name = tmp.file_name().unwrap_or_default().to_os_string();
    name.push(format!(".tmp{}", std::process::id()));
    tmp.set_file_name(name);
    let io = |e: std::io::Error| {
        CoreError::InvalidParameter(format!("cannot write {}: {e}", path.display()))
    };
    fs::write(&tmp, bytes).map_err(io)?;
    fs::rename(&tmp, path).map_err(io)?;
    Ok(())
}

fn ascii_render(tree: &TreeShape) -> String {
    fn label(t: &TreeShape) -> String {
        if t.is_leaf() {
            "*".to_string()
        } else {
            format!("[{}]", t.leaf_count())
        }
    }
    fn walk(t: &TreeShape, prefix: &str, out: &mut String) {
        let children = t.children();
        let count = children.len();
        for (i, child) in children.iter().enumerate() {
            let last = i + 1 == count;
            out.push_str(prefix);
            out.push_str(if last { "`-- " } else { "|-- " });
            out.push_str(&label(child));
            out.push('\n');
            if !child.is_leaf() {
                let extension = if last { "    " } else { "|   " };
                walk(child, &format!("{prefix}{extension}"), out);
            }
        }
    }
    let mut out = format!("{}\n", label(tree));
    walk(tree, "", &mut out);
    out
}
