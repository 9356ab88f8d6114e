//! Command-line front end: exact quantization errors, optimal sets, split
//! successors, oracle verification, and plot-ready exports.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use cantor_quant::error::Error as CoreError;
use cantor_quant::oracle::{compare_with, discretize_with_cap, DEFAULT_ATOM_CAP};
use cantor_quant::quantizer::{
    build_level_set_with_caps, build_optimal_set_from, enumerate_optimal_sets_with_caps,
    level_index, optimal_one_mean, optimal_set_count, quantization_error, set_distortion,
    split_candidates, voronoi_boundaries, Caps, QuantizerSet,
};
use cantor_quant::rational::{decimal_approx, format_rational, parse_rational, to_f64, Rational};

const CAPS_ENV: &str = "CANTOR_QUANT_CAPS";

#[derive(Parser)]
#[command(
    name = "cantor-quant",
    version,
    about = "Optimal quantizers and exact quantization errors for the infinite-similitude Cantor measure",
    after_help = "The environment variable CANTOR_QUANT_CAPS=\"L:E\" raises the depth cap to L \
                  and the enumeration cap to E."
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Mean, variance, and second raw moment of the measure.
    Moments,
    /// Exact n-th quantization error.
    Error {
        #[arg(long)]
        n: u64,
        /// Print the whole table for 2..=n instead of a single value.
        #[arg(long)]
        upto: bool,
    },
    /// Optimal n-point quantizer sets.
    Optimal {
        #[arg(long)]
        n: u64,
        /// Comma-separated zero-based indices into the sorted level set,
        /// choosing which points are refined (default: the first n - 2^l).
        #[arg(long, conflicts_with = "all")]
        subset: Option<String>,
        /// Emit every optimal set instead of one.
        #[arg(long)]
        all: bool,
    },
    /// Optimal (n+1)-sets reachable from an optimal n-set by one split.
    Split {
        #[arg(long)]
        n: u64,
        /// Subset selecting the n-set being split (default: canonical).
        #[arg(long)]
        subset: Option<String>,
    },
    /// Compare the exact construction against the discretized k-means oracle.
    Verify {
        #[arg(long)]
        n: u64,
        /// Atom weight threshold, e.g. 1/16384.
        #[arg(long)]
        epsilon: String,
        /// Also write the discretized measure as CSV to this path.
        #[arg(long)]
        dump_measure: Option<PathBuf>,
    },
    /// Plot-ready CSV: points, Voronoi boundaries, and per-piece errors.
    ExportPlot {
        #[arg(long)]
        n: u64,
        /// Subset selecting the set to export (default: canonical).
        #[arg(long)]
        subset: Option<String>,
        /// Output path (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Core(CoreError),
    Usage(String),
    Io(std::io::Error),
    VerificationFailed,
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Usage(m) => m.clone(),
            CliError::Io(e) => e.to_string(),
            CliError::VerificationFailed => "verification failed".to_string(),
        }
    }

    /// Usage-class problems (bad flags, malformed selectors, cap violations)
    /// exit 2; runtime and verification failures exit 1.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                CoreError::DepthCapExceeded { .. }
                | CoreError::EnumerationCapExceeded { .. }
                | CoreError::AtomCapExceeded { .. }
                | CoreError::WordBudgetExceeded { .. }
                | CoreError::SubsetSizeMismatch { .. }
                | CoreError::SubsetIndexOutOfRange { .. }
                | CoreError::DuplicateSubsetIndex { .. }
                | CoreError::NTooSmall { .. }
                | CoreError::InvalidEpsilon { .. }
                | CoreError::ParseRational { .. } => 2,
                _ => 1,
            },
            CliError::Io(_) => 1,
            CliError::VerificationFailed => 1,
        }
    }
}

fn main() -> ExitCode {
    // Die quietly when a pager closes the pipe instead of panicking.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn caps_from_env() -> Result<Caps, CliError> {
    let mut caps = Caps::default();
    if let Ok(raw) = std::env::var(CAPS_ENV) {
        let (depth, enumeration) = raw.split_once(':').ok_or_else(|| {
            CliError::Usage(format!("{CAPS_ENV} must be \"L:E\", got {raw:?}"))
        })?;
        caps.depth = depth
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("bad depth cap in {CAPS_ENV}: {depth:?}")))?;
        caps.enumeration = enumeration.trim().parse().map_err(|_| {
            CliError::Usage(format!("bad enumeration cap in {CAPS_ENV}: {enumeration:?}"))
        })?;
    }
    Ok(caps)
}

fn parse_subset(raw: &str) -> Result<Vec<usize>, CliError> {
    let raw = raw.trim();
    if raw.is_empty() {
        return Ok(Vec::new());
    }
    raw.split(',')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad subset index {part:?}")))
        })
        .collect()
}

/// Canonical subset for n: the first n - 2^l indices.
fn canonical_subset(n: u64) -> Result<Vec<usize>, CliError> {
    let l = level_index(n)?;
    Ok((0..(n - (1u64 << l)) as usize).collect())
}

/// Builds one optimal n-set; `n = 1` returns the mean point.
fn build_set(n: u64, subset: Option<&str>, caps: &Caps) -> Result<(Vec<usize>, QuantizerSet), CliError> {
    if n == 0 {
        return Err(CoreError::NTooSmall { n, min: 1 }.into());
    }
    if n == 1 {
        if subset.is_some_and(|s| !s.trim().is_empty()) {
            return Err(CliError::Usage(
                "n = 1 has a single optimal set; --subset does not apply".into(),
            ));
        }
        return Ok((Vec::new(), optimal_one_mean()));
    }
    let subset = match subset {
        Some(raw) => parse_subset(raw)?,
        None => canonical_subset(n)?,
    };
    let level = build_level_set_with_caps(level_index(n)?, caps)?;
    let set = build_optimal_set_from(&level, n, &subset)?;
    Ok((subset, set))
}

fn exact_and_decimal(r: &Rational) -> String {
    format!("{} \u{2248} {}", format_rational(r), decimal_approx(r))
}

fn rational_json(r: &Rational) -> Value {
    json!({ "exact": format_rational(r), "decimal": to_f64(r) })
}

fn print_json(command: &str, inputs: Value, results: Value) {
    let doc = json!({ "command": command, "inputs": inputs, "results": results });
    println!("{}", serde_json::to_string_pretty(&doc).expect("valid json"));
}

/// CSV-quotes a word label (it contains commas).
fn csv_word(word: &str) -> String {
    format!("\"{word}\"")
}

fn run(cli: Cli) -> Result<(), CliError> {
    let caps = caps_from_env()?;
    match cli.command {
        Command::Moments => moments_cmd(cli.format),
        Command::Error { n, upto } => error_cmd(cli.format, n, upto),
        Command::Optimal { n, subset, all } => {
            optimal_cmd(cli.format, n, subset.as_deref(), all, &caps)
        }
        Command::Split { n, subset } => split_cmd(cli.format, n, subset.as_deref(), &caps),
        Command::Verify {
            n,
            epsilon,
            dump_measure,
        } => verify_cmd(cli.format, n, &epsilon, dump_measure.as_deref(), &caps),
        Command::ExportPlot { n, subset, out } => {
            export_plot_cmd(n, subset.as_deref(), out.as_deref(), &caps)
        }
    }
}

fn moments_cmd(format: Format) -> Result<(), CliError> {
    let m = cantor_quant::measure::moments();
    let second = m.second_raw_moment();
    match format {
        Format::Text => {
            println!("E(X)   = {}", exact_and_decimal(&m.mean));
            println!("V(X)   = {}", exact_and_decimal(&m.variance));
            println!("E(X^2) = {}", exact_and_decimal(&second));
        }
        Format::Csv => {
            println!("quantity,exact,decimal");
            println!("mean,{},{}", format_rational(&m.mean), decimal_approx(&m.mean));
            println!(
                "variance,{},{}",
                format_rational(&m.variance),
                decimal_approx(&m.variance)
            );
            println!(
                "second_raw_moment,{},{}",
                format_rational(&second),
                decimal_approx(&second)
            );
        }
        Format::Json => print_json(
            "moments",
            json!({}),
            json!({
                "mean": rational_json(&m.mean),
                "variance": rational_json(&m.variance),
                "second_raw_moment": rational_json(&second),
            }),
        ),
    }
    Ok(())
}

fn error_cmd(format: Format, n: u64, upto: bool) -> Result<(), CliError> {
    let range: Vec<u64> = if upto {
        if n < 2 {
            return Err(CliError::Usage("--upto needs n >= 2".into()));
        }
        (2..=n).collect()
    } else {
        vec![n]
    };
    let mut rows = Vec::new();
    for k in &range {
        rows.push((*k, quantization_error(*k)?));
    }
    match format {
        Format::Text => {
            for (k, v) in &rows {
                println!("V_{k} = {}", exact_and_decimal(v));
            }
        }
        Format::Csv => {
            println!("n,exact,decimal");
            for (k, v) in &rows {
                println!("{k},{},{}", format_rational(v), decimal_approx(v));
            }
        }
        Format::Json => print_json(
            "error",
            json!({ "n": n, "upto": upto }),
            json!({
                "errors": rows
                    .iter()
                    .map(|(k, v)| json!({ "n": k, "exact": format_rational(v), "decimal": to_f64(v) }))
                    .collect::<Vec<_>>(),
            }),
        ),
    }
    Ok(())
}

fn set_points_json(set: &QuantizerSet) -> Vec<Value> {
    set.points()
        .iter()
        .map(|p| {
            json!({
                "kind": p.kind().to_string(),
                "word": p.word().to_string(),
                "position": rational_json(p.position()),
            })
        })
        .collect()
}

fn print_set_text(set: &QuantizerSet) {
    let width = set
        .points()
        .iter()
        .map(|p| p.label().len())
        .max()
        .unwrap_or(0);
    for point in set.points() {
        println!(
            "  {:width$}  {}",
            point.label(),
            exact_and_decimal(point.position()),
        );
    }
}

fn optimal_cmd(
    format: Format,
    n: u64,
    subset: Option<&str>,
    all: bool,
    caps: &Caps,
) -> Result<(), CliError> {
    let count = if n == 1 { 1 } else { optimal_set_count(n)? };
    let level = if n == 1 { 0 } else { level_index(n)? };
    let sets: Vec<(Vec<usize>, QuantizerSet)> = if all && n > 1 {
        let level_size = 1usize << level;
        let k = (n - (1u64 << level)) as usize;
        let enumerated = enumerate_optimal_sets_with_caps(n, caps)?;
        let subsets = combinations_in_order(level_size, k);
        subsets.into_iter().zip(enumerated).collect()
    } else {
        vec![build_set(n, subset, caps)?]
    };
    let distortion = set_distortion(&sets[0].1)?;

    match format {
        Format::Text => {
            println!(
                "n = {n}, level = {level}, optimal sets = {count}, distortion = {}",
                exact_and_decimal(&distortion)
            );
            for (subset, set) in &sets {
                if sets.len() > 1 || !subset.is_empty() {
                    println!("subset {subset:?}:");
                }
                print_set_text(set);
            }
        }
        Format::Csv => {
            println!("set,position,kind,word");
            for (index, (_, set)) in sets.iter().enumerate() {
                for point in set.points() {
                    println!(
                        "{index},{},{},{}",
                        format_rational(point.position()),
                        point.kind(),
                        csv_word(&point.word().to_string())
                    );
                }
            }
        }
        Format::Json => print_json(
            "optimal",
            json!({ "n": n, "subset": subset, "all": all }),
            json!({
                "level": level,
                "set_count": count.to_string(),
                "distortion": rational_json(&distortion),
                "sets": sets
                    .iter()
                    .map(|(subset, set)| json!({
                        "subset": subset,
                        "points": set_points_json(set),
                    }))
                    .collect::<Vec<_>>(),
            }),
        ),
    }
    Ok(())
}

/// Index subsets in the same lexicographic order the enumerator uses.
fn combinations_in_order(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn fill(start: usize, m: usize, k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..m {
            current.push(i);
            fill(i + 1, m, k, current, out);
            current.pop();
        }
    }
    fill(0, m, k, &mut current, &mut out);
    out
}

fn split_cmd(format: Format, n: u64, subset: Option<&str>, caps: &Caps) -> Result<(), CliError> {
    let (subset, set) = build_set(n, subset, caps)?;
    let candidates = split_candidates(&set)?;
    let successor_error = set_distortion(&candidates[0].set)?;

    match format {
        Format::Text => {
            println!(
                "n = {n}, subset = {subset:?}, successors = {}, successor distortion = {}",
                candidates.len(),
                exact_and_decimal(&successor_error)
            );
            for candidate in &candidates {
                println!("split {}:", candidate.split_point.label());
                print_set_text(&candidate.set);
            }
        }
        Format::Csv => {
            println!("successor,split,position,kind,word");
            for (index, candidate) in candidates.iter().enumerate() {
                for point in candidate.set.points() {
                    println!(
                        "{index},{},{},{},{}",
                        csv_word(&candidate.split_point.label()),
                        format_rational(point.position()),
                        point.kind(),
                        csv_word(&point.word().to_string())
                    );
                }
            }
        }
        Format::Json => print_json(
            "split",
            json!({ "n": n, "subset": subset }),
            json!({
                "successor_distortion": rational_json(&successor_error),
                "successors": candidates
                    .iter()
                    .map(|candidate| json!({
                        "split": candidate.split_point.label(),
                        "points": set_points_json(&candidate.set),
                    }))
                    .collect::<Vec<_>>(),
            }),
        ),
    }
    Ok(())
}

fn verify_cmd(
    format: Format,
    n: u64,
    epsilon: &str,
    dump_measure: Option<&std::path::Path>,
    caps: &Caps,
) -> Result<(), CliError> {
    let epsilon = parse_rational(epsilon)?;
    let report = compare_with(n, &epsilon, caps, DEFAULT_ATOM_CAP)?;

    if let Some(path) = dump_measure {
        let measure = discretize_with_cap(&epsilon, DEFAULT_ATOM_CAP)?;
        let mut file = std::fs::File::create(path)?;
        measure.write_csv(&mut file)?;
    }

    let verdict = if report.passed() { "PASS" } else { "FAIL" };
    match format {
        Format::Text => {
            println!("n = {}, epsilon = {}", report.n, format_rational(&epsilon));
            println!("exact error        = {}", exact_and_decimal(&report.exact_error));
            println!(
                "construction error = {}",
                exact_and_decimal(&report.construction_error)
            );
            println!("centroid condition = {}", report.centroid_condition_ok);
            println!("optimal sets       = {}", report.set_count);
            println!("atoms              = {}", report.atom_count);
            println!(
                "collapse bound     = {}",
                exact_and_decimal(&report.collapse_bound)
            );
            println!("dp distortion      = {:.17e}", report.dp_distortion);
            println!("bound satisfied    = {}", report.bound_satisfied);
            match report.matched_set {
                Some(index) => println!("matched set        = {index}"),
                None => println!("matched set        = none"),
            }
            println!("VERIFY {verdict}");
        }
        Format::Csv => {
            println!("field,value");
            println!("n,{}", report.n);
            println!("epsilon,{}", format_rational(&epsilon));
            println!("exact_error,{}", format_rational(&report.exact_error));
            println!(
                "construction_error,{}",
                format_rational(&report.construction_error)
            );
            println!("centroid_condition,{}", report.centroid_condition_ok);
            println!("set_count,{}", report.set_count);
            println!("atom_count,{}", report.atom_count);
            println!("collapse_bound,{}", format_rational(&report.collapse_bound));
            println!("dp_distortion,{:.17e}", report.dp_distortion);
            println!("bound_satisfied,{}", report.bound_satisfied);
            println!(
                "matched_set,{}",
                report
                    .matched_set
                    .map(|i| i.to_string())
                    .unwrap_or_else(|| "none".into())
            );
            println!("verdict,{verdict}");
        }
        Format::Json => print_json(
            "verify",
            json!({ "n": n, "epsilon": format_rational(&epsilon) }),
            json!({
                "exact_error": rational_json(&report.exact_error),
                "construction_error": rational_json(&report.construction_error),
                "centroid_condition": report.centroid_condition_ok,
                "set_count": report.set_count.to_string(),
                "atom_count": report.atom_count,
                "collapse_bound": rational_json(&report.collapse_bound),
                "dp_distortion": report.dp_distortion,
                "bound_satisfied": report.bound_satisfied,
                "matched_set": report.matched_set,
                "passed": report.passed(),
            }),
        ),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::VerificationFailed)
    }
}

fn export_plot_cmd(
    n: u64,
    subset: Option<&str>,
    out: Option<&std::path::Path>,
    caps: &Caps,
) -> Result<(), CliError> {
    let (_, set) = build_set(n, subset, caps)?;
    let boundaries = voronoi_boundaries(&set);

    let mut writer: Box<dyn Write> = match out {
        Some(path) => Box::new(std::fs::File::create(path)?),
        None => Box::new(std::io::stdout()),
    };
    writeln!(
        writer,
        "index,kind,word,position,position_decimal,piece_error,piece_error_decimal,\
         voronoi_lo,voronoi_lo_decimal,voronoi_hi,voronoi_hi_decimal"
    )?;
    let zero = Rational::from_integer(0.into());
    let one = Rational::from_integer(1.into());
    for (index, point) in set.points().iter().enumerate() {
        let lo = if index == 0 { &zero } else { &boundaries[index - 1] };
        let hi = if index == set.len() - 1 {
            &one
        } else {
            &boundaries[index]
        };
        let error = point.own_error();
        writeln!(
            writer,
            "{index},{},{},{},{},{},{},{},{},{},{}",
            point.kind(),
            csv_word(&point.word().to_string()),
            format_rational(point.position()),
            decimal_approx(point.position()),
            format_rational(&error),
            decimal_approx(&error),
            format_rational(lo),
            decimal_approx(lo),
            format_rational(hi),
            decimal_approx(hi),
        )?;
    }
    Ok(())
}

