use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use tmodule_core::analyzer::{analyze, Analysis};
use tmodule_core::{AnalysisReport, Error as CoreError};

mod input;
mod selftest;

use input::{parse, render, InputError, Loaded};

#[derive(Parser, Debug)]
#[command(name = "tmodule", version, about = "Decide whether an Anderson t-module is abelian, t-finite and pure")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one or more t-module files.
    Analyze(AnalyzeArgs),
    /// Print the canonical form of a t-module file.
    Normalize {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run randomized consistency checks of the arithmetic and the decision procedure.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Starting absolute σ-precision of the elimination.
    #[arg(long)]
    precision: Option<i64>,
    /// Largest precision tried before vanishing-looking entries are taken as zero.
    #[arg(long)]
    precision_cap: Option<i64>,
    /// Largest power of φ_t probed for a rank certificate.
    #[arg(long)]
    max_n: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the Newton polygon of each nontrivial diagonal entry as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Evaluate every rank condition and fail if one disagrees with the verdict.
    #[arg(long)]
    check: bool,
    /// Randomizes the pivot order among candidates of equal degree.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file (one input) or directory (several inputs).
    #[arg(long)]
    out: Option<PathBuf>,
}

enum FileOutcome {
    Report { analysis: Box<Analysis> },
    ParseError(String),
    AnalysisError(String),
}

fn hint(e: &CoreError) -> &'static str {
    match e {
        CoreError::PrecisionExhausted { .. }
        | CoreError::AmbiguousValuation { .. }
        | CoreError::AmbiguousZero { .. } => "\nhint: raise --precision or --precision-cap",
        CoreError::CheckDisagreement(_) => "\nhint: raise --max-n; the certificate search may need larger powers",
        CoreError::InvalidConfig(_) => "\nhint: lower --precision or --precision-cap",
        _ => "",
    }
}

fn run_one(path: &Path, args: &AnalyzeArgs) -> FileOutcome {
    let src = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => return FileOutcome::ParseError(format!("{}: {e}", path.display())),
    };
    let Loaded { doc, module } = match parse(&src) {
        Ok(l) => l,
        Err(InputError::Module(e)) => return FileOutcome::AnalysisError(format!("{}: {e}", path.display())),
        Err(e) => return FileOutcome::ParseError(format!("{}:{e}", path.display())),
    };
    let mut opts = doc.options.to_analyze_options();
    opts.precision = args.precision.or(opts.precision);
    opts.precision_cap = args.precision_cap.or(opts.precision_cap);
    opts.n_max = args.max_n.or(opts.n_max);
    opts.seed = args.seed.or(opts.seed);
    opts.check |= args.check;
    match analyze(&module, &opts) {
        Ok(analysis) => FileOutcome::Report { analysis: Box::new(analysis) },
        Err(e) => FileOutcome::AnalysisError(format!("{}: {e}{}", path.display(), hint(&e))),
    }
}

fn render_report(report: &AnalysisReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Text => report.to_text(),
    })
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "input".into(), |s| s.to_string_lossy().into_owned())
}

fn svg_path(base: &Path, file: Option<&Path>, index: usize, total: usize) -> PathBuf {
    if file.is_none() && total == 1 {
        return base.to_path_buf();
    }
    let prefix = base.with_extension("");
    let mut name = prefix.file_name().map_or_else(|| "np".into(), |s| s.to_string_lossy().into_owned());
    if let Some(f) = file {
        name.push('-');
        name.push_str(&stem(f));
    }
    name.push_str(&format!("-{}.svg", index + 1));
    prefix.with_file_name(name)
}

fn write_svgs(base: &Path, file: &Path, batch: bool, analysis: &Analysis) -> Result<()> {
    let entries: Vec<_> = analysis.diagonalization.nontrivial().collect();
    for (k, entry) in entries.iter().enumerate() {
        let polygon = entry.newton_polygon()?;
        let title = format!("{} entry {}", stem(file), k + 1);
        let svg = polygon.to_svg(&entry.known_points(), &title);
        let path = svg_path(base, batch.then_some(file), k, entries.len());
        std::fs::write(&path, svg).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<ExitCode> {
    let outcomes: Vec<FileOutcome> = if args.files.len() == 1 {
        vec![run_one(&args.files[0], args)]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = args.files.iter().map(|f| scope.spawn(move || run_one(f, args))).collect();
            handles.into_iter().map(|h| h.join().expect("analysis thread panicked")).collect()
        })
    };
    let batch = args.files.len() > 1;
    if let (true, Some(dir)) = (batch, &args.out) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut code = 0u8;
    for (file, outcome) in args.files.iter().zip(&outcomes) {
        match outcome {
            FileOutcome::Report { analysis } => {
                let text = render_report(&analysis.report, args.format)?;
                match (&args.out, batch) {
                    (Some(path), false) => {
                        std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?
                    }
                    (Some(dir), true) => {
                        let ext = if args.format == Format::Json { "json" } else { "txt" };
                        let path = dir.join(format!("{}.{ext}", stem(file)));
                        std::fs::write(&path, &text).with_context(|| format!("writing {}", path.display()))?;
                    }
                    (None, false) => print!("{text}"),
                    (None, true) => print!("== {} ==\n{text}", file.display()),
                }
                if let Some(base) = &args.svg {
                    write_svgs(base, file, batch, analysis)?;
                }
            }
            FileOutcome::ParseError(msg) => {
                eprintln!("error: {msg}");
                code = code.max(2);
            }
            FileOutcome::AnalysisError(msg) => {
                eprintln!("error: {msg}");
                code = code.max(1);
            }
        }
    }
    Ok(ExitCode::from(code))
}

fn cmd_normalize(file: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let src = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    match parse(&src) {
        Ok(loaded) => {
            let text = render(&loaded.doc);
            match out {
                Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
                None => print!("{text}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            eprintln!("error: {}:{e}", file.display());
            Ok(ExitCode::from(2))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(args) => cmd_analyze(args),
        Command::Normalize { file, out } => cmd_normalize(file, out.as_deref()),
        Command::Selftest { seed, count } => selftest::run(*seed, *count),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
