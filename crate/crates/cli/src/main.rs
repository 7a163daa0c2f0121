//! `hmfimage`: exceptional-prime bounds and image reports for Hilbert newforms.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hmfimage::dickson::{self, SmallField};
use hmfimage::heckedata::{import_lmfdb_json, parse_newform_file, print_dataset};
use hmfimage::inertia::{self, enumerate_inertial_types};
use hmfimage::quadfield::{
    class_numbers, fundamental_unit, is_principal, prime_with_label, ray_class_order, PrimeLabel, QFIdeal, QuadField,
    Splitting,
};
use hmfimage::report::{render_text, run_pipeline, ExtensionPolicy, ImageReport, RunOptions};

#[derive(Parser)]
#[command(name = "hmfimage", version, about = "Mod-l image bounds for Hilbert modular newforms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Policy {
    Strict,
    Conservative,
    Pinned,
}

#[derive(Subcommand)]
enum Command {
    /// Bound the exceptional primes of a newform dataset.
    Analyze {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Dihedral extension policy (default: pinned if the file lists them, else conservative).
        #[arg(long, value_enum)]
        extensions: Option<Policy>,
        /// Closure cap for the image shape check (default: HMFIMAGE_CAP or 10^7).
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Arithmetic of the real quadratic field of discriminant (or radicand) D.
    Field {
        #[arg(allow_negative_numbers = true)]
        d: i64,
        #[command(subcommand)]
        sub: FieldCommand,
    },
    /// Subgroups of GL2 over a small finite field.
    Dickson {
        #[command(subcommand)]
        sub: DicksonCommand,
    },
    /// Tame inertial types for a weight.
    Inertia {
        /// Comma-separated weights, e.g. 2,4.
        #[arg(long)]
        weight: String,
        #[arg(long = "case", value_enum)]
        case: Case,
    },
    /// Dataset utilities.
    Data {
        #[command(subcommand)]
        sub: DataCommand,
    },
    /// Report utilities.
    Report {
        #[command(subcommand)]
        sub: ReportCommand,
    },
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Fundamental unit.
    Unit,
    /// Class number and narrow class number.
    Classnumbers,
    /// Primes above p, with generators when principal.
    Factor { p: u64 },
    /// Ray class group order for a modulus given as `[a, b+w; c]` or an element.
    Rayclass {
        modulus: String,
        #[arg(long)]
        narrow: bool,
    },
}

#[derive(Subcommand)]
enum DicksonCommand {
    /// Close the generators and classify the group.
    Classify {
        #[arg(long)]
        q: usize,
        /// Matrices `a,b,c,d` separated by `;`, entries as field indices.
        #[arg(long)]
        gens: String,
        #[arg(long)]
        cap: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Case {
    Split,
    Inert,
}

#[derive(Subcommand)]
enum DataCommand {
    /// Re-emit a newform file in canonical form.
    Print { file: PathBuf },
    /// Convert an LMFDB-style JSON export to the newform format.
    ImportLmfdb { file: PathBuf },
}

#[derive(Subcommand)]
enum ReportCommand {
    /// Render a JSON report as text.
    Render { file: PathBuf },
}

type CmdResult = Result<u8, String>;

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn analyze(file: &Path, format: Format, extensions: Option<Policy>, cap: Option<usize>) -> CmdResult {
    let ds = parse_newform_file(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
    let extensions = match extensions {
        None => ExtensionPolicy::Auto,
        Some(Policy::Strict) => ExtensionPolicy::Strict,
        Some(Policy::Conservative) => ExtensionPolicy::Conservative,
        Some(Policy::Pinned) => ExtensionPolicy::Pinned,
    };
    let options = RunOptions { extensions, shape_check_cap: Some(cap.unwrap_or_else(dickson::cap_from_env)) };
    let report = run_pipeline(&ds, &options).map_err(|e| e.to_string())?;
    match format {
        Format::Text => print!("{}", render_text(&report)),
        Format::Json => println!("{}", report.to_json()),
    }
    Ok(report.exit_code() as u8)
}

fn field_from(d: i64) -> Result<QuadField, String> {
    QuadField::from_discriminant(d)
        .or_else(|_| QuadField::new(d))
        .map_err(|_| format!("{d} is neither a fundamental discriminant nor a square-free radicand above 1"))
}

fn parse_modulus(field: QuadField, text: &str) -> Result<QFIdeal, String> {
    if text.trim_start().starts_with('[') {
        return QFIdeal::parse(field, text).map_err(|e| e.to_string());
    }
    let g = field.parse_elem(text).map_err(|e| e.to_string())?;
    QFIdeal::principal(&g).map_err(|e| e.to_string())
}

fn field(d: i64, sub: FieldCommand) -> CmdResult {
    let f = field_from(d)?;
    match sub {
        FieldCommand::Unit => println!("{}", fundamental_unit(&f)),
        FieldCommand::Classnumbers => {
            let (h, hp) = class_numbers(&f);
            println!("h={h} h+={hp}");
        }
        FieldCommand::Factor { p } => {
            let labels: &[PrimeLabel] = match f.splitting_type(p) {
                Splitting::Split => &[PrimeLabel::A, PrimeLabel::B],
                Splitting::Inert => &[PrimeLabel::Inert],
                Splitting::Ramified => &[PrimeLabel::Ramified],
            };
            for &label in labels {
                let ideal = prime_with_label(p, label, &f).ok_or_else(|| format!("{p} is not prime"))?;
                match is_principal(&ideal) {
                    Some(g) => println!("{} {ideal} = ({g})", label.as_str()),
                    None => println!("{} {ideal} non-principal", label.as_str()),
                }
            }
        }
        FieldCommand::Rayclass { modulus, narrow } => {
            let m = parse_modulus(f, &modulus)?;
            let kind = if narrow { "narrow" } else { "wide" };
            println!("{m} {kind} {}", ray_class_order(&f, &m, narrow));
        }
    }
    Ok(0)
}

fn dickson_classify(q: usize, gens: &str, cap: Option<usize>) -> CmdResult {
    let field = SmallField::new(q).map_err(|e| e.to_string())?;
    let gens = gens
        .split(';')
        .filter(|g| !g.trim().is_empty())
        .map(|g| field.parse_matrix(g))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| e.to_string())?;
    let group =
        dickson::closure(&field, &gens, cap.unwrap_or_else(dickson::cap_from_env)).map_err(|e| e.to_string())?;
    println!("{}", dickson::classify(&field, &group).map_err(|e| e.to_string())?);
    Ok(0)
}

fn inertia_types(weight: &str, case: Case) -> CmdResult {
    let k = weight
        .split(',')
        .map(|w| w.trim().parse::<u32>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| format!("bad weight list {weight:?}"))?;
    let splitting = match case {
        Case::Split => inertia::Splitting::Split,
        Case::Inert => inertia::Splitting::Inert,
    };
    for t in enumerate_inertial_types(&k, splitting).map_err(|e| e.to_string())? {
        println!("{}", t.display());
    }
    Ok(0)
}

fn data(sub: DataCommand) -> CmdResult {
    let ds = match &sub {
        DataCommand::Print { file } => {
            parse_newform_file(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?
        }
        DataCommand::ImportLmfdb { file } => {
            import_lmfdb_json(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?
        }
    };
    print!("{}", print_dataset(&ds));
    Ok(0)
}

fn render(file: &Path) -> CmdResult {
    let report = ImageReport::from_json(&read(file)?).map_err(|e| format!("{}: {e}", file.display()))?;
    print!("{}", render_text(&report));
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Analyze { file, format, extensions, cap } => analyze(&file, format, extensions, cap),
        Command::Field { d, sub } => field(d, sub),
        Command::Dickson { sub: DicksonCommand::Classify { q, gens, cap } } => dickson_classify(q, &gens, cap),
        Command::Inertia { weight, case } => inertia_types(&weight, case),
        Command::Data { sub } => data(sub),
        Command::Report { sub: ReportCommand::Render { file } } => render(&file),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("hmfimage: {msg}");
            ExitCode::from(1)
        }
    }
}
