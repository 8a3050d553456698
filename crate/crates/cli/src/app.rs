use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use conjlen_core::conjugacy;
use conjlen_core::coxeter::{fig1_data, preset};
use conjlen_core::descriptor::{GroupDescriptor, MatrixRepr, PairDescriptor};
use conjlen_core::growth::{self, GrowthConstants, GrowthReport};
use conjlen_core::linalg::{penrose_residuals, pseudoinverse};
use conjlen_core::{Error, Isometry, Matrix, SplitGroup, Tolerances};
use serde::{Deserialize, Serialize};

use crate::render;

pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NOT_CONJUGATE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "conjlen", version, about = "Conjugacy and conjugator length in split groups of Euclidean isometries")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a group descriptor or preset.
    Validate(GroupArgs),
    /// Print whether h and h' are conjugate.
    ConjugateCheck(PairArgs),
    /// Emit the coconjugation set as JSON.
    CoconjSet(PairArgs),
    /// Emit a conjugator of minimal translation norm as JSON.
    MinConjugator(PairArgs),
    /// Pseudoinverse of a square matrix with Penrose residuals.
    Pinv(PinvArgs),
    /// Empirical Tnorm and CLF tables.
    Growth(GrowthArgs),
    /// SVG of the Ã_2 alcove picture.
    RenderA2(RenderArgs),
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// Preset name (A~1 .. A~7, p1, p2, p4).
    #[arg(long, conflicts_with = "group")]
    pub preset: Option<String>,
    /// JSON group descriptor.
    #[arg(long)]
    pub group: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    /// Use the worked Ã_2 pair.
    #[arg(long, conflicts_with = "pair")]
    pub fig1: bool,
    /// JSON file with fields `h` and `h_prime`.
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// Output path (standard output if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PinvArgs {
    /// JSON matrix: list of rows, or a flat row-major list of n*n numbers.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub group: GroupArgs,
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
    pub n_max: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Search radius for conjugator lengths; CLF is skipped for
    /// non-discrete groups.
    #[arg(long, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_radius: u64,
    /// Largest n for the CLF table (defaults to `--n-max`).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub clf_n_max: Option<u64>,
    /// Skip the CLF table.
    #[arg(long)]
    pub no_clf: bool,
    /// CSV output (standard output if neither --csv nor --json is given).
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// JSON report output.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    /// Must be A~2 if given.
    #[arg(long)]
    pub preset: Option<String>,
    #[arg(long, conflicts_with = "pair")]
    pub fig1: bool,
    #[arg(long)]
    pub pair: Option<PathBuf>,
    /// Draw alcoves whose centroid lies within this distance of the origin.
    #[arg(long, default_value_t = 6.0)]
    pub radius: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INVALID,
        message: message.into(),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| invalid(e.to_string()))
        }
    }
}

fn to_json<T: Serialize>(x: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(x)
        .map(|s| s + "\n")
        .map_err(|e| invalid(e.to_string()))
}

pub fn load_group(args: &GroupArgs) -> Result<SplitGroup, Failure> {
    match (&args.preset, &args.group) {
        (Some(name), None) => Ok(preset(name)?),
        (None, Some(path)) => {
            let g = GroupDescriptor::from_json(&read(path)?)?.to_group()?;
            let problems = g.validate();
            if problems.is_empty() {
                Ok(g)
            } else {
                Err(invalid(format!("invalid group:\n  {}", problems.join("\n  "))))
            }
        }
        _ => Err(invalid("give exactly one of --preset or --group")),
    }
}

fn load_pair(fig1: bool, pair: &Option<PathBuf>, dim: usize) -> Result<(Isometry, Isometry), Failure> {
    match (fig1, pair) {
        (true, None) => {
            if dim != 2 {
                return Err(invalid("--fig1 needs the A~2 group"));
            }
            let d = fig1_data();
            Ok((d.h, d.h_prime))
        }
        (false, Some(path)) => {
            let p: PairDescriptor = serde_json::from_str(&read(path)?).map_err(|e| invalid(e.to_string()))?;
            Ok((p.h.to_isometry(dim)?, p.h_prime.to_isometry(dim)?))
        }
        _ => Err(invalid("give exactly one of --fig1 or --pair")),
    }
}

#[derive(Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub dim: usize,
    pub spherical_order: usize,
    pub real_rank: usize,
    pub integer_rank: usize,
    pub problems: Vec<String>,
}

#[derive(Debug, PartialEq, Serialize, Deserialize)]
pub struct PinvReport {
    pub pinv: Vec<Vec<f64>>,
    /// `|A X A - A|`, `|X A X - X|`, `|(A X)^T - A X|`, `|(X A)^T - X A|`.
    pub residuals: [f64; 4],
}

fn validate(args: &GroupArgs) -> Result<i32, Failure> {
    let g = match (&args.preset, &args.group) {
        (Some(name), None) => preset(name)?,
        (None, Some(path)) => GroupDescriptor::from_json(&read(path)?)?.to_group()?,
        _ => return Err(invalid("give exactly one of --preset or --group")),
    };
    let problems = g.validate();
    let report = ValidationReport {
        valid: problems.is_empty(),
        dim: g.dim(),
        spherical_order: g.spherical_group().len(),
        real_rank: g.lattice().real_basis.len(),
        integer_rank: g.lattice().int_basis.len(),
        problems,
    };
    emit(None, &to_json(&report)?)?;
    Ok(if report.valid { 0 } else { EXIT_INVALID })
}

fn pinv(args: &PinvArgs) -> Result<i32, Failure> {
    let repr: MatrixRepr = serde_json::from_str(&read(&args.matrix)?).map_err(|e| invalid(e.to_string()))?;
    let dim = match &repr {
        MatrixRepr::Rows(rows) => rows.len(),
        MatrixRepr::Flat(flat) => {
            let n = (flat.len() as f64).sqrt().round() as usize;
            if n * n != flat.len() {
                return Err(invalid("flat matrix length is not a square"));
            }
            n
        }
    };
    if dim == 0 {
        return Err(invalid("empty matrix"));
    }
    let a: Matrix = repr.to_matrix(dim)?;
    let p = pseudoinverse(&a, &Tolerances::default());
    let report = PinvReport {
        pinv: p.rows(),
        residuals: penrose_residuals(&a, &p),
    };
    emit(args.out.as_deref(), &to_json(&report)?)?;
    Ok(0)
}

fn growth_cmd(args: &GrowthArgs) -> Result<i32, Failure> {
    let g = load_group(&args.group)?;
    let (n_max, count) = (args.n_max as usize, args.count as usize);
    let tnorm = growth::empirical_tnorm(&g, n_max, count, args.seed)?;
    let (records, clf_fit, exceeded) = if g.is_discrete() && !args.no_clf {
        let clf_n = args.clf_n_max.map_or(n_max, |c| c as usize).min(n_max);
        let clf = growth::empirical_clf(&g, clf_n, count, args.seed, args.max_radius as usize)?;
        if clf.exceeded > 0 {
            eprintln!(
                "warning: {} sampled pairs had no conjugator within radius {}; excluded",
                clf.exceeded, args.max_radius
            );
        }
        let records = growth::merge_records(&tnorm, &clf.records);
        let fit = (clf.records.len() >= 2)
            .then(|| growth::fit_affine_upper_clf(&clf.records))
            .transpose()?;
        (records, fit, clf.exceeded)
    } else {
        (tnorm, None, 0)
    };
    let report = GrowthReport {
        tnorm_fit: growth::fit_affine_upper(&records)?,
        clf_fit,
        constants: GrowthConstants::of(&g)?,
        clf_exceeded: exceeded,
        seed: args.seed,
        count,
        records,
    };
    if let Some(path) = &args.csv {
        let f = fs::File::create(path).map_err(|e| invalid(format!("cannot write {}: {e}", path.display())))?;
        growth::write_csv(&report.records, f)?;
    }
    if let Some(path) = &args.json {
        emit(Some(path), &to_json(&report)?)?;
    }
    if args.csv.is_none() && args.json.is_none() {
        let mut buf = Vec::new();
        growth::write_csv(&report.records, &mut buf)?;
        emit(None, &String::from_utf8_lossy(&buf))?;
    }
    Ok(0)
}

fn render_cmd(args: &RenderArgs) -> Result<i32, Failure> {
    if let Some(name) = &args.preset {
        if name != "A~2" && name != "a~2" {
            return Err(Error::Unsupported(format!("render-a2 draws only A~2, not {name:?}")).into());
        }
    }
    let pair = match (args.fig1, &args.pair) {
        (false, None) => None,
        _ => Some(load_pair(args.fig1, &args.pair, 2)?),
    };
    let fig = render::build_figure(pair.as_ref().map(|(h, hp)| (h, hp)), args.radius)?;
    emit(args.out.as_deref(), &render::to_svg(&fig))?;
    Ok(0)
}

pub fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate(args) => validate(&args),
        Command::ConjugateCheck(args) => {
            let g = load_group(&args.group)?;
            let (h, hp) = load_pair(args.fig1, &args.pair, g.dim())?;
            let yes = conjugacy::is_conjugate(&g, &h, &hp)?;
            emit(args.out.as_deref(), if yes { "conjugate: yes\n" } else { "conjugate: no\n" })?;
            Ok(0)
        }
        Command::CoconjSet(args) => {
            let g = load_group(&args.group)?;
            let (h, hp) = load_pair(args.fig1, &args.pair, g.dim())?;
            let set = conjugacy::coconjugation_set(&g, &h, &hp)?;
            emit(args.out.as_deref(), &to_json(&set)?)?;
            Ok(0)
        }
        Command::MinConjugator(args) => {
            let g = load_group(&args.group)?;
            let (h, hp) = load_pair(args.fig1, &args.pair, g.dim())?;
            match conjugacy::min_norm_conjugator(&g, &h, &hp)? {
                Some(r) => {
                    emit(args.out.as_deref(), &to_json(&r)?)?;
                    Ok(0)
                }
                None => Err(Failure {
                    code: EXIT_NOT_CONJUGATE,
                    message: "h and h' are not conjugate".into(),
                }),
            }
        }
        Command::Pinv(args) => pinv(&args),
        Command::Growth(args) => growth_cmd(&args),
        Command::RenderA2(args) => render_cmd(&args),
    }
}

/// Parses arguments, runs, and returns the process exit code. Usage errors
/// exit with code 1; `--help` and `--version` with 0.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INVALID } else { 0 };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
