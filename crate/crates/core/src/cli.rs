//! Command-line front end.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::error::Error;
use crate::io::config::{load_config, ConfigError, JobConfig};
use crate::io::export::{invariant_table, write_invariants_csv, write_obj};
use crate::line::PlueckerLine;
use crate::offset::{full_report, make_offset};
use crate::surface::RuledSurface;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Environment variable capping the worker pool (`0` = one worker per core).
pub const THREADS_ENV: &str = "DUAL_DARBOUX_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "dual-darboux",
    version,
    about = "Ruled surfaces, dual Darboux frames and Bertrand offsets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Invariant table of the base surface.
    Analyze {
        config: PathBuf,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant tables of every configured offset.
    Offset {
        config: PathBuf,
        /// Directory for offset_<k>.csv; without it one table goes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Checks every offset relation; exits 1 when a residual reaches the threshold.
    Verify {
        config: PathBuf,
        /// Relative residual threshold (default from the config, else 1e-6).
        #[arg(long)]
        threshold: Option<f64>,
        /// Directory for report_<k>.csv.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// OBJ meshes of the base surface and every offset.
    Mesh {
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dual angle between two lines given as "px py pz / dx dy dz".
    LineAngle {
        #[arg(allow_hyphen_values = true)]
        first: String,
        #[arg(allow_hyphen_values = true)]
        second: String,
    },
}

#[derive(Debug)]
enum Failure {
    Config(String),
    Numeric(Error),
    Io(String),
    Verify,
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Numeric(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

type Outcome = std::result::Result<(), Failure>;

fn configure_threads() {
    let n = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    // A pool may already exist when called repeatedly in one process.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global();
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_CONFIG;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_OK;
        }
    };
    configure_threads();
    let outcome = match cli.command {
        Command::Analyze { config, out } => analyze(&config, out.as_deref(), stdout),
        Command::Offset { config, out } => offset(&config, out.as_deref(), stdout),
        Command::Verify {
            config,
            threshold,
            out,
        } => verify(&config, threshold, out.as_deref(), stdout),
        Command::Mesh { config, out } => mesh(&config, &out, stdout),
        Command::LineAngle { first, second } => line_angle(&first, &second, stdout),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Verify) => EXIT_VERIFY_FAILED,
        Err(Failure::Config(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numeric(e)) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_NUMERIC
        }
        Err(Failure::Io(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_IO
        }
    }
}

fn base_surface(cfg: &JobConfig) -> Result<RuledSurface, Error> {
    RuledSurface::from_curves(cfg.base.c.clone(), cfg.base.e.clone(), cfg.tolerances)
}

fn analyze(config: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    let cfg = load_config(config)?;
    let states = invariant_table(&base_surface(&cfg)?, cfg.samples)?;
    match out {
        Some(path) => {
            let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
            write_invariants_csv(&mut w, &states, None, true)?;
            w.flush()?;
        }
        None => {
            let mut w = csv::Writer::from_writer(stdout);
            write_invariants_csv(&mut w, &states, None, true)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn require_offsets(cfg: &JobConfig) -> Outcome {
    if cfg.offsets.is_empty() {
        return Err(Failure::Config(
            "invalid offsets: at least one [[offsets]] entry is required".into(),
        ));
    }
    Ok(())
}

fn offset(config: &Path, out: Option<&Path>, stdout: &mut dyn Write) -> Outcome {
    let cfg = load_config(config)?;
    require_offsets(&cfg)?;
    let base = base_surface(&cfg)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let mut shared = match out {
        None => Some(csv::Writer::from_writer(stdout)),
        Some(_) => None,
    };
    for (k, entry) in cfg.offsets.iter().enumerate() {
        let surface = make_offset(&base, &entry.spec)?;
        let states = invariant_table(&surface, cfg.samples)?;
        match (&mut shared, out) {
            (Some(w), _) => write_invariants_csv(w, &states, Some(k), k == 0)?,
            (None, Some(dir)) => {
                let file = File::create(dir.join(format!("offset_{k}.csv")))?;
                let mut w = csv::Writer::from_writer(BufWriter::new(file));
                write_invariants_csv(&mut w, &states, None, true)?;
                w.flush()?;
            }
            (None, None) => unreachable!(),
        }
    }
    if let Some(mut w) = shared {
        w.flush()?;
    }
    Ok(())
}

fn verify(
    config: &Path,
    threshold: Option<f64>,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> Outcome {
    let cfg = load_config(config)?;
    require_offsets(&cfg)?;
    let threshold = threshold.unwrap_or(cfg.verify_threshold);
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Failure::Config(format!("invalid threshold: {threshold}")));
    }
    let base = base_surface(&cfg)?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
    }
    let mut all_pass = true;
    for (k, entry) in cfg.offsets.iter().enumerate() {
        let report = full_report(&base, &entry.spec, cfg.samples)?;
        write!(stdout, "[{k}] {}", report.summary(threshold))?;
        all_pass &= report.passes(threshold);
        if let Some(dir) = out {
            let file = File::create(dir.join(format!("report_{k}.csv")))?;
            report.write_csv(BufWriter::new(file))?;
        }
    }
    stdout.flush()?;
    if all_pass {
        Ok(())
    } else {
        Err(Failure::Verify)
    }
}

fn mesh(config: &Path, out: &Path, stdout: &mut dyn Write) -> Outcome {
    let cfg = load_config(config)?;
    let base = base_surface(&cfg)?;
    fs::create_dir_all(out)?;
    let m = cfg.mesh;
    let mut surfaces = vec![("base.obj".to_string(), base.clone())];
    for (k, entry) in cfg.offsets.iter().enumerate() {
        surfaces.push((format!("offset_{k}.obj"), make_offset(&base, &entry.spec)?));
    }
    for (name, surface) in surfaces {
        let grid = surface.sample_mesh(cfg.samples, m.v_range, m.v_count)?;
        let path = out.join(&name);
        write_obj(BufWriter::new(File::create(&path)?), &grid)?;
        writeln!(stdout, "{}", path.display())?;
    }
    Ok(())
}

fn line_angle(first: &str, second: &str, stdout: &mut dyn Write) -> Outcome {
    let parse = |text: &str| {
        text.parse::<PlueckerLine>()
            .map_err(|e| Failure::Config(format!("line \"{text}\": {e}")))
    };
    let (a, b) = (parse(first)?, parse(second)?);
    let angle = a.to_dual().angle_to(&b.to_dual())?;
    writeln!(stdout, "theta = {} deg", angle.theta.to_degrees())?;
    writeln!(stdout, "theta* = {}", angle.theta_star)?;
    if angle.parallel {
        writeln!(
            stdout,
            "lines are parallel; theta* is the unsigned distance"
        )?;
    }
    Ok(())
}
