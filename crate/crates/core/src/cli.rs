//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a condition or witness failed, 2 usage error,
//! 3 malformed scheme, 4 unmet dynamics prerequisite.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::codespace::Address;
use crate::dynamics::{ChaosWitnessReport, DynamicsError, DynamicsOptions};
use crate::render::{render_construction, render_subfractal, RenderStyle};
use crate::scheme::{build_tree, builtin, CellTree, Scheme, SchemeDocument, SchemeError, BUILTIN_NAMES};
use crate::verifier::{check_separation, full_verify, Extremal, SeparationMode, VerifyOptions};
use crate::{Caps, Tolerances};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_MALFORMED: i32 = 3;
pub const EXIT_PREREQUISITE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "fractal", version, about = "Build, verify, and render subdivision fractals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List or print built-in schemes.
    #[command(subcommand)]
    Scheme(SchemeCommand),
    /// Check the defining conditions and write a JSON report.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Require every kept/complement ratio to equal this value.
        #[arg(long)]
        expect_ratio: Option<f64>,
        /// Separation mode that gates the overall status.
        #[arg(long, value_enum, default_value_t = Mode::ForallExists)]
        mode: Mode,
        /// Report path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the separation constant.
    Separation {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_enum, default_value_t = Mode::ForallExists)]
        mode: Mode,
    },
    /// Generate and check chaos witnesses; writes a JSON report.
    Dynamics {
        #[command(flatten)]
        run: RunArgs,
        /// Number of shifts sampled for the Li-Yorke pair.
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long, value_enum, default_value_t = Mode::ForallExists)]
        mode: Mode,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write an SVG of one construction stage.
    Render {
        #[command(flatten)]
        run: RunArgs,
        /// Highlight the kept cells under this address.
        #[arg(long)]
        subfractal: Option<String>,
        /// Longer canvas side in pixels.
        #[arg(long, default_value_t = 512)]
        canvas: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
enum SchemeCommand {
    List,
    Show { name: String },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Built-in name or path to a scheme file.
    #[arg(long)]
    scheme: String,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(1..))]
    depth: u32,
    #[arg(long)]
    tol_geom: Option<f64>,
    #[arg(long)]
    tol_area: Option<f64>,
    #[arg(long)]
    tol_sep: Option<f64>,
    #[arg(long)]
    lambda_max: Option<f64>,
    /// Lift the cell, word and pair caps.
    #[arg(long)]
    force_cap: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Pairwise,
    ForallExists,
}

impl From<Mode> for SeparationMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Pairwise => SeparationMode::Pairwise,
            Mode::ForallExists => SeparationMode::ForallExists,
        }
    }
}

/// A failure mapped to its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn malformed(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MALFORMED,
            message: message.into(),
        }
    }
}

impl From<SchemeError> for Failure {
    fn from(e: SchemeError) -> Self {
        match e {
            SchemeError::Parse(_) | SchemeError::Validation(_) => Failure::malformed(e.to_string()),
            SchemeError::CapExceeded { .. } => Failure::usage(format!("{e}; pass --force-cap to lift")),
            _ => Failure::usage(e.to_string()),
        }
    }
}

/// Resolved settings shared by the run commands.
struct RunConfig {
    depth: usize,
    tolerances: Tolerances,
    caps: Caps,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Failure> {
        let mut tol = Tolerances::default();
        for (name, value, slot) in [
            ("--tol-geom", self.tol_geom, &mut tol.geom),
            ("--tol-area", self.tol_area, &mut tol.area),
            ("--tol-sep", self.tol_sep, &mut tol.sep),
            ("--lambda-max", self.lambda_max, &mut tol.lambda_max),
        ] {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(Failure::usage(format!("{name} must be a positive number, got {v}")));
                }
                *slot = v;
            }
        }
        Ok(RunConfig {
            depth: self.depth as usize,
            tolerances: tol,
            caps: if self.force_cap { Caps::unlimited() } else { Caps::default() },
        })
    }

    fn read_document(&self) -> Result<Option<SchemeDocument>, Failure> {
        if BUILTIN_NAMES.contains(&self.scheme.as_str()) {
            return Ok(None);
        }
        let text = fs::read_to_string(&self.scheme)
            .map_err(|e| Failure::usage(format!("scheme {:?} is neither built in nor readable: {e}", self.scheme)))?;
        Ok(Some(SchemeDocument::parse(&text)?))
    }

    /// Fully validated scheme.
    fn load(&self, tol: &Tolerances) -> Result<Scheme, Failure> {
        match self.read_document()? {
            None => Ok(builtin(&self.scheme)?),
            Some(doc) => Ok(doc.into_scheme(tol)?),
        }
    }

    /// Structurally valid scheme; layout violations are reported on stderr and
    /// left to the verifier.
    fn load_for_verify(&self, tol: &Tolerances) -> Result<Scheme, Failure> {
        match self.read_document()? {
            None => Ok(builtin(&self.scheme)?),
            Some(doc) => {
                let scheme = doc.into_scheme_unchecked_layout(tol)?;
                for v in scheme.layout_violations(tol) {
                    eprintln!("warning: {v}");
                }
                Ok(scheme)
            }
        }
    }
}

fn build(scheme: &Scheme, cfg: &RunConfig) -> Result<CellTree, Failure> {
    Ok(build_tree(scheme, cfg.depth, &cfg.caps)?)
}

/// Writes `contents` next to `path` and renames it into place.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let fail = |e: std::io::Error| Failure::usage(format!("cannot write {}: {e}", path.display()));
    let name = path
        .file_name()
        .ok_or_else(|| Failure::usage(format!("output path {} has no file name", path.display())))?;
    let mut tmp_name = OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(contents.as_bytes())?;
            f.sync_all()
        })
        .and_then(|()| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(fail(e));
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, contents: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_atomic(path, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn cmd_scheme(cmd: SchemeCommand) -> Result<i32, Failure> {
    match cmd {
        SchemeCommand::List => {
            for name in BUILTIN_NAMES {
                println!("{name}");
            }
        }
        SchemeCommand::Show { name } => print!("{}", builtin(&name)?.to_document().to_json()),
    }
    Ok(EXIT_OK)
}

fn verify_options(cfg: &RunConfig, mode: Mode, expected_ratio: Option<f64>) -> VerifyOptions {
    VerifyOptions {
        tolerances: cfg.tolerances,
        caps: cfg.caps,
        expected_ratio,
        separation_mode: mode.into(),
    }
}

fn cmd_verify(run: RunArgs, expect_ratio: Option<f64>, mode: Mode, out: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = run.config()?;
    let scheme = run.load_for_verify(&cfg.tolerances)?;
    let tree = build(&scheme, &cfg)?;
    let report = full_verify(&tree, &verify_options(&cfg, mode, expect_ratio)).map_err(|e| Failure::usage(e.to_string()))?;
    emit(&out, &report.to_json())?;
    for c in &report.conditions {
        if !c.status.is_pass() && c.is_gating() {
            eprintln!("{} failed", c.condition.as_str());
        }
    }
    Ok(if report.overall.is_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_separation(run: RunArgs, mode: Mode) -> Result<i32, Failure> {
    let cfg = run.config()?;
    let tree = build(&run.load(&cfg.tolerances)?, &cfg)?;
    let result = check_separation(&tree, mode.into(), &verify_options(&cfg, mode, None))
        .map_err(|e| Failure::usage(e.to_string()))?;
    let Extremal::Separation {
        mode, epsilon0, attained_at, ..
    } = result.extremal
    else {
        unreachable!("separation check yields separation extremal")
    };
    println!("epsilon0 {epsilon0:.12} mode {mode} depth {} attained_at {attained_at}", cfg.depth);
    Ok(if result.status.is_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_dynamics(run: RunArgs, horizon: usize, mode: Mode, out: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = run.config()?;
    let scheme = run.load(&cfg.tolerances)?;
    let opts = DynamicsOptions {
        tolerances: cfg.tolerances,
        caps: cfg.caps,
        mode: mode.into(),
        ..DynamicsOptions::default()
    };
    let report = ChaosWitnessReport::generate(&scheme, cfg.depth, horizon, &opts).map_err(|e| match e {
        DynamicsError::NoSeparation { .. } => Failure {
            code: EXIT_PREREQUISITE,
            message: e.to_string(),
        },
        DynamicsError::Scheme(s) => s.into(),
        e => Failure::usage(e.to_string()),
    })?;
    emit(&out, &report.to_json())?;
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_FAIL })
}

fn cmd_render(run: RunArgs, subfractal: Option<String>, canvas: u32, out: Option<PathBuf>) -> Result<i32, Failure> {
    let cfg = run.config()?;
    let scheme = run.load(&cfg.tolerances)?;
    let tree = build(&scheme, &cfg)?;
    let style = RenderStyle {
        canvas,
        ..RenderStyle::default()
    };
    let svg = match subfractal {
        None => render_construction(&tree, cfg.depth, &style),
        Some(text) => {
            let prefix = Address::parse(&text, scheme.alphabet()).map_err(|e| Failure::usage(e.to_string()))?;
            render_subfractal(&tree, &prefix, cfg.depth, &style)
        }
    }
    .map_err(|e| Failure::usage(e.to_string()))?;
    emit(&out, &svg)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Scheme(cmd) => cmd_scheme(cmd),
        Command::Verify {
            run,
            expect_ratio,
            mode,
            out,
        } => cmd_verify(run, expect_ratio, mode, out),
        Command::Separation { run, mode } => cmd_separation(run, mode),
        Command::Dynamics {
            run,
            horizon,
            mode,
            out,
        } => cmd_dynamics(run, horizon, mode, out),
        Command::Render {
            run,
            subfractal,
            canvas,
            out,
        } => cmd_render(run, subfractal, canvas, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("fractal").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args(&["--help"]), EXIT_OK);
        assert_eq!(run_args(&["bogus"]), EXIT_USAGE);
        assert_eq!(run_args(&["scheme", "show", "nosuch"]), EXIT_USAGE);
        assert_eq!(run_args(&["separation", "--scheme", "cantor", "--depth", "0"]), EXIT_USAGE);
        assert_eq!(run_args(&["separation", "--scheme", "cantor", "--tol-sep=-1"]), EXIT_USAGE);
        assert_eq!(run_args(&["separation", "--scheme", "/no/such/file.json"]), EXIT_USAGE);
    }

    #[test]
    fn separation_exit_codes() {
        assert_eq!(run_args(&["separation", "--scheme", "cantor", "--depth", "1", "--mode", "forall-exists"]), EXIT_OK);
        assert_eq!(run_args(&["separation", "--scheme", "carpet", "--depth", "1", "--mode", "pairwise"]), EXIT_FAIL);
        assert_eq!(run_args(&["separation", "--scheme", "carpet", "--depth", "1"]), EXIT_OK);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "one").unwrap();
        write_atomic(&path, "two").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
