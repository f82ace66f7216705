use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use nhtopo::invariants::InvariantKind;
use nhtopo::model::file::ModelFile;
use nhtopo::model::zoo::ZOO;
use nhtopo::spectra::locate_transition;
use nhtopo_cli::acceptance;
use nhtopo_cli::commands::{self, Boundary};
use nhtopo_cli::config::{parse_assignment, parse_range, Format, RunConfig};
use nhtopo_cli::output::{emit, write_sweep};
use nhtopo_cli::presets::Preset;
use nhtopo_cli::sweep::SweepPlan;
use num_complex::Complex64;

#[derive(Parser)]
#[command(name = "nhtopo", version, about = "Reflection-matrix invariants of 1D non-Hermitian chains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML). Flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for sweeps.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Print what the command would run, then exit.
    #[arg(long, global = true)]
    describe: bool,
    /// Zoo model name.
    #[arg(long, global = true)]
    model: Option<String>,
    /// Model definition file (TOML).
    #[arg(long, global = true)]
    model_file: Option<PathBuf>,
    /// Zoo parameter, `name=value`; repeatable.
    #[arg(long = "param", global = true)]
    params: Vec<String>,
    #[arg(long, global = true, value_enum)]
    invariant: Option<KindArg>,
    /// Chain length in unit cells for spectra.
    #[arg(long, global = true)]
    cells: Option<usize>,
    /// Lead coupling `V_LS = s·I`.
    #[arg(long, global = true)]
    coupling_scale: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Z,
    Z2,
}

#[derive(Subcommand)]
enum Command {
    /// Invariant of a single model.
    Invariant,
    /// Invariant along a parameter sweep.
    Sweep {
        /// `name=start:stop:step`, overriding the [sweep] section.
        #[arg(long)]
        vary: Option<String>,
        /// Extra sweep points; repeatable.
        #[arg(long)]
        extra: Vec<f64>,
    },
    /// Open- or periodic-chain spectrum.
    Spectrum {
        #[arg(long, value_enum, default_value = "obc")]
        boundary: Boundary,
        #[arg(long, default_value_t = 256)]
        k_points: usize,
    },
    /// β roots per energy plus the zero-energy boundary sample.
    BetaSpectrum {
        /// Energy `re,im`; repeatable. Defaults to the open-chain spectrum.
        #[arg(long = "energy", allow_hyphen_values = true)]
        energies: Vec<String>,
    },
    /// Figure presets.
    Reproduce {
        #[arg(value_enum)]
        preset: Preset,
        /// Also write open-chain spectra along the sweep here (fig2, fig3).
        #[arg(long)]
        spectra: Option<PathBuf>,
    },
    /// Runs the acceptance checks.
    Selftest {
        /// Criterion numbers; all when empty.
        #[arg(long)]
        only: Vec<u8>,
    },
    /// Lists the zoo models and their parameters.
    Models,
}

fn resolve(common: &Common, base: RunConfig) -> Result<RunConfig> {
    let mut cfg = match &common.config {
        Some(p) => RunConfig::load(p)?,
        None => base,
    };
    if let Some(p) = &common.model_file {
        cfg.model = ModelFile::load(p)?;
    }
    if let Some(name) = &common.model {
        cfg.set_zoo_model(name);
    }
    for p in &common.params {
        let (k, v) = parse_assignment(p)?;
        cfg.set_param(&k, v)?;
    }
    if let Some(k) = common.invariant {
        cfg.invariant = Some(match k {
            KindArg::Z => InvariantKind::Z,
            KindArg::Z2 => InvariantKind::Z2,
        });
    }
    if let Some(n) = common.cells {
        cfg.cells = n;
    }
    if let Some(s) = common.coupling_scale {
        cfg.coupling_scale = Some(s);
    }
    if let Some(p) = &common.out {
        cfg.output.path = Some(p.clone());
    }
    if let Some(f) = common.format {
        cfg.output.format = f;
    }
    if let Some(w) = common.workers {
        cfg.output.workers = Some(w);
    }
    Ok(cfg)
}

fn parse_energy(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let num = |x: &str| x.trim().parse::<f64>().with_context(|| format!("bad energy '{s}'"));
    match parts[..] {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => bail!("energy must be 're' or 're,im', got '{s}'"),
    }
}

fn run(cli: Cli) -> Result<bool> {
    let common = &cli.common;
    match cli.command {
        Command::Models => {
            for (name, params) in ZOO {
                let p: Vec<String> = params.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!("{name}: {}", p.join(" "));
            }
            Ok(true)
        }
        Command::Selftest { only } => {
            if common.describe {
                for (id, title, _, limit) in acceptance::CRITERIA {
                    println!("[{id}] {title}{}", limit.map(|l| format!(" (limit {l} s)")).unwrap_or_default());
                }
                return Ok(true);
            }
            let mut all = true;
            for (id, ..) in acceptance::CRITERIA {
                if only.is_empty() || only.contains(&id) {
                    let o = acceptance::run(id).expect("known criterion");
                    println!("{o}");
                    all &= o.passed;
                }
            }
            Ok(all)
        }
        Command::Invariant => {
            let cfg = resolve(common, RunConfig::default())?;
            if common.describe {
                print!("{}", cfg.to_toml());
                return Ok(true);
            }
            let p = commands::invariant_point(&cfg)?;
            emit(cfg.output.path.as_deref(), |w| commands::write_point(&p, cfg.output.format, w))?;
            Ok(p.is_ok())
        }
        Command::Sweep { vary, extra } => {
            let mut cfg = resolve(common, RunConfig::default())?;
            if let Some(v) = vary {
                let mut r = parse_range(&v)?;
                r.extra = extra;
                cfg.sweep = Some(r);
            } else if !extra.is_empty() {
                match cfg.sweep.as_mut() {
                    Some(r) => r.extra.extend(extra),
                    None => bail!("--extra needs a sweep range"),
                }
            }
            let plan = SweepPlan::new(&cfg)?;
            if common.describe {
                print!("{}", cfg.to_toml());
                println!("# {} points", plan.points.len());
                return Ok(true);
            }
            let result = plan.run()?;
            emit(cfg.output.path.as_deref(), |w| write_sweep(&result, cfg.output.format, w))?;
            Ok(true)
        }
        Command::Spectrum { boundary, k_points } => {
            let cfg = resolve(common, RunConfig::default())?;
            if common.describe {
                print!("{}", cfg.to_toml());
                return Ok(true);
            }
            emit(cfg.output.path.as_deref(), |w| {
                commands::write_spectrum(&cfg, boundary, k_points, cfg.output.format, w)
            })?;
            Ok(true)
        }
        Command::BetaSpectrum { energies } => {
            let cfg = resolve(common, RunConfig::default())?;
            let energies: Vec<Complex64> = energies.iter().map(|s| parse_energy(s)).collect::<Result<_>>()?;
            if common.describe {
                print!("{}", cfg.to_toml());
                return Ok(true);
            }
            emit(cfg.output.path.as_deref(), |w| {
                commands::write_beta_spectrum(&cfg, &energies, cfg.output.format, w)
            })?;
            Ok(true)
        }
        Command::Reproduce { preset, spectra } => reproduce(common, preset, spectra),
    }
}

fn reproduce(common: &Common, preset: Preset, spectra: Option<PathBuf>) -> Result<bool> {
    let cfg = resolve(common, preset.config())?;
    if common.describe {
        println!("{}", preset.describe());
        println!("\n# resolved configuration");
        print!("{}", cfg.to_toml());
        return Ok(true);
    }
    let plan = SweepPlan::new(&cfg)?;
    if preset == Preset::Fig5 {
        let sweep = cfg.sweep.as_ref().expect("preset has a sweep");
        let fixed = |k: &str| cfg.model.zoo.as_ref().and_then(|z| z.params.get(k).copied());
        let (t, u, g) = (
            fixed("t").unwrap_or(nhtopo::model::zoo::TRS_T),
            fixed("u").unwrap_or(nhtopo::model::zoo::TRS_U),
            fixed("gamma").unwrap_or(nhtopo::model::zoo::TRS_GAMMA),
        );
        let rows: Vec<_> = sweep.points()?.iter().map(|&d| commands::beta_abs_row(t, u, g, d)).collect();
        emit(cfg.output.path.as_deref(), |w| commands::write_beta_abs(&rows, cfg.output.format, w))?;
        return Ok(true);
    }
    let result = plan.run()?;
    emit(cfg.output.path.as_deref(), |w| write_sweep(&result, cfg.output.format, w))?;
    let values = result.values();
    let jumps: Vec<(f64, f64)> = values.windows(2).filter(|p| p[0].1 != p[1].1).map(|p| (p[0].0, p[1].0)).collect();
    for (lo, hi) in &jumps {
        if *hi - *lo <= 0.0 {
            continue;
        }
        let at = locate_transition(
            |x| cfg.build_at(&plan.parameter, x),
            (*lo, *hi),
            plan.kind,
            1e-6,
            &plan.options,
        );
        match at {
            Ok(x) => eprintln!("transition in [{lo}, {hi}] at {} = {x:.7}", plan.parameter),
            Err(e) => eprintln!("transition in [{lo}, {hi}]: {e}"),
        }
    }
    if let Some(path) = spectra {
        let points = match preset {
            Preset::Fig3 => vec![0.0, 0.5],
            _ => plan.points.clone(),
        };
        emit(Some(&path), |w| commands::write_sweep_spectra(&cfg, &points, cfg.output.format, w))?;
    }
    Ok(true)
}

/// Output piped into a reader that closed early, e.g. `| head`.
fn broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.downcast_ref::<std::io::Error>()
            .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
            || c.downcast_ref::<csv::Error>().is_some_and(
                |e| matches!(e.kind(), csv::ErrorKind::Io(io) if io.kind() == std::io::ErrorKind::BrokenPipe),
            )
            || c.downcast_ref::<serde_json::Error>()
                .is_some_and(|e| e.io_error_kind() == Some(std::io::ErrorKind::BrokenPipe))
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
