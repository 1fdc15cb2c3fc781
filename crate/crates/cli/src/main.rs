use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use serde_json::json;

use nls_core::classifier::{classify_with, sweep};
use nls_core::diagnostics::inequalities::{inequality_checks, InequalityParams};
use nls_core::diagnostics::RunStatus;
use nls_core::evolution::evolve;
use nls_core::ground_state::{elliptic_residual, ground_state, reference_constants};
use nls_core::io::{self, build_grid, build_initial, read_config, write_checkpoint, write_json, write_text, IoError, RunConfig};
use nls_core::profiles::{bubble_decompose_with, gronwall_bound, gronwall_brute};
use nls_core::Field;

#[derive(Parser)]
#[command(name = "nls", about = "Energy-critical NLS laboratory", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// run configuration (key = value lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// directory for reports, traces and checkpoints
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// ground state W and its constants on the configured grid
    GroundState,
    /// evolve the initial data and write the diagnostics trace
    Simulate,
    /// scatter/blowup verdict for the initial data
    Classify,
    /// bisect the amplitude of the initial data between sweep.c_lo and sweep.c_hi
    Sweep,
    /// profile decomposition of the initial data
    Decompose,
    /// dyadic Gronwall bound against the exact solution
    Gronwall,
    /// ratios of the harmonic-analysis inequalities for the initial data
    CheckInequalities,
}

/// Numerical failure that completed and was reported (exit code 2).
#[derive(Debug)]
struct Diverged(String);

impl std::fmt::Display for Diverged {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "numerical divergence: {}", self.0)
    }
}

impl std::error::Error for Diverged {}

struct Ctx {
    cfg: RunConfig,
    base: PathBuf,
    out: PathBuf,
    verbose: bool,
}

impl Ctx {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("{}", msg.as_ref());
        }
    }

    fn path(&self, configured: &Option<String>, default: &str) -> PathBuf {
        self.out.join(configured.as_deref().unwrap_or(default))
    }

    fn initial(&self) -> Result<Field> {
        let spec = self.cfg.initial.as_ref().context("config has no initial.kind")?;
        Ok(build_initial(self.cfg.grid.as_ref(), spec, &self.base)?)
    }

    fn report<T: serde::Serialize>(&self, default: &str, value: &T) -> Result<PathBuf> {
        let p = self.path(&self.cfg.outputs.json, default);
        write_json(&p, value)?;
        self.log(format!("wrote {}", p.display()));
        Ok(p)
    }
}

fn ground_state_cmd(cx: &Ctx) -> Result<()> {
    let spec = cx.cfg.grid.as_ref().context("ground-state needs a grid (dimension, geometry, n, extent)")?;
    let grid = build_grid(spec)?;
    let gs = ground_state(spec.dim, &grid)?;
    let reference = reference_constants(spec.dim)?;
    cx.report(
        "ground_state.json",
        &json!({
            "grid": spec,
            "constants": gs.constants(),
            "elliptic_residual": elliptic_residual(&gs),
            "grad_tail": gs.grad_tail,
            "pot_tail": gs.pot_tail,
            "reference": reference,
        }),
    )?;
    if let Some(p) = &cx.cfg.outputs.checkpoint {
        write_checkpoint(&cx.out.join(p), &gs.w, 0.0)?;
    }
    Ok(())
}

fn simulate_cmd(cx: &Ctx) -> Result<()> {
    let u0 = cx.initial()?;
    cx.log(format!("evolving {} nodes to t = {}", u0.len(), cx.cfg.controls.t_max));
    let rec = evolve(&u0, cx.cfg.mu, &cx.cfg.controls)?;
    write_text(&cx.path(&cx.cfg.outputs.csv, "trajectory.csv"), &rec.to_csv())?;
    let last = rec.rows.last().context("empty trajectory")?;
    write_checkpoint(&cx.path(&cx.cfg.outputs.checkpoint, "final.cnls"), &rec.final_field, last.dt)?;
    cx.report(
        "summary.json",
        &json!({
            "status": rec.status,
            "steps": rec.step_count,
            "t_end": last.t,
            "first": rec.rows[0],
            "last": last,
        }),
    )?;
    cx.log(format!("{:?} after {} steps", rec.status, rec.step_count));
    if rec.status == RunStatus::Diverged {
        return Err(Diverged(format!("step size collapsed at t = {}", last.t)).into());
    }
    Ok(())
}

fn classify_cmd(cx: &Ctx) -> Result<()> {
    let u0 = cx.initial()?;
    let (verdict, rec) = classify_with(&u0, cx.cfg.mu, &cx.cfg.controls, &cx.cfg.classify)?;
    write_text(&cx.path(&cx.cfg.outputs.csv, "trajectory.csv"), &rec.to_csv())?;
    cx.report("verdict.json", &verdict)?;
    println!("{:?}", verdict.outcome);
    if verdict.status == RunStatus::Diverged {
        return Err(Diverged("trajectory diverged before a verdict".into()).into());
    }
    Ok(())
}

fn sweep_cmd(cx: &Ctx) -> Result<()> {
    let s = cx.cfg.sweep.as_ref().context("sweep needs sweep.c_lo and sweep.c_hi")?;
    let f0 = cx.initial()?;
    let res = sweep(&f0, s.c_lo, s.c_hi, s.width, cx.cfg.mu, &cx.cfg.controls)?;
    for (c, o) in &res.evaluations {
        cx.log(format!("c = {c:.6}: {o:?}"));
    }
    cx.report("sweep.json", &res)?;
    Ok(())
}

fn decompose_cmd(cx: &Ctx) -> Result<()> {
    let u = cx.initial()?;
    let dec = bubble_decompose_with(&u, cx.cfg.decompose_eps, cx.cfg.decompose_j_max, &cx.cfg.decompose)?;
    for (j, p) in dec.profiles.iter().enumerate() {
        cx.log(format!("profile {j}: M = {}, t0 = {:.3e}, kinetic = {:.4e}", p.bubble.scale, p.bubble.t0, p.kinetic));
        write_checkpoint(&cx.out.join(format!("profile_{j}.cnls")), &p.field, 0.0)?;
    }
    write_checkpoint(&cx.out.join("remainder.cnls"), &dec.remainder, 0.0)?;
    cx.report("decomposition.json", &dec)?;
    Ok(())
}

fn gronwall_cmd(cx: &Ctx) -> Result<()> {
    let g = cx.cfg.gronwall.as_ref().context("gronwall needs gronwall.gamma and gronwall.eta")?;
    let b = g.shape.sequence(g.k);
    let bound = gronwall_bound(g.gamma, g.eta, &b)?;
    let exact = gronwall_brute(g.gamma, g.eta, &b)?;
    let holds = exact.iter().zip(&bound.bound).all(|(x, m)| *x <= m * (1.0 + 1e-12) + 1e-300);
    cx.report("gronwall.json", &json!({ "params": g, "forcing": b, "bound": bound, "exact": exact, "holds": holds }))?;
    println!("bound {}", if holds { "holds" } else { "violated" });
    Ok(())
}

fn inequalities_cmd(cx: &Ctx) -> Result<()> {
    let phi = cx.initial()?;
    let params = InequalityParams { caps: cx.cfg.inequality_caps, ..Default::default() };
    let report = inequality_checks(&phi, &params)?;
    for c in &report.checks {
        cx.log(format!("{:<10} {:<16} {:.4e} (cap {})", c.name, c.point, c.ratio, c.cap));
    }
    cx.report("inequalities.json", &report)?;
    println!("{}", if report.pass { "all ratios within caps" } else { "some ratios exceed their caps" });
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => read_config(&p.to_string_lossy())?,
        None => io::parse_config("")?,
    };
    let base = cli.config.as_deref().and_then(Path::parent).unwrap_or(Path::new(".")).to_path_buf();
    if cli.out.exists() && !cli.out.is_dir() {
        bail!("--out {} is not a directory", cli.out.display());
    }
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let cx = Ctx { cfg, base, out: cli.out.clone(), verbose: cli.verbose };
    match cli.command {
        Command::GroundState => ground_state_cmd(&cx),
        Command::Simulate => simulate_cmd(&cx),
        Command::Classify => classify_cmd(&cx),
        Command::Sweep => sweep_cmd(&cx),
        Command::Decompose => decompose_cmd(&cx),
        Command::Gronwall => gronwall_cmd(&cx),
        Command::CheckInequalities => inequalities_cmd(&cx),
    }
}

fn main() -> ExitCode {
    // clap reports usage errors with code 2, which is reserved for divergence here
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Diverged>().is_some() {
                ExitCode::from(2)
            } else {
                if let Some(IoError::Config(_)) = e.downcast_ref::<IoError>() {
                    eprintln!("(configuration rejected)");
                }
                ExitCode::from(1)
            }
        }
    }
}
