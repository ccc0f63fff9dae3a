//! `qubit-reach`: dynamics, extremals and reachable sets of a driven qubit.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use qubit_reach::bloch::BlochVector;
use qubit_reach::control::{simulate, ControlSchedule, SimulationOptions};
use qubit_reach::lie::rank_certificate;
use qubit_reach::ode::IntegratorConfig;
use qubit_reach::pmp::{integrate_extremal, seed, ExtremalOptions};
use qubit_reach::reachset::{
    barrier_min, delta_estimate, guaranteed_ball_radius, lacuna_alpha_bound, render_svg,
    revolve_to_3d, BarrierGrid, ReachOptions, ReachSweep, SpiralRegion, SvgOptions,
};
use qubit_reach::table::{build_table, LookupTable, TableOptions};
use qubit_reach::SystemParams;

#[derive(Parser, Debug)]
#[command(name = "qubit-reach", version, propagate_version = true)]
#[command(about = "Dynamics, time-optimal extremals and reachable sets of a driven open qubit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate the Bloch equations under a piecewise-constant control schedule.
    Simulate(SimulateArgs),
    /// Integrate one extremal of the time-optimal problem.
    Extremal(ExtremalArgs),
    /// Compute the set reachable from the north pole in scaled time at most T.
    Reachset(ReachsetArgs),
    /// Emit numbered SVG frames of the growing reachable set.
    Movie(MovieArgs),
    /// Describe the exactly reachable region bounded by logarithmic spirals.
    Spiral(SpiralArgs),
    /// Guaranteed-ball radius, lacuna bound and a barrier-triangle certificate.
    Lacuna(LacunaArgs),
    /// Lie-bracket rank certificates as CSV.
    Rank(RankArgs),
    /// Build or query the seed lookup table.
    #[command(subcommand)]
    Table(TableCommand),
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    /// gamma/omega in scaled units (omega = 1, kappa = 1/2).
    #[arg(long, default_value_t = 0.1, conflicts_with = "gamma")]
    gamma_ratio: f64,
    /// Transition frequency omega (rad/s) for physical units.
    #[arg(long)]
    omega: Option<f64>,
    /// Coupling kappa for physical units.
    #[arg(long)]
    kappa: Option<f64>,
    /// Decoherence rate gamma (1/s) for physical units.
    #[arg(long)]
    gamma: Option<f64>,
}

impl ParamArgs {
    fn params(&self) -> Result<SystemParams> {
        let omega = self.omega.unwrap_or(1.0);
        let kappa = self.kappa.unwrap_or(0.5);
        let gamma = self.gamma.unwrap_or(self.gamma_ratio * omega);
        Ok(SystemParams::new(omega, kappa, gamma)?)
    }
}

#[derive(Args, Debug, Clone)]
struct IntegratorArgs {
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Use fixed-step RK4 with this step instead of the adaptive pair.
    #[arg(long)]
    rk4_step: Option<f64>,
    #[arg(long, default_value_t = 10_000_000)]
    max_steps: usize,
}

impl IntegratorArgs {
    fn config(&self) -> IntegratorConfig {
        let base = match self.rk4_step {
            Some(h) => IntegratorConfig::rk4(h),
            None => IntegratorConfig::adaptive(self.abs_tol, self.rel_tol),
        };
        IntegratorConfig {
            max_steps: self.max_steps,
            ..base
        }
    }

    fn extremal(&self) -> ExtremalOptions {
        let d = ExtremalOptions::default();
        ExtremalOptions {
            integrator: self.config().with_max_step(d.integrator.max_step),
            ..d
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// CSV with header t,u,n.
    #[arg(long)]
    schedule: PathBuf,
    /// Initial Bloch vector rx,ry,rz.
    #[arg(long, default_value = "0,0,1", allow_hyphen_values = true)]
    r0: String,
    /// Final time.
    #[arg(long = "T")]
    t_final: f64,
    /// Read schedule times and T in units of 1/omega.
    #[arg(long)]
    scaled: bool,
    /// Cap on |u|; defaults to 1e3 omega / (2 kappa).
    #[arg(long)]
    u_max: Option<f64>,
    /// Output CSV (t,rx,ry,rz); standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtremalArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    /// Costate angle: (p, q)(0) = (cos psi0, sin psi0).
    #[arg(long, allow_hyphen_values = true)]
    psi0: f64,
    /// Duration in units of 1/omega.
    #[arg(long = "T")]
    t_scaled: f64,
    /// Output CSV (tau,z,R,p,q,theta,H); standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct SweepArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long, default_value_t = 1024)]
    seeds: usize,
    #[arg(long, default_value_t = 512)]
    raster: usize,
    /// Sampling step along extremals, scaled time.
    #[arg(long, default_value_t = 0.01)]
    dtau: f64,
}

impl SweepArgs {
    fn options(&self) -> ReachOptions {
        ReachOptions {
            n_seeds: self.seeds,
            raster: self.raster,
            dtau: self.dtau,
            extremal: self.integrator.extremal(),
            ..ReachOptions::default()
        }
    }
}

#[derive(Args, Debug)]
struct ReachsetArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    /// Duration in units of 1/omega.
    #[arg(long = "T")]
    t_scaled: f64,
    /// CSV of occupied cell centers (z,R).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
    /// OBJ mesh of the boundary revolved around the rx axis.
    #[arg(long)]
    obj: Option<PathBuf>,
    #[arg(long, default_value_t = 64)]
    angles: usize,
    /// Draw the spiral region on the SVG.
    #[arg(long)]
    spiral: bool,
}

#[derive(Args, Debug)]
struct MovieArgs {
    #[command(flatten)]
    sweep: SweepArgs,
    #[arg(long = "T-max", default_value_t = 7.0)]
    t_max: f64,
    #[arg(long, default_value_t = 140)]
    frames: usize,
    /// Output directory for frame_0001.svg, ...
    #[arg(long, default_value = "frames")]
    dir: PathBuf,
}

#[derive(Args, Debug)]
struct SpiralArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// CSV of the boundary polygon (z,R).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    per_arc: usize,
}

#[derive(Args, Debug)]
struct LacunaArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    phi0: f64,
    #[arg(long, default_value_t = 0.4)]
    alpha: f64,
    #[arg(long, default_value_t = 1e-3)]
    beta: f64,
    #[arg(long, default_value_t = 2048)]
    n_phi: usize,
    #[arg(long, default_value_t = 720)]
    n_theta: usize,
}

#[derive(Args, Debug)]
struct RankArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Points per axis of the grid over [-1,1]^3 (points outside the ball are skipped).
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Single point rx,ry,rz instead of a grid.
    #[arg(long, allow_hyphen_values = true)]
    point: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum TableCommand {
    /// Sweep extremals and record the first seed reaching each cell.
    Build(TableBuildArgs),
    /// Look up the seed for a target (z, R).
    Query(TableQueryArgs),
}

#[derive(Args, Debug)]
struct TableBuildArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(long, default_value_t = 4096)]
    seeds: usize,
    #[arg(long = "T-max", default_value_t = 10.0)]
    t_max: f64,
    #[arg(long, default_value_t = 256)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TableQueryArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    z: f64,
    #[arg(long = "R", allow_hyphen_values = true)]
    r: f64,
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn parse_triple(s: &str) -> Result<[f64; 3]> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .with_context(|| format!("expected three comma-separated numbers, got {s:?}"))?;
    match v.as_slice() {
        [a, b, c] => Ok([*a, *b, *c]),
        _ => bail!("expected three comma-separated numbers, got {s:?}"),
    }
}

fn run_simulate(a: &SimulateArgs) -> Result<()> {
    let params = a.params.params()?;
    let scale = if a.scaled { 1.0 / params.omega() } else { 1.0 };
    let file =
        File::open(&a.schedule).with_context(|| format!("cannot open {}", a.schedule.display()))?;
    let schedule = ControlSchedule::from_csv(file, scale, a.t_final * scale)?;
    let r0 = BlochVector::from_array(parse_triple(&a.r0)?);
    let opts = SimulationOptions {
        integrator: a.integrator.config(),
        u_max: a.u_max,
    };
    let traj = simulate(r0, &schedule, &params, &opts)?;
    let mut w = output(a.out.as_deref())?;
    writeln!(w, "t,rx,ry,rz")?;
    for (t, r) in traj.samples() {
        writeln!(w, "{t},{},{},{}", r.rx, r.ry, r.rz)?;
    }
    w.flush()?;
    Ok(())
}

fn run_extremal(a: &ExtremalArgs) -> Result<()> {
    let params = a.params.params()?;
    let s = seed(a.psi0, &params)?;
    let traj = integrate_extremal(s, a.t_scaled, &params, &a.integrator.extremal())?;
    let mut w = output(a.out.as_deref())?;
    traj.write_csv(&mut w, &params)?;
    w.flush()?;
    Ok(())
}

fn run_reachset(a: &ReachsetArgs) -> Result<()> {
    let params = a.sweep.params.params()?;
    let sweep = ReachSweep::new(a.t_scaled, &params, &a.sweep.options())?;
    let set = sweep.reachable_set(a.t_scaled)?;
    if let Some(p) = &a.out {
        let mut w = output(Some(p))?;
        set.write_csv(&mut w)?;
        w.flush()?;
    }
    if let Some(p) = &a.svg {
        let spiral = a.spiral.then(|| SpiralRegion::new(&params));
        let svg = render_svg(
            &set,
            &SvgOptions {
                spiral,
                ..SvgOptions::default()
            },
        );
        std::fs::write(p, svg).with_context(|| format!("cannot write {}", p.display()))?;
    }
    if let Some(p) = &a.obj {
        let mesh = revolve_to_3d(&set, a.angles)?;
        let mut w = output(Some(p))?;
        mesh.write_obj(&mut w)?;
        w.flush()?;
    }
    let mut out = io::stdout().lock();
    writeln!(out, "T={}", a.t_scaled)?;
    writeln!(out, "extremals={}", sweep.seed_count())?;
    writeln!(out, "failed_extremals={}", sweep.failures().len())?;
    writeln!(out, "occupied_cells={}", set.raster.count())?;
    writeln!(out, "boundary_loops={}", set.boundary.len())?;
    Ok(())
}

fn run_movie(a: &MovieArgs) -> Result<()> {
    if a.frames == 0 {
        bail!("frames must be > 0");
    }
    let params = a.sweep.params.params()?;
    let sweep = ReachSweep::new(a.t_max, &params, &a.sweep.options())?;
    std::fs::create_dir_all(&a.dir)
        .with_context(|| format!("cannot create {}", a.dir.display()))?;
    for k in 1..=a.frames {
        let t = a.t_max * k as f64 / a.frames as f64;
        let set = sweep.reachable_set(t)?;
        let svg = render_svg(&set, &SvgOptions::default());
        let path = a.dir.join(format!("frame_{k:04}.svg"));
        std::fs::write(&path, svg).with_context(|| format!("cannot write {}", path.display()))?;
    }
    println!("frames={}", a.frames);
    Ok(())
}

fn run_spiral(a: &SpiralArgs) -> Result<()> {
    let params = a.params.params()?;
    let region = SpiralRegion::new(&params);
    if let Some(p) = &a.out {
        let mut w = output(Some(p))?;
        writeln!(w, "z,R")?;
        for q in region.boundary(a.per_arc.max(1)) {
            writeln!(w, "{},{}", q[0], q[1])?;
        }
        w.flush()?;
    }
    println!("axis_intercept={}", region.radius_at(0.0));
    match guaranteed_ball_radius(&params) {
        Ok(r) => println!("guaranteed_radius={r}"),
        Err(e) => println!("guaranteed_radius=none ({e})"),
    }
    Ok(())
}

fn run_lacuna(a: &LacunaArgs) -> Result<()> {
    let params = a.params.params()?;
    let radius = guaranteed_ball_radius(&params)?;
    let alpha_bound = lacuna_alpha_bound(&params)?;
    let grid = BarrierGrid {
        n_phi: a.n_phi,
        n_theta: a.n_theta,
    };
    let min = barrier_min(a.phi0, a.alpha, a.beta, &params, grid)?;
    println!("gamma_ratio={}", params.ratio());
    println!("guaranteed_radius={radius}");
    println!("delta={}", delta_estimate(&params));
    println!("alpha_bound={alpha_bound}");
    println!("phi0={}", a.phi0);
    println!("alpha={}", a.alpha);
    println!("beta={}", a.beta);
    println!("barrier_min={min:e}");
    println!("barrier_certified={}", min > 0.0);
    Ok(())
}

fn run_rank(a: &RankArgs) -> Result<()> {
    let params = a.params.params()?;
    let points: Vec<[f64; 3]> = match &a.point {
        Some(p) => vec![parse_triple(p)?],
        None => {
            if a.grid < 2 {
                bail!("grid must be >= 2");
            }
            let c = |k: usize| -1.0 + 2.0 * k as f64 / (a.grid - 1) as f64;
            let mut v = Vec::new();
            for i in 0..a.grid {
                for j in 0..a.grid {
                    for k in 0..a.grid {
                        let p = [c(i), c(j), c(k)];
                        if p.iter().map(|x| x * x).sum::<f64>() <= 1.0 + 1e-12 {
                            v.push(p);
                        }
                    }
                }
            }
            v
        }
    };
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    w.write_record(["rx", "ry", "rz", "rank", "witness", "determinant"])?;
    for p in points {
        let cert = rank_certificate(BlochVector::from_array(p), &params)?;
        let witness = cert.witness.map(|t| t.join(" ")).unwrap_or_default();
        w.write_record([
            p[0].to_string(),
            p[1].to_string(),
            p[2].to_string(),
            cert.rank.to_string(),
            witness,
            cert.determinant.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn run_table(cmd: &TableCommand) -> Result<()> {
    match cmd {
        TableCommand::Build(a) => {
            let params = a.params.params()?;
            let opts = TableOptions {
                n_seeds: a.seeds,
                t_max: a.t_max,
                grid: a.grid,
                extremal: a.integrator.extremal(),
                ..TableOptions::default()
            };
            let table = build_table(&params, &opts)?;
            table.save(&a.out)?;
            println!("cells={}", table.len());
        }
        TableCommand::Query(a) => {
            let table = LookupTable::load(&a.input)?;
            let q = table.query(a.z, a.r)?;
            println!("cell={},{}", q.cell.0, q.cell.1);
            println!("psi0={}", q.record.psi0);
            println!("theta0={}", q.record.theta0);
            println!("Tmin={}", q.record.t_min);
        }
    }
    Ok(())
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("QUBIT_REACH_THREADS") {
        let n: usize = v
            .parse()
            .with_context(|| format!("QUBIT_REACH_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Simulate(a) => run_simulate(a),
        Command::Extremal(a) => run_extremal(a),
        Command::Reachset(a) => run_reachset(a),
        Command::Movie(a) => run_movie(a),
        Command::Spiral(a) => run_spiral(a),
        Command::Lacuna(a) => run_lacuna(a),
        Command::Rank(a) => run_rank(a),
        Command::Table(c) => run_table(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
