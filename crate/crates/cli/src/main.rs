use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use isochron_core::averaging::{
    design_zeros, eval_G, eval_f, jacobian_check, k_from_perturbation, perturbation_from_k, reduce_to_G,
    taylor_independence, zeros_of_f, PerturbCoeffs,
};
use isochron_core::filippov::{
    displacement_sweep, find_limit_cycles, section_point, step_orbit_recorded, write_sweep_csv, write_trajectory_csv,
    SimConfig, DEFAULT_SCAN_POINTS, R_RANGE,
};
use isochron_core::verify::{certify_variant, GridConfig, Variant};
use isochron_core::HPReal;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "isochron", version, about = "Averaging, Chebyshev certificate and simulation for the perturbed isochronous center S4")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Certify that g1, …, g6 form an ECT-system on (0, 1).
    Verify(VerifyArgs),
    /// Choose k so that f vanishes at the given radii, and invert to coefficients.
    Design(DesignArgs),
    /// Integrate the discontinuous system and locate fixed points of the return map.
    Simulate(SimulateArgs),
    /// Print Taylor series of the f- and g-bases and the exact constants.
    Series(SeriesArgs),
    /// Write plot tables for a coefficient file.
    Export(ExportArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Numeric grid points.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
    /// Working precision in bits.
    #[arg(long, default_value_t = 192)]
    precision: u32,
    /// Distance kept from each endpoint of (√2 − 1, 1).
    #[arg(long, default_value_t = 1e-8)]
    standoff: f64,
    /// Write the JSON report here.
    #[arg(long)]
    json: Option<PathBuf>,
    /// Record wall-clock seconds per check.
    #[arg(long)]
    timing: bool,
    /// Inject a known defect (test hook).
    #[arg(long, value_enum)]
    tamper: Option<Tamper>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tamper {
    /// Perturb one coefficient of the recomputed Z52.
    Z52,
    /// Replace g6 by g5.
    Basis,
}

#[derive(Args)]
struct DesignArgs {
    /// One to five radii in (0, 1), increasing.
    #[arg(required = true, num_args = 1..)]
    targets: Vec<f64>,
    /// Witness file to write.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Coefficient file: a design witness or a bare coefficient map.
    coeffs: PathBuf,
    /// Comma-separated values of ε.
    #[arg(long, value_delimiter = ',', default_value = "1e-3")]
    eps: Vec<f64>,
    /// Window in r as lo,hi.
    #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [R_RANGE.0, R_RANGE.1])]
    window: Vec<f64>,
    /// Scan points for the sign-change search.
    #[arg(long, default_value_t = DEFAULT_SCAN_POINTS)]
    scan: usize,
    #[arg(long, default_value_t = 1e-12)]
    rtol: f64,
    #[arg(long, default_value_t = 1e-12)]
    atol: f64,
    /// (r0, Δr) table; with several ε the value is appended to the file stem.
    #[arg(long)]
    sweep_csv: Option<PathBuf>,
    /// One revolution (t, x, y, zone) at the first ε.
    #[arg(long)]
    trajectory_csv: Option<PathBuf>,
    /// Starting r of the recorded revolution.
    #[arg(long, default_value_t = 0.5)]
    trajectory_r: f64,
    /// Write the fixed-point report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long, default_value_t = 6)]
    order: usize,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    coeffs: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Grid points for the averaged functions and the sweep.
    #[arg(long, default_value_t = 200)]
    points: usize,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
}

/// Bad input, as opposed to a failed analysis.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(Usage(msg.into()))
}

fn exit_code(e: &anyhow::Error) -> u8 {
    use isochron_core::Error as E;
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<E>() {
        Some(E::Targets(_) | E::Config(_) | E::Domain { .. } | E::Parse(_)) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match cli.cmd {
        Cmd::Verify(a) => verify(a),
        Cmd::Design(a) => design(a),
        Cmd::Simulate(a) => simulate(a),
        Cmd::Series(a) => series(a),
        Cmd::Export(a) => export(a),
    };
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v)?;
    writeln!(w)?;
    Ok(())
}

fn verify(a: VerifyArgs) -> anyhow::Result<bool> {
    let cfg = GridConfig { points: a.grid, precision: a.precision, standoff: a.standoff, record_timing: a.timing };
    cfg.validate()?;
    let variant = match a.tamper {
        None => Variant::Standard,
        Some(Tamper::Z52) => Variant::TamperZ52,
        Some(Tamper::Basis) => Variant::DegenerateBasis,
    };
    let rep = certify_variant(&cfg, variant)?;
    for c in &rep.checks {
        let margin = c.margin.map(|m| format!("{m:.3e}")).unwrap_or_else(|| "-".into());
        println!("{:<5} {:<26} {:<12} {:>10}  {}", verdict(c.verdict), c.name, method(c.method), margin, c.statement);
    }
    if let Some(s0) = &rep.s0 {
        println!("s0 in [{:.12}, {:.12}]", s0.lo.to_f64(), s0.hi.to_f64());
    }
    println!("overall: {}", verdict(rep.overall));
    if let Some(p) = &a.json {
        write_json(p, &rep)?;
    }
    Ok(rep.passed())
}

fn verdict(v: isochron_core::verify::Verdict) -> &'static str {
    match v {
        isochron_core::verify::Verdict::Pass => "PASS",
        isochron_core::verify::Verdict::Fail => "FAIL",
    }
}

fn method(m: isochron_core::verify::Method) -> String {
    serde_json::to_value(m).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()
}

fn design(a: DesignArgs) -> anyhow::Result<bool> {
    let d = design_zeros(&a.targets)?;
    let c = perturbation_from_k(&d.k)?;
    let back = k_from_perturbation(&c).to_f64();
    let round_trip = d.k.0.iter().zip(&back.0).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    let found = zeros_of_f(&d.k, 2000)?;
    println!("k = {:?}", d.k.0);
    for (t, (z, s)) in d.targets.iter().zip(d.zeros.iter().zip(&d.slopes)) {
        println!("target {t:<6} zero {z:.15}  f' = {s:+.3e}");
    }
    println!("sign changes of f on a 2000-point sweep: {}", found.len());
    println!("k round trip through the coefficients: {round_trip:.3e}");
    let out = json!({
        "targets": d.targets,
        "k": d.k,
        "zeros": d.zeros,
        "slopes": d.slopes,
        "singular_values": d.singular_values,
        "sweep_zeros": found,
        "round_trip": round_trip,
        "coefficients": c,
    });
    match &a.output {
        Some(p) => write_json(p, &out)?,
        None => println!("{}", serde_json::to_string_pretty(&out)?),
    }
    Ok(found.len() == d.targets.len())
}

struct CoeffFile {
    c: PerturbCoeffs,
    zeros: Option<Vec<f64>>,
}

fn read_coeffs(path: &Path) -> anyhow::Result<CoeffFile> {
    let text = std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let zeros = v.get("zeros").and_then(|z| serde_json::from_value(z.clone()).ok());
    let body = v.get("coefficients").cloned().unwrap_or(v);
    let c = serde_json::from_value(body).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    Ok(CoeffFile { c, zeros })
}

fn stem_with(path: &Path, eps: f64) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let ext = path.extension().map(|e| format!(".{}", e.to_string_lossy())).unwrap_or_default();
    path.with_file_name(format!("{stem}_eps{eps:e}{ext}"))
}

fn simulate(a: SimulateArgs) -> anyhow::Result<bool> {
    let file = read_coeffs(&a.coeffs)?;
    let window = (a.window[0], a.window[1]);
    let cfgs: Vec<SimConfig> = a
        .eps
        .iter()
        .map(|&eps| {
            let cfg = SimConfig { eps, rtol: a.rtol, atol: a.atol, ..SimConfig::default() };
            cfg.validate().map(|_| cfg)
        })
        .collect::<Result<_, _>>()?;
    if a.scan < 2 || !(window.0 < window.1) {
        return Err(usage(format!("scan of {} points over {window:?}", a.scan)));
    }
    let mut runs = Vec::new();
    for cfg in &cfgs {
        let sweep = displacement_sweep(&file.c, cfg, window, a.scan)?;
        if let Some(p) = &a.sweep_csv {
            let p = if cfgs.len() > 1 { stem_with(p, cfg.eps) } else { p.clone() };
            let mut w = create(&p)?;
            write_sweep_csv(&mut w, &sweep)?;
            w.flush()?;
        }
        // at ε = 0 the return map is the identity and every sign change is noise
        let cycles = if cfg.eps == 0.0 { Vec::new() } else { find_limit_cycles(&file.c, cfg, window, a.scan)? };
        println!("eps = {:e}: {} fixed points", cfg.eps, cycles.len());
        let mut rows = Vec::new();
        for lc in &cycles {
            let near = file.zeros.as_ref().and_then(|z| {
                z.iter().copied().min_by(|x, y| (x - lc.r).abs().total_cmp(&(y - lc.r).abs()))
            });
            let note = near.map(|z| format!("  averaged zero {z:.6} (offset {:+.3e})", lc.r - z)).unwrap_or_default();
            println!("  r* = {:.10}  dr = {:+.2e}  {}{note}", lc.r, lc.residual, if lc.stable { "stable" } else { "unstable" });
            rows.push(json!({ "r": lc.r, "residual": lc.residual, "stable": lc.stable, "averaged_zero": near }));
        }
        let max_dr = sweep.iter().map(|(_, d)| d.abs()).fold(0.0, f64::max);
        runs.push(json!({ "eps": cfg.eps, "fixed_points": rows, "max_abs_displacement": max_dr }));
    }
    if let (Some(p), Some(cfg)) = (&a.trajectory_csv, cfgs.first()) {
        let mut tr = Vec::new();
        step_orbit_recorded(&section_point(a.trajectory_r), &file.c, cfg, Some(&mut tr))?;
        let mut w = create(p)?;
        write_trajectory_csv(&mut w, &tr)?;
        w.flush()?;
    }
    if let Some(p) = &a.json {
        write_json(p, &json!({ "window": [window.0, window.1], "runs": runs }))?;
    }
    Ok(true)
}

fn series(a: SeriesArgs) -> anyhow::Result<bool> {
    if a.order == 0 || a.order > 40 {
        return Err(usage(format!("order {} outside 1..=40", a.order)));
    }
    let table = isochron_core::averaging::SeriesTable::new(a.order);
    for (name, set) in [("f", &table.f), ("g", &table.g)] {
        for (i, s) in set.iter().enumerate() {
            let terms: Vec<String> = s
                .coeffs
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(n, c)| format!("({c}) r^{n}"))
                .collect();
            println!("{name}{} = {} + O(r^{})", i + 1, terms.join(" + "), a.order + 1);
        }
    }
    let (_, det) = taylor_independence();
    let jac = jacobian_check();
    println!("det of r^1..r^6 coefficients of f1..f6: {det}");
    println!("jacobian of k w.r.t. a10, a01, a20, a11, b10, b01: {jac}");
    if let Some(p) = &a.json {
        write_json(p, &json!({ "table": table, "taylor_determinant": det, "jacobian": jac }))?;
    }
    Ok(true)
}

fn export(a: ExportArgs) -> anyhow::Result<bool> {
    let file = read_coeffs(&a.coeffs)?;
    if a.points < 2 {
        return Err(usage("at least 2 points"));
    }
    let cfg = SimConfig::with_eps(a.eps);
    cfg.validate()?;
    std::fs::create_dir_all(&a.out)?;
    let k = k_from_perturbation(&file.c).to_f64();
    let m = reduce_to_G(&k);
    let mut w = create(&a.out.join("averaged.csv"))?;
    writeln!(w, "r,f,G")?;
    for i in 1..a.points {
        let r = i as f64 / a.points as f64;
        let x = HPReal::from_f64(r, 128);
        writeln!(w, "{r:.17e},{:.17e},{:.17e}", eval_f(&x, &k)?.to_f64(), eval_G(&x, &m)?.to_f64())?;
    }
    w.flush()?;
    let sweep = displacement_sweep(&file.c, &cfg, R_RANGE, a.points)?;
    let mut w = create(&a.out.join("sweep.csv"))?;
    write_sweep_csv(&mut w, &sweep)?;
    w.flush()?;
    let mut tr = Vec::new();
    step_orbit_recorded(&section_point(0.5), &file.c, &cfg, Some(&mut tr))?;
    let mut w = create(&a.out.join("trajectory.csv"))?;
    write_trajectory_csv(&mut w, &tr)?;
    w.flush()?;
    println!("wrote averaged.csv, sweep.csv, trajectory.csv to {}", a.out.display());
    Ok(true)
}
