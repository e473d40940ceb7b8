//! Command-line frontend: simulation runs, analytic tabulation, and the
//! verification-suite runner, with reproducible seeding and CSV/JSON output.
//!
//! Exit codes: 0 success, 1 verification gate failure, 2 configuration error.

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sphere_split::analytics;
use sphere_split::dirdist::DirectionDistribution;
use sphere_split::poissontess;
use sphere_split::quad::QuadratureConfig;
use sphere_split::splitproc;
use sphere_split::verify::{self, Scale, VerifyConfig};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "sphere-split", version, about = "Splitting and Poisson great hypersphere tessellations of S^d: simulation, closed-form tables, verification")]
struct Cli {
    /// Plain-text key=value config file; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one tessellation and write the event log and snapshot.
    Simulate(SimulateArgs),
    /// Tabulate a closed-form formula over a grid as CSV.
    Analytic(AnalyticArgs),
    /// Run the verification gate suite.
    Verify(VerifyArgs),
}

#[derive(Args, Default, Clone)]
struct SimulateArgs {
    /// Model: split | poisson
    #[arg(long)]
    model: Option<String>,
    /// Sphere dimension d >= 2
    #[arg(long)]
    d: Option<usize>,
    /// Time / intensity parameter
    #[arg(long)]
    t: Option<f64>,
    /// Direction distribution: uniform | axial:beta=<v>:axis=<coords>
    #[arg(long)]
    kappa: Option<String>,
    /// Master seed (falls back to SPHERE_SPLIT_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args, Default, Clone)]
struct AnalyticArgs {
    /// Formula name (see `analytic --formula list`)
    #[arg(long)]
    formula: Option<String>,
    /// Dimension or dimension range (e.g. 2 or 2..20)
    #[arg(long)]
    d: Option<String>,
    #[arg(long)]
    t: Option<f64>,
    /// Grid start:stop:step for the running variable
    #[arg(long)]
    grid: Option<String>,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default, Clone)]
struct VerifyArgs {
    /// quick (~minutes) or full (~an hour at desk scale)
    #[arg(long)]
    scale: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    /// Output directory for the report files
    #[arg(long)]
    out: Option<PathBuf>,
    /// List the gates without running them
    #[arg(long)]
    list: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config.as_deref().map(load_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("config error: {e}");
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Simulate(args) => cmd_simulate(args, &config),
        Command::Analytic(args) => cmd_analytic(args, &config),
        Command::Verify(args) => cmd_verify(args, &config),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

type Config = std::collections::BTreeMap<String, String>;

fn load_config(path: &Path) -> Result<Config, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut map = Config::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!("{}:{}: expected key=value", path.display(), lineno + 1));
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn seed_from(args_seed: Option<u64>, config: &Config) -> Result<u64, String> {
    if let Some(s) = args_seed {
        return Ok(s);
    }
    if let Some(s) = config.get("seed") {
        return s.parse().map_err(|e| format!("config seed: {e}"));
    }
    if let Ok(s) = std::env::var("SPHERE_SPLIT_SEED") {
        return s.parse().map_err(|e| format!("SPHERE_SPLIT_SEED: {e}"));
    }
    Ok(0)
}

fn setup_jobs(jobs: Option<usize>, config: &Config) {
    let jobs = jobs.or_else(|| config.get("jobs").and_then(|j| j.parse().ok()));
    if let Some(j) = jobs {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(j).build_global();
    }
}

fn cmd_simulate(args: SimulateArgs, config: &Config) -> Result<ExitCode, String> {
    let model = args
        .model
        .or_else(|| config.get("model").cloned())
        .unwrap_or_else(|| "split".into());
    let d: usize = args
        .d
        .or_else(|| config.get("d").and_then(|v| v.parse().ok()))
        .unwrap_or(2);
    if d < 2 {
        return Err(format!("d = {d} must be at least 2"));
    }
    let t: f64 = args
        .t
        .or_else(|| config.get("t").and_then(|v| v.parse().ok()))
        .unwrap_or(1.0);
    let kappa_spec = args
        .kappa
        .or_else(|| config.get("kappa").cloned())
        .unwrap_or_else(|| "uniform".into());
    let kappa = DirectionDistribution::parse_spec(&kappa_spec, d).map_err(|e| e.to_string())?;
    let seed = seed_from(args.seed, config)?;
    setup_jobs(args.jobs, config);
    let out_dir = args
        .out
        .or_else(|| config.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir).map_err(|e| format!("{}: {e}", out_dir.display()))?;

    match model.as_str() {
        "split" => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let y = splitproc::simulate(d, &kappa, t, &mut rng, None, seed)
                .map_err(|e| e.to_string())?;
            let csv = splitproc::events_to_csv(&y);
            std::fs::write(out_dir.join("events.csv"), csv).map_err(|e| e.to_string())?;
            let snapshot = splitproc::snapshot_json(&y, "split");
            std::fs::write(
                out_dir.join("snapshot.json"),
                serde_json::to_string_pretty(&snapshot).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "split model: d={d} t={t} seed={seed} -> {} cells, {} events, {} rejected candidates",
                y.cell_count(),
                y.events.len(),
                y.rejected_count
            );
        }
        "poisson" => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            let p = poissontess::sample(d, &kappa, t, &mut rng, seed).map_err(|e| e.to_string())?;
            std::fs::write(out_dir.join("normals.csv"), poissontess::normals_to_csv(&p))
                .map_err(|e| e.to_string())?;
            let snapshot = poissontess::snapshot_json(&p).map_err(|e| e.to_string())?;
            std::fs::write(
                out_dir.join("snapshot.json"),
                serde_json::to_string_pretty(&snapshot).map_err(|e| e.to_string())?,
            )
            .map_err(|e| e.to_string())?;
            println!(
                "poisson model: d={d} t={t} seed={seed} -> {} great hyperspheres",
                p.normals.len()
            );
        }
        other => return Err(format!("unknown model `{other}` (use split or poisson)")),
    }
    Ok(ExitCode::SUCCESS)
}

const FORMULAS: &[(&str, &str)] = &[
    ("pcf", "r, K and pair-correlation of both models over an r grid (needs --d, --t, --grid)"),
    ("var_surface", "Var H^{d-1}(Z_t) over a d range (--d a..b, --t) or a t grid (--d, --grid)"),
    ("var_sigma0", "Var Sigma_0(t) on S^2 over a t grid"),
    ("cov_sigma0_sigma1", "Cov(Sigma_0, Sigma_1)(t) on S^2 over a t grid"),
    ("mean_segment_length", "expected typical maximal segment length over a t grid (--d)"),
    ("mean_edge_length_poisson", "expected typical Poisson edge length over a t grid"),
    ("n1_split", "expected maximal segment count over a t grid (--d)"),
    ("n1_poisson", "expected Poisson edge count over a t grid (--d)"),
    ("birth_density", "birth-time density on (0, t) (--d, --t, --grid over s)"),
];

fn parse_grid(spec: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{spec}` must be start:stop:step"));
    }
    let start: f64 = parts[0].parse().map_err(|e| format!("grid start: {e}"))?;
    let stop: f64 = parts[1].parse().map_err(|e| format!("grid stop: {e}"))?;
    let step: f64 = parts[2].parse().map_err(|e| format!("grid step: {e}"))?;
    if !(step > 0.0) || stop < start {
        return Err(format!("grid `{spec}` is empty or not increasing"));
    }
    let mut out = Vec::new();
    let mut x = start;
    let n = ((stop - start) / step).round() as usize;
    for i in 0..=n {
        x = start + i as f64 * step;
        if x > stop + 1e-12 {
            break;
        }
        out.push(x);
    }
    let _ = x;
    Ok(out)
}

fn parse_dims(spec: &str) -> Result<Vec<usize>, String> {
    if let Some((a, b)) = spec.split_once("..") {
        let a: usize = a.parse().map_err(|e| format!("dimension range: {e}"))?;
        let b: usize = b.parse().map_err(|e| format!("dimension range: {e}"))?;
        if a < 2 || b < a {
            return Err(format!("dimension range `{spec}` invalid"));
        }
        Ok((a..=b).collect())
    } else {
        let d: usize = spec.parse().map_err(|e| format!("dimension: {e}"))?;
        if d < 2 {
            return Err(format!("d = {d} must be at least 2"));
        }
        Ok(vec![d])
    }
}

fn cmd_analytic(args: AnalyticArgs, config: &Config) -> Result<ExitCode, String> {
    let formula = args
        .formula
        .or_else(|| config.get("formula").cloned())
        .unwrap_or_else(|| "list".into());
    if formula == "list" {
        for (name, desc) in FORMULAS {
            println!("{name:<26} {desc}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    if !FORMULAS.iter().any(|(n, _)| *n == formula) {
        let suggestion = FORMULAS
            .iter()
            .map(|(n, _)| *n)
            .find(|n| n.starts_with(&formula[..formula.len().min(3)]))
            .map(|n| format!(" (did you mean `{n}`?)"))
            .unwrap_or_default();
        eprintln!("unknown formula `{formula}`{suggestion}; available:");
        for (name, _) in FORMULAS {
            eprintln!("  {name}");
        }
        return Ok(ExitCode::from(2));
    }
    let quad = QuadratureConfig::default();
    let d_spec = args.d.or_else(|| config.get("d").cloned());
    let t = args.t.or_else(|| config.get("t").and_then(|v| v.parse().ok()));
    let grid_spec = args.grid.or_else(|| config.get("grid").cloned());

    let mut csv = String::new();
    csv.push_str(&sphere_split::csv_schema_header(&format!("analytic-{formula}")));
    csv.push('\n');
    let err = |m: &str| Err(m.to_string());
    match formula.as_str() {
        "pcf" => {
            let d = parse_dims(&d_spec.unwrap_or_else(|| "2".into()))?;
            if d.len() != 1 {
                return err("pcf needs a single dimension");
            }
            let d = d[0];
            let t = t.ok_or("pcf needs --t")?;
            let grid = parse_grid(&grid_spec.ok_or("pcf needs --grid over r")?)?;
            csv.push_str("r,K_split,g_split,K_poisson,g_poisson\n");
            for r in grid {
                let ks = analytics::k_function_split(d, t, r, &quad).map_err(|e| e.to_string())?;
                let gs = analytics::pcf_split(d, t, r).map_err(|e| e.to_string())?;
                let kp = analytics::k_function_poisson(d, t, r, &quad).map_err(|e| e.to_string())?;
                let gp = analytics::pcf_poisson(d, t, r).map_err(|e| e.to_string())?;
                csv.push_str(&format!("{r},{ks},{gs},{kp},{gp}\n"));
            }
        }
        "var_surface" => {
            let dims = parse_dims(&d_spec.unwrap_or_else(|| "2".into()))?;
            if dims.len() > 1 {
                let t = t.unwrap_or(1.0);
                csv.push_str("d,t,var_surface\n");
                for d in dims {
                    let v =
                        analytics::var_surface_isotropic(d, t, &quad).map_err(|e| e.to_string())?;
                    csv.push_str(&format!("{d},{t},{v}\n"));
                }
            } else {
                let d = dims[0];
                let grid = parse_grid(&grid_spec.ok_or("var_surface needs --grid over t (or --d a..b)")?)?;
                csv.push_str("d,t,var_surface\n");
                for t in grid {
                    let v =
                        analytics::var_surface_isotropic(d, t, &quad).map_err(|e| e.to_string())?;
                    csv.push_str(&format!("{d},{t},{v}\n"));
                }
            }
        }
        "var_sigma0" | "cov_sigma0_sigma1" => {
            let grid = parse_grid(&grid_spec.ok_or("needs --grid over t")?)?;
            csv.push_str(&format!("t,{formula}\n"));
            for t in grid {
                let v = if formula == "var_sigma0" {
                    analytics::var_sigma0_2d(t)
                } else {
                    analytics::cov_sigma0_sigma1_2d(t)
                }
                .map_err(|e| e.to_string())?;
                csv.push_str(&format!("{t},{v}\n"));
            }
        }
        "mean_segment_length" | "n1_split" => {
            let d = parse_dims(&d_spec.unwrap_or_else(|| "2".into()))?[0];
            match (t, grid_spec) {
                (Some(t), None) => {
                    csv.push_str(&format!("d,t,{formula}\n"));
                    let v = if formula == "n1_split" {
                        analytics::n1_split(d, t)
                    } else {
                        analytics::mean_segment_length_split(d, t)
                    }
                    .map_err(|e| e.to_string())?;
                    csv.push_str(&format!("{d},{t},{v}\n"));
                }
                (_, Some(g)) => {
                    csv.push_str(&format!("d,t,{formula}\n"));
                    for t in parse_grid(&g)? {
                        let v = if formula == "n1_split" {
                            analytics::n1_split(d, t)
                        } else {
                            analytics::mean_segment_length_split(d, t)
                        }
                        .map_err(|e| e.to_string())?;
                        csv.push_str(&format!("{d},{t},{v}\n"));
                    }
                }
                _ => return err("needs --t or --grid"),
            }
        }
        "mean_edge_length_poisson" | "n1_poisson" => {
            let d = parse_dims(&d_spec.unwrap_or_else(|| "2".into()))?[0];
            let grid = match (t, grid_spec) {
                (Some(t), None) => vec![t],
                (_, Some(g)) => parse_grid(&g)?,
                _ => return err("needs --t or --grid"),
            };
            csv.push_str(&format!("d,t,{formula}\n"));
            for t in grid {
                let v = if formula == "n1_poisson" {
                    analytics::n1_poisson(d, t).map_err(|e| e.to_string())?
                } else {
                    analytics::mean_edge_length_poisson(t)
                };
                csv.push_str(&format!("{d},{t},{v}\n"));
            }
        }
        "birth_density" => {
            let d = parse_dims(&d_spec.unwrap_or_else(|| "2".into()))?[0];
            let t = t.ok_or("birth_density needs --t")?;
            let grid = match grid_spec {
                Some(g) => parse_grid(&g)?,
                None => (1..200).map(|i| t * i as f64 / 200.0).collect(),
            };
            csv.push_str("s,birth_density\n");
            for s in grid {
                let v = analytics::birth_density(d, t, s).map_err(|e| e.to_string())?;
                csv.push_str(&format!("{s},{v}\n"));
            }
            // footer self-check: the density integrates to one
            let total = sphere_split::quad::integrate(
                |s| analytics::birth_density(d, t, s).unwrap_or(0.0),
                1e-12,
                t,
                &quad,
            )
            .map_err(|e| e.to_string())?;
            csv.push_str(&format!("# integral={}\n", total.value));
        }
        _ => unreachable!("formula validated above"),
    }
    match args.out.or_else(|| config.get("out").map(PathBuf::from)) {
        Some(path) => std::fs::write(&path, csv).map_err(|e| format!("{}: {e}", path.display()))?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs, config: &Config) -> Result<ExitCode, String> {
    if args.list {
        for (id, desc) in verify::list_gates() {
            println!("{id}  {desc}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let scale_str = args
        .scale
        .or_else(|| config.get("scale").cloned())
        .unwrap_or_else(|| "quick".into());
    let scale = Scale::parse(&scale_str).ok_or(format!("unknown scale `{scale_str}`"))?;
    let seed = seed_from(args.seed, config)?;
    setup_jobs(args.jobs, config);
    let cfg = VerifyConfig {
        scale,
        master_seed: seed,
    };
    println!("verification suite: scale={scale_str} seed={seed}");
    let started = std::time::Instant::now();
    let results = verify::run_all(&cfg).map_err(|e| e.to_string())?;
    let mut all_pass = true;
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("[{status}] {}  {}", r.id, r.description);
        println!("       {}", r.detail);
        all_pass &= r.passed;
    }
    println!(
        "{} of {} gates passed in {:.1}s",
        results.iter().filter(|r| r.passed).count(),
        results.len(),
        started.elapsed().as_secs_f64()
    );
    if let Some(dir) = args.out.or_else(|| config.get("out").map(PathBuf::from)) {
        std::fs::create_dir_all(&dir).map_err(|e| format!("{}: {e}", dir.display()))?;
        let manifest: Vec<serde_json::Value> = results
            .iter()
            .map(|r| {
                serde_json::json!({
                    "id": r.id,
                    "description": r.description,
                    "passed": r.passed,
                    "detail": r.detail,
                })
            })
            .collect();
        let report = serde_json::json!({
            "schema": "verify-report",
            "version": env!("CARGO_PKG_VERSION"),
            "scale": scale_str,
            "seed": seed,
            "all_passed": all_pass,
            "gates": manifest,
            "wall_time_ms": started.elapsed().as_millis() as u64,
        });
        std::fs::write(
            dir.join("verify_report.json"),
            serde_json::to_string_pretty(&report).map_err(|e| e.to_string())?,
        )
        .map_err(|e| e.to_string())?;
    }
    Ok(if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}
