mod cache;
mod config;
mod errors;

use cache::{content_hash, Cache, DEFAULT_CACHE_DIR};
use census_core::analysis::{loglog_fit, lower_bound_certificate};
use census_core::cantor::{
    parse_big_rational, rational_to_f64, simplex_box_sweep, threshold_alphas, CantorSpec,
};
use census_core::census::{
    constructive_triangles, count_tetrahedra, count_triangles, total_triangles_in_box,
    triangle_combo_table, TetraCapCombo, TriangleCapCombo,
};
use census_core::geometry::ParaboloidBody;
use census_core::incidence::{
    energy_estimate, incidence_mass, mu_params, tetra_expression, EnergyMethod,
};
use census_core::numbertheory::{
    constructive_an, count_an_brute, count_an_exact, totient_sieve, Lambda,
};
use census_core::records::Method;
use census_core::VERSION;
use clap::{Args, Parser, Subcommand};
use config::{load_config, validate, MethodChoice, SweepConfig, SweepKind};
use errors::{CliError, CliResult};
use num_rational::Ratio;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const THREADS_ENV: &str = "SIMPLEX_CENSUS_THREADS";

/// Exact unit-simplex censuses, incidence-measure estimates and
/// Cantor-product masses over the paraboloid-norm lattice construction.
#[derive(Parser)]
#[command(name = "simplex-census", version, disable_help_subcommand = true)]
struct Cli {
    /// Directory for cached run records
    #[arg(long, global = true, default_value = DEFAULT_CACHE_DIR)]
    cache_dir: PathBuf,
    /// Bypass the run-record cache
    #[arg(long, global = true)]
    no_cache: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Paraboloid gauge norm
    Norm {
        #[command(subcommand)]
        cmd: NormCmd,
    },
    /// Count box solutions of n = xi + yj
    An {
        /// Target value
        #[arg(long)]
        n: u64,
        /// Scale factor, decimal or fraction (e.g. 1.05 or 21/20)
        #[arg(long)]
        lambda: String,
        /// exact, brute or constructive
        #[arg(long, default_value = "exact")]
        method: String,
    },
    /// Totient summatory value Φ(m)
    TotientSum {
        /// Summatory bound
        #[arg(long)]
        m: usize,
    },
    /// Anchored unit-triangle census
    Triangles {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Lattice scale
        #[arg(long)]
        n: u32,
        /// brute, fast or constructive
        #[arg(long, default_value = "fast")]
        method: String,
        /// Count every cap assignment, not just the default one
        #[arg(long)]
        all_combos: bool,
    },
    /// Anchored unit-tetrahedron census
    Tetrahedra {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Lattice scale
        #[arg(long)]
        n: u32,
        /// brute or fast
        #[arg(long, default_value = "fast")]
        method: String,
        /// Cap of the x−y edge: upper (default) or lower (mirrored system)
        #[arg(long, default_value = "upper")]
        xy_cap: String,
    },
    /// CSV census sweep over a list of scales
    Sweep(SweepArgs),
    /// CSV incidence-mass sweep: n, epsilon, mass, mass_over_eps3
    Incidence {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Measure exponent in [d/2, (d+1)/2]
        #[arg(long)]
        s: f64,
        /// Comma-separated even lattice scales
        #[arg(long, value_delimiter = ',')]
        n_list: Vec<u32>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Energy integral estimate of the lattice-cube measure
    Energy {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Kernel exponent in [d/2, d)
        #[arg(long)]
        s: f64,
        /// Lattice scale (even)
        #[arg(long)]
        n: u32,
        /// conv (difference convolution) or mc (Monte Carlo)
        #[arg(long, default_value = "conv")]
        method: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Exponent algebra of the closing tetrahedra expression
    TetraExpression {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Measure exponent
        #[arg(long)]
        s: f64,
    },
    /// Cantor set masses
    Cantor {
        #[command(subcommand)]
        cmd: CantorCmd,
    },
    /// Threshold dimension vector and its exact identities
    Thresholds {
        /// Simplex order (nodes beyond the base point)
        #[arg(long)]
        k: usize,
        /// Ambient dimension, k ≤ d ≤ 2k+1
        #[arg(long)]
        d: usize,
    },
    /// Log–log fit (and optional lower-bound certificate) over a CSV column pair
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Column name of the abscissa
        #[arg(long)]
        x: String,
        /// Column name of the ordinate
        #[arg(long)]
        y: String,
        #[arg(long, requires = "threshold")]
        exponent: Option<f64>,
        #[arg(long, requires = "exponent")]
        threshold: Option<f64>,
    },
}

#[derive(Subcommand)]
enum NormCmd {
    /// Print the norm of a vector, 15 significant digits
    Eval {
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Comma-separated coordinates, length d
        #[arg(long, value_delimiter = ',')]
        vector: Vec<f64>,
    },
}

#[derive(Subcommand)]
enum CantorCmd {
    /// Depth-m mass of an interval
    Mass {
        /// Dimension in [0, 1], decimal or fraction; needs 1/alpha integral
        #[arg(long, conflicts_with = "ratio")]
        alpha: Option<String>,
        /// Branch ratio in (0, 1/2], for sets whose ratio is not 2^(-1/alpha)
        #[arg(long)]
        ratio: Option<String>,
        /// Recursion depth of the measure approximant
        #[arg(long)]
        depth: u32,
        /// Interval as u,v (rationals or decimals)
        #[arg(long)]
        interval: String,
    },
    /// CSV sweep of combined node-box masses: eps, mass, predicted
    Simplex {
        /// Number of fattened nodes
        #[arg(long)]
        k: usize,
        /// Ambient dimension
        #[arg(long)]
        d: usize,
        /// Dyadic exponents, e.g. 4..12 or 4,6,8
        #[arg(long)]
        eps_exps: String,
        /// Recursion depth, at least the largest exponent + 1
        #[arg(long)]
        depth: u32,
        /// Per-axis dimensions (defaults to the threshold assignment)
        #[arg(long)]
        alphas: Option<String>,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key = value config file (conflicts with the explicit flags)
    #[arg(long, conflicts_with_all = ["kind", "d", "n_list"])]
    config: Option<PathBuf>,
    /// triangles or tetrahedra
    #[arg(long)]
    kind: Option<String>,
    /// Ambient dimension
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated lattice scales
    #[arg(long, value_delimiter = ',')]
    n_list: Option<Vec<u32>>,
    /// brute, fast or constructive
    #[arg(long, default_value = "fast")]
    method: String,
    /// Write the CSV here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let cache = Cache::new(&cli.cache_dir, !cli.no_cache);
    match dispatch(cli.command, &cache) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {}", e.message);
            std::process::exit(e.code);
        }
    }
}

fn ensure_worker_pool(config_workers: Option<usize>) -> CliResult<()> {
    let from_env = std::env::var(THREADS_ENV)
        .ok()
        .map(|v| {
            v.parse::<usize>().map_err(|_| {
                CliError::usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}"))
            })
        })
        .transpose()?;
    if let Some(0) = from_env {
        return Err(CliError::usage(format!("{THREADS_ENV} must be ≥ 1")));
    }
    if let Some(threads) = from_env.or(config_workers) {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

fn count_value(count: u128) -> Value {
    match u64::try_from(count) {
        Ok(v) => Value::from(v),
        Err(_) => Value::String(count.to_string()),
    }
}

/// Run (or replay) a cached operation and return its record line plus the
/// parsed record.
fn cached_record<F>(
    cache: &Cache,
    op: &str,
    params: BTreeMap<String, Value>,
    compute: F,
) -> CliResult<(String, Value)>
where
    F: FnOnce() -> CliResult<(Value, Option<u128>, Option<String>, f64)>,
{
    let hash = content_hash(op, &params, VERSION);
    if let Some(line) = cache.get(&hash) {
        let record: Value = serde_json::from_str(&line)
            .map_err(|e| CliError::precondition(format!("corrupt cache record {hash}: {e}")))?;
        return Ok((line, record));
    }
    let (result, count, method, elapsed_ms) = compute()?;
    let mut record = serde_json::Map::new();
    record.insert("op".into(), Value::String(op.into()));
    record.insert("params".into(), json!(params));
    if let Some(c) = count {
        record.insert("count".into(), count_value(c));
    }
    record.insert("result".into(), result);
    if let Some(m) = method {
        record.insert("method".into(), Value::String(m));
    }
    record.insert("elapsed_ms".into(), json!(elapsed_ms));
    record.insert("version".into(), Value::String(VERSION.into()));
    record.insert("hash".into(), Value::String(hash.clone()));
    let record = Value::Object(record);
    let line = serde_json::to_string(&record).map_err(|e| CliError {
        code: 1,
        message: e.to_string(),
    })?;
    cache.put(&hash, &line);
    Ok((line, record))
}

fn print_line(line: &str) {
    println!("{line}");
}

fn write_output(path: &Option<PathBuf>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(p)?;
            f.write_all(content.as_bytes())?;
            Ok(())
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// The count record of a default-assignment triangle census, shared by the
/// `triangles`, `sweep` and `incidence` commands so they hit the same cache
/// entries.
fn triangles_count_record(
    cache: &Cache,
    d: usize,
    n: u32,
    method: MethodChoice,
) -> CliResult<(String, Value)> {
    let params: BTreeMap<String, Value> = [
        ("combo".to_string(), json!(TriangleCapCombo::DEFAULT.label())),
        ("d".to_string(), json!(d)),
        ("n".to_string(), json!(n)),
        ("method".to_string(), json!(method.label())),
    ]
    .into_iter()
    .collect();
    let core_method = match method {
        MethodChoice::Brute => Method::Brute,
        _ => Method::Fast,
    };
    cached_record(cache, "triangles", params, move || {
        let started = Instant::now();
        let rec = count_triangles(n, d, TriangleCapCombo::DEFAULT, core_method)?;
        let total = total_triangles_in_box(n, d, rec.count)?;
        Ok((
            json!({
                "count": count_value(rec.count),
                "total_in_unit_box": count_value(total),
            }),
            Some(rec.count),
            Some(method.label().into()),
            started.elapsed().as_secs_f64() * 1e3,
        ))
    })
}

fn record_count(record: &Value) -> CliResult<u128> {
    let v = record
        .get("count")
        .ok_or_else(|| CliError::precondition("cached record lacks a count"))?;
    match v {
        Value::Number(n) => n
            .as_u64()
            .map(u128::from)
            .ok_or_else(|| CliError::precondition("cached count is not a nonnegative integer")),
        Value::String(s) => s
            .parse::<u128>()
            .map_err(|_| CliError::precondition("cached count does not parse")),
        _ => Err(CliError::precondition("cached count has a bad type")),
    }
}

/// (count as printed, elapsed_ms) of a record, for CSV rows.
fn record_csv_fields(record: &Value) -> CliResult<(String, f64)> {
    let count = record
        .get("count")
        .map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
        .ok_or_else(|| CliError::precondition("cached record lacks a count"))?;
    let elapsed = record
        .get("elapsed_ms")
        .and_then(Value::as_f64)
        .unwrap_or(0.0);
    Ok((count, elapsed))
}

/// Constructive triangle record, shared by `triangles --method constructive`
/// and constructive sweeps.
fn constructive_triangles_record(cache: &Cache, d: usize, n: u32) -> CliResult<(String, Value)> {
    let params: BTreeMap<String, Value> = [
        ("d".to_string(), json!(d)),
        ("n".to_string(), json!(n)),
        ("method".to_string(), json!("constructive")),
    ]
    .into_iter()
    .collect();
    cached_record(cache, "triangles", params, move || {
        let started = Instant::now();
        let report = constructive_triangles(n, d)?;
        let count = report.record.count;
        Ok((
            serde_json::to_value(&report).map_err(|e| CliError {
                code: 1,
                message: e.to_string(),
            })?,
            Some(count),
            Some("constructive".into()),
            started.elapsed().as_secs_f64() * 1e3,
        ))
    })
}

/// Tetrahedron count record, shared by `tetrahedra` and tetrahedra sweeps.
fn tetra_count_record(
    cache: &Cache,
    d: usize,
    n: u32,
    combo: TetraCapCombo,
    method: MethodChoice,
) -> CliResult<(String, Value)> {
    let params: BTreeMap<String, Value> = [
        ("combo".to_string(), json!(combo.label())),
        ("d".to_string(), json!(d)),
        ("n".to_string(), json!(n)),
        ("method".to_string(), json!(method.label())),
    ]
    .into_iter()
    .collect();
    let core_method = match method {
        MethodChoice::Brute => Method::Brute,
        _ => Method::Fast,
    };
    cached_record(cache, "tetrahedra", params, move || {
        let started = Instant::now();
        let rec = count_tetrahedra(n, d, combo, core_method)?;
        Ok((
            json!({ "count": count_value(rec.count) }),
            Some(rec.count),
            Some(method.label().into()),
            started.elapsed().as_secs_f64() * 1e3,
        ))
    })
}

/// Decimal with 15 significant digits, never scientific.
fn sig15(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (14 - exp).clamp(0, 60) as usize;
    format!("{x:.decimals$}")
}

fn parse_ratio64(s: &str) -> CliResult<Ratio<i64>> {
    let s = s.trim();
    let bad = || CliError::usage(format!("cannot parse rational {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let num: i64 = p.trim().parse().map_err(|_| bad())?;
        let den: i64 = q.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(num, den));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let scale = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let fnum: i64 = frac.parse().map_err(|_| bad())?;
        return Ok(Ratio::new(int * scale + fnum, scale));
    }
    let int: i64 = s.parse().map_err(|_| bad())?;
    Ok(Ratio::new(int, 1))
}

fn dispatch(command: Command, cache: &Cache) -> CliResult<()> {
    match command {
        Command::Norm { cmd } => {
            let NormCmd::Eval { d, vector } = cmd;
            let body = ParaboloidBody::new(d)?;
            let norm = body.norm(&vector)?;
            println!("{}", sig15(norm));
            Ok(())
        }

        Command::An { n, lambda, method } => {
            ensure_worker_pool(None)?;
            let lambda = Lambda::parse(&lambda)?;
            let params: BTreeMap<String, Value> = [
                ("n".to_string(), json!(n)),
                ("lambda".to_string(), json!(format!("{}/{}", lambda.num, lambda.den))),
                ("method".to_string(), json!(method.clone())),
            ]
            .into_iter()
            .collect();
            let (line, _) = match method.as_str() {
                "exact" | "brute" => {
                    let is_brute = method == "brute";
                    cached_record(cache, "an", params, move || {
                        let started = Instant::now();
                        let rec = if is_brute {
                            count_an_brute(n, &lambda)?
                        } else {
                            count_an_exact(n, &lambda)?
                        };
                        Ok((
                            json!({ "count": count_value(rec.count) }),
                            Some(rec.count),
                            Some(if is_brute { "brute" } else { "fast" }.into()),
                            started.elapsed().as_secs_f64() * 1e3,
                        ))
                    })?
                }
                "constructive" => cached_record(cache, "an", params, move || {
                    let started = Instant::now();
                    let cert = constructive_an(n, &lambda, false)?;
                    Ok((
                        serde_json::to_value(&cert).map_err(|e| CliError {
                            code: 1,
                            message: e.to_string(),
                        })?,
                        Some(cert.coprime_pairs),
                        Some("constructive".into()),
                        started.elapsed().as_secs_f64() * 1e3,
                    ))
                })?,
                other => {
                    return Err(CliError::usage(format!(
                        "an method must be exact, brute or constructive, got {other:?}"
                    )))
                }
            };
            print_line(&line);
            Ok(())
        }

        Command::TotientSum { m } => {
            let params: BTreeMap<String, Value> = [("m".to_string(), json!(m))].into_iter().collect();
            let (line, _) = cached_record(cache, "totient-sum", params, move || {
                let started = Instant::now();
                let table = totient_sieve(m)?;
                let phi_sum = table.summatory(m);
                Ok((
                    json!({ "count": phi_sum, "phi_m": table.phi(m) }),
                    Some(phi_sum as u128),
                    Some("fast".into()),
                    started.elapsed().as_secs_f64() * 1e3,
                ))
            })?;
            print_line(&line);
            Ok(())
        }

        Command::Triangles {
            d,
            n,
            method,
            all_combos,
        } => {
            ensure_worker_pool(None)?;
            let method_choice = MethodChoice::parse(&method)?;
            if method_choice == MethodChoice::Constructive {
                let (line, _) = constructive_triangles_record(cache, d, n)?;
                print_line(&line);
                return Ok(());
            }
            let core_method = match method_choice {
                MethodChoice::Brute => Method::Brute,
                _ => Method::Fast,
            };
            if all_combos {
                let params: BTreeMap<String, Value> = [
                    ("d".to_string(), json!(d)),
                    ("n".to_string(), json!(n)),
                    ("method".to_string(), json!(method_choice.label())),
                ]
                .into_iter()
                .collect();
                let (line, _) = cached_record(cache, "triangles-all-combos", params, move || {
                    let started = Instant::now();
                    let (rows, total) = triangle_combo_table(n, d, core_method)?;
                    let combos: Vec<Value> = rows
                        .iter()
                        .map(|(combo, rec)| {
                            json!({ "combo": combo.label(), "count": count_value(rec.count) })
                        })
                        .collect();
                    Ok((
                        json!({ "combos": combos, "total": count_value(total) }),
                        Some(total),
                        Some(method_choice.label().into()),
                        started.elapsed().as_secs_f64() * 1e3,
                    ))
                })?;
                print_line(&line);
                return Ok(());
            }
            let (line, _) = triangles_count_record(cache, d, n, method_choice)?;
            print_line(&line);
            Ok(())
        }

        Command::Tetrahedra { d, n, method, xy_cap } => {
            ensure_worker_pool(None)?;
            let method_choice = MethodChoice::parse(&method)?;
            if method_choice == MethodChoice::Constructive {
                return Err(CliError::precondition(
                    "constructive counting exists only for triangles",
                ));
            }
            let combo = match xy_cap.as_str() {
                "upper" => TetraCapCombo::DEFAULT,
                "lower" => TetraCapCombo::MIRRORED,
                other => {
                    return Err(CliError::usage(format!(
                        "xy-cap must be upper or lower, got {other:?}"
                    )))
                }
            };
            let (line, _) = tetra_count_record(cache, d, n, combo, method_choice)?;
            print_line(&line);
            Ok(())
        }

        Command::Sweep(args) => run_sweep(args, cache),

        Command::Incidence { d, s, n_list, output } => {
            ensure_worker_pool(None)?;
            if n_list.is_empty() {
                return Err(CliError::precondition("n-list must be nonempty"));
            }
            // rows reuse the cached census records that `triangles` and
            // `sweep` write, so repeated sweeps cost one census each
            let mut csv = String::from("n,epsilon,mass,mass_over_eps3\n");
            for &n in &n_list {
                let params = mu_params(d, s, n)?;
                let (_, record) = triangles_count_record(cache, d, n, MethodChoice::Fast)?;
                let anchored = record_count(&record)?;
                let mass = incidence_mass(&params, anchored)?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    n,
                    params.epsilon,
                    mass,
                    mass / params.epsilon.powi(3)
                ));
            }
            write_output(&output, &csv)
        }

        Command::Energy {
            d,
            s,
            n,
            method,
            seed,
            samples,
        } => {
            ensure_worker_pool(None)?;
            let energy_method = match method.as_str() {
                "conv" => EnergyMethod::DifferenceConvolution,
                "mc" => EnergyMethod::MonteCarlo,
                other => {
                    return Err(CliError::usage(format!(
                        "energy method must be conv or mc, got {other:?}"
                    )))
                }
            };
            let mut params: BTreeMap<String, Value> = [
                ("d".to_string(), json!(d)),
                ("method".to_string(), json!(method.clone())),
                ("n".to_string(), json!(n)),
                ("s".to_string(), json!(s)),
            ]
            .into_iter()
            .collect();
            if energy_method == EnergyMethod::MonteCarlo {
                params.insert("seed".into(), json!(seed));
                params.insert("samples".into(), json!(samples));
            }
            let (line, _) = cached_record(cache, "energy", params, move || {
                let started = Instant::now();
                let measure = mu_params(d, s, n)?;
                let estimate = energy_estimate(&measure, s, energy_method, samples, seed)?;
                Ok((
                    serde_json::to_value(estimate).map_err(|e| CliError {
                        code: 1,
                        message: e.to_string(),
                    })?,
                    None,
                    Some(method.clone()),
                    started.elapsed().as_secs_f64() * 1e3,
                ))
            })?;
            print_line(&line);
            Ok(())
        }

        Command::TetraExpression { d, s } => {
            let report = tetra_expression(d, s)?;
            let line = serde_json::to_string(&json!({
                "op": "tetra-expression",
                "params": { "d": d, "s": s },
                "result": report,
                "version": VERSION,
            }))
            .map_err(|e| CliError {
                code: 1,
                message: e.to_string(),
            })?;
            print_line(&line);
            Ok(())
        }

        Command::Cantor { cmd } => run_cantor(cmd, cache),

        Command::Thresholds { k, d } => {
            let th = threshold_alphas(k, d)?;
            let alphas: Vec<String> = th.alphas.iter().map(|a| a.to_string()).collect();
            let line = serde_json::to_string(&json!({
                "op": "thresholds",
                "params": { "d": d, "k": k },
                "result": {
                    "alphas": alphas,
                    "dim_sum": th.dim_sum.to_string(),
                    "dim_sum_matches": th.dim_sum_matches,
                    "box_exponent": th.box_exponent.to_string(),
                    "box_exponent_matches": th.box_exponent_matches,
                    "degenerate": th.degenerate,
                },
                "version": VERSION,
            }))
            .map_err(|e| CliError {
                code: 1,
                message: e.to_string(),
            })?;
            print_line(&line);
            Ok(())
        }

        Command::Fit {
            input,
            x,
            y,
            exponent,
            threshold,
        } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::usage(format!("cannot read {}: {e}", input.display())))?;
            let mut lines = text.lines();
            let header = lines
                .next()
                .ok_or_else(|| CliError::usage("fit input is empty"))?;
            let cols: Vec<&str> = header.split(',').map(str::trim).collect();
            let xi = cols
                .iter()
                .position(|&c| c == x)
                .ok_or_else(|| CliError::usage(format!("no column named {x:?} in {header:?}")))?;
            let yi = cols
                .iter()
                .position(|&c| c == y)
                .ok_or_else(|| CliError::usage(format!("no column named {y:?} in {header:?}")))?;
            let mut points = Vec::new();
            for (lineno, row) in lines.enumerate() {
                if row.trim().is_empty() {
                    continue;
                }
                let fields: Vec<&str> = row.split(',').map(str::trim).collect();
                let parse = |idx: usize| -> CliResult<f64> {
                    fields
                        .get(idx)
                        .and_then(|f| f.parse::<f64>().ok())
                        .ok_or_else(|| {
                            CliError::usage(format!("bad numeric field at data line {}", lineno + 1))
                        })
                };
                points.push((parse(xi)?, parse(yi)?));
            }
            let fit = loglog_fit(&points)?;
            let mut result = json!({ "fit": fit });
            if let (Some(e), Some(t)) = (exponent, threshold) {
                let cert = lower_bound_certificate(&points, e, t)?;
                result["certificate"] = serde_json::to_value(cert).map_err(|err| CliError {
                    code: 1,
                    message: err.to_string(),
                })?;
            }
            let line = serde_json::to_string(&json!({
                "op": "fit",
                "params": { "input": input.display().to_string(), "x": x, "y": y },
                "result": result,
                "version": VERSION,
            }))
            .map_err(|e| CliError {
                code: 1,
                message: e.to_string(),
            })?;
            print_line(&line);
            Ok(())
        }
    }
}

fn run_sweep(args: SweepArgs, cache: &Cache) -> CliResult<()> {
    let config = match args.config {
        Some(path) => load_config(&path)?,
        None => {
            let kind = args
                .kind
                .as_deref()
                .ok_or_else(|| CliError::usage("sweep needs --kind (or --config)"))?;
            let d = args
                .d
                .ok_or_else(|| CliError::usage("sweep needs --d (or --config)"))?;
            let n_list = args
                .n_list
                .ok_or_else(|| CliError::usage("sweep needs --n-list (or --config)"))?;
            let config = SweepConfig {
                kind: SweepKind::parse(kind)?,
                d,
                n_list,
                method: MethodChoice::parse(&args.method)?,
                output: args.output.clone(),
                workers: None,
            };
            validate(&config)?;
            config
        }
    };
    ensure_worker_pool(config.workers)?;

    // rows come out in parameter order regardless of how the inner
    // enumerations are scheduled
    let mut csv = String::from("n,count,method,elapsed_ms\n");
    for &n in &config.n_list {
        let (count, elapsed_ms) = sweep_row(&config, n, cache)?;
        csv.push_str(&format!(
            "{n},{count},{},{elapsed_ms}\n",
            config.method.label()
        ));
    }
    let output = args.output.or(config.output);
    write_output(&output, &csv)
}

fn sweep_row(config: &SweepConfig, n: u32, cache: &Cache) -> CliResult<(String, f64)> {
    let d = config.d;
    let (_, record) = match (config.kind, config.method) {
        (SweepKind::Triangles, MethodChoice::Constructive) => {
            constructive_triangles_record(cache, d, n)?
        }
        (SweepKind::Triangles, method) => triangles_count_record(cache, d, n, method)?,
        (SweepKind::Tetrahedra, method) => {
            tetra_count_record(cache, d, n, TetraCapCombo::DEFAULT, method)?
        }
    };
    record_csv_fields(&record)
}

fn run_cantor(cmd: CantorCmd, cache: &Cache) -> CliResult<()> {
    match cmd {
        CantorCmd::Mass {
            alpha,
            ratio,
            depth,
            interval,
        } => {
            let (lo_s, hi_s) = interval
                .split_once(',')
                .ok_or_else(|| CliError::usage("interval must be u,v"))?;
            let lo = parse_big_rational(lo_s)?;
            let hi = parse_big_rational(hi_s)?;
            let (spec, param_str) = match (&alpha, &ratio) {
                (Some(a), None) => (
                    CantorSpec::from_alpha(parse_ratio64(a)?, depth)?,
                    format!("alpha={}", parse_ratio64(a)?),
                ),
                (None, Some(r)) => (
                    CantorSpec::from_ratio(parse_big_rational(r)?, depth)?,
                    format!("ratio={}", parse_big_rational(r)?),
                ),
                _ => return Err(CliError::usage("cantor mass needs exactly one of --alpha, --ratio")),
            };
            let params: BTreeMap<String, Value> = [
                ("depth".to_string(), json!(depth)),
                ("interval".to_string(), json!(interval)),
                ("set".to_string(), json!(param_str)),
            ]
            .into_iter()
            .collect();
            let (line, _) = cached_record(cache, "cantor-mass", params, move || {
                let started = Instant::now();
                let mass = spec.interval_mass(&lo, &hi)?;
                Ok((
                    json!({
                        "mass": mass.to_string(),
                        "mass_f64": rational_to_f64(&mass),
                        "error_bound": rational_to_f64(&spec.error_bound()),
                        "alpha": spec.alpha,
                    }),
                    None,
                    None,
                    started.elapsed().as_secs_f64() * 1e3,
                ))
            })?;
            print_line(&line);
            Ok(())
        }

        CantorCmd::Simplex {
            k,
            d,
            eps_exps,
            depth,
            alphas,
            output,
        } => {
            let alphas: Vec<Ratio<i64>> = match alphas {
                Some(list) => list
                    .split(',')
                    .map(parse_ratio64)
                    .collect::<CliResult<Vec<_>>>()?,
                None => threshold_alphas(k, d)?.alphas,
            };
            let mut exps = parse_exponent_list(&eps_exps)?;
            if k < d {
                let before = exps.len();
                exps.retain(|t| t % 2 == 0);
                if exps.len() < before {
                    eprintln!(
                        "note: skipped {} odd exponent(s): √ε box sides need even dyadic exponents",
                        before - exps.len()
                    );
                }
            }
            if exps.is_empty() {
                return Err(CliError::precondition("no usable dyadic exponents"));
            }
            let reports = simplex_box_sweep(k, d, &alphas, &exps, depth)?;
            let mut csv = String::from("eps,mass,predicted\n");
            for r in reports {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    r.epsilon, r.mass_f64, r.predicted_mass_f64
                ));
            }
            write_output(&output, &csv)
        }
    }
}

fn parse_exponent_list(s: &str) -> CliResult<Vec<u32>> {
    let s = s.trim();
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: u32 = lo
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad exponent range {s:?}")))?;
        let hi: u32 = hi
            .trim()
            .parse()
            .map_err(|_| CliError::usage(format!("bad exponent range {s:?}")))?;
        if lo > hi {
            return Err(CliError::usage(format!("empty exponent range {s:?}")));
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| CliError::usage(format!("bad exponent {t:?}")))
        })
        .collect()
}
