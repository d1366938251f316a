//! Command-line front end. Every command prints one JSON document (or CSV
//! for tabular commands) and maps library errors to exit codes.

pub mod mapfile;
pub mod output;

use crate::bottcher::{derived_coordinates, phi_n_extended, relative_log_residual, PhiContext};
use crate::classify::{classify_map, WeightPlan};
use crate::error::{Error, Result};
use crate::exact::{fmt_q, parse_q, qi};
use crate::infinity::{
    afo_region, classify_infinity, classify_weighted, empirical_basin, lambda_geometric, preimage_region,
    t_map,
};
use crate::newton::newton_polygon;
use crate::poly::{parse_complex, LogPoint, SkewProduct};
use crate::precision::Precision;
use crate::region::{estimate_r, verify_bounds, verify_contraction, verify_invariance, RegionSpec};
use crate::transforms::{
    default_pipeline, intermediate_case_check, pushforward, MonomialSubstitution,
};
use clap::{Args, Parser, Subcommand};
use mapfile::{parse_map, MapSource};
use num_complex::Complex64;
use output::{fmt_f64, to_csv, to_json_string};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "skewfold", version, about = "Polynomial skew products near infinity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args, Debug, Clone)]
struct ConfigArgs {
    /// Remainder bound for the invariant region.
    #[arg(long, global = true, default_value_t = 0.01)]
    eps: f64,
    /// Use this R instead of estimating one from eps.
    #[arg(long = "radius", short = 'R', global = true)]
    radius: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 200)]
    max_iter: usize,
    #[arg(long, global = true, default_value_t = 10_000)]
    samples: usize,
    /// Falls back to SKEWFOLD_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value = "double")]
    precision: Precision,
    /// Required when δ sits on an intercept and two plans exist.
    #[arg(long, global = true)]
    plan_index: Option<usize>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// CSV instead of JSON (bottcher and grid only).
    #[arg(long, global = true)]
    csv: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Newton polygon, case, weights and degree gate.
    Analyze { map: PathBuf },
    /// Remainder bounds, invariance, and contraction when d = 1.
    Verify {
        map: PathBuf,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
    /// Evaluate φ at points of U.
    Bottcher {
        map: PathBuf,
        /// A point `z,w`, e.g. `10,(100+1i)`. Repeatable.
        #[arg(long = "point")]
        points: Vec<String>,
        /// Number of random points of U when no --point is given.
        #[arg(long, default_value_t = 10)]
        random: usize,
        /// Also evaluate χ-derived coordinates.
        #[arg(long)]
        derived: bool,
    },
    /// Blow-up / covering normal form.
    Transform {
        map: PathBuf,
        /// blowup1, blowup2, cover1 or cover2; default pipeline when absent.
        #[arg(long)]
        kind: Option<String>,
        #[arg(long)]
        l: Option<String>,
        #[arg(long)]
        r: Option<i128>,
        #[arg(long)]
        s: Option<i128>,
    },
    /// Behaviour at infinity on ℙ² or ℙ(r,s,1).
    Infinity {
        map: PathBuf,
        #[arg(long, num_args = 2, value_names = ["R", "S"])]
        weighted: Option<Vec<i128>>,
        /// Also follow this many orbits of U.
        #[arg(long)]
        empirical: Option<usize>,
    },
    /// Closed form of A_{f₀} and the preimages f₀^{-n}(U).
    Afo {
        map: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: u32,
    },
    /// φ on a regular grid of U in log coordinates.
    Grid {
        map: PathBuf,
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Width of the grid in log coordinates past the boundary.
        #[arg(long, default_value_t = 4.0)]
        width: f64,
    },
}

/// Resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub eps: f64,
    pub radius: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
    pub samples: usize,
    pub seed: u64,
    pub precision: Precision,
    pub plan_index: Option<usize>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn from_args(a: &ConfigArgs) -> Result<Self> {
        if !(a.eps > 0.0 && a.eps < 1.0) {
            return Err(Error::InvalidInput(format!("eps = {} must lie in (0, 1)", a.eps)));
        }
        if !(a.tol > 0.0) {
            return Err(Error::InvalidInput(format!("tol = {} must be positive", a.tol)));
        }
        if let Some(r) = a.radius {
            if !(r > 1.0 && r.is_finite()) {
                return Err(Error::InvalidInput(format!("R = {r} must be > 1")));
            }
        }
        let seed = match a.seed {
            Some(s) => s,
            None => match std::env::var("SKEWFOLD_SEED") {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("SKEWFOLD_SEED = {s:?} is not a u64")))?,
                Err(_) => 0,
            },
        };
        Ok(RunConfig {
            eps: a.eps,
            radius: a.radius,
            tol: a.tol,
            max_iter: a.max_iter,
            samples: a.samples,
            seed,
            precision: a.precision,
            plan_index: a.plan_index,
            threads: a.threads,
        })
    }

    fn to_json(&self) -> Value {
        json!({
            "eps": self.eps, "R": self.radius, "tol": self.tol, "max_iter": self.max_iter,
            "samples": self.samples, "seed": self.seed,
            "precision": match self.precision { Precision::Double => "double", Precision::Extended => "extended" },
            "plan_index": self.plan_index,
        })
    }

    fn region(&self, f: &SkewProduct, plan: &WeightPlan) -> Result<RegionSpec> {
        match self.radius {
            Some(r) => Ok(RegionSpec::for_plan(plan, r)),
            None => estimate_r(f, plan, self.eps),
        }
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            b = b.num_threads(t.max(1));
        }
        b.build().map_err(|e| Error::InvalidInput(format!("thread pool: {e}")))
    }
}

/// Output of one command: the document plus the exit code it implies.
struct Report {
    body: String,
    code: i32,
}

impl Report {
    fn json(v: Value, code: i32) -> Self {
        Report {
            body: to_json_string(&v) + "\n",
            code,
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(r) => {
            let _ = out.write_all(r.body.as_bytes());
            r.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn load(path: &PathBuf) -> Result<(SkewProduct, MapSource)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse_map(&text)
}

fn plan_summary(p: &WeightPlan) -> String {
    format!("case {} with dominant z^{}w^{}", p.case.number(), fmt_q(&p.gamma), fmt_q(&p.d))
}

fn degree_error(p: &WeightPlan) -> Error {
    let reason = p.degree_reason.clone().unwrap_or_default();
    if p.d == qi(1) {
        Error::Hypothesis(format!("hypothesis δ ≠ T_k for any k fails: {reason}"))
    } else {
        Error::Hypothesis(reason)
    }
}

/// Picks the plan to work with; `gated` also enforces the degree condition.
fn select_plan(f: &SkewProduct, cfg: &RunConfig, gated: bool) -> Result<WeightPlan> {
    let mut plans = classify_map(f)?;
    if gated && plans.iter().all(|p| !p.degree_ok) {
        return Err(degree_error(&plans[0]));
    }
    let plan = match (plans.len(), cfg.plan_index) {
        (1, None | Some(0)) => plans.remove(0),
        (n, Some(i)) if i < n => plans.remove(i),
        (_, Some(i)) => return Err(Error::InvalidInput(format!("--plan-index {i} out of range"))),
        (_, None) => {
            let list: Vec<String> = plans.iter().enumerate().map(|(i, p)| format!("[{i}] {}", plan_summary(p))).collect();
            return Err(Error::BranchAmbiguity(format!(
                "delta lies on an intercept and two disjoint regions exist; pass --plan-index: {}",
                list.join("; ")
            )));
        }
    };
    if gated && !plan.degree_ok {
        return Err(degree_error(&plan));
    }
    Ok(plan)
}

fn envelope(command: &str, src: &MapSource, cfg: &RunConfig) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("map".into(), json!({"p": src.p, "q": src.q}));
    m.insert("config".into(), cfg.to_json());
    m
}

fn execute(cli: &Cli) -> Result<Report> {
    let cfg = RunConfig::from_args(&cli.config)?;
    let tabular = matches!(cli.command, Command::Bottcher { .. } | Command::Grid { .. });
    if cli.config.csv && !tabular {
        return Err(Error::Misuse("--csv is only available for bottcher and grid".into()));
    }
    match &cli.command {
        Command::Analyze { map } => analyze(map, &cfg),
        Command::Verify { map, steps } => verify(map, &cfg, *steps),
        Command::Bottcher { map, points, random, derived } => {
            bottcher(map, &cfg, points, *random, *derived, cli.config.csv)
        }
        Command::Transform { map, kind, l, r, s } => transform(map, &cfg, kind.as_deref(), l.as_deref(), *r, *s),
        Command::Infinity { map, weighted, empirical } => infinity(map, &cfg, weighted.as_deref(), *empirical),
        Command::Afo { map, depth } => afo(map, &cfg, *depth),
        Command::Grid { map, n, width } => grid(map, &cfg, *n, *width, cli.config.csv),
    }
}

fn analyze(map: &PathBuf, cfg: &RunConfig) -> Result<Report> {
    let (f, src) = load(map)?;
    let poly = newton_polygon(f.q())?;
    let plans = classify_map(&f)?;
    let mut m = envelope("analyze", &src, cfg);
    m.insert("delta".into(), json!(f.delta()));
    m.insert("deg_q".into(), json!(f.deg_q()));
    m.insert("polygon".into(), poly.to_json());
    m.insert("two_plans".into(), json!(plans.len() > 1));
    m.insert("plans".into(), Value::Array(plans.iter().map(|p| p.to_json()).collect()));
    Ok(Report::json(Value::Object(m), 0))
}

fn verify(map: &PathBuf, cfg: &RunConfig, steps: usize) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, true)?;
    let spec = cfg.region(&f, &plan)?;
    let bounds = verify_bounds(&f, &plan, &spec, cfg.eps, cfg.samples, cfg.seed)?;
    let inv = verify_invariance(&f, &plan, &spec, cfg.samples, cfg.seed)?;
    let mut pass = bounds.pass && inv.pass();
    let mut m = envelope("verify", &src, cfg);
    m.insert("plan".into(), plan.to_json());
    m.insert("region".into(), spec.to_json());
    m.insert("bounds".into(), bounds.to_json());
    m.insert("invariance".into(), inv.to_json());
    if plan.d == qi(1) {
        let c = verify_contraction(&f, &plan, &spec, steps, cfg.samples.min(1000), cfg.seed)?;
        pass &= c.pass();
        m.insert("contraction".into(), c.to_json());
    } else {
        m.insert("contraction".into(), Value::Null);
    }
    m.insert("pass".into(), json!(pass));
    Ok(Report::json(Value::Object(m), if pass { 0 } else { 2 }))
}

/// `z,w` with each side a complex literal; commas inside parentheses are kept.
fn parse_point(s: &str) -> Result<(Complex64, Complex64)> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                split = Some(i);
                break;
            }
            _ => {}
        }
    }
    let i = split.ok_or_else(|| Error::InvalidInput(format!("point {s:?} must be `z,w`")))?;
    Ok((parse_complex(&s[..i])?, parse_complex(&s[i + 1..])?))
}

fn c_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn bottcher(map: &PathBuf, cfg: &RunConfig, points: &[String], random: usize, derived: bool, csv: bool) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, true)?;
    let spec = cfg.region(&f, &plan)?;
    let ctx = PhiContext::new(&f, &plan, &spec)?;
    let pts: Vec<(Complex64, Complex64)> = if points.is_empty() {
        spec.sample(random, cfg.seed)
    } else {
        points.iter().map(|s| parse_point(s)).collect::<Result<_>>()?
    };
    let (inside, outside): (Vec<_>, Vec<_>) = pts.into_iter().partition(|&(z, w)| spec.member(z, w));
    let pool = cfg.pool()?;
    let rows: Vec<Result<Value>> = pool.install(|| {
        inside
            .par_iter()
            .map(|&(z, w)| {
                let x = LogPoint::from_point(z, w)?;
                let e = ctx.eval(&x, cfg.tol, cfg.max_iter)?;
                let mut row = e.to_json();
                if cfg.precision == Precision::Extended {
                    let ext = phi_n_extended(&f, &plan, &x, e.n_used)?;
                    row["extended_deviation"] = json!(relative_log_residual(&ext, &e.log_phi));
                }
                if derived {
                    row["derived"] = match derived_coordinates(&ctx, &f, &plan, &x, cfg.tol) {
                        Ok(dc) => dc.to_json(),
                        Err(err) => json!({"error": err.to_string()}),
                    };
                }
                Ok(row)
            })
            .collect()
    });
    let rows: Vec<Value> = rows.into_iter().collect::<Result<_>>()?;
    let limit = cfg.tol * 1e2;
    let ok = rows
        .iter()
        .all(|r| r["converged"].as_bool() == Some(true) && r["residual"].as_f64().is_some_and(|x| x < limit));
    let code = if ok { 0 } else { 3 };
    if csv {
        let header = [
            "z_re", "z_im", "w_re", "w_im", "phi1_re", "phi1_im", "phi2_re", "phi2_im", "n_used", "tail_bound",
            "residual", "converged",
        ];
        let num = |v: &Value| v.as_f64().map(fmt_f64).unwrap_or_default();
        let body = rows
            .iter()
            .map(|r| {
                let mut cells = Vec::new();
                for k in ["z", "w", "phi1", "phi2"] {
                    cells.push(num(&r[k][0]));
                    cells.push(num(&r[k][1]));
                }
                cells.push(r["n_used"].to_string());
                cells.push(num(&r["tail_bound"]));
                cells.push(num(&r["residual"]));
                cells.push(r["converged"].to_string());
                cells
            })
            .collect::<Vec<_>>();
        return Ok(Report {
            body: to_csv(&header, &body),
            code,
        });
    }
    let mut m = envelope("bottcher", &src, cfg);
    m.insert("plan".into(), plan.to_json());
    m.insert("region".into(), spec.to_json());
    m.insert("rows".into(), Value::Array(rows));
    m.insert(
        "skipped".into(),
        Value::Array(outside.iter().map(|&(z, w)| json!({"z": c_json(z), "w": c_json(w), "reason": "outside U"})).collect()),
    );
    m.insert("residual_limit".into(), json!(limit));
    m.insert("pass".into(), json!(ok));
    Ok(Report::json(Value::Object(m), code))
}

fn transform(
    map: &PathBuf,
    cfg: &RunConfig,
    kind: Option<&str>,
    l: Option<&str>,
    r: Option<i128>,
    s: Option<i128>,
) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, false)?;
    let rational = |name: &str| -> Result<_> {
        let t = l.ok_or_else(|| Error::InvalidInput(format!("{name} needs --l")))?;
        parse_q(t).ok_or_else(|| Error::InvalidInput(format!("--l {t:?} is not a rational")))
    };
    let pair = |name: &str| -> Result<(i128, i128)> {
        match (r, s) {
            (Some(r), Some(s)) => Ok((r, s)),
            _ => Err(Error::InvalidInput(format!("{name} needs --r and --s"))),
        }
    };
    let t = match kind {
        None => default_pipeline(&f, &plan)?,
        Some(k) => {
            let sub = match k {
                "blowup1" => MonomialSubstitution::blowup1(rational(k)?)?,
                "blowup2" => MonomialSubstitution::blowup2(rational(k)?)?,
                "cover1" => {
                    let (r, s) = pair(k)?;
                    MonomialSubstitution::cover1(r, s)?
                }
                "cover2" => {
                    let (r, s) = pair(k)?;
                    MonomialSubstitution::cover2(r, s)?
                }
                _ => return Err(Error::InvalidInput(format!("unknown substitution {k:?}"))),
            };
            pushforward(&f, &plan, sub)?
        }
    };
    let mut m = envelope("transform", &src, cfg);
    m.insert("plan".into(), plan.to_json());
    m.insert("transform".into(), t.to_json());
    let stage_one_case4 = t.stages.len() == 1 && plan.case == crate::classify::Case::Four;
    m.insert(
        "intermediate".into(),
        if stage_one_case4 { intermediate_case_check(&t)?.to_json() } else { Value::Null },
    );
    if t.well_defined && !t.formal {
        let spec = cfg.region(&f, &plan)?;
        m.insert("region".into(), json!(t.region_description(&spec)));
        m.insert("numeric_residual".into(), json!(t.numeric_residual(&spec, cfg.samples.min(1000), cfg.seed)?));
    } else {
        m.insert("region".into(), Value::Null);
        m.insert("numeric_residual".into(), Value::Null);
    }
    Ok(Report::json(Value::Object(m), if t.well_defined { 0 } else { 2 }))
}

fn infinity(map: &PathBuf, cfg: &RunConfig, weighted: Option<&[i128]>, empirical: Option<usize>) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, false)?;
    let report = match weighted {
        Some(&[r, s]) => classify_weighted(&f, &plan, r, s)?,
        Some(_) => return Err(Error::InvalidInput("--weighted takes two integers".into())),
        None => classify_infinity(&f, &plan),
    };
    let geo = lambda_geometric(&plan, report.l);
    let mut m = envelope("infinity", &src, cfg);
    m.insert("plan".into(), plan.to_json());
    m.insert("report".into(), report.to_json());
    m.insert("lambda_geometric".into(), json!(fmt_q(&geo)));
    m.insert("lambda_consistent".into(), json!(geo == report.lambda));
    let emp = match empirical {
        Some(n) => {
            let spec = cfg.region(&f, &plan)?;
            empirical_basin(&f, &plan, &spec, report.l, n, cfg.seed)?.to_json()
        }
        None => Value::Null,
    };
    m.insert("empirical".into(), emp);
    Ok(Report::json(Value::Object(m), 0))
}

fn afo(map: &PathBuf, cfg: &RunConfig, depth: u32) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, false)?;
    let spec = cfg.region(&f, &plan)?;
    let region = afo_region(&plan);
    let pre = (0..=depth)
        .map(|n| preimage_region(&plan, spec.r, n).map(|p| p.to_json()))
        .collect::<Result<Vec<_>>>()?;
    let mut m = envelope("afo", &src, cfg);
    m.insert("plan".into(), plan.to_json());
    m.insert("afo".into(), region.to_json());
    m.insert("preimages".into(), Value::Array(pre));
    m.insert(
        "t_alpha0_fixed".into(),
        match plan.alpha0 {
            Some(a) => json!(t_map(&plan, a) == a),
            None => Value::Null,
        },
    );
    Ok(Report::json(Value::Object(m), 0))
}

fn grid(map: &PathBuf, cfg: &RunConfig, n: usize, width: f64, csv: bool) -> Result<Report> {
    let (f, src) = load(map)?;
    let plan = select_plan(&f, cfg, true)?;
    let spec = cfg.region(&f, &plan)?;
    let ctx = PhiContext::new(&f, &plan, &spec)?;
    let rho = spec.r.ln();
    let n = n.max(1);
    let cells: Vec<(f64, f64)> = (0..n * n)
        .map(|k| {
            let (i, j) = ((k / n) as f64, (k % n) as f64);
            let step = width / n as f64;
            spec.from_product(rho + (i + 0.5) * step, rho + (j + 0.5) * step)
        })
        .collect();
    let pool = cfg.pool()?;
    let rows: Vec<Result<Vec<f64>>> = pool.install(|| {
        cells
            .par_iter()
            .map(|&(x, y)| {
                let lp = LogPoint::new(Complex64::new(x, 0.0), Complex64::new(y, 0.0));
                let e = ctx.eval(&lp, cfg.tol, cfg.max_iter)?;
                Ok(vec![
                    x,
                    y,
                    e.log_phi.log_z.re,
                    e.log_phi.log_w.re,
                    e.log_phi.log_w.im,
                    e.residual.unwrap_or(f64::NAN),
                    e.n_used as f64,
                ])
            })
            .collect()
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_>>()?;
    let header = ["log_abs_z", "log_abs_w", "log_abs_phi1", "log_abs_phi2", "arg_phi2", "residual", "n_used"];
    if csv {
        let body: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&x| fmt_f64(x)).collect()).collect();
        return Ok(Report {
            body: to_csv(&header, &body),
            code: 0,
        });
    }
    let mut m = envelope("grid", &src, cfg);
    m.insert("region".into(), spec.to_json());
    m.insert("columns".into(), json!(header));
    m.insert("rows".into(), json!(rows));
    Ok(Report::json(Value::Object(m), 0))
}
