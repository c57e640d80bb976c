mod parse;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use kobageo::criteria::{
    evl_check, example_claims_check, goldilocks_check, EvlOptions, ExampleClaimsOptions, ExampleParams,
    GoldilocksOptions, GrowthForm,
};
use kobageo::domain::{Example51Params, Example52Params};
use kobageo::dynamics::{classify_wolff_denjoy, default_seeds, limit_constancy_probe, WdOptions};
use kobageo::metric::{metric_bounds, Ball, ShellBudget};
use kobageo::paths::{almost_geodesic_between, estimate_distance, DistanceBudget};
use kobageo::visibility::{
    distance_source, gromov_limsup_probe, visibility_probe, Schedule, TrendTolerance, VisibilityOptions,
};
use kobageo::{Domain, Error, Point};

const SCHEMA_VERSION: u32 = 1;

const EXIT_VALIDATION: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "kobageo", version, about = "Kobayashi-distance laboratory for bounded domains in C^d")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// disk, bidisk, ball, polydiskN, ballN, a JSON spec, or @file.json
    #[arg(long)]
    domain: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON report path (stdout when absent)
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// CSV data path
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Two-sided bounds on the infinitesimal metric
    Metric {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, allow_hyphen_values = true)]
        direction: String,
    },
    /// Distance bracket and witness path
    Distance {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long)]
        max_segments: Option<usize>,
        #[arg(long)]
        restarts: Option<usize>,
    },
    /// Certified (1, kappa)-almost-geodesic
    Geodesic {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, allow_hyphen_values = true)]
        to: String,
        #[arg(long, default_value_t = 0.01)]
        kappa: f64,
    },
    /// Depth of almost-geodesics between points approaching p and q
    Visibility {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        /// Base point of the radial schedule (default: the domain's base point)
        #[arg(long, allow_hyphen_values = true)]
        o: Option<String>,
        #[arg(long, default_value_t = 0.01)]
        kappa: f64,
        #[arg(long, default_value_t = 12)]
        steps: usize,
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Gromov products along sequences approaching p and q
    Gromov {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        p: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        o: Option<String>,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        /// Adversarial bidisk schedule toward (1, 1) and (-1, 1)
        #[arg(long)]
        adversarial: bool,
    },
    /// Shell suprema M(r) and the Goldilocks conditions
    Goldilocks {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        eps0: Option<f64>,
        #[arg(long, default_value_t = 1e-6)]
        r_min: f64,
        #[arg(long, default_value_t = 4)]
        per_decade: usize,
        #[command(flatten)]
        shell: ShellArgs,
    },
    /// Hypotheses of the extended visibility lemma in a localizing ball
    Evl {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        center: String,
        #[arg(long)]
        radius: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Power growth `A + alpha x^beta` instead of `A + alpha log x`
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        a: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        r0: f64,
        #[arg(long, default_value_t = 1e-5)]
        r_min: f64,
        #[arg(long, default_value_t = 4)]
        per_decade: usize,
        #[command(flatten)]
        shell: ShellArgs,
    },
    /// Quantitative claims for the two example domains
    Examples {
        #[arg(long)]
        which: u32,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n: Option<u32>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out_json: Option<PathBuf>,
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
    /// Orbits of a holomorphic self-map and their Wolff-Denjoy class
    Iterate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        map: String,
        /// Number of seeds
        #[arg(long, default_value_t = 3)]
        seeds: usize,
        #[arg(long = "N", default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1e-5)]
        agreement_tol: f64,
    },
    /// Constancy of the limit map over a grid of starting points
    Constancy {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        map: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long = "N", default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 1e-5)]
        agreement_tol: f64,
    },
}

#[derive(Args, Clone)]
struct ShellArgs {
    #[arg(long, default_value_t = 24)]
    points: usize,
    #[arg(long, default_value_t = 24)]
    directions: usize,
}

impl ShellArgs {
    fn budget(&self, seed: u64) -> ShellBudget {
        ShellBudget {
            points: self.points,
            directions: self.directions,
            seed,
        }
    }
}

struct Output {
    report: Value,
    csv: Option<String>,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn out(report: Value, csv: String) -> kobageo::Result<Output> {
    Ok(Output {
        report,
        csv: Some(csv),
    })
}

fn gromov_csv(rep: &kobageo::visibility::GromovProbeReport) -> String {
    let mut s = String::from("n,lower,upper\n");
    for (i, e) in rep.entries.iter().enumerate() {
        s.push_str(&format!("{},{},{}\n", i + 1, e.value.lo, e.value.hi));
    }
    s
}

fn wd_options(tol: f64) -> WdOptions {
    WdOptions {
        agreement_tol: tol,
        ..WdOptions::default()
    }
}

fn run(cmd: &Command, dom: Option<&Domain>) -> kobageo::Result<Output> {
    let d = || dom.expect("domain parsed");
    match cmd {
        Command::Metric { point, direction, .. } => {
            let z = parse::point(point, d().dim())?;
            let v = parse::direction(direction, d().dim())?;
            let b = metric_bounds(d(), &z, &v)?;
            out(to_value(&b), format!("lower,upper\n{},{}\n", b.lower, b.upper))
        }
        Command::Distance {
            common,
            from,
            to,
            max_segments,
            restarts,
        } => {
            let (a, b) = (parse::point(from, d().dim())?, parse::point(to, d().dim())?);
            let mut budget = DistanceBudget::for_domain(d());
            budget.seed = common.seed;
            if let Some(m) = max_segments {
                budget.max_segments = *m;
            }
            if let Some(r) = restarts {
                budget.restarts = *r;
            }
            let est = estimate_distance(d(), &a, &b, &budget)?;
            let csv = est.witness.to_csv();
            out(json!({"lower": est.lower, "upper": est.upper, "budget": budget}), csv)
        }
        Command::Geodesic {
            common, from, to, kappa, ..
        } => {
            let (a, b) = (parse::point(from, d().dim())?, parse::point(to, d().dim())?);
            let mut budget = DistanceBudget::for_domain(d());
            budget.seed = common.seed;
            let g = almost_geodesic_between(d(), &a, &b, *kappa, &budget)?;
            out(
                json!({"certificate": g.certificate, "distance": {"lower": g.distance.lower, "upper": g.distance.upper}}),
                g.path.to_csv(),
            )
        }
        Command::Visibility {
            common,
            p,
            q,
            o,
            kappa,
            steps,
            threshold,
        } => {
            let dim = d().dim();
            let (p, q) = (parse::point(p, dim)?, parse::point(q, dim)?);
            let o = match o {
                Some(o) => parse::point(o, dim)?,
                None => d().base_point().clone(),
            };
            let sched = Schedule::Radial {
                p: p.clone(),
                q: q.clone(),
                o,
                steps: *steps,
            };
            let mut budget = DistanceBudget::for_domain(d());
            budget.seed = common.seed;
            let opts = VisibilityOptions {
                compact_threshold: *threshold,
                budget: Some(budget),
            };
            let rep = visibility_probe(d(), &p, &q, *kappa, &sched, &opts)?;
            let csv = rep.depths_csv();
            out(to_value(&rep), csv)
        }
        Command::Gromov {
            common,
            p,
            q,
            o,
            steps,
            adversarial,
        } => {
            let dim = d().dim();
            let o = match o {
                Some(o) => parse::point(o, dim)?,
                None => d().base_point().clone(),
            };
            let sched = if *adversarial {
                Schedule::bidisk_adversarial(*steps)
            } else {
                let (Some(p), Some(q)) = (p, q) else {
                    return Err(Error::Input("--p and --q are required unless --adversarial is set".into()));
                };
                Schedule::Radial {
                    p: parse::point(p, dim)?,
                    q: parse::point(q, dim)?,
                    o: o.clone(),
                    steps: *steps,
                }
            };
            let mut src = distance_source(d());
            src.budget.seed = common.seed;
            let rep = gromov_limsup_probe(&src, d(), &o, &sched, &TrendTolerance::default())?;
            let csv = gromov_csv(&rep);
            out(to_value(&rep), csv)
        }
        Command::Goldilocks {
            common,
            eps0,
            r_min,
            per_decade,
            shell,
        } => {
            let opts = GoldilocksOptions {
                eps0: *eps0,
                r_min: *r_min,
                per_decade: *per_decade,
                r_grid: None,
                shell: shell.budget(common.seed),
            };
            let rep = goldilocks_check(d(), &opts)?;
            let csv = rep.to_csv();
            out(to_value(&rep), csv)
        }
        Command::Evl {
            common,
            center,
            radius,
            alpha,
            beta,
            a,
            r0,
            r_min,
            per_decade,
            shell,
        } => {
            let form = match beta {
                Some(b) => GrowthForm::Power { alpha: *alpha, beta: *b },
                None => GrowthForm::Log { alpha: *alpha },
            };
            let opts = EvlOptions {
                localizer: Ball {
                    center: parse::point(center, d().dim())?,
                    radius: *radius,
                },
                form,
                a: *a,
                r0: *r0,
                r_min: *r_min,
                per_decade: *per_decade,
                shell: shell.budget(common.seed),
            };
            let rep = evl_check(d(), &opts)?;
            let csv = rep.to_csv();
            out(to_value(&rep), csv)
        }
        Command::Examples {
            which,
            eps,
            n,
            delta,
            seed,
            ..
        } => {
            let params = match (which, n, delta) {
                (51, Some(n), None) => ExampleParams::First(Example51Params { eps: *eps, n: *n }),
                (52, None, Some(delta)) => ExampleParams::Second(Example52Params {
                    eps: *eps,
                    delta: *delta,
                }),
                (51, _, _) => return Err(Error::Input("example 51 takes --eps and --n".into())),
                (52, _, _) => return Err(Error::Input("example 52 takes --eps and --delta".into())),
                _ => return Err(Error::Input(format!("unknown example {which}; use 51 or 52"))),
            };
            let mut opts = ExampleClaimsOptions::for_example(&params);
            opts.seed = *seed;
            opts.goldilocks.shell.seed = *seed;
            let rep = example_claims_check(&params, &opts)?;
            let csv = rep.to_csv();
            out(to_value(&rep), csv)
        }
        Command::Iterate {
            common,
            map,
            seeds,
            n,
            agreement_tol,
        } => {
            let f = parse::map(map, d())?;
            let seeds = default_seeds(d(), *seeds, common.seed)?;
            let v = classify_wolff_denjoy(d(), &f, &seeds, *n, &wd_options(*agreement_tol))?;
            let mut csv = String::new();
            for (k, o) in v.orbits.iter().enumerate() {
                let body = o.to_csv();
                let mut lines = body.lines();
                let header = lines.next().unwrap_or_default();
                if k == 0 {
                    csv.push_str(&format!("seed,{header}\n"));
                }
                for l in lines {
                    csv.push_str(&format!("{k},{l}\n"));
                }
            }
            let orbits: Vec<Value> = v
                .orbits
                .iter()
                .map(|o| json!({"seed": o.seed, "terminal": o.terminal(), "steps": o.iterates.len() - 1, "truncated": o.truncated}))
                .collect();
            out(
                json!({
                    "map": f,
                    "classification": v.classification,
                    "limit_point": v.limit_point,
                    "agreement": v.agreement,
                    "depth_floor": v.depth_floor,
                    "tail_min_depths": v.tail_min_depths,
                    "orbits": orbits,
                    "asserted_hypotheses": ["taut", "visibility"],
                }),
                csv,
            )
        }
        Command::Constancy {
            common,
            map,
            grid,
            n,
            agreement_tol,
        } => {
            let f = parse::map(map, d())?;
            let pts: Vec<Point> = default_seeds(d(), *grid, common.seed)?;
            let rep = limit_constancy_probe(d(), &f, &pts, *n, &wd_options(*agreement_tol))?;
            let mut csv = String::from("applicable,constant,spread,even_odd_gap\n");
            csv.push_str(&format!("{},{},{},{}\n", rep.applicable, rep.constant, rep.spread, rep.even_odd_gap));
            out(to_value(&rep), csv)
        }
    }
}

fn common(cmd: &Command) -> Option<&Common> {
    match cmd {
        Command::Metric { common, .. }
        | Command::Distance { common, .. }
        | Command::Geodesic { common, .. }
        | Command::Visibility { common, .. }
        | Command::Gromov { common, .. }
        | Command::Goldilocks { common, .. }
        | Command::Evl { common, .. }
        | Command::Iterate { common, .. }
        | Command::Constancy { common, .. } => Some(common),
        Command::Examples { .. } => None,
    }
}

fn name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Metric { .. } => "metric",
        Command::Distance { .. } => "distance",
        Command::Geodesic { .. } => "geodesic",
        Command::Visibility { .. } => "visibility",
        Command::Gromov { .. } => "gromov",
        Command::Goldilocks { .. } => "goldilocks",
        Command::Evl { .. } => "evl",
        Command::Examples { .. } => "examples",
        Command::Iterate { .. } => "iterate",
        Command::Constancy { .. } => "constancy",
    }
}

fn paths(cmd: &Command) -> (Option<PathBuf>, Option<PathBuf>, u64) {
    match cmd {
        Command::Examples {
            out_json,
            out_csv,
            seed,
            ..
        } => (out_json.clone(), out_csv.clone(), *seed),
        c => {
            let c = common(c).expect("common arguments");
            (c.out_json.clone(), c.out_csv.clone(), c.seed)
        }
    }
}

fn write(path: &PathBuf, text: &str) -> Result<(), String> {
    std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cmd = &cli.command;
    let (json_path, csv_path, seed) = paths(cmd);
    let parsed = common(cmd).map(|c| parse::domain(&c.domain)).transpose();
    let (domain, result) = match parsed {
        Ok(d) => {
            let r = run(cmd, d.as_ref());
            (d, r)
        }
        Err(e) => (None, Err(e)),
    };
    let mut report = json!({
        "schema_version": SCHEMA_VERSION,
        "command": name(cmd),
        "seed": seed,
    });
    if let Some(d) = &domain {
        report["domain"] = to_value(&d.summary());
    }
    let (code, csv) = match result {
        Ok(o) => {
            report["result"] = o.report;
            (0, o.csv)
        }
        Err(e) => {
            eprintln!("error: {e}");
            report["error"] = json!({"message": e.to_string(), "validation": e.is_validation()});
            let code = if e.is_validation() || matches!(e, Error::MapValidity(_) | Error::InvalidSubspace(_) | Error::Schedule(_) | Error::Localizer(_)) {
                EXIT_VALIDATION
            } else {
                EXIT_NUMERICAL
            };
            (code, None)
        }
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    let mut io_error = None;
    match &json_path {
        Some(p) => {
            if let Err(e) = write(p, &text) {
                io_error = Some(e);
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            let _ = writeln!(stdout, "{text}");
        }
    }
    if let (Some(p), Some(csv)) = (&csv_path, csv) {
        if let Err(e) = write(p, &csv) {
            io_error = Some(e);
        }
    }
    if let Some(e) = io_error {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_NUMERICAL.max(code));
    }
    ExitCode::from(code)
}
