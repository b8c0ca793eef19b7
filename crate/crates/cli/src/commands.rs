use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use serde::Serialize;
use serde_json::json;

use choquet::capacity::{check_submodular_distortion, estimate_c, CEstimate, Distortion, IntervalCapacity};
use choquet::expr::{self, Expr};
use choquet::inequalities::{self, SuiteOptions};
use choquet::korovkin::{self, linspace, BoundCheckOptions};
use choquet::operators::{self, Family, OperatorSpec, Truncation};
use choquet::properties::{self, PropertyCapacity, CONCAVITY_GRID};
use choquet::{choquet_integral, choquet_oracle, QuadratureConfig};

use crate::config::RunConfig;
use crate::{CapacityArgs, Format, IntegrateArgs, KorovkinArgs, OperatorArgs, OutputArgs, PropertiesArgs};

const SCHEMA_VERSION: u32 = 1;
const DEFAULT_NS: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];
const C_GRID: usize = 10_000;

fn parse_expr(text: Option<String>) -> anyhow::Result<Expr> {
    let text = text.ok_or_else(|| anyhow!("missing function: pass -f <EXPR>"))?;
    expr::parse(&text).map_err(|e| anyhow!("in `{text}`: {e}"))
}

fn distortion(flag: Option<String>, cfg: &RunConfig, default: &str) -> anyhow::Result<Distortion> {
    let spec = flag.or_else(|| cfg.distortion.clone()).unwrap_or_else(|| default.to_string());
    Ok(Distortion::from_spec(&spec)?)
}

fn pair(flag: Option<Vec<f64>>, cfg: Option<[f64; 2]>, default: (f64, f64), what: &str) -> anyhow::Result<(f64, f64)> {
    let (a, b) = match (flag, cfg) {
        (Some(v), _) => (v[0], v[1]),
        (None, Some([a, b])) => (a, b),
        (None, None) => default,
    };
    if !(a.is_finite() && b.is_finite() && a <= b) {
        bail!("{what} [{a}, {b}] must be finite with a <= b");
    }
    Ok((a, b))
}

fn format(out: &OutputArgs, cfg: &RunConfig, default: Format, allowed: &[Format]) -> anyhow::Result<Format> {
    let fmt = match (out.format, &cfg.format) {
        (Some(f), _) => f,
        (None, Some(s)) => match s.as_str() {
            "text" => Format::Text,
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => bail!("unknown format `{other}` in config"),
        },
        (None, None) => default,
    };
    if !allowed.contains(&fmt) {
        bail!("format {fmt:?} is not available for this command");
    }
    Ok(fmt)
}

fn output_path(out: &OutputArgs, cfg: &RunConfig) -> Option<PathBuf> {
    out.output.clone().or_else(|| cfg.output.clone())
}

fn sink(path: Option<&Path>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(path: Option<&Path>, value: &impl Serialize) -> anyhow::Result<()> {
    let mut w = sink(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

pub fn integrate(args: IntegrateArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    cfg.check_subcommand("integrate")?;
    let expr = parse_expr(args.function.or_else(|| cfg.expression.clone()))?;
    let d = distortion(args.distortion, cfg, "identity")?;
    let (a, b) = pair(args.interval, cfg.window, (0.0, 1.0), "interval")?;
    let grid = args.grid.or(cfg.grid).unwrap_or(1000);
    let q = QuadratureConfig::with_level_grid(args.level_grid.unwrap_or(4096));
    q.validate()?;
    let fmt = format(&args.out, cfg, Format::Text, &[Format::Text, Format::Json])?;
    let cap = IntervalCapacity::new(a, b, d)?;
    let f = expr::sample(&expr, (a, b), grid)?;
    let value = choquet_integral(&f, &cap, (a, b))?.value;
    let oracle = choquet_oracle(&f, &cap, (a, b), &q)?.value;
    let path = output_path(&args.out, cfg);
    match fmt {
        Format::Json => write_json(
            path.as_deref(),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "expression": expr.to_string(),
                "distortion": cap.distortion().label(),
                "interval": [a, b],
                "grid": grid,
                "level_grid": q.level_grid,
                "value": value,
                "oracle": oracle,
                "difference": value - oracle,
            }),
        )?,
        _ => {
            let mut w = sink(path.as_deref())?;
            writeln!(w, "value      {value}")?;
            writeln!(w, "oracle     {oracle}")?;
            writeln!(w, "difference {:e}", value - oracle)?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn family(flag: Option<String>, cfg: &RunConfig, default: Option<Family>) -> anyhow::Result<Family> {
    match flag.or_else(|| cfg.family.clone()) {
        Some(s) => Ok(s.parse::<Family>()?),
        None => default.ok_or_else(|| anyhow!("missing operator family: pass -F bernstein|szasz|baskakov")),
    }
}

pub fn operator(args: OperatorArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    cfg.check_subcommand("operator")?;
    let family = family(args.family, cfg, None)?;
    let n = args
        .n
        .or_else(|| cfg.n.as_ref().and_then(|v| v.first().copied()))
        .ok_or_else(|| anyhow!("missing degree: pass -n <N>"))?;
    let d = distortion(args.distortion, cfg, "identity")?;
    let expr = parse_expr(args.function.or_else(|| cfg.expression.clone()))?;
    let count = args.grid.or(cfg.grid).unwrap_or(101);
    let (a, b) = pair(args.window, cfg.window, (0.0, 1.0), "window")?;
    let fmt = format(&args.out, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let truncation = Truncation {
        tail_tolerance: args.tail_tolerance.unwrap_or(Truncation::default().tail_tolerance),
        ..Truncation::default()
    };
    let spec = OperatorSpec::new(family, n, d)?
        .with_truncation(truncation)?
        .with_samples_per_cell(args.samples_per_cell.unwrap_or(operators::DEFAULT_SAMPLES_PER_CELL))?;
    let xs = linspace(a, b, count);
    let window = match (family, args.domain_max.or(cfg.domain_max)) {
        (Family::Bernstein, _) => 1.0,
        (_, Some(bmax)) => bmax,
        (_, None) => spec.required_window(&xs)?,
    };
    let values = operators::eval_grid(&spec, &expr, window, &xs)?;
    let path = output_path(&args.out, cfg);
    match fmt {
        Format::Json => write_json(path.as_deref(), &values)?,
        _ => {
            let mut w = csv::Writer::from_writer(sink(path.as_deref())?);
            w.write_record(["x", "value"])?;
            for v in &values {
                w.write_record([v.x.to_string(), v.value.to_string()])?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn resolve_c(flag: Option<f64>, cfg: &RunConfig, d: &Distortion) -> anyhow::Result<f64> {
    if let Some(c) = flag.or(cfg.c) {
        return Ok(c);
    }
    match estimate_c(d, C_GRID) {
        CEstimate::Bounded { c, .. } => Ok(c),
        CEstimate::Unbounded { ratio, at } => bail!(
            "no finite c with nu <= c * dual(nu) for `{d}` (ratio {ratio:e} at x = {at:e}); pass --c to force one"
        ),
    }
}

pub fn korovkin(args: KorovkinArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    cfg.check_subcommand("korovkin")?;
    let expr = parse_expr(args.function.or_else(|| cfg.expression.clone()))?;
    let d = distortion(args.distortion, cfg, "identity")?;
    let family = family(args.family, cfg, Some(Family::Bernstein))?;
    let c = resolve_c(args.c, cfg, &d)?;
    let ns = args.n.or_else(|| cfg.n.clone()).unwrap_or_else(|| DEFAULT_NS.to_vec());
    let count = args.grid.or(cfg.grid).unwrap_or(51);
    let (a, b) = pair(args.window, cfg.window, (0.0, 1.0), "window")?;
    let fmt = format(&args.out, cfg, Format::Csv, &[Format::Csv, Format::Json])?;
    let xs = linspace(a, b, count);
    let opts = BoundCheckOptions {
        family,
        window: args.domain_max.or(cfg.domain_max),
        modulus_grid: args.modulus_grid.unwrap_or(korovkin::DEFAULT_MODULUS_GRID),
    };
    let report = korovkin::error_bound_check_with(&expr, &d, c, &ns, &xs, &opts)?;
    let table = korovkin::convergence_table(&expr, family, &d, &ns, &xs)?;
    let summary = report.summary();
    let path = output_path(&args.out, cfg);
    match fmt {
        Format::Json => {
            write_json(path.as_deref(), &json!({ "report": report, "summary": summary, "convergence": table }))?
        }
        _ => {
            report.write_csv(sink(path.as_deref())?)?;
            let doc = json!({
                "schema_version": korovkin::KOROVKIN_SCHEMA_VERSION,
                "expression": expr.to_string(),
                "family": family,
                "distortion": d.label(),
                "c": c,
                "totals": summary,
                "convergence": table,
            });
            match &path {
                Some(p) => write_json(Some(&p.with_extension("summary.json")), &doc)?,
                None => eprintln!("{}", serde_json::to_string_pretty(&doc)?),
            }
        }
    }
    Ok(if report.all_hold() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[derive(Serialize)]
#[serde(untagged)]
enum SuiteEntry {
    Ran(inequalities::SuiteSummary),
    Skipped { name: &'static str, status: &'static str, reason: String },
}

pub fn properties(args: PropertiesArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    cfg.check_subcommand("properties")?;
    let seed = args.seed.or(cfg.seed).unwrap_or(42);
    let trials = args.trials.or(cfg.trials).unwrap_or(200);
    let d = distortion(args.distortion, cfg, "identity")?;
    format(&args.out, cfg, Format::Json, &[Format::Json])?;
    let cap = PropertyCapacity::Interval(IntervalCapacity::unit(d.clone()));
    let integral = properties::run_integral_properties(&cap, trials, seed)?;
    let names = ["holder", "p1_qinf_modulus", "neg_abs_variance", "covariance_bound"];
    let suites: Vec<SuiteEntry> = if check_submodular_distortion(&d, CONCAVITY_GRID).submodular {
        let opts = SuiteOptions { trials, seed, distortions: vec![d.clone()], ..Default::default() };
        vec![
            SuiteEntry::Ran(inequalities::holder_suite(&opts)?),
            SuiteEntry::Ran(inequalities::p1_qinf_suite(&opts)?),
            SuiteEntry::Ran(inequalities::neg_abs_variance_suite(&opts)?),
            SuiteEntry::Ran(inequalities::covariance_bound_suite(&opts)?),
        ]
    } else {
        names
            .iter()
            .map(|&name| SuiteEntry::Skipped {
                name,
                status: "skipped",
                reason: "not applicable: capacity not submodular".into(),
            })
            .collect()
    };
    let suite_failures: usize = suites
        .iter()
        .map(|s| match s {
            SuiteEntry::Ran(s) => s.failed,
            SuiteEntry::Skipped { .. } => 0,
        })
        .sum();
    let failures = integral.failures() + suite_failures;
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "distortion": d.label(),
        "seed": seed,
        "trials": trials,
        "failures": failures,
        "integral": integral,
        "suites": suites,
    });
    write_json(output_path(&args.out, cfg).as_deref(), &doc)?;
    Ok(if failures == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

pub fn capacity(args: CapacityArgs, cfg: &RunConfig) -> anyhow::Result<ExitCode> {
    cfg.check_subcommand("capacity")?;
    let spec = args
        .distortion
        .or_else(|| cfg.distortion.clone())
        .ok_or_else(|| anyhow!("missing distortion: pass -d <SPEC>"))?;
    let d = Distortion::from_spec(&spec)?;
    let points = args.grid.or(cfg.grid).unwrap_or(11);
    if points < 2 {
        bail!("the table needs at least 2 points");
    }
    let fmt = format(&args.out, cfg, Format::Text, &[Format::Text, Format::Csv, Format::Json])?;
    let cap = IntervalCapacity::unit(d.clone());
    let dual = cap.dual();
    let rows: Vec<[f64; 3]> =
        linspace(0.0, 1.0, points).into_iter().map(|x| [x, cap.measure_length(x), dual.measure_length(x)]).collect();
    let concavity = check_submodular_distortion(&d, CONCAVITY_GRID);
    let c = estimate_c(&d, args.c_grid.unwrap_or(C_GRID));
    let path = output_path(&args.out, cfg);
    match fmt {
        Format::Json => write_json(
            path.as_deref(),
            &json!({
                "schema_version": SCHEMA_VERSION,
                "distortion": d.label(),
                "submodular": concavity.submodular,
                "concavity_witness": concavity.witness,
                "c": c,
                "table": rows.iter().map(|r| json!({"x": r[0], "nu": r[1], "dual": r[2]})).collect::<Vec<_>>(),
            }),
        )?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(sink(path.as_deref())?);
            w.write_record(["x", "nu", "dual"])?;
            for r in &rows {
                w.write_record(r.iter().map(f64::to_string))?;
            }
            w.flush()?;
        }
        Format::Text => {
            let mut w = sink(path.as_deref())?;
            writeln!(w, "distortion  {}", d.label())?;
            writeln!(w, "submodular  {}", if concavity.submodular { "yes" } else { "no" })?;
            match c {
                CEstimate::Bounded { c, sup_ratio, argmax } => {
                    writeln!(w, "c           {c} (sup ratio {sup_ratio:.6} at x = {argmax})")?
                }
                CEstimate::Unbounded { ratio, at } => {
                    writeln!(w, "c           unbounded (ratio {ratio:e} at x = {at:e})")?
                }
            }
            writeln!(w)?;
            writeln!(w, "{:>8}  {:>12}  {:>12}", "x", "nu", "dual")?;
            for r in &rows {
                writeln!(w, "{:>8.4}  {:>12.8}  {:>12.8}", r[0], r[1], r[2])?;
            }
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}
