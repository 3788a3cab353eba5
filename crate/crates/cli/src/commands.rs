use std::io::Write;

use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use twoboson::determinants::{spectral_report, SpectralReport};
use twoboson::lattice::{essential_band, CouplingTriple, Quasimomentum, SectorTag, SideTag};
use twoboson::oracle::{default_margin, StructuredFiber};
use twoboson::regions::{predicted_counts, PredictedCounts, RegionLabel};
use twoboson::verify::{calibrate, run_check, CheckRecord, CHECK_COUNT};
use twoboson::{Error, Result};

use crate::config::{parse_pair, Format, RunConfig};

pub fn io_error(e: impl std::fmt::Display) -> Error {
    Error::Config(format!("output: {e}"))
}

pub fn write_json(out: &mut dyn Write, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v).map_err(io_error)?;
    writeln!(out).map_err(io_error)
}

pub fn csv_writer(out: &mut dyn Write) -> csv::Writer<&mut dyn Write> {
    csv::Writer::from_writer(out)
}

fn inputs(c: CouplingTriple, k: Option<Quasimomentum>) -> Value {
    let mut v = json!({ "gamma": c.gamma, "lambda": c.lambda, "mu": c.mu });
    if let Some(k) = k {
        v["k"] = json!([k.k1, k.k2]);
    }
    v
}

fn label_sectors(label: &RegionLabel) -> Vec<Value> {
    SectorTag::ALL
        .iter()
        .map(|&s| {
            json!({
                "sector": s.name(),
                "side": label.side.name(),
                "index": label.index(s),
                "on_boundary": label.boundary(s),
            })
        })
        .collect()
}

pub fn classify(cfg: &RunConfig, calibrated: bool, out: &mut dyn Write) -> Result<()> {
    let c = cfg.couplings()?;
    let p: PredictedCounts = if calibrated {
        calibrate(&cfg.verify_config())?.predicted_counts(c)
    } else {
        predicted_counts(c)
    };
    let source = format!("{:?}", p.source).to_lowercase();
    match cfg.format {
        Format::Json => {
            let mut per_sector = label_sectors(&p.below);
            per_sector.extend(label_sectors(&p.above));
            write_json(
                out,
                &json!({
                    "inputs": inputs(c, None),
                    "per_sector": per_sector,
                    "totals": { "m": p.m, "n": p.n, "on_boundary": p.on_boundary(), "source": source },
                    "checks": [],
                }),
            )
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "gamma", "lambda", "mu", "alpha_minus", "beta_minus", "zeta_minus", "alpha_plus", "beta_plus",
                "zeta_plus", "m", "n", "on_boundary", "source",
            ])
            .map_err(io_error)?;
            w.serialize((
                c.gamma,
                c.lambda,
                c.mu,
                p.below.alpha,
                p.below.beta,
                p.below.zeta,
                p.above.alpha,
                p.above.beta,
                p.above.zeta,
                p.m,
                p.n,
                p.on_boundary(),
                source,
            ))
            .map_err(io_error)?;
            w.flush().map_err(io_error)
        }
    }
}

/// One listed eigenvalue of the `spectrum` command.
struct Row {
    sector: &'static str,
    side: SideTag,
    value: f64,
    source: &'static str,
}

pub fn spectrum(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let c = cfg.couplings()?;
    let k = cfg.quasimomentum();
    let band = essential_band(k);
    let fiber = StructuredFiber::new(k, c, cfg.grid)?;
    let mut rows = Vec::new();
    let mut per_sector = Vec::new();
    let totals;
    let mut checks = Vec::new();
    if k.k1 == 0.0 && k.k2 == 0.0 {
        let report: SpectralReport = spectral_report(c, &cfg.scan)?;
        let thr = cfg.verify_config().comparison_threshold();
        let mut agree = true;
        for list in &report.lists {
            let oracle = fiber.eigenvalues_beyond(list.side, thr, Some(list.sector));
            let far = list.values.iter().filter(|&&z| band.distance(list.side, z) >= thr).count();
            agree &= far == oracle.len();
            for &z in &list.values {
                rows.push(Row { sector: list.sector.name(), side: list.side, value: z, source: "determinant" });
            }
            for _ in 0..list.unresolved {
                rows.push(Row { sector: list.sector.name(), side: list.side, value: f64::NAN, source: "unresolved" });
            }
            for &z in &oracle {
                rows.push(Row { sector: list.sector.name(), side: list.side, value: z, source: "oracle" });
            }
            per_sector.push(json!({
                "sector": list.sector.name(),
                "side": list.side.name(),
                "determinant": list.values,
                "unresolved": list.unresolved,
                "oracle": oracle,
                "boundary_proximity": list.boundary_proximity,
                "even_multiplicity_suspect": list.even_multiplicity_suspect,
            }));
        }
        checks.push(json!({
            "name": "oracle-agreement",
            "passed": agree,
            "detail": format!("per-sector counts beyond {thr:.1e} at L={}", cfg.grid),
        }));
        totals = json!({ "m": report.m, "n": report.n, "unresolved": report.unresolved() });
    } else {
        let margin = default_margin(k, cfg.grid);
        let spec = fiber.outside_band(margin);
        for (side, values) in [(SideTag::Below, &spec.below), (SideTag::Above, &spec.above)] {
            for &z in values {
                rows.push(Row { sector: "all", side, value: z, source: "oracle" });
            }
            per_sector.push(json!({ "sector": "all", "side": side.name(), "oracle": values }));
        }
        totals = json!({ "m": spec.below.len(), "n": spec.above.len(), "margin": margin });
    }
    match cfg.format {
        Format::Json => write_json(
            out,
            &json!({
                "inputs": inputs(c, Some(k)),
                "band": [band.lo, band.hi],
                "per_sector": per_sector,
                "totals": totals,
                "checks": checks,
            }),
        ),
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["sector", "side", "eigenvalue", "distance", "source"]).map_err(io_error)?;
            for r in rows {
                w.serialize((r.sector, r.side.name(), r.value, band.distance(r.side, r.value), r.source))
                    .map_err(io_error)?;
            }
            w.flush().map_err(io_error)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    Gamma,
    Lambda,
    Mu,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    /// Coupling on the horizontal axis.
    #[arg(long, value_enum, default_value = "lambda")]
    x: Axis,
    /// Coupling on the vertical axis.
    #[arg(long, value_enum, default_value = "mu")]
    y: Axis,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-20,20")]
    x_range: (f64, f64),
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true, default_value = "-20,20")]
    y_range: (f64, f64),
    /// Points per axis (at most 2000).
    #[arg(long, default_value_t = 41)]
    resolution: usize,
    /// Skip the determinant path and emit predicted counts only.
    #[arg(long)]
    predicted_only: bool,
    /// Also run the oracle at K = 0 on every n-th point of each axis (0: never).
    #[arg(long, default_value_t = 0)]
    oracle_every: usize,
}

pub const MAX_RESOLUTION: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub c: CouplingTriple,
    pub predicted: (usize, usize),
    pub on_boundary: bool,
    pub determinant: Option<(usize, usize)>,
    pub oracle: Option<(usize, usize)>,
}

fn axis_points((lo, hi): (f64, f64), n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

pub fn sweep_rows(cfg: &RunConfig, args: &SweepArgs) -> Result<Vec<SweepRow>> {
    if args.x == args.y {
        return Err(Error::Config("the two sweep axes must differ".into()));
    }
    if args.resolution == 0 || args.resolution > MAX_RESOLUTION {
        return Err(Error::Config(format!("resolution must lie in 1..={MAX_RESOLUTION}")));
    }
    for (lo, hi) in [args.x_range, args.y_range] {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("range {lo},{hi} must be finite and ordered")));
        }
    }
    let base = [cfg.gamma.unwrap_or(0.0), cfg.lambda.unwrap_or(0.0), cfg.mu.unwrap_or(0.0)];
    let slot = |a: Axis| a as usize;
    let xs = axis_points(args.x_range, args.resolution);
    let ys = axis_points(args.y_range, args.resolution);
    let thr = cfg.verify_config().comparison_threshold();
    let jobs: Vec<(usize, usize)> = (0..ys.len()).flat_map(|j| (0..xs.len()).map(move |i| (j, i))).collect();
    jobs.par_iter()
        .map(|&(j, i)| {
            let mut v = base;
            v[slot(args.x)] = xs[i];
            v[slot(args.y)] = ys[j];
            let c = CouplingTriple::new(v[0], v[1], v[2])?;
            let p = predicted_counts(c);
            let determinant = if args.predicted_only {
                None
            } else {
                let r = spectral_report(c, &cfg.scan)?;
                Some((r.m, r.n))
            };
            let oracle = if args.oracle_every > 0 && i % args.oracle_every == 0 && j % args.oracle_every == 0 {
                let spec = StructuredFiber::new(Quasimomentum::ZERO, c, cfg.grid)?.outside_band(thr);
                Some((spec.below.len(), spec.above.len()))
            } else {
                None
            };
            Ok(SweepRow { c, predicted: (p.m, p.n), on_boundary: p.on_boundary(), determinant, oracle })
        })
        .collect()
}

pub fn sweep(cfg: &RunConfig, args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let rows = sweep_rows(cfg, args)?;
    let agree = |r: &SweepRow| r.determinant.map(|d| d == r.predicted);
    match cfg.format {
        Format::Json => {
            let rows: Vec<Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "gamma": r.c.gamma, "lambda": r.c.lambda, "mu": r.c.mu,
                        "predicted": [r.predicted.0, r.predicted.1],
                        "on_boundary": r.on_boundary,
                        "determinant": r.determinant.map(|d| [d.0, d.1]),
                        "agree": agree(r),
                        "oracle": r.oracle.map(|d| [d.0, d.1]),
                    })
                })
                .collect();
            write_json(out, &Value::Array(rows))
        }
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record([
                "gamma", "lambda", "mu", "pred_m", "pred_n", "on_boundary", "det_m", "det_n", "agree", "oracle_m",
                "oracle_n",
            ])
            .map_err(io_error)?;
            for r in &rows {
                w.serialize((
                    r.c.gamma,
                    r.c.lambda,
                    r.c.mu,
                    r.predicted.0,
                    r.predicted.1,
                    r.on_boundary,
                    r.determinant.map(|d| d.0),
                    r.determinant.map(|d| d.1),
                    agree(r),
                    r.oracle.map(|d| d.0),
                    r.oracle.map(|d| d.1),
                ))
                .map_err(io_error)?;
            }
            w.flush().map_err(io_error)
        }
    }
}

/// Runs the selected checks; returns whether all passed.
pub fn verify(cfg: &RunConfig, only: &[usize], out: &mut dyn Write) -> Result<bool> {
    let ids: Vec<usize> = if only.is_empty() { (1..=CHECK_COUNT).collect() } else { only.to_vec() };
    if let Some(bad) = ids.iter().find(|&&id| id == 0 || id > CHECK_COUNT) {
        return Err(Error::Config(format!("no check {bad}; checks are numbered 1..={CHECK_COUNT}")));
    }
    let vc = cfg.verify_config();
    let mut records: Vec<CheckRecord> = Vec::new();
    for &id in &ids {
        let r = run_check(id, &vc);
        if cfg.format == Format::Csv {
            // progress on stderr keeps stdout machine-readable
            eprintln!("{r}");
        }
        records.push(r);
    }
    let passed = records.iter().all(|r| r.passed);
    match cfg.format {
        Format::Json => write_json(
            out,
            &json!({
                "inputs": {
                    "seed": vc.seed,
                    "rel_tol": vc.quadrature.rel_tol,
                    "comparison_grid": vc.comparison_grid,
                    "theorem_grid": vc.theorem_grid,
                    "samples_per_component": vc.samples_per_component,
                },
                "per_sector": [],
                "totals": {
                    "passed": records.iter().filter(|r| r.passed).count(),
                    "failed": records.iter().filter(|r| !r.passed).count(),
                },
                "checks": records,
            }),
        )?,
        Format::Csv => {
            let mut w = csv_writer(out);
            w.write_record(["id", "name", "passed", "seconds", "detail"]).map_err(io_error)?;
            for r in &records {
                w.serialize((r.id, &r.name, r.passed, r.seconds, &r.detail)).map_err(io_error)?;
            }
            w.flush().map_err(io_error)?;
        }
    }
    Ok(passed)
}
