use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;

use rotcover::placement::{adversarial_min_search, expected_count, find_placement, good_rotation_measure};
use rotcover::sphere::{region_area, AreaMode};
use rotcover::transport::{build_transport_plan, validate_plan, PlanValidation, RoundDiagnostics, COVERAGE_THRESHOLD};
use rotcover::{
    Error, Estimate, McConfig, PlacementProblem, PlacementStatus, PointSet, Region, TransportConfig, TransportPlan,
};

use crate::args::{Cli, Command, Common, PointArgs, PlaceArgs, SharpnessArgs, TransportArgs};
use crate::output::{write_json, write_rows, Row};
use crate::{EXIT_INPUT, EXIT_NOT_FOUND, EXIT_OK, EXIT_PLAN_FAILED};

pub fn run(cli: &Cli) -> Result<u8> {
    let start = Instant::now();
    let (row, code, out) = match &cli.command {
        Command::Area(c) => (area(c)?, EXIT_OK, c),
        Command::ExpectedCount(p) => (expected(p)?, EXIT_OK, &p.common),
        Command::Measure(p) => (measure(p)?, EXIT_OK, &p.common),
        Command::Place(p) => {
            let (row, code) = place(p)?;
            (row, code, &p.points.common)
        }
        Command::Transport(t) => {
            let (row, code) = transport(t)?;
            (row, code, &t.common)
        }
        Command::Sharpness(s) => (sharpness(s)?, EXIT_OK, &s.points.common),
    };
    let row = Row {
        wall_ms: start.elapsed().as_millis() as u64,
        ..row
    };
    write_rows(&[row], out.out.as_deref())?;
    Ok(code)
}

/// Exit code for a failed run: plan construction failures count as failed
/// plans, everything else is bad input.
pub fn exit_code_for(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(Error::RoundFailed { .. } | Error::CoverConstruction { .. } | Error::Capacity { .. }) => EXIT_PLAN_FAILED,
        _ => EXIT_INPUT,
    }
}

fn mc(c: &Common) -> McConfig {
    McConfig::new(c.seed, c.streams)
}

fn load_region(path: &Path) -> Result<Region> {
    Ok(Region::from_json_file(path)?)
}

fn load_points(p: &PointArgs) -> Result<PointSet> {
    let path = Path::new(&p.points);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let set: PointSet = serde_json::from_str(&text).map_err(Error::from)?;
        return Ok(set);
    }
    Ok(PointSet::preset(&p.points, p.n)?)
}

/// Exact area when the region supports it, otherwise Monte Carlo.
fn area_of(region: &Region, c: &Common) -> Result<Estimate> {
    match region.exact_area() {
        Ok(a) => Ok(Estimate::exact(a)),
        Err(_) => Ok(region_area(region, AreaMode::MonteCarlo { samples: c.samples, mc: mc(c) })?),
    }
}

fn row(command: &'static str, c: &Common, n: usize, area: f64) -> Row {
    Row {
        command,
        seed: c.seed,
        n,
        area_exact_or_mc: area,
        estimate: 0.0,
        stderr: 0.0,
        bound: None,
        status: "ok".into(),
        samples_used: 0,
        wall_ms: 0,
    }
}

fn area(c: &Common) -> Result<Row> {
    let region = load_region(&c.region)?;
    let est = region_area(&region, AreaMode::MonteCarlo { samples: c.samples, mc: mc(c) })?;
    let exact = region.exact_area().ok();
    let status = match exact {
        Some(a) if est.agrees_with(&Estimate::exact(a), 4.0) => "agrees",
        Some(_) => "disagrees",
        None => "mc_only",
    };
    Ok(Row {
        estimate: est.value,
        stderr: est.stderr,
        bound: exact,
        status: status.into(),
        samples_used: c.samples,
        ..row("area", c, 0, exact.unwrap_or(est.value))
    })
}

fn problem(p: &PointArgs) -> Result<(PlacementProblem, Estimate)> {
    let region = load_region(&p.common.region)?;
    let area = area_of(&region, &p.common)?;
    Ok((PlacementProblem::new(region, load_points(p)?), area))
}

fn expected(p: &PointArgs) -> Result<Row> {
    let (prob, area) = problem(p)?;
    let c = &p.common;
    let est = expected_count(&prob, c.samples, mc(c))?;
    Ok(Row {
        estimate: est.value,
        stderr: est.stderr,
        bound: Some(prob.n() as f64 * area.value),
        samples_used: c.samples,
        ..row("expected-count", c, prob.n(), area.value)
    })
}

fn measure(p: &PointArgs) -> Result<Row> {
    let (prob, _) = problem(p)?;
    let c = &p.common;
    let gm = good_rotation_measure(&prob, c.samples, mc(c))?;
    Ok(Row {
        estimate: gm.estimate.value,
        stderr: gm.estimate.stderr,
        bound: Some(gm.lower_bound),
        samples_used: c.samples,
        ..row("measure", c, prob.n(), gm.area)
    })
}

fn place(p: &PlaceArgs) -> Result<(Row, u8)> {
    let (prob, area) = problem(&p.points)?;
    let c = &p.points.common;
    let res = find_placement(&prob, p.budget, mc(c), p.refine)?;
    let (status, code) = match res.status {
        PlacementStatus::Found => ("found", EXIT_OK),
        PlacementStatus::NotFound => ("not_found", EXIT_NOT_FOUND),
    };
    if let Some(r) = &res.rotation {
        eprintln!("rotation: {}", serde_json::to_string(r)?);
    }
    let row = Row {
        estimate: res.best_hits as f64,
        bound: Some(prob.lower_bound_for_area(area.value)),
        status: status.into(),
        samples_used: res.samples_used,
        ..row("place", c, prob.n(), area.value)
    };
    Ok((row, code))
}

fn sharpness(s: &SharpnessArgs) -> Result<Row> {
    let (prob, area) = problem(&s.points)?;
    let c = &s.points.common;
    let res = adversarial_min_search(&prob.region, &prob.points, s.budget, s.refine_steps, mc(c))?;
    eprintln!("witness: {}", serde_json::to_string(&res.witness)?);
    let status = if res.min_hits == 0 { "avoidable" } else { "blocked" };
    Ok(Row {
        estimate: res.min_hits as f64,
        // Averaging gives min ≤ E[hits] = n·A(obstruction).
        bound: Some(prob.n() as f64 * area.value),
        status: status.into(),
        samples_used: res.evaluated,
        ..row("sharpness", c, prob.n(), area.value)
    })
}

#[derive(Serialize)]
struct Report<'a> {
    passed: bool,
    validation: &'a PlanValidation,
    rounds: &'a [RoundDiagnostics],
}

fn transport(t: &TransportArgs) -> Result<(Row, u8)> {
    let c = &t.common;
    let m = load_region(&c.region)?;
    let m_prime = load_region(&t.region2)?;
    let plan = match &t.validate {
        Some(path) => TransportPlan::from_json_file(path)?,
        None => {
            let defaults = TransportConfig::default();
            let cfg = TransportConfig {
                theta: t.theta.unwrap_or(defaults.theta),
                epsilon: t.epsilon.unwrap_or(defaults.epsilon),
                mc: mc(c),
                ..defaults
            };
            let plan = build_transport_plan(&m, &m_prime, &cfg)?;
            std::fs::write(&t.plan_out, plan.to_json_string())
                .with_context(|| format!("writing {}", t.plan_out.display()))?;
            plan
        }
    };
    let v = validate_plan(&plan, &m, &m_prime, c.samples, mc(c));
    let passed = v.passed();
    write_json(
        &Report {
            passed,
            validation: &v,
            rounds: &plan.rounds,
        },
        &t.report_out,
    )?;
    let coverage = Estimate::binomial((v.coverage_rate * v.coverage_samples as f64).round() as u64, v.coverage_samples.max(1));
    let row = Row {
        estimate: v.coverage_rate,
        stderr: coverage.stderr,
        bound: Some(COVERAGE_THRESHOLD),
        status: if passed { "passed" } else { "failed" }.into(),
        samples_used: v.coverage_samples + v.containment_samples,
        ..row("transport", c, plan.pairs.len(), area_of(&m, c)?.value)
    };
    Ok((row, if passed { EXIT_OK } else { EXIT_PLAN_FAILED }))
}
