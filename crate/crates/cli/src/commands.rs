use std::fmt;
use std::fs;
use std::path::Path;

use hrflow::blowup::{blowup_options, rescale_at, soliton_limit};
use hrflow::catalog;
use hrflow::classify::analyze;
use hrflow::einstein::{
    critical_directions, einstein_roots, einstein_scale_constants, scalar_zero_directions,
};
use hrflow::flow::{integrate, IntegrationOptions, MetricState, Trajectory};
use hrflow::io::{self as hio, real, variant_name};
use hrflow::json::{parse_space, space_to_json};
use hrflow::portrait::{sample_portrait, GridSpec};
use hrflow::space::{validate as check, FlowCoefficients, GeneralSpace, TwoSummandSpace};
use hrflow::sweep::{run_sweep, Spacing, SweepSpec};
use hrflow::Error;
use serde_json::json;

use crate::output::{io_failure, Sink};
use crate::{Format, Global, Initial};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Invalid = 2,
    Undetermined = 3,
    Io = 4,
}

#[derive(Debug)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Io(_) => Status::Io,
            Error::NotCollapsed
            | Error::Unclassified(_)
            | Error::InsufficientHorizon
            | Error::BlowupDetected { .. } => Status::Undetermined,
            _ => Status::Invalid,
        };
        Failure::new(status, e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn looks_like_path(r: &str) -> bool {
    r.ends_with(".json") || r.contains('/') || r.contains('\\')
}

fn load_space(g: &Global) -> Result<GeneralSpace, Failure> {
    let Some(r) = g.space.as_deref() else {
        return Err(Failure::new(Status::Invalid, "--space is required"));
    };
    let path = Path::new(r);
    if !path.is_file() {
        match catalog::lookup(r) {
            Ok(s) => return Ok(s),
            Err(e) if !looks_like_path(r) => return Err(e.into()),
            Err(_) => {}
        }
    }
    let text = fs::read_to_string(path).map_err(|e| io_failure(path, e))?;
    parse_space(&text).map_err(|e| Failure::new(Status::Invalid, format!("{}: {e}", path.display())))
}

fn load_two(g: &Global) -> Result<(TwoSummandSpace, FlowCoefficients), Failure> {
    let space = TwoSummandSpace::new(load_space(g)?)?;
    let c = FlowCoefficients::derive(&space)?;
    Ok((space, c))
}

fn options(g: &Global, base: IntegrationOptions) -> Result<IntegrationOptions, Failure> {
    let mut o = base;
    if let Some(v) = g.rel_tol {
        o.rel_tol = v;
    }
    if let Some(v) = g.abs_tol {
        o.abs_tol = v;
    }
    if let Some(v) = g.collapse_eps {
        o.collapse_epsilon = v;
    }
    if let Some(v) = g.horizon {
        o.max_time = v;
    }
    o.validate()?;
    Ok(o)
}

fn initial_state(i: &Initial) -> Result<MetricState, Failure> {
    let s = match (i.x1, i.x2, i.y0) {
        (Some(x1), Some(x2), None) => MetricState::new(0.0, x1, x2),
        (None, None, Some(y0)) => MetricState::from_ratio(y0, i.scale),
        _ => {
            return Err(Failure::new(
                Status::Invalid,
                "give either --x1 and --x2, or --y0 (with optional --scale)",
            ))
        }
    };
    if !s.is_riemannian() {
        return Err(Failure::new(
            Status::Invalid,
            format!("initial metric must be positive, got x1 = {}, x2 = {}", s.x1, s.x2),
        ));
    }
    Ok(s)
}

fn ext(g: &Global) -> &'static str {
    match g.format {
        Format::Csv => "csv",
        Format::Json => "json",
    }
}

fn write_trajectory(sink: &Sink, g: &Global, stem: &str, t: &Trajectory) -> Outcome {
    let name = format!("{stem}.{}", ext(g));
    match g.format {
        Format::Csv => sink.emit(&name, false, |w| hio::write_trajectory_csv(w, t)),
        Format::Json => sink.emit(&name, false, |w| hio::write_json(w, t)),
    }
}

pub fn catalog(g: &Global) -> Outcome {
    let sink = Sink::new(g.out.as_deref())?;
    if g.space.is_some() {
        let space = load_space(g)?;
        return sink.emit("space.json", true, |w| {
            writeln!(w, "{}", space_to_json(&space))?;
            Ok(())
        });
    }
    let entries: Vec<_> = catalog::catalog()
        .into_iter()
        .map(|s| {
            let kind = match TwoSummandSpace::new(s.clone()) {
                Ok(t) => variant_name(&t.kind()),
                Err(_) => "irreducible".to_string(),
            };
            (s, kind)
        })
        .collect();
    match g.format {
        Format::Csv => sink.emit("catalog.csv", true, |w| {
            writeln!(w, "name,summands,dims,kind")?;
            for (s, kind) in &entries {
                let dims: Vec<String> = s.dims.iter().map(u32::to_string).collect();
                writeln!(w, "{},{},{},{}", s.name, s.summands(), dims.join(" "), kind)?;
            }
            Ok(())
        }),
        Format::Json => {
            let list: Vec<_> = entries
                .iter()
                .map(|(s, kind)| json!({"name": s.name, "summands": s.summands(), "dims": s.dims, "kind": kind}))
                .collect();
            sink.emit("catalog.json", true, |w| hio::write_json(w, &list))
        }
    }
}

pub fn validate(g: &Global) -> Outcome {
    let space = load_space(g)?;
    let report = check(&space);
    let mut doc = json!({
        "name": space.name,
        "summands": space.summands(),
        "dims": space.dims,
        "ok": report.ok,
        "violations": report.violations,
    });
    if report.ok && space.summands() == 2 {
        match TwoSummandSpace::new(space.clone()).and_then(|t| FlowCoefficients::derive(&t)) {
            Ok(c) => doc["coefficients"] = json!(c),
            Err(e) => doc["note"] = json!(e.to_string()),
        }
    }
    Sink::new(g.out.as_deref())?.emit("validation.json", true, |w| hio::write_json(w, &doc))?;
    if report.ok {
        Ok(())
    } else {
        Err(Failure::new(Status::Invalid, format!("invalid space: {}", report.summary())))
    }
}

pub fn einstein(g: &Global) -> Outcome {
    let (space, c) = load_two(g)?;
    let es = einstein_roots(&c);
    let scales: Vec<_> = es
        .values()
        .into_iter()
        .map(|r| match einstein_scale_constants(&c, r) {
            Ok((k1, k2)) => json!({"root": r, "k1": k1, "k2": k2}),
            Err(e) => json!({"root": r, "error": e.to_string()}),
        })
        .collect();
    let critical = match &c {
        FlowCoefficients::Maximal(m) => json!(critical_directions(m)),
        FlowCoefficients::NonMaximal(_) => json!(null),
    };
    let doc = json!({
        "space": space.name(),
        "coefficients": c,
        "einstein": es,
        "scale_constants": scales,
        "critical_directions": critical,
        "scalar_zero": scalar_zero_directions(&c),
    });
    Sink::new(g.out.as_deref())?.emit("einstein.json", true, |w| hio::write_json(w, &doc))
}

pub fn flow(g: &Global, initial: &Initial, backward: bool) -> Outcome {
    let (space, c) = load_two(g)?;
    let init = initial_state(initial)?;
    let opts = options(g, IntegrationOptions::forward())?;
    let sink = Sink::new(g.out.as_deref())?;
    let a = analyze(&c, init, &opts)?;
    write_trajectory(&sink, g, "forward", &a.forward)?;
    if backward {
        write_trajectory(&sink, g, "backward", &a.backward)?;
    }
    let doc = json!({
        "space": space.name(),
        "initial": init,
        "options": opts,
        "report": a.report,
    });
    sink.emit("report.json", true, |w| hio::write_json(w, &doc))?;
    if a.report.is_undetermined() {
        return Err(Failure::new(Status::Undetermined, "singularity type undetermined"));
    }
    Ok(())
}

pub fn portrait(g: &Global, grid: &str) -> Outcome {
    let (_, c) = load_two(g)?;
    let grid: GridSpec = grid.parse()?;
    let (rows, lines) = sample_portrait(&c, &grid)?;
    let sink = Sink::new(g.out.as_deref())?;
    match g.format {
        Format::Csv => sink.emit("portrait.csv", true, |w| hio::write_portrait_csv(w, &rows))?,
        Format::Json => sink.emit("portrait.json", true, |w| hio::write_json(w, &rows))?,
    }
    sink.emit("portrait_lines.json", false, |w| hio::write_json(w, &lines))
}

pub fn sweep(g: &Global, lo: f64, hi: f64, count: usize, spacing: Spacing, scale: f64) -> Outcome {
    let (_, c) = load_two(g)?;
    let spec = SweepSpec {
        lo,
        hi,
        count,
        spacing,
        seed: g.seed,
        scale,
    };
    let opts = options(g, IntegrationOptions::forward())?;
    let rows = run_sweep(&c, &spec, &opts)?;
    let sink = Sink::new(g.out.as_deref())?;
    match g.format {
        Format::Csv => sink.emit("sweep.csv", true, |w| hio::write_sweep_csv(w, &rows))?,
        Format::Json => sink.emit("sweep.json", true, |w| hio::write_json(w, &rows))?,
    }
    let undetermined = rows.iter().filter(|r| r.is_undetermined()).count();
    if undetermined > 0 {
        return Err(Failure::new(
            Status::Undetermined,
            format!("{undetermined} of {} rows have an undetermined singularity type", rows.len()),
        ));
    }
    Ok(())
}

pub fn blowup(g: &Global, initial: &Initial) -> Outcome {
    let (space, c) = load_two(g)?;
    let init = initial_state(initial)?;
    let opts = options(g, blowup_options())?;
    let traj = integrate(&c, init, &opts)?;
    let limit = soliton_limit(&traj, &einstein_roots(&c));
    let sink = Sink::new(g.out.as_deref())?;
    let mut doc = json!({
        "space": space.name(),
        "initial": init,
        "options": opts,
        "termination": traj.termination,
        "t_estimate": traj.t_estimate,
        "limit": null,
    });
    match &limit {
        Ok(l) => doc["limit"] = json!(l),
        Err(e) => doc["error"] = json!(e.to_string()),
    }
    if let (true, Some(t_sing)) = (sink.to_dir(), traj.t_estimate) {
        let rescaled: Vec<_> = traj
            .samples
            .iter()
            .map(|s| rescale_at(&traj, s.state.t).map(|r| (r, (t_sing - s.state.t) * r.kappa)))
            .collect::<hrflow::Result<_>>()?;
        sink.emit(&format!("rescaled.{}", ext(g)), false, |w| match g.format {
            Format::Csv => {
                writeln!(w, "t,kappa,kappa_x1,kappa_x2,rescaled_gap")?;
                for (r, gap) in &rescaled {
                    writeln!(
                        w,
                        "{},{},{},{},{}",
                        real(r.t_base),
                        real(r.kappa),
                        real(r.x1),
                        real(r.x2),
                        real(*gap)
                    )?;
                }
                Ok(())
            }
            Format::Json => hio::write_json(w, &rescaled.iter().map(|(r, _)| r).collect::<Vec<_>>()),
        })?;
    }
    sink.emit("blowup.json", true, |w| hio::write_json(w, &doc))?;
    limit.map(|_| ()).map_err(Failure::from)
}
