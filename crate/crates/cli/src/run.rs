use std::fmt::Write as _;

use dydy::atlas::{verify_by_id, Atlas, Claim, TreeDocument, TreeKind, VerifierTrace};
use dydy::dynamics::{
    classify_parameter, classify_point_orbit, find_cycle_hensel, pcf_parameter, CycleRecord,
    OrbitClass, OrbitOptions, ParameterLabel, ParameterReport, ParameterRoute, PcfParameter,
    PointReport, TrapLibrary,
};
use dydy::geometry::{newton_polygon, NewtonPolygon, Verdict};
use dydy::poly::FamilyMember;
use dydy::Error;
use serde::{Deserialize, Serialize};

use crate::args::{residue_str, Command, Format, RunConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    Unknown,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Certified => 0,
            Status::Unknown => 2,
        }
    }
}

#[derive(Debug)]
pub enum Failure {
    /// Bad input or a request outside a theorem's range.
    Usage(String),
    /// The computation ran but could not certify its claim.
    NotCertified(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::NotCertified(_) => 2,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::NotCertified(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Parse(_) => Failure::Usage(e.to_string()),
            _ => Failure::NotCertified(e.to_string()),
        }
    }
}

pub struct Emitted {
    pub document: String,
    pub status: Status,
}

/// Newton polygon output, with the root valuations it implies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonReport {
    pub poly: String,
    pub degree: usize,
    pub polygon: NewtonPolygon,
    /// `(v2(root), count)` pairs, `v2` as a reduced fraction.
    pub root_valuations: Vec<(String, usize)>,
}

fn render<T: Serialize>(
    format: Format,
    value: &T,
    text: impl FnOnce(&T) -> String,
) -> Result<String, Failure> {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value)
                .map_err(|e| Failure::NotCertified(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Text => Ok(text(value)),
        Format::Dot => Err(Failure::Usage(
            "--format dot is only available for mandel-tree and julia-tree".into(),
        )),
    }
}

fn orbit_options(cfg: &RunConfig) -> OrbitOptions {
    OrbitOptions {
        max_iters: cfg.max_iters,
        precision: cfg.precision,
        traps: std::sync::Arc::new(TrapLibrary::seeded()),
        ..OrbitOptions::default()
    }
}

pub fn run(command: &Command, cfg: &RunConfig) -> Result<Emitted, Failure> {
    match command {
        Command::ClassifyParameter { t } => {
            let report = classify_parameter(t, &orbit_options(cfg));
            let status = match report.label {
                ParameterLabel::Unknown => Status::Unknown,
                _ => Status::Certified,
            };
            Ok(Emitted {
                document: render(cfg.format, &report, parameter_text)?,
                status,
            })
        }
        Command::ClassifyPoint { t, z } => {
            let report =
                classify_point_orbit(&FamilyMember::new(t.clone()), z, &orbit_options(cfg));
            let status = if report.class.bounded().is_some() {
                Status::Certified
            } else {
                Status::Unknown
            };
            Ok(Emitted {
                document: render(cfg.format, &report, point_text)?,
                status,
            })
        }
        Command::MandelTree { depth } => tree(TreeKind::Mandelbrot, *depth, cfg),
        Command::JuliaTree { depth } => tree(TreeKind::Julia, *depth, cfg),
        Command::Verify { theorem, n } => {
            let trace = verify_by_id(theorem, *n, Some(cfg.precision))?;
            let status = match trace.verdict {
                Verdict::Certified => Status::Certified,
                Verdict::Rejected => Status::Unknown,
            };
            Ok(Emitted {
                document: render(cfg.format, &trace, trace_text)?,
                status,
            })
        }
        Command::PcfFind { n } => {
            let p = pcf_parameter(*n, cfg.precision)?;
            Ok(Emitted {
                document: render(cfg.format, &p, pcf_text)?,
                status: Status::Certified,
            })
        }
        Command::NewtonPolygon { poly } => {
            let polygon = newton_polygon(&poly.poly)?;
            let report = NewtonReport {
                poly: poly.label.clone(),
                degree: poly.poly.degree().unwrap_or(0),
                root_valuations: polygon
                    .root_valuations()
                    .into_iter()
                    .map(|(v, c)| (v.to_string(), c))
                    .collect(),
                polygon,
            };
            Ok(Emitted {
                document: render(cfg.format, &report, newton_text)?,
                status: Status::Certified,
            })
        }
        Command::CycleFind { period, seed, t } => {
            let rec =
                find_cycle_hensel(&FamilyMember::new(t.clone()), *period, seed, cfg.precision)?;
            Ok(Emitted {
                document: render(cfg.format, &rec, cycle_text)?,
                status: Status::Certified,
            })
        }
    }
}

fn tree(kind: TreeKind, depth: i64, cfg: &RunConfig) -> Result<Emitted, Failure> {
    let jobs = cfg
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let atlas = Atlas::with_budget(jobs, cfg.max_iters, cfg.precision);
    let doc: TreeDocument = atlas.document(kind, depth)?;
    let document = match cfg.format {
        Format::Dot => doc.tree.to_dot(),
        f => render(f, &doc, |d| d.tree.to_text())?,
    };
    Ok(Emitted {
        document,
        status: Status::Certified,
    })
}

fn class_text(class: &OrbitClass) -> String {
    match class {
        OrbitClass::Escapes { at_iterate } => {
            format!("escapes (certified at iterate {at_iterate})")
        }
        OrbitClass::Preperiodic { preperiod, period } => {
            format!("preperiodic (preperiod {preperiod}, period {period})")
        }
        OrbitClass::TrappedQ2 {
            trap_id,
            entry_iterate,
        } => {
            format!("bounded: iterate {entry_iterate} enters {trap_id}")
        }
        OrbitClass::Unknown { max_iterates_used } => {
            format!("unknown after {max_iterates_used} iterates")
        }
    }
}

fn parameter_text(r: &ParameterReport) -> String {
    let how = match &r.route {
        ParameterRoute::SmallParameter => "|t| <= 1/2, so Z_2 is invariant".to_string(),
        ParameterRoute::LargeParameter => "|t| > 1, so f_t(1) already escapes".to_string(),
        ParameterRoute::CriticalOrbit { report } => {
            format!("critical orbit {}", class_text(&report.class))
        }
    };
    format!("t = {}: {:?} ({how})\n", r.t, r.label)
}

fn point_text(r: &PointReport) -> String {
    let mut s = format!("t = {}, z = {}: {}\n", r.t, r.z, class_text(&r.class));
    if let Some(d) = &r.trap_disk {
        let _ = writeln!(s, "trap disk {d}");
    }
    let _ = writeln!(
        s,
        "orbit: {}{}",
        r.iterates.join(", "),
        if r.iterates_truncated { ", ..." } else { "" }
    );
    s
}

fn trace_text(t: &VerifierTrace) -> String {
    let mut s = format!("{} n = {}: {:?}\n", t.theorem_id, t.n, t.verdict);
    for (name, d) in &t.disks {
        let _ = writeln!(s, "  {name} = {d}");
    }
    for (i, step) in t.steps.iter().enumerate() {
        let claim = match &step.claim {
            Claim::Contains { quantity, disk } => format!("{quantity} in {disk}"),
            Claim::Maps {
                map,
                source,
                target,
            } => format!("{map}: {source} -> {target}"),
            Claim::AbsEquals { quantity, log2 } => format!("|{quantity}| = 2^{log2}"),
            Claim::AbsAtMost { quantity, log2 } => format!("|{quantity}| <= 2^{log2}"),
            Claim::Trapped { disk, trap_id } => format!("{disk} is a disk of {trap_id}"),
        };
        let _ = writeln!(s, "  {:>3}. [{}] {claim}", i + 1, step.operation);
    }
    for (k, v) in &t.facts {
        let _ = writeln!(s, "  {k} = {v}");
    }
    s
}

fn pcf_text(p: &PcfParameter) -> String {
    format!(
        "n = {}: t_n = 1 + s_n with v2(s_n) = {}\nt_n = {} (abs precision {})\nf^n(0) = 0 mod 2^{}, multiplier v2 = {} ({:?})\n",
        p.n, p.s_val, p.t_approx, p.t_abs_prec, p.verified_bits, p.multiplier.val, p.multiplier.nature
    )
}

fn newton_text(r: &NewtonReport) -> String {
    let mut s = format!("{} (degree {})\nvertices:", r.poly, r.degree);
    for (i, v) in &r.polygon.vertices {
        let _ = write!(s, " ({i}, {v})");
    }
    s.push('\n');
    for (v, c) in &r.root_valuations {
        let _ = writeln!(s, "  {c} root(s) with v2 = {v}");
    }
    s
}

fn cycle_text(c: &CycleRecord) -> String {
    let r = c.seed.rexp + 1;
    let mut s = format!(
        "period {} cycle of f_t, t = {}, from {}\n",
        c.period, c.t, c.seed
    );
    for (i, z) in c.points.iter().enumerate() {
        let _ = writeln!(s, "  z_{i} = {}", residue_str(z, r));
    }
    let _ = writeln!(s, "multiplier abs {} ({:?})", c.multiplier_abs, c.nature);
    s
}
