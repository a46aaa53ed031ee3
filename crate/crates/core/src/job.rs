//! Job files: parsing, validation and dispatch.
//!
//! ```text
//! {"command": "dist",
//!  "function": {"domain": "halfline", "pieces": [...], "tail": {...}},
//!  "space": {"kind": "sum_lp_linf", "p": 2, "domain": "halfline"}}
//! ```

use crate::cesaro::{cesaro_apply, cx_norm};
use crate::error::{Error, Result};
use crate::generators::{OrliczFn, QuasiConcaveFn};
use crate::ideal_quotient::{
    am_property_probe, build_witness, cesaro_copy_check, dist_oc, discrete_oc_membership, hudzik_check,
    modular_domination_check, trivial_ideal_copy_check, verify_witness, CheckReport, DistResult, WitnessSpec,
};
use crate::literal::{FnLit, FunctionLit, OrliczDe, OrliczLit, PhiDe, PhiLit, SpaceDe, SpaceLit};
use crate::measurable_fn::{Domain, Function};
use crate::rearrangement::{rearrange, Rearranged};
use crate::report::{self, Format};
use crate::sample::DEFAULT_SEED;
use crate::scalar::{Ext, ExtLit, Lit, Q};
use crate::spaces::{norm, Config, EvalResult, SpaceSpec};
use crate::suite::{digest, report_rows, run_paper_suite, Row, SuiteOptions};
use num_traits::{One, Zero};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Reader that hands out one byte per call and records how far it got, so
/// errors raised after a value was read can still be located.
struct Counting<'a> {
    data: &'a [u8],
    pos: std::rc::Rc<std::cell::Cell<usize>>,
}

impl std::io::Read for Counting<'_> {
    fn read(&mut self, buf: &mut [u8]) -> std::io::Result<usize> {
        let at = self.pos.get();
        if at >= self.data.len() || buf.is_empty() {
            return Ok(0);
        }
        buf[0] = self.data[at];
        self.pos.set(at + 1);
        Ok(1)
    }
}

/// 1-based line and column of byte `offset`.
fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text.as_bytes()[..offset.min(text.len())];
    let line = before.iter().filter(|&&b| b == b'\n').count() + 1;
    let start = before.iter().rposition(|&b| b == b'\n').map(|i| i + 1).unwrap_or(0);
    (line, String::from_utf8_lossy(&before[start..]).chars().count() + 1)
}

/// Deserialise JSON, turning failures into [`Error::Parse`] with the path of
/// the offending field and its position.
pub fn from_json<T: DeserializeOwned>(text: &str, root: &str) -> Result<T> {
    let pos = std::rc::Rc::new(std::cell::Cell::new(0));
    let reader = Counting {
        data: text.as_bytes(),
        pos: pos.clone(),
    };
    let mut de = serde_json::Deserializer::from_reader(reader);
    let value: T = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let message = inner.to_string();
        let message = message.split(" at line ").next().unwrap_or(&message).to_string();
        let top = path == "." || path == "?";
        let mut field = if top { root.to_string() } else { format!("{root}.{path}") };
        if let Some(missing) = message.strip_prefix("missing field `").and_then(|m| m.split('`').next()) {
            field = if top { missing.to_string() } else { format!("{root}.{path}.{missing}") };
        }
        let (line, column) = if inner.line() == 0 {
            // Raised while validating a value that was read in full: point at
            // its last character.
            line_col(text, pos.get().saturating_sub(1))
        } else {
            (inner.line(), inner.column())
        };
        Error::Parse {
            field,
            line,
            column,
            message,
        }
    })?;
    de.end().map_err(|e| Error::Parse {
        field: root.into(),
        line: e.line(),
        column: e.column(),
        message: "trailing characters".into(),
    })?;
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckId {
    Hudzik,
    CesaroCopy,
    TrivialIdealCopy,
    Modular,
    Am,
    DiscreteOc,
}

impl CheckId {
    pub fn name(&self) -> &'static str {
        match self {
            CheckId::Hudzik => "hudzik",
            CheckId::CesaroCopy => "cesaro-copy",
            CheckId::TrivialIdealCopy => "trivial-ideal-copy",
            CheckId::Modular => "modular",
            CheckId::Am => "am",
            CheckId::DiscreteOc => "discrete-oc",
        }
    }

    /// Accepts the canonical names and the aliases `thm41`, `thm46`.
    pub fn parse(s: &str) -> Option<CheckId> {
        Some(match s {
            "hudzik" => CheckId::Hudzik,
            "cesaro-copy" | "thm41" => CheckId::CesaroCopy,
            "trivial-ideal-copy" | "thm46" => CheckId::TrivialIdealCopy,
            "modular" => CheckId::Modular,
            "am" => CheckId::Am,
            "discrete-oc" => CheckId::DiscreteOc,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessKind {
    DisjointBlocks,
    Marcinkiewicz,
    FlatLorentz,
}

impl WitnessKind {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessKind::DisjointBlocks => "disjoint-blocks",
            WitnessKind::Marcinkiewicz => "marcinkiewicz",
            WitnessKind::FlatLorentz => "flat-lorentz",
        }
    }

    pub fn parse(s: &str) -> Option<WitnessKind> {
        Some(match s {
            "disjoint-blocks" => WitnessKind::DisjointBlocks,
            "marcinkiewicz" => WitnessKind::Marcinkiewicz,
            "flat-lorentz" => WitnessKind::FlatLorentz,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Norm,
    Rearrange,
    Cesaro,
    Dist,
    Check(CheckId),
    Witness(WitnessKind),
    Report,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Rearrange => "rearrange",
            Command::Cesaro => "cesaro",
            Command::Dist => "dist",
            Command::Check(_) => "check",
            Command::Witness(_) => "witness",
            Command::Report => "report",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsLit {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Lit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<ExtLit>,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Expected value for `norm` and `dist`; the job fails when missed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expect: Option<f64>,
}

/// A job file as written.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobLit {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FnLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<FnLit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceDe>,
    #[serde(default, rename = "F", skip_serializing_if = "Option::is_none")]
    pub orlicz: Option<OrliczDe>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiDe>,
    #[serde(default, skip_serializing_if = "is_default")]
    pub params: ParamsLit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub require_bound_rule: bool,
}

fn is_default(p: &ParamsLit) -> bool {
    p == &ParamsLit::default()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    pub a: Option<Q>,
    pub b: Option<Ext>,
    pub m: Option<f64>,
    pub k: Option<usize>,
    pub tol: Option<f64>,
    pub expect: Option<f64>,
}

/// A validated job.
#[derive(Debug, Clone, PartialEq)]
pub struct JobSpec {
    pub command: Command,
    pub function: Option<Function>,
    pub g: Option<Function>,
    pub space: Option<SpaceSpec>,
    pub orlicz: Option<OrliczFn>,
    pub phi: Option<QuasiConcaveFn>,
    pub params: Params,
    pub format: Format,
    pub seed: Option<u64>,
    pub filter: Option<String>,
    pub require_bound_rule: bool,
}

/// 1-based line and column of the first occurrence of `"key"` in `text`, or
/// of the end of the document.
fn locate(text: &str, key: Option<&str>) -> (usize, usize) {
    let at = key
        .and_then(|k| text.find(&format!("\"{k}\"")))
        .unwrap_or_else(|| text.trim_end().len().saturating_sub(1));
    line_col(text, at)
}

/// Parse and validate a job.
pub fn parse_job(text: &str) -> Result<JobSpec> {
    let lit: JobLit = from_json(text, "job")?;
    let fail = |field: &str, at: Option<&str>, message: String| {
        let (line, column) = locate(text, at);
        Error::Parse {
            field: field.into(),
            line,
            column,
            message,
        }
    };
    let missing = |field: &str| fail(field, None, format!("missing field `{field}`"));

    let command = match lit.command.as_str() {
        "norm" => Command::Norm,
        "rearrange" => Command::Rearrange,
        "cesaro" => Command::Cesaro,
        "dist" => Command::Dist,
        "report" => Command::Report,
        "check" => {
            let id = lit.check.as_deref().ok_or_else(|| missing("check"))?;
            Command::Check(CheckId::parse(id).ok_or_else(|| {
                fail(
                    "check",
                    Some("check"),
                    format!("unknown check `{id}` (hudzik, cesaro-copy, trivial-ideal-copy, modular, am, discrete-oc)"),
                )
            })?)
        }
        "witness" => {
            let w = lit.witness.as_deref().ok_or_else(|| missing("witness"))?;
            Command::Witness(WitnessKind::parse(w).ok_or_else(|| {
                fail(
                    "witness",
                    Some("witness"),
                    format!("unknown witness `{w}` (disjoint-blocks, marcinkiewicz, flat-lorentz)"),
                )
            })?)
        }
        other => {
            return Err(fail(
                "command",
                Some("command"),
                format!("unknown command `{other}` (norm, rearrange, cesaro, dist, check, witness, report)"),
            ))
        }
    };
    if lit.check.is_some() && !matches!(command, Command::Check(_)) {
        return Err(fail("check", Some("check"), "`check` is only used with the check command".into()));
    }
    if lit.witness.is_some() && !matches!(command, Command::Witness(_)) {
        return Err(fail("witness", Some("witness"), "`witness` is only used with the witness command".into()));
    }
    let format = match &lit.format {
        None => Format::default(),
        Some(s) => s.parse().map_err(|_| fail("format", Some("format"), format!("expected json, csv or table, got `{s}`")))?,
    };
    let p = lit.params;
    let params = Params {
        a: p.a.map(|x| x.0),
        b: p.b.map(|x| x.0),
        m: p.m,
        k: p.k,
        tol: p.tol,
        expect: p.expect,
    };
    if let Some(t) = params.tol {
        if !(t.is_finite() && t >= 0.0) {
            return Err(fail("params.tol", Some("tol"), format!("tolerance must be finite and non-negative, got {t}")));
        }
    }
    let job = JobSpec {
        command,
        function: lit.function.map(|f| f.0),
        g: lit.g.map(|f| f.0),
        space: lit.space.map(|x| x.0),
        orlicz: lit.orlicz.map(|x| x.0),
        phi: lit.phi.map(|x| x.0),
        params,
        format,
        seed: lit.seed,
        filter: lit.filter,
        require_bound_rule: lit.require_bound_rule,
    };

    // Required inputs per command.
    let needs: &[&str] = match command {
        Command::Norm | Command::Dist => &["function", "space"],
        Command::Rearrange | Command::Cesaro => &["function"],
        Command::Check(CheckId::Am) => &["function", "g", "space"],
        Command::Check(CheckId::Modular) => &["function", "space", "F", "M"],
        Command::Check(_) => &["function", "space"],
        Command::Witness(WitnessKind::DisjointBlocks) => &["function", "space", "k"],
        Command::Witness(WitnessKind::Marcinkiewicz) => &["space", "a", "k"],
        Command::Witness(WitnessKind::FlatLorentz) => &["space", "k"],
        Command::Report => &[],
    };
    for need in needs {
        let present = match *need {
            "function" => job.function.is_some(),
            "g" => job.g.is_some(),
            "space" => job.space.is_some(),
            "F" => job.orlicz.is_some(),
            "M" => job.params.m.is_some(),
            "a" => job.params.a.is_some(),
            "k" => job.params.k.is_some(),
            _ => true,
        };
        if !present {
            let field = if ["M", "a", "k"].contains(need) { format!("params.{need}") } else { need.to_string() };
            return Err(fail(&field, None, format!("`{}` needs `{field}`", command.name())));
        }
    }
    if let (Some(f), Some(x)) = (&job.function, &job.space) {
        if f.domain() != x.domain {
            return Err(fail(
                "function.domain",
                Some("function"),
                format!("function on {} but space on {}", f.domain().name(), x.domain.name()),
            ));
        }
    }
    if let (Some(g), Some(x)) = (&job.g, &job.space) {
        if g.domain() != x.domain {
            return Err(fail("g.domain", Some("g"), format!("g on {} but space on {}", g.domain().name(), x.domain.name())));
        }
    }
    if command == Command::Check(CheckId::DiscreteOc) && job.function.as_ref().map(|f| f.domain()) != Some(Domain::Naturals) {
        return Err(fail("function.domain", Some("function"), "discrete-oc needs a sequence".into()));
    }
    if matches!(command, Command::Witness(WitnessKind::Marcinkiewicz | WitnessKind::FlatLorentz)) && job.phi.is_none() {
        let from_space = job.space.as_ref().and_then(space_phi);
        if from_space.is_none() {
            return Err(missing("phi"));
        }
    }
    Ok(job)
}

fn space_phi(x: &SpaceSpec) -> Option<QuasiConcaveFn> {
    match &x.kind {
        crate::spaces::SpaceKind::Lorentz(p) | crate::spaces::SpaceKind::Marcinkiewicz(p) => Some(p.clone()),
        _ => None,
    }
}

/// Canonical JSON of a job. `serialize(parse(serialize(j))) = serialize(j)`.
pub fn serialize_job(job: &JobSpec) -> String {
    let (check, witness) = match job.command {
        Command::Check(c) => (Some(c.name().to_string()), None),
        Command::Witness(w) => (None, Some(w.name().to_string())),
        _ => (None, None),
    };
    let lit = JobLit {
        command: job.command.name().into(),
        check,
        witness,
        function: job.function.clone().map(FnLit),
        g: job.g.clone().map(FnLit),
        space: job.space.clone().map(SpaceDe),
        orlicz: job.orlicz.clone().map(OrliczDe),
        phi: job.phi.clone().map(PhiDe),
        params: ParamsLit {
            a: job.params.a.clone().map(Lit),
            b: job.params.b.clone().map(ExtLit),
            m: job.params.m,
            k: job.params.k,
            tol: job.params.tol,
            expect: job.params.expect,
        },
        format: Some(
            match job.format {
                Format::Json => "json",
                Format::Csv => "csv",
                Format::Table => "table",
            }
            .into(),
        ),
        seed: job.seed,
        filter: job.filter.clone(),
        require_bound_rule: job.require_bound_rule,
    };
    let mut s = serde_json::to_string_pretty(&lit).expect("job serialises");
    s.push('\n');
    s
}

/// Settings a front end may impose on a job.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub format: Option<Format>,
    pub filter: Option<String>,
    pub require_bound_rule: bool,
    pub max_depth: Option<u32>,
}

/// Rendered output of a job and its exit code: 0 on success, 1 when a
/// check or expectation fails, 2 on error.
#[derive(Debug, Clone, PartialEq)]
pub struct JobOutput {
    pub text: String,
    pub code: i32,
}

/// Everything a command produced before rendering.
struct Outcome {
    rows: Vec<Row>,
    details: serde_json::Value,
    text: String,
}

impl Outcome {
    fn rows(rows: Vec<Row>) -> Outcome {
        Outcome {
            rows,
            details: serde_json::Value::Null,
            text: String::new(),
        }
    }
}

/// Default tolerance: `1e-9` for exact inputs, `1e-6` once the numeric layer
/// is involved.
fn default_tol(job: &JobSpec) -> f64 {
    let step = job.function.as_ref().map(|f| f.is_step()).unwrap_or(true);
    let simple = job.space.as_ref().map(|x| x.is_rearrangement_invariant()).unwrap_or(true);
    match job.command {
        Command::Norm | Command::Rearrange | Command::Cesaro if step && simple => 1e-9,
        _ => 1e-6,
    }
}

fn value_row(id: &str, d: &str, v: EvalResult, expect: Option<f64>, tol: f64) -> Row {
    match expect {
        Some(t) => Row::close(id, d, v.value, v.err_bound, t, tol.max(v.err_bound)),
        None => Row {
            pass: true,
            ..Row::close(id, d, v.value, v.err_bound, f64::NAN, tol)
        },
    }
}

fn eval_json(v: &EvalResult) -> serde_json::Value {
    serde_json::json!({
        "value": report::fmt_f64(v.value),
        "errBound": v.err_bound,
        "method": v.method.name(),
        "depth": v.depth,
    })
}

fn dist_json(d: &DistResult) -> serde_json::Value {
    serde_json::json!({
        "value": report::fmt_f64(d.value),
        "errBound": d.err_bound,
        "path": d.path.name(),
        "schedule": d.schedule.iter().map(|(n, s)| serde_json::json!([n, report::fmt_f64(*s)])).collect::<Vec<_>>(),
    })
}

fn check_json(r: &CheckReport) -> serde_json::Value {
    serde_json::json!({
        "id": r.id,
        "overall": r.overall,
        "verdict": r.verdict,
        "clauses": r.clauses.iter().map(|c| serde_json::json!({
            "description": c.description,
            "value": report::fmt_f64(c.value.value),
            "errBound": c.value.err_bound,
            "relation": c.relation.symbol(),
            "target": report::fmt_f64(c.target),
            "tol": c.tol,
            "pass": c.pass,
        })).collect::<Vec<_>>(),
        "flags": r.flags.iter().map(|f| serde_json::json!({"kind": f.kind.name(), "message": f.message})).collect::<Vec<_>>(),
    })
}

/// Points at which curves are sampled for rows.
fn sample_points(d: Domain) -> Vec<f64> {
    match d {
        Domain::Unit => (1..8).map(|i| i as f64 / 8.0).collect(),
        Domain::HalfLine => (-4..=4).map(|j| 2f64.powi(j)).collect(),
        Domain::Naturals => (1..=12).map(|n| n as f64).collect(),
    }
}

fn curve_rows(name: &str, d: &str, domain: Domain, eval: impl Fn(f64) -> f64) -> Vec<Row> {
    sample_points(domain)
        .into_iter()
        .map(|t| {
            let v = eval(t);
            Row {
                pass: true,
                ..Row::close(format!("{name}({t})"), d, v, 0.0, f64::NAN, 0.0)
            }
        })
        .collect()
}

fn execute(job: &JobSpec, cfg: &Config, ov: &Overrides) -> Result<Outcome> {
    let input = digest(&serialize_job(&JobSpec {
        format: Format::Json,
        ..job.clone()
    }));
    let d = input.as_str();
    let f = || job.function.as_ref().expect("validated");
    let x = || job.space.as_ref().expect("validated");
    let tol = cfg.tol;
    match job.command {
        Command::Norm => {
            let v = norm(f(), x(), cfg)?;
            Ok(Outcome {
                rows: vec![value_row(&format!("norm/{}", x().label()), d, v, job.params.expect, tol)],
                details: serde_json::json!({"norm": eval_json(&v)}),
                text: format!("||f||_{} = {v}\n", x().label()),
            })
        }
        Command::Dist => {
            let r = dist_oc(f(), x(), cfg)?;
            let mut row = value_row(&format!("dist/{}", x().label()), d, r.as_eval(), job.params.expect, tol);
            row.note = format!("path {}", r.path.name());
            Ok(Outcome {
                rows: vec![row],
                details: serde_json::json!({"dist": dist_json(&r)}),
                text: format!("dist(f, X_a) in {} = {r}\n", x().label()),
            })
        }
        Command::Rearrange => {
            let r = rearrange(f(), tol)?;
            let domain = f().domain();
            let rows = curve_rows("f*", d, domain, |t| r.eval(if domain == Domain::Naturals { t - 1.0 } else { t }));
            let details = match &r {
                Rearranged::Exact(g) => serde_json::json!({"exact": true, "rearrangement": FunctionLit::from(g)}),
                Rearranged::Bracketed(b) => serde_json::json!({
                    "exact": false,
                    "epsilon": b.epsilon,
                    "gap": b.gap,
                    "cells": b.cells.iter().map(|c| [c.lo, c.hi, c.lower, c.upper]).collect::<Vec<_>>(),
                    "tail": [b.tail_lower, b.tail_upper],
                }),
            };
            let text = match &r {
                Rearranged::Exact(g) => format!("f* = {}\n", serde_json::to_string(&FunctionLit::from(g)).expect("json")),
                Rearranged::Bracketed(b) => format!("f* bracketed on ({}, inf) with gap {:.1e}\n", b.epsilon, b.gap),
            };
            Ok(Outcome { rows, details, text })
        }
        Command::Cesaro => {
            let image = cesaro_apply(f())?;
            let mut rows = curve_rows("C|f|", d, image.domain(), |t| image.eval(t));
            let mut details = serde_json::json!({"image": FunctionLit::from(&image)});
            let mut text = format!("C|f| = {}\n", serde_json::to_string(&FunctionLit::from(&image)).expect("json"));
            if let Some(x) = &job.space {
                let v = cx_norm(f(), x, cfg)?;
                rows.push(value_row(&format!("cx-norm/{}", x.label()), d, v, job.params.expect, tol));
                details["cxNorm"] = eval_json(&v);
                text.push_str(&format!("||f||_C{} = {v}\n", x.label()));
            }
            Ok(Outcome { rows, details, text })
        }
        Command::Check(id) => {
            let report = match id {
                CheckId::Hudzik => hudzik_check(f(), x(), cfg)?,
                CheckId::CesaroCopy => {
                    let a = job.params.a.clone().unwrap_or_else(Q::zero);
                    let b = job.params.b.clone().unwrap_or_else(|| Ext::Finite(Q::one()));
                    cesaro_copy_check(f(), &a, &b, x(), cfg, job.require_bound_rule || ov.require_bound_rule)?
                }
                CheckId::TrivialIdealCopy => trivial_ideal_copy_check(f(), x(), cfg)?,
                CheckId::Modular => modular_domination_check(
                    job.orlicz.as_ref().expect("validated"),
                    x(),
                    f(),
                    job.params.m.expect("validated"),
                    cfg,
                )?,
                CheckId::Am => am_property_probe(f(), job.g.as_ref().expect("validated"), x(), cfg)?,
                CheckId::DiscreteOc => {
                    let s = f().as_seq().expect("validated");
                    let m = discrete_oc_membership(s, x(), cfg)?;
                    let member = if m.member { 1.0 } else { 0.0 };
                    let mut rows = vec![Row {
                        pass: true,
                        ..Row::close(format!("discrete-oc/{}/member", x().label()), d, member, 0.0, f64::NAN, 0.0)
                    }];
                    rows.push(value_row(&format!("discrete-oc/{}/cx-norm", x().label()), d, m.cx_norm, None, tol));
                    if let Some(dist) = &m.dist {
                        rows.push(value_row(
                            &format!("discrete-oc/{}/dist", x().label()),
                            d,
                            dist.as_eval(),
                            job.params.expect,
                            tol,
                        ));
                    }
                    let text = format!(
                        "x in (CX)_a: {}\n||x||_CX = {}\nadvisory: ||C|| >= {} on the base (probe)\n",
                        m.member, m.cx_norm, m.bound_probe
                    );
                    return Ok(Outcome {
                        rows,
                        details: serde_json::json!({
                            "member": m.member,
                            "cxNorm": eval_json(&m.cx_norm),
                            "dist": m.dist.as_ref().map(dist_json),
                            "boundProbe": report::fmt_f64(m.bound_probe),
                        }),
                        text,
                    });
                }
            };
            Ok(Outcome {
                rows: report_rows(id.name(), &report, d),
                details: check_json(&report),
                text: format!("{report}\n"),
            })
        }
        Command::Witness(kind) => {
            let k = job.params.k.expect("validated");
            let phi = || job.phi.clone().or_else(|| space_phi(x())).expect("validated");
            let spec = match kind {
                WitnessKind::DisjointBlocks => WitnessSpec::DisjointBlocks { f: f().clone(), k },
                WitnessKind::Marcinkiewicz => WitnessSpec::Marcinkiewicz {
                    phi: phi(),
                    a: job.params.a.clone().expect("validated"),
                    k,
                },
                WitnessKind::FlatLorentz => WitnessSpec::FlatLorentz { phi: phi(), k },
            };
            let family = build_witness(&spec)?;
            let report = verify_witness(&family, x(), cfg)?;
            Ok(Outcome {
                rows: report_rows(&format!("witness/{}", kind.name()), &report, d),
                details: check_json(&report),
                text: format!("{report}\n"),
            })
        }
        Command::Report => {
            let opts = SuiteOptions {
                seed: ov.seed.or(job.seed).unwrap_or(DEFAULT_SEED),
                filter: ov.filter.clone().or_else(|| job.filter.clone()),
                engine_tol: ov.tol.or(job.params.tol),
                max_depth: ov.max_depth,
            };
            let rep = run_paper_suite(&opts)?;
            Ok(Outcome::rows(rep.rows))
        }
    }
}

/// Run a validated job.
pub fn run_job(job: &JobSpec, ov: &Overrides) -> JobOutput {
    let format = ov.format.unwrap_or(job.format);
    let tol = ov.tol.or(job.params.tol).unwrap_or_else(|| default_tol(job));
    let mut cfg = Config::new(tol);
    if let Some(d) = ov.max_depth {
        cfg.max_depth = d;
    }
    let seed = ov.seed.or(job.seed).unwrap_or(DEFAULT_SEED);
    let mut header: Vec<(&str, String)> = vec![("command", job.command.name().into())];
    match job.command {
        Command::Check(c) => header.push(("check", c.name().into())),
        Command::Witness(w) => header.push(("witness", w.name().into())),
        _ => {}
    }
    if job.command == Command::Report {
        header.push(("seed", seed.to_string()));
    } else {
        header.push(("tol", format!("{tol:e}")));
    }
    match execute(job, &cfg, ov) {
        Err(e) => JobOutput {
            text: error_text(&e, format),
            code: 2,
        },
        Ok(out) => {
            let pass = out.rows.iter().all(|r| r.pass);
            let text = match format {
                Format::Csv => report::to_csv(&out.rows, &header),
                Format::Table => {
                    let mut t = out.text;
                    t.push_str(&report::to_table(&out.rows, &header));
                    t
                }
                Format::Json => {
                    let mut obj = serde_json::Map::new();
                    for (k, v) in &header {
                        obj.insert(k.to_string(), serde_json::Value::String(v.clone()));
                    }
                    obj.insert("pass".into(), serde_json::Value::Bool(pass));
                    obj.insert("rows".into(), serde_json::to_value(&out.rows).expect("rows serialise"));
                    if !out.details.is_null() {
                        obj.insert("details".into(), out.details);
                    }
                    let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(obj)).expect("json");
                    s.push('\n');
                    s
                }
            };
            JobOutput {
                text,
                code: if pass { 0 } else { 1 },
            }
        }
    }
}

/// Error message in the requested format, with its machine-readable code.
pub fn error_text(e: &Error, format: Format) -> String {
    match format {
        Format::Json => {
            let mut v = serde_json::json!({"error": {"code": e.code(), "message": e.to_string()}});
            if let Error::Parse { field, line, column, .. } = e {
                v["error"]["field"] = serde_json::json!(field);
                v["error"]["line"] = serde_json::json!(line);
                v["error"]["column"] = serde_json::json!(column);
            }
            format!("{}\n", serde_json::to_string_pretty(&v).expect("json"))
        }
        _ => format!("error [{}]: {e}\n", e.code()),
    }
}

/// Parse and run in one step; parse errors exit with 2.
pub fn run_text(text: &str, ov: &Overrides) -> JobOutput {
    match parse_job(text) {
        Ok(job) => run_job(&job, ov),
        Err(e) => JobOutput {
            text: error_text(&e, ov.format.unwrap_or_default()),
            code: 2,
        },
    }
}

/// Space literal helper for front ends.
pub fn space_literal(x: &SpaceSpec) -> SpaceLit {
    SpaceLit::from(x)
}

/// Generator literal helpers for front ends.
pub fn phi_literal(phi: &QuasiConcaveFn) -> PhiLit {
    PhiLit::from(phi)
}

pub fn orlicz_literal(f: &OrliczFn) -> OrliczLit {
    OrliczLit::from(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DIST: &str = r#"{"command": "dist",
        "function": {"domain": "halfline", "pieces": [{"lo": 0, "hi": 1, "kind": "const", "params": [2]}],
                     "tail": {"kind": "const", "params": [1]}},
        "space": {"kind": "sum_lp_linf", "p": 2, "domain": "halfline"}}"#;

    #[test]
    fn dist_job_takes_the_closed_form() {
        let job = parse_job(DIST).unwrap();
        assert_eq!(job.command, Command::Dist);
        let out = run_job(
            &job,
            &Overrides {
                format: Some(Format::Json),
                ..Default::default()
            },
        );
        assert_eq!(out.code, 0, "{}", out.text);
        let v: serde_json::Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["rows"][0]["value"], 1.0);
        assert_eq!(v["details"]["dist"]["path"], "deJonge-closed-form");
    }

    #[test]
    fn missing_space_names_the_field() {
        let text = "{\"command\": \"norm\",\n \"function\": {\"domain\": \"unit\", \"pieces\": []}\n}";
        match parse_job(text).unwrap_err() {
            Error::Parse { field, line, .. } => {
                assert_eq!(field, "space");
                assert_eq!(line, 3);
            }
            e => panic!("{e:?}"),
        }
        match parse_job("{\"command\": \"norm\", \"spaces\": 1}").unwrap_err() {
            Error::Parse { field, column, .. } => {
                assert_eq!(field, "job.spaces");
                assert!(column > 20);
            }
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rationals_stay_exact() {
        let text = r#"{"command": "norm", "function": {"domain": "unit",
            "pieces": [{"lo": 0, "hi": "3/4", "kind": "const", "params": [1]}]},
            "space": {"kind": "lp", "p": 1, "domain": "unit"}}"#;
        let job = parse_job(text).unwrap();
        let g = job.function.as_ref().unwrap().as_piecewise().unwrap().clone();
        assert_eq!(g.pieces[0].hi, Q::new(3.into(), 4.into()));
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let text = r#"{"command": "check", "check": "thm41",
            "function": {"domain": "halfline", "pieces": [], "tail": {"kind": "const", "params": ["1.0"]}},
            "space": {"kind": "sum_lp_linf", "p": 2, "domain": "halfline"}, "params": {"b": "inf", "a": "0.5"}}"#;
        let once = serialize_job(&parse_job(text).unwrap());
        let twice = serialize_job(&parse_job(&once).unwrap());
        assert_eq!(once, twice);
        assert!(once.contains("\"cesaro-copy\""));
    }

    #[test]
    fn runs_are_deterministic() {
        let job = parse_job(DIST).unwrap();
        let ov = Overrides {
            format: Some(Format::Csv),
            ..Default::default()
        };
        assert_eq!(run_job(&job, &ov), run_job(&job, &ov));
    }
}
