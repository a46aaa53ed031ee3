//! Distance to the ideal `X_a` of order continuous elements, and checks of
//! the criteria for lattice isometric copies of `l_inf`.
//!
//! `dist(f, X_a)` is the quotient norm of `f + X_a` in `X/X_a`. For a
//! rearrangement-invariant `X` with non-trivial `X_a` it is the limit of
//! `||f* chi_{(0,1/n) u (n,inf)}||_X`; under the rule-table condition
//! `D_inf` with `L_inf` embedded it is simply `f*(inf) phi_X(inf)`.

use crate::cesaro::{self, bound_probe, bounded_by_rule, c_at_zero, cesaro_apply, cx_norm, probe_family};
use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::generators::{OrliczFn, QuasiConcaveFn};
use crate::lattice::{max_abs, supports_disjoint};
use crate::measurable_fn::{chi, Block, Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::profile::{profile_of, Profile, Windowed};
use crate::rearrangement::rearrange_exact;
use crate::scalar::{fmt_q, qf, qi, to_f64, Ext, Q};
use crate::spaces::{
    check_domain, d_infinity, embed_norm_to_linf, modular, norm, norm_of_profile, oc_ideal_class, phi_limits, Config,
    EvalResult, OcClass, SpaceSpec,
};
use num_traits::{One, Signed, Zero};
use std::fmt;

/// How a distance was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistPath {
    /// Limit of windowed norms along `n = 2^k`.
    LimitFormula,
    /// `f*(inf) phi_X(inf)`.
    DeJonge,
    /// `X_a = {0}`: the distance is the norm.
    TrivialIdeal,
    /// `X_a = X`: the distance is zero.
    OrderContinuous,
}

impl DistPath {
    pub fn name(&self) -> &'static str {
        match self {
            DistPath::LimitFormula => "limit-formula",
            DistPath::DeJonge => "deJonge-closed-form",
            DistPath::TrivialIdeal => "trivial-ideal",
            DistPath::OrderContinuous => "order-continuous",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistResult {
    pub value: f64,
    pub err_bound: f64,
    pub path: DistPath,
    /// `(n, s_n)` pairs. On the de Jonge path these are cross-check samples.
    pub schedule: Vec<(f64, f64)>,
}

impl DistResult {
    fn fixed(value: f64, err_bound: f64, path: DistPath) -> DistResult {
        DistResult {
            value,
            err_bound,
            path,
            schedule: Vec::new(),
        }
    }

    pub fn as_eval(&self) -> EvalResult {
        if self.err_bound == 0.0 {
            EvalResult::exact(self.value)
        } else {
            EvalResult::numeric(self.value, self.err_bound, self.schedule.len() as u32)
        }
    }

    /// `s_n` is non-increasing along the schedule, up to `slack`.
    pub fn is_monotone(&self, slack: f64) -> bool {
        self.schedule.windows(2).all(|w| w[1].1 <= w[0].1 + slack * w[0].1.abs().max(1.0))
    }
}

impl fmt::Display for DistResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.as_eval(), self.path.name())
    }
}

/// `s_n = ||f* chi_{(0,1/n) u (n,inf)}||_X`; on the naturals the window
/// keeps indices past `n`.
fn schedule_point(p: &dyn Profile, x: &SpaceSpec, n: f64, cfg: &Config) -> Result<EvalResult> {
    let w = if x.domain == Domain::Naturals {
        Windowed::new(p, 0.0, n)
    } else {
        Windowed::new(p, 1.0 / n, n)
    };
    norm_of_profile(&w, x, cfg)
}

/// Aitken extrapolation of three consecutive schedule values, used only
/// when they move monotonically with a shrinking step above `noise`.
fn aitken(v0: f64, v1: f64, v2: f64, noise: f64) -> f64 {
    let (d1, d2) = (v1 - v0, v2 - v1);
    let den = d2 - d1;
    if !(v0.is_finite() && v1.is_finite() && v2.is_finite()) || d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return v2;
    }
    if d2.abs() <= noise || den.abs() <= f64::EPSILON * v2.abs().max(1.0) {
        return v2;
    }
    v2 - d2 * d2 / den
}

/// Run the doubling schedule on Aitken-accelerated values until two
/// consecutive estimates agree within `tol * max(1, s)`.
fn run_schedule(p: &dyn Profile, x: &SpaceSpec, cfg: &Config) -> Result<DistResult> {
    let mut schedule: Vec<(f64, f64)> = Vec::new();
    let mut estimates: Vec<(f64, f64)> = Vec::new();
    let mut agree = 0;
    for k in 0..=cfg.max_depth {
        let n = 2f64.powi(k as i32);
        let s = schedule_point(p, x, n, cfg)?;
        schedule.push((n, s.value));
        let m = schedule.len();
        let est = if m >= 3 {
            aitken(schedule[m - 3].1, schedule[m - 2].1, s.value, 4.0 * s.err_bound)
        } else {
            s.value
        };
        if let Some(&(prev, prev_err)) = estimates.last() {
            let slack = cfg.tol * est.abs().max(1.0) + s.err_bound + prev_err;
            if (prev - est).abs() <= slack || (prev.is_infinite() && est.is_infinite()) {
                agree += 1;
            } else {
                agree = 0;
            }
        }
        estimates.push((est, s.err_bound));
        if agree >= 2 {
            let step = (estimates[m - 2].0 - est).abs();
            let err_bound = if step == 0.0 && s.err_bound == 0.0 { 0.0 } else { step + s.err_bound };
            return Ok(DistResult {
                value: est,
                err_bound,
                path: DistPath::LimitFormula,
                schedule,
            });
        }
    }
    let partial = estimates.iter().rev().take(4).map(|s| s.0).collect();
    Err(Error::NoConvergence {
        depth: cfg.max_depth,
        partial,
    })
}

fn require_finite_norm(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<EvalResult> {
    let n = norm(f, x, cfg)?;
    if n.is_infinite() {
        return Err(Error::Precondition(format!("the function has infinite norm in {}", x.label())));
    }
    Ok(n)
}

/// `dist(f, X_a)`.
pub fn dist_oc(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<DistResult> {
    check_domain(f.domain(), x)?;
    let class = oc_ideal_class(x)?;
    let nrm = require_finite_norm(f, x, cfg)?;
    match class {
        OcClass::Trivial => Ok(DistResult::fixed(nrm.value, nrm.err_bound, DistPath::TrivialIdeal)),
        OcClass::All => Ok(DistResult::fixed(0.0, 0.0, DistPath::OrderContinuous)),
        OcClass::Nontrivial => {
            let p = profile_of(f)?;
            let (_, phi_inf) = phi_limits(x)?;
            if d_infinity(x) && phi_inf.is_finite() {
                let tail = p.tail();
                let value = if tail == 0.0 { 0.0 } else { tail * phi_inf };
                let d = cfg.max_depth.max(4);
                let mut schedule = Vec::new();
                for k in [d / 4, d / 2, 3 * d / 4] {
                    let n = 2f64.powi(k as i32);
                    schedule.push((n, schedule_point(p.as_ref(), x, n, cfg)?.value));
                }
                let err_bound = if p.blocks().is_some() { 0.0 } else { 1e-15 * value.abs() };
                return Ok(DistResult {
                    value,
                    err_bound,
                    path: DistPath::DeJonge,
                    schedule,
                });
            }
            run_schedule(p.as_ref(), x, cfg)
        }
    }
}

/// The limit formula on its own, whatever path [`dist_oc`] would take.
/// Requires a non-trivial `X_a`.
pub fn limit_schedule(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<DistResult> {
    check_domain(f.domain(), x)?;
    if oc_ideal_class(x)? != OcClass::Nontrivial {
        return Err(Error::Precondition("the limit formula needs a non-trivial ideal X_a".into()));
    }
    require_finite_norm(f, x, cfg)?;
    let p = profile_of(f)?;
    run_schedule(p.as_ref(), x, cfg)
}

/// `dist(f, X_a) <= tol`.
pub fn is_order_continuous(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<bool> {
    Ok(dist_oc(f, x, cfg)?.value <= cfg.tol)
}

/// Comparison used by a clause.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Eq,
    Le,
    Ge,
}

impl Relation {
    pub fn symbol(&self) -> &'static str {
        match self {
            Relation::Eq => "=",
            Relation::Le => "<=",
            Relation::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clause {
    pub description: String,
    pub value: EvalResult,
    pub relation: Relation,
    pub target: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Clause {
    pub fn new(description: impl Into<String>, value: EvalResult, relation: Relation, target: f64, tol: f64) -> Clause {
        let v = value.value;
        let pass = match relation {
            Relation::Eq => v == target || (v - target).abs() <= tol,
            Relation::Le => v <= target + tol,
            Relation::Ge => v >= target - tol,
        };
        Clause {
            description: description.into(),
            value,
            relation,
            target,
            tol,
            pass,
        }
    }

    fn holds(description: impl Into<String>, ok: bool) -> Clause {
        Clause::new(description, EvalResult::exact(if ok { 1.0 } else { 0.0 }), Relation::Eq, 1.0, 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlagKind {
    Assumption,
    Warning,
    Advisory,
}

impl FlagKind {
    pub fn name(&self) -> &'static str {
        match self {
            FlagKind::Assumption => "assumption",
            FlagKind::Warning => "warning",
            FlagKind::Advisory => "advisory",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Flag {
    pub kind: FlagKind,
    pub message: String,
}

impl Flag {
    fn new(kind: FlagKind, message: impl Into<String>) -> Flag {
        Flag {
            kind,
            message: message.into(),
        }
    }
}

/// Outcome of a check: every clause with its computed value, and the
/// conjunction of their passes.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub id: String,
    pub clauses: Vec<Clause>,
    pub overall: bool,
    pub verdict: String,
    pub flags: Vec<Flag>,
}

impl CheckReport {
    fn new(id: &str, clauses: Vec<Clause>, flags: Vec<Flag>, claim: &str) -> CheckReport {
        let overall = clauses.iter().all(|c| c.pass);
        let verdict = if overall {
            format!("numerically consistent with: {claim}")
        } else {
            let failed: Vec<&str> = clauses.iter().filter(|c| !c.pass).map(|c| c.description.as_str()).collect();
            format!("not established: failed {}", failed.join("; "))
        };
        CheckReport {
            id: id.into(),
            clauses,
            overall,
            verdict,
            flags,
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}: {}", self.id, if self.overall { "PASS" } else { "FAIL" })?;
        for c in &self.clauses {
            writeln!(
                f,
                "  [{}] {}: {} {} {} (tol {:.0e})",
                if c.pass { "ok" } else { "FAIL" },
                c.description,
                c.value,
                c.relation.symbol(),
                c.target,
                c.tol
            )?;
        }
        for fl in &self.flags {
            writeln!(f, "  {}: {}", fl.kind.name(), fl.message)?;
        }
        write!(f, "  {}", self.verdict)
    }
}

fn hudzik_parts(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<(Vec<Clause>, Vec<Flag>)> {
    let class = oc_ideal_class(x)?;
    let nrm = norm(f, x, cfg)?;
    let mut clauses = vec![Clause::new("||f||_X = 1", nrm, Relation::Eq, 1.0, cfg.tol)];
    let mut flags = vec![Flag::new(
        FlagKind::Assumption,
        "supp X_a = supp X is assumed for the space, not verified numerically",
    )];
    if class == OcClass::Trivial {
        flags.push(Flag::new(
            FlagKind::Warning,
            "X_a = {0}: the distance equals the norm, so this criterion carries no information here",
        ));
    }
    let d = if nrm.is_infinite() {
        EvalResult::exact(f64::INFINITY)
    } else {
        dist_oc(f, x, cfg)?.as_eval()
    };
    clauses.push(Clause::new("dist(f, X_a) = 1", d, Relation::Eq, 1.0, cfg.tol));
    Ok((clauses, flags))
}

/// `||f||_X = dist(f, X_a) = 1`: `f` generates a lattice isometric copy of
/// `l_inf` in `X`.
pub fn hudzik_check(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<CheckReport> {
    check_domain(f.domain(), x)?;
    let (clauses, flags) = hudzik_parts(f, x, cfg)?;
    Ok(CheckReport::new(
        "hudzik",
        clauses,
        flags,
        "X contains a lattice isometric copy of l_inf generated by f",
    ))
}

/// `f*` as a function: exact for step functions, `|f|` itself when it is
/// already non-increasing.
pub fn decreasing_form(f: &Function) -> Result<Function> {
    if f.is_step() {
        return rearrange_exact(f);
    }
    let g = f.abs();
    if is_non_increasing(&g) {
        return Ok(g);
    }
    Err(Error::Unsupported(
        "an explicit rearrangement is needed here; only step or already non-increasing functions qualify".into(),
    ))
}

fn is_non_increasing(f: &Function) -> bool {
    match f {
        Function::Seq(s) => {
            let n = s.head.len() as u64 + 64;
            let vals: Vec<f64> = (1..=n).map(|k| s.eval(k)).collect();
            let head_ok = vals.windows(2).all(|w| w[1] <= w[0]);
            let tail_ok = match &s.tail {
                SeqTail::Zero => true,
                SeqTail::Formula(form) => {
                    let t = form.term();
                    form.is_const() || (t.is_simple() && t.deriv(n as f64) <= 0.0 && t.limit_at_infinity() >= 0.0)
                }
                SeqTail::Harmonic { .. } => false,
            };
            head_ok && tail_ok
        }
        Function::Piecewise(g) => {
            let mut prev = f64::INFINITY;
            let mut check = |lo: f64, hi: f64, form: &Formula| -> bool {
                let t = form.term();
                let (a, b) = (t.limit_at(lo), t.end_value(hi));
                let ok = a <= prev && b <= a && t.critical_points(lo, hi).is_empty();
                prev = b;
                ok
            };
            for p in &g.pieces {
                if !check(to_f64(&p.lo), to_f64(&p.hi), &p.formula) {
                    return false;
                }
            }
            match &g.tail {
                Tail::Zero => true,
                Tail::Formula(form) => g.domain == Domain::Unit || check(to_f64(&g.end()), f64::INFINITY, form),
                Tail::Periodic { .. } => false,
            }
        }
    }
}

/// Cesaro-space copy check: the hudzik clauses in `X` plus
/// `||f* chi_{(0,a) u (b,inf)}||_CX = 1`. Needs a non-trivial `X_a`; with
/// `require_bound_rule` the rule table must also certify that `C` is
/// bounded on `X`.
pub fn cesaro_copy_check(
    f: &Function,
    a: &Q,
    b: &Ext,
    x: &SpaceSpec,
    cfg: &Config,
    require_bound_rule: bool,
) -> Result<CheckReport> {
    check_domain(f.domain(), x)?;
    if a.is_negative() || b.finite().map(|b| b <= a).unwrap_or(false) {
        return Err(Error::Precondition("the window needs 0 <= a < b".into()));
    }
    let class = oc_ideal_class(x)?;
    if class != OcClass::Nontrivial {
        return Err(Error::Precondition(format!(
            "the ideal X_a of {} is {}, the check needs it non-trivial",
            x.label(),
            class.name()
        )));
    }
    let rule = bounded_by_rule(x);
    if require_bound_rule && rule != Some(true) {
        return Err(Error::Precondition(format!(
            "no rule certifies that the Cesaro operator is bounded on {}",
            x.label()
        )));
    }
    let (mut clauses, mut flags) = hudzik_parts(f, x, cfg)?;
    let star = decreasing_form(f)?;
    let windowed = star.window(a, b);
    let cx = cx_norm(&windowed, x, cfg)?;
    let hi = match b {
        Ext::Finite(q) => fmt_q(q),
        Ext::Infinite => "inf".into(),
    };
    clauses.push(Clause::new(
        format!("||f* chi_(0,{}) u ({},inf)||_CX = 1", fmt_q(a), hi),
        cx,
        Relation::Eq,
        1.0,
        cfg.tol,
    ));
    let probe = bound_probe(x, &probe_family(x.domain), cfg)?;
    flags.push(Flag::new(
        FlagKind::Advisory,
        format!("||C||_(X->X) >= {probe:.6} on a probe family (a lower bound, not a proof of boundedness)"),
    ));
    flags.push(Flag::new(
        FlagKind::Assumption,
        match rule {
            Some(true) => "C bounded on X by the rule table".to_string(),
            Some(false) => "C is unbounded on X by the rule table; the hypothesis fails".to_string(),
            None => "boundedness of C on X is not settled by the rule table".to_string(),
        },
    ));
    Ok(CheckReport::new(
        "cesaro-copy",
        clauses,
        flags,
        "CX contains a lattice isometric copy of l_inf (hypotheses verified numerically)",
    ))
}

/// Check for Cesaro spaces over `X` with `X_a = {0}`: `C(f)(0+) = 1` and
/// `||f||_CX = ||id: X -> L_inf||`.
pub fn trivial_ideal_copy_check(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<CheckReport> {
    check_domain(f.domain(), x)?;
    if oc_ideal_class(x)? != OcClass::Trivial {
        return Err(Error::NotTrivialIdeal);
    }
    let target = embed_norm_to_linf(x)?;
    let c0 = c_at_zero(f)?;
    let cx = cx_norm(f, x, cfg)?;
    let clauses = vec![
        Clause::new("C(f)(0+) = 1", EvalResult::exact(c0), Relation::Eq, 1.0, cfg.tol),
        Clause::new(
            format!("||f||_CX = ||id: X -> L_inf|| = {}", target.value),
            cx,
            Relation::Eq,
            target.value,
            cfg.tol,
        ),
    ];
    let flags = vec![Flag::new(FlagKind::Assumption, "f is taken as |f|; it should be positive on its support")];
    Ok(CheckReport::new(
        "trivial-ideal-copy",
        clauses,
        flags,
        "CX contains a lattice isometric copy of l_inf",
    ))
}

/// Largest `eps = 2^-j` with `||chi_(0,eps)||_CX <= ||id: X -> L_inf||`.
pub fn find_eps0(x: &SpaceSpec, cfg: &Config) -> Result<Q> {
    if x.domain == Domain::Naturals {
        return Err(Error::Precondition("no epsilon search on the naturals".into()));
    }
    let target = embed_norm_to_linf(x)?.value;
    let mut eps = Q::one();
    for _ in 0..60 {
        let f: Function = PiecewiseFn::step(x.domain, &[(Q::zero(), eps.clone(), Q::one())], None)?.into();
        if cx_norm(&f, x, cfg)?.value <= target + cfg.tol {
            return Ok(eps);
        }
        eps /= qi(2);
    }
    Err(Error::NoConvergence {
        depth: 60,
        partial: vec![to_f64(&eps)],
    })
}

/// Construction behind a witness family.
#[derive(Debug, Clone, PartialEq)]
pub enum WitnessSpec {
    /// `f = c chi_(0,inf)` split along `k` interleaved families of unit blocks.
    DisjointBlocks { f: Function, k: usize },
    /// Truncations `psi' chi_(0, a 2^-j)` with `psi = t/phi`, `phi = t^theta`.
    Marcinkiewicz { phi: QuasiConcaveFn, a: Q, k: usize },
    /// Disjoint blocks of `chi_(0,inf)/phi(inf)`.
    FlatLorentz { phi: QuasiConcaveFn, k: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessTag {
    DisjointBlocks,
    Marcinkiewicz,
    FlatLorentz,
}

impl WitnessTag {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessTag::DisjointBlocks => "disjoint-blocks",
            WitnessTag::Marcinkiewicz => "marcinkiewicz",
            WitnessTag::FlatLorentz => "flat-lorentz",
        }
    }
}

/// Finite part of a witness for a copy of `l_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessFamily {
    pub tag: WitnessTag,
    pub members: Vec<Function>,
    /// The non-increasing function the members are cut from.
    pub generator: Function,
    /// Whether the members are pairwise disjoint.
    pub disjoint: bool,
}

impl WitnessFamily {
    /// Sum of the members with indices in `subset`; the members are
    /// nonnegative and disjoint, so the sum is their maximum.
    pub fn partial_sum(&self, subset: &[usize]) -> Result<Function> {
        if !self.disjoint {
            return Err(Error::Precondition("partial sums need a disjoint family".into()));
        }
        let mut it = subset.iter();
        let first = *it.next().ok_or_else(|| Error::Precondition("empty subset".into()))?;
        let mut acc = self.members[first].clone();
        for &i in it {
            acc = max_abs(&acc, &self.members[i])?;
        }
        Ok(acc)
    }
}

/// The level `c` when `f = c chi_(0,inf)` on the half line.
fn flat_level(f: &Function) -> Option<Q> {
    let g = f.as_piecewise()?;
    if g.domain != Domain::HalfLine {
        return None;
    }
    let Tail::Formula(t) = &g.tail else { return None };
    let c = t.as_const()?;
    if c.is_zero() || g.pieces.iter().any(|p| p.formula.as_const().as_ref() != Some(&c)) {
        return None;
    }
    Some(c.abs())
}

fn block_member(c: &Q, k: usize, i: usize) -> Result<Function> {
    Ok(PiecewiseFn::new(
        Domain::HalfLine,
        vec![],
        Tail::Periodic {
            period: qi(k as i64),
            pattern: vec![Block {
                lo: qi(i as i64),
                hi: qi(i as i64 + 1),
                value: c.clone(),
            }],
        },
    )?
    .into())
}

fn disjoint_blocks(c: &Q, k: usize, tag: WitnessTag) -> Result<WitnessFamily> {
    if k == 0 {
        return Err(Error::Precondition("a witness needs k >= 1".into()));
    }
    let members = (0..k).map(|i| block_member(c, k, i)).collect::<Result<Vec<_>>>()?;
    Ok(WitnessFamily {
        tag,
        members,
        generator: PiecewiseFn::indicator(Domain::HalfLine, Q::zero(), Ext::Infinite, c.clone())?.into(),
        disjoint: true,
    })
}

/// `theta` when `phi(t) = t^theta` with `0 < theta < 1`.
fn power_exponent(phi: &QuasiConcaveFn) -> Option<Q> {
    if phi.pieces.len() != 1 || phi.domain != Domain::HalfLine {
        return None;
    }
    let f = &phi.pieces[0].formula;
    let plain = f.k.is_zero() && f.m.is_zero() && f.b.is_zero() && f.shift.is_zero() && f.c.is_one();
    (plain && f.alpha.is_positive() && f.alpha < Q::one()).then(|| f.alpha.clone())
}

/// Build a witness family from one of the supported constructions.
pub fn build_witness(spec: &WitnessSpec) -> Result<WitnessFamily> {
    match spec {
        WitnessSpec::DisjointBlocks { f, k } => {
            let c = flat_level(f).ok_or_else(|| {
                Error::Unsupported("disjoint blocks need f = c chi_(0,inf) on the half line".into())
            })?;
            disjoint_blocks(&c, *k, WitnessTag::DisjointBlocks)
        }
        WitnessSpec::FlatLorentz { phi, k } => match &phi.phi_inf {
            Ext::Finite(v) if v.is_positive() => disjoint_blocks(&(Q::one() / v), *k, WitnessTag::FlatLorentz),
            _ => Err(Error::Unsupported("flat Lorentz witnesses need phi(inf) < inf".into())),
        },
        WitnessSpec::Marcinkiewicz { phi, a, k } => {
            let theta = power_exponent(phi)
                .ok_or_else(|| Error::Unsupported("Marcinkiewicz witnesses need phi(t) = t^theta, 0 < theta < 1".into()))?;
            if !a.is_positive() || *k == 0 {
                return Err(Error::Precondition("need a > 0 and k >= 1".into()));
            }
            let psi_prime = Formula::power(Q::one() - &theta, -theta.clone());
            let mut members: Vec<Function> = Vec::with_capacity(*k);
            let mut eps = a.clone();
            for _ in 0..*k {
                members.push(
                    PiecewiseFn::new(
                        Domain::HalfLine,
                        vec![Piece {
                            lo: Q::zero(),
                            hi: eps.clone(),
                            formula: psi_prime.clone(),
                        }],
                        Tail::Zero,
                    )?
                    .into(),
                );
                eps /= qi(2);
            }
            Ok(WitnessFamily {
                tag: WitnessTag::Marcinkiewicz,
                generator: members[0].clone(),
                members,
                disjoint: false,
            })
        }
    }
}

/// Slack for the truncation inequality `||sum - f* chi_(1/m,m)|| >= 1`.
pub const TRUNCATION_SLACK: f64 = 1e-3;

/// Verify the finite content of a witness family in `X`: disjointness,
/// member and partial-sum norms equal to 1, `dist(generator, X_a) = 1`, and
/// the truncation inequality for `m = 10, 100`.
pub fn verify_witness(family: &WitnessFamily, x: &SpaceSpec, cfg: &Config) -> Result<CheckReport> {
    let mut clauses = Vec::new();
    let mut flags = Vec::new();
    let k = family.members.len();
    if family.disjoint {
        let mut overlapping = 0;
        for i in 0..k {
            for j in i + 1..k {
                if !supports_disjoint(&family.members[i], &family.members[j])? {
                    overlapping += 1;
                }
            }
        }
        clauses.push(Clause::holds(format!("members pairwise disjoint ({} pairs)", k * (k - 1) / 2), overlapping == 0));
    } else {
        flags.push(Flag::new(
            FlagKind::Advisory,
            "members are nested truncations of one function; disjointness and partial sums are not claimed",
        ));
    }
    for (i, m) in family.members.iter().enumerate() {
        clauses.push(Clause::new(format!("||member {i}|| = 1"), norm(m, x, cfg)?, Relation::Eq, 1.0, cfg.tol));
    }
    if family.disjoint {
        if k > 16 {
            flags.push(Flag::new(FlagKind::Warning, "more than 16 members: partial sums skipped"));
        } else {
            for mask in 1u32..(1 << k) {
                let subset: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
                let s = family.partial_sum(&subset)?;
                let label: Vec<String> = subset.iter().map(|i| i.to_string()).collect();
                clauses.push(Clause::new(
                    format!("||sum of members {{{}}}|| = 1", label.join(",")),
                    norm(&s, x, cfg)?,
                    Relation::Eq,
                    1.0,
                    cfg.tol,
                ));
            }
        }
    }
    clauses.push(Clause::new(
        "dist(generator, X_a) = 1",
        dist_oc(&family.generator, x, cfg)?.as_eval(),
        Relation::Eq,
        1.0,
        cfg.tol,
    ));
    for m in [10i64, 100] {
        // The generator is non-increasing, so it is its own rearrangement.
        let rest = family.generator.window(&Q::new(1.into(), m.into()), &Ext::Finite(qi(m)));
        clauses.push(Clause::new(
            format!("||sum - f* chi_(1/{m},{m})|| >= 1"),
            norm(&rest, x, cfg)?,
            Relation::Ge,
            1.0,
            TRUNCATION_SLACK,
        ));
    }
    flags.push(Flag::new(
        FlagKind::Advisory,
        format!("finite projection with k = {k}; the copy of l_inf itself is an infinite statement"),
    ));
    Ok(CheckReport::new(
        "witness",
        clauses,
        flags,
        &format!("a lattice isometric copy of l_inf ({} construction)", family.tag.name()),
    ))
}

/// Compare `dist(max(f, g), X_a)` with `max(dist(f), dist(g))` on one pair.
pub fn am_property_probe(f: &Function, g: &Function, x: &SpaceSpec, cfg: &Config) -> Result<CheckReport> {
    check_domain(f.domain(), x)?;
    check_domain(g.domain(), x)?;
    let df = dist_oc(f, x, cfg)?;
    let dg = dist_oc(g, x, cfg)?;
    let m = max_abs(f, g)?;
    let dm = dist_oc(&m, x, cfg)?;
    let rhs = df.value.max(dg.value);
    let tol = cfg.tol + df.err_bound.max(dg.err_bound);
    let clauses = vec![Clause::new(
        format!("dist(max(f,g), X_a) = max(dist f, dist g) = {rhs}"),
        dm.as_eval(),
        Relation::Eq,
        rhs,
        tol,
    )];
    let flags = vec![Flag::new(
        FlagKind::Advisory,
        "probe of the AM-space identity in X/X_a on one pair, not a verdict about the space",
    )];
    Ok(CheckReport::new("am", clauses, flags, "the AM identity for this pair"))
}

/// One instance of the modular inequality
/// `||F(C|f|)||_X <= M ||F(|f|)||_X`.
pub fn modular_domination_check(
    big_f: &OrliczFn,
    base: &SpaceSpec,
    f: &Function,
    m: f64,
    cfg: &Config,
) -> Result<CheckReport> {
    check_domain(f.domain(), base)?;
    if !base.is_rearrangement_invariant() {
        return Err(Error::Unsupported("modular inequality over a non-symmetric base".into()));
    }
    let pf = profile_of(f)?;
    let rhs_mod = modular(pf.as_ref(), base, big_f, 1.0, cfg)?;
    if rhs_mod.is_infinite() {
        return Err(Error::Precondition(
            "F(|f|) has infinite norm: f is outside the Calderon-Lozanovskii class".into(),
        ));
    }
    let image = cesaro_apply(f)?;
    let pc = profile_of(&image)?;
    let lhs = modular(pc.as_ref(), base, big_f, 1.0, cfg)?;
    let rhs = m * rhs_mod;
    let exact = pf.blocks().is_some() && pc.blocks().is_some();
    let lhs_eval = if exact || lhs.is_infinite() {
        EvalResult::exact(lhs)
    } else {
        EvalResult::numeric(lhs, cfg.tol.max(1e-12) * lhs.abs().max(1.0), 0)
    };
    let mut flags = vec![Flag::new(
        FlagKind::Advisory,
        "a single instance of the modular inequality, not a proof of it",
    )];
    if lhs.is_infinite() {
        flags.push(Flag::new(FlagKind::Warning, "F(C|f|) has infinite norm in the base"));
    }
    let clauses = vec![Clause::new(
        format!("||F(C|f|)|| <= M ||F(|f|)|| = {m} * {rhs_mod}"),
        lhs_eval,
        Relation::Le,
        rhs,
        cfg.tol,
    )];
    Ok(CheckReport::new("modular", clauses, flags, "the modular inequality for this f"))
}

/// Membership of a sequence in `(CX)_a`, decided through `C_d|x|` in `X_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Membership {
    pub member: bool,
    /// `dist(C_d|x|, X_a)` when `X_a` is a proper ideal and `x` lies in `CX`.
    pub dist: Option<DistResult>,
    pub cx_norm: EvalResult,
    /// Lower bound for `||C||` on the base (advisory).
    pub bound_probe: f64,
}

pub fn discrete_oc_membership(x: &SeqFn, base: &SpaceSpec, cfg: &Config) -> Result<Membership> {
    if base.domain != Domain::Naturals {
        return Err(Error::DomainMismatch {
            expected: Domain::Naturals.name().into(),
            found: base.domain.name().into(),
        });
    }
    let probe = cesaro::bound_probe(base, &probe_family(Domain::Naturals), cfg)?;
    let f: Function = x.clone().into();
    let image = cesaro_apply(&f)?;
    let cx = norm(&image, base, cfg)?;
    if cx.is_infinite() {
        return Ok(Membership {
            member: false,
            dist: None,
            cx_norm: cx,
            bound_probe: probe,
        });
    }
    if oc_ideal_class(base)? == OcClass::All {
        return Ok(Membership {
            member: true,
            dist: None,
            cx_norm: cx,
            bound_probe: probe,
        });
    }
    let d = dist_oc(&image, base, cfg)?;
    Ok(Membership {
        member: d.value <= cfg.tol,
        dist: Some(d),
        cx_norm: cx,
        bound_probe: probe,
    })
}

/// `chi_(0,inf)` scaled so that its norm in `X` is 1, when that is finite.
pub fn normalised_constant(x: &SpaceSpec, cfg: &Config) -> Result<Function> {
    let one = chi(x.domain, 0, None);
    let n = norm(&one, x, cfg)?.value;
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::Precondition(format!("chi_(0,inf) has norm {n} in {}", x.label())));
    }
    Ok(PiecewiseFn::indicator(x.domain, Q::zero(), Ext::Infinite, qf(1.0 / n))?.into())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qr;

    fn cfg() -> Config {
        Config::new(1e-9)
    }

    fn sum2() -> SpaceSpec {
        SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2))
    }

    fn singular(c: Q, hi: i64) -> Function {
        PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(hi),
                formula: Formula::power(c, qr(-1, 2)),
            }],
            Tail::Zero,
        )
        .unwrap()
        .into()
    }

    #[test]
    fn de_jonge_case() {
        let f: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], Some(qi(1)))
            .unwrap()
            .into();
        let d = dist_oc(&f, &sum2(), &cfg()).unwrap();
        assert_eq!(d.path, DistPath::DeJonge);
        assert_eq!(d.value, 1.0);
        let l = limit_schedule(&f, &sum2(), &cfg()).unwrap();
        assert!((l.value - 1.0).abs() < 1e-12, "{l}");
        assert!(l.is_monotone(1e-12));
    }

    #[test]
    fn trivial_and_order_continuous_paths() {
        let l2 = SpaceSpec::lp(Domain::HalfLine, qi(2));
        let d = dist_oc(&chi(Domain::HalfLine, 0, Some(3)), &l2, &cfg()).unwrap();
        assert_eq!((d.value, d.path), (0.0, DistPath::OrderContinuous));
        let linf = SpaceSpec::linf(Domain::HalfLine);
        let d = dist_oc(&chi(Domain::HalfLine, 0, None), &linf, &cfg()).unwrap();
        assert_eq!((d.value, d.path), (1.0, DistPath::TrivialIdeal));
    }

    #[test]
    fn marcinkiewicz_singular_distance() {
        let x = SpaceSpec::marcinkiewicz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        let d = dist_oc(&singular(qr(1, 2), 1), &x, &cfg()).unwrap();
        assert_eq!(d.path, DistPath::LimitFormula);
        assert!((d.value - 1.0).abs() < 1e-9, "{d}");
    }

    #[test]
    fn order_continuity_in_sum_space() {
        assert!(is_order_continuous(&chi(Domain::HalfLine, 0, Some(1)), &sum2(), &cfg()).unwrap());
        assert!(!is_order_continuous(&chi(Domain::HalfLine, 0, None), &sum2(), &cfg()).unwrap());
    }

    #[test]
    fn hudzik_and_cesaro_copy() {
        let f = chi(Domain::HalfLine, 0, None);
        let r = hudzik_check(&f, &sum2(), &cfg()).unwrap();
        assert!(r.overall, "{r}");
        for b in [1, 10] {
            let r = cesaro_copy_check(&f, &qi(0), &Ext::Finite(qi(b)), &sum2(), &cfg(), true).unwrap();
            assert!(r.overall, "{r}");
        }
        let l2 = SpaceSpec::lp(Domain::HalfLine, qi(2));
        let g: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(1))], None).unwrap().into();
        assert!(!hudzik_check(&g, &l2, &cfg()).unwrap().overall);
        assert!(matches!(
            cesaro_copy_check(&g, &qi(0), &Ext::Finite(qi(1)), &l2, &cfg(), false),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn trivial_ideal_checks() {
        let linf = SpaceSpec::linf(Domain::HalfLine);
        let r = trivial_ideal_copy_check(&chi(Domain::HalfLine, 0, Some(1)), &linf, &cfg()).unwrap();
        assert!(r.overall, "{r}");
        let r = trivial_ideal_copy_check(&chi(Domain::HalfLine, 1, Some(2)), &linf, &cfg()).unwrap();
        assert!(!r.overall);
        assert!(!r.clauses[0].pass);
        let x = SpaceSpec::intersection(sum2(), linf).unwrap();
        let eps = find_eps0(&x, &cfg()).unwrap();
        let f: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), eps, qi(1))], None).unwrap().into();
        assert!(trivial_ideal_copy_check(&f, &x, &cfg()).unwrap().overall);
        assert_eq!(
            trivial_ideal_copy_check(&f, &sum2(), &cfg()).unwrap_err(),
            Error::NotTrivialIdeal
        );
    }

    #[test]
    fn witnesses() {
        let fam = build_witness(&WitnessSpec::DisjointBlocks {
            f: chi(Domain::HalfLine, 0, None),
            k: 4,
        })
        .unwrap();
        let r = verify_witness(&fam, &sum2(), &cfg()).unwrap();
        assert!(r.overall, "{r}");
        let x = SpaceSpec::marcinkiewicz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        let fam = build_witness(&WitnessSpec::Marcinkiewicz {
            phi: QuasiConcaveFn::sqrt(),
            a: qi(1),
            k: 3,
        })
        .unwrap();
        let r = verify_witness(&fam, &x, &cfg()).unwrap();
        assert!(r.overall, "{r}");
        let flat = QuasiConcaveFn::flat();
        let lorentz = SpaceSpec::lorentz(Domain::HalfLine, flat.clone()).unwrap();
        let fam = build_witness(&WitnessSpec::FlatLorentz { phi: flat, k: 3 }).unwrap();
        let r = verify_witness(&fam, &lorentz, &cfg()).unwrap();
        assert!(r.overall, "{r}");
    }

    #[test]
    fn am_probe() {
        let f = chi(Domain::HalfLine, 0, None);
        let g: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], None).unwrap().into();
        assert!(am_property_probe(&f, &g, &sum2(), &cfg()).unwrap().overall);
        // Two disjoint copies of the singular witness: the maximum has twice
        // the mass near its singularity, so its distance is sqrt(2).
        let x = SpaceSpec::marcinkiewicz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        let h: Function = PiecewiseFn::new(
            Domain::HalfLine,
            vec![
                Piece::constant(qi(0), qi(2), qi(0)),
                Piece {
                    lo: qi(2),
                    hi: qi(3),
                    formula: Formula::shifted_power(qr(1, 2), qr(-1, 2), qi(-2)),
                },
            ],
            Tail::Zero,
        )
        .unwrap()
        .into();
        let r = am_property_probe(&singular(qr(1, 2), 1), &h, &x, &cfg()).unwrap();
        assert!(!r.overall);
        assert!((r.clauses[0].value.value - 2f64.sqrt()).abs() < 1e-6, "{r}");
    }

    #[test]
    fn modular_instances() {
        let l1 = SpaceSpec::lp(Domain::HalfLine, qi(1));
        let f = chi(Domain::HalfLine, 0, Some(1));
        let sq = OrliczFn::power(qi(2));
        assert!(modular_domination_check(&sq, &l1, &f, 2.0, &cfg()).unwrap().overall);
        assert!(!modular_domination_check(&sq, &l1, &f, 1.5, &cfg()).unwrap().overall);
        assert!(modular_domination_check(&OrliczFn::f_inf(), &l1, &f, 1.0, &cfg()).unwrap().overall);
    }

    #[test]
    fn discrete_membership() {
        let linf = SpaceSpec::linf(Domain::Naturals);
        let m = discrete_oc_membership(&SeqFn::unit_vector(1), &linf, &cfg()).unwrap();
        assert!(m.member);
        let m = discrete_oc_membership(&SeqFn::constant(qi(1)), &linf, &cfg()).unwrap();
        assert!(!m.member);
        assert!((m.dist.unwrap().value - 1.0).abs() < 1e-9);
        let l2 = SpaceSpec::lp(Domain::Naturals, qi(2));
        assert!(discrete_oc_membership(&SeqFn::finite(vec![qi(3), qi(1)]), &l2, &cfg()).unwrap().member);
    }
}
