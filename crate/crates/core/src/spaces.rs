//! Norm engines for concrete rearrangement-invariant spaces, their
//! fundamental functions and the shape of their order-continuous ideals.

use crate::cesaro::{self, CesaroProfile};
use crate::error::{Error, Result};
use crate::generators::{OrliczFn, QuasiConcaveFn};
use crate::measurable_fn::{Domain, Function};
use crate::numeric::{golden_min, integrate_knots};
use crate::profile::{profile_of, Profile, StepBlocks};
use crate::scalar::{fmt_q, to_f64, Q};
use num_traits::One;
use std::fmt;

pub const DEFAULT_MAX_DEPTH: u32 = 40;

/// Evaluation settings shared by every engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Config {
    pub tol: f64,
    /// Cap on `k` in the `n = 2^k` schedule of the limit formula.
    pub max_depth: u32,
}

impl Config {
    pub fn new(tol: f64) -> Config {
        Config {
            tol,
            max_depth: max_depth_from_env(),
        }
    }

    fn quad_tol(&self) -> f64 {
        (self.tol * 1e-3).clamp(1e-14, 1e-8)
    }
}

impl Default for Config {
    fn default() -> Self {
        Config::new(1e-9)
    }
}

/// `RISPACES_MAX_DEPTH`, or 40.
pub fn max_depth_from_env() -> u32 {
    std::env::var("RISPACES_MAX_DEPTH")
        .ok()
        .and_then(|v| v.trim().parse::<u32>().ok())
        .filter(|d| *d > 0)
        .unwrap_or(DEFAULT_MAX_DEPTH)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Exact,
    Numeric,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Numeric => "numeric",
        }
    }
}

/// A computed scalar with its provenance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    pub err_bound: f64,
    pub method: Method,
    pub depth: u32,
}

impl EvalResult {
    pub fn exact(value: f64) -> EvalResult {
        EvalResult {
            value,
            err_bound: 0.0,
            method: Method::Exact,
            depth: 0,
        }
    }

    pub fn numeric(value: f64, err_bound: f64, depth: u32) -> EvalResult {
        let err_bound = if value.is_finite() {
            err_bound.max(f64::EPSILON * value.abs()).max(f64::MIN_POSITIVE)
        } else {
            0.0
        };
        EvalResult {
            value,
            err_bound,
            method: Method::Numeric,
            depth,
        }
    }

    /// Numeric result of a closed-form but floating point evaluation.
    fn rounded(value: f64) -> EvalResult {
        EvalResult::numeric(value, 1e-12 * value.abs(), 0)
    }

    pub fn lower(&self) -> f64 {
        self.value - self.err_bound
    }

    pub fn upper(&self) -> f64 {
        self.value + self.err_bound
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }

    /// Larger of two results, keeping the larger error and depth.
    pub fn max(self, other: EvalResult) -> EvalResult {
        let value = self.value.max(other.value);
        let method = if self.method == Method::Exact && other.method == Method::Exact {
            Method::Exact
        } else {
            Method::Numeric
        };
        EvalResult {
            value,
            err_bound: self.err_bound.max(other.err_bound),
            method,
            depth: self.depth.max(other.depth),
        }
    }
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            Method::Exact => write!(f, "{}", self.value),
            Method::Numeric => write!(f, "{} +/- {:.1e}", self.value, self.err_bound),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    Lp(Q),
    Linf,
    Lorentz(QuasiConcaveFn),
    Marcinkiewicz(QuasiConcaveFn),
    CalderonLozanovskii { base: Box<SpaceSpec>, f: OrliczFn },
    SumLpLinf(Q),
    Intersection(Box<SpaceSpec>, Box<SpaceSpec>),
    Cesaro(Box<SpaceSpec>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpaceSpec {
    pub domain: Domain,
    pub kind: SpaceKind,
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidSpace(msg.into()))
}

impl SpaceSpec {
    pub fn new(domain: Domain, kind: SpaceKind) -> Result<SpaceSpec> {
        let x = SpaceSpec { domain, kind };
        x.validate()?;
        Ok(x)
    }

    pub fn lp(domain: Domain, p: Q) -> SpaceSpec {
        SpaceSpec {
            domain,
            kind: SpaceKind::Lp(p),
        }
    }

    pub fn linf(domain: Domain) -> SpaceSpec {
        SpaceSpec {
            domain,
            kind: SpaceKind::Linf,
        }
    }

    pub fn lorentz(domain: Domain, phi: QuasiConcaveFn) -> Result<SpaceSpec> {
        SpaceSpec::new(domain, SpaceKind::Lorentz(phi))
    }

    pub fn marcinkiewicz(domain: Domain, phi: QuasiConcaveFn) -> Result<SpaceSpec> {
        SpaceSpec::new(domain, SpaceKind::Marcinkiewicz(phi))
    }

    pub fn calderon_lozanovskii(base: SpaceSpec, f: OrliczFn) -> Result<SpaceSpec> {
        SpaceSpec::new(
            base.domain,
            SpaceKind::CalderonLozanovskii {
                base: Box::new(base),
                f,
            },
        )
    }

    /// Orlicz space `L_F`, the Calderon-Lozanovskii space over `L_1`.
    pub fn orlicz(domain: Domain, f: OrliczFn) -> Result<SpaceSpec> {
        SpaceSpec::calderon_lozanovskii(SpaceSpec::lp(domain, Q::one()), f)
    }

    /// `X^(p)`.
    pub fn convexification(base: SpaceSpec, p: Q) -> Result<SpaceSpec> {
        SpaceSpec::calderon_lozanovskii(base, OrliczFn::power(p))
    }

    pub fn sum_lp_linf(domain: Domain, p: Q) -> SpaceSpec {
        SpaceSpec {
            domain,
            kind: SpaceKind::SumLpLinf(p),
        }
    }

    pub fn intersection(left: SpaceSpec, right: SpaceSpec) -> Result<SpaceSpec> {
        SpaceSpec::new(left.domain, SpaceKind::Intersection(Box::new(left), Box::new(right)))
    }

    pub fn cesaro(base: SpaceSpec) -> SpaceSpec {
        SpaceSpec {
            domain: base.domain,
            kind: SpaceKind::Cesaro(Box::new(base)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let same = |b: &SpaceSpec| -> Result<()> {
            if b.domain != self.domain {
                return Err(Error::DomainMismatch {
                    expected: self.domain.name().into(),
                    found: b.domain.name().into(),
                });
            }
            b.validate()
        };
        let phi_domain = |phi: &QuasiConcaveFn| -> Result<()> {
            phi.validate()?;
            if phi.domain == Domain::Unit && self.domain != Domain::Unit {
                return invalid("a phi on (0,1) cannot generate a space on an infinite domain");
            }
            Ok(())
        };
        match &self.kind {
            SpaceKind::Lp(p) | SpaceKind::SumLpLinf(p) => {
                if *p < Q::one() {
                    return invalid(format!("exponent must be at least 1, got {}", fmt_q(p)));
                }
            }
            SpaceKind::Linf => {}
            SpaceKind::Lorentz(phi) => {
                phi_domain(phi)?;
                if !phi.is_concave() {
                    return invalid("Lorentz spaces need a concave phi");
                }
            }
            SpaceKind::Marcinkiewicz(phi) => phi_domain(phi)?,
            SpaceKind::CalderonLozanovskii { base, f } => {
                same(base)?;
                f.validate()?;
            }
            SpaceKind::Intersection(l, r) => {
                same(l)?;
                same(r)?;
            }
            SpaceKind::Cesaro(base) => same(base)?,
        }
        Ok(())
    }

    /// Short human-readable name.
    pub fn label(&self) -> String {
        match &self.kind {
            SpaceKind::Lp(p) => format!("L{}", fmt_q(p)),
            SpaceKind::Linf => "Linf".into(),
            SpaceKind::Lorentz(_) => "Lorentz".into(),
            SpaceKind::Marcinkiewicz(_) => "Marcinkiewicz".into(),
            SpaceKind::CalderonLozanovskii { base, f } => match f.as_power() {
                Some(p) => format!("{}^({})", base.label(), p),
                None => format!("CL({})", base.label()),
            },
            SpaceKind::SumLpLinf(p) => format!("L{}+Linf", fmt_q(p)),
            SpaceKind::Intersection(l, r) => format!("{}&{}", l.label(), r.label()),
            SpaceKind::Cesaro(b) => format!("C({})", b.label()),
        }
    }

    /// True when the norm depends on `f*` only.
    pub fn is_rearrangement_invariant(&self) -> bool {
        match &self.kind {
            SpaceKind::Cesaro(_) => false,
            SpaceKind::CalderonLozanovskii { base, .. } => base.is_rearrangement_invariant(),
            SpaceKind::Intersection(l, r) => l.is_rearrangement_invariant() && r.is_rearrangement_invariant(),
            _ => true,
        }
    }
}

pub(crate) fn check_domain(found: Domain, x: &SpaceSpec) -> Result<()> {
    if found != x.domain {
        return Err(Error::DomainMismatch {
            expected: x.domain.name().into(),
            found: found.name().into(),
        });
    }
    Ok(())
}

/// `||f||_X`.
pub fn norm(f: &Function, x: &SpaceSpec, cfg: &Config) -> Result<EvalResult> {
    check_domain(f.domain(), x)?;
    match &x.kind {
        SpaceKind::Cesaro(base) => cesaro::cx_norm(f, base, cfg),
        SpaceKind::Intersection(l, r) => Ok(norm(f, l, cfg)?.max(norm(f, r, cfg)?)),
        SpaceKind::CalderonLozanovskii { base, .. } if !base.is_rearrangement_invariant() => Err(
            Error::Unsupported("Calderon-Lozanovskii spaces over a non-symmetric base".into()),
        ),
        _ => {
            let p = profile_of(f)?;
            norm_of_profile(p.as_ref(), x, cfg)
        }
    }
}

/// Norm of the non-increasing function `f*` described by `p`. Equals
/// `||f||_X` for rearrangement-invariant `X`; for Cesaro spaces it is
/// `||C(f*)||`.
pub fn norm_of_profile(p: &dyn Profile, x: &SpaceSpec, cfg: &Config) -> Result<EvalResult> {
    check_domain(p.domain(), x)?;
    match &x.kind {
        SpaceKind::Lp(q) => Ok(lp_norm(p, to_f64(q))),
        SpaceKind::Linf => {
            let v = p.head();
            Ok(if p.blocks().is_some() {
                EvalResult::exact(v)
            } else {
                EvalResult::rounded(v)
            })
        }
        SpaceKind::Lorentz(phi) => Ok(lorentz_norm(p, phi, cfg)),
        SpaceKind::Marcinkiewicz(phi) => Ok(marcinkiewicz_norm(p, phi)),
        SpaceKind::CalderonLozanovskii { base, f } => luxemburg_norm(p, base, f, cfg),
        SpaceKind::SumLpLinf(q) => Ok(sum_lp_linf_norm(p, to_f64(q))),
        SpaceKind::Intersection(l, r) => Ok(norm_of_profile(p, l, cfg)?.max(norm_of_profile(p, r, cfg)?)),
        SpaceKind::Cesaro(base) => {
            let c = CesaroProfile::new(p);
            norm_of_profile(&c, base, cfg)
        }
    }
}

fn lp_norm(p: &dyn Profile, q: f64) -> EvalResult {
    let e = p.excess(0.0, q, f64::INFINITY);
    let v = if q == 1.0 { e } else { e.powf(1.0 / q) };
    if p.blocks().is_some() {
        EvalResult::exact(v)
    } else {
        EvalResult::rounded(v)
    }
}

/// Value of `phi` at the end of the domain.
fn phi_at_end(phi: &QuasiConcaveFn, domain: Domain) -> f64 {
    match domain {
        Domain::Unit => phi.eval(1.0),
        _ => phi.limits().1,
    }
}

/// Layer cake `int_0^inf phi(d(lam)) dlam`, equal to `int f* dphi`.
fn lorentz_norm(p: &dyn Profile, phi: &QuasiConcaveFn, cfg: &Config) -> EvalResult {
    let tail = p.tail();
    let head = p.head();
    let end = phi_at_end(phi, p.domain());
    let tail_part = if tail > 0.0 { tail * end } else { 0.0 };
    if tail_part.is_infinite() {
        return EvalResult::exact(f64::INFINITY);
    }
    if let Some(b) = p.blocks() {
        let mut acc = tail_part;
        let mut len = 0.0;
        for (i, &(v, l)) in b.blocks.iter().enumerate() {
            len += l;
            let next = b.blocks.get(i + 1).map(|x| x.0).unwrap_or(b.tail);
            acc += (v - next) * phi.eval(len);
        }
        return EvalResult::exact(acc);
    }
    if head.is_infinite() && phi.limits().0 > 0.0 {
        return EvalResult::exact(f64::INFINITY);
    }
    let levels = p.levels();
    let q = integrate_knots(|lam| phi.eval(p.dist(lam)), tail, head, &levels, cfg.quad_tol());
    EvalResult::numeric(tail_part + q.value, q.err + 1e-12 * q.value.abs(), 0)
}

/// Maximise a function on `[lo, hi]` by a log scan and golden refinement;
/// `integer` restricts the arguments to whole numbers.
fn sup_on<G: Fn(f64) -> f64>(g: &G, lo: f64, hi: f64, integer: bool) -> f64 {
    if !(hi > lo) {
        return g(lo);
    }
    let n = 32;
    let (a, b) = (lo.ln(), hi.ln());
    let pts: Vec<f64> = (0..=n)
        .map(|i| {
            let t = (a + (b - a) * i as f64 / n as f64).exp();
            let t = t.clamp(lo, hi);
            if integer {
                t.round().max(1.0)
            } else {
                t
            }
        })
        .collect();
    let vals: Vec<f64> = pts.iter().map(|t| g(*t)).collect();
    let mut best_i = 0;
    for i in 1..vals.len() {
        if vals[i] > vals[best_i] {
            best_i = i;
        }
    }
    let mut best = vals[best_i];
    if best.is_infinite() {
        return best;
    }
    let l = pts[best_i.saturating_sub(1)];
    let r = pts[(best_i + 1).min(n)];
    if r > l {
        let (u, v) = golden_min(|u| -g(u.exp()), l.ln(), r.ln(), 1e-13, 300);
        if integer {
            let t = u.exp();
            for c in [t.floor(), t.ceil()] {
                if c >= 1.0 && c >= lo && c <= hi {
                    best = best.max(g(c));
                }
            }
        } else {
            best = best.max(-v);
        }
    }
    best
}

/// Largest value of `g` along `t = 10^(-9 - 30 j)` (or its reciprocal); `inf`
/// when the samples keep growing geometrically.
fn edge_probe<G: Fn(f64) -> f64>(g: &G, start: f64, toward_zero: bool) -> f64 {
    let mut vals = Vec::new();
    for j in 0..10 {
        let f = 10f64.powi(30 * j);
        let t = if toward_zero { start / f } else { start * f };
        if t <= 0.0 || !t.is_finite() {
            break;
        }
        vals.push(g(t));
    }
    let best = vals.iter().copied().fold(0.0, f64::max);
    let n = vals.len();
    if n >= 3 {
        let grows = vals.windows(2).all(|w| w[1] > w[0] * 1.001);
        if grows && vals[n - 1] > 1e6 * vals[0].max(f64::MIN_POSITIVE) {
            return f64::INFINITY;
        }
    }
    best
}

/// `sup_t phi(t)/t int_0^t f*`; over whole `t` on the naturals.
fn marcinkiewicz_norm(p: &dyn Profile, phi: &QuasiConcaveFn) -> EvalResult {
    let domain = p.domain();
    let integer = domain == Domain::Naturals;
    let measure = domain.measure();
    let (phi0, _) = phi.limits();
    let head = p.head();
    let tail = p.tail();
    if head.is_infinite() && phi0 > 0.0 {
        return EvalResult::exact(f64::INFINITY);
    }
    let end = phi_at_end(phi, domain);
    let mut best: f64 = 0.0;
    if tail > 0.0 && domain != Domain::Unit {
        best = tail * end;
        if best.is_infinite() {
            return EvalResult::exact(best);
        }
    }
    if phi0 > 0.0 && !integer {
        best = best.max(phi0 * head);
    }
    let g = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let t = t.min(measure);
        let pt = p.primitive(t);
        if pt == 0.0 {
            return 0.0;
        }
        phi.eval(t) / t * pt
    };
    let mut cuts: Vec<f64> = p.knots();
    cuts.extend(phi.breakpoints());
    cuts.retain(|c| c.is_finite() && *c > 0.0 && *c < measure);
    if integer {
        for c in cuts.iter_mut() {
            *c = c.round().max(1.0);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let first = cuts.first().copied().unwrap_or(1.0);
    let last = cuts.last().copied().unwrap_or(1.0);
    let lo_edge = if integer { 1.0 } else { first.min(1.0) * 1e-9 };
    let hi_edge = if measure.is_finite() { measure } else { last.max(1.0) * 1e9 };
    let mut grid = vec![lo_edge];
    grid.extend(cuts.iter().copied().filter(|c| *c > lo_edge && *c < hi_edge));
    grid.push(hi_edge);
    for w in grid.windows(2) {
        best = best.max(sup_on(&g, w[0], w[1], integer));
        if best.is_infinite() {
            return EvalResult::exact(best);
        }
    }
    if !integer {
        best = best.max(edge_probe(&g, lo_edge, true));
    }
    if measure.is_infinite() {
        best = best.max(edge_probe(&|t: f64| if integer { g(t.round()) } else { g(t) }, hi_edge, false));
    }
    if best.is_infinite() {
        return EvalResult::exact(best);
    }
    EvalResult::numeric(best, 1e-11 * best, 0)
}

/// Exact inf-convolution `min_c ||(f* - c)_+||_p + c`.
fn sum_lp_linf_norm(p: &dyn Profile, q: f64) -> EvalResult {
    let tail = p.tail();
    let head = p.head();
    if head <= tail {
        return EvalResult::exact(head);
    }
    let h = |c: f64| {
        let e = p.excess(c, q, f64::INFINITY);
        e.powf(1.0 / q) + c
    };
    // Any finite h(c1) bounds the minimiser from above since h(c) >= c.
    let mut c1 = tail;
    let mut h1 = h(c1);
    let mut s = 1.0;
    while !h1.is_finite() && s > 1e-300 {
        c1 = p.value(s).max(tail);
        h1 = h(c1);
        s *= 0.5;
    }
    if !h1.is_finite() {
        return EvalResult::exact(f64::INFINITY);
    }
    let hi = if head.is_finite() { head.min(h1) } else { h1 }.max(c1);
    let xtol = 1e-13 * hi.abs().max(1.0);
    let (_, v) = golden_min(h, tail, hi, xtol, 400);
    let v = v.min(h1).min(if head.is_finite() { head } else { f64::INFINITY });
    EvalResult::numeric(v, 1e-11 * v.abs(), 0)
}

/// `(int_0^1 f*^p)^(1/p)`, equivalent (not equal) to the `L_p + L_inf` norm.
pub fn sum_lp_linf_footnote(f: &Function, p: f64) -> Result<f64> {
    let prof = profile_of(f)?;
    Ok(prof.excess(0.0, p, 1.0).powf(1.0 / p))
}

/// `F(f*/lam)` as a profile, for non-step `f*`.
struct Composed<'a> {
    base: &'a dyn Profile,
    f: &'a OrliczFn,
    lam: f64,
    qtol: f64,
}

impl<'a> Composed<'a> {
    fn inv(&self, mu: f64) -> f64 {
        self.lam * self.f.inverse_upper(mu.max(0.0))
    }
}

impl<'a> Profile for Composed<'a> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn head(&self) -> f64 {
        self.f.eval(self.base.head() / self.lam)
    }

    fn tail(&self) -> f64 {
        if self.domain() == Domain::Unit {
            0.0
        } else {
            self.f.eval(self.base.tail() / self.lam)
        }
    }

    fn dist(&self, mu: f64) -> f64 {
        let x = self.inv(mu);
        if x.is_infinite() {
            return 0.0;
        }
        self.base.dist(x)
    }

    fn value(&self, s: f64) -> f64 {
        if s >= self.domain().measure() {
            return 0.0;
        }
        self.f.eval(self.base.value(s) / self.lam)
    }

    fn excess(&self, mu: f64, p: f64, t: f64) -> f64 {
        let mu = mu.max(0.0);
        let t = t.min(self.domain().measure());
        if t <= 0.0 {
            return 0.0;
        }
        let tail = self.tail();
        if mu < tail && t.is_infinite() {
            return f64::INFINITY;
        }
        let head = self.head();
        if head <= mu {
            return 0.0;
        }
        // int_mu^head p (nu - mu)^(p-1) min(d(nu), t) dnu
        let mut acc = 0.0;
        let start = mu.max(tail);
        if tail > mu {
            acc += t * (tail - mu).powf(p);
        }
        let mut knots = self.levels();
        if t.is_finite() {
            knots.push(self.value(t));
        }
        let q = integrate_knots(
            |nu| p * (nu - mu).powf(p - 1.0) * self.dist(nu).min(t),
            start,
            head,
            &knots,
            self.qtol,
        );
        acc + q.value
    }

    fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.base.levels().iter().map(|l| self.f.eval(l / self.lam)).collect();
        for b in self.f.breakpoints() {
            v.push(self.f.eval(b));
        }
        v.retain(|x| x.is_finite());
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn knots(&self) -> Vec<f64> {
        let mut v = self.base.knots();
        for b in self.f.breakpoints() {
            v.push(self.base.dist(self.lam * b));
        }
        v.retain(|x| x.is_finite() && *x > 0.0);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }
}

/// `|| F(f*/lam) ||_base`.
pub(crate) fn modular(p: &dyn Profile, base: &SpaceSpec, f: &OrliczFn, lam: f64, cfg: &Config) -> Result<f64> {
    let bf = f.b_f.to_f64();
    let head = p.head() / lam;
    if head > bf || (head == bf && f.value_at_bf.is_infinite()) {
        return Ok(f64::INFINITY);
    }
    if p.domain() != Domain::Unit && p.tail() / lam > f.zero_end() && base_has_no_room(base) {
        return Ok(f64::INFINITY);
    }
    let v = match p.blocks() {
        Some(b) => {
            let m: StepBlocks = b.map(|v| f.eval(v / lam));
            norm_of_profile(&m, base, cfg)?.value
        }
        None => {
            let c = Composed {
                base: p,
                f,
                lam,
                qtol: cfg.quad_tol(),
            };
            norm_of_profile(&c, base, cfg)?.value
        }
    };
    Ok(v)
}

/// True when every positive constant on the whole half line has infinite
/// norm in `x`.
fn base_has_no_room(x: &SpaceSpec) -> bool {
    match phi_limits(x) {
        Ok((_, end)) => end.is_infinite(),
        Err(_) => false,
    }
}

/// Luxemburg-Nakano norm `inf { lam : ||F(f/lam)||_base <= 1 }` by bracketed
/// bisection.
fn luxemburg_norm(p: &dyn Profile, base: &SpaceSpec, f: &OrliczFn, cfg: &Config) -> Result<EvalResult> {
    let head = p.head();
    if head == 0.0 {
        return Ok(EvalResult::exact(0.0));
    }
    let m = |lam: f64| modular(p, base, f, lam, cfg);
    let mut hi = if head.is_finite() { head } else { 1.0 };
    let mut steps = 0;
    while m(hi)? > 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 2000 || !hi.is_finite() {
            return Ok(EvalResult::exact(f64::INFINITY));
        }
    }
    let mut lo = 0.5 * hi;
    while m(lo)? <= 1.0 {
        hi = lo;
        lo *= 0.5;
        if lo < 1e-300 {
            return Ok(EvalResult::exact(0.0));
        }
    }
    let mut depth = 0;
    while hi - lo > cfg.tol * lo / 100.0 {
        if depth >= 200 {
            return Err(Error::NoConvergence {
                depth,
                partial: vec![lo, hi],
            });
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m(mid)? <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        depth += 1;
    }
    Ok(EvalResult::numeric(0.5 * (lo + hi), 0.5 * (hi - lo), depth))
}

/// `lam -> ||F(|f|/lam)||_base`, exposed for checks on the bisection.
pub fn luxemburg_modular(f: &Function, base: &SpaceSpec, orlicz: &OrliczFn, lam: f64, cfg: &Config) -> Result<f64> {
    let p = profile_of(f)?;
    modular(p.as_ref(), base, orlicz, lam, cfg)
}

/// `phi_X(t) = ||chi_(0,t)||_X`; on the naturals `t` must be a whole number.
pub fn fundamental(x: &SpaceSpec, t: f64, cfg: &Config) -> Result<EvalResult> {
    if !(t > 0.0) {
        return Err(Error::Precondition(format!("fundamental function needs t > 0, got {t}")));
    }
    if x.domain == Domain::Naturals && t.is_finite() && t.fract() != 0.0 {
        return Err(Error::Precondition(format!("fundamental function on the naturals needs an integer, got {t}")));
    }
    let t = t.min(x.domain.measure());
    let blocks = if t.is_infinite() {
        StepBlocks::new(vec![], 1.0, x.domain)
    } else {
        StepBlocks::new(vec![(1.0, t)], 0.0, x.domain)
    };
    norm_of_profile(&blocks, x, cfg)
}

/// Classification of `X_a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OcClass {
    /// `X_a = {0}`.
    Trivial,
    Nontrivial,
    /// `X_a = X`.
    All,
}

impl OcClass {
    pub fn name(&self) -> &'static str {
        match self {
            OcClass::Trivial => "trivial",
            OcClass::Nontrivial => "nontrivial",
            OcClass::All => "all",
        }
    }
}

fn is_linear(phi: &QuasiConcaveFn) -> bool {
    phi.pieces.len() == 1 && {
        let f = &phi.pieces[0].formula;
        f.kind_name() == "pow" && f.alpha == Q::one() && f.shift == Q::from_integer(0.into())
    }
}

/// Rule-table classification of the order-continuous ideal.
pub fn oc_ideal_class(x: &SpaceSpec) -> Result<OcClass> {
    use OcClass::*;
    let naturals = x.domain == Domain::Naturals;
    let unit = x.domain == Domain::Unit;
    let unclassifiable = || -> Result<OcClass> {
        Err(Error::Unclassifiable(format!("no rule for the ideal of {}", x.label())))
    };
    let class = match &x.kind {
        SpaceKind::Lp(_) => All,
        SpaceKind::Linf => {
            if naturals {
                Nontrivial
            } else {
                Trivial
            }
        }
        SpaceKind::Lorentz(phi) => {
            let (phi0, phi_inf) = phi.limits();
            if phi0 > 0.0 && !naturals {
                Trivial
            } else if phi_inf.is_infinite() || unit {
                All
            } else {
                Nontrivial
            }
        }
        SpaceKind::Marcinkiewicz(phi) => {
            if phi.limits().0 > 0.0 && !naturals {
                Trivial
            } else if is_linear(phi) {
                All
            } else {
                Nontrivial
            }
        }
        SpaceKind::SumLpLinf(_) => {
            if unit {
                All
            } else {
                Nontrivial
            }
        }
        SpaceKind::CalderonLozanovskii { base, f } => {
            if f.as_power().is_some() {
                oc_ideal_class(base)?
            } else if f.b_f.finite().is_some() && !naturals {
                Trivial
            } else {
                return unclassifiable();
            }
        }
        SpaceKind::Intersection(l, r) => {
            let (a, b) = (oc_ideal_class(l), oc_ideal_class(r));
            match (a, b) {
                (Ok(Trivial), _) | (_, Ok(Trivial)) if !naturals => Trivial,
                (Ok(All), Ok(All)) => All,
                _ => return unclassifiable(),
            }
        }
        SpaceKind::Cesaro(_) => return unclassifiable(),
    };
    Ok(class)
}

/// Rule-table condition: `f chi_A` is order continuous for every `f` in `X`
/// and every `A` of finite measure.
pub fn d_infinity(x: &SpaceSpec) -> bool {
    if x.domain == Domain::Naturals {
        return !matches!(x.kind, SpaceKind::Cesaro(_));
    }
    match &x.kind {
        SpaceKind::Lp(_) | SpaceKind::SumLpLinf(_) => true,
        SpaceKind::Linf | SpaceKind::Marcinkiewicz(_) | SpaceKind::Cesaro(_) => false,
        SpaceKind::Lorentz(phi) => phi.limits().0 == 0.0,
        SpaceKind::CalderonLozanovskii { base, f } => f.as_power().is_some() && d_infinity(base),
        SpaceKind::Intersection(l, r) => d_infinity(l) && d_infinity(r),
    }
}

/// `(phi_X(0+), phi_X(inf))`. On the unit interval the second entry is
/// `phi_X(1)`; on the naturals the first is `phi_X(1)`.
pub fn phi_limits(x: &SpaceSpec) -> Result<(f64, f64)> {
    let unit = x.domain == Domain::Unit;
    let inf = f64::INFINITY;
    let (zero, end) = match &x.kind {
        SpaceKind::Lp(_) => (0.0, if unit { 1.0 } else { inf }),
        SpaceKind::Linf => (1.0, 1.0),
        SpaceKind::Lorentz(phi) | SpaceKind::Marcinkiewicz(phi) => (phi.limits().0, phi_at_end(phi, x.domain)),
        SpaceKind::SumLpLinf(_) => (0.0, 1.0),
        SpaceKind::CalderonLozanovskii { base, f } => {
            let (b0, b1) = phi_limits(base)?;
            let through = |v: f64| {
                let u = if v == 0.0 { inf } else { 1.0 / v };
                let w = f.inverse_upper(u);
                if w == 0.0 {
                    inf
                } else {
                    1.0 / w
                }
            };
            (through(b0), through(b1))
        }
        SpaceKind::Intersection(l, r) => {
            let (a0, a1) = phi_limits(l)?;
            let (b0, b1) = phi_limits(r)?;
            (a0.max(b0), a1.max(b1))
        }
        SpaceKind::Cesaro(_) => {
            return Err(Error::Unsupported("limits of the fundamental function of a Cesaro space".into()))
        }
    };
    if x.domain == Domain::Naturals {
        let one = fundamental(x, 1.0, &Config::default())?.value;
        return Ok((one, end));
    }
    Ok((zero, end))
}

/// `||id : X -> L_inf|| = 1/phi_X(0+)`.
pub fn embed_norm_to_linf(x: &SpaceSpec) -> Result<EvalResult> {
    let (zero, _) = phi_limits(x)?;
    if zero == 0.0 {
        return Err(Error::NotEmbedded);
    }
    Ok(EvalResult::exact(1.0 / zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurable_fn::{chi, PiecewiseFn};
    use crate::scalar::{qi, qr};

    fn cfg() -> Config {
        Config::default()
    }

    #[test]
    fn lp_of_indicator() {
        let x = SpaceSpec::lp(Domain::HalfLine, qi(2));
        let v = norm(&chi(Domain::HalfLine, 0, Some(4)), &x, &cfg()).unwrap();
        assert_eq!(v.value, 2.0);
        assert_eq!(v.method, Method::Exact);
    }

    #[test]
    fn marcinkiewicz_of_singular_witness() {
        let f = PiecewiseFn::new(
            Domain::HalfLine,
            vec![crate::measurable_fn::Piece {
                lo: qi(0),
                hi: qi(1),
                formula: crate::formula::Formula::power(qr(1, 2), qr(-1, 2)),
            }],
            crate::measurable_fn::Tail::Zero,
        )
        .unwrap();
        let x = SpaceSpec::marcinkiewicz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        let v = norm(&f.into(), &x, &cfg()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn f_inf_gives_sup_norm() {
        let x = SpaceSpec::orlicz(Domain::HalfLine, OrliczFn::f_inf()).unwrap();
        let f = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(5), qi(3))], None).unwrap();
        let v = norm(&f.into(), &x, &cfg()).unwrap();
        assert!((v.value - 3.0).abs() < 1e-9);
    }

    #[test]
    fn sum_norm_of_constant() {
        let x = SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2));
        let v = norm(&chi(Domain::HalfLine, 0, None), &x, &cfg()).unwrap();
        assert_eq!(v.value, 1.0);
        let v = norm(&chi(Domain::HalfLine, 0, Some(4)), &x, &cfg()).unwrap();
        // min_c 2(1-c) + c over [0,1] is 1 at c = 1.
        assert!((v.value - 1.0).abs() < 1e-12);
        let v = norm(&chi(Domain::HalfLine, 0, Some(1) ), &x, &cfg()).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        let quarter = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qr(1, 4), qi(1))], None).unwrap();
        let v = norm(&quarter.into(), &x, &cfg()).unwrap();
        assert!((v.value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fundamental_functions() {
        let lor = SpaceSpec::lorentz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        for t in [0.5, 1.0, 7.0] {
            let v = fundamental(&lor, t, &cfg()).unwrap();
            assert!((v.value - t.sqrt()).abs() < 1e-14);
        }
        let mar = SpaceSpec::marcinkiewicz(Domain::HalfLine, QuasiConcaveFn::sqrt()).unwrap();
        assert!((fundamental(&mar, 4.0, &cfg()).unwrap().value - 2.0).abs() < 1e-10);
        let l3 = SpaceSpec::lp(Domain::HalfLine, qi(3));
        assert!((fundamental(&l3, 8.0, &cfg()).unwrap().value - 2.0).abs() < 1e-14);
    }

    #[test]
    fn classes_and_embeddings() {
        let h = Domain::HalfLine;
        assert_eq!(oc_ideal_class(&SpaceSpec::linf(h)).unwrap(), OcClass::Trivial);
        assert_eq!(
            oc_ideal_class(&SpaceSpec::lorentz(h, QuasiConcaveFn::sqrt()).unwrap()).unwrap(),
            OcClass::All
        );
        assert_eq!(oc_ideal_class(&SpaceSpec::sum_lp_linf(h, qi(2))).unwrap(), OcClass::Nontrivial);
        assert_eq!(embed_norm_to_linf(&SpaceSpec::linf(h)).unwrap().value, 1.0);
        let both = SpaceSpec::intersection(SpaceSpec::lp(h, qi(2)), SpaceSpec::linf(h)).unwrap();
        assert_eq!(embed_norm_to_linf(&both).unwrap().value, 1.0);
        assert!(matches!(
            embed_norm_to_linf(&SpaceSpec::lp(h, qi(2))),
            Err(Error::NotEmbedded)
        ));
        let cl = SpaceSpec::orlicz(h, OrliczFn::f_p_inf(qi(2))).unwrap();
        assert_eq!(phi_limits(&cl).unwrap(), (1.0, f64::INFINITY));
        let linf_f = SpaceSpec::orlicz(h, OrliczFn::f_inf()).unwrap();
        assert_eq!(phi_limits(&linf_f).unwrap(), (1.0, 1.0));
    }
}
