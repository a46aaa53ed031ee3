//! Functions on `(0,1)`, `(0,inf)` and the naturals as finitely many analytic
//! pieces plus a tail rule.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::scalar::{fmt_q, qf, qi, to_f64, Ext, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

pub use crate::rearrangement::{distribution, rearrange, rearrange_exact, tail_head, DistributionCurve, Rearranged};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Domain {
    #[serde(rename = "unit")]
    Unit,
    #[serde(rename = "halfline")]
    HalfLine,
    #[serde(rename = "naturals")]
    Naturals,
}

impl Domain {
    pub fn name(&self) -> &'static str {
        match self {
            Domain::Unit => "unit",
            Domain::HalfLine => "halfline",
            Domain::Naturals => "naturals",
        }
    }

    /// Total measure of the domain.
    pub fn measure(&self) -> f64 {
        match self {
            Domain::Unit => 1.0,
            _ => f64::INFINITY,
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Piece {
    pub lo: Q,
    pub hi: Q,
    pub formula: Formula,
}

impl Piece {
    pub fn constant(lo: Q, hi: Q, v: Q) -> Piece {
        Piece {
            lo,
            hi,
            formula: Formula::constant(v),
        }
    }
}

/// A constant block `value` on `[lo, hi)` inside one period.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub lo: Q,
    pub hi: Q,
    pub value: Q,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Tail {
    Zero,
    Formula(Formula),
    /// Step pattern on `[0, period)` repeated from the end of the pieces.
    Periodic { period: Q, pattern: Vec<Block> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFn {
    pub domain: Domain,
    pub pieces: Vec<Piece>,
    pub tail: Tail,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SeqTail {
    Zero,
    /// `x_n = formula(n)` for `n > N`.
    Formula(Formula),
    /// `x_n = (a H_n + k)/n + b` for `n > N`, with `H_n` the harmonic number.
    Harmonic { a: Q, k: Q, b: Q },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeqFn {
    pub head: Vec<Q>,
    pub tail: SeqTail,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Function {
    Piecewise(PiecewiseFn),
    Seq(SeqFn),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidFunction(msg.into()))
}

pub(crate) fn check_formula_on(f: &Formula, lo: &Q, hi: Option<&Q>) -> Result<()> {
    if (!f.k.is_zero() || !f.m.is_zero()) && lo.is_zero() {
        return invalid("a/t and ln(t)/t terms need a piece starting above 0");
    }
    if !f.c.is_zero() && !f.alpha.is_zero() {
        let u = lo + &f.shift;
        if u.is_negative() {
            return invalid("power base t + s must be nonnegative on the piece");
        }
    }
    if let Some(hi) = hi {
        if hi <= lo {
            return invalid(format!("piece bounds out of order: ({}, {})", fmt_q(lo), fmt_q(hi)));
        }
    }
    Ok(())
}

impl PiecewiseFn {
    pub fn new(domain: Domain, pieces: Vec<Piece>, tail: Tail) -> Result<Self> {
        let f = PiecewiseFn { domain, pieces, tail };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        if self.domain == Domain::Naturals {
            return invalid("piecewise functions live on unit or halfline; use a sequence");
        }
        let mut at = Q::zero();
        for p in &self.pieces {
            if p.lo != at {
                return invalid(format!(
                    "pieces must be contiguous from 0: expected lo = {}, got {}",
                    fmt_q(&at),
                    fmt_q(&p.lo)
                ));
            }
            check_formula_on(&p.formula, &p.lo, Some(&p.hi))?;
            at = p.hi.clone();
        }
        if self.domain == Domain::Unit {
            if at > Q::one() {
                return invalid("pieces extend beyond 1 on the unit interval");
            }
            if self.tail != Tail::Zero {
                return invalid("functions on the unit interval carry no tail");
            }
        }
        match &self.tail {
            Tail::Zero => {}
            Tail::Formula(f) => check_formula_on(f, &at, None)?,
            Tail::Periodic { period, pattern } => {
                if !period.is_positive() {
                    return invalid("period must be positive");
                }
                let mut last = Q::zero();
                for b in pattern {
                    if b.lo < last || b.hi <= b.lo || &b.hi > period {
                        return invalid("periodic pattern blocks must be ordered inside [0, period)");
                    }
                    last = b.hi.clone();
                }
            }
        }
        Ok(())
    }

    /// Step function from blocks `(lo, hi, value)`, gaps filled with zero.
    pub fn step(domain: Domain, blocks: &[(Q, Q, Q)], tail: Option<Q>) -> Result<Self> {
        let mut sorted: Vec<&(Q, Q, Q)> = blocks.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut pieces = Vec::new();
        let mut at = Q::zero();
        for (lo, hi, v) in sorted {
            if lo < &at {
                return invalid("overlapping blocks");
            }
            if lo > &at {
                pieces.push(Piece::constant(at.clone(), lo.clone(), Q::zero()));
            }
            pieces.push(Piece::constant(lo.clone(), hi.clone(), v.clone()));
            at = hi.clone();
        }
        let tail = match tail {
            Some(v) if !v.is_zero() => Tail::Formula(Formula::constant(v)),
            _ => Tail::Zero,
        };
        PiecewiseFn::new(domain, pieces, tail)
    }

    /// `v * chi_(lo, hi)`.
    pub fn indicator(domain: Domain, lo: Q, hi: Ext, v: Q) -> Result<Self> {
        match hi {
            Ext::Finite(h) => PiecewiseFn::step(domain, &[(lo, h, v)], None),
            Ext::Infinite => {
                let pieces = if lo.is_zero() {
                    vec![]
                } else {
                    vec![Piece::constant(Q::zero(), lo, Q::zero())]
                };
                PiecewiseFn::new(domain, pieces, Tail::Formula(Formula::constant(v)))
            }
        }
    }

    /// End of the explicit pieces (start of the tail).
    pub fn end(&self) -> Q {
        self.pieces.last().map(|p| p.hi.clone()).unwrap_or_else(Q::zero)
    }

    pub fn is_step(&self) -> bool {
        self.pieces.iter().all(|p| p.formula.is_const())
            && match &self.tail {
                Tail::Zero | Tail::Periodic { .. } => true,
                Tail::Formula(f) => f.is_const(),
            }
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 || (self.domain == Domain::Unit && t >= 1.0) {
            return 0.0;
        }
        for p in &self.pieces {
            if t < to_f64(&p.hi) {
                return p.formula.term().eval(t);
            }
        }
        let end = to_f64(&self.end());
        match &self.tail {
            Tail::Zero => 0.0,
            Tail::Formula(f) => f.term().eval(t),
            Tail::Periodic { period, pattern } => {
                let per = to_f64(period);
                let r = (t - end).rem_euclid(per);
                pattern
                    .iter()
                    .find(|b| r >= to_f64(&b.lo) && r < to_f64(&b.hi))
                    .map(|b| to_f64(&b.value))
                    .unwrap_or(0.0)
            }
        }
    }

    /// Exact value at a rational point, when the piece formula allows it.
    pub fn eval_exact(&self, t: &Q) -> Option<Q> {
        if !t.is_positive() || (self.domain == Domain::Unit && t >= &Q::one()) {
            return Some(Q::zero());
        }
        for p in &self.pieces {
            if t < &p.hi {
                return p.formula.eval_exact(t);
            }
        }
        match &self.tail {
            Tail::Zero => Some(Q::zero()),
            Tail::Formula(f) => f.eval_exact(t),
            Tail::Periodic { period, pattern } => {
                let off = t - self.end();
                let r = &off - (&off / period).floor() * period;
                Some(
                    pattern
                        .iter()
                        .find(|b| r >= b.lo && r < b.hi)
                        .map(|b| b.value.clone())
                        .unwrap_or_else(Q::zero),
                )
            }
        }
    }

    /// `|f|`. Non-constant pieces that change sign are split at the root.
    pub fn abs(&self) -> PiecewiseFn {
        let mut pieces = Vec::new();
        for p in &self.pieces {
            split_abs(&p.lo, Some(&p.hi), &p.formula, &mut pieces);
        }
        let end = self.end();
        let tail = match &self.tail {
            Tail::Zero => Tail::Zero,
            Tail::Periodic { period, pattern } => Tail::Periodic {
                period: period.clone(),
                pattern: pattern
                    .iter()
                    .map(|b| Block {
                        lo: b.lo.clone(),
                        hi: b.hi.clone(),
                        value: b.value.abs(),
                    })
                    .collect(),
            },
            Tail::Formula(f) => {
                let mut tail_pieces = Vec::new();
                split_abs(&end, None, f, &mut tail_pieces);
                let last = tail_pieces.pop().expect("tail piece");
                pieces.extend(tail_pieces);
                Tail::Formula(last.formula)
            }
        };
        PiecewiseFn {
            domain: self.domain,
            pieces,
            tail,
        }
    }

    /// Split every piece at the given points.
    pub fn split_at(&self, points: &[Q]) -> PiecewiseFn {
        let mut f = self.materialize_through(points.iter().max());
        let mut pieces = Vec::new();
        for p in f.pieces.drain(..) {
            let mut cuts: Vec<&Q> = points.iter().filter(|x| **x > p.lo && **x < p.hi).collect();
            cuts.sort();
            cuts.dedup();
            let mut lo = p.lo.clone();
            for c in cuts {
                pieces.push(Piece {
                    lo: lo.clone(),
                    hi: c.clone(),
                    formula: p.formula.clone(),
                });
                lo = c.clone();
            }
            pieces.push(Piece {
                lo,
                hi: p.hi,
                formula: p.formula,
            });
        }
        f.pieces = pieces;
        f
    }

    /// Ensure explicit pieces cover `(0, x)`; periodic tails are unrolled in
    /// whole periods.
    fn materialize_through(&self, x: Option<&Q>) -> PiecewiseFn {
        let mut f = self.clone();
        let Some(x) = x else { return f };
        let end = f.end();
        if x <= &end || self.domain == Domain::Unit {
            return f;
        }
        match &self.tail {
            Tail::Zero => {
                if self.domain == Domain::HalfLine {
                    f.pieces.push(Piece::constant(end, x.clone(), Q::zero()));
                    f.tail = Tail::Zero;
                }
            }
            Tail::Formula(form) => {
                f.pieces.push(Piece {
                    lo: end,
                    hi: x.clone(),
                    formula: form.clone(),
                });
            }
            Tail::Periodic { period, pattern } => {
                let periods = ((x - &end) / period).ceil();
                let n = periods.to_integer().to_u64().unwrap_or(0);
                let mut at = end;
                for _ in 0..n {
                    let mut cur = Q::zero();
                    for b in pattern {
                        if b.lo > cur {
                            f.pieces.push(Piece::constant(&at + &cur, &at + &b.lo, Q::zero()));
                        }
                        f.pieces.push(Piece::constant(&at + &b.lo, &at + &b.hi, b.value.clone()));
                        cur = b.hi.clone();
                    }
                    if &cur < period {
                        f.pieces.push(Piece::constant(&at + &cur, &at + period, Q::zero()));
                    }
                    at += period;
                }
            }
        }
        f
    }

    /// `f * chi_{(0,a) u (b,inf)}`.
    pub fn window(&self, a: &Q, b: &Ext) -> PiecewiseFn {
        self.window_impl(a, b, false)
    }

    /// `f * chi_{(a,b)}`.
    pub fn complement_window(&self, a: &Q, b: &Ext) -> PiecewiseFn {
        self.window_impl(a, b, true)
    }

    fn window_impl(&self, a: &Q, b: &Ext, inside: bool) -> PiecewiseFn {
        let mut cuts = vec![a.clone()];
        if let Ext::Finite(b) = b {
            cuts.push(b.clone());
        }
        let f = self.split_at(&cuts);
        let keep = |lo: &Q| -> bool {
            let in_window = lo >= a
                && match b {
                    Ext::Finite(b) => lo < b,
                    Ext::Infinite => true,
                };
            in_window == inside
        };
        let pieces = f
            .pieces
            .iter()
            .map(|p| {
                if keep(&p.lo) {
                    p.clone()
                } else {
                    Piece::constant(p.lo.clone(), p.hi.clone(), Q::zero())
                }
            })
            .collect();
        let tail_start = f.end();
        let tail = if keep(&tail_start) { f.tail.clone() } else { Tail::Zero };
        PiecewiseFn {
            domain: self.domain,
            pieces,
            tail,
        }
        .simplified()
    }

    /// Merge adjacent equal constant pieces and drop trailing zero pieces.
    pub fn simplified(mut self) -> PiecewiseFn {
        let mut out: Vec<Piece> = Vec::with_capacity(self.pieces.len());
        for p in self.pieces.drain(..) {
            if let Some(last) = out.last_mut() {
                if last.formula == p.formula && last.formula.is_const() {
                    last.hi = p.hi;
                    continue;
                }
            }
            out.push(p);
        }
        if self.tail == Tail::Zero || self.tail == Tail::Formula(Formula::constant(Q::zero())) {
            self.tail = Tail::Zero;
            while out.last().map(|p| p.formula.as_const() == Some(Q::zero())).unwrap_or(false) {
                out.pop();
            }
        }
        if let (Some(last), Tail::Formula(f)) = (out.last(), &self.tail) {
            if &last.formula == f && f.is_const() {
                out.pop();
            }
        }
        self.pieces = out;
        self
    }

    /// All breakpoints in increasing order.
    pub fn breakpoints(&self) -> Vec<Q> {
        let mut v: Vec<Q> = self.pieces.iter().map(|p| p.hi.clone()).collect();
        v.dedup();
        v
    }

    /// Measure of the support when it is finite.
    pub fn support_measure(&self) -> f64 {
        let mut m = 0.0;
        for p in &self.pieces {
            if p.formula.as_const() != Some(Q::zero()) {
                m += to_f64(&(&p.hi - &p.lo));
            }
        }
        match &self.tail {
            Tail::Zero => m,
            Tail::Periodic { pattern, .. } if pattern.iter().all(|b| b.value.is_zero()) => m,
            Tail::Formula(f) if f.as_const() == Some(Q::zero()) => m,
            _ => f64::INFINITY,
        }
    }
}

/// Push `|formula|` on `(lo, hi)` as one or more pieces; `hi = None` means the
/// last piece is a tail.
fn split_abs(lo: &Q, hi: Option<&Q>, f: &Formula, out: &mut Vec<Piece>) {
    let tail_hi = || hi.cloned().unwrap_or_else(|| lo + qi(1));
    if let Some(v) = f.as_const() {
        out.push(Piece {
            lo: lo.clone(),
            hi: tail_hi(),
            formula: Formula::constant(v.abs()),
        });
        return;
    }
    let t = f.term();
    let lo_f = to_f64(lo);
    let hi_f = hi.map(to_f64).unwrap_or(f64::INFINITY);
    let mut cuts: Vec<Q> = t.zero_crossings(lo_f, hi_f).into_iter().map(qf).collect();
    cuts.retain(|c| c > lo && hi.map(|h| c < h).unwrap_or(true));
    let mut start = lo.clone();
    let mut ends: Vec<Option<Q>> = cuts.into_iter().map(Some).collect();
    ends.push(hi.cloned());
    for end in ends {
        let a = to_f64(&start);
        let b = end.as_ref().map(to_f64).unwrap_or(f64::INFINITY);
        let mid = if b.is_finite() { 0.5 * (a + b) } else { a.max(1.0) * 2.0 + 1.0 };
        let sign = if t.eval(mid) < 0.0 { -Q::one() } else { Q::one() };
        out.push(Piece {
            lo: start.clone(),
            hi: end.clone().unwrap_or_else(|| &start + qi(1)),
            formula: f.scale(&sign),
        });
        if let Some(e) = end {
            start = e;
        }
    }
}

impl SeqFn {
    pub fn new(head: Vec<Q>, tail: SeqTail) -> Result<Self> {
        let s = SeqFn { head, tail };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if let SeqTail::Formula(f) = &self.tail {
            let n = Q::from_integer((self.head.len() as i64 + 1).into());
            check_formula_on(f, &n, None)?;
        }
        Ok(())
    }

    pub fn finite(head: Vec<Q>) -> SeqFn {
        SeqFn {
            head,
            tail: SeqTail::Zero,
        }
    }

    /// Unit vector `e_n`.
    pub fn unit_vector(n: usize) -> SeqFn {
        let mut head = vec![Q::zero(); n];
        head[n - 1] = Q::one();
        SeqFn::finite(head)
    }

    pub fn constant(v: Q) -> SeqFn {
        SeqFn {
            head: vec![],
            tail: SeqTail::Formula(Formula::constant(v)),
        }
    }

    pub fn is_step(&self) -> bool {
        match &self.tail {
            SeqTail::Zero => true,
            SeqTail::Formula(f) => f.is_const(),
            SeqTail::Harmonic { .. } => false,
        }
    }

    /// `x_n` for `n >= 1`.
    pub fn eval(&self, n: u64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if (n as usize) <= self.head.len() {
            return to_f64(&self.head[n as usize - 1]);
        }
        match &self.tail {
            SeqTail::Zero => 0.0,
            SeqTail::Formula(f) => f.term().eval(n as f64),
            SeqTail::Harmonic { a, k, b } => {
                let nf = n as f64;
                (to_f64(a) * crate::numeric::harmonic(n) + to_f64(k)) / nf + to_f64(b)
            }
        }
    }

    pub fn eval_exact(&self, n: u64) -> Option<Q> {
        if n == 0 {
            return Some(Q::zero());
        }
        if (n as usize) <= self.head.len() {
            return Some(self.head[n as usize - 1].clone());
        }
        match &self.tail {
            SeqTail::Zero => Some(Q::zero()),
            SeqTail::Formula(f) => f.eval_exact(&Q::from_integer((n as i64).into())),
            SeqTail::Harmonic { .. } => None,
        }
    }

    pub fn abs(&self) -> SeqFn {
        let head = self.head.iter().map(|x| x.abs()).collect();
        let tail = match &self.tail {
            SeqTail::Formula(f) => match f.as_const() {
                Some(v) => SeqTail::Formula(Formula::constant(v.abs())),
                None => {
                    // Tails of this class keep one sign for large n; values
                    // before that point are unrolled into the head.
                    let s = self.clone();
                    let n0 = tail_sign_settles(&s);
                    let mut h: Vec<Q> = self.head.iter().map(|x| x.abs()).collect();
                    for n in (self.head.len() as u64 + 1)..=n0 {
                        h.push(s.eval_exact(n).unwrap_or_else(|| qf(s.eval(n))).abs());
                    }
                    let far = s.eval(n0 + 1_000_000);
                    let sign = if far < 0.0 { -Q::one() } else { Q::one() };
                    return SeqFn {
                        head: h,
                        tail: SeqTail::Formula(f.scale(&sign)),
                    };
                }
            },
            SeqTail::Harmonic { a, k, b } => {
                let far = self.eval(1 << 40);
                if far < 0.0 {
                    SeqTail::Harmonic {
                        a: -a.clone(),
                        k: -k.clone(),
                        b: -b.clone(),
                    }
                } else {
                    self.tail.clone()
                }
            }
            SeqTail::Zero => SeqTail::Zero,
        };
        SeqFn { head, tail }
    }

    /// Keep `x_n` for `n <= a` and `n > b`.
    pub fn window(&self, a: u64, b: Option<u64>) -> SeqFn {
        self.window_impl(a, b, false)
    }

    /// Keep `x_n` for `a < n <= b`.
    pub fn complement_window(&self, a: u64, b: Option<u64>) -> SeqFn {
        self.window_impl(a, b, true)
    }

    fn window_impl(&self, a: u64, b: Option<u64>, inside: bool) -> SeqFn {
        let through = b.unwrap_or(a).max(self.head.len() as u64);
        let mut head = Vec::with_capacity(through as usize);
        for n in 1..=through {
            let in_window = n > a && b.map(|b| n <= b).unwrap_or(true);
            let v = if in_window == inside {
                self.eval_exact(n).unwrap_or_else(|| qf(self.eval(n)))
            } else {
                Q::zero()
            };
            head.push(v);
        }
        let tail_in_window = b.is_none();
        let tail = if tail_in_window == inside { self.tail.clone() } else { SeqTail::Zero };
        let mut s = SeqFn { head, tail };
        if s.tail == SeqTail::Zero {
            while s.head.last().map(|x| x.is_zero()).unwrap_or(false) {
                s.head.pop();
            }
        }
        s
    }

    /// Embed as a step function on `(0, inf)` with value `x_n` on `(n-1, n)`.
    pub fn embed(&self) -> Result<PiecewiseFn> {
        let pieces = self
            .head
            .iter()
            .enumerate()
            .map(|(i, v)| Piece::constant(qi(i as i64), qi(i as i64 + 1), v.clone()))
            .collect();
        let tail = match &self.tail {
            SeqTail::Zero => Tail::Zero,
            SeqTail::Formula(f) if f.is_const() => Tail::Formula(f.clone()),
            _ => return Err(Error::Unsupported("only step sequences embed as step functions".into())),
        };
        Ok(PiecewiseFn {
            domain: Domain::HalfLine,
            pieces,
            tail,
        }
        .simplified())
    }
}

/// Index after which the tail keeps a single sign.
fn tail_sign_settles(s: &SeqFn) -> u64 {
    let start = s.head.len() as u64 + 1;
    let mut last_change = start.saturating_sub(1);
    let mut prev = s.eval(start) >= 0.0;
    let mut n = start;
    while n < start + 100_000 {
        n += 1;
        let cur = s.eval(n) >= 0.0;
        if cur != prev {
            last_change = n - 1;
        }
        prev = cur;
    }
    last_change
}

impl Function {
    pub fn domain(&self) -> Domain {
        match self {
            Function::Piecewise(f) => f.domain,
            Function::Seq(_) => Domain::Naturals,
        }
    }

    pub fn is_step(&self) -> bool {
        match self {
            Function::Piecewise(f) => f.is_step(),
            Function::Seq(s) => s.is_step(),
        }
    }

    pub fn abs(&self) -> Function {
        match self {
            Function::Piecewise(f) => Function::Piecewise(f.abs()),
            Function::Seq(s) => Function::Seq(s.abs()),
        }
    }

    /// Value at `t`; sequences are read at `ceil(t)`.
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Function::Piecewise(f) => f.eval(t),
            Function::Seq(s) => {
                if t <= 0.0 {
                    0.0
                } else {
                    s.eval(t.ceil() as u64)
                }
            }
        }
    }

    /// `f * chi_{(0,a) u (b,inf)}`; for sequences `a`, `b` are read as indices.
    pub fn window(&self, a: &Q, b: &Ext) -> Function {
        match self {
            Function::Piecewise(f) => Function::Piecewise(f.window(a, b)),
            Function::Seq(s) => Function::Seq(s.window(index_of(a), b.finite().map(index_of))),
        }
    }

    pub fn complement_window(&self, a: &Q, b: &Ext) -> Function {
        match self {
            Function::Piecewise(f) => Function::Piecewise(f.complement_window(a, b)),
            Function::Seq(s) => Function::Seq(s.complement_window(index_of(a), b.finite().map(index_of))),
        }
    }

    pub fn as_piecewise(&self) -> Option<&PiecewiseFn> {
        match self {
            Function::Piecewise(f) => Some(f),
            _ => None,
        }
    }

    pub fn as_seq(&self) -> Option<&SeqFn> {
        match self {
            Function::Seq(s) => Some(s),
            _ => None,
        }
    }
}

fn index_of(q: &Q) -> u64 {
    q.floor().to_integer().to_u64().unwrap_or(0)
}

impl From<PiecewiseFn> for Function {
    fn from(f: PiecewiseFn) -> Self {
        Function::Piecewise(f)
    }
}

impl From<SeqFn> for Function {
    fn from(s: SeqFn) -> Self {
        Function::Seq(s)
    }
}

/// Convenience for literals written in code.
pub fn chi(domain: Domain, lo: i64, hi: Option<i64>) -> Function {
    let hi = hi.map(|h| Ext::Finite(qi(h))).unwrap_or(Ext::Infinite);
    PiecewiseFn::indicator(domain, qi(lo), hi, qi(1))
        .expect("valid indicator")
        .into()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::qr;

    fn sample() -> PiecewiseFn {
        PiecewiseFn::step(
            Domain::HalfLine,
            &[(qi(1), qi(2), qi(3)), (qi(4), qi(6), qi(1))],
            None,
        )
        .unwrap()
    }

    #[test]
    fn rejects_gaps_and_bad_hyperbolic() {
        let bad = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece::constant(qi(1), qi(2), qi(1))],
            Tail::Zero,
        );
        assert!(bad.is_err());
        let bad = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(1),
                formula: Formula::hyperbolic(qi(1), qi(0)),
            }],
            Tail::Zero,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn evaluates_steps() {
        let f = sample();
        assert_eq!(f.eval(1.5), 3.0);
        assert_eq!(f.eval(3.0), 0.0);
        assert_eq!(f.eval(5.0), 1.0);
        assert_eq!(f.eval(7.0), 0.0);
        assert_eq!(f.eval_exact(&qr(9, 2)), Some(qi(1)));
    }

    #[test]
    fn window_of_indicator() {
        let f = chi(Domain::HalfLine, 0, None);
        let w = f.window(&qi(0), &Ext::Finite(qi(5)));
        assert_eq!(w, chi(Domain::HalfLine, 5, None));
        let c = f.complement_window(&qi(0), &Ext::Finite(qi(5)));
        assert_eq!(c, chi(Domain::HalfLine, 0, Some(5)));
    }

    #[test]
    fn window_splits_pieces() {
        let f = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(3)), (qi(1), qi(3), qi(1))], None).unwrap();
        let w = f.window(&qr(1, 2), &Ext::Finite(qi(2)));
        let expect = PiecewiseFn::step(
            Domain::HalfLine,
            &[(qi(0), qr(1, 2), qi(3)), (qi(2), qi(3), qi(1))],
            None,
        )
        .unwrap();
        assert_eq!(w, expect);
    }

    #[test]
    fn sequence_window_zeroes_prefix() {
        let s = SeqFn::new(vec![qi(1), qi(2), qi(3)], SeqTail::Formula(Formula::constant(qi(1)))).unwrap();
        let w = s.window(0, Some(5));
        assert_eq!(w.head, vec![qi(0); 5]);
        assert_eq!(w.eval(6), 1.0);
        let c = s.complement_window(0, Some(5));
        assert_eq!(c.eval(5), 1.0);
        assert_eq!(c.eval(6), 0.0);
    }

    #[test]
    fn abs_splits_sign_change() {
        // t - 1 on (0, 2): power c t^1 plus b = -1
        let f = Formula {
            b: qi(-1),
            ..Formula::power(qi(1), qi(1))
        };
        let g = PiecewiseFn::new(Domain::HalfLine, vec![Piece { lo: qi(0), hi: qi(2), formula: f }], Tail::Zero).unwrap();
        let a = g.abs();
        assert_eq!(a.pieces.len(), 2);
        assert!((a.eval(0.5) - 0.5).abs() < 1e-15);
        assert!((a.eval(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn periodic_tail_windows_in_whole_periods() {
        let f = PiecewiseFn::new(
            Domain::HalfLine,
            vec![],
            Tail::Periodic {
                period: qi(3),
                pattern: vec![Block { lo: qi(1), hi: qi(2), value: qi(1) }],
            },
        )
        .unwrap();
        assert_eq!(f.eval(1.5), 1.0);
        assert_eq!(f.eval(4.5), 1.0);
        assert_eq!(f.eval(5.5), 0.0);
        let w = f.window(&qi(0), &Ext::Finite(qi(4)));
        assert_eq!(w.eval(1.5), 0.0);
        assert_eq!(w.eval(4.5), 1.0);
        assert_eq!(w.eval(7.5), 1.0);
    }
}
