//! Decreasing rearrangements as evaluable profiles.
//!
//! A function is cut into monotone, nonnegative parts. The distribution
//! function is the sum of the parts' superlevel measures, and integrals of
//! `(f* - lam)_+^p` are sums of per-part closed forms. Nothing here needs an
//! explicit sorted representation except for step functions, which get an
//! exact block list.

use crate::error::{Error, Result};
use crate::formula::{sign_changes, Term};
use crate::measurable_fn::{Domain, Function, SeqTail, Tail};
use crate::numeric::{self, harmonic, harmonic_real, hurwitz_zeta};
use crate::scalar::to_f64;

/// View of `f*` used by every norm.
pub trait Profile {
    fn domain(&self) -> Domain;
    /// `f*(0+)`, possibly infinite.
    fn head(&self) -> f64;
    /// `f*(inf)`; zero on the unit interval.
    fn tail(&self) -> f64;
    /// `d_f(lam)`.
    fn dist(&self, lam: f64) -> f64;
    /// `f*(s)`, right continuous.
    fn value(&self, s: f64) -> f64;
    /// `int_0^t (f*(s) - lam)_+^p ds`.
    fn excess(&self, lam: f64, p: f64, t: f64) -> f64;
    /// `int_t0^t1 (f*(s) - lam)_+^p ds`.
    fn excess_between(&self, lam: f64, p: f64, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let hi = self.excess(lam, p, t1);
        if hi.is_infinite() {
            return hi;
        }
        (hi - self.excess(lam, p, t0)).max(0.0)
    }
    /// Levels where `d_f` may be non-smooth.
    fn levels(&self) -> Vec<f64>;
    /// Points where `f*` may be non-smooth.
    fn knots(&self) -> Vec<f64>;
    /// Exact sorted blocks when `f*` is a step function.
    fn blocks(&self) -> Option<StepBlocks> {
        None
    }
    /// `int_0^t f*`.
    fn primitive(&self, t: f64) -> f64 {
        self.excess(0.0, 1.0, t)
    }
}

/// Sorted step rearrangement: `(value, length)` blocks in decreasing value,
/// followed by `tail` on the remaining measure.
#[derive(Debug, Clone, PartialEq)]
pub struct StepBlocks {
    pub blocks: Vec<(f64, f64)>,
    pub tail: f64,
    pub domain: Domain,
}

impl StepBlocks {
    pub fn new(mut blocks: Vec<(f64, f64)>, tail: f64, domain: Domain) -> StepBlocks {
        blocks.retain(|&(v, l)| v > tail && l > 0.0);
        blocks.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(blocks.len());
        for (v, l) in blocks {
            match merged.last_mut() {
                Some(last) if last.0 == v => last.1 += l,
                _ => merged.push((v, l)),
            }
        }
        let tail = if domain == Domain::Unit { 0.0 } else { tail };
        StepBlocks {
            blocks: merged,
            tail,
            domain,
        }
    }

    /// Total length of the explicit blocks.
    pub fn span(&self) -> f64 {
        self.blocks.iter().map(|b| b.1).sum()
    }

    /// Apply a non-decreasing map to every value.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> StepBlocks {
        StepBlocks::new(
            self.blocks.iter().map(|&(v, l)| (f(v), l)).collect(),
            f(self.tail),
            self.domain,
        )
    }

    /// Blocks of `f* chi_{(0,a) u (b,inf)}` rearranged.
    pub fn window(&self, a: f64, b: f64) -> StepBlocks {
        let mut out = Vec::new();
        let mut pos: f64 = 0.0;
        for &(v, l) in &self.blocks {
            let (s0, s1) = (pos, pos + l);
            let keep = (s1.min(a) - s0).max(0.0) + if b.is_finite() { (s1 - s0.max(b)).max(0.0) } else { 0.0 };
            if keep > 0.0 {
                out.push((v, keep));
            }
            pos = s1;
        }
        let tail = if b.is_finite() { self.tail } else { 0.0 };
        // Tail region starts at `pos`; the part inside (0, a) keeps its value.
        if self.tail > 0.0 && a > pos && !b.is_finite() {
            out.push((self.tail, a - pos));
        } else if self.tail > 0.0 && a > pos {
            let l = a.min(b) - pos;
            if l > 0.0 {
                out.push((self.tail, l));
            }
        }
        StepBlocks::new(out, tail, self.domain)
    }
}

impl Profile for StepBlocks {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn head(&self) -> f64 {
        self.blocks.first().map(|b| b.0).unwrap_or(self.tail)
    }

    fn tail(&self) -> f64 {
        self.tail
    }

    fn dist(&self, lam: f64) -> f64 {
        if lam < self.tail {
            return f64::INFINITY;
        }
        self.blocks.iter().filter(|b| b.0 > lam).map(|b| b.1).sum()
    }

    fn value(&self, s: f64) -> f64 {
        let mut pos: f64 = 0.0;
        for &(v, l) in &self.blocks {
            pos += l;
            if s < pos {
                return v;
            }
        }
        if s >= self.domain.measure() {
            return 0.0;
        }
        self.tail
    }

    fn excess(&self, lam: f64, p: f64, t: f64) -> f64 {
        let mut acc = 0.0;
        let mut pos: f64 = 0.0;
        for &(v, l) in &self.blocks {
            if pos >= t || v <= lam {
                break;
            }
            let take = l.min(t - pos);
            acc += take * (v - lam).powf(p);
            pos += l;
        }
        if t > pos && self.tail > lam {
            let rest = t.min(self.domain.measure()) - pos;
            if rest > 0.0 {
                acc += rest * (self.tail - lam).powf(p);
            }
        }
        acc
    }

    fn excess_between(&self, lam: f64, p: f64, t0: f64, t1: f64) -> f64 {
        if t1 <= t0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let mut pos: f64 = 0.0;
        for &(v, l) in &self.blocks {
            let (s0, s1) = (pos.max(t0), (pos + l).min(t1));
            if s1 > s0 && v > lam {
                acc += (s1 - s0) * (v - lam).powf(p);
            }
            pos += l;
        }
        if self.tail > lam {
            let (s0, s1) = (pos.max(t0), t1.min(self.domain.measure()));
            if s1 > s0 {
                acc += (s1 - s0) * (self.tail - lam).powf(p);
            }
        }
        acc
    }

    fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.blocks.iter().map(|b| b.0).collect();
        v.push(self.tail);
        v
    }

    fn knots(&self) -> Vec<f64> {
        let mut pos: f64 = 0.0;
        self.blocks
            .iter()
            .map(|b| {
                pos += b.1;
                pos
            })
            .collect()
    }

    fn blocks(&self) -> Option<StepBlocks> {
        Some(self.clone())
    }
}

/// Rule giving the values of a sequence tail at index `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum StairRule {
    Term(Term),
    /// `(a H(n) + k)/n + b`.
    Harmonic { a: f64, k: f64, b: f64 },
}

impl StairRule {
    fn eval_index(&self, n: u64) -> f64 {
        match self {
            StairRule::Term(t) => t.eval(n as f64),
            StairRule::Harmonic { a, k, b } => (a * harmonic(n) + k) / n as f64 + b,
        }
    }

    fn eval_real(&self, t: f64) -> f64 {
        match self {
            StairRule::Term(term) => term.eval(t),
            StairRule::Harmonic { a, k, b } => (a * harmonic_real(t) + k) / t + b,
        }
    }

    fn limit(&self) -> f64 {
        match self {
            StairRule::Term(t) => t.limit_at_infinity(),
            StairRule::Harmonic { b, .. } => *b,
        }
    }

    fn negate(&self) -> StairRule {
        match *self {
            StairRule::Term(t) => StairRule::Term(t.affine(-1.0, 0.0)),
            StairRule::Harmonic { a, k, b } => StairRule::Harmonic { a: -a, k: -k, b: -b },
        }
    }
}

/// A monotone nonnegative piece of `|f|`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Part {
    Flat {
        len: f64,
        value: f64,
    },
    Curve {
        lo: f64,
        hi: f64,
        term: Term,
        increasing: bool,
        vlo: f64,
        vhi: f64,
    },
    /// Indices `first..=last` of a sequence tail (`last = None` for all).
    Stair {
        first: u64,
        rule: StairRule,
        increasing: bool,
        vfirst: f64,
        vlimit: f64,
    },
}

impl Part {
    fn sup(&self) -> f64 {
        match self {
            Part::Flat { value, .. } => *value,
            Part::Curve { vlo, vhi, .. } => vlo.max(*vhi),
            Part::Stair { vfirst, vlimit, .. } => vfirst.max(*vlimit),
        }
    }

    /// Value approached on an infinite stretch of the part, if any.
    fn limit_at_infinity(&self) -> Option<f64> {
        match self {
            Part::Flat { len, value } if len.is_infinite() => Some(*value),
            Part::Curve { hi, vhi, .. } if hi.is_infinite() => Some(*vhi),
            Part::Stair { vlimit, .. } => Some(*vlimit),
            _ => None,
        }
    }

    fn end_values(&self) -> [f64; 2] {
        match self {
            Part::Flat { value, .. } => [*value, *value],
            Part::Curve { vlo, vhi, .. } => [*vlo, *vhi],
            Part::Stair { vfirst, vlimit, .. } => [*vfirst, *vlimit],
        }
    }

    /// Interval `(x0, x1)` of the part where `v > lam`.
    fn curve_superlevel(&self, lam: f64) -> Option<(f64, f64)> {
        let Part::Curve {
            lo,
            hi,
            term,
            increasing,
            vlo,
            vhi,
        } = self
        else {
            return None;
        };
        if lam >= vlo.max(*vhi) {
            return None;
        }
        if lam < vlo.min(*vhi) {
            return Some((*lo, *hi));
        }
        let tau = term.inverse(lam, *lo, *hi, *increasing);
        Some(if *increasing { (tau, *hi) } else { (*lo, tau) })
    }

    /// Index range `[n0, n1]` of a stair where `v > lam`; `n1 = None` is unbounded.
    fn stair_superlevel(&self, lam: f64) -> Option<(u64, Option<u64>)> {
        let Part::Stair {
            first,
            rule,
            increasing,
            vfirst,
            vlimit,
        } = self
        else {
            return None;
        };
        let sup = vfirst.max(*vlimit);
        if lam >= sup {
            return None;
        }
        if *increasing {
            if lam < *vfirst {
                return Some((*first, None));
            }
            // first index with v > lam
            let n = first_index(|n| rule.eval_index(n) > lam, *first);
            Some((n, None))
        } else {
            if lam <= *vlimit {
                return Some((*first, None));
            }
            if let StairRule::Term(t) = rule {
                if t.c == 0.0 && t.m == 0.0 && t.k > 0.0 {
                    // k/n + b > lam  <=>  n < k/(lam - b)
                    let x = t.k / (lam - t.b);
                    let mut n1 = if x.fract() == 0.0 { x - 1.0 } else { x.floor() };
                    n1 = n1.min(9.0e18);
                    let mut n1 = n1 as u64;
                    while n1 >= *first && rule.eval_index(n1) <= lam {
                        n1 -= 1;
                    }
                    while rule.eval_index(n1 + 1) > lam {
                        n1 += 1;
                    }
                    return if n1 >= *first { Some((*first, Some(n1))) } else { None };
                }
            }
            // last index with v > lam
            let after = first_index(|n| rule.eval_index(n) <= lam, *first);
            if after <= *first {
                None
            } else {
                Some((*first, Some(after - 1)))
            }
        }
    }

    fn measure_above(&self, lam: f64) -> f64 {
        match self {
            Part::Flat { len, value } => {
                if *value > lam {
                    *len
                } else {
                    0.0
                }
            }
            Part::Curve { .. } => self.curve_superlevel(lam).map(|(a, b)| b - a).unwrap_or(0.0),
            Part::Stair { .. } => match self.stair_superlevel(lam) {
                None => 0.0,
                Some((_, None)) => f64::INFINITY,
                Some((n0, Some(n1))) => (n1 - n0 + 1) as f64,
            },
        }
    }

    /// `int_{v > mu} (v - shift)^p`, with `shift <= mu`.
    fn above(&self, mu: f64, shift: f64, p: f64) -> f64 {
        match self {
            Part::Flat { len, value } => {
                if *value > mu {
                    if len.is_infinite() {
                        f64::INFINITY
                    } else {
                        len * (value - shift).powf(p)
                    }
                } else {
                    0.0
                }
            }
            Part::Curve { term, .. } => match self.curve_superlevel(mu) {
                None => 0.0,
                Some((a, b)) => term.affine(1.0, shift).integral_pow(a, b, p),
            },
            Part::Stair { rule, .. } => match self.stair_superlevel(mu) {
                None => 0.0,
                Some((n0, n1)) => stair_sum(rule, shift, p, n0, n1),
            },
        }
    }
}

/// Smallest `n >= from` with `pred(n)`, assuming `pred` is monotone.
fn first_index(pred: impl Fn(u64) -> bool, from: u64) -> u64 {
    if pred(from) {
        return from;
    }
    let mut step = 1u64;
    let mut lo = from;
    let mut hi = from + 1;
    while !pred(hi) {
        lo = hi;
        step = step.saturating_mul(2);
        hi = hi.saturating_add(step);
        if hi >= 1 << 62 {
            return u64::MAX;
        }
    }
    // pred(lo) false, pred(hi) true
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

const DIRECT_SUM: u64 = 100_000;

/// `sum_{n=n0}^{n1} (v_n - shift)^p` for a monotone stair.
fn stair_sum(rule: &StairRule, shift: f64, p: f64, n0: u64, n1: Option<u64>) -> f64 {
    let g = |v: f64| (v - shift).max(0.0).powf(p);
    if let StairRule::Term(t) = rule {
        if t.c == 0.0 && t.m == 0.0 && (t.b - shift).abs() <= 1e-15 * shift.abs().max(t.b.abs()) {
            // Pure k/n terms: Hurwitz zeta.
            let k = t.k.abs();
            if p > 1.0 {
                let tail = n1.map(|n| hurwitz_zeta(p, n as f64 + 1.0)).unwrap_or(0.0);
                return k.powf(p) * (hurwitz_zeta(p, n0 as f64) - tail);
            }
            if p == 1.0 {
                return match n1 {
                    None => f64::INFINITY,
                    Some(n1) => k * (harmonic(n1) - harmonic(n0 - 1)),
                };
            }
        }
    }
    let limit = g(rule.limit());
    if n1.is_none() && limit > 0.0 {
        return f64::INFINITY;
    }
    let end = n1.unwrap_or(u64::MAX);
    let direct_end = end.min(n0.saturating_add(DIRECT_SUM - 1));
    let mut acc = 0.0;
    let mut comp = 0.0;
    for n in n0..=direct_end {
        let y = g(rule.eval_index(n)) - comp;
        let t = acc + y;
        comp = (t - acc) - y;
        acc = t;
    }
    if direct_end == end {
        return acc;
    }
    // Euler-Maclaurin with the midpoint rule on the smooth extension.
    let a = direct_end as f64 + 0.5;
    let b = n1.map(|n| n as f64 + 0.5).unwrap_or(f64::INFINITY);
    let h = |x: f64| g(rule.eval_real(x));
    let q = numeric::integrate(h, a, b, 1e-14);
    let d = |x: f64| {
        let e = 1e-3 * x;
        (h(x + e) - h(x - e)) / (2.0 * e)
    };
    let db = if b.is_finite() { d(b) } else { 0.0 };
    acc + q.value - (db - d(a)) / 24.0
}

/// Generic profile built from monotone parts.
#[derive(Debug, Clone)]
pub struct FnProfile {
    parts: Vec<Part>,
    domain: Domain,
    head: f64,
    tail: f64,
}

impl FnProfile {
    fn new(parts: Vec<Part>, domain: Domain) -> FnProfile {
        let head = parts.iter().map(|p| p.sup()).fold(0.0, f64::max);
        let tail = if domain == Domain::Unit {
            0.0
        } else {
            parts.iter().filter_map(|p| p.limit_at_infinity()).fold(0.0, f64::max)
        };
        FnProfile {
            parts,
            domain,
            head,
            tail,
        }
    }
}

impl Profile for FnProfile {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn head(&self) -> f64 {
        self.head
    }

    fn tail(&self) -> f64 {
        self.tail
    }

    fn dist(&self, lam: f64) -> f64 {
        let lam = lam.max(0.0);
        self.parts.iter().map(|p| p.measure_above(lam)).sum()
    }

    fn value(&self, s: f64) -> f64 {
        if s >= self.domain.measure() || s < 0.0 {
            return 0.0;
        }
        let lo0 = self.tail;
        if self.dist(lo0) <= s {
            return lo0;
        }
        let mut hi = self.head;
        if hi.is_infinite() {
            hi = lo0.max(1.0);
            while self.dist(hi) > s {
                hi *= 2.0;
            }
        }
        let mut lo = lo0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.dist(mid) <= s {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }

    fn excess(&self, lam: f64, p: f64, t: f64) -> f64 {
        let lam = lam.max(0.0);
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() || t >= self.domain.measure() {
            if lam < self.tail {
                return f64::INFINITY;
            }
            return self.parts.iter().map(|q| q.above(lam, lam, p)).sum();
        }
        let mu = lam.max(self.value(t));
        let mut acc: f64 = self.parts.iter().map(|q| q.above(mu, lam, p)).sum();
        if mu > lam {
            let d = self.dist(mu);
            if d < t {
                acc += (t - d) * (mu - lam).powf(p);
            }
        }
        acc
    }

    fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.parts.iter().flat_map(|p| p.end_values()).filter(|x| x.is_finite()).collect();
        v.push(self.tail);
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn knots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .levels()
            .into_iter()
            .map(|l| self.dist(l))
            .filter(|x| x.is_finite() && *x > 0.0)
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }
}

/// Largest index that may be materialised before a stair starts.
const MAX_UNROLL: u64 = 1_000_000;

fn curve_parts(lo: f64, hi: f64, term: Term, out: &mut Vec<Part>) {
    if term.is_const() {
        let v = term.eval(1.0).abs();
        if v > 0.0 {
            out.push(Part::Flat { len: hi - lo, value: v });
        }
        return;
    }
    let mut cuts = term.critical_points(lo, hi);
    cuts.extend(term.zero_crossings(lo, hi));
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let mut a = lo;
    for b in cuts.into_iter().chain(std::iter::once(hi)) {
        if b <= a {
            continue;
        }
        let mid = if b.is_finite() {
            if a > 0.0 && b / a > 4.0 {
                (a * b).sqrt()
            } else {
                0.5 * (a + b)
            }
        } else {
            a.max(1.0) * 4.0
        };
        let sign = if term.eval(mid) < 0.0 { -1.0 } else { 1.0 };
        let t = term.affine(sign, 0.0);
        let vlo = t.end_value(a).max(0.0);
        let vhi = t.end_value(b).max(0.0);
        if vlo == 0.0 && vhi == 0.0 {
            a = b;
            continue;
        }
        out.push(Part::Curve {
            lo: a,
            hi: b,
            term: t,
            increasing: vhi > vlo,
            vlo,
            vhi,
        });
        a = b;
    }
}

fn stair_parts(first: u64, rule: StairRule, out: &mut Vec<Part>) -> Result<()> {
    let start = first as f64;
    let deriv = |t: f64| {
        let e = 1e-4 * t.max(1.0);
        rule.eval_real(t + e) - rule.eval_real(t - e)
    };
    let mut cuts = sign_changes(deriv, start, f64::INFINITY);
    cuts.extend(sign_changes(|t| rule.eval_real(t), start, f64::INFINITY));
    let settle = cuts.iter().fold(start, |m, c| m.max(*c)).ceil() as u64 + 2;
    let settle = settle.max(first);
    if settle - first > MAX_UNROLL {
        return Err(Error::Unsupported("sequence tail settles too late to evaluate".into()));
    }
    for n in first..settle {
        let v = rule.eval_index(n).abs();
        if v > 0.0 {
            out.push(Part::Flat { len: 1.0, value: v });
        }
    }
    let far = rule.eval_index(settle.saturating_mul(1024).max(settle + 1_000_000));
    let rule = if far < 0.0 || (far == 0.0 && rule.eval_index(settle) < 0.0) {
        rule.negate()
    } else {
        rule
    };
    let vfirst = rule.eval_index(settle).max(0.0);
    let vlimit = rule.limit().max(0.0);
    if vfirst == 0.0 && vlimit == 0.0 {
        return Ok(());
    }
    if vfirst == vlimit {
        out.push(Part::Flat {
            len: f64::INFINITY,
            value: vfirst,
        });
        return Ok(());
    }
    out.push(Part::Stair {
        first: settle,
        rule,
        increasing: vlimit > vfirst,
        vfirst,
        vlimit,
    });
    Ok(())
}

pub(crate) fn parts_of(f: &Function) -> Result<Vec<Part>> {
    let mut out = Vec::new();
    match f {
        Function::Piecewise(g) => {
            for p in &g.pieces {
                curve_parts(to_f64(&p.lo), to_f64(&p.hi), p.formula.term(), &mut out);
            }
            let end = to_f64(&g.end());
            match &g.tail {
                Tail::Zero => {}
                Tail::Formula(form) => {
                    if g.domain == Domain::HalfLine {
                        curve_parts(end, f64::INFINITY, form.term(), &mut out);
                    }
                }
                Tail::Periodic { pattern, .. } => {
                    for b in pattern {
                        let v = to_f64(&b.value).abs();
                        if v > 0.0 && b.hi > b.lo {
                            out.push(Part::Flat {
                                len: f64::INFINITY,
                                value: v,
                            });
                        }
                    }
                }
            }
        }
        Function::Seq(s) => {
            for x in &s.head {
                let v = to_f64(x).abs();
                if v > 0.0 {
                    out.push(Part::Flat { len: 1.0, value: v });
                }
            }
            let first = s.head.len() as u64 + 1;
            match &s.tail {
                SeqTail::Zero => {}
                SeqTail::Formula(form) => {
                    let t = form.term();
                    if t.is_const() {
                        let v = t.eval(1.0).abs();
                        if v > 0.0 {
                            out.push(Part::Flat {
                                len: f64::INFINITY,
                                value: v,
                            });
                        }
                    } else {
                        stair_parts(first, StairRule::Term(t), &mut out)?;
                    }
                }
                SeqTail::Harmonic { a, k, b } => stair_parts(
                    first,
                    StairRule::Harmonic {
                        a: to_f64(a),
                        k: to_f64(k),
                        b: to_f64(b),
                    },
                    &mut out,
                )?,
            }
        }
    }
    Ok(out)
}

/// Rearrangement profile of `|f|`.
pub fn profile_of(f: &Function) -> Result<Box<dyn Profile>> {
    let parts = parts_of(f)?;
    let domain = f.domain();
    if parts.iter().all(|p| matches!(p, Part::Flat { .. })) {
        let tail = if domain == Domain::Unit {
            0.0
        } else {
            parts
                .iter()
                .filter_map(|p| match p {
                    Part::Flat { len, value } if len.is_infinite() => Some(*value),
                    _ => None,
                })
                .fold(0.0, f64::max)
        };
        let blocks = parts
            .iter()
            .filter_map(|p| match p {
                Part::Flat { len, value } if len.is_finite() => Some((*value, *len)),
                _ => None,
            })
            .collect();
        return Ok(Box::new(StepBlocks::new(blocks, tail, domain)));
    }
    Ok(Box::new(FnProfile::new(parts, domain)))
}

/// `f* chi_{(0,a) u (b,inf)}` viewed as a profile of its own.
pub struct Windowed<'a> {
    pub base: &'a dyn Profile,
    pub a: f64,
    pub b: f64,
}

impl<'a> Windowed<'a> {
    pub fn new(base: &'a dyn Profile, a: f64, b: f64) -> Windowed<'a> {
        Windowed { base, a, b: b.max(a) }
    }

    /// Map a point of the windowed profile to the base profile.
    fn to_base(&self, s: f64) -> f64 {
        if s < self.a {
            s
        } else {
            s - self.a + self.b
        }
    }
}

impl<'a> Profile for Windowed<'a> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn head(&self) -> f64 {
        if self.a > 0.0 {
            self.base.head()
        } else if self.b.is_finite() {
            self.base.value(self.b)
        } else {
            0.0
        }
    }

    fn tail(&self) -> f64 {
        if self.b.is_finite() {
            self.base.tail()
        } else {
            0.0
        }
    }

    fn dist(&self, lam: f64) -> f64 {
        let d = self.base.dist(lam);
        d.min(self.a) + if self.b.is_finite() { (d - self.b).max(0.0) } else { 0.0 }
    }

    fn value(&self, s: f64) -> f64 {
        if s < self.a {
            return self.base.value(s);
        }
        if self.b.is_infinite() {
            return 0.0;
        }
        self.base.value(self.to_base(s))
    }

    fn excess(&self, lam: f64, p: f64, t: f64) -> f64 {
        if t <= self.a {
            return self.base.excess(lam, p, t);
        }
        let head = self.base.excess(lam, p, self.a);
        if self.b.is_infinite() {
            return head;
        }
        head + self.base.excess_between(lam, p, self.b, self.to_base(t))
    }

    fn levels(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.base.levels();
        if self.a > 0.0 {
            v.push(self.base.value(self.a));
        }
        if self.b.is_finite() {
            v.push(self.base.value(self.b));
        }
        v.push(0.0);
        v.retain(|x| x.is_finite());
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn knots(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self
            .base
            .knots()
            .into_iter()
            .filter_map(|k| {
                if k < self.a {
                    Some(k)
                } else if k > self.b {
                    Some(k - self.b + self.a)
                } else {
                    None
                }
            })
            .collect();
        if self.a > 0.0 {
            v.push(self.a);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn blocks(&self) -> Option<StepBlocks> {
        self.base.blocks().map(|b| b.window(self.a, self.b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::measurable_fn::{chi, Piece, PiecewiseFn, SeqFn};
    use crate::scalar::{qi, qr};

    fn hyp_tail() -> Function {
        // 1/t on (1, inf)
        PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece::constant(qi(0), qi(1), qi(0))],
            Tail::Formula(Formula::hyperbolic(qi(1), qi(0))),
        )
        .unwrap()
        .into()
    }

    #[test]
    fn distribution_of_hyperbolic_tail() {
        let p = profile_of(&hyp_tail()).unwrap();
        for lam in [0.1, 0.5, 0.9] {
            assert!((p.dist(lam) - (1.0 / lam - 1.0)).abs() < 1e-12);
        }
        assert_eq!(p.dist(1.0), 0.0);
        assert_eq!(p.head(), 1.0);
        assert_eq!(p.tail(), 0.0);
    }

    #[test]
    fn rearranged_hyperbolic_values() {
        let p = profile_of(&hyp_tail()).unwrap();
        // f*(s) = 1/(1+s)
        for s in [0.0, 0.5, 3.0, 100.0] {
            assert!((p.value(s) - 1.0 / (1.0 + s)).abs() < 1e-13, "s = {s}");
        }
        // int_0^3 1/(1+s) = ln 4
        assert!((p.primitive(3.0) - 4f64.ln()).abs() < 1e-12);
        // int (f* - 1/2)_+^2 = int_0^1 (1/(1+s) - 1/2)^2
        let exact = 0.5 - 2f64.ln() + 0.25;
        assert!((p.excess(0.5, 2.0, f64::INFINITY) - exact).abs() < 1e-12);
    }

    #[test]
    fn step_profile_sorted() {
        let f = PiecewiseFn::step(
            Domain::HalfLine,
            &[(qi(1), qi(2), qi(3)), (qi(4), qi(6), qi(1))],
            None,
        )
        .unwrap();
        let p = profile_of(&f.into()).unwrap();
        let b = p.blocks().unwrap();
        assert_eq!(b.blocks, vec![(3.0, 1.0), (1.0, 2.0)]);
        assert_eq!(p.dist(0.5), 3.0);
        assert_eq!(p.dist(1.0), 1.0);
        assert_eq!(p.dist(3.0), 0.0);
    }

    #[test]
    fn window_of_step_blocks() {
        let b = StepBlocks::new(vec![(3.0, 1.0), (1.0, 2.0)], 0.0, Domain::HalfLine);
        let w = b.window(0.5, 2.0);
        assert_eq!(w.blocks, vec![(3.0, 0.5), (1.0, 1.0)]);
        let inf = StepBlocks::new(vec![], 1.0, Domain::HalfLine);
        let w = inf.window(0.0, 5.0);
        assert_eq!(w.tail, 1.0);
        assert!(w.blocks.is_empty());
        let w = inf.window(0.25, f64::INFINITY);
        assert_eq!(w.blocks, vec![(1.0, 0.25)]);
        assert_eq!(w.tail, 0.0);
    }

    #[test]
    fn windowed_generic_profile_matches_blocks() {
        let f: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], Some(qi(1))).unwrap().into();
        let p = profile_of(&f).unwrap();
        let w = Windowed::new(p.as_ref(), 0.5, 4.0);
        assert_eq!(w.dist(1.5), 0.5);
        assert_eq!(w.dist(0.5), f64::INFINITY);
        assert_eq!(w.value(0.7), 1.0);
        assert_eq!(w.excess(0.0, 1.0, 2.0), 0.5 * 2.0 + 1.5);
    }

    #[test]
    fn harmonic_stair_profile() {
        // x_n = 1/n for n >= 2 after head (1): l2 norm^2 = pi^2/6
        let s = SeqFn::new(vec![qi(1)], SeqTail::Formula(Formula::hyperbolic(qi(1), qi(0)))).unwrap();
        let p = profile_of(&s.into()).unwrap();
        let l2 = p.excess(0.0, 2.0, f64::INFINITY);
        assert!((l2 - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-13);
        assert_eq!(p.dist(0.3), 3.0);
        assert_eq!(p.value(2.5), 1.0 / 3.0);
    }

    #[test]
    fn power_singularity_profile() {
        // (1/2) t^{-1/2} on (0,1)
        let g = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(1),
                formula: Formula::power(qr(1, 2), qr(-1, 2)),
            }],
            Tail::Zero,
        )
        .unwrap();
        let p = profile_of(&g.into()).unwrap();
        assert_eq!(p.head(), f64::INFINITY);
        assert!((p.primitive(0.25) - 0.5).abs() < 1e-12);
        assert!((p.primitive(4.0) - 1.0).abs() < 1e-12);
        let _ = chi(Domain::HalfLine, 0, Some(1));
    }
}
