//! Distribution functions and decreasing rearrangements.
//!
//! Step functions are rearranged exactly in rational arithmetic. Everything
//! else is bracketed between two step functions built on a grid of levels.

use crate::error::{Error, Result};
use crate::measurable_fn::{Domain, Function, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::profile::{profile_of, Profile};
use crate::scalar::{qi, to_f64, Ext, Q};
use num_traits::{Signed, Zero};

/// Level sets of `|f|` for a step function: finite-measure `(value, length)`
/// pairs plus the values taken on sets of infinite measure.
struct Levels {
    finite: Vec<(Q, Q)>,
    infinite: Vec<Q>,
}

fn step_levels(f: &Function) -> Option<Levels> {
    if !f.is_step() {
        return None;
    }
    let mut finite = Vec::new();
    let mut infinite = Vec::new();
    match f {
        Function::Piecewise(g) => {
            for p in &g.pieces {
                let v = p.formula.as_const()?.abs();
                if !v.is_zero() {
                    finite.push((v, &p.hi - &p.lo));
                }
            }
            if g.domain != Domain::Unit {
                match &g.tail {
                    Tail::Zero => {}
                    Tail::Formula(form) => infinite.push(form.as_const()?.abs()),
                    Tail::Periodic { pattern, .. } => {
                        infinite.extend(pattern.iter().filter(|b| b.hi > b.lo).map(|b| b.value.abs()))
                    }
                }
            }
        }
        Function::Seq(s) => {
            for x in &s.head {
                let v = x.abs();
                if !v.is_zero() {
                    finite.push((v, qi(1)));
                }
            }
            match &s.tail {
                SeqTail::Zero => {}
                SeqTail::Formula(form) => infinite.push(form.as_const()?.abs()),
                SeqTail::Harmonic { .. } => return None,
            }
        }
    }
    Some(Levels { finite, infinite })
}

impl Levels {
    /// `f*(inf)` for infinite-measure domains.
    fn floor(&self) -> Q {
        self.infinite.iter().cloned().fold(Q::zero(), |m, v| if v > m { v } else { m })
    }
}

/// Exact distribution function of a step function: `d(lam) = measure` for
/// `lam` in `[previous level, level)`, and `0` from the last level on.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    pub steps: Vec<(Q, Ext)>,
}

impl StepDistribution {
    pub fn eval(&self, lam: &Q) -> Ext {
        if lam.is_negative() {
            return self.steps.first().map(|s| s.1.clone()).unwrap_or(Ext::Finite(Q::zero()));
        }
        for (level, m) in &self.steps {
            if lam < level {
                return m.clone();
            }
        }
        Ext::Finite(Q::zero())
    }
}

/// `lam -> d_f(lam)`.
pub enum DistributionCurve {
    Step(StepDistribution),
    Profiled(Box<dyn Profile>),
}

impl DistributionCurve {
    pub fn eval(&self, lam: f64) -> f64 {
        match self {
            DistributionCurve::Step(s) => {
                let lam = lam.max(0.0);
                for (level, m) in &s.steps {
                    if lam < to_f64(level) {
                        return m.to_f64();
                    }
                }
                0.0
            }
            DistributionCurve::Profiled(p) => p.dist(lam),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DistributionCurve::Step(_))
    }
}

/// Distribution function of `|f|`.
pub fn distribution(f: &Function) -> Result<DistributionCurve> {
    let Some(levels) = step_levels(f) else {
        return Ok(DistributionCurve::Profiled(profile_of(f)?));
    };
    let floor = levels.floor();
    let mut values: Vec<Q> = levels.finite.iter().map(|l| l.0.clone()).collect();
    values.extend(levels.infinite.iter().cloned());
    values.sort();
    values.dedup();
    let cap = if f.domain() == Domain::Unit { Some(qi(1)) } else { None };
    let mut steps = Vec::new();
    for v in values {
        if v.is_zero() {
            continue;
        }
        // d on [previous value, v) counts everything strictly above the previous value.
        let below = steps.last().map(|s: &(Q, Ext)| s.0.clone()).unwrap_or_else(Q::zero);
        let m = if below < floor {
            Ext::Infinite
        } else {
            let sum = levels
                .finite
                .iter()
                .filter(|(w, _)| w > &below)
                .fold(Q::zero(), |acc, (_, l)| acc + l);
            Ext::Finite(match &cap {
                Some(c) if &sum > c => c.clone(),
                _ => sum,
            })
        };
        steps.push((v, m));
    }
    Ok(DistributionCurve::Step(StepDistribution { steps }))
}

/// Sorted `(value, length)` blocks above the floor, largest first. Ties keep
/// their original order.
fn sorted_blocks(levels: &Levels) -> (Vec<(Q, Q)>, Q) {
    let floor = levels.floor();
    let mut blocks: Vec<(Q, Q)> = levels.finite.iter().filter(|(v, _)| v > &floor).cloned().collect();
    blocks.sort_by(|a, b| b.0.cmp(&a.0));
    (blocks, floor)
}

/// `f*` for a step function, in exact arithmetic.
pub fn rearrange_exact(f: &Function) -> Result<Function> {
    let Some(levels) = step_levels(f) else {
        let (_, head) = tail_head(f)?;
        if head.is_infinite() {
            return Err(Error::UnboundedRearrangement);
        }
        return Err(Error::Unsupported("exact rearrangement of a non-step function".into()));
    };
    let (blocks, floor) = sorted_blocks(&levels);
    match f {
        Function::Seq(_) => {
            let mut head = Vec::new();
            for (v, _) in blocks {
                head.push(v);
            }
            let tail = if floor.is_zero() {
                SeqTail::Zero
            } else {
                SeqTail::Formula(crate::formula::Formula::constant(floor))
            };
            Ok(SeqFn::new(head, tail)?.into())
        }
        Function::Piecewise(g) => {
            let mut out = Vec::new();
            let mut at = Q::zero();
            for (v, l) in blocks {
                let hi = &at + &l;
                match out.last_mut() {
                    Some((_, h, w)) if *w == v => *h = hi.clone(),
                    _ => out.push((at.clone(), hi.clone(), v)),
                }
                at = hi;
            }
            let tail = if g.domain == Domain::Unit || floor.is_zero() { None } else { Some(floor) };
            Ok(PiecewiseFn::step(g.domain, &out, tail)?.simplified().into())
        }
    }
}

/// One cell of a bracket: `lower <= f* <= upper` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cell {
    pub lo: f64,
    pub hi: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Two-sided step envelope of `f*`, valid on `(epsilon, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bracket {
    pub cells: Vec<Cell>,
    /// Bounds for `f*` beyond the last cell.
    pub tail_lower: f64,
    pub tail_upper: f64,
    /// Left end of the represented range; positive when `f*(0+) = inf`.
    pub epsilon: f64,
    /// Largest `upper - lower` over the cells and the tail.
    pub gap: f64,
    pub domain: Domain,
}

impl Bracket {
    /// Midpoint of the bracket at `s`.
    pub fn estimate(&self, s: f64) -> f64 {
        let (lo, hi) = self.bounds(s);
        if hi.is_infinite() {
            return lo;
        }
        0.5 * (lo + hi)
    }

    pub fn bounds(&self, s: f64) -> (f64, f64) {
        if s >= self.domain.measure() {
            return (0.0, 0.0);
        }
        if s < self.epsilon {
            let first = self.cells.first().map(|c| c.lower).unwrap_or(self.tail_lower);
            return (first, f64::INFINITY);
        }
        for c in &self.cells {
            if s < c.hi {
                return (c.lower, c.upper);
            }
        }
        (self.tail_lower, self.tail_upper)
    }
}

/// Result of [`rearrange`].
#[derive(Debug, Clone, PartialEq)]
pub enum Rearranged {
    Exact(Function),
    Bracketed(Bracket),
}

impl Rearranged {
    pub fn eval(&self, s: f64) -> f64 {
        match self {
            Rearranged::Exact(f) => {
                if f.domain() == Domain::Naturals {
                    f.eval(s.floor() + 1.0)
                } else {
                    f.eval(s)
                }
            }
            Rearranged::Bracketed(b) => b.estimate(s),
        }
    }

    pub fn exact(&self) -> Option<&Function> {
        match self {
            Rearranged::Exact(f) => Some(f),
            Rearranged::Bracketed(_) => None,
        }
    }
}

/// Most grid levels a bracket may use.
pub const MAX_LEVELS: usize = 100_000;
/// Left cut used when `f*` is unbounded at 0.
pub const SINGULAR_EPSILON: f64 = 1e-6;

/// `f*`: exact for step functions, otherwise a bracket whose gap is at most
/// `tol` when that fits in [`MAX_LEVELS`] levels.
pub fn rearrange(f: &Function, tol: f64) -> Result<Rearranged> {
    if step_levels(f).is_some() {
        return Ok(Rearranged::Exact(rearrange_exact(f)?));
    }
    let p = profile_of(f)?;
    let domain = f.domain();
    let tail = p.tail();
    if domain == Domain::Naturals {
        return Ok(Rearranged::Bracketed(bracket_sequence(p.as_ref(), tol)));
    }
    let (epsilon, top) = if p.head().is_finite() {
        (0.0, p.head())
    } else {
        (SINGULAR_EPSILON, p.value(SINGULAR_EPSILON))
    };
    let span = (top - tail).max(0.0);
    let count = ((span / tol.max(f64::MIN_POSITIVE)).ceil() as usize).clamp(1, MAX_LEVELS);
    let h = span / count as f64;
    // Level lam_i = tail + i h; on [d(lam_{i+1}), d(lam_i)) we have lam_i <= f* <= lam_{i+1}.
    let mut cells = Vec::new();
    let mut right = p.dist(tail + h).min(domain.measure());
    let mut upper_end = if tail > 0.0 || domain == Domain::Unit { domain.measure() } else { f64::INFINITY };
    if tail == 0.0 && domain == Domain::HalfLine {
        upper_end = p.dist(0.0);
    }
    // Cells are produced from the right (small values) to the left.
    let mut pending = vec![Cell {
        lo: right,
        hi: upper_end,
        lower: tail,
        upper: tail + h,
    }];
    for i in 1..count {
        let lam_hi = tail + (i + 1) as f64 * h;
        let left = if i + 1 == count { epsilon } else { p.dist(lam_hi).max(epsilon) };
        if left < right {
            pending.push(Cell {
                lo: left,
                hi: right,
                lower: tail + i as f64 * h,
                upper: if i + 1 == count && epsilon > 0.0 { top } else { lam_hi },
            });
        }
        right = left;
    }
    pending.reverse();
    for c in pending {
        if c.hi > c.lo {
            cells.push(c);
        }
    }
    let (tail_lower, tail_upper) = if upper_end.is_finite() && upper_end < domain.measure() {
        (0.0, 0.0)
    } else {
        (tail, tail)
    };
    let gap = cells.iter().map(|c| c.upper - c.lower).fold(0.0, f64::max);
    Ok(Rearranged::Bracketed(Bracket {
        cells,
        tail_lower,
        tail_upper,
        epsilon,
        gap,
        domain,
    }))
}

/// Exact-ish head values `x*_1..x*_N` followed by the envelope
/// `tail <= x*_n <= x*_N`.
fn bracket_sequence(p: &dyn Profile, tol: f64) -> Bracket {
    let tail = p.tail();
    let mut cells = Vec::new();
    let mut last = p.head();
    for n in 0..MAX_LEVELS {
        let v = p.value(n as f64);
        cells.push(Cell {
            lo: n as f64,
            hi: n as f64 + 1.0,
            lower: v,
            upper: v,
        });
        last = v;
        if v - tail <= tol {
            break;
        }
    }
    Bracket {
        cells,
        tail_lower: tail,
        tail_upper: last,
        epsilon: 0.0,
        gap: last - tail,
        domain: Domain::Naturals,
    }
}

/// `(f*(inf), f*(0+))`.
pub fn tail_head(f: &Function) -> Result<(f64, f64)> {
    let p = profile_of(f)?;
    Ok((p.tail(), p.head()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Formula;
    use crate::measurable_fn::{chi, Piece};
    use crate::scalar::qr;

    fn sample() -> Function {
        PiecewiseFn::step(Domain::HalfLine, &[(qi(1), qi(2), qi(3)), (qi(4), qi(6), qi(1))], None)
            .unwrap()
            .into()
    }

    #[test]
    fn distribution_of_two_blocks() {
        let DistributionCurve::Step(d) = distribution(&sample()).unwrap() else { panic!() };
        assert_eq!(d.eval(&qi(0)), Ext::Finite(qi(3)));
        assert_eq!(d.eval(&qr(1, 2)), Ext::Finite(qi(3)));
        assert_eq!(d.eval(&qi(1)), Ext::Finite(qi(1)));
        assert_eq!(d.eval(&qi(3)), Ext::Finite(qi(0)));
        let DistributionCurve::Step(d) = distribution(&chi(Domain::HalfLine, 0, None)).unwrap() else { panic!() };
        assert_eq!(d.eval(&qr(1, 2)), Ext::Infinite);
        assert_eq!(d.eval(&qi(1)), Ext::Finite(qi(0)));
    }

    #[test]
    fn distribution_of_hyperbola() {
        let f: Function = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece::constant(qi(0), qi(1), qi(0))],
            Tail::Formula(Formula::hyperbolic(qi(1), qi(0))),
        )
        .unwrap()
        .into();
        let d = distribution(&f).unwrap();
        for lam in [0.1, 0.5] {
            assert!((d.eval(lam) - (1.0 / lam - 1.0)).abs() < 1e-12);
        }
        assert_eq!(d.eval(1.0), 0.0);
    }

    #[test]
    fn sorts_blocks_by_height() {
        let r = rearrange_exact(&sample()).unwrap();
        let want: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(3)), (qi(1), qi(3), qi(1))], None)
            .unwrap()
            .into();
        assert_eq!(r, want);
        let x: Function = SeqFn::finite(vec![qi(0), qi(2), qi(0), qi(1), qi(1)]).into();
        let r = rearrange_exact(&x).unwrap();
        assert_eq!(r, SeqFn::finite(vec![qi(2), qi(1), qi(1)]).into());
    }

    #[test]
    fn non_increasing_step_is_fixed() {
        let f: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], Some(qi(1)))
            .unwrap()
            .into();
        assert_eq!(rearrange_exact(&f).unwrap(), f);
        assert_eq!(tail_head(&f).unwrap(), (1.0, 2.0));
    }

    #[test]
    fn singular_power_is_bracketed() {
        let f: Function = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(1),
                formula: Formula::power(qr(1, 2), qr(-1, 2)),
            }],
            Tail::Zero,
        )
        .unwrap()
        .into();
        assert_eq!(tail_head(&f).unwrap(), (0.0, f64::INFINITY));
        assert_eq!(rearrange_exact(&f), Err(Error::UnboundedRearrangement));
        let Rearranged::Bracketed(b) = rearrange(&f, 1e-3).unwrap() else { panic!() };
        assert_eq!(b.epsilon, SINGULAR_EPSILON);
        for s in [1e-5, 0.01, 0.3, 0.9] {
            let (lo, hi) = b.bounds(s);
            let truth = 0.5 / s.sqrt();
            assert!(lo <= truth + 1e-12 && truth <= hi + 1e-12, "{s}: {lo} {truth} {hi}");
        }
        assert_eq!(b.bounds(2.0), (0.0, 0.0));
    }

    #[test]
    fn sequence_bracket_reaches_tolerance() {
        let x: Function = SeqFn::new(vec![qi(5)], SeqTail::Formula(Formula::hyperbolic(qi(1), qi(0))))
            .unwrap()
            .into();
        assert_eq!(tail_head(&x).unwrap(), (0.0, 5.0));
        let Rearranged::Bracketed(b) = rearrange(&x, 1e-3).unwrap() else { panic!() };
        assert!(b.gap <= 1e-3);
        assert_eq!(b.cells[0].lower, 5.0);
        assert!((b.cells[1].lower - 0.5).abs() < 1e-15);
    }
}
