//! Pointwise lattice operations: `max(|f|, |g|)`, support disjointness and
//! restriction to superlevel sets.

use crate::error::{Error, Result};
use crate::formula::{sign_changes, Formula};
use crate::measurable_fn::{Block, Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::scalar::{qf, qi, to_f64, Q};
use num_traits::{ToPrimitive, Zero};

fn unsupported<T>(what: &str) -> Result<T> {
    Err(Error::Unsupported(what.into()))
}

fn same_domain(f: &Function, g: &Function) -> Result<()> {
    if f.domain() != g.domain() {
        return Err(Error::DomainMismatch {
            expected: f.domain().name().into(),
            found: g.domain().name().into(),
        });
    }
    Ok(())
}

/// Pad with zero pieces up to `x` when the tail is zero.
fn pad_to(mut f: PiecewiseFn, x: &Q) -> PiecewiseFn {
    let end = f.end();
    if &end < x && f.tail == Tail::Zero {
        f.pieces.push(Piece::constant(end, x.clone(), Q::zero()));
    }
    f
}

/// Split `f` and `g` at each other's breakpoints so that their pieces line up.
fn align(f: &PiecewiseFn, g: &PiecewiseFn) -> Result<(PiecewiseFn, PiecewiseFn)> {
    let (mut a, mut b) = (f.clone(), g.clone());
    for _ in 0..4 {
        let mut pts = a.breakpoints();
        pts.extend(b.breakpoints());
        pts.sort();
        pts.dedup();
        let top = pts.last().cloned().unwrap_or_else(Q::zero);
        a = pad_to(a.split_at(&pts), &top);
        b = pad_to(b.split_at(&pts), &top);
        if a.breakpoints() == b.breakpoints() {
            return Ok((a, b));
        }
    }
    unsupported("functions whose periodic tails do not line up")
}

fn is_zero_formula(f: &Formula) -> bool {
    f.as_const().map(|v| v.is_zero()).unwrap_or(false)
}

/// Pieces of `max(fa, fb)` on `(lo, hi)`; `hi = None` leaves the last one open
/// and returns its formula as the tail.
fn max_on(lo: &Q, hi: Option<&Q>, fa: &Formula, fb: &Formula, out: &mut Vec<Piece>) -> Option<Formula> {
    let close = |out: &mut Vec<Piece>, a: &Q, form: Formula| -> Option<Formula> {
        match hi {
            Some(h) => {
                out.push(Piece {
                    lo: a.clone(),
                    hi: h.clone(),
                    formula: form,
                });
                None
            }
            None => Some(form),
        }
    };
    if fa == fb {
        return close(out, lo, fa.clone());
    }
    if let (Some(x), Some(y)) = (fa.as_const(), fb.as_const()) {
        return close(out, lo, Formula::constant(if x > y { x } else { y }));
    }
    let (ta, tb) = (fa.term(), fb.term());
    let lo_f = to_f64(lo);
    let hi_f = hi.map(to_f64).unwrap_or(f64::INFINITY);
    let mut cuts: Vec<Q> = sign_changes(|t| ta.eval(t) - tb.eval(t), lo_f, hi_f).into_iter().map(qf).collect();
    cuts.retain(|c| c > lo && hi.map(|h| c < h).unwrap_or(true));
    let pick = |a: f64, b: f64| {
        let mid = if b.is_finite() { 0.5 * (a + b) } else { a.max(1.0) * 4.0 + 1.0 };
        if ta.eval(mid) >= tb.eval(mid) {
            fa.clone()
        } else {
            fb.clone()
        }
    };
    let mut start = lo.clone();
    for c in cuts {
        let form = pick(to_f64(&start), to_f64(&c));
        out.push(Piece {
            lo: start.clone(),
            hi: c.clone(),
            formula: form,
        });
        start = c;
    }
    let form = pick(to_f64(&start), hi_f);
    close(out, &start, form)
}

/// A constant tail seen as a one-block periodic pattern.
fn as_pattern(tail: &Tail) -> Option<(Option<Q>, Vec<Block>)> {
    match tail {
        Tail::Periodic { period, pattern } => Some((Some(period.clone()), pattern.clone())),
        Tail::Formula(f) => f.as_const().map(|v| (None, vec![Block { lo: qi(0), hi: qi(0), value: v }])),
        Tail::Zero => Some((None, vec![])),
    }
}

/// Value of a pattern on `[a, b)` inside one period; a `hi = lo = 0` block
/// stands for a constant.
fn pattern_value(pattern: &[Block], a: &Q, b: &Q) -> Q {
    for blk in pattern {
        if blk.lo.is_zero() && blk.hi.is_zero() {
            return blk.value.clone();
        }
        if &blk.lo <= a && b <= &blk.hi {
            return blk.value.clone();
        }
    }
    Q::zero()
}

fn merge_patterns(period: &Q, pa: &[Block], pb: &[Block], op: impl Fn(&Q, &Q) -> Q) -> Vec<Block> {
    let mut cuts = vec![Q::zero(), period.clone()];
    for blk in pa.iter().chain(pb) {
        if !(blk.lo.is_zero() && blk.hi.is_zero()) {
            cuts.push(blk.lo.clone());
            cuts.push(blk.hi.clone());
        }
    }
    cuts.sort();
    cuts.dedup();
    let mut out: Vec<Block> = Vec::new();
    for w in cuts.windows(2) {
        let v = op(&pattern_value(pa, &w[0], &w[1]), &pattern_value(pb, &w[0], &w[1]));
        if v.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.hi == w[0] && last.value == v => last.hi = w[1].clone(),
            _ => out.push(Block {
                lo: w[0].clone(),
                hi: w[1].clone(),
                value: v,
            }),
        }
    }
    out
}

fn max_q(a: &Q, b: &Q) -> Q {
    if a > b {
        a.clone()
    } else {
        b.clone()
    }
}

fn max_piecewise(f: &PiecewiseFn, g: &PiecewiseFn) -> Result<PiecewiseFn> {
    let (a, b) = align(&f.abs(), &g.abs())?;
    let mut pieces = Vec::new();
    for (pa, pb) in a.pieces.iter().zip(&b.pieces) {
        max_on(&pa.lo, Some(&pa.hi), &pa.formula, &pb.formula, &mut pieces);
    }
    let end = a.end();
    let tail = match (&a.tail, &b.tail) {
        (Tail::Zero, t) | (t, Tail::Zero) => t.clone(),
        (Tail::Formula(fa), Tail::Formula(fb)) => {
            Tail::Formula(max_on(&end, None, fa, fb, &mut pieces).expect("open tail"))
        }
        (ta, tb) => {
            let (Some((pa_period, pa)), Some((pb_period, pb))) = (as_pattern(ta), as_pattern(tb)) else {
                return unsupported("maximum of a periodic tail and a non-constant tail");
            };
            let period = match (pa_period, pb_period) {
                (Some(x), Some(y)) if x != y => return unsupported("maximum of periodic tails with different periods"),
                (Some(x), _) | (_, Some(x)) => x,
                (None, None) => unreachable!("constant tails are formulas"),
            };
            Tail::Periodic {
                pattern: merge_patterns(&period, &pa, &pb, max_q),
                period,
            }
        }
    };
    Ok(PiecewiseFn::new(a.domain, pieces, tail)?.simplified())
}

/// Index after which two sequence tail rules no longer cross.
fn settle_index(fa: &Formula, fb: &Formula, from: usize) -> Result<usize> {
    let (ta, tb) = (fa.term(), fb.term());
    let cuts = sign_changes(|t| ta.eval(t) - tb.eval(t), from as f64, f64::INFINITY);
    let last = cuts.into_iter().fold(from as f64, f64::max).ceil() as usize + 1;
    if last - from > 1_000_000 {
        return unsupported("sequence tails that cross too late");
    }
    Ok(last)
}

fn seq_value(s: &SeqFn, n: usize) -> Q {
    s.eval_exact(n as u64).unwrap_or_else(|| qf(s.eval(n as u64)))
}

fn max_seq(x: &SeqFn, y: &SeqFn) -> Result<SeqFn> {
    let (x, y) = (x.abs(), y.abs());
    let mut len = x.head.len().max(y.head.len());
    let tail = match (&x.tail, &y.tail) {
        (SeqTail::Zero, t) | (t, SeqTail::Zero) => t.clone(),
        (SeqTail::Formula(fa), SeqTail::Formula(fb)) => {
            len = settle_index(fa, fb, len)?;
            let far = (len as f64) * 4.0 + 1.0;
            if fa.term().eval(far) >= fb.term().eval(far) {
                x.tail.clone()
            } else {
                y.tail.clone()
            }
        }
        _ => return unsupported("maximum of sequences with harmonic tails"),
    };
    let head = (1..=len).map(|n| max_q(&seq_value(&x, n), &seq_value(&y, n))).collect();
    SeqFn::new(head, tail)
}

/// `max(|f|, |g|)`.
pub fn max_abs(f: &Function, g: &Function) -> Result<Function> {
    same_domain(f, g)?;
    match (f, g) {
        (Function::Piecewise(a), Function::Piecewise(b)) => Ok(max_piecewise(a, b)?.into()),
        (Function::Seq(a), Function::Seq(b)) => Ok(max_seq(a, b)?.into()),
        _ => unreachable!("domains agree"),
    }
}

fn tail_is_zero(t: &Tail) -> bool {
    match t {
        Tail::Zero => true,
        Tail::Formula(f) => is_zero_formula(f),
        Tail::Periodic { pattern, .. } => pattern.iter().all(|b| b.value.is_zero()),
    }
}

/// True when `{f != 0}` and `{g != 0}` are disjoint up to null sets.
pub fn supports_disjoint(f: &Function, g: &Function) -> Result<bool> {
    same_domain(f, g)?;
    match (f, g) {
        (Function::Piecewise(a), Function::Piecewise(b)) => {
            let (a, b) = align(a, b)?;
            for (pa, pb) in a.pieces.iter().zip(&b.pieces) {
                if !is_zero_formula(&pa.formula) && !is_zero_formula(&pb.formula) {
                    return Ok(false);
                }
            }
            if a.domain == Domain::Unit || tail_is_zero(&a.tail) || tail_is_zero(&b.tail) {
                return Ok(true);
            }
            match (&a.tail, &b.tail) {
                (Tail::Periodic { period: x, pattern: pa }, Tail::Periodic { period: y, pattern: pb }) if x == y => {
                    let both = merge_patterns(x, pa, pb, |u, v| {
                        if !u.is_zero() && !v.is_zero() {
                            qi(1)
                        } else {
                            Q::zero()
                        }
                    });
                    Ok(both.is_empty())
                }
                (Tail::Periodic { .. }, Tail::Periodic { .. }) => unsupported("periodic tails with different periods"),
                _ => Ok(false),
            }
        }
        (Function::Seq(x), Function::Seq(y)) => {
            let len = x.head.len().max(y.head.len());
            for n in 1..=len {
                if x.eval(n as u64) != 0.0 && y.eval(n as u64) != 0.0 {
                    return Ok(false);
                }
            }
            let zero = |t: &SeqTail| match t {
                SeqTail::Zero => true,
                SeqTail::Formula(f) => is_zero_formula(f),
                SeqTail::Harmonic { a, k, b } => a.is_zero() && k.is_zero() && b.is_zero(),
            };
            Ok(zero(&x.tail) || zero(&y.tail))
        }
        _ => unreachable!("domains agree"),
    }
}

/// `f chi_E` with `E = {|f| > lam} u (from, inf)`, computed in the original
/// coordinates of `f`.
pub fn restrict_superlevel(f: &Function, lam: f64, from: &Q) -> Result<Function> {
    match f {
        Function::Seq(s) => {
            let cut = from.floor().to_integer().to_usize().unwrap_or(usize::MAX);
            let len = s.head.len().max(cut);
            if len > 10_000_000 {
                return unsupported("superlevel restriction beyond ten million terms");
            }
            let head = (1..=len)
                .map(|n| {
                    let v = seq_value(s, n);
                    if n > cut || to_f64(&v).abs() > lam {
                        v
                    } else {
                        Q::zero()
                    }
                })
                .collect();
            Ok(SeqFn::new(head, s.tail.clone())?.into())
        }
        Function::Piecewise(g) => {
            let g = g.split_at(std::slice::from_ref(from));
            let mut pieces = Vec::new();
            for p in &g.pieces {
                if &p.lo >= from {
                    pieces.push(p.clone());
                    continue;
                }
                restrict_piece(p, lam, &mut pieces);
            }
            let tail = if &g.end() >= from || g.domain == Domain::Unit {
                g.tail.clone()
            } else {
                return unsupported("superlevel restriction of a tail before the cut");
            };
            Ok(PiecewiseFn::new(g.domain, pieces, tail)?.simplified().into())
        }
    }
}

fn restrict_piece(p: &Piece, lam: f64, out: &mut Vec<Piece>) {
    let t = p.formula.term();
    if let Some(v) = p.formula.as_const() {
        let keep = to_f64(&v).abs() > lam;
        out.push(if keep {
            p.clone()
        } else {
            Piece::constant(p.lo.clone(), p.hi.clone(), Q::zero())
        });
        return;
    }
    let (lo, hi) = (to_f64(&p.lo), to_f64(&p.hi));
    let mut cuts: Vec<Q> = sign_changes(|x| t.eval(x).abs() - lam, lo, hi).into_iter().map(qf).collect();
    cuts.retain(|c| c > &p.lo && c < &p.hi);
    cuts.push(p.hi.clone());
    let mut start = p.lo.clone();
    for c in cuts {
        let (a, b) = (to_f64(&start), to_f64(&c));
        let mid = if a > 0.0 && b / a > 4.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
        out.push(if t.eval(mid).abs() > lam {
            Piece {
                lo: start.clone(),
                hi: c.clone(),
                formula: p.formula.clone(),
            }
        } else {
            Piece::constant(start.clone(), c.clone(), Q::zero())
        });
        start = c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurable_fn::chi;
    use crate::scalar::qr;

    fn blocks(period: i64, idx: &[i64]) -> Function {
        PiecewiseFn::new(
            Domain::HalfLine,
            vec![],
            Tail::Periodic {
                period: qi(period),
                pattern: idx
                    .iter()
                    .map(|&i| Block {
                        lo: qi(i),
                        hi: qi(i + 1),
                        value: qi(1),
                    })
                    .collect(),
            },
        )
        .unwrap()
        .into()
    }

    #[test]
    fn max_of_steps() {
        let f = chi(Domain::HalfLine, 0, None);
        let g: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], None).unwrap().into();
        let m = max_abs(&f, &g).unwrap();
        let want: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], Some(qi(1))).unwrap().into();
        assert_eq!(m, want);
    }

    #[test]
    fn max_of_crossing_formulas() {
        let f: Function = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(4),
                formula: Formula::power(qi(1), qr(-1, 2)),
            }],
            Tail::Zero,
        )
        .unwrap()
        .into();
        let g: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(4), qr(1, 2))], None).unwrap().into();
        let m = max_abs(&f, &g).unwrap();
        for t in [0.5f64, 1.0, 3.0, 3.99, 5.0] {
            let want = if t < 4.0 { (1.0 / f64::sqrt(t)).max(0.5) } else { 0.0 };
            assert!((m.eval(t) - want).abs() < 1e-12, "{t}");
        }
    }

    #[test]
    fn periodic_blocks_are_disjoint() {
        let a = blocks(3, &[0]);
        let b = blocks(3, &[1, 2]);
        assert!(supports_disjoint(&a, &b).unwrap());
        assert!(!supports_disjoint(&a, &blocks(3, &[0, 2])).unwrap());
        let m = max_abs(&a, &b).unwrap();
        assert_eq!(m.eval(0.5), 1.0);
        assert_eq!(m.eval(1001.5), 1.0);
    }

    #[test]
    fn superlevel_restriction() {
        let f: Function = PiecewiseFn::step(
            Domain::HalfLine,
            &[(qi(0), qi(1), qi(1)), (qi(1), qi(2), qi(3))],
            Some(qi(1)),
        )
        .unwrap()
        .into();
        let r = restrict_superlevel(&f, 2.0, &qi(5)).unwrap();
        assert_eq!(r.eval(0.5), 0.0);
        assert_eq!(r.eval(1.5), 3.0);
        assert_eq!(r.eval(3.0), 0.0);
        assert_eq!(r.eval(6.0), 1.0);
        let x: Function = SeqFn::finite(vec![qi(1), qi(5), qi(2)]).into();
        let r = restrict_superlevel(&x, 1.5, &qi(2)).unwrap();
        assert_eq!(r, SeqFn::finite(vec![qi(0), qi(5), qi(2)]).into());
    }
}
