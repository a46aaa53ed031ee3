//! Brute-force reference computations, written independently of the main
//! engines and used to cross-check them.

use crate::error::{Error, Result};
use crate::lattice::restrict_superlevel;
use crate::measurable_fn::{Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::rearrangement::{rearrange, Rearranged};
use crate::scalar::{qi, to_f64, Q};
use crate::spaces::{norm, Config, SpaceKind, SpaceSpec};
use num_traits::{One, Signed, Zero};

/// `f*` of a step function as consecutive blocks `(length, height)` sorted
/// by height, followed by the constant `floor` on the rest of the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSteps {
    pub blocks: Vec<(Q, Q)>,
    pub floor: Q,
}

impl SortedSteps {
    pub fn eval(&self, t: &Q) -> Q {
        let mut at = Q::zero();
        for (len, v) in &self.blocks {
            at += len;
            if t < &at {
                return v.clone();
            }
        }
        self.floor.clone()
    }

    pub fn span(&self) -> Q {
        self.blocks.iter().map(|b| &b.0).sum()
    }
}

/// Lay the blocks of `|f|` end to end, tallest first.
pub fn sort_by_height(f: &Function) -> Result<SortedSteps> {
    if !f.is_step() {
        return Err(Error::Unsupported("the sorting oracle handles step functions only".into()));
    }
    let mut blocks: Vec<(Q, Q)> = Vec::new();
    let floor = match f {
        Function::Piecewise(g) => {
            for p in &g.pieces {
                let v = p.formula.as_const().expect("step").abs();
                blocks.push((&p.hi - &p.lo, v));
            }
            match &g.tail {
                Tail::Zero => Q::zero(),
                Tail::Formula(t) => t.as_const().expect("step").abs(),
                Tail::Periodic { pattern, .. } => pattern.iter().map(|b| b.value.abs()).max().unwrap_or_else(Q::zero),
            }
        }
        Function::Seq(s) => {
            for v in &s.head {
                blocks.push((Q::one(), v.abs()));
            }
            match &s.tail {
                SeqTail::Formula(t) => t.as_const().expect("step").abs(),
                _ => Q::zero(),
            }
        }
    };
    blocks.retain(|b| b.1 > floor);
    blocks.sort_by(|a, b| b.1.cmp(&a.1));
    Ok(SortedSteps { blocks, floor })
}

/// Compare the exact rearrangement with the sorting oracle at every
/// midpoint between breakpoints of either. Returns the first mismatch.
pub fn rearrangement_mismatch(f: &Function) -> Result<Option<String>> {
    let oracle = sort_by_height(f)?;
    let got = match rearrange(f, 1e-12)? {
        Rearranged::Exact(g) => g,
        Rearranged::Bracketed(_) => return Ok(Some("step input was not rearranged exactly".into())),
    };
    match &got {
        Function::Seq(s) => {
            let n = oracle.blocks.len().max(s.head.len()) as u64 + 3;
            for k in 1..=n {
                let want = oracle.eval(&(qi(k as i64) - Q::new(1.into(), 2.into())));
                let have = s.eval_exact(k);
                if have.as_ref() != Some(&want) {
                    return Ok(Some(format!("x*_{k}: got {have:?}, expected {want}")));
                }
            }
        }
        Function::Piecewise(g) => {
            let mut points = vec![Q::zero()];
            let mut at = Q::zero();
            for (len, _) in &oracle.blocks {
                at += len;
                points.push(at.clone());
            }
            points.extend(g.breakpoints());
            points.sort();
            points.dedup();
            let last = points.last().cloned().unwrap_or_else(Q::zero);
            let mut samples: Vec<Q> = points.windows(2).map(|w| (&w[0] + &w[1]) / qi(2)).collect();
            if g.domain == Domain::HalfLine {
                samples.push(last + qi(1));
            } else if last < Q::one() {
                samples.push((last + Q::one()) / qi(2));
            }
            for t in samples {
                let want = oracle.eval(&t);
                let have = g.eval_exact(&t);
                if have.as_ref() != Some(&want) {
                    return Ok(Some(format!("f*({t}): got {have:?}, expected {want}")));
                }
            }
        }
    }
    Ok(None)
}

/// `||f chi_E||_X` with `E = {|f| > f*(1/n)} u (n, inf)`, evaluated in the
/// original coordinates of `f`. On the naturals `E` is the set of indices
/// past `n`.
pub fn superlevel_point(f: &Function, x: &SpaceSpec, n: u64, cfg: &Config) -> Result<f64> {
    let from = qi(n as i64);
    let g = if f.domain() == Domain::Naturals {
        restrict_superlevel(f, f64::INFINITY, &from)?
    } else {
        let lam = rearrange(f, cfg.tol)?.eval(1.0 / n as f64);
        restrict_superlevel(f, lam, &from)?
    };
    Ok(norm(&g, x, cfg)?.value)
}

/// `superlevel_point` at `n = 2^k`, `k = 0..=depth`.
pub fn superlevel_schedule(f: &Function, x: &SpaceSpec, depth: u32, cfg: &Config) -> Result<Vec<f64>> {
    (0..=depth).map(|k| superlevel_point(f, x, 1u64 << k, cfg)).collect()
}

/// Smallest `||f - g||_X` over `g = min(|f|, c) chi_(0,m)` for `c` and `m` in
/// the given grids. Every candidate lies in the order continuous part of a
/// space with non-trivial `X_a` and `(D_inf)`, so the minimum bounds the
/// distance from above.
pub fn grid_min_distance(f: &Function, x: &SpaceSpec, cs: &[Q], ms: &[Q], cfg: &Config) -> Result<f64> {
    let g = match f.abs() {
        Function::Piecewise(g) if g.is_step() => g,
        _ => return Err(Error::Unsupported("grid minimisation needs a step function on an interval".into())),
    };
    let mut best = f64::INFINITY;
    for m in ms {
        let mut base = g.clone();
        if &base.end() < m {
            if let Tail::Formula(t) = &base.tail {
                let v = t.as_const().expect("step");
                let end = base.end();
                base.pieces.push(Piece::constant(end, m.clone(), v));
            }
        }
        let base = base.split_at(std::slice::from_ref(m));
        for c in cs {
            let pieces = base
                .pieces
                .iter()
                .map(|p| {
                    let v = p.formula.as_const().expect("step");
                    let v = if &p.hi <= m { (v - c).max(Q::zero()) } else { v };
                    Piece::constant(p.lo.clone(), p.hi.clone(), v)
                })
                .collect();
            let h: Function = PiecewiseFn::new(base.domain, pieces, base.tail.clone())?.into();
            best = best.min(norm(&h, x, cfg)?.value);
        }
    }
    Ok(best)
}

/// Cesaro means `y_m = (|x_1| + ... + |x_m|)/m` for `m = 1..=count`, by
/// direct summation.
pub fn cesaro_means(x: &SeqFn, count: usize) -> Vec<f64> {
    let head: Vec<f64> = x.head.iter().map(to_f64).collect();
    let term = match &x.tail {
        SeqTail::Formula(f) => Some(f.term()),
        _ => None,
    };
    let mut sum = 0.0;
    (1..=count)
        .map(|m| {
            let v = match (head.get(m - 1), &term, &x.tail) {
                (Some(v), _, _) => *v,
                (None, Some(t), _) => t.eval(m as f64),
                (None, None, SeqTail::Zero) => 0.0,
                (None, None, _) => x.eval(m as u64),
            };
            sum += v.abs();
            sum / m as f64
        })
        .collect()
}

/// Tail size of `C_d|x|` in the base, estimated from `2N` direct means.
///
/// For `l_inf` this is the Richardson extrapolation `2 y_2N - y_N` of the
/// limit of the means; for `l_p` it is the mass `sum_{N < m <= 2N} y_m^p`
/// of the next dyadic block.
pub fn cesaro_tail_level(x: &SeqFn, base: &SpaceSpec, n: usize) -> Result<f64> {
    let y = cesaro_means(x, 2 * n);
    match &base.kind {
        SpaceKind::Linf => Ok(2.0 * y[2 * n - 1] - y[n - 1]),
        SpaceKind::Lp(p) => {
            let p = to_f64(p);
            if p == 2.0 {
                Ok(y[n..].iter().map(|v| v * v).sum())
            } else {
                Ok(y[n..].iter().map(|v| v.powf(p)).sum())
            }
        }
        _ => Err(Error::Unsupported("tail oracle covers l_inf and l_p".into())),
    }
}

/// Membership of `x` in the order continuous part of the Cesaro space, by
/// tail decay of the direct means.
pub fn cesaro_member_by_tail(x: &SeqFn, base: &SpaceSpec, n: usize) -> Result<bool> {
    Ok(member_from_level(cesaro_tail_level(x, base, n)?, base))
}

/// Decision rule for [`cesaro_tail_level`]: the limit vanishes for `l_inf`,
/// the dyadic tail mass is small for `l_p`.
pub fn member_from_level(level: f64, base: &SpaceSpec) -> bool {
    match base.kind {
        SpaceKind::Linf => level.abs() <= 1e-4,
        _ => level <= 1e-2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use crate::scalar::qr;

    #[test]
    fn sorting_oracle_agrees_on_samples() {
        let mut r = sample::rng(3);
        for d in [Domain::Unit, Domain::HalfLine, Domain::Naturals] {
            for _ in 0..40 {
                let f = sample::step_function(&mut r, d, 12);
                assert_eq!(rearrangement_mismatch(&f).unwrap(), None, "{f:?}");
            }
        }
    }

    #[test]
    fn grid_min_for_the_flat_tail() {
        let x = SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2));
        let f: Function = PiecewiseFn::step(Domain::HalfLine, &[(qi(0), qi(1), qi(2))], Some(qi(1)))
            .unwrap()
            .into();
        let cs: Vec<Q> = (0..=12).map(|i| qr(i, 4)).collect();
        let ms: Vec<Q> = (0..8).map(|j| qi(1 << j)).collect();
        let v = grid_min_distance(&f, &x, &cs, &ms, &Config::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }

    #[test]
    fn tail_levels() {
        let linf = SpaceSpec::linf(Domain::Naturals);
        assert!(cesaro_member_by_tail(&SeqFn::unit_vector(1), &linf, 1 << 12).unwrap());
        let ones = SeqFn::constant(qi(1));
        assert!((cesaro_tail_level(&ones, &linf, 1 << 12).unwrap() - 1.0).abs() < 1e-12);
        let l2 = SpaceSpec::lp(Domain::Naturals, qi(2));
        assert!(!cesaro_member_by_tail(&ones, &l2, 1 << 12).unwrap());
    }
}
