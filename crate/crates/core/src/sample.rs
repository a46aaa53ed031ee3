//! Seeded random inputs for property tests and the reproduction suite.

use crate::formula::Formula;
use crate::measurable_fn::{Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::scalar::{qi, qr, Q};
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DEFAULT_SEED: u64 = 20_240_917;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn rational<R: Rng>(rng: &mut R, max: i64, denominators: &[i64]) -> Q {
    let d = denominators[rng.gen_range(0..denominators.len())];
    qr(rng.gen_range(0..=max * d), d)
}

/// Step value in `[-4, 4]` with small denominators.
fn step_value<R: Rng>(rng: &mut R) -> Q {
    let v = rational(rng, 4, &[1, 2, 3, 4]);
    if rng.gen_bool(0.25) {
        -v
    } else {
        v
    }
}

/// Distinct sorted rational cut points strictly inside `(0, end)`.
fn cuts<R: Rng>(rng: &mut R, count: usize, end: &Q) -> Vec<Q> {
    let mut out: Vec<Q> = (0..count)
        .map(|_| rational(rng, 1, &[2, 3, 4, 5, 7, 8, 16]) * end)
        .filter(|q| q.is_positive() && q < end)
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Random step function with at most `max_pieces` pieces on rational
/// breakpoints. Half-line functions get a zero or constant tail; sequences
/// a zero or constant tail after at most `max_pieces` entries.
pub fn step_function<R: Rng>(rng: &mut R, domain: Domain, max_pieces: usize) -> Function {
    match domain {
        Domain::Naturals => {
            let n = rng.gen_range(1..=max_pieces);
            let head = (0..n).map(|_| step_value(rng)).collect();
            let tail = if rng.gen_bool(0.5) {
                SeqTail::Zero
            } else {
                SeqTail::Formula(Formula::constant(step_value(rng)))
            };
            SeqFn::new(head, tail).expect("valid sequence").into()
        }
        _ => {
            let end = if domain == Domain::Unit {
                Q::one()
            } else {
                qi(rng.gen_range(1..=20))
            };
            let n = rng.gen_range(1..=max_pieces);
            let mut points = cuts(rng, n - 1, &end);
            points.push(end);
            let mut lo = Q::zero();
            let mut pieces = Vec::new();
            for hi in points {
                pieces.push(Piece::constant(lo.clone(), hi.clone(), step_value(rng)));
                lo = hi;
            }
            let tail = if domain == Domain::HalfLine && rng.gen_bool(0.5) {
                Tail::Formula(Formula::constant(step_value(rng)))
            } else {
                Tail::Zero
            };
            PiecewiseFn::new(domain, pieces, tail).expect("valid step").into()
        }
    }
}

/// Random step function on the half line with zero tail (finite in every
/// `L_p`).
pub fn compact_step<R: Rng>(rng: &mut R, max_pieces: usize) -> Function {
    match step_function(rng, Domain::HalfLine, max_pieces) {
        Function::Piecewise(mut g) => {
            g.tail = Tail::Zero;
            g.into()
        }
        Function::Seq(_) => unreachable!("half-line sample"),
    }
}

/// Steps on `(0, 4)` followed by one singular piece `c (t - s)^(-1/2)` on
/// `(s, s + 1)`, zero afterwards. Returns the function and `c`.
pub fn singular_function<R: Rng>(rng: &mut R, max_steps: usize) -> (Function, Q) {
    let end = qi(4);
    let n = rng.gen_range(1..=max_steps);
    let mut points = cuts(rng, n - 1, &end);
    points.push(end.clone());
    let mut lo = Q::zero();
    let mut pieces = Vec::new();
    for hi in points {
        pieces.push(Piece::constant(lo.clone(), hi.clone(), step_value(rng)));
        lo = hi;
    }
    let c = qr(rng.gen_range(1..=8), 4);
    pieces.push(Piece {
        lo: end.clone(),
        hi: &end + qi(1),
        formula: Formula::shifted_power(c.clone(), qr(-1, 2), -end),
    });
    let f = PiecewiseFn::new(Domain::HalfLine, pieces, Tail::Zero).expect("valid singular function");
    (f.into(), c)
}

/// Sequence with a short head and a zero, constant or hyperbolic tail
/// `a/n + b` with `a >= 0` and `b` in `{0, 1/2, 1}`.
pub fn sequence<R: Rng>(rng: &mut R, max_head: usize) -> SeqFn {
    let n = rng.gen_range(0..=max_head);
    let head: Vec<Q> = (0..n).map(|_| step_value(rng)).collect();
    let tail = match rng.gen_range(0..3) {
        0 => SeqTail::Zero,
        1 => SeqTail::Formula(Formula::constant(step_value(rng))),
        _ => {
            let a = rational(rng, 3, &[1, 2]);
            let b = [Q::zero(), qr(1, 2), Q::one()][rng.gen_range(0..3)].clone();
            SeqTail::Formula(Formula::hyperbolic(a, b))
        }
    };
    SeqFn::new(head, tail).expect("valid sequence")
}

fn scale_formula<R: Rng>(rng: &mut R, f: &Formula) -> Formula {
    f.scale(&qr(rng.gen_range(0..=8), 8))
}

/// `g` with `|g| <= |f|`: every piece of `f` scaled by a random factor in
/// `[0, 1]`. Periodic tails are kept.
pub fn dominated<R: Rng>(rng: &mut R, f: &Function) -> Function {
    match f {
        Function::Piecewise(g) => {
            let pieces = g
                .pieces
                .iter()
                .map(|p| Piece {
                    lo: p.lo.clone(),
                    hi: p.hi.clone(),
                    formula: scale_formula(rng, &p.formula),
                })
                .collect();
            let tail = match &g.tail {
                Tail::Formula(t) => Tail::Formula(scale_formula(rng, t)),
                other => other.clone(),
            };
            PiecewiseFn::new(g.domain, pieces, tail).expect("scaling keeps validity").into()
        }
        Function::Seq(s) => {
            let head = s.head.iter().map(|v| v * qr(rng.gen_range(0..=8), 8)).collect();
            let tail = match &s.tail {
                SeqTail::Formula(t) => SeqTail::Formula(scale_formula(rng, t)),
                other => other.clone(),
            };
            SeqFn::new(head, tail).expect("scaling keeps validity").into()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible() {
        let a = step_function(&mut rng(7), Domain::HalfLine, 12);
        let b = step_function(&mut rng(7), Domain::HalfLine, 12);
        assert_eq!(a, b);
        let mut r = rng(1);
        for _ in 0..50 {
            for d in [Domain::Unit, Domain::HalfLine, Domain::Naturals] {
                let f = step_function(&mut r, d, 12);
                assert!(f.is_step());
            }
            singular_function(&mut r, 5);
            sequence(&mut r, 12);
        }
    }
}
