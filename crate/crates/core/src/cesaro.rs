//! The Cesaro (Hardy) operator `C f(x) = (1/x) int_0^x |f|` and its discrete
//! analogue, with the Cesaro-space norm `||f||_CX = ||C|f|||_X`.

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::measurable_fn::{Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::numeric::{harmonic, integrate, integrate_knots};
use crate::profile::Profile;
use crate::scalar::{qf, qi, to_f64, Q};
use crate::spaces::{check_domain, norm, Config, EvalResult, SpaceKind, SpaceSpec};
use num_traits::{One, Signed, Zero};

/// `C(|f|)`, exact for step functions and in closed form for the piece class.
pub fn cesaro_apply(f: &Function) -> Result<Function> {
    match f {
        Function::Piecewise(g) => Ok(Function::Piecewise(apply_piecewise(&g.abs())?)),
        Function::Seq(s) => Ok(Function::Seq(apply_seq(&s.abs())?)),
    }
}

/// Formula pieces whose running average stays in the piece class, written as
/// `k/t + c t^alpha + b` (after folding `c t^-1` into `k`).
struct Integrable {
    k: Q,
    c: Q,
    alpha: Q,
    b: Q,
}

fn integrable(form: &Formula, lo: &Q) -> Result<Integrable> {
    if !form.m.is_zero() {
        return Err(Error::Unsupported("Cesaro image of ln(t)/t pieces".into()));
    }
    let mut k = form.k.clone();
    let mut c = form.c.clone();
    let mut alpha = form.alpha.clone();
    let mut b = form.b.clone();
    if !c.is_zero() && alpha.is_zero() {
        b += &c;
        c = Q::zero();
    }
    if !c.is_zero() && !form.shift.is_zero() {
        return Err(Error::Unsupported("Cesaro image of shifted power pieces".into()));
    }
    if !c.is_zero() && alpha == -Q::one() {
        k += &c;
        c = Q::zero();
    }
    if c.is_zero() {
        alpha = Q::zero();
    }
    if lo.is_zero() && (!k.is_zero() || (!c.is_zero() && alpha <= -Q::one())) {
        return Err(Error::NotLocallyIntegrable);
    }
    Ok(Integrable { k, c, alpha, b })
}

impl Integrable {
    /// `G(x) = k ln x + c x^(alpha+1)/(alpha+1) + b x`, exact where rational.
    fn antiderivative(&self, x: &Q) -> Q {
        if x.is_zero() {
            return Q::zero();
        }
        let rest = Formula {
            k: Q::zero(),
            c: self.c.clone(),
            alpha: self.alpha.clone(),
            shift: Q::zero(),
            b: self.b.clone(),
            m: Q::zero(),
        };
        let mut g = match rest.antiderivative_exact(x) {
            Some(v) => v,
            None => {
                let xf = to_f64(x);
                let e = to_f64(&self.alpha) + 1.0;
                qf(to_f64(&self.c) * xf.powf(e) / e + to_f64(&self.b) * xf)
            }
        };
        if !self.k.is_zero() && !x.is_one() {
            g += &self.k * qf(to_f64(x).ln());
        }
        g
    }

    /// `(K + G(x))/x` as a formula.
    fn image(&self, konst: Q) -> Formula {
        let c = if self.c.is_zero() {
            Q::zero()
        } else {
            &self.c / (&self.alpha + Q::one())
        };
        Formula {
            k: konst,
            c,
            alpha: self.alpha.clone(),
            shift: Q::zero(),
            b: self.b.clone(),
            m: self.k.clone(),
        }
    }
}

fn apply_piecewise(g: &PiecewiseFn) -> Result<PiecewiseFn> {
    let mut pieces = Vec::with_capacity(g.pieces.len());
    let mut acc = Q::zero();
    for p in &g.pieces {
        let it = integrable(&p.formula, &p.lo)?;
        let konst = &acc - it.antiderivative(&p.lo);
        acc = &konst + it.antiderivative(&p.hi);
        pieces.push(Piece {
            lo: p.lo.clone(),
            hi: p.hi.clone(),
            formula: it.image(konst),
        });
    }
    let end = g.end();
    let tail = match (&g.tail, g.domain) {
        (_, Domain::Unit) | (Tail::Zero, _) => {
            if g.domain == Domain::Unit {
                Tail::Zero
            } else {
                Tail::Formula(Formula::hyperbolic(acc, Q::zero()))
            }
        }
        (Tail::Formula(form), _) => {
            let it = integrable(form, &end)?;
            let konst = &acc - it.antiderivative(&end);
            Tail::Formula(it.image(konst))
        }
        (Tail::Periodic { .. }, _) => {
            return Err(Error::Unsupported("Cesaro image of a periodic tail".into()));
        }
    };
    PiecewiseFn::new(g.domain, pieces, tail)
}

fn harmonic_exact(n: usize) -> Q {
    if n > 2000 {
        return qf(harmonic(n as u64));
    }
    (1..=n).fold(Q::zero(), |h, k| h + Q::new(1.into(), (k as i64).into()))
}

fn apply_seq(s: &SeqFn) -> Result<SeqFn> {
    let n = s.head.len();
    let mut sum = Q::zero();
    let mut head = Vec::with_capacity(n);
    for (i, x) in s.head.iter().enumerate() {
        sum += x;
        head.push(&sum / qi(i as i64 + 1));
    }
    let big_n = qi(n as i64);
    let tail = match &s.tail {
        SeqTail::Zero => SeqTail::Formula(Formula::hyperbolic(sum, Q::zero())),
        SeqTail::Formula(f) => {
            if let Some(v) = f.as_const() {
                SeqTail::Formula(Formula::hyperbolic(&sum - &v * &big_n, v))
            } else if f.c.is_zero() && f.m.is_zero() {
                let a = f.k.clone();
                let b = f.b.clone();
                let k = &sum - &a * harmonic_exact(n) - &b * &big_n;
                SeqTail::Harmonic { a, k, b }
            } else {
                return Err(Error::Unsupported("discrete Cesaro image of a power tail".into()));
            }
        }
        SeqTail::Harmonic { .. } => {
            return Err(Error::Unsupported("discrete Cesaro image of a harmonic tail".into()));
        }
    };
    SeqFn::new(head, tail)
}

/// `||f||_CX = ||C(|f|)||_X`.
pub fn cx_norm(f: &Function, base: &SpaceSpec, cfg: &Config) -> Result<EvalResult> {
    check_domain(f.domain(), base)?;
    let image = cesaro_apply(f)?;
    norm(&image, base, cfg)
}

/// `C(|f|)(0+)`; on the naturals the first average `|x_1|`.
pub fn c_at_zero(f: &Function) -> Result<f64> {
    match f {
        Function::Seq(s) => Ok(s.eval(1).abs()),
        Function::Piecewise(g) => {
            let g = g.abs();
            if let Some(p) = g.pieces.first() {
                return Ok(p.formula.term().limit_at(0.0));
            }
            Ok(match &g.tail {
                Tail::Zero => 0.0,
                Tail::Formula(form) => form.term().limit_at(0.0),
                Tail::Periodic { pattern, .. } => pattern
                    .iter()
                    .find(|b| b.lo.is_zero())
                    .map(|b| to_f64(&b.value))
                    .unwrap_or(0.0),
            })
        }
    }
}

/// `max ||f||_CX / ||f||_X` over a family: a lower bound for `||C||_{X->X}`,
/// never a proof of boundedness.
pub fn bound_probe(base: &SpaceSpec, family: &[Function], cfg: &Config) -> Result<f64> {
    if family.is_empty() {
        return Err(Error::Precondition("bound probe needs a non-empty family".into()));
    }
    let mut best: f64 = 0.0;
    for f in family {
        let d = norm(f, base, cfg)?.value;
        if d == 0.0 {
            continue;
        }
        if !d.is_finite() {
            return Err(Error::Precondition("bound probe needs functions of finite norm".into()));
        }
        best = best.max(cx_norm(f, base, cfg)?.value / d);
    }
    Ok(best)
}

/// Rule-table answer to "is `C` bounded on `X`": `Some(true)` where a
/// classical inequality settles it, `Some(false)` where a counterexample is
/// classical, `None` otherwise.
pub fn bounded_by_rule(x: &SpaceSpec) -> Option<bool> {
    let over_one = |p: &Q| p > &Q::one();
    match &x.kind {
        SpaceKind::Lp(p) | SpaceKind::SumLpLinf(p) => Some(over_one(p)),
        SpaceKind::Linf => Some(true),
        SpaceKind::Intersection(l, r) => match (bounded_by_rule(l), bounded_by_rule(r)) {
            (Some(true), Some(true)) => Some(true),
            _ => None,
        },
        SpaceKind::CalderonLozanovskii { base, f } => match f.as_power() {
            Some(p) if p >= 1.0 && bounded_by_rule(base) == Some(true) => Some(true),
            _ => None,
        },
        _ => None,
    }
}

/// Small test family for [`bound_probe`] on a domain.
pub fn probe_family(domain: Domain) -> Vec<Function> {
    use crate::measurable_fn::chi;
    match domain {
        Domain::Naturals => vec![SeqFn::unit_vector(1).into(), SeqFn::finite(vec![qi(1); 10]).into()],
        Domain::Unit => vec![
            PiecewiseFn::step(domain, &[(Q::zero(), Q::new(1.into(), 2.into()), qi(1))], None)
                .expect("valid block")
                .into(),
            chi(domain, 0, Some(1)),
        ],
        Domain::HalfLine => vec![chi(domain, 0, Some(1)), chi(domain, 0, Some(10)), chi(domain, 1, Some(2))],
    }
}

/// Evaluate the defining integral of `C(|f|)(x)` by quadrature, independent
/// of `cesaro_apply`.
pub fn cesaro_by_quadrature(f: &Function, x: f64) -> f64 {
    match f {
        Function::Seq(s) => {
            let n = x.ceil().max(1.0) as u64;
            (1..=n).map(|k| s.eval(k).abs()).sum::<f64>() / n as f64
        }
        Function::Piecewise(g) => {
            let knots: Vec<f64> = g.breakpoints().iter().map(to_f64).collect();
            let q = integrate_knots(|t| g.eval(t).abs(), 0.0, x, &knots, 1e-15);
            q.value / x
        }
    }
}

/// `C(f*)` for a non-increasing `f*`; again non-increasing, so it is its own
/// rearrangement.
pub struct CesaroProfile<'a> {
    base: &'a dyn Profile,
    discrete: bool,
    measure: f64,
}

/// Terms summed exactly before switching to quadrature on the naturals.
const DIRECT_TERMS: u64 = 100_000;

impl<'a> CesaroProfile<'a> {
    pub fn new(base: &'a dyn Profile) -> CesaroProfile<'a> {
        let d = base.domain();
        CesaroProfile {
            base,
            discrete: d == Domain::Naturals,
            measure: d.measure(),
        }
    }

    fn average(&self, s: f64) -> f64 {
        if self.discrete {
            let n = s.floor() + 1.0;
            return self.base.primitive(n) / n;
        }
        if s <= 0.0 {
            return self.base.head();
        }
        self.base.primitive(s) / s
    }
}

impl<'a> Profile for CesaroProfile<'a> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn head(&self) -> f64 {
        if self.discrete {
            self.base.value(0.0)
        } else {
            self.base.head()
        }
    }

    fn tail(&self) -> f64 {
        if self.measure.is_finite() {
            0.0
        } else {
            self.base.tail()
        }
    }

    fn dist(&self, lam: f64) -> f64 {
        let lam = lam.max(0.0);
        if lam < self.tail() {
            return f64::INFINITY;
        }
        if lam >= self.head() {
            return 0.0;
        }
        if self.discrete {
            // Largest n with average(n - 1) > lam.
            let above = |n: u64| self.average(n as f64 - 1.0) > lam;
            let mut hi: u64 = 1;
            while above(hi) {
                hi = hi.saturating_mul(2);
                if hi > 1 << 62 {
                    return f64::INFINITY;
                }
            }
            let mut lo = hi / 2;
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if above(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return lo as f64;
        }
        if self.measure.is_finite() && self.average(self.measure) > lam {
            return self.measure;
        }
        let mut hi = 1.0f64.min(self.measure);
        while self.average(hi) > lam {
            hi *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
        let mut lo = 0.5 * hi;
        while self.average(lo) <= lam {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return 0.0;
            }
        }
        crate::numeric::bisect_last(|s| self.average(s) > lam, lo, hi, 200)
    }

    fn value(&self, s: f64) -> f64 {
        if s < 0.0 || s >= self.measure {
            return 0.0;
        }
        self.average(s)
    }

    fn excess(&self, lam: f64, p: f64, t: f64) -> f64 {
        let lam = lam.max(0.0);
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() && lam < self.tail() && self.measure.is_infinite() {
            return f64::INFINITY;
        }
        let u = t.min(self.dist(lam)).min(self.measure);
        if u <= 0.0 {
            return 0.0;
        }
        let g = |s: f64| {
            let v = self.average(s) - lam;
            if v > 0.0 {
                v.powf(p)
            } else {
                0.0
            }
        };
        if self.discrete {
            let whole = u.floor() as u64;
            let direct = whole.min(DIRECT_TERMS);
            let mut acc: f64 = (0..direct).map(|i| g(i as f64)).sum();
            if whole > direct {
                acc += integrate(g, direct as f64, whole as f64, 1e-14).value;
            }
            let frac = u - whole as f64;
            if frac > 0.0 {
                acc += frac * g(whole as f64);
            }
            return acc;
        }
        let knots = self.base.knots();
        integrate_knots(g, 0.0, u, &knots, 1e-14).value
    }

    fn levels(&self) -> Vec<f64> {
        let mut v = self.base.levels();
        v.push(self.tail());
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    fn knots(&self) -> Vec<f64> {
        self.base.knots()
    }
}

/// Exact rational partial sums `C_d(x)_n` for `n <= count`.
pub fn discrete_averages(x: &SeqFn, count: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(count);
    let mut sum = Q::zero();
    for n in 1..=count {
        let v = x.eval_exact(n as u64).unwrap_or_else(|| qf(x.eval(n as u64)));
        sum += v.abs();
        out.push(&sum / qi(n as i64));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurable_fn::chi;
    use crate::scalar::qr;
    use crate::spaces::SpaceSpec;

    #[test]
    fn image_of_unit_indicator() {
        let c = cesaro_apply(&chi(Domain::HalfLine, 0, Some(1))).unwrap();
        for x in [0.25, 0.5, 1.0, 2.0, 10.0] {
            assert!((c.eval(x) - 1f64.min(1.0 / x)).abs() < 1e-15);
        }
        let c = cesaro_apply(&chi(Domain::HalfLine, 3, None)).unwrap();
        for x in [1.0, 3.0, 4.0, 30.0] {
            assert!((c.eval(x) - (1.0 - 3.0 / x).max(0.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn discrete_image_of_unit_vector() {
        let c = cesaro_apply(&SeqFn::unit_vector(1).into()).unwrap();
        for n in 1..50u64 {
            assert!((c.eval(n as f64) - 1.0 / n as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn matches_quadrature_on_steps() {
        let f: Function = PiecewiseFn::step(
            Domain::HalfLine,
            &[(qi(0), qr(1, 2), qi(3)), (qr(1, 2), qi(2), qi(-1)), (qi(2), qi(5), qr(7, 4))],
            Some(qr(1, 3)),
        )
        .unwrap()
        .into();
        let c = cesaro_apply(&f).unwrap();
        for x in [0.1, 0.5, 0.7, 1.9, 2.0, 4.4, 6.0, 100.0] {
            let q = cesaro_by_quadrature(&f, x);
            assert!((c.eval(x) - q).abs() < 1e-12, "x = {x}: {} vs {q}", c.eval(x));
        }
    }

    #[test]
    fn image_of_power_and_hyperbolic_pieces() {
        let f: Function = PiecewiseFn::new(
            Domain::HalfLine,
            vec![Piece {
                lo: qi(0),
                hi: qi(1),
                formula: Formula::power(qr(1, 2), qr(-1, 2)),
            }],
            Tail::Formula(Formula::hyperbolic(qi(1), qi(0))),
        )
        .unwrap()
        .into();
        let c = cesaro_apply(&f).unwrap();
        for x in [0.01, 0.5, 1.0, 3.0, 50.0] {
            let q = cesaro_by_quadrature(&f, x);
            assert!((c.eval(x) - q).abs() < 1e-10, "x = {x}: {} vs {q}", c.eval(x));
        }
    }

    #[test]
    fn cesaro_norms() {
        let cfg = Config::default();
        let linf = SpaceSpec::linf(Domain::HalfLine);
        assert_eq!(cx_norm(&chi(Domain::HalfLine, 0, Some(1)), &linf, &cfg).unwrap().value, 1.0);
        let l2 = SpaceSpec::lp(Domain::Naturals, qi(2));
        let v = cx_norm(&SeqFn::unit_vector(1).into(), &l2, &cfg).unwrap();
        assert!((v.value - 1.282_549_830_161_864).abs() < 1e-9, "{v}");
        let l2h = SpaceSpec::lp(Domain::HalfLine, qi(2));
        let b = bound_probe(&l2h, &[chi(Domain::HalfLine, 0, Some(1))], &cfg).unwrap();
        assert!((b - 2f64.sqrt()).abs() < 1e-10);
        let l1 = SpaceSpec::lp(Domain::HalfLine, qi(1));
        let b = bound_probe(&l1, &[chi(Domain::HalfLine, 0, Some(1))], &cfg).unwrap();
        assert!(b.is_infinite());
    }

    #[test]
    fn limits_at_zero() {
        assert_eq!(c_at_zero(&chi(Domain::HalfLine, 0, Some(1))).unwrap(), 1.0);
        assert_eq!(c_at_zero(&chi(Domain::HalfLine, 1, Some(2))).unwrap(), 0.0);
    }
}
