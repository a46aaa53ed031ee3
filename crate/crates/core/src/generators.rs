//! Quasi-concave fundamental functions `phi` and Orlicz functions `F`.

use crate::error::{Error, Result};
use crate::formula::{Formula, Term};
use crate::measurable_fn::{check_formula_on, Domain, Piece, PiecewiseFn, Tail};
use crate::scalar::{qi, qr, to_f64, Ext, Q};
use num_traits::{One, Zero};

/// A formula on `(lo, hi)`; `hi` may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct GenPiece {
    pub lo: Q,
    pub hi: Ext,
    pub formula: Formula,
}

impl GenPiece {
    fn hi_f64(&self) -> f64 {
        self.hi.to_f64()
    }
}

fn bad<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidGenerator(msg.into()))
}

fn check_pieces(pieces: &[GenPiece], end: &Ext) -> Result<()> {
    if pieces.is_empty() {
        return bad("generator needs at least one piece");
    }
    let mut at = Q::zero();
    for (i, p) in pieces.iter().enumerate() {
        if p.lo != at {
            return bad("generator pieces must be contiguous from 0");
        }
        let hi = p.hi.finite();
        if hi.is_none() && i + 1 != pieces.len() {
            return bad("only the last generator piece may be unbounded");
        }
        check_formula_on(&p.formula, &p.lo, hi).map_err(|e| Error::InvalidGenerator(e.to_string()))?;
        if let Some(h) = hi {
            at = h.clone();
        }
    }
    if pieces.last().map(|p| &p.hi) != Some(end) {
        return bad(format!("generator pieces must end at {end}"));
    }
    Ok(())
}

fn locate(pieces: &[GenPiece], x: f64) -> Option<&GenPiece> {
    pieces.iter().find(|p| x < p.hi_f64()).or(pieces.last())
}

/// Sample points for structural checks: a log grid plus both sides of every
/// breakpoint.
fn sample_points(pieces: &[GenPiece], lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..=160).map(|i| 10f64.powf(-8.0 + 16.0 * i as f64 / 160.0)).collect();
    for p in pieces {
        let b = p.hi_f64();
        if b.is_finite() {
            v.extend([b * (1.0 - 1e-9), b, b * (1.0 + 1e-9)]);
        }
    }
    v.retain(|x| *x > lo && *x < hi);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// Quasi-concave `phi` on `(0, inf)` or `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuasiConcaveFn {
    pub pieces: Vec<GenPiece>,
    pub phi0: Q,
    pub phi_inf: Ext,
    pub domain: Domain,
}

impl QuasiConcaveFn {
    pub fn new(pieces: Vec<GenPiece>, phi0: Q, phi_inf: Ext, domain: Domain) -> Result<Self> {
        let f = QuasiConcaveFn {
            pieces,
            phi0,
            phi_inf,
            domain,
        };
        f.validate()?;
        Ok(f)
    }

    fn end(domain: Domain) -> Ext {
        match domain {
            Domain::Unit => Ext::Finite(Q::one()),
            _ => Ext::Infinite,
        }
    }

    /// `t^theta` for `0 < theta <= 1`.
    pub fn power(theta: Q) -> QuasiConcaveFn {
        let inf = if theta.is_zero() { Ext::Finite(Q::one()) } else { Ext::Infinite };
        QuasiConcaveFn {
            pieces: vec![GenPiece {
                lo: Q::zero(),
                hi: Ext::Infinite,
                formula: Formula::power(Q::one(), theta),
            }],
            phi0: Q::zero(),
            phi_inf: inf,
            domain: Domain::HalfLine,
        }
    }

    pub fn sqrt() -> QuasiConcaveFn {
        QuasiConcaveFn::power(qr(1, 2))
    }

    /// `min(t, 1)`.
    pub fn min_one() -> QuasiConcaveFn {
        QuasiConcaveFn {
            pieces: vec![
                GenPiece {
                    lo: Q::zero(),
                    hi: Ext::Finite(Q::one()),
                    formula: Formula::power(Q::one(), Q::one()),
                },
                GenPiece {
                    lo: Q::one(),
                    hi: Ext::Infinite,
                    formula: Formula::constant(Q::one()),
                },
            ],
            phi0: Q::zero(),
            phi_inf: Ext::Finite(Q::one()),
            domain: Domain::HalfLine,
        }
    }

    /// `t/(1+t)`, written as `1 - (t+1)^-1`.
    pub fn flat() -> QuasiConcaveFn {
        QuasiConcaveFn {
            pieces: vec![GenPiece {
                lo: Q::zero(),
                hi: Ext::Infinite,
                formula: Formula {
                    c: qi(-1),
                    alpha: qi(-1),
                    shift: qi(1),
                    ..Formula::constant(qi(1))
                },
            }],
            phi0: Q::zero(),
            phi_inf: Ext::Finite(Q::one()),
            domain: Domain::HalfLine,
        }
    }

    pub fn on_domain(mut self, domain: Domain) -> Result<QuasiConcaveFn> {
        if domain == Domain::Unit {
            let one = Q::one();
            let mut kept = Vec::new();
            for mut p in self.pieces {
                if p.lo >= one {
                    break;
                }
                let cut = match &p.hi {
                    Ext::Finite(h) => h > &one,
                    Ext::Infinite => true,
                };
                if cut {
                    p.hi = Ext::Finite(one.clone());
                }
                kept.push(p);
            }
            self.pieces = kept;
            let v1 = self.eval_end();
            self.phi_inf = Ext::Finite(crate::scalar::qf(v1));
        }
        self.domain = domain;
        self.validate()?;
        Ok(self)
    }

    fn eval_end(&self) -> f64 {
        let last = self.pieces.last().expect("piece");
        last.formula.term().end_value(last.hi_f64())
    }

    pub fn validate(&self) -> Result<()> {
        check_pieces(&self.pieces, &Self::end(self.domain))?;
        let first = &self.pieces[0];
        let lim0 = first.formula.term().limit_at(0.0);
        let phi0 = to_f64(&self.phi0);
        if !(phi0 >= 0.0) || (lim0 - phi0).abs() > 1e-6 * phi0.abs().max(1.0) {
            return bad(format!("stored phi(0+) = {phi0} but the pieces give {lim0}"));
        }
        let end = self.eval_end();
        let inf = self.phi_inf.to_f64();
        let agree = if end.is_infinite() || inf.is_infinite() {
            end == inf
        } else {
            (end - inf).abs() <= 1e-6 * inf.abs().max(1.0)
        };
        if !agree {
            return bad(format!("stored phi(inf) = {inf} but the pieces give {end}"));
        }
        if !(inf > 0.0) {
            return bad("phi(inf) must be positive");
        }
        let hi = if self.domain == Domain::Unit { 1.0 } else { f64::INFINITY };
        let pts = sample_points(&self.pieces, 0.0, hi);
        let mut prev: Option<(f64, f64)> = None;
        for &t in &pts {
            let v = self.eval(t);
            if !(v >= 0.0) || !v.is_finite() {
                return bad(format!("phi({t}) = {v} is not a finite nonnegative number"));
            }
            if let Some((pt, pv)) = prev {
                let slack = 1e-12 * pv.max(1e-300);
                if v < pv - slack {
                    return bad(format!("phi decreases between {pt} and {t}"));
                }
                if v / t > pv / pt * (1.0 + 1e-6) + 1e-300 {
                    return bad(format!("phi(t)/t increases between {pt} and {t}"));
                }
            }
            prev = Some((t, v));
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t.is_infinite() {
            return self.phi_inf.to_f64();
        }
        if self.domain == Domain::Unit && t >= 1.0 {
            return self.eval_end();
        }
        let p = locate(&self.pieces, t).expect("piece");
        p.formula.term().eval(t)
    }

    /// `(phi(0+), phi(inf))`.
    pub fn limits(&self) -> (f64, f64) {
        (to_f64(&self.phi0), self.phi_inf.to_f64())
    }

    /// Concave on `(0, inf)` and increasing, as the Lorentz construction needs.
    pub fn is_concave(&self) -> bool {
        let hi = if self.domain == Domain::Unit { 1.0 } else { f64::INFINITY };
        let pts = sample_points(&self.pieces, 0.0, hi);
        for w in pts.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (fa, fb, fc) = (self.eval(a), self.eval(b), self.eval(c));
            let chord = fa + (fc - fa) * (b - a) / (c - a);
            if fb < chord - 1e-9 * fb.abs() - 1e-15 * self.limits().1.min(1.0) {
                return false;
            }
        }
        // phi is constant past its last sample only if phi(inf) is finite;
        // strictly increasing is not required by the layer-cake norm.
        true
    }

    /// Breakpoints of the pieces.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.pieces.iter().map(|p| p.hi_f64()).filter(|x| x.is_finite()).collect()
    }

    /// Almost-everywhere derivative.
    pub fn derivative(&self) -> Result<PiecewiseFn> {
        let mut pieces = Vec::new();
        let mut tail = Tail::Zero;
        for p in &self.pieces {
            let d = derivative_formula(&p.formula)?;
            match &p.hi {
                Ext::Finite(h) => pieces.push(Piece {
                    lo: p.lo.clone(),
                    hi: h.clone(),
                    formula: d,
                }),
                Ext::Infinite => {
                    if p.lo.is_zero() {
                        // The whole half line is one piece; split at 1 so the
                        // tail starts away from 0.
                        pieces.push(Piece {
                            lo: Q::zero(),
                            hi: Q::one(),
                            formula: d.clone(),
                        });
                    }
                    tail = Tail::Formula(d);
                }
            }
        }
        let domain = if self.domain == Domain::Unit { Domain::Unit } else { Domain::HalfLine };
        PiecewiseFn::new(domain, pieces, tail).map_err(|e| Error::InvalidGenerator(e.to_string()))
    }
}

fn derivative_formula(f: &Formula) -> Result<Formula> {
    if !f.m.is_zero() {
        return Err(Error::Unsupported("derivative of ln(t)/t pieces".into()));
    }
    let has_k = !f.k.is_zero();
    let has_c = !f.c.is_zero() && !f.alpha.is_zero();
    match (has_k, has_c) {
        (false, false) => Ok(Formula::constant(Q::zero())),
        (true, false) => Ok(Formula::power(-f.k.clone(), qi(-2))),
        (false, true) => Ok(Formula::shifted_power(
            &f.c * &f.alpha,
            &f.alpha - Q::one(),
            f.shift.clone(),
        )),
        (true, true) => Err(Error::Unsupported(
            "derivative of a piece mixing a/t and power terms".into(),
        )),
    }
}

/// Regime of a Delta_2 probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    AtZero,
    AtInfinity,
}

/// Orlicz function on `[0, b_F)`, `+inf` beyond `b_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrliczFn {
    pub pieces: Vec<GenPiece>,
    pub b_f: Ext,
    pub value_at_bf: Ext,
}

impl OrliczFn {
    pub fn new(pieces: Vec<GenPiece>, b_f: Ext, value_at_bf: Ext) -> Result<Self> {
        let f = OrliczFn {
            pieces,
            b_f,
            value_at_bf,
        };
        f.validate()?;
        Ok(f)
    }

    /// `x^p`.
    pub fn power(p: Q) -> OrliczFn {
        OrliczFn {
            pieces: vec![GenPiece {
                lo: Q::zero(),
                hi: Ext::Infinite,
                formula: Formula::power(Q::one(), p),
            }],
            b_f: Ext::Infinite,
            value_at_bf: Ext::Infinite,
        }
    }

    /// 0 on `[0, 1]`, `+inf` beyond; generates `L_inf`.
    pub fn f_inf() -> OrliczFn {
        OrliczFn {
            pieces: vec![GenPiece {
                lo: Q::zero(),
                hi: Ext::Finite(Q::one()),
                formula: Formula::constant(Q::zero()),
            }],
            b_f: Ext::Finite(Q::one()),
            value_at_bf: Ext::Finite(Q::zero()),
        }
    }

    /// `x^p` on `[0, 1]`, `+inf` beyond; generates `L_p` intersected with `L_inf`.
    pub fn f_p_inf(p: Q) -> OrliczFn {
        OrliczFn {
            pieces: vec![GenPiece {
                lo: Q::zero(),
                hi: Ext::Finite(Q::one()),
                formula: Formula::power(Q::one(), p),
            }],
            b_f: Ext::Finite(Q::one()),
            value_at_bf: Ext::Finite(Q::one()),
        }
    }

    /// The exponent when `F(x) = x^p` on the whole half line.
    pub fn as_power(&self) -> Option<f64> {
        if self.b_f.is_infinite() && self.pieces.len() == 1 {
            let f = &self.pieces[0].formula;
            if f.k.is_zero() && f.m.is_zero() && f.b.is_zero() && f.shift.is_zero() && f.c == Q::one() {
                return Some(to_f64(&f.alpha));
            }
        }
        None
    }

    pub fn validate(&self) -> Result<()> {
        check_pieces(&self.pieces, &self.b_f)?;
        let f0 = self.pieces[0].formula.term().limit_at(0.0);
        if f0 != 0.0 {
            return bad(format!("F(0+) = {f0}, expected 0"));
        }
        let hi = self.b_f.to_f64();
        let mut pts: Vec<f64> = sample_points(&self.pieces, 0.0, hi);
        pts.insert(0, 0.0);
        let mut prev: f64 = 0.0;
        for w in pts.windows(2) {
            let v = self.eval(w[1]);
            if !(v >= prev - 1e-12 * prev.abs()) {
                return bad(format!("F decreases near {}", w[1]));
            }
            let mid = 0.5 * (w[0] + w[1]);
            if self.eval(mid) > 0.5 * (self.eval(w[0]) + v) * (1.0 + 1e-10) + 1e-300 {
                return bad(format!("F is not convex near {mid}"));
            }
            prev = v;
        }
        for w in pts.windows(3).step_by(3) {
            let (a, c) = (w[0], w[2]);
            let mid = 0.5 * (a + c);
            if self.eval(mid) > 0.5 * (self.eval(a) + self.eval(c)) * (1.0 + 1e-10) + 1e-300 {
                return bad(format!("F is not convex near {mid}"));
            }
        }
        if let (Ext::Finite(_), Ext::Finite(v)) = (&self.b_f, &self.value_at_bf) {
            let left = self.eval(hi * (1.0 - 1e-12));
            if to_f64(v) < left - 1e-9 * left.abs().max(1.0) {
                return bad("F(b_F) is below its left limit");
            }
        }
        Ok(())
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let bf = self.b_f.to_f64();
        if x > bf {
            return f64::INFINITY;
        }
        if x == bf {
            return self.value_at_bf.to_f64();
        }
        let p = locate(&self.pieces, x).expect("piece");
        p.formula.term().eval(x).max(0.0)
    }

    /// `sup { x in [0, b_F] : F(x) <= u }`.
    pub fn inverse_upper(&self, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let bf = self.b_f.to_f64();
        if bf.is_finite() && self.value_at_bf.to_f64() <= u {
            return bf;
        }
        if u.is_infinite() {
            return bf;
        }
        for p in self.pieces.iter().rev() {
            let lo = to_f64(&p.lo);
            let hi = p.hi_f64();
            let t: Term = p.formula.term();
            let vlo = t.limit_at(lo);
            if vlo > u {
                continue;
            }
            let vhi = t.end_value(hi);
            if vhi <= u {
                return hi;
            }
            return t.inverse(u, lo, hi, true);
        }
        0.0
    }

    /// Largest `x` with `F(x) = 0`.
    pub fn zero_end(&self) -> f64 {
        self.inverse_upper(0.0)
    }

    pub fn vanishes_only_at_zero(&self) -> bool {
        self.zero_end() == 0.0
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.pieces.iter().map(|p| p.hi_f64()).filter(|x| x.is_finite()).collect();
        let z = self.zero_end();
        if z > 0.0 && z.is_finite() {
            v.push(z);
        }
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v
    }

    /// `sup F(2x)/F(x)` over a dyadic grid in the given regime. A lower bound
    /// for the true supremum, not a decision.
    pub fn delta2_probe(&self, regime: Regime, grid: Option<&[f64]>) -> f64 {
        let default: Vec<f64> = (1..=40)
            .map(|k| match regime {
                Regime::AtZero => 2f64.powi(-k),
                Regime::AtInfinity => 2f64.powi(k),
            })
            .collect();
        let grid = grid.unwrap_or(&default);
        let mut best: f64 = 0.0;
        for &x in grid {
            let fx = self.eval(x);
            if fx <= 0.0 {
                continue;
            }
            let r = self.eval(2.0 * x) / fx;
            best = best.max(r);
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_limits_and_values() {
        let s = QuasiConcaveFn::sqrt();
        assert_eq!(s.limits(), (0.0, f64::INFINITY));
        let f = QuasiConcaveFn::flat();
        assert_eq!(f.limits(), (0.0, 1.0));
        let m = QuasiConcaveFn::min_one();
        assert_eq!(m.eval(2.0), 1.0);
        assert_eq!(m.eval(0.5), 0.5);
        for g in [s, f, m] {
            g.validate().unwrap();
            assert!(g.is_concave());
        }
    }

    #[test]
    fn rejects_contradicting_limits() {
        let mut f = QuasiConcaveFn::flat();
        f.phi_inf = Ext::Finite(qi(2));
        assert!(f.validate().is_err());
        // t^2 is not quasi-concave.
        let mut p = QuasiConcaveFn::power(qi(2));
        p.phi_inf = Ext::Infinite;
        assert!(p.validate().is_err());
    }

    #[test]
    fn derivatives() {
        let d = QuasiConcaveFn::sqrt().derivative().unwrap();
        assert!((d.eval(4.0) - 0.25).abs() < 1e-15);
        let d = QuasiConcaveFn::min_one().derivative().unwrap();
        assert_eq!(d.eval(0.5), 1.0);
        assert_eq!(d.eval(2.0), 0.0);
        let d = QuasiConcaveFn::flat().derivative().unwrap();
        for t in [0.1, 1.0, 3.0, 50.0] {
            let fd = {
                let h = 1e-6 * t;
                let f = QuasiConcaveFn::flat();
                (f.eval(t + h) - f.eval(t - h)) / (2.0 * h)
            };
            assert!((d.eval(t) - fd).abs() <= 1e-6 * fd);
            assert!((d.eval(t) - 1.0 / ((1.0 + t) * (1.0 + t))).abs() < 1e-15);
        }
    }

    #[test]
    fn orlicz_values_and_inverse() {
        let sq = OrliczFn::power(qi(2));
        assert_eq!(sq.eval(3.0), 9.0);
        assert!((sq.inverse_upper(4.0) - 2.0).abs() < 1e-15);
        assert_eq!(sq.delta2_probe(Regime::AtInfinity, None), 4.0);
        let fi = OrliczFn::f_inf();
        assert_eq!(fi.eval(2.0), f64::INFINITY);
        assert_eq!(fi.eval(0.5), 0.0);
        assert_eq!(fi.inverse_upper(0.0), 1.0);
        assert!(!fi.vanishes_only_at_zero());
        let fp = OrliczFn::f_p_inf(qi(2));
        assert_eq!(fp.eval(1.0), 1.0);
        assert_eq!(fp.inverse_upper(5.0), 1.0);
        assert!((fp.inverse_upper(0.25) - 0.5).abs() < 1e-15);
        for f in [sq, fi, fp] {
            f.validate().unwrap();
        }
    }

    #[test]
    fn rejects_concave_orlicz() {
        let f = OrliczFn::power(qr(1, 2));
        assert!(f.validate().is_err());
    }
}
