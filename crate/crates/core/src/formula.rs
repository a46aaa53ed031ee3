//! Analytic piece formulas.
//!
//! Every piece of a function is one formula
//!
//! ```text
//! v(t) = k/t + c (t + s)^alpha + b + m ln(t)/t
//! ```
//!
//! The public kinds are special cases: `const` (only `b`), `hyp` (`k`, `b`),
//! `pow` (`c`, `alpha`, optional `s`). The `k/t` and `ln(t)/t` terms appear
//! when the Cesaro operator is applied to power and hyperbolic pieces.

use crate::numeric;
use crate::scalar::{to_f64, Q};
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq)]
pub struct Formula {
    pub k: Q,
    pub c: Q,
    pub alpha: Q,
    pub shift: Q,
    pub b: Q,
    pub m: Q,
}

impl Formula {
    pub fn constant(v: Q) -> Self {
        Formula {
            k: Q::zero(),
            c: Q::zero(),
            alpha: Q::zero(),
            shift: Q::zero(),
            b: v,
            m: Q::zero(),
        }
    }

    pub fn hyperbolic(a: Q, b: Q) -> Self {
        Formula {
            k: a,
            ..Formula::constant(b)
        }
    }

    pub fn power(c: Q, alpha: Q) -> Self {
        Formula {
            c,
            alpha,
            ..Formula::constant(Q::zero())
        }
    }

    pub fn shifted_power(c: Q, alpha: Q, shift: Q) -> Self {
        Formula {
            c,
            alpha,
            shift,
            ..Formula::constant(Q::zero())
        }
    }

    /// The constant value if the formula does not depend on `t`.
    pub fn as_const(&self) -> Option<Q> {
        if !self.k.is_zero() || !self.m.is_zero() {
            return None;
        }
        if self.c.is_zero() {
            return Some(self.b.clone());
        }
        if self.alpha.is_zero() {
            return Some(&self.b + &self.c);
        }
        None
    }

    pub fn is_const(&self) -> bool {
        self.as_const().is_some()
    }

    /// Short kind name used in literals.
    pub fn kind_name(&self) -> &'static str {
        if self.is_const() {
            "const"
        } else if self.c.is_zero() && self.m.is_zero() {
            "hyp"
        } else if self.k.is_zero() && self.m.is_zero() && self.b.is_zero() {
            "pow"
        } else {
            "expr"
        }
    }

    pub fn scale(&self, factor: &Q) -> Formula {
        Formula {
            k: &self.k * factor,
            c: &self.c * factor,
            alpha: self.alpha.clone(),
            shift: self.shift.clone(),
            b: &self.b * factor,
            m: &self.m * factor,
        }
    }

    pub fn term(&self) -> Term {
        let mut t = Term {
            k: to_f64(&self.k),
            c: to_f64(&self.c),
            alpha: to_f64(&self.alpha),
            shift: to_f64(&self.shift),
            b: to_f64(&self.b),
            m: to_f64(&self.m),
        };
        if t.c != 0.0 && t.alpha == 0.0 {
            t.b += t.c;
            t.c = 0.0;
        }
        t
    }

    /// Exact value at a rational point where possible.
    pub fn eval_exact(&self, t: &Q) -> Option<Q> {
        if let Some(v) = self.as_const() {
            return Some(v);
        }
        if !self.m.is_zero() {
            return None;
        }
        let mut v = self.b.clone();
        if !self.k.is_zero() {
            if t.is_zero() {
                return None;
            }
            v += &self.k / t;
        }
        if !self.c.is_zero() {
            v += &self.c * int_power(&(t + &self.shift), &self.alpha)?;
        }
        Some(v)
    }

    /// Exact antiderivative `G(t)` where it stays rational.
    pub fn antiderivative_exact(&self, t: &Q) -> Option<Q> {
        if !self.k.is_zero() || !self.m.is_zero() {
            return None;
        }
        let mut g = &self.b * t;
        if !self.c.is_zero() {
            let e = &self.alpha + Q::one();
            if e.is_zero() {
                return None;
            }
            let u = t + &self.shift;
            if u.is_zero() && e.is_negative() {
                return None;
            }
            g += &self.c * int_power(&u, &e)? / e;
        }
        Some(g)
    }
}

/// `x^e` for integral `e`, exact.
fn int_power(x: &Q, e: &Q) -> Option<Q> {
    if !e.is_integer() {
        return None;
    }
    let n = e.to_integer().to_i32()?;
    if n < 0 && x.is_zero() {
        return None;
    }
    if n.unsigned_abs() > 64 {
        return None;
    }
    let mut r = Q::one();
    for _ in 0..n.unsigned_abs() {
        r *= x;
    }
    Some(if n < 0 { Q::one() / r } else { r })
}

/// Floating point view of a formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub k: f64,
    pub c: f64,
    pub alpha: f64,
    pub shift: f64,
    pub b: f64,
    pub m: f64,
}

impl Term {
    pub fn constant(v: f64) -> Term {
        Term {
            k: 0.0,
            c: 0.0,
            alpha: 0.0,
            shift: 0.0,
            b: v,
            m: 0.0,
        }
    }

    pub fn is_const(&self) -> bool {
        self.k == 0.0 && self.m == 0.0 && (self.c == 0.0 || self.alpha == 0.0)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut v = self.b;
        if self.k != 0.0 {
            v += self.k / t;
        }
        if self.c != 0.0 {
            v += self.c * (t + self.shift).powf(self.alpha);
        }
        if self.m != 0.0 {
            v += self.m * t.ln() / t;
        }
        v
    }

    pub fn deriv(&self, t: f64) -> f64 {
        let mut d = 0.0;
        if self.k != 0.0 {
            d -= self.k / (t * t);
        }
        if self.c != 0.0 && self.alpha != 0.0 {
            d += self.c * self.alpha * (t + self.shift).powf(self.alpha - 1.0);
        }
        if self.m != 0.0 {
            d += self.m * (1.0 - t.ln()) / (t * t);
        }
        d
    }

    /// `sign * v(t) - shift`, as a term.
    pub fn affine(&self, sign: f64, offset: f64) -> Term {
        let mut b = sign * self.b - offset;
        if b.abs() <= 1e-15 * (self.b.abs().max(offset.abs())) {
            b = 0.0;
        }
        Term {
            k: sign * self.k,
            c: sign * self.c,
            alpha: self.alpha,
            shift: self.shift,
            b,
            m: sign * self.m,
        }
    }

    /// Limit as `t` decreases to `lo` (which may be 0).
    pub fn limit_at(&self, lo: f64) -> f64 {
        if lo > 0.0 && lo.is_finite() && lo + self.shift > 0.0 {
            return self.eval(lo);
        }
        if lo.is_infinite() {
            return self.limit_at_infinity();
        }
        // lo == 0 or lo + shift == 0.
        let mut v = self.b;
        if lo == 0.0 {
            if self.k != 0.0 {
                return self.k.signum() * f64::INFINITY;
            }
            if self.m != 0.0 {
                return -self.m.signum() * f64::INFINITY;
            }
        } else {
            if self.k != 0.0 {
                v += self.k / lo;
            }
            if self.m != 0.0 {
                v += self.m * lo.ln() / lo;
            }
        }
        if self.c != 0.0 {
            let u = lo + self.shift;
            if u > 0.0 {
                v += self.c * u.powf(self.alpha);
            } else if self.alpha < 0.0 {
                return self.c.signum() * f64::INFINITY;
            } else if self.alpha == 0.0 {
                v += self.c;
            }
        }
        v
    }

    pub fn limit_at_infinity(&self) -> f64 {
        let mut v = self.b;
        if self.c != 0.0 {
            if self.alpha > 0.0 {
                return self.c.signum() * f64::INFINITY;
            }
            if self.alpha == 0.0 {
                v += self.c;
            }
        }
        v
    }

    /// Value at an end of `(lo, hi)` including limits.
    pub fn end_value(&self, x: f64) -> f64 {
        if x.is_infinite() {
            self.limit_at_infinity()
        } else {
            self.limit_at(x)
        }
    }

    /// True when the term is monotone on every interval inside its domain.
    pub fn is_simple(&self) -> bool {
        let parts = [self.k != 0.0, self.c != 0.0 && self.alpha != 0.0, self.m != 0.0]
            .iter()
            .filter(|x| **x)
            .count();
        parts <= 1 && self.m == 0.0
    }

    /// Interior points of `(lo, hi)` where the derivative changes sign.
    pub fn critical_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_const() || self.is_simple() {
            return Vec::new();
        }
        sign_changes(|t| self.deriv(t), lo, hi)
    }

    /// Interior zero crossings of the value.
    pub fn zero_crossings(&self, lo: f64, hi: f64) -> Vec<f64> {
        if self.is_const() {
            return Vec::new();
        }
        sign_changes(|t| self.eval(t), lo, hi)
    }

    /// Solve `v(t) = lam` on a monotone interval `(lo, hi)`, clamped to it.
    pub fn inverse(&self, lam: f64, lo: f64, hi: f64, increasing: bool) -> f64 {
        let only_k = self.c == 0.0 && self.m == 0.0 && self.k != 0.0;
        let only_c = self.k == 0.0 && self.m == 0.0 && self.c != 0.0 && self.alpha != 0.0;
        let guess = if only_k {
            Some(self.k / (lam - self.b))
        } else if only_c {
            let r = (lam - self.b) / self.c;
            if r > 0.0 {
                Some(r.powf(1.0 / self.alpha) - self.shift)
            } else if r == 0.0 && self.alpha > 0.0 {
                Some(-self.shift)
            } else if r == 0.0 {
                Some(f64::INFINITY)
            } else {
                None
            }
        } else {
            None
        };
        if let Some(g) = guess {
            if g.is_nan() {
                return if increasing { hi } else { lo };
            }
            return g.clamp(lo, hi);
        }
        // Bisection on a monotone function.
        let mut hi_f = hi;
        if hi.is_infinite() {
            hi_f = lo.max(1.0);
            let mut n = 0;
            while (self.eval(hi_f) > lam) != increasing && n < 2000 {
                hi_f *= 2.0;
                n += 1;
            }
            if (self.eval(hi_f) > lam) != increasing {
                return f64::INFINITY;
            }
        }
        let lo_f = if lo == 0.0 { hi_f.min(1.0) * 1e-300 } else { lo };
        // Find the last point where (v > lam) matches the left-end state.
        let left_above = !increasing;
        numeric::bisect_last(|t| (self.eval(t) > lam) == left_above, lo_f, hi_f, 300)
    }

    /// `int_lo^hi v(t) dt`, with divergence reported as `+-inf`.
    pub fn integral(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let mut parts: Vec<f64> = Vec::with_capacity(4);
        if self.k != 0.0 {
            parts.push(if lo == 0.0 || hi.is_infinite() {
                self.k.signum() * f64::INFINITY
            } else {
                self.k * (hi / lo).ln()
            });
        }
        if self.c != 0.0 {
            let (u0, u1) = (lo + self.shift, hi + self.shift);
            parts.push(self.c * power_integral(self.alpha, u0, u1));
        }
        if self.b != 0.0 {
            parts.push(if hi.is_infinite() {
                self.b.signum() * f64::INFINITY
            } else {
                self.b * (hi - lo)
            });
        }
        if self.m != 0.0 {
            let l2 = |x: f64| {
                let l = x.ln();
                0.5 * l * l
            };
            parts.push(if lo == 0.0 {
                -self.m.signum() * f64::INFINITY
            } else if hi.is_infinite() {
                self.m.signum() * f64::INFINITY
            } else {
                self.m * (l2(hi) - l2(lo))
            });
        }
        combine_divergent(&parts)
    }

    /// `int_lo^hi (v(t))^p dt` for a term that is nonnegative on `(lo, hi)`.
    pub fn integral_pow(&self, lo: f64, hi: f64, p: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        if p == 1.0 {
            return self.integral(lo, hi).max(0.0);
        }
        if self.is_const() {
            let v = self.eval(1.0).max(0.0);
            if v == 0.0 {
                return 0.0;
            }
            return if hi.is_infinite() { f64::INFINITY } else { v.powf(p) * (hi - lo) };
        }
        if p.fract() == 0.0 && p <= 6.0 {
            if let Some(v) = self.monomial_power_integral(lo, hi, p as u32) {
                return v.max(0.0);
            }
        }
        let f = |t: f64| {
            let v = self.eval(t).max(0.0);
            v.powf(p)
        };
        let q = numeric::integrate(f, lo, hi, 1e-13);
        q.value
    }

    fn monomial_power_integral(&self, lo: f64, hi: f64, p: u32) -> Option<f64> {
        if self.m != 0.0 {
            return None;
        }
        if self.k != 0.0 && self.c != 0.0 && self.shift != 0.0 {
            return None;
        }
        let s = if self.c != 0.0 { self.shift } else { 0.0 };
        let mut base: Vec<(f64, f64)> = Vec::new();
        if self.k != 0.0 {
            base.push((self.k, -1.0));
        }
        if self.c != 0.0 {
            base.push((self.c, self.alpha));
        }
        if self.b != 0.0 {
            base.push((self.b, 0.0));
        }
        let base = merge_monomials(base);
        let mut acc = vec![(1.0, 0.0)];
        for _ in 0..p {
            let mut next = Vec::with_capacity(acc.len() * base.len());
            for &(a1, e1) in &acc {
                for &(a2, e2) in &base {
                    next.push((a1 * a2, e1 + e2));
                }
            }
            acc = merge_monomials(next);
        }
        let (u0, u1) = (lo + s, hi + s);
        let parts: Vec<f64> = acc.iter().map(|&(a, e)| a * power_integral(e, u0, u1)).collect();
        Some(combine_divergent(&parts))
    }
}

fn merge_monomials(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (a, e) in v {
        match out.last_mut() {
            Some(last) if (last.1 - e).abs() < 1e-12 => last.0 += a,
            _ => out.push((a, e)),
        }
    }
    out.retain(|m| m.0 != 0.0);
    out
}

/// `int_u0^u1 u^e du` with `0 <= u0 < u1 <= inf`.
fn power_integral(e: f64, u0: f64, u1: f64) -> f64 {
    if e == -1.0 {
        if u0 <= 0.0 || u1.is_infinite() {
            return f64::INFINITY;
        }
        return (u1 / u0).ln();
    }
    let q = e + 1.0;
    let top = if u1.is_infinite() {
        if q < 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        }
    } else {
        u1.powf(q)
    };
    let bottom = if u0 <= 0.0 {
        if q > 0.0 {
            0.0
        } else {
            return f64::INFINITY;
        }
    } else {
        u0.powf(q)
    };
    (top - bottom) / q
}

/// Sum of parts where some may be infinite; opposite infinities resolve to
/// `+inf` because every caller integrates a nonnegative quantity.
fn combine_divergent(parts: &[f64]) -> f64 {
    let pos = parts.contains(&f64::INFINITY);
    let neg = parts.contains(&f64::NEG_INFINITY);
    match (pos, neg) {
        (true, _) => f64::INFINITY,
        (false, true) => f64::NEG_INFINITY,
        _ => parts.iter().sum(),
    }
}

/// Sign changes of `g` on `(lo, hi)` located by a log-spaced scan and bisection.
pub(crate) fn sign_changes<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64) -> Vec<f64> {
    let a = if lo > 0.0 { lo } else { hi.min(1.0) * 1e-12 };
    let b = if hi.is_finite() { hi } else { a.max(1.0) * 1e12 };
    if !(b > a) {
        return Vec::new();
    }
    const N: usize = 400;
    let geometric = b / a > 100.0;
    let point = |i: usize| {
        let f = i as f64 / N as f64;
        if geometric {
            a * (b / a).powf(f)
        } else {
            a + (b - a) * f
        }
    };
    let mut out = Vec::new();
    let mut prev_x = point(0);
    let mut prev = g(prev_x);
    for i in 1..=N {
        let x = point(i);
        let v = g(x);
        if prev != 0.0 && v != 0.0 && (prev > 0.0) != (v > 0.0) {
            let r = numeric::bisect_root(&g, prev_x, x);
            if r > lo && r < hi {
                out.push(r);
            }
        }
        if v != 0.0 {
            prev = v;
            prev_x = x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{qi, qr};

    #[test]
    fn hyperbolic_integral_and_inverse() {
        let t = Formula::hyperbolic(qi(1), qi(0)).term();
        assert!((t.integral(1.0, std::f64::consts::E) - 1.0).abs() < 1e-15);
        assert_eq!(t.integral(1.0, f64::INFINITY), f64::INFINITY);
        assert!((t.inverse(0.5, 1.0, f64::INFINITY, false) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_of_hyperbolic_has_closed_form() {
        let t = Formula::hyperbolic(qi(1), qi(0)).term();
        assert!((t.integral_pow(1.0, f64::INFINITY, 2.0) - 1.0).abs() < 1e-15);
        // (1/t - 1/2)^2 on (1, 2)
        let u = t.affine(1.0, 0.5);
        let exact = 0.5 - 2.0f64.ln() + 0.25;
        assert!((u.integral_pow(1.0, 2.0, 2.0) - exact).abs() < 1e-14);
    }

    #[test]
    fn power_integral_with_singularity() {
        let t = Formula::power(qr(1, 2), qr(-1, 2)).term();
        assert!((t.integral(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(t.integral_pow(0.0, 1.0, 2.0), f64::INFINITY);
    }

    #[test]
    fn shifted_power_gives_flat_generator() {
        // t/(1+t) = 1 - (t+1)^-1
        let f = Formula {
            c: qi(-1),
            alpha: qi(-1),
            shift: qi(1),
            ..Formula::constant(qi(1))
        };
        let t = f.term();
        assert!((t.eval(3.0) - 0.75).abs() < 1e-15);
        assert!((t.deriv(3.0) - 1.0 / 16.0).abs() < 1e-15);
        assert_eq!(t.limit_at_infinity(), 1.0);
        assert_eq!(t.limit_at(0.0), 0.0);
    }

    #[test]
    fn critical_points_of_mixed_term() {
        // 1/t + t has a minimum at t = 1.
        let t = Term {
            k: 1.0,
            c: 1.0,
            alpha: 1.0,
            shift: 0.0,
            b: 0.0,
            m: 0.0,
        };
        let cps = t.critical_points(0.01, 100.0);
        assert_eq!(cps.len(), 1);
        assert!((cps[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_antiderivative() {
        let f = Formula::power(qi(3), qi(2));
        assert_eq!(f.antiderivative_exact(&qi(2)), Some(qi(8)));
        assert_eq!(Formula::hyperbolic(qi(1), qi(0)).antiderivative_exact(&qi(2)), None);
    }
}
