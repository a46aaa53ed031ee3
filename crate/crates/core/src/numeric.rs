//! Quadrature, one dimensional search and a few special sums.

pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Integral with an error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quad {
    pub value: f64,
    pub err: f64,
}

impl Quad {
    pub const ZERO: Quad = Quad { value: 0.0, err: 0.0 };

    pub fn add(self, other: Quad) -> Quad {
        Quad {
            value: self.value + other.value,
            err: self.err + other.err,
        }
    }
}

/// Integrate `f` over `(a, b)`; `b` may be `+inf`. Endpoint singularities of
/// power type are handled by the tanh-sinh rule; poorly resolved pieces are
/// bisected.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Quad {
    if !(b > a) {
        return Quad::ZERO;
    }
    if b.is_infinite() {
        let cut = if a > 0.0 { a } else { 1.0 };
        let head = if a < cut {
            integrate_finite(&f, a, cut, tol, 0)
        } else {
            Quad::ZERO
        };
        // t = cut / u maps (0, 1] onto [cut, inf).
        let g = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let t = cut / u;
            let v = f(t) * cut / (u * u);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        let tail = integrate_finite(&g, 0.0, 1.0, tol, 0);
        return head.add(tail);
    }
    integrate_finite(&f, a, b, tol, 0)
}

fn integrate_finite<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> Quad {
    let out = tanh_sinh(f, a, b, tol);
    if !out.value.is_finite() {
        return Quad {
            value: out.value,
            err: f64::INFINITY,
        };
    }
    if out.err <= tol.max(1e-15 * out.value.abs()) || depth >= 12 {
        return out;
    }
    let m = 0.5 * (a + b);
    integrate_finite(f, a, m, 0.5 * tol, depth + 1).add(integrate_finite(f, m, b, 0.5 * tol, depth + 1))
}

/// Tanh-sinh rule on a finite interval. Nodes are placed by their distance
/// to the nearer endpoint, so integrable power singularities at `a` or `b`
/// are resolved to full precision.
fn tanh_sinh<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Quad {
    use std::f64::consts::FRAC_PI_2;
    let half = 0.5 * (b - a);
    let eval = |x: f64| {
        if x <= a || x >= b {
            return 0.0;
        }
        let v = f(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    // Contribution of the node pair at t (or the centre at t = 0).
    let pair = |t: f64| -> Option<f64> {
        let u = FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        // 1 - tanh(u), computed without cancellation.
        let c = 1.0 / (u.exp() * cu);
        if c * half < f64::MIN_POSITIVE * 1e3 {
            return None;
        }
        let w = FRAC_PI_2 * t.cosh() / (cu * cu);
        Some(w * (eval(a + half * c) + eval(b - half * c)))
    };
    let mut h = 1.0;
    let mut sum = FRAC_PI_2 * eval(a + half);
    let mut k = 1;
    while let Some(v) = pair(k as f64 * h) {
        sum += v;
        k += 1;
        if k > 20 {
            break;
        }
    }
    let mut estimate = half * h * sum;
    let mut err = f64::INFINITY;
    for _level in 0..9 {
        h *= 0.5;
        let mut k = 1;
        let mut add = 0.0;
        loop {
            let t = k as f64 * h;
            if t > 7.0 {
                break;
            }
            match pair(t) {
                Some(v) => add += v,
                None => break,
            }
            k += 2;
        }
        sum += add;
        let next = half * h * sum;
        err = (next - estimate).abs();
        estimate = next;
        if err <= 0.1 * tol.max(1e-16 * estimate.abs()) {
            break;
        }
    }
    Quad { value: estimate, err }
}

/// Integrate over `(a, b)` split at the given interior knots.
pub fn integrate_knots<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, knots: &[f64], tol: f64) -> Quad {
    let mut pts: Vec<f64> = knots.iter().copied().filter(|&k| k > a && k < b && k.is_finite()).collect();
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup();
    let mut total = Quad::ZERO;
    let mut lo = a;
    let share = tol / (pts.len() as f64 + 1.0);
    for p in pts.into_iter().chain(std::iter::once(b)) {
        total = total.add(integrate(&f, lo, p, share));
        lo = p;
    }
    total
}

/// Minimise a unimodal function on `[a, b]` by golden section.
/// Returns `(argmin, min)`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, xtol: f64, max_iter: usize) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a, b);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let fa = f(a);
    let fb = f(b);
    let mut best = (a, fa);
    if fb < best.1 {
        best = (b, fb);
    }
    for _ in 0..max_iter {
        if (b - a).abs() <= xtol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Largest `x` in `[lo, hi]` with `pred(x)` true, assuming `pred` is true on
/// an initial segment and `pred(lo)` holds.
pub fn bisect_last<F: FnMut(f64) -> bool>(mut pred: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    for _ in 0..iters {
        let mid = if lo > 0.0 && hi / lo > 1e3 { (lo * hi).sqrt() } else { 0.5 * (lo + hi) };
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Root of a continuous `f` with a sign change on `[lo, hi]`.
pub fn bisect_root<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> f64 {
    let flo = f(lo);
    let pos_low = flo > 0.0;
    bisect_last(|x| (f(x) > 0.0) == pos_low, lo, hi, 200)
}

/// Harmonic number `H_n`.
pub fn harmonic(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    if n < 64 {
        return (1..=n).rev().map(|k| 1.0 / k as f64).sum();
    }
    harmonic_real(n as f64)
}

/// Smooth extension `H(t) = digamma(t + 1) + gamma`, accurate for `t >= 64`,
/// recursion below that.
pub fn harmonic_real(t: f64) -> f64 {
    if t < 64.0 {
        // H(t) = H(t + 1) - 1 / (t + 1)
        return harmonic_real(t + 1.0) - 1.0 / (t + 1.0);
    }
    let t2 = t * t;
    t.ln() + EULER_GAMMA + 0.5 / t - 1.0 / (12.0 * t2) + 1.0 / (120.0 * t2 * t2) - 1.0 / (252.0 * t2 * t2 * t2)
}

/// Hurwitz zeta `sum_{n >= 0} (n + q)^{-s}` for `s > 1`, `q > 0`.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    assert!(s > 1.0 && q > 0.0);
    const N: usize = 24;
    // Bernoulli numbers B_2 .. B_16.
    const B: [f64; 8] = [
        1.0 / 6.0,
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
        -3617.0 / 510.0,
    ];
    let mut sum = 0.0;
    for n in 0..N {
        sum += (n as f64 + q).powf(-s);
    }
    let a = N as f64 + q;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Euler-Maclaurin corrections.
    let mut fact = 1.0; // (2j)!
    let mut rising = s; // s (s+1) ... (s + 2j - 2)
    let mut apow = a.powf(-s - 1.0);
    for (j, b) in B.iter().enumerate() {
        let k = 2 * (j + 1);
        fact *= ((k - 1) * k) as f64;
        sum += b / fact * rising * apow;
        rising *= (s + k as f64 - 1.0) * (s + k as f64);
        apow /= a * a;
    }
    sum
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_singular_and_infinite() {
        let q = integrate(|t| t.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((q.value - 2.0).abs() < 1e-10);
        let q = integrate(|t| 1.0 / (t * t), 1.0, f64::INFINITY, 1e-12);
        assert!((q.value - 1.0).abs() < 1e-10);
        let q = integrate(|t| (-t).exp(), 0.0, f64::INFINITY, 1e-12);
        assert!((q.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_min(|x| (x - 0.3) * (x - 0.3) + 1.0, 0.0, 1.0, 1e-12, 200);
        assert!((x - 0.3).abs() < 1e-6);
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn harmonic_matches_direct_sum() {
        let direct: f64 = (1..=1000u64).map(|k| 1.0 / k as f64).sum();
        assert!((harmonic(1000) - direct).abs() < 1e-12);
        assert!((harmonic_real(10.0) - harmonic(10)).abs() < 1e-12);
    }

    #[test]
    fn zeta_two_is_basel() {
        let z = hurwitz_zeta(2.0, 1.0);
        assert!((z - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-14);
        let tail: f64 = (5..200000).map(|n| (n as f64).powi(-3)).sum();
        assert!((hurwitz_zeta(3.0, 5.0) - tail).abs() < 1e-10);
    }
}
