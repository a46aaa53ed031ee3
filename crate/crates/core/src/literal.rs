//! JSON literals for functions, generators and spaces.
//!
//! Scalars are numbers, decimal strings or `"p/q"` rationals and are stored
//! exactly. Serialisation produces a canonical form: rationals as strings,
//! generators as explicit pieces, Orlicz and convexified spaces as
//! `calderon_lozanovskii`.
//!
//! ```text
//! {"domain": "halfline",
//!  "pieces": [{"lo": 0, "hi": 1, "kind": "const", "params": [2]}],
//!  "tail": {"kind": "const", "params": [1]}}
//! ```

use crate::formula::Formula;
use crate::generators::{GenPiece, OrliczFn, QuasiConcaveFn};
use crate::measurable_fn::{Block, Domain, Function, Piece, PiecewiseFn, SeqFn, SeqTail, Tail};
use crate::scalar::{fmt_q, Ext, ExtLit, Lit, Q};
use crate::spaces::{SpaceKind, SpaceSpec};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

type Res<T> = std::result::Result<T, String>;

fn is_none<T>(v: &Option<T>) -> bool {
    v.is_none()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PieceLit {
    pub lo: Lit,
    pub hi: ExtLit,
    pub kind: String,
    #[serde(default)]
    pub params: Vec<Lit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockLit {
    pub lo: Lit,
    pub hi: Lit,
    pub value: Lit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailLit {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub period: Option<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub pattern: Option<Vec<BlockLit>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionLit {
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub pieces: Vec<PieceLit>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub head: Vec<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub tail: Option<TailLit>,
}

fn lits(v: &[Q]) -> Vec<Lit> {
    v.iter().cloned().map(Lit).collect()
}

fn qs(v: &[Lit]) -> Vec<Q> {
    v.iter().map(|l| l.0.clone()).collect()
}

/// Formula from a `kind` and its parameters.
pub fn formula_from(kind: &str, params: &[Lit]) -> Res<Formula> {
    let p = qs(params);
    let arity = |ok: &[usize]| -> Res<()> {
        if ok.contains(&p.len()) {
            Ok(())
        } else {
            Err(format!("kind `{kind}` takes {ok:?} parameters, got {}", p.len()))
        }
    };
    match kind {
        "const" => {
            arity(&[1])?;
            Ok(Formula::constant(p[0].clone()))
        }
        "hyp" => {
            arity(&[1, 2])?;
            Ok(Formula::hyperbolic(p[0].clone(), p.get(1).cloned().unwrap_or_else(Q::zero)))
        }
        "pow" => {
            arity(&[2, 3])?;
            Ok(Formula::shifted_power(p[0].clone(), p[1].clone(), p.get(2).cloned().unwrap_or_else(Q::zero)))
        }
        "general" => {
            arity(&[6])?;
            Ok(Formula {
                k: p[0].clone(),
                c: p[1].clone(),
                alpha: p[2].clone(),
                shift: p[3].clone(),
                b: p[4].clone(),
                m: p[5].clone(),
            })
        }
        other => Err(format!("unknown piece kind `{other}` (expected const, hyp, pow or general)")),
    }
}

/// The simplest `kind` that represents `f`.
pub fn formula_to(f: &Formula) -> (String, Vec<Lit>) {
    let no_pow = f.c.is_zero();
    let (kind, p) = if no_pow && f.k.is_zero() && f.m.is_zero() {
        ("const", vec![f.b.clone()])
    } else if no_pow && f.m.is_zero() {
        ("hyp", vec![f.k.clone(), f.b.clone()])
    } else if f.k.is_zero() && f.m.is_zero() && f.b.is_zero() {
        if f.shift.is_zero() {
            ("pow", vec![f.c.clone(), f.alpha.clone()])
        } else {
            ("pow", vec![f.c.clone(), f.alpha.clone(), f.shift.clone()])
        }
    } else {
        (
            "general",
            vec![f.k.clone(), f.c.clone(), f.alpha.clone(), f.shift.clone(), f.b.clone(), f.m.clone()],
        )
    };
    (kind.to_string(), lits(&p))
}

fn finite_hi(p: &PieceLit) -> Res<Q> {
    p.hi.0.finite().cloned().ok_or_else(|| "function pieces need a finite `hi`".to_string())
}

impl TryFrom<FunctionLit> for Function {
    type Error = String;

    fn try_from(lit: FunctionLit) -> Res<Function> {
        if lit.domain == Domain::Naturals {
            let mut head = qs(&lit.head);
            for p in &lit.pieces {
                let v = match formula_from(&p.kind, &p.params)?.as_const() {
                    Some(v) => v,
                    None => return Err("sequence pieces must be constant".into()),
                };
                let (lo, hi) = (p.lo.0.clone(), finite_hi(p)?);
                if !lo.is_integer() || !hi.is_integer() || lo != Q::from_integer(head.len().into()) {
                    return Err("sequence pieces cover consecutive index ranges (lo, hi] with integer bounds".into());
                }
                let n = (hi - lo).to_integer();
                let n: usize = n.try_into().map_err(|_| "index range too long".to_string())?;
                head.extend(std::iter::repeat_n(v, n));
            }
            let tail = match &lit.tail {
                None => SeqTail::Zero,
                Some(t) => match t.kind.as_str() {
                    "zero" => SeqTail::Zero,
                    "harmonic" => {
                        let p = qs(&t.params);
                        if p.len() != 3 {
                            return Err("harmonic tail takes [a, k, b]".into());
                        }
                        SeqTail::Harmonic {
                            a: p[0].clone(),
                            k: p[1].clone(),
                            b: p[2].clone(),
                        }
                    }
                    k => SeqTail::Formula(formula_from(k, &t.params)?),
                },
            };
            return SeqFn::new(head, tail).map(Function::from).map_err(|e| e.to_string());
        }
        if !lit.head.is_empty() {
            return Err("`head` is only for sequences".into());
        }
        let mut pieces: Vec<Piece> = Vec::new();
        for p in &lit.pieces {
            // Gaps between pieces are zero.
            let end = pieces.last().map(|q| q.hi.clone()).unwrap_or_else(Q::zero);
            if p.lo.0 > end {
                pieces.push(Piece::constant(end, p.lo.0.clone(), Q::zero()));
            }
            pieces.push(Piece {
                lo: p.lo.0.clone(),
                hi: finite_hi(p)?,
                formula: formula_from(&p.kind, &p.params)?,
            });
        }
        let tail = match &lit.tail {
            None => Tail::Zero,
            Some(t) => match t.kind.as_str() {
                "zero" => Tail::Zero,
                "periodic" => Tail::Periodic {
                    period: t.period.clone().ok_or("periodic tail needs `period`")?.0,
                    pattern: t
                        .pattern
                        .clone()
                        .ok_or("periodic tail needs `pattern`")?
                        .into_iter()
                        .map(|b| Block {
                            lo: b.lo.0,
                            hi: b.hi.0,
                            value: b.value.0,
                        })
                        .collect(),
                },
                k => Tail::Formula(formula_from(k, &t.params)?),
            },
        };
        PiecewiseFn::new(lit.domain, pieces, tail).map(Function::from).map_err(|e| e.to_string())
    }
}

fn formula_tail(f: &Formula) -> TailLit {
    let (kind, params) = formula_to(f);
    TailLit {
        kind,
        params,
        period: None,
        pattern: None,
    }
}

impl From<&Function> for FunctionLit {
    fn from(f: &Function) -> FunctionLit {
        match f {
            Function::Seq(s) => FunctionLit {
                domain: Domain::Naturals,
                pieces: vec![],
                head: lits(&s.head),
                tail: match &s.tail {
                    SeqTail::Zero => None,
                    SeqTail::Formula(f) => Some(formula_tail(f)),
                    SeqTail::Harmonic { a, k, b } => Some(TailLit {
                        kind: "harmonic".into(),
                        params: lits(&[a.clone(), k.clone(), b.clone()]),
                        period: None,
                        pattern: None,
                    }),
                },
            },
            Function::Piecewise(g) => FunctionLit {
                domain: g.domain,
                pieces: g
                    .pieces
                    .iter()
                    .map(|p| {
                        let (kind, params) = formula_to(&p.formula);
                        PieceLit {
                            lo: Lit(p.lo.clone()),
                            hi: ExtLit(Ext::Finite(p.hi.clone())),
                            kind,
                            params,
                        }
                    })
                    .collect(),
                head: vec![],
                tail: match &g.tail {
                    Tail::Zero => None,
                    Tail::Formula(f) => Some(formula_tail(f)),
                    Tail::Periodic { period, pattern } => Some(TailLit {
                        kind: "periodic".into(),
                        params: vec![],
                        period: Some(Lit(period.clone())),
                        pattern: Some(
                            pattern
                                .iter()
                                .map(|b| BlockLit {
                                    lo: Lit(b.lo.clone()),
                                    hi: Lit(b.hi.clone()),
                                    value: Lit(b.value.clone()),
                                })
                                .collect(),
                        ),
                    }),
                },
            },
        }
    }
}

/// A function that deserialises from, and serialises to, its literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FunctionLit", into = "FunctionLit")]
pub struct FnLit(pub Function);

impl TryFrom<FunctionLit> for FnLit {
    type Error = String;
    fn try_from(l: FunctionLit) -> Res<FnLit> {
        Function::try_from(l).map(FnLit)
    }
}

impl From<FnLit> for FunctionLit {
    fn from(f: FnLit) -> FunctionLit {
        FunctionLit::from(&f.0)
    }
}

fn gen_pieces(v: &[PieceLit]) -> Res<Vec<GenPiece>> {
    v.iter()
        .map(|p| {
            Ok(GenPiece {
                lo: p.lo.0.clone(),
                hi: p.hi.0.clone(),
                formula: formula_from(&p.kind, &p.params)?,
            })
        })
        .collect()
}

fn gen_lits(v: &[GenPiece]) -> Vec<PieceLit> {
    v.iter()
        .map(|p| {
            let (kind, params) = formula_to(&p.formula);
            PieceLit {
                lo: Lit(p.lo.clone()),
                hi: ExtLit(p.hi.clone()),
                kind,
                params,
            }
        })
        .collect()
}

/// Quasi-concave `phi`: explicit pieces, or a preset (`power` with `theta`,
/// `sqrt`, `min_one`, `flat`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiLit {
    #[serde(default, skip_serializing_if = "is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub theta: Option<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub pieces: Option<Vec<PieceLit>>,
    #[serde(default, rename = "phi0", skip_serializing_if = "is_none")]
    pub phi0: Option<Lit>,
    #[serde(default, rename = "phiInf", skip_serializing_if = "is_none")]
    pub phi_inf: Option<ExtLit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub domain: Option<Domain>,
}

impl TryFrom<PhiLit> for QuasiConcaveFn {
    type Error = String;

    fn try_from(l: PhiLit) -> Res<QuasiConcaveFn> {
        let phi = match (&l.preset, &l.pieces) {
            (Some(p), None) => match p.as_str() {
                "power" => QuasiConcaveFn::power(l.theta.clone().ok_or("preset `power` needs `theta`")?.0),
                "sqrt" => QuasiConcaveFn::sqrt(),
                "min_one" => QuasiConcaveFn::min_one(),
                "flat" => QuasiConcaveFn::flat(),
                other => return Err(format!("unknown phi preset `{other}`")),
            },
            (None, Some(pieces)) => QuasiConcaveFn::new(
                gen_pieces(pieces)?,
                l.phi0.clone().map(|x| x.0).unwrap_or_else(Q::zero),
                l.phi_inf.clone().ok_or("explicit phi needs `phiInf`")?.0,
                l.domain.unwrap_or(Domain::HalfLine),
            )
            .map_err(|e| e.to_string())?,
            _ => return Err("phi needs exactly one of `preset` and `pieces`".into()),
        };
        match l.domain {
            Some(d) if d != phi.domain => phi.on_domain(d).map_err(|e| e.to_string()),
            _ => Ok(phi),
        }
    }
}

impl From<&QuasiConcaveFn> for PhiLit {
    fn from(phi: &QuasiConcaveFn) -> PhiLit {
        PhiLit {
            preset: None,
            theta: None,
            pieces: Some(gen_lits(&phi.pieces)),
            phi0: Some(Lit(phi.phi0.clone())),
            phi_inf: Some(ExtLit(phi.phi_inf.clone())),
            domain: Some(phi.domain),
        }
    }
}

/// Orlicz `F`: explicit pieces with `bF` and `valueAtbF`, or a preset
/// (`power` with `p`, `f_inf`, `f_p_inf` with `p`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrliczLit {
    #[serde(default, skip_serializing_if = "is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub p: Option<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub pieces: Option<Vec<PieceLit>>,
    #[serde(default, rename = "bF", skip_serializing_if = "is_none")]
    pub b_f: Option<ExtLit>,
    #[serde(default, rename = "valueAtbF", skip_serializing_if = "is_none")]
    pub value_at_bf: Option<ExtLit>,
}

impl TryFrom<OrliczLit> for OrliczFn {
    type Error = String;

    fn try_from(l: OrliczLit) -> Res<OrliczFn> {
        let p = || l.p.clone().map(|x| x.0).ok_or_else(|| "this preset needs `p`".to_string());
        match (&l.preset, &l.pieces) {
            (Some(name), None) => match name.as_str() {
                "power" => Ok(OrliczFn::power(p()?)),
                "f_inf" => Ok(OrliczFn::f_inf()),
                "f_p_inf" => Ok(OrliczFn::f_p_inf(p()?)),
                other => Err(format!("unknown Orlicz preset `{other}`")),
            },
            (None, Some(pieces)) => {
                let b_f = l.b_f.clone().map(|x| x.0).unwrap_or(Ext::Infinite);
                let at = l.value_at_bf.clone().map(|x| x.0).unwrap_or(Ext::Infinite);
                OrliczFn::new(gen_pieces(pieces)?, b_f, at).map_err(|e| e.to_string())
            }
            _ => Err("F needs exactly one of `preset` and `pieces`".into()),
        }
    }
}

impl From<&OrliczFn> for OrliczLit {
    fn from(f: &OrliczFn) -> OrliczLit {
        OrliczLit {
            preset: None,
            p: None,
            pieces: Some(gen_lits(&f.pieces)),
            b_f: Some(ExtLit(f.b_f.clone())),
            value_at_bf: Some(ExtLit(f.value_at_bf.clone())),
        }
    }
}

/// Space literal, nested along the kind tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceLit {
    pub kind: String,
    #[serde(default, skip_serializing_if = "is_none")]
    pub domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub p: Option<Lit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub phi: Option<PhiLit>,
    #[serde(default, rename = "F", skip_serializing_if = "is_none")]
    pub f: Option<OrliczLit>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub base: Option<Box<SpaceLit>>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub left: Option<Box<SpaceLit>>,
    #[serde(default, skip_serializing_if = "is_none")]
    pub right: Option<Box<SpaceLit>>,
}

impl TryFrom<SpaceLit> for SpaceSpec {
    type Error = String;

    fn try_from(l: SpaceLit) -> Res<SpaceSpec> {
        let kind = l.kind.clone();
        let need = |what: &str| format!("space kind `{kind}` needs `{what}`");
        let domain = || l.domain.ok_or_else(|| need("domain"));
        let p = || l.p.clone().map(|x| x.0).ok_or_else(|| need("p"));
        let sub = |b: &Option<Box<SpaceLit>>, what: &str| -> Res<SpaceSpec> {
            SpaceSpec::try_from(*b.clone().ok_or_else(|| need(what))?)
        };
        let phi = |d: Domain| -> Res<QuasiConcaveFn> {
            let mut lit = l.phi.clone().ok_or_else(|| need("phi"))?;
            if lit.domain.is_none() && d == Domain::Unit {
                lit.domain = Some(Domain::Unit);
            }
            QuasiConcaveFn::try_from(lit)
        };
        let orlicz = || OrliczFn::try_from(l.f.clone().ok_or_else(|| need("F"))?);
        let e = |r: crate::error::Result<SpaceSpec>| r.map_err(|e| e.to_string());
        let x = match kind.as_str() {
            "lp" => SpaceSpec::lp(domain()?, p()?),
            "linf" => SpaceSpec::linf(domain()?),
            "sum_lp_linf" => SpaceSpec::sum_lp_linf(domain()?, p()?),
            "lorentz" => {
                let d = domain()?;
                e(SpaceSpec::lorentz(d, phi(d)?))?
            }
            "marcinkiewicz" => {
                let d = domain()?;
                e(SpaceSpec::marcinkiewicz(d, phi(d)?))?
            }
            "orlicz" => e(SpaceSpec::orlicz(domain()?, orlicz()?))?,
            "calderon_lozanovskii" => e(SpaceSpec::calderon_lozanovskii(sub(&l.base, "base")?, orlicz()?))?,
            "convexification" => e(SpaceSpec::convexification(sub(&l.base, "base")?, p()?))?,
            "intersection" => e(SpaceSpec::intersection(sub(&l.left, "left")?, sub(&l.right, "right")?))?,
            "cesaro" => SpaceSpec::cesaro(sub(&l.base, "base")?),
            other => return Err(format!("unknown space kind `{other}`")),
        };
        if let Some(d) = l.domain {
            if d != x.domain {
                return Err(format!("space domain {} disagrees with its parts ({})", d.name(), x.domain.name()));
            }
        }
        x.validate().map_err(|e| e.to_string())?;
        Ok(x)
    }
}

impl From<&SpaceSpec> for SpaceLit {
    fn from(x: &SpaceSpec) -> SpaceLit {
        let blank = |kind: &str| SpaceLit {
            kind: kind.into(),
            domain: None,
            p: None,
            phi: None,
            f: None,
            base: None,
            left: None,
            right: None,
        };
        let leaf = |kind: &str| SpaceLit {
            domain: Some(x.domain),
            ..blank(kind)
        };
        match &x.kind {
            SpaceKind::Lp(p) => SpaceLit {
                p: Some(Lit(p.clone())),
                ..leaf("lp")
            },
            SpaceKind::Linf => leaf("linf"),
            SpaceKind::SumLpLinf(p) => SpaceLit {
                p: Some(Lit(p.clone())),
                ..leaf("sum_lp_linf")
            },
            SpaceKind::Lorentz(phi) => SpaceLit {
                phi: Some(phi.into()),
                ..leaf("lorentz")
            },
            SpaceKind::Marcinkiewicz(phi) => SpaceLit {
                phi: Some(phi.into()),
                ..leaf("marcinkiewicz")
            },
            SpaceKind::CalderonLozanovskii { base, f } => SpaceLit {
                base: Some(Box::new(base.as_ref().into())),
                f: Some(f.into()),
                ..blank("calderon_lozanovskii")
            },
            SpaceKind::Intersection(l, r) => SpaceLit {
                left: Some(Box::new(l.as_ref().into())),
                right: Some(Box::new(r.as_ref().into())),
                ..blank("intersection")
            },
            SpaceKind::Cesaro(b) => SpaceLit {
                base: Some(Box::new(b.as_ref().into())),
                ..blank("cesaro")
            },
        }
    }
}

/// A space that deserialises from, and serialises to, its literal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceLit", into = "SpaceLit")]
pub struct SpaceDe(pub SpaceSpec);

impl TryFrom<SpaceLit> for SpaceDe {
    type Error = String;
    fn try_from(l: SpaceLit) -> Res<SpaceDe> {
        SpaceSpec::try_from(l).map(SpaceDe)
    }
}

impl From<SpaceDe> for SpaceLit {
    fn from(x: SpaceDe) -> SpaceLit {
        SpaceLit::from(&x.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PhiLit", into = "PhiLit")]
pub struct PhiDe(pub QuasiConcaveFn);

impl TryFrom<PhiLit> for PhiDe {
    type Error = String;
    fn try_from(l: PhiLit) -> Res<PhiDe> {
        QuasiConcaveFn::try_from(l).map(PhiDe)
    }
}

impl From<PhiDe> for PhiLit {
    fn from(x: PhiDe) -> PhiLit {
        PhiLit::from(&x.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OrliczLit", into = "OrliczLit")]
pub struct OrliczDe(pub OrliczFn);

impl TryFrom<OrliczLit> for OrliczDe {
    type Error = String;
    fn try_from(l: OrliczLit) -> Res<OrliczDe> {
        OrliczFn::try_from(l).map(OrliczDe)
    }
}

impl From<OrliczDe> for OrliczLit {
    fn from(x: OrliczDe) -> OrliczLit {
        OrliczLit::from(&x.0)
    }
}

/// Parse a function literal.
pub fn parse_function(text: &str) -> crate::error::Result<Function> {
    crate::job::from_json::<FnLit>(text, "function").map(|f| f.0)
}

/// Parse a space literal.
pub fn parse_space(text: &str) -> crate::error::Result<SpaceSpec> {
    crate::job::from_json::<SpaceDe>(text, "space").map(|x| x.0)
}

pub fn function_to_json(f: &Function) -> String {
    serde_json::to_string(&FunctionLit::from(f)).expect("literal serialises")
}

pub fn space_to_json(x: &SpaceSpec) -> String {
    serde_json::to_string(&SpaceLit::from(x)).expect("literal serialises")
}

/// `p/q` or an integer, as used in literals.
pub fn scalar_text(q: &Q) -> String {
    fmt_q(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measurable_fn::chi;
    use crate::scalar::{qi, qr};

    #[test]
    fn function_round_trip() {
        let text = r#"{"domain":"halfline","pieces":[{"lo":0,"hi":"3/4","kind":"const","params":["2"]},
            {"lo":"3/4","hi":2,"kind":"pow","params":[1,"-1/2",1]}],"tail":{"kind":"hyp","params":[1,"0.5"]}}"#;
        let f = parse_function(text).unwrap();
        let g = f.as_piecewise().unwrap();
        assert_eq!(g.pieces[0].hi, qr(3, 4));
        assert_eq!(g.pieces[1].formula.shift, qi(1));
        let canon = function_to_json(&f);
        assert_eq!(parse_function(&canon).unwrap(), f);
        assert_eq!(function_to_json(&parse_function(&canon).unwrap()), canon);
    }

    #[test]
    fn sequences_from_head_or_pieces() {
        let a = parse_function(r#"{"domain":"naturals","head":[1,1,1],"tail":{"kind":"const","params":[2]}}"#).unwrap();
        let b = parse_function(r#"{"domain":"naturals","pieces":[{"lo":0,"hi":3,"kind":"const","params":[1]}],
            "tail":{"kind":"const","params":[2]}}"#)
        .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spaces_round_trip() {
        let text = r#"{"kind":"cesaro","base":{"kind":"sum_lp_linf","p":2,"domain":"halfline"}}"#;
        let x = parse_space(text).unwrap();
        assert_eq!(x, SpaceSpec::cesaro(SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2))));
        let text = r#"{"kind":"orlicz","domain":"halfline","F":{"preset":"f_p_inf","p":2}}"#;
        let x = parse_space(text).unwrap();
        let canon = space_to_json(&x);
        assert_eq!(parse_space(&canon).unwrap(), x);
        let m = parse_space(r#"{"kind":"marcinkiewicz","domain":"halfline","phi":{"preset":"sqrt"}}"#).unwrap();
        assert_eq!(parse_space(&space_to_json(&m)).unwrap(), m);
    }

    #[test]
    fn errors_carry_positions() {
        let err = parse_function("{\"domain\":\"halfline\",\n\"pieces\":[{\"lo\":0,\"hi\":1,\"kind\":\"cube\"}]}").unwrap_err();
        match err {
            crate::error::Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(parse_space(r#"{"kind":"lp","domain":"halfline","p":"1/2"}"#).is_err());
        let _ = chi(Domain::HalfLine, 0, None);
    }
}
