use proptest::prelude::*;
use rispaces::cesaro::{cesaro_apply, cesaro_by_quadrature};
use rispaces::generators::OrliczFn;
use rispaces::ideal_quotient::dist_oc;
use rispaces::literal::{function_to_json, parse_function, parse_space, space_to_json};
use rispaces::measurable_fn::{Domain, Function};
use rispaces::oracle::rearrangement_mismatch;
use rispaces::rearrangement::rearrange_exact;
use rispaces::sample;
use rispaces::scalar::qi;
use rispaces::spaces::{norm, Config, SpaceSpec};

fn domain() -> impl Strategy<Value = Domain> {
    prop_oneof![Just(Domain::Unit), Just(Domain::HalfLine), Just(Domain::Naturals)]
}

fn cfg() -> Config {
    Config::new(1e-9)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rearrangement_agrees_with_sorting(seed in any::<u64>(), d in domain()) {
        let f = sample::step_function(&mut sample::rng(seed), d, 12);
        prop_assert_eq!(rearrangement_mismatch(&f).unwrap(), None);
    }

    #[test]
    fn rearrangement_is_idempotent(seed in any::<u64>(), d in domain()) {
        let f = sample::step_function(&mut sample::rng(seed), d, 12);
        let s = rearrange_exact(&f).unwrap();
        prop_assert_eq!(rearrange_exact(&s).unwrap(), s);
    }

    #[test]
    fn function_literals_round_trip(seed in any::<u64>(), d in domain()) {
        let f = sample::step_function(&mut sample::rng(seed), d, 12);
        let text = function_to_json(&f);
        let back = parse_function(&text).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(function_to_json(&back), text);
    }

    #[test]
    fn singular_literals_round_trip(seed in any::<u64>()) {
        let (f, _) = sample::singular_function(&mut sample::rng(seed), 6);
        prop_assert_eq!(parse_function(&function_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn distance_ignores_sign(seed in any::<u64>()) {
        let f = sample::step_function(&mut sample::rng(seed), Domain::HalfLine, 12);
        let x = SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2));
        prop_assert_eq!(dist_oc(&f, &x, &cfg()).unwrap().value, dist_oc(&f.abs(), &x, &cfg()).unwrap().value);
    }

    #[test]
    fn distance_is_monotone(seed in any::<u64>()) {
        let mut r = sample::rng(seed);
        let f = sample::step_function(&mut r, Domain::Naturals, 12);
        let g = sample::dominated(&mut r, &f);
        let x = SpaceSpec::linf(Domain::Naturals);
        let df = dist_oc(&f, &x, &cfg()).unwrap().value;
        let dg = dist_oc(&g, &x, &cfg()).unwrap().value;
        prop_assert!(dg <= df + 2e-9, "{} > {}", dg, df);
    }

    #[test]
    fn distance_never_exceeds_norm(seed in any::<u64>()) {
        let f = sample::step_function(&mut sample::rng(seed), Domain::HalfLine, 12);
        let x = SpaceSpec::sum_lp_linf(Domain::HalfLine, qi(2));
        let n = norm(&f, &x, &cfg()).unwrap().value;
        let d = dist_oc(&f, &x, &cfg()).unwrap().value;
        prop_assert!(d <= n + 1e-9, "{} > {}", d, n);
    }

    #[test]
    fn cesaro_image_matches_quadrature(seed in any::<u64>(), t in 0.01f64..30.0) {
        let f = sample::step_function(&mut sample::rng(seed), Domain::HalfLine, 8);
        let c = cesaro_apply(&f).unwrap();
        let q = cesaro_by_quadrature(&f, t);
        prop_assert!((c.eval(t) - q).abs() <= 1e-12 * q.abs().max(1.0), "{} vs {}", c.eval(t), q);
    }

    #[test]
    fn rearrangement_is_below_its_average(seed in any::<u64>(), t in 0.01f64..30.0) {
        let f = sample::step_function(&mut sample::rng(seed), Domain::HalfLine, 8);
        let s = rearrange_exact(&f).unwrap();
        let c = cesaro_apply(&s).unwrap();
        prop_assert!(s.eval(t) <= c.eval(t) + 1e-12);
    }

    #[test]
    fn power_luxemburg_norm_is_lp(seed in any::<u64>()) {
        let f = sample::compact_step(&mut sample::rng(seed), 8);
        let l1 = SpaceSpec::lp(Domain::HalfLine, qi(1));
        let x = SpaceSpec::calderon_lozanovskii(l1, OrliczFn::power(qi(2))).unwrap();
        let a = norm(&f, &x, &cfg()).unwrap().value;
        let b = norm(&f, &SpaceSpec::lp(Domain::HalfLine, qi(2)), &cfg()).unwrap().value;
        prop_assert!((a - b).abs() <= 1e-9 * b.max(1.0), "{} vs {}", a, b);
    }
}

#[test]
fn space_literals_round_trip() {
    for text in [
        r#"{"kind":"cesaro","base":{"kind":"sum_lp_linf","p":2,"domain":"halfline"}}"#,
        r#"{"kind":"intersection","left":{"kind":"lp","p":"3/2","domain":"unit"},"right":{"kind":"linf","domain":"unit"}}"#,
        r#"{"kind":"lorentz","domain":"unit","phi":{"preset":"power","theta":"1/3"}}"#,
        r#"{"kind":"convexification","p":2,"base":{"kind":"lp","p":1,"domain":"naturals"}}"#,
        r#"{"kind":"orlicz","domain":"halfline","F":{"preset":"f_inf"}}"#,
    ] {
        let x = parse_space(text).unwrap();
        let canon = space_to_json(&x);
        let again = parse_space(&canon).unwrap();
        assert_eq!(again, x, "{text}");
        assert_eq!(space_to_json(&again), canon);
    }
}

#[test]
fn sequences_and_steps_share_the_cesaro_map() {
    let x: Function = sample::sequence(&mut sample::rng(5), 10).into();
    let c = cesaro_apply(&x).unwrap();
    for n in 1..40u64 {
        let q = cesaro_by_quadrature(&x, n as f64);
        assert!((c.eval(n as f64) - q).abs() < 1e-9, "n = {n}");
    }
}
