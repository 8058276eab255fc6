use edgewave::asymptotics::*;
use edgewave::painleve2::{hamiltonian_pII, solve_hastings_mcleod, HMProfile};
use edgewave::pi2k_profile::{solve_tritronquee, I_h};
use edgewave::specfun::{alpha, alpha_f64, chi0, rational};
use num_rational::BigRational;
use proptest::prelude::*;
use std::sync::OnceLock;

fn hm() -> &'static HMProfile {
    static P: OnceLock<HMProfile> = OnceLock::new();
    P.get_or_init(|| solve_hastings_mcleod(10.0, 2000).unwrap())
}

#[test]
fn theta_scaling() {
    let (k, eta, y, lam) = (2, 1.7, -0.4, 3.0);
    let lhs = theta(k, lam * eta, y * lam.powi(5)).unwrap();
    let rhs = lam.powf(5.5) * theta(k, eta, y).unwrap();
    assert!((lhs - rhs).abs() < 1e-13 * rhs.abs());
}

#[test]
fn b_coefficients_exact() {
    let (r, y) = (rational(-3, 2), rational(7, 5));
    let b = b_exact(1, &r, &y);
    assert_eq!(b[0], -(alpha(1) * &r * &r * &r) - &y);
    // k = 1 displays: b1 = 5r^2/2, d1 = 5r^4/32 + ry/2.
    assert_eq!(b[1], rational(5, 2) * &r * &r);
    let d1 = d1_exact(1, &r, &y);
    assert_eq!(d1, rational(5, 32) * &r * &r * &r * &r + &r * &y / BigRational::from_integer(2.into()));
    for k in 1..4 {
        let zero = rational(0, 1);
        let b = b_exact(k, &zero, &zero);
        for (j, bj) in b.iter().enumerate() {
            if j == 2 * k as usize + 1 {
                assert_eq!(*bj, rational(4, 4 * k as i64 + 3));
            } else {
                assert_eq!(*bj, zero);
            }
        }
    }
}

#[test]
fn g1_reduces_to_theta_at_origin() {
    let g = GFunctionData::new(2, 0.0, 0.0, 10.0).unwrap();
    for &eta in &[0.1, 1.0, 3.5] {
        let t = theta(2, eta, 0.0).unwrap();
        assert!((g.g1(eta).unwrap() - t).abs() < 1e-14 * t);
    }
    assert!(g.g1(0.0).is_err());
}

#[test]
fn g1_matching_coefficients_and_order() {
    for &(k, r, y) in &[(1, -1.0, 0.0), (1, 0.5, -1.0), (2, -1.0, 0.0)] {
        let g = GFunctionData::new(k, r, y, 10.0).unwrap();
        assert!(g.matching_defect() < 1e-14);
        assert!((g.d1_from_matching() - g.d1).abs() < 1e-14);
        let slope = loglog_slope(1e2, 1e4, 21, |e| g.matching_remainder(e)).unwrap();
        assert!((slope + 1.5).abs() < 0.1, "(k,r,y)=({k},{r},{y}) slope {slope}");
    }
}

#[test]
fn matching_remainder_agrees_with_direct_subtraction() {
    let g = GFunctionData::new(1, 0.5, -1.0, 10.0).unwrap();
    for &eta in &[10.0, 20.0, 30.0] {
        let series = g.matching_remainder(eta).unwrap();
        let direct = g.matching_remainder_direct(eta);
        assert!((series - direct).abs() < 1e-8 * series.abs(), "{series} vs {direct}");
    }
}

#[test]
fn p1_tilde_at_r() {
    for &(k, r, y) in &[(1, -1.0, 0.0), (2, 0.5, -1.0), (3, 0.3, 2.0)] {
        let g = GFunctionData::new(k, r, y, 10.0).unwrap();
        assert!((g.p1_tilde(r) + g.b0() / 2.0).abs() < 1e-14);
        assert!((g.p1(r) + g.b0()).abs() < 1e-14);
    }
}

proptest! {
    #[test]
    fn p1_routes_agree(k in 1u32..4, r in -2.0f64..2.0, y in -3.0f64..3.0, eta in -3.0f64..3.0) {
        let g = GFunctionData::new(k, r, y, 10.0).unwrap();
        let scale = 1.0 + eta.abs().max(r.abs()).powi(2 * k as i32 + 1) * 10.0;
        prop_assert!((g.p1(eta) - g.p1_from_b(eta)).abs() < 1e-12 * scale);
        prop_assert!((g.p1_tilde(eta) - g.p1_tilde_from_b(eta)).abs() < 1e-12 * scale);
    }

    #[test]
    fn sign_lemma_on_random_admissible_points(k in 1u32..4, r in -2.0f64..2.0, slack in 0.0f64..3.0) {
        let y = -alpha_f64(k) * r.powi(2 * k as i32 + 1) - slack;
        let report = lemma41_sign_check(k, r, y, 50.0, 200).unwrap();
        prop_assert_eq!(report.violations, 0);
    }
}

#[test]
fn sign_lemma_cases() {
    let a = lemma41_sign_check(1, -1.0, 0.0, 50.0, 1000).unwrap();
    assert_eq!(a.violations, 0);
    let b = lemma41_sign_check(1, 0.5, -1.0, 50.0, 1000).unwrap();
    assert_eq!(b.violations, 0);
    // Boundary: b0 = 0, so p~1(r) = 0 while the interior stays negative.
    let r = 0.8;
    let y = -alpha_f64(1) * r * r * r;
    let g = GFunctionData::new(1, r, y, 10.0).unwrap();
    assert!(g.p1_tilde(r).abs() < 1e-15);
    assert_eq!(lemma41_sign_check(1, r, y, 50.0, 1000).unwrap().violations, 0);
    assert!(lemma41_sign_check(1, 1.0, 0.0, 50.0, 10).is_err());
}

#[test]
fn conformal_map_f1() {
    let g = GFunctionData::new(1, -1.0, 0.3, 10.0).unwrap();
    let h = 1e-6;
    let slope = (g.f1(h).unwrap() - g.f1(-h).unwrap()) / (2.0 * h);
    assert!((slope - 1.0).abs() < 1e-8);
    for &eta in &[0.05, 0.3, 1.0] {
        let a = g.f1(eta).unwrap();
        let b = g.f1_from_g1(eta).unwrap();
        assert!((a - b).abs() < 1e-13 * a.abs());
    }
}

#[test]
fn f2_ignores_b0() {
    let (k, r) = (1, -0.9f64);
    let g = GFunctionData::new(k, r, 0.5, 10.0).unwrap();
    let g2 = GFunctionData::new(k, r, 0.9, 10.0).unwrap();
    for &eta in &[-1.2, -0.9, -0.5, 0.0] {
        assert_eq!(g.f2(eta).unwrap(), g2.f2(eta).unwrap());
    }
    let h = 1e-6;
    let fd = (g.f2(r + h).unwrap() - g.f2(r - h).unwrap()) / (2.0 * h);
    assert!((fd - g.f2_prime_at_r()).abs() < 1e-8);
}

#[test]
fn g2_family_basics() {
    let g = g2_family(1, alpha_f64(1)).unwrap();
    assert!((g.r0 + 1.0).abs() < 1e-15);
    for k in 1..4 {
        for &y in &[-2.0, -0.3, 0.0, 0.7, 5.0] {
            let g = g2_family(k, y).unwrap();
            assert!(g.matching_defect < 1e-12, "k={k} y={y}");
            if y != 0.0 {
                assert!(g.p2_eval(g.r0) > 0.0);
            }
        }
    }
    let g = g2_family(1, -1.0).unwrap();
    let slope = loglog_slope(1e2, 1e4, 21, |e| g.matching_remainder(e)).unwrap();
    assert!((slope + 1.5).abs() < 0.1, "{slope}");
    // f3'(r0) = ((3/2) p2(r0))^{2/3}.
    let h = 1e-6;
    let fd = (g.f3(g.r0 + h).unwrap() - g.f3(g.r0 - h).unwrap()) / (2.0 * h);
    let want = (1.5 * g.p2_eval(g.r0)).cbrt().powi(2);
    assert!((fd - want).abs() < 1e-8);
    assert!((g.f3_prime(g.r0).unwrap() - want).abs() < 1e-14);
    let via_g2 = (1.5 * g.g2(g.r0 + 0.4).unwrap()).powf(2.0 / 3.0);
    assert!((g.f3(g.r0 + 0.4).unwrap() - via_g2).abs() < 1e-14);
}

#[test]
fn g1_and_g2_coincide_when_b0_vanishes() {
    for &(k, r) in &[(1, -0.7f64), (2, 0.6), (3, -1.2)] {
        let y = -alpha_f64(k) * r.powi(2 * k as i32 + 1);
        let g1 = GFunctionData::new(k, r, y, 10.0).unwrap();
        let g2 = g2_family(k, y).unwrap();
        assert!((g2.r0 - r).abs() < 1e-14);
        for i in 1..50 {
            let eta = r + 5.0 * i as f64 / 50.0;
            let (a, b) = (g1.g1(eta).unwrap(), g2.g2(eta).unwrap());
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0), "k={k} eta={eta}: {a} vs {b}");
        }
    }
}

#[test]
fn kappa_consistency() {
    let k = 1;
    let y = 2.0;
    assert!(kappa0(k, -(y / alpha_f64(k)).cbrt(), y).unwrap().abs() < 1e-15);
    assert!(kappa0(k, -1.0, -1.0).is_err());
    let r0 = -(y / alpha_f64(k)).cbrt();
    let mut last = f64::INFINITY;
    for &off in &[1e-2, 1e-3, 1e-4] {
        let r = r0 - off;
        let g = GFunctionData::new(k, r, y, 10.0).unwrap();
        let k0 = g.kappa0.unwrap();
        assert!(k0 <= 0.0 || g.b0() < 0.0);
        let ratio_kappa = g.kappa_at_r().unwrap() / k0;
        let ratio_slope = g.f2_prime_at_r() / kappa0_dr(k, r, y).unwrap();
        let dev = (ratio_kappa - 1.0).abs().max((ratio_slope - 1.0).abs());
        assert!(dev < last);
        last = dev;
    }
    assert!(last < 1e-3);
}

#[test]
fn region_thresholds() {
    let a = alpha_f64(1);
    let lam = 100.0f64;
    let th = lam.powf(-2.0 + 1.0 / 6.0);
    // alpha r^3 + y = -1
    assert_eq!(region_classify(1, lam, -1.0, a - 1.0, 1.0, 1.0 / 6.0).unwrap(), Region::Algebraic);
    assert_eq!(region_classify(1, lam, -1.0, a, 1.0, 1.0 / 6.0).unwrap(), Region::Transition);
    assert_eq!(
        region_classify(1, lam, -1.0, a + 2.0 * th, 1.0, 1.0 / 6.0).unwrap(),
        Region::Exponential
    );
}

#[test]
fn chi_seam() {
    let k = 1;
    let x = 125.0 * alpha_f64(k);
    let s0 = s0(k, x);
    assert!((s0 + 5.0).abs() < 1e-14);
    assert_eq!(chi_variable(k, s0, x).unwrap(), 0.0);
    let d = 1e-6;
    let left = (chi_variable(k, s0, x).unwrap() - chi_variable(k, s0 - d, x).unwrap()) / d;
    let right = (chi_variable(k, s0 + d, x).unwrap() - chi_variable(k, s0, x).unwrap()) / d;
    assert!((left - right).abs() < 1e-6 * left, "{left} vs {right}");
    // Rational branch at s0 - 1 by hand: (5/4 (-6)^3 + x) / (3^{1/3} (5/4)^{1/9} x^{2/9}).
    let s = s0 - 1.0;
    let want = (1.25 * s.powi(3) + x) / (3f64.cbrt() * 1.25f64.powf(1.0 / 9.0) * x.powf(2.0 / 9.0));
    assert!((chi_variable(k, s, x).unwrap() - want).abs() < 1e-13 * want.abs());
    assert!(chi_variable(k, s, -1.0).is_err());
}

#[test]
fn theorem_reduces_to_airy_at_k0() {
    let c = 2f64.powf(2.0 / 3.0);
    for &s in &[-3.0, -6.0, -12.0] {
        let b = theorem_expansion(0, s, 0.0, IhInput::Omitted).unwrap();
        let want = -(c * s).abs().powi(3) / 12.0 - (c * s).abs().ln() / 8.0 + chi0();
        assert!((b.total - want).abs() < 1e-13 * want.abs());
        assert!(!b.ih_supplied);
    }
}

#[test]
fn breakdown_sums_to_total() {
    let b = theorem_expansion(2, -7.0, 40.0, IhInput::Value(0.3)).unwrap();
    let sum = b.terms().iter().fold(0.0, |acc, (_, v)| acc + v);
    assert_eq!(sum.to_bits(), b.total.to_bits());
    assert!(b.in_window);
    let far = theorem_expansion(1, -2.0, 1e6, IhInput::Omitted).unwrap();
    assert!(!far.in_window);
    assert!(theorem_expansion(1, 1.0, 0.0, IhInput::Omitted).is_err());
}

#[test]
fn printed_k1_coefficients() {
    assert_eq!(alpha(1), rational(5, 4));
    let [c7, c4, c1] = k1_power_coefficients();
    assert_eq!(c7, rational(25, 448));
    assert_eq!(c4, rational(5, 32));
    assert_eq!(c1, rational(1, 4));
}

#[test]
fn theorem_matches_k1_display_with_profile() {
    let p = solve_tritronquee(40.0, 4000, 0.0).unwrap();
    for &(s, x) in &[(-10.0, 3.0), (-6.0, -4.0), (-15.0, 12.0)] {
        let ih = I_h(&p, x).unwrap().value;
        let a = theorem_expansion(1, s, x, IhInput::Value(ih)).unwrap().total;
        let b = expansion_k1(s, x, 0.0, ih);
        assert!((a - b).abs() <= 1e-12 * a.abs(), "({s},{x}): {a} vs {b}");
    }
}

#[test]
fn transition_defect_decreases() {
    let mut last = f64::INFINITY;
    for &u in &[20.0, 40.0, 80.0, 160.0] {
        let t = transition_eval(1, -u, -u.powf(0.3), false).unwrap();
        assert!(t.defect.abs() < last, "u={u}: {}", t.defect);
        last = t.defect.abs();
        // I_h at x ~ alpha u^3 is far below the other pieces.
        assert!(t.ih_term.abs() < 1e-3 * t.power_block.abs());
        let simplified = transition_eval(1, -u, -u.powf(0.3), true).unwrap();
        assert!((t.defect - simplified.defect).abs() < u.powi(-3));
    }
    assert!(transition_eval(1, -20.0, 1.0, false).is_err());
    assert!(transition_eval(1, -20.0, -100.0, false).is_err());
}

#[test]
fn transition_series_matches_direct_evaluation() {
    // At |s| = 4 the direct subtraction still keeps about 12 digits.
    let (k, u, st) = (1, 4.0, -1.5);
    let t = transition_eval(k, -u, st, false).unwrap();
    let ih = edgewave::pi2k_profile::I_h_from_expansion(0.0, t.x).unwrap().value;
    let b = theorem_expansion(k, -u, t.x, IhInput::Value(ih)).unwrap();
    let tw = -st.abs().powi(3) / 12.0 - st.abs().ln() / 8.0 + chi0();
    assert!((b.total - tw - t.defect).abs() < 1e-9, "{} vs {}", b.total - tw, t.defect);
}

#[test]
fn scaffold_relation_and_cancellation() {
    for &sg in &[1, -1] {
        for &u in &[1e3, 1e4, 1e5] {
            let sc = proof_scaffold(1, -u, sg).unwrap();
            assert!(((sc.relation_lhs - sc.relation_rhs) / sc.relation_rhs).abs() < 1e-12);
            assert!(sc.s1 < 0.0 || sg < 0);
        }
        let slope = loglog_slope(1e3, 1e5, 9, |u| Ok(proof_scaffold(1, -u, sg)?.cancellation)).unwrap();
        assert!((slope + 1.0 / 3.0).abs() < 0.05, "sign {sg}: {slope}");
        for &u in &[10.0, 100.0] {
            let sc = proof_scaffold(1, -u, sg).unwrap();
            let direct = sc.cancellation_direct.unwrap();
            assert!((sc.cancellation - direct).abs() < 1e-9 * direct.abs());
        }
    }
}

#[test]
fn s1_four_term_expansion() {
    for k in 1..3 {
        let p = 1.0 / (2 * k + 1) as f64;
        let b4 = p * (p - 1.0) * (p - 2.0) * (p - 3.0) / 24.0;
        for &u in &[30.0, 300.0] {
            let ratio = s1_expansion_remainder(k, u, 1) / u.powf(-4.0 * k as f64 - 7.0 / 3.0);
            assert!((ratio + b4).abs() < 0.05 * b4.abs(), "k={k} u={u}: {ratio}");
        }
        let sc = proof_scaffold(k, -50.0, 1).unwrap();
        let approx = s1_expansion(k, 50.0, 1);
        assert!((sc.s1 - approx).abs() < 1e-6 * 50.0);
    }
}

#[test]
fn algebraic_approximant_ratio() {
    let (k, s) = (1, -10.0f64);
    let a = alpha_f64(k);
    // Pick x with X = alpha s^3 + x = -|x|^{1/2}.
    let mut x = -a * s.powi(3);
    for _ in 0..50 {
        x = -a * s.powi(3) - x.abs().sqrt();
    }
    let big_x = a * s.powi(3) + x;
    assert!((big_x + x.sqrt()).abs() < 1e-9);
    let v = lemma_approximant(k, s, x, Approximant::DfDsAlgebraic, HSupplier::Asymptotic, None).unwrap();
    let leading = big_x * big_x / 4.0;
    let ratio = (v.value - leading) / leading;
    let documented = -3.0 * a * s * s / (2.0 * big_x.powi(3));
    assert!((ratio - documented).abs() < 1e-12);
    assert!(ratio.abs() < 0.01);
}

#[test]
fn transition_approximant_at_seam() {
    let (k, x) = (1, 50.0);
    let s = s0(k, x);
    let v = lemma_approximant(k, s, x, Approximant::DfDsTransition, HSupplier::Asymptotic, Some(hm())).unwrap();
    let want = chi_ds(k, s, x).unwrap() * hamiltonian_pII(hm(), 0.0).unwrap();
    assert!((v.value - want).abs() < 1e-14 * want.abs());
    assert!(v.in_region);
    assert!(lemma_approximant(k, s, x, Approximant::DfDsTransition, HSupplier::Asymptotic, None).is_err());
}

#[test]
fn k0_transition_chain_is_rescaled_airy() {
    // For k = 0 both branches of chi are (2s + x)/2^{1/3}, so dF/ds is
    // 2^{2/3} H(2^{2/3} s + 2^{-1/3} x).
    let x = 0.3;
    for &s in &[-2.0, -1.0, 0.5] {
        let v = lemma_approximant(0, s, x, Approximant::DfDsTransition, HSupplier::Asymptotic, Some(hm()))
            .unwrap()
            .value;
        let c = 2f64.powf(2.0 / 3.0);
        let arg = c * s + x / 2f64.cbrt();
        let fd = c * edgewave::fredholm::dlog_det_ds(arg, 60).unwrap();
        assert!((v - fd).abs() < 1e-6, "s={s}: {v} vs {fd}");
    }
}

#[test]
fn dfdx_uses_profile_or_fallback() {
    let p = solve_tritronquee(30.0, 3000, 0.0).unwrap();
    let (s, x) = (-8.0, 2.0);
    let a = lemma_approximant(1, s, x, Approximant::DfDx, HSupplier::Profile(&p), None).unwrap();
    let b = lemma_approximant(1, s, x, Approximant::DfDx, HSupplier::Asymptotic, None).unwrap();
    assert!(!a.h_fallback && b.h_fallback);
    assert!(a.in_region);
    // h - h_Asy at x = 2 is small but not zero.
    assert!((a.value - b.value).abs() < 0.05);
    assert!(a.value != b.value);
}
