use edgewave::hierarchy::residual;
use edgewave::pi2k_profile::{
    constant_Ck_scan, h_asy, left_integral, solve_tritronquee, total_integral, I_h, Pi2Profile,
};
use edgewave::specfun::signed_root;
use std::sync::OnceLock;

fn profile() -> &'static Pi2Profile {
    static P: OnceLock<Pi2Profile> = OnceLock::new();
    P.get_or_init(|| solve_tritronquee(40.0, 4000, 0.0).unwrap())
}

fn leading(x: f64) -> f64 {
    0.5 * 0.8f64.cbrt() * signed_root(x, 3)
}

#[test]
fn discrete_residual_is_small() {
    let p = profile();
    assert!(p.max_residual < 1e-6, "{}", p.max_residual);
}

#[test]
fn symbolic_and_direct_residuals_agree() {
    let p = profile();
    for i in (3..p.grid.len() - 3).step_by(97) {
        let jet = p.jet_at(i).unwrap();
        let x = p.grid[i];
        let [q, q1, q2, _, q4] = jet;
        let direct = q4 - 4.0 * x + 40.0 * q.powi(3) - 10.0 * q1 * q1 - 20.0 * q * q2;
        let symbolic = residual(1, &[0.0], x, &jet).unwrap();
        assert!((direct + 4.0 * symbolic).abs() < 1e-8, "x={x}");
        assert!(direct.abs() < 1e-5, "x={x}: {direct}");
    }
}

#[test]
fn root_behaviour_at_both_ends() {
    let p = profile();
    let l = p.half_width;
    let (ql, _) = p.eval_q(l).unwrap();
    let (qm, _) = p.eval_q(-l).unwrap();
    assert!((ql / leading(l) - 1.0).abs() < 1e-2);
    assert!(ql > 0.0 && qm < 0.0);
    for &x in &[-30.0, -15.0, 15.0, 30.0] {
        let (q, _) = p.eval_q(x).unwrap();
        assert!((q - leading(x)).abs() < x.abs().powf(-1.0 / 3.0), "x={x}");
    }
}

#[test]
fn h_minus_h_asy_decays() {
    let p = profile();
    for &x in &[-30.0, -20.0, -10.0, 10.0, 20.0, 30.0] {
        let d = p.eval_h(x).unwrap() - h_asy(1, x, 0.0).unwrap();
        assert!(d.abs() * x.abs().powf(13.0 / 6.0) < 0.1, "x={x}: {d}");
    }
    assert!(p.left_h_defect.abs() < 1e-6);
}

#[test]
fn integrated_and_polynomial_hamiltonians_agree() {
    let p = profile();
    let shift = p.h[0] - p.h_local[0];
    for (a, b) in p.h.iter().zip(&p.h_local) {
        assert!((a - b - shift).abs() < 1e-6);
    }
    assert!(shift.abs() < 1e-6);
}

#[test]
fn total_integral_vanishes() {
    let t = total_integral(profile()).unwrap();
    assert!(t.value.abs() <= 5e-3, "{t:?}");
    assert!(t.value.abs() <= t.error + 1e-6, "{t:?}");
    assert!(t.error < 1e-3);
}

#[test]
fn two_representations_of_i_h() {
    let p = profile();
    let total = total_integral(p).unwrap();
    for &x in &[-5.0, 0.0, 5.0, 10.0] {
        let right = I_h(p, x).unwrap();
        let left = left_integral(p, x).unwrap();
        let gap = (right.value + left.value - total.value).abs();
        assert!(gap < 1e-9, "x={x}: {gap}");
        assert!((right.value + left.value).abs() < right.error + left.error + 1e-6, "x={x}");
    }
}

#[test]
fn i_h_near_the_right_edge_is_tiny() {
    let p = profile();
    let x = p.half_width - 1.0;
    let v = I_h(p, x).unwrap().value;
    assert!(v.abs() < 6.0 / 7.0 * x.powf(-7.0 / 6.0));
    assert!(I_h(p, p.half_width).is_err());
}

#[test]
fn constant_block_scan() {
    let scan = constant_Ck_scan(profile(), &[-5.0, 0.0, 5.0, 10.0]).unwrap();
    // The displayed block has x-derivative h(x); its spread is large. The
    // combination with int_0^x h removed is constant.
    assert!(scan.literal_spread > 1.0);
    assert!(scan.reduced_spread < 1e-2);
    assert!(scan.reduced_spread < 1e-5);
    assert!(scan.control_spread > 1.0);
}

#[test]
fn nonzero_t1() {
    let p = solve_tritronquee(40.0, 4000, 0.8).unwrap();
    assert!(p.max_residual < 1e-6);
    let t = total_integral(&p).unwrap();
    assert!(t.value.abs() < 5e-3, "{t:?}");
    for &x in &[-20.0, 20.0] {
        let d = p.eval_h(x).unwrap() - h_asy(1, x, 0.8).unwrap();
        assert!(d.abs() < 1e-2, "x={x}: {d}");
    }
}

#[test]
fn window_independence() {
    let small = solve_tritronquee(30.0, 3000, 0.0).unwrap();
    let big = profile();
    for &x in &[-5.0, 0.0, 5.0] {
        let a = I_h(&small, x).unwrap().value;
        let b = I_h(big, x).unwrap().value;
        assert!((a - b).abs() < 1e-5, "x={x}");
    }
}
