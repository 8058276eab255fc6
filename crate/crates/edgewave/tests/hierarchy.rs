use edgewave::hierarchy::{lenard_l, residual};

/// Derivatives `q, q', ..., q^{(n)}` of `q(x) = sin(x) exp(-x^2/8)` at `x0`,
/// read off the product of the two Taylor series.
fn jet(x0: f64, n: usize) -> Vec<f64> {
    let sin: Vec<f64> = (0..=n)
        .scan(1.0, |fact, i| {
            if i > 0 {
                *fact *= i as f64;
            }
            Some((x0 + i as f64 * std::f64::consts::FRAC_PI_2).sin() / *fact)
        })
        .collect();
    // exp(g) with g(t) = -(x0 + t)^2/8 + x0^2/8 = -x0 t/4 - t^2/8, using
    // m e_m = sum_{i=1}^{m} i g_i e_{m-i}.
    let g = [0.0, -x0 / 4.0, -1.0 / 8.0];
    let mut e = vec![(-x0 * x0 / 8.0).exp()];
    for m in 1..=n {
        let s: f64 = (1..=m.min(2)).map(|i| i as f64 * g[i] * e[m - i]).sum();
        e.push(s / m as f64);
    }
    let mut fact = 1.0;
    (0..=n)
        .map(|m| {
            if m > 0 {
                fact *= m as f64;
            }
            fact * (0..=m).map(|i| sin[i] * e[m - i]).sum::<f64>()
        })
        .collect()
}

fn q(x: f64) -> f64 {
    x.sin() * (-x * x / 8.0).exp()
}

/// Sixth-order central differences for the first and third derivatives.
fn d1(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = [3.0 / 4.0, -3.0 / 20.0, 1.0 / 60.0];
    (1..=3).map(|i| c[i - 1] * (f(x + i as f64 * h) - f(x - i as f64 * h))).sum::<f64>() / h
}

fn d3(f: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let c = [-61.0 / 30.0, 169.0 / 120.0, -3.0 / 10.0, 7.0 / 240.0];
    (1..=4).map(|i| c[i - 1] * (f(x + i as f64 * h) - f(x - i as f64 * h))).sum::<f64>() / (h * h * h)
}

#[test]
fn taylor_jet_matches_finite_differences() {
    let x = 0.7;
    let j = jet(x, 3);
    assert!((j[0] - q(x)).abs() < 1e-15);
    assert!((j[1] - d1(&q, x, 1e-2)).abs() < 1e-10);
    assert!((j[3] - d3(&q, x, 1e-2)).abs() < 1e-8);
}

#[test]
fn symbolic_members_match_numerical_recursion() {
    // L_{j+1}' = L_j'''/4 - 2 q L_j' - q' L_j, with every derivative of the
    // evaluated L_j and L_{j+1} taken by finite differences.
    for j in 0..5 {
        let lj = lenard_l(j).unwrap();
        let lnext = lenard_l(j + 1).unwrap();
        let order = 2 * j + 2;
        let fj = |x: f64| lj.eval(&jet(x, order));
        let fnext = |x: f64| lnext.eval(&jet(x, order));
        for &x in &[-2.3, -0.4, 0.9, 1.8] {
            let h = 2e-2;
            let lhs = d1(&fnext, x, h);
            let (qv, dq) = (q(x), jet(x, 1)[1]);
            let rhs = d3(&fj, x, h) / 4.0 - 2.0 * qv * d1(&fj, x, h) - dq * fj(x);
            let scale = 1.0 + lhs.abs();
            assert!((lhs - rhs).abs() < 1e-6 * scale, "j={j} x={x}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn residual_of_k1_equation_on_test_function() {
    // residual = x + L_2 + t_1 L_0 with L_0 = -4q.
    let x = 0.9;
    let v = jet(x, 4);
    let l2 = -v[4] / 4.0 + 5.0 * v[0] * v[2] + 2.5 * v[1] * v[1] - 10.0 * v[0].powi(3);
    let r = residual(1, &[0.6], x, &v).unwrap();
    assert!((r - (x + l2 - 2.4 * v[0])).abs() < 1e-13);
}
