//! Gauss-Legendre rules and a composite integrator built on them.

/// Nodes (ascending) and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                let (_, d) = legendre_with_derivative(n, z);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre integral of `f` over [a, b] with panels no wider than `panel`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panel: f64) -> f64 {
    const ORDER: usize = 10;
    thread_local! {
        static RULE: (Vec<f64>, Vec<f64>) = gauss_legendre(ORDER);
    }
    if a == b {
        return 0.0;
    }
    let m = ((b - a).abs() / panel).ceil().max(1.0) as usize;
    let h = (b - a) / m as f64;
    RULE.with(|(nodes, weights)| {
        let mut total = 0.0;
        for k in 0..m {
            let lo = a + k as f64 * h;
            let mid = lo + 0.5 * h;
            let mut s = 0.0;
            for (z, w) in nodes.iter().zip(weights) {
                s += w * f(mid + 0.5 * h * z);
            }
            total += 0.5 * h * s;
        }
        total
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(7);
        for deg in 0..=13 {
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let exact = if deg % 2 == 1 { 0.0 } else { 2.0 / (deg as f64 + 1.0) };
            assert!((s - exact).abs() < 1e-14, "degree {deg}: {s} vs {exact}");
        }
    }

    #[test]
    fn composite_rule_on_exponential() {
        let v = integrate(|x| x.exp(), 0.0, 3.0, 0.5);
        assert!((v - (3f64.exp() - 1.0)).abs() < 1e-12);
    }
}
