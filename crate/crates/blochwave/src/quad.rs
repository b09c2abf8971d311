//! Quadrature helpers.

use std::sync::OnceLock;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton iteration on P_n.
pub fn gauss_legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = (n + 1) / 2;
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for j in 2..=n {
                let p2 = ((2 * j - 1) as f64 * z * p1 - (j - 1) as f64 * p0) / j as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn gl8() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre_rule(8))
}

/// 8-point Gauss–Legendre on [a, b].
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (x, w) = gl8();
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    h * x.iter().zip(w).map(|(xi, wi)| wi * f(c + h * xi)).sum::<f64>()
}

/// Composite 8-point Gauss–Legendre over `panels` equal panels.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| gauss_legendre(&f, a + i as f64 * h, a + (i + 1) as f64 * h))
        .sum()
}

/// Running integral of `f` on the sample times `t`, one Gauss–Legendre panel per interval.
pub fn cumulative_gauss<F: Fn(f64) -> f64>(f: F, t: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in t.windows(2) {
        acc += gauss_legendre(&f, w[0], w[1]);
        out.push(acc);
    }
    out
}

/// Running trapezoid integral of uniformly spaced samples.
pub fn cumulative_trapezoid(y: &[f64], dt: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(y.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in y.windows(2) {
        acc += 0.5 * dt * (w[0] + w[1]);
        out.push(acc);
    }
    out
}

/// Trapezoid integral of `f` on [a, b] refined by Richardson extrapolation
/// (Romberg table) until successive diagonal entries agree to `rel_tol`.
pub fn romberg<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64, max_levels: usize) -> f64 {
    let mut prev_row = vec![0.5 * (b - a) * (f(a) + f(b))];
    let mut n = 1usize;
    for level in 1..max_levels {
        let h = (b - a) / (2 * n) as f64;
        let mid: f64 = (0..n).map(|i| f(a + (2 * i + 1) as f64 * h)).sum();
        let mut row = vec![0.5 * prev_row[0] + h * mid];
        for j in 1..=level {
            let factor = 4f64.powi(j as i32);
            let r = row[j - 1] + (row[j - 1] - prev_row[j - 1]) / (factor - 1.0);
            row.push(r);
        }
        let (last, before) = (row[level], prev_row[level - 1]);
        if level > 3 && (last - before).abs() <= rel_tol * last.abs().max(1e-300) {
            return last;
        }
        prev_row = row;
        n *= 2;
    }
    *prev_row.last().unwrap()
}

/// Trapezoid rule on uniform samples.
pub fn trapezoid(y: &[f64], dt: f64) -> f64 {
    if y.len() < 2 {
        return 0.0;
    }
    dt * (y.iter().sum::<f64>() - 0.5 * (y[0] + y[y.len() - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_integrates_polynomials() {
        for n in [1, 2, 5, 8, 16] {
            let (x, w) = gauss_legendre_rule(n);
            let deg = 2 * n - 1;
            let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((s - exact).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn sin_integral() {
        let v = gauss_legendre_composite(f64::sin, 0.0, std::f64::consts::PI, 4);
        assert!((v - 2.0).abs() < 1e-13);
        let r = romberg(f64::sin, 0.0, std::f64::consts::PI, 1e-12, 20);
        assert!((r - 2.0).abs() < 1e-11);
    }

    #[test]
    fn cumulative_matches_total() {
        let t: Vec<f64> = (0..=50).map(|i| i as f64 * 0.1).collect();
        let c = cumulative_gauss(f64::cos, &t);
        assert!((c[50] - 5f64.sin()).abs() < 1e-14);
    }
}
