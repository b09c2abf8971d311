//! Bessel J0 and Airy Ai.

use std::f64::consts::{FRAC_PI_4, PI};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// First three positive zeros of J0.
pub const J0_ROOTS: [f64; 3] = [2.404825557695773, 5.520078110286311, 8.653727912911012];

/// Bessel function of the first kind, order zero.
///
/// Power series for |x| < 8, a periodic trapezoid rule on the integral
/// representation (1/π)∫₀^π cos(x sin θ) dθ for 8 ≤ |x| < 25, and the Hankel
/// asymptotic expansion beyond.
pub fn j0(x: f64) -> f64 {
    let x = x.abs();
    if x < 8.0 {
        j0_series(x)
    } else if x < 25.0 {
        j0_integral(x)
    } else {
        j0_asymptotic(x)
    }
}

/// Σ (−x²/4)^k / (k!)², summed exactly in 512-bit fixed point so the
/// alternating terms cancel without loss for large x.
pub fn j0_series(x: f64) -> f64 {
    const FRAC_BITS: i64 = 512;
    if x == 0.0 {
        return 1.0;
    }
    // x = m·2^e exactly
    let bits = x.abs().to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let (m, e) = if exp == 0 { (bits & ((1 << 52) - 1), -1074) } else { ((bits & ((1 << 52) - 1)) | (1 << 52), exp - 1075) };
    let m2 = BigInt::from(m) * BigInt::from(m);
    let shift = 2 * e - 2;
    let one = BigInt::one() << FRAC_BITS as usize;
    let mut term = one.clone();
    let mut sum = one;
    for k in 1u64.. {
        term *= &m2;
        term = if shift >= 0 { term << shift as usize } else { term >> (-shift) as usize };
        term /= BigInt::from(k * k);
        term = -term;
        if term.is_zero() {
            break;
        }
        sum += &term;
    }
    let top = sum.bits().saturating_sub(60) as usize;
    let mantissa = (&sum >> top).to_f64().unwrap_or(0.0);
    mantissa * 2f64.powi(top as i32 - FRAC_BITS as i32)
}

fn j0_integral(x: f64) -> f64 {
    // The integrand is smooth and π-periodic in θ, so the trapezoid rule converges
    // geometrically once the node count exceeds x.
    let n = (x as usize) + 40;
    let h = PI / n as f64;
    let s: f64 = (0..n).map(|i| (x * (i as f64 * h).sin()).cos()).sum();
    s / n as f64
}

fn j0_asymptotic(x: f64) -> f64 {
    let (mut p, mut q) = (0.0, 0.0);
    let mut b = 1.0;
    for k in 0..30 {
        if k > 0 {
            let odd = (2 * k - 1) as f64;
            b *= -odd * odd / (k as f64 * 8.0 * x);
        }
        match k % 4 {
            0 => p += b,
            1 => q += b,
            2 => p -= b,
            _ => q -= b,
        }
        if b.abs() < 1e-17 {
            break;
        }
    }
    let chi = x - FRAC_PI_4;
    (2.0 / (PI * x)).sqrt() * (p * chi.cos() - q * chi.sin())
}

/// The n-th positive zero of J0 (n ≥ 1), refined by bisection from McMahon's estimate.
pub fn j0_root(n: usize) -> f64 {
    assert!(n >= 1);
    if n <= J0_ROOTS.len() {
        return J0_ROOTS[n - 1];
    }
    let beta = (n as f64 - 0.25) * PI;
    let guess = beta + 1.0 / (8.0 * beta);
    let (mut lo, mut hi) = (guess - 0.3, guess + 0.3);
    let flo = j0(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (j0(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

const AI0: f64 = 0.355_028_053_887_817_24;
const AIP0: f64 = 0.258_819_403_792_806_8;

/// Airy function Ai(x): Maclaurin series for |x| ≤ 6, asymptotic expansions beyond.
pub fn airy_ai(x: f64) -> f64 {
    if x.abs() <= 6.0 {
        airy_series(x)
    } else if x > 0.0 {
        airy_asymptotic_pos(x)
    } else {
        airy_asymptotic_neg(-x)
    }
}

fn airy_series(x: f64) -> f64 {
    // Ai(x) = Ai(0) f(x) + Ai'(0) g(x) with f, g the two Maclaurin solutions.
    let x3 = x * x * x;
    let (mut f, mut tf) = (1.0, 1.0);
    let (mut g, mut tg) = (x, x);
    for k in 1..200 {
        let k3 = 3.0 * k as f64;
        tf *= x3 / ((k3 - 1.0) * k3);
        tg *= x3 / (k3 * (k3 + 1.0));
        f += tf;
        g += tg;
        if tf.abs() < 1e-18 * f.abs() && tg.abs() < 1e-18 * g.abs().max(1e-300) {
            break;
        }
    }
    AI0 * f - AIP0 * g
}

/// Coefficients u_k of the Airy asymptotic series.
fn airy_u(n: usize) -> Vec<f64> {
    let mut u = vec![1.0];
    for k in 1..n {
        let kf = k as f64;
        let prev = u[k - 1];
        u.push(prev * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf));
    }
    u
}

fn airy_asymptotic_pos(x: f64) -> f64 {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let u = airy_u(25);
    let mut sum = 0.0;
    let mut last = f64::INFINITY;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        sum += if k % 2 == 0 { term } else { -term };
        last = term.abs();
    }
    (-zeta).exp() / (2.0 * PI.sqrt() * x.powf(0.25)) * sum
}

fn airy_asymptotic_neg(z: f64) -> f64 {
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let u = airy_u(30);
    let (mut p, mut q) = (0.0, 0.0);
    let mut last = f64::INFINITY;
    for (k, uk) in u.iter().enumerate() {
        let term = uk / zeta.powi(k as i32);
        if term.abs() > last {
            break;
        }
        last = term.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * term;
        } else {
            q += sign * term;
        }
    }
    let phase = zeta + FRAC_PI_4;
    (phase.sin() * p - phase.cos() * q) / (PI.sqrt() * z.powf(0.25))
}
