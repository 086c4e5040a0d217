//! Slow, independent reference evaluations.
//!
//! Nothing in here is used by production code paths. Every routine is chosen
//! to share no algorithm with the implementation it checks: special functions
//! come from integral representations or textbook series, integrals come from
//! adaptive Gauss-Kronrod.

use std::f64::consts::PI;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel: f64, abs: f64, depth: u32) -> f64 {
    let (k, err) = kronrod15(f, a, b);
    if err <= abs.max(rel * k.abs()) || depth == 0 {
        return k;
    }
    let m = 0.5 * (a + b);
    adapt(f, a, m, rel, abs * 0.5, depth - 1) + adapt(f, m, b, rel, abs * 0.5, depth - 1)
}

/// Adaptive Gauss-Kronrod (7/15) integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64, abs: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    adapt(&f, a, b, rel, abs, 48)
}

/// J0 from the Bessel integral (1/pi) * int_0^pi cos(x sin t) dt.
///
/// The integrand is pi-periodic and entire, so the midpoint rule converges
/// geometrically.
pub fn j0_integral(x: f64) -> f64 {
    let n = 64 + 2 * x.abs().ceil() as usize;
    let h = PI / n as f64;
    let mut s = 0.0;
    for k in 0..n {
        let t = (k as f64 + 0.5) * h;
        s += (x * t.sin()).cos();
    }
    s / n as f64
}

/// Truncated power series sum_k (-x^2/4)^k / (k!)^2.
pub fn j0_series(x: f64, terms: usize) -> f64 {
    let q = -0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..terms {
        term *= q / (k as f64 * k as f64);
        sum += term;
    }
    sum
}

/// Bisection on a bracketing interval.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let mut flo = f(lo);
    for _ in 0..iters {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// exp(x) * K1(x) from int_0^inf exp(-x (cosh t - 1)) cosh t dt.
pub fn k1_scaled_integral(x: f64) -> f64 {
    let t_max = (1.0 + 60.0 / x).acosh();
    integrate(
        |t| {
            let s = (0.5 * t).sinh();
            (-2.0 * x * s * s).exp() * t.cosh()
        },
        0.0,
        t_max,
        1e-14,
        0.0,
    )
}

/// K1(x) from its integral representation.
pub fn k1_integral(x: f64) -> f64 {
    k1_scaled_integral(x) * (-x).exp()
}

/// exp(x) * E1(x) from int_0^inf exp(-x (e^s - 1)) ds.
pub fn e1_scaled_integral(x: f64) -> f64 {
    let s_max = (1.0 + 60.0 / x).ln();
    integrate(|s| (-x * s.exp_m1()).exp(), 0.0, s_max, 1e-14, 0.0)
}

/// Ei(-x) = -int_x^inf e^{-t}/t dt.
pub fn ei_neg_integral(x: f64) -> f64 {
    -e1_scaled_integral(x) * (-x).exp()
}

fn erfc_nonneg(z: f64) -> f64 {
    if z < 2.0 {
        // Kummer-type series, all terms positive.
        let mut term = z;
        let mut sum = z;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * z * z / (2.0 * n + 1.0);
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
        }
        1.0 - 2.0 / PI.sqrt() * (-z * z).exp() * sum
    } else {
        // Laplace continued fraction, evaluated from the tail.
        let mut t = 0.0;
        for n in (1..=6000).rev() {
            t = (n as f64 * 0.5) / (z + t);
        }
        (-z * z).exp() / PI.sqrt() / (z + t)
    }
}

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
pub fn gaussian_q_series(x: f64) -> f64 {
    let z = x.abs() / std::f64::consts::SQRT_2;
    let tail = 0.5 * erfc_nonneg(z);
    if x >= 0.0 {
        tail
    } else {
        1.0 - tail
    }
}

/// Kolmogorov-Smirnov distance between sorted samples and a reference CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sorted: &[f64], cdf: F) -> f64 {
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let c = cdf(x);
            (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
        })
        .fold(0.0, f64::max)
}
