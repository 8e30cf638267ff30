//! Independent reference implementations shared by the integration tests.
//! None of these call into the code paths they are used to check.

#![allow(dead_code)]

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Q = Ratio<i128>;

/// Product-limit estimate at each distinct event time, in exact arithmetic.
pub fn km_oracle(times: &[i64], events: &[bool]) -> Vec<(i64, Q)> {
    let mut distinct: Vec<i64> = times.iter().zip(events).filter(|(_, &e)| e).map(|(&t, _)| t).collect();
    distinct.sort();
    distinct.dedup();
    let mut s = Q::from_integer(1);
    let mut out = Vec::new();
    for t in distinct {
        let at_risk = times.iter().filter(|&&x| x >= t).count() as i128;
        let d = times.iter().zip(events).filter(|(&x, &e)| e && x == t).count() as i128;
        s *= Q::new(at_risk - d, at_risk);
        out.push((t, s));
    }
    out
}

pub fn q_to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Two-sample log-rank score, variance and statistic in exact arithmetic.
/// Groups are given as (time, event) pairs on an integer time scale.
pub fn logrank_two_sample_oracle(a: &[(i64, bool)], b: &[(i64, bool)]) -> (Q, Q, Q, Q) {
    let mut times: Vec<i64> = a.iter().chain(b).filter(|x| x.1).map(|x| x.0).collect();
    times.sort();
    times.dedup();
    let mut observed = Q::from_integer(0);
    let mut expected = Q::from_integer(0);
    let mut var = Q::from_integer(0);
    for t in times {
        let ra = a.iter().filter(|x| x.0 >= t).count() as i128;
        let rb = b.iter().filter(|x| x.0 >= t).count() as i128;
        let da = a.iter().filter(|x| x.0 == t && x.1).count() as i128;
        let db = b.iter().filter(|x| x.0 == t && x.1).count() as i128;
        let r = ra + rb;
        let d = da + db;
        observed += Q::from_integer(da);
        expected += Q::new(d * ra, r);
        if r > 1 {
            var += Q::new(d * (r - d) * ra * rb, r * r * (r - 1));
        }
    }
    let u = observed - expected;
    (observed, expected, var, u * u / var)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
    }
    sum * h / 3.0
}

/// Gamma(k / 2) for integer k >= 1 from Gamma(1/2) = sqrt(pi) and Gamma(1) = 1.
fn half_gamma(k: usize) -> f64 {
    let mut g = if k.is_multiple_of(2) {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut a = if k.is_multiple_of(2) { 1.0 } else { 0.5 };
    while a < k as f64 / 2.0 {
        g *= a;
        a += 1.0;
    }
    g
}

/// Chi-square upper tail by quadrature after substituting t = u^2, which
/// removes the singularity at the origin for df = 1.
pub fn chi2_sf_oracle(x: f64, df: usize) -> f64 {
    let norm = 2f64.powf(df as f64 / 2.0) * half_gamma(df);
    let f = |u: f64| 2.0 * u.powi(df as i32 - 1) * (-u * u / 2.0).exp() / norm;
    let lo = x.sqrt();
    let hi = lo.max(1.0) + 40.0;
    simpson(f, lo, hi, 400_000)
}

/// P(Z > z) by quadrature of the normal density.
pub fn normal_sf_oracle(z: f64) -> f64 {
    let f = |u: f64| (-u * u / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
    simpson(f, z, z + 40.0, 400_000)
}

/// Upper quantile by bisection on the quadrature tail.
pub fn normal_upper_quantile_oracle(p: f64) -> f64 {
    let (mut lo, mut hi) = (-10.0, 10.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if normal_sf_oracle(mid) > p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Hommel adjusted p-values by closed testing: the adjusted value of H_i is
/// the largest Simes p-value over all intersection hypotheses containing i.
pub fn hommel_closed_testing(p: &[f64]) -> Vec<f64> {
    let n = p.len();
    let mut out = vec![0.0f64; n];
    for mask in 1u32..(1 << n) {
        let mut members: Vec<f64> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| p[i]).collect();
        members.sort_by(f64::total_cmp);
        let k = members.len() as f64;
        let simes = members
            .iter()
            .enumerate()
            .map(|(j, v)| k * v / (j + 1) as f64)
            .fold(f64::INFINITY, f64::min)
            .min(1.0);
        for (i, o) in out.iter_mut().enumerate() {
            if mask & (1 << i) != 0 {
                *o = o.max(simes);
            }
        }
    }
    out
}

/// Smallest within-cluster sum of squares over every partition of the rows
/// into exactly `k` non-empty blocks (restricted growth strings).
pub fn exhaustive_kmeans(rows: &[Vec<f64>], k: usize) -> (f64, Vec<usize>) {
    let n = rows.len();
    let mut best = (f64::INFINITY, Vec::new());
    let mut labels = vec![0usize; n];
    fn recurse(
        i: usize,
        used: usize,
        k: usize,
        labels: &mut Vec<usize>,
        rows: &[Vec<f64>],
        best: &mut (f64, Vec<usize>),
    ) {
        let n = rows.len();
        if n - i < k - used {
            return;
        }
        if i == n {
            if used == k {
                let w = wss(rows, labels, k);
                if w < best.0 {
                    *best = (w, labels.clone());
                }
            }
            return;
        }
        for c in 0..=used.min(k - 1) {
            labels[i] = c;
            recurse(i + 1, used.max(c + 1), k, labels, rows, best);
        }
    }
    recurse(0, 0, k, &mut labels, rows, &mut best);
    best
}

pub fn wss(rows: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let m = rows[0].len();
    let mut total = 0.0;
    for c in 0..k {
        let members: Vec<&Vec<f64>> = rows
            .iter()
            .zip(labels)
            .filter(|(_, &l)| l == c)
            .map(|(r, _)| r)
            .collect();
        if members.is_empty() {
            continue;
        }
        for q in 0..m {
            let mean = members.iter().map(|r| r[q]).sum::<f64>() / members.len() as f64;
            total += members.iter().map(|r| (r[q] - mean).powi(2)).sum::<f64>();
        }
    }
    total
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Survival-shaped curves exp(-rate * t) on t = 1..m with random rates.
pub fn random_curves(rng: &mut ChaCha8Rng, j: usize, m: usize) -> Vec<Vec<f64>> {
    (0..j)
        .map(|_| {
            let rate: f64 = rng.random_range(0.05..1.0);
            (1..=m).map(|t| (-rate * t as f64 / 4.0).exp()).collect()
        })
        .collect()
}

/// Kolmogorov-Smirnov statistic of `xs` against Uniform(0, 1).
pub fn ks_uniform(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}
