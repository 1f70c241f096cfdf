//! Brute-force reference computations, written without the library's
//! rolling kernels, block scheduling or centered-weight slope.

#![allow(dead_code)]

pub const DAY: usize = 1440;

pub fn naive_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Mean of `x[i-n+1..=i]`.
pub fn causal(x: &[f64], i: usize, n: usize) -> f64 {
    naive_mean(&x[i + 1 - n..=i])
}

/// Mean of `x[i-(n/2-1)..=i+n/2]`.
pub fn centered(x: &[f64], i: usize, n: usize) -> f64 {
    naive_mean(&x[i + 1 - n / 2..=i + n / 2])
}

/// Least-squares slope from the 2x2 normal equations.
pub fn ls_slope(y: &[f64], h: f64) -> f64 {
    let n = y.len() as f64;
    let (mut sx, mut sxx, mut sy, mut sxy) = (0.0, 0.0, 0.0, 0.0);
    for (k, &v) in y.iter().enumerate() {
        let x = k as f64 * h;
        sx += x;
        sxx += x * x;
        sy += v;
        sxy += x * v;
    }
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

pub fn population_std(w: &[f64]) -> f64 {
    let m = naive_mean(w);
    (w.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / w.len() as f64).sqrt()
}

pub struct OracleSse {
    pub pe: f64,
    pub al: f64,
    pub mi: f64,
    pub count: usize,
}

/// SSE of Pe, Al and Mi against the centered trend at the target, over the
/// jointly valid issue indices, with `n = 100`, slope window 100, eps 0.5.
pub fn oracle_sse(x: &[f64], dt: usize) -> OracleSse {
    let n = 100;
    let eps = 0.5;
    let first = DAY + n - 1;
    let last = x.len() - 1 - n / 2 - dt;
    let dtf = dt as f64;
    let (mut pe, mut al, mut mi) = (0.0, 0.0, 0.0);
    for i in first..=last {
        let level = causal(x, i, n);
        let den = causal(x, i - DAY, n);
        let num = causal(x, i - DAY + dt, n);
        let sc = if den.abs() < eps { 1.0 } else { num / den };
        let slope = ls_slope(&x[i + 1 - n..=i], 1.0);
        let s_pe = level * (sc - 1.0) / dtf;
        let a = if slope.abs() < s_pe.abs() { slope } else { s_pe };
        let target = centered(x, i + dt, n);
        pe += (level * sc - target).powi(2);
        al += (level + slope * dtf - target).powi(2);
        mi += (level + a * dtf - target).powi(2);
    }
    OracleSse {
        pe,
        al,
        mi,
        count: last + 1 - first,
    }
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}
