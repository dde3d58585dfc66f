//! Independent brute-force oracles shared by the integration tests. Nothing
//! here calls into the library's enumeration or capacity code.

#![allow(dead_code)]

/// `-x log2 x` with `0 log 0 = 0`.
pub fn nlog(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

pub fn h2(x: f64) -> f64 {
    nlog(x) + nlog(1.0 - x)
}

pub fn bsc_rows(p: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
}

/// All sequences in `{0..k}^len`, last coordinate fastest.
pub fn all_sequences(k: usize, len: usize) -> Vec<Vec<usize>> {
    let total = k.pow(len as u32);
    (0..total)
        .map(|mut j| {
            let mut s = vec![0; len];
            for pos in (0..len).rev() {
                s[pos] = j % k;
                j /= k;
            }
            s
        })
        .collect()
}

pub fn counts_of(seq: &[usize], k: usize) -> Vec<usize> {
    let mut c = vec![0; k];
    for &x in seq {
        c[x] += 1;
    }
    c
}

/// `I(X^L; Y^L) / L` with `X^L` uniform over `inputs`, by direct summation
/// over every output vector.
pub fn uniform_vector_mi(rows: &[Vec<f64>], inputs: &[Vec<usize>]) -> f64 {
    let len = inputs[0].len();
    let s = rows[0].len();
    let outputs = all_sequences(s, len);
    let n = inputs.len() as f64;
    let w = |x: &[usize], y: &[usize]| -> f64 { x.iter().zip(y).map(|(&a, &b)| rows[a][b]).product() };
    let mut h_y = 0.0;
    let mut h_y_given_x = 0.0;
    for y in &outputs {
        let q: f64 = inputs.iter().map(|x| w(x, y)).sum::<f64>() / n;
        h_y += nlog(q);
        for x in inputs {
            h_y_given_x += nlog(w(x, y)) / n;
        }
    }
    (h_y - h_y_given_x) / len as f64
}

/// Members of the type class with the given counts, by filtering `X^L`.
pub fn type_class_by_filter(counts: &[usize]) -> Vec<Vec<usize>> {
    let k = counts.len();
    let len: usize = counts.iter().sum();
    all_sequences(k, len)
        .into_iter()
        .filter(|s| counts_of(s, k) == counts)
        .collect()
}

/// Multinomial coefficient by big-enough integer arithmetic.
pub fn multinomial(counts: &[usize]) -> u128 {
    let mut result: u128 = 1;
    let mut n: u128 = 0;
    for &c in counts {
        for i in 1..=c as u128 {
            n += 1;
            result = result * n / i;
        }
    }
    result
}

/// `I(P, W)` for an input law over the rows.
pub fn mi(rows: &[Vec<f64>], p: &[f64]) -> f64 {
    let s = rows[0].len();
    let q: Vec<f64> = (0..s).map(|y| p.iter().zip(rows).map(|(px, r)| px * r[y]).sum()).collect();
    let h_y: f64 = q.iter().map(|&v| nlog(v)).sum();
    let h_y_x: f64 = p.iter().zip(rows).map(|(px, r)| px * r.iter().map(|&v| nlog(v)).sum::<f64>()).sum();
    h_y - h_y_x
}

/// `D(q || p)` for binary laws, bits.
pub fn d2(q: f64, p: f64) -> f64 {
    let t = |a: f64, b: f64| if a > 0.0 { a * (a / b).log2() } else { 0.0 };
    t(q, p) + t(1.0 - q, 1.0 - p)
}

/// Sphere-packing exponent of BSC(p) with uniform input by grid search over
/// symmetric test channels BSC(q): the smallest divergence among grid points
/// with `1 - h(q) <= R`.
pub fn esp_bsc_uniform_grid(p: f64, rate: f64, steps: usize) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let q = p + (0.5 - p) * i as f64 / steps as f64;
        if 1.0 - h2(q) <= rate {
            best = best.min(d2(q, p));
        }
    }
    best
}

/// Sphere-packing exponent of a binary-input, binary-output channel with an
/// arbitrary input law, by a zooming grid over `V = [[1-a, a], [b, 1-b]]`.
pub fn esp_binary_grid(w: &[Vec<f64>], p: &[f64], rate: f64) -> f64 {
    let objective = |a: f64, b: f64| -> Option<f64> {
        let v = vec![vec![1.0 - a, a], vec![b, 1.0 - b]];
        if mi(&v, p) > rate {
            return None;
        }
        let d0 = d2(a, w[0][1]);
        let d1 = d2(b, w[1][0]);
        Some(p[0] * d0 + p[1] * d1)
    };
    let (mut a_lo, mut a_hi, mut b_lo, mut b_hi) = (0.0, 1.0, 0.0, 1.0);
    let n = 200;
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for _ in 0..12 {
        let da = (a_hi - a_lo) / n as f64;
        let db = (b_hi - b_lo) / n as f64;
        for i in 0..=n {
            for j in 0..=n {
                let (a, b) = (a_lo + i as f64 * da, b_lo + j as f64 * db);
                if let Some(v) = objective(a, b) {
                    if v < best.0 {
                        best = (v, a, b);
                    }
                }
            }
        }
        a_lo = (best.1 - 4.0 * da).max(0.0);
        a_hi = (best.1 + 4.0 * da).min(1.0);
        b_lo = (best.2 - 4.0 * db).max(0.0);
        b_hi = (best.2 + 4.0 * db).min(1.0);
    }
    best.0
}

/// Inverse Gaussian tail by plain bisection on `erfc`.
pub fn qinv_bisect(eps: f64) -> f64 {
    let q = |x: f64| 0.5 * statrs::function::erf::erfc(x / std::f64::consts::SQRT_2);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if q(mid) > eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Rate approximation for local subblock decoding on BSC(p).
pub fn lsd_oracle(p: f64, n: usize, eps: f64) -> f64 {
    let nf = n as f64;
    1.0 - h2(p) - (p * (1.0 - p) / nf).sqrt() * ((1.0 - p) / p).log2() * qinv_bisect(eps) + nf.log2() / (2.0 * nf)
}

/// Maximizer of a concave function on `[lo, hi]` by golden-section search.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    0.5 * (lo + hi)
}
