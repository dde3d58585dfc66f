//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use subblock::bounds::{binary_entropy, penalty_bound_bec, penalty_bound_bsc, penalty_bound_z};
use subblock::capacity::{capacity_power, ccc_capacity_fixed_p, cscc_capacity, cscc_capacity_fixed_p, oracle_vector_mi};
use subblock::energy::{self, BufferConfig, SubblockOrder};
use subblock::exponent::{self, ExponentCurve, SpherePackingPoint};
use subblock::finiteblock::{joint_decoding_lower_bound, lsd_rate_bsc};
use subblock::secc::{asymmetry_witness, per_input_information, secc_capacity, secc_uniform_rate};
use subblock::{Channel, Composition, Distribution};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e<T: std::fmt::Display>(err: T) -> String {
    err.to_string()
}

fn comp(c: &[usize]) -> Composition {
    Composition::new(c.to_vec()).unwrap()
}

/// Symmetry-reduced CSCC rate equals the brute-force vector-channel value.
fn symmetry_reduction() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20240601);
    let mut worst: f64 = 0.0;
    let instances = 60;
    for i in 0..instances {
        let k = rng.random_range(2..=3usize);
        let s = rng.random_range(2..=3usize);
        let len = 2 + i % 5;
        let rows: Vec<Vec<f64>> = (0..k)
            .map(|_| {
                let mut raw: Vec<f64> = (0..s).map(|_| rng.random_range(0.0..1.0)).collect();
                // occasional structural zeros
                if rng.random_bool(0.2) {
                    raw[rng.random_range(0..s)] = 0.0;
                }
                let t: f64 = raw.iter().sum();
                raw.into_iter().map(|v| v / t).collect()
            })
            .collect();
        let mut counts = vec![0; k];
        for _ in 0..len {
            counts[rng.random_range(0..k)] += 1;
        }
        let ch = Channel::new(rows.clone(), vec![0.0; k]).map_err(e)?;
        let p = Composition::new(counts.clone()).map_err(e)?;
        let fast = cscc_capacity_fixed_p(&ch, &p).map_err(e)?.rate;
        let lib_oracle = oracle_vector_mi(&ch, &p).map_err(e)?;
        let brute = uniform_vector_mi(&rows, &type_class_by_filter(&counts));
        let diff = (fast - brute).abs().max((lib_oracle - brute).abs());
        worst = worst.max(diff);
        ensure(diff <= 1e-9, format!("instance {i}: {counts:?} on {rows:?}: {fast} vs {brute}"))?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), format!("took {elapsed:?}"))?;
    Ok(format!("{instances} instances, max diff {worst:.2e}, {elapsed:.2?}"))
}

/// Noiseless channels: CSCC rate is `log2 |T_P| / L`, SECC rate `log2 |A| / L`.
fn noiseless_closed_forms() -> Outcome {
    let mut checked = 0;
    for k in [2usize, 3] {
        let ch = Channel::noiseless(k).map_err(e)?;
        for len in 1..=(if k == 2 { 6 } else { 4 }) {
            for seq in all_sequences(k, len) {
                let counts = counts_of(&seq, k);
                if seq != { let mut s = seq.clone(); s.sort(); s } {
                    continue;
                }
                let want = (multinomial(&counts) as f64).log2() / len as f64;
                let got = cscc_capacity_fixed_p(&ch, &comp(&counts)).map_err(e)?.rate;
                ensure((got - want).abs() <= 1e-12, format!("CSCC {counts:?}: {got} vs {want}"))?;
                checked += 1;
            }
            for b in [0.0, 0.5, 1.0] {
                if b > (k - 1) as f64 {
                    continue;
                }
                let members = all_sequences(k, len)
                    .into_iter()
                    .filter(|s| s.iter().sum::<usize>() as f64 >= b * len as f64 - 1e-12)
                    .count();
                let want = (members as f64).log2() / len as f64;
                let uniform = secc_uniform_rate(&ch, len, b).map_err(e)?;
                let exact = secc_capacity(&ch, len, b, 1e-13).map_err(e)?.rate;
                ensure((uniform - want).abs() <= 1e-12, format!("uniform SECC k={k} L={len} B={b}: {uniform} vs {want}"))?;
                ensure((exact - want).abs() <= 1e-12, format!("SECC k={k} L={len} B={b}: {exact} vs {want}"))?;
                checked += 2;
            }
        }
    }
    let ch = Channel::noiseless(2).map_err(e)?;
    let c = cscc_capacity(&ch, 2, 0.5).map_err(e)?.rate;
    let s = secc_capacity(&ch, 2, 0.5, 1e-13).map_err(e)?.rate;
    ensure((c - 0.5).abs() <= 1e-12 && (s - 3f64.log2() / 2.0).abs() <= 1e-12, format!("L=2: {c}, {s}"))?;
    Ok(format!("{checked} closed forms; L=2, B=0.5: CSCC {c}, SECC {s:.5}"))
}

/// `C_CSCC <= C_SECC <= C_CCC`, and the uniform-SECC / CSCC crossover at L = 8.
fn sandwich_chain() -> Outcome {
    let p0s: Vec<f64> = (1..=9).map(|i| i as f64 * 0.05).collect();
    let bs = [0.0, 0.25, 0.5, 0.6, 0.75, 0.9, 1.0];
    // a duality gap of 1e-10 bits keeps every computed rate within 1e-10 of
    // its optimum, inside the 1e-9 comparison slack
    let mut worst = f64::INFINITY;
    for &p0 in &p0s {
        let ch = Channel::bsc(p0).map_err(e)?;
        for &b in &bs {
            let ccc = capacity_power(&ch, b, 1e-10).map_err(e)?.rate;
            for len in 2..=4 {
                let cscc = cscc_capacity(&ch, len, b).map_err(e)?.rate;
                let secc = secc_capacity(&ch, len, b, 1e-10).map_err(e)?.rate;
                let uniform = secc_uniform_rate(&ch, len, b).map_err(e)?;
                let slack = (secc - cscc).min(ccc - secc).min(secc - uniform);
                worst = worst.min(slack);
                ensure(slack >= -1e-9, format!("p0={p0} B={b} L={len}: cscc {cscc}, uniform {uniform}, secc {secc}, ccc {ccc}"))?;
            }
            let uniform8 = secc_uniform_rate(&ch, 8, b).map_err(e)?;
            let cscc8 = cscc_capacity(&ch, 8, b).map_err(e)?.rate;
            worst = worst.min(ccc - uniform8).min(ccc - cscc8);
            ensure(uniform8 <= ccc + 1e-9 && cscc8 <= ccc + 1e-9, format!("L=8 p0={p0} B={b}"))?;
        }
    }
    let (mut above, mut below) = (None, None);
    for i in 1..50 {
        let p0 = i as f64 / 100.0;
        let ch = Channel::bsc(p0).map_err(e)?;
        let u = secc_uniform_rate(&ch, 8, 0.6).map_err(e)?;
        let c = cscc_capacity(&ch, 8, 0.6).map_err(e)?.rate;
        if u > c + 1e-9 && above.is_none() {
            above = Some(p0);
        }
        if u < c - 1e-9 && below.is_none() {
            below = Some(p0);
        }
    }
    ensure(above.is_some() && below.is_some(), format!("no crossover: U_A > CSCC at {above:?}, < at {below:?}"))?;
    Ok(format!(
        "min slack {worst:.2e}; L=8, B=0.6: U_A > CSCC at p0={}, U_A < CSCC at p0={}",
        above.unwrap(),
        below.unwrap()
    ))
}

fn measured_penalty(ch: &Channel, rows: &[Vec<f64>], p: &Composition) -> Result<f64, String> {
    let ccc = mi(rows, &p.probabilities());
    let cscc = if p.length() <= 6 {
        uniform_vector_mi(rows, &type_class_by_filter(p.counts()))
    } else {
        cscc_capacity_fixed_p(ch, p).map_err(e)?.rate
    };
    Ok(ccc - cscc)
}

/// `0 <= penalty <= family bound <= r(L, P)` on BSC, BEC and Z-channel grids.
fn penalty_bounds() -> Outcome {
    let big = comp(&[8, 8]);
    let r16 = 1.0 - (multinomial(&[8, 8]) as f64).log2() / 16.0;
    ensure((big.rate_loss() - r16).abs() <= 1e-12, "r(16, (8, 8))")?;
    let mut max_ratio: f64 = 0.0;
    for i in 1..=50 {
        let p0 = 0.5 * i as f64 / 51.0;
        let ch = Channel::bsc(p0).map_err(e)?;
        let rows = bsc_rows(p0);
        for p in [comp(&[8, 8]), comp(&[2, 2]), comp(&[3, 3]), comp(&[2, 4]), comp(&[1, 5])] {
            let penalty = measured_penalty(&ch, &rows, &p)?;
            let bound = penalty_bound_bsc(p0, &p).map_err(e)?.upper;
            let r = p.rate_loss();
            ensure(
                penalty >= -1e-12 && penalty <= bound + 1e-9 && bound < r,
                format!("BSC p0={p0} {p}: penalty {penalty}, MGL {bound}, r {r}"),
            )?;
            ensure(penalty >= 1e-12 || p.length() > 4, format!("BSC p0={p0} {p}: penalty not strictly positive"))?;
            if p == big {
                max_ratio = max_ratio.max(penalty / bound);
            }
        }
    }
    for i in 1..=20 {
        let eps = i as f64 / 21.0;
        let rows = vec![vec![1.0 - eps, 0.0, eps], vec![0.0, 1.0 - eps, eps]];
        let ch = Channel::bec(eps).map_err(e)?;
        for p in [comp(&[2, 2]), comp(&[3, 3]), comp(&[1, 4]), comp(&[8, 8])] {
            let penalty = measured_penalty(&ch, &rows, &p)?;
            let bound = penalty_bound_bec(eps, &p).map_err(e)?.upper;
            ensure(
                penalty >= -1e-12 && penalty <= bound + 1e-9 && bound <= p.rate_loss() + 1e-12,
                format!("BEC eps={eps} {p}: penalty {penalty}, bound {bound}"),
            )?;
        }
    }
    for i in 1..=20 {
        let p0 = i as f64 / 21.0;
        let rows = vec![vec![1.0, 0.0], vec![p0, 1.0 - p0]];
        let ch = Channel::z(p0).map_err(e)?;
        for p in [comp(&[2, 2]), comp(&[3, 3]), comp(&[1, 4]), comp(&[4, 2]), comp(&[8, 8])] {
            let penalty = measured_penalty(&ch, &rows, &p)?;
            let bound = penalty_bound_z(p0, &p).map_err(e)?.upper;
            ensure(
                penalty >= -1e-12 && penalty <= bound + 1e-9,
                format!("Z p0={p0} {p}: penalty {penalty}, bound {bound}"),
            )?;
        }
    }
    Ok(format!("BSC/BEC/Z grids hold; L=16 exact penalty reaches {:.3} of the MGL bound", max_ratio))
}

/// Sphere-packing against grid-search oracles, plus convexity, zero region,
/// continuity of `E_r` and the KKT rate condition.
fn exponents() -> Outcome {
    let mut worst_oracle: f64 = 0.0;
    let mut worst_kkt: f64 = 0.0;
    let bsc = Channel::bsc(0.1).map_err(e)?;
    let u = Distribution::uniform(2);
    for r in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5] {
        let got = exponent::sphere_packing_point(&bsc, &u, r, 1e-12).map_err(e)?;
        let want = esp_bsc_uniform_grid(0.1, r, 4_000_000);
        worst_oracle = worst_oracle.max((got.exponent() - want).abs());
        if let SpherePackingPoint::Tilted(t) = &got {
            worst_kkt = worst_kkt.max((t.rate - r).abs());
        }
    }
    for (p0, law, rates) in [(0.2, [0.3, 0.7], [0.03, 0.08, 0.12]), (0.05, [0.6, 0.4], [0.2, 0.4, 0.6])] {
        let ch = Channel::bsc(p0).map_err(e)?;
        let p = Distribution::new(law.to_vec()).map_err(e)?;
        for r in rates {
            let got = exponent::sphere_packing_point(&ch, &p, r, 1e-12).map_err(e)?;
            let want = esp_binary_grid(&bsc_rows(p0), &law, r);
            worst_oracle = worst_oracle.max((got.exponent() - want).abs());
            if let SpherePackingPoint::Tilted(t) = &got {
                worst_kkt = worst_kkt.max((t.rate - r).abs());
            }
        }
    }
    ensure(worst_oracle <= 1e-5, format!("oracle gap {worst_oracle:.2e}"))?;
    ensure(worst_kkt <= 1e-8, format!("|I(P,V) - R| = {worst_kkt:.2e}"))?;

    let i_pw = mi(&bsc_rows(0.1), &[0.5, 0.5]);
    let grid: Vec<f64> = (1..=50).map(|k| i_pw * k as f64 / 51.0).collect();
    let values: Vec<f64> = grid
        .iter()
        .map(|&r| exponent::sphere_packing(&bsc, &u, r, 1e-12))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    for w in values.windows(3) {
        ensure(w[1] <= 0.5 * (w[0] + w[2]) + 1e-8, "E_sp not midpoint convex")?;
    }
    ensure(values.iter().all(|&v| v > 1e-12), "E_sp not positive below I(P, W)")?;
    for r in [i_pw, i_pw + 1e-9, i_pw + 0.1] {
        ensure(exponent::sphere_packing(&bsc, &u, r, 1e-12).map_err(e)? == 0.0, format!("E_sp({r}) != 0"))?;
    }
    let curve = ExponentCurve::new(&bsc, &u, 1e-12).map_err(e)?;
    // E_r is the straight line E_sp(r_hat) + r_hat - R below r_hat and
    // follows E_sp above it
    let above = exponent::sphere_packing(&bsc, &u, curve.r_hat * (1.0 + 1e-12), 1e-12).map_err(e)?;
    let below = curve.random_coding(curve.r_hat * (1.0 - 1e-12)).map_err(e)?;
    let jump = (above - below).abs().max((curve.random_coding(curve.r_hat).map_err(e)? - curve.e_sp_at_r_hat).abs());
    ensure(jump <= 1e-9, format!("E_r jumps by {jump:.2e} at r_hat"))?;
    Ok(format!("oracle gap {worst_oracle:.2e}, KKT {worst_kkt:.2e}, E_r jump {jump:.2e}"))
}

/// Outage-free at L = 8, forced outage at L = 9 (b = (0, 1), B = 0.5, E_max = 4).
fn energy_tightness() -> Outcome {
    let start = Instant::now();
    let ch = Channel::noiseless(2).map_err(e)?;
    let (b, e_max) = (0.5, 4.0);

    let p8 = comp(&[4, 4]);
    let g = energy::g_value(&p8, &ch, b);
    ensure(g == 2.0, format!("G = {g}"))?;
    let cfg = BufferConfig::new(e_max, b, g).map_err(e)?;
    let mut outages = 0;
    for seed in 0..1000 {
        let seq = energy::cscc_sequence(&p8, &ch, b, 16, SubblockOrder::Random(seed)).map_err(e)?;
        outages += energy::simulate(&cfg, &ch, &seq).map_err(e)?.outages();
    }
    ensure(outages == 0, format!("L=8: {outages} outages over 1000 sequences"))?;

    // a length-9 subblock cannot be balanced; the feasible composition closest
    // to balance is (4, 5)
    let p9 = comp(&[4, 5]);
    ensure(p9.energy(&ch) >= b, "(4, 5) infeasible")?;
    let seq = energy::adversarial_codeword(&p9, &ch, b, 2).map_err(e)?;
    let from_full = energy::simulate(&BufferConfig::new(e_max, b, e_max).map_err(e)?, &ch, &seq).map_err(e)?;
    let g9 = energy::g_value(&p9, &ch, b);
    let from_g = energy::simulate(&BufferConfig::new(e_max, b, g9).map_err(e)?, &ch, &seq).map_err(e)?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    ensure(
        from_full.outages() + from_g.outages() >= 1,
        format!(
            "L=8: 0 outages over 1000 sequences; L=9 adversarial (4,5): 0 outages (2G = {} <= E_max = {e_max})",
            2.0 * g9
        ),
    )?;
    Ok(format!("L=8: 0 outages; L=9: {} outages; {elapsed:.2?}", from_full.outages()))
}

/// `I(01; Y) != I(11; Y)` while `I(01; Y) == I(10; Y)` bit for bit.
fn asymmetry() -> Outcome {
    let mut details = Vec::new();
    for p0 in [0.1, 0.25, 0.4] {
        let (i01, i11) = asymmetry_witness(p0).map_err(e)?;
        let info = per_input_information(&Channel::bsc(p0).map_err(e)?, 2, 0.5).map_err(e)?;
        let get = |x: &[usize]| info.iter().find(|(s, _)| s == x).map(|(_, v)| *v).unwrap();
        let i10 = get(&[1, 0]);
        // independent evaluation with A = {01, 10, 11} uniform
        let rows = bsc_rows(p0);
        let a = [[0usize, 1], [1, 0], [1, 1]];
        let w = |x: &[usize; 2], y: &[usize]| rows[x[0]][y[0]] * rows[x[1]][y[1]];
        let oracle = |x: &[usize; 2]| -> f64 {
            all_sequences(2, 2)
                .iter()
                .map(|y| {
                    let q: f64 = a.iter().map(|s| w(s, y)).sum::<f64>() / 3.0;
                    let v = w(x, y);
                    if v > 0.0 { v * (v / q).log2() } else { 0.0 }
                })
                .sum()
        };
        ensure((i01 - oracle(&a[0])).abs() <= 1e-12 && (i11 - oracle(&a[2])).abs() <= 1e-12, format!("p0={p0}: oracle mismatch"))?;
        ensure(i01 == i10, format!("p0={p0}: I(01) = {i01} but I(10) = {i10}"))?;
        ensure((i01 - i11).abs() > 1e-4, format!("p0={p0}: |I(01) - I(11)| = {}", (i01 - i11).abs()))?;
        details.push(format!("{p0}: {:.4}", i01 - i11));
    }
    Ok(format!("I(01) - I(11) = {}", details.join(", ")))
}

/// `(C - rate) sqrt(n)` settles within 2% from n = 2^10 to 2^12 (epsilon = 1e-3)
/// and the LSD rate sits below the joint-decoding bound.
fn lsd_scaling() -> Outcome {
    let (p, eps) = (0.11, 1e-3);
    let c = 1.0 - h2(p);
    for n in [16usize, 128, 1024, 4096] {
        let got = lsd_rate_bsc(p, n, eps).map_err(e)?;
        ensure((got - lsd_oracle(p, n, eps)).abs() <= 1e-10, format!("n={n}: {got} vs oracle"))?;
    }
    let mut l = 16;
    while l <= 4096 {
        let lsd = lsd_rate_bsc(p, l, eps).map_err(e)?;
        let joint = joint_decoding_lower_bound(p, l).map_err(e)?;
        ensure(lsd < joint, format!("L={l}: LSD {lsd} >= joint {joint}"))?;
        l *= 2;
    }
    let scaled = |n: usize| -> Result<f64, String> { Ok((c - lsd_rate_bsc(p, n, eps).map_err(e)?) * (n as f64).sqrt()) };
    let (a, b) = (scaled(1 << 10)?, scaled(1 << 12)?);
    let change = (b - a).abs() / a.abs();
    ensure(
        change <= 0.02,
        format!("ordering holds; (C - R) sqrt(n): {a:.4} at 2^10, {b:.4} at 2^12, change {:.2}% > 2%", 100.0 * change),
    )?;
    Ok(format!("change {:.2}%", 100.0 * change))
}

/// Capacity-power: non-increasing, concave, flat up to the free optimum's energy.
fn capacity_power_shape() -> Outcome {
    let mut details = Vec::new();
    for (name, ch, rows) in [
        ("BSC(0.1)", Channel::bsc(0.1).map_err(e)?, bsc_rows(0.1)),
        ("Z(0.3)", Channel::z(0.3).map_err(e)?, vec![vec![1.0, 0.0], vec![0.3, 0.7]]),
    ] {
        let f = |t: f64| mi(&rows, &[1.0 - t, t]);
        let t_star = golden_max(f, 0.0, 1.0);
        let free = f(t_star);
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let values: Vec<f64> = grid
            .iter()
            .map(|&b| capacity_power(&ch, b, 1e-12).map(|r| r.rate))
            .collect::<Result<_, _>>()
            .map_err(e)?;
        for (b, v) in grid.iter().zip(&values) {
            // binary input: the constrained optimum is I at max(B, t*)
            let want = f(b.max(t_star));
            ensure((v - want).abs() <= 1e-9, format!("{name} B={b}: {v} vs {want}"))?;
            if *b <= t_star {
                ensure((v - free).abs() <= 1e-9, format!("{name} B={b}: {v} vs free capacity {free}"))?;
            }
        }
        ensure(values.windows(2).all(|w| w[1] <= w[0] + 1e-9), format!("{name}: not non-increasing"))?;
        ensure(
            values.windows(3).all(|w| w[1] >= 0.5 * (w[0] + w[2]) - 1e-9),
            format!("{name}: not midpoint concave"),
        )?;
        details.push(format!("{name} flat to B={t_star:.4}"));
    }
    let bsc = Channel::bsc(0.1).map_err(e)?;
    let free = 1.0 - binary_entropy(0.1).map_err(e)?;
    ensure((ccc_capacity_fixed_p(&bsc, &Distribution::uniform(2)) - free).abs() <= 1e-12, "CCC at uniform")?;
    Ok(details.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("symmetry reduction exactness", symmetry_reduction),
        ("noiseless closed forms", noiseless_closed_forms),
        ("sandwich chain", sandwich_chain),
        ("penalty bounds", penalty_bounds),
        ("exponent correctness", exponents),
        ("energy bound tightness", energy_tightness),
        ("asymmetry witness", asymmetry),
        ("LSD scaling", lsd_scaling),
        ("capacity-power function", capacity_power_shape),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{elapsed:.2?}]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({detail}) [{elapsed:.2?}]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
