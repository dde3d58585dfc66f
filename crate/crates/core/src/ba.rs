//! Blahut-Arimoto iteration with an optional linear energy reward.
//!
//! For a multiplier `lambda >= 0` the iteration maximizes
//! `I(P, W) + lambda * E_P[b]` over input laws `P`. With `lambda = 0` it is the
//! classic capacity computation. Each step reports the duality gap
//! `max_x c(x) - sum_x P(x) c(x)`, where `c(x) = D(W(.|x) || PW) + lambda b(x)`,
//! which bounds how far the current objective is from the optimum.

use nalgebra::{DMatrix, DVector};

use crate::channel::Channel;
use crate::error::{Error, Result};
use crate::numeric;
use crate::vector::VectorChannel;

const LN_2: f64 = std::f64::consts::LN_2;

/// Anything that can be viewed as a row-stochastic matrix.
pub trait TransitionMatrix {
    fn input_count(&self) -> usize;
    fn output_count(&self) -> usize;
    fn transition_row(&self, x: usize) -> &[f64];
}

impl TransitionMatrix for Channel {
    fn input_count(&self) -> usize {
        self.input_size()
    }
    fn output_count(&self) -> usize {
        self.output_size()
    }
    fn transition_row(&self, x: usize) -> &[f64] {
        self.row(x)
    }
}

impl TransitionMatrix for VectorChannel {
    fn input_count(&self) -> usize {
        VectorChannel::input_count(self)
    }
    fn output_count(&self) -> usize {
        VectorChannel::output_count(self)
    }
    fn transition_row(&self, x: usize) -> &[f64] {
        self.row(x)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BaOptions {
    /// Stop once the duality gap (bits) falls below this.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for BaOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iterations: 100_000,
        }
    }
}

/// Energy reward `lambda * b(x)`; `lambda` is in bits per energy unit.
#[derive(Debug, Clone, Copy)]
pub struct EnergyReward<'a> {
    pub energy: &'a [f64],
    pub lambda: f64,
}

#[derive(Debug, Clone)]
pub struct BaSolution {
    pub input: Vec<f64>,
    /// `I(P, W)` at the returned input law, bits.
    pub rate: f64,
    /// Upper bound on the Lagrangian optimum, bits: `max_x c(x)`.
    pub dual_bound: f64,
    /// `dual_bound - (rate + lambda E[b])`.
    pub gap: f64,
    pub iterations: usize,
}

/// Inputs up to this count get a periodic interior-point refinement on top of
/// the multiplicative update, which is slow when the optimum is poorly
/// conditioned.
const BARRIER_MAX_INPUTS: usize = 512;
/// Work cap for forming the Hessian (`inputs^2 * outputs`).
const BARRIER_MAX_WORK: usize = 20_000_000;
const BARRIER_FIRST: usize = 200;
const BARRIER_PERIOD: usize = 1000;
const BARRIER_MAX_STEPS: usize = 200;

struct State {
    q: Vec<f64>,
    c: Vec<f64>,
    c_max: f64,
    gap: f64,
}

/// Runs the iteration. `allowed` restricts the support of the input law;
/// `init` seeds it (uniform over `allowed` otherwise).
pub fn blahut_arimoto<M: TransitionMatrix + ?Sized>(
    m: &M,
    reward: Option<EnergyReward<'_>>,
    allowed: Option<&[bool]>,
    init: Option<&[f64]>,
    opts: BaOptions,
) -> Result<BaSolution> {
    let n = m.input_count();
    let is_allowed = |x: usize| allowed.is_none_or(|a| a[x]);
    let support = (0..n).filter(|&x| is_allowed(x)).count();
    if support == 0 {
        return Err(Error::Infeasible("no admissible input symbols".into()));
    }

    let mut p: Vec<f64> = match init {
        Some(p0) => (0..n).map(|x| if is_allowed(x) { p0[x].max(1e-300) } else { 0.0 }).collect(),
        None => (0..n).map(|x| if is_allowed(x) { 1.0 } else { 0.0 }).collect(),
    };
    normalize(&mut p);

    let tol_nats = opts.tol * LN_2;
    let refine = support <= BARRIER_MAX_INPUTS && support * support * m.output_count() <= BARRIER_MAX_WORK;

    for iteration in 1..=opts.max_iterations {
        let state = evaluate(m, reward, &is_allowed, &p);
        if state.gap <= tol_nats || iteration == opts.max_iterations {
            if state.gap > tol_nats {
                return Err(Error::NoConvergence {
                    what: format!("Blahut-Arimoto (gap {:.3e} bits)", state.gap / LN_2),
                    iterations: iteration,
                });
            }
            let rate = information(m, &p, &state.q);
            return Ok(BaSolution {
                input: p,
                rate,
                dual_bound: state.c_max / LN_2,
                gap: state.gap / LN_2,
                iterations: iteration,
            });
        }
        if refine && iteration >= BARRIER_FIRST && (iteration - BARRIER_FIRST).is_multiple_of(BARRIER_PERIOD) {
            if let Some(better) = barrier_polish(m, reward, &is_allowed, &p, &state, tol_nats) {
                p = better;
                continue;
            }
        }
        for x in 0..n {
            if p[x] > 0.0 {
                p[x] *= (state.c[x] - state.c_max).exp();
            }
        }
        normalize(&mut p);
    }
    unreachable!("loop returns on its last iteration")
}

fn evaluate<M: TransitionMatrix + ?Sized>(
    m: &M,
    reward: Option<EnergyReward<'_>>,
    is_allowed: &impl Fn(usize) -> bool,
    p: &[f64],
) -> State {
    let n = m.input_count();
    let lambda_nats = reward.map_or(0.0, |r| r.lambda * LN_2);
    let q = output_law(m, p);
    let mut c = vec![f64::NEG_INFINITY; n];
    let mut c_max = f64::NEG_INFINITY;
    for x in (0..n).filter(|&x| is_allowed(x)) {
        let d = numeric::sum(
            m.transition_row(x)
                .iter()
                .zip(&q)
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, qy)| w * (w / qy).ln()),
        );
        c[x] = d + reward.map_or(0.0, |r| lambda_nats * r.energy[x]);
        c_max = c_max.max(c[x]);
    }
    let mean_c = numeric::sum((0..n).filter(|&x| p[x] > 0.0).map(|x| p[x] * c[x]));
    State {
        q,
        c,
        c_max,
        gap: (c_max - mean_c).max(0.0),
    }
}

/// Interior-point refinement: Newton steps on
/// `I(P, W) + lambda E_P[b] + mu sum_x ln P(x)` over the allowed inputs, with
/// `mu` shrinking tenfold whenever the Newton decrement is small. The Hessian
/// of the information term is `-sum_y W(y|i) W(y|j) / q(y)` (nats). Returns
/// the refined law if its duality gap beats the current one.
fn barrier_polish<M: TransitionMatrix + ?Sized>(
    m: &M,
    reward: Option<EnergyReward<'_>>,
    is_allowed: &impl Fn(usize) -> bool,
    start: &[f64],
    state: &State,
    target_gap: f64,
) -> Option<Vec<f64>> {
    let n = start.len();
    let active: Vec<usize> = (0..n).filter(|&x| is_allowed(x)).collect();
    let k = active.len();
    if k < 2 {
        return None;
    }
    let embed = |inner: &[f64]| -> Vec<f64> {
        let mut full = vec![0.0; n];
        for (i, &x) in active.iter().enumerate() {
            full[x] = inner[i];
        }
        full
    };
    let lambda_nats = reward.map_or(0.0, |r| r.lambda * LN_2);
    let barrier_value = |inner: &[f64], mu: f64| -> f64 {
        let full = embed(inner);
        let q = output_law(m, &full);
        let energy = reward.map_or(0.0, |r| numeric::sum(active.iter().zip(inner).map(|(&x, v)| v * r.energy[x])));
        information(m, &full, &q) * LN_2 + lambda_nats * energy + mu * numeric::sum(inner.iter().map(|v| v.ln()))
    };

    let mut inner: Vec<f64> = active.iter().map(|&x| (1.0 - 1e-6) * start[x] + 1e-6 / k as f64).collect();
    let mut mu = state.gap / k as f64;
    let mut best = (state.gap, None);
    for _ in 0..BARRIER_MAX_STEPS {
        let full = embed(&inner);
        let current = evaluate(m, reward, is_allowed, &full);
        if current.gap < best.0 {
            best = (current.gap, Some(full));
            if current.gap <= target_gap {
                break;
            }
        }
        let outputs: Vec<usize> = (0..current.q.len()).filter(|&y| current.q[y] > 0.0).collect();
        let scaled = DMatrix::from_fn(k, outputs.len(), |i, j| {
            let y = outputs[j];
            m.transition_row(active[i])[y] / current.q[y].sqrt()
        });
        let mut hessian = &scaled * scaled.transpose();
        for i in 0..k {
            hessian[(i, i)] += mu / (inner[i] * inner[i]);
        }
        let chol = hessian.clone().cholesky()?;
        let gradient = DVector::from_fn(k, |i, _| current.c[active[i]] + mu / inner[i]);
        let u = chol.solve(&gradient);
        let v = chol.solve(&DVector::from_element(k, 1.0));
        let direction = &u - &v * (u.sum() / v.sum());
        let decrement = direction.dot(&(&hessian * &direction));
        if !decrement.is_finite() {
            return None;
        }
        if decrement <= 1e-3 * mu {
            mu *= 0.1;
            if mu < 1e-20 {
                break;
            }
            continue;
        }
        let to_boundary = inner
            .iter()
            .zip(direction.iter())
            .filter(|(_, d)| **d < 0.0)
            .map(|(p, d)| p / -d)
            .fold(f64::INFINITY, f64::min);
        let mut step = (0.99 * to_boundary).min(1.0);
        let base = barrier_value(&inner, mu);
        loop {
            let trial: Vec<f64> = inner.iter().zip(direction.iter()).map(|(p, d)| p + step * d).collect();
            if barrier_value(&trial, mu) >= base + 0.25 * step * decrement {
                inner = trial;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                return best.1;
            }
        }
        let total = numeric::sum(inner.iter().copied());
        inner.iter_mut().for_each(|v| *v /= total);
    }
    best.1
}

fn normalize(p: &mut [f64]) {
    let total = numeric::sum(p.iter().copied());
    p.iter_mut().for_each(|v| *v /= total);
}

fn output_law<M: TransitionMatrix + ?Sized>(m: &M, p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; m.output_count()];
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (qy, w) in q.iter_mut().zip(m.transition_row(x)) {
            *qy += px * w;
        }
    }
    q
}

/// `I(P, W)` in bits given the precomputed output law.
fn information<M: TransitionMatrix + ?Sized>(m: &M, p: &[f64], q: &[f64]) -> f64 {
    numeric::sum(p.iter().enumerate().filter(|(_, px)| **px > 0.0).map(|(x, px)| {
        px * numeric::sum(
            m.transition_row(x)
                .iter()
                .zip(q)
                .filter(|(w, _)| **w > 0.0)
                .map(|(w, qy)| w * (w / qy).log2()),
        )
    }))
    .max(0.0)
}
