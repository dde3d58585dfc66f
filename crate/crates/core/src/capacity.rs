//! Capacities under subblock and codeword energy constraints.
//!
//! * CSCC (every subblock has the same composition `P`): the capacity of the
//!   `L`-use vector channel restricted to the type class `T_P^L` is reached by
//!   the uniform law on `T_P^L`. Output vectors sharing a composition are then
//!   equiprobable, so `H(Y^L)` needs one representative per output type, and
//!   each position sees the pair law `P(x) W(y|x)`.
//! * CCC (codeword constraint only): `I(P, W)`, and its maximum over
//!   `E_P[b] >= B` is the capacity-power function, computed with an energy-
//!   rewarded Blahut-Arimoto iteration and a bisection on the multiplier.
//!
//! [`oracle_vector_mi`] evaluates the same CSCC quantity by materializing the
//! whole vector channel; it exists to certify the symmetry-reduced formula.

use rayon::prelude::*;

use crate::ba::{self, BaOptions, EnergyReward};
use crate::channel::{mutual_information_of, Channel, Distribution};
use crate::error::{Error, Result};
use crate::numeric;
use crate::typeclass::{enumerate_compositions, feasible_set, Composition, ENERGY_SLACK};
use crate::vector::VectorChannel;

/// Size caps guarding the exponential enumerations.
#[derive(Debug, Clone, Copy)]
pub struct Limits {
    /// Largest input type class that may be enumerated.
    pub type_class: f64,
    /// Largest number of output compositions.
    pub output_types: f64,
    /// Largest materialized vector channel (rows times columns) for the oracle.
    pub oracle_entries: f64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            type_class: 1e6,
            output_types: 1e5,
            oracle_entries: 1e7,
        }
    }
}

/// What achieved a capacity value.
#[derive(Debug, Clone, PartialEq)]
pub enum Optimizer {
    Composition(Composition),
    Distribution(Distribution),
    /// A law over explicit length-`L` input sequences.
    SuperLetters {
        letters: Vec<Vec<usize>>,
        law: Distribution,
    },
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Diagnostics {
    pub iterations: usize,
    /// Certified distance to the optimum (bits), or a numerical residual.
    pub residual: f64,
    /// Energy multiplier, bits per energy unit, when a constraint was active.
    pub multiplier: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    /// Bits per channel use.
    pub rate: f64,
    pub optimizer: Optimizer,
    pub diagnostics: Diagnostics,
}

impl CapacityResult {
    pub fn composition(&self) -> Option<&Composition> {
        match &self.optimizer {
            Optimizer::Composition(c) => Some(c),
            _ => None,
        }
    }

    pub fn distribution(&self) -> Option<&Distribution> {
        match &self.optimizer {
            Optimizer::Distribution(d) => Some(d),
            Optimizer::SuperLetters { law, .. } => Some(law),
            _ => None,
        }
    }
}

/// Output compositions of length `L`, each with its sorted representative.
#[derive(Debug, Clone)]
pub struct OutputTypeIterator {
    inner: std::vec::IntoIter<Composition>,
}

impl OutputTypeIterator {
    pub fn new(output_size: usize, length: usize, cap: f64) -> Result<Self> {
        let types = crate::typeclass::enumerate_compositions_capped(output_size, length, cap).map_err(|e| match e {
            Error::SizeLimit { size, cap, .. } => Error::SizeLimit {
                what: "output type count",
                size,
                cap,
            },
            other => other,
        })?;
        Ok(Self {
            inner: types.into_iter(),
        })
    }
}

impl Iterator for OutputTypeIterator {
    /// `(Q, y)` with `y` the ascending representative of `T_Q^L`.
    type Item = (Composition, Vec<usize>);

    fn next(&mut self) -> Option<Self::Item> {
        self.inner.next().map(|q| {
            let y = q.representative();
            (q, y)
        })
    }
}

pub(crate) fn check_type_class(p: &Composition, limits: &Limits) -> Result<f64> {
    let size = match p.type_class_size() {
        Some(n) => n as f64,
        None => p.log_type_class_size().exp2(),
    };
    if size > limits.type_class {
        return Err(Error::SizeLimit {
            what: "input type class",
            size,
            cap: limits.type_class,
        });
    }
    Ok(size)
}

/// `Pr(Y^L = y)` when `X^L` is uniform on `T_P^L`.
pub fn output_class_probability(ch: &Channel, p: &Composition, y: &[usize]) -> f64 {
    let mut acc = numeric::CompensatedSum::new();
    let mut members = 0usize;
    for x in p.type_class() {
        acc.add(x.iter().zip(y).map(|(&xi, &yi)| ch.w(yi, xi)).product());
        members += 1;
    }
    acc.value() / members as f64
}

/// `sum_Q |T_Q| q_Q log2(1/q_Q)` from per-type representative probabilities.
pub(crate) fn output_entropy<F>(ch: &Channel, length: usize, limits: &Limits, prob: F) -> Result<f64>
where
    F: Fn(&[usize]) -> f64 + Sync,
{
    let types: Vec<(Composition, Vec<usize>)> = OutputTypeIterator::new(ch.output_size(), length, limits.output_types)?.collect();
    let terms: Vec<f64> = types
        .par_iter()
        .map(|(q, y)| {
            let py = prob(y);
            let size = q
                .type_class_size()
                .map(|n| n as f64)
                .unwrap_or_else(|| q.log_type_class_size().exp2());
            size * numeric::neg_x_log2_x(py)
        })
        .collect();
    Ok(numeric::sum(terms))
}

/// CSCC capacity for a fixed subblock composition, via the symmetry-reduced
/// formula: `(1/L) H(Y^L) - H(Y|X)`.
pub fn cscc_capacity_fixed_p(ch: &Channel, p: &Composition) -> Result<CapacityResult> {
    cscc_capacity_fixed_p_with(ch, p, &Limits::default())
}

pub fn cscc_capacity_fixed_p_with(ch: &Channel, p: &Composition, limits: &Limits) -> Result<CapacityResult> {
    check_alphabet(ch, p)?;
    check_type_class(p, limits)?;
    if p.type_class_size() == Some(1) {
        // a single input sequence carries no information
        return Ok(CapacityResult {
            rate: 0.0,
            optimizer: Optimizer::Composition(p.clone()),
            diagnostics: Diagnostics::default(),
        });
    }
    let length = p.length();
    let h_out = output_entropy(ch, length, limits, |y| output_class_probability(ch, p, y))?;
    let h_noise = ch.conditional_entropy(&p.probabilities());
    let rate = (h_out / length as f64 - h_noise).max(0.0);
    Ok(CapacityResult {
        rate,
        optimizer: Optimizer::Composition(p.clone()),
        diagnostics: Diagnostics::default(),
    })
}

fn check_alphabet(ch: &Channel, p: &Composition) -> Result<()> {
    if p.alphabet_size() != ch.input_size() {
        return Err(Error::InvalidArgument(format!(
            "composition over {} symbols for a channel with {} inputs",
            p.alphabet_size(),
            ch.input_size()
        )));
    }
    Ok(())
}

/// The vector channel over `T_P^L`, materialized in full.
pub fn type_class_vector_channel(ch: &Channel, p: &Composition, limits: &Limits) -> Result<VectorChannel> {
    check_alphabet(ch, p)?;
    let size = check_type_class(p, limits)?;
    let entries = size * (ch.output_size() as f64).powi(p.length() as i32);
    if entries > limits.oracle_entries {
        return Err(Error::SizeLimit {
            what: "oracle vector channel",
            size: entries,
            cap: limits.oracle_entries,
        });
    }
    VectorChannel::new(ch, p.type_class().collect(), p.length(), limits.oracle_entries)
}

/// `(1/L) I(X^L; Y^L)` with `X^L` uniform on `T_P^L`, by brute force over
/// the full vector channel.
pub fn oracle_vector_mi(ch: &Channel, p: &Composition) -> Result<f64> {
    let vc = type_class_vector_channel(ch, p, &Limits::default())?;
    let uniform = vec![1.0 / vc.input_count() as f64; vc.input_count()];
    Ok(vc.mutual_information(&uniform) / p.length() as f64)
}

/// `C_CSCC^L(B)`: the best fixed-composition rate over the energy-feasible
/// compositions. Ties (within 1e-12) go to the composition with more energy,
/// then to the lexicographically smallest counts.
pub fn cscc_capacity(ch: &Channel, length: usize, threshold: f64) -> Result<CapacityResult> {
    cscc_capacity_with(ch, length, threshold, &Limits::default())
}

pub fn cscc_capacity_with(ch: &Channel, length: usize, threshold: f64, limits: &Limits) -> Result<CapacityResult> {
    let feasible = feasible_set(ch, length, threshold)?;
    best_composition(ch, feasible.members.iter(), limits)?.ok_or(Error::EmptyFeasibleSet {
        length,
        threshold,
        b_max: ch.b_max(),
    })
}

pub(crate) fn best_composition<'a, I>(ch: &Channel, candidates: I, limits: &Limits) -> Result<Option<CapacityResult>>
where
    I: IntoIterator<Item = &'a Composition>,
{
    const TIE: f64 = 1e-12;
    let mut best: Option<(CapacityResult, f64)> = None;
    let mut evaluated = 0;
    for p in candidates {
        let r = cscc_capacity_fixed_p_with(ch, p, limits)?;
        evaluated += 1;
        let energy = p.energy(ch);
        let better = match &best {
            None => true,
            Some((b, e)) => r.rate > b.rate + TIE || ((r.rate - b.rate).abs() <= TIE && energy > *e + ENERGY_SLACK),
        };
        if better {
            best = Some((r, energy));
        }
    }
    Ok(best.map(|(mut r, _)| {
        r.diagnostics.iterations = evaluated;
        r
    }))
}

/// `C_CCC(P) = I(P, W)`.
pub fn ccc_capacity_fixed_p(ch: &Channel, p: &Distribution) -> f64 {
    mutual_information_of(p.probs(), ch)
}

/// Options for [`capacity_power`] beyond the target tolerance.
#[derive(Debug, Clone, Copy)]
pub struct CapacityPowerOptions {
    /// Certified accuracy of the returned rate, bits.
    pub tol: f64,
    /// Bisection stops once the active energy constraint holds to this.
    pub energy_tol: f64,
    pub max_iterations: usize,
}

impl Default for CapacityPowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            energy_tol: 1e-10,
            max_iterations: 100_000,
        }
    }
}

/// The capacity-power function `max { I(P, W) : E_P[b] >= B }`.
pub fn capacity_power(ch: &Channel, threshold: f64, tol: f64) -> Result<CapacityResult> {
    capacity_power_with(
        ch,
        threshold,
        CapacityPowerOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn capacity_power_with(ch: &Channel, threshold: f64, opts: CapacityPowerOptions) -> Result<CapacityResult> {
    let b_max = ch.b_max();
    if threshold > b_max + ENERGY_SLACK {
        return Err(Error::Infeasible(format!("threshold {threshold} exceeds b_max = {b_max}")));
    }
    let ba_opts = BaOptions {
        tol: opts.tol,
        max_iterations: opts.max_iterations,
    };
    let energy = ch.energies();
    let mean_energy = |p: &[f64]| ch.mean_energy(p);

    let finish = |sol: ba::BaSolution, lambda: f64, iterations: usize| -> Result<CapacityResult> {
        // weak duality: C(B) <= max_x [D_x + lambda b(x)] - lambda B
        let residual = (sol.dual_bound - lambda * threshold - sol.rate).max(0.0);
        Ok(CapacityResult {
            rate: sol.rate,
            optimizer: Optimizer::Distribution(Distribution::new(sol.input)?),
            diagnostics: Diagnostics {
                iterations,
                residual,
                multiplier: Some(lambda),
            },
        })
    };

    if threshold >= b_max - ENERGY_SLACK && ch.has_energy_spread() {
        // only maximum-energy symbols may be used
        let allowed: Vec<bool> = energy.iter().map(|&b| b >= b_max - ENERGY_SLACK).collect();
        let sol = ba::blahut_arimoto(ch, None, Some(&allowed), None, ba_opts)?;
        let iterations = sol.iterations;
        let mut r = finish(sol, 0.0, iterations)?;
        // the restriction is an infinite multiplier; the dual bound above is
        // over the restricted alphabet only
        r.diagnostics.multiplier = None;
        return Ok(r);
    }

    let free = ba::blahut_arimoto(ch, None, None, None, ba_opts)?;
    let mut iterations = free.iterations;
    if mean_energy(&free.input) >= threshold - ENERGY_SLACK {
        return finish(free, 0.0, iterations);
    }

    let solve = |lambda: f64, init: &[f64]| {
        ba::blahut_arimoto(ch, Some(EnergyReward { energy, lambda }), None, Some(init), ba_opts)
    };

    let mut lo = 0.0;
    let mut lo_sol = free;
    let mut hi = 1.0;
    let mut hi_sol = solve(hi, &lo_sol.input)?;
    iterations += hi_sol.iterations;
    let mut doublings = 0;
    while mean_energy(&hi_sol.input) < threshold {
        lo = hi;
        lo_sol = hi_sol;
        hi *= 2.0;
        hi_sol = solve(hi, &lo_sol.input)?;
        iterations += hi_sol.iterations;
        doublings += 1;
        if doublings > 80 {
            return Err(Error::NoConvergence {
                what: "energy multiplier bracketing".into(),
                iterations: doublings,
            });
        }
    }

    for _ in 0..200 {
        if mean_energy(&hi_sol.input) - threshold <= opts.energy_tol || hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let sol = solve(mid, &hi_sol.input)?;
        iterations += sol.iterations;
        if mean_energy(&sol.input) >= threshold {
            hi = mid;
            hi_sol = sol;
        } else {
            lo = mid;
            lo_sol = sol;
        }
    }
    let (e_lo, e_hi) = (mean_energy(&lo_sol.input), mean_energy(&hi_sol.input));
    if e_hi > threshold && e_hi > e_lo && e_lo < threshold {
        // the mixture meeting the constraint exactly; on a linear piece of
        // C(B) it is optimal while the bracket ends are not
        let theta = (threshold - e_lo) / (e_hi - e_lo);
        let input: Vec<f64> = lo_sol.input.iter().zip(&hi_sol.input).map(|(a, b)| (1.0 - theta) * a + theta * b).collect();
        let (rate, dual_bound) = lagrangian_bounds(ch, &input, hi);
        if rate > hi_sol.rate {
            let mixed = ba::BaSolution {
                input,
                rate,
                dual_bound,
                gap: 0.0,
                iterations: 0,
            };
            return finish(mixed, hi, iterations);
        }
    }
    finish(hi_sol, hi, iterations)
}

/// `I(P, W)` and `max_x [D(W(.|x) || PW) + lambda b(x)]`, bits.
fn lagrangian_bounds(ch: &Channel, p: &[f64], lambda: f64) -> (f64, f64) {
    let q = ch.output_distribution(p);
    let divergence = |x: usize| -> f64 {
        numeric::sum(ch.row(x).iter().zip(&q).filter(|(w, _)| **w > 0.0).map(|(w, qy)| w * (w / qy).log2()))
    };
    let rate = numeric::sum((0..p.len()).filter(|&x| p[x] > 0.0).map(|x| p[x] * divergence(x))).max(0.0);
    let dual = (0..p.len()).map(|x| divergence(x) + lambda * ch.energy(x)).fold(f64::NEG_INFINITY, f64::max);
    (rate, dual)
}

/// Largest CSCC rate over subblock lengths `1..=max_length` among
/// compositions whose worst-case drawdown fits the buffer, i.e. whose length
/// satisfies the outage-free subblock bound for `e_max`.
pub fn cscc_capacity_with_buffer(
    ch: &Channel,
    threshold: f64,
    e_max: f64,
    max_length: usize,
) -> Result<(usize, CapacityResult)> {
    let limits = Limits::default();
    let mut best: Option<(usize, CapacityResult)> = None;
    for length in 1..=max_length {
        let candidates: Vec<Composition> = enumerate_compositions(ch.input_size(), length)?
            .into_iter()
            .filter(|p| p.energy(ch) >= threshold - ENERGY_SLACK)
            .filter(|p| 2.0 * crate::energy::g_value(p, ch, threshold) <= e_max + ENERGY_SLACK)
            .collect();
        if let Some(r) = best_composition(ch, &candidates, &limits)? {
            if best.as_ref().is_none_or(|(_, b)| r.rate > b.rate + 1e-12) {
                best = Some((length, r));
            }
        }
    }
    best.ok_or_else(|| Error::Infeasible(format!("no subblock length up to {max_length} fits e_max = {e_max}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::binary_entropy;
    use approx::assert_abs_diff_eq;

    fn comp(c: &[usize]) -> Composition {
        Composition::new(c.to_vec()).unwrap()
    }

    #[test]
    fn fixed_p_examples() {
        let noiseless = Channel::noiseless(2).unwrap();
        assert_abs_diff_eq!(cscc_capacity_fixed_p(&noiseless, &comp(&[1, 1])).unwrap().rate, 0.5, epsilon = 1e-12);
        let useless = Channel::bsc(0.5).unwrap();
        assert_abs_diff_eq!(cscc_capacity_fixed_p(&useless, &comp(&[1, 1])).unwrap().rate, 0.0, epsilon = 1e-12);
        let bsc = Channel::bsc(0.1).unwrap();
        let p = comp(&[2, 2]);
        let fast = cscc_capacity_fixed_p(&bsc, &p).unwrap().rate;
        let slow = oracle_vector_mi(&bsc, &p).unwrap();
        assert_abs_diff_eq!(fast, slow, epsilon = 1e-9);
    }

    #[test]
    fn oracle_examples() {
        let noiseless = Channel::noiseless(2).unwrap();
        assert_abs_diff_eq!(oracle_vector_mi(&noiseless, &comp(&[1, 1])).unwrap(), 0.5, epsilon = 1e-12);
        let bsc = Channel::bsc(0.1).unwrap();
        assert_abs_diff_eq!(oracle_vector_mi(&bsc, &comp(&[3, 0])).unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            oracle_vector_mi(&bsc, &comp(&[1, 1])).unwrap(),
            cscc_capacity_fixed_p(&bsc, &comp(&[1, 1])).unwrap().rate,
            epsilon = 1e-9
        );
    }

    #[test]
    fn size_limits_are_enforced() {
        let bsc = Channel::bsc(0.1).unwrap();
        let tight = Limits {
            type_class: 10.0,
            ..Limits::default()
        };
        let err = cscc_capacity_fixed_p_with(&bsc, &comp(&[3, 3]), &tight).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { .. }));
        let err = oracle_vector_mi(&bsc, &comp(&[12, 12])).unwrap_err();
        assert!(matches!(err, Error::SizeLimit { .. }));
    }

    #[test]
    fn cscc_capacity_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let best = cscc_capacity(&bsc, 2, 0.5).unwrap();
        let member = cscc_capacity_fixed_p(&bsc, &comp(&[1, 1])).unwrap();
        assert!(best.rate >= member.rate);

        let noiseless = Channel::noiseless(2).unwrap();
        let r = cscc_capacity(&noiseless, 8, 0.5).unwrap();
        assert_abs_diff_eq!(r.rate, 70f64.log2() / 8.0, epsilon = 1e-12);
        assert_eq!(r.composition().unwrap(), &comp(&[4, 4]));

        let r = cscc_capacity(&noiseless, 5, 1.0).unwrap();
        assert_eq!(r.composition().unwrap(), &comp(&[0, 5]));
        assert_abs_diff_eq!(r.rate, 0.0, epsilon = 1e-15);

        assert!(matches!(
            cscc_capacity(&noiseless, 4, 1.2).unwrap_err(),
            Error::EmptyFeasibleSet { .. }
        ));
    }

    #[test]
    fn ties_prefer_more_energy() {
        // on the useless channel every composition has rate 0
        let useless = Channel::bsc(0.5).unwrap();
        let r = cscc_capacity(&useless, 4, 0.0).unwrap();
        assert_eq!(r.composition().unwrap(), &comp(&[0, 4]));
    }

    #[test]
    fn ccc_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let u = Distribution::uniform(2);
        assert_abs_diff_eq!(ccc_capacity_fixed_p(&bsc, &u), 1.0 - binary_entropy(0.1).unwrap(), epsilon = 1e-12);
        assert_eq!(ccc_capacity_fixed_p(&bsc, &Distribution::point_mass(2, 1)), 0.0);
        assert_abs_diff_eq!(ccc_capacity_fixed_p(&Channel::noiseless(2).unwrap(), &u), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn capacity_power_examples() {
        let bsc = Channel::bsc(0.1).unwrap();
        let free = 1.0 - binary_entropy(0.1).unwrap();
        for b in [0.0, 0.3, 0.5] {
            assert_abs_diff_eq!(capacity_power(&bsc, b, 1e-11).unwrap().rate, free, epsilon = 1e-10);
        }
        // active constraint: optimum sits on E[b] = B, i.e. P = (0.1, 0.9)
        let r = capacity_power(&bsc, 0.9, 1e-11).unwrap();
        let boundary = ccc_capacity_fixed_p(&bsc, &Distribution::new(vec![0.1, 0.9]).unwrap());
        assert_abs_diff_eq!(r.rate, boundary, epsilon = 1e-9);
        assert_abs_diff_eq!(r.rate, 0.211_081_452_138_998_4, epsilon = 1e-9);
        assert!(r.diagnostics.multiplier.unwrap() > 0.0);
        assert!(r.diagnostics.residual < 1e-9);

        let noiseless = Channel::noiseless(2).unwrap();
        let r = capacity_power(&noiseless, 0.9, 1e-11).unwrap();
        assert_abs_diff_eq!(r.rate, binary_entropy(0.9).unwrap(), epsilon = 1e-9);

        let r = capacity_power(&noiseless, 1.0, 1e-11).unwrap();
        assert_abs_diff_eq!(r.rate, 0.0, epsilon = 1e-12);

        assert!(matches!(capacity_power(&noiseless, 1.5, 1e-9).unwrap_err(), Error::Infeasible(_)));
    }

    #[test]
    fn buffer_limited_capacity_grows_with_buffer() {
        let bsc = Channel::bsc(0.01).unwrap();
        let (l_small, small) = cscc_capacity_with_buffer(&bsc, 0.5, 1.0, 10).unwrap();
        let (l_big, big) = cscc_capacity_with_buffer(&bsc, 0.5, 4.0, 10).unwrap();
        assert!(big.rate >= small.rate);
        assert!(l_big >= l_small);
        let p = big.composition().unwrap();
        assert!(2.0 * crate::energy::g_value(p, &bsc, 0.5) <= 4.0 + 1e-12);
    }

    #[test]
    fn capacity_power_on_a_linear_segment() {
        // inputs 1 and 2 are nearly the same channel but only 2 harvests, so
        // C(B) is a straight line until input 1 is used up
        let ch = Channel::new(vec![vec![1.0, 0.0], vec![0.0014, 0.9986], vec![0.0032, 0.9968]], vec![0.0, 0.0, 1.0]).unwrap();
        let at = |b: f64| capacity_power(&ch, b, 1e-12).unwrap();
        let (r0, r1, r2) = (at(0.1), at(0.2), at(0.3));
        assert!(r1.diagnostics.residual <= 1e-10);
        assert_abs_diff_eq!(r1.rate, 0.5 * (r0.rate + r2.rate), epsilon = 1e-9);
        let p = r1.distribution().unwrap();
        assert_abs_diff_eq!(ch.mean_energy(p.probs()), 0.2, epsilon = 1e-9);
    }
}
