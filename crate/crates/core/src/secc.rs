//! Subblock energy-constrained codes: every subblock may use any composition
//! in the feasible set, so the super-alphabet is the union of their type
//! classes.
//!
//! The uniform law on the super-alphabet keeps the per-type output symmetry,
//! so its rate reduces to one representative per output type. The exact
//! capacity needs Blahut-Arimoto over the materialized vector channel, and
//! the optimal law need not be uniform even for symmetric channels.

use crate::ba::{self, BaOptions};
use crate::capacity::{self, CapacityResult, Diagnostics, Limits, Optimizer};
use crate::channel::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::numeric::CompensatedSum;
use crate::typeclass::{feasible_set, Composition};
use crate::vector::VectorChannel;

/// Caps for the exact super-alphabet Blahut-Arimoto run.
#[derive(Debug, Clone, Copy)]
pub struct SeccLimits {
    pub alphabet: f64,
    pub output_vectors: f64,
    pub entries: f64,
}

impl Default for SeccLimits {
    fn default() -> Self {
        Self {
            alphabet: 1e5,
            output_vectors: 1e5,
            entries: 1e7,
        }
    }
}

/// `A`: the union of the feasible type classes, kept as the class list.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperAlphabet {
    pub length: usize,
    pub threshold: f64,
    pub classes: Vec<Composition>,
    class_sizes: Vec<f64>,
}

impl SuperAlphabet {
    pub fn new(ch: &Channel, length: usize, threshold: f64) -> Result<Self> {
        let fs = feasible_set(ch, length, threshold)?;
        Ok(Self::from_classes(length, threshold, fs.members))
    }

    fn from_classes(length: usize, threshold: f64, classes: Vec<Composition>) -> Self {
        let class_sizes = classes
            .iter()
            .map(|p| p.type_class_size().map(|n| n as f64).unwrap_or_else(|| p.log_type_class_size().exp2()))
            .collect();
        Self {
            length,
            threshold,
            classes,
            class_sizes,
        }
    }

    /// `|A|`.
    pub fn size(&self) -> f64 {
        self.class_sizes.iter().sum()
    }

    pub fn class_sizes(&self) -> &[f64] {
        &self.class_sizes
    }

    /// All members, class by class in lexicographic order.
    pub fn members(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        self.classes.iter().flat_map(|p| p.type_class())
    }

    /// Per-symbol input law under the uniform law on `A`.
    pub fn mixture_law(&self) -> Vec<f64> {
        let total = self.size();
        let k = self.classes.first().map_or(0, |p| p.alphabet_size());
        (0..k)
            .map(|x| {
                self.classes
                    .iter()
                    .zip(&self.class_sizes)
                    .map(|(p, n)| n / total * p.probability(x))
                    .sum()
            })
            .collect()
    }
}

/// `(1/L) I(X^L; Y^L)` with `X^L` uniform on `A`.
pub fn secc_uniform_rate(ch: &Channel, length: usize, threshold: f64) -> Result<f64> {
    let a = SuperAlphabet::new(ch, length, threshold)?;
    uniform_rate_over(ch, &a, &Limits::default())
}

pub(crate) fn uniform_rate_over(ch: &Channel, a: &SuperAlphabet, limits: &Limits) -> Result<f64> {
    for p in &a.classes {
        capacity::check_type_class(p, limits)?;
    }
    let total = a.size();
    if total > limits.type_class {
        return Err(Error::SizeLimit {
            what: "super-alphabet",
            size: total,
            cap: limits.type_class,
        });
    }
    let weights: Vec<f64> = a.class_sizes().iter().map(|n| n / total).collect();
    let h_out = capacity::output_entropy(ch, a.length, limits, |y| {
        let mut acc = CompensatedSum::new();
        for (p, w) in a.classes.iter().zip(&weights) {
            acc.add(w * capacity::output_class_probability(ch, p, y));
        }
        acc.value()
    })?;
    let h_noise = ch.conditional_entropy(&a.mixture_law());
    Ok((h_out / a.length as f64 - h_noise).max(0.0))
}

/// Exact SECC capacity, Blahut-Arimoto over the materialized `|A| x |Y|^L`
/// channel. `tol` bounds the duality gap per channel use.
pub fn secc_capacity(ch: &Channel, length: usize, threshold: f64, tol: f64) -> Result<CapacityResult> {
    let a = SuperAlphabet::new(ch, length, threshold)?;
    capacity_over_alphabet(ch, &a, tol, &SeccLimits::default())
}

/// Blahut-Arimoto over the union of the given type classes, all of one length.
pub fn secc_capacity_over(ch: &Channel, classes: &[Composition], tol: f64) -> Result<CapacityResult> {
    let length = classes
        .first()
        .ok_or_else(|| Error::InvalidArgument("no type classes given".into()))?
        .length();
    if classes.iter().any(|p| p.length() != length || p.alphabet_size() != ch.input_size()) {
        return Err(Error::InvalidArgument("type classes differ in length or alphabet".into()));
    }
    let a = SuperAlphabet::from_classes(length, f64::NAN, classes.to_vec());
    capacity_over_alphabet(ch, &a, tol, &SeccLimits::default())
}

fn materialize(ch: &Channel, a: &SuperAlphabet, limits: &SeccLimits) -> Result<VectorChannel> {
    let size = a.size();
    if size > limits.alphabet {
        return Err(Error::SizeLimit {
            what: "super-alphabet",
            size,
            cap: limits.alphabet,
        });
    }
    let outputs = (ch.output_size() as f64).powi(a.length as i32);
    if outputs > limits.output_vectors {
        return Err(Error::SizeLimit {
            what: "output vectors",
            size: outputs,
            cap: limits.output_vectors,
        });
    }
    VectorChannel::new(ch, a.members().collect(), a.length, limits.entries)
}

fn capacity_over_alphabet(ch: &Channel, a: &SuperAlphabet, tol: f64, limits: &SeccLimits) -> Result<CapacityResult> {
    let vc = materialize(ch, a, limits)?;
    let l = a.length as f64;
    let sol = ba::blahut_arimoto(
        &vc,
        None,
        None,
        None,
        BaOptions {
            tol: tol * l,
            ..Default::default()
        },
    )?;
    Ok(CapacityResult {
        rate: sol.rate / l,
        optimizer: Optimizer::SuperLetters {
            letters: vc.inputs().to_vec(),
            law: Distribution::new(sol.input)?,
        },
        diagnostics: Diagnostics {
            iterations: sol.iterations,
            residual: sol.gap / l,
            multiplier: None,
        },
    })
}

/// `I(X^L = x; Y^L)` for every `x` in `A` under the uniform law on `A`.
pub fn per_input_information(ch: &Channel, length: usize, threshold: f64) -> Result<Vec<(Vec<usize>, f64)>> {
    let a = SuperAlphabet::new(ch, length, threshold)?;
    let vc = materialize(ch, &a, &SeccLimits::default())?;
    let uniform = vec![1.0 / vc.input_count() as f64; vc.input_count()];
    let info = vc.per_input_information(&uniform);
    Ok(vc.inputs().iter().cloned().zip(info).collect())
}

/// `(I(01; Y^2), I(11; Y^2))` on the BSC with `b = (0, 1)`, `L = 2`, `B = 1/2`,
/// where `A = {01, 10, 11}` carries the uniform law. Unequal values mean the
/// uniform law fails the capacity conditions.
pub fn asymmetry_witness(p0: f64) -> Result<(f64, f64)> {
    if !(p0 > 0.0 && p0 < 0.5) {
        return Err(Error::Domain(format!("crossover {p0} is outside (0, 0.5)")));
    }
    let info = per_input_information(&Channel::bsc(p0)?, 2, 0.5)?;
    let find = |x: &[usize]| {
        info.iter()
            .find(|(seq, _)| seq == x)
            .map(|(_, v)| *v)
            .expect("sequence belongs to the super-alphabet")
    };
    Ok((find(&[0, 1]), find(&[1, 1])))
}
