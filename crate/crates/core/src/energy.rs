//! Receiver energy buffer under subblock-constrained transmissions.
//!
//! Each channel use harvests `b(x)` and spends `B`; the buffer holds at most
//! `E_max` and never goes below zero:
//! `E(i + 1) = min(E_max, max(E(i) + b(X_i) - B, 0))`.
//! An outage is a use with `E(i) + b(X_i) < B`, an overflow one with
//! `E(i) + b(X_i) - B > E_max`.

use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::typeclass::Composition;

/// Absolute slack used when classifying events.
pub const EVENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BufferConfig {
    pub e_max: f64,
    /// Energy spent per channel use, `B`.
    pub b_per_symbol: f64,
    pub e_init: f64,
}

impl BufferConfig {
    pub fn new(e_max: f64, b_per_symbol: f64, e_init: f64) -> Result<Self> {
        if !(e_max > 0.0) || !e_max.is_finite() {
            return Err(Error::InvalidArgument(format!("e_max must be positive, got {e_max}")));
        }
        if !(b_per_symbol >= 0.0) {
            return Err(Error::InvalidArgument(format!("B must be non-negative, got {b_per_symbol}")));
        }
        if !(0.0..=e_max).contains(&e_init) {
            return Err(Error::InvalidArgument(format!("e_init = {e_init} is outside [0, {e_max}]")));
        }
        Ok(Self {
            e_max,
            b_per_symbol,
            e_init,
        })
    }

    /// Starts the buffer at `G` for composition `p`.
    pub fn starting_at_g(ch: &Channel, p: &Composition, b_per_symbol: f64, e_max: f64) -> Result<Self> {
        Self::new(e_max, b_per_symbol, g_value(p, ch, b_per_symbol))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Event {
    None,
    Outage,
    Overflow,
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::None => "none",
            Self::Outage => "outage",
            Self::Overflow => "overflow",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrace {
    /// `E(1), ..., E(n + 1)`.
    pub levels: Vec<f64>,
    /// Event during use `i` is `events[i - 1]`.
    pub events: Vec<Event>,
    /// 1-based uses with an outage.
    pub outage_indices: Vec<usize>,
    /// 1-based uses with an overflow.
    pub overflow_indices: Vec<usize>,
}

impl EnergyTrace {
    pub fn outages(&self) -> usize {
        self.outage_indices.len()
    }

    pub fn overflows(&self) -> usize {
        self.overflow_indices.len()
    }

    /// Level before use `i` (1-based), so `level(n + 1)` is the final level.
    pub fn level(&self, i: usize) -> f64 {
        self.levels[i - 1]
    }

    /// CSV with columns `index,level,event`. Row 0 is the initial level; row
    /// `i` holds the level after use `i` and the event during it.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "level", "event"])?;
        w.write_record(["0".to_string(), self.levels[0].to_string(), Event::None.to_string()])?;
        for (i, e) in self.events.iter().enumerate() {
            w.write_record([(i + 1).to_string(), self.levels[i + 1].to_string(), e.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Runs the buffer recurrence over `symbols`. Levels are clamped at 0 after an
/// outage so later outages are still counted.
pub fn simulate(cfg: &BufferConfig, ch: &Channel, symbols: &[usize]) -> Result<EnergyTrace> {
    if let Some(&bad) = symbols.iter().find(|&&x| x >= ch.input_size()) {
        return Err(Error::InvalidArgument(format!(
            "symbol {bad} is outside the {}-symbol input alphabet",
            ch.input_size()
        )));
    }
    let b = cfg.b_per_symbol;
    let mut levels = Vec::with_capacity(symbols.len() + 1);
    let mut events = Vec::with_capacity(symbols.len());
    let (mut outage_indices, mut overflow_indices) = (Vec::new(), Vec::new());
    let mut e = cfg.e_init;
    levels.push(e);
    for (i, &x) in symbols.iter().enumerate() {
        let net = e + ch.energy(x) - b;
        let event = if net < -EVENT_SLACK {
            outage_indices.push(i + 1);
            Event::Outage
        } else if net > cfg.e_max + EVENT_SLACK {
            overflow_indices.push(i + 1);
            Event::Overflow
        } else {
            Event::None
        };
        e = net.clamp(0.0, cfg.e_max);
        levels.push(e);
        events.push(event);
    }
    Ok(EnergyTrace {
        levels,
        events,
        outage_indices,
        overflow_indices,
    })
}

/// `G = sum_{b(x) < B} N(x) (B - b(x))`: the largest drawdown one subblock can
/// cause.
pub fn g_value(p: &Composition, ch: &Channel, b_per_symbol: f64) -> f64 {
    p.counts()
        .iter()
        .enumerate()
        .filter(|&(x, _)| ch.energy(x) < b_per_symbol)
        .map(|(x, &n)| n as f64 * (b_per_symbol - ch.energy(x)))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubblockBound {
    Bounded(usize),
    /// No symbol in the support harvests less than `B`.
    Unbounded,
}

impl SubblockBound {
    pub fn allows(&self, length: usize) -> bool {
        match self {
            Self::Bounded(l) => length <= *l,
            Self::Unbounded => true,
        }
    }
}

impl fmt::Display for SubblockBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bounded(l) => write!(f, "{l}"),
            Self::Unbounded => f.write_str("unbounded"),
        }
    }
}

fn drawdown_rate(ch: &Channel, p: &Distribution, b_per_symbol: f64) -> f64 {
    (0..p.len())
        .filter(|&x| ch.energy(x) < b_per_symbol)
        .map(|x| 2.0 * p[x] * (b_per_symbol - ch.energy(x)))
        .sum()
}

/// Largest outage-free subblock length, `floor(E_max / sum_{b(x) < B} 2 P(x) (B - b(x)))`.
pub fn max_subblock_length(ch: &Channel, p: &Distribution, b_per_symbol: f64, e_max: f64) -> Result<SubblockBound> {
    if p.len() != ch.input_size() {
        return Err(Error::InvalidArgument(format!(
            "distribution over {} symbols for a channel with {} inputs",
            p.len(),
            ch.input_size()
        )));
    }
    if ch.mean_energy(p.probs()) < b_per_symbol - crate::typeclass::ENERGY_SLACK {
        return Err(Error::Infeasible(format!(
            "mean energy {} is below B = {b_per_symbol}",
            ch.mean_energy(p.probs())
        )));
    }
    let rate = drawdown_rate(ch, p, b_per_symbol);
    if rate <= 0.0 {
        return Ok(SubblockBound::Unbounded);
    }
    // the guard keeps exact ratios such as 4 / 0.5 from rounding down
    let ratio = e_max / rate;
    Ok(SubblockBound::Bounded((ratio * (1.0 + 1e-12)).floor() as usize))
}

/// Like [`max_subblock_length`] but only counts lengths `L` for which `L P`
/// is a composition. `Bounded(0)` when none fits.
pub fn max_integral_subblock_length(
    ch: &Channel,
    p: &Distribution,
    b_per_symbol: f64,
    e_max: f64,
) -> Result<SubblockBound> {
    match max_subblock_length(ch, p, b_per_symbol, e_max)? {
        SubblockBound::Unbounded => Ok(SubblockBound::Unbounded),
        SubblockBound::Bounded(l) => {
            let fits = (1..=l)
                .rev()
                .find(|&len| Composition::from_distribution(p.probs(), len).is_ok())
                .unwrap_or(0);
            Ok(SubblockBound::Bounded(fits))
        }
    }
}

fn split(p: &Composition, ch: &Channel, b_per_symbol: f64) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut low = Vec::new();
    let mut high = Vec::new();
    for (x, &n) in p.counts().iter().enumerate() {
        let target = if ch.energy(x) < b_per_symbol { &mut low } else { &mut high };
        target.extend(std::iter::repeat_n(x, n));
    }
    if low.is_empty() || high.is_empty() {
        return Err(Error::DegenerateSplit(format!(
            "{p} needs symbols both below and at or above B = {b_per_symbol}"
        )));
    }
    Ok((low, high))
}

/// Worst-case CSCC sequence of `m` subblocks: the first puts its low-energy
/// symbols last, the second puts them first, and so on alternately. Two
/// consecutive low runs drain `2G` in a row.
pub fn adversarial_codeword(p: &Composition, ch: &Channel, b_per_symbol: f64, m: usize) -> Result<Vec<usize>> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 subblocks, got {m}")));
    }
    let (low, high) = split(p, ch, b_per_symbol)?;
    let mut seq = Vec::with_capacity(m * p.length());
    for k in 0..m {
        if k % 2 == 0 {
            seq.extend(&high);
            seq.extend(&low);
        } else {
            seq.extend(&low);
            seq.extend(&high);
        }
    }
    Ok(seq)
}

/// Symbol order inside each subblock of a CSCC sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubblockOrder {
    /// The sorted representative of the type class.
    AsGiven,
    /// A seeded uniformly random permutation per subblock.
    Random(u64),
    Adversarial,
}

/// `m` subblocks, each with composition exactly `p`.
pub fn cscc_sequence(
    p: &Composition,
    ch: &Channel,
    b_per_symbol: f64,
    m: usize,
    order: SubblockOrder,
) -> Result<Vec<usize>> {
    match order {
        SubblockOrder::AsGiven => Ok(p.representative().repeat(m)),
        SubblockOrder::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut block = p.representative();
            let mut seq = Vec::with_capacity(m * block.len());
            for _ in 0..m {
                block.shuffle(&mut rng);
                seq.extend(&block);
            }
            Ok(seq)
        }
        SubblockOrder::Adversarial => adversarial_codeword(p, ch, b_per_symbol, m),
    }
}
