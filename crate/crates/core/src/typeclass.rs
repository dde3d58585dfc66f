//! Compositions (types) of length-`L` sequences, type-class sizes, the
//! per-symbol entropy loss `r(L, P)` of a uniform type-class input, and the
//! energy-feasible set of compositions.

use std::fmt;

use crate::channel::{Channel, Distribution};
use crate::error::{Error, Result};
use crate::numeric::{self, binomial, next_permutation};

/// Default cap on how many compositions an enumeration may produce.
pub const DEFAULT_COMPOSITION_CAP: f64 = 1e7;

/// Slack used when comparing a composition's energy to a threshold.
pub const ENERGY_SLACK: f64 = 1e-12;

/// Symbol counts `N(x)` of a length-`L` sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Composition {
    counts: Vec<usize>,
    length: usize,
}

impl Composition {
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::InvalidComposition("empty alphabet".into()));
        }
        let length = counts.iter().sum();
        if length == 0 {
            return Err(Error::InvalidComposition("length must be at least 1".into()));
        }
        Ok(Self { counts, length })
    }

    /// Composition of a concrete sequence over an alphabet of `alphabet_size`.
    pub fn of_sequence(seq: &[usize], alphabet_size: usize) -> Result<Self> {
        let mut counts = vec![0; alphabet_size];
        for &x in seq {
            *counts
                .get_mut(x)
                .ok_or_else(|| Error::InvalidComposition(format!("symbol {x} outside alphabet")))? += 1;
        }
        Self::new(counts)
    }

    /// Composition of length `length` whose type is exactly `p`, if `length * p`
    /// is integral (within 1e-9).
    pub fn from_distribution(p: &[f64], length: usize) -> Result<Self> {
        let counts = p
            .iter()
            .map(|&px| {
                let n = px * length as f64;
                let r = n.round();
                if (n - r).abs() > 1e-9 {
                    Err(Error::InvalidComposition(format!(
                        "length {length} times probability {px} is not an integer"
                    )))
                } else {
                    Ok(r as usize)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let c = Self::new(counts)?;
        if c.length != length {
            return Err(Error::InvalidComposition(format!(
                "counts sum to {}, expected {length}",
                c.length
            )));
        }
        Ok(c)
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn count(&self, x: usize) -> usize {
        self.counts[x]
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn alphabet_size(&self) -> usize {
        self.counts.len()
    }

    pub fn probability(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.length as f64
    }

    pub fn probabilities(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|x| self.probability(x)).collect()
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::new(self.probabilities()).expect("composition probabilities are valid")
    }

    /// Number of symbols with `N(x) > 0`.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&n| n > 0).count()
    }

    pub fn entropy(&self) -> f64 {
        crate::channel::entropy_of(&self.probabilities())
    }

    /// `E_P[b(X)]` for the channel's energy map.
    pub fn energy(&self, ch: &Channel) -> f64 {
        let total = numeric::sum(
            self.counts
                .iter()
                .zip(ch.energies())
                .map(|(&n, &b)| n as f64 * b),
        );
        total / self.length as f64
    }

    /// Exact `|T_P^L| = L! / prod N(x)!`, or `None` if it overflows `u128`.
    pub fn type_class_size(&self) -> Option<u128> {
        let mut acc: u128 = 1;
        let mut placed = 0u64;
        for &n in &self.counts {
            placed += n as u64;
            acc = acc.checked_mul(binomial(placed, n as u64)?)?;
        }
        Some(acc)
    }

    /// `log2 |T_P^L|`.
    pub fn log_type_class_size(&self) -> f64 {
        log_type_class_size(self)
    }

    /// `r(L, P)`.
    pub fn rate_loss(&self) -> f64 {
        rate_loss(self)
    }

    /// The lexicographically smallest member of the type class: symbols in
    /// ascending order.
    pub fn representative(&self) -> Vec<usize> {
        self.counts
            .iter()
            .enumerate()
            .flat_map(|(x, &n)| std::iter::repeat_n(x, n))
            .collect()
    }

    /// All sequences of the type class in lexicographic order.
    pub fn type_class(&self) -> TypeClassIter {
        TypeClassIter {
            next: Some(self.representative()),
        }
    }

    /// Whether `seq` has exactly this composition.
    pub fn matches(&self, seq: &[usize]) -> bool {
        seq.len() == self.length
            && Composition::of_sequence(seq, self.counts.len())
                .map(|c| c == *self)
                .unwrap_or(false)
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.counts.iter().map(|n| n.to_string()).collect();
        write!(f, "({})", cells.join(","))
    }
}

/// Lexicographic multiset permutations of a composition's representative.
#[derive(Debug, Clone)]
pub struct TypeClassIter {
    next: Option<Vec<usize>>,
}

impl Iterator for TypeClassIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_permutation(&mut succ) {
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// `C(L + k - 1, k - 1)` as a float, the number of weak compositions.
pub fn composition_count(alphabet_size: usize, length: usize) -> f64 {
    match binomial((length + alphabet_size - 1) as u64, (alphabet_size - 1) as u64) {
        Some(n) => n as f64,
        None => f64::INFINITY,
    }
}

/// All compositions of `length` over `alphabet_size` symbols, ordered
/// lexicographically by count vector.
pub fn enumerate_compositions(alphabet_size: usize, length: usize) -> Result<Vec<Composition>> {
    enumerate_compositions_capped(alphabet_size, length, DEFAULT_COMPOSITION_CAP)
}

pub fn enumerate_compositions_capped(alphabet_size: usize, length: usize, cap: f64) -> Result<Vec<Composition>> {
    if alphabet_size == 0 || length == 0 {
        return Err(Error::InvalidArgument(format!(
            "need alphabet_size >= 1 and L >= 1, got {alphabet_size} and {length}"
        )));
    }
    let total = composition_count(alphabet_size, length);
    if total > cap {
        return Err(Error::SizeLimit {
            what: "composition enumeration",
            size: total,
            cap,
        });
    }
    let mut out = Vec::with_capacity(total as usize);
    let mut counts = vec![0usize; alphabet_size];
    fill(&mut counts, 0, length, &mut out);
    Ok(out)
}

fn fill(counts: &mut [usize], pos: usize, remaining: usize, out: &mut Vec<Composition>) {
    if pos + 1 == counts.len() {
        counts[pos] = remaining;
        out.push(Composition {
            counts: counts.to_vec(),
            length: counts.iter().sum(),
        });
        return;
    }
    for n in 0..=remaining {
        counts[pos] = n;
        fill(counts, pos + 1, remaining - n, out);
    }
}

/// `log2` of the multinomial coefficient `L! / prod N(x)!`.
pub fn log_type_class_size(p: &Composition) -> f64 {
    if let Some(n) = p.type_class_size() {
        return (n as f64).log2();
    }
    // sum of log2 C(prefix, N(x)), each expanded as sum_j log2((prefix - N + j) / j)
    let mut acc = numeric::CompensatedSum::new();
    let mut placed = 0usize;
    for &n in p.counts() {
        placed += n;
        let k = n.min(placed - n);
        for j in 1..=k {
            acc.add(((placed - k + j) as f64 / j as f64).log2());
        }
    }
    acc.value()
}

/// `r(L, P) = H(P) - log2|T_P^L| / L`, the per-symbol entropy lost by
/// restricting a length-`L` block to the type class of `P`.
pub fn rate_loss(p: &Composition) -> f64 {
    (p.entropy() - log_type_class_size(p) / p.length() as f64).max(0.0)
}

/// Compositions whose average energy reaches the threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleSet {
    pub threshold: f64,
    pub length: usize,
    pub members: Vec<Composition>,
}

impl FeasibleSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, p: &Composition) -> bool {
        self.members.contains(p)
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Composition> {
        self.members.iter()
    }
}

/// All length-`length` compositions with `E_P[b] >= threshold` (up to
/// [`ENERGY_SLACK`]).
pub fn feasible_set(ch: &Channel, length: usize, threshold: f64) -> Result<FeasibleSet> {
    let members: Vec<Composition> = enumerate_compositions(ch.input_size(), length)?
        .into_iter()
        .filter(|p| p.energy(ch) >= threshold - ENERGY_SLACK)
        .collect();
    if members.is_empty() {
        return Err(Error::EmptyFeasibleSet {
            length,
            threshold,
            b_max: ch.b_max(),
        });
    }
    Ok(FeasibleSet {
        threshold,
        length,
        members,
    })
}
