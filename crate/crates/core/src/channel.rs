//! Discrete memoryless channels and the information measures built on them.
//!
//! All quantities are in bits. The conventions `0 log 0 = 0` and
//! `0 log (0/0) = 0` hold throughout.
//!
//! A channel can be read from a small text format:
//!
//! ```text
//! # binary symmetric channel, crossover 0.1
//! 2 2
//! 0.9 0.1
//! 0.1 0.9
//! 0 1        # energy harvested per input symbol
//! ```

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numeric::{self, neg_x_log2_x};

/// Tolerance on row sums and distribution totals.
pub const STOCHASTIC_TOL: f64 = 1e-12;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution(Vec<f64>);

impl Distribution {
    /// Validates `p`. Totals within [`STOCHASTIC_TOL`] of one are renormalized;
    /// anything further off is rejected.
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidDistribution("empty".into()));
        }
        if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
            return Err(Error::InvalidDistribution(format!("entry {x} is not a probability")));
        }
        let total = numeric::sum(p.iter().copied());
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self(p.into_iter().map(|x| x / total).collect()))
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        Self(vec![1.0 / n as f64; n])
    }

    pub fn point_mass(n: usize, at: usize) -> Self {
        assert!(at < n);
        let mut p = vec![0.0; n];
        p[at] = 1.0;
        Self(p)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    /// Convex combination `alpha * self + (1 - alpha) * other`.
    pub fn mix(&self, other: &Self, alpha: f64) -> Self {
        assert_eq!(self.len(), other.len());
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
                .collect(),
        )
    }
}

impl std::ops::Index<usize> for Distribution {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

/// A discrete memoryless channel `W(y|x)` together with the energy `b(x)`
/// harvested at the receiver when `x` is sent.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    inputs: usize,
    outputs: usize,
    w: Vec<f64>,
    energy: Vec<f64>,
}

impl Channel {
    pub fn new(rows: Vec<Vec<f64>>, energy: Vec<f64>) -> Result<Self> {
        let inputs = rows.len();
        if inputs == 0 {
            return Err(Error::InvalidChannel("no input symbols".into()));
        }
        let outputs = rows[0].len();
        if outputs == 0 {
            return Err(Error::InvalidChannel("no output symbols".into()));
        }
        if energy.len() != inputs {
            return Err(Error::InvalidChannel(format!(
                "{} energies for {} inputs",
                energy.len(),
                inputs
            )));
        }
        if let Some(b) = energy.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(Error::InvalidChannel(format!("energy {b} is negative")));
        }
        let mut w = Vec::with_capacity(inputs * outputs);
        for (x, row) in rows.into_iter().enumerate() {
            if row.len() != outputs {
                return Err(Error::InvalidChannel(format!(
                    "row {x} has {} entries, expected {outputs}",
                    row.len()
                )));
            }
            if let Some(v) = row.iter().find(|v| !v.is_finite() || **v < 0.0 || **v > 1.0) {
                return Err(Error::InvalidChannel(format!("row {x} has entry {v}")));
            }
            let total = numeric::sum(row.iter().copied());
            if (total - 1.0).abs() > STOCHASTIC_TOL {
                return Err(Error::InvalidChannel(format!("row {x} sums to {total}")));
            }
            w.extend(row.into_iter().map(|v| v / total));
        }
        Ok(Self {
            inputs,
            outputs,
            w,
            energy,
        })
    }

    /// Binary symmetric channel with crossover `p0`, `b = (0, 1)`.
    pub fn bsc(p0: f64) -> Result<Self> {
        check_probability("crossover", p0)?;
        Self::new(vec![vec![1.0 - p0, p0], vec![p0, 1.0 - p0]], vec![0.0, 1.0])
    }

    /// Binary erasure channel; output 2 is the erasure. `b = (0, 1)`.
    pub fn bec(eps: f64) -> Result<Self> {
        check_probability("erasure probability", eps)?;
        Self::new(
            vec![vec![1.0 - eps, 0.0, eps], vec![0.0, 1.0 - eps, eps]],
            vec![0.0, 1.0],
        )
    }

    /// Z-channel: input 0 is received noiselessly, input 1 flips to 0 with
    /// probability `p0`. `b = (0, 1)`.
    pub fn z(p0: f64) -> Result<Self> {
        check_probability("flip probability", p0)?;
        Self::new(vec![vec![1.0, 0.0], vec![p0, 1.0 - p0]], vec![0.0, 1.0])
    }

    /// Noiseless `k`-ary channel with `b(x) = x`.
    pub fn noiseless(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidChannel("empty alphabet".into()));
        }
        let rows = (0..k)
            .map(|x| (0..k).map(|y| if x == y { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(rows, (0..k).map(|x| x as f64).collect())
    }

    /// Same transition matrix with a different energy map.
    pub fn with_energy(mut self, energy: Vec<f64>) -> Result<Self> {
        if energy.len() != self.inputs {
            return Err(Error::InvalidChannel(format!(
                "{} energies for {} inputs",
                energy.len(),
                self.inputs
            )));
        }
        if let Some(b) = energy.iter().find(|b| !b.is_finite() || **b < 0.0) {
            return Err(Error::InvalidChannel(format!("energy {b} is negative")));
        }
        self.energy = energy;
        Ok(self)
    }

    pub fn input_size(&self) -> usize {
        self.inputs
    }

    pub fn output_size(&self) -> usize {
        self.outputs
    }

    #[inline]
    pub fn w(&self, y: usize, x: usize) -> f64 {
        self.w[x * self.outputs + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.w[x * self.outputs..(x + 1) * self.outputs]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.w.chunks(self.outputs)
    }

    pub fn energy(&self, x: usize) -> f64 {
        self.energy[x]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energy
    }

    pub fn b_min(&self) -> f64 {
        self.energy.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn b_max(&self) -> f64 {
        self.energy.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Whether some threshold strictly between `b_min` and `b_max` exists,
    /// i.e. whether an energy constraint can bind at all.
    pub fn has_energy_spread(&self) -> bool {
        self.b_min() < self.b_max()
    }

    /// Average harvested energy `E_p[b(X)]`.
    pub fn mean_energy(&self, p: &[f64]) -> f64 {
        numeric::sum(p.iter().zip(&self.energy).map(|(p, b)| p * b))
    }

    /// Output law `PW(y)`.
    pub fn output_distribution(&self, p: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.outputs];
        for (x, row) in self.rows().enumerate() {
            if p[x] == 0.0 {
                continue;
            }
            for (qy, w) in q.iter_mut().zip(row) {
                *qy += p[x] * w;
            }
        }
        q
    }

    /// `H(W|P) = sum_x P(x) H(W(.|x))`.
    pub fn conditional_entropy(&self, p: &[f64]) -> f64 {
        numeric::sum(
            self.rows()
                .zip(p)
                .filter(|(_, px)| **px > 0.0)
                .map(|(row, px)| px * numeric::sum(row.iter().map(|w| neg_x_log2_x(*w)))),
        )
    }

    /// Parses the whitespace-separated text format described in the module
    /// docs. `#` starts a comment.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let parse_row = |line: usize, l: &str| -> Result<Vec<f64>> {
            l.split_whitespace()
                .map(|tok| {
                    tok.parse::<f64>().map_err(|e| Error::Parse {
                        line,
                        msg: format!("{tok:?}: {e}"),
                    })
                })
                .collect()
        };

        let (line, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "empty channel description".into(),
        })?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line,
                msg: format!("header: {e}"),
            })?;
        let [r, s] = dims[..] else {
            return Err(Error::Parse {
                line,
                msg: "header must be \"r s\"".into(),
            });
        };

        let mut rows = Vec::with_capacity(r);
        for _ in 0..r {
            let (line, l) = lines.next().ok_or(Error::Parse {
                line,
                msg: format!("expected {r} transition rows"),
            })?;
            let row = parse_row(line, l)?;
            if row.len() != s {
                return Err(Error::Parse {
                    line,
                    msg: format!("expected {s} probabilities, found {}", row.len()),
                });
            }
            rows.push(row);
        }
        let (line, l) = lines.next().ok_or(Error::Parse {
            line,
            msg: "missing energy row".into(),
        })?;
        let energy = parse_row(line, l)?;
        if energy.len() != r {
            return Err(Error::Parse {
                line,
                msg: format!("expected {r} energies, found {}", energy.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(Error::Parse {
                line,
                msg: "trailing content".into(),
            });
        }
        Self::new(rows, energy)
    }
}

impl FromStr for Channel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::from_text(s)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.inputs, self.outputs)?;
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            writeln!(f, "{}", cells.join(" "))?;
        }
        let cells: Vec<String> = self.energy.iter().map(|v| v.to_string()).collect();
        writeln!(f, "{}", cells.join(" "))
    }
}

fn check_probability(what: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} {p} not in [0, 1]")))
    }
}

/// Shannon entropy in bits.
pub fn entropy(p: &Distribution) -> f64 {
    entropy_of(p.probs())
}

/// Entropy of a raw probability slice (no validation).
pub fn entropy_of(p: &[f64]) -> f64 {
    numeric::sum(p.iter().map(|x| neg_x_log2_x(*x)))
}

/// `I(P, W) = H(PW) - H(W|P)`, never negative.
pub fn mutual_information(p: &Distribution, ch: &Channel) -> f64 {
    mutual_information_of(p.probs(), ch)
}

pub(crate) fn mutual_information_of(p: &[f64], ch: &Channel) -> f64 {
    assert_eq!(p.len(), ch.input_size(), "distribution is not over the channel inputs");
    let out = ch.output_distribution(p);
    (entropy_of(&out) - ch.conditional_entropy(p)).max(0.0)
}

/// A stochastic matrix given row by row.
pub type StochasticMatrix = [Vec<f64>];

/// `D(V || W | P) = sum_x P(x) D(V(.|x) || W(.|x))` in bits.
pub fn divergence_conditional(v: &StochasticMatrix, w: &StochasticMatrix, p: &Distribution) -> Result<f64> {
    if v.len() != w.len() || v.len() != p.len() {
        return Err(Error::InvalidArgument(format!(
            "shapes differ: V has {} rows, W has {}, P has {} entries",
            v.len(),
            w.len(),
            p.len()
        )));
    }
    let mut total = numeric::CompensatedSum::new();
    for (x, (vr, wr)) in v.iter().zip(w).enumerate() {
        if p[x] == 0.0 {
            continue;
        }
        if vr.len() != wr.len() {
            return Err(Error::InvalidArgument(format!("row {x} lengths differ")));
        }
        let mut row = numeric::CompensatedSum::new();
        for (y, (&vv, &ww)) in vr.iter().zip(wr).enumerate() {
            if vv == 0.0 {
                continue;
            }
            if ww == 0.0 {
                return Err(Error::AbsoluteContinuityViolation { input: x, output: y });
            }
            row.add(vv * (vv / ww).log2());
        }
        total.add(p[x] * row.value());
    }
    Ok(total.value().max(0.0))
}

/// Rows of `ch` as owned vectors, handy for [`divergence_conditional`].
pub fn matrix_rows(ch: &Channel) -> Vec<Vec<f64>> {
    ch.rows().map(<[f64]>::to_vec).collect()
}
