//! The `L`-use vector channel `W^L(y|x) = prod_i W(y_i|x_i)` materialized over
//! an explicit list of input sequences.
//!
//! This is the brute-force view: every input super-letter and every output
//! vector in `Y^L` gets its own row and column. It backs the oracle checks and
//! the exact SECC Blahut-Arimoto run, so it is only ever built at desk scale.

use crate::channel::{entropy_of, Channel};
use crate::error::{Error, Result};
use crate::numeric::{self, neg_x_log2_x};

#[derive(Debug, Clone)]
pub struct VectorChannel {
    length: usize,
    output_size: usize,
    inputs: Vec<Vec<usize>>,
    columns: usize,
    matrix: Vec<f64>,
}

impl VectorChannel {
    /// Builds the vector channel over `inputs`, all of length `length`.
    /// Fails with `SizeLimit` when `|inputs| * |Y|^L` exceeds `cap`.
    pub fn new(ch: &Channel, inputs: Vec<Vec<usize>>, length: usize, cap: f64) -> Result<Self> {
        let columns_f = (ch.output_size() as f64).powi(length as i32);
        let size = columns_f * inputs.len() as f64;
        if size > cap {
            return Err(Error::SizeLimit {
                what: "vector channel",
                size,
                cap,
            });
        }
        if let Some(bad) = inputs.iter().find(|x| x.len() != length) {
            return Err(Error::InvalidArgument(format!(
                "input sequence of length {} in a length-{length} vector channel",
                bad.len()
            )));
        }
        let columns = columns_f as usize;
        let s = ch.output_size();
        let mut matrix = vec![0.0; inputs.len() * columns];
        let mut y = vec![0usize; length];
        for (row, x) in matrix.chunks_mut(columns).zip(&inputs) {
            y.iter_mut().for_each(|v| *v = 0);
            for cell in row.iter_mut() {
                *cell = x.iter().zip(&y).map(|(&xi, &yi)| ch.w(yi, xi)).product();
                // advance y in mixed radix, last coordinate fastest
                for pos in (0..length).rev() {
                    y[pos] += 1;
                    if y[pos] < s {
                        break;
                    }
                    y[pos] = 0;
                }
            }
        }
        Ok(Self {
            length,
            output_size: s,
            inputs,
            columns,
            matrix,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn inputs(&self) -> &[Vec<usize>] {
        &self.inputs
    }

    pub fn input_count(&self) -> usize {
        self.inputs.len()
    }

    pub fn output_count(&self) -> usize {
        self.columns
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.matrix[i * self.columns..(i + 1) * self.columns]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.matrix.chunks(self.columns)
    }

    /// The output vector for column index `j`.
    pub fn output_vector(&self, mut j: usize) -> Vec<usize> {
        let mut y = vec![0; self.length];
        for pos in (0..self.length).rev() {
            y[pos] = j % self.output_size;
            j /= self.output_size;
        }
        y
    }

    /// Output law for the given input law over the rows.
    pub fn output_distribution(&self, input: &[f64]) -> Vec<f64> {
        let mut q = vec![0.0; self.columns];
        for (row, &px) in self.rows().zip(input) {
            if px == 0.0 {
                continue;
            }
            for (qy, w) in q.iter_mut().zip(row) {
                *qy += px * w;
            }
        }
        q
    }

    /// Output law with each column summed in sorted order, independent of the
    /// row order.
    fn sorted_output_distribution(&self, input: &[f64]) -> Vec<f64> {
        let mut terms = Vec::with_capacity(self.inputs.len());
        (0..self.columns)
            .map(|j| {
                terms.clear();
                terms.extend(self.rows().zip(input).map(|(row, p)| p * row[j]));
                terms.sort_by(f64::total_cmp);
                numeric::sum(terms.iter().copied())
            })
            .collect()
    }

    /// `I(X^L; Y^L)` in bits (not normalized by `L`).
    pub fn mutual_information(&self, input: &[f64]) -> f64 {
        let out = self.output_distribution(input);
        let noise = numeric::sum(
            self.rows()
                .zip(input)
                .filter(|(_, p)| **p > 0.0)
                .map(|(row, p)| p * numeric::sum(row.iter().map(|w| neg_x_log2_x(*w)))),
        );
        (entropy_of(&out) - noise).max(0.0)
    }

    /// `I(X^L = x; Y^L)` for every row: the divergence between the row and the
    /// output law induced by `input`. Terms are summed in sorted order, so rows
    /// that are output permutations of each other get bit-identical values.
    pub fn per_input_information(&self, input: &[f64]) -> Vec<f64> {
        let out = self.sorted_output_distribution(input);
        self.rows()
            .map(|row| {
                let mut terms: Vec<f64> = row
                    .iter()
                    .zip(&out)
                    .filter(|(w, _)| **w > 0.0)
                    .map(|(w, q)| w * (w / q).log2())
                    .collect();
                terms.sort_by(f64::total_cmp);
                numeric::sum(terms)
            })
            .collect()
    }

    /// `Pr(X_i = x)` for every position `i` under the given input law.
    pub fn position_marginals(&self, input: &[f64], input_alphabet: usize) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; input_alphabet]; self.length];
        for (x, &p) in self.inputs.iter().zip(input) {
            for (pos, &sym) in x.iter().enumerate() {
                m[pos][sym] += p;
            }
        }
        m
    }
}
