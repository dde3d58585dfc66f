//! Normal approximation of the rate of a BSC code decoded one subblock at a
//! time, where the subblock is the whole blocklength `n`:
//!
//! `R ≈ C - sqrt(p(1-p)/n) log2((1-p)/p) Q⁻¹(ε) + log2(n) / (2n)`.
//!
//! It applies to balanced subblocks (equal numbers of zeros and ones), and the
//! `O(1/n)` term is dropped, so values are approximations.

use statrs::function::erf::{erfc, erfc_inv};

use crate::bounds::{binary_entropy, penalty_bound_bsc};
use crate::error::{Error, Result};
use crate::typeclass::Composition;

/// Gaussian tail `Q(x) = P(N(0, 1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `Q⁻¹(ε)`, refined by Newton steps on `Q(x) - ε`.
pub fn qinv(epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon {epsilon} is outside (0, 1)")));
    }
    let mut x = std::f64::consts::SQRT_2 * erfc_inv(2.0 * epsilon);
    for _ in 0..8 {
        let f = q_function(x) - epsilon;
        if f.abs() <= 1e-15 * epsilon.min(1.0 - epsilon) {
            break;
        }
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        x += f / density;
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsdPoint {
    pub n: usize,
    pub epsilon: f64,
    /// Bits per channel use (approximate).
    pub rate: f64,
}

fn check_crossover(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 0.5) {
        return Err(Error::Domain(format!("crossover {p} is outside (0, 0.5)")));
    }
    Ok(())
}

/// BSC capacity `1 - h(p)`.
pub fn bsc_capacity(p: f64) -> Result<f64> {
    Ok(1.0 - binary_entropy(p)?)
}

/// Approximate rate at blocklength `n` and average error probability `epsilon`.
pub fn lsd_rate_bsc(p: f64, n: usize, epsilon: f64) -> Result<f64> {
    check_crossover(p)?;
    if n == 0 {
        return Err(Error::Domain("blocklength must be at least 1".into()));
    }
    let nf = n as f64;
    let dispersion_term = (p * (1.0 - p) / nf).sqrt() * ((1.0 - p) / p).log2() * qinv(epsilon)?;
    Ok(bsc_capacity(p)? - dispersion_term + nf.log2() / (2.0 * nf))
}

pub fn lsd_point(p: f64, n: usize, epsilon: f64) -> Result<LsdPoint> {
    Ok(LsdPoint {
        n,
        epsilon,
        rate: lsd_rate_bsc(p, n, epsilon)?,
    })
}

/// Lower bound on the CSCC capacity of a BSC with balanced subblocks of
/// length `L` (joint decoding over many subblocks): `h(p * α) - h(p)` with
/// `h(α) = 1 - r(L, P)`.
pub fn joint_decoding_lower_bound(p: f64, length: usize) -> Result<f64> {
    check_crossover(p)?;
    if length == 0 || !length.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!("balanced subblocks need an even length, got {length}")));
    }
    let balanced = Composition::new(vec![length / 2, length / 2])?;
    let penalty = penalty_bound_bsc(p, &balanced)?;
    Ok(bsc_capacity(p)? - penalty.upper)
}
