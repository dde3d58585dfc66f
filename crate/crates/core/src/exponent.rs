//! Sphere-packing and random-coding exponents for constant composition codes,
//! and the CSCC error bound obtained by shifting the rate by `r(L, P)`.
//!
//! The sphere-packing minimizer is a tilted channel
//! `V_s(y|x) ∝ W(y|x)^(1-s) PV(y)^s`, where `PV` is its own output law. For
//! each `s` in `[0, 1]` the output law is found by fixed-point iteration, and
//! `s` is bisected until `I(P, V_s) = R`. The slope of `E_sp` is `-s/(1-s)`, so
//! the critical rate sits at `s = 1/2`.
//!
//! Exponents are in bits: error probabilities are powers of 2.

use rayon::prelude::*;

use crate::channel::{divergence_conditional, matrix_rows, mutual_information, Channel, Distribution};
use crate::error::{Error, Result};
use crate::numeric;
use crate::typeclass::Composition;

pub const DEFAULT_TOL: f64 = 1e-10;
const FIXED_POINT_MAX_ITERATIONS: usize = 100_000;
/// Tolerance for the inner fixed point while bisecting on `s`.
const INNER_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct TiltedSolution {
    pub s: f64,
    /// Row-stochastic `V(y|x)`, one row per input.
    pub v: Vec<Vec<f64>>,
    pub pv: Vec<f64>,
    /// `I(P, V)`, bits.
    pub rate: f64,
    /// `D(V || W | P)`, bits.
    pub divergence: f64,
    /// `max_y |PV(y) - sum_x P(x) V(y|x)|`.
    pub residual: f64,
    pub iterations: usize,
}

fn tilt(ch: &Channel, s: f64, pv: &[f64]) -> Vec<Vec<f64>> {
    let weights: Vec<f64> = pv.iter().map(|q| q.powf(s)).collect();
    ch.rows()
        .map(|row| {
            let mut v: Vec<f64> = row
                .iter()
                .zip(&weights)
                .map(|(&w, &q)| if w > 0.0 { w.powf(1.0 - s) * q } else { 0.0 })
                .collect();
            let z = numeric::sum(v.iter().copied());
            if z > 0.0 {
                v.iter_mut().for_each(|e| *e /= z);
            } else {
                // the row sees none of PV's mass; fall back to W's own row
                v.copy_from_slice(row);
            }
            v
        })
        .collect()
}

fn mix(p: &[f64], v: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; v[0].len()];
    for (px, row) in p.iter().zip(v) {
        for (o, e) in out.iter_mut().zip(row) {
            *o += px * e;
        }
    }
    out
}

/// Solves for the tilted channel at parameter `s`, iterating on the output
/// law from `PW` until the largest change is at most `tol`. Damping by 1/2
/// switches on if the change grows three steps in a row.
pub fn tilted_fixed_point(ch: &Channel, p: &Distribution, s: f64, tol: f64) -> Result<TiltedSolution> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("tilt parameter {s} is outside [0, 1]")));
    }
    if p.len() != ch.input_size() {
        return Err(Error::InvalidArgument(format!(
            "input law over {} symbols for a channel with {} inputs",
            p.len(),
            ch.input_size()
        )));
    }
    let probs = p.probs();
    let mut pv = ch.output_distribution(probs);
    let mut last_change = f64::INFINITY;
    let mut rises = 0;
    let mut damped = false;
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next = mix(probs, &tilt(ch, s, &pv));
        let change = next.iter().zip(&pv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        if damped {
            pv.iter_mut().zip(&next).for_each(|(o, n)| *o = 0.5 * (*o + n));
        } else {
            pv = next;
        }
        if change <= tol {
            break;
        }
        if change > last_change {
            rises += 1;
            if rises >= 3 {
                damped = true;
            }
        } else {
            rises = 0;
        }
        last_change = change;
        if iterations >= FIXED_POINT_MAX_ITERATIONS {
            return Err(Error::NoConvergence {
                what: format!("tilted fixed point at s = {s} (change {change:.3e})"),
                iterations,
            });
        }
    }
    let v = tilt(ch, s, &pv);
    let induced = mix(probs, &v);
    let residual = induced.iter().zip(&pv).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let rate = information(probs, &v, &induced);
    let divergence = divergence_conditional(&v, &matrix_rows(ch), p)?;
    Ok(TiltedSolution {
        s,
        v,
        pv,
        rate,
        divergence,
        residual,
        iterations,
    })
}

fn information(p: &[f64], v: &[Vec<f64>], q: &[f64]) -> f64 {
    numeric::sum(p.iter().zip(v).filter(|(px, _)| **px > 0.0).map(|(px, row)| {
        px * numeric::sum(
            row.iter()
                .zip(q)
                .filter(|(e, _)| **e > 0.0)
                .map(|(e, qy)| e * (e / qy).log2()),
        )
    }))
    .max(0.0)
}

/// Outcome of the `E_sp(R)` minimization: zero above `I(P, W)`, infinite
/// when even `s = 1` cannot bring the rate down to `R`, otherwise the
/// minimizing tilted channel.
#[derive(Debug, Clone, PartialEq)]
pub enum SpherePackingPoint {
    AboveMutualInformation,
    Infinite,
    Tilted(TiltedSolution),
}

impl SpherePackingPoint {
    pub fn exponent(&self) -> f64 {
        match self {
            Self::AboveMutualInformation => 0.0,
            Self::Infinite => f64::INFINITY,
            Self::Tilted(t) => t.divergence,
        }
    }

    pub fn s(&self) -> Option<f64> {
        match self {
            Self::Tilted(t) => Some(t.s),
            _ => None,
        }
    }
}

/// Bisects `s` until `|I(P, V_s) - R| <= tol`, checking at each step that the
/// rate is non-increasing in `s`.
pub fn sphere_packing_point(ch: &Channel, p: &Distribution, rate: f64, tol: f64) -> Result<SpherePackingPoint> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate {rate} must be positive")));
    }
    let i_pw = mutual_information(p, ch);
    if rate >= i_pw {
        return Ok(SpherePackingPoint::AboveMutualInformation);
    }
    let inner = INNER_TOL.min(tol);
    let mut lo = tilted_fixed_point(ch, p, 0.0, inner)?;
    let mut hi = tilted_fixed_point(ch, p, 1.0, inner)?;
    if hi.rate > rate + tol {
        return Ok(SpherePackingPoint::Infinite);
    }
    if (hi.rate - rate).abs() <= tol {
        return Ok(SpherePackingPoint::Tilted(hi));
    }
    const MONOTONE_SLACK: f64 = 1e-9;
    for _ in 0..200 {
        let mid = tilted_fixed_point(ch, p, 0.5 * (lo.s + hi.s), inner)?;
        if mid.rate > lo.rate + MONOTONE_SLACK || mid.rate < hi.rate - MONOTONE_SLACK {
            return Err(Error::NoConvergence {
                what: format!(
                    "sphere-packing bisection: I(P, V_s) not monotone at s = {} (rate {})",
                    mid.s, mid.rate
                ),
                iterations: 0,
            });
        }
        if (mid.rate - rate).abs() <= tol || hi.s - lo.s <= 1e-16 {
            return Ok(SpherePackingPoint::Tilted(mid));
        }
        if mid.rate > rate {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::NoConvergence {
        what: "sphere-packing bisection".into(),
        iterations: 200,
    })
}

/// `E_sp(R, P, W)` in bits.
pub fn sphere_packing(ch: &Channel, p: &Distribution, rate: f64, tol: f64) -> Result<f64> {
    Ok(sphere_packing_point(ch, p, rate, tol)?.exponent())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExponentPoint {
    pub rate: f64,
    pub e_sp: f64,
    pub e_r: f64,
    /// Tilt parameter of the sphere-packing minimizer, when one exists.
    pub s: Option<f64>,
    pub v: Option<Vec<Vec<f64>>>,
}

/// Exponent context for one `(W, P)` pair: `I(P, W)`, the critical rate and
/// any sampled points.
#[derive(Debug, Clone)]
pub struct ExponentCurve {
    channel: Channel,
    input: Distribution,
    pub tol: f64,
    pub mutual_information: f64,
    /// Critical rate, where the slope of `E_sp` is -1.
    pub r_hat: f64,
    pub e_sp_at_r_hat: f64,
    pub points: Vec<ExponentPoint>,
}

impl ExponentCurve {
    pub fn new(ch: &Channel, p: &Distribution, tol: f64) -> Result<Self> {
        let half = tilted_fixed_point(ch, p, 0.5, INNER_TOL.min(tol))?;
        Ok(Self {
            channel: ch.clone(),
            input: p.clone(),
            tol,
            mutual_information: mutual_information(p, ch),
            r_hat: half.rate,
            e_sp_at_r_hat: half.divergence,
            points: Vec::new(),
        })
    }

    pub fn sphere_packing(&self, rate: f64) -> Result<f64> {
        sphere_packing(&self.channel, &self.input, rate, self.tol)
    }

    /// `E_r(R)`: `E_sp(R)` above the critical rate, the supporting line of
    /// slope -1 below it.
    pub fn random_coding(&self, rate: f64) -> Result<f64> {
        if !(rate > 0.0) {
            return Err(Error::Domain(format!("rate {rate} must be positive")));
        }
        if rate >= self.r_hat {
            self.sphere_packing(rate)
        } else {
            Ok(self.e_sp_at_r_hat + self.r_hat - rate)
        }
    }

    /// Evaluates both exponents on `rates`, in order.
    pub fn sample(&mut self, rates: &[f64]) -> Result<&[ExponentPoint]> {
        let points: Result<Vec<ExponentPoint>> = rates
            .par_iter()
            .map(|&rate| {
                let sp = sphere_packing_point(&self.channel, &self.input, rate, self.tol)?;
                let e_sp = sp.exponent();
                let e_r = if rate >= self.r_hat {
                    e_sp
                } else {
                    self.e_sp_at_r_hat + self.r_hat - rate
                };
                let (s, v) = match sp {
                    SpherePackingPoint::Tilted(t) => (Some(t.s), Some(t.v)),
                    _ => (None, None),
                };
                Ok(ExponentPoint { rate, e_sp, e_r, s, v })
            })
            .collect();
        self.points = points?;
        Ok(&self.points)
    }
}

/// `E_r(R, P, W)` in bits.
pub fn random_coding(ch: &Channel, p: &Distribution, rate: f64, tol: f64) -> Result<f64> {
    ExponentCurve::new(ch, p, tol)?.random_coding(rate)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundBranch {
    /// `2 * 2^(-n E_sp(R'))`, used when `R' >= r_hat`.
    SpherePacking,
    /// `2^(-n (E_sp(r_hat) + r_hat - R'))`.
    StraightLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBound {
    /// `R + r(L, P)`.
    pub shifted_rate: f64,
    pub exponent: f64,
    pub log2_bound: f64,
    /// `2^log2_bound`; may exceed 1.
    pub bound: f64,
    pub branch: BoundBranch,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
}

/// Upper bound on the maximum error probability of a length-`n` CSCC with
/// subblock composition `p` at rate `R`.
pub fn cscc_error_bound(ch: &Channel, p: &Composition, rate: f64, n: usize) -> Result<ErrorBound> {
    cscc_error_bound_with(ch, p, rate, n, DEFAULT_TOL)
}

pub fn cscc_error_bound_with(ch: &Channel, p: &Composition, rate: f64, n: usize, tol: f64) -> Result<ErrorBound> {
    if !(rate > 0.0) {
        return Err(Error::Domain(format!("rate {rate} must be positive")));
    }
    if n == 0 || !n.is_multiple_of(p.length()) {
        return Err(Error::InvalidArgument(format!(
            "blocklength {n} is not a positive multiple of the subblock length {}",
            p.length()
        )));
    }
    let curve = ExponentCurve::new(ch, &p.distribution(), tol)?;
    let shifted = rate + p.rate_loss();
    let (exponent, branch, offset) = if shifted >= curve.r_hat {
        (curve.sphere_packing(shifted)?, BoundBranch::SpherePacking, 1.0)
    } else {
        (curve.e_sp_at_r_hat + curve.r_hat - shifted, BoundBranch::StraightLine, 0.0)
    };
    let log2_bound = offset - n as f64 * exponent;
    Ok(ErrorBound {
        shifted_rate: shifted,
        exponent,
        log2_bound,
        bound: log2_bound.exp2(),
        branch,
        vacuous: log2_bound >= 0.0,
    })
}

/// Lower bound on the CSCC error exponent: `E_r(R + r(L, P), P, W)`.
pub fn exponent_lower_bound(ch: &Channel, p: &Composition, rate: f64) -> Result<f64> {
    random_coding(ch, &p.distribution(), rate + p.rate_loss(), DEFAULT_TOL)
}
