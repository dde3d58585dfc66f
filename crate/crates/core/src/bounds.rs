//! Closed-form upper bounds on the rate penalty `C_CCC(P) - C_CSCC^L(P)`.
//!
//! The generic bound is `r(L, P)` itself. For the binary symmetric, erasure
//! and Z channels sharper bounds follow from entropy-power style inequalities
//! in the binary entropy function `h`.

use std::fmt;

use crate::error::{Error, Result};
use crate::typeclass::Composition;

const INVERSE_TOL: f64 = 1e-12;
const INVERSE_MAX_ITERATIONS: usize = 200;

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{name} = {x} is outside [0, 1]")));
    }
    Ok(())
}

/// `h(x) = -x log2 x - (1 - x) log2(1 - x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_unit("x", x)?;
    Ok(h(x))
}

fn h(x: f64) -> f64 {
    crate::numeric::neg_x_log2_x(x) + crate::numeric::neg_x_log2_x(1.0 - x)
}

/// The `alpha` in `[0, 1/2]` with `h(alpha) = t`, by bisection.
pub fn entropy_inverse(t: f64) -> Result<f64> {
    check_unit("t", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    if t == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..INVERSE_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let v = h(mid);
        if (v - t).abs() <= INVERSE_TOL && hi - lo <= INVERSE_TOL {
            return Ok(mid);
        }
        if v < t {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Binary convolution `a(1 - b) + (1 - a) b`.
pub fn star(a: f64, b: f64) -> Result<f64> {
    check_unit("a", a)?;
    check_unit("b", b)?;
    Ok(a * (1.0 - b) + (1.0 - a) * b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PenaltyMethod {
    Generic,
    BscMgl,
    Bec,
    ZChannel,
    Best,
}

impl fmt::Display for PenaltyMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Generic => "generic",
            Self::BscMgl => "bsc_mgl",
            Self::Bec => "bec",
            Self::ZChannel => "z_channel",
            Self::Best => "best",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyBound {
    /// Always 0: the penalty is non-negative.
    pub lower: f64,
    pub upper: f64,
    pub method: PenaltyMethod,
    /// `h(gamma) - r(L, P)` was negative and `alpha` was clamped to 0.
    pub alpha_clamped: bool,
    /// For the Z-channel bound: the generic `r(L, P)` branch of the minimum won.
    pub generic_branch: bool,
}

impl PenaltyBound {
    fn new(upper: f64, method: PenaltyMethod) -> Self {
        Self {
            lower: 0.0,
            upper: upper.max(0.0),
            method,
            alpha_clamped: false,
            generic_branch: false,
        }
    }
}

fn binary(p: &Composition) -> Result<()> {
    if p.alphabet_size() != 2 {
        return Err(Error::InvalidComposition(format!(
            "binary-channel bound needs a binary composition, got {} symbols",
            p.alphabet_size()
        )));
    }
    Ok(())
}

/// `alpha` with `h(alpha) = h(gamma) - r`, clamped to 0 when the target is negative.
fn alpha_for(gamma: f64, r: f64) -> Result<(f64, bool)> {
    let target = h(gamma) - r;
    if target < 0.0 {
        Ok((0.0, true))
    } else {
        Ok((entropy_inverse(target.min(1.0))?, false))
    }
}

/// `r(L, P)`: valid on every channel.
pub fn penalty_bound_generic(p: &Composition) -> PenaltyBound {
    PenaltyBound::new(p.rate_loss(), PenaltyMethod::Generic)
}

/// BSC bound `h(p0 * gamma) - h(p0 * alpha)` with `gamma = min(P(0), P(1))`.
pub fn penalty_bound_bsc(p0: f64, p: &Composition) -> Result<PenaltyBound> {
    if !(p0 > 0.0 && p0 < 0.5) {
        return Err(Error::Domain(format!("crossover {p0} is outside (0, 0.5)")));
    }
    binary(p)?;
    let gamma = p.probability(0).min(p.probability(1));
    if gamma == 0.0 {
        return Err(Error::DegenerateComposition(format!(
            "{p} has a single symbol; its type class is one sequence and the penalty is 0"
        )));
    }
    let (alpha, clamped) = alpha_for(gamma, p.rate_loss())?;
    let upper = h(star(p0, gamma)?) - h(star(p0, alpha)?);
    let mut b = PenaltyBound::new(upper, PenaltyMethod::BscMgl);
    b.alpha_clamped = clamped;
    Ok(b)
}

/// BEC bound `(1 - eps) r(L, P)`.
pub fn penalty_bound_bec(eps: f64, p: &Composition) -> Result<PenaltyBound> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("erasure probability {eps} is outside (0, 1)")));
    }
    Ok(PenaltyBound::new((1.0 - eps) * p.rate_loss(), PenaltyMethod::Bec))
}

/// Z-channel bound `min(r, h(gamma(1 - p0)) - h(alpha(1 - p0)))` with
/// `gamma = P(1)`, the frequency of the input that may flip to 0.
pub fn penalty_bound_z(p0: f64, p: &Composition) -> Result<PenaltyBound> {
    if !(p0 > 0.0 && p0 < 1.0) {
        return Err(Error::Domain(format!("flip probability {p0} is outside (0, 1)")));
    }
    binary(p)?;
    let r = p.rate_loss();
    let gamma = p.probability(1);
    let (alpha, clamped) = alpha_for(gamma, r)?;
    let keep = 1.0 - p0;
    let specific = h(gamma * keep) - h(alpha * keep);
    let mut b = PenaltyBound::new(specific.min(r), PenaltyMethod::ZChannel);
    b.alpha_clamped = clamped;
    b.generic_branch = r < specific;
    Ok(b)
}

/// Channel families that have a sharpened bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundFamily {
    Bsc(f64),
    Bec(f64),
    Z(f64),
    Other,
}

/// The smallest applicable upper bound, tagged `Best`.
pub fn best_penalty_bound(family: BoundFamily, p: &Composition) -> Result<PenaltyBound> {
    let generic = penalty_bound_generic(p);
    let specific = match family {
        BoundFamily::Bsc(p0) => match penalty_bound_bsc(p0, p) {
            Ok(b) => Some(b),
            Err(Error::DegenerateComposition(_)) => None,
            Err(e) => return Err(e),
        },
        BoundFamily::Bec(eps) => Some(penalty_bound_bec(eps, p)?),
        BoundFamily::Z(p0) => Some(penalty_bound_z(p0, p)?),
        BoundFamily::Other => None,
    };
    let mut best = match specific {
        Some(s) if s.upper < generic.upper => s,
        _ => generic,
    };
    best.method = PenaltyMethod::Best;
    Ok(best)
}
