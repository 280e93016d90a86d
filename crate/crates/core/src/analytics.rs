//! Closed-form connection and secrecy outage probabilities.
//!
//! With Rayleigh fading and PPP jammers, a link of length `d` driven at power
//! `P` has
//!
//! ```text
//! COP(link) = 1 - exp(-A_co d^2 P^(-2/alpha))
//! SOP(link) = 1 - exp(-B_so P^(2/alpha))
//! A_co = lambda_j pi (gamma_c P_jam)^(2/alpha) G(alpha)
//! B_so = (lambda_e / lambda_j) / ((gamma_e P_jam)^(2/alpha) G(alpha))
//! G(alpha) = Gamma(1 - 2/alpha) Gamma(1 + 2/alpha)
//! ```
//!
//! Hops fail independently, so a path survives only if every hop survives and
//! the per-hop exponents add up. The SOP expression is obtained through
//! Jensen's inequality over the jammer field and is an upper bound on the
//! true secrecy outage probability.

use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::params::{PathSpec, SystemParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutageKind {
    Connection,
    Secrecy,
}

/// A probability in `[0, 1]` tagged with the outage event it describes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageValue {
    probability: f64,
    kind: OutageKind,
}

impl OutageValue {
    fn from_exponent(exponent: f64, kind: OutageKind) -> Self {
        // -expm1 keeps full relative precision for tiny exponents
        let probability = (-(-exponent).exp_m1()).clamp(0.0, 1.0);
        Self { probability, kind }
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn kind(&self) -> OutageKind {
        self.kind
    }
}

/// `Gamma(1 - 2/alpha) * Gamma(1 + 2/alpha)`, evaluated through log-gamma.
pub fn gamma_factor(alpha: f64) -> Result<f64> {
    if !(alpha.is_finite() && alpha > 2.0) {
        return Err(Error::param(
            "alpha",
            format!("alpha must exceed 2, got {alpha}"),
        ));
    }
    let z = 2.0 / alpha;
    Ok((ln_gamma(1.0 - z) + ln_gamma(1.0 + z)).exp())
}

fn gamma_factor_valid(params: &SystemParams) -> f64 {
    gamma_factor(params.alpha()).expect("validated alpha exceeds 2")
}

/// The COP constant `A_co`.
pub fn a_co(params: &SystemParams) -> f64 {
    let two_over_alpha = 2.0 / params.alpha();
    params.lambda_j()
        * std::f64::consts::PI
        * (params.gamma_c() * params.p_jam()).powf(two_over_alpha)
        * gamma_factor_valid(params)
}

/// The SOP constant `B_so`; zero when there are no eavesdroppers.
pub fn b_so(params: &SystemParams) -> f64 {
    let two_over_alpha = 2.0 / params.alpha();
    params.lambda_e()
        / params.lambda_j()
        / ((params.gamma_e() * params.p_jam()).powf(two_over_alpha) * gamma_factor_valid(params))
}

fn check_positive(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

/// Single-link connection outage probability.
pub fn link_cop(d: f64, p: f64, params: &SystemParams) -> Result<OutageValue> {
    check_positive("distance", d)?;
    check_positive("power", p)?;
    let exponent = a_co(params) * d * d * p.powf(-2.0 / params.alpha());
    Ok(OutageValue::from_exponent(exponent, OutageKind::Connection))
}

/// Path connection outage probability; every hop must carry a power.
pub fn path_cop(path: &PathSpec, params: &SystemParams) -> Result<OutageValue> {
    let powers = path.powers()?;
    let t = -2.0 / params.alpha();
    let sum: f64 = path
        .hops()
        .iter()
        .zip(&powers)
        .map(|(h, p)| h.distance * h.distance * p.powf(t))
        .sum();
    Ok(OutageValue::from_exponent(
        a_co(params) * sum,
        OutageKind::Connection,
    ))
}

/// Single-link secrecy outage probability (upper bound, see module docs).
pub fn link_sop(p: f64, params: &SystemParams) -> Result<OutageValue> {
    check_positive("power", p)?;
    let exponent = b_so(params) * p.powf(2.0 / params.alpha());
    Ok(OutageValue::from_exponent(exponent, OutageKind::Secrecy))
}

/// Path secrecy outage probability; every hop must carry a power.
pub fn path_sop(path: &PathSpec, params: &SystemParams) -> Result<OutageValue> {
    let powers = path.powers()?;
    let t = 2.0 / params.alpha();
    let sum: f64 = powers.iter().map(|p| p.powf(t)).sum();
    Ok(OutageValue::from_exponent(
        b_so(params) * sum,
        OutageKind::Secrecy,
    ))
}
