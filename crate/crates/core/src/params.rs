//! Domain types shared by every other module: the network parameter tuple,
//! multi-hop paths, outage constraints, and the code-rate conversion.

use crate::error::{Error, Result};

/// Unvalidated parameter tuple, e.g. as read from a config file or CLI flags.
///
/// Turn it into a [`SystemParams`] with [`ParamsCandidate::validate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamsCandidate {
    pub lambda_j: f64,
    pub lambda_e: f64,
    pub gamma_c: f64,
    pub gamma_e: f64,
    pub p_jam: f64,
    pub alpha: f64,
}

impl ParamsCandidate {
    pub fn validate(self) -> Result<SystemParams> {
        validate_params(self)
    }
}

impl Default for ParamsCandidate {
    /// Jammer density 1e-3, eavesdropper density 1e-4, unit thresholds and
    /// jammer power, path-loss exponent 4.
    fn default() -> Self {
        Self {
            lambda_j: 1e-3,
            lambda_e: 1e-4,
            gamma_c: 1.0,
            gamma_e: 1.0,
            p_jam: 1.0,
            alpha: 4.0,
        }
    }
}

/// Validated network parameters.
///
/// * `lambda_j` – jammer density (points per unit area), strictly positive
/// * `lambda_e` – eavesdropper density, non-negative
/// * `gamma_c` – SIR threshold for decoding at the intended receiver, non-negative
/// * `gamma_e` – SIR threshold for interception at an eavesdropper, strictly positive
/// * `p_jam` – common jammer transmit power, strictly positive
/// * `alpha` – path-loss exponent, strictly greater than 2
///
/// Values are immutable once constructed; use the `with_*` methods to derive
/// a modified, re-validated copy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    lambda_j: f64,
    lambda_e: f64,
    gamma_c: f64,
    gamma_e: f64,
    p_jam: f64,
    alpha: f64,
}

/// Checks every field of `raw` and returns the first violation found.
pub fn validate_params(raw: ParamsCandidate) -> Result<SystemParams> {
    fn finite(field: &'static str, v: f64) -> Result<()> {
        if v.is_finite() {
            Ok(())
        } else {
            Err(Error::param(field, format!("must be finite, got {v}")))
        }
    }
    let ParamsCandidate {
        lambda_j,
        lambda_e,
        gamma_c,
        gamma_e,
        p_jam,
        alpha,
    } = raw;

    finite("lambda_j", lambda_j)?;
    if lambda_j <= 0.0 {
        return Err(Error::param(
            "lambda_j",
            format!("must be positive, got {lambda_j}"),
        ));
    }
    finite("lambda_e", lambda_e)?;
    if lambda_e < 0.0 {
        return Err(Error::param(
            "lambda_e",
            format!("must be non-negative, got {lambda_e}"),
        ));
    }
    finite("gamma_c", gamma_c)?;
    if gamma_c < 0.0 {
        return Err(Error::param(
            "gamma_c",
            format!("must be non-negative, got {gamma_c}"),
        ));
    }
    finite("gamma_e", gamma_e)?;
    if gamma_e <= 0.0 {
        return Err(Error::param(
            "gamma_e",
            format!("must be positive, got {gamma_e}"),
        ));
    }
    finite("p_jam", p_jam)?;
    if p_jam <= 0.0 {
        return Err(Error::param(
            "p_jam",
            format!("must be positive, got {p_jam}"),
        ));
    }
    finite("alpha", alpha)?;
    if alpha <= 2.0 {
        return Err(Error::param(
            "alpha",
            format!("alpha must exceed 2, got {alpha}"),
        ));
    }

    Ok(SystemParams {
        lambda_j,
        lambda_e,
        gamma_c,
        gamma_e,
        p_jam,
        alpha,
    })
}

impl SystemParams {
    pub fn new(
        lambda_j: f64,
        lambda_e: f64,
        gamma_c: f64,
        gamma_e: f64,
        p_jam: f64,
        alpha: f64,
    ) -> Result<Self> {
        validate_params(ParamsCandidate {
            lambda_j,
            lambda_e,
            gamma_c,
            gamma_e,
            p_jam,
            alpha,
        })
    }

    pub fn lambda_j(&self) -> f64 {
        self.lambda_j
    }
    pub fn lambda_e(&self) -> f64 {
        self.lambda_e
    }
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }
    pub fn gamma_e(&self) -> f64 {
        self.gamma_e
    }
    pub fn p_jam(&self) -> f64 {
        self.p_jam
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn candidate(&self) -> ParamsCandidate {
        ParamsCandidate {
            lambda_j: self.lambda_j,
            lambda_e: self.lambda_e,
            gamma_c: self.gamma_c,
            gamma_e: self.gamma_e,
            p_jam: self.p_jam,
            alpha: self.alpha,
        }
    }

    pub fn with_lambda_j(&self, lambda_j: f64) -> Result<Self> {
        ParamsCandidate {
            lambda_j,
            ..self.candidate()
        }
        .validate()
    }
    pub fn with_lambda_e(&self, lambda_e: f64) -> Result<Self> {
        ParamsCandidate {
            lambda_e,
            ..self.candidate()
        }
        .validate()
    }
    pub fn with_gamma_c(&self, gamma_c: f64) -> Result<Self> {
        ParamsCandidate {
            gamma_c,
            ..self.candidate()
        }
        .validate()
    }
    pub fn with_gamma_e(&self, gamma_e: f64) -> Result<Self> {
        ParamsCandidate {
            gamma_e,
            ..self.candidate()
        }
        .validate()
    }
    pub fn with_p_jam(&self, p_jam: f64) -> Result<Self> {
        ParamsCandidate {
            p_jam,
            ..self.candidate()
        }
        .validate()
    }
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        ParamsCandidate {
            alpha,
            ..self.candidate()
        }
        .validate()
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        ParamsCandidate::default()
            .validate()
            .expect("default parameters are valid")
    }
}

/// One link of a path: its length and, once allocated, its transmit power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hop {
    pub distance: f64,
    pub power: Option<f64>,
}

/// An ordered, non-empty list of hops.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSpec {
    hops: Vec<Hop>,
}

impl PathSpec {
    pub fn new(hops: Vec<Hop>) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::InvalidPath("a path needs at least one hop".into()));
        }
        for (k, hop) in hops.iter().enumerate() {
            if !(hop.distance.is_finite() && hop.distance > 0.0) {
                return Err(Error::InvalidPath(format!(
                    "hop {k} distance must be positive and finite, got {}",
                    hop.distance
                )));
            }
            if let Some(p) = hop.power {
                if !(p.is_finite() && p > 0.0) {
                    return Err(Error::InvalidPath(format!(
                        "hop {k} power must be positive and finite, got {p}"
                    )));
                }
            }
        }
        Ok(Self { hops })
    }

    /// A path whose hop powers are not yet assigned.
    pub fn from_distances(distances: &[f64]) -> Result<Self> {
        Self::new(
            distances
                .iter()
                .map(|&distance| Hop {
                    distance,
                    power: None,
                })
                .collect(),
        )
    }

    pub fn with_powers(distances: &[f64], powers: &[f64]) -> Result<Self> {
        if distances.len() != powers.len() {
            return Err(Error::InvalidPath(format!(
                "{} distances but {} powers",
                distances.len(),
                powers.len()
            )));
        }
        Self::new(
            distances
                .iter()
                .zip(powers)
                .map(|(&distance, &p)| Hop {
                    distance,
                    power: Some(p),
                })
                .collect(),
        )
    }

    /// `hops` identical links of length `distance` at power `power`.
    pub fn uniform(hops: usize, distance: f64, power: f64) -> Result<Self> {
        Self::with_powers(&vec![distance; hops], &vec![power; hops])
    }

    pub fn hops(&self) -> &[Hop] {
        &self.hops
    }

    pub fn len(&self) -> usize {
        self.hops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hops.is_empty()
    }

    pub fn distances(&self) -> Vec<f64> {
        self.hops.iter().map(|h| h.distance).collect()
    }

    pub fn total_length(&self) -> f64 {
        self.hops.iter().map(|h| h.distance).sum()
    }

    /// Per-hop powers, or an error naming the first hop without one.
    pub fn powers(&self) -> Result<Vec<f64>> {
        self.hops
            .iter()
            .enumerate()
            .map(|(k, h)| {
                h.power
                    .ok_or_else(|| Error::InvalidPath(format!("hop {k} has no transmit power")))
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Bound on the path secrecy outage probability.
    Secrecy,
    /// Bound on the path connection outage probability.
    Connection,
}

/// Guard band keeping `ln(1 - beta)` away from its singularities.
pub const BETA_GUARD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageConstraint {
    kind: ConstraintKind,
    beta: f64,
}

impl OutageConstraint {
    pub fn new(kind: ConstraintKind, beta: f64) -> Result<Self> {
        let field = match kind {
            ConstraintKind::Secrecy => "beta_so",
            ConstraintKind::Connection => "beta_co",
        };
        if !(BETA_GUARD..=1.0 - BETA_GUARD).contains(&beta) {
            return Err(Error::param(
                field,
                format!("must lie strictly inside (0, 1), got {beta}"),
            ));
        }
        Ok(Self { kind, beta })
    }

    pub fn secrecy(beta_so: f64) -> Result<Self> {
        Self::new(ConstraintKind::Secrecy, beta_so)
    }

    pub fn connection(beta_co: f64) -> Result<Self> {
        Self::new(ConstraintKind::Connection, beta_co)
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Converts Wyner code rates (bits per channel use) into SIR thresholds:
/// `gamma_c = 2^r_t - 1` and `gamma_e = 2^(r_t - r_s) - 1`.
///
/// A zero rate redundancy (`r_s == r_t`) yields `gamma_e == 0`, which is a
/// valid conversion result but not a valid [`SystemParams::gamma_e`].
pub fn rates_to_thresholds(r_t: f64, r_s: f64) -> Result<(f64, f64)> {
    if !(r_t.is_finite() && r_t >= 0.0) {
        return Err(Error::param(
            "r_t",
            format!("must be finite and non-negative, got {r_t}"),
        ));
    }
    if !(r_s.is_finite() && r_s >= 0.0) {
        return Err(Error::param(
            "r_s",
            format!("must be finite and non-negative, got {r_s}"),
        ));
    }
    if r_s > r_t {
        return Err(Error::param(
            "r_s",
            format!("secrecy rate {r_s} exceeds codeword rate {r_t}"),
        ));
    }
    let r_e = r_t - r_s;
    Ok((r_t.exp2() - 1.0, r_e.exp2() - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reference_settings_are_accepted() {
        let p = SystemParams::new(1e-3, 1e-4, 1.0, 1.0, 1.0, 4.0).unwrap();
        assert_eq!(p.alpha(), 4.0);
        assert_eq!(p, SystemParams::default());
    }

    #[test]
    fn alpha_two_is_rejected() {
        let err = SystemParams::new(1e-3, 1e-4, 1.0, 1.0, 1.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("alpha must exceed 2"), "{err}");
    }

    #[test]
    fn zero_jammer_density_is_rejected() {
        match SystemParams::new(0.0, 1e-4, 1.0, 1.0, 1.0, 4.0) {
            Err(Error::InvalidParam { field, .. }) => assert_eq!(field, "lambda_j"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_gamma_c_allowed_zero_gamma_e_not() {
        assert!(SystemParams::new(1e-3, 1e-4, 0.0, 1.0, 1.0, 4.0).is_ok());
        assert!(SystemParams::new(1e-3, 1e-4, 1.0, 0.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn rate_conversion_examples() {
        assert_eq!(rates_to_thresholds(1.0, 1.0).unwrap(), (1.0, 0.0));
        assert_eq!(rates_to_thresholds(1.0, 0.0).unwrap(), (1.0, 1.0));
        assert_eq!(rates_to_thresholds(2.0, 1.0).unwrap(), (3.0, 1.0));
        assert!(rates_to_thresholds(1.0, 1.5).is_err());
    }

    #[test]
    fn path_rejects_bad_hops() {
        assert!(PathSpec::from_distances(&[]).is_err());
        assert!(PathSpec::from_distances(&[1.0, 0.0]).is_err());
        assert!(PathSpec::with_powers(&[1.0], &[-1.0]).is_err());
        assert!(PathSpec::with_powers(&[1.0, 2.0], &[1.0]).is_err());
        assert!(PathSpec::from_distances(&[1.0]).unwrap().powers().is_err());
    }

    #[test]
    fn beta_guard_band() {
        assert!(OutageConstraint::secrecy(0.0).is_err());
        assert!(OutageConstraint::secrecy(1.0).is_err());
        assert!(OutageConstraint::connection(1.0 - 1e-13).is_err());
        assert!(OutageConstraint::connection(0.5).is_ok());
    }

    fn any_f64() -> impl Strategy<Value = f64> {
        prop_oneof![
            -10.0..10.0f64,
            Just(0.0),
            Just(2.0),
            Just(f64::NAN),
            Just(f64::INFINITY),
            1e-6..1e-1f64,
        ]
    }

    proptest! {
        #[test]
        fn validation_is_total(
            lambda_j in any_f64(), lambda_e in any_f64(), gamma_c in any_f64(),
            gamma_e in any_f64(), p_jam in any_f64(), alpha in any_f64(),
        ) {
            let raw = ParamsCandidate { lambda_j, lambda_e, gamma_c, gamma_e, p_jam, alpha };
            match raw.validate() {
                Ok(p) => {
                    prop_assert!(p.lambda_j() > 0.0 && p.lambda_e() >= 0.0);
                    prop_assert!(p.gamma_c() >= 0.0 && p.gamma_e() > 0.0);
                    prop_assert!(p.p_jam() > 0.0 && p.alpha() > 2.0);
                    prop_assert_eq!(p.candidate(), raw);
                }
                Err(Error::InvalidParam { field, .. }) => {
                    prop_assert!(["lambda_j", "lambda_e", "gamma_c", "gamma_e", "p_jam", "alpha"].contains(&field));
                }
                Err(other) => prop_assert!(false, "unexpected error {other:?}"),
            }
        }

        #[test]
        fn rate_conversion_is_monotone(r_t in 0.0..8.0f64, frac in 0.0..1.0f64, bump in 0.01..1.0f64) {
            let r_s = r_t * frac;
            let (gc, ge) = rates_to_thresholds(r_t, r_s).unwrap();
            let (gc_up, _) = rates_to_thresholds(r_t + bump, r_s).unwrap();
            prop_assert!(gc_up > gc);
            let r_s_up = (r_s + bump).min(r_t);
            if r_s_up > r_s {
                let (_, ge_down) = rates_to_thresholds(r_t, r_s_up).unwrap();
                prop_assert!(ge_down < ge);
            }
        }
    }
}
