//! Ricean-K NLOS sensing model.
//!
//! The received CFR is split into a static vector of magnitude
//! `|Hs| = (K + rho) / (K + 1)` (all LOS power plus the static share `rho` of the
//! NLOS power) and a dynamic vector of magnitude `|Hd| = (1 - rho) / (K + 1)`
//! reflected off the body. Motion rotates the dynamic vector, and the cross term
//! `2 |Hs| |Hd| cos(theta)` of `|H|^2` measures how strongly the amplitude reacts.
//!
//! Derivative signs are only meaningful for `cos(theta) > 0`; the `cos(theta)`
//! factor is kept in every formula rather than dropped.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// State of the static/dynamic channel split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiceanChannelParams {
    /// Ricean K factor, LOS power over NLOS power.
    pub k_factor: f64,
    /// Total received power, linear.
    pub omega: f64,
    /// Fraction of NLOS power on static paths.
    pub rho: f64,
    /// LOS phase, radians.
    pub phi0: f64,
    /// Static/dynamic phase difference, radians.
    pub theta: f64,
    /// Carrier wavelength, meters.
    pub lambda: f64,
}

impl Default for RiceanChannelParams {
    fn default() -> Self {
        Self {
            k_factor: 52.0,
            omega: 1.0,
            rho: 0.7,
            phi0: 0.0,
            theta: 0.0,
            // 5.2 GHz carrier
            lambda: 0.0577,
        }
    }
}

impl RiceanChannelParams {
    pub fn new(k_factor: f64, rho: f64, theta: f64) -> Result<Self> {
        let p = Self {
            k_factor,
            rho,
            theta,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k_factor >= 0.0 && self.k_factor.is_finite()) {
            return Err(invalid("k_factor", "must be finite and >= 0"));
        }
        if !(self.omega > 0.0 && self.omega.is_finite()) {
            return Err(invalid("omega", "must be finite and > 0"));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return Err(invalid("rho", "must lie in [0, 1]"));
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) {
            return Err(invalid("lambda", "must be finite and > 0"));
        }
        if !self.theta.is_finite() || !self.phi0.is_finite() {
            return Err(invalid("theta", "phases must be finite"));
        }
        Ok(())
    }

    /// Unit-normalized static magnitude `(K + rho) / (K + 1)`.
    pub fn hs_mag(&self) -> f64 {
        (self.k_factor + self.rho) / (self.k_factor + 1.0)
    }

    /// Unit-normalized dynamic magnitude `(1 - rho) / (K + 1)`.
    pub fn hd_mag(&self) -> f64 {
        (1.0 - self.rho) / (self.k_factor + 1.0)
    }

    /// `|H|^2` at the configured phase difference.
    pub fn composite_power(&self) -> f64 {
        let (hs, hd) = (self.hs_mag(), self.hd_mag());
        hs * hs + hd * hd + 2.0 * hs * hd * self.theta.cos()
    }

    pub fn with_k(self, k_factor: f64) -> Self {
        Self { k_factor, ..self }
    }

    pub fn with_rho(self, rho: f64) -> Self {
        Self { rho, ..self }
    }
}

/// Motion-induced amplitude term `f = 2 (K + rho)(1 - rho) cos(theta) / (K + 1)^2`.
pub fn amplitude_fluctuation(p: &RiceanChannelParams) -> f64 {
    let k1 = p.k_factor + 1.0;
    2.0 * (p.k_factor + p.rho) * (1.0 - p.rho) * p.theta.cos() / (k1 * k1)
}

/// `df/dK = 2 (1 - rho)(-K^2 - 2 rho K + 1 - 2 rho) cos(theta) / (K + 1)^4`.
///
/// Zero at `K = 1 - 2 rho`; negative beyond it when `cos(theta) > 0`.
pub fn d_fluctuation_dk(p: &RiceanChannelParams) -> f64 {
    let (k, rho) = (p.k_factor, p.rho);
    let k1 = k + 1.0;
    let poly = -k * k - 2.0 * rho * k + 1.0 - 2.0 * rho;
    2.0 * (1.0 - rho) * poly * p.theta.cos() / (k1 * k1 * k1 * k1)
}

/// `df/drho = 2 (1 - K - 2 rho) cos(theta) / (K + 1)^2`.
///
/// Zero at `rho = (1 - K) / 2`, the boundary between the rising and falling
/// intervals of the sensing capability in `rho`.
pub fn d_fluctuation_drho(p: &RiceanChannelParams) -> f64 {
    let k1 = p.k_factor + 1.0;
    2.0 * (1.0 - p.k_factor - 2.0 * p.rho) * p.theta.cos() / (k1 * k1)
}

/// Stationary point of `f` in K for a given rho.
pub fn k_stationary(rho: f64) -> f64 {
    1.0 - 2.0 * rho
}

/// Stationary point of `f` in rho for a given K.
pub fn rho_stationary(k_factor: f64) -> f64 {
    (1.0 - k_factor) / 2.0
}

/// Largest amplitude swing `max|Hf| - min|Hf|` as the dynamic vector turns a
/// full circle around the tip of the static vector: `2 min(|Hs|, |Hd|)`.
pub fn sensing_ability(hs_mag: f64, hd_mag: f64) -> f64 {
    2.0 * hs_mag.min(hd_mag).max(0.0)
}

/// One row of a model sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelCurvePoint {
    pub k_factor: f64,
    pub rho: f64,
    pub theta: f64,
    pub f_value: f64,
    pub df_dk: f64,
    pub df_drho: f64,
    pub as_max: f64,
}

impl ModelCurvePoint {
    pub fn at(p: &RiceanChannelParams) -> Self {
        Self {
            k_factor: p.k_factor,
            rho: p.rho,
            theta: p.theta,
            f_value: amplitude_fluctuation(p),
            df_dk: d_fluctuation_dk(p),
            df_drho: d_fluctuation_drho(p),
            as_max: sensing_ability(p.hs_mag(), p.hd_mag()),
        }
    }
}

/// Evaluate the model over an ascending grid of K values.
pub fn model_sweep(rho: f64, theta: f64, k_grid: &[f64]) -> Result<Vec<ModelCurvePoint>> {
    if k_grid.is_empty() {
        return Err(invalid("k_grid", "must not be empty"));
    }
    if k_grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(invalid("k_grid", "must be strictly ascending"));
    }
    let base = RiceanChannelParams {
        rho,
        theta,
        ..RiceanChannelParams::default()
    };
    k_grid
        .iter()
        .map(|&k| {
            let p = base.with_k(k);
            p.validate()?;
            Ok(ModelCurvePoint::at(&p))
        })
        .collect()
}
