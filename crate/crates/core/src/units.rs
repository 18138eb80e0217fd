//! Power and frequency quantities.
//!
//! Logarithmic (dBm) and linear (mW) powers are distinct types; the only way
//! across is [`dbm_to_mw`] / [`mw_to_dbm`]. The reference power is fixed at
//! 1 mW.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnitError {
    #[error("{quantity} must be finite, got {value}")]
    NotFinite { quantity: &'static str, value: f64 },
    #[error("{quantity} must be positive, got {value}")]
    NotPositive { quantity: &'static str, value: f64 },
    #[error("{quantity} must be non-negative, got {value}")]
    Negative { quantity: &'static str, value: f64 },
}

/// Power level in dBm.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PowerDbm(f64);

impl PowerDbm {
    pub fn new(value: f64) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NotFinite {
                quantity: "power (dBm)",
                value,
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for PowerDbm {
    type Error = UnitError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<PowerDbm> for f64 {
    fn from(p: PowerDbm) -> f64 {
        p.0
    }
}

impl fmt::Display for PowerDbm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} dBm", self.0)
    }
}

/// Linear power in mW. Zero is allowed and means "component absent".
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PowerMw(f64);

impl PowerMw {
    pub const ZERO: PowerMw = PowerMw(0.0);

    pub fn new(value: f64) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NotFinite {
                quantity: "power (mW)",
                value,
            });
        }
        if value < 0.0 {
            return Err(UnitError::Negative {
                quantity: "power (mW)",
                value,
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_absent(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for PowerMw {
    type Error = UnitError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<PowerMw> for f64 {
    fn from(p: PowerMw) -> f64 {
        p.0
    }
}

impl fmt::Display for PowerMw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} mW", self.0)
    }
}

/// Frequency in GHz, strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FrequencyGhz(f64);

impl FrequencyGhz {
    pub fn new(value: f64) -> Result<Self, UnitError> {
        if !value.is_finite() {
            return Err(UnitError::NotFinite {
                quantity: "frequency (GHz)",
                value,
            });
        }
        if value <= 0.0 {
            return Err(UnitError::NotPositive {
                quantity: "frequency (GHz)",
                value,
            });
        }
        Ok(Self(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn hz(self) -> f64 {
        self.0 * 1e9
    }
}

impl TryFrom<f64> for FrequencyGhz {
    type Error = UnitError;
    fn try_from(v: f64) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<FrequencyGhz> for f64 {
    fn from(f: FrequencyGhz) -> f64 {
        f.0
    }
}

impl fmt::Display for FrequencyGhz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} GHz", self.0)
    }
}

/// 10^(dBm/10) mW. Strictly positive for any finite input that does not underflow.
pub fn dbm_to_mw(p: PowerDbm) -> PowerMw {
    PowerMw(10f64.powf(p.0 / 10.0))
}

pub fn mw_to_dbm(p: PowerMw) -> Result<PowerDbm, UnitError> {
    if p.0 <= 0.0 {
        return Err(UnitError::NotPositive {
            quantity: "power (mW) for dBm conversion",
            value: p.0,
        });
    }
    Ok(PowerDbm(10.0 * p.0.log10()))
}

/// Gain in dB between two dBm levels.
pub fn gain_db(p_out: PowerDbm, p_in: PowerDbm) -> f64 {
    p_out.0 - p_in.0
}

/// Linear power ratio for a gain in dB.
pub fn db_to_ratio(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}
