//! Ranking configurations: signal-type selection plus the four parameters
//! (d, alpha, beta, delta), and the seven named presets.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The six vote signal types.
///
/// `Exp*` are explicit up/down votes toward an answer's author. `Iav*` are
/// implicit agreement votes between co-voters of equal polarity, `Iov*`
/// implicit opposition votes between co-voters of opposite polarity (the
/// suffix marks the polarity of the source voter).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignalType {
    ExpPlus,
    ExpMinus,
    IavPlus,
    IavMinus,
    IovPlus,
    IovMinus,
}

impl SignalType {
    pub const ALL: [SignalType; 6] = [
        SignalType::ExpPlus,
        SignalType::ExpMinus,
        SignalType::IavPlus,
        SignalType::IavMinus,
        SignalType::IovPlus,
        SignalType::IovMinus,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SignalType::ExpPlus => "exp+",
            SignalType::ExpMinus => "exp-",
            SignalType::IavPlus => "iav+",
            SignalType::IavMinus => "iav-",
            SignalType::IovPlus => "iov+",
            SignalType::IovMinus => "iov-",
        }
    }

    pub fn parse(s: &str) -> Option<SignalType> {
        match s {
            "exp+" => Some(SignalType::ExpPlus),
            "exp-" => Some(SignalType::ExpMinus),
            "iav+" => Some(SignalType::IavPlus),
            "iav-" => Some(SignalType::IavMinus),
            "iov+" => Some(SignalType::IovPlus),
            "iov-" => Some(SignalType::IovMinus),
            _ => None,
        }
    }
}

/// Which signal types feed the positive and negative matrices.
///
/// Positive side: explicit positive votes plus any selection of iav types.
/// Negative side: explicit negative votes plus any selection of iov types.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeSelection {
    pub exp_plus: bool,
    pub iav_plus: bool,
    pub iav_minus: bool,
    pub exp_minus: bool,
    pub iov_plus: bool,
    pub iov_minus: bool,
}

impl TypeSelection {
    pub fn explicit_only() -> TypeSelection {
        TypeSelection {
            exp_plus: true,
            iav_plus: false,
            iav_minus: false,
            exp_minus: true,
            iov_plus: false,
            iov_minus: false,
        }
    }

    pub fn any_positive(&self) -> bool {
        self.exp_plus || self.iav_plus || self.iav_minus
    }

    pub fn any_negative(&self) -> bool {
        self.exp_minus || self.iov_plus || self.iov_minus
    }

    pub fn any_iav(&self) -> bool {
        self.iav_plus || self.iav_minus
    }

    pub fn any_iov(&self) -> bool {
        self.iov_plus || self.iov_minus
    }

    /// Parse a comma-separated list like `exp+,exp-,iav-`.
    pub fn parse(s: &str) -> Result<TypeSelection, ConfigError> {
        let mut sel = TypeSelection {
            exp_plus: false,
            iav_plus: false,
            iav_minus: false,
            exp_minus: false,
            iov_plus: false,
            iov_minus: false,
        };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            match SignalType::parse(part) {
                Some(SignalType::ExpPlus) => sel.exp_plus = true,
                Some(SignalType::ExpMinus) => sel.exp_minus = true,
                Some(SignalType::IavPlus) => sel.iav_plus = true,
                Some(SignalType::IavMinus) => sel.iav_minus = true,
                Some(SignalType::IovPlus) => sel.iov_plus = true,
                Some(SignalType::IovMinus) => sel.iov_minus = true,
                None => return Err(ConfigError::UnknownType(part.to_string())),
            }
        }
        Ok(sel)
    }

    pub fn selected(&self) -> Vec<SignalType> {
        let mut v = Vec::new();
        if self.exp_plus {
            v.push(SignalType::ExpPlus);
        }
        if self.exp_minus {
            v.push(SignalType::ExpMinus);
        }
        if self.iav_plus {
            v.push(SignalType::IavPlus);
        }
        if self.iav_minus {
            v.push(SignalType::IavMinus);
        }
        if self.iov_plus {
            v.push(SignalType::IovPlus);
        }
        if self.iov_minus {
            v.push(SignalType::IovMinus);
        }
        v
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("unknown signal type '{0}'")]
    UnknownType(String),
    #[error("parameter {name} = {value} is outside [0,1]")]
    OutOfRange { name: &'static str, value: f64 },
    #[error("alpha < 1 requires at least one positive signal type")]
    NoPositiveType,
    #[error("alpha > 0 requires at least one negative signal type")]
    NoNegativeType,
    #[error("beta > 0 requires an iav type to be selected")]
    BetaWithoutIav,
    #[error("delta > 0 requires an iov type to be selected")]
    DeltaWithoutIov,
    #[error("unknown preset '{0}'")]
    UnknownPreset(String),
}

/// A full ranking configuration: type selection plus parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankConfig {
    pub name: String,
    #[serde(flatten)]
    pub types: TypeSelection,
    /// Damping factor of the power iteration.
    pub d: f64,
    /// Weight of the negative rank vector in the signed combination.
    pub alpha: f64,
    /// Weight of implicit agreement votes in the positive matrix.
    pub beta: f64,
    /// Weight of implicit opposition votes in the negative matrix.
    pub delta: f64,
}

impl RankConfig {
    pub fn new(
        name: impl Into<String>,
        types: TypeSelection,
        d: f64,
        alpha: f64,
        beta: f64,
        delta: f64,
    ) -> Result<RankConfig, ConfigError> {
        let cfg = RankConfig {
            name: name.into(),
            types,
            d,
            alpha,
            beta,
            delta,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("d", self.d),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("delta", self.delta),
        ] {
            if !(0.0..=1.0).contains(&value) || !value.is_finite() {
                return Err(ConfigError::OutOfRange { name, value });
            }
        }
        if self.alpha < 1.0 && !self.types.any_positive() {
            return Err(ConfigError::NoPositiveType);
        }
        if self.alpha > 0.0 && !self.types.any_negative() {
            return Err(ConfigError::NoNegativeType);
        }
        if self.beta > 0.0 && !self.types.any_iav() {
            return Err(ConfigError::BetaWithoutIav);
        }
        if self.delta > 0.0 && !self.types.any_iov() {
            return Err(ConfigError::DeltaWithoutIov);
        }
        Ok(())
    }

    /// Signal types this config selects, in a fixed order.
    pub fn selected_types(&self) -> Vec<SignalType> {
        self.types.selected()
    }

    /// The seven named presets with their tuned parameters.
    pub fn preset(name: &str) -> Result<RankConfig, ConfigError> {
        let t = |exp_plus, iav_plus, iav_minus, exp_minus, iov_plus, iov_minus| TypeSelection {
            exp_plus,
            iav_plus,
            iav_minus,
            exp_minus,
            iov_plus,
            iov_minus,
        };
        let (types, d, alpha, beta, delta) = match name {
            "conf1" => (t(true, false, false, true, false, false), 0.86, 0.79, 0.00, 0.00),
            "conf2" => (t(true, false, true, true, false, true), 0.80, 0.78, 0.90, 0.40),
            "conf3" => (t(true, false, false, true, true, true), 0.85, 0.85, 0.00, 0.15),
            "conf4" => (t(true, true, false, true, true, false), 0.98, 0.39, 0.40, 0.74),
            "conf5" => (t(true, true, true, true, false, false), 0.90, 0.65, 0.10, 0.00),
            "conf6" => (t(true, true, true, true, true, true), 0.85, 0.66, 0.14, 0.15),
            "conf7" => (t(true, false, true, true, true, true), 0.89, 0.85, 0.53, 0.20),
            other => return Err(ConfigError::UnknownPreset(other.to_string())),
        };
        RankConfig::new(name, types, d, alpha, beta, delta)
    }

    pub const PRESET_NAMES: [&'static str; 7] =
        ["conf1", "conf2", "conf3", "conf4", "conf5", "conf6", "conf7"];
}
