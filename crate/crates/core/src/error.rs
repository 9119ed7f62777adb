use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Constraint of the EE problem that could not be met.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Constraint {
    /// QoS of the weak sensor (index 1).
    QosSensor1,
    /// QoS of the strong sensor (index 2).
    QosSensor2,
    /// CE power cap.
    PowerCap,
    /// Reflection coefficient range of sensor `k` (1-based).
    ReflectionRange(usize),
    /// Harvested power must cover the circuit power of sensor `k` (1-based).
    Harvest(usize),
    /// SIC power gap between the two backscattered signals.
    SicGap,
    /// No candidate point satisfies all constraints.
    NoFeasiblePoint,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::QosSensor1 => write!(f, "C1 (QoS of sensor 1)"),
            Constraint::QosSensor2 => write!(f, "C2 (QoS of sensor 2)"),
            Constraint::PowerCap => write!(f, "C3 (CE power cap)"),
            Constraint::ReflectionRange(k) => write!(f, "reflection range of sensor {k}"),
            Constraint::Harvest(k) => write!(f, "C5 (harvested power of sensor {k})"),
            Constraint::SicGap => write!(f, "SIC power gap"),
            Constraint::NoFeasiblePoint => write!(f, "no feasible candidate point"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("infeasible problem: {constraint}")]
    Infeasible { constraint: Constraint },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config error at `{key}`: {msg}")]
    Config { key: String, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn infeasible(constraint: Constraint) -> Self {
        Error::Infeasible { constraint }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, Error::Infeasible { .. })
    }
}
