use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid region: {0}")]
    InvalidRegion(String),

    #[error("{method} capacity exceeded: {requested} > {cap}; {hint}")]
    Capacity {
        method: &'static str,
        requested: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("site ({x},{y}) is not in the region")]
    SiteOutsideRegion { x: i64, y: i64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid contour family: {0}")]
    InvalidFamily(String),

    #[error("inapplicable: {0}")]
    Inapplicable(String),

    #[error("parameter regime: {0}")]
    Regime(String),

    #[error("geometry: {0}")]
    Geometry(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse field spec: {0}")]
    Parse(String),
}

impl Error {
    /// Regime and capacity failures: the request is well-formed but outside
    /// what the chosen method or inequality covers.
    pub fn is_regime_or_capacity(&self) -> bool {
        matches!(self, Error::Regime(_) | Error::Capacity { .. } | Error::Inapplicable(_))
    }
}
