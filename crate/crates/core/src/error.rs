use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EchoError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// The Wei-Norman coordinates approached the chart singularity where
    /// tan/sec of `2 chi2 rabi` blow up.
    #[error("Wei-Norman chart singular at t = {time}: |2 chi2 rabi| = {value}")]
    Singularity { time: f64, value: f64 },

    #[error("repeat {repeat}: {source}")]
    Repeat {
        repeat: usize,
        #[source]
        source: Box<EchoError>,
    },
}

impl EchoError {
    pub fn config(msg: impl Into<String>) -> Self {
        EchoError::Config(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        EchoError::Domain(msg.into())
    }

    /// True for singularity errors, including ones wrapped with a repeat index.
    pub fn is_singularity(&self) -> bool {
        match self {
            EchoError::Singularity { .. } => true,
            EchoError::Repeat { source, .. } => source.is_singularity(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, EchoError>;
