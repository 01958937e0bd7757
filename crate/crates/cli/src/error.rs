use std::fmt;

use harmonic_newton::certify::CertifyError;
use harmonic_newton::harmonic_map::MapError;
use harmonic_newton::laurent::LaurentError;
use harmonic_newton::newton::NewtonError;
use harmonic_newton::search::SearchError;
use harmonic_newton::seeding::SeedError;

/// Exit status 1: bad arguments or input files.
pub const EXIT_USAGE: i32 = 1;
/// Exit status 2: the computation itself failed.
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    pub fn usage(msg: impl fmt::Display) -> Self {
        Failure::Usage(msg.to_string())
    }

    pub fn numerical(msg: impl fmt::Display) -> Self {
        Failure::Numerical(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) => write!(f, "usage error: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::usage(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::usage(e)
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        match e {
            MapError::NonFiniteJacobian(_) => Failure::numerical(e),
            _ => Failure::usage(e),
        }
    }
}

impl From<SearchError> for Failure {
    fn from(e: SearchError) -> Self {
        Failure::usage(e)
    }
}

impl From<NewtonError> for Failure {
    fn from(e: NewtonError) -> Self {
        match e {
            NewtonError::InvalidConfig(_) => Failure::usage(e),
            _ => Failure::numerical(e),
        }
    }
}

impl From<LaurentError> for Failure {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::InvalidConfig(_) => Failure::usage(e),
            LaurentError::Map(m) => m.into(),
            _ => Failure::numerical(e),
        }
    }
}

impl From<SeedError> for Failure {
    fn from(e: SeedError) -> Self {
        match e {
            SeedError::InvalidOrder => Failure::usage(e),
            SeedError::Laurent(l) => l.into(),
            _ => Failure::numerical(e),
        }
    }
}

impl From<CertifyError> for Failure {
    fn from(e: CertifyError) -> Self {
        match e {
            CertifyError::InvalidArgument(_) => Failure::usage(e),
            CertifyError::Map(m) => m.into(),
            _ => Failure::numerical(e),
        }
    }
}
