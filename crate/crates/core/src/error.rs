use alloc::string::String;
use core::fmt;

/// Broad failure class, used by frontends to pick an exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    Infeasible,
    TooLarge,
    Internal,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidCoordinates { site: usize, lat: f64, lon: f64 },
    DuplicateSiteId(usize),
    SiteIdsNotDense { expected: usize, found: usize },
    UnknownSite(usize),
    SelfLoop { link: usize, site: usize },
    DuplicateLink { a: usize, b: usize },
    InvalidLinkLength { link: usize, length_km: f64 },
    NoGateway,
    GatewayUnreachable { site: usize, name: String },
    Disconnected { a: usize, b: usize },
    InvalidSpeed(f64),
    InvalidLength(f64),
    EmptySrg(usize),
    UnknownLink(usize),
    InvalidBeta(f64),
    InvalidGrid { start: f64, end: f64, step: f64 },
    ZeroRacks,
    DimensionMismatch { expected: usize, found: usize },
    NoActiveSite,
    RackTotalMismatch { expected: u64, found: u64 },
    CapacityExceeded { site: usize, racks: u32, capacity: u32 },
    Infeasible { capacity: u64, racks: u32 },
    InstanceTooLarge { sites: usize, compositions: u128, limit: u128 },
    Inconsistent(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Infeasible { .. } => ErrorKind::Infeasible,
            Error::InstanceTooLarge { .. } => ErrorKind::TooLarge,
            Error::Inconsistent(_) => ErrorKind::Internal,
            _ => ErrorKind::Validation,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCoordinates { site, lat, lon } => {
                write!(f, "site {site} has invalid coordinates ({lat}, {lon})")
            }
            Error::DuplicateSiteId(id) => write!(f, "site id {id} appears more than once"),
            Error::SiteIdsNotDense { expected, found } => {
                write!(f, "site ids must be dense: expected id {expected}, found {found}")
            }
            Error::UnknownSite(id) => write!(f, "unknown site id {id}"),
            Error::SelfLoop { link, site } => {
                write!(f, "link {link} connects site {site} to itself")
            }
            Error::DuplicateLink { a, b } => write!(f, "duplicate link between sites {a} and {b}"),
            Error::InvalidLinkLength { link, length_km } => {
                write!(f, "link {link} has invalid length {length_km} km")
            }
            Error::NoGateway => write!(f, "topology has no gateway site"),
            Error::GatewayUnreachable { site, name } => {
                write!(f, "site {site} ({name}) cannot reach any gateway")
            }
            Error::Disconnected { a, b } => write!(f, "no path between sites {a} and {b}"),
            Error::InvalidLength(v) => write!(f, "length must be finite and non-negative, got {v}"),
            Error::InvalidSpeed(v) => write!(f, "propagation speed must be positive, got {v}"),
            Error::EmptySrg(id) => write!(f, "shared risk group {id} has no members"),
            Error::UnknownLink(id) => write!(f, "unknown link id {id}"),
            Error::InvalidBeta(b) => write!(f, "beta must lie in [0, 1], got {b}"),
            Error::InvalidGrid { start, end, step } => {
                write!(f, "invalid beta grid start={start} end={end} step={step}")
            }
            Error::ZeroRacks => write!(f, "total number of racks must be positive"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::NoActiveSite => write!(f, "placement has no active site"),
            Error::RackTotalMismatch { expected, found } => {
                write!(f, "placement holds {found} racks, expected {expected}")
            }
            Error::CapacityExceeded { site, racks, capacity } => {
                write!(f, "site {site} holds {racks} racks, capacity is {capacity}")
            }
            Error::Infeasible { capacity, racks } => write!(
                f,
                "infeasible: total capacity {capacity} is below the {racks} racks to place"
            ),
            Error::InstanceTooLarge { sites, compositions, limit } => write!(
                f,
                "instance too large for exhaustive search: {sites} sites, {compositions} placements (limit {limit})"
            ),
            Error::Inconsistent(msg) => write!(f, "internal consistency check failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
