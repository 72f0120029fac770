//! Placement of a single fixed-altitude UAV collecting uplink data from
//! ground devices, chosen to maximize the devices' summed transmission
//! lifetime under per-device power and energy limits.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix the scalar to `f64`, with `*32` variants for `f32`.
//!
//! ```
//! use uav_lifetime::{solver, AreaBounds, RfParams, SolverConfig};
//!
//! let scenario = uav_lifetime::scenario::generate_uniform(
//!     50,
//!     AreaBounds::square(250.0, 250.0, 650.0),
//!     4500.0,
//!     18000.0,
//!     RfParams::reference(),
//!     1,
//! )
//! .unwrap();
//! let cfg = SolverConfig::default().with_mode(solver::Mode::Box);
//! let report = solver::solve(&scenario, &cfg).unwrap();
//! assert!(report.converged);
//! ```

pub mod channel;
pub mod error;
pub mod objective;
pub mod oracle;
pub mod real;
pub mod region;
pub mod rng;
pub mod scenario;
pub mod solver;
pub mod surface;

pub use error::{Error, Result};
pub use real::Real;
pub use solver::{Init, Mode};

pub type UserDevice = scenario::UserDevice<f64>;
pub type RfParams = scenario::RfParams<f64>;
pub type AreaBounds = scenario::AreaBounds<f64>;
pub type Scenario = scenario::Scenario<f64>;
pub type ClusterSpec = scenario::ClusterSpec<f64>;
pub type SystemConstant = channel::SystemConstant<f64>;
pub type FeasibleRegion = region::FeasibleRegion<f64>;
pub type Disk = region::Disk<f64>;
pub type ObjectiveEval = objective::ObjectiveEval<f64>;
pub type ConcavityCertificate = objective::ConcavityCertificate<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolveReport = solver::SolveReport<f64>;
pub type GridSpec = oracle::GridSpec<f64>;
pub type Surface = surface::Surface<f64>;

pub type Scenario32 = scenario::Scenario<f32>;
pub type FeasibleRegion32 = region::FeasibleRegion<f32>;
pub type SolverConfig32 = solver::SolverConfig<f32>;
pub type SolveReport32 = solver::SolveReport<f32>;
