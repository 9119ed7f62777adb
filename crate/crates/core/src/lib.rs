//! Energy-efficiency optimization for a two-sensor NOMA backscatter cluster
//! served by a dedicated carrier emitter (CE) and a roadside backscatter
//! reader, with imperfect channel state information.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] and [`scenario`]: system constants, topologies, fading draws
//!   and the imperfect-CSI view of the channel.
//! * [`rate_model`]: SINRs, exact and log-bounded sum rates, power and EE.
//! * [`cubic`]: real-root solver for the stationarity cubic.
//! * [`ocetp`]: stage one, CE power via Dinkelbach + dual subgradients.
//! * [`reflection`]: stage two, reflection coefficients at a fixed power,
//!   both in closed form and by enumerating the feasible polygon's vertices.
//! * [`aobws`]: both stages alternated into a [`Solution`].
//! * [`es_oracle`]: exhaustive grid search over `(P_ce, Γ1, Γ2)`.
//! * [`harness`]: configuration, Monte Carlo sweeps and CSV/JSON output.

pub mod aobws;
pub mod constraints;
pub mod cubic;
pub mod error;
pub mod es_oracle;
pub mod harness;
pub mod ocetp;
pub mod params;
pub mod rate_model;
pub mod reflection;
pub mod scenario;

pub use aobws::{run_aobws, Solution};
pub use error::{Constraint, Error, Result};
pub use params::SystemParams;
pub use scenario::{ScenarioChannel, Topology};
