//! Exact solver for consortium-formation grant games on collaboration
//! networks.
//!
//! Players sit on an undirected collaboration network and carry exact
//! rational values. A consortium is *eligible* when it induces a connected
//! subgraph and its values sum to at least the threshold `T`; the winning
//! consortium splits the prize `M` evenly. Three protocols decide who wins:
//!
//! * [`goldrush`]: players pick labels unilaterally.
//! * [`ccc`]: consortia need every member to propose the same member list.
//! * [`magnet`]: a CCC round followed by appeal rounds that absorb outsiders
//!   who raise the winner's average.
//!
//! Equilibria are found by exhaustive deviation search and compared with the
//! social optimum winner from [`subsets::find_sow`]. The [`analysis`] module
//! checks the known price-of-anarchy bounds against those exact numbers.
//!
//! With the default `parallel` feature, enumeration runs on the current
//! rayon thread pool; results are identical with or without it.

pub mod analysis;
pub mod ccc;
pub mod equilibrium;
pub mod error;
pub mod generators;
pub mod goldrush;
pub mod magnet;
pub mod model;
pub(crate) mod network;
pub mod par;
pub mod partition;
pub mod rational;
pub mod subsets;

pub use ccc::{ccc_is_strong, ccc_outcome, ccc_report, ccc_winner};
pub use equilibrium::{Deviation, Equilibrium, EquilibriumReport, Stability, DEFAULT_LIMIT};
pub use error::{Error, Result};
pub use goldrush::{
    goldrush_is_nash, goldrush_is_strong, goldrush_outcome, goldrush_report, GoldrushReport, PriceOfAnarchy,
};
pub use magnet::{
    magnet_closure, magnet_is_strong, magnet_outcome, magnet_report, Closure, ClosureTrace, MagnetReport,
};
pub use model::{
    evaluate, is_connected, is_eligible, validate_instance, Consortium, Evaluation, Instance, Outcome, RawInstance,
};
pub use partition::{Labeling, ProposalProfile};
pub use rational::Rational;
pub use subsets::{connected_subsets, distance, find_sow, SowResult};
