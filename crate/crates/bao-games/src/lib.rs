//! Atomic-network games over finite atom structures.

pub mod basis;
pub mod canon;
pub mod hyper;
pub mod network;
pub mod solve;
pub mod table;

pub use basis::{is_basis, NetworkBasisReport, WitnessFailure};
pub use hyper::{
    is_hyperbasis, validate_hypernetwork, AmalgamFailure, HyperLabel, Hypernetwork,
    HyperbasisReport,
};
pub use network::{enumerate_networks, validate_network, Network, NodeId};
pub use solve::{check_lyndon, solve_game, GameOutcome, GameSpec, SolveOptions, TraceStep, Winner};
pub use table::{Atom, AtomTable, Flavor};
