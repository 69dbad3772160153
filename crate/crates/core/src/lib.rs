//! Energy-minimal pushing and caching for a buffered point-to-point link.
//!
//! Requests arrive one per slot, i.i.d. over `{0, ..., X}` content items.
//! The server may transmit ahead of demand into a client buffer of `B` items,
//! paying `eta^y - 1` to send `y` items in a slot. This crate finds the
//! causal randomized policy with the least long-run average energy by
//! running value iteration over buffer levels only:
//!
//! * [`fast`]: the optimal decisions for a given next-level distribution,
//!   filled greedily along a staircase, and the resulting cost `h`;
//! * [`bellman`]: one Bellman step per buffer level, exact or in marginal space;
//! * [`value_iteration`]: the sweep loop, the full-state baseline and policy assembly;
//! * [`baselines`]: no-buffer, mean-rate and offline (taut string) reference costs;
//! * [`sim`]: Monte Carlo evaluation;
//! * [`harness`]: sweeps, runtime benchmarks and the cross-validation suites
//!   behind the command-line tool.

pub mod baselines;
pub mod bellman;
pub mod error;
pub mod fast;
pub mod harness;
pub mod model;
pub mod oracle;
pub mod sim;
pub mod stationary;
pub mod value_iteration;

pub use baselines::{infinite_buffer_cost, no_buffer_cost, taut_string_schedule, OfflineSchedule, Trace};
pub use bellman::{bellman_convex_marginal, bellman_exact_rowwise, BellmanMethod, BellmanResult, SolverOptions};
pub use error::{Error, Result};
pub use fast::{
    fast_assign, h_subgradient, h_value, is_generalized_monotone, marginal_feasible, DecisionMatrix,
    MarginalVector, StripeSupport,
};
pub use model::{action_bounds, energy_cost, expected_state_cost, next_buffer, State, SystemConfig};
pub use sim::{simulate_policy, SimulationReport};
pub use stationary::stationary_distribution;
pub use value_iteration::{
    value_iterate_degenerated, value_iterate_full, Policy, ValueVector, ViOptions, ViReport,
};
