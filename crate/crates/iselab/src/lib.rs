//! Exact and Monte Carlo machinery around the center of mass of the
//! integrated superBrownian excursion (ISE) and the Brownian-excursion
//! functionals ξ = 2∫e and η = 4∬ min e.
//!
//! The crate has two halves that check each other:
//!
//! * exact arithmetic: the integer sequence `a_k`, its normalized form `b_k`,
//!   closed-form moments of η and S, and a certified rational enclosure of
//!   the limit constant β = lim b_k ([`beta`]);
//! * simulation: discretized Brownian excursions, a discrete Brownian snake
//!   built from random plane trees, and uniform Cayley trees with their
//!   Wiener indices ([`sim`], [`trees`]).
//!
//! Asymptotic formulas and tail bounds live in [`asymptotics`]; every one of
//! them is validated against the exact side or against simulation.

pub mod asymptotics;
pub mod beta;
pub mod exact;
pub mod moments;
pub mod sim;
pub mod stats;
pub mod trees;

pub use exact::ExactConstant;
pub use moments::MomentTable;
