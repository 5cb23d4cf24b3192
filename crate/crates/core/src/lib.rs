//! Pairwise quantum discord between Jordan-Wigner eigenmode fermions of an
//! open XY spin chain.
//!
//! The analytic pipeline runs
//! [`build_spectral`] → [`three_node_coeffs`] / [`noise_coeffs`] →
//! [`reduce_pair`] → [`assemble_x`] → [`discord_pair`], generic over `f32`
//! and `f64`. [`oracle`] is a dense exact-diagonalisation reference for
//! small chains and [`experiments`] drives the sweeps.

pub mod coefficients;
pub mod discord;
pub mod error;
pub mod experiments;
pub mod fock;
pub mod model;
pub mod numeric;
pub mod oracle;
pub mod reduction;
pub mod scalar;
pub mod verify;


pub use coefficients::{
    monomial_trace, noise_coeffs, sum_rule_residuals, three_node_coeffs, CoeffSet, NoiseRealization,
    PolarizationProfile, SiteTerm, StateOrder,
};
pub use discord::{discord_pair, mutual_information, Direction, DiscordResult};
pub use error::{Error, Result};
pub use model::{build_spectral, ChainConfig, SpectralData};
pub use reduction::{assemble_x, reduce_pair, ReducedCoeffs, XMatrix};
pub use scalar::Real;

pub type ChainConfig64 = ChainConfig<f64>;
pub type ChainConfig32 = ChainConfig<f32>;
pub type SpectralData64 = SpectralData<f64>;
pub type SpectralData32 = SpectralData<f32>;
pub type CoeffSet64<'s> = CoeffSet<'s, f64>;
pub type CoeffSet32<'s> = CoeffSet<'s, f32>;
pub type XMatrix64 = XMatrix<f64>;
pub type XMatrix32 = XMatrix<f32>;
pub type DiscordResult64 = DiscordResult<f64>;
pub type DiscordResult32 = DiscordResult<f32>;
