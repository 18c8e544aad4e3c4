//! Numerical toolkit for one-dimensional fractional quantum mechanics:
//! symmetric Lévy stable laws, the Riesz kinetic operator on periodic grids,
//! free fractional kernels, Lévy wave packets, path-integral Monte Carlo
//! over Lévy flights and fractional statistical mechanics.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod error;
pub mod numerics;
pub mod pimc;
pub mod propagator;
pub mod seed;
pub mod spectral;
pub mod stable;
pub mod statmech;
pub mod stats;
pub mod wavepacket;

pub use error::{FracError, Result};
pub use numerics::{
    adaptive_quadrature, make_grid, transform_pair, ComplexField, Direction, FourierPair, GridSpec,
    PhysicalParams, QuadResult, Quadrature, Representation,
};
pub use pimc::{McEstimate, PathConfig, PimcConfig, ScalingFit, SliceRule};
pub use propagator::{KernelQuery, KernelValue};
pub use spectral::{EvolutionMode, Evolver, EvolverConfig, Potential};
pub use stable::{StableParams, StableSampler};
pub use statmech::{ClassicalLimit, ClassicalPartition, ThermoQuery};
pub use wavepacket::{DeviationTarget, MeanMethod, PacketParams, UncertaintyReport};

/// Library version recorded in run provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
