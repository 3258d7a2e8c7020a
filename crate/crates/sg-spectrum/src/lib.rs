//! Numerical spectral solver for the scattering problem whose isospectral
//! flow is the sine-Gordon equation in laboratory coordinates, restricted to
//! stationary data (u_t ≡ 0).
//!
//! The discrete eigenvalues of the quadratic pencil are located, counted,
//! classified, and verified:
//!
//! - [`potentials`] builds and classifies the field profiles u(x);
//! - [`scattering`] integrates Jost solutions and evaluates the Wronskian
//!   whose zeros in the upper half plane are the eigenvalues;
//! - [`pruefer`] counts unit-circle eigenvalues through the angle flow;
//! - [`krein`] attaches signatures and flux diagnostics to eigenfunctions;
//! - [`search`] sweeps a region of the upper half plane by the argument
//!   principle and assembles the verified spectrum;
//! - [`report`] serializes results; [`config`] and [`driver`] back the
//!   batch CLI.

pub mod config;
pub mod driver;
pub mod krein;
pub mod numerics;
pub mod potentials;
pub mod pruefer;
pub mod report;
pub mod scattering;
pub mod search;

pub use potentials::{HypothesisClass, KinkShape, PotentialProfile};
pub use scattering::{JostSide, SpectralParameter};

/// Solver-wide tolerance bundle; the per-module defaults in the spec.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    /// Local error target per unit length for ODE integration.
    pub ode: f64,
    /// Absolute quadrature target.
    pub quadrature: f64,
    /// Relative |W| acceptance threshold for eigenvalues.
    pub eigenvalue: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            ode: 1e-10,
            quadrature: 1e-10,
            eigenvalue: scattering::EIGENVALUE_RESIDUAL,
        }
    }
}

/// Ordered parallel map: uses the worker pool when the `parallel` feature is
/// on, otherwise plain iteration.  Output order never depends on scheduling.
pub(crate) fn par_map<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().map(f).collect()
    }
}
