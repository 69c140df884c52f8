//! Exterior algebra on R^8, G2/Spin(7) model structures, and the pointwise
//! deformed Donaldson-Thomas (dDT) machinery: irreducible projections, the
//! dDT equation with its full solution classification, the linearized
//! operators and their kernels, and a flat-torus Fourier model of the
//! deformation complex.
//!
//! Everything is generic over a [`scalar::Scalar`] that is either an exact
//! arbitrary-precision rational ([`scalar::Rat`]) or `f64`. Identities are
//! verified exactly in rational mode wherever no eigenvalue or
//! transcendental step intervenes; floats appear only in normal forms, the
//! cubic solver, and spectral sweeps.
//!
//! Entry points:
//! - [`forms`]: k-forms, wedge/interior/Hodge star, metrics, pullbacks.
//! - [`structures`]: the model G2 and Spin(7) structures and projectors.
//! - [`variation`]: the infinitesimal-variation maps j1, j2, j3.
//! - [`ddt`]: residuals, Spin(7) normal forms, the solution classification.
//! - [`linearize`]: the operators T_F, S_F, their kernels, obstructions.
//! - [`torus`]: Fourier-mode index and cohomology counts on the flat T^8.
//! - [`registry`]: one executable check per verified statement.
//!
//! Convention note: curvature forms of Hermitian line-bundle connections are
//! i*R-valued; this crate works throughout with the real form F_real where
//! F_paper-style = i * F_real. Under that substitution the defining equation
//! becomes pi^2_7(F - *F^3/6) = 0 and the linearization acquires the minus
//! sign used in [`linearize`].

pub mod cartan;
pub mod cli;
pub mod config;
pub mod ddt;
pub mod forms;
pub mod io;
pub mod linearize;
pub mod matrix;
pub mod registry;
pub mod scalar;
pub mod structures;
pub mod torus;
pub mod variation;

#[cfg(test)]
pub(crate) mod test_oracle;

pub use forms::{Dim, KForm, MetricData};
pub use scalar::{Rat, Scalar};
