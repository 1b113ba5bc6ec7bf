//! Motivic integrals and dual-complex invariants of semi-stable K3 degenerations.
//!
//! The crate works entirely with combinatorial descriptions of special fibers:
//! components, double curves and triple points with coarse cohomological data.
//! From those it computes
//!
//! * exact integer linear algebra (Smith normal form, kernels, cokernels),
//! * classes in the localized Grothendieck ring and their realizations,
//! * the dual complex (Clemens polytope) and its integral homology,
//! * the combinatorial rows of the weight spectral sequence and the monodromy
//!   Gram pairing,
//! * the motivic integral of the fiber and the closed forms it must satisfy.
//!
//! The `builders` module constructs the standard families (type II chains,
//! type III sphere triangulations, Kummer quotients), and `cli` exposes
//! everything through the `k3motive` binary.

pub mod builders;
pub mod cli;
pub mod complexes;
pub mod degeneration;
pub mod exact_linalg;
pub mod motive_ring;
pub mod motivic_integral;
pub mod weight_ss;

pub use complexes::{CycleVector, DeltaSet, HomologyGroup, HomotopyType};
pub use degeneration::{ComponentData, ComponentKind, DegenerationFiber, DoubleCurve, TriplePoint};
pub use exact_linalg::{CokernelStructure, IntMatrix, SmithDecomposition};
pub use motive_ring::{Atom, EPolynomial, MotiveClass};
