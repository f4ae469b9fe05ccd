//! Semi-measures on concrete locally compact abelian groups.
//!
//! A semi-measure is a linear functional on `K₂(G)`, the span of
//! convolutions of compactly supported continuous functions. This crate
//! stores every semi-measure through its Fourier transform, a measure on the
//! dual group, and offers evaluation, convolution, positivity tests,
//! Eberlein and Lebesgue decompositions, Fourier–Bohr coefficients and
//! numerical probes for deciding whether a semi-measure is a measure.

pub mod corpus;
pub mod decomp;
pub mod error;
pub mod funcspace;
pub mod group;
pub mod measure;
pub mod probes;
pub mod report;
pub mod semimeasure;

mod dft;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use decomp::{
    eberlein, fb_coefficient, fb_series, fb_via_averaging, generalized_eberlein, sap_projection, van_hove_mean, wap0_test,
    EberleinParts, EberleinSplit, FBEntry, FBSeries, FbAveraging, MeanTrace,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use funcspace::{approximate_identity, standard_battery, ApproximateIdentity, CompactFunction, K2Function, K2Term};
pub use group::{character_eval, haar_integrate, DualPoint, GroupSpec, Point, VanHoveSequence};
pub use measure::{weak_admissibility_probe, Atom, CompactSet, ConcreteMeasure, ScPart, SpectralParts};
pub use probes::{
    boundedness_probe, density_class_check, density_relift, intertwining_check, measure_probe, translation_bounded_probe,
    trig_polynomial_check, UnitBallBattery,
};
pub use report::{GrowthFit, GrowthModel, ProbeReport, TracePoint, Verdict};
pub use semimeasure::{Provenance, SemiMeasure};
