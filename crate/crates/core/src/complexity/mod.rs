//! Sequence dimensions, word complexity along time sets, and the two-sided
//! entropy-dimension estimate.

pub mod bounds;
pub mod estimate;
pub mod sequence;
pub mod words;

pub use bounds::{upper_bound_profile, BoundRow};
pub use estimate::{estimate_entropy_dimension, DimensionBracket, EstimateConfig};
pub use sequence::{build_f, sequence_dimension, DimensionEstimate, GenSequence};
pub use words::{complexity_profile, empirical_entropy, sturmian_complexity, word_complexity, ComplexityEntry, SampleSpec, SceneryLaw};
