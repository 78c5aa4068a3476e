//! Galton-Watson trees conditioned on the number of vertices whose
//! out-degree lies in a set `A`: exact laws, the hat and check
//! transforms, exact and Markov branching samplers, and scaling checks.

pub mod coeff;
pub mod degree_set;
pub mod error;
pub mod exact;
pub mod offspring;
pub mod partition;
pub mod report;
pub mod rng;
pub mod samplers;
pub mod scaling;
pub mod series;
pub mod suites;
pub mod transforms;
pub mod tree;

pub use coeff::{Coeff, Rational};
pub use degree_set::DegreeSet;
pub use error::{Error, Result};
pub use offspring::{DistSpec, OffspringDist};
pub use partition::Partition;
pub use series::{ProbSeries, RatFn};
pub use tree::{DfsQueue, OrderedTree, UnorderedTreeKey};
