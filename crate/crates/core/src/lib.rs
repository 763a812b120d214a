pub mod adaptive_sort;
pub mod bounds;
pub mod error;
pub mod finger_tree;
pub mod geometry;
pub mod permutation;
pub use adaptive_sort::{Algorithm, SortReport};
pub use bounds::{BoundReport, InterleaveTree, Side};
pub use error::CoreError;
pub use finger_tree::{CostMeter, FingerTree, Key};
pub use geometry::{MergeRecord, MergeTrace, Origin, Point, PointSet};
pub use permutation::Permutation;
