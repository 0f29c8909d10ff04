//! Applications of best-path costs between shapes: a distance table with
//! nearest-neighbor retrieval scoring, intermediate-shape queries and
//! path-guided morphing.

mod distance;
mod intermediate;
mod morph;
mod retrieval;

pub use distance::{nearest_neighbors, shape_distance_table, DistanceTable};
pub use intermediate::{intermediate_path, intermediate_shapes, IntermediateMode};
pub use morph::{default_placements, frame_at, morph, placements_from_weights, MorphSequence, DEFAULT_FRAME_COUNT};
pub use retrieval::{evaluate_retrieval, read_labels, write_labels, RetrievalEval};
