//! Content library, full-rank RLF encoding, reconstruction groups, and the
//! cluster file format.

mod cluster;
mod encoding;
mod groups;
mod params;
pub mod persist;

pub use cluster::Cluster;
pub use encoding::{encode_server, sample_full_rank, ContentLibrary, FullRankSample, ServerEncoding};
pub use groups::{form_groups, form_groups_with, GroupingPolicy, ReconstructionGroup};
pub use params::{SystemParams, BIAS_SCALE};
pub use persist::{load_cluster, save_cluster};
