//! Bulk import of sharded CSV files into a sealed [`PropertyGraph`].
//!
//! [`PropertyGraph`]: litgraph_core::PropertyGraph

pub mod error;
pub mod import;
pub mod manifest;
pub mod script;
pub mod shard;
pub mod synthetic;

pub use error::IngestError;
pub use import::{import_bulk, FileReport, ImportReport, RunInfo};
pub use manifest::{load_manifest, parse_manifest, ColumnSpec, ColumnType, EdgeSection, ImportManifest, NodeSection};
pub use script::{parse_index_script, run_index_script};
pub use shard::{import_shard, RejectReason, Rejection, SectionSpec, StagedRow, StagedShard};
pub use synthetic::{synthetic_paper_id, write_synthetic, SyntheticSpec};
