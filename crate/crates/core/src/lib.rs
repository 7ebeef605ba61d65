pub mod analysis;
pub mod boosting;
pub mod explain;
pub mod ingest;
pub mod pipeline;
pub mod signal;
pub mod time;
