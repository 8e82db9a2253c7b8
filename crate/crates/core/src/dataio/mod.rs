//! Synthetic data generation, dataset loaders and trace files.

mod load;
mod synth;
mod trace;

pub use load::{load_dataset, parse_dataset, write_dense_csv, DataFormat};
pub use synth::{gen_synthetic, SyntheticData, SyntheticKind, SyntheticSpec, ILL_CONDITIONED_DIVISOR};
pub use trace::{read_trace, write_trace, write_trace_records, TRACE_HEADER};
