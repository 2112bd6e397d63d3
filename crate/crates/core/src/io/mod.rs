//! File formats, synthetic generators, result records and the timing
//! harness.

pub mod bench;
pub mod edgelist;
pub mod mtx;
pub mod report;
pub mod synth;
pub mod tabular;

pub use bench::{run_bench, thread_pool, BenchConfig, BenchInstance, BenchReport, BenchTrial};
pub use edgelist::load_edge_list;
pub use mtx::{load_matrix_market, write_matrix_market};
pub use report::{to_json, write_result_json, BatchReport, ResultRecord, LIBRARY_VERSION};
pub use synth::{default_spiked_spec, gen_gaussian_data, gen_planted_subgraph, gen_spiked_covariance, GroundTruth};
pub use tabular::{load_csv_data, load_csv_matrix, read_table, Table};
