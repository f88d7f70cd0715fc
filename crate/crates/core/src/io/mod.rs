//! External boundary: Matrix Market files, generated test problems, experiment
//! runs and CSV traces.

pub mod csv;
pub mod experiment;
pub mod gen;
pub mod mm;

pub use csv::{write_trace, CSV_HEADER};
pub use experiment::{run_experiment, ExperimentSpec, ProblemSpec, RhsSpec};
pub use gen::{gen_diag_range, gen_randsvd, gen_sprand, gen_sprand_dd, RandSvd, SprandOptions};
pub use mm::{read_matrix_market, write_matrix_market};
