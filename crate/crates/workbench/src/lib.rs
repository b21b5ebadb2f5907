//! File formats, dataset export, experiment runs and the `decipher`
//! command-line tool, built on `decipher-core`.

pub mod config;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod lmfile;
pub mod textio;

pub use config::{Encoding, ExperimentConfig, Sweep};
pub use dataset::{build_dataset, build_splits, Corpora, DatasetBundle, Split};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentResult, SolverChoice};
pub use lmfile::{read_lm, write_lm};
pub use textio::load_user_cipher;
