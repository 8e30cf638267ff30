//! Fast clustering of right-censored survival curves.
//!
//! Populations are summarised by their Kaplan-Meier curves on a common time
//! grid, partitioned with k-means, and every multi-member cluster is checked
//! with a weighted log-rank test. The adjusted p-values give a test of
//! H0(K), and K is increased from 1 until H0(K) is not rejected.
//!
//! A bootstrap reference procedure and a Monte-Carlo harness for the
//! simulation designs live in [`bootstrap`] and [`simlab`].

pub mod bootstrap;
pub mod cluster;
pub mod error;
pub mod exec;
pub mod ingest;
pub mod padjust;
pub mod procedure;
pub mod rng;
pub mod simlab;
pub mod special;
pub mod survival;

pub use bootstrap::{bootstrap_select_k, bootstrap_test_h0k, BaselineResult, BootstrapConfig};
pub use cluster::{centroid, cluster, ClusterAlgorithm, ClusterConfig, Clustering, Partition};
pub use error::{Error, ErrorCategory, Result};
pub use exec::Execution;
pub use ingest::{ingest_csv, ingest_reader, CsvColumns, Dataset};
pub use padjust::{adjust, bonferroni_critical_value, fwer_bonferroni, CorrectionMethod};
pub use procedure::{select_k, test_h0k, ClusterTestResult, KSelectionResult, Multiplicity, ProcedureConfig};
pub use rank_tests::{pairwise, weighted_logrank, PairwiseMatrix, TestOutcome, WeightScheme};
pub use special::chi_square_sf;
pub use survival::{
    common_grid, evaluate_on_grid, grid_curves, kaplan_meier, GridCurve, ObservationRecord, PopulationSample,
    SurvivalCurve, TimeGrid,
};

/// Crate version, echoed in serialized reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
