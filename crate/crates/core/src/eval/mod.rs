//! Metrics, evaluation reports and leave-one-driver-out cross-validation.

pub mod loso;
pub mod metrics;
pub mod report;

pub use loso::{drivers_of, evaluate_bundle, loso_cross_validation, loso_from_sessions};
pub use metrics::{binary_collapse, per_class_metrics, total_average_accuracy, BinaryLabel, ClassMetrics, ConfusionMatrix};
pub use report::{AverageRow, DriverResult, EvaluationReport, PathReport};
