//! Training and inference engines shared by the feature modules and fusion.

pub mod adaboost;
pub mod hmm;
pub mod matrix;
pub mod svm;
pub mod tree;

pub use adaboost::{ova_train, train_real_adaboost, BoostParams, OneVsAllModel, RealAdaBoostModel};
pub use hmm::{hmm_baum_welch, GaussianHmm, HmmParams};
pub use matrix::FeatureMatrix;
pub use svm::{smo_train, RbfSvmModel, SvmParams};
pub use tree::{train_tree, DecisionTree, TreeNode, TreeTrainer};
