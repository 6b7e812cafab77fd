use super::patch::EyePatch;
use crate::error::Result;
use crate::learners::{smo_train, FeatureMatrix, RbfSvmModel, SvmParams};

pub const TEMPLATE_SIZE: usize = 24;

/// Edge-clamped square crop centered at `center`, z-normalized
/// (population variance). Constant crops become all zeros.
pub fn iris_template(patch: &EyePatch, center: (usize, usize)) -> Vec<f64> {
    let h = (TEMPLATE_SIZE / 2) as i64;
    let (cx, cy) = (center.0 as i64, center.1 as i64);
    let mut t = Vec::with_capacity(TEMPLATE_SIZE * TEMPLATE_SIZE);
    for y in cy - h..cy + h {
        for x in cx - h..cx + h {
            t.push(patch.get_clamped(x, y));
        }
    }
    let n = t.len() as f64;
    let mean = t.iter().sum::<f64>() / n;
    let var = t.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if var <= 1e-20 {
        return vec![0.0; t.len()];
    }
    let sd = var.sqrt();
    t.iter().map(|v| (v - mean) / sd).collect()
}

/// Positive when the iris is visible.
pub fn eye_closure_score(template: &[f64], model: &RbfSvmModel) -> f64 {
    model.decision(template)
}

/// Trains the open/closed classifier on templates labelled `true` = open.
pub fn train_closure_svm(templates: &[(Vec<f64>, bool)], params: &SvmParams) -> Result<RbfSvmModel> {
    let x = FeatureMatrix::from_rows(&templates.iter().map(|(t, _)| t.as_slice()).collect::<Vec<_>>());
    let y: Vec<f64> = templates.iter().map(|(_, o)| if *o { 1.0 } else { -1.0 }).collect();
    smo_train(&x, &y, params)
}
