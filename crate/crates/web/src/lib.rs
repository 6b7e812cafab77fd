//! WebAssembly bindings for the static demo page. Every entry point returns
//! a JSON string so the page needs no generated type glue beyond strings.

use distraction_core::arm::{arm_trace, ArmParams};
use distraction_core::eye::{EyePatch, FilterBank, FilterBankParams};
use distraction_core::fusion::{mode_filter, smooth_features};
use distraction_core::session::{generate_synthetic_session, random_eye_patch, GeneratorSpec, SegmentDurations, EYE_PATCH_SIZE};
use distraction_core::DistractionClass;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct IrisDemo {
    size: usize,
    pixels: Vec<f64>,
    truth: Option<(f64, f64)>,
    center: (usize, usize),
    peaks: [(usize, usize); 3],
    score: f64,
    hough: Vec<f64>,
    gabor: Vec<f64>,
    separability: Vec<f64>,
    combined: Vec<f64>,
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"error\":\"{e}\"}}"))
}

fn error(message: impl std::fmt::Display) -> String {
    json(&serde_json::json!({ "error": message.to_string() }))
}

/// Localizes the iris in a random synthetic patch.
pub fn iris_demo_json(seed: u64, noise: f64, open: bool) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sample = random_eye_patch(&mut rng, open, noise.clamp(0.0, 0.5));
    let patch = match EyePatch::new(EYE_PATCH_SIZE, sample.pixels.clone()) {
        Ok(p) => p,
        Err(e) => return error(e),
    };
    let bank = FilterBank::new(EYE_PATCH_SIZE, FilterBankParams::default());
    let est = bank.locate(&patch);
    let r = bank.responses(&patch);
    json(&IrisDemo {
        size: EYE_PATCH_SIZE,
        pixels: sample.pixels,
        truth: sample.center,
        center: est.center,
        peaks: est.peaks,
        score: est.combined_score,
        hough: r.hough,
        gabor: r.gabor,
        separability: r.separability,
        combined: r.combined,
    })
}

#[derive(Serialize)]
struct ArmDemo {
    width: usize,
    height: usize,
    depth: Vec<u16>,
    contour: Vec<(usize, usize)>,
    kept: Vec<(usize, usize)>,
    profile_width: usize,
    profile_mask: Vec<u8>,
    profile_contour: Vec<(usize, usize)>,
    profile_kept: Vec<(usize, usize)>,
}

/// One depth frame of a driver in the pose of `class_code`, with the
/// frontal and profile contours and the parts kept for the arm features.
pub fn arm_demo_json(class_code: u8, seed: u64) -> String {
    let Some(class) = DistractionClass::from_code(class_code) else {
        return error(format!("unknown class code {class_code}"));
    };
    let mut proportions = [0.0; 5];
    proportions[class.index()] = 1.0;
    let spec = GeneratorSpec {
        frames: 1,
        class_proportions: proportions,
        segment_durations: [SegmentDurations { min: 1, max: 1 }; 5],
        ..GeneratorSpec::for_driver(0, seed)
    };
    let session = match generate_synthetic_session(&spec, seed) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    let frame = &session.frames[0].depth;
    let params = ArmParams::for_width(frame.width);
    match arm_trace(frame, &session.background, session.intrinsics, &params) {
        Ok(t) => json(&ArmDemo {
            width: frame.width,
            height: frame.height,
            depth: frame.values.clone(),
            contour: t.frontal.pixels,
            kept: t.frontal_kept.pixels,
            profile_width: t.profile.mask.width,
            profile_mask: t.profile.mask.mask.iter().map(|&b| u8::from(b)).collect(),
            profile_contour: t.profile_chain.pixels,
            profile_kept: t.profile_kept.pixels,
        }),
        Err(e) => error(e),
    }
}

#[derive(Serialize)]
struct SmoothingDemo {
    raw: Vec<f64>,
    median: Vec<f64>,
    std: Vec<f64>,
    labels: Vec<usize>,
    filtered: Vec<usize>,
}

/// A noisy piecewise-constant signal with outliers and a flickering label
/// track, smoothed with a centered window.
pub fn smoothing_demo_json(seed: u64, frames: usize, window: usize) -> String {
    let frames = frames.clamp(10, 5000);
    let window = window.clamp(1, frames);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut raw = Vec::with_capacity(frames);
    let mut labels = Vec::with_capacity(frames);
    let (mut level, mut class) = (0.0f64, 0usize);
    for t in 0..frames {
        if t % 120 == 0 {
            class = rng.random_range(0..5);
            level = class as f64;
        }
        let mut v = level + rng.random_range(-0.4..0.4);
        if rng.random_bool(0.03) {
            v += rng.random_range(-4.0..4.0);
        }
        raw.push(v);
        labels.push(if rng.random_bool(0.25) { rng.random_range(0..5) } else { class });
    }
    let rows: Vec<[f64; 1]> = raw.iter().map(|&v| [v]).collect();
    let smoothed = match smooth_features(&rows, window) {
        Ok(s) => s,
        Err(e) => return error(e),
    };
    json(&SmoothingDemo {
        median: smoothed.iter().map(|r| r[0]).collect(),
        std: smoothed.iter().map(|r| r[1]).collect(),
        filtered: mode_filter(&labels, window),
        raw,
        labels,
    })
}

#[wasm_bindgen]
pub fn iris_demo(seed: u32, noise: f64, open: bool) -> String {
    iris_demo_json(seed as u64, noise, open)
}

#[wasm_bindgen]
pub fn arm_demo(class_code: u8, seed: u32) -> String {
    arm_demo_json(class_code, seed as u64)
}

#[wasm_bindgen]
pub fn smoothing_demo(seed: u32, frames: usize, window: usize) -> String {
    smoothing_demo_json(seed as u64, frames, window)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn iris_demo_finds_the_disk() {
        let v = parse(&iris_demo_json(3, 0.05, true));
        let truth = &v["truth"];
        let (tx, ty) = (truth[0].as_f64().unwrap(), truth[1].as_f64().unwrap());
        let (cx, cy) = (v["center"][0].as_f64().unwrap(), v["center"][1].as_f64().unwrap());
        assert!((tx - cx).hypot(ty - cy) <= 2.0);
        assert_eq!(v["combined"].as_array().unwrap().len(), 3600);
    }

    #[test]
    fn arm_demo_has_contours_for_every_class() {
        for code in 0..5 {
            let v = parse(&arm_demo_json(code, 1));
            assert!(v.get("error").is_none(), "{v}");
            assert!(!v["kept"].as_array().unwrap().is_empty());
        }
        assert!(parse(&arm_demo_json(9, 1)).get("error").is_some());
    }

    #[test]
    fn smoothing_demo_lengths() {
        let v = parse(&smoothing_demo_json(1, 400, 100));
        for k in ["raw", "median", "std", "labels", "filtered"] {
            assert_eq!(v[k].as_array().unwrap().len(), 400);
        }
    }
}
