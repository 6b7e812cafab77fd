//! Parameterized synthetic driving sessions.
//!
//! A seated driver is rendered into depth frames with the right arm in a
//! class-dependent pose (forward for normal driving, up for phone call and
//! drinking, down for texting, right for reaching an object). Face-channel
//! records and eye patches follow class-dependent statistics. Every random
//! draw comes from one ChaCha stream seeded by the caller.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::render::{self, EyeAppearance, EyeState, Point3};
use super::types::{
    CameraIntrinsics, DepthFrame, DistractionClass, FaceChannelRecord, Frame, GrayImage, Session,
};
use super::{EYE_PATCH_SIZE, NOMINAL_FRAME_RATE};
use crate::arm::ArmPosition;
use crate::error::{Error, Result};

/// Inclusive frame-count range for one segment of a class.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentDurations {
    pub min: usize,
    pub max: usize,
}

/// Static, per-driver appearance and habits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriverProfile {
    pub lateral_offset_mm: f64,
    pub vertical_offset_mm: f64,
    pub torso_depth_mm: f64,
    pub torso_half_width_mm: f64,
    pub arm_scale: f64,
    /// Pitch, roll, yaw bias in degrees.
    pub head_bias_deg: [f64; 3],
    pub au_bias: [f64; 4],
    pub gaze_bias: [f64; 2],
    pub eye: EyeAppearance,
}

impl Default for DriverProfile {
    fn default() -> Self {
        Self {
            lateral_offset_mm: -60.0,
            vertical_offset_mm: 0.0,
            torso_depth_mm: 1000.0,
            torso_half_width_mm: 190.0,
            arm_scale: 1.0,
            head_bias_deg: [0.0; 3],
            au_bias: [0.0; 4],
            gaze_bias: [0.0; 2],
            eye: EyeAppearance::default(),
        }
    }
}

impl DriverProfile {
    /// Draws a driver from the population distribution.
    pub fn sample(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6472_6976_6572);
        let n = |rng: &mut ChaCha8Rng, sd: f64| Normal::new(0.0, sd).unwrap().sample(rng);
        Self {
            lateral_offset_mm: -60.0 + n(&mut rng, 25.0),
            vertical_offset_mm: n(&mut rng, 25.0),
            torso_depth_mm: 1000.0 + rng.random_range(-50.0..50.0),
            torso_half_width_mm: 190.0 + rng.random_range(-20.0..20.0),
            arm_scale: 1.0 + rng.random_range(-0.08..0.08),
            head_bias_deg: [n(&mut rng, 3.0), n(&mut rng, 2.0), n(&mut rng, 3.0)],
            au_bias: [n(&mut rng, 0.03), n(&mut rng, 0.03), n(&mut rng, 0.03), n(&mut rng, 0.03)],
            gaze_bias: [n(&mut rng, 0.08), n(&mut rng, 0.08)],
            eye: EyeAppearance {
                sclera: rng.random_range(0.74..0.9),
                skin: rng.random_range(0.5..0.66),
                iris: rng.random_range(0.12..0.3),
                iris_radius: rng.random_range(6.0..9.0),
            },
        }
    }
}

/// Generator parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub driver_id: String,
    pub driver: DriverProfile,
    pub frames: usize,
    pub width: usize,
    pub height: usize,
    /// Target share of frames per class, indexed by class code.
    pub class_proportions: [f64; 5],
    /// Segment duration range per class, indexed by class code.
    pub segment_durations: [SegmentDurations; 5],
    pub depth_noise_mm: f64,
    pub invalid_depth_fraction: f64,
    pub eye_noise: f64,
    pub angle_noise_deg: f64,
    pub au_noise: f64,
}

impl Default for GeneratorSpec {
    fn default() -> Self {
        let distraction = SegmentDurations { min: 200, max: 450 };
        Self {
            driver_id: "driver00".into(),
            driver: DriverProfile::default(),
            frames: 3000,
            width: 128,
            height: 96,
            class_proportions: [0.15, 0.15, 0.15, 0.15, 0.40],
            segment_durations: [
                distraction,
                distraction,
                distraction,
                distraction,
                SegmentDurations { min: 150, max: 350 },
            ],
            depth_noise_mm: 6.0,
            invalid_depth_fraction: 0.005,
            eye_noise: 0.05,
            angle_noise_deg: 2.0,
            au_noise: 0.04,
        }
    }
}

impl GeneratorSpec {
    pub fn for_driver(driver_index: usize, driver_seed: u64) -> Self {
        Self {
            driver_id: format!("driver{driver_index:02}"),
            driver: DriverProfile::sample(driver_seed),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.frames == 0 {
            return Err(Error::InvalidInput("generator spec has zero frames".into()));
        }
        let total: f64 = self.class_proportions.iter().sum();
        if !(total > 0.0) || self.class_proportions.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidInput(
                "class proportions must be nonnegative with a positive sum".into(),
            ));
        }
        if self.segment_durations.iter().any(|d| d.min == 0 || d.max < d.min) {
            return Err(Error::InvalidInput("segment durations need 0 < min <= max".into()));
        }
        if self.width < 16 || self.height < 16 {
            return Err(Error::InvalidInput("depth frames must be at least 16x16".into()));
        }
        Ok(())
    }
}

/// Frames allotted to each class, summing exactly to `frames`.
fn class_budgets(spec: &GeneratorSpec) -> [usize; 5] {
    let total: f64 = spec.class_proportions.iter().sum();
    let mut budgets = [0usize; 5];
    let mut assigned = 0usize;
    let mut remainders = [(0.0f64, 0usize); 5];
    for (i, p) in spec.class_proportions.iter().enumerate() {
        let exact = p / total * spec.frames as f64;
        budgets[i] = exact.floor() as usize;
        assigned += budgets[i];
        remainders[i] = (exact - exact.floor(), i);
    }
    remainders.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for &(_, i) in remainders.iter().take(spec.frames - assigned) {
        budgets[i] += 1;
    }
    budgets
}

fn split_budget(budget: usize, d: SegmentDurations, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut out: Vec<usize> = Vec::new();
    let mut left = budget;
    while left > 0 {
        let len = rng.random_range(d.min..=d.max).min(left);
        if len < d.min && !out.is_empty() {
            *out.last_mut().unwrap() += len;
        } else {
            out.push(len);
        }
        left -= len;
    }
    out
}

/// Segment schedule: distraction segments in random order, separated by
/// normal-driving segments where available.
fn schedule(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<(DistractionClass, usize)> {
    let budgets = class_budgets(spec);
    let mut distractions = Vec::new();
    let mut normal = Vec::new();
    for class in DistractionClass::ALL {
        let parts = split_budget(budgets[class.index()], spec.segment_durations[class.index()], rng);
        for len in parts {
            if class == DistractionClass::NormalDriving {
                normal.push((class, len));
            } else {
                distractions.push((class, len));
            }
        }
    }
    // Fisher-Yates with the session stream
    for i in (1..distractions.len()).rev() {
        let j = rng.random_range(0..=i);
        distractions.swap(i, j);
    }
    let mut out = Vec::with_capacity(distractions.len() + normal.len());
    let (mut d, mut n) = (distractions.into_iter(), normal.into_iter());
    loop {
        match (n.next(), d.next()) {
            (None, None) => break,
            (a, b) => {
                out.extend(a);
                out.extend(b);
            }
        }
    }
    out
}

pub fn arm_position_for(class: DistractionClass) -> ArmPosition {
    match class {
        DistractionClass::PhoneCall | DistractionClass::Drinking => ArmPosition::Up,
        DistractionClass::TextMessage => ArmPosition::Down,
        DistractionClass::ObjectDistraction => ArmPosition::Right,
        DistractionClass::NormalDriving => ArmPosition::Forward,
    }
}

/// Elbow and hand offsets from the right shoulder (mm), per class.
fn arm_target(class: DistractionClass) -> (Point3, Point3) {
    match class {
        DistractionClass::NormalDriving => ([20.0, 230.0, -90.0], [-40.0, 200.0, -380.0]),
        DistractionClass::PhoneCall => ([60.0, 190.0, -140.0], [-60.0, -190.0, -80.0]),
        DistractionClass::Drinking => ([40.0, 200.0, -170.0], [-130.0, -140.0, -230.0]),
        DistractionClass::TextMessage => ([10.0, 260.0, -40.0], [-70.0, 420.0, -220.0]),
        DistractionClass::ObjectDistraction => ([240.0, 80.0, -30.0], [420.0, 130.0, -110.0]),
    }
}

struct Behavior {
    /// Pitch, roll, yaw (degrees).
    head: [f64; 3],
    aus: [f64; 4],
    /// Amplitude of the jaw oscillation while talking.
    talk: f64,
    gaze: [f64; 2],
    /// Per-frame probability of losing and regaining face tracking.
    lose: f64,
    regain: f64,
    /// Fraction of frames with a non-visible pupil besides blinks.
    hidden_pupil: f64,
}

fn behavior(class: DistractionClass) -> Behavior {
    match class {
        DistractionClass::NormalDriving => Behavior {
            head: [0.0, 0.0, 0.0],
            aus: [0.05, 0.05, 0.02, 0.02],
            talk: 0.0,
            gaze: [0.0, 0.0],
            lose: 0.003,
            regain: 0.15,
            hidden_pupil: 0.0,
        },
        DistractionClass::PhoneCall => Behavior {
            head: [-5.0, 12.0, 15.0],
            aus: [0.1, 0.3, 0.2, 0.05],
            talk: 0.25,
            gaze: [-0.35, 0.1],
            lose: 0.01,
            regain: 0.1,
            hidden_pupil: 0.0,
        },
        DistractionClass::Drinking => Behavior {
            head: [18.0, 0.0, -5.0],
            aus: [0.3, 0.45, 0.05, 0.25],
            talk: 0.0,
            gaze: [0.0, -0.6],
            lose: 0.06,
            regain: 0.04,
            hidden_pupil: 0.1,
        },
        DistractionClass::TextMessage => Behavior {
            head: [-28.0, 2.0, 5.0],
            aus: [0.02, 0.1, 0.05, 0.2],
            talk: 0.0,
            gaze: [0.1, 0.9],
            lose: 0.008,
            regain: 0.1,
            hidden_pupil: 0.25,
        },
        DistractionClass::ObjectDistraction => Behavior {
            head: [-8.0, 3.0, 40.0],
            aus: [0.05, 0.1, 0.15, 0.05],
            talk: 0.0,
            gaze: [0.9, 0.3],
            lose: 0.012,
            regain: 0.1,
            hidden_pupil: 0.0,
        },
    }
}

fn add(a: Point3, b: Point3) -> Point3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale(a: Point3, s: f64) -> Point3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn lerp(a: Point3, b: Point3, t: f64) -> Point3 {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])]
}

fn to_gray(values: &[f64], rng: &mut ChaCha8Rng, noise: &Normal<f64>) -> GrayImage {
    let pixels = values
        .iter()
        .map(|&v| ((v + noise.sample(rng)).clamp(0.0, 1.0) * 255.0).round() as u8)
        .collect();
    GrayImage {
        width: EYE_PATCH_SIZE,
        height: EYE_PATCH_SIZE,
        pixels,
    }
}

struct Body<'a> {
    profile: &'a DriverProfile,
    intrinsics: CameraIntrinsics,
}

impl Body<'_> {
    fn top_y(&self) -> f64 {
        -70.0 + self.profile.vertical_offset_mm
    }

    fn right_shoulder(&self) -> Point3 {
        let p = self.profile;
        [
            p.lateral_offset_mm + p.torso_half_width_mm - 30.0,
            self.top_y() + 35.0,
            p.torso_depth_mm - 20.0,
        ]
    }

    fn render(&self, canvas: &mut render::DepthCanvas, elbow: Point3, hand: Point3, head_yaw: f64) {
        let p = self.profile;
        let z = p.torso_depth_mm;
        let top = self.top_y();
        canvas.torso(p.lateral_offset_mm, top, p.torso_half_width_mm, z);
        // neck and head
        canvas.plane_rect(
            p.lateral_offset_mm - 55.0,
            p.lateral_offset_mm + 55.0,
            top - 120.0,
            top + 10.0,
            z + 10.0,
            20.0,
        );
        let head_x = p.lateral_offset_mm + 0.8 * head_yaw;
        canvas.sphere([head_x, top - 200.0, z - 40.0], 105.0);
        // left arm, hands on the wheel
        let ls = [p.lateral_offset_mm - p.torso_half_width_mm + 30.0, top + 35.0, z - 20.0];
        let le = add(ls, scale([-20.0, 240.0, -70.0], p.arm_scale));
        let lh = add(le, scale([70.0, -20.0, -300.0], p.arm_scale));
        canvas.capsule(ls, le, 48.0, 42.0);
        canvas.capsule(le, lh, 40.0, 36.0);
        // right arm
        let rs = self.right_shoulder();
        canvas.capsule(rs, elbow, 48.0, 42.0);
        canvas.capsule(elbow, hand, 40.0, 36.0);
        canvas.sphere(hand, 45.0);
        let _ = self.intrinsics;
    }
}

/// Specs and seeds for a multi-driver corpus: `drivers` sampled driver
/// profiles with `sessions` recordings each, all derived from `seed`.
pub fn corpus_specs(drivers: usize, sessions: usize, frames: usize, seed: u64) -> Vec<(GeneratorSpec, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(drivers * sessions);
    for d in 0..drivers {
        let driver_seed: u64 = rng.random();
        let base = GeneratorSpec {
            frames,
            ..GeneratorSpec::for_driver(d, driver_seed)
        };
        for _ in 0..sessions {
            out.push((base.clone(), rng.random()));
        }
    }
    out
}

/// Generates a deterministic synthetic session.
pub fn generate_synthetic_session(spec: &GeneratorSpec, seed: u64) -> Result<Session> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let intrinsics = CameraIntrinsics::kinect_scaled(spec.width, spec.height);
    let seat = render::seat_scene(spec.width, spec.height, intrinsics);
    let background = seat.to_frame();

    let segments = schedule(spec, &mut rng);
    let body = Body {
        profile: &spec.driver,
        intrinsics,
    };
    let std_normal = Normal::new(0.0, 1.0).unwrap();
    let depth_noise = Normal::new(0.0, spec.depth_noise_mm.max(0.0)).unwrap();
    let eye_noise = Normal::new(0.0, spec.eye_noise.max(0.0)).unwrap();
    let profile = &spec.driver;

    let (e0, h0) = arm_target(DistractionClass::NormalDriving);
    let mut elbow_off = e0;
    let mut hand_off = h0;
    let mut head = profile.head_bias_deg;
    let mut aus = [0.0; 4];
    let mut gaze = profile.gaze_bias;
    // the tracker needs a moment to lock on at session start
    let mut tracked = false;
    let mut init_frames = rng.random_range(15..45usize);
    let mut blink_left = 0usize;
    let mut hidden_left = 0usize;
    let mut talk_phase = 0.0f64;

    let mut frames = Vec::with_capacity(spec.frames);
    for (class, len) in segments {
        let b = behavior(class);
        let (te, th) = arm_target(class);
        // per-segment variation of the pose and head targets
        let jitter = |rng: &mut ChaCha8Rng, sd: f64| sd * std_normal.sample(rng);
        let te = add(scale(te, profile.arm_scale), [jitter(&mut rng, 20.0), jitter(&mut rng, 20.0), jitter(&mut rng, 20.0)]);
        let th = add(scale(th, profile.arm_scale), [jitter(&mut rng, 40.0), jitter(&mut rng, 40.0), jitter(&mut rng, 40.0)]);
        let head_target = [
            b.head[0] + profile.head_bias_deg[0] + jitter(&mut rng, 6.0),
            b.head[1] + profile.head_bias_deg[1] + jitter(&mut rng, 4.0),
            b.head[2] + profile.head_bias_deg[2] + jitter(&mut rng, 8.0),
        ];
        let gaze_target = [
            b.gaze[0] + profile.gaze_bias[0] + jitter(&mut rng, 0.15),
            b.gaze[1] + profile.gaze_bias[1] + jitter(&mut rng, 0.15),
        ];
        for _ in 0..len {
            // arm: first-order approach toward the target plus tremor
            elbow_off = lerp(elbow_off, te, 0.15);
            hand_off = lerp(hand_off, th, 0.15);
            let tremor = [jitter(&mut rng, 6.0), jitter(&mut rng, 6.0), jitter(&mut rng, 6.0)];
            let rs = body.right_shoulder();
            let elbow = add(rs, elbow_off);
            let hand = add(add(rs, hand_off), tremor);

            for k in 0..3 {
                head[k] += 0.12 * (head_target[k] - head[k]) + spec.angle_noise_deg * std_normal.sample(&mut rng) * 0.5;
            }
            talk_phase += 0.45 + 0.1 * std_normal.sample(&mut rng);
            for k in 0..4 {
                let mut target = b.aus[k] + profile.au_bias[k];
                if k == 1 {
                    target += b.talk * talk_phase.sin().abs();
                }
                aus[k] += 0.3 * (target - aus[k]) + spec.au_noise * std_normal.sample(&mut rng);
            }
            for k in 0..2 {
                gaze[k] += 0.2 * (gaze_target[k] - gaze[k]) + 0.05 * std_normal.sample(&mut rng);
                gaze[k] = gaze[k].clamp(-1.2, 1.2);
            }

            // depth frame
            let mut canvas = render::DepthCanvas {
                width: seat.width,
                height: seat.height,
                intrinsics,
                depth: seat.depth.clone(),
            };
            body.render(&mut canvas, elbow, hand, head[2]);
            let values = canvas
                .depth
                .iter()
                .map(|&d| {
                    if rng.random::<f64>() < spec.invalid_depth_fraction {
                        0
                    } else {
                        (d + depth_noise.sample(&mut rng)).round().clamp(1.0, 65535.0) as u16
                    }
                })
                .collect();
            let depth = DepthFrame {
                width: spec.width,
                height: spec.height,
                values,
            };

            // face tracker state
            if init_frames > 0 {
                init_frames -= 1;
                tracked = init_frames == 0;
            } else if tracked {
                if rng.random::<f64>() < b.lose {
                    tracked = false;
                }
            } else if rng.random::<f64>() < b.regain {
                tracked = true;
            }
            let face = if tracked {
                let hx = 320.0 + 2.5 * head[2];
                let hy = 220.0 - 2.5 * head[0];
                let (s, c) = head[1].to_radians().sin_cos();
                let corner = |dx: f64| -> (f64, f64) { (hx + c * dx, hy + s * dx) };
                let mut corners = [0.0; 8];
                for (i, dx) in [-42.0, -14.0, 42.0, 14.0].iter().enumerate() {
                    let (x, y) = corner(*dx);
                    corners[2 * i] = x + 0.4 * std_normal.sample(&mut rng);
                    corners[2 * i + 1] = y + 0.4 * std_normal.sample(&mut rng);
                }
                FaceChannelRecord {
                    tracked: true,
                    pitch: head[0].clamp(-180.0, 180.0),
                    roll: head[1].clamp(-180.0, 180.0),
                    yaw: head[2].clamp(-180.0, 180.0),
                    aus,
                    eye_corners: corners,
                }
            } else {
                FaceChannelRecord::untracked()
            };

            // eyes
            if blink_left == 0 && hidden_left == 0 {
                if rng.random::<f64>() < 1.0 / 90.0 {
                    blink_left = 3;
                } else if rng.random::<f64>() < b.hidden_pupil / 8.0 {
                    hidden_left = 8;
                }
            }
            let closed = blink_left > 0 || hidden_left > 0;
            blink_left = blink_left.saturating_sub(1);
            hidden_left = hidden_left.saturating_sub(1);
            let c = (EYE_PATCH_SIZE as f64 - 1.0) / 2.0;
            let state = if closed {
                EyeState::Closed {
                    edge_row: c + 3.0 * std_normal.sample(&mut rng),
                }
            } else {
                EyeState::Open {
                    center: (c + 9.0 * gaze[0], c + 6.0 * gaze[1]),
                }
            };
            let left = render::eye_patch(&profile.eye, state);
            let right = render::eye_patch(&profile.eye, state);
            let left_eye = to_gray(&left, &mut rng, &eye_noise);
            let right_eye = to_gray(&right, &mut rng, &eye_noise);

            frames.push(Frame {
                depth,
                left_eye,
                right_eye,
                face,
                label: class,
            });
        }
    }

    Ok(Session {
        driver_id: spec.driver_id.clone(),
        frame_rate: NOMINAL_FRAME_RATE,
        intrinsics,
        background,
        frames,
    })
}

/// One open- or closed-eye patch with its ground truth, for filter benchmarks
/// and closure-classifier training banks.
#[derive(Clone, Debug)]
pub struct LabeledEyePatch {
    /// Row-major `[0, 1]` intensities.
    pub pixels: Vec<f64>,
    pub open: bool,
    /// Ground-truth iris center for open eyes.
    pub center: Option<(f64, f64)>,
}

/// Renders one synthetic eye patch with additive Gaussian noise `noise`.
///
/// Open eyes get a random iris radius in `[6, 9]` and a random center at least
/// 12 px from the border.
pub fn random_eye_patch(rng: &mut ChaCha8Rng, open: bool, noise: f64) -> LabeledEyePatch {
    let app = EyeAppearance {
        sclera: rng.random_range(0.74..0.9),
        skin: rng.random_range(0.5..0.66),
        iris: rng.random_range(0.12..0.3),
        iris_radius: rng.random_range(6.0..=9.0),
    };
    let n = EYE_PATCH_SIZE as f64;
    let c = (n - 1.0) / 2.0;
    let (state, center) = if open {
        let center = (c + rng.random_range(-10.0..10.0), c + rng.random_range(-6.0..6.0));
        (EyeState::Open { center }, Some(center))
    } else {
        (EyeState::Closed { edge_row: c + rng.random_range(-6.0..6.0) }, None)
    };
    let dist = Normal::new(0.0, noise.max(0.0)).unwrap();
    let pixels = render::eye_patch(&app, state)
        .into_iter()
        .map(|v| (v + dist.sample(rng)).clamp(0.0, 1.0))
        .collect();
    LabeledEyePatch {
        pixels,
        open,
        center,
    }
}
