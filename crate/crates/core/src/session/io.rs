//! Session directory layout:
//!
//! ```text
//! manifest.json          driver id, frame count, dimensions, frame rate, intrinsics
//! background.pgm         16-bit driver-absent seat scan (mm)
//! depth/NNNNNN.pgm       16-bit depth per frame (mm)
//! eyes/NNNNNN_L.pgm      8-bit 60x60 eye patches
//! eyes/NNNNNN_R.pgm
//! face.csv               face-tracker channel
//! labels.csv             frame_id, class code
//! ```

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::pgm;
use super::types::{CameraIntrinsics, DistractionClass, FaceChannelRecord, Frame, Session};
use super::EYE_PATCH_SIZE;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

pub const FACE_HEADER: [&str; 17] = [
    "frame_id", "tracked", "pitch", "roll", "yaw", "au10", "au26_27", "au20", "au13_15",
    "left_outer_x", "left_outer_y", "left_inner_x", "left_inner_y", "right_outer_x",
    "right_outer_y", "right_inner_x", "right_inner_y",
];

pub const LABELS_HEADER: [&str; 2] = ["frame_id", "class"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub driver_id: String,
    pub frame_count: usize,
    pub width: usize,
    pub height: usize,
    pub eye_patch_size: usize,
    pub frame_rate: f64,
    pub focal_length_px: f64,
    pub principal_point: [f64; 2],
}

fn depth_name(i: usize) -> String {
    format!("depth/{i:06}.pgm")
}

fn eye_name(i: usize, side: char) -> String {
    format!("eyes/{i:06}_{side}.pgm")
}

fn mkdir(path: &Path) -> Result<()> {
    fs::create_dir_all(path).map_err(|e| Error::io(path, e))
}

/// Writes `session` into `dir`, creating it if needed.
pub fn save_session(session: &Session, dir: &Path) -> Result<()> {
    session.validate()?;
    mkdir(&dir.join("depth"))?;
    mkdir(&dir.join("eyes"))?;

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        driver_id: session.driver_id.clone(),
        frame_count: session.frames.len(),
        width: session.background.width,
        height: session.background.height,
        eye_patch_size: EYE_PATCH_SIZE,
        frame_rate: session.frame_rate,
        focal_length_px: session.intrinsics.focal_length,
        principal_point: [session.intrinsics.cx, session.intrinsics.cy],
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = dir.join("manifest.json");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;

    pgm::write_depth(&dir.join("background.pgm"), &session.background)?;
    for (i, frame) in session.frames.iter().enumerate() {
        pgm::write_depth(&dir.join(depth_name(i)), &frame.depth)?;
        pgm::write_gray(&dir.join(eye_name(i, 'L')), &frame.left_eye)?;
        pgm::write_gray(&dir.join(eye_name(i, 'R')), &frame.right_eye)?;
    }

    let mut face = String::new();
    face.push_str(&FACE_HEADER.join(","));
    face.push('\n');
    for (i, frame) in session.frames.iter().enumerate() {
        face.push_str(&face_row(i, &frame.face));
        face.push('\n');
    }
    let path = dir.join("face.csv");
    fs::write(&path, face).map_err(|e| Error::io(&path, e))?;

    let mut labels = String::new();
    labels.push_str(&LABELS_HEADER.join(","));
    labels.push('\n');
    for (i, frame) in session.frames.iter().enumerate() {
        labels.push_str(&format!("{i},{}\n", frame.label.code()));
    }
    let path = dir.join("labels.csv");
    fs::write(&path, labels).map_err(|e| Error::io(&path, e))?;
    Ok(())
}

fn face_row(i: usize, rec: &FaceChannelRecord) -> String {
    if !rec.tracked {
        let mut row = format!("{i},0");
        row.push_str(&",".repeat(15));
        return row;
    }
    let mut row = format!("{i},1,{},{},{}", rec.pitch, rec.roll, rec.yaw);
    for v in rec.aus.iter().chain(rec.eye_corners.iter()) {
        row.push(',');
        row.push_str(&v.to_string());
    }
    row
}

/// Writes a labels.csv-compatible file.
pub fn write_labels(path: &Path, labels: &[DistractionClass]) -> Result<()> {
    let mut out = LABELS_HEADER.join(",");
    out.push('\n');
    for (i, l) in labels.iter().enumerate() {
        out.push_str(&format!("{i},{}\n", l.code()));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn csv_reader(dir: &Path, name: &str) -> Result<csv::Reader<fs::File>> {
    let path = dir.join(name);
    let file = fs::File::open(&path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::format(name, format!("{name} missing")),
        _ => Error::io(&path, e),
    })?;
    Ok(csv::ReaderBuilder::new().has_headers(true).from_reader(file))
}

fn check_header(reader: &mut csv::Reader<fs::File>, name: &str, expected: &[&str]) -> Result<()> {
    let headers = reader
        .headers()
        .map_err(|e| Error::format(name, e.to_string()))?;
    if headers.iter().ne(expected.iter().copied()) {
        return Err(Error::format(name, format!("unexpected header {headers:?}")));
    }
    Ok(())
}

fn parse_frame_id(field: &str, expected: usize, name: &str) -> Result<()> {
    let id: usize = field
        .parse()
        .map_err(|_| Error::format(name, format!("bad frame_id {field:?}")))?;
    if id != expected {
        return Err(Error::format(
            name,
            format!("frame ids must be contiguous from 0: expected {expected}, found {id}"),
        ));
    }
    Ok(())
}

/// Reads a labels.csv-formatted file.
pub fn read_labels(path: &Path) -> Result<Vec<DistractionClass>> {
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "labels.csv".into());
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv_reader(dir, &name)?;
    check_header(&mut reader, &name, &LABELS_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(&name, e.to_string()))?;
        if rec.len() != 2 {
            return Err(Error::format(&name, format!("row {i}: expected 2 columns")));
        }
        parse_frame_id(&rec[0], i, &name)?;
        let code: u8 = rec[1]
            .parse()
            .map_err(|_| Error::format(&name, format!("row {i}: bad class {:?}", &rec[1])))?;
        let class = DistractionClass::from_code(code)
            .ok_or_else(|| Error::Validation(format!("{name} row {i}: class code {code} not in 0..=4")))?;
        out.push(class);
    }
    Ok(out)
}

fn read_face(dir: &Path) -> Result<Vec<FaceChannelRecord>> {
    let name = "face.csv";
    let mut reader = csv_reader(dir, name)?;
    check_header(&mut reader, name, &FACE_HEADER)?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(name, e.to_string()))?;
        if rec.len() != FACE_HEADER.len() {
            return Err(Error::format(name, format!("row {i}: expected {} columns", FACE_HEADER.len())));
        }
        parse_frame_id(&rec[0], i, name)?;
        let tracked = match &rec[1] {
            "1" => true,
            "0" => false,
            other => return Err(Error::format(name, format!("row {i}: bad tracked flag {other:?}"))),
        };
        if !tracked {
            out.push(FaceChannelRecord::untracked());
            continue;
        }
        let mut vals = [0.0f64; 15];
        for (k, v) in vals.iter_mut().enumerate() {
            let field = &rec[k + 2];
            *v = field.parse().map_err(|_| {
                Error::format(name, format!("row {i}: bad {} value {field:?}", FACE_HEADER[k + 2]))
            })?;
        }
        let record = FaceChannelRecord {
            tracked,
            pitch: vals[0],
            roll: vals[1],
            yaw: vals[2],
            aus: [vals[3], vals[4], vals[5], vals[6]],
            eye_corners: [vals[7], vals[8], vals[9], vals[10], vals[11], vals[12], vals[13], vals[14]],
        };
        record
            .validate()
            .map_err(|e| Error::Validation(format!("face.csv row {i}: {e}")))?;
        out.push(record);
    }
    Ok(out)
}

/// Loads and validates a session directory.
pub fn load_session(dir: &Path) -> Result<Session> {
    let manifest_path = dir.join("manifest.json");
    let text = match fs::read_to_string(&manifest_path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            return Err(Error::format("manifest.json", "manifest missing"))
        }
        Err(e) => return Err(Error::io(&manifest_path, e)),
    };
    let manifest: Manifest =
        serde_json::from_str(&text).map_err(|e| Error::format("manifest.json", e.to_string()))?;
    if manifest.format_version != FORMAT_VERSION {
        return Err(Error::format(
            "manifest.json",
            format!("unsupported format version {}", manifest.format_version),
        ));
    }
    if manifest.eye_patch_size != EYE_PATCH_SIZE {
        return Err(Error::Validation(format!(
            "eye patch size {} (expected {EYE_PATCH_SIZE})",
            manifest.eye_patch_size
        )));
    }

    let faces = read_face(dir)?;
    if faces.len() != manifest.frame_count {
        return Err(Error::Alignment {
            file: "face.csv".into(),
            expected: manifest.frame_count,
            found: faces.len(),
        });
    }
    let labels = read_labels(&dir.join("labels.csv"))?;
    if labels.len() != manifest.frame_count {
        return Err(Error::Alignment {
            file: "labels.csv".into(),
            expected: manifest.frame_count,
            found: labels.len(),
        });
    }
    let depth_files = count_files(&dir.join("depth"))?;
    if depth_files != manifest.frame_count {
        return Err(Error::Alignment {
            file: "depth/".into(),
            expected: manifest.frame_count,
            found: depth_files,
        });
    }
    let eye_files = count_files(&dir.join("eyes"))?;
    if eye_files != 2 * manifest.frame_count {
        return Err(Error::Alignment {
            file: "eyes/".into(),
            expected: 2 * manifest.frame_count,
            found: eye_files,
        });
    }

    let background = pgm::read_depth(&dir.join("background.pgm"))?;
    if background.width != manifest.width || background.height != manifest.height {
        return Err(Error::Validation("background.pgm dimensions differ from manifest".into()));
    }
    let mut frames = Vec::with_capacity(manifest.frame_count);
    for (i, (face, label)) in faces.into_iter().zip(labels).enumerate() {
        let depth = pgm::read_depth(&dir.join(depth_name(i)))?;
        let left_eye = pgm::read_gray(&dir.join(eye_name(i, 'L')))?;
        let right_eye = pgm::read_gray(&dir.join(eye_name(i, 'R')))?;
        frames.push(Frame {
            depth,
            left_eye,
            right_eye,
            face,
            label,
        });
    }
    let session = Session {
        driver_id: manifest.driver_id,
        frame_rate: manifest.frame_rate,
        intrinsics: CameraIntrinsics {
            focal_length: manifest.focal_length_px,
            cx: manifest.principal_point[0],
            cy: manifest.principal_point[1],
        },
        background,
        frames,
    };
    session.validate()?;
    Ok(session)
}

fn count_files(dir: &Path) -> Result<usize> {
    match fs::read_dir(dir) {
        Ok(entries) => Ok(entries
            .filter_map(|e| e.ok())
            .filter(|e| e.path().extension().is_some_and(|x| x == "pgm"))
            .count()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(0),
        Err(e) => Err(Error::io(dir, e)),
    }
}
