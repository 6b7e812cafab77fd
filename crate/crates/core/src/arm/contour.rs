//! Marching-squares boundary tracing over binary masks.

use super::mask::ForegroundMask;
use crate::error::{Error, Result};

pub type Pixel = (usize, usize);

/// Ordered boundary pixels with their back-projected 3D points (mm).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContourChain {
    pub pixels: Vec<Pixel>,
    pub points3d: Vec<[f64; 3]>,
}

impl ContourChain {
    pub fn new(pixels: Vec<Pixel>, points3d: Vec<[f64; 3]>) -> Result<Self> {
        if pixels.len() != points3d.len() {
            return Err(Error::InvalidInput(format!(
                "contour has {} pixels but {} points",
                pixels.len(),
                points3d.len()
            )));
        }
        Ok(Self { pixels, points3d })
    }

    pub fn from_pixels(pixels: Vec<Pixel>, mut point: impl FnMut(Pixel) -> [f64; 3]) -> Self {
        let points3d = pixels.iter().map(|&p| point(p)).collect();
        Self { pixels, points3d }
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Maximal contiguous run (cyclically) of pixels satisfying `keep`,
    /// starting at the run's first pixel. Equal-length runs resolve to the
    /// earliest start.
    pub fn longest_run(&self, keep: impl Fn(Pixel) -> bool) -> ContourChain {
        let n = self.pixels.len();
        let flags: Vec<bool> = self.pixels.iter().map(|&p| keep(p)).collect();
        if flags.iter().all(|&f| f) {
            return self.clone();
        }
        if !flags.iter().any(|&f| f) {
            return ContourChain::default();
        }
        // start scanning just after a rejected pixel so runs never straddle the scan origin
        let origin = flags.iter().position(|&f| !f).unwrap();
        let (mut best_start, mut best_len) = (0usize, 0usize);
        let mut run_start = None;
        for k in 1..=n {
            let i = (origin + k) % n;
            if flags[i] {
                let s = *run_start.get_or_insert(k);
                let len = k - s + 1;
                let start = (origin + s) % n;
                if len > best_len || (len == best_len && start < best_start) {
                    best_len = len;
                    best_start = start;
                }
            } else {
                run_start = None;
            }
        }
        let idx = (0..best_len).map(|k| (best_start + k) % n);
        ContourChain {
            pixels: idx.clone().map(|i| self.pixels[i]).collect(),
            points3d: idx.map(|i| self.points3d[i]).collect(),
        }
    }
}

/// Keeps the pixels on the image's right of `centroid_x` (x >= centroid).
pub fn right_side_filter(chain: &ContourChain, centroid_x: f64) -> ContourChain {
    chain.longest_run(|(x, _)| x as f64 >= centroid_x)
}

/// Keeps the profile-view pixels nearer to the camera than the centroid bin.
pub fn front_rim_filter(chain: &ContourChain, centroid_bin: f64) -> ContourChain {
    chain.longest_run(|(x, _)| x as f64 <= centroid_bin)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Dir {
    Right,
    Down,
    Left,
    Up,
}

/// Traces the outer boundary of the foreground as an ordered, closed,
/// duplicate-free chain of 8-connected pixels, counter-clockwise on screen,
/// starting at the first foreground pixel in row-major order.
///
/// The tracer walks pixel-corner vertices with foreground kept on the right;
/// saddle cells connect diagonal foreground pixels. Pixels the walk passes
/// twice (spurs, one-pixel bridges) split it into two loops, and only the
/// longer loop is kept.
pub fn marching_squares(mask: &ForegroundMask) -> Result<Vec<Pixel>> {
    let start = mask
        .mask
        .iter()
        .position(|&m| m)
        .ok_or_else(|| Error::InvalidInput("marching squares on an empty mask".into()))?;
    let p0 = ((start % mask.width) as i64, (start / mask.width) as i64);
    let fg = |x: i64, y: i64| mask.get_signed(x, y);

    let mut raw: Vec<(i64, i64)> = Vec::new();
    let (mut vx, mut vy) = p0;
    let mut dir = Dir::Right;
    let limit = 4 * (mask.width + 1) * (mask.height + 1) + 8;
    for _ in 0..limit {
        // pixel on the right of the edge being walked, then step
        let (px, nx, ny) = match dir {
            Dir::Right => ((vx, vy), vx + 1, vy),
            Dir::Down => ((vx - 1, vy), vx, vy + 1),
            Dir::Left => ((vx - 1, vy - 1), vx - 1, vy),
            Dir::Up => ((vx, vy - 1), vx, vy - 1),
        };
        raw.push(px);
        vx = nx;
        vy = ny;
        let tl = fg(vx - 1, vy - 1);
        let tr = fg(vx, vy - 1);
        let bl = fg(vx - 1, vy);
        let br = fg(vx, vy);
        dir = match (tl, tr, bl, br) {
            (true, false, false, true) => {
                if dir == Dir::Down {
                    Dir::Right
                } else {
                    Dir::Left
                }
            }
            (false, true, true, false) => {
                if dir == Dir::Right {
                    Dir::Up
                } else {
                    Dir::Down
                }
            }
            _ if br && !tr => Dir::Right,
            _ if bl && !br => Dir::Down,
            _ if tl && !bl => Dir::Left,
            _ if tr && !tl => Dir::Up,
            _ => unreachable!("boundary walk left the contour"),
        };
        if (vx, vy) == p0 && dir == Dir::Right {
            break;
        }
    }

    raw.dedup();
    while raw.len() > 1 && raw.last() == Some(&p0) {
        raw.pop();
    }

    let mut chain: Vec<Pixel> = raw.into_iter().map(|(x, y)| (x as usize, y as usize)).collect();
    let mut slot = vec![usize::MAX; mask.width * mask.height];
    while let Some((i, j)) = first_revisit(&chain, &mut slot, mask.width) {
        // a pinch pixel splits the cyclic walk into two loops; keep the longer
        let inner = j - i;
        chain = if inner > chain.len() - inner {
            chain[i..j].to_vec()
        } else {
            let mut rest = chain[j..].to_vec();
            rest.extend_from_slice(&chain[..i]);
            rest
        };
        let first = chain
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.1, p.0))
            .map(|(k, _)| k)
            .unwrap_or(0);
        chain.rotate_left(first);
    }

    // the walk runs clockwise on screen (positive y-down shoelace); flip it
    if signed_area(&chain) > 0.0 {
        chain[1..].reverse();
    }
    Ok(chain)
}

/// Positions `(i, j)` of the first pixel seen twice, `i < j`.
fn first_revisit(chain: &[Pixel], slot: &mut [usize], width: usize) -> Option<(usize, usize)> {
    let mut found = None;
    for (k, p) in chain.iter().enumerate() {
        let key = p.1 * width + p.0;
        if slot[key] != usize::MAX {
            found = Some((slot[key], k));
            break;
        }
        slot[key] = k;
    }
    for p in chain {
        slot[p.1 * width + p.0] = usize::MAX;
    }
    found
}

/// Shoelace area in image coordinates (y down): negative for
/// counter-clockwise-on-screen chains.
pub fn signed_area(chain: &[Pixel]) -> f64 {
    let n = chain.len();
    let mut s = 0.0;
    for i in 0..n {
        let (x0, y0) = chain[i];
        let (x1, y1) = chain[(i + 1) % n];
        s += x0 as f64 * y1 as f64 - x1 as f64 * y0 as f64;
    }
    0.5 * s
}
