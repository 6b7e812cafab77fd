//! Binary PGM ("P5") reading and writing.
//!
//! Depth rasters use maxval 65535 with big-endian samples; eye patches use
//! maxval 255.

use std::fs;
use std::path::Path;

use super::types::{DepthFrame, GrayImage};
use crate::error::{Error, Result};

fn header(width: usize, height: usize, maxval: u32) -> Vec<u8> {
    format!("P5\n{width} {height}\n{maxval}\n").into_bytes()
}

pub fn encode_depth(frame: &DepthFrame) -> Vec<u8> {
    let mut out = header(frame.width, frame.height, 65535);
    out.reserve(frame.values.len() * 2);
    for v in &frame.values {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}

pub fn encode_gray(image: &GrayImage) -> Vec<u8> {
    let mut out = header(image.width, image.height, 255);
    out.extend_from_slice(&image.pixels);
    out
}

struct Parsed<'a> {
    width: usize,
    height: usize,
    maxval: u32,
    data: &'a [u8],
}

fn parse<'a>(bytes: &'a [u8], name: &str) -> Result<Parsed<'a>> {
    let mut pos = 0usize;
    let mut tokens = Vec::with_capacity(4);
    while tokens.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else if bytes[pos].is_ascii_whitespace() {
                pos += 1;
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::format(name, "truncated PGM header"));
        }
        tokens.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| Error::format(name, "non-ASCII PGM header"))?);
    }
    if tokens[0] != "P5" {
        return Err(Error::format(name, format!("expected P5 magic, found {:?}", tokens[0])));
    }
    let num = |t: &str, what: &str| -> Result<usize> {
        t.parse::<usize>()
            .map_err(|_| Error::format(name, format!("bad PGM {what}: {t:?}")))
    };
    let width = num(tokens[1], "width")?;
    let height = num(tokens[2], "height")?;
    let maxval = num(tokens[3], "maxval")? as u32;
    if width == 0 || height == 0 {
        return Err(Error::format(name, "PGM dimensions must be positive"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(Error::format(name, format!("PGM maxval {maxval} out of range")));
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() {
        return Err(Error::format(name, "missing PGM raster"));
    }
    pos += 1;
    Ok(Parsed {
        width,
        height,
        maxval,
        data: &bytes[pos..],
    })
}

pub fn decode_depth(bytes: &[u8], name: &str) -> Result<DepthFrame> {
    let p = parse(bytes, name)?;
    if p.maxval < 256 {
        return Err(Error::format(name, "depth PGM must be 16-bit (maxval > 255)"));
    }
    let n = p.width * p.height;
    if p.data.len() != 2 * n {
        return Err(Error::format(
            name,
            format!("raster has {} bytes, expected {}", p.data.len(), 2 * n),
        ));
    }
    let values = p
        .data
        .chunks_exact(2)
        .map(|c| u16::from_be_bytes([c[0], c[1]]))
        .collect();
    DepthFrame::new(p.width, p.height, values)
}

pub fn decode_gray(bytes: &[u8], name: &str) -> Result<GrayImage> {
    let p = parse(bytes, name)?;
    if p.maxval > 255 {
        return Err(Error::format(name, "eye patch PGM must be 8-bit"));
    }
    let n = p.width * p.height;
    if p.data.len() != n {
        return Err(Error::format(
            name,
            format!("raster has {} bytes, expected {}", p.data.len(), n),
        ));
    }
    GrayImage::new(p.width, p.height, p.data.to_vec())
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::format(path.display().to_string(), "file missing"),
        _ => Error::io(path, e),
    })
}

pub fn read_depth(path: &Path) -> Result<DepthFrame> {
    decode_depth(&read(path)?, &path.display().to_string())
}

pub fn read_gray(path: &Path) -> Result<GrayImage> {
    decode_gray(&read(path)?, &path.display().to_string())
}

pub fn write_depth(path: &Path, frame: &DepthFrame) -> Result<()> {
    fs::write(path, encode_depth(frame)).map_err(|e| Error::io(path, e))
}

pub fn write_gray(path: &Path, image: &GrayImage) -> Result<()> {
    fs::write(path, encode_gray(image)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_uses_big_endian_samples() {
        let frame = DepthFrame::new(2, 1, vec![0x0102, 0xfffe]).unwrap();
        let bytes = encode_depth(&frame);
        assert!(bytes.starts_with(b"P5\n2 1\n65535\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[0x01, 0x02, 0xff, 0xfe]);
        assert_eq!(decode_depth(&bytes, "x").unwrap(), frame);
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# comment\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3, 4]);
        let img = decode_gray(&bytes, "x").unwrap();
        assert_eq!(img.pixels, vec![1, 2, 3, 4]);
    }

    #[test]
    fn truncated_raster_is_rejected() {
        let mut bytes = b"P5\n2 2\n65535\n".to_vec();
        bytes.extend_from_slice(&[0, 1, 0]);
        assert!(matches!(decode_depth(&bytes, "d.pgm"), Err(Error::Format { .. })));
    }

    #[test]
    fn wrong_magic_is_rejected() {
        assert!(decode_gray(b"P2\n1 1\n255\n\x00", "x").is_err());
    }
}
