//! Image file I/O: PFM for float-exact data, binary PGM/PPM for 8-bit
//! interchange.
//!
//! PFM stores 32-bit little-endian floats (scale `-1.0`), rows bottom-to-top,
//! channels interleaved per pixel. Samples are narrowed to `f32` on write, so
//! any image whose samples are representable in `f32` round-trips bit-exactly.
//! 8-bit formats quantize with `round(v * 255)` clamped to `[0, 255]`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::image::Image;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    Pfm,
    Pgm,
    Ppm,
}

impl ImageFormat {
    pub fn from_extension(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "pfm" => Some(ImageFormat::Pfm),
            "pgm" => Some(ImageFormat::Pgm),
            "ppm" => Some(ImageFormat::Ppm),
            _ => None,
        }
    }
}

/// Reads a PFM, PGM or PPM file, dispatching on the magic bytes.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes)
}

/// Writes `img` in the format implied by the file extension.
pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = ImageFormat::from_extension(path).ok_or_else(|| Error::UnsupportedFormat(path.to_path_buf()))?;
    let bytes = encode(img, format)?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn decode(bytes: &[u8]) -> Result<Image> {
    match bytes.get(..2) {
        Some(b"PF") | Some(b"Pf") => decode_pfm(bytes),
        Some(b"P5") | Some(b"P6") => decode_pnm(bytes),
        _ => Err(Error::MalformedHeader {
            format: "image",
            reason: "unrecognized magic number".into(),
        }),
    }
}

pub fn encode(img: &Image, format: ImageFormat) -> Result<Vec<u8>> {
    match format {
        ImageFormat::Pfm => encode_pfm(img),
        ImageFormat::Pgm | ImageFormat::Ppm => encode_pnm(img, format),
    }
}

/// Splits the next whitespace-delimited token off a PNM/PFM header,
/// skipping `#` comments.
struct HeaderCursor<'a> {
    bytes: &'a [u8],
    pos: usize,
    format: &'static str,
}

impl<'a> HeaderCursor<'a> {
    fn new(bytes: &'a [u8], format: &'static str) -> Self {
        HeaderCursor { bytes, pos: 2, format }
    }

    fn malformed(&self, reason: impl Into<String>) -> Error {
        Error::MalformedHeader {
            format: self.format,
            reason: reason.into(),
        }
    }

    fn token(&mut self) -> Result<&'a str> {
        loop {
            match self.bytes.get(self.pos) {
                Some(b) if b.is_ascii_whitespace() => self.pos += 1,
                Some(b'#') => {
                    while let Some(&b) = self.bytes.get(self.pos) {
                        self.pos += 1;
                        if b == b'\n' {
                            break;
                        }
                    }
                }
                Some(_) => break,
                None => return Err(self.malformed("unexpected end of header")),
            }
        }
        let start = self.pos;
        while let Some(b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos]).map_err(|_| self.malformed("non-ASCII header"))
    }

    fn number<T: std::str::FromStr>(&mut self, what: &str) -> Result<T> {
        let tok = self.token()?;
        tok.parse()
            .map_err(|_| self.malformed(format!("invalid {what} '{tok}'")))
    }

    /// Consumes the single whitespace byte that terminates the header.
    fn payload(mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => {
                self.pos += 1;
                Ok(&self.bytes[self.pos..])
            }
            _ => Err(self.malformed("missing separator before payload")),
        }
    }
}

fn decode_pfm(bytes: &[u8]) -> Result<Image> {
    let channels = if &bytes[..2] == b"PF" { 3 } else { 1 };
    let mut cur = HeaderCursor::new(bytes, "PFM");
    let width: usize = cur.number("width")?;
    let height: usize = cur.number("height")?;
    let scale: f32 = cur.number("scale")?;
    if scale == 0.0 || !scale.is_finite() {
        return Err(cur.malformed(format!("invalid scale {scale}")));
    }
    let little_endian = scale < 0.0;
    let payload = cur.payload()?;
    let n = width * height * channels;
    if payload.len() < n * 4 {
        return Err(Error::TruncatedPayload {
            expected: n * 4,
            found: payload.len(),
        });
    }
    let mut data = vec![0.0; n];
    let plane = width * height;
    for (idx, chunk) in payload[..n * 4].chunks_exact(4).enumerate() {
        let raw = [chunk[0], chunk[1], chunk[2], chunk[3]];
        let v = if little_endian {
            f32::from_le_bytes(raw)
        } else {
            f32::from_be_bytes(raw)
        };
        let pixel = idx / channels;
        let c = idx % channels;
        let (file_row, j) = (pixel / width, pixel % width);
        let i = height - 1 - file_row;
        data[c * plane + i * width + j] = v as f64;
    }
    Image::from_planar(height, width, channels, data)
}

fn encode_pfm(img: &Image) -> Result<Vec<u8>> {
    let channels = img.channels();
    let magic = match channels {
        1 => "Pf",
        3 => "PF",
        _ => {
            return Err(Error::UnsupportedChannels {
                format: "PFM",
                channels,
            })
        }
    };
    let (h, w) = img.dims();
    let mut out = Vec::with_capacity(32 + h * w * channels * 4);
    write!(out, "{magic}\n{w} {h}\n-1.0\n").expect("write to Vec");
    for i in (0..h).rev() {
        for j in 0..w {
            for c in 0..channels {
                out.extend_from_slice(&(img.get(c, i, j) as f32).to_le_bytes());
            }
        }
    }
    Ok(out)
}

fn decode_pnm(bytes: &[u8]) -> Result<Image> {
    let channels = if &bytes[..2] == b"P6" { 3 } else { 1 };
    let mut cur = HeaderCursor::new(bytes, "PNM");
    let width: usize = cur.number("width")?;
    let height: usize = cur.number("height")?;
    let maxval: u32 = cur.number("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(cur.malformed(format!("unsupported maxval {maxval}")));
    }
    let payload = cur.payload()?;
    let n = width * height * channels;
    if payload.len() < n {
        return Err(Error::TruncatedPayload {
            expected: n,
            found: payload.len(),
        });
    }
    let plane = width * height;
    let mut data = vec![0.0; n];
    let scale = maxval as f64;
    for (idx, &b) in payload[..n].iter().enumerate() {
        let pixel = idx / channels;
        let c = idx % channels;
        data[c * plane + pixel] = (b as f64).min(scale) / scale;
    }
    Image::from_planar(height, width, channels, data)
}

pub fn quantize_u8(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}

fn encode_pnm(img: &Image, format: ImageFormat) -> Result<Vec<u8>> {
    let channels = img.channels();
    let magic = match (format, channels) {
        (ImageFormat::Pgm, 1) => "P5",
        (ImageFormat::Ppm, 3) => "P6",
        (ImageFormat::Pgm, _) => {
            return Err(Error::UnsupportedChannels {
                format: "PGM",
                channels,
            })
        }
        _ => {
            return Err(Error::UnsupportedChannels {
                format: "PPM",
                channels,
            })
        }
    };
    let (h, w) = img.dims();
    let mut out = Vec::with_capacity(32 + h * w * channels);
    write!(out, "{magic}\n{w} {h}\n255\n").expect("write to Vec");
    for i in 0..h {
        for j in 0..w {
            for c in 0..channels {
                out.push(quantize_u8(img.get(c, i, j)));
            }
        }
    }
    Ok(out)
}
