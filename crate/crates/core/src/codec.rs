//! File codecs: PGM (P5) and PNG images, PBM (P4) bitmaps, and the EMAP float raster.
//!
//! EMAP layout: the ASCII line `EMAP <width> <height>\n`, then `width × height`
//! little-endian IEEE-754 float32 values in row-major order, and nothing else.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::raster::{Bitmap, ErrorMap, Image, Raster};
use crate::scalar::Scalar;

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn malformed(path: &Path, reason: impl Into<String>) -> Error {
    Error::MalformedHeader {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Byte quantization used on save: `round(v × 255)` with halves rounded up.
#[inline]
pub fn quantize<T: Scalar>(v: T) -> u8 {
    let scaled = (v.as_f64() * 255.0 + 0.5).floor();
    scaled.clamp(0.0, 255.0) as u8
}

/// Parsed netpbm header fields and the offset of the first payload byte.
struct PnmHeader {
    fields: Vec<usize>,
    payload_start: usize,
}

/// Reads `count` decimal fields after a two-byte magic, skipping `#` comments.
fn parse_pnm_header(bytes: &[u8], magic: &[u8; 2], count: usize, path: &Path) -> Result<PnmHeader> {
    if bytes.len() < 2 || &bytes[..2] != magic {
        return Err(malformed(
            path,
            format!("expected magic {:?}", String::from_utf8_lossy(magic)),
        ));
    }
    let mut pos = 2;
    let mut fields = Vec::with_capacity(count);
    while fields.len() < count {
        // whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => return Err(malformed(path, "header ends early")),
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(|b| b.is_ascii_digit()) {
            pos += 1;
        }
        if start == pos {
            return Err(malformed(path, format!("expected a number at byte {start}")));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        let value = text
            .parse()
            .map_err(|_| malformed(path, format!("number {text} out of range")))?;
        fields.push(value);
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => Ok(PnmHeader {
            fields,
            payload_start: pos + 1,
        }),
        _ => Err(malformed(path, "missing whitespace before payload")),
    }
}

pub fn decode_pgm<T: Scalar>(bytes: &[u8], path: &Path) -> Result<Image<T>> {
    let header = parse_pnm_header(bytes, b"P5", 3, path)?;
    let (w, h, maxval) = (header.fields[0], header.fields[1], header.fields[2]);
    if maxval != 255 {
        return Err(Error::Unsupported {
            path: path.to_path_buf(),
            reason: format!("maxval {maxval}; only 8-bit (255) grayscale is supported"),
        });
    }
    let payload = &bytes[header.payload_start..];
    let expected = w * h;
    if payload.len() != expected {
        return Err(Error::PayloadSize {
            path: path.to_path_buf(),
            expected,
            found: payload.len(),
        });
    }
    let scale = T::lit(255.0);
    Image::new(w, h, payload.iter().map(|&p| T::lit(p as f64) / scale).collect())
}

pub fn encode_pgm<T: Scalar>(img: &Image<T>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.values().iter().map(|&v| quantize(v)));
    out
}

fn decode_png<T: Scalar>(bytes: &[u8], path: &Path) -> Result<Image<T>> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(|e| malformed(path, e.to_string()))?;
    let info = reader.info();
    if info.color_type != png::ColorType::Grayscale || info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Unsupported {
            path: path.to_path_buf(),
            reason: format!(
                "{:?} at {:?}; only 8-bit grayscale is supported",
                info.color_type, info.bit_depth
            ),
        });
    }
    let (w, h) = (info.width as usize, info.height as usize);
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| malformed(path, "image too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader
        .next_frame(&mut buf)
        .map_err(|e| malformed(path, e.to_string()))?;
    let scale = T::lit(255.0);
    let mut data = Vec::with_capacity(w * h);
    for row in buf[..frame.buffer_size()].chunks(frame.line_size).take(h) {
        data.extend(row[..w].iter().map(|&p| T::lit(p as f64) / scale));
    }
    Image::new(w, h, data)
}

fn encode_png<T: Scalar>(img: &Image<T>, path: &Path) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, img.width() as u32, img.height() as u32);
        enc.set_color(png::ColorType::Grayscale);
        enc.set_depth(png::BitDepth::Eight);
        let bytes: Vec<u8> = img.values().iter().map(|&v| quantize(v)).collect();
        let io_err = |e: png::EncodingError| Error::Io {
            path: path.to_path_buf(),
            source: std::io::Error::other(e),
        };
        let mut writer = enc.write_header().map_err(io_err)?;
        writer.write_image_data(&bytes).map_err(io_err)?;
    }
    Ok(out)
}

/// Loads an 8-bit grayscale PGM (P5) or PNG; byte `p` becomes `p / 255`.
///
/// The format is chosen by the `.png` extension, anything else is parsed as PGM.
pub fn load_image<T: Scalar>(path: impl AsRef<Path>) -> Result<Image<T>> {
    let path = path.as_ref();
    let bytes = read_bytes(path)?;
    if is_png(path) {
        decode_png(&bytes, path)
    } else {
        decode_pgm(&bytes, path)
    }
}

/// Writes `round(v × 255)` bytes as PNG for a `.png` extension, PGM (P5) otherwise.
pub fn save_image<T: Scalar>(img: &Image<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = if is_png(path) {
        encode_png(img, path)?
    } else {
        encode_pgm(img)
    };
    write_bytes(path, &bytes)
}

pub fn encode_pbm(b: &Bitmap) -> Vec<u8> {
    let (w, h) = b.dims();
    let stride = w.div_ceil(8);
    let mut out = format!("P4\n{w} {h}\n").into_bytes();
    let start = out.len();
    out.resize(start + stride * h, 0);
    for r in 0..h {
        for c in 0..w {
            if b.get(r, c) {
                out[start + r * stride + c / 8] |= 0x80 >> (c % 8);
            }
        }
    }
    out
}

pub fn decode_pbm(bytes: &[u8], path: &Path) -> Result<Bitmap> {
    let header = parse_pnm_header(bytes, b"P4", 2, path)?;
    let (w, h) = (header.fields[0], header.fields[1]);
    let stride = w.div_ceil(8);
    let payload = &bytes[header.payload_start..];
    if payload.len() != stride * h {
        return Err(Error::PayloadSize {
            path: path.to_path_buf(),
            expected: stride * h,
            found: payload.len(),
        });
    }
    let mut bits = Vec::with_capacity(w * h);
    for row in payload.chunks(stride.max(1)).take(h) {
        bits.extend((0..w).map(|c| row[c / 8] & (0x80 >> (c % 8)) != 0));
    }
    Bitmap::new(w, h, bits)
}

/// Writes a PBM (P4) bitmap; a set bit means "rescan this pixel". Pad bits are 0.
pub fn bitmap_to_pbm(b: &Bitmap, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_pbm(b))
}

pub fn pbm_to_bitmap(path: impl AsRef<Path>) -> Result<Bitmap> {
    let path = path.as_ref();
    decode_pbm(&read_bytes(path)?, path)
}

pub fn encode_emap<T: Scalar>(emap: &ErrorMap<T>) -> Vec<u8> {
    let mut out = format!("EMAP {} {}\n", emap.width(), emap.height()).into_bytes();
    out.reserve(emap.len() * 4);
    for &v in emap.values() {
        out.extend_from_slice(&(v.as_f64() as f32).to_le_bytes());
    }
    out
}

pub fn decode_emap<T: Scalar>(bytes: &[u8], path: &Path) -> Result<ErrorMap<T>> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| malformed(path, "missing EMAP header line"))?;
    let line = std::str::from_utf8(&bytes[..newline]).map_err(|_| malformed(path, "header is not ASCII"))?;
    let mut parts = line.split(' ');
    if parts.next() != Some("EMAP") {
        return Err(malformed(path, "bad magic, expected EMAP"));
    }
    let mut dim = |name: &str| -> Result<usize> {
        parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| malformed(path, format!("missing or invalid {name}")))
    };
    let w = dim("width")?;
    let h = dim("height")?;
    if parts.next().is_some() {
        return Err(malformed(path, "unexpected fields after height"));
    }
    let payload = &bytes[newline + 1..];
    let expected = w * h * 4;
    if payload.len() != expected {
        return Err(Error::PayloadSize {
            path: path.to_path_buf(),
            expected,
            found: payload.len(),
        });
    }
    let mut data = Vec::with_capacity(w * h);
    for (i, chunk) in payload.chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().expect("4-byte chunk"));
        if v.is_nan() {
            return Err(Error::InvalidRaster(format!(
                "{}: NaN at pixel {i}",
                path.display()
            )));
        }
        data.push(T::lit(v as f64));
    }
    ErrorMap::new(w, h, data)
}

pub fn read_emap<T: Scalar>(path: impl AsRef<Path>) -> Result<ErrorMap<T>> {
    let path = path.as_ref();
    decode_emap(&read_bytes(path)?, path)
}

pub fn write_emap<T: Scalar>(emap: &ErrorMap<T>, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), &encode_emap(emap))
}
