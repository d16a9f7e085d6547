//! Grayscale image storage, binary PGM (P5) I/O, and block partitioning.
//!
//! Images are stored as raw 8-bit gray values (0 = black, 255 = white) in
//! row-major order. All downstream analysis operates on non-overlapping
//! square blocks; partial blocks at the right/bottom borders are discarded
//! so every block maps to a full pixel rectangle.

use thiserror::Error;

/// Errors raised by image decoding, construction, and partitioning.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    /// The PGM header is not a well-formed binary (P5) header.
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    /// The data section holds fewer pixel bytes than the header promises.
    #[error("truncated pixel data: expected {expected} bytes, found {actual}")]
    TruncatedData { expected: usize, actual: usize },
    /// The sample depth exceeds one byte per pixel.
    #[error("unsupported maxval {0}: only single-byte samples (maxval <= 255) are supported")]
    UnsupportedDepth(u32),
    /// Pixel buffer length does not match the stated dimensions.
    #[error("pixel count mismatch: {width}x{height} needs {expected} bytes, got {actual}")]
    PixelCountMismatch {
        width: u32,
        height: u32,
        expected: usize,
        actual: usize,
    },
    /// The image cannot hold even one analysis block.
    #[error("image {width}x{height} too small for block size {block_size}")]
    ImageTooSmall {
        width: u32,
        height: u32,
        block_size: u32,
    },
    /// Block size below the supported minimum of 4 px.
    #[error("invalid block size {0}: must be at least 4")]
    InvalidBlockSize(u32),
}

/// 8-bit grayscale image with row-major pixel storage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GrayImage {
    /// Builds an image from raw row-major pixels.
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::MalformedHeader(format!(
                "zero dimension {width}x{height}"
            )));
        }
        let expected = (width as usize)
            .checked_mul(height as usize)
            .ok_or_else(|| ImageError::MalformedHeader("dimension overflow".into()))?;
        if pixels.len() != expected {
            return Err(ImageError::PixelCountMismatch {
                width,
                height,
                expected,
                actual: pixels.len(),
            });
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    /// Raw pixels, row-major.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Pixel value at (x, y); panics when out of bounds.
    #[inline]
    pub fn get(&self, x: u32, y: u32) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    /// One image row as a slice.
    #[inline]
    pub fn row(&self, y: u32) -> &[u8] {
        let w = self.width as usize;
        let start = y as usize * w;
        &self.pixels[start..start + w]
    }
}

/// Non-overlapping block coverage of an image; border strips that do not
/// fill a whole block are excluded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockGrid {
    /// Side length of each square block, in pixels.
    pub block_size: u32,
    /// Number of blocks along x.
    pub nx: u32,
    /// Number of blocks along y.
    pub ny: u32,
}

impl BlockGrid {
    /// Total number of blocks.
    pub fn len(&self) -> usize {
        self.nx as usize * self.ny as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Top-left pixel coordinate of block (bx, by).
    #[inline]
    pub fn block_origin(&self, bx: u32, by: u32) -> (u32, u32) {
        debug_assert!(bx < self.nx && by < self.ny);
        (bx * self.block_size, by * self.block_size)
    }

    /// Geometric center of block (bx, by) in pixel coordinates.
    #[inline]
    pub fn block_center(&self, bx: u32, by: u32) -> (f64, f64) {
        let (x0, y0) = self.block_origin(bx, by);
        let half = f64::from(self.block_size) / 2.0;
        (f64::from(x0) + half, f64::from(y0) + half)
    }

    /// Iterates block indices in row-major order: (bx, by).
    pub fn indices(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let nx = self.nx;
        (0..self.ny).flat_map(move |by| (0..nx).map(move |bx| (bx, by)))
    }

    /// Flat row-major index of block (bx, by).
    #[inline]
    pub fn flat_index(&self, bx: u32, by: u32) -> usize {
        by as usize * self.nx as usize + bx as usize
    }
}

/// Splits an image into full non-overlapping blocks of `block_size` pixels.
pub fn block_partition(img: &GrayImage, block_size: u32) -> Result<BlockGrid, ImageError> {
    if block_size < 4 {
        return Err(ImageError::InvalidBlockSize(block_size));
    }
    if img.width() < block_size || img.height() < block_size {
        return Err(ImageError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            block_size,
        });
    }
    Ok(BlockGrid {
        block_size,
        nx: img.width() / block_size,
        ny: img.height() / block_size,
    })
}

/// Decodes a binary PGM (P5) stream. Header comments (`#` to end of line)
/// are skipped; maxval must be at most 255. Bytes beyond the pixel data are
/// ignored.
pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage, ImageError> {
    let mut pos = 0usize;
    let magic = read_header_token(bytes, &mut pos)
        .ok_or_else(|| ImageError::MalformedHeader("missing magic".into()))?;
    if magic != b"P5" {
        return Err(ImageError::MalformedHeader(format!(
            "bad magic {:?}, expected \"P5\"",
            String::from_utf8_lossy(magic)
        )));
    }
    let width = read_header_number(bytes, &mut pos, "width")?;
    let height = read_header_number(bytes, &mut pos, "height")?;
    let maxval = read_header_number(bytes, &mut pos, "maxval")?;
    if maxval > 255 {
        return Err(ImageError::UnsupportedDepth(maxval));
    }
    if maxval == 0 {
        return Err(ImageError::MalformedHeader("maxval 0".into()));
    }
    if width == 0 || height == 0 {
        return Err(ImageError::MalformedHeader(format!(
            "zero dimension {width}x{height}"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(ImageError::MalformedHeader(
                "missing whitespace before pixel data".into(),
            ))
        }
    }
    let expected = width as usize * height as usize;
    let data = &bytes[pos..];
    if data.len() < expected {
        return Err(ImageError::TruncatedData {
            expected,
            actual: data.len(),
        });
    }
    GrayImage::from_pixels(width, height, data[..expected].to_vec())
}

/// Encodes an image as canonical binary PGM: `P5\n<w> <h>\n255\n` + raw pixels.
pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.pixels());
    out
}

/// Skips whitespace and `#` comments, then returns the next header token.
fn read_header_token<'a>(bytes: &'a [u8], pos: &mut usize) -> Option<&'a [u8]> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    if *pos >= bytes.len() {
        return None;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
        *pos += 1;
    }
    Some(&bytes[start..*pos])
}

fn read_header_number(bytes: &[u8], pos: &mut usize, what: &str) -> Result<u32, ImageError> {
    let token = read_header_token(bytes, pos)
        .ok_or_else(|| ImageError::MalformedHeader(format!("missing {what}")))?;
    std::str::from_utf8(token)
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .ok_or_else(|| {
            ImageError::MalformedHeader(format!(
                "bad {what} token {:?}",
                String::from_utf8_lossy(token)
            ))
        })
}
