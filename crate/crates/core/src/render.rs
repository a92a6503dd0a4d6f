//! Text and PBM (P1) output for spacetime windows.
//!
//! Time flows upward: the first line of output is the latest row.

use thiserror::Error;

use crate::ca::Window;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    /// `.` for 0 and `#` for 1, one row per line.
    Text,
    /// Plain PBM: `P1`, `width height`, then one line of digits per row.
    Pbm,
}

pub fn render(window: &Window, format: Format) -> Vec<u8> {
    let mut out = Vec::with_capacity((window.width() + 1) * (window.rows() as usize + 1) + 16);
    let (zero, one) = match format {
        Format::Text => (b'.', b'#'),
        Format::Pbm => {
            out.extend_from_slice(
                format!("P1\n{} {}\n", window.width(), window.rows() + 1).as_bytes(),
            );
            (b'0', b'1')
        }
    };
    for y in (0..=window.rows()).rev() {
        out.extend(window.row(y).iter().map(|&b| if b { one } else { zero }));
        out.push(b'\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbmError {
    #[error("missing P1 magic number")]
    BadMagic,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("unexpected byte {0:?} in raster")]
    BadPixel(char),
    #[error("raster holds {found} pixels, expected {expected}")]
    WrongSize { found: usize, expected: usize },
}

/// A decoded P1 image, rows top first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bitmap {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<bool>,
}

impl Bitmap {
    /// Reinterprets the image as a window whose leftmost column is `x0`,
    /// undoing the upward time orientation.
    pub fn into_window(self, x0: i64) -> Window {
        let rows = self.height.saturating_sub(1) as u32;
        let mut cells = Vec::with_capacity(self.pixels.len());
        for chunk in self.pixels.chunks(self.width).rev() {
            cells.extend_from_slice(chunk);
        }
        Window::from_cells(x0, x0 + self.width as i64 - 1, rows, cells).expect("non-empty bitmap")
    }
}

/// Reads plain PBM, accepting comments and optional whitespace between pixels.
pub fn parse_pbm(bytes: &[u8]) -> Result<Bitmap, PbmError> {
    let text = String::from_utf8_lossy(bytes);
    let mut tokens = Vec::new();
    let mut raster_start = None;
    // Header: magic, width, height, separated by whitespace or comments.
    let mut chars = text.char_indices().peekable();
    while tokens.len() < 3 {
        match chars.peek() {
            None => break,
            Some(&(_, c)) if c.is_ascii_whitespace() => {
                chars.next();
            }
            Some(&(_, '#')) => {
                for (_, c) in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            Some(_) => {
                let mut tok = String::new();
                while let Some(&(i, c)) = chars.peek() {
                    if c.is_ascii_whitespace() || c == '#' {
                        break;
                    }
                    tok.push(c);
                    chars.next();
                    raster_start = Some(i + c.len_utf8());
                }
                tokens.push(tok);
            }
        }
    }
    if tokens.first().map(String::as_str) != Some("P1") {
        return Err(PbmError::BadMagic);
    }
    if tokens.len() < 3 {
        return Err(PbmError::BadHeader("missing dimensions".into()));
    }
    let width: usize = tokens[1]
        .parse()
        .map_err(|_| PbmError::BadHeader(tokens[1].clone()))?;
    let height: usize = tokens[2]
        .parse()
        .map_err(|_| PbmError::BadHeader(tokens[2].clone()))?;
    if width == 0 || height == 0 {
        return Err(PbmError::BadHeader(format!("{width}x{height}")));
    }
    let mut pixels = Vec::with_capacity(width * height);
    let mut in_comment = false;
    for c in text[raster_start.unwrap_or(text.len())..].chars() {
        match c {
            '\n' if in_comment => in_comment = false,
            _ if in_comment => {}
            '#' => in_comment = true,
            '0' => pixels.push(false),
            '1' => pixels.push(true),
            c if c.is_ascii_whitespace() => {}
            other => return Err(PbmError::BadPixel(other)),
        }
    }
    if pixels.len() != width * height {
        return Err(PbmError::WrongSize {
            found: pixels.len(),
            expected: width * height,
        });
    }
    Ok(Bitmap {
        width,
        height,
        pixels,
    })
}
