//! Binary PGM (P5) writer.
//!
//! The format is pinned byte for byte: header `P5\n{width} {height}\n255\n`
//! followed by one row-major byte per pixel. No external image crates; the
//! whole point is a bit-exact, dependency-free artifact.

use std::io::{self, Write};

/// Write an 8-bit grayscale image. `pixels` is row-major, top row first.
pub fn write_pgm<W: Write>(w: &mut W, width: usize, height: usize, pixels: &[u8]) -> io::Result<()> {
    if pixels.len() != width * height {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{} pixels for a {width}x{height} image", pixels.len()),
        ));
    }
    write!(w, "P5\n{width} {height}\n255\n")?;
    w.write_all(pixels)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_payload_are_exact() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, 10, 10, &[128u8; 100]).unwrap();
        let expected_header = b"P5\n10 10\n255\n";
        assert_eq!(&buf[..expected_header.len()], expected_header);
        assert_eq!(buf.len(), expected_header.len() + 100);
    }

    #[test]
    fn size_mismatch_rejected() {
        let mut buf = Vec::new();
        assert!(write_pgm(&mut buf, 3, 3, &[0u8; 8]).is_err());
    }
}
