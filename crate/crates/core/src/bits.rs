//! Big-endian bitstring helpers: `"0110"` is the integer 6.

use crate::error::{Error, Result};

pub fn parse(bits: &str) -> Result<usize> {
    if bits.len() > usize::BITS as usize - 1 {
        return Err(Error::InvalidBitstring(bits.to_string()));
    }
    bits.chars().try_fold(0usize, |acc, ch| match ch {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(Error::InvalidBitstring(bits.to_string())),
    })
}

/// Parses `bits` and checks it has exactly `width` characters.
pub fn parse_width(bits: &str, width: usize) -> Result<usize> {
    if bits.len() != width {
        return Err(Error::InvalidBitstring(format!("{bits} (expected {width} bits)")));
    }
    parse(bits)
}

pub fn format(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|k| if (value >> k) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// The all-ones string `1^n` as an integer.
pub fn ones(width: usize) -> usize {
    (1usize << width) - 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        assert_eq!(parse("0110").unwrap(), 6);
        assert_eq!(format(6, 4), "0110");
        assert_eq!(format(0, 0), "");
        assert_eq!(parse("").unwrap(), 0);
        assert!(parse("01a").is_err());
        assert!(parse_width("01", 3).is_err());
        assert_eq!(ones(3), 7);
    }
}
