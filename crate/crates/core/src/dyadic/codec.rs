//! Line-oriented text format for complexes.
//!
//! ```text
//! DYCX 1
//! level <S>
//! count <N>
//! a b c        (N lines, canonical order)
//! ```
//!
//! Complexes with cubes outside `K₀` (translated copies) use the header
//! `DYCX 1 extended`; plain `DYCX 1` files reject out-of-range coordinates.

use std::fmt::Write as _;

use super::{CubeId, DyadicComplex, DyadicError};

pub const MAGIC: &str = "DYCX 1";
pub const MAGIC_EXTENDED: &str = "DYCX 1 extended";

pub fn encode(x: &DyadicComplex) -> String {
    let mut out = String::with_capacity(32 + 24 * x.len());
    let magic = if x.is_within_unit_cube() {
        MAGIC
    } else {
        MAGIC_EXTENDED
    };
    let _ = writeln!(out, "{magic}");
    let _ = writeln!(out, "level {}", x.level());
    let _ = writeln!(out, "count {}", x.len());
    for [a, b, c] in x.coords() {
        let _ = writeln!(out, "{a} {b} {c}");
    }
    out
}

pub fn decode(text: &str) -> Result<DyadicComplex, DyadicError> {
    let mut lines = text.lines().enumerate();
    let err = |line: usize, msg: &str| DyadicError::Decode {
        line: line + 1,
        msg: msg.to_string(),
    };

    let (n, magic) = lines.next().ok_or_else(|| err(0, "missing header"))?;
    let extended = match magic.trim_end() {
        MAGIC => false,
        MAGIC_EXTENDED => true,
        _ => return Err(err(n, "bad magic")),
    };
    let level: u32 = header_value(lines.next(), "level").map_err(|(l, m)| err(l, m))?;
    let count: usize = header_value(lines.next(), "count").map_err(|(l, m)| err(l, m))?;

    let mut cubes = Vec::with_capacity(count.min(1 << 24));
    for (n, line) in lines.by_ref() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(err(n, "expected three coordinates"));
        }
        let mut c = [0i64; 3];
        for (slot, p) in c.iter_mut().zip(&parts) {
            *slot = p.parse().map_err(|_| err(n, "bad coordinate"))?;
        }
        if !extended {
            CubeId::new(level, c)?;
        }
        if let Some(prev) = cubes.last() {
            if *prev >= c {
                return Err(err(
                    n,
                    if *prev == c {
                        "duplicate cube"
                    } else {
                        "cubes not in canonical order"
                    },
                ));
            }
        }
        cubes.push(c);
    }
    if cubes.len() != count {
        return Err(err(3, "count does not match number of cube lines"));
    }
    DyadicComplex::from_sorted(level, cubes)
}

fn header_value<T: std::str::FromStr>(
    line: Option<(usize, &str)>,
    key: &'static str,
) -> Result<T, (usize, &'static str)> {
    let (n, line) = line.ok_or((0, "truncated header"))?;
    let mut parts = line.split_whitespace();
    if parts.next() != Some(key) {
        return Err((n, "unexpected header key"));
    }
    let v = parts.next().ok_or((n, "missing header value"))?;
    if parts.next().is_some() {
        return Err((n, "trailing header tokens"));
    }
    v.parse().map_err(|_| (n, "bad header value"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_is_header_only() {
        let text = encode(&DyadicComplex::empty(0));
        assert_eq!(text, "DYCX 1\nlevel 0\ncount 0\n");
        assert_eq!(decode(&text).unwrap(), DyadicComplex::empty(0));
    }

    #[test]
    fn round_trip_small() {
        let x = DyadicComplex::from_coords(2, [[3, 0, 1], [0, 0, 0], [1, 2, 3]]).unwrap();
        let text = encode(&x);
        assert_eq!(text, "DYCX 1\nlevel 2\ncount 3\n0 0 0\n1 2 3\n3 0 1\n");
        assert_eq!(decode(&text).unwrap(), x);
    }

    #[test]
    fn extended_round_trip() {
        let x = DyadicComplex::from_coords(1, [[2, 0, 0], [0, 1, 1]]).unwrap();
        let text = encode(&x);
        assert!(text.starts_with("DYCX 1 extended\n"));
        assert_eq!(decode(&text).unwrap(), x);
    }

    #[test]
    fn rejects_malformed() {
        assert!(decode("").is_err());
        assert!(decode("DYCX 2\nlevel 0\ncount 0\n").is_err());
        assert!(decode("DYCX 1\nlevel x\ncount 0\n").is_err());
        assert!(decode("DYCX 1\nlevel 1\ncount 2\n0 0 0\n0 0 0\n").is_err());
        assert!(decode("DYCX 1\nlevel 1\ncount 2\n0 0 1\n0 0 0\n").is_err());
        assert!(decode("DYCX 1\nlevel 1\ncount 1\n0 0 2\n").is_err());
        assert!(decode("DYCX 1\nlevel 1\ncount 2\n0 0 0\n").is_err());
        assert!(decode("DYCX 1\nlevel 1\ncount 1\n0 0\n").is_err());
    }
}
