//! `PSFIELD v1` persistence: one ASCII header line
//! `PSFIELD v1 nx ny ncomp x0 x1 y0 y1\n` followed by `nx*ny*ncomp`
//! little-endian binary64 values, j outer, i inner, component innermost.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::grid::{Extent, Grid, GridFunction};

const MAGIC: &str = "PSFIELD";
const VERSION: &str = "v1";

pub fn write_to<W: Write>(f: &GridFunction, mut out: W) -> std::io::Result<()> {
    let g = f.grid();
    let e = g.extent;
    // `{:?}` on f64 prints the shortest string that round-trips exactly
    writeln!(
        out,
        "{MAGIC} {VERSION} {} {} {} {:?} {:?} {:?} {:?}",
        g.nx,
        g.ny,
        f.ncomp(),
        e.x0,
        e.x1,
        e.y0,
        e.y1
    )?;
    let mut buf = Vec::with_capacity(f.values().len() * 8);
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    out.write_all(&buf)
}

pub fn read_from<R: BufRead>(mut input: R) -> Result<GridFunction> {
    let mut header = String::new();
    input
        .read_line(&mut header)
        .map_err(|e| Error::Format(format!("reading header: {e}")))?;
    let tokens: Vec<&str> = header.trim_end_matches('\n').split(' ').collect();
    if tokens.len() != 9 || tokens[0] != MAGIC || tokens[1] != VERSION {
        return Err(Error::Format(format!("bad PSFIELD header {header:?}")));
    }
    let count = |s: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Format(format!("bad count {s:?}")))
    };
    let real = |s: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Format(format!("bad coordinate {s:?}")))
    };
    let (nx, ny, ncomp) = (count(tokens[2])?, count(tokens[3])?, count(tokens[4])?);
    let extent = Extent::new(real(tokens[5])?, real(tokens[6])?, real(tokens[7])?, real(tokens[8])?);
    let grid = Grid::new(nx, ny, extent)?;
    let n = nx * ny * ncomp;
    let mut bytes = vec![0u8; n * 8];
    input
        .read_exact(&mut bytes)
        .map_err(|e| Error::Format(format!("payload shorter than {n} values: {e}")))?;
    let mut extra = [0u8; 1];
    if input.read(&mut extra).map_err(|e| Error::Format(e.to_string()))? != 0 {
        return Err(Error::Format("trailing bytes after payload".into()));
    }
    let values = bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridFunction::from_values(grid, ncomp, values)
}

pub fn save(f: &GridFunction, path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_to(f, &mut buf).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load(path: &Path) -> Result<GridFunction> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_from(std::io::BufReader::new(file))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn header_layout_is_exact() {
        let g = Grid::new(2, 1, Extent::new(0.0, 1.0, -0.5, 0.25)).unwrap();
        let f = GridFunction::from_values(g, 1, vec![1.0, -2.0]).unwrap();
        let mut buf = Vec::new();
        write_to(&f, &mut buf).unwrap();
        let header = b"PSFIELD v1 2 1 1 0.0 1.0 -0.5 0.25\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..header.len() + 8], &1.0f64.to_le_bytes());
        assert_eq!(buf.len(), header.len() + 16);
    }

    #[test]
    fn rejects_truncated_and_garbage() {
        assert!(read_from(&b"PSFIELD v2 1 1 1 0 1 0 1\n"[..]).is_err());
        assert!(read_from(&b"PSFIELD v1 1 1 1 0 1 0 1\n\x00\x00"[..]).is_err());
        let mut long = b"PSFIELD v1 1 1 1 0 1 0 1\n".to_vec();
        long.extend_from_slice(&[0u8; 9]);
        assert!(read_from(&long[..]).is_err());
    }

    proptest! {
        #[test]
        fn round_trip_is_bit_exact(nx in 1usize..5, ny in 1usize..5, nc in 1usize..5, x0 in -3.0f64..3.0, w in 0.1f64..5.0, seed in any::<u64>()) {
            let g = Grid::new(nx, ny, Extent::new(x0, x0 + w, x0 * 0.3, x0 * 0.3 + w / 3.0)).unwrap();
            let mut s = seed;
            let vals: Vec<f64> = (0..nx * ny * nc).map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                f64::from_bits((s >> 2) | 0x3000_0000_0000_0000) * if s & 1 == 0 { 1.0 } else { -1.0 }
            }).collect();
            let f = GridFunction::from_values(g, nc, vals).unwrap();
            let mut buf = Vec::new();
            write_to(&f, &mut buf).unwrap();
            let back = read_from(&buf[..]).unwrap();
            prop_assert_eq!(back.grid(), f.grid());
            prop_assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
        }
    }
}
