use std::io::{self, Read, Write};

use crate::engine::field::FieldMap;

pub const FIELD_CSV_HEADER: &str = "x_m,y_m,z_m,power_density_W_per_m2";

/// One row per sample in grid order, `\n` line endings, fixed formatting so
/// identical maps serialise to identical bytes.
pub fn write_field_csv<W: Write>(map: &FieldMap, mut out: W) -> io::Result<()> {
    writeln!(out, "{FIELD_CSV_HEADER}")?;
    for (p, d) in map.grid.points().iter().zip(&map.power_density) {
        writeln!(out, "{:.6},{:.6},{:.6},{:.9e}", p.x, p.y, p.z, d)?;
    }
    Ok(())
}

/// Binary density dump: two little-endian `u64` dims (rows, columns) followed
/// by row-major little-endian `f64` densities.
pub fn write_field_binary<W: Write>(map: &FieldMap, mut out: W) -> io::Result<()> {
    let (nu, nv) = map.grid.dims();
    out.write_all(&(nv as u64).to_le_bytes())?;
    out.write_all(&(nu as u64).to_le_bytes())?;
    for d in &map.power_density {
        out.write_all(&d.to_le_bytes())?;
    }
    Ok(())
}

/// Reads a dump written by [`write_field_binary`]: `(rows, columns, data)`.
pub fn read_field_binary<R: Read>(mut input: R) -> io::Result<(usize, usize, Vec<f64>)> {
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    let count = rows
        .checked_mul(cols)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "grid dims overflow"))?;
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        input.read_exact(&mut word)?;
        data.push(f64::from_le_bytes(word));
    }
    Ok((rows, cols, data))
}
