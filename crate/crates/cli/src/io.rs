//! Binary field dumps and trajectory persistence.
//!
//! Field dump layout: 16-byte magic `LERAYFLOW\0FIELD\0`, `u32 D`, `u32 N`,
//! `f64 L`, `u8` representation (0 physical, 1 spectral), then `N^D`
//! little-endian `f64` samples (physical) or `2 N^D` interleaved re/im
//! (spectral), row-major with axis 1 slowest.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use lerayflow_core::{Field, Grid, Representation, VectorField};
use num_complex::Complex64;

use crate::{CliError, CliResult};

pub const MAGIC: &[u8; 16] = b"LERAYFLOW\0FIELD\0";

pub fn write_field(path: &Path, field: &Field) -> CliResult<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    let grid = field.grid();
    w.write_all(&(grid.dim() as u32).to_le_bytes())?;
    w.write_all(&(grid.points_per_axis() as u32).to_le_bytes())?;
    w.write_all(&grid.box_length().to_le_bytes())?;
    match field.representation() {
        Representation::Physical => {
            w.write_all(&[0u8])?;
            for v in field.values() {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        Representation::Spectral => {
            w.write_all(&[1u8])?;
            for c in field.coeffs() {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
    }
    Ok(())
}

fn read_exact_f64(r: &mut impl Read) -> CliResult<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)?;
    Ok(f64::from_le_bytes(buf))
}

pub fn read_field(path: &Path) -> CliResult<Field> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 16];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(CliError::Io(format!("{}: bad magic", path.display())));
    }
    let mut b4 = [0u8; 4];
    r.read_exact(&mut b4)?;
    let d = u32::from_le_bytes(b4) as usize;
    r.read_exact(&mut b4)?;
    let n = u32::from_le_bytes(b4) as usize;
    let l = read_exact_f64(&mut r)?;
    let mut repr = [0u8; 1];
    r.read_exact(&mut repr)?;
    let grid = Grid::new(d, n, l).map_err(|e| CliError::Io(e.to_string()))?;
    let total = grid.node_count();
    match repr[0] {
        0 => {
            let mut values = Vec::with_capacity(total);
            for _ in 0..total {
                values.push(read_exact_f64(&mut r)?);
            }
            Field::from_values(grid, values).map_err(|e| CliError::Io(e.to_string()))
        }
        1 => {
            let mut coeffs = Vec::with_capacity(total);
            for _ in 0..total {
                let re = read_exact_f64(&mut r)?;
                let im = read_exact_f64(&mut r)?;
                coeffs.push(Complex64::new(re, im));
            }
            Field::from_spectral(grid, coeffs).map_err(|e| CliError::Io(e.to_string()))
        }
        other => Err(CliError::Io(format!("unknown representation byte {other}"))),
    }
}

/// Write every component of every state; returns the artifact file names.
pub fn write_trajectory_states(
    dir: &Path,
    prefix: &str,
    states: &[VectorField],
) -> CliResult<Vec<String>> {
    let mut files = Vec::new();
    for (k, state) in states.iter().enumerate() {
        for (c, comp) in state.components().iter().enumerate() {
            let name = format!("{prefix}_{k:04}_c{c}.fld");
            write_field(&dir.join(&name), comp)?;
            files.push(name);
        }
    }
    Ok(files)
}
