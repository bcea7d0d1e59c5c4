//! The `LRTG1` grid file: one JSON header line, then little-endian samples
//! in row-major order (complex values as `(re, im)` pairs).

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Geometry, GridError, GridFunction, GridValues};
use crate::multiplier::Signature;

pub const GRID_MAGIC: &str = "LRTG1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub magic: String,
    pub version: u32,
    pub n_prime: usize,
    pub n_dprime: usize,
    pub shape: Vec<usize>,
    pub spacing: Vec<f64>,
    pub origin: Vec<f64>,
    pub dtype: String,
    pub byte_order: String,
}

pub fn write_grid<W: Write>(f: &GridFunction, out: W) -> Result<(), GridError> {
    let mut w = BufWriter::new(out);
    let header = GridHeader {
        magic: GRID_MAGIC.into(),
        version: 1,
        n_prime: f.sig.n_prime(),
        n_dprime: f.sig.n_dprime(),
        shape: f.geom.shape.clone(),
        spacing: f.geom.spacing.clone(),
        origin: f.geom.origin.clone(),
        dtype: match f.values {
            GridValues::Real(_) => "f64".into(),
            GridValues::Complex(_) => "c128".into(),
        },
        byte_order: "LE".into(),
    };
    serde_json::to_writer(&mut w, &header).map_err(|e| GridError::Format(e.to_string()))?;
    w.write_all(b"\n")?;
    match &f.values {
        GridValues::Real(v) => {
            for x in v {
                w.write_all(&x.to_le_bytes())?;
            }
        }
        GridValues::Complex(v) => {
            for c in v {
                w.write_all(&c.re.to_le_bytes())?;
                w.write_all(&c.im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_grid<R: Read>(input: R) -> Result<GridFunction, GridError> {
    let mut r = BufReader::new(input);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    let header: GridHeader =
        serde_json::from_slice(&line).map_err(|e| GridError::Format(format!("header: {e}")))?;
    if header.magic != GRID_MAGIC {
        return Err(GridError::Format(format!("unknown magic {:?}", header.magic)));
    }
    if header.version != 1 {
        return Err(GridError::Format(format!("unsupported version {}", header.version)));
    }
    if header.byte_order != "LE" {
        return Err(GridError::Format(format!("unsupported byte order {:?}", header.byte_order)));
    }
    let sig = Signature::new(header.n_prime, header.n_dprime)
        .map_err(|e| GridError::Format(e.to_string()))?;
    let geom = Geometry::new(header.shape, header.spacing, header.origin)?;
    let n = geom.len();
    let mut buf = [0u8; 8];
    let mut next = |r: &mut BufReader<R>| -> Result<f64, GridError> {
        r.read_exact(&mut buf)
            .map_err(|e| GridError::Format(format!("payload truncated: {e}")))?;
        Ok(f64::from_le_bytes(buf))
    };
    let values = match header.dtype.as_str() {
        "f64" => GridValues::Real((0..n).map(|_| next(&mut r)).collect::<Result<_, _>>()?),
        "c128" => GridValues::Complex(
            (0..n)
                .map(|_| Ok(Complex64::new(next(&mut r)?, next(&mut r)?)))
                .collect::<Result<_, GridError>>()?,
        ),
        other => return Err(GridError::Format(format!("unknown dtype {other:?}"))),
    };
    let mut rest = [0u8; 1];
    if r.read(&mut rest)? != 0 {
        return Err(GridError::Format("trailing bytes after payload".into()));
    }
    GridFunction::new(sig, geom, values)
}

pub fn save_grid(f: &GridFunction, path: &Path) -> Result<(), GridError> {
    write_grid(f, std::fs::File::create(path)?)
}

pub fn load_grid(path: &Path) -> Result<GridFunction, GridError> {
    read_grid(std::fs::File::open(path)?)
}
