//! The `LRTR1` ray-data file: one JSON header line, then little-endian f64
//! samples ordered (direction, hyperplane node). Directions and frames are
//! rebuilt from the resolutions on load.

use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{build_sigma_grid_on, AngularResolution, RayData, TransformError};
use crate::grid::{Geometry, GridError};
use crate::multiplier::Signature;

pub const RAY_MAGIC: &str = "LRTR1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayHeader {
    pub magic: String,
    pub version: u32,
    pub n_prime: usize,
    pub n_dprime: usize,
    pub directions: usize,
    pub resolution_prime: usize,
    pub resolution_dprime: usize,
    pub plane_shape: Vec<usize>,
    pub plane_spacing: Vec<f64>,
    pub plane_origin: Vec<f64>,
    pub byte_order: String,
}

fn format_err(msg: impl Into<String>) -> TransformError {
    TransformError::Grid(GridError::Format(msg.into()))
}

fn io_err(e: std::io::Error) -> TransformError {
    TransformError::Grid(GridError::Io(e))
}

pub fn write_rays<W: Write>(data: &RayData, out: W) -> Result<(), TransformError> {
    let s = &data.sigma;
    let header = RayHeader {
        magic: RAY_MAGIC.into(),
        version: 1,
        n_prime: s.sig.n_prime(),
        n_dprime: s.sig.n_dprime(),
        directions: s.len(),
        resolution_prime: s.resolution.prime,
        resolution_dprime: s.resolution.dprime,
        plane_shape: s.plane.shape.clone(),
        plane_spacing: s.plane.spacing.clone(),
        plane_origin: s.plane.origin.clone(),
        byte_order: "LE".into(),
    };
    let mut w = BufWriter::new(out);
    serde_json::to_writer(&mut w, &header).map_err(|e| format_err(e.to_string()))?;
    w.write_all(b"\n").map_err(io_err)?;
    for v in &data.values {
        w.write_all(&v.to_le_bytes()).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

pub fn read_rays<R: Read>(input: R) -> Result<RayData, TransformError> {
    let mut r = BufReader::new(input);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line).map_err(io_err)?;
    let h: RayHeader = serde_json::from_slice(&line).map_err(|e| format_err(format!("header: {e}")))?;
    if h.magic != RAY_MAGIC {
        return Err(format_err(format!("unknown magic {:?}", h.magic)));
    }
    if h.version != 1 {
        return Err(format_err(format!("unsupported version {}", h.version)));
    }
    if h.byte_order != "LE" {
        return Err(format_err(format!("unsupported byte order {:?}", h.byte_order)));
    }
    let sig = Signature::new(h.n_prime, h.n_dprime).map_err(|e| format_err(e.to_string()))?;
    let plane = Geometry::new(h.plane_shape, h.plane_spacing, h.plane_origin)?;
    let res = AngularResolution {
        prime: h.resolution_prime,
        dprime: h.resolution_dprime,
    };
    let sigma = build_sigma_grid_on(sig, res, plane)?;
    if sigma.len() != h.directions {
        return Err(format_err(format!(
            "header lists {} directions, resolutions give {}",
            h.directions,
            sigma.len()
        )));
    }
    let n = sigma.len() * sigma.plane.len();
    let mut values = Vec::with_capacity(n);
    let mut buf = [0u8; 8];
    for _ in 0..n {
        r.read_exact(&mut buf)
            .map_err(|e| format_err(format!("payload truncated: {e}")))?;
        values.push(f64::from_le_bytes(buf));
    }
    let mut rest = [0u8; 1];
    if r.read(&mut rest).map_err(io_err)? != 0 {
        return Err(format_err("trailing bytes after payload"));
    }
    RayData::new(sigma, values)
}

pub fn save_rays(data: &RayData, path: &Path) -> Result<(), TransformError> {
    write_rays(data, std::fs::File::create(path).map_err(io_err)?)
}

pub fn load_rays(path: &Path) -> Result<RayData, TransformError> {
    read_rays(std::fs::File::open(path).map_err(io_err)?)
}
