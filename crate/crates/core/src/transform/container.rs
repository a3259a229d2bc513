//! Flat binary containers for sinograms ("CRDN1") and volumes ("CRVL1").
//!
//! Layout: magic, `n` (u32), grid parameters, length-prefixed UTF-8 JSON metadata, then
//! little-endian f64 pairs `(re, im)` in row-major order.

use std::io::{Read, Write};
use std::sync::Arc;

use serde_json::{Map, Value};

use crate::numerics::{SGrid, Sinogram, SphereGrid};
use crate::transform::{VolumeGrid, VolumeSpec};
use crate::{Error, Result, C64};

pub const SINOGRAM_MAGIC: &[u8; 5] = b"CRDN1";
pub const VOLUME_MAGIC: &[u8; 5] = b"CRVL1";

fn put_u32<W: Write>(w: &mut W, v: u32) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn put_f64<W: Write>(w: &mut W, v: f64) -> Result<()> {
    Ok(w.write_all(&v.to_le_bytes())?)
}

fn get_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn get_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

fn put_meta<W: Write>(w: &mut W, meta: &Map<String, Value>) -> Result<()> {
    let bytes = serde_json::to_vec(meta)?;
    put_u32(w, u32::try_from(bytes.len()).map_err(|_| Error::Format("metadata too large".into()))?)?;
    Ok(w.write_all(&bytes)?)
}

fn get_meta<R: Read>(r: &mut R) -> Result<Map<String, Value>> {
    let len = get_u32(r)? as usize;
    let mut bytes = vec![0u8; len];
    r.read_exact(&mut bytes)?;
    match serde_json::from_slice(&bytes)? {
        Value::Object(m) => Ok(m),
        _ => Err(Error::Format("metadata is not a JSON object".into())),
    }
}

fn put_values<W: Write>(w: &mut W, values: &[C64]) -> Result<()> {
    for v in values {
        put_f64(w, v.re)?;
        put_f64(w, v.im)?;
    }
    Ok(())
}

fn get_values<R: Read>(r: &mut R, n: usize) -> Result<Vec<C64>> {
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let re = get_f64(r)?;
        let im = get_f64(r)?;
        out.push(C64::new(re, im));
    }
    Ok(out)
}

fn check_magic<R: Read>(r: &mut R, magic: &[u8; 5]) -> Result<()> {
    let mut m = [0u8; 5];
    r.read_exact(&mut m)?;
    if &m != magic {
        return Err(Error::Format(format!("bad magic {:?}, expected {:?}", String::from_utf8_lossy(&m), String::from_utf8_lossy(magic))));
    }
    if get_u32(r)? != 2 {
        return Err(Error::Format("only n = 2 containers are supported".into()));
    }
    Ok(())
}

pub fn write_sinogram<W: Write>(w: &mut W, s: &Sinogram) -> Result<()> {
    w.write_all(SINOGRAM_MAGIC)?;
    put_u32(w, 2)?;
    put_u32(w, s.sphere.n_eta() as u32)?;
    put_u32(w, s.sphere.n_theta() as u32)?;
    put_f64(w, s.sgrid.center().re)?;
    put_f64(w, s.sgrid.center().im)?;
    put_f64(w, s.sgrid.extent())?;
    put_u32(w, s.sgrid.count() as u32)?;
    put_u32(w, s.margin as u32)?;
    put_meta(w, &s.provenance)?;
    put_values(w, &s.values)
}

pub fn read_sinogram<R: Read>(r: &mut R) -> Result<Sinogram> {
    check_magic(r, SINOGRAM_MAGIC)?;
    let n_eta = get_u32(r)? as usize;
    let n_theta = get_u32(r)? as usize;
    let center = C64::new(get_f64(r)?, get_f64(r)?);
    let extent = get_f64(r)?;
    let count = get_u32(r)? as usize;
    let margin = get_u32(r)? as usize;
    let provenance = get_meta(r)?;
    let sphere = Arc::new(SphereGrid::new(n_eta, n_theta)?);
    let sgrid = SGrid::new(center, extent, count)?;
    let values = get_values(r, sphere.len() * sgrid.len())?;
    let s = Sinogram { sphere, sgrid, values, margin, provenance };
    s.check_finite("read_sinogram")?;
    Ok(s)
}

pub fn write_volume<W: Write>(w: &mut W, v: &VolumeGrid) -> Result<()> {
    w.write_all(VOLUME_MAGIC)?;
    put_u32(w, 2)?;
    put_f64(w, v.spec.extent)?;
    put_u32(w, v.spec.count as u32)?;
    put_f64(w, v.spec.mask_radius.unwrap_or(-1.0))?;
    put_meta(w, &v.provenance)?;
    put_values(w, &v.values)
}

pub fn read_volume<R: Read>(r: &mut R) -> Result<VolumeGrid> {
    check_magic(r, VOLUME_MAGIC)?;
    let extent = get_f64(r)?;
    let count = get_u32(r)? as usize;
    let mask = get_f64(r)?;
    let spec = VolumeSpec { extent, count, mask_radius: (mask > 0.0).then_some(mask) };
    spec.validate()?;
    let provenance = get_meta(r)?;
    let values = get_values(r, spec.len())?;
    Ok(VolumeGrid { spec, values, provenance })
}
