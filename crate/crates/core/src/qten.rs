//! QTEN binary tensor files.
//!
//! Layout (all little-endian):
//!
//! | bytes        | content                                  |
//! |--------------|------------------------------------------|
//! | 4            | magic `b"QTEN"`                          |
//! | 4            | `u32` version, currently 1               |
//! | 4            | `u32` order N                            |
//! | 8 N          | `u64` dims                               |
//! | 4 × 8 ΠI     | `f64` planes Q0, Q1, Q2, Q3, column-major |

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::array::QuaternionArray;
use crate::error::{Error, Result};
use crate::tensor::QTensor;

pub const MAGIC: &[u8; 4] = b"QTEN";
pub const VERSION: u32 = 1;

pub fn write_qten<W: Write>(mut w: W, t: &QTensor) -> Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(t.order() as u32).to_le_bytes())?;
    for &d in t.dims() {
        w.write_all(&(d as u64).to_le_bytes())?;
    }
    for plane in t.planes() {
        for v in plane {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_qten<R: Read>(mut r: R) -> Result<QTensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(&mut r)?;
    if version != VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let order = read_u32(&mut r)? as usize;
    let mut dims = Vec::with_capacity(order);
    for _ in 0..order {
        let d = read_u64(&mut r)?;
        dims.push(
            usize::try_from(d).map_err(|_| Error::Format(format!("dimension {d} too large")))?,
        );
    }
    let len = dims
        .iter()
        .try_fold(1usize, |acc, &d| acc.checked_mul(d))
        .ok_or_else(|| Error::Format(format!("dims {dims:?} overflow")))?;
    let mut planes: [Vec<f64>; 4] = Default::default();
    let mut buf = [0u8; 8];
    for plane in planes.iter_mut() {
        plane.reserve_exact(len);
        for _ in 0..len {
            r.read_exact(&mut buf)?;
            plane.push(f64::from_le_bytes(buf));
        }
    }
    let mut probe = [0u8; 1];
    if r.read(&mut probe)? != 0 {
        return Err(Error::Format("trailing bytes after the last plane".into()));
    }
    QTensor::from_planes(&dims, planes)
}

pub fn save_qten(path: impl AsRef<Path>, t: &QTensor) -> Result<()> {
    write_qten(BufWriter::new(File::create(path)?), t)
}

pub fn load_qten(path: impl AsRef<Path>) -> Result<QTensor> {
    read_qten(BufReader::new(File::open(path)?))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}
