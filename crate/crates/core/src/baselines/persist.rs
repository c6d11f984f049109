//! `SLBM` binary model files: magic, u32 version, u32 class count, u32
//! feature count, class names as u32 length + UTF-8, then weights row-major
//! and bias, all little-endian `f64`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::linear::LinearModel;
use crate::error::{Error, Result};

const MAGIC: [u8; 4] = *b"SLBM";
pub const SLBM_VERSION: u32 = 1;

pub fn write_linear_model<W: Write>(model: &LinearModel, mut w: W) -> Result<()> {
    model.validate()?;
    let k = u32::try_from(model.classes.len()).map_err(|_| Error::Validation("too many classes".into()))?;
    let d = u32::try_from(model.dim).map_err(|_| Error::Validation("too many features".into()))?;
    w.write_all(&MAGIC)?;
    for v in [SLBM_VERSION, k, d] {
        w.write_all(&v.to_le_bytes())?;
    }
    for c in &model.classes {
        w.write_all(&(c.len() as u32).to_le_bytes())?;
        w.write_all(c.as_bytes())?;
    }
    for x in model.weights.iter().chain(&model.bias) {
        w.write_all(&x.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

struct Counting<R> {
    inner: R,
    read: u64,
}

impl<R: Read> Counting<R> {
    fn exact(&mut self, buf: &mut [u8], expected_total: u64) -> Result<()> {
        let mut filled = 0;
        while filled < buf.len() {
            let n = self.inner.read(&mut buf[filled..])?;
            if n == 0 {
                return Err(Error::Truncated { expected: expected_total, actual: self.read });
            }
            filled += n;
            self.read += n as u64;
        }
        Ok(())
    }

    fn u32(&mut self, expected_total: u64) -> Result<u32> {
        let mut b = [0u8; 4];
        self.exact(&mut b, expected_total)?;
        Ok(u32::from_le_bytes(b))
    }
}

pub fn read_linear_model<R: Read>(reader: R) -> Result<LinearModel> {
    let mut r = Counting { inner: reader, read: 0 };
    let mut magic = [0u8; 4];
    r.exact(&mut magic, 16)?;
    if magic != MAGIC {
        return Err(Error::BadMagic { expected: MAGIC, found: magic });
    }
    let version = r.u32(16)?;
    if version != SLBM_VERSION {
        return Err(Error::UnsupportedVersion { found: version, supported: SLBM_VERSION });
    }
    let k = r.u32(16)?;
    let d = r.u32(16)?;
    let params = (u64::from(k) * u64::from(d) + u64::from(k)) * 8;
    if params > (1 << 40) {
        return Err(Error::DimensionOverflow { rows: k, cols: d });
    }
    let mut classes = Vec::with_capacity(k as usize);
    for _ in 0..k {
        let len = r.u32(r.read + 4 + params)?;
        let mut b = vec![0u8; len as usize];
        r.exact(&mut b, r.read + u64::from(len) + params)?;
        classes.push(String::from_utf8(b).map_err(|_| Error::Validation("class name is not UTF-8".into()))?);
    }
    let total = r.read + params;
    let mut take = |n: usize| -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(n);
        let mut b = [0u8; 8];
        for _ in 0..n {
            r.exact(&mut b, total)?;
            out.push(f64::from_le_bytes(b));
        }
        Ok(out)
    };
    let weights = take(k as usize * d as usize)?;
    let bias = take(k as usize)?;
    let mut extra = [0u8; 1];
    if r.inner.read(&mut extra)? != 0 {
        return Err(Error::Validation(format!("trailing bytes after {total}-byte model")));
    }
    let model = LinearModel { classes, dim: d as usize, weights, bias };
    model.validate()?;
    Ok(model)
}

pub fn save_linear_model(model: &LinearModel, path: &Path) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    write_linear_model(model, BufWriter::new(f))
}

pub fn load_linear_model(path: &Path) -> Result<LinearModel> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    read_linear_model(BufReader::new(f))
}
