//! The HMT1 ensemble container: magic bytes `HMT1`, little-endian u32
//! fields n, N, count, then count·n·N·N complex128 values (row-major,
//! interleaved re/im). Metadata travels in a JSON sidecar.

use super::mat::Mat;
use super::tuple::{Ensemble, EnsembleMeta, HermMatrix, MatrixTuple};
use super::MatError;
use std::io::{Read, Write};
use std::path::Path;

pub const MAGIC: &[u8; 4] = b"HMT1";

pub fn write_ensemble<W: Write>(w: &mut W, ens: &Ensemble) -> Result<(), MatError> {
    let n = ens.n_letters() as u32;
    let dim = ens.dim() as u32;
    let count = ens.len() as u32;
    w.write_all(MAGIC)?;
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&dim.to_le_bytes())?;
    w.write_all(&count.to_le_bytes())?;
    let mut buf = Vec::with_capacity((dim * dim) as usize * 16);
    for sample in &ens.samples {
        for mat in &sample.mats {
            buf.clear();
            let m = mat.mat();
            for k in 0..m.re.len() {
                buf.extend_from_slice(&m.re[k].to_le_bytes());
                buf.extend_from_slice(&m.im[k].to_le_bytes());
            }
            w.write_all(&buf)?;
        }
    }
    Ok(())
}

pub fn read_ensemble<R: Read>(r: &mut R, meta: EnsembleMeta) -> Result<Ensemble, MatError> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(MatError::Format(format!("bad magic {magic:?}, expected HMT1")));
    }
    let mut u32buf = [0u8; 4];
    let mut read_u32 = |r: &mut R| -> Result<u32, MatError> {
        r.read_exact(&mut u32buf)?;
        Ok(u32::from_le_bytes(u32buf))
    };
    let n = read_u32(r)? as usize;
    let dim = read_u32(r)? as usize;
    let count = read_u32(r)? as usize;
    if n == 0 || dim == 0 || count == 0 {
        return Err(MatError::Format("zero n, N, or count".into()));
    }
    if n > 255 {
        return Err(MatError::Format(format!("letter count {n} out of range")));
    }
    let mut bytes = vec![0u8; dim * dim * 16];
    let mut samples = Vec::with_capacity(count);
    for _ in 0..count {
        let mut mats = Vec::with_capacity(n);
        for _ in 0..n {
            r.read_exact(&mut bytes)?;
            let mut m = Mat::zeros(dim);
            for k in 0..dim * dim {
                m.re[k] = f64::from_le_bytes(bytes[16 * k..16 * k + 8].try_into().unwrap());
                m.im[k] = f64::from_le_bytes(bytes[16 * k + 8..16 * k + 16].try_into().unwrap());
            }
            mats.push(HermMatrix::checked(m)?);
        }
        samples.push(MatrixTuple::new(mats)?);
    }
    Ensemble::new(samples, meta)
}

/// Writes `<path>` (HMT1) and `<path>.json` (sidecar metadata).
pub fn save(path: &Path, ens: &Ensemble) -> Result<(), MatError> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_ensemble(&mut f, ens)?;
    f.flush()?;
    let sidecar = path.with_extension(format!(
        "{}json",
        path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
    ));
    let json = serde_json::to_string_pretty(&ens.meta)
        .map_err(|e| MatError::Format(format!("sidecar: {e}")))?;
    std::fs::write(sidecar, json)?;
    Ok(())
}

/// Reads `<path>`, picking up the sidecar when present.
pub fn load(path: &Path) -> Result<Ensemble, MatError> {
    let sidecar = path.with_extension(format!(
        "{}json",
        path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
    ));
    let meta = if sidecar.exists() {
        serde_json::from_str(&std::fs::read_to_string(&sidecar)?)
            .map_err(|e| MatError::Format(format!("sidecar: {e}")))?
    } else {
        EnsembleMeta::default()
    };
    let mut f = std::io::BufReader::new(std::fs::File::open(path)?);
    read_ensemble(&mut f, meta)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let dim = 3;
        let mut samples = Vec::new();
        let mut seed = 42u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
            ((seed >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        for _ in 0..4 {
            let mats = (0..2)
                .map(|_| {
                    let mut m = Mat::zeros(dim);
                    for k in 0..dim * dim {
                        m.re[k] = next();
                        m.im[k] = next();
                    }
                    HermMatrix::symmetrized(m)
                })
                .collect();
            samples.push(MatrixTuple::new(mats).unwrap());
        }
        let ens = Ensemble::new(samples, EnsembleMeta { seed: 7, ..Default::default() }).unwrap();
        let mut buf = Vec::new();
        write_ensemble(&mut buf, &ens).unwrap();
        assert_eq!(&buf[..4], MAGIC);
        let back = read_ensemble(&mut buf.as_slice(), ens.meta.clone()).unwrap();
        assert_eq!(back.len(), 4);
        for (a, b) in ens.samples.iter().zip(&back.samples) {
            for (ma, mb) in a.mats.iter().zip(&b.mats) {
                assert_eq!(ma.mat().re, mb.mat().re);
                assert_eq!(ma.mat().im, mb.mat().im);
            }
        }
    }

    #[test]
    fn rejects_non_hermitian_payload() {
        let dim = 2u32;
        let mut buf = Vec::new();
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&1u32.to_le_bytes());
        buf.extend_from_slice(&dim.to_le_bytes());
        buf.extend_from_slice(&1u32.to_le_bytes());
        // non-Hermitian: [[0, 1], [0, 0]]
        for v in [0.0f64, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0] {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        assert!(matches!(
            read_ensemble(&mut buf.as_slice(), EnsembleMeta::default()),
            Err(MatError::NotHermitian { .. })
        ));
    }
}
