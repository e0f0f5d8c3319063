//! Binary coefficient snapshots with a TOML sidecar.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::field::SpectralField;
use super::grid::{FourierGrid, Rank};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"CINS";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: u64 = 26;

/// Sidecar metadata.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SnapshotMeta {
    pub q: usize,
    pub schedule_hash: String,
    pub profile_id: String,
    pub dealias_num: u32,
    pub dealias_den: u32,
    pub traceless: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub field: SpectralField,
    pub time: f64,
    pub alpha: f64,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".toml");
    PathBuf::from(s)
}

/// Write the full retained cube (zeros outside the stored box).
pub fn write_snapshot(path: &Path, field: &SpectralField, time: f64, alpha: f64, meta: Option<&SnapshotMeta>) -> Result<()> {
    let grid = field.grid();
    let mut w = BufWriter::with_capacity(1 << 20, File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&[VERSION, field.rank().code()])?;
    w.write_all(&(grid.n() as u32).to_le_bytes())?;
    w.write_all(&time.to_le_bytes())?;
    w.write_all(&alpha.to_le_bytes())?;
    let l = grid.retained_limit() as i64;
    let nc = field.rank().ncomp();
    let h = field.half().map(|x| x as i64);
    let zero_row = vec![0u8; (2 * l as usize + 1) * nc * 16];
    for k1 in -l..=l {
        for k2 in -l..=l {
            if k1.abs() > h[0] || k2.abs() > h[1] {
                w.write_all(&zero_row)?;
                continue;
            }
            for k3 in -l..=l {
                let idx = field.index([k1, k2, k3]);
                for c in 0..nc {
                    let z = idx.map(|i| field.comp(c)[i]).unwrap_or_default();
                    w.write_all(&z.re.to_le_bytes())?;
                    w.write_all(&z.im.to_le_bytes())?;
                }
            }
        }
    }
    w.flush()?;
    if let Some(m) = meta {
        let text = toml::to_string(m).map_err(|e| Error::Io(e.to_string()))?;
        std::fs::write(sidecar_path(path), text)?;
    }
    Ok(())
}

pub fn read_meta(path: &Path) -> Result<Option<SnapshotMeta>> {
    let side = sidecar_path(path);
    if !side.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&side)?;
    toml::from_str(&text).map(Some).map_err(|e| Error::Format {
        offset: e.span().map(|s| s.start as u64).unwrap_or(0),
        msg: format!("sidecar {}: {}", side.display(), e.message()),
    })
}

fn fmt_err(offset: u64, msg: impl Into<String>) -> Error {
    Error::Format { offset, msg: msg.into() }
}

/// Read a snapshot; the dealias fraction comes from the sidecar when present (2/3 otherwise).
pub fn read_snapshot(path: &Path) -> Result<(Snapshot, Option<SnapshotMeta>)> {
    let meta = read_meta(path)?;
    let file = File::open(path)?;
    let total = file.metadata()?.len();
    let mut r = BufReader::with_capacity(1 << 20, file);
    let mut head = [0u8; HEADER_LEN as usize];
    let got = read_full(&mut r, &mut head)?;
    if got < HEADER_LEN as usize {
        return Err(fmt_err(got as u64, "truncated header"));
    }
    if &head[0..4] != MAGIC {
        return Err(fmt_err(0, "bad magic"));
    }
    if head[4] != VERSION {
        return Err(fmt_err(4, format!("unsupported version {}", head[4])));
    }
    let rank = Rank::from_code(head[5]).ok_or_else(|| fmt_err(5, format!("unknown rank code {}", head[5])))?;
    let n = u32::from_le_bytes(head[6..10].try_into().unwrap()) as usize;
    let time = f64::from_le_bytes(head[10..18].try_into().unwrap());
    let alpha = f64::from_le_bytes(head[18..26].try_into().unwrap());
    let (num, den) = meta.as_ref().map(|m| (m.dealias_num, m.dealias_den)).unwrap_or((2, 3));
    let grid = FourierGrid::with_fraction(n, num, den).map_err(|e| fmt_err(6, e.to_string()))?;
    let l = grid.retained_limit();
    let side = 2 * l + 1;
    let nc = rank.ncomp();
    let body = (side * side * side * nc * 16) as u64;
    if total != HEADER_LEN + body {
        let off = total.min(HEADER_LEN + body);
        return Err(fmt_err(off, format!("expected {} bytes of coefficients, file holds {}", body, total.saturating_sub(HEADER_LEN))));
    }
    let mut field = SpectralField::zeros(grid, rank, [l, l, l]);
    let mut buf = vec![0u8; side * nc * 16];
    let mut idx = 0;
    for _row in 0..side * side {
        r.read_exact(&mut buf)?;
        for (t, chunk) in buf.chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(chunk[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(chunk[8..16].try_into().unwrap());
            field.comp_mut(t % nc)[idx + t / nc] = Complex64::new(re, im);
        }
        idx += side;
    }
    let traceless = meta.as_ref().map(|m| m.traceless).unwrap_or(false);
    let field = field.trimmed(0.0).with_traceless(traceless);
    Ok((Snapshot { field, time, alpha }, meta))
}

fn read_full(r: &mut impl Read, buf: &mut [u8]) -> Result<usize> {
    let mut got = 0;
    while got < buf.len() {
        let k = r.read(&mut buf[got..])?;
        if k == 0 {
            break;
        }
        got += k;
    }
    Ok(got)
}

/// SHA-256 of a file, streamed.
pub fn file_digest(path: &Path) -> Result<String> {
    let mut r = BufReader::with_capacity(1 << 20, File::open(path)?);
    let mut h = Sha256::new();
    let mut buf = vec![0u8; 1 << 20];
    loop {
        let k = r.read(&mut buf)?;
        if k == 0 {
            break;
        }
        h.update(&buf[..k]);
    }
    Ok(hex::encode(h.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_corruption() {
        let dir = std::env::temp_dir().join(format!("cins-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("v.cins");
        let g = FourierGrid::new(8).unwrap();
        let f = SpectralField::from_modes(
            g,
            Rank::Vector,
            &[([1, 0, -2], vec![Complex64::new(0.1, 0.2), Complex64::new(-0.3, 0.0), Complex64::new(0.0, 0.5)])],
        )
        .unwrap();
        let meta = SnapshotMeta {
            q: 0,
            schedule_hash: "abc".into(),
            profile_id: "constant".into(),
            dealias_num: 2,
            dealias_den: 3,
            traceless: false,
        };
        write_snapshot(&path, &f, 0.25, 0.15, Some(&meta)).unwrap();
        let (s, m) = read_snapshot(&path).unwrap();
        assert_eq!(m.unwrap(), meta);
        assert_eq!(s.time, 0.25);
        assert_eq!(s.field, f);
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        match read_snapshot(&path) {
            Err(Error::Format { offset, .. }) => assert_eq!(offset, bytes.len() as u64 - 5),
            other => panic!("{other:?}"),
        }
        let mut bad = bytes.clone();
        bad[0] = b'X';
        std::fs::write(&path, &bad).unwrap();
        assert!(matches!(read_snapshot(&path), Err(Error::Format { offset: 0, .. })));
        std::fs::remove_dir_all(&dir).ok();
    }
}
