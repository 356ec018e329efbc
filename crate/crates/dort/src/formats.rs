//! Artifact formats: CSV tables, 8-bit PGM images and the binary operator.
//!
//! Binary operator layout (little endian):
//!
//! | bytes        | content                                       |
//! |--------------|-----------------------------------------------|
//! | 8            | magic `DORTFF01`                              |
//! | 8            | `n_dir` as u64                                |
//! | 8            | channel tag as u64, `2` = stacked `[p; s]`    |
//! | 16           | channel weights `omega/kappa_p`, `omega/kappa_s` |
//! | 16 `n_dir`   | direction angles, then quadrature weights     |
//! | 16 `(2n)^2`  | matrix entries column-major, `re` then `im`   |

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;

use dort_core::dort::FarFieldMatrix;
use dort_core::elastic::DirectionGrid;
use dort_core::imaging::FieldMap;
use dort_core::{DMatrix, C64};

const MAGIC: &[u8; 8] = b"DORTFF01";
/// Channel tag for operators on stacked `[p; s]` densities.
pub const CHANNELS_PS: u64 = 2;

fn csv_error(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// `index,value` rows, 1-based.
pub fn write_eigenvalues(path: &Path, values: &[f64]) -> io::Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(["index", "value"]).map_err(csv_error)?;
    for (k, v) in values.iter().enumerate() {
        w.write_record([(k + 1).to_string(), v.to_string()]).map_err(csv_error)?;
    }
    w.flush()
}

pub fn read_eigenvalues(path: &Path) -> io::Result<Vec<f64>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_error)?;
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_error)?;
            rec.get(1).and_then(|s| s.parse().ok()).ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "bad eigenvalue row"))
        })
        .collect()
}

/// `x,y,abs_u,re_u1,im_u1,re_u2,im_u2`, `x` fastest.
pub fn write_map_csv(path: &Path, map: &FieldMap) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record(["x", "y", "abs_u", "re_u1", "im_u1", "re_u2", "im_u2"]).map_err(csv_error)?;
    for (iy, y) in map.ys.iter().enumerate() {
        for (ix, x) in map.xs.iter().enumerate() {
            let k = map.index(ix, iy);
            let u = map.values[k];
            let row = [*x, *y, map.magnitude[k], u.x.re, u.x.im, u.y.re, u.y.im];
            w.write_record(row.iter().map(f64::to_string)).map_err(csv_error)?;
        }
    }
    w.flush()
}

/// Binary PGM of `|u|`, top row at `y_max`, per-map maximum at 255.
pub fn write_pgm(path: &Path, map: &FieldMap) -> io::Result<()> {
    let (nx, ny) = (map.xs.len(), map.ys.len());
    let max = map.max_magnitude();
    let mut w = BufWriter::new(File::create(path)?);
    write!(w, "P5\n{nx} {ny}\n255\n")?;
    let mut row = vec![0u8; nx];
    for iy in (0..ny).rev() {
        for (ix, px) in row.iter_mut().enumerate() {
            let m = map.magnitude[map.index(ix, iy)];
            *px = if max > 0.0 { (255.0 * m / max).round() as u8 } else { 0 };
        }
        w.write_all(&row)?;
    }
    w.flush()
}

pub fn write_operator(path: &Path, f: &FarFieldMatrix) -> io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&(f.n_dir() as u64).to_le_bytes())?;
    w.write_all(&CHANNELS_PS.to_le_bytes())?;
    let reals = f.channel_weights.iter().chain(&f.grid.angles).chain(&f.grid.weights);
    for v in reals {
        w.write_all(&v.to_le_bytes())?;
    }
    for z in f.matrix.iter() {
        w.write_all(&z.re.to_le_bytes())?;
        w.write_all(&z.im.to_le_bytes())?;
    }
    w.flush()
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

pub fn read_operator(path: &Path) -> io::Result<FarFieldMatrix> {
    let mut r = BufReader::new(File::open(path)?);
    let mut word = [0u8; 8];
    r.read_exact(&mut word)?;
    if &word != MAGIC {
        return Err(invalid("not a far-field operator file"));
    }
    let mut next = |r: &mut BufReader<File>| -> io::Result<[u8; 8]> {
        r.read_exact(&mut word)?;
        Ok(word)
    };
    let n = u64::from_le_bytes(next(&mut r)?) as usize;
    if u64::from_le_bytes(next(&mut r)?) != CHANNELS_PS {
        return Err(invalid("unsupported channel layout"));
    }
    if n == 0 || n > 1 << 20 {
        return Err(invalid("implausible direction count"));
    }
    let mut real = |r: &mut BufReader<File>, k: usize| -> io::Result<Vec<f64>> { (0..k).map(|_| next(r).map(f64::from_le_bytes)).collect() };
    let cw = real(&mut r, 2)?;
    let angles = real(&mut r, n)?;
    let weights = real(&mut r, n)?;
    let entries = real(&mut r, 2 * (2 * n) * (2 * n))?;
    let matrix = DMatrix::from_iterator(2 * n, 2 * n, entries.chunks_exact(2).map(|p| C64::new(p[0], p[1])));
    Ok(FarFieldMatrix { grid: DirectionGrid { angles, weights }, matrix, channel_weights: [cw[0], cw[1]] })
}
