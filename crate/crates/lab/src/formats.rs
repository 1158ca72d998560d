//! On-disk formats.
//!
//! Binary arrays are one line of JSON header terminated by `\n`, followed by
//! little-endian `(re, im)` pairs of `f64`.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use lab_core::atoms::{Atom, AtomPiece};
use lab_core::geometry::{Direction, DyadicInterval, DyadicRectangle, GridOpenSet};
use lab_core::hankel::AnalyticSymbol;
use lab_core::spectral::{GridFunction, GridSpec, Spectrum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Spatial,
    Spectral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    #[serde(rename = "L")]
    pub window_exp: i32,
    #[serde(rename = "Kp")]
    pub resolution_exp: i32,
    pub layout: String,
    pub domain: Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolHeader {
    #[serde(rename = "N")]
    pub n: usize,
    pub zero_axis_excluded: bool,
}

fn write_binary<H: Serialize>(w: &mut impl Write, header: &H, data: &[Complex64]) -> Result<()> {
    serde_json::to_writer(&mut *w, header)?;
    w.write_all(b"\n")?;
    let mut bytes = Vec::with_capacity(data.len() * 16);
    for z in data {
        bytes.extend_from_slice(&z.re.to_le_bytes());
        bytes.extend_from_slice(&z.im.to_le_bytes());
    }
    w.write_all(&bytes)?;
    Ok(())
}

fn read_binary<H: for<'de> Deserialize<'de>>(r: impl Read) -> Result<(H, Vec<Complex64>)> {
    let mut r = BufReader::new(r);
    let mut line = Vec::new();
    r.read_until(b'\n', &mut line)?;
    ensure!(line.last() == Some(&b'\n'), "missing header line");
    let header: H = serde_json::from_slice(&line).context("invalid header")?;
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    ensure!(
        bytes.len() % 16 == 0,
        "payload of {} bytes is not a whole number of complex doubles",
        bytes.len()
    );
    let data = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            Complex64::new(re, im)
        })
        .collect();
    Ok((header, data))
}

pub fn write_grid_function(w: &mut impl Write, f: &GridFunction, domain: Domain) -> Result<()> {
    let grid = f.grid();
    let header = GridHeader {
        window_exp: grid.window_exp,
        resolution_exp: grid.resolution_exp,
        layout: "row-major".into(),
        domain,
    };
    match domain {
        Domain::Spatial => write_binary(w, &header, f.samples()),
        Domain::Spectral => write_binary(w, &header, f.spectrum().coeffs()),
    }
}

pub fn read_grid_function(r: impl Read) -> Result<GridFunction> {
    let (header, data): (GridHeader, _) = read_binary(r)?;
    ensure!(
        header.layout == "row-major",
        "unsupported layout `{}`",
        header.layout
    );
    let sum = header.window_exp + header.resolution_exp;
    ensure!(
        (1..=14).contains(&sum),
        "grid exponents L + Kp = {sum} outside 1..=14"
    );
    let grid = GridSpec::new(header.window_exp, header.resolution_exp);
    Ok(match header.domain {
        Domain::Spatial => GridFunction::from_samples(grid, data)?,
        Domain::Spectral => Spectrum::from_coeffs(grid, data)?.to_grid(),
    })
}

pub fn write_symbol(w: &mut impl Write, symbol: &AnalyticSymbol) -> Result<()> {
    let header = SymbolHeader {
        n: symbol.n(),
        zero_axis_excluded: symbol.zero_axis_excluded(),
    };
    write_binary(w, &header, symbol.coeffs())
}

pub fn read_symbol(r: impl Read) -> Result<AnalyticSymbol> {
    let (header, data): (SymbolHeader, _) = read_binary(r)?;
    ensure!(header.n >= 1, "N must be positive");
    if header.zero_axis_excluded {
        let side = 2 * header.n - 1;
        let on_axis = (0..data.len())
            .find(|&i| (i / side == 0 || i % side == 0) && data[i] != Complex64::new(0.0, 0.0));
        if let Some(i) = on_axis {
            bail!("coefficient {i} lies on an axis but the header excludes axes");
        }
    }
    Ok(AnalyticSymbol::new(
        header.n,
        data,
        header.zero_axis_excluded,
    )?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OpenSetFile {
    #[serde(rename = "L")]
    pub window_exp: u32,
    #[serde(rename = "K")]
    pub base_exp: u32,
    pub cells: Vec<[usize; 2]>,
}

impl From<&GridOpenSet> for OpenSetFile {
    fn from(set: &GridOpenSet) -> Self {
        OpenSetFile {
            window_exp: set.window_exp(),
            base_exp: set.base_exp(),
            cells: set.cells().map(|(r, c)| [r, c]).collect(),
        }
    }
}

impl OpenSetFile {
    pub fn to_open_set(&self) -> Result<GridOpenSet> {
        ensure!(
            self.window_exp + self.base_exp <= 12,
            "open-set grid exceeds 2^12 cells per side"
        );
        Ok(GridOpenSet::from_cells(
            self.window_exp,
            self.base_exp,
            self.cells.iter().map(|[r, c]| (*r, *c)),
        )?)
    }
}

/// `[position, scale]` per side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectFile {
    pub first: [i64; 2],
    pub second: [i64; 2],
}

impl From<&DyadicRectangle> for RectFile {
    fn from(r: &DyadicRectangle) -> Self {
        RectFile {
            first: [r.first.position(), r.first.scale() as i64],
            second: [r.second.position(), r.second.scale() as i64],
        }
    }
}

impl RectFile {
    pub fn to_rect(self) -> Result<DyadicRectangle> {
        let side = |[p, s]: [i64; 2]| -> Result<DyadicInterval> {
            let s = i32::try_from(s)
                .ok()
                .filter(|s| s.abs() <= 60)
                .context("scale out of range")?;
            Ok(DyadicInterval::new(p, s))
        };
        Ok(DyadicRectangle::new(side(self.first)?, side(self.second)?))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceFile {
    pub rect: RectFile,
    /// 1 or 2.
    pub direction: u8,
    /// GridFunction binary, relative to the manifest.
    pub data: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomManifest {
    /// Open-set JSON, relative to the manifest.
    pub omega: PathBuf,
    pub q: f64,
    pub delta: f64,
    pub pieces: Vec<PieceFile>,
}

/// Writes `name.json`, `name.omega.json` and `name.piece<k>.bin` into `dir`.
/// Piece data carry the atom's normalization.
pub fn write_atom(dir: &Path, name: &str, atom: &Atom) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let omega = PathBuf::from(format!("{name}.omega.json"));
    std::fs::write(
        dir.join(&omega),
        serde_json::to_string(&OpenSetFile::from(atom.omega()))?,
    )?;
    let mut pieces = Vec::new();
    for (k, piece) in atom.pieces().iter().enumerate() {
        let data = PathBuf::from(format!("{name}.piece{k}.bin"));
        let mut file = std::fs::File::create(dir.join(&data))?;
        write_grid_function(
            &mut file,
            &piece.values().scaled(Complex64::new(atom.scale(), 0.0)),
            Domain::Spatial,
        )?;
        pieces.push(PieceFile {
            rect: piece.rect().into(),
            direction: piece.direction().index(),
            data,
        });
    }
    let manifest = AtomManifest {
        omega,
        q: atom.q(),
        delta: atom.delta(),
        pieces,
    };
    let path = dir.join(format!("{name}.json"));
    std::fs::write(&path, serde_json::to_string_pretty(&manifest)?)?;
    Ok(path)
}

pub fn read_atom(path: &Path) -> Result<Atom> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let manifest: AtomManifest = serde_json::from_str(&text).context("invalid atom manifest")?;
    let base = path.parent().unwrap_or(Path::new("."));
    let omega_text = std::fs::read_to_string(base.join(&manifest.omega))
        .with_context(|| format!("reading {}", manifest.omega.display()))?;
    let omega = serde_json::from_str::<OpenSetFile>(&omega_text)?.to_open_set()?;
    let mut pieces = Vec::new();
    for p in &manifest.pieces {
        let direction = Direction::from_index(p.direction).context("direction must be 1 or 2")?;
        let file = std::fs::File::open(base.join(&p.data))
            .with_context(|| format!("opening {}", p.data.display()))?;
        let values = read_grid_function(file)?;
        pieces.push(AtomPiece::new(p.rect.to_rect()?, direction, values)?);
    }
    Ok(Atom::from_parts(
        omega,
        pieces,
        manifest.q,
        manifest.delta,
        1.0,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_function_round_trip() {
        let grid = GridSpec::new(1, 2);
        let f = GridFunction::pure_tone(grid, 1, 3);
        for domain in [Domain::Spatial, Domain::Spectral] {
            let mut buf = Vec::new();
            write_grid_function(&mut buf, &f, domain).unwrap();
            let g = read_grid_function(&buf[..]).unwrap();
            let err = g.sub(&f).unwrap().max_abs();
            assert!(err < 1e-14, "{domain:?}: {err}");
        }
        let mut buf = Vec::new();
        write_grid_function(&mut buf, &f, Domain::Spatial).unwrap();
        assert!(read_grid_function(&buf[..buf.len() - 8]).is_err());
        assert!(read_grid_function(&buf[..buf.len() - 16]).is_err());
    }

    #[test]
    fn symbol_round_trip() {
        let s = crate::corpus::random_symbol(1, 3, 1.0, true);
        let mut buf = Vec::new();
        write_symbol(&mut buf, &s).unwrap();
        assert!(buf.starts_with(b"{\"N\":3,\"zero_axis_excluded\":true}\n"));
        assert_eq!(read_symbol(&buf[..]).unwrap(), s);
    }

    #[test]
    fn open_set_round_trip() {
        let set = GridOpenSet::from_cells(1, 1, [(0, 1), (3, 2)]).unwrap();
        let file = OpenSetFile::from(&set);
        let text = serde_json::to_string(&file).unwrap();
        assert_eq!(text, r#"{"L":1,"K":1,"cells":[[0,1],[3,2]]}"#);
        let back: OpenSetFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_open_set().unwrap(), set);
    }
}
