//! CSV, PGM and JSON export.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::classical::EmpiricalMeasure;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PgmEncoding {
    /// ASCII `P2`.
    Plain,
    /// Binary `P5`.
    Raw,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum BitDepth {
    #[serde(rename = "8")]
    Eight,
    #[serde(rename = "16")]
    Sixteen,
}

impl BitDepth {
    pub fn max_value(self) -> u32 {
        match self {
            BitDepth::Eight => 255,
            BitDepth::Sixteen => 65535,
        }
    }
}

/// What was written next to a PGM image.
#[derive(Clone, Debug, Serialize)]
pub struct PgmSidecar {
    pub width: usize,
    pub height: usize,
    pub max_gray: u32,
    /// Data value mapped to `max_gray`; gray = round(value / scale · max_gray).
    pub scale: f64,
    pub encoding: PgmEncoding,
    pub config_hash: String,
}

/// Quantize `values` (row-major, `rows × cols`) to gray levels with the
/// maximum mapped to full white.
pub fn quantize(values: &[f64], depth: BitDepth) -> (Vec<u32>, f64) {
    let max = values.iter().cloned().fold(0.0f64, f64::max);
    let top = depth.max_value() as f64;
    let levels = values
        .iter()
        .map(|&v| if max > 0.0 { ((v.max(0.0) / max) * top).round() as u32 } else { 0 })
        .collect();
    (levels, max)
}

/// Encode a PGM image. The header carries `# config-hash: <hash>`.
pub fn encode_pgm(
    values: &[f64],
    rows: usize,
    cols: usize,
    depth: BitDepth,
    encoding: PgmEncoding,
    config_hash: &str,
) -> (Vec<u8>, PgmSidecar) {
    assert_eq!(values.len(), rows * cols, "image buffer does not match its shape");
    let (levels, scale) = quantize(values, depth);
    let magic = match encoding {
        PgmEncoding::Plain => "P2",
        PgmEncoding::Raw => "P5",
    };
    let mut out = format!("{magic}\n# config-hash: {config_hash}\n{cols} {rows}\n{}\n", depth.max_value()).into_bytes();
    match encoding {
        PgmEncoding::Plain => {
            for r in 0..rows {
                let line: Vec<String> = levels[r * cols..(r + 1) * cols].iter().map(u32::to_string).collect();
                out.extend_from_slice(line.join(" ").as_bytes());
                out.push(b'\n');
            }
        }
        PgmEncoding::Raw => {
            for &g in &levels {
                match depth {
                    BitDepth::Eight => out.push(g as u8),
                    // 16-bit samples are big-endian
                    BitDepth::Sixteen => out.extend_from_slice(&(g as u16).to_be_bytes()),
                }
            }
        }
    }
    let sidecar = PgmSidecar {
        width: cols,
        height: rows,
        max_gray: depth.max_value(),
        scale,
        encoding,
        config_hash: config_hash.to_string(),
    };
    (out, sidecar)
}

/// Write `<stem>.pgm` and `<stem>.pgm.json`; returns both file names.
#[allow(clippy::too_many_arguments)]
pub fn write_pgm(
    dir: &Path,
    stem: &str,
    values: &[f64],
    rows: usize,
    cols: usize,
    depth: BitDepth,
    encoding: PgmEncoding,
    config_hash: &str,
) -> Result<Vec<String>> {
    let (bytes, sidecar) = encode_pgm(values, rows, cols, depth, encoding, config_hash);
    let image = format!("{stem}.pgm");
    let meta = format!("{stem}.pgm.json");
    fs::write(dir.join(&image), bytes)?;
    write_json(&dir.join(&meta), &sidecar)?;
    Ok(vec![image, meta])
}

/// Parse a PGM written by [`encode_pgm`] back into gray levels.
pub fn decode_pgm(bytes: &[u8]) -> Option<(usize, usize, u32, Vec<u32>)> {
    let mut fields = Vec::new();
    let mut pos = 0;
    // magic, width, height, maxval, skipping comments
    while fields.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if bytes.get(pos) == Some(&b'#') {
            while pos < bytes.len() && bytes[pos] != b'\n' {
                pos += 1;
            }
            continue;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return None;
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).ok()?.to_string());
    }
    let (w, h, max): (usize, usize, u32) = (fields[1].parse().ok()?, fields[2].parse().ok()?, fields[3].parse().ok()?);
    let levels: Vec<u32> = match fields[0].as_str() {
        "P2" => std::str::from_utf8(&bytes[pos..]).ok()?.split_ascii_whitespace().map(|t| t.parse().ok()).collect::<Option<_>>()?,
        "P5" => {
            let data = &bytes[pos + 1..];
            if max < 256 {
                data.iter().map(|&b| b as u32).collect()
            } else {
                data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as u32).collect()
            }
        }
        _ => return None,
    };
    (levels.len() == w * h).then_some((w, h, max, levels))
}

/// CSV of a grid measure: `cell` (or `i,j`), `center` coordinates, `weight`
/// (normalized).
pub fn measure_csv(mu: &EmpiricalMeasure) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let weights = mu.normalized();
    if mu.axes() == 1 {
        w.write_record(["cell", "x", "weight"])?;
        for (k, wt) in weights.iter().enumerate() {
            let c = mu.cell_center(k).coords()[0];
            w.write_record([k.to_string(), c.to_string(), wt.to_string()])?;
        }
    } else {
        w.write_record(["i", "j", "u", "v", "weight"])?;
        let m = mu.resolution() as f64;
        for (k, wt) in weights.iter().enumerate() {
            let idx = mu.cell_indices(k);
            let (u, v) = ((idx[0] as f64 + 0.5) / m, (idx[1] as f64 + 0.5) / m);
            w.write_record([idx[0].to_string(), idx[1].to_string(), u.to_string(), v.to_string(), wt.to_string()])?;
        }
    }
    csv_finish(w)
}

/// CSV with a header row and numeric columns.
pub fn columns_csv(headers: &[&str], columns: &[Vec<f64>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers)?;
    let rows = columns.iter().map(Vec::len).max().unwrap_or(0);
    for r in 0..rows {
        w.write_record(columns.iter().map(|c| c.get(r).map_or(String::new(), f64::to_string)))?;
    }
    csv_finish(w)
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// Values of a phase-space function on a regular `rows × cols` grid of cell
/// centres, row-major. Rows run along the first coordinate.
#[derive(Clone, Debug, Serialize)]
pub struct HusimiGrid {
    pub rows: usize,
    pub cols: usize,
    pub row_label: String,
    pub row_range: (f64, f64),
    pub col_label: String,
    pub col_range: (f64, f64),
    #[serde(skip)]
    pub values: Vec<f64>,
    /// Extra metadata for the sidecar (dimension, spin, ...).
    pub meta: serde_json::Value,
}

impl HusimiGrid {
    pub fn row_centre(&self, r: usize) -> f64 {
        let (a, b) = self.row_range;
        a + (b - a) * (r as f64 + 0.5) / self.rows as f64
    }

    pub fn col_centre(&self, k: usize) -> f64 {
        let (a, b) = self.col_range;
        a + (b - a) * (k as f64 + 0.5) / self.cols as f64
    }

    pub fn get(&self, r: usize, k: usize) -> f64 {
        self.values[r * self.cols + k]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// `row,col,value` per cell.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([self.row_label.as_str(), self.col_label.as_str(), "value"])?;
        for r in 0..self.rows {
            for k in 0..self.cols {
                w.write_record([self.row_centre(r), self.col_centre(k), self.get(r, k)].map(|x| x.to_string()))?;
            }
        }
        csv_finish(w)
    }

    /// Write `<stem>.csv`, `<stem>.pgm`, `<stem>.pgm.json` and the grid
    /// metadata `<stem>.json`; returns the file names.
    pub fn write(&self, dir: &Path, stem: &str, depth: BitDepth, encoding: PgmEncoding, config_hash: &str) -> Result<Vec<String>> {
        let csv_name = format!("{stem}.csv");
        fs::write(dir.join(&csv_name), self.to_csv()?)?;
        let mut files = vec![csv_name];
        files.extend(write_pgm(dir, stem, &self.values, self.rows, self.cols, depth, encoding, config_hash)?);
        let meta = format!("{stem}.json");
        write_json(&dir.join(&meta), self)?;
        files.push(meta);
        Ok(files)
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{PhaseSpace, Point};

    #[test]
    fn pgm_round_trips_in_all_modes() {
        let values: Vec<f64> = (0..12).map(|k| k as f64 * 0.5).collect();
        for depth in [BitDepth::Eight, BitDepth::Sixteen] {
            for enc in [PgmEncoding::Plain, PgmEncoding::Raw] {
                let (bytes, meta) = encode_pgm(&values, 3, 4, depth, enc, "abc");
                assert!(String::from_utf8_lossy(&bytes).contains("# config-hash: abc"));
                let (w, h, max, levels) = decode_pgm(&bytes).unwrap();
                assert_eq!((w, h, max), (4, 3, depth.max_value()));
                assert_eq!(levels[11], depth.max_value());
                assert_eq!(levels[0], 0);
                assert_eq!(meta.scale, 5.5);
            }
        }
    }

    #[test]
    fn measure_csv_lists_every_cell() {
        let mut mu = EmpiricalMeasure::zeros(PhaseSpace::Square, 3);
        mu.add_point(&Point::Plane([0.9, 0.1]));
        let text = measure_csv(&mu).unwrap();
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let rows: Vec<csv::StringRecord> = r.records().map(|x| x.unwrap()).collect();
        assert_eq!(rows.len(), 9);
        assert_eq!(&rows[6][4], "1");
    }
}
