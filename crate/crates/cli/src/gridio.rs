//! Pixel grids on disk: a JSON document with one `0`/`1` string per pixel
//! row (row `iy`, column `ix`), and plain PBM images.

use std::path::Path;

use ellipthom_core::microstructure::{classify, volume_fraction, PixelGrid, Provenance};
use serde_json::{json, Value};

use crate::CliError;

pub fn to_json(grid: &PixelGrid) -> Value {
    let n = grid.n();
    let rows: Vec<String> = (0..n)
        .map(|iy| (0..n).map(|ix| if grid.get(ix, iy) { '1' } else { '0' }).collect())
        .collect();
    json!({
        "n": n,
        "rows": rows,
        "theta": volume_fraction(grid),
        "class": classify(grid).as_str(),
    })
}

pub fn from_json(text: &str) -> Result<PixelGrid, CliError> {
    let bad = |m: &str| CliError::Config(format!("grid file: {m}"));
    let v: Value = serde_json::from_str(text).map_err(|e| bad(&e.to_string()))?;
    let n = v.get("n").and_then(Value::as_u64).ok_or_else(|| bad("missing integer `n`"))? as usize;
    let rows = v.get("rows").and_then(Value::as_array).ok_or_else(|| bad("missing `rows`"))?;
    if rows.len() != n {
        return Err(bad("row count differs from n"));
    }
    let mut chi = Vec::with_capacity(n * n);
    for row in rows {
        let row = row.as_str().ok_or_else(|| bad("rows must be strings"))?;
        if row.len() != n {
            return Err(bad("row length differs from n"));
        }
        for c in row.chars() {
            chi.push(match c {
                '1' => true,
                '0' => false,
                _ => return Err(bad("rows may only contain 0 and 1")),
            });
        }
    }
    PixelGrid::from_bits(n, chi, Provenance::Custom).map_err(|e| bad(&e.to_string()))
}

pub fn read(path: &Path) -> Result<PixelGrid, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    from_json(&text)
}

/// Plain (ASCII) PBM; black pixels are the strong phase.
pub fn to_pbm(grid: &PixelGrid) -> String {
    let n = grid.n();
    let mut s = format!("P1\n{n} {n}\n");
    // image rows run top to bottom, grid rows bottom to top
    for iy in (0..n).rev() {
        let row: Vec<&str> = (0..n).map(|ix| if grid.get(ix, iy) { "1" } else { "0" }).collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use ellipthom_core::microstructure::{disks, laminate, Axis};

    #[test]
    fn json_round_trip() {
        for g in [laminate(8, 0.25, Axis::X2).unwrap(), disks(10, &[[0.3, 0.6]], 0.25, false).unwrap()] {
            let text = serde_json::to_string(&to_json(&g)).unwrap();
            let back = from_json(&text).unwrap();
            assert_eq!(back.bits(), g.bits());
        }
    }

    #[test]
    fn rejects_ragged_rows() {
        assert!(from_json(r#"{"n": 2, "rows": ["01", "1"]}"#).is_err());
        assert!(from_json(r#"{"n": 2, "rows": ["01", "12"]}"#).is_err());
    }

    #[test]
    fn pbm_header() {
        let g = laminate(4, 0.5, Axis::X1).unwrap();
        let pbm = to_pbm(&g);
        assert!(pbm.starts_with("P1\n4 4\n"));
        assert_eq!(pbm.lines().count(), 6);
    }
}
