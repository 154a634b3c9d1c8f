//! GridFunction CSV format: header `index,value` in dimension 1 or
//! `i,j,value` in dimension 2, one row per cell in row-major order, values
//! printed with 17 significant digits.

use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};

/// Formats a float with 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(f: &GridFunction, out: W) -> Result<()> {
    let grid = f.grid();
    let mut w = csv::Writer::from_writer(out);
    match grid.dim() {
        1 => w.write_record(["index", "value"])?,
        _ => w.write_record(["i", "j", "value"])?,
    }
    for (idx, v) in f.values().iter().enumerate() {
        let m = grid.multi_index(idx);
        match grid.dim() {
            1 => w.write_record([m[0].to_string(), format_f64(*v)])?,
            _ => w.write_record([m[0].to_string(), m[1].to_string(), format_f64(*v)])?,
        }
    }
    w.flush().map_err(|e| Error::Csv(e.to_string()))?;
    Ok(())
}

/// Reads a GridFunction on `grid`. Rows may come in any order but every cell
/// must appear exactly once.
pub fn read_csv<R: Read>(grid: Grid, input: R) -> Result<GridFunction> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let expected: &[&str] = match grid.dim() {
        1 => &["index", "value"],
        _ => &["i", "j", "value"],
    };
    if headers.iter().map(str::trim).ne(expected.iter().copied()) {
        return Err(Error::Csv(format!(
            "expected header {}, found {}",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut values = vec![f64::NAN; grid.len()];
    let mut seen = vec![false; grid.len()];
    for (line, record) in r.records().enumerate() {
        let record = record?;
        let field = |i: usize| record.get(i).map(str::trim).unwrap_or("");
        let parse_index = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Csv(format!("row {}: bad index {s:?}", line + 1)))
        };
        let (cell, raw) = match grid.dim() {
            1 => (vec![parse_index(field(0))?], field(1)),
            _ => (vec![parse_index(field(0))?, parse_index(field(1))?], field(2)),
        };
        let idx = grid.index(&cell)?;
        let value = raw
            .parse::<f64>()
            .map_err(|_| Error::Csv(format!("row {}: bad value {raw:?}", line + 1)))?;
        if seen[idx] {
            return Err(Error::Csv(format!("row {}: duplicate cell {cell:?}", line + 1)));
        }
        seen[idx] = true;
        values[idx] = value;
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(Error::Csv(format!("missing cell {:?}", grid.multi_index(missing))));
    }
    GridFunction::new(grid, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn writes_header_and_full_precision() {
        let g = Grid::unit(1, 2).unwrap();
        let f = GridFunction::new(g, vec![0.1, 1.0 / 3.0]).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,value");
        assert_eq!(lines[1], "0,1.0000000000000001e-1");
        assert_eq!(lines.len(), 3);
    }

    #[test]
    fn round_trips_two_dimensional() {
        let g = Grid::unit(2, 3).unwrap();
        let f = GridFunction::sample(g, |x| (x[0] * 7.0).sin() + x[1].powf(0.3)).unwrap();
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        assert!(buf.starts_with(b"i,j,value\n"));
        let back = read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_missing_and_duplicate_cells() {
        let g = Grid::unit(1, 2).unwrap();
        assert!(read_csv(g, "index,value\n0,1\n".as_bytes()).is_err());
        assert!(read_csv(g, "index,value\n0,1\n0,2\n".as_bytes()).is_err());
        assert!(read_csv(g, "i,value\n0,1\n1,2\n".as_bytes()).is_err());
        assert!(read_csv(g, "index,value\n0,1\n2,2\n".as_bytes()).is_err());
    }
}
