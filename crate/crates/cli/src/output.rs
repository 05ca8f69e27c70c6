//! CSV and report files.

use serde_json::Value;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

/// Writes equal-length columns under a one-line header, 17 significant digits.
pub fn write_csv(path: &Path, header: &[&str], columns: &[&[f64]]) -> std::io::Result<()> {
    let rows = columns.first().map_or(0, |c| c.len());
    debug_assert!(columns.iter().all(|c| c.len() == rows));
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for i in 0..rows {
        for (j, c) in columns.iter().enumerate() {
            if j > 0 {
                w.write_all(b",")?;
            }
            write!(w, "{:.16e}", c[i])?;
        }
        w.write_all(b"\n")?;
    }
    w.flush()
}

pub fn write_report(path: &Path, report: &Value) -> std::io::Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, report)?;
    w.write_all(b"\n")?;
    w.flush()
}

/// File name for a snapshot at time `t`.
pub fn profile_name(t: f64) -> String {
    format!("profiles_{t:.3}.csv")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_uses_full_precision() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_csv(&p, &["x", "y"], &[&[0.1, 2.0], &[1.0 / 3.0, -0.0]]).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,y");
        assert_eq!(lines[1], "1.0000000000000001e-1,3.3333333333333331e-1");
        let back: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(back, 1.0 / 3.0);
    }

    #[test]
    fn profile_names() {
        assert_eq!(profile_name(0.0), "profiles_0.000.csv");
        assert_eq!(profile_name(12.5), "profiles_12.500.csv");
    }
}
