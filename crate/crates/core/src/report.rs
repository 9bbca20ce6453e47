//! CSV reporting: every row carries the fixed parameter snapshot and a
//! build identifier so result files are self-describing and reproducible.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::weights::WeightParams;

pub const BUILD_ID: &str = concat!("carleman-lab-", env!("CARGO_PKG_VERSION"));

/// 17 significant digits: enough to round-trip any f64 exactly.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

const SNAPSHOT_COLS: [&str; 12] = [
    "alpha_plus",
    "alpha_minus",
    "beta",
    "s",
    "s0",
    "gamma0",
    "epsilon",
    "delta",
    "tau_base",
    "tau0",
    "r0",
    "seed",
];

pub struct CsvReport {
    writer: BufWriter<File>,
    pub path: PathBuf,
    columns: usize,
    snapshot: Vec<String>,
}

impl CsvReport {
    /// Opens `<out_dir>/<name>.csv` and writes the header: suite-specific
    /// columns, then the parameter snapshot, then the build identifier.
    pub fn create(
        out_dir: &Path,
        name: &str,
        columns: &[&str],
        params: &WeightParams,
        seed: u64,
    ) -> Result<Self> {
        std::fs::create_dir_all(out_dir)
            .map_err(|e| Error::Config(format!("cannot create {}: {e}", out_dir.display())))?;
        let path = out_dir.join(format!("{name}.csv"));
        let file = File::create(&path)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))?;
        let mut writer = BufWriter::new(file);
        let mut header: Vec<&str> = columns.to_vec();
        header.extend_from_slice(&SNAPSHOT_COLS);
        header.push("build");
        writeln!(writer, "{}", header.join(","))?;
        let snapshot = vec![
            fmt_float(params.alpha_plus),
            fmt_float(params.alpha_minus),
            fmt_float(params.beta),
            fmt_float(params.s),
            fmt_float(params.s0),
            fmt_float(params.gamma[0]),
            fmt_float(params.epsilon),
            fmt_float(params.delta),
            fmt_float(params.tau),
            fmt_float(params.tau0),
            fmt_float(params.r0),
            seed.to_string(),
        ];
        Ok(CsvReport {
            writer,
            path,
            columns: columns.len(),
            snapshot,
        })
    }

    pub fn row(&mut self, cells: &[String]) -> Result<()> {
        assert_eq!(cells.len(), self.columns, "row width mismatch");
        let mut all = cells.to_vec();
        all.extend(self.snapshot.iter().cloned());
        all.push(BUILD_ID.to_string());
        writeln!(self.writer, "{}", all.join(","))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_roundtrip() {
        for v in [1.0, -0.1, std::f64::consts::PI, 1e-300, 3.5e200] {
            assert_eq!(fmt_float(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn writes_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = WeightParams::defaults(1);
        let mut r = CsvReport::create(dir.path(), "demo", &["a", "b"], &p, 7).unwrap();
        r.row(&["1".into(), fmt_float(2.0)]).unwrap();
        let path = r.finish().unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("a,b,alpha_plus"));
        assert!(header.ends_with(",build"));
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), header.split(',').count());
        assert!(row.ends_with(BUILD_ID));
    }
}
