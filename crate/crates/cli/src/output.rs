use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use tempfile::NamedTempFile;

use crate::error::{CliError, Result};

/// `x` rounded to 15 significant digits, printed in its shortest form.
pub fn sig15(x: f64) -> String {
    let rounded: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
    exact(rounded)
}

pub fn complex_sig15(z: Complex64) -> String {
    format!("{} {}", sig15(z.re), sig15(z.im))
}

/// Shortest round-trip representation, with `-0` folded into `0` and
/// exponent notation outside `[1e-5, 1e16)`.
pub fn exact(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else if (1e-5..1e16).contains(&x.abs()) || !x.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

/// `t,eta_re,eta_im` rows.
pub fn density_csv(grid: &[f64], values: &[Complex64]) -> String {
    let mut s = String::from("t,eta_re,eta_im\n");
    for (t, v) in grid.iter().zip(values) {
        s.push_str(&format!("{},{},{}\n", exact(*t), exact(v.re), exact(v.im)));
    }
    s
}

/// Files staged next to their destinations and renamed together only once
/// every one has been written.
#[derive(Default)]
pub struct StagedFiles {
    staged: Vec<(NamedTempFile, PathBuf)>,
}

impl StagedFiles {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn stage(&mut self, path: impl AsRef<Path>, contents: &[u8]) -> Result<()> {
        let path = path.as_ref();
        let err = |source| CliError::Write {
            path: path.display().to_string(),
            source,
        };
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
        tmp.write_all(contents).map_err(err)?;
        tmp.flush().map_err(err)?;
        self.staged.push((tmp, path.to_path_buf()));
        Ok(())
    }

    pub fn commit(self) -> Result<()> {
        for (tmp, path) in self.staged {
            tmp.persist(&path).map_err(|e| CliError::Write {
                path: path.display().to_string(),
                source: e.error,
            })?;
        }
        Ok(())
    }
}
