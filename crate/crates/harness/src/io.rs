use std::io::Write;
use std::path::Path;

use crate::error::{HarnessError, Result};

/// Writes `contents` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| HarnessError::data(dir.display(), e))?;
    let mut tmp =
        tempfile::NamedTempFile::new_in(dir).map_err(|e| HarnessError::data(dir.display(), e))?;
    tmp.write_all(contents)
        .map_err(|e| HarnessError::data(path.display(), e))?;
    tmp.persist(path)
        .map_err(|e| HarnessError::data(path.display(), e.error))?;
    Ok(())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| HarnessError::data(path.display(), e))
}

/// Formats an optional number for CSV output; undefined values are written as `null`.
pub fn cell(value: Option<f64>) -> String {
    value.map_or_else(|| "null".to_string(), |v| v.to_string())
}

pub fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)
        .map_err(|e| HarnessError::Internal(e.to_string()))?;
    for row in rows {
        w.write_record(row)
            .map_err(|e| HarnessError::Internal(e.to_string()))?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_content() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "two");
        assert_eq!(
            std::fs::read_dir(path.parent().unwrap()).unwrap().count(),
            1
        );
    }

    #[test]
    fn nulls_are_explicit() {
        assert_eq!(cell(None), "null");
        assert_eq!(cell(Some(0.25)), "0.25");
        let bytes = csv_bytes(&["a", "b"], &[vec!["1".into(), cell(None)]]).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "a,b\n1,null\n");
    }
}
