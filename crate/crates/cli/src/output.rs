use std::io::Write;
use std::path::Path;

use crate::error::Failure;

/// Writes `bytes` to `path` through a temporary sibling and a rename, or to
/// stdout when there is no path.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
        }
        Some(path) => {
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".tmp");
            let wrap = |e: std::io::Error| Failure::io(anyhow::anyhow!("cannot write {}: {e}", path.display()));
            std::fs::write(&tmp, bytes).map_err(wrap)?;
            std::fs::rename(&tmp, path).map_err(wrap)?;
        }
    }
    Ok(())
}
