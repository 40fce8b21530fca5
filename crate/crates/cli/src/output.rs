//! All-or-nothing file output: every file is staged next to its target and
//! renamed into place only after all of them were written.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

fn staging_path(target: &Path) -> PathBuf {
    let name = target
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    target.with_file_name(format!(".{name}.{}.partial", std::process::id()))
}

fn stage(target: &Path, data: &[u8]) -> io::Result<PathBuf> {
    let tmp = staging_path(target);
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()
    })();
    match result {
        Ok(()) => Ok(tmp),
        Err(e) => {
            let _ = fs::remove_file(&tmp);
            Err(e)
        }
    }
}

/// Writes every `(path, bytes)` pair or none of them.
pub fn write_all_or_nothing(files: &[(PathBuf, Vec<u8>)]) -> io::Result<()> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, data) in files {
        match stage(path, data) {
            Ok(tmp) => staged.push((tmp, path.clone())),
            Err(e) => {
                for (tmp, _) in &staged {
                    let _ = fs::remove_file(tmp);
                }
                return Err(io::Error::new(e.kind(), format!("{}: {e}", path.display())));
            }
        }
    }
    for i in 0..staged.len() {
        if let Err(e) = fs::rename(&staged[i].0, &staged[i].1) {
            for (_, done) in &staged[..i] {
                let _ = fs::remove_file(done);
            }
            for (tmp, _) in &staged[i..] {
                let _ = fs::remove_file(tmp);
            }
            return Err(io::Error::new(e.kind(), format!("{}: {e}", staged[i].1.display())));
        }
    }
    Ok(())
}
