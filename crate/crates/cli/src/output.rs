use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::Result;

pub(crate) fn command_dir(root: &Path, command: &str) -> Result<PathBuf> {
    let dir = root.join(command);
    fs::create_dir_all(&dir)?;
    Ok(dir)
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Pretty JSON with a trailing newline. Struct fields serialize in
/// declaration order, which keeps key order stable.
pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
