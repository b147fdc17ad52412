use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::commands::{Failure, Status};

/// Where a command's files go: a directory, or standard output.
pub struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    pub fn new(dir: Option<&Path>) -> Result<Self, Failure> {
        if let Some(d) = dir {
            fs::create_dir_all(d).map_err(|e| io_failure(d, e))?;
        }
        Ok(Self {
            dir: dir.map(Path::to_path_buf),
        })
    }

    pub fn to_dir(&self) -> bool {
        self.dir.is_some()
    }

    /// Writes `name` in the output directory, or to standard output when
    /// `always` is set and there is no directory.
    pub fn emit(
        &self,
        name: &str,
        always: bool,
        body: impl FnOnce(&mut dyn Write) -> hrflow::Result<()>,
    ) -> Result<(), Failure> {
        match &self.dir {
            Some(d) => {
                let path = d.join(name);
                let file = File::create(&path).map_err(|e| io_failure(&path, e))?;
                let mut w = BufWriter::new(file);
                body(&mut w).map_err(Failure::from)?;
                w.flush().map_err(|e| io_failure(&path, e))
            }
            None if always => {
                let stdout = io::stdout();
                let mut w = BufWriter::new(stdout.lock());
                body(&mut w).map_err(Failure::from)?;
                w.flush().map_err(|e| Failure::new(Status::Io, e.to_string()))
            }
            None => Ok(()),
        }
    }
}

pub fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::new(Status::Io, format!("{}: {e}", path.display()))
}
