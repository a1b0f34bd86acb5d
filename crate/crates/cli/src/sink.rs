//! Ordered, incrementally flushed CSV output with resume support.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, CliResult};
use crate::record::{ResultRecord, HEADER};

enum Target {
    File { file: BufWriter<File>, path: PathBuf },
    Stdout(std::io::Stdout),
}

/// Writes whole work items in plan order and flushes after each batch.
pub struct Sink {
    target: Target,
}

/// Rows already present in a resumed output file.
pub struct Resumed {
    pub sink: Sink,
    pub existing: Vec<ResultRecord>,
}

impl Sink {
    pub fn stdout() -> CliResult<Self> {
        let mut s = Sink { target: Target::Stdout(std::io::stdout()) };
        s.write_line(&HEADER.join(","))?;
        Ok(s)
    }

    /// Creates (truncating) `path` and writes the header.
    pub fn create(path: &Path) -> CliResult<Self> {
        let file = File::create(path).map_err(CliError::io(path))?;
        let mut s = Sink { target: Target::File { file: BufWriter::new(file), path: path.to_path_buf() } };
        s.write_line(&HEADER.join(","))?;
        s.flush()?;
        Ok(s)
    }

    /// Opens `path` for appending after its complete rows.
    ///
    /// `keep_rows` receives the parsed complete rows and returns how many of
    /// them to keep (a whole number of work items); the file is truncated
    /// after those. A missing or empty file starts a fresh run.
    pub fn resume(path: &Path, keep_rows: impl FnOnce(&[ResultRecord]) -> CliResult<usize>) -> CliResult<Resumed> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => String::new(),
            Err(e) => return Err(CliError::io(path)(e)),
        };
        if text.is_empty() {
            return Ok(Resumed { sink: Sink::create(path)?, existing: Vec::new() });
        }
        let mut lines = text.split_inclusive('\n').peekable();
        let header = lines.next().unwrap_or_default();
        if header.trim_end() != HEADER.join(",") {
            return Err(CliError::Input { path: path.to_path_buf(), message: "cannot resume: unexpected header".into() });
        }
        let mut offsets = vec![header.len()];
        let mut rows = Vec::new();
        while let Some(line) = lines.next() {
            let last = lines.peek().is_none();
            if !line.ends_with('\n') {
                break; // torn final line from an interrupted write
            }
            let fields: Vec<&str> = line.trim_end().split(',').collect();
            let rec = match ResultRecord::from_fields(&fields) {
                Ok(rec) => rec,
                Err(_) if last => break, // torn final line whose tail reached the disk
                Err(e) => {
                    return Err(CliError::Input {
                        path: path.to_path_buf(),
                        message: format!("cannot resume: row {}: {e}", rows.len() + 2),
                    })
                }
            };
            rows.push(rec);
            offsets.push(offsets.last().unwrap() + line.len());
        }
        let keep = keep_rows(&rows)?;
        rows.truncate(keep);
        let file = OpenOptions::new().write(true).open(path).map_err(CliError::io(path))?;
        file.set_len(offsets[keep] as u64).map_err(CliError::io(path))?;
        let mut file = BufWriter::new(file);
        use std::io::Seek;
        file.seek(std::io::SeekFrom::End(0)).map_err(CliError::io(path))?;
        Ok(Resumed { sink: Sink { target: Target::File { file, path: path.to_path_buf() } }, existing: rows })
    }

    fn write_line(&mut self, line: &str) -> CliResult<()> {
        match &mut self.target {
            Target::File { file, path } => writeln!(file, "{line}").map_err(CliError::io(path.as_path())),
            Target::Stdout(out) => writeln!(out, "{line}").map_err(CliError::io("<stdout>")),
        }
    }

    pub fn write(&mut self, rows: &[ResultRecord]) -> CliResult<()> {
        for r in rows {
            self.write_line(&r.to_fields().join(","))?;
        }
        Ok(())
    }

    pub fn flush(&mut self) -> CliResult<()> {
        match &mut self.target {
            Target::File { file, path } => file.flush().map_err(CliError::io(path.as_path())),
            Target::Stdout(out) => out.flush().map_err(CliError::io("<stdout>")),
        }
    }
}
