//! CSV and JSON-lines record files and the skipped-prime sidecar.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Number;

use super::{CoverRecord, ExperimentError, Skipped};

pub const CSV_HEADER: [&str; 12] = [
    "group",
    "p",
    "f",
    "norm",
    "ideal",
    "index",
    "transitive",
    "surjective",
    "betti",
    "log_torsion",
    "volume",
    "ratio",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Jsonl,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Format, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" => Ok(Format::Jsonl),
            _ => Err(format!("unknown format {s:?}; expected csv or jsonl")),
        }
    }
}

impl Format {
    /// Guess from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl") | Some("json") => Format::Jsonl,
            _ => Format::Csv,
        }
    }
}

/// JSON form: the decimal fields become numbers carrying the same digits.
#[derive(Serialize, Deserialize)]
struct JsonRecord {
    group: String,
    p: u64,
    f: usize,
    norm: u64,
    ideal: String,
    index: u64,
    transitive: bool,
    surjective: bool,
    betti: u64,
    log_torsion: Number,
    volume: Number,
    ratio: Number,
}

fn number(s: &str) -> Number {
    Number::from_str(s).expect("formatted decimals are valid JSON numbers")
}

impl From<&CoverRecord> for JsonRecord {
    fn from(r: &CoverRecord) -> JsonRecord {
        JsonRecord {
            group: r.group.clone(),
            p: r.p,
            f: r.f,
            norm: r.norm,
            ideal: r.ideal.clone(),
            index: r.index,
            transitive: r.transitive,
            surjective: r.surjective,
            betti: r.betti,
            log_torsion: number(&r.log_torsion),
            volume: number(&r.volume),
            ratio: number(&r.ratio),
        }
    }
}

impl From<JsonRecord> for CoverRecord {
    fn from(r: JsonRecord) -> CoverRecord {
        CoverRecord {
            group: r.group,
            p: r.p,
            f: r.f,
            norm: r.norm,
            ideal: r.ideal,
            index: r.index,
            transitive: r.transitive,
            surjective: r.surjective,
            betti: r.betti,
            log_torsion: r.log_torsion.to_string(),
            volume: r.volume.to_string(),
            ratio: r.ratio.to_string(),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExperimentError + '_ {
    move |source| ExperimentError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn records_err(path: &Path, msg: impl ToString) -> ExperimentError {
    ExperimentError::Records {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    }
}

fn csv_writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

/// Incremental writer; records are flushed as they are written.
pub struct RecordWriter {
    path: PathBuf,
    inner: Inner,
}

enum Inner {
    Csv(csv::Writer<File>),
    Jsonl(BufWriter<File>),
}

impl RecordWriter {
    /// Start a new file (with header), or append to an existing one.
    pub fn open(path: &Path, format: Format, append: bool) -> Result<RecordWriter, ExperimentError> {
        let file = if append {
            OpenOptions::new().append(true).open(path)
        } else {
            File::create(path)
        }
        .map_err(io_err(path))?;
        let inner = match format {
            Format::Csv => {
                let mut w = csv_writer(file);
                if !append {
                    w.write_record(CSV_HEADER).map_err(|e| records_err(path, e))?;
                    w.flush().map_err(io_err(path))?;
                }
                Inner::Csv(w)
            }
            Format::Jsonl => Inner::Jsonl(BufWriter::new(file)),
        };
        Ok(RecordWriter {
            path: path.to_path_buf(),
            inner,
        })
    }

    pub fn write(&mut self, rec: &CoverRecord) -> Result<(), ExperimentError> {
        let path = &self.path;
        match &mut self.inner {
            Inner::Csv(w) => {
                w.serialize(rec).map_err(|e| records_err(path, e))?;
                w.flush().map_err(io_err(path))
            }
            Inner::Jsonl(w) => {
                serde_json::to_writer(&mut *w, &JsonRecord::from(rec)).map_err(|e| records_err(path, e))?;
                w.write_all(b"\n").map_err(io_err(path))?;
                w.flush().map_err(io_err(path))
            }
        }
    }

    pub fn finish(self) -> Result<(), ExperimentError> {
        let path = &self.path;
        match self.inner {
            Inner::Csv(mut w) => w.flush().map_err(io_err(path)),
            Inner::Jsonl(mut w) => w.flush().map_err(io_err(path)),
        }
    }
}

/// Replace the file with exactly these records (via a temporary file).
pub fn write_records(path: &Path, format: Format, records: &[CoverRecord]) -> Result<(), ExperimentError> {
    let tmp = path.with_extension("tmp");
    let mut w = RecordWriter::open(&tmp, format, false)?;
    for r in records {
        w.write(r)?;
    }
    w.finish()?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

pub fn read_records(path: &Path, format: Format) -> Result<Vec<CoverRecord>, ExperimentError> {
    let file = File::open(path).map_err(io_err(path))?;
    match format {
        Format::Csv => {
            let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
            let header = r.headers().map_err(|e| records_err(path, e))?;
            if header.iter().ne(CSV_HEADER) {
                return Err(records_err(path, format!("unexpected header {header:?}")));
            }
            r.deserialize()
                .collect::<Result<Vec<CoverRecord>, _>>()
                .map_err(|e| records_err(path, e))
        }
        Format::Jsonl => {
            let mut out = Vec::new();
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err(path))?;
                if line.trim().is_empty() {
                    continue;
                }
                let rec: JsonRecord =
                    serde_json::from_str(&line).map_err(|e| records_err(path, format!("line {}: {e}", i + 1)))?;
                out.push(rec.into());
            }
            Ok(out)
        }
    }
}

/// Sidecar listing the primes a sweep skipped: `<out>.skipped`.
pub fn skipped_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_os_string();
    s.push(".skipped");
    PathBuf::from(s)
}

pub fn write_skipped(path: &Path, skipped: &[Skipped]) -> Result<(), ExperimentError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv_writer(file);
    let err = |e: csv::Error| records_err(path, e);
    w.write_record(["group", "p", "reason"]).map_err(err)?;
    for s in skipped {
        w.write_record([s.group.clone(), s.p.to_string(), s.reason_text()])
            .map_err(err)?;
    }
    w.flush().map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CoverRecord {
        CoverRecord {
            group: "H2".into(),
            p: 409,
            f: 1,
            norm: 409,
            ideal: "z=12;s=77".into(),
            index: 410,
            transitive: true,
            surjective: true,
            betti: 0,
            log_torsion: "7.4567890123456789012".into(),
            volume: "140.6313610660".into(),
            ratio: "0.053022877591751093980".into(),
        }
    }

    #[test]
    fn csv_and_jsonl_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        for (name, format) in [("r.csv", Format::Csv), ("r.jsonl", Format::Jsonl)] {
            let path = dir.path().join(name);
            write_records(&path, format, &[sample(), sample()]).unwrap();
            let back = read_records(&path, format).unwrap();
            assert_eq!(back, vec![sample(), sample()]);
        }
        let text = std::fs::read_to_string(dir.path().join("r.csv")).unwrap();
        let first = text.lines().next().unwrap();
        assert_eq!(first, "group,p,f,norm,ideal,index,transitive,surjective,betti,log_torsion,volume,ratio");
        assert!(!text.contains('\r'));
        let json = std::fs::read_to_string(dir.path().join("r.jsonl")).unwrap();
        assert!(json.starts_with(r#"{"group":"H2","p":409,"#));
        assert!(json.contains(r#""ratio":0.053022877591751093980}"#));
    }

    #[test]
    fn bad_header_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.csv");
        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert!(read_records(&path, Format::Csv).is_err());
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(skipped_path(Path::new("out/r.csv")), PathBuf::from("out/r.csv.skipped"));
    }
}
