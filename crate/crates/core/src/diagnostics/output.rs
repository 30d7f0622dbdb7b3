//! Record sinks: CSV (fixed column order) and JSON lines.

use std::io::Write;

use super::record::DiagnosticsRecord;
use crate::{Error, Result};

/// Consumer of the record stream of a run.
pub trait RecordSink {
    fn emit(&mut self, record: &DiagnosticsRecord) -> Result<()>;

    fn finish(&mut self) -> Result<()> {
        Ok(())
    }
}

impl RecordSink for Vec<DiagnosticsRecord> {
    fn emit(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        self.push(record.clone());
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(e) => Error::Io(e),
        other => Error::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

/// One CSV row per record; the header is written with the first record.
/// Numbers use the shortest round-trip representation.
pub struct CsvSink<W: Write> {
    writer: csv::Writer<W>,
    header_written: bool,
}

impl<W: Write> CsvSink<W> {
    pub fn new(w: W) -> Self {
        CsvSink {
            writer: csv::Writer::from_writer(w),
            header_written: false,
        }
    }

    /// Continues an existing table: no header is written.
    pub fn appending(w: W) -> Self {
        CsvSink {
            writer: csv::Writer::from_writer(w),
            header_written: true,
        }
    }

    pub fn into_inner(self) -> Result<W> {
        self.writer
            .into_inner()
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
    }
}

impl<W: Write> RecordSink for CsvSink<W> {
    fn emit(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        if !self.header_written {
            let r_list: Vec<f64> = record.xr.iter().map(|e| e.r).collect();
            self.writer
                .write_record(DiagnosticsRecord::columns(&r_list))
                .map_err(csv_err)?;
            self.header_written = true;
        }
        self.writer.write_record(record.cells()).map_err(csv_err)
    }

    fn finish(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// One JSON object per line.
pub struct JsonlSink<W: Write> {
    writer: W,
}

impl<W: Write> JsonlSink<W> {
    pub fn new(writer: W) -> Self {
        JsonlSink { writer }
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}

impl<W: Write> RecordSink for JsonlSink<W> {
    fn emit(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        serde_json::to_writer(&mut self.writer, record)
            .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
        self.writer.write_all(b"\n")?;
        Ok(())
    }

    fn finish(&mut self) -> Result<()> {
        self.writer.flush()?;
        Ok(())
    }
}

/// Forwards every record to several sinks in order.
pub struct TeeSink<'a> {
    sinks: Vec<&'a mut dyn RecordSink>,
}

impl<'a> TeeSink<'a> {
    pub fn new(sinks: Vec<&'a mut dyn RecordSink>) -> Self {
        TeeSink { sinks }
    }
}

impl RecordSink for TeeSink<'_> {
    fn emit(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        self.sinks.iter_mut().try_for_each(|s| s.emit(record))
    }

    fn finish(&mut self) -> Result<()> {
        self.sinks.iter_mut().try_for_each(|s| s.finish())
    }
}
