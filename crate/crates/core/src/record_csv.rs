//! Canonical record CSV: UTF-8, header row, one packet per line.
//!
//! Floats are written in shortest round-trip form, so write followed by read
//! reproduces records field for field.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::packet::PacketRecord;

pub const HEADER: [&str; 9] = [
    "timestamp",
    "src_addr",
    "src_port",
    "dst_addr",
    "dst_port",
    "transport",
    "ip_total_len",
    "payload_len",
    "direction",
];

pub fn write_records<W: Write>(writer: W, records: &[PacketRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(writer);
    // Explicit header so an empty record list still round-trips.
    w.write_record(HEADER).map_err(csv_io_error)?;
    for rec in records {
        w.serialize(rec).map_err(csv_io_error)?;
    }
    w.flush().map_err(|source| Error::Io {
        path: "<writer>".into(),
        source,
    })?;
    Ok(())
}

pub fn write_records_path(path: &Path, records: &[PacketRecord]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_records(std::io::BufWriter::new(file), records)
}

pub fn read_records<R: Read>(reader: R, origin: &Path) -> Result<Vec<PacketRecord>> {
    let mut r = csv::Reader::from_reader(reader);
    {
        let headers = r.headers().map_err(|e| Error::Malformed {
            path: origin.to_path_buf(),
            detail: format!("header: {e}"),
        })?;
        if headers.iter().collect::<Vec<_>>() != HEADER {
            return Err(Error::Malformed {
                path: origin.to_path_buf(),
                detail: format!("unexpected header {:?}", headers),
            });
        }
    }
    let mut records = Vec::new();
    for row in r.deserialize::<PacketRecord>() {
        let rec = row.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line().to_string())
                .unwrap_or_else(|| "?".into());
            Error::Malformed {
                path: origin.to_path_buf(),
                detail: format!("line {line}: {e}"),
            }
        })?;
        if rec.payload_len > rec.ip_total_len {
            return Err(Error::Malformed {
                path: origin.to_path_buf(),
                detail: format!(
                    "payload_len {} exceeds ip_total_len {}",
                    rec.payload_len, rec.ip_total_len
                ),
            });
        }
        records.push(rec);
    }
    Ok(records)
}

pub fn read_records_path(path: &Path) -> Result<Vec<PacketRecord>> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_records(std::io::BufReader::new(file), path)
}

fn csv_io_error(e: csv::Error) -> Error {
    Error::Io {
        path: "<writer>".into(),
        source: std::io::Error::other(e),
    }
}
