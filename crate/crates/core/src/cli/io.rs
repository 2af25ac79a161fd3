//! Dataset CSV files, atomic writes and content hashes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::learn::Dataset;
use crate::simulate::DatasetRow;

const LEADING: [&str; 6] = ["id", "q", "R", "pair_index", "pmf_index", "seed"];
const TRAILING: [&str; 2] = ["label", "exact_label"];

/// 17 significant digits: enough for an exact `f64` round trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// `path` with `suffix` appended to the full file name (`a.csv` → `a.csv.meta.json`).
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Writes several files only after all of their contents exist, so a
/// failure while building any of them leaves nothing behind.
pub fn write_all_atomic(files: &[(PathBuf, Vec<u8>)]) -> Result<()> {
    for (path, bytes) in files {
        write_atomic(path, bytes)?;
    }
    Ok(())
}

pub fn dataset_header(feature_names: &[String]) -> Vec<String> {
    LEADING.iter().map(|s| s.to_string()).chain(feature_names.iter().cloned()).chain(TRAILING.map(String::from)).collect()
}

/// CSV bytes for a dataset, LF line endings.
pub fn dataset_to_csv(rows: &[DatasetRow], feature_names: &[String]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    let write_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(dataset_header(feature_names)).map_err(write_err)?;
    for r in rows {
        if r.features.len() != feature_names.len() {
            return Err(Error::Dimension(format!("row {} has {} features", r.id, r.features.len())));
        }
        let mut rec = vec![
            r.id.to_string(),
            fmt_f64(r.q),
            fmt_f64(r.r),
            r.pair_index.to_string(),
            r.pmf_index.to_string(),
            r.seed.to_string(),
        ];
        rec.extend(r.features.iter().map(|&v| fmt_f64(v)));
        rec.push(fmt_f64(r.label));
        rec.push(fmt_f64(r.exact_label));
        w.write_record(&rec).map_err(write_err)?;
    }
    w.into_inner().map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

fn is_feature_name(name: &str) -> bool {
    let b = name.as_bytes();
    b.len() == 7
        && name.starts_with("s_k")
        && (b'0'..=b'2').contains(&b[3])
        && &name[4..6] == "_l"
        && (b'0'..=b'3').contains(&b[6])
}

/// Parses dataset CSV text. Errors name the first offending data row
/// (1-based, header excluded).
pub fn dataset_from_csv(bytes: &[u8]) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let header = rdr.headers().map_err(|e| Error::Parse(format!("header: {e}")))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    let n_fixed = LEADING.len() + TRAILING.len();
    if cols.len() <= n_fixed
        || cols[..LEADING.len()] != LEADING
        || cols[cols.len() - TRAILING.len()..] != TRAILING
    {
        return Err(Error::Parse(format!("unexpected dataset header: {}", cols.join(","))));
    }
    let feature_names: Vec<String> = cols[LEADING.len()..cols.len() - TRAILING.len()].iter().map(|s| s.to_string()).collect();
    if let Some(bad) = feature_names.iter().find(|n| !is_feature_name(n)) {
        return Err(Error::Parse(format!("unexpected feature column {bad:?}")));
    }
    let mut sorted = feature_names.clone();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != feature_names.len() {
        return Err(Error::Parse("duplicate feature columns".into()));
    }

    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row_no = i + 1;
        let bad = |what: String| Error::Parse(format!("row {row_no}: {what}"));
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != cols.len() {
            return Err(bad(format!("{} fields, expected {}", rec.len(), cols.len())));
        }
        let int = |k: usize| rec[k].parse::<u64>().map_err(|e| bad(format!("column {}: {e}", cols[k])));
        let float = |k: usize| -> Result<f64> {
            let v: f64 = rec[k].parse().map_err(|e| bad(format!("column {}: {e}", cols[k])))?;
            if !v.is_finite() {
                return Err(bad(format!("column {} is not finite", cols[k])));
            }
            Ok(v)
        };
        let nf = feature_names.len();
        rows.push(DatasetRow {
            id: int(0)? as usize,
            q: float(1)?,
            r: float(2)?,
            pair_index: int(3)? as usize,
            pmf_index: int(4)? as usize,
            seed: int(5)?,
            features: (0..nf).map(|k| float(LEADING.len() + k)).collect::<Result<_>>()?,
            label: float(LEADING.len() + nf)?,
            exact_label: float(LEADING.len() + nf + 1)?,
        });
    }
    if rows.is_empty() {
        return Err(Error::Parse("dataset has no rows".into()));
    }
    Dataset::new(rows, feature_names)
}

/// Reads a dataset file; also returns the SHA-256 of its bytes.
pub fn read_dataset(path: &Path) -> Result<(Dataset, String)> {
    let bytes = fs::read(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    let ds = dataset_from_csv(&bytes).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    Ok((ds, sha256_hex(&bytes)))
}

pub fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}
