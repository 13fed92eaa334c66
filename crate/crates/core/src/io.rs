//! Text and binary file formats.
//!
//! * edge list: one `u v` pair per line, 0-indexed, `#` comments;
//! * features: CSV with `n` rows of `m` numbers, optional header row;
//! * labels: one integer class per line;
//! * embeddings: CSV with a header of column labels (optionally led by
//!   `node_id`), or the binary `HOMEMB1` layout: magic, little-endian `u64`
//!   rows, `u64` columns, each label as `u64` byte length plus UTF-8 bytes,
//!   then row-major `f64` values.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::embed::EmbeddingMatrix;
use crate::error::{Error, Result};

pub const BINARY_MAGIC: &[u8; 7] = b"HOMEMB1";

fn read_text(path: &Path) -> Result<String> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(fs::read_to_string(path)?)
}

pub fn parse_edge_list(text: &str, source: &str) -> Result<Vec<(usize, usize)>> {
    let mut edges = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let mut next = || -> Result<usize> {
            parts
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::parse(source, i + 1, format!("expected `u v`, got `{line}`")))
        };
        let (u, v) = (next()?, next()?);
        if parts.next().is_some() {
            return Err(Error::parse(source, i + 1, format!("expected `u v`, got `{line}`")));
        }
        edges.push((u, v));
    }
    Ok(edges)
}

pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    parse_edge_list(&read_text(path)?, &path.display().to_string())
}

pub fn format_edge_list(edges: &[(usize, usize)]) -> String {
    edges.iter().map(|(u, v)| format!("{u} {v}\n")).collect()
}

/// Rows of a numeric CSV; a first row that does not parse is a header.
pub fn read_features(path: &Path) -> Result<Vec<Vec<f64>>> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
                    return Err(Error::parse(&source, i + 1, format!("non-finite feature {bad}")));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Error::parse(&source, i + 1, "non-numeric feature")),
        }
    }
    Ok(rows)
}

pub fn write_features(path: &Path, rows: &[Vec<f64>]) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    let m = rows.first().map_or(1, Vec::len);
    let header: Vec<String> = (0..m).map(|j| format!("f{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()?;
    Ok(())
}

pub fn parse_labels(text: &str, source: &str) -> Result<Vec<usize>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim()
                .parse()
                .map_err(|_| Error::parse(source, i + 1, format!("bad class label `{}`", l.trim())))
        })
        .collect()
}

pub fn read_labels(path: &Path) -> Result<Vec<usize>> {
    parse_labels(&read_text(path)?, &path.display().to_string())
}

pub fn write_labels(path: &Path, labels: &[usize]) -> Result<()> {
    let text: String = labels.iter().map(|y| format!("{y}\n")).collect();
    fs::write(path, text)?;
    Ok(())
}

/// A matrix without columns has no CSV form; use the binary format for it.
pub fn write_embedding_csv(path: &Path, e: &EmbeddingMatrix, node_ids: bool) -> Result<()> {
    if e.dim() == 0 {
        return Err(Error::InvalidInput("cannot write an embedding with no columns as CSV".into()));
    }
    let mut w = csv::Writer::from_path(path)?;
    let mut header: Vec<&str> = Vec::with_capacity(e.dim() + 1);
    if node_ids {
        header.push("node_id");
    }
    header.extend(e.labels().iter().map(String::as_str));
    w.write_record(&header)?;
    for i in 0..e.rows() {
        let mut record: Vec<String> = Vec::with_capacity(e.dim() + 1);
        if node_ids {
            record.push(i.to_string());
        }
        record.extend(e.row(i).iter().map(|x| x.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_embedding_csv(path: &Path) -> Result<EmbeddingMatrix> {
    let source = path.display().to_string();
    let text = read_text(path)?;
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut labels: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let skip = usize::from(labels.first().is_some_and(|l| l == "node_id"));
    labels.drain(..skip);
    let mut values = Vec::new();
    let mut rows = 0;
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        for cell in record.iter().skip(skip) {
            let x: f64 = cell
                .trim()
                .parse()
                .map_err(|_| Error::parse(&source, i + 2, format!("bad value `{cell}`")))?;
            if x.is_nan() {
                return Err(Error::parse(&source, i + 2, "NaN value"));
            }
            values.push(x);
        }
        rows += 1;
    }
    EmbeddingMatrix::new(rows, values, labels, source)
}

pub fn write_embedding_binary(path: &Path, e: &EmbeddingMatrix) -> Result<()> {
    let mut out = BufWriter::new(fs::File::create(path)?);
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(e.rows() as u64).to_le_bytes())?;
    out.write_all(&(e.dim() as u64).to_le_bytes())?;
    for label in e.labels() {
        out.write_all(&(label.len() as u64).to_le_bytes())?;
        out.write_all(label.as_bytes())?;
    }
    for x in e.values() {
        out.write_all(&x.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

struct ByteReader<'a> {
    rest: &'a [u8],
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, k: usize) -> Option<&'a [u8]> {
        if self.rest.len() < k {
            return None;
        }
        let (head, tail) = self.rest.split_at(k);
        self.rest = tail;
        Some(head)
    }

    fn u64(&mut self) -> Option<u64> {
        self.take(8).map(|b| u64::from_le_bytes(b.try_into().expect("8 bytes")))
    }
}

pub fn read_embedding_binary(path: &Path) -> Result<EmbeddingMatrix> {
    let source = path.display().to_string();
    let bad = |msg: &str| Error::parse(&source, 0, msg);
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    let mut r = ByteReader { rest: &bytes };
    if r.take(BINARY_MAGIC.len()) != Some(BINARY_MAGIC.as_slice()) {
        return Err(bad("missing HOMEMB1 magic"));
    }
    let truncated = || bad("truncated file");
    let rows = r.u64().ok_or_else(truncated)? as usize;
    let dim = r.u64().ok_or_else(truncated)? as usize;
    let mut labels = Vec::with_capacity(dim.min(1 << 16));
    for _ in 0..dim {
        let len = r.u64().ok_or_else(truncated)? as usize;
        let raw = r.take(len).ok_or_else(truncated)?;
        let label = std::str::from_utf8(raw).map_err(|_| bad("label is not UTF-8"))?;
        labels.push(label.to_string());
    }
    let count = rows.checked_mul(dim).ok_or_else(|| bad("matrix too large"))?;
    if r.rest.len() != count * 8 {
        return Err(bad("value block does not match the declared shape"));
    }
    let values = r
        .rest
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")))
        .collect();
    EmbeddingMatrix::new(rows, values, labels, source)
}

/// Reads either embedding format, picking binary when the magic matches.
pub fn read_embedding(path: &Path) -> Result<EmbeddingMatrix> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let mut head = [0u8; 7];
    let is_binary = fs::File::open(path)?.read_exact(&mut head).is_ok() && &head == BINARY_MAGIC;
    if is_binary {
        read_embedding_binary(path)
    } else {
        read_embedding_csv(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_list_parsing() {
        let edges = parse_edge_list("# comment\n0 1\n\n1\t2\n", "t").unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 2)]);
        assert!(matches!(parse_edge_list("0\n", "t"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_edge_list("0 1 2\n", "t"), Err(Error::Parse { .. })));
        assert!(matches!(parse_edge_list("a b\n", "t"), Err(Error::Parse { .. })));
    }

    #[test]
    fn features_with_and_without_header() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.csv");
        fs::write(&a, "x,y\n1,2\n3,4\n").unwrap();
        assert_eq!(read_features(&a).unwrap(), vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        fs::write(&a, "1,2\n3,4\n").unwrap();
        assert_eq!(read_features(&a).unwrap().len(), 2);
        fs::write(&a, "1,2\n3,z\n").unwrap();
        assert!(read_features(&a).is_err());
        assert!(matches!(read_features(&dir.path().join("missing.csv")), Err(Error::MissingFile(_))));
    }

    #[test]
    fn labels_parse() {
        assert_eq!(parse_labels("0\n2\n1\n", "t").unwrap(), vec![0, 2, 1]);
        assert!(parse_labels("0\n-1\n", "t").is_err());
    }

    #[test]
    fn binary_rejects_garbage() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.bin");
        fs::write(&p, b"HOMEMB1\x01").unwrap();
        assert!(read_embedding_binary(&p).is_err());
        fs::write(&p, b"NOTMAGIC").unwrap();
        assert!(read_embedding_binary(&p).is_err());
    }

    fn matrix_strategy() -> impl Strategy<Value = EmbeddingMatrix> {
        (0usize..6, 1usize..5).prop_flat_map(|(rows, dim)| {
            proptest::collection::vec(-1e12f64..1e12, rows * dim).prop_map(move |values| {
                let labels = (0..dim).map(|j| format!("tree{j}:01:ch{j}")).collect();
                EmbeddingMatrix::new(rows, values, labels, "").unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn embedding_files_round_trip(e in matrix_strategy(), node_ids in any::<bool>()) {
            let dir = tempfile::tempdir().unwrap();
            let csv_path = dir.path().join("e.csv");
            let bin_path = dir.path().join("e.bin");
            write_embedding_csv(&csv_path, &e, node_ids).unwrap();
            write_embedding_binary(&bin_path, &e).unwrap();
            for back in [read_embedding(&csv_path).unwrap(), read_embedding(&bin_path).unwrap()] {
                prop_assert_eq!(back.labels(), e.labels());
                prop_assert_eq!(back.values(), e.values());
            }
        }
    }
}
