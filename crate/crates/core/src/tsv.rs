//! TSV triple files: `row<TAB>col<TAB>value<LF>`, no header, no escaping.
//!
//! CRLF line endings are accepted on input; output always uses LF.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::assoc::{check_key, Triple, Value};
use crate::error::{Error, Result};

pub fn write_tsv<W: Write>(triples: &[Triple], mut out: W) -> Result<usize> {
    for (i, t) in triples.iter().enumerate() {
        t.validate(i)?;
        writeln!(out, "{}\t{}\t{}", t.row, t.col, t.val)?;
    }
    out.flush()?;
    Ok(triples.len())
}

/// Writes `triples` in input order; returns the number written. Keys are
/// validated before the file is created.
pub fn save_tsv(triples: &[Triple], path: impl AsRef<Path>) -> Result<usize> {
    for (i, t) in triples.iter().enumerate() {
        t.validate(i)?;
    }
    write_tsv(triples, BufWriter::new(File::create(path)?))
}

pub fn parse_line(line: &str, line_no: usize) -> Result<Triple> {
    let err = |reason: String| Error::Parse {
        line: line_no,
        reason,
    };
    let line = line.strip_suffix('\r').unwrap_or(line);
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(err(format!("expected 3 tab-separated fields, found {}", fields.len())));
    }
    for key in &fields[..2] {
        check_key(key).map_err(|r| err(r.to_owned()))?;
    }
    let val: Value = fields[2]
        .parse()
        .map_err(|e| err(format!("value {:?} is not an integer: {e}", fields[2])))?;
    Ok(Triple::new(fields[0], fields[1], val))
}

pub fn read_tsv<R: BufRead>(input: R) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (i, line) in input.lines().enumerate() {
        out.push(parse_line(&line?, i + 1)?);
    }
    Ok(out)
}

/// Parses a triple file in file order. Errors carry the 1-based line.
pub fn load_tsv(path: impl AsRef<Path>) -> Result<Vec<Triple>> {
    read_tsv(BufReader::new(File::open(path)?))
}

/// A single file, or every `*.tsv` file in a directory in name order.
pub fn input_files(path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    if !path.is_dir() {
        return Ok(vec![path.to_owned()]);
    }
    let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
        .map(|e| e.map(|e| e.path()))
        .collect::<std::io::Result<_>>()?;
    files.retain(|p| p.is_file() && p.extension().is_some_and(|e| e == "tsv"));
    files.sort();
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn format() {
        let mut buf = Vec::new();
        assert_eq!(write_tsv(&[Triple::new("a", "b", 3)], &mut buf).unwrap(), 1);
        assert_eq!(buf, b"a\tb\t3\n");
        let mut buf = Vec::new();
        assert_eq!(write_tsv(&[], &mut buf).unwrap(), 0);
        assert!(buf.is_empty());
    }

    #[test]
    fn parse() {
        assert_eq!(read_tsv(&b"a\tb\t3\n"[..]).unwrap(), vec![Triple::new("a", "b", 3)]);
        assert_eq!(
            read_tsv(&b"a\tb\t-3\r\nc\td\t4\r\n"[..]).unwrap(),
            vec![Triple::new("a", "b", -3), Triple::new("c", "d", 4)]
        );
        assert!(read_tsv(&b""[..]).unwrap().is_empty());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let cases: [(&[u8], usize, &str); 4] = [
            (b"a\tb\n", 1, "fields"),
            (b"a\tb\t1\na\tb\tx\n", 2, "integer"),
            (b"a\tb\t1\n\tb\t1\n", 2, "empty"),
            (b"a\tb\t1\tz\n", 1, "fields"),
        ];
        for (input, line, needle) in cases {
            match read_tsv(input) {
                Err(Error::Parse { line: l, reason }) => {
                    assert_eq!(l, line);
                    assert!(reason.contains(needle), "{reason}");
                }
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn save_rejects_unencodable_keys() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.tsv");
        let bad = [Triple::new("a", "b", 1), Triple::new("a\tb", "c", 1)];
        assert!(matches!(save_tsv(&bad, &path), Err(Error::MalformedKey { index: 1, .. })));
        assert!(!path.exists());
    }

    #[test]
    fn directory_input_is_sorted() {
        let dir = tempfile::tempdir().unwrap();
        for name in ["b.tsv", "a.tsv", "notes.txt"] {
            std::fs::write(dir.path().join(name), "").unwrap();
        }
        let names: Vec<String> = input_files(dir.path())
            .unwrap()
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        assert_eq!(names, ["a.tsv", "b.tsv"]);
    }

    proptest! {
        #[test]
        fn round_trip(ts in prop::collection::vec(
            ("[^\t\r\n]{1,8}", "[^\t\r\n]{1,8}", any::<i64>())
                .prop_map(|(r, c, v)| Triple::new(r, c, v)),
            0..50,
        )) {
            let mut buf = Vec::new();
            write_tsv(&ts, &mut buf).unwrap();
            prop_assert_eq!(read_tsv(&buf[..]).unwrap(), ts);
        }
    }
}
