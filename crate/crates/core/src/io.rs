//! Array files: newline-delimited decimal text, or raw little-endian `i64`
//! when the file name ends in `.bin`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{OhhcError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrayFormat {
    Text,
    Binary,
}

impl ArrayFormat {
    pub fn for_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("bin") => ArrayFormat::Binary,
            _ => ArrayFormat::Text,
        }
    }
}

pub fn read_array(path: &Path) -> Result<Vec<i64>> {
    let file = File::open(path)?;
    match ArrayFormat::for_path(path) {
        ArrayFormat::Text => parse_text(BufReader::new(file)),
        ArrayFormat::Binary => parse_binary(BufReader::new(file)),
    }
}

pub fn write_array(path: &Path, values: &[i64]) -> Result<()> {
    let out = BufWriter::new(File::create(path)?);
    match ArrayFormat::for_path(path) {
        ArrayFormat::Text => write_text(out, values),
        ArrayFormat::Binary => write_binary(out, values),
    }
}

/// Blank lines are skipped.
pub fn parse_text<R: BufRead>(reader: R) -> Result<Vec<i64>> {
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let v = trimmed.parse::<i64>().map_err(|e| OhhcError::Parse {
            line: i + 1,
            message: format!("`{trimmed}`: {e}"),
        })?;
        values.push(v);
    }
    Ok(values)
}

pub fn parse_binary<R: Read>(mut reader: R) -> Result<Vec<i64>> {
    let mut bytes = Vec::new();
    reader.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(OhhcError::Parse {
            line: 0,
            message: format!("binary array length {} is not a multiple of 8", bytes.len()),
        });
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| i64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

pub fn write_text<W: Write>(mut out: W, values: &[i64]) -> Result<()> {
    for v in values {
        writeln!(out, "{v}")?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_binary<W: Write>(mut out: W, values: &[i64]) -> Result<()> {
    for v in values {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn text_parse_errors_carry_line() {
        let err = parse_text("1\n\n2\nx3\n".as_bytes()).unwrap_err();
        assert!(matches!(err, OhhcError::Parse { line: 4, .. }));
    }

    #[test]
    fn binary_length_must_be_aligned() {
        assert!(parse_binary(&[0u8; 9][..]).is_err());
    }

    #[test]
    fn format_by_extension() {
        assert_eq!(ArrayFormat::for_path(Path::new("a.BIN")), ArrayFormat::Binary);
        assert_eq!(ArrayFormat::for_path(Path::new("a.txt")), ArrayFormat::Text);
        assert_eq!(ArrayFormat::for_path(Path::new("a")), ArrayFormat::Text);
    }

    proptest! {
        #[test]
        fn both_formats_round_trip(values in proptest::collection::vec(any::<i64>(), 0..200)) {
            let mut text = Vec::new();
            write_text(&mut text, &values).unwrap();
            prop_assert_eq!(parse_text(&text[..]).unwrap(), values.clone());
            let mut bin = Vec::new();
            write_binary(&mut bin, &values).unwrap();
            prop_assert_eq!(bin.len(), values.len() * 8);
            prop_assert_eq!(parse_binary(&bin[..]).unwrap(), values);
        }
    }
}
