//! Delimited text tables of p-value pairs.
//!
//! Input is UTF-8 TSV or CSV with a header containing `id`, `p1` and `p2`
//! (any order, case-insensitive). Every other column is kept verbatim so it
//! can be echoed next to the computed results.

use crate::error::{Error, Result};
use crate::model::FeatureRecord;

#[derive(Debug, Clone, PartialEq)]
pub struct InputTable {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub delimiter: u8,
    id_col: usize,
    p1_col: usize,
    p2_col: usize,
}

/// Tab if the header line contains one, comma otherwise.
pub fn sniff_delimiter(text: &str) -> u8 {
    let header = text.lines().next().unwrap_or("");
    if header.contains('\t') {
        b'\t'
    } else {
        b','
    }
}

impl InputTable {
    pub fn parse(text: &str, delimiter: Option<u8>) -> Result<Self> {
        let delimiter = delimiter.unwrap_or_else(|| sniff_delimiter(text));
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(delimiter)
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());

        let headers: Vec<String> = reader
            .headers()
            .map_err(|e| parse_error(&e, 1))?
            .iter()
            .map(str::to_owned)
            .collect();
        let find = |name: &str| {
            headers
                .iter()
                .position(|h| h.eq_ignore_ascii_case(name))
                .ok_or_else(|| Error::Parse {
                    line: 1,
                    message: format!("header has no {name:?} column"),
                })
        };
        let (id_col, p1_col, p2_col) = (find("id")?, find("p1")?, find("p2")?);

        let mut rows = Vec::new();
        for (i, rec) in reader.records().enumerate() {
            let rec = rec.map_err(|e| parse_error(&e, i + 2))?;
            rows.push(rec.iter().map(str::to_owned).collect());
        }
        Ok(Self {
            headers,
            rows,
            delimiter,
            id_col,
            p1_col,
            p2_col,
        })
    }

    /// 1-based line number of data row `index`.
    pub fn line_of(&self, index: usize) -> usize {
        index + 2
    }

    pub fn records(&self) -> Result<Vec<FeatureRecord>> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let num = |col: usize, name: &str| {
                    let raw = &row[col];
                    raw.parse::<f64>().map_err(|_| Error::Parse {
                        line: self.line_of(i),
                        message: format!("{name} value {raw:?} is not a number"),
                    })
                };
                Ok(FeatureRecord::new(
                    row[self.id_col].clone(),
                    num(self.p1_col, "p1")?,
                    num(self.p2_col, "p2")?,
                ))
            })
            .collect()
    }

    /// Keep only the rows at `positions`, in that order.
    pub fn select_rows(&self, positions: &[usize]) -> Self {
        Self {
            rows: positions.iter().map(|&i| self.rows[i].clone()).collect(),
            ..self.clone()
        }
    }
}

fn parse_error(e: &csv::Error, fallback_line: usize) -> Error {
    let line = e
        .position()
        .map(|p| p.line() as usize)
        .unwrap_or(fallback_line);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Write a header and rows with the given delimiter, newline-terminated.
pub fn write_delimited(headers: &[String], rows: &[Vec<String>], delimiter: u8) -> String {
    let mut w = csv::WriterBuilder::new()
        .delimiter(delimiter)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(headers).expect("write to Vec");
    for row in rows {
        w.write_record(row).expect("write to Vec");
    }
    String::from_utf8(w.into_inner().expect("flush Vec")).expect("utf-8 input")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tsv_with_extra_columns() {
        let t = InputTable::parse(
            "gene\tid\tp2\tP1\nA\tx\t1e-3\t8.19e-08\nB\ty\t0.5\t1\n",
            None,
        )
        .unwrap();
        assert_eq!(t.delimiter, b'\t');
        let r = t.records().unwrap();
        assert_eq!(r[0], FeatureRecord::new("x", 8.19e-8, 1e-3));
        assert_eq!(r[1].p1, 1.0);
        assert_eq!(t.rows[1][0], "B");
    }

    #[test]
    fn csv_sniffed() {
        let t = InputTable::parse("id,p1,p2\na, 0.1 ,0.2\n", None).unwrap();
        assert_eq!(t.delimiter, b',');
        assert_eq!(t.records().unwrap()[0].p1, 0.1);
    }

    #[test]
    fn missing_column() {
        let err = InputTable::parse("id,p1,q\na,0.1,0.2\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn bad_number_reports_line() {
        let t = InputTable::parse("id,p1,p2\na,0.1,0.2\nb,zero,0.2\n", None).unwrap();
        assert_eq!(
            t.records().unwrap_err(),
            Error::Parse {
                line: 3,
                message: "p1 value \"zero\" is not a number".into()
            }
        );
    }

    #[test]
    fn ragged_row_reports_line() {
        let err = InputTable::parse("id,p1,p2\na,0.1,0.2\nb,0.1\n", None).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    }

    #[test]
    fn write_round_trip() {
        let text = "id\tp1\tp2\na\t8.19e-08\t0.5\n";
        let t = InputTable::parse(text, None).unwrap();
        assert_eq!(write_delimited(&t.headers, &t.rows, b'\t'), text);
    }
}
