use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use super::RawSeries;
use crate::{Error, Result};

/// Reads `label,ch1,...,chk` records. Empty fields and `NaN` mark missing
/// readings; blank lines and lines starting with `#` are skipped.
pub fn load_csv(path: impl AsRef<Path>, channels: usize) -> Result<RawSeries> {
    let file = File::open(path)?;
    parse_csv(BufReader::new(file), channels)
}

pub fn parse_csv<R: BufRead>(reader: R, channels: usize) -> Result<RawSeries> {
    let mut series = RawSeries::empty(channels);
    let mut record = vec![0.0; channels];
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != channels + 1 {
            return Err(Error::Arity {
                line: line_no,
                expected: channels + 1,
                found: fields.len(),
            });
        }
        let label = fields[0].trim().parse::<u32>().map_err(|e| Error::Parse {
            line: line_no,
            msg: format!("label {:?}: {e}", fields[0]),
        })?;
        for (slot, field) in record.iter_mut().zip(&fields[1..]) {
            let field = field.trim();
            *slot = if field.is_empty() || field.eq_ignore_ascii_case("nan") {
                f64::NAN
            } else {
                let v = field.parse::<f64>().map_err(|e| Error::Parse {
                    line: line_no,
                    msg: format!("value {field:?}: {e}"),
                })?;
                if !v.is_finite() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("value {field:?} is not finite"),
                    });
                }
                v
            };
        }
        series.push(label, &record);
    }
    Ok(series)
}

/// Writes a series in the format [`parse_csv`] reads; missing values become
/// empty fields.
pub fn write_csv<W: Write>(series: &RawSeries, mut out: W) -> Result<()> {
    for t in 0..series.len() {
        write!(out, "{}", series.labels()[t])?;
        for &v in series.record(t) {
            if v.is_nan() {
                write!(out, ",")?;
            } else {
                write!(out, ",{v}")?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_clean_lines() {
        let s = parse_csv("0,1.0,2.0\n1,3.0,4.0\n1,5,6\n".as_bytes(), 2).unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.labels(), &[0, 1, 1]);
        assert_eq!(s.record(2), &[5.0, 6.0]);
    }

    #[test]
    fn empty_and_nan_fields_are_missing() {
        let s = parse_csv("1,0.5,\n2,NaN,1\n".as_bytes(), 2).unwrap();
        assert_eq!(s.value(0, 0), 0.5);
        assert!(s.is_missing(0, 1));
        assert!(s.is_missing(1, 0));
        assert!(!s.is_missing(1, 1));
    }

    #[test]
    fn wrong_arity_names_line() {
        let err = parse_csv("# header\n0,1,2\n0,1,2,3\n".as_bytes(), 2).unwrap_err();
        match err {
            Error::Arity {
                line,
                expected,
                found,
            } => assert_eq!((line, expected, found), (3, 3, 4)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(err_line(parse_csv("0,1,2\n0,1,2,3\n".as_bytes(), 2).unwrap_err()) == 2);
    }

    #[test]
    fn malformed_value_names_line() {
        let err = parse_csv("0,1,2\n0,x,2\n".as_bytes(), 2).unwrap_err();
        assert_eq!(err_line(err), 2);
        let err = parse_csv("-1,1,2\n".as_bytes(), 2).unwrap_err();
        assert_eq!(err_line(err), 1);
    }

    #[test]
    fn write_then_parse() {
        let s = parse_csv("3,1.5,\n4,-2,0.25\n".as_bytes(), 2).unwrap();
        let mut buf = Vec::new();
        write_csv(&s, &mut buf).unwrap();
        let back = parse_csv(buf.as_slice(), 2).unwrap();
        assert_eq!(back.labels(), s.labels());
        assert!(back.is_missing(0, 1));
        assert_eq!(back.record(1), s.record(1));
    }

    fn err_line(e: Error) -> usize {
        match e {
            Error::Arity { line, .. } | Error::Parse { line, .. } => line,
            other => panic!("unexpected {other:?}"),
        }
    }
}
