//! Lifetime-file ingestion: plain text, whitespace- or comma-separated
//! nonnegative numbers, with '#' starting a comment that runs to the end of
//! its line. Values are kept in file order; sorting is the extraction
//! step's job.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Parse lifetimes from text. Errors carry the 1-based line and column of
/// the offending token.
pub fn parse_lifetimes(text: &str) -> Result<Vec<f64>> {
    let mut values = Vec::new();
    for (line_index, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(pos) => &raw_line[..pos],
            None => raw_line,
        };
        let mut column = 0;
        for piece in line.split(|c: char| c.is_whitespace() || c == ',') {
            if !piece.is_empty() {
                let value = parse_token(piece, line_index + 1, column + 1)?;
                values.push(value);
            }
            column += piece.len() + 1;
        }
    }
    if values.is_empty() {
        return Err(Error::EmptyInput(
            "no lifetime values found in the input".into(),
        ));
    }
    Ok(values)
}

fn parse_token(token: &str, line: usize, column: usize) -> Result<f64> {
    let value: f64 = token.parse().map_err(|_| Error::Parse {
        line,
        column,
        message: format!("'{token}' is not a number"),
    })?;
    if !value.is_finite() {
        return Err(Error::Parse {
            line,
            column,
            message: format!("'{token}' is not finite"),
        });
    }
    if value < 0.0 {
        return Err(Error::Parse {
            line,
            column,
            message: format!("lifetime '{token}' is negative"),
        });
    }
    Ok(value)
}

/// Read and parse a lifetime file.
pub fn load_lifetimes(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
    parse_lifetimes(&text).map_err(|e| match e {
        Error::EmptyInput(_) => {
            Error::EmptyInput(format!("no lifetime values found in {}", path.display()))
        }
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_mixed_separators_and_comments() {
        let values = parse_lifetimes("1.0, 2.0\n# comment\n3.0").unwrap();
        assert_eq!(values, vec![1.0, 2.0, 3.0]);
        let values = parse_lifetimes("0.5 0.25\t0.125 # trailing note\n,,1.5,").unwrap();
        assert_eq!(values, vec![0.5, 0.25, 0.125, 1.5]);
    }

    #[test]
    fn preserves_file_order() {
        let values = parse_lifetimes("3 1 2").unwrap();
        assert_eq!(values, vec![3.0, 1.0, 2.0]);
    }

    #[test]
    fn reports_token_position() {
        let err = parse_lifetimes("1.0 2.0\n0.5 abc 0.7").unwrap_err();
        match err {
            Error::Parse {
                line,
                column,
                message,
            } => {
                assert_eq!(line, 2);
                assert_eq!(column, 5);
                assert!(message.contains("abc"), "message: {message}");
            }
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_negative_and_non_finite() {
        assert!(matches!(
            parse_lifetimes("1.0 -2.0"),
            Err(Error::Parse { column: 5, .. })
        ));
        assert!(matches!(parse_lifetimes("inf"), Err(Error::Parse { .. })));
        assert!(matches!(parse_lifetimes("NaN"), Err(Error::Parse { .. })));
    }

    #[test]
    fn empty_and_comment_only_inputs_are_rejected() {
        assert!(matches!(parse_lifetimes(""), Err(Error::EmptyInput(_))));
        assert!(matches!(
            parse_lifetimes("# nothing\n  \n# here"),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn loads_from_disk() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# bearing revolutions").unwrap();
        writeln!(file, "0.1788 0.2892").unwrap();
        writeln!(file, "1.7340").unwrap();
        let values = load_lifetimes(file.path()).unwrap();
        assert_eq!(values, vec![0.1788, 0.2892, 1.7340]);
        assert!(load_lifetimes("/nonexistent/lifetimes.txt").is_err());
    }
}
