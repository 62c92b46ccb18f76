//! The plain-text object format: one object per line, whitespace-separated
//! decimal integers, `#` starting a comment. Blank and comment-only lines are
//! skipped; the remaining lines are numbered from 0 and that number is the
//! object's index.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InputError {
    #[error("line {line}: `{token}` is not a 64-bit integer")]
    BadInteger { line: usize, token: String },
    #[error("line {line}: expected {expected} values, found {actual}")]
    Ragged {
        line: usize,
        expected: usize,
        actual: usize,
    },
    #[error("no objects in input")]
    Empty,
}

/// Parses all objects; `line` in errors is the 1-based line of the text.
pub fn parse_objects(text: &str) -> Result<Vec<Vec<i64>>, InputError> {
    let mut objects: Vec<Vec<i64>> = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or_default();
        let values = content
            .split_whitespace()
            .map(|token| {
                token.parse::<i64>().map_err(|_| InputError::BadInteger {
                    line: n + 1,
                    token: token.to_string(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        if values.is_empty() {
            continue;
        }
        if let Some(first) = objects.first() {
            if first.len() != values.len() {
                return Err(InputError::Ragged {
                    line: n + 1,
                    expected: first.len(),
                    actual: values.len(),
                });
            }
        }
        objects.push(values);
    }
    if objects.is_empty() {
        return Err(InputError::Empty);
    }
    Ok(objects)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_blank_lines_do_not_count() {
        let text = "# square\n0 0\n\n 4 0 # corner\n4 4\n   \n0 4\n";
        assert_eq!(
            parse_objects(text).unwrap(),
            vec![vec![0, 0], vec![4, 0], vec![4, 4], vec![0, 4]]
        );
    }

    #[test]
    fn rejects_floats_and_ragged_rows() {
        assert_eq!(
            parse_objects("1 2\n1.5 2\n"),
            Err(InputError::BadInteger {
                line: 2,
                token: "1.5".into()
            })
        );
        assert_eq!(
            parse_objects("1 2\n# x\n1 2 3\n"),
            Err(InputError::Ragged {
                line: 3,
                expected: 2,
                actual: 3
            })
        );
        assert_eq!(parse_objects("# nothing\n"), Err(InputError::Empty));
        assert!(parse_objects("99999999999999999999").is_err());
    }
}
