//! Plain-text utility matrix format.
//!
//! ```text
//! 2
//! 0 1
//! -1 0
//! ```
//!
//! The first line holds `q`; the next `q` lines hold the rows `U(x_i, .)` as
//! whitespace separated numbers. A number is an integer, a fraction `a/b` or a
//! finite decimal such as `-0.25`. Blank lines and lines starting with `#` are
//! skipped.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::game::UtilityMatrix;
use crate::scalar::Scalar;

/// Parses one exact number.
pub fn parse_rational(token: &str) -> std::result::Result<BigRational, String> {
    let (negative, body) = match token.chars().next() {
        Some('-') => (true, &token[1..]),
        Some('\u{2212}') => (true, &token['\u{2212}'.len_utf8()..]),
        Some('+') => (false, &token[1..]),
        _ => (false, token),
    };
    if body.is_empty() {
        return Err(format!("'{token}' is not a number"));
    }
    let value = if let Some((num, den)) = body.split_once('/') {
        let n = parse_digits(num).ok_or_else(|| format!("bad numerator in '{token}'"))?;
        let d = parse_digits(den).ok_or_else(|| format!("bad denominator in '{token}'"))?;
        if d.is_zero() {
            return Err(format!("zero denominator in '{token}'"));
        }
        BigRational::new(n, d)
    } else if let Some((int, frac)) = body.split_once('.') {
        if int.is_empty() && frac.is_empty() {
            return Err(format!("'{token}' is not a number"));
        }
        let i = if int.is_empty() {
            Some(BigInt::zero())
        } else {
            parse_digits(int)
        };
        let f = if frac.is_empty() {
            Some(BigInt::zero())
        } else {
            parse_digits(frac)
        };
        match (i, f) {
            (Some(i), Some(f)) => {
                let scale = BigInt::from(10).pow(frac.len() as u32);
                BigRational::new(i * &scale + f, scale)
            }
            _ => return Err(format!("bad decimal '{token}'")),
        }
    } else {
        BigRational::from_integer(
            parse_digits(body).ok_or_else(|| format!("'{token}' is not a number"))?,
        )
    };
    Ok(if negative { -value } else { value })
}

fn parse_digits(s: &str) -> Option<BigInt> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

/// Result of reading a matrix file; `shift` is nonzero only after normalization.
#[derive(Clone, Debug)]
pub struct ParsedMatrix<T> {
    pub matrix: UtilityMatrix<T>,
    pub shift: T,
}

/// Parses the text format. Without `normalize`, a nonzero diagonal is an
/// error naming the offending cell.
pub fn parse_matrix<T: Scalar>(text: &str, normalize: bool) -> Result<ParsedMatrix<T>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim();
            !t.is_empty() && !t.starts_with('#')
        });

    let (q_line, q_text) = lines.next().ok_or(Error::Parse {
        line: 1,
        column: 1,
        message: "empty input, expected the alphabet size".into(),
    })?;
    let q_tok = q_text.trim();
    let q: usize = q_tok.parse().map_err(|_| Error::Parse {
        line: q_line,
        column: column_of(q_text, q_tok),
        message: format!("alphabet size '{q_tok}' is not a positive integer"),
    })?;
    if q == 0 {
        return Err(Error::Parse {
            line: q_line,
            column: column_of(q_text, q_tok),
            message: "alphabet size must be at least 1".into(),
        });
    }

    let mut rows: Vec<Vec<BigRational>> = Vec::with_capacity(q);
    let mut last_line = q_line;
    for (line_no, line) in lines {
        last_line = line_no;
        if rows.len() == q {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: format!("unexpected extra row, matrix has {q} rows"),
            });
        }
        let mut row = Vec::with_capacity(q);
        let mut offset = 0;
        for tok in line.split_whitespace() {
            let col = line[offset..].find(tok).map(|p| p + offset).unwrap_or(0);
            offset = col + tok.len();
            let v = parse_rational(tok).map_err(|message| Error::Parse {
                line: line_no,
                column: line[..col].chars().count() + 1,
                message,
            })?;
            row.push(v);
        }
        if row.len() != q {
            return Err(Error::Parse {
                line: line_no,
                column: 1,
                message: format!("row has {} entries, expected {q}", row.len()),
            });
        }
        rows.push(row);
    }
    if rows.len() != q {
        return Err(Error::Parse {
            line: last_line + 1,
            column: 1,
            message: format!("found {} rows, expected {q}", rows.len()),
        });
    }

    let shift: BigRational = (0..q).fold(BigRational::zero(), |a, i| a + &rows[i][i]);
    if !normalize {
        if let Some(i) = (0..q).find(|&i| !rows[i][i].is_zero()) {
            return Err(Error::InvalidInstance(format!(
                "nonzero diagonal entry U({0},{0}) = {1}; pass --normalize to shift it out",
                i + 1,
                rows[i][i]
            )));
        }
    }
    let converted: Vec<Vec<T>> = rows
        .iter()
        .map(|row| row.iter().map(T::from_rational).collect())
        .collect();
    let (matrix, shift) = if normalize {
        UtilityMatrix::normalized(converted)?
    } else {
        (UtilityMatrix::new(converted)?, T::from_rational(&shift))
    };
    Ok(ParsedMatrix { matrix, shift })
}

fn column_of(line: &str, token: &str) -> usize {
    line.find(token)
        .map(|p| line[..p].chars().count() + 1)
        .unwrap_or(1)
}

/// Writes a matrix in the same text format, one row per line.
pub fn write_matrix<T: Scalar>(matrix: &UtilityMatrix<T>) -> String {
    let mut out = format!("{}\n", matrix.q());
    for r in 0..matrix.q() {
        let row: Vec<String> = (0..matrix.q())
            .map(|c| matrix.get(r, c).to_string())
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Renders a rational as `a/b`, or `a` when integral.
pub fn render_rational(value: &BigRational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}
