//! Map files: `p = ...` and `q = ...` statements separated by newlines or
//! `;`, with `#` comments to end of line.

use crate::error::{Error, Result};
use crate::poly::parse_polynomial;
use crate::poly::SkewProduct;

#[derive(Clone, Debug, PartialEq)]
pub struct MapSource {
    pub p: String,
    pub q: String,
}

fn parse_err<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        line,
        column,
        message: message.into(),
    })
}

/// Parses the text of a map file into a skew product.
pub fn parse_map(src: &str) -> Result<(SkewProduct, MapSource)> {
    let mut p = None;
    let mut q = None;
    for (ln, raw) in src.lines().enumerate() {
        let line = ln + 1;
        let text = raw.split('#').next().unwrap_or("");
        let mut offset = 0;
        for stmt in text.split(';') {
            let start = offset;
            offset += stmt.chars().count() + 1;
            if stmt.trim().is_empty() {
                continue;
            }
            let lead = stmt.chars().take_while(|c| c.is_whitespace()).count();
            let Some(eq) = stmt.find('=') else {
                return parse_err(line, start + lead + 1, "expected `p = ...` or `q = ...`");
            };
            let name = stmt[..eq].trim();
            let body = &stmt[eq + 1..];
            let body_col = start + stmt[..eq + 1].chars().count();
            let poly = parse_polynomial(body).map_err(|e| match e {
                Error::Parse { column, message, .. } => Error::Parse {
                    line,
                    column: body_col + column,
                    message,
                },
                other => other,
            })?;
            let slot = match name {
                "p" => &mut p,
                "q" => &mut q,
                _ => return parse_err(line, start + lead + 1, format!("unknown name `{name}`, expected p or q")),
            };
            if slot.is_some() {
                return parse_err(line, start + lead + 1, format!("`{name}` given twice"));
            }
            *slot = Some((poly, body.trim().to_string()));
        }
    }
    let last = src.lines().count().max(1);
    let Some((pp, ps)) = p else {
        return parse_err(last, 1, "missing `p = ...`");
    };
    let Some((qp, qs)) = q else {
        return parse_err(last, 1, "missing `q = ...`");
    };
    Ok((SkewProduct::new(pp, qp)?, MapSource { p: ps, q: qs }))
}
