//! Plain-text entourage format: a header `entourage N=<n> name=<tag>`
//! followed by one row of `0`/`1` characters per point.

use std::fmt::Write as _;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::{Carrier, Entourage, Relation};
use crate::{Error, Result};

pub(crate) fn bit_row(row: &FixedBitSet, n: usize) -> String {
    (0..n).map(|y| if row.contains(y) { '1' } else { '0' }).collect()
}

pub(crate) fn parse_bit_row(line: &str, n: usize, lineno: usize) -> Result<FixedBitSet> {
    let line = line.trim();
    if line.len() != n {
        return Err(Error::Parse { line: lineno, msg: format!("expected {n} characters, found {}", line.len()) });
    }
    let mut row = FixedBitSet::with_capacity(n);
    for (y, ch) in line.chars().enumerate() {
        match ch {
            '1' => row.insert(y),
            '0' => {}
            other => return Err(Error::Parse { line: lineno, msg: format!("unexpected character `{other}`") }),
        }
    }
    Ok(row)
}

/// Value of `key=<value>` among whitespace-separated header fields.
pub(crate) fn header_field<'a>(fields: &[&'a str], key: &str, lineno: usize) -> Result<&'a str> {
    fields
        .iter()
        .find_map(|f| f.strip_prefix(key).and_then(|r| r.strip_prefix('=')))
        .ok_or_else(|| Error::Parse { line: lineno, msg: format!("missing `{key}=` field") })
}

impl Entourage {
    pub fn to_text(&self) -> String {
        let n = self.size();
        let mut out = String::with_capacity(n * (n + 1) + 32);
        writeln!(out, "entourage N={n} name={}", self.name().unwrap_or("")).unwrap();
        for x in 0..n {
            out.push_str(&bit_row(self.row(x), n));
            out.push('\n');
        }
        out
    }

    /// Parses the text format. The relation must already be reflexive and
    /// symmetric; nothing is repaired on read.
    pub fn from_text(text: &str, carrier: Option<Arc<Carrier>>) -> Result<Entourage> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.first() != Some(&"entourage") {
            return Err(Error::Parse { line: 1, msg: "expected `entourage` header".into() });
        }
        let n: usize = header_field(&fields, "N", 1)?
            .parse()
            .map_err(|_| Error::Parse { line: 1, msg: "N is not an integer".into() })?;
        let name = header.split_once("name=").map(|(_, rest)| rest.trim().to_string()).unwrap_or_default();
        let carrier = match carrier {
            Some(c) if c.size() == n => c,
            Some(c) => return Err(Error::DomainMismatch(format!("text has N={n}, carrier has {} points", c.size()))),
            None => Arc::new(Carrier::new(n)?),
        };
        let mut rows = Vec::with_capacity(n);
        for (idx, line) in lines.by_ref().take(n) {
            rows.push(parse_bit_row(line, n, idx + 1)?);
        }
        if rows.len() != n {
            return Err(Error::Parse { line: rows.len() + 2, msg: format!("expected {n} rows, found {}", rows.len()) });
        }
        let rel = Relation::from_rows(carrier, rows)?;
        Ok(Entourage::new(rel)?.with_name(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_rejects_asymmetry() {
        let c = Arc::new(Carrier::new(5).unwrap());
        let e = Entourage::from_fn(c.clone(), |x, y| x.abs_diff(y) <= 1).with_name("eps=1/2");
        let text = e.to_text();
        assert!(text.starts_with("entourage N=5 name=eps=1/2\n11000\n"));
        let back = Entourage::from_text(&text, Some(c)).unwrap();
        assert_eq!(back, e);
        let bad = "entourage N=2 name=\n11\n01\n";
        assert!(Entourage::from_text(bad, None).is_err());
        let short = "entourage N=2 name=x\n11\n";
        assert!(matches!(Entourage::from_text(short, None), Err(Error::Parse { .. })));
    }
}
