//! Plain-text system format:
//!
//! ```text
//! system N=<n> invertible=<0|1>
//! <f(0)> <f(1)> … <f(n-1)>
//! <d(0,0)> … <d(0,n-1)>      (optional, n rows of p/q values)
//! ```

use std::fmt::Write as _;
use std::sync::Arc;

use num_rational::Rational64;

use super::{parse_rational, FiniteSystem, Metric};
use crate::uniform::text::header_field;
use crate::uniform::Carrier;
use crate::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl FiniteSystem {
    pub fn to_text(&self) -> String {
        let n = self.size();
        let mut out = String::new();
        writeln!(out, "system N={n} invertible={}", u8::from(self.is_invertible())).unwrap();
        let map: Vec<String> = self.map.iter().map(|v| v.to_string()).collect();
        out.push_str(&map.join(" "));
        out.push('\n');
        if let Some(m) = &self.metric {
            for x in 0..n {
                let row: Vec<String> = (0..n)
                    .map(|y| {
                        let d = m.distance(x, y);
                        format!("{}/{}", d.numer(), d.denom())
                    })
                    .collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    /// Parses the text format. The declared `invertible` flag must agree
    /// with the map table.
    pub fn from_text(name: impl Into<String>, text: &str) -> Result<FiniteSystem> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.first() != Some(&"system") {
            return Err(parse_err(hline, "expected `system` header"));
        }
        let n: usize =
            header_field(&fields, "N", hline)?.parse().map_err(|_| parse_err(hline, "N is not an integer"))?;
        let declared = match header_field(&fields, "invertible", hline)? {
            "0" => false,
            "1" => true,
            other => return Err(parse_err(hline, format!("invertible must be 0 or 1, got `{other}`"))),
        };
        let carrier = Arc::new(Carrier::new(n)?);

        let (mline, map_line) = lines.next().ok_or_else(|| parse_err(hline + 1, "missing map line"))?;
        let map = map_line
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_err(mline, format!("bad index `{t}`"))))
            .collect::<Result<Vec<_>>>()?;
        if map.len() != n {
            return Err(parse_err(mline, format!("map has {} entries, expected {n}", map.len())));
        }

        let rows: Vec<(usize, &str)> = lines.collect();
        let metric = if rows.is_empty() {
            None
        } else {
            if rows.len() != n {
                return Err(parse_err(rows[0].0, format!("expected {n} metric rows, found {}", rows.len())));
            }
            let mut values: Vec<Rational64> = Vec::with_capacity(n * n);
            for (line, row) in rows {
                let before = values.len();
                for tok in row.split_whitespace() {
                    values.push(parse_rational(tok).map_err(|e| parse_err(line, e.to_string()))?);
                }
                if values.len() - before != n {
                    return Err(parse_err(line, format!("metric row needs {n} values")));
                }
            }
            Some(Metric::Table { n, values })
        };

        let sys = FiniteSystem::new(name, carrier, map, metric)?;
        if sys.is_invertible() != declared {
            return Err(parse_err(
                hline,
                format!("header says invertible={}, map table disagrees", u8::from(declared)),
            ));
        }
        Ok(sys)
    }
}
