use fixedbitset::FixedBitSet;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::{Error, Result};

/// A metric on `0..n` with exact rational values.
///
/// The structured variants compute distances on demand; `Table` stores a
/// dense symmetric matrix.
#[derive(Clone, Debug, PartialEq)]
pub enum Metric {
    /// Row-major `n × n` distance matrix.
    Table { n: usize, values: Vec<Rational64> },
    /// Circle metric on `ℤ/n`: `min(|x-y|, n-|x-y|) / n`.
    Circle { n: usize },
    /// Max of circle metrics on the `side × side` torus grid (index `x*side + y`).
    Torus { side: usize },
    /// `|x - y| / denom` on a uniform grid of the unit interval.
    Line { n: usize, denom: usize },
    /// `2^{-j}` with `j` the first coordinate where two words of length `len` differ.
    Shift { symbols: usize, len: usize },
}

fn circ(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

fn ratio(num: usize, den: usize) -> Rational64 {
    Rational64::new(num as i64, den as i64)
}

/// `num / den < eps` without building a rational.
fn frac_lt(num: u128, den: u128, eps: Rational64) -> bool {
    num * (*eps.denom() as u128) < (*eps.numer() as u128) * den
}

impl Metric {
    pub fn size(&self) -> usize {
        match self {
            Metric::Table { n, .. } | Metric::Circle { n } | Metric::Line { n, .. } => *n,
            Metric::Torus { side } => side * side,
            Metric::Shift { symbols, len } => symbols.pow(*len as u32),
        }
    }

    pub fn distance(&self, x: usize, y: usize) -> Rational64 {
        match self {
            Metric::Table { n, values } => values[x * n + y],
            Metric::Circle { n } => ratio(circ(x, y, *n), *n),
            Metric::Torus { side } => {
                let dx = circ(x / side, y / side, *side);
                let dy = circ(x % side, y % side, *side);
                ratio(dx.max(dy), *side)
            }
            Metric::Line { denom, .. } => ratio(x.abs_diff(y), *denom),
            Metric::Shift { symbols, len } => match first_difference(x, y, *symbols, *len) {
                None => Rational64::zero(),
                Some(j) => Rational64::new(1, 1i64 << j),
            },
        }
    }

    /// The open ball `{y : d(x, y) < eps}` as a bitset.
    pub fn ball(&self, x: usize, eps: Rational64) -> FixedBitSet {
        let n = self.size();
        let mut row = FixedBitSet::with_capacity(n);
        match self {
            Metric::Line { denom, .. } => {
                let r = band(*denom, eps);
                row.insert_range(x.saturating_sub(r)..(x + r + 1).min(n));
            }
            Metric::Circle { n } => {
                for y in circle_band(x, band(*n, eps), *n) {
                    row.insert(y);
                }
            }
            Metric::Torus { side } => {
                let r = band(*side, eps);
                let cols: Vec<usize> = circle_band(x % side, r, *side).collect();
                for a in circle_band(x / side, r, *side) {
                    for &b in &cols {
                        row.insert(a * side + b);
                    }
                }
            }
            _ => {
                for y in 0..n {
                    if self.less_than(x, y, eps) {
                        row.insert(y);
                    }
                }
            }
        }
        row
    }

    /// `d(x, y) < eps` for positive `eps`.
    pub fn less_than(&self, x: usize, y: usize, eps: Rational64) -> bool {
        match self {
            Metric::Table { n, values } => values[x * n + y] < eps,
            Metric::Circle { n } => frac_lt(circ(x, y, *n) as u128, *n as u128, eps),
            Metric::Torus { side } => {
                let dx = circ(x / side, y / side, *side);
                let dy = circ(x % side, y % side, *side);
                frac_lt(dx.max(dy) as u128, *side as u128, eps)
            }
            Metric::Line { denom, .. } => frac_lt(x.abs_diff(y) as u128, *denom as u128, eps),
            Metric::Shift { symbols, len } => match first_difference(x, y, *symbols, *len) {
                None => true,
                Some(j) => frac_lt(1, 1u128 << j, eps),
            },
        }
    }

    /// Distinct positive distance values, decreasing.
    pub fn positive_values(&self) -> Vec<Rational64> {
        let mut vals: Vec<Rational64> = match self {
            Metric::Table { values, .. } => values.iter().copied().filter(|v| v.is_positive()).collect(),
            Metric::Circle { n } => (1..=n / 2).map(|k| ratio(k, *n)).collect(),
            Metric::Torus { side } => (1..=side / 2).map(|k| ratio(k, *side)).collect(),
            Metric::Line { n, denom } => (1..*n).map(|k| ratio(k, *denom)).collect(),
            Metric::Shift { len, symbols } => {
                if *symbols < 2 {
                    Vec::new()
                } else {
                    (0..*len).map(|j| Rational64::new(1, 1i64 << j)).collect()
                }
            }
        };
        vals.sort_unstable_by(|a, b| b.cmp(a));
        vals.dedup();
        vals
    }

    /// Checks symmetry, zero diagonal, positivity off the diagonal and the
    /// triangle inequality. Structured variants are metrics by construction;
    /// tables are checked exhaustively up to 512 points.
    pub fn validate(&self) -> Result<()> {
        let Metric::Table { n, values } = self else {
            return Ok(());
        };
        let n = *n;
        if values.len() != n * n {
            return Err(Error::InvalidMetric(format!("expected {} entries", n * n)));
        }
        for x in 0..n {
            if !values[x * n + x].is_zero() {
                return Err(Error::InvalidMetric(format!("d({x},{x}) is not zero")));
            }
            for y in 0..n {
                let d = values[x * n + y];
                if d != values[y * n + x] {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) != d({y},{x})")));
                }
                if x != y && !d.is_positive() {
                    return Err(Error::InvalidMetric(format!("d({x},{y}) must be positive")));
                }
            }
        }
        if n <= 512 {
            for x in 0..n {
                for z in 0..n {
                    for y in 0..n {
                        if values[x * n + y] > values[x * n + z] + values[z * n + y] {
                            return Err(Error::InvalidMetric(format!("triangle inequality fails for ({x},{z},{y})")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn to_table(&self) -> Metric {
        let n = self.size();
        let values = (0..n * n).map(|k| self.distance(k / n, k % n)).collect();
        Metric::Table { n, values }
    }
}

/// Digits of word index `w` (coordinate 0 most significant).
pub(crate) fn word_digits(mut w: usize, symbols: usize, len: usize) -> Vec<usize> {
    let mut digits = vec![0; len];
    for i in (0..len).rev() {
        digits[i] = w % symbols;
        w /= symbols;
    }
    digits
}

/// Largest `k` with `k / den < eps`.
fn band(den: usize, eps: Rational64) -> usize {
    // k < eps * den  <=>  k * denom(eps) < numer(eps) * den
    let (p, q) = (*eps.numer() as u128, *eps.denom() as u128);
    let bound = p * den as u128;
    let k = bound.div_ceil(q).saturating_sub(1);
    k.min(usize::MAX as u128) as usize
}

/// Residues within circular distance `r` of `c` on `ℤ/n`, each once.
fn circle_band(c: usize, r: usize, n: usize) -> impl Iterator<Item = usize> {
    let width = (2 * r.min(n) + 1).min(n);
    let start = (c + n - r.min(n) % n) % n;
    (0..width).map(move |j| (start + j) % n)
}

fn first_difference(x: usize, y: usize, symbols: usize, len: usize) -> Option<usize> {
    if x == y {
        return None;
    }
    let (mut a, mut b) = (x, y);
    let mut last = None;
    for i in (0..len).rev() {
        if a % symbols != b % symbols {
            last = Some(i);
        }
        a /= symbols;
        b /= symbols;
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balls_match_pairwise_comparison() {
        for m in [
            Metric::Circle { n: 9 },
            Metric::Circle { n: 10 },
            Metric::Torus { side: 5 },
            Metric::Torus { side: 6 },
            Metric::Line { n: 7, denom: 6 },
            Metric::Shift { symbols: 2, len: 4 },
        ] {
            for (p, q) in [(1, 100), (1, 10), (1, 6), (1, 5), (1, 3), (2, 5), (1, 2), (1, 1), (3, 1)] {
                let eps = Rational64::new(p, q);
                for x in 0..m.size() {
                    let want: Vec<usize> = (0..m.size()).filter(|&y| m.less_than(x, y, eps)).collect();
                    assert_eq!(m.ball(x, eps).ones().collect::<Vec<_>>(), want, "{m:?} eps={eps} x={x}");
                }
            }
        }
    }

    #[test]
    fn structured_metrics_match_their_tables() {
        for m in [
            Metric::Circle { n: 9 },
            Metric::Torus { side: 4 },
            Metric::Line { n: 7, denom: 6 },
            Metric::Shift { symbols: 2, len: 4 },
            Metric::Shift { symbols: 3, len: 3 },
        ] {
            let table = m.to_table();
            table.validate().unwrap();
            let eps = Rational64::new(1, 3);
            for x in 0..m.size() {
                for y in 0..m.size() {
                    assert_eq!(m.less_than(x, y, eps), m.distance(x, y) < eps);
                }
            }
        }
    }

    #[test]
    fn shift_distance_uses_first_difference() {
        let m = Metric::Shift { symbols: 2, len: 4 };
        // 0110 vs 0100 differ first at coordinate 2.
        assert_eq!(m.distance(0b0110, 0b0100), Rational64::new(1, 4));
        assert_eq!(m.distance(0b0110, 0b1110), Rational64::new(1, 1));
        assert_eq!(word_digits(6, 2, 4), vec![0, 1, 1, 0]);
    }

    #[test]
    fn table_validation_catches_triangle() {
        let v = |a: i64| Rational64::from_integer(a);
        let bad = Metric::Table { n: 3, values: vec![v(0), v(1), v(5), v(1), v(0), v(1), v(5), v(1), v(0)] };
        assert!(bad.validate().is_err());
    }
}
