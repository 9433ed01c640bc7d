//! Canonical test-bed systems.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::Rational64;

use super::{FiniteSystem, Metric};
use crate::uniform::{Carrier, MAX_CARRIER};
use crate::{Error, Result};

/// A named member of the system zoo with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZooSpec {
    /// All `symbols^len` words under cyclic left rotation.
    FullShift { symbols: usize, len: usize },
    /// `x ↦ 2x mod n` on `ℤ/n` with the circle metric.
    Doubling { n: usize },
    /// Tent map on the grid `i/(n-1)`; exact on grid points.
    Tent { n: usize },
    /// `x ↦ x + k mod n`.
    Rotation { n: usize, k: usize },
    /// `x ↦ x/2` on `{0} ∪ {2^{-j} : j < levels}`.
    Contraction { levels: usize },
    /// `(x, y) ↦ (2x + y, x + y) mod n` on the `n × n` torus grid.
    Cat { n: usize },
    /// The identity on `n` points.
    Identity { n: usize },
}

impl fmt::Display for ZooSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ZooSpec::FullShift { symbols, len } => write!(f, "full_shift({symbols},{len})"),
            ZooSpec::Doubling { n } => write!(f, "doubling({n})"),
            ZooSpec::Tent { n } => write!(f, "tent({n})"),
            ZooSpec::Rotation { n, k } => write!(f, "rotation({n},{k})"),
            ZooSpec::Contraction { levels } => write!(f, "contraction({levels})"),
            ZooSpec::Cat { n } => write!(f, "cat({n})"),
            ZooSpec::Identity { n } => write!(f, "identity({n})"),
        }
    }
}

impl FromStr for ZooSpec {
    type Err = Error;

    /// Accepts `full_shift 2 8`, `full_shift(2,8)` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let tokens: Vec<&str> =
            s.split(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).filter(|t| !t.is_empty()).collect();
        let (name, args) = tokens.split_first().ok_or_else(|| Error::Config("empty system name".into()))?;
        let nums = args
            .iter()
            .map(|a| a.parse::<usize>().map_err(|_| Error::Config(format!("`{a}` is not a nonnegative integer"))))
            .collect::<Result<Vec<_>>>()?;
        let arity = |k: usize| -> Result<()> {
            if nums.len() == k {
                Ok(())
            } else {
                Err(Error::Config(format!("`{name}` takes {k} parameter(s), got {}", nums.len())))
            }
        };
        let spec = match *name {
            "full_shift" | "shift" => {
                arity(2)?;
                ZooSpec::FullShift { symbols: nums[0], len: nums[1] }
            }
            "doubling" => {
                arity(1)?;
                ZooSpec::Doubling { n: nums[0] }
            }
            "tent" => {
                arity(1)?;
                ZooSpec::Tent { n: nums[0] }
            }
            "rotation" => {
                arity(2)?;
                ZooSpec::Rotation { n: nums[0], k: nums[1] }
            }
            "contraction" => {
                arity(1)?;
                ZooSpec::Contraction { levels: nums[0] }
            }
            "cat" => {
                arity(1)?;
                ZooSpec::Cat { n: nums[0] }
            }
            "identity" => {
                arity(1)?;
                ZooSpec::Identity { n: nums[0] }
            }
            other => return Err(Error::Config(format!("unknown system `{other}`"))),
        };
        Ok(spec)
    }
}

fn range_err(msg: String) -> Error {
    Error::OutOfRange(msg)
}

impl ZooSpec {
    pub fn build(&self) -> Result<FiniteSystem> {
        let name = self.to_string();
        match *self {
            ZooSpec::FullShift { symbols, len } => {
                if symbols < 2 || len < 1 {
                    return Err(range_err(format!("{name}: need symbols >= 2 and len >= 1")));
                }
                let n = (symbols as u128).checked_pow(len as u32).unwrap_or(u128::MAX);
                if n > MAX_CARRIER as u128 {
                    return Err(range_err(format!("{name}: {n} words exceed the carrier cap")));
                }
                let n = n as usize;
                let high = n / symbols;
                let map = (0..n).map(|w| (w % high) * symbols + w / high).collect();
                let labels = (0..n)
                    .map(|w| {
                        let digits = super::word_digits(w, symbols, len);
                        let parts: Vec<String> = digits.iter().map(|d| d.to_string()).collect();
                        if symbols <= 10 {
                            parts.concat()
                        } else {
                            parts.join(".")
                        }
                    })
                    .collect();
                let carrier = Arc::new(Carrier::with_labels(labels)?);
                FiniteSystem::new(name, carrier, map, Some(Metric::Shift { symbols, len }))
            }
            ZooSpec::Doubling { n } => {
                if n < 2 {
                    return Err(range_err(format!("{name}: need n >= 2")));
                }
                let carrier = Arc::new(Carrier::new(n)?);
                let map = (0..n).map(|x| (2 * x) % n).collect();
                FiniteSystem::new(name, carrier, map, Some(Metric::Circle { n }))
            }
            ZooSpec::Tent { n } => {
                if n < 2 {
                    return Err(range_err(format!("{name}: need n >= 2")));
                }
                let top = n - 1;
                let carrier = Arc::new(Carrier::new(n)?);
                let map = (0..n).map(|i| if 2 * i <= top { 2 * i } else { 2 * top - 2 * i }).collect();
                FiniteSystem::new(name, carrier, map, Some(Metric::Line { n, denom: top }))
            }
            ZooSpec::Rotation { n, k } => {
                if n < 1 {
                    return Err(range_err(format!("{name}: need n >= 1")));
                }
                let carrier = Arc::new(Carrier::new(n)?);
                let map = (0..n).map(|x| (x + k) % n).collect();
                let metric = (n >= 2).then_some(Metric::Circle { n });
                FiniteSystem::new(name, carrier, map, metric)
            }
            ZooSpec::Contraction { levels } => {
                if !(1..=40).contains(&levels) {
                    return Err(range_err(format!("{name}: need 1 <= levels <= 40")));
                }
                // index 0 is the fixed point 0, index k >= 1 is 2^{-(k-1)}
                let n = levels + 1;
                let value = |k: usize| {
                    if k == 0 {
                        Rational64::from_integer(0)
                    } else {
                        Rational64::new(1, 1i64 << (k - 1))
                    }
                };
                let labels = (0..n).map(|k| value(k).to_string()).collect();
                let carrier = Arc::new(Carrier::with_labels(labels)?);
                let map = (0..n).map(|k| if k == 0 || k == levels { 0 } else { k + 1 }).collect();
                let values = (0..n * n)
                    .map(|ij| {
                        let (a, b) = (value(ij / n), value(ij % n));
                        if a > b {
                            a - b
                        } else {
                            b - a
                        }
                    })
                    .collect();
                FiniteSystem::new(name, carrier, map, Some(Metric::Table { n, values }))
            }
            ZooSpec::Cat { n } => {
                if n < 2 || n * n > MAX_CARRIER {
                    return Err(range_err(format!("{name}: need 2 <= n and n^2 <= {MAX_CARRIER}")));
                }
                let labels = (0..n * n).map(|p| format!("{},{}", p / n, p % n)).collect();
                let carrier = Arc::new(Carrier::with_labels(labels)?);
                let map = (0..n * n)
                    .map(|p| {
                        let (x, y) = (p / n, p % n);
                        ((2 * x + y) % n) * n + (x + y) % n
                    })
                    .collect();
                FiniteSystem::new(name, carrier, map, Some(Metric::Torus { side: n }))
            }
            ZooSpec::Identity { n } => FiniteSystem::identity(n).map(|s| s.with_name(name)),
        }
    }
}

/// The zoo catalog printed by `uent systems list`.
pub fn catalog() -> String {
    let rows: [(&str, &str, &str, &str); 7] = [
        ("full_shift m L", "m >= 2, L >= 1, m^L <= 65536", "log m", "cylinder count m^n for n <= L"),
        ("doubling N", "N >= 2", "log 2", "grid approximation; orbits collapse after log2 N steps"),
        ("tent N", "N >= 2", "log 2", "grid approximation; window capped at log2 N"),
        ("rotation N k", "N >= 1, any k", "0", "isometry: Bowen relation constant in n"),
        ("contraction levels", "1 <= levels <= 40", "0", "contraction: uniform entropy vanishes"),
        ("cat N", "N >= 2, N^2 <= 65536", "log((3+sqrt 5)/2) = 0.9624", "grid approximation of the torus automorphism"),
        ("identity N", "N >= 1", "0", "every orbit is fixed"),
    ];
    let mut out = String::from("system\tparameters\texpected rate (nats)\tsource\n");
    for (name, params, rate, source) in rows {
        out.push_str(&format!("{name}\t{params}\t{rate}\t{source}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_shift_is_rotation_of_words() {
        let sys = ZooSpec::FullShift { symbols: 2, len: 4 }.build().unwrap();
        assert_eq!(sys.size(), 16);
        assert!(sys.is_invertible());
        let orbit: Vec<String> = sys.orbit(0b0110, 4).unwrap().iter().map(|&w| sys.label(w)).collect();
        assert_eq!(orbit, ["0110", "1100", "1001", "0011"]);
    }

    #[test]
    fn cat_is_a_bijection() {
        let sys = ZooSpec::Cat { n: 5 }.build().unwrap();
        let mut seen = [false; 25];
        for &v in sys.map() {
            assert!(!seen[v]);
            seen[v] = true;
        }
        assert!(sys.is_invertible());
    }

    #[test]
    fn contraction_orbit_halves() {
        let sys = ZooSpec::Contraction { levels: 8 }.build().unwrap();
        assert_eq!(sys.size(), 9);
        assert_eq!(sys.apply(0), 0);
        let labels: Vec<String> = sys.orbit(1, 3).unwrap().iter().map(|&x| sys.label(x)).collect();
        assert_eq!(labels, ["1", "1/2", "1/4"]);
        assert!(!sys.is_invertible());
    }

    #[test]
    fn invertibility_flags() {
        for (spec, inv) in [
            ("full_shift 3 3", true),
            ("rotation 7 2", true),
            ("cat 4", true),
            ("doubling 8", false),
            ("tent 9", false),
            ("contraction 3", false),
        ] {
            assert_eq!(spec.parse::<ZooSpec>().unwrap().build().unwrap().is_invertible(), inv, "{spec}");
        }
    }

    #[test]
    fn parse_spellings_and_ranges() {
        assert_eq!("full_shift(2,8)".parse::<ZooSpec>().unwrap(), ZooSpec::FullShift { symbols: 2, len: 8 });
        assert_eq!("rotation 16 3".parse::<ZooSpec>().unwrap(), ZooSpec::Rotation { n: 16, k: 3 });
        assert!("nope 3".parse::<ZooSpec>().is_err());
        assert!("cat".parse::<ZooSpec>().is_err());
        assert!(ZooSpec::FullShift { symbols: 2, len: 17 }.build().is_err());
        assert!(ZooSpec::Contraction { levels: 0 }.build().is_err());
    }

    #[test]
    fn tent_map_on_grid() {
        let sys = ZooSpec::Tent { n: 9 }.build().unwrap();
        assert_eq!(sys.map(), &[0, 2, 4, 6, 8, 6, 4, 2, 0]);
    }

    #[test]
    fn catalog_mentions_every_system() {
        let c = catalog();
        assert!(c.contains("full_shift m L") && c.contains("log m"));
        assert!(c.contains("contraction levels"));
        assert_eq!(c, catalog());
    }
}
