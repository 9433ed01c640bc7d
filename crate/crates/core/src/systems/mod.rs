//! Finite dynamical systems: a carrier, a total self-map and an optional
//! exact metric.

mod metric;
mod text;
mod zoo;

use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{Signed, Zero};

pub use metric::Metric;
pub use zoo::{catalog, ZooSpec};

use crate::uniform::{Carrier, Entourage, UniformityBase};
use crate::{Error, Result};

pub(crate) use metric::word_digits;

#[derive(Clone, Debug)]
pub struct FiniteSystem {
    name: String,
    carrier: Arc<Carrier>,
    map: Vec<usize>,
    inverse: Option<Vec<usize>>,
    metric: Option<Metric>,
}

impl FiniteSystem {
    pub fn new(
        name: impl Into<String>,
        carrier: Arc<Carrier>,
        map: Vec<usize>,
        metric: Option<Metric>,
    ) -> Result<Self> {
        let n = carrier.size();
        if map.len() != n {
            return Err(Error::OutOfRange(format!("map table has {} entries for {n} points", map.len())));
        }
        if let Some(&bad) = map.iter().find(|&&v| v >= n) {
            return Err(Error::UnknownPoint { point: bad, size: n });
        }
        if let Some(m) = &metric {
            if m.size() != n {
                return Err(Error::InvalidMetric(format!("metric is on {} points, carrier has {n}", m.size())));
            }
            m.validate()?;
        }
        let mut inverse = vec![usize::MAX; n];
        let mut invertible = true;
        for (x, &fx) in map.iter().enumerate() {
            if inverse[fx] != usize::MAX {
                invertible = false;
                break;
            }
            inverse[fx] = x;
        }
        Ok(FiniteSystem { name: name.into(), carrier, map, inverse: invertible.then_some(inverse), metric })
    }

    /// The identity map on `n` unlabelled points with the path metric `|x-y|/(n-1)`.
    pub fn identity(n: usize) -> Result<Self> {
        let carrier = Arc::new(Carrier::new(n)?);
        let metric = Metric::Line { n, denom: (n - 1).max(1) };
        FiniteSystem::new(format!("identity({n})"), carrier, (0..n).collect(), Some(metric))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn carrier(&self) -> &Arc<Carrier> {
        &self.carrier
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_invertible(&self) -> bool {
        self.inverse.is_some()
    }

    pub fn inverse(&self) -> Option<&[usize]> {
        self.inverse.as_deref()
    }

    pub fn metric(&self) -> Option<&Metric> {
        self.metric.as_ref()
    }

    fn require_metric(&self) -> Result<&Metric> {
        self.metric.as_ref().ok_or_else(|| Error::MissingMetric(self.name.clone()))
    }

    pub fn label(&self, x: usize) -> String {
        self.carrier.label(x)
    }

    /// `[x, f(x), …, f^{n-1}(x)]`.
    pub fn orbit(&self, x: usize, n: usize) -> Result<Vec<usize>> {
        self.carrier.check_point(x)?;
        Ok(std::iter::successors(Some(x), |&p| Some(self.map[p])).take(n).collect())
    }

    /// Bowen distance `d_n(x, y) = max_{i<n} d(f^i x, f^i y)`.
    pub fn bowen_distance(&self, x: usize, y: usize, n: usize) -> Result<Rational64> {
        let metric = self.require_metric()?;
        if n == 0 {
            return Err(Error::OutOfRange("bowen distance needs n >= 1".into()));
        }
        self.carrier.check_point(x)?;
        self.carrier.check_point(y)?;
        let (mut a, mut b) = (x, y);
        let mut best = Rational64::zero();
        for _ in 0..n {
            best = best.max(metric.distance(a, b));
            a = self.map[a];
            b = self.map[b];
        }
        Ok(best)
    }

    /// `E_ε = {(x, y) : d(x, y) < ε}`.
    pub fn metric_entourage(&self, eps: Rational64) -> Result<Entourage> {
        let metric = self.require_metric()?;
        if !eps.is_positive() {
            return Err(Error::OutOfRange("scale must be positive".into()));
        }
        let rows = crate::par::map_range(self.size(), |x| metric.ball(x, eps));
        let rel = crate::uniform::Relation::from_rows(self.carrier.clone(), rows)?;
        // a validated metric gives reflexive, symmetric balls
        Ok(Entourage::trusted(rel).with_name(format!("eps={eps}")))
    }

    /// The metric entourages of `grid`, closed off with the diagonal.
    ///
    /// Grid values that produce an already-present relation are skipped, so
    /// each member is distinct. The diagonal is appended when the finest
    /// grid value still relates distinct points; this supplies the square
    /// roots the uniformity axioms ask for on a finite carrier.
    pub fn metric_entourage_family(&self, grid: &ScaleGrid) -> Result<UniformityBase> {
        self.require_metric()?;
        let mut members: Vec<Entourage> = Vec::with_capacity(grid.len() + 1);
        for &eps in grid.values() {
            let e = self.metric_entourage(eps)?;
            if !members.iter().any(|m| m.relation() == e.relation()) {
                members.push(e);
            }
        }
        if !members.iter().any(Entourage::is_delta) {
            members.push(Entourage::delta(self.carrier.clone()));
        }
        UniformityBase::new(members)
    }

    /// A grid resolving the metric: every distinct distance when there are
    /// at most 24 of them, otherwise halvings of the diameter down to the
    /// smallest positive distance. The first value exceeds the diameter.
    pub fn default_grid(&self) -> Result<ScaleGrid> {
        let metric = self.require_metric()?;
        let values = metric.positive_values();
        let Some(&diam) = values.first() else {
            return ScaleGrid::new(vec![Rational64::from_integer(1)]);
        };
        let min = *values.last().unwrap();
        let mut eps = vec![diam * 2];
        if values.len() <= 24 {
            eps.extend(values);
        } else {
            let mut e = diam;
            loop {
                eps.push(e);
                if e <= min {
                    break;
                }
                e /= 2;
            }
        }
        ScaleGrid::new(eps)
    }

    /// Metric family over [`FiniteSystem::default_grid`].
    pub fn default_base(&self) -> Result<UniformityBase> {
        self.metric_entourage_family(&self.default_grid()?)
    }

    /// The disjoint union of `a` and `b` as one system.
    ///
    /// Both components keep their metrics. A point `p` of `a` and a point
    /// `q` of `b` are at distance `d_a(p, anchor_a) + link + d_b(anchor_b, q)`,
    /// the path metric of the two spaces joined by an edge of length `link`
    /// between the anchors. Points of `b` are numbered after those of `a`.
    pub fn wedge_union(
        a: &FiniteSystem,
        b: &FiniteSystem,
        anchor_a: usize,
        anchor_b: usize,
        link: Rational64,
    ) -> Result<FiniteSystem> {
        let (ma, mb) = (a.require_metric()?, b.require_metric()?);
        a.carrier.check_point(anchor_a)?;
        b.carrier.check_point(anchor_b)?;
        if !link.is_positive() {
            return Err(Error::OutOfRange("link length must be positive".into()));
        }
        let (na, nb) = (a.size(), b.size());
        let n = na + nb;
        let mut labels: Vec<String> = (0..na).map(|x| format!("a:{}", a.label(x))).collect();
        labels.extend((0..nb).map(|y| format!("b:{}", b.label(y))));
        let carrier = Arc::new(Carrier::with_labels(labels)?);
        let mut map = a.map.clone();
        map.extend(b.map.iter().map(|&v| v + na));
        let mut values = vec![Rational64::zero(); n * n];
        for x in 0..n {
            for y in 0..n {
                values[x * n + y] = match (x < na, y < na) {
                    (true, true) => ma.distance(x, y),
                    (false, false) => mb.distance(x - na, y - na),
                    (true, false) => ma.distance(x, anchor_a) + link + mb.distance(anchor_b, y - na),
                    (false, true) => ma.distance(y, anchor_a) + link + mb.distance(anchor_b, x - na),
                };
            }
        }
        FiniteSystem::new(format!("{}+{}", a.name, b.name), carrier, map, Some(Metric::Table { n, values }))
    }
}

/// Strictly decreasing positive scales.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScaleGrid {
    eps: Vec<Rational64>,
}

impl ScaleGrid {
    pub fn new(eps: Vec<Rational64>) -> Result<Self> {
        if eps.is_empty() {
            return Err(Error::OutOfRange("scale grid is empty".into()));
        }
        if eps.iter().any(|e| !e.is_positive()) {
            return Err(Error::OutOfRange("scales must be positive".into()));
        }
        if eps.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::OutOfRange("scales must be strictly decreasing".into()));
        }
        Ok(ScaleGrid { eps })
    }

    /// Parses values such as `1`, `1/2`, `0.25`.
    pub fn parse(values: &[String]) -> Result<Self> {
        let eps = values.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        ScaleGrid::new(eps)
    }

    pub fn values(&self) -> &[Rational64] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

pub(crate) fn parse_rational(s: &str) -> Result<Rational64> {
    let s = s.trim();
    let bad = || Error::OutOfRange(format!("`{s}` is not a rational number"));
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| bad())?;
        let q: i64 = q.trim().parse().map_err(|_| bad())?;
        if q == 0 {
            return Err(bad());
        }
        return Ok(Rational64::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.len() > 15 || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10i64.pow(frac.len() as u32);
        let int: i64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac: i64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        return Ok(Rational64::new(int * den + frac, den));
    }
    s.parse::<i64>().map(Rational64::from_integer).map_err(|_| bad())
}
