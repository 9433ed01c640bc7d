use std::collections::HashSet;

use crate::{Error, Result};

/// Largest carrier the dense relation storage accepts.
pub const MAX_CARRIER: usize = 65_536;

/// An ordered finite set of states `0..size`, optionally labelled.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Carrier {
    size: usize,
    labels: Option<Vec<String>>,
}

impl Carrier {
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::OutOfRange("carrier must be nonempty".into()));
        }
        if size > MAX_CARRIER {
            return Err(Error::OutOfRange(format!("carrier of {size} points exceeds the cap of {MAX_CARRIER}")));
        }
        Ok(Carrier { size, labels: None })
    }

    pub fn with_labels(labels: Vec<String>) -> Result<Self> {
        let mut carrier = Carrier::new(labels.len())?;
        let mut seen = HashSet::with_capacity(labels.len());
        for label in &labels {
            if !seen.insert(label.as_str()) {
                return Err(Error::InvalidRelation(format!("duplicate point label `{label}`")));
            }
        }
        carrier.labels = Some(labels);
        Ok(carrier)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Label of point `x`, falling back to its index.
    pub fn label(&self, x: usize) -> String {
        match &self.labels {
            Some(labels) => labels[x].clone(),
            None => x.to_string(),
        }
    }

    pub fn check_point(&self, x: usize) -> Result<()> {
        if x < self.size {
            Ok(())
        } else {
            Err(Error::UnknownPoint { point: x, size: self.size })
        }
    }
}
