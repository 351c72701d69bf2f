use crate::{Error, Result};

/// Named scalar diagnostics sampled at strictly increasing times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TimeSeriesNorms {
    pub times: Vec<f64>,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl TimeSeriesNorms {
    pub fn new(names: Vec<String>) -> Self {
        let columns = vec![Vec::new(); names.len()];
        TimeSeriesNorms {
            times: Vec::new(),
            names,
            columns,
        }
    }

    pub fn push(&mut self, t: f64, values: &[f64]) -> Result<()> {
        if values.len() != self.names.len() {
            return Err(Error::invalid(format!(
                "expected {} diagnostics, got {}",
                self.names.len(),
                values.len()
            )));
        }
        if let Some(&last) = self.times.last() {
            if t <= last {
                return Err(Error::invalid(format!("time {t} not after {last}")));
            }
        }
        self.times.push(t);
        for (col, &v) in self.columns.iter_mut().zip(values) {
            col.push(v);
        }
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Row `k` as `[t, col₀, col₁, …]`.
    pub fn row(&self, k: usize) -> Vec<f64> {
        std::iter::once(self.times[k])
            .chain(self.columns.iter().map(|c| c[k]))
            .collect()
    }
}
