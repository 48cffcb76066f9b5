use serde::{Deserialize, Serialize};

/// A two-way partition encoded as `+1` / `-1` labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition(Vec<i8>);

impl Partition {
    /// Builds a partition, mapping every nonnegative label to `+1` and every
    /// negative label to `-1`.
    pub fn from_labels(labels: impl IntoIterator<Item = i8>) -> Self {
        Self(
            labels
                .into_iter()
                .map(|l| if l >= 0 { 1 } else { -1 })
                .collect(),
        )
    }

    /// `n1` leading `+1` entries followed by `n - n1` entries equal to `-1`.
    pub fn blocks(n1: usize, n: usize) -> Self {
        Self((0..n).map(|i| if i < n1 { 1 } else { -1 }).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn labels(&self) -> &[i8] {
        &self.0
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(|&l| l as f64).collect()
    }

    pub fn flipped(&self) -> Self {
        Self(self.0.iter().map(|&l| -l).collect())
    }

    pub fn count_positive(&self) -> usize {
        self.0.iter().filter(|&&l| l > 0).count()
    }
}
