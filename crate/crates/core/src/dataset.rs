use alloc::vec::Vec;

use crate::env::Environment;

/// A finite list of `(weight, adversary action)` pairs.
///
/// Oracles receive borrowed views `&[(f64, &Y)]`; see [`WeightedDataset::view`].
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDataset<Y> {
    pub entries: Vec<(f64, Y)>,
}

impl<Y> Default for WeightedDataset<Y> {
    fn default() -> Self {
        WeightedDataset {
            entries: Vec::new(),
        }
    }
}

impl<Y> WeightedDataset<Y> {
    pub fn new(entries: Vec<(f64, Y)>) -> Self {
        WeightedDataset { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.entries.iter().map(|(w, _)| w).sum()
    }

    pub fn view(&self) -> Vec<(f64, &Y)> {
        self.entries.iter().map(|(w, y)| (*w, y)).collect()
    }

    /// `Σ w · f(x, y)` over the dataset.
    pub fn objective<E>(&self, env: &E, x: usize) -> f64
    where
        E: Environment<Adversary = Y>,
    {
        self.entries.iter().map(|(w, y)| w * env.payoff(x, y)).sum()
    }
}

/// `Σ w · f(x, y)` over a borrowed dataset view.
pub fn view_objective<E: Environment>(env: &E, data: &[(f64, &E::Adversary)], x: usize) -> f64 {
    data.iter().map(|(w, y)| w * env.payoff(x, y)).sum()
}
