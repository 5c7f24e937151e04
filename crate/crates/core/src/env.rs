//! Environments and adversary sequences.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Affine map from raw payoffs into `[0, 1]`: `normalized = (raw - offset) / range`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PayoffScale {
    pub offset: f64,
    pub range: f64,
}

impl PayoffScale {
    pub const UNIT: PayoffScale = PayoffScale {
        offset: 0.0,
        range: 1.0,
    };

    pub fn new(offset: f64, range: f64) -> Result<Self> {
        if !(range.is_finite() && range > 0.0) || !offset.is_finite() {
            return Err(Error::Parameter(alloc::format!(
                "payoff scale needs finite offset and positive range, got ({offset}, {range})"
            )));
        }
        Ok(PayoffScale { offset, range })
    }

    pub fn normalize(&self, raw: f64) -> f64 {
        (raw - self.offset) / self.range
    }
}

/// A repeated game with finitely many learner actions `0..num_actions()`.
pub trait Environment {
    type Adversary: Clone;

    fn num_actions(&self) -> usize;

    /// Raw payoff of learner action `action` against `adversary`.
    fn payoff(&self, action: usize, adversary: &Self::Adversary) -> f64;

    /// Raw payoffs lie in `[offset, offset + range]`.
    fn payoff_scale(&self) -> PayoffScale {
        PayoffScale::UNIT
    }
}

impl<E: Environment + ?Sized> Environment for &E {
    type Adversary = E::Adversary;

    fn num_actions(&self) -> usize {
        (**self).num_actions()
    }

    fn payoff(&self, action: usize, adversary: &Self::Adversary) -> f64 {
        (**self).payoff(action, adversary)
    }

    fn payoff_scale(&self) -> PayoffScale {
        (**self).payoff_scale()
    }
}

/// A horizon-`T` sequence of adversary actions drawn from a finite pool.
///
/// Round `t` plays `pool[order[t]]`; `order[t]` is the adversary id logged in traces.
#[derive(Debug, Clone, PartialEq)]
pub struct AdversarySequence<Y> {
    pool: Vec<Y>,
    order: Vec<usize>,
}

impl<Y> AdversarySequence<Y> {
    pub fn new(pool: Vec<Y>, order: Vec<usize>) -> Result<Self> {
        if let Some(&bad) = order.iter().find(|&&i| i >= pool.len()) {
            return Err(Error::Input(alloc::format!(
                "adversary id {bad} out of range for pool of {}",
                pool.len()
            )));
        }
        Ok(AdversarySequence { pool, order })
    }

    /// Plays each pool entry once, in order.
    pub fn from_actions(pool: Vec<Y>) -> Self {
        let order = (0..pool.len()).collect();
        AdversarySequence { pool, order }
    }

    pub fn horizon(&self) -> usize {
        self.order.len()
    }

    pub fn pool(&self) -> &[Y] {
        &self.pool
    }

    pub fn ids(&self) -> &[usize] {
        &self.order
    }

    pub fn id(&self, t: usize) -> usize {
        self.order[t]
    }

    pub fn get(&self, t: usize) -> &Y {
        &self.pool[self.order[t]]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Y> + Clone + '_ {
        self.order.iter().map(move |&i| &self.pool[i])
    }

    /// Cumulative raw payoff of every learner action over the whole sequence.
    pub fn cumulative_payoffs<E>(&self, env: &E) -> Vec<f64>
    where
        E: Environment<Adversary = Y>,
    {
        let mut counts = alloc::vec![0usize; self.pool.len()];
        for &i in &self.order {
            counts[i] += 1;
        }
        (0..env.num_actions())
            .map(|x| {
                counts
                    .iter()
                    .zip(&self.pool)
                    .filter(|(c, _)| **c > 0)
                    .map(|(&c, y)| c as f64 * env.payoff(x, y))
                    .sum()
            })
            .collect()
    }
}
