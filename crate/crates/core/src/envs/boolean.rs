//! Boolean function classes with 0/1 payoffs.

use alloc::format;
use alloc::vec::Vec;

use crate::env::Environment;
use crate::{Error, Result};

/// Learner picks a function `{0,1}^r → {0,1}` given as a truth table; the adversary picks an
/// input `z` (bit `i` of `z` is variable `i`) and the payoff is `f(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BooleanClass {
    inputs: u32,
    tables: Vec<u64>,
}

impl BooleanClass {
    pub fn new(inputs: u32, tables: Vec<u64>) -> Result<Self> {
        if inputs > 6 {
            return Err(Error::Parameter(format!(
                "at most 6 inputs supported, got {inputs}"
            )));
        }
        let mask = if inputs == 6 {
            u64::MAX
        } else {
            (1u64 << (1 << inputs)) - 1
        };
        if let Some(t) = tables.iter().find(|&&t| t & !mask != 0) {
            return Err(Error::Input(format!(
                "truth table {t:#x} has bits beyond {} inputs",
                inputs
            )));
        }
        Ok(BooleanClass { inputs, tables })
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn table(&self, x: usize) -> u64 {
        self.tables[x]
    }

    pub fn eval(&self, x: usize, z: u32) -> bool {
        self.tables[x] >> z & 1 == 1
    }
}

impl Environment for BooleanClass {
    type Adversary = u32;

    fn num_actions(&self) -> usize {
        self.tables.len()
    }

    fn payoff(&self, action: usize, z: &u32) -> f64 {
        if self.eval(action, *z) {
            1.0
        } else {
            0.0
        }
    }
}
