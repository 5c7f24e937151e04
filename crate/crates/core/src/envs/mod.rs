//! Concrete learning environments.

pub mod boolean;
pub mod item_pricing;
pub mod level;
pub mod multiunit;
pub mod sispa;
pub mod vcg;
