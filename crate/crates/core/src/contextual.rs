//! Contextual learning over finite policy classes.
//!
//! Contexts are indices `0..num_contexts`; a policy is a total map from contexts to base
//! actions. The contextual extension of a translation matrix has one column per
//! `(context, base column)` pair, context-major.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::dataset::WeightedDataset;
use crate::env::{AdversarySequence, Environment, PayoffScale};
use crate::ftpl::{run_oracle_ftpl_signed, RunTrace};
use crate::oracles::Oracle;
use crate::perturbation::{sample_alpha, Perturbation};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::util::first_argmax;
use crate::{Error, Result};

/// An enumerated policy class.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyClass {
    num_contexts: usize,
    policies: Vec<Vec<usize>>,
}

impl PolicyClass {
    pub fn new(num_contexts: usize, policies: Vec<Vec<usize>>) -> Result<Self> {
        if let Some(p) = policies.iter().position(|p| p.len() != num_contexts) {
            return Err(Error::Input(format!(
                "policy {p} is not defined on all {num_contexts} contexts"
            )));
        }
        Ok(PolicyClass {
            num_contexts,
            policies,
        })
    }

    /// One constant policy per base action; policy `x` always plays `x`.
    pub fn constant(num_contexts: usize, num_actions: usize) -> Self {
        let policies = (0..num_actions)
            .map(|x| alloc::vec![x; num_contexts])
            .collect();
        PolicyClass {
            num_contexts,
            policies,
        }
    }

    /// ORs of boolean features over `r` coordinates. Context `σ` is a bitmask; a policy picks a
    /// nonempty coordinate subset `J`, plays `a ∈ A` when `σ ∩ J ≠ ∅` and `b ∈ B` otherwise.
    pub fn or_of_features(r: u32, a_actions: &[usize], b_actions: &[usize]) -> Result<Self> {
        if r == 0 || r > 16 {
            return Err(Error::Parameter(format!(
                "feature count must be in 1..=16, got {r}"
            )));
        }
        if a_actions.iter().any(|a| b_actions.contains(a)) {
            return Err(Error::Input("action sets A and B must be disjoint".into()));
        }
        let contexts = 1usize << r;
        let mut policies = Vec::new();
        for subset in 1..contexts {
            for &a in a_actions {
                for &b in b_actions {
                    policies.push(
                        (0..contexts)
                            .map(|s| if s & subset != 0 { a } else { b })
                            .collect(),
                    );
                }
            }
        }
        Self::new(contexts, policies)
    }

    pub fn num_contexts(&self) -> usize {
        self.num_contexts
    }

    pub fn len(&self) -> usize {
        self.policies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.policies.is_empty()
    }

    pub fn evaluate(&self, policy: usize, context: usize) -> usize {
        self.policies[policy][context]
    }
}

/// Outcome of [`verify_separator`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeparatorCheck {
    pub holds: bool,
    /// Two policies that agree on every context of the candidate.
    pub counterexample: Option<(usize, usize)>,
}

/// Checks that every pair of policies disagrees on some context in `q`.
pub fn verify_separator(class: &PolicyClass, q: &[usize]) -> SeparatorCheck {
    let mut seen: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for (p, policy) in class.policies.iter().enumerate() {
        let key: Vec<usize> = q.iter().map(|&s| policy[s]).collect();
        if let Some(&first) = seen.get(&key) {
            return SeparatorCheck {
                holds: false,
                counterexample: Some((first, p)),
            };
        }
        seen.insert(key, p);
    }
    SeparatorCheck {
        holds: true,
        counterexample: None,
    }
}

/// An adversary action annotated with the context it arrives in.
#[derive(Debug, Clone, PartialEq)]
pub struct Contextual<Y> {
    pub context: usize,
    pub action: Y,
}

/// Policies as learner actions: `f_c(π, (σ, y)) = f(π(σ), y)`.
#[derive(Debug, Clone)]
pub struct ContextualEnv<E> {
    pub base: E,
    pub class: PolicyClass,
}

impl<E: Environment> ContextualEnv<E> {
    pub fn new(base: E, class: PolicyClass) -> Result<Self> {
        let n = base.num_actions();
        if class.policies.iter().flatten().any(|&x| x >= n) {
            return Err(Error::Input(format!(
                "policy maps to an action outside 0..{n}"
            )));
        }
        Ok(ContextualEnv { base, class })
    }
}

impl<E: Environment> Environment for ContextualEnv<E> {
    type Adversary = Contextual<E::Adversary>;

    fn num_actions(&self) -> usize {
        self.class.len()
    }

    fn payoff(&self, action: usize, y: &Self::Adversary) -> f64 {
        self.base
            .payoff(self.class.policies[action][y.context], &y.action)
    }

    fn payoff_scale(&self) -> PayoffScale {
        self.base.payoff_scale()
    }
}

/// Exact policy oracle. Sums the dataset into one payoff row per context, then scores each
/// policy by lookup. Ties go to the smallest policy index.
#[derive(Debug, Clone, Copy, Default)]
pub struct PolicyEnumOracle;

impl<E: Environment> Oracle<ContextualEnv<E>> for PolicyEnumOracle {
    fn optimize(
        &self,
        env: &ContextualEnv<E>,
        data: &[(f64, &Contextual<E::Adversary>)],
        _epsilon: f64,
    ) -> Result<usize> {
        if env.class.is_empty() {
            return Err(Error::Oracle("empty policy class".into()));
        }
        let n = env.base.num_actions();
        let mut rows: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for (w, y) in data {
            if y.context >= env.class.num_contexts {
                return Err(Error::Input(format!(
                    "context {} outside the universe",
                    y.context
                )));
            }
            let row = rows.entry(y.context).or_insert_with(|| alloc::vec![0.0; n]);
            for (x, v) in row.iter_mut().enumerate() {
                *v += w * env.base.payoff(x, &y.action);
            }
        }
        let values: Vec<f64> = env
            .class
            .policies
            .iter()
            .map(|p| rows.iter().map(|(&s, row)| row[p[s]]).sum())
            .collect();
        Ok(first_argmax(values.iter().copied()).expect("nonempty class"))
    }
}

/// `Γ^Q_{π,(σ,j)} = Γ_{π(σ),j}` with dataset `{(w, (σ, y)) : (w, y) ∈ S_j}` for column `(σ, j)`.
pub fn q_extension<Y: Clone>(
    spec: &TranslationSpec<Y>,
    q: &[usize],
    class: &PolicyClass,
) -> Result<TranslationSpec<Contextual<Y>>> {
    if let Some(&s) = q.iter().find(|&&s| s >= class.num_contexts) {
        return Err(Error::Input(format!(
            "context {s} outside the universe of {}",
            class.num_contexts
        )));
    }
    let base_rows = spec.matrix.num_rows();
    let rows: Vec<Vec<f64>> = class
        .policies
        .iter()
        .map(|policy| {
            let mut row = Vec::with_capacity(q.len() * spec.num_columns());
            for &s in q {
                row.extend_from_slice(spec.matrix.row(policy[s]));
            }
            row
        })
        .collect();
    if class.policies.iter().flatten().any(|&x| x >= base_rows) {
        return Err(Error::Input(
            "policy maps outside the translation matrix".into(),
        ));
    }
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let annotate = |datasets: &[WeightedDataset<Y>]| -> Vec<WeightedDataset<Contextual<Y>>> {
        q.iter()
            .flat_map(|&s| {
                datasets.iter().map(move |d| {
                    WeightedDataset::new(
                        d.entries
                            .iter()
                            .map(|(w, y)| {
                                (
                                    *w,
                                    Contextual {
                                        context: s,
                                        action: y.clone(),
                                    },
                                )
                            })
                            .collect(),
                    )
                })
            })
            .collect()
    };
    let datasets = annotate(&spec.datasets);
    let negative = spec.negative_datasets.as_deref().map(annotate);
    TranslationSpec::new(matrix, datasets, negative)
}

/// `ν = sqrt(Tκ(1+2ε)) N^{1/4} / (sqrt(δ) (|P| ln|X|)^{1/4})`.
pub fn transductive_nu(
    kappa: f64,
    delta: f64,
    columns: usize,
    contexts: usize,
    base_actions: usize,
    horizon: f64,
    epsilon: f64,
) -> Result<f64> {
    let ln_x = libm::log(base_actions as f64);
    if !(kappa > 0.0 && delta > 0.0 && horizon > 0.0 && columns > 0 && contexts > 0 && ln_x > 0.0) {
        return Err(Error::Parameter(
            "transductive nu needs positive kappa, delta, T, N, |P| and |X| >= 2".into(),
        ));
    }
    let n = columns as f64;
    Ok(
        libm::sqrt(horizon * kappa * (1.0 + 2.0 * epsilon)) * libm::pow(n, 0.25)
            / (libm::sqrt(delta) * libm::pow(contexts as f64 * ln_x, 0.25)),
    )
}

/// `TNκ(1+2ε)/(νδ) + 2ν sqrt(2N|P| ln|X|) + εT` in normalized units.
#[allow(clippy::too_many_arguments)]
pub fn transductive_bound(
    kappa: f64,
    delta: f64,
    columns: usize,
    contexts: usize,
    base_actions: usize,
    horizon: f64,
    epsilon: f64,
    nu: f64,
) -> f64 {
    let n = columns as f64;
    let ln_x = libm::log(base_actions as f64);
    horizon * n * kappa * (1.0 + 2.0 * epsilon) / (nu * delta)
        + 2.0 * nu * libm::sqrt(2.0 * n * contexts as f64 * ln_x)
        + epsilon * horizon
}

/// A finished transductive run with the extension it used.
#[derive(Debug, Clone)]
pub struct TransductiveRun<Y> {
    pub trace: RunTrace,
    pub extension: TranslationSpec<Contextual<Y>>,
}

/// Signed oracle-based FTPL on the `P`-extension with `α ~ U[−ν, ν]^{N|P|}`.
///
/// Every arriving context must lie in `transductive_set`.
pub fn run_transductive_ftpl<E: Environment>(
    env: &ContextualEnv<E>,
    base_spec: &TranslationSpec<E::Adversary>,
    transductive_set: &[usize],
    nu: f64,
    sequence: &AdversarySequence<Contextual<E::Adversary>>,
    seed: u64,
) -> Result<TransductiveRun<E::Adversary>> {
    if base_spec.negative_datasets.is_none() {
        return Err(Error::Configuration(
            "transductive runs need negative datasets".into(),
        ));
    }
    if let Some(y) = sequence
        .pool()
        .iter()
        .find(|y| !transductive_set.contains(&y.context))
    {
        return Err(Error::Input(format!(
            "context {} is not in the transductive set",
            y.context
        )));
    }
    let extension = q_extension(base_spec, transductive_set, &env.class)?;
    let dist = Perturbation::symmetric(nu)?;
    let alpha = sample_alpha(&dist, extension.num_columns(), seed);
    let trace = run_oracle_ftpl_signed(env, &extension, &alpha, &PolicyEnumOracle, sequence)?;
    Ok(TransductiveRun { trace, extension })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_separator_fails_for_two_policies() {
        let class = PolicyClass::new(2, alloc::vec![alloc::vec![0, 1], alloc::vec![1, 1]]).unwrap();
        let check = verify_separator(&class, &[]);
        assert!(!check.holds);
        assert_eq!(check.counterexample, Some((0, 1)));
        assert!(verify_separator(&class, &[0]).holds);
    }

    #[test]
    fn nu_formula_is_finite() {
        let nu = transductive_nu(2.0, 1.0, 4, 4, 9, 400.0, 0.05).unwrap();
        assert!(nu.is_finite() && nu > 0.0);
        assert!(transductive_nu(2.0, 1.0, 4, 4, 1, 400.0, 0.05).is_err());
    }
}
