//! Multi-unit welfare maximization with `s` identical units.
//!
//! Allocations are enumerated in lexicographic order; both the exact dynamic program and the
//! maximal-in-range oracle return the lexicographically smallest optimum.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dataset::WeightedDataset;
use crate::env::{Environment, PayoffScale};
use crate::oracles::{Oracle, OracleKind};
use crate::translation::{TranslationMatrix, TranslationSpec};
use crate::util::TIE_TOL;
use crate::{Error, Result};

/// Unit counts per bidder; feasible when they sum to `s`.
pub type Allocation = Vec<u32>;

/// Per-bidder valuations stored as cumulative values `v_i(0..=s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiUnitProfile {
    values: Vec<Vec<f64>>,
}

impl MultiUnitProfile {
    /// `marginals[i][ℓ]` is bidder `i`'s value for its `(ℓ+1)`-th unit; they are nonnegative and
    /// sum to at most 1 per bidder, so welfare lies in `[0, n]`.
    pub fn from_marginals(marginals: &[Vec<f64>]) -> Result<Self> {
        let s = marginals.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(marginals.len());
        for (i, mu) in marginals.iter().enumerate() {
            if mu.len() != s {
                return Err(Error::Input(format!(
                    "bidder {i} has {} marginals, expected {s}",
                    mu.len()
                )));
            }
            if let Some(x) = mu.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return Err(Error::Input(format!(
                    "bidder {i} has marginal {x} outside [0,1]"
                )));
            }
            let mut v = Vec::with_capacity(s + 1);
            v.push(0.0);
            let mut acc = 0.0;
            for x in mu {
                acc += x;
                v.push(acc);
            }
            if acc > 1.0 + 1e-9 {
                return Err(Error::Input(format!(
                    "bidder {i} values all units at {acc}, above 1"
                )));
            }
            values.push(v);
        }
        Ok(MultiUnitProfile { values })
    }

    /// Bidder `j` values each unit at `1/s`, everyone else at 0.
    pub fn uniform_for(n: usize, s: usize, j: usize) -> Self {
        let mut marginals = vec![vec![0.0; s]; n];
        marginals[j] = vec![1.0 / s as f64; s];
        Self::from_marginals(&marginals).expect("valid by construction")
    }

    pub fn bidders(&self) -> usize {
        self.values.len()
    }

    pub fn units(&self) -> usize {
        self.values.first().map_or(0, |v| v.len() - 1)
    }

    /// `v_i(q)`.
    pub fn value(&self, i: usize, q: u32) -> f64 {
        self.values[i][q as usize]
    }

    fn welfare_unchecked(&self, q: &[u32]) -> f64 {
        q.iter()
            .enumerate()
            .map(|(i, &qi)| self.values[i][qi as usize])
            .sum()
    }
}

/// `Σ_i v_i(q_i)`; fails unless `q` has one entry per bidder summing to `s`.
pub fn welfare(q: &[u32], profile: &MultiUnitProfile) -> Result<f64> {
    let total: u64 = q.iter().map(|&x| x as u64).sum();
    if q.len() != profile.bidders() || total != profile.units() as u64 {
        return Err(Error::Input(format!(
            "allocation {q:?} is infeasible for {} bidders and {} units",
            profile.bidders(),
            profile.units()
        )));
    }
    Ok(profile.welfare_unchecked(q))
}

/// `V_i(q) = Σ w v_i(q)` over the dataset.
fn aggregate(data: &[(f64, &MultiUnitProfile)], n: usize, s: usize) -> Result<Vec<Vec<f64>>> {
    let mut agg = vec![vec![0.0; s + 1]; n];
    for (w, p) in data {
        if p.bidders() != n || p.units() != s {
            return Err(Error::Oracle(format!(
                "profile with {} bidders and {} units in a {n}-bidder, {s}-unit dataset",
                p.bidders(),
                p.units()
            )));
        }
        for (a, v) in agg.iter_mut().zip(&p.values) {
            for (x, y) in a.iter_mut().zip(v) {
                *x += w * y;
            }
        }
    }
    Ok(agg)
}

// best[i][r]: best value of bidders i.. sharing r units exactly.
fn suffix_best(agg: &[Vec<f64>], s: usize) -> Vec<Vec<f64>> {
    let n = agg.len();
    let mut best = vec![vec![f64::NEG_INFINITY; s + 1]; n + 1];
    best[n][0] = 0.0;
    for i in (0..n).rev() {
        for r in 0..=s {
            best[i][r] = (0..=r)
                .map(|q| agg[i][q] + best[i + 1][r - q])
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }
    best
}

/// Exact welfare maximizer over all allocations of `s` units for a weighted dataset.
pub fn exact_multiunit_dp(
    data: &[(f64, &MultiUnitProfile)],
    n: usize,
    s: usize,
) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::Oracle("no bidders".into()));
    }
    let agg = aggregate(data, n, s)?;
    let best = suffix_best(&agg, s);
    let target = best[0][s];
    let cutoff = target - TIE_TOL * target.abs().max(1.0);
    let mut q = Vec::with_capacity(n);
    let mut prefix = 0.0;
    let mut rem = s;
    for i in 0..n {
        let pick = (0..=rem)
            .find(|&x| prefix + agg[i][x] + best[i + 1][rem - x] >= cutoff)
            .expect("optimum is reachable");
        prefix += agg[i][pick];
        rem -= pick;
        q.push(pick as u32);
    }
    Ok(q)
}

/// Bundle size `⌈s/n²⌉` and number of full bundles.
pub fn mir_bundles(n: usize, s: usize) -> (usize, usize) {
    let b = s.div_ceil(n * n).max(1);
    (b, s / b)
}

/// The maximal-in-range allocations: `c_i` whole bundles of size `b = ⌈s/n²⌉` per bidder with
/// `Σ c_i = ⌊s/b⌋`, and the leftover `s mod b` units to the first bidder with the most bundles.
/// Lexicographic order.
pub fn mir_range(n: usize, s: usize) -> Vec<Allocation> {
    let (b, full) = mir_bundles(n, s);
    let rem = (s - full * b) as u32;
    let mut out: Vec<Allocation> = Vec::new();
    let mut counts = vec![0u32; n];
    fn rec(i: usize, left: u32, counts: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == counts.len() {
            counts[i] = left;
            out.push(counts.clone());
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, out);
        }
    }
    rec(0, full as u32, &mut counts, &mut out);
    let mut range: Vec<Allocation> = out
        .into_iter()
        .map(|c| {
            let top = c.iter().copied().max().unwrap_or(0);
            let holder = c.iter().position(|&x| x == top).unwrap_or(0);
            let mut q: Vec<u32> = c.iter().map(|&x| x * b as u32).collect();
            q[holder] += rem;
            q
        })
        .collect();
    range.sort();
    range
}

/// Dobzinski–Nisan maximal-in-range oracle: exact optimum over [`mir_range`].
///
/// Welfare is at least half the unrestricted optimum.
pub fn mir_dobzinski_nisan(
    data: &[(f64, &MultiUnitProfile)],
    s: usize,
    n: usize,
) -> Result<Allocation> {
    if n == 0 {
        return Err(Error::Oracle("no bidders".into()));
    }
    let agg = aggregate(data, n, s)?;
    let values: Vec<(Allocation, f64)> = mir_range(n, s)
        .into_iter()
        .map(|q| {
            let v = q.iter().enumerate().map(|(i, &x)| agg[i][x as usize]).sum();
            (q, v)
        })
        .collect();
    let best = values
        .iter()
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = best - TIE_TOL * best.abs().max(1.0);
    Ok(values
        .into_iter()
        .find(|(_, v)| *v >= cutoff)
        .expect("nonempty range")
        .0)
}

/// Every allocation of `s` units among `n` bidders, in lexicographic order.
pub fn all_allocations(n: usize, s: usize) -> Vec<Allocation> {
    let mut out = Vec::new();
    let mut q = vec![0u32; n];
    fn rec(i: usize, left: u32, q: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i + 1 == q.len() {
            q[i] = left;
            out.push(q.clone());
            return;
        }
        for c in 0..=left {
            q[i] = c;
            rec(i + 1, left - c, q, out);
        }
    }
    if n > 0 {
        rec(0, s as u32, &mut q, &mut out);
    }
    out
}

/// Learner chooses an allocation; payoff is welfare.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiUnitEnv {
    n: usize,
    s: usize,
    /// Bundle size when restricted to the maximal-in-range allocations.
    bundle: Option<usize>,
    allocations: Vec<Allocation>,
    index: BTreeMap<Allocation, usize>,
}

impl MultiUnitEnv {
    /// All allocations of `s` units.
    pub fn new(n: usize, s: usize) -> Result<Self> {
        Self::check(n, s)?;
        Self::with_allocations(n, s, None, all_allocations(n, s))
    }

    /// Only the maximal-in-range allocations.
    pub fn mir_range(n: usize, s: usize) -> Result<Self> {
        Self::check(n, s)?;
        Self::with_allocations(n, s, Some(mir_bundles(n, s).0), mir_range(n, s))
    }

    fn check(n: usize, s: usize) -> Result<()> {
        if n == 0 || s == 0 || n > 8 || s > 4096 {
            return Err(Error::Parameter(format!(
                "multi-unit needs 1 <= n <= 8 and 1 <= s <= 4096; got n={n}, s={s}"
            )));
        }
        Ok(())
    }

    fn with_allocations(
        n: usize,
        s: usize,
        bundle: Option<usize>,
        allocations: Vec<Allocation>,
    ) -> Result<Self> {
        let index = allocations
            .iter()
            .enumerate()
            .map(|(i, q)| (q.clone(), i))
            .collect();
        Ok(MultiUnitEnv {
            n,
            s,
            bundle,
            allocations,
            index,
        })
    }

    pub fn bidders(&self) -> usize {
        self.n
    }

    pub fn units(&self) -> usize {
        self.s
    }

    /// Bundle size of the maximal-in-range restriction, if any.
    pub fn bundle_size(&self) -> Option<usize> {
        self.bundle
    }

    pub fn allocation(&self, x: usize) -> &[u32] {
        &self.allocations[x]
    }

    pub fn action_of(&self, q: &[u32]) -> Option<usize> {
        self.index.get(q).copied()
    }
}

impl Environment for MultiUnitEnv {
    type Adversary = MultiUnitProfile;

    fn num_actions(&self) -> usize {
        self.allocations.len()
    }

    fn payoff(&self, action: usize, profile: &MultiUnitProfile) -> f64 {
        profile.welfare_unchecked(&self.allocations[action])
    }

    fn payoff_scale(&self) -> PayoffScale {
        PayoffScale {
            offset: 0.0,
            range: self.n as f64,
        }
    }
}

fn lookup(env: &MultiUnitEnv, q: &[u32]) -> Result<usize> {
    env.action_of(q).ok_or_else(|| {
        Error::Oracle(format!(
            "allocation {q:?} is not an action of the environment"
        ))
    })
}

/// Exact oracle backed by [`exact_multiunit_dp`].
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactMultiUnitOracle;

impl Oracle<MultiUnitEnv> for ExactMultiUnitOracle {
    fn optimize(
        &self,
        env: &MultiUnitEnv,
        data: &[(f64, &MultiUnitProfile)],
        _epsilon: f64,
    ) -> Result<usize> {
        lookup(env, &exact_multiunit_dp(data, env.n, env.s)?)
    }
}

/// Half-approximate oracle backed by [`mir_dobzinski_nisan`].
#[derive(Debug, Clone, Copy, Default)]
pub struct MirOracle;

impl Oracle<MultiUnitEnv> for MirOracle {
    fn optimize(
        &self,
        env: &MultiUnitEnv,
        data: &[(f64, &MultiUnitProfile)],
        _epsilon: f64,
    ) -> Result<usize> {
        lookup(env, &mir_dobzinski_nisan(data, env.s, env.n)?)
    }

    fn kind(&self) -> OracleKind {
        OracleKind::Approx(0.5)
    }
}

/// Bidder `j` gains `1/n²` at the last unit of each whole bundle of size `b`, everyone else 0.
pub fn bundle_counter(n: usize, s: usize, b: usize, j: usize) -> MultiUnitProfile {
    let mut marginals = vec![vec![0.0; s]; n];
    let step = 1.0 / (n * n) as f64;
    for (l, mu) in marginals[j].iter_mut().enumerate() {
        if (l + 1) % b == 0 {
            *mu = step;
        }
    }
    MultiUnitProfile::from_marginals(&marginals).expect("valid by construction")
}

/// Full class: `Γ_{q,j} = q_j / s` with `S_j = {(1, v^j)}`, `v^j` valuing each unit at `1/s`.
/// Maximal-in-range class: `Γ_{q,j} = ⌊q_j / b⌋ / n²` with `S_j` a single [`bundle_counter`].
pub fn build_gamma_mu(env: &MultiUnitEnv) -> Result<TranslationSpec<MultiUnitProfile>> {
    let (n, s) = (env.n, env.s);
    let entry = |x: u32| match env.bundle {
        Some(b) => (x as usize / b) as f64 / (n * n) as f64,
        None => x as f64 / s as f64,
    };
    let rows: Vec<Vec<f64>> = env
        .allocations
        .iter()
        .map(|q| q.iter().map(|&x| entry(x)).collect())
        .collect();
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let datasets = (0..n)
        .map(|j| {
            let profile = match env.bundle {
                Some(b) => bundle_counter(n, s, b, j),
                None => MultiUnitProfile::uniform_for(n, s, j),
            };
            WeightedDataset::new(vec![(1.0, profile)])
        })
        .collect();
    TranslationSpec::new(matrix, datasets, None)
}
