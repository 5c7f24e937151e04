//! Translation matrices and their implementing datasets.

use alloc::format;
use alloc::vec::Vec;

use crate::dataset::WeightedDataset;
use crate::env::Environment;
use crate::util::ENTRY_TOL;
use crate::{Error, Result};

/// Dense row-major matrix `Γ` with one row per learner action, entries in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationMatrix {
    rows: usize,
    columns: usize,
    data: Vec<f64>,
}

impl TranslationMatrix {
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::InvalidMatrix("no rows".into()))?;
        let columns = first.as_ref().len();
        let mut data = Vec::with_capacity(rows.len() * columns);
        for (x, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != columns {
                return Err(Error::InvalidMatrix(format!(
                    "row {x} has {} entries, expected {columns}",
                    row.len()
                )));
            }
            if let Some(v) = row
                .iter()
                .find(|v| !(-ENTRY_TOL..=1.0 + ENTRY_TOL).contains(*v))
            {
                return Err(Error::InvalidMatrix(format!(
                    "row {x} has entry {v} outside [0,1]"
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(TranslationMatrix {
            rows: rows.len(),
            columns,
            data,
        })
    }

    pub fn num_rows(&self) -> usize {
        self.rows
    }

    pub fn num_columns(&self) -> usize {
        self.columns
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.columns..(x + 1) * self.columns]
    }

    pub fn entry(&self, x: usize, j: usize) -> f64 {
        self.data[x * self.columns + j]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |x| self.row(x))
    }
}

/// A translation matrix together with the datasets that implement each column.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationSpec<Y> {
    pub matrix: TranslationMatrix,
    pub datasets: Vec<WeightedDataset<Y>>,
    pub negative_datasets: Option<Vec<WeightedDataset<Y>>>,
}

impl<Y> TranslationSpec<Y> {
    pub fn new(
        matrix: TranslationMatrix,
        datasets: Vec<WeightedDataset<Y>>,
        negative_datasets: Option<Vec<WeightedDataset<Y>>>,
    ) -> Result<Self> {
        let n = matrix.num_columns();
        if datasets.len() != n {
            return Err(Error::InvalidMatrix(format!(
                "{} datasets for {n} columns",
                datasets.len()
            )));
        }
        if let Some(neg) = &negative_datasets {
            if neg.len() != n {
                return Err(Error::InvalidMatrix(format!(
                    "{} negative datasets for {n} columns",
                    neg.len()
                )));
            }
        }
        let all = datasets.iter().chain(negative_datasets.iter().flatten());
        for d in all {
            if let Some((w, _)) = d
                .entries
                .iter()
                .find(|(w, _)| !(w.is_finite() && *w >= 0.0))
            {
                return Err(Error::Parameter(format!(
                    "dataset weight {w} is not a nonnegative finite real"
                )));
            }
        }
        Ok(TranslationSpec {
            matrix,
            datasets,
            negative_datasets,
        })
    }

    pub fn num_columns(&self) -> usize {
        self.matrix.num_columns()
    }

    pub fn row(&self, x: usize) -> &[f64] {
        self.matrix.row(x)
    }
}

/// `(κ, δ)` summary of a translation matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdmissibilityReport {
    pub kappa: usize,
    pub delta: f64,
    pub rows_distinct: bool,
}

impl AdmissibilityReport {
    pub fn is_admissible(&self) -> bool {
        self.rows_distinct
    }
}

/// Computes `κ`, `δ` and row distinctness. Entries within `1e-9` count as equal.
///
/// `δ` is 1 when every column is constant.
pub fn check_admissibility<R: AsRef<[f64]>>(rows: &[R]) -> Result<AdmissibilityReport> {
    Ok(TranslationMatrix::from_rows(rows)?.admissibility())
}

impl TranslationMatrix {
    pub fn admissibility(&self) -> AdmissibilityReport {
        let rows = self.num_rows();
        let mut kappa = 1;
        let mut delta = f64::INFINITY;
        let mut column = Vec::with_capacity(rows);
        for j in 0..self.columns {
            column.clear();
            column.extend((0..rows).map(|x| self.entry(x, j)));
            column.sort_by(f64::total_cmp);
            let mut distinct = 1;
            for w in column.windows(2) {
                let gap = w[1] - w[0];
                if gap > ENTRY_TOL {
                    distinct += 1;
                    delta = delta.min(gap);
                }
            }
            kappa = kappa.max(distinct);
        }
        if !delta.is_finite() {
            delta = 1.0;
        }

        let mut order: Vec<usize> = (0..rows).collect();
        order.sort_by(|&a, &b| {
            self.row(a)
                .iter()
                .zip(self.row(b))
                .map(|(u, v)| u.total_cmp(v))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let rows_distinct = order.windows(2).all(|p| {
            self.row(p[0])
                .iter()
                .zip(self.row(p[1]))
                .any(|(u, v)| (u - v).abs() > ENTRY_TOL)
        });
        AdmissibilityReport {
            kappa,
            delta,
            rows_distinct,
        }
    }
}

/// Outcome of [`verify_implementability`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplementabilityCheck {
    pub holds: bool,
    pub max_deviation: f64,
}

/// Checks `Γ_xj − Γ_x'j = Σ_{(w,y)∈S_j} w (f(x,y) − f(x',y))` on every column and pair.
///
/// Negative datasets, when present, are checked against the negated identity.
pub fn verify_implementability<E: Environment>(
    spec: &TranslationSpec<E::Adversary>,
    env: &E,
    pairs: &[(usize, usize)],
) -> ImplementabilityCheck {
    let mut worst = 0.0f64;
    let n = env.num_actions();
    let mut touched = Vec::new();
    for &(x, _) in pairs {
        touched.push(x);
    }
    for &(_, x) in pairs {
        touched.push(x);
    }
    touched.sort_unstable();
    touched.dedup();
    touched.retain(|&x| x < n);

    let sides: [(f64, &[WeightedDataset<E::Adversary>]); 2] = [
        (1.0, &spec.datasets),
        (-1.0, spec.negative_datasets.as_deref().unwrap_or(&[])),
    ];
    for (sign, datasets) in sides {
        for (j, data) in datasets.iter().enumerate() {
            // Per-action dataset objective, computed once per column.
            let mut obj = alloc::vec![0.0; n];
            for &x in &touched {
                obj[x] = data.objective(env, x);
            }
            for &(x, xp) in pairs {
                let lhs = sign * (spec.matrix.entry(x, j) - spec.matrix.entry(xp, j));
                worst = worst.max((lhs - (obj[x] - obj[xp])).abs());
            }
        }
    }
    ImplementabilityCheck {
        holds: worst <= ENTRY_TOL,
        max_deviation: worst,
    }
}

/// All ordered pairs `(x, x')` with `x < x'`.
pub fn all_pairs(num_actions: usize) -> Vec<(usize, usize)> {
    (0..num_actions)
        .flat_map(|x| (x + 1..num_actions).map(move |xp| (x, xp)))
        .collect()
}

/// `W = max_j max(|S_j|, Σ_{(w,y)∈S_j} w)`.
pub fn pseudo_complexity<Y>(spec: &TranslationSpec<Y>) -> f64 {
    spec.datasets
        .iter()
        .map(|d| (d.len() as f64).max(d.total_weight()))
        .fold(0.0, f64::max)
}

/// Builds `Γ_{x,z} = f(x, z)` with singleton datasets `S_z = {(1, z)}` for a binary payoff.
///
/// Fails with [`Error::NotASeparator`] naming the first pair that `separator` leaves equal.
pub fn gamma_from_distinguishing_set<E: Environment>(
    env: &E,
    separator: &[E::Adversary],
) -> Result<TranslationSpec<E::Adversary>> {
    let n = env.num_actions();
    let mut rows = Vec::with_capacity(n);
    for x in 0..n {
        let mut row = Vec::with_capacity(separator.len());
        for (j, z) in separator.iter().enumerate() {
            let v = env.payoff(x, z);
            if v != 0.0 && v != 1.0 {
                return Err(Error::Parameter(format!(
                    "payoff of action {x} on separator entry {j} is {v}, expected 0 or 1"
                )));
            }
            row.push(v);
        }
        rows.push(row);
    }
    for x in 0..n {
        for xp in x + 1..n {
            if rows[x] == rows[xp] {
                return Err(Error::NotASeparator {
                    first: x,
                    second: xp,
                });
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::InvalidMatrix("environment has no actions".into()));
    }
    let matrix = TranslationMatrix::from_rows(&rows)?;
    let datasets = separator
        .iter()
        .map(|z| WeightedDataset::new(alloc::vec![(1.0, z.clone())]))
        .collect();
    TranslationSpec::new(matrix, datasets, None)
}
