//! Environment construction and adversary pools for each configured kind.

use gftpl_core::contextual::{Contextual, ContextualEnv, PolicyClass};
use gftpl_core::envs::item_pricing::{
    build_gamma_ip, Bidder, CombinatorialProfile, ItemPricingEnv,
};
use gftpl_core::envs::level::{build_gamma_sl, LevelEnv};
use gftpl_core::envs::multiunit::{build_gamma_mu, MultiUnitEnv, MultiUnitProfile};
use gftpl_core::envs::sispa::{build_gamma_ob, BidderValuation, SispaEnv, ThresholdVector};
use gftpl_core::envs::vcg::{build_gamma_vcg, BidProfile, VcgEnv};
use gftpl_core::perturbation::rng_from_seed;
use gftpl_core::{Environment, TranslationSpec};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use toml::Value;

use crate::config::{require, EnvironmentConfig, ExperimentConfig, SupplyEntry, UnitRange};
use crate::error::{HarnessError, Result};

/// Largest action set the harness builds.
pub const MAX_ACTIONS: usize = 1 << 20;

/// A built environment, its translation spec and the adversary pool.
pub struct Setting<E: Environment> {
    pub env: E,
    pub spec: TranslationSpec<E::Adversary>,
    pub pool: Vec<E::Adversary>,
}

fn env_error(e: gftpl_core::Error) -> HarnessError {
    HarnessError::config("environment", e.to_string())
}

fn check_size<E: Environment>(env: &E) -> Result<()> {
    if env.num_actions() > MAX_ACTIONS {
        return Err(HarnessError::config(
            "environment",
            format!(
                "{} actions exceed the cap of {MAX_ACTIONS}",
                env.num_actions()
            ),
        ));
    }
    Ok(())
}

/// Builds the pool from explicit profiles or a seeded random draw.
fn pool<Y>(
    config: &ExperimentConfig,
    parse: impl Fn(&Value, &str) -> Result<Y>,
    mut draw: impl FnMut(&mut ChaCha8Rng, bool) -> Y,
) -> Result<Vec<Y>> {
    let a = &config.adversary;
    match (&a.profiles, &a.random) {
        (Some(profiles), _) => profiles
            .iter()
            .enumerate()
            .map(|(i, v)| parse(v, &format!("adversary.profiles[{i}]")))
            .collect(),
        (None, Some(random)) => {
            let mut rng = rng_from_seed(random.seed);
            Ok((0..random.count)
                .map(|_| draw(&mut rng, random.grid))
                .collect())
        }
        (None, None) => Err(HarnessError::config(
            "adversary.profiles",
            "missing profiles or random pool",
        )),
    }
}

fn number(v: &Value, path: &str) -> Result<f64> {
    match v {
        Value::Float(x) => Ok(*x),
        Value::Integer(i) => Ok(*i as f64),
        _ => Err(HarnessError::config(path, "expected a number")),
    }
}

fn unit_list(v: &Value, path: &str, len: usize) -> Result<Vec<f64>> {
    let items = v
        .as_array()
        .ok_or_else(|| HarnessError::config(path, "expected an array of numbers"))?;
    if items.len() != len {
        return Err(HarnessError::config(
            path,
            format!("expected {len} entries, got {}", items.len()),
        ));
    }
    items
        .iter()
        .enumerate()
        .map(|(i, x)| {
            let p = format!("{path}[{i}]");
            let x = number(x, &p)?;
            if (0.0..=1.0).contains(&x) {
                Ok(x)
            } else {
                Err(HarnessError::config(p, format!("{x} lies outside [0, 1]")))
            }
        })
        .collect()
}

fn table<'a>(v: &'a Value, path: &str, allowed: &[&str]) -> Result<&'a toml::Table> {
    let t = v
        .as_table()
        .ok_or_else(|| HarnessError::config(path, "expected a table"))?;
    if let Some(key) = t.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(HarnessError::config(
            format!("{path}.{key}"),
            "unknown field",
        ));
    }
    Ok(t)
}

fn field<'a>(t: &'a toml::Table, path: &str, key: &str) -> Result<&'a Value> {
    t.get(key)
        .ok_or_else(|| HarnessError::config(format!("{path}.{key}"), "missing field"))
}

fn unsigned(v: &Value, path: &str) -> Result<u64> {
    v.as_integer()
        .and_then(|i| u64::try_from(i).ok())
        .ok_or_else(|| HarnessError::config(path, "expected a nonnegative integer"))
}

fn draw_values(rng: &mut ChaCha8Rng, n: usize, m: u32, grid: bool) -> Vec<f64> {
    (0..n)
        .map(|_| {
            if grid {
                rng.random_range(0..=2 * m) as f64 / (2 * m) as f64
            } else {
                rng.random::<f64>()
            }
        })
        .collect()
}

pub fn vcg(config: &ExperimentConfig) -> Result<Setting<VcgEnv>> {
    let e = &config.environment;
    let env = vcg_env(e)?;
    let spec = build_gamma_vcg(&env).map_err(env_error)?;
    let (n, m) = (env.bidders(), env.m());
    let pool = pool(
        config,
        |v, p| Ok(BidProfile::new(unit_list(v, p, n)?)),
        |r, grid| BidProfile::new(draw_values(r, n, m, grid)),
    )?;
    Ok(Setting { env, spec, pool })
}

fn vcg_env(e: &EnvironmentConfig) -> Result<VcgEnv> {
    let kind = e.kind;
    let env = VcgEnv::new(
        require(e.n, "n", kind)?,
        require(e.m, "m", kind)?,
        require(e.s, "s", kind)?,
    )
    .map_err(env_error)?;
    check_size(&env)?;
    Ok(env)
}

pub fn level(config: &ExperimentConfig) -> Result<Setting<LevelEnv>> {
    let e = &config.environment;
    let kind = e.kind;
    let env = LevelEnv::new(
        require(e.n, "n", kind)?,
        require(e.s, "s", kind)?,
        require(e.m, "m", kind)?,
    )
    .map_err(env_error)?;
    check_size(&env)?;
    let spec = build_gamma_sl(&env).map_err(env_error)?;
    let (n, m) = (env.bidders(), env.m());
    let pool = pool(
        config,
        |v, p| Ok(BidProfile::new(unit_list(v, p, n)?)),
        |r, grid| BidProfile::new(draw_values(r, n, m, grid)),
    )?;
    Ok(Setting { env, spec, pool })
}

pub fn item_pricing(config: &ExperimentConfig) -> Result<Setting<ItemPricingEnv>> {
    let e = &config.environment;
    let kind = e.kind;
    let k = require(e.k, "k", kind)?;
    let supply: Vec<Option<u32>> = e
        .supply
        .as_ref()
        .ok_or_else(|| HarnessError::config("environment.supply", "required for item_pricing"))?
        .iter()
        .map(|s| match s {
            SupplyEntry::Units(u) => Some(*u),
            SupplyEntry::Unlimited(_) => None,
        })
        .collect();
    if supply.len() != k {
        return Err(HarnessError::config(
            "environment.supply",
            format!("expected {k} entries, got {}", supply.len()),
        ));
    }
    let max_bidders = require(e.max_bidders, "max_bidders", kind)?;
    let env =
        ItemPricingEnv::new(k, require(e.m, "m", kind)?, supply, max_bidders).map_err(env_error)?;
    check_size(&env)?;
    let spec = build_gamma_ip(&env).map_err(env_error)?;
    let m = env.m();
    let parse_bidder = |v: &Value, path: &str| -> Result<Bidder> {
        let t = table(v, path, &["values", "bundle", "value"])?;
        if let Some(values) = t.get("values") {
            if t.len() != 1 {
                return Err(HarnessError::config(
                    path,
                    "unit-demand bidders take only values",
                ));
            }
            return Ok(Bidder::UnitDemand {
                values: unit_list(values, &format!("{path}.values"), k)?,
            });
        }
        let bundle = unsigned(field(t, path, "bundle")?, &format!("{path}.bundle"))?;
        if bundle == 0 || bundle >= 1 << k {
            return Err(HarnessError::config(
                format!("{path}.bundle"),
                format!("must be a nonempty subset of {k} items"),
            ));
        }
        let vp = format!("{path}.value");
        let value = number(field(t, path, "value")?, &vp)?;
        if !(0.0..=1.0).contains(&value) {
            return Err(HarnessError::config(
                vp,
                format!("{value} lies outside [0, 1]"),
            ));
        }
        Ok(Bidder::SingleMinded {
            bundle: bundle as u32,
            value,
        })
    };
    let pool = pool(
        config,
        |v, path| {
            let bidders = v
                .as_array()
                .ok_or_else(|| HarnessError::config(path, "expected an array of bidders"))?;
            if bidders.is_empty() || bidders.len() > max_bidders {
                return Err(HarnessError::config(
                    path,
                    format!("needs 1..={max_bidders} bidders"),
                ));
            }
            let bidders = bidders
                .iter()
                .enumerate()
                .map(|(i, b)| parse_bidder(b, &format!("{path}[{i}]")))
                .collect::<Result<_>>()?;
            Ok(CombinatorialProfile { bidders })
        },
        |r, grid| {
            let count = r.random_range(1..=max_bidders);
            let bidders = (0..count)
                .map(|_| {
                    if r.random::<bool>() {
                        Bidder::UnitDemand {
                            values: draw_values(r, k, m, grid),
                        }
                    } else {
                        let bundle = r.random_range(1..1u32 << k);
                        Bidder::SingleMinded {
                            bundle,
                            value: draw_values(r, 1, m, grid)[0],
                        }
                    }
                })
                .collect();
            CombinatorialProfile { bidders }
        },
    )?;
    Ok(Setting { env, spec, pool })
}

pub fn multiunit(config: &ExperimentConfig) -> Result<Setting<MultiUnitEnv>> {
    let e = &config.environment;
    let kind = e.kind;
    let (n, s) = (require(e.n, "n", kind)?, require(e.s, "s", kind)?);
    let env = match e.range {
        UnitRange::Full => MultiUnitEnv::new(n, s),
        UnitRange::Mir => MultiUnitEnv::mir_range(n, s),
    }
    .map_err(env_error)?;
    check_size(&env)?;
    let spec = build_gamma_mu(&env).map_err(env_error)?;
    let pool = pool(
        config,
        |v, path| {
            let rows = v.as_array().ok_or_else(|| {
                HarnessError::config(path, "expected one marginal list per bidder")
            })?;
            if rows.len() != n {
                return Err(HarnessError::config(
                    path,
                    format!("expected {n} bidders, got {}", rows.len()),
                ));
            }
            let marginals: Vec<Vec<f64>> = rows
                .iter()
                .enumerate()
                .map(|(i, row)| unit_list(row, &format!("{path}[{i}]"), s))
                .collect::<Result<_>>()?;
            MultiUnitProfile::from_marginals(&marginals)
                .map_err(|e| HarnessError::config(path, e.to_string()))
        },
        |r, _| {
            let marginals: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    let raw: Vec<f64> = (0..s).map(|_| r.random::<f64>()).collect();
                    let scale = r.random::<f64>() / raw.iter().sum::<f64>().max(1e-12);
                    raw.iter().map(|x| (x * scale).min(1.0)).collect()
                })
                .collect();
            MultiUnitProfile::from_marginals(&marginals).expect("marginals sum to at most 1")
        },
    )?;
    Ok(Setting { env, spec, pool })
}

pub fn sispa(config: &ExperimentConfig) -> Result<Setting<SispaEnv>> {
    let e = &config.environment;
    let kind = e.kind;
    let m = require(e.m, "m", kind)?;
    let valuation = match (&e.levels, &e.additive) {
        (Some(levels), None) => {
            BidderValuation::new(require(e.k, "k", kind)?, m, levels.clone())
                .map_err(|err| HarnessError::config("environment.levels", err.to_string()))?
        }
        (None, Some(items)) => {
            if e.k.is_some_and(|k| k != items.len()) {
                return Err(HarnessError::config(
                    "environment.k",
                    "disagrees with the length of additive",
                ));
            }
            BidderValuation::additive(m, items)
                .map_err(|err| HarnessError::config("environment.additive", err.to_string()))?
        }
        _ => {
            return Err(HarnessError::config(
                "environment.levels",
                "sispa needs exactly one of levels and additive",
            ))
        }
    };
    let k = valuation.items();
    let env = SispaEnv::new(valuation);
    check_size(&env)?;
    let spec = build_gamma_ob(&env).map_err(env_error)?;
    let pool = pool(
        config,
        |v, p| {
            Ok(ThresholdVector {
                thresholds: unit_list(v, p, k)?,
            })
        },
        |r, grid| ThresholdVector {
            thresholds: draw_values(r, k, m, grid),
        },
    )?;
    Ok(Setting { env, spec, pool })
}

/// Contextual VCG: the base spec is kept because the transductive runner builds its own extension.
pub struct ContextualSetting {
    pub env: ContextualEnv<VcgEnv>,
    pub base_spec: TranslationSpec<BidProfile>,
    pub transductive_set: Vec<usize>,
    pub pool: Vec<Contextual<BidProfile>>,
}

pub fn contextual(config: &ExperimentConfig) -> Result<ContextualSetting> {
    let e = &config.environment;
    let base = vcg_env(e)?;
    let base_spec = build_gamma_vcg(&base).map_err(env_error)?;
    let pc = e.policy_class.as_ref().ok_or_else(|| {
        HarnessError::config("environment.policy_class", "required for contextual")
    })?;
    let actions = |levels: &[Vec<u32>], name: &str| -> Result<Vec<usize>> {
        levels
            .iter()
            .enumerate()
            .map(|(i, z)| {
                base.action_of(z).ok_or_else(|| {
                    HarnessError::config(
                        format!("environment.policy_class.{name}[{i}]"),
                        "not a reserve level vector",
                    )
                })
            })
            .collect()
    };
    let class = PolicyClass::or_of_features(
        pc.features,
        &actions(&pc.high, "high")?,
        &actions(&pc.low, "low")?,
    )
    .map_err(|err| HarnessError::config("environment.policy_class", err.to_string()))?;
    if class.len() > MAX_ACTIONS {
        return Err(HarnessError::config(
            "environment.policy_class",
            "policy class too large",
        ));
    }
    let contexts = class.num_contexts();
    let transductive_set = e.transductive_set.clone().ok_or_else(|| {
        HarnessError::config("environment.transductive_set", "required for contextual")
    })?;
    if let Some(i) = transductive_set.iter().position(|&s| s >= contexts) {
        return Err(HarnessError::config(
            format!("environment.transductive_set[{i}]"),
            format!("context outside 0..{contexts}"),
        ));
    }
    let n = base.bidders();
    let m = base.m();
    let env = ContextualEnv::new(base, class).map_err(env_error)?;
    let set = transductive_set.clone();
    let pool = pool(
        config,
        |v, path| {
            let t = table(v, path, &["context", "bids"])?;
            let cp = format!("{path}.context");
            let context = unsigned(field(t, path, "context")?, &cp)? as usize;
            if !set.contains(&context) {
                return Err(HarnessError::config(
                    cp,
                    format!("context {context} is not in the transductive set"),
                ));
            }
            let bids = unit_list(field(t, path, "bids")?, &format!("{path}.bids"), n)?;
            Ok(Contextual {
                context,
                action: BidProfile::new(bids),
            })
        },
        |r, grid| {
            let context = set[r.random_range(0..set.len())];
            Contextual {
                context,
                action: BidProfile::new(draw_values(r, n, m, grid)),
            }
        },
    )?;
    Ok(ContextualSetting {
        env,
        base_spec,
        transductive_set,
        pool,
    })
}
