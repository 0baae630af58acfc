//! Partition combinatorics and the explicit order-k chain rule.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::atlas::SmoothMap;
use crate::error::{check_dim, Error, Result};
use crate::jets::{CurveJet, Scalar};

/// Largest order for which [`chain_coefficient`] is computed exactly.
pub const MAX_COEFFICIENT_ORDER: usize = 20;

/// A multiset of positive integers summing to `k`, stored as its
/// non-decreasing representative `(j_1, …, j_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionTuple {
    parts: Vec<usize>,
    multiplicities: Vec<usize>,
}

impl PartitionTuple {
    pub fn new(mut parts: Vec<usize>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::InvalidArgument(
                "partition parts must be positive".into(),
            ));
        }
        parts.sort_unstable();
        let k = parts.iter().sum();
        let mut multiplicities = vec![0; k];
        for &p in &parts {
            multiplicities[p - 1] += 1;
        }
        Ok(Self {
            parts,
            multiplicities,
        })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    /// Sum of the parts.
    pub fn k(&self) -> usize {
        self.multiplicities.len()
    }

    /// Number of parts `i`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `m_r`, the number of parts equal to `r` (zero outside `1..=k`).
    pub fn multiplicity(&self, r: usize) -> usize {
        r.checked_sub(1)
            .and_then(|i| self.multiplicities.get(i))
            .copied()
            .unwrap_or(0)
    }
}

type PartitionCache = Mutex<HashMap<usize, Arc<[PartitionTuple]>>>;

fn cache() -> &'static PartitionCache {
    static CACHE: OnceLock<PartitionCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// All partitions of `k`, ordered by number of parts and then
/// lexicographically.
pub fn enumerate_partitions(k: usize) -> Result<Arc<[PartitionTuple]>> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "partitions of 0 are not enumerated".into(),
        ));
    }
    if let Some(p) = cache().lock().map_err(|_| poisoned())?.get(&k) {
        return Ok(p.clone());
    }
    let mut raw = Vec::new();
    collect_partitions(k, 1, &mut Vec::new(), &mut raw);
    raw.sort_by(|a: &Vec<usize>, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let list: Arc<[PartitionTuple]> = raw
        .into_iter()
        .map(PartitionTuple::new)
        .collect::<Result<Vec<_>>>()?
        .into();
    cache()
        .lock()
        .map_err(|_| poisoned())?
        .insert(k, list.clone());
    Ok(list)
}

fn poisoned() -> Error {
    Error::InvalidArgument("partition cache poisoned".into())
}

fn collect_partitions(rest: usize, min: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for p in min..=rest {
        cur.push(p);
        collect_partitions(rest - p, p, cur, out);
        cur.pop();
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// `a^k = k! / (j_1!⋯j_i! · m_1!⋯m_k!)`.
pub fn chain_coefficient(p: &PartitionTuple) -> Result<u128> {
    let k = p.k();
    if k > MAX_COEFFICIENT_ORDER {
        return Err(Error::OrderUnavailable {
            requested: k,
            available: MAX_COEFFICIENT_ORDER,
        });
    }
    let denom: u128 = p.parts.iter().map(|&j| factorial(j)).product::<u128>()
        * p.multiplicities
            .iter()
            .map(|&m| factorial(m))
            .product::<u128>();
    Ok(factorial(k) / denom)
}

/// Normalized coefficients of `ψ∘γ` from the normalized coefficients `xi` of
/// `γ`, where `apply(i, args)` evaluates `dⁱψ(x)[args]`:
/// `ξ̄_k = (1/k!) Σ_p a^k_p · d^{|p|}ψ(j_1!ξ_{j_1}, …, j_i!ξ_{j_i})`.
pub fn chain_rule<S, F>(xi: &[Vec<S>], apply: F) -> Result<Vec<Vec<S>>>
where
    S: Scalar,
    F: Fn(usize, &[&[S]]) -> Result<Vec<S>>,
{
    let denorm: Vec<Vec<S>> = xi
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let f = factorial(j + 1) as f64;
            c.iter().map(|v| v.scale(f)).collect()
        })
        .collect();
    let mut out = Vec::with_capacity(xi.len());
    for k in 1..=xi.len() {
        let mut acc: Option<Vec<S>> = None;
        for p in enumerate_partitions(k)?.iter() {
            let a = chain_coefficient(p)? as f64;
            let args: Vec<&[S]> = p
                .parts()
                .iter()
                .map(|&j| denorm[j - 1].as_slice())
                .collect();
            let term = apply(p.len(), &args)?;
            acc = Some(match acc {
                None => term.into_iter().map(|v| v.scale(a)).collect(),
                Some(prev) => prev
                    .into_iter()
                    .zip(term)
                    .map(|(s, v)| s + v.scale(a))
                    .collect(),
            });
        }
        let kf = factorial(k) as f64;
        out.push(
            acc.unwrap_or_default()
                .into_iter()
                .map(|v| v.scale(1.0 / kf))
                .collect(),
        );
    }
    Ok(out)
}

/// `Ψ^k`-image of a jet under `f`, keeping the jet's chart label.
pub fn pushforward_jet(f: &dyn SmoothMap, jet: &CurveJet) -> Result<CurveJet> {
    check_dim(f.dim_in(), jet.dim())?;
    let tensors = f.tensors(jet.x(), jet.order())?;
    let xi = chain_rule(jet.xi(), |i, args| tensors[i - 1].apply(args))?;
    CurveJet::new(jet.chart(), f.value(jet.x()), xi)
}
