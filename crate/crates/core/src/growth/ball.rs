//! Breadth-first enumeration of word-metric balls.
//!
//! Each frontier is expanded in parallel (products and keys are the
//! expensive part), then merged sequentially in frontier order, so the set
//! of elements attributed to each radius never depends on the schedule.

use std::collections::HashMap;
use std::ops::ControlFlow;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::{Element, GroupModel, Key};

pub const DEFAULT_MAX_ELEMENTS: usize = 10_000_000;
pub const DEFAULT_MAX_MEMORY_BYTES: usize = 2 << 30;

/// Per-entry bookkeeping charged against the memory cap on top of the key bytes.
const ENTRY_OVERHEAD: usize = 64;

#[derive(Clone, Debug)]
pub struct Caps {
    pub max_elements: usize,
    /// Approximate bytes held by the dedup table.
    pub max_memory_bytes: usize,
    /// Worker threads for frontier expansion; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_memory_bytes: DEFAULT_MAX_MEMORY_BYTES,
            threads: None,
        }
    }
}

impl Caps {
    pub fn with_max_elements(max_elements: usize) -> Self {
        Caps {
            max_elements,
            ..Caps::default()
        }
    }

    /// Runs `f` on a dedicated pool when a thread count was requested.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n.max(1))
                    .build()
                    .map_err(|e| Error::Parameter(format!("cannot start {n} threads: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Cumulative and sphere counts by radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BallCensus {
    pub model_kind: String,
    pub fingerprint: String,
    pub requested_radius: usize,
    /// `cumulative[r] = |Γ(r, S)|`; the last entry is partial when truncated.
    pub cumulative: Vec<u64>,
    pub sphere: Vec<u64>,
    /// First radius whose sphere was cut short by a cap.
    pub truncated_at: Option<usize>,
}

impl BallCensus {
    /// Largest radius whose count is exact.
    pub fn complete_radius(&self) -> usize {
        match self.truncated_at {
            Some(r) => r - 1,
            None => self.cumulative.len() - 1,
        }
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated_at.is_some()
    }

    /// Exact counts `c(0..=complete_radius)`.
    pub fn complete(&self) -> &[u64] {
        &self.cumulative[..=self.complete_radius()]
    }

    /// Pairs `(r, s)` with `c(r + s) > c(r) c(s)` among exact counts.
    pub fn submultiplicativity_violations(&self) -> Vec<(usize, usize)> {
        let c = self.complete();
        let mut out = Vec::new();
        for r in 0..c.len() {
            for s in r..c.len() - r {
                if (c[r + s] as u128) > (c[r] as u128) * (c[s] as u128) {
                    out.push((r, s));
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,cumulative,sphere,truncated\n");
        for r in 0..self.cumulative.len() {
            let truncated = self.truncated_at.is_some_and(|t| r >= t);
            out.push_str(&format!(
                "{r},{},{},{truncated}\n",
                self.cumulative[r], self.sphere[r]
            ));
        }
        out
    }
}

/// Outcome of a raw exploration.
#[derive(Clone, Debug)]
pub(crate) struct Exploration {
    pub sphere: Vec<u64>,
    pub truncated_at: Option<usize>,
    /// The visitor asked to stop.
    pub stopped: bool,
    /// The frontier emptied: the whole group was reached.
    pub exhausted: bool,
    pub radius_of: HashMap<Key, u32>,
}

/// BFS from the identity under right multiplication by `gens`, calling
/// `visit(radius, key, element)` on each new element in deterministic order.
pub(crate) fn explore<F>(
    model: &GroupModel,
    gens: &[Element],
    r_max: usize,
    caps: &Caps,
    mut visit: F,
) -> Result<Exploration>
where
    F: FnMut(usize, &Key, &Element) -> ControlFlow<()>,
{
    let identity = model.identity();
    let id_key = model.key(&identity);
    let mut radius_of: HashMap<Key, u32> = HashMap::new();
    let mut memory = id_key.len() + ENTRY_OVERHEAD;
    let mut out = Exploration {
        sphere: vec![1],
        truncated_at: None,
        stopped: false,
        exhausted: false,
        radius_of: HashMap::new(),
    };
    if visit(0, &id_key, &identity).is_break() {
        out.stopped = true;
    }
    radius_of.insert(id_key, 0);
    let mut frontier = vec![identity];
    let mut r = 0;
    while r < r_max && !out.stopped {
        if frontier.is_empty() {
            break;
        }
        r += 1;
        let candidates: Vec<Vec<(Key, Element)>> = caps.install(|| {
            frontier
                .par_iter()
                .map(|g| {
                    gens.iter()
                        .map(|s| {
                            let h = model.multiply(g, s)?;
                            Ok((model.key(&h), h))
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })??;
        let mut next = Vec::new();
        'merge: for (key, h) in candidates.into_iter().flatten() {
            if radius_of.contains_key(&key) {
                continue;
            }
            let cost = key.len() + ENTRY_OVERHEAD;
            if radius_of.len() >= caps.max_elements || memory + cost > caps.max_memory_bytes {
                out.truncated_at = Some(r);
                break 'merge;
            }
            memory += cost;
            if visit(r, &key, &h).is_break() {
                out.stopped = true;
            }
            radius_of.insert(key, r as u32);
            next.push(h);
            if out.stopped {
                break 'merge;
            }
        }
        out.sphere.push(next.len() as u64);
        if out.truncated_at.is_some() {
            break;
        }
        frontier = next;
    }
    if frontier.is_empty() && out.truncated_at.is_none() {
        out.exhausted = true;
    }
    out.radius_of = radius_of;
    Ok(out)
}

fn census_from(model: &GroupModel, r_max: usize, e: &Exploration) -> BallCensus {
    let mut sphere = e.sphere.clone();
    if e.exhausted {
        // A finite group: every larger sphere is empty.
        sphere.resize(r_max + 1, 0);
    }
    let mut cumulative = Vec::with_capacity(sphere.len());
    let mut total = 0;
    for s in &sphere {
        total += s;
        cumulative.push(total);
    }
    BallCensus {
        model_kind: model.kind().to_string(),
        fingerprint: model.generators().fingerprint(),
        requested_radius: r_max,
        cumulative,
        sphere,
        truncated_at: e.truncated_at,
    }
}

/// Census of `Γ(R, S)` for `R ≤ r_max` over the model's generating set.
pub fn enumerate_ball(model: &GroupModel, r_max: usize, caps: &Caps) -> Result<BallCensus> {
    Ok(enumerate_ball_elements(model, r_max, caps)?.census)
}

/// A census together with the radius of every enumerated element.
#[derive(Clone, Debug)]
pub struct Ball {
    pub census: BallCensus,
    pub radius_of: HashMap<Key, u32>,
}

impl Ball {
    pub fn length(&self, model: &GroupModel, g: &Element) -> Option<usize> {
        self.radius_of.get(&model.key(g)).map(|&r| r as usize)
    }
}

pub fn enumerate_ball_elements(model: &GroupModel, r_max: usize, caps: &Caps) -> Result<Ball> {
    let gens = model.generator_elements();
    let e = explore(model, &gens, r_max, caps, |_, _, _| ControlFlow::Continue(()))?;
    Ok(Ball {
        census: census_from(model, r_max, &e),
        radius_of: e.radius_of,
    })
}

/// Census over an explicit list of generator elements (used for quotient balls).
pub fn enumerate_ball_over(
    model: &GroupModel,
    gens: &[Element],
    r_max: usize,
    caps: &Caps,
) -> Result<BallCensus> {
    let e = explore(model, gens, r_max, caps, |_, _, _| ControlFlow::Continue(()))?;
    Ok(census_from(model, r_max, &e))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementLength {
    Found(usize),
    NotInBall,
}

/// `|g|_S` by BFS, stopping as soon as `g` appears or the radius budget runs out.
pub fn element_length(model: &GroupModel, g: &Element, budget: usize, caps: &Caps) -> Result<ElementLength> {
    let target = model.key(g);
    let mut found = None;
    let gens = model.generator_elements();
    explore(model, &gens, budget, caps, |r, key, _| {
        if *key == target {
            found = Some(r);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(found.map_or(ElementLength::NotInBall, ElementLength::Found))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Closure {
    Finite { order: u64 },
    CapExceeded { explored: u64 },
}

/// BFS until no new elements appear or `cap` elements have been stored.
pub fn enumerate_closure(model: &GroupModel, cap: usize) -> Result<Closure> {
    if cap == 0 {
        return Err(Error::Parameter("closure cap must be at least 1".into()));
    }
    let caps = Caps::with_max_elements(cap);
    let gens = model.generator_elements();
    let e = explore(model, &gens, usize::MAX, &caps, |_, _, _| ControlFlow::Continue(()))?;
    let total: u64 = e.sphere.iter().sum();
    Ok(if e.truncated_at.is_some() {
        Closure::CapExceeded { explored: total }
    } else {
        Closure::Finite { order: total }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::spec::parse_group_spec;

    fn z() -> GroupModel {
        let text = r#"{"model": "polycyclic", "generators": [{"label": "a", "inverse_label": "A"}], "strata": [[0, 1]]}"#;
        (*parse_group_spec(text).unwrap().model).clone()
    }

    #[test]
    fn radius_zero_is_identity_only() {
        let c = enumerate_ball(&z(), 0, &Caps::default()).unwrap();
        assert_eq!(c.cumulative, vec![1]);
        assert_eq!(c.complete_radius(), 0);
    }

    #[test]
    fn integers_grow_linearly() {
        let c = enumerate_ball(&z(), 10, &Caps::default()).unwrap();
        let expected: Vec<u64> = (0..=10).map(|r| 2 * r + 1).collect();
        assert_eq!(c.cumulative, expected);
        assert!(c.submultiplicativity_violations().is_empty());
        assert!(c.to_csv().starts_with("radius,cumulative,sphere,truncated\n0,1,1,false\n1,3,2,false\n"));
    }

    #[test]
    fn cap_truncates_at_first_incomplete_radius() {
        let c = enumerate_ball(&z(), 10, &Caps::with_max_elements(6)).unwrap();
        assert_eq!(c.truncated_at, Some(3));
        assert_eq!(c.complete(), &[1, 3, 5]);
        assert!(c.to_csv().ends_with("3,6,1,true\n"));
    }

    #[test]
    fn lengths_and_closure() {
        let g = z();
        let a3 = g.evaluate_word(&g.parse_word("a a a").unwrap()).unwrap();
        assert_eq!(element_length(&g, &a3, 5, &Caps::default()).unwrap(), ElementLength::Found(3));
        assert_eq!(element_length(&g, &a3, 2, &Caps::default()).unwrap(), ElementLength::NotInBall);
        assert_eq!(enumerate_closure(&g, 100).unwrap(), Closure::CapExceeded { explored: 100 });
    }
}
