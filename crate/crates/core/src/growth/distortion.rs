//! Distortion `Δ(R) = max { |g|_H : g ∈ H, |g|_S ≤ R }` of a subgroup H.

use std::collections::{HashMap, HashSet};
use std::ops::ControlFlow;

use serde::Serialize;

use super::ball::{explore, Caps};
use crate::error::{Error, Result};
use crate::models::extension::ExtensionGenerator;
use crate::models::{Element, GroupModel, Key};
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Membership {
    Whole,
    /// The λ-component (split extensions) or shift (mod-p extensions) is trivial.
    Kernel,
    /// Commutes with every generator of the ambient group.
    Central,
}

/// A subgroup H with its own symmetric generating set, used for `|·|_H`.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub tag: String,
    pub generators: Vec<Element>,
    pub membership: Membership,
}

impl Subgroup {
    pub fn whole(model: &GroupModel) -> Self {
        Subgroup {
            tag: "whole".into(),
            generators: model.generator_elements(),
            membership: Membership::Whole,
        }
    }

    /// The normal factor of a split extension generated by `N ∩ S`, or ⟨α⟩
    /// in a mod-p extension.
    pub fn kernel(model: &GroupModel) -> Result<Self> {
        let gens = model.generators();
        let generators: Vec<Element> = match model {
            GroupModel::SplitExtension(e) => (0..gens.len())
                .filter(|&i| matches!(e.kind(i), ExtensionGenerator::Normal(_)))
                .map(|i| model.generator(i))
                .collect(),
            GroupModel::ModP(_) => (0..gens.len())
                .map(|i| model.generator(i))
                .filter(|g| matches!(g, Element::ModP(x) if x.shift == 0))
                .collect(),
            _ => {
                return Err(Error::Unsupported(format!(
                    "a {} model has no distinguished kernel",
                    model.kind()
                )))
            }
        };
        if generators.is_empty() {
            return Err(Error::Parameter("no generator lies in the kernel".into()));
        }
        Ok(Subgroup {
            tag: "kernel".into(),
            generators,
            membership: Membership::Kernel,
        })
    }

    /// The center, measured with the given generator words (and their inverses).
    pub fn center(model: &GroupModel, words: &[Word]) -> Result<Self> {
        let mut generators = Vec::new();
        for w in words {
            let g = model.evaluate_word(w)?;
            if !is_central(model, &g)? {
                return Err(Error::Parameter(format!("{w} is not central")));
            }
            generators.push(model.inverse(&g)?);
            generators.push(g);
        }
        if generators.is_empty() {
            return Err(Error::Parameter("the center needs at least one generator word".into()));
        }
        Ok(Subgroup {
            tag: "center".into(),
            generators,
            membership: Membership::Central,
        })
    }

    pub fn contains(&self, model: &GroupModel, g: &Element) -> Result<bool> {
        Ok(match self.membership {
            Membership::Whole => true,
            Membership::Kernel => match g {
                Element::Extension(x) => match model {
                    GroupModel::SplitExtension(e) => e.top().is_identity(&x.top),
                    _ => false,
                },
                Element::ModP(x) => x.shift == 0,
                _ => false,
            },
            Membership::Central => is_central(model, g)?,
        })
    }
}

fn is_central(model: &GroupModel, g: &Element) -> Result<bool> {
    for s in model.generator_elements() {
        if !model.equal(&model.multiply(g, &s)?, &model.multiply(&s, g)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionRow {
    pub radius: usize,
    pub delta: u64,
    /// Subgroup members with ambient length ≤ radius.
    pub members: u64,
    pub witness: String,
    /// `delta` is only a lower bound: some member's intrinsic length was not found.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistortionProfile {
    pub subgroup: String,
    pub rows: Vec<DistortionRow>,
}

impl DistortionProfile {
    pub fn series(&self) -> Vec<(u64, f64)> {
        self.rows.iter().map(|r| (r.radius as u64, r.delta as f64)).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("radius,delta,members,witness,truncated\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},\"{}\",{}\n",
                r.radius, r.delta, r.members, r.witness, r.truncated
            ));
        }
        out
    }
}

/// Enumerates the ambient ball, then measures every member inside H by a
/// second BFS over H's generators that stops once all members are found or
/// `intrinsic_cap` elements have been stored.
pub fn distortion_profile(
    model: &GroupModel,
    subgroup: &Subgroup,
    r_max: usize,
    caps: &Caps,
    intrinsic_cap: usize,
) -> Result<DistortionProfile> {
    let gens = model.generator_elements();
    let mut members: Vec<(usize, Key, Element)> = Vec::new();
    let mut error = None;
    let ambient = explore(model, &gens, r_max, caps, |r, key, g| match subgroup.contains(model, g) {
        Ok(true) => {
            members.push((r, key.clone(), g.clone()));
            ControlFlow::Continue(())
        }
        Ok(false) => ControlFlow::Continue(()),
        Err(e) => {
            error = Some(e);
            ControlFlow::Break(())
        }
    })?;
    if let Some(e) = error {
        return Err(e);
    }
    let complete = match ambient.truncated_at {
        Some(t) => t - 1,
        None => r_max,
    };
    members.retain(|m| m.0 <= complete);

    let mut pending: HashSet<Key> = members.iter().map(|m| m.1.clone()).collect();
    let intrinsic_caps = Caps {
        max_elements: intrinsic_cap,
        ..caps.clone()
    };
    let mut intrinsic: HashMap<Key, u64> = HashMap::new();
    explore(model, &subgroup.generators, usize::MAX, &intrinsic_caps, |r, key, _| {
        if pending.remove(key) {
            intrinsic.insert(key.clone(), r as u64);
        }
        if pending.is_empty() {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;

    members.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    let mut rows = Vec::with_capacity(complete + 1);
    let mut best: Option<(u64, &Key, &Element)> = None;
    let (mut count, mut truncated, mut idx) = (0u64, false, 0);
    for radius in 0..=complete {
        while idx < members.len() && members[idx].0 == radius {
            let (_, key, g) = &members[idx];
            count += 1;
            match intrinsic.get(key) {
                Some(&len) => {
                    let better = match best {
                        None => true,
                        Some((b, bkey, _)) => len > b || (len == b && key < bkey),
                    };
                    if better {
                        best = Some((len, key, g));
                    }
                }
                None => truncated = true,
            }
            idx += 1;
        }
        let (delta, witness) = best.map_or((0, "e".to_string()), |(len, _, g)| (len, model.format(g)));
        rows.push(DistortionRow {
            radius,
            delta,
            members: count,
            witness,
            truncated,
        });
    }
    Ok(DistortionProfile {
        subgroup: subgroup.tag.clone(),
        rows,
    })
}
