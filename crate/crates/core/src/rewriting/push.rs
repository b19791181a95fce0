//! Moving nilpotent letters to the left: `w = ν · σ` with ν in N and σ the
//! subsequence of `S_0`-letters of `w`.
//!
//! Scanning `w`, each N-letter `α` met after the `S_0`-prefix σ is rewritten
//! as `φ_σ(α)` and appended to ν, where `φ_σ` is conjugation by σ. The maps
//! `φ_σ` are composed one letter at a time and memoized by prefix.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::extension::{Automorphism, ExtensionGenerator};
use crate::models::polycyclic::{BasisLetter, ExponentVector, PolycyclicPresentation};
use crate::models::{Element, GroupModel};
use crate::words::{Letter, SymmetricGeneratingSet, Word};

/// Default cap on memoized prefix maps, in megabytes.
pub const DEFAULT_CACHE_MB: usize = 64;

#[derive(Clone, Debug)]
pub enum LetterKind {
    /// A letter of `B_1`: a basis letter of N.
    Normal(BasisLetter),
    /// A letter of `S_0` with its conjugation action on N.
    Top(Arc<Automorphism>),
}

/// Memoized `φ_σ` keyed by the exact `S_0`-prefix σ; entries beyond the cap
/// are simply not stored.
#[derive(Debug)]
pub struct ConjugationTableCache {
    maps: Mutex<HashMap<Vec<u32>, Arc<Automorphism>>>,
    max_bytes: usize,
    used: Mutex<usize>,
}

impl ConjugationTableCache {
    pub fn new(max_bytes: usize) -> Self {
        ConjugationTableCache {
            maps: Mutex::new(HashMap::new()),
            max_bytes,
            used: Mutex::new(0),
        }
    }

    /// Cap from `GROWTHLAB_CACHE_MB`, else the default.
    pub fn from_env() -> Self {
        let mb = std::env::var("GROWTHLAB_CACHE_MB")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(DEFAULT_CACHE_MB);
        Self::new(mb << 20)
    }

    fn get(&self, prefix: &[u32]) -> Option<Arc<Automorphism>> {
        self.maps.lock().unwrap().get(prefix).cloned()
    }

    fn insert(&self, prefix: &[u32], map: &Arc<Automorphism>) {
        let bytes = prefix.len() * 4
            + map
                .iter()
                .map(|v| v.iter().map(|e| e.bits() as usize / 8 + 16).sum::<usize>())
                .sum::<usize>();
        let mut used = self.used.lock().unwrap();
        if *used + bytes > self.max_bytes {
            return;
        }
        if self.maps.lock().unwrap().insert(prefix.to_vec(), Arc::clone(map)).is_none() {
            *used += bytes;
        }
    }

    pub fn len(&self) -> usize {
        self.maps.lock().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// What `push_right` needs: the presentation of N and the role of each letter.
#[derive(Debug)]
pub struct RewriteContext {
    pub(crate) model: Arc<GroupModel>,
    pub(crate) gens: Arc<SymmetricGeneratingSet>,
    pub(crate) normal: Arc<PolycyclicPresentation>,
    pub(crate) kinds: Vec<LetterKind>,
    /// Where N sits inside a polycyclic model's basis (0 for split extensions).
    pub(crate) normal_offset: usize,
    pub(crate) cache: ConjugationTableCache,
    /// Bound on `|ν|` during a rewrite.
    pub max_intermediate: Option<BigInt>,
}

impl RewriteContext {
    /// `B_1` is the generators of N, `S_0` the generators of Λ.
    pub fn from_model(model: Arc<GroupModel>) -> Result<Self> {
        match model.as_ref() {
            GroupModel::SplitExtension(e) => {
                let gens = Arc::clone(e.generators());
                let kinds = (0..gens.len())
                    .map(|i| match e.kind(i) {
                        ExtensionGenerator::Normal(l) => LetterKind::Normal(l),
                        ExtensionGenerator::Top(j) => LetterKind::Top(Arc::clone(e.action(j))),
                    })
                    .collect();
                Ok(RewriteContext {
                    gens,
                    normal: Arc::clone(e.normal()),
                    kinds,
                    normal_offset: 0,
                    cache: ConjugationTableCache::from_env(),
                    max_intermediate: None,
                    model,
                })
            }
            GroupModel::Polycyclic(_) => Err(Error::Parameter(
                "a polycyclic model needs a split point; use from_polycyclic".into(),
            )),
            _ => Err(Error::Unsupported(format!(
                "rewriting needs a split extension or a polycyclic model, not a {} model",
                model.kind()
            ))),
        }
    }

    /// Takes N to be the tail `α_split, …` of a polycyclic basis and
    /// `S_0` the letters before it. The tail must be normal.
    pub fn from_polycyclic(model: Arc<GroupModel>, split: usize) -> Result<Self> {
        let GroupModel::Polycyclic(p) = model.as_ref() else {
            return Err(Error::Parameter("from_polycyclic needs a polycyclic model".into()));
        };
        let pres = p.presentation();
        if split == 0 || split >= pres.len() {
            return Err(Error::Parameter(format!(
                "split point {split} must leave both parts non-empty"
            )));
        }
        let normal = Arc::new(pres.tail(split));
        let n = normal.len();
        let gens = Arc::clone(p.generators());
        let mut kinds = Vec::with_capacity(gens.len());
        for g in 0..gens.len() {
            let l = p.letter(g);
            if l.index >= split {
                kinds.push(LetterKind::Normal(BasisLetter {
                    index: l.index - split,
                    negative: l.negative,
                }));
                continue;
            }
            let mut images = Vec::with_capacity(n);
            for j in split..pres.len() {
                let image = pres.conjugate(l.index, l.negative, j);
                if image[..split].iter().any(|e| !e.is_zero()) {
                    return Err(Error::PresentationInvalid(format!(
                        "conjugating {} by {} leaves the tail; the tail is not normal",
                        pres.labels()[j],
                        gens.label(g)
                    )));
                }
                images.push(image[split..].to_vec());
            }
            kinds.push(LetterKind::Top(Arc::new(images)));
        }
        Ok(RewriteContext {
            gens,
            normal,
            kinds,
            normal_offset: split,
            cache: ConjugationTableCache::from_env(),
            max_intermediate: None,
            model,
        })
    }

    pub fn model(&self) -> &Arc<GroupModel> {
        &self.model
    }

    pub fn normal(&self) -> &Arc<PolycyclicPresentation> {
        &self.normal
    }

    pub fn kind(&self, generator: usize) -> &LetterKind {
        &self.kinds[generator]
    }

    pub fn cache(&self) -> &ConjugationTableCache {
        &self.cache
    }

    /// `A = max |a_(i,p)(γ)|` over all `S_0` letters and basis images.
    pub fn table_constant(&self) -> BigInt {
        self.kinds
            .iter()
            .filter_map(|k| match k {
                LetterKind::Top(f) => f.iter().flatten().map(|e| e.abs()).max(),
                LetterKind::Normal(_) => None,
            })
            .max()
            .unwrap_or_default()
    }

    /// The element of the ambient model represented by `ν ∈ N`.
    pub fn embed_normal(&self, nu: &ExponentVector) -> Element {
        match self.model.as_ref() {
            GroupModel::SplitExtension(e) => Element::Extension(Box::new(e.embed_normal(nu.clone()))),
            GroupModel::Polycyclic(p) => {
                let mut v = p.presentation().identity();
                v[self.normal_offset..].clone_from_slice(nu);
                Element::Polycyclic(v)
            }
            _ => unreachable!("contexts are built only for these models"),
        }
    }

    /// φ_σ for an `S_0` prefix, composing from the longest cached prefix.
    fn prefix_map(&self, sigma: &[u32], parent: Option<&Arc<Automorphism>>) -> Result<Arc<Automorphism>> {
        if let Some(m) = self.cache.get(sigma) {
            return Ok(m);
        }
        let last = *sigma.last().expect("non-empty prefix") as usize;
        let LetterKind::Top(step) = &self.kinds[last] else {
            unreachable!("σ holds only S_0 letters")
        };
        let map = match parent {
            None => Arc::clone(step),
            Some(f) => {
                // φ_(σ s) = φ_σ ∘ φ_s
                let mut c = self.normal.collector();
                Arc::new(
                    step.iter()
                        .map(|v| c.apply_images(f, 0, v))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
        };
        self.cache.insert(sigma, &map);
        Ok(map)
    }
}

/// Instrumentation of one rewrite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RewriteTrace {
    pub input_length: usize,
    /// `|ν|` measured as the sum of absolute exponents.
    #[serde(serialize_with = "as_string")]
    pub s: BigInt,
    pub t: usize,
    pub conj_ops: u64,
    #[serde(serialize_with = "as_string")]
    pub max_intermediate: BigInt,
}

fn as_string<S: serde::Serializer>(x: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(x)
}

impl RewriteTrace {
    pub fn csv_header() -> &'static str {
        "input_length,s,t,conj_ops,max_intermediate"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{}",
            self.input_length, self.s, self.t, self.conj_ops, self.max_intermediate
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushResult {
    /// ν as a normal form of N.
    pub nu: ExponentVector,
    pub sigma: Word,
    pub trace: RewriteTrace,
}

pub fn push_right(ctx: &RewriteContext, w: &Word) -> Result<PushResult> {
    if **w.generating_set() != *ctx.gens {
        return Err(Error::Structural("word is over a different generating set".into()));
    }
    let mut nu = ctx.normal.identity();
    let mut sigma: Vec<u32> = Vec::new();
    let mut phi: Option<Arc<Automorphism>> = None;
    let mut conj_ops = 0u64;
    let mut max_intermediate = BigInt::zero();
    let mut c = ctx.normal.collector();
    let (one, minus_one) = (BigInt::from(1), BigInt::from(-1));
    for g in w.resolved() {
        match &ctx.kinds[g] {
            LetterKind::Top(_) => {
                sigma.push(g as u32);
                phi = Some(ctx.prefix_map(&sigma, phi.as_ref())?);
            }
            LetterKind::Normal(l) => {
                let e = if l.negative { &minus_one } else { &one };
                match &phi {
                    None => c.mul_gen_pow(&mut nu, l.index, e)?,
                    Some(f) => {
                        conj_ops += 1;
                        let image = c.pow(&f[l.index], e)?;
                        nu = c.multiply(&nu, &image)?;
                    }
                }
                let size = PolycyclicPresentation::exponent_length(&nu);
                if let Some(cap) = &ctx.max_intermediate {
                    if size > *cap {
                        return Err(Error::Resource(format!(
                            "|ν| = {size} exceeds the budget {cap} after {conj_ops} conjugate operations"
                        )));
                    }
                }
                if size > max_intermediate {
                    max_intermediate = size;
                }
            }
        }
    }
    let t = sigma.len();
    let sigma = Word::new(
        Arc::clone(&ctx.gens),
        sigma.into_iter().map(|g| Letter::new(g as usize)).collect(),
    )?;
    Ok(PushResult {
        trace: RewriteTrace {
            input_length: w.len(),
            s: PolycyclicPresentation::exponent_length(&nu),
            t,
            conj_ops,
            max_intermediate,
        },
        nu,
        sigma,
    })
}

/// Whether `w = ν · σ` in the model.
pub fn verify_push(ctx: &RewriteContext, w: &Word, r: &PushResult) -> Result<bool> {
    let m = &ctx.model;
    let lhs = m.evaluate_word(w)?;
    let rhs = m.multiply(&ctx.embed_normal(&r.nu), &m.evaluate_word(&r.sigma)?)?;
    Ok(m.equal(&lhs, &rhs))
}
