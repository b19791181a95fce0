//! Collected normal form `w = α · τ_m^(a_m) ⋯ τ_1^(a_1) · β_q`.
//!
//! The `S_0`-part σ left over by `push_right` is reduced in a polycyclic
//! presentation of the whole group whose basis is the top letters τ followed
//! by N, then its τ-exponents are peeled off from the right. What remains
//! lies in N and is absorbed into α.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use super::coset::{coset_normal_form, CosetTables};
use super::push::{push_right, RewriteContext, RewriteTrace};
use crate::error::{Error, Result};
use crate::models::extension::ExtensionGenerator;
use crate::models::polycyclic::{BasisLetter, ConjugationWords, ExponentVector, PolycyclicPresentation};
use crate::models::{Element, GroupModel};
use crate::words::{concat, Letter, Word};

/// Longest word `CollectedForm::to_word` will spell out.
pub const MAX_SPELLED_LENGTH: u64 = 1 << 20;

#[derive(Debug)]
pub struct CollectionData {
    ctx: RewriteContext,
    /// Basis `τ_1, …, τ_k, α_1, …, α_n`.
    combined: Arc<PolycyclicPresentation>,
    k: usize,
    /// Basis letter of each generator in `combined`.
    letters: Vec<BasisLetter>,
    cosets: Option<Arc<CosetTables>>,
}

impl CollectionData {
    /// For a split extension the top group must be polycyclic and each of its
    /// basis letters a generator; for a polycyclic model N is the tail from `split`.
    pub fn new(model: Arc<GroupModel>, split: Option<usize>, cosets: Option<Arc<CosetTables>>) -> Result<Self> {
        let data = match model.as_ref() {
            GroupModel::SplitExtension(_) => {
                let ctx = RewriteContext::from_model(Arc::clone(&model))?;
                let (combined, k, letters) = combine(&model)?;
                CollectionData { ctx, combined: Arc::new(combined), k, letters, cosets }
            }
            GroupModel::Polycyclic(p) => {
                let split = split.ok_or_else(|| {
                    Error::Parameter("a polycyclic model needs a split point".into())
                })?;
                let ctx = RewriteContext::from_polycyclic(Arc::clone(&model), split)?;
                CollectionData {
                    ctx,
                    combined: Arc::clone(p.presentation()),
                    k: split,
                    letters: p.letters().to_vec(),
                    cosets,
                }
            }
            _ => {
                return Err(Error::Unsupported(format!(
                    "collection needs a split extension or a polycyclic model, not a {} model",
                    model.kind()
                )))
            }
        };
        if let Some(t) = &data.cosets {
            if **t.generating_set() != **model.generators() {
                return Err(Error::Structural("coset tables use a different generating set".into()));
            }
        }
        Ok(data)
    }

    pub fn context(&self) -> &RewriteContext {
        &self.ctx
    }

    pub fn combined(&self) -> &Arc<PolycyclicPresentation> {
        &self.combined
    }

    /// Number of top letters τ.
    pub fn top_rank(&self) -> usize {
        self.k
    }

    pub fn cosets(&self) -> Option<&Arc<CosetTables>> {
        self.cosets.as_ref()
    }

    /// Generator spelling the basis letter `index` (positive or inverse).
    fn generator_for(&self, index: usize, negative: bool) -> Result<usize> {
        self.letters
            .iter()
            .position(|l| l.index == index && l.negative == negative)
            .ok_or_else(|| {
                Error::Unsupported(format!(
                    "no generator spells {}{}",
                    self.combined.labels()[index],
                    if negative { "^-1" } else { "" }
                ))
            })
    }
}

/// Combined presentation of `N ⋊ Λ` for polycyclic Λ.
fn combine(model: &GroupModel) -> Result<(PolycyclicPresentation, usize, Vec<BasisLetter>)> {
    let GroupModel::SplitExtension(e) = model else { unreachable!() };
    let GroupModel::Polycyclic(top) = e.top().as_ref() else {
        return Err(Error::Unsupported(format!(
            "collection needs a polycyclic top group, not a {} model",
            e.top().kind()
        )));
    };
    let (tp, np) = (top.presentation(), e.normal());
    let (k, n) = (tp.len(), np.len());
    let mut action = vec![[None, None]; k];
    for (j, l) in top.letters().iter().enumerate() {
        action[l.index][l.negative as usize] = Some(Arc::clone(e.action(j)));
    }
    let spell = |v: &[BigInt], offset: usize| -> Result<Vec<BasisLetter>> {
        let mut out = Vec::new();
        for (i, x) in v.iter().enumerate() {
            let count = x.abs().to_u64().filter(|&c| c <= MAX_SPELLED_LENGTH).ok_or_else(|| {
                Error::Unsupported("conjugation table entry too large to spell".into())
            })?;
            out.extend((0..count).map(|_| BasisLetter { index: i + offset, negative: x.is_negative() }));
        }
        Ok(out)
    };
    let mut words = ConjugationWords::new();
    for i in 0..k + n {
        for j in i + 1..k + n {
            for negative in [false, true] {
                let w = if j < k {
                    spell(tp.conjugate(i, negative, j), 0)?
                } else if i < k {
                    let f = match &action[i][negative as usize] {
                        Some(f) => f,
                        None if tp.modulus(i) == Some(&BigInt::from(2)) => match &action[i][0] {
                            Some(f) => f,
                            None => return Err(no_generator(tp, i, negative)),
                        },
                        None => return Err(no_generator(tp, i, negative)),
                    };
                    spell(&f[j - k], k)?
                } else {
                    spell(np.conjugate(i - k, negative, j - k), k)?
                };
                words.insert((i, negative, j), w);
            }
        }
    }
    let mut labels = tp.labels().to_vec();
    labels.extend(np.labels().iter().cloned());
    let mut strata = tp.strata().to_vec();
    strata.extend(np.strata().iter().map(|r| r.start + k..r.end + k));
    let moduli = (0..k)
        .map(|i| tp.modulus(i).cloned())
        .chain((0..n).map(|i| np.modulus(i).cloned()))
        .collect();
    let combined = PolycyclicPresentation::new(labels, strata, moduli, &words)?;
    let letters = (0..e.generators().len())
        .map(|g| match e.kind(g) {
            ExtensionGenerator::Normal(l) => BasisLetter { index: l.index + k, negative: l.negative },
            ExtensionGenerator::Top(j) => top.letter(j),
        })
        .collect();
    Ok((combined, k, letters))
}

fn no_generator(tp: &PolycyclicPresentation, i: usize, negative: bool) -> Error {
    Error::Unsupported(format!(
        "top basis letter {}{} is not a generator, so its action is unknown",
        tp.labels()[i],
        if negative { "^-1" } else { "" }
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollectedForm {
    /// α as a normal form of N.
    pub alpha: ExponentVector,
    /// `a_1, …, a_k`, the exponent of τ_i at position `i - 1`.
    pub exponents: Vec<BigInt>,
    pub coset: Option<usize>,
    pub trace: RewriteTrace,
}

pub fn collect_normal_form(data: &CollectionData, w: &Word) -> Result<CollectedForm> {
    let (phi, coset) = match &data.cosets {
        Some(t) => {
            let nf = coset_normal_form(t, w)?;
            (nf.phi, Some(nf.coset))
        }
        None => (w.clone(), None),
    };
    let pushed = push_right(&data.ctx, &phi)?;
    let pres = &data.combined;
    let mut c = pres.collector();
    let mut x = pres.identity();
    let (one, minus_one) = (BigInt::from(1), BigInt::from(-1));
    for g in pushed.sigma.resolved() {
        let l = data.letters[g];
        c.mul_gen_pow(&mut x, l.index, if l.negative { &minus_one } else { &one })?;
    }
    let mut exponents = Vec::with_capacity(data.k);
    for i in 0..data.k {
        let a = x[i].clone();
        // The remaining factor of σ lies in ⟨α_(i+1), …⟩, so its image
        // modulo that subgroup is τ_i^a.
        c.mul_gen_pow(&mut x, i, &-&a)?;
        debug_assert!(x[..=i].iter().all(Zero::is_zero));
        exponents.push(a);
    }
    let tail = x[data.k..].to_vec();
    let mut nc = data.ctx.normal().collector();
    let alpha = nc.multiply(&pushed.nu, &tail)?;
    let mut trace = pushed.trace;
    trace.conj_ops += c.steps() + nc.steps();
    trace.s = PolycyclicPresentation::exponent_length(&alpha);
    Ok(CollectedForm { alpha, exponents, coset, trace })
}

impl CollectedForm {
    /// `α · τ_k^(a_k) ⋯ τ_1^(a_1) · β_q` spelled over the model's generators.
    pub fn to_word(&self, data: &CollectionData) -> Result<Word> {
        let gens = Arc::clone(data.ctx.model().generators());
        let mut letters = Vec::new();
        let mut push = |index: usize, e: &BigInt| -> Result<()> {
            let count = e.abs().to_u64().filter(|&c| c <= MAX_SPELLED_LENGTH).ok_or_else(|| {
                Error::Resource(format!("exponent {e} is too large to spell as a word"))
            })?;
            let g = data.generator_for(index, e.is_negative())?;
            letters.extend((0..count).map(|_| Letter::new(g)));
            Ok(())
        };
        for (j, e) in self.alpha.iter().enumerate() {
            push(j + data.k, e)?;
        }
        for (i, e) in self.exponents.iter().enumerate().rev() {
            push(i, e)?;
        }
        let w = Word::new(Arc::clone(&gens), letters)?;
        match (self.coset, &data.cosets) {
            (Some(q), Some(t)) => concat(&w, &t.representative(q)),
            _ => Ok(w),
        }
    }

    /// The element this form denotes, computed without spelling exponents.
    pub fn evaluate(&self, data: &CollectionData) -> Result<Element> {
        let m = data.ctx.model();
        let mut acc = data.ctx.embed_normal(&self.alpha);
        for (i, e) in self.exponents.iter().enumerate().rev() {
            if e.is_zero() {
                continue;
            }
            let g = m.generator(data.generator_for(i, false)?);
            let g = if e.is_negative() { m.inverse(&g)? } else { g };
            let k = e.abs().to_u64().ok_or_else(|| Error::Resource("exponent overflows 64 bits".into()))?;
            acc = m.multiply(&acc, &m.power(&g, k)?)?;
        }
        if let (Some(q), Some(t)) = (self.coset, &data.cosets) {
            acc = m.multiply(&acc, &m.evaluate_word(&t.representative(q))?)?;
        }
        Ok(acc)
    }
}
