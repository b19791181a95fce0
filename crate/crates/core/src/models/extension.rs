//! Split extensions N ⋊ Λ with N given by a polycyclic presentation.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::polycyclic::{BasisLetter, ExponentVector, PolycyclicPresentation};
use super::{Element, GroupModel};
use crate::error::{Error, Result};
use crate::words::SymmetricGeneratingSet;

/// Images of the N-basis under an automorphism, `images[i] = φ(α_i)`.
pub type Automorphism = Vec<ExponentVector>;

/// What a generator of the extension stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionGenerator {
    /// A basis letter of N.
    Normal(BasisLetter),
    /// A generator of Λ, by its index in Λ's generating set.
    Top(usize),
}

/// `(n, λ)` plus the automorphisms `φ(λ)` and `φ(λ)⁻¹` of N, carried along so
/// that Λ never has to be rewritten as a word. `None` means the identity.
#[derive(Clone, Debug)]
pub struct ExtElement {
    pub normal: ExponentVector,
    pub top: Element,
    pub(crate) action: Option<Arc<Automorphism>>,
    pub(crate) inverse_action: Option<Arc<Automorphism>>,
}

#[derive(Clone, Debug)]
pub struct SplitExtension {
    gens: Arc<SymmetricGeneratingSet>,
    normal: Arc<PolycyclicPresentation>,
    normal_gens: Arc<SymmetricGeneratingSet>,
    top: Arc<GroupModel>,
    kinds: Vec<ExtensionGenerator>,
    /// `actions[j]` = φ(γ_j) for generator `j` of Λ.
    actions: Vec<Arc<Automorphism>>,
}

impl SplitExtension {
    /// `actions[j][i]` is the normal form of γ_j α_i γ_j⁻¹. Each generator
    /// label of the extension must be a generator label of N (resolving to a
    /// basis letter through `normal_letters`) or of Λ.
    pub fn new(
        gens: Arc<SymmetricGeneratingSet>,
        normal: Arc<PolycyclicPresentation>,
        normal_gens: Arc<SymmetricGeneratingSet>,
        normal_letters: &[BasisLetter],
        top: Arc<GroupModel>,
        actions: Vec<Automorphism>,
    ) -> Result<Self> {
        let top_gens = Arc::clone(top.generators());
        if actions.len() != top_gens.len() {
            return Err(Error::PresentationInvalid(format!(
                "action given for {} of {} generators of Lambda",
                actions.len(),
                top_gens.len()
            )));
        }
        for (j, images) in actions.iter().enumerate() {
            if images.len() != normal.len() || images.iter().any(|v| !normal.is_normal_form(v)) {
                return Err(Error::PresentationInvalid(format!(
                    "action of {} is not a list of normal forms of N",
                    top_gens.label(j)
                )));
            }
        }
        let mut kinds = Vec::with_capacity(gens.len());
        for (i, label) in gens.labels().iter().enumerate() {
            let kind = match (normal_gens.index_of(label), top_gens.index_of(label)) {
                (Some(k), None) => ExtensionGenerator::Normal(normal_letters[k]),
                (None, Some(k)) => ExtensionGenerator::Top(k),
                (Some(_), Some(_)) => {
                    return Err(Error::Schema(format!(
                        "label {label} names generators of both N and Lambda"
                    )))
                }
                (None, None) => {
                    return Err(Error::Schema(format!(
                        "label {label} is neither a generator of N nor of Lambda"
                    )))
                }
            };
            kinds.push(kind);
            let inv = gens.label(gens.inverse(i));
            let consistent = match kind {
                ExtensionGenerator::Normal(_) => normal_gens
                    .index_of(label)
                    .map(|k| normal_gens.label(normal_gens.inverse(k)) == inv),
                ExtensionGenerator::Top(k) => Some(top_gens.label(top_gens.inverse(k)) == inv),
            };
            if consistent != Some(true) {
                return Err(Error::Inconsistent(format!(
                    "inverse of {label} disagrees with the factor's generating set"
                )));
            }
        }
        let ext = SplitExtension {
            gens,
            normal,
            normal_gens,
            top,
            kinds,
            actions: actions.into_iter().map(Arc::new).collect(),
        };
        ext.check_automorphisms()?;
        Ok(ext)
    }

    /// φ(γ)∘φ(γ⁻¹) fixes every basis element, and φ(γ) respects the
    /// conjugation and power relations of N.
    fn check_automorphisms(&self) -> Result<()> {
        let top_gens = self.top.generators();
        let n = self.normal.len();
        let mut c = self.normal.collector();
        for j in 0..top_gens.len() {
            let (f, g) = (&self.actions[j], &self.actions[top_gens.inverse(j)]);
            for i in 0..n {
                let back = c.apply_images(f, 0, &g[i])?;
                if back != self.normal.basis_element(i) {
                    return Err(Error::Inconsistent(format!(
                        "action of {} is not inverse to that of {} on {}",
                        top_gens.label(j),
                        top_gens.label(top_gens.inverse(j)),
                        self.normal.labels()[i]
                    )));
                }
            }
            for i in 0..n {
                if let Some(m) = self.normal.modulus(i) {
                    if c.pow(&f[i], m)? != self.normal.identity() {
                        return Err(Error::Inconsistent(format!(
                            "action of {} does not preserve the order of {}",
                            top_gens.label(j),
                            self.normal.labels()[i]
                        )));
                    }
                }
                for k in i + 1..n {
                    for negative in [false, true] {
                        // φ(α_i^±1 α_k α_i^∓1) = φ(α_i)^±1 φ(α_k) φ(α_i)^∓1
                        let lhs = c.apply_images(f, 0, self.normal.conjugate(i, negative, k))?;
                        let (gi, gi_inv) = (f[i].clone(), c.inverse(&f[i])?);
                        let (pre, post) = if negative { (gi_inv, gi) } else { (gi, gi_inv) };
                        let mid = c.multiply(&pre, &f[k])?;
                        let rhs = c.multiply(&mid, &post)?;
                        if lhs != rhs {
                            return Err(Error::Inconsistent(format!(
                                "action of {} is not a homomorphism of N",
                                top_gens.label(j)
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn generators(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }

    pub fn normal(&self) -> &Arc<PolycyclicPresentation> {
        &self.normal
    }

    pub fn normal_generators(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.normal_gens
    }

    pub fn top(&self) -> &Arc<GroupModel> {
        &self.top
    }

    pub fn kind(&self, generator: usize) -> ExtensionGenerator {
        self.kinds[generator]
    }

    pub fn action(&self, top_generator: usize) -> &Arc<Automorphism> {
        &self.actions[top_generator]
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement {
            normal: self.normal.identity(),
            top: self.top.identity(),
            action: None,
            inverse_action: None,
        }
    }

    pub fn embed_normal(&self, normal: ExponentVector) -> ExtElement {
        ExtElement {
            normal,
            top: self.top.identity(),
            action: None,
            inverse_action: None,
        }
    }

    /// `(e, γ_j)` for generator `j` of Λ.
    pub fn embed_top_generator(&self, j: usize) -> ExtElement {
        let top_gens = self.top.generators();
        ExtElement {
            normal: self.normal.identity(),
            top: self.top.generator(j),
            action: Some(Arc::clone(&self.actions[j])),
            inverse_action: Some(Arc::clone(&self.actions[top_gens.inverse(j)])),
        }
    }

    pub fn generator(&self, i: usize) -> ExtElement {
        match self.kinds[i] {
            ExtensionGenerator::Normal(l) => {
                let mut v = self.normal.identity();
                v[l.index] = if l.negative { -BigInt::one() } else { BigInt::one() };
                self.normal.reduce_exponents(&mut v);
                self.embed_normal(v)
            }
            ExtensionGenerator::Top(j) => self.embed_top_generator(j),
        }
    }

    /// φ(λ)(n) for the automorphism carried by an element.
    pub fn act(&self, action: &Option<Arc<Automorphism>>, n: &ExponentVector) -> Result<ExponentVector> {
        match action {
            None => Ok(n.clone()),
            Some(f) => self.normal.collector().apply_images(f, 0, n),
        }
    }

    fn compose(
        &self,
        f: &Option<Arc<Automorphism>>,
        g: &Option<Arc<Automorphism>>,
    ) -> Result<Option<Arc<Automorphism>>> {
        Ok(match (f, g) {
            (None, g) => g.clone(),
            (f, None) => f.clone(),
            (Some(f), Some(g)) => {
                let mut c = self.normal.collector();
                let images = g
                    .iter()
                    .map(|v| c.apply_images(f, 0, v))
                    .collect::<Result<Vec<_>>>()?;
                if images
                    .iter()
                    .enumerate()
                    .all(|(i, v)| *v == self.normal.basis_element(i))
                {
                    None
                } else {
                    Some(Arc::new(images))
                }
            }
        })
    }

    /// `(n₁, λ₁)(n₂, λ₂) = (n₁ · φ(λ₁)(n₂), λ₁λ₂)`.
    pub fn multiply(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement> {
        let twisted = if y.normal.iter().all(Zero::is_zero) {
            y.normal.clone()
        } else {
            self.act(&x.action, &y.normal)?
        };
        Ok(ExtElement {
            normal: self.normal.multiply(&x.normal, &twisted)?,
            top: self.top.multiply(&x.top, &y.top)?,
            action: self.compose(&x.action, &y.action)?,
            inverse_action: self.compose(&y.inverse_action, &x.inverse_action)?,
        })
    }

    /// `(n, λ)⁻¹ = (φ(λ)⁻¹(n⁻¹), λ⁻¹)`.
    pub fn inverse(&self, x: &ExtElement) -> Result<ExtElement> {
        let n_inv = self.normal.inverse(&x.normal)?;
        Ok(ExtElement {
            normal: self.act(&x.inverse_action, &n_inv)?,
            top: self.top.inverse(&x.top)?,
            action: x.inverse_action.clone(),
            inverse_action: x.action.clone(),
        })
    }

    pub fn write_key(&self, x: &ExtElement, out: &mut Vec<u8>) {
        self.normal.write_key(&x.normal, out);
        self.top.write_key(&x.top, out);
    }

    pub fn format(&self, x: &ExtElement) -> String {
        format!(
            "({}; {})",
            self.normal.format(&x.normal),
            self.top.format(&x.top)
        )
    }
}
