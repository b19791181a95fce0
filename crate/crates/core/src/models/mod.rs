//! Exact group element algebras behind a single model type.

pub mod extension;
pub mod matrix;
pub mod modp;
pub mod polycyclic;
pub mod spec;
pub mod verify;

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::words::{Letter, SymmetricGeneratingSet, Word};
use extension::{ExtElement, SplitExtension};
use matrix::{MatrixGroup, RationalMatrix};
use modp::{ModPElement, ModPExtension};
use polycyclic::{BasisLetter, ExponentVector, PolycyclicPresentation};

/// Canonical byte encoding of an element; equal elements have equal keys.
pub type Key = Vec<u8>;

/// A polycyclic presentation together with a symmetric generating set whose
/// members are basis letters.
#[derive(Clone, Debug)]
pub struct PolycyclicGroup {
    gens: Arc<SymmetricGeneratingSet>,
    pres: Arc<PolycyclicPresentation>,
    letters: Vec<BasisLetter>,
}

impl PolycyclicGroup {
    /// Every basis label must be a generator label; its paired label denotes
    /// the inverse letter. Self-inverse generators need modulus 2.
    pub fn new(gens: Arc<SymmetricGeneratingSet>, pres: Arc<PolycyclicPresentation>) -> Result<Self> {
        let mut letters = vec![BasisLetter { index: 0, negative: false }; gens.len()];
        let mut assigned = vec![false; gens.len()];
        for (index, label) in pres.labels().iter().enumerate() {
            let g = gens
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("basis element {label} is not a generator")))?;
            let inv = gens.inverse(g);
            if inv == g && pres.modulus(index) != Some(&BigInt::from(2)) {
                return Err(Error::Inconsistent(format!(
                    "{label} is declared self-inverse but does not have modulus 2"
                )));
            }
            letters[g] = BasisLetter { index, negative: false };
            assigned[g] = true;
            if inv != g {
                if assigned[inv] {
                    return Err(Error::Schema(format!(
                        "inverse label of {label} is itself a basis element"
                    )));
                }
                letters[inv] = BasisLetter { index, negative: true };
                assigned[inv] = true;
            }
        }
        if let Some(i) = assigned.iter().position(|a| !a) {
            return Err(Error::Schema(format!(
                "generator {} is not a basis element or a basis inverse",
                gens.label(i)
            )));
        }
        Ok(PolycyclicGroup { gens, pres, letters })
    }

    pub fn generators(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }

    pub fn presentation(&self) -> &Arc<PolycyclicPresentation> {
        &self.pres
    }

    pub fn letter(&self, generator: usize) -> BasisLetter {
        self.letters[generator]
    }

    pub fn letters(&self) -> &[BasisLetter] {
        &self.letters
    }

    pub fn generator(&self, i: usize) -> ExponentVector {
        let l = self.letters[i];
        let mut v = self.pres.identity();
        v[l.index] = if l.negative { -BigInt::one() } else { BigInt::one() };
        self.pres.reduce_exponents(&mut v);
        v
    }
}

#[derive(Clone, Debug)]
pub enum GroupModel {
    Matrix(MatrixGroup),
    Polycyclic(PolycyclicGroup),
    SplitExtension(SplitExtension),
    ModP(ModPExtension),
}

#[derive(Clone, Debug)]
pub enum Element {
    Matrix(RationalMatrix),
    Polycyclic(ExponentVector),
    Extension(Box<ExtElement>),
    ModP(ModPElement),
}

fn mismatch() -> Error {
    Error::Structural("element does not belong to this model".into())
}

impl GroupModel {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupModel::Matrix(_) => "matrix",
            GroupModel::Polycyclic(_) => "polycyclic",
            GroupModel::SplitExtension(_) => "split_extension",
            GroupModel::ModP(_) => "mod_p_extension",
        }
    }

    pub fn generators(&self) -> &Arc<SymmetricGeneratingSet> {
        match self {
            GroupModel::Matrix(m) => m.generators(),
            GroupModel::Polycyclic(p) => p.generators(),
            GroupModel::SplitExtension(e) => e.generators(),
            GroupModel::ModP(m) => m.generators(),
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupModel::Matrix(m) => Element::Matrix(RationalMatrix::identity(m.dim())),
            GroupModel::Polycyclic(p) => Element::Polycyclic(p.presentation().identity()),
            GroupModel::SplitExtension(e) => Element::Extension(Box::new(e.identity())),
            GroupModel::ModP(_) => Element::ModP(ModPElement { residue: 0, shift: 0 }),
        }
    }

    pub fn generator(&self, i: usize) -> Element {
        match self {
            GroupModel::Matrix(m) => Element::Matrix(m.matrix(i).clone()),
            GroupModel::Polycyclic(p) => Element::Polycyclic(p.generator(i)),
            GroupModel::SplitExtension(e) => Element::Extension(Box::new(e.generator(i))),
            GroupModel::ModP(m) => Element::ModP(m.generator(i)),
        }
    }

    pub fn generator_elements(&self) -> Vec<Element> {
        (0..self.generators().len()).map(|i| self.generator(i)).collect()
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Result<Element> {
        Ok(match (self, x, y) {
            (GroupModel::Matrix(_), Element::Matrix(a), Element::Matrix(b)) => Element::Matrix(a.mul(b)),
            (GroupModel::Polycyclic(p), Element::Polycyclic(a), Element::Polycyclic(b)) => {
                Element::Polycyclic(p.presentation().multiply(a, b)?)
            }
            (GroupModel::SplitExtension(e), Element::Extension(a), Element::Extension(b)) => {
                Element::Extension(Box::new(e.multiply(a, b)?))
            }
            (GroupModel::ModP(m), Element::ModP(a), Element::ModP(b)) => Element::ModP(m.multiply(*a, *b)),
            _ => return Err(mismatch()),
        })
    }

    pub fn inverse(&self, x: &Element) -> Result<Element> {
        Ok(match (self, x) {
            (GroupModel::Matrix(_), Element::Matrix(a)) => Element::Matrix(
                a.inverse()
                    .ok_or_else(|| Error::Inconsistent("singular matrix element".into()))?,
            ),
            (GroupModel::Polycyclic(p), Element::Polycyclic(a)) => {
                Element::Polycyclic(p.presentation().inverse(a)?)
            }
            (GroupModel::SplitExtension(e), Element::Extension(a)) => {
                Element::Extension(Box::new(e.inverse(a)?))
            }
            (GroupModel::ModP(m), Element::ModP(a)) => Element::ModP(m.inverse(*a)),
            _ => return Err(mismatch()),
        })
    }

    /// Deterministic injective serialization, tagged by model kind.
    pub fn key(&self, x: &Element) -> Key {
        let mut out = Vec::with_capacity(64);
        self.write_key(x, &mut out);
        out
    }

    pub fn write_key(&self, x: &Element, out: &mut Vec<u8>) {
        match (self, x) {
            (GroupModel::Matrix(_), Element::Matrix(a)) => {
                out.push(b'M');
                a.write_key(out);
            }
            (GroupModel::Polycyclic(p), Element::Polycyclic(a)) => {
                out.push(b'P');
                p.presentation().write_key(a, out);
            }
            (GroupModel::SplitExtension(e), Element::Extension(a)) => {
                out.push(b'X');
                e.write_key(a, out);
            }
            (GroupModel::ModP(_), Element::ModP(a)) => {
                out.push(b'Z');
                out.extend_from_slice(&a.residue.to_le_bytes());
                out.extend_from_slice(&a.shift.to_le_bytes());
            }
            _ => panic!("element does not belong to this model"),
        }
    }

    pub fn is_identity(&self, x: &Element) -> bool {
        match x {
            Element::Matrix(a) => a.is_identity(),
            Element::Polycyclic(a) => a.iter().all(Zero::is_zero),
            Element::Extension(a) => {
                a.normal.iter().all(Zero::is_zero)
                    && match self {
                        GroupModel::SplitExtension(e) => e.top().is_identity(&a.top),
                        _ => false,
                    }
            }
            Element::ModP(a) => a.residue == 0 && a.shift == 0,
        }
    }

    pub fn equal(&self, x: &Element, y: &Element) -> bool {
        self.key(x) == self.key(y)
    }

    pub fn format(&self, x: &Element) -> String {
        match (self, x) {
            (GroupModel::Matrix(_), Element::Matrix(a)) => a.to_string(),
            (GroupModel::Polycyclic(p), Element::Polycyclic(a)) => p.presentation().format(a),
            (GroupModel::SplitExtension(e), Element::Extension(a)) => e.format(a),
            (GroupModel::ModP(_), Element::ModP(a)) => format!("({}, {})", a.residue, a.shift),
            _ => "<foreign element>".into(),
        }
    }

    /// Product of generator images in order; the identity for the empty word.
    pub fn evaluate_letters(&self, letters: &[Letter]) -> Result<Element> {
        let gens = self.generators();
        let mut acc = self.identity();
        for &l in letters {
            gens.check_letter(l)?;
            acc = self.multiply(&acc, &self.generator(gens.resolve(l)))?;
        }
        Ok(acc)
    }

    pub fn evaluate_word(&self, w: &Word) -> Result<Element> {
        if **w.generating_set() != **self.generators() {
            return Err(Error::Structural(
                "word is over a different generating set".into(),
            ));
        }
        self.evaluate_letters(w.letters())
    }

    pub fn parse_word(&self, text: &str) -> Result<Word> {
        Word::parse(Arc::clone(self.generators()), text)
    }

    pub fn power(&self, x: &Element, k: u64) -> Result<Element> {
        let mut acc = self.identity();
        let mut base = x.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.multiply(&base, &base)?;
            }
        }
        Ok(acc)
    }
}
