//! Coset normal forms `w = φ · β_l` for a finite-index subgroup F, driven by
//! transposition tables that are checked against the model at load time.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::models::GroupModel;
use crate::words::{free_reduce, Letter, SymmetricGeneratingSet, Word};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawRepresentative {
    pub name: String,
    pub word: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCosetWord {
    pub word: String,
    pub coset: String,
}

/// The `"cosets"` section of a spec file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCosets {
    /// Labels of the generators lying in F.
    pub subgroup: Vec<String>,
    pub representatives: Vec<RawRepresentative>,
    /// `s = φ_s · β_k` for each generator outside F.
    #[serde(default)]
    pub letters: BTreeMap<String, RawCosetWord>,
    /// `"β_i β_j"` ↦ `α_ij`, `β_l` with `β_i β_j = α_ij β_l`.
    pub products: BTreeMap<String, RawCosetWord>,
    /// `"β_i s"` ↦ `β_i s β_i⁻¹` for `s` in F.
    pub conjugates: BTreeMap<String, String>,
}

/// Words here are sequences of resolved generator indices.
type Gens = Vec<usize>;

#[derive(Clone, Debug)]
pub struct CosetTables {
    gens: Arc<SymmetricGeneratingSet>,
    in_subgroup: Vec<bool>,
    names: Vec<String>,
    representatives: Vec<Gens>,
    identity: usize,
    letters: Vec<Option<(Gens, usize)>>,
    products: Vec<Vec<(Gens, usize)>>,
    conjugates: Vec<Vec<Option<Gens>>>,
    k_constant: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetNormalForm {
    /// Freely reduced word over the generators in F.
    pub phi: Word,
    /// Index of the coset representative β_l.
    pub coset: usize,
    /// Length of `phi` before free reduction; never exceeds `K · |w|`.
    pub raw_length: usize,
}

impl CosetTables {
    pub fn from_raw(model: &GroupModel, raw: &RawCosets) -> Result<Self> {
        let gens = Arc::clone(model.generators());
        let mut in_subgroup = vec![false; gens.len()];
        for label in &raw.subgroup {
            let i = gens
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("cosets.subgroup: unknown label {label}")))?;
            in_subgroup[i] = true;
        }
        if (0..gens.len()).any(|i| in_subgroup[i] != in_subgroup[gens.inverse(i)]) {
            return Err(Error::Schema("cosets.subgroup must be closed under inverses".into()));
        }
        let word = |text: &str| -> Result<Gens> {
            Ok(gens.parse_letters(text)?.into_iter().map(|l| gens.resolve(l)).collect())
        };
        let sub_word = |text: &str, what: &str| -> Result<Gens> {
            let w = word(text)?;
            if let Some(&g) = w.iter().find(|&&g| !in_subgroup[g]) {
                return Err(Error::Schema(format!(
                    "{what}: {} is not a subgroup generator",
                    gens.label(g)
                )));
            }
            Ok(w)
        };
        let names: Vec<String> = raw.representatives.iter().map(|r| r.name.clone()).collect();
        let rep_index = |name: &str, what: &str| -> Result<usize> {
            names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::Schema(format!("{what}: unknown coset {name}")))
        };
        let representatives = raw
            .representatives
            .iter()
            .map(|r| word(&r.word))
            .collect::<Result<Vec<_>>>()?;
        let identity = representatives
            .iter()
            .position(Vec::is_empty)
            .ok_or_else(|| Error::Schema("cosets: no representative has the empty word".into()))?;
        let c = names.len();

        let mut letters = vec![None; gens.len()];
        for (label, entry) in &raw.letters {
            let g = gens
                .index_of(label)
                .ok_or_else(|| Error::Schema(format!("cosets.letters: unknown label {label}")))?;
            let what = format!("cosets.letters.{label}");
            letters[g] = Some((sub_word(&entry.word, &what)?, rep_index(&entry.coset, &what)?));
        }
        let mut products = vec![vec![(Vec::new(), 0); c]; c];
        let mut seen = vec![vec![false; c]; c];
        for (key, entry) in &raw.products {
            let what = format!("cosets.products {key:?}");
            let (i, j) = match key.split_whitespace().collect::<Vec<_>>()[..] {
                [a, b] => (rep_index(a, &what)?, rep_index(b, &what)?),
                _ => return Err(Error::Schema(format!("{what}: expected two coset names"))),
            };
            products[i][j] = (sub_word(&entry.word, &what)?, rep_index(&entry.coset, &what)?);
            seen[i][j] = true;
        }
        let mut conjugates = vec![vec![None; gens.len()]; c];
        for (key, value) in &raw.conjugates {
            let what = format!("cosets.conjugates {key:?}");
            let (i, g) = match key.split_whitespace().collect::<Vec<_>>()[..] {
                [a, s] => (
                    rep_index(a, &what)?,
                    gens.index_of(s)
                        .filter(|&g| in_subgroup[g])
                        .ok_or_else(|| Error::Schema(format!("{what}: {s} is not a subgroup generator")))?,
                ),
                _ => return Err(Error::Schema(format!("{what}: expected a coset name and a label"))),
            };
            conjugates[i][g] = Some(sub_word(value, &what)?);
        }

        let tables = CosetTables {
            gens,
            in_subgroup,
            names,
            representatives,
            identity,
            letters,
            products,
            conjugates,
            k_constant: 0,
        };
        tables.check_complete(&seen)?;
        tables.check_against(model)?;
        let k_constant = tables.compute_k();
        Ok(CosetTables { k_constant, ..tables })
    }

    fn check_complete(&self, seen: &[Vec<bool>]) -> Result<()> {
        let c = self.names.len();
        for i in 0..c {
            for j in 0..c {
                if !seen[i][j] {
                    return Err(Error::PresentationInvalid(format!(
                        "coset product table has no entry for \"{} {}\"",
                        self.names[i], self.names[j]
                    )));
                }
            }
            for g in 0..self.gens.len() {
                if self.in_subgroup[g] && self.conjugates[i][g].is_none() {
                    return Err(Error::PresentationInvalid(format!(
                        "coset conjugation table has no entry for \"{} {}\"",
                        self.names[i],
                        self.gens.label(g)
                    )));
                }
            }
        }
        for g in 0..self.gens.len() {
            if !self.in_subgroup[g] && self.letters[g].is_none() {
                return Err(Error::PresentationInvalid(format!(
                    "coset letter table has no entry for {}",
                    self.gens.label(g)
                )));
            }
        }
        Ok(())
    }

    /// Every table identity holds exactly in the model.
    fn check_against(&self, model: &GroupModel) -> Result<()> {
        let eval = |w: &[usize]| -> Result<_> {
            let letters: Vec<Letter> = w.iter().map(|&g| Letter::new(g)).collect();
            model.evaluate_letters(&letters)
        };
        let reps = self
            .representatives
            .iter()
            .map(|w| eval(w))
            .collect::<Result<Vec<_>>>()?;
        let fail = |what: String| Error::Inconsistent(format!("coset table entry {what} does not hold"));
        for (i, ri) in reps.iter().enumerate() {
            for (j, rj) in reps.iter().enumerate() {
                let (alpha, l) = &self.products[i][j];
                let lhs = model.multiply(ri, rj)?;
                let rhs = model.multiply(&eval(alpha)?, &reps[*l])?;
                if !model.equal(&lhs, &rhs) {
                    return Err(fail(format!("\"{} {}\"", self.names[i], self.names[j])));
                }
            }
            let ri_inv = model.inverse(ri)?;
            for g in 0..self.gens.len() {
                if let Some(w) = &self.conjugates[i][g] {
                    let lhs = model.multiply(&model.multiply(ri, &model.generator(g))?, &ri_inv)?;
                    if !model.equal(&lhs, &eval(w)?) {
                        return Err(fail(format!("\"{} {}\"", self.names[i], self.gens.label(g))));
                    }
                }
            }
        }
        for g in 0..self.gens.len() {
            if let Some((phi, k)) = &self.letters[g] {
                let rhs = model.multiply(&eval(phi)?, &reps[*k])?;
                if !model.equal(&model.generator(g), &rhs) {
                    return Err(fail(self.gens.label(g).to_string()));
                }
            }
        }
        Ok(())
    }

    /// Largest number of F-letters a single input letter can append.
    fn compute_k(&self) -> usize {
        let mut k = 1;
        for i in 0..self.names.len() {
            for g in 0..self.gens.len() {
                let added = match &self.letters[g] {
                    None => self.conjugates[i][g].as_ref().map_or(0, Vec::len),
                    Some((phi, target)) => {
                        phi.iter()
                            .map(|&s| self.conjugates[i][s].as_ref().map_or(0, Vec::len))
                            .sum::<usize>()
                            + self.products[i][*target].0.len()
                    }
                };
                k = k.max(added);
            }
        }
        k
    }

    pub fn k_constant(&self) -> usize {
        self.k_constant
    }

    pub fn identity_coset(&self) -> usize {
        self.identity
    }

    pub fn coset_count(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn in_subgroup(&self, generator: usize) -> bool {
        self.in_subgroup[generator]
    }

    pub fn representative(&self, coset: usize) -> Word {
        self.to_word(&self.representatives[coset])
    }

    fn to_word(&self, w: &[usize]) -> Word {
        Word::new(
            Arc::clone(&self.gens),
            w.iter().map(|&g| Letter::new(g)).collect(),
        )
        .expect("table words use valid generators")
    }

    pub fn generating_set(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }
}

/// Scans `w` left to right keeping `φ · β_i`; each letter is moved past
/// `β_i` with one table lookup.
pub fn coset_normal_form(tables: &CosetTables, w: &Word) -> Result<CosetNormalForm> {
    if **w.generating_set() != *tables.gens {
        return Err(Error::Structural("word is over a different generating set".into()));
    }
    let mut phi: Vec<usize> = Vec::new();
    let mut coset = tables.identity;
    for g in w.resolved() {
        match &tables.letters[g] {
            None => phi.extend(tables.conjugates[coset][g].as_ref().expect("checked complete")),
            Some((word, k)) => {
                for &s in word {
                    phi.extend(tables.conjugates[coset][s].as_ref().expect("checked complete"));
                }
                let (alpha, l) = &tables.products[coset][*k];
                phi.extend(alpha);
                coset = *l;
            }
        }
    }
    let raw_length = phi.len();
    Ok(CosetNormalForm {
        phi: free_reduce(&tables.to_word(&phi))?,
        coset,
        raw_length,
    })
}
