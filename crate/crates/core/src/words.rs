//! Letters, words, and symmetric generating sets.
//!
//! Letters refer to generators by index. Labels only appear when parsing or
//! printing word literals such as `a b^-1 a`.

use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A generator index together with an inversion flag.
///
/// An inverted letter stands for the generator paired with `generator` by the
/// involution of its generating set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: usize,
    pub inverted: bool,
}

impl Letter {
    pub const fn new(generator: usize) -> Self {
        Letter {
            generator,
            inverted: false,
        }
    }

    pub const fn inverse_of(generator: usize) -> Self {
        Letter {
            generator,
            inverted: true,
        }
    }
}

/// A finite set of generator labels closed under an involution that pairs
/// each generator with its inverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymmetricGeneratingSet {
    labels: Vec<String>,
    involution: Vec<usize>,
}

impl SymmetricGeneratingSet {
    pub fn new(labels: Vec<String>, involution: Vec<usize>) -> Result<Self> {
        if labels.len() != involution.len() {
            return Err(Error::Structural(format!(
                "{} labels but {} involution entries",
                labels.len(),
                involution.len()
            )));
        }
        let mut seen = HashSet::new();
        for label in &labels {
            if label.is_empty() || label.chars().any(char::is_whitespace) || label.contains('^') {
                return Err(Error::Structural(format!("invalid generator label {label:?}")));
            }
            if !seen.insert(label.as_str()) {
                return Err(Error::Structural(format!("duplicate generator label {label:?}")));
            }
        }
        for (i, &j) in involution.iter().enumerate() {
            if j >= labels.len() || involution[j] != i {
                return Err(Error::Structural(format!(
                    "involution is not an involution at generator {}",
                    labels[i]
                )));
            }
        }
        Ok(SymmetricGeneratingSet { labels, involution })
    }

    /// Builds the set from `(label, inverse_label)` pairs. A pair may be
    /// self-inverse; a label appearing both as a label and as another pair's
    /// inverse label is rejected unless the two pairs agree.
    pub fn from_pairs<S: AsRef<str>>(pairs: &[(S, S)]) -> Result<Self> {
        let mut labels: Vec<String> = Vec::new();
        let mut involution: Vec<usize> = Vec::new();
        let index_of = |labels: &Vec<String>, l: &str| labels.iter().position(|x| x == l);
        for (label, inverse) in pairs {
            let (label, inverse) = (label.as_ref(), inverse.as_ref());
            match (index_of(&labels, label), index_of(&labels, inverse)) {
                (None, None) => {
                    let i = labels.len();
                    labels.push(label.to_string());
                    if label == inverse {
                        involution.push(i);
                    } else {
                        labels.push(inverse.to_string());
                        involution.push(i + 1);
                        involution.push(i);
                    }
                }
                (Some(i), Some(j)) if involution[i] == j => {}
                _ => {
                    return Err(Error::Structural(format!(
                        "generator pair ({label}, {inverse}) conflicts with earlier pairs"
                    )))
                }
            }
        }
        Self::new(labels, involution)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, index: usize) -> &str {
        &self.labels[index]
    }

    pub fn inverse(&self, index: usize) -> usize {
        self.involution[index]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// One representative per involution orbit: the smaller index of each pair.
    pub fn pair_representatives(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.involution[i] >= i).collect()
    }

    /// The generator a letter actually denotes.
    pub fn resolve(&self, letter: Letter) -> usize {
        if letter.inverted {
            self.involution[letter.generator]
        } else {
            letter.generator
        }
    }

    pub fn check_letter(&self, letter: Letter) -> Result<()> {
        if letter.generator < self.len() {
            Ok(())
        } else {
            Err(Error::Structural(format!(
                "letter index {} out of range for {} generators",
                letter.generator,
                self.len()
            )))
        }
    }

    /// Parses a whitespace-separated word literal. Each token is a label,
    /// optionally followed by `^-1`. The empty string is the empty word.
    pub fn parse_letters(&self, text: &str) -> Result<Vec<Letter>> {
        text.split_whitespace()
            .map(|token| {
                let (label, inverted) = match token.strip_suffix("^-1") {
                    Some(stem) => (stem, true),
                    None => (token, false),
                };
                self.index_of(label)
                    .map(|generator| Letter { generator, inverted })
                    .ok_or_else(|| Error::Structural(format!("unknown generator label {label:?}")))
            })
            .collect()
    }

    /// Short stable fingerprint of labels and involution.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut hasher = Sha256::new();
        for (label, inv) in self.labels.iter().zip(&self.involution) {
            hasher.update(label.as_bytes());
            hasher.update([0u8]);
            hasher.update((*inv as u64).to_le_bytes());
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// A finite sequence of letters over a fixed generating set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word {
    gens: Arc<SymmetricGeneratingSet>,
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(gens: Arc<SymmetricGeneratingSet>, letters: Vec<Letter>) -> Result<Self> {
        for &l in &letters {
            gens.check_letter(l)?;
        }
        Ok(Word { gens, letters })
    }

    pub fn empty(gens: Arc<SymmetricGeneratingSet>) -> Self {
        Word {
            gens,
            letters: Vec::new(),
        }
    }

    pub fn parse(gens: Arc<SymmetricGeneratingSet>, text: &str) -> Result<Self> {
        let letters = gens.parse_letters(text)?;
        Ok(Word { gens, letters })
    }

    pub fn generating_set(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Generator indices actually denoted by the letters, inversion resolved.
    pub fn resolved(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.iter().map(|&l| self.gens.resolve(l))
    }

    pub fn is_reduced(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| !cancels(&self.gens, w[0], w[1]))
    }
}

fn cancels(gens: &SymmetricGeneratingSet, a: Letter, b: Letter) -> bool {
    gens.resolve(b) == gens.inverse(gens.resolve(a))
}

/// Cancels adjacent inverse pairs until none remain.
pub fn free_reduce(w: &Word) -> Result<Word> {
    let gens = &w.gens;
    let mut out: Vec<Letter> = Vec::with_capacity(w.letters.len());
    for &letter in &w.letters {
        gens.check_letter(letter)?;
        match out.last() {
            Some(&top) if cancels(gens, top, letter) => {
                out.pop();
            }
            _ => out.push(letter),
        }
    }
    Ok(Word {
        gens: Arc::clone(gens),
        letters: out,
    })
}

/// Reverses the word and toggles every inversion flag.
pub fn invert_word(w: &Word) -> Result<Word> {
    let letters = w
        .letters
        .iter()
        .rev()
        .map(|&l| {
            w.gens.check_letter(l)?;
            Ok(Letter {
                generator: l.generator,
                inverted: !l.inverted,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Word {
        gens: Arc::clone(&w.gens),
        letters,
    })
}

/// Concatenates and freely reduces.
pub fn concat(w1: &Word, w2: &Word) -> Result<Word> {
    if w1.gens != w2.gens {
        return Err(Error::Structural(
            "cannot concatenate words over different generating sets".into(),
        ));
    }
    let mut letters = w1.letters.clone();
    letters.extend_from_slice(&w2.letters);
    free_reduce(&Word {
        gens: Arc::clone(&w1.gens),
        letters,
    })
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(self.gens.label(l.generator))?;
            if l.inverted {
                f.write_str("^-1")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn abc() -> Arc<SymmetricGeneratingSet> {
        Arc::new(SymmetricGeneratingSet::from_pairs(&[("a", "A"), ("b", "B"), ("c", "C")]).unwrap())
    }

    fn w(text: &str) -> Word {
        Word::parse(abc(), text).unwrap()
    }

    /// Single left-to-right pass removing the first cancelling pair, repeated
    /// to a fixpoint. Independent of the stack-based reduction.
    fn reduce_to_fixpoint(word: &Word) -> Vec<usize> {
        let gens = word.generating_set();
        let mut cur: Vec<usize> = word.resolved().collect();
        loop {
            let pos = cur.windows(2).position(|p| p[1] == gens.inverse(p[0]));
            match pos {
                Some(i) => {
                    cur.drain(i..i + 2);
                }
                None => return cur,
            }
        }
    }

    #[test]
    fn free_reduce_examples() {
        assert!(free_reduce(&w("")).unwrap().is_empty());
        assert!(free_reduce(&w("a a^-1")).unwrap().is_empty());
        let r = free_reduce(&w("a b b^-1 a")).unwrap();
        assert_eq!(r.resolved().collect::<Vec<_>>(), reduce_to_fixpoint(&w("a b b^-1 a")));
        assert_eq!(r.to_string(), "a a");
    }

    #[test]
    fn inverse_labels_cancel_like_flags() {
        assert!(free_reduce(&w("a A")).unwrap().is_empty());
        assert!(free_reduce(&w("A^-1 A")).unwrap().is_empty());
    }

    #[test]
    fn invert_examples() {
        assert!(invert_word(&w("")).unwrap().is_empty());
        assert_eq!(invert_word(&w("a")).unwrap().to_string(), "a^-1");
        assert_eq!(invert_word(&w("a b")).unwrap().to_string(), "b^-1 a^-1");
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat(&w("a"), &w("")).unwrap().to_string(), "a");
        assert!(concat(&w("a"), &w("a^-1")).unwrap().is_empty());
        let r = concat(&w("a b"), &w("b^-1 c")).unwrap();
        let mut joined = w("a b");
        joined.letters.extend(w("b^-1 c").letters);
        assert_eq!(r.resolved().collect::<Vec<_>>(), reduce_to_fixpoint(&joined));
        assert_eq!(r.to_string(), "a c");
    }

    #[test]
    fn concat_rejects_foreign_generating_set() {
        let other = Arc::new(SymmetricGeneratingSet::from_pairs(&[("x", "X")]).unwrap());
        let x = Word::parse(other, "x").unwrap();
        assert!(matches!(concat(&w("a"), &x), Err(Error::Structural(_))));
    }

    #[test]
    fn malformed_letter_is_structural() {
        let bad = Word {
            gens: abc(),
            letters: vec![Letter::new(17)],
        };
        assert!(matches!(free_reduce(&bad), Err(Error::Structural(_))));
        assert!(Word::new(abc(), vec![Letter::new(6)]).is_err());
    }

    #[test]
    fn self_inverse_generators() {
        let gens = Arc::new(SymmetricGeneratingSet::from_pairs(&[("s", "s"), ("a", "A")]).unwrap());
        assert_eq!(gens.len(), 3);
        assert_eq!(gens.inverse(0), 0);
        let r = free_reduce(&Word::parse(gens, "s s a").unwrap()).unwrap();
        assert_eq!(r.to_string(), "a");
    }

    #[test]
    fn generating_set_validation() {
        assert!(SymmetricGeneratingSet::new(vec!["a".into(), "a".into()], vec![1, 0]).is_err());
        assert!(SymmetricGeneratingSet::new(vec!["a".into(), "b".into()], vec![1, 1]).is_err());
        assert!(SymmetricGeneratingSet::from_pairs(&[("a", "A"), ("A", "b")]).is_err());
        assert!(Word::parse(abc(), "a q").is_err());
    }

    fn arb_word() -> impl Strategy<Value = Word> {
        prop::collection::vec((0usize..6, any::<bool>()), 0..40).prop_map(|v| {
            Word::new(
                abc(),
                v.into_iter()
                    .map(|(generator, inverted)| Letter { generator, inverted })
                    .collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent_and_shortening(word in arb_word()) {
            let once = free_reduce(&word).unwrap();
            let twice = free_reduce(&once).unwrap();
            prop_assert_eq!(&once, &twice);
            prop_assert!(once.is_reduced());
            prop_assert!(once.len() <= word.len());
            prop_assert_eq!(once.len() % 2, word.len() % 2);
            prop_assert_eq!(once.resolved().collect::<Vec<_>>(), reduce_to_fixpoint(&word));
        }

        #[test]
        fn word_times_inverse_reduces_to_empty(word in arb_word()) {
            let inv = invert_word(&word).unwrap();
            prop_assert!(concat(&word, &inv).unwrap().is_empty());
        }

        #[test]
        fn concat_is_associative(a in arb_word(), b in arb_word(), c in arb_word()) {
            let left = concat(&concat(&a, &b).unwrap(), &c).unwrap();
            let right = concat(&a, &concat(&b, &c).unwrap()).unwrap();
            prop_assert_eq!(left.resolved().collect::<Vec<_>>(), right.resolved().collect::<Vec<_>>());
        }
    }
}
