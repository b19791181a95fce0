//! Polycyclic presentations on graded bases and the collection engine.
//!
//! Elements are exponent vectors `u` standing for `α_0^u[0] · α_1^u[1] ···`.
//! For `i < j` the presentation stores both conjugates `α_i α_j α_i⁻¹` and
//! `α_i⁻¹ α_j α_i` as normal forms supported on indices `> i`. Torsion basis
//! elements carry a modulus `m` with the relation `α^m = e`.
//!
//! Multiplying a normal form `P · α_i^a · Q` on the right by `α_i^e` gives
//! `P · α_i^(a+e) · ψ_i^e(Q)` where `ψ_i(g) = α_i⁻¹ g α_i` preserves the
//! tail subgroup `⟨α_(i+1), …⟩`, so the tail is rebuilt by recursion on
//! strictly larger indices.

use std::fmt;
use std::ops::Range;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type ExponentVector = Vec<BigInt>;

/// Default bound on elementary collection steps per top-level operation.
pub const DEFAULT_STEP_BUDGET: u64 = 200_000_000;

/// A basis letter `α_index^(±1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisLetter {
    pub index: usize,
    pub negative: bool,
}

#[derive(Clone, Debug)]
pub struct PolycyclicPresentation {
    labels: Vec<String>,
    strata: Vec<Range<usize>>,
    moduli: Vec<Option<BigInt>>,
    /// `conj_pos[i][j]` = α_i α_j α_i⁻¹ for j > i (empty vectors for j ≤ i).
    conj_pos: Vec<Vec<ExponentVector>>,
    /// `conj_neg[i][j]` = α_i⁻¹ α_j α_i for j > i.
    conj_neg: Vec<Vec<ExponentVector>>,
    /// Conjugation by α_i fixes every later basis element.
    trivial_action: Vec<bool>,
    step_budget: u64,
}

/// Raw conjugation data: for each `(i, negative, j)` with `i < j`, the word
/// for `α_i^(±1) α_j α_i^(∓1)` as basis letters.
pub type ConjugationWords = std::collections::HashMap<(usize, bool, usize), Vec<BasisLetter>>;

impl PolycyclicPresentation {
    pub fn new(
        labels: Vec<String>,
        strata: Vec<Range<usize>>,
        moduli: Vec<Option<BigInt>>,
        words: &ConjugationWords,
    ) -> Result<Self> {
        let n = labels.len();
        if moduli.len() != n {
            return Err(Error::Schema("moduli list does not match basis".into()));
        }
        check_strata(&strata, n)?;
        for (i, m) in moduli.iter().enumerate() {
            if let Some(m) = m {
                if *m < BigInt::from(2) {
                    return Err(Error::Schema(format!(
                        "modulus of {} must be at least 2",
                        labels[i]
                    )));
                }
            }
        }
        let unit = |j: usize| {
            let mut v = vec![BigInt::zero(); n];
            v[j] = BigInt::one();
            v
        };
        let mut pres = PolycyclicPresentation {
            labels,
            strata,
            moduli,
            conj_pos: vec![vec![Vec::new(); n]; n],
            conj_neg: vec![vec![Vec::new(); n]; n],
            trivial_action: vec![true; n],
            step_budget: DEFAULT_STEP_BUDGET,
        };
        // Tables for index i only involve products of letters > i, so they are
        // filled from the last index backwards.
        for i in (0..n).rev() {
            for j in i + 1..n {
                for negative in [false, true] {
                    let word = match words.get(&(i, negative, j)) {
                        Some(w) => w,
                        None if negative && pres.moduli[i] == Some(BigInt::from(2)) => {
                            match words.get(&(i, false, j)) {
                                Some(w) => w,
                                None => return Err(pres.missing(i, negative, j)),
                            }
                        }
                        None => return Err(pres.missing(i, negative, j)),
                    };
                    if let Some(bad) = word.iter().find(|l| l.index <= i) {
                        return Err(Error::PresentationInvalid(format!(
                            "conjugate of {} by {}{} uses {}, which is not later than the conjugator",
                            pres.labels[j],
                            pres.labels[i],
                            if negative { "^-1" } else { "" },
                            pres.labels[bad.index]
                        )));
                    }
                    let nf = pres.collector().word_normal_form(word)?;
                    if nf != unit(j) {
                        pres.trivial_action[i] = false;
                    }
                    if negative {
                        pres.conj_neg[i][j] = nf;
                    } else {
                        pres.conj_pos[i][j] = nf;
                    }
                }
            }
        }
        Ok(pres)
    }

    fn missing(&self, i: usize, negative: bool, j: usize) -> Error {
        Error::PresentationInvalid(format!(
            "conjugation table has no entry for \"{}{} {}\"",
            self.labels[i],
            if negative { "^-1" } else { "" },
            self.labels[j]
        ))
    }

    pub fn with_step_budget(mut self, budget: u64) -> Self {
        self.step_budget = budget;
        self
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

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn strata(&self) -> &[Range<usize>] {
        &self.strata
    }

    pub fn stratum_of(&self, index: usize) -> usize {
        self.strata
            .iter()
            .position(|r| r.contains(&index))
            .expect("strata partition the basis")
    }

    pub fn modulus(&self, index: usize) -> Option<&BigInt> {
        self.moduli[index].as_ref()
    }

    pub fn stratum_is_torsion_free(&self, stratum: usize) -> bool {
        self.strata[stratum].clone().all(|i| self.moduli[i].is_none())
    }

    pub fn conjugate(&self, i: usize, negative: bool, j: usize) -> &ExponentVector {
        if negative {
            &self.conj_neg[i][j]
        } else {
            &self.conj_pos[i][j]
        }
    }

    pub fn identity(&self) -> ExponentVector {
        vec![BigInt::zero(); self.len()]
    }

    pub fn basis_element(&self, index: usize) -> ExponentVector {
        let mut v = self.identity();
        v[index] = BigInt::one();
        v
    }

    pub fn collector(&self) -> Collector<'_> {
        Collector {
            pres: self,
            steps: 0,
        }
    }

    pub fn multiply(&self, u: &ExponentVector, v: &ExponentVector) -> Result<ExponentVector> {
        self.collector().multiply(u, v)
    }

    pub fn inverse(&self, u: &ExponentVector) -> Result<ExponentVector> {
        self.collector().inverse(u)
    }

    /// Whether `u` is a valid normal form: right length, torsion exponents reduced.
    pub fn is_normal_form(&self, u: &ExponentVector) -> bool {
        u.len() == self.len()
            && u.iter().zip(&self.moduli).all(|(e, m)| match m {
                Some(m) => !e.is_negative() && e < m,
                None => true,
            })
    }

    /// Support of `u` lies in strata `>= stratum`.
    pub fn lies_in_stratum(&self, u: &ExponentVector, stratum: usize) -> bool {
        let start = self.strata.get(stratum).map_or(self.len(), |r| r.start);
        u[..start].iter().all(Zero::is_zero)
    }

    /// Sum of absolute exponents.
    pub fn exponent_length(u: &ExponentVector) -> BigInt {
        u.iter().map(|e| e.abs()).sum()
    }

    pub fn format(&self, u: &ExponentVector) -> String {
        let parts: Vec<String> = u
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| {
                if e.is_one() {
                    self.labels[i].clone()
                } else {
                    format!("{}^{}", self.labels[i], e)
                }
            })
            .collect();
        if parts.is_empty() {
            "e".into()
        } else {
            parts.join(" ")
        }
    }

    /// Injective encoding of a normal form.
    pub fn write_key(&self, u: &ExponentVector, out: &mut Vec<u8>) {
        out.extend_from_slice(&(u.len() as u32).to_le_bytes());
        for e in u {
            super::matrix::write_bigint(out, e);
        }
    }

    /// Sub-presentation on the basis elements `from..`. Valid when that tail
    /// is closed under its own conjugations, which holds for every tail.
    pub fn tail(&self, from: usize) -> PolycyclicPresentation {
        let n = self.len();
        let strata: Vec<Range<usize>> = self
            .strata
            .iter()
            .filter(|r| r.end > from)
            .map(|r| r.start.max(from) - from..r.end - from)
            .collect();
        let cut = |table: &Vec<Vec<ExponentVector>>| -> Vec<Vec<ExponentVector>> {
            (from..n)
                .map(|i| {
                    (from..n)
                        .map(|j| {
                            if table[i][j].is_empty() {
                                Vec::new()
                            } else {
                                table[i][j][from..].to_vec()
                            }
                        })
                        .collect()
                })
                .collect()
        };
        PolycyclicPresentation {
            labels: self.labels[from..].to_vec(),
            strata,
            moduli: self.moduli[from..].to_vec(),
            conj_pos: cut(&self.conj_pos),
            conj_neg: cut(&self.conj_neg),
            trivial_action: self.trivial_action[from..].to_vec(),
            step_budget: self.step_budget,
        }
    }

    /// Checks the presentation defines a group with the stated normal forms:
    /// the two conjugation tables are mutually inverse, torsion relations are
    /// compatible with conjugation, and products of basis triples associate.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.len();
        let mut c = self.collector();
        let gen = |i: usize, e: i64| {
            let mut v = self.identity();
            v[i] = BigInt::from(e);
            self.reduce_exponents(&mut v);
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                // α_i⁻¹ (α_i α_j α_i⁻¹) α_i = α_j
                let mid = c.multiply(&gen(i, -1), &self.conj_pos[i][j])?;
                let lhs = c.multiply(&mid, &gen(i, 1))?;
                if lhs != self.basis_element(j) {
                    return Err(Error::Inconsistent(format!(
                        "conjugating {} by {} and back does not return {}",
                        self.labels[j], self.labels[i], self.labels[j]
                    )));
                }
                if let Some(m) = &self.moduli[i] {
                    let image = c.conjugation_power(i, m, self.basis_element(j))?;
                    if image != self.basis_element(j) {
                        return Err(Error::Inconsistent(format!(
                            "{}^{} = e but its {}-th conjugation power moves {}",
                            self.labels[i], m, m, self.labels[j]
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for (a, b, d) in [(1, 1, 1), (-1, 1, 1), (1, -1, 1), (1, 1, -1), (-1, -1, -1)] {
                        let (x, y, z) = (gen(k, a), gen(j, b), gen(i, d));
                        let xy = c.multiply(&x, &y)?;
                        let left = c.multiply(&xy, &z)?;
                        let yz = c.multiply(&y, &z)?;
                        let right = c.multiply(&x, &yz)?;
                        if left != right {
                            return Err(Error::Inconsistent(format!(
                                "products of {}, {}, {} do not associate",
                                self.labels[k], self.labels[j], self.labels[i]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub(crate) fn reduce_exponents(&self, u: &mut ExponentVector) {
        for (e, m) in u.iter_mut().zip(&self.moduli) {
            if let Some(m) = m {
                *e = e.mod_floor(m);
            }
        }
    }
}

fn check_strata(strata: &[Range<usize>], n: usize) -> Result<()> {
    let mut expected = 0;
    for r in strata {
        if r.start != expected || r.end <= r.start {
            return Err(Error::Schema(format!(
                "strata must be consecutive non-empty ranges covering 0..{n}"
            )));
        }
        expected = r.end;
    }
    if expected != n {
        return Err(Error::Schema(format!(
            "strata must be consecutive non-empty ranges covering 0..{n}"
        )));
    }
    Ok(())
}

/// Collection state for one top-level operation, tracking the step budget.
pub struct Collector<'a> {
    pres: &'a PolycyclicPresentation,
    steps: u64,
}

impl Collector<'_> {
    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.pres.step_budget {
            Err(Error::Resource(format!(
                "collection exceeded {} steps",
                self.pres.step_budget
            )))
        } else {
            Ok(())
        }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// `u ← u · α_i^e`.
    pub fn mul_gen_pow(&mut self, u: &mut ExponentVector, i: usize, e: &BigInt) -> Result<()> {
        self.tick()?;
        let e = match self.pres.modulus(i) {
            Some(m) => e.mod_floor(m),
            None => e.clone(),
        };
        if e.is_zero() {
            return Ok(());
        }
        let n = self.pres.len();
        let tail_nonzero = u[i + 1..].iter().any(|x| !x.is_zero());
        u[i] += &e;
        if let Some(m) = self.pres.modulus(i) {
            u[i] = u[i].mod_floor(m);
        }
        if tail_nonzero && !self.pres.trivial_action[i] {
            let mut tail = vec![BigInt::zero(); n];
            for j in i + 1..n {
                tail[j] = std::mem::take(&mut u[j]);
            }
            let moved = self.conjugation_power(i, &e, tail)?;
            for j in i + 1..n {
                u[j] = moved[j].clone();
            }
        }
        Ok(())
    }

    /// `ψ_i^e(t)` with `ψ_i(g) = α_i⁻¹ g α_i`, for `t` supported above `i`.
    pub fn conjugation_power(&mut self, i: usize, e: &BigInt, t: ExponentVector) -> Result<ExponentVector> {
        if self.pres.trivial_action[i] || e.is_zero() {
            return Ok(t);
        }
        let table = if e.is_positive() {
            &self.pres.conj_neg[i]
        } else {
            &self.pres.conj_pos[i]
        };
        let count = e.abs();
        if count <= BigInt::from(4) {
            let mut cur = t;
            for _ in 0..count.to_u32().unwrap_or(0) {
                cur = self.apply_images(table, i + 1, &cur)?;
            }
            return Ok(cur);
        }
        // Square-and-multiply on the automorphism itself.
        let mut base: Vec<ExponentVector> = table.clone();
        let mut acc: Option<Vec<ExponentVector>> = None;
        let mut k = count;
        let two = BigInt::from(2);
        while !k.is_zero() {
            if k.is_odd() {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => self.compose(&base, &a, i + 1)?,
                });
            }
            k /= &two;
            if !k.is_zero() {
                base = self.compose(&base, &base, i + 1)?;
            }
        }
        let acc = acc.expect("count is positive");
        self.apply_images(&acc, i + 1, &t)
    }

    /// Images of `f ∘ g` on basis elements `from..`.
    fn compose(
        &mut self,
        f: &[ExponentVector],
        g: &[ExponentVector],
        from: usize,
    ) -> Result<Vec<ExponentVector>> {
        let n = self.pres.len();
        let mut out = vec![Vec::new(); n];
        for j in from..n {
            out[j] = self.apply_images(f, from, &g[j])?;
        }
        Ok(out)
    }

    /// Applies the endomorphism sending `α_j ↦ images[j]` (for `j >= from`)
    /// to `t`, which must be supported on `from..`.
    pub fn apply_images(
        &mut self,
        images: &[ExponentVector],
        from: usize,
        t: &ExponentVector,
    ) -> Result<ExponentVector> {
        let mut out = self.pres.identity();
        for j in from..self.pres.len() {
            if t[j].is_zero() {
                continue;
            }
            let p = self.pow(&images[j], &t[j])?;
            out = self.multiply(&out, &p)?;
        }
        Ok(out)
    }

    pub fn multiply(&mut self, u: &ExponentVector, v: &ExponentVector) -> Result<ExponentVector> {
        let mut r = u.clone();
        for (j, e) in v.iter().enumerate() {
            if !e.is_zero() {
                self.mul_gen_pow(&mut r, j, e)?;
            }
        }
        Ok(r)
    }

    pub fn inverse(&mut self, u: &ExponentVector) -> Result<ExponentVector> {
        let mut r = self.pres.identity();
        for j in (0..u.len()).rev() {
            if !u[j].is_zero() {
                self.mul_gen_pow(&mut r, j, &-&u[j])?;
            }
        }
        Ok(r)
    }

    pub fn pow(&mut self, g: &ExponentVector, e: &BigInt) -> Result<ExponentVector> {
        let mut support = g.iter().enumerate().filter(|(_, x)| !x.is_zero());
        if let (Some((j, x)), None) = (support.next(), support.next()) {
            let mut v = self.pres.identity();
            v[j] = x * e;
            if let Some(m) = self.pres.modulus(j) {
                v[j] = v[j].mod_floor(m);
            }
            return Ok(v);
        }
        if g.iter().all(Zero::is_zero) || e.is_zero() {
            return Ok(self.pres.identity());
        }
        let (mut base, mut k) = if e.is_negative() {
            (self.inverse(g)?, -e)
        } else {
            (g.clone(), e.clone())
        };
        let mut acc = self.pres.identity();
        let two = BigInt::from(2);
        while !k.is_zero() {
            if k.is_odd() {
                acc = self.multiply(&acc, &base)?;
            }
            k /= &two;
            if !k.is_zero() {
                base = self.multiply(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// Normal form of a product of basis letters.
    pub fn word_normal_form(&mut self, word: &[BasisLetter]) -> Result<ExponentVector> {
        let mut r = self.pres.identity();
        let (one, minus_one) = (BigInt::one(), -BigInt::one());
        for l in word {
            self.mul_gen_pow(&mut r, l.index, if l.negative { &minus_one } else { &one })?;
        }
        Ok(r)
    }
}

impl fmt::Display for PolycyclicPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let strata: Vec<String> = self
            .strata
            .iter()
            .map(|r| self.labels[r.clone()].join(","))
            .collect();
        write!(f, "pc<{}>", strata.join(" | "))
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::models::matrix::RationalMatrix;
    use proptest::prelude::*;

    pub(crate) fn letter(index: usize, negative: bool) -> BasisLetter {
        BasisLetter { index, negative }
    }

    /// ⟨x, y | z⟩ with [x, y] = z central.
    pub(crate) fn heisenberg() -> PolycyclicPresentation {
        let mut w = ConjugationWords::new();
        w.insert((0, false, 1), vec![letter(1, false), letter(2, false)]);
        w.insert((0, true, 1), vec![letter(1, false), letter(2, true)]);
        w.insert((0, false, 2), vec![letter(2, false)]);
        w.insert((0, true, 2), vec![letter(2, false)]);
        w.insert((1, false, 2), vec![letter(2, false)]);
        w.insert((1, true, 2), vec![letter(2, false)]);
        PolycyclicPresentation::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![0..2, 2..3],
            vec![None; 3],
            &w,
        )
        .unwrap()
    }

    fn big(v: &[i64]) -> ExponentVector {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Faithful image x^a y^b z^c ↦ [[1, a, c + ab], [0, 1, b], [0, 0, 1]],
    /// built by direct products of the generator matrices.
    fn as_matrix(u: &ExponentVector) -> RationalMatrix {
        let x = RationalMatrix::from_integers(&[vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let y = RationalMatrix::from_integers(&[vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 1]]).unwrap();
        let z = RationalMatrix::from_integers(&[vec![1, 0, 1], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        let mut acc = RationalMatrix::identity(3);
        for (m, e) in [x, y, z].iter().zip(u) {
            let e = e.to_i64().unwrap();
            let base = if e < 0 { m.inverse().unwrap() } else { m.clone() };
            for _ in 0..e.abs() {
                acc = acc.mul(&base);
            }
        }
        acc
    }

    #[test]
    fn right_identity_and_inverse() {
        let h = heisenberg();
        let u = big(&[3, -2, 5]);
        assert_eq!(h.multiply(&u, &h.identity()).unwrap(), u);
        let inv = h.inverse(&u).unwrap();
        assert_eq!(h.multiply(&u, &inv).unwrap(), h.identity());
    }

    #[test]
    fn xy_and_yx_differ_by_z() {
        let h = heisenberg();
        let (x, y) = (h.basis_element(0), h.basis_element(1));
        let xy = h.multiply(&x, &y).unwrap();
        let yx = h.multiply(&y, &x).unwrap();
        assert_eq!(xy, big(&[1, 1, 0]));
        assert_eq!(yx, big(&[1, 1, -1]));
        assert_eq!(as_matrix(&xy), as_matrix(&x).mul(&as_matrix(&y)));
        assert_eq!(as_matrix(&yx), as_matrix(&y).mul(&as_matrix(&x)));
    }

    #[test]
    fn heisenberg_presentation_is_consistent() {
        heisenberg().check_consistency().unwrap();
    }

    #[test]
    fn missing_table_entry_is_rejected() {
        let mut w = ConjugationWords::new();
        w.insert((0, false, 1), vec![letter(1, false)]);
        let err = PolycyclicPresentation::new(vec!["a".into(), "b".into()], vec![0..2], vec![None; 2], &w);
        assert!(matches!(err, Err(Error::PresentationInvalid(_))));
    }

    #[test]
    fn step_budget_is_enforced() {
        let h = heisenberg().with_step_budget(3);
        let u = big(&[1, 1, 1]);
        assert!(matches!(h.multiply(&u, &u), Err(Error::Resource(_))));
    }

    #[test]
    fn torsion_exponents_reduce() {
        // Heisenberg group over Z/3.
        let mut w = ConjugationWords::new();
        w.insert((0, false, 1), vec![letter(1, false), letter(2, false)]);
        w.insert((0, true, 1), vec![letter(1, false), letter(2, true)]);
        for (i, j) in [(0, 2), (1, 2)] {
            w.insert((i, false, j), vec![letter(j, false)]);
            w.insert((i, true, j), vec![letter(j, false)]);
        }
        let three = Some(BigInt::from(3));
        let h = PolycyclicPresentation::new(
            vec!["x".into(), "y".into(), "z".into()],
            vec![0..2, 2..3],
            vec![three.clone(), three.clone(), three],
            &w,
        )
        .unwrap();
        h.check_consistency().unwrap();
        let x = h.basis_element(0);
        let x3 = h.collector().pow(&x, &BigInt::from(3)).unwrap();
        assert_eq!(x3, h.identity());
        let inv = h.inverse(&big(&[1, 2, 1])).unwrap();
        assert!(h.is_normal_form(&inv));
    }

    #[test]
    fn tail_subpresentation() {
        let h = heisenberg();
        let t = h.tail(1);
        assert_eq!(t.labels(), &["y".to_string(), "z".to_string()]);
        assert_eq!(t.strata(), &[0..1, 1..2]);
        let yz = t.multiply(&big(&[1, 0]), &big(&[0, 1])).unwrap();
        assert_eq!(yz, big(&[1, 1]));
    }

    proptest! {
        #[test]
        fn agrees_with_faithful_matrices(
            u in prop::collection::vec(-6i64..=6, 3),
            v in prop::collection::vec(-6i64..=6, 3),
        ) {
            let h = heisenberg();
            let (u, v) = (big(&u), big(&v));
            let p = h.multiply(&u, &v).unwrap();
            prop_assert_eq!(as_matrix(&p), as_matrix(&u).mul(&as_matrix(&v)));
        }

        #[test]
        fn large_exponents_match_iterated_products(a in -40i64..40, b in -40i64..40) {
            let h = heisenberg();
            let u = big(&[0, b, 0]);
            let x_a = big(&[a, 0, 0]);
            let fast = h.multiply(&u, &x_a).unwrap();
            let mut slow = u.clone();
            let step = big(&[a.signum(), 0, 0]);
            for _ in 0..a.abs() {
                slow = h.multiply(&slow, &step).unwrap();
            }
            prop_assert_eq!(fast, slow);
        }
    }
}
