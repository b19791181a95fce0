//! Conjugation matrices on graded quotients and the norm-one screen.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::{lambda_max, osin_lower_bound, root_of_unity_exponent, unit_circle_test, IntegerMatrix};
use crate::error::{Error, Result};
use crate::models::extension::SplitExtension;
use crate::models::matrix::RationalMatrix;
use crate::models::{Element, GroupModel};

pub const DEFAULT_ORDER_BUDGET: u64 = 10_000;

/// Matrix of the action of Λ-generator `top_generator` on `N_h / N_(h+1)`:
/// column `q` holds the stratum-h exponents of the image of its q-th basis element.
pub fn conjugation_matrix(ext: &SplitExtension, top_generator: usize, stratum: usize) -> Result<IntegerMatrix> {
    let pres = ext.normal();
    let range = pres
        .strata()
        .get(stratum)
        .cloned()
        .ok_or_else(|| Error::Parameter(format!("N has no stratum {stratum}")))?;
    if !pres.stratum_is_torsion_free(stratum) {
        return Err(Error::Unsupported(format!("stratum {stratum} has torsion")));
    }
    if top_generator >= ext.top().generators().len() {
        return Err(Error::Parameter(format!("Lambda has no generator {top_generator}")));
    }
    let images = ext.action(top_generator);
    let m = range.len();
    let mut rows = vec![vec![BigInt::zero(); m]; m];
    for (q, p) in range.clone().enumerate() {
        let image = &images[p];
        if !pres.lies_in_stratum(image, stratum) {
            return Err(Error::PresentationInvalid(format!(
                "image of {} leaves stratum {stratum}",
                pres.labels()[p]
            )));
        }
        for (row, i) in range.clone().enumerate() {
            rows[row][q] = image[i].clone();
        }
    }
    IntegerMatrix::from_rows(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "order", rename_all = "snake_case")]
pub enum ElementOrder {
    Finite(u64),
    Infinite,
    Unknown,
}

/// Order of an element of Λ: exact where the model allows it, else by
/// powering up to `budget`.
pub fn element_order(model: &GroupModel, g: &Element, budget: u64) -> Result<ElementOrder> {
    match (model, g) {
        (GroupModel::Polycyclic(p), Element::Polycyclic(v)) => {
            if let Some(i) = v.iter().position(|e| !e.is_zero()) {
                if p.presentation().modulus(i).is_none() {
                    // Nonzero image in the infinite cyclic factor ⟨α_i, …⟩ / ⟨α_(i+1), …⟩.
                    return Ok(ElementOrder::Infinite);
                }
            }
        }
        (GroupModel::ModP(m), Element::ModP(x)) => {
            return Ok(if x.shift != 0 {
                ElementOrder::Infinite
            } else if x.residue == 0 {
                ElementOrder::Finite(1)
            } else {
                ElementOrder::Finite(m.p())
            });
        }
        (GroupModel::Matrix(_), Element::Matrix(a)) => return Ok(matrix_order(a)),
        _ => {}
    }
    let mut acc = g.clone();
    for k in 1..=budget {
        if model.is_identity(&acc) {
            return Ok(ElementOrder::Finite(k));
        }
        acc = model.multiply(&acc, g)?;
    }
    Ok(ElementOrder::Unknown)
}

/// A finite-order matrix has eigenvalues that are roots of unity of degree at
/// most its dimension, so its order divides the exponent `L`.
fn matrix_order(a: &RationalMatrix) -> ElementOrder {
    let big_l = root_of_unity_exponent(a.dim());
    let power = |e: u64| {
        let (mut acc, mut base, mut e) = (RationalMatrix::identity(a.dim()), a.clone(), e);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    };
    if !power(big_l).is_identity() {
        return ElementOrder::Infinite;
    }
    let order = (1..=big_l)
        .filter(|d| big_l % d == 0)
        .find(|&d| power(d).is_identity())
        .unwrap_or(big_l);
    ElementOrder::Finite(order)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenEntry {
    pub generator: String,
    pub order: ElementOrder,
    pub stratum: usize,
    pub unit_circle: bool,
    pub lambda_max_lo: f64,
    pub lambda_max_hi: f64,
    pub osin_bound: f64,
    /// Exact enclosure endpoints.
    pub lambda_max_exact: (String, String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScreenVerdict {
    Pass,
    Fail,
    /// Only generators of undecided order violate the criterion.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenReport {
    pub verdict: ScreenVerdict,
    pub entries: Vec<ScreenEntry>,
    /// Strata with torsion; their automorphisms have finite order and are skipped.
    pub skipped_strata: Vec<usize>,
}

impl ScreenReport {
    /// Entries where the norm-one criterion fails.
    pub fn failures(&self) -> impl Iterator<Item = &ScreenEntry> {
        self.entries.iter().filter(|e| !e.unit_circle)
    }
}

/// For every Λ-generator of infinite (or undecided) order and every
/// torsion-free stratum, tests whether the conjugation matrix has all
/// eigenvalues of modulus one.
pub fn virtual_nilpotency_screen(
    model: &GroupModel,
    order_budget: u64,
    tol: &BigRational,
) -> Result<ScreenReport> {
    let GroupModel::SplitExtension(ext) = model else {
        return Err(Error::Unsupported(format!(
            "the screen needs a split extension, not a {} model",
            model.kind()
        )));
    };
    let pres = ext.normal();
    let top = ext.top();
    let top_gens = top.generators();
    let skipped_strata: Vec<usize> = (0..pres.strata().len())
        .filter(|&h| !pres.stratum_is_torsion_free(h))
        .collect();
    let mut entries = Vec::new();
    let (mut fail, mut undecided_fail) = (false, false);
    for j in 0..top_gens.len() {
        let order = element_order(top, &top.generator(j), order_budget)?;
        if let ElementOrder::Finite(_) = order {
            continue;
        }
        for h in 0..pres.strata().len() {
            if skipped_strata.contains(&h) {
                continue;
            }
            let a = conjugation_matrix(ext, j, h)?;
            let unit_circle = unit_circle_test(&a);
            let enclosure = lambda_max(&a, tol)?;
            let osin_bound = if unit_circle { 0.0 } else { osin_lower_bound(&enclosure)? };
            if !unit_circle {
                match order {
                    ElementOrder::Infinite => fail = true,
                    _ => undecided_fail = true,
                }
            }
            entries.push(ScreenEntry {
                generator: top_gens.label(j).to_string(),
                order,
                stratum: h,
                unit_circle,
                lambda_max_lo: enclosure.lo.to_f64().unwrap_or(f64::NAN),
                lambda_max_hi: enclosure.hi.to_f64().unwrap_or(f64::NAN),
                osin_bound,
                lambda_max_exact: (enclosure.lo.to_string(), enclosure.hi.to_string()),
            });
        }
    }
    let verdict = if fail {
        ScreenVerdict::Fail
    } else if undecided_fail {
        ScreenVerdict::Inconclusive
    } else {
        ScreenVerdict::Pass
    };
    Ok(ScreenReport {
        verdict,
        entries,
        skipped_strata,
    })
}
