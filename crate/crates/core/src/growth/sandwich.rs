//! `|Λ(R, π(S))| ≤ |Γ(R, S)| ≤ |F| · |Λ(R, π(S))|` for a quotient map π
//! with finite kernel F.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use super::ball::{enumerate_ball, enumerate_ball_over, Caps};
use crate::error::{Error, Result};
use crate::models::polycyclic::{ConjugationWords, PolycyclicPresentation};
use crate::models::{Element, GroupModel, PolycyclicGroup};
use crate::words::SymmetricGeneratingSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichRow {
    pub radius: usize,
    pub quotient: u64,
    pub group: u64,
    pub upper: u64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichReport {
    pub kernel_order: u64,
    pub rows: Vec<SandwichRow>,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }
}

/// The quotient model, the images `π(s)` of the generators, and `|ker π|`.
pub fn quotient_data(model: &GroupModel) -> Result<(Arc<GroupModel>, Vec<Element>, u64)> {
    match model {
        GroupModel::SplitExtension(e) => {
            let pres = e.normal();
            let mut order = BigInt::from(1);
            for i in 0..pres.len() {
                match pres.modulus(i) {
                    Some(m) => order *= m,
                    None => {
                        return Err(Error::Unsupported(format!(
                            "the kernel is infinite ({} has infinite order)",
                            pres.labels()[i]
                        )))
                    }
                }
            }
            let order = order
                .to_u64()
                .ok_or_else(|| Error::Unsupported("kernel order overflows 64 bits".into()))?;
            let images = model
                .generator_elements()
                .into_iter()
                .map(|g| match g {
                    Element::Extension(x) => x.top,
                    _ => unreachable!("split extensions produce extension elements"),
                })
                .collect();
            Ok((Arc::clone(e.top()), images, order))
        }
        GroupModel::ModP(m) => {
            let gens = Arc::new(SymmetricGeneratingSet::from_pairs(&[("n", "N")])?);
            let pres = PolycyclicPresentation::new(vec!["n".into()], vec![0..1], vec![None], &ConjugationWords::new())?;
            let z = GroupModel::Polycyclic(PolycyclicGroup::new(gens, Arc::new(pres))?);
            let images = model
                .generator_elements()
                .into_iter()
                .map(|g| match g {
                    Element::ModP(x) => Element::Polycyclic(vec![BigInt::from(x.shift)]),
                    _ => unreachable!("mod-p extensions produce mod-p elements"),
                })
                .collect();
            Ok((Arc::new(z), images, m.p()))
        }
        _ => Err(Error::Unsupported(format!(
            "no quotient map is attached to a {} model",
            model.kind()
        ))),
    }
}

pub fn quotient_sandwich_check(model: &GroupModel, r_max: usize, caps: &Caps) -> Result<SandwichReport> {
    let (quotient, images, kernel_order) = quotient_data(model)?;
    let big = enumerate_ball(model, r_max, caps)?;
    let small = enumerate_ball_over(&quotient, &images, r_max, caps)?;
    let upto = big.complete_radius().min(small.complete_radius());
    let rows = (0..=upto)
        .map(|r| {
            let (q, g) = (small.cumulative[r], big.cumulative[r]);
            let upper = kernel_order.saturating_mul(q);
            SandwichRow {
                radius: r,
                quotient: q,
                group: g,
                upper,
                holds: q <= g && g <= upper,
            }
        })
        .collect();
    Ok(SandwichReport { kernel_order, rows })
}
