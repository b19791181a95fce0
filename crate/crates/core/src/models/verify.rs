//! Graded-series checks: `[N, N_h] ⊆ N_(h+1)` on basis pairs, and action
//! images that respect strata.

use serde::Serialize;

use super::extension::SplitExtension;
use super::polycyclic::PolycyclicPresentation;
use super::GroupModel;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    /// The offending commutator or action image, e.g. `[y, x]` or `t(a)`.
    pub subject: String,
    /// Its normal form.
    pub value: String,
    /// The stratum the value should have landed in (0-based).
    pub required_stratum: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GradedReport {
    pub checked_pairs: usize,
    pub violations: Vec<Violation>,
    /// Set when the model carries no graded basis to check.
    pub vacuous: bool,
}

impl GradedReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every pair `i < j` with both signs on `α_i`: the commutator
/// `α_i^±1 α_j α_i^∓1 α_j⁻¹` must lie in the stratum after the deeper of the two.
pub fn verify_presentation(pres: &PolycyclicPresentation) -> Result<GradedReport> {
    let mut report = GradedReport::default();
    let n = pres.len();
    let mut c = pres.collector();
    for i in 0..n {
        for j in i + 1..n {
            let h = pres.stratum_of(i).max(pres.stratum_of(j));
            for negative in [false, true] {
                report.checked_pairs += 1;
                let inv_j = c.inverse(&pres.basis_element(j))?;
                let comm = c.multiply(pres.conjugate(i, negative, j), &inv_j)?;
                if !pres.lies_in_stratum(&comm, h + 1) {
                    let labels = pres.labels();
                    report.violations.push(Violation {
                        subject: format!(
                            "[{}{}, {}]",
                            labels[i],
                            if negative { "^-1" } else { "" },
                            labels[j]
                        ),
                        value: pres.format(&comm),
                        required_stratum: h + 1,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// The presentation checks on N, plus: each image `φ(γ)(α_p)` of a stratum-h
/// basis element lies in `N_h`.
pub fn verify_extension(ext: &SplitExtension) -> Result<GradedReport> {
    let pres = ext.normal();
    let mut report = verify_presentation(pres)?;
    let top_gens = ext.top().generators();
    for j in 0..top_gens.len() {
        let images = ext.action(j);
        for (p, image) in images.iter().enumerate() {
            report.checked_pairs += 1;
            let h = pres.stratum_of(p);
            if !pres.lies_in_stratum(image, h) {
                report.violations.push(Violation {
                    subject: format!("{}({})", top_gens.label(j), pres.labels()[p]),
                    value: pres.format(image),
                    required_stratum: h,
                });
            }
        }
    }
    Ok(report)
}

pub fn verify_graded_series(model: &GroupModel) -> Result<GradedReport> {
    match model {
        GroupModel::Polycyclic(p) => verify_presentation(p.presentation()),
        GroupModel::SplitExtension(e) => verify_extension(e),
        _ => Ok(GradedReport {
            vacuous: true,
            ..GradedReport::default()
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::polycyclic::tests::{heisenberg, letter};
    use crate::models::polycyclic::ConjugationWords;

    #[test]
    fn heisenberg_grading_passes() {
        let r = verify_presentation(&heisenberg()).unwrap();
        assert!(r.passed());
        assert_eq!(r.checked_pairs, 6);
    }

    /// Same group with basis (y, z | x): z sits in stratum 0 and x in stratum 1,
    /// so [y, x] = z⁻¹ should lie in stratum 2, which is trivial.
    #[test]
    fn misgraded_basis_names_the_commutator() {
        let mut w = ConjugationWords::new();
        w.insert((0, false, 1), vec![letter(1, false)]);
        w.insert((0, true, 1), vec![letter(1, false)]);
        w.insert((0, false, 2), vec![letter(1, true), letter(2, false)]);
        w.insert((0, true, 2), vec![letter(1, false), letter(2, false)]);
        w.insert((1, false, 2), vec![letter(2, false)]);
        w.insert((1, true, 2), vec![letter(2, false)]);
        let pres = PolycyclicPresentation::new(
            vec!["y".into(), "z".into(), "x".into()],
            vec![0..2, 2..3],
            vec![None; 3],
            &w,
        )
        .unwrap();
        pres.check_consistency().unwrap();
        let r = verify_presentation(&pres).unwrap();
        assert!(!r.passed());
        assert!(r.violations.iter().any(|v| v.subject == "[y, x]" && v.value == "z^-1"));
    }

    #[test]
    fn abelian_single_stratum_passes() {
        let mut w = ConjugationWords::new();
        w.insert((0, false, 1), vec![letter(1, false)]);
        w.insert((0, true, 1), vec![letter(1, false)]);
        let pres = PolycyclicPresentation::new(vec!["a".into(), "b".into()], vec![0..2], vec![None; 2], &w)
            .unwrap();
        assert!(verify_presentation(&pres).unwrap().passed());
    }
}
