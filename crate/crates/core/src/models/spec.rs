//! Loader for `.group` spec files (JSON).

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::Deserialize;
use sha2::{Digest, Sha256};

use super::extension::{Automorphism, SplitExtension};
use super::matrix::{parse_rational, MatrixGroup, RationalMatrix};
use super::modp::ModPExtension;
use super::polycyclic::{BasisLetter, ConjugationWords, PolycyclicPresentation};
use super::verify::{verify_graded_series, GradedReport};
use super::{GroupModel, PolycyclicGroup};
use crate::error::{Error, Result};
use crate::rewriting::coset::{CosetTables, RawCosets};
use crate::words::SymmetricGeneratingSet;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    label: String,
    inverse_label: String,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
enum RawSpec {
    Matrix(RawMatrix),
    Polycyclic(RawPolycyclic),
    SplitExtension(RawSplit),
    ModPExtension(RawModP),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    #[serde(default)]
    description: Option<String>,
    generators: Vec<RawGenerator>,
    matrices: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(default)]
    cosets: Option<RawCosets>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolycyclic {
    #[serde(default)]
    description: Option<String>,
    generators: Vec<RawGenerator>,
    strata: Vec<[usize; 2]>,
    #[serde(default)]
    moduli: BTreeMap<String, u64>,
    #[serde(default)]
    conjugation: BTreeMap<String, String>,
    #[serde(default)]
    cosets: Option<RawCosets>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSplit {
    #[serde(default)]
    description: Option<String>,
    generators: Vec<RawGenerator>,
    #[serde(rename = "N")]
    normal: Box<RawSpec>,
    #[serde(rename = "Lambda")]
    lambda: Box<RawSpec>,
    action: BTreeMap<String, String>,
    #[serde(default)]
    cosets: Option<RawCosets>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModP {
    #[serde(default)]
    description: Option<String>,
    generators: Vec<RawGenerator>,
    p: u64,
    #[serde(default)]
    cosets: Option<RawCosets>,
}

/// A validated model with everything the loader learned about it.
#[derive(Clone, Debug)]
pub struct LoadedSpec {
    pub model: Arc<GroupModel>,
    pub description: Option<String>,
    pub graded: GradedReport,
    pub cosets: Option<Arc<CosetTables>>,
    /// Hex SHA-256 of the file contents.
    pub sha256: String,
}

pub fn load_group_spec(path: impl AsRef<Path>) -> Result<LoadedSpec> {
    let text = std::fs::read_to_string(path)?;
    parse_group_spec(&text)
}

pub fn parse_group_spec(text: &str) -> Result<LoadedSpec> {
    let raw: RawSpec = serde_json::from_str(text).map_err(|e| {
        use serde_json::error::Category;
        match e.classify() {
            Category::Data => Error::Schema(format!(
                "{} (line {}, column {})",
                strip_position(&e.to_string()),
                e.line(),
                e.column()
            )),
            _ => Error::Parse {
                line: e.line(),
                column: e.column(),
                message: strip_position(&e.to_string()),
            },
        }
    })?;
    let (description, cosets) = match &raw {
        RawSpec::Matrix(m) => (m.description.clone(), m.cosets.as_ref()),
        RawSpec::Polycyclic(p) => (p.description.clone(), p.cosets.as_ref()),
        RawSpec::SplitExtension(s) => (s.description.clone(), s.cosets.as_ref()),
        RawSpec::ModPExtension(m) => (m.description.clone(), m.cosets.as_ref()),
    };
    let model = Arc::new(build(&raw)?);
    let graded = verify_graded_series(&model)?;
    let cosets = match cosets {
        Some(c) => Some(Arc::new(CosetTables::from_raw(&model, c)?)),
        None => None,
    };
    Ok(LoadedSpec {
        model,
        description,
        graded,
        cosets,
        sha256: sha256_hex(text.as_bytes()),
    })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn strip_position(message: &str) -> String {
    match message.rfind(" at line ") {
        Some(i) => message[..i].to_string(),
        None => message.to_string(),
    }
}

fn generating_set(raw: &[RawGenerator]) -> Result<Arc<SymmetricGeneratingSet>> {
    let pairs: Vec<(&str, &str)> = raw
        .iter()
        .map(|g| (g.label.as_str(), g.inverse_label.as_str()))
        .collect();
    SymmetricGeneratingSet::from_pairs(&pairs)
        .map(Arc::new)
        .map_err(|e| Error::Schema(format!("generators: {e}")))
}

fn build(raw: &RawSpec) -> Result<GroupModel> {
    match raw {
        RawSpec::Matrix(m) => build_matrix(m),
        RawSpec::Polycyclic(p) => build_polycyclic(p).map(GroupModel::Polycyclic),
        RawSpec::SplitExtension(s) => build_split(s),
        RawSpec::ModPExtension(m) => {
            ModPExtension::new(generating_set(&m.generators)?, m.p).map(GroupModel::ModP)
        }
    }
}

fn build_matrix(raw: &RawMatrix) -> Result<GroupModel> {
    let gens = generating_set(&raw.generators)?;
    if let Some(label) = raw.matrices.keys().find(|l| gens.index_of(l).is_none()) {
        return Err(Error::Schema(format!("matrices: {label} is not a generator label")));
    }
    let mut given: Vec<Option<RationalMatrix>> = vec![None; gens.len()];
    for (label, rows) in &raw.matrices {
        let rows = rows
            .iter()
            .map(|r| r.iter().map(|e| parse_rational(e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Schema(format!("matrices.{label}: {e}")))?;
        let m = RationalMatrix::from_rows(rows).map_err(|e| Error::Schema(format!("matrices.{label}: {e}")))?;
        given[gens.index_of(label).unwrap()] = Some(m);
    }
    let mut matrices = Vec::with_capacity(gens.len());
    for i in 0..gens.len() {
        let m = match (&given[i], &given[gens.inverse(i)]) {
            (Some(m), _) => m.clone(),
            (None, Some(inv)) => inv.inverse().ok_or_else(|| {
                Error::Inconsistent(format!("matrix for {} is singular", gens.label(gens.inverse(i))))
            })?,
            (None, None) => {
                return Err(Error::Schema(format!(
                    "matrices: no matrix for {} or its inverse",
                    gens.label(i)
                )))
            }
        };
        matrices.push(m);
    }
    MatrixGroup::new(gens, matrices).map(GroupModel::Matrix)
}

/// Basis letter for each generator of a polycyclic spec: the basis is the
/// list of `label`s, and each `inverse_label` denotes the inverse letter.
fn basis_letters(raw: &[RawGenerator], gens: &SymmetricGeneratingSet) -> Vec<BasisLetter> {
    let mut letters = vec![BasisLetter { index: 0, negative: false }; gens.len()];
    for (index, g) in raw.iter().enumerate() {
        let i = gens.index_of(&g.label).unwrap();
        letters[i] = BasisLetter { index, negative: false };
        let j = gens.inverse(i);
        if j != i {
            letters[j] = BasisLetter { index, negative: true };
        }
    }
    letters
}

fn parse_basis_word(
    text: &str,
    gens: &SymmetricGeneratingSet,
    letters: &[BasisLetter],
) -> Result<Vec<BasisLetter>> {
    Ok(gens
        .parse_letters(text)?
        .into_iter()
        .map(|l| letters[gens.resolve(l)])
        .collect())
}

fn build_polycyclic(raw: &RawPolycyclic) -> Result<PolycyclicGroup> {
    let gens = generating_set(&raw.generators)?;
    if gens.pair_representatives().len() != raw.generators.len() {
        return Err(Error::Schema(
            "generators: a polycyclic basis label reappears as an inverse label".into(),
        ));
    }
    let letters = basis_letters(&raw.generators, &gens);
    let labels: Vec<String> = raw.generators.iter().map(|g| g.label.clone()).collect();
    let n = labels.len();
    let strata = raw.strata.iter().map(|[a, b]| *a..*b).collect();
    let mut moduli = vec![None; n];
    for (label, m) in &raw.moduli {
        let index = labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::Schema(format!("moduli: {label} is not a basis label")))?;
        moduli[index] = Some(BigInt::from(*m));
    }
    let mut words = ConjugationWords::new();
    for (key, value) in &raw.conjugation {
        let key_letters = parse_basis_word(key, &gens, &letters)
            .map_err(|e| Error::Schema(format!("conjugation key {key:?}: {e}")))?;
        let (conj, target) = match key_letters[..] {
            [c, t] if !t.negative => (c, t),
            _ => {
                return Err(Error::Schema(format!(
                    "conjugation key {key:?} must be a basis letter (or its inverse) followed by a basis label"
                )))
            }
        };
        if conj.index >= target.index {
            return Err(Error::PresentationInvalid(format!(
                "conjugation key {key:?}: the conjugator must precede the conjugated basis element"
            )));
        }
        let word = parse_basis_word(value, &gens, &letters)
            .map_err(|e| Error::Schema(format!("conjugation value for {key:?}: {e}")))?;
        if words.insert((conj.index, conj.negative, target.index), word).is_some() {
            return Err(Error::Schema(format!("conjugation key {key:?} given twice")));
        }
    }
    let pres = PolycyclicPresentation::new(labels, strata, moduli, &words)?;
    pres.check_consistency()?;
    PolycyclicGroup::new(gens, Arc::new(pres))
}

fn build_split(raw: &RawSplit) -> Result<GroupModel> {
    let gens = generating_set(&raw.generators)?;
    let normal = match raw.normal.as_ref() {
        RawSpec::Polycyclic(p) => build_polycyclic(p)?,
        _ => return Err(Error::Schema("N must be a polycyclic spec".into())),
    };
    let top = Arc::new(build(&raw.lambda)?);
    let pres = Arc::clone(normal.presentation());
    let top_gens = Arc::clone(top.generators());
    let normal_gens = Arc::clone(normal.generators());
    let mut images: Vec<Vec<Option<_>>> = vec![vec![None; pres.len()]; top_gens.len()];
    for (key, value) in &raw.action {
        let parts: Vec<&str> = key.split_whitespace().collect();
        let (j, p) = match parts[..] {
            [g, a] => (
                top_gens.index_of(g).ok_or_else(|| {
                    Error::Schema(format!("action key {key:?}: {g} is not a generator of Lambda"))
                })?,
                pres.index_of(a).ok_or_else(|| {
                    Error::Schema(format!("action key {key:?}: {a} is not a basis label of N"))
                })?,
            ),
            _ => {
                return Err(Error::Schema(format!(
                    "action key {key:?} must be \"<Lambda generator> <N basis label>\""
                )))
            }
        };
        let word = parse_basis_word(value, &normal_gens, normal.letters())
            .map_err(|e| Error::Schema(format!("action value for {key:?}: {e}")))?;
        images[j][p] = Some(pres.collector().word_normal_form(&word)?);
    }
    let mut actions: Vec<Automorphism> = Vec::with_capacity(top_gens.len());
    for (j, row) in images.into_iter().enumerate() {
        let mut auto = Vec::with_capacity(pres.len());
        for (p, image) in row.into_iter().enumerate() {
            auto.push(image.ok_or_else(|| {
                Error::PresentationInvalid(format!(
                    "action table has no entry for \"{} {}\"",
                    top_gens.label(j),
                    pres.labels()[p]
                ))
            })?);
        }
        actions.push(auto);
    }
    SplitExtension::new(gens, pres, normal_gens, normal.letters(), top, actions)
        .map(GroupModel::SplitExtension)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEIS: &str = r#"{
        "model": "matrix",
        "generators": [{"label": "x", "inverse_label": "X"}, {"label": "y", "inverse_label": "Y"}],
        "matrices": {
            "x": [["1","1","0"],["0","1","0"],["0","0","1"]],
            "y": [["1","0","0"],["0","1","1"],["0","0","1"]]
        }
    }"#;

    #[test]
    fn matrix_inverses_are_computed() {
        let s = parse_group_spec(HEIS).unwrap();
        assert_eq!(s.model.generators().len(), 4);
        assert!(s.graded.vacuous);
        assert_eq!(s.sha256.len(), 64);
    }

    #[test]
    fn wrong_declared_inverse_is_inconsistent() {
        let text = HEIS.replace(
            r#""y": [["1","0","0"],["0","1","1"],["0","0","1"]]"#,
            r#""y": [["1","0","0"],["0","1","1"],["0","0","1"]],
               "Y": [["1","0","0"],["0","1","1"],["0","0","1"]]"#,
        );
        assert!(matches!(parse_group_spec(&text), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_group_spec("{\n  \"model\": \"matrix\",,\n}") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_and_missing_fields_are_named() {
        let unknown = HEIS.replace("\"matrices\"", "\"colour\": 1, \"matrices\"");
        match parse_group_spec(&unknown) {
            Err(Error::Schema(m)) => assert!(m.contains("colour"), "{m}"),
            other => panic!("{other:?}"),
        }
        let missing = r#"{"model": "mod_p_extension", "generators": []}"#;
        match parse_group_spec(missing) {
            Err(Error::Schema(m)) => assert!(m.contains("`p`"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn polycyclic_missing_conjugation_entry() {
        let text = r#"{
            "model": "polycyclic",
            "generators": [{"label": "a", "inverse_label": "A"}, {"label": "b", "inverse_label": "B"}],
            "strata": [[0, 2]],
            "conjugation": {"a b": "b"}
        }"#;
        assert!(matches!(parse_group_spec(text), Err(Error::PresentationInvalid(_))));
    }

    #[test]
    fn incomplete_action_is_rejected() {
        let text = r#"{
            "model": "split_extension",
            "generators": [{"label": "a", "inverse_label": "A"}, {"label": "t", "inverse_label": "T"}],
            "N": {"model": "polycyclic", "generators": [{"label": "a", "inverse_label": "A"}], "strata": [[0, 1]]},
            "Lambda": {"model": "polycyclic", "generators": [{"label": "t", "inverse_label": "T"}], "strata": [[0, 1]]},
            "action": {"t a": "a"}
        }"#;
        assert!(matches!(parse_group_spec(text), Err(Error::PresentationInvalid(_))));
        let full = text.replace(r#"{"t a": "a"}"#, r#"{"t a": "a", "T a": "a"}"#);
        let s = parse_group_spec(&full).unwrap();
        assert!(s.graded.passed());
    }
}
