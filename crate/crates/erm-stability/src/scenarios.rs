//! Built-in scenario constructors for each regime the engines measure,
//! plus a loader for user-defined scenario documents.
//!
//! A scenario bundles a distribution and a hypothesis space with derived
//! metadata (risks, minimizer set, gap, disagreement masses). The metadata
//! is always recomputed from first principles at construction, never
//! trusted from the document.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::model::{
    Example, FiniteDistribution, Hypothesis, HypothesisSpace, Label, ModelError, RiskGap,
};
use crate::rational::{format_ratio, parse_ratio, rat};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}` (built-ins: two_constant(p), three_hyp_two_min, symmetric_n_min(n), unique_min(margin), irrelevant_feature)")]
    Unknown(String),
    #[error("bad scenario parameter: {0}")]
    BadParameter(String),
    #[error("scenario document parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Derived, recomputed metadata for a scenario.
#[derive(Debug, Clone)]
pub struct ScenarioMeta {
    pub risks: Vec<BigRational>,
    pub minimizers: Vec<usize>,
    pub gap: RiskGap,
    /// Pr(Z in Z_1 union Z_2) for |H*| = 2 — the disagreement mass p.
    pub disagreement_mass: Option<BigRational>,
    /// (Pr(Z_1), Pr(Z_2)) for |H*| = 2.
    pub z_split: Option<(BigRational, BigRational)>,
    /// Pairwise Pr(h_i(X) != h_j(X)) over minimizer pairs.
    pub pairwise_disagreement: Vec<(usize, usize, BigRational)>,
}

#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    name: String,
    space: HypothesisSpace,
    meta: ScenarioMeta,
}

impl ScenarioSpec {
    pub fn new(name: impl Into<String>, space: HypothesisSpace) -> Self {
        let meta = compute_meta(&space);
        ScenarioSpec {
            name: name.into(),
            space,
            meta,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn space(&self) -> &HypothesisSpace {
        &self.space
    }

    pub fn distribution(&self) -> &FiniteDistribution {
        self.space.distribution()
    }

    pub fn meta(&self) -> &ScenarioMeta {
        &self.meta
    }

    /// Serializable document mirroring the construction inputs.
    pub fn document(&self) -> ScenarioDocument {
        let input_space_size = self.space.hypotheses()[0].input_space();
        ScenarioDocument {
            name: self.name.clone(),
            input_space_size,
            atoms: self
                .space
                .distribution()
                .atoms()
                .iter()
                .map(|(example, weight)| AtomDocument {
                    x: example.x_id,
                    y: example.y.sign(),
                    weight: WeightDocument::Fraction(format_ratio(weight)),
                })
                .collect(),
            hypotheses: self
                .space
                .hypotheses()
                .iter()
                .map(|h| HypothesisDocument {
                    name: h.name().to_string(),
                    labels: h.labels().iter().map(|l| l.sign()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.document()).expect("document serializes")
    }
}

fn compute_meta(space: &HypothesisSpace) -> ScenarioMeta {
    let (minimizers, gap) = space.minimizers();
    let minimizers = minimizers.to_vec();
    let gap = gap.clone();
    let pairwise_disagreement = space.minimizer_disagreement().to_vec();
    let (disagreement_mass, z_split) = if minimizers.len() == 2 {
        let h1 = space.hypothesis(minimizers[0]);
        let h2 = space.hypothesis(minimizers[1]);
        let mut z1 = BigRational::zero();
        let mut z2 = BigRational::zero();
        for (example, weight) in space.distribution().atoms() {
            let l1 = h1.loss(example).expect("validated");
            let l2 = h2.loss(example).expect("validated");
            if l1 < l2 {
                z1 += weight;
            } else if l2 < l1 {
                z2 += weight;
            }
        }
        (Some(&z1 + &z2), Some((z1, z2)))
    } else {
        (None, None)
    };
    ScenarioMeta {
        risks: space.risks().to_vec(),
        minimizers,
        gap,
        disagreement_mass,
        z_split,
        pairwise_disagreement,
    }
}

fn example(x: usize, sign: i8) -> Example {
    Example::new(x, Label::from_sign(sign).expect("literal sign"))
}

/// Two constant classifiers over a single input point with Pr(Y = +1) = p;
/// H = [h_plus, h_minus] in that tie order. Zero-weight atoms are dropped.
pub fn two_constant(p: &BigRational) -> Result<ScenarioSpec, ScenarioError> {
    if p < &BigRational::zero() || p > &BigRational::one() {
        return Err(ScenarioError::BadParameter(format!(
            "two_constant needs p in [0, 1], got {}",
            format_ratio(p)
        )));
    }
    let mut atoms = Vec::new();
    if !p.is_zero() {
        atoms.push((example(0, 1), p.clone()));
    }
    let q = BigRational::one() - p;
    if !q.is_zero() {
        atoms.push((example(0, -1), q));
    }
    let space = HypothesisSpace::new(
        vec![
            Hypothesis::from_signs("h_plus", &[1])?,
            Hypothesis::from_signs("h_minus", &[-1])?,
        ],
        FiniteDistribution::new(atoms)?,
    )?;
    Ok(ScenarioSpec::new(
        format!("two_constant({})", format_ratio(p)),
        space,
    ))
}

/// Three hypotheses over X = {x1, x2} with exactly two risk minimizers:
/// atoms (x1,+1) 1/4, (x1,-1) 1/4, (x2,-1) 1/2 and H = [h_a, h_b, h_c]
/// with labels (+,-), (-,-), (+,+). Risks are (1/4, 1/4, 3/4), so
/// H* = {h_a, h_b} with gap 1/2 and the pair disagrees exactly on x1.
/// All quantities are dyadic and the gap is large, letting the
/// minimizer-escape bound engage at small m.
pub fn three_hyp_two_min() -> ScenarioSpec {
    let dist = FiniteDistribution::new(vec![
        (example(0, 1), rat(1, 4)),
        (example(0, -1), rat(1, 4)),
        (example(1, -1), rat(1, 2)),
    ])
    .expect("fixed atoms are valid");
    let space = HypothesisSpace::new(
        vec![
            Hypothesis::from_signs("h_a", &[1, -1]).expect("signs"),
            Hypothesis::from_signs("h_b", &[-1, -1]).expect("signs"),
            Hypothesis::from_signs("h_c", &[1, 1]).expect("signs"),
        ],
        dist,
    )
    .expect("fixed space is valid");
    ScenarioSpec::new("three_hyp_two_min", space)
}

/// n hypotheses, all risk minimizers: X uniform over n points, the label a
/// fair coin independent of X, and h_i = +1 exactly on x_i. Every risk is
/// 1/2 and p_{jk} = 2/n.
pub fn symmetric_n_min(n: usize) -> Result<ScenarioSpec, ScenarioError> {
    if n < 2 {
        return Err(ScenarioError::BadParameter(format!(
            "symmetric_n_min needs n >= 2, got {n}"
        )));
    }
    let weight = BigRational::new(BigInt::one(), BigInt::from(2 * n));
    let mut atoms = Vec::with_capacity(2 * n);
    for x in 0..n {
        atoms.push((example(x, 1), weight.clone()));
        atoms.push((example(x, -1), weight.clone()));
    }
    let hypotheses = (0..n)
        .map(|i| {
            let signs: Vec<i8> = (0..n).map(|x| if x == i { 1 } else { -1 }).collect();
            Hypothesis::from_signs(format!("h_{}", i + 1), &signs)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let space = HypothesisSpace::new(hypotheses, FiniteDistribution::new(atoms)?)?;
    Ok(ScenarioSpec::new(format!("symmetric_n_min({n})"), space))
}

/// Unique risk minimizer with risk gap 2*margin: the two-constant scenario
/// at p = 1/2 + margin, re-badged with the gap made explicit in the name.
pub fn unique_min(margin: &BigRational) -> Result<ScenarioSpec, ScenarioError> {
    if margin <= &BigRational::zero() || margin >= &rat(1, 2) {
        return Err(ScenarioError::BadParameter(format!(
            "unique_min needs margin in (0, 1/2), got {}",
            format_ratio(margin)
        )));
    }
    let p = rat(1, 2) + margin;
    let base = two_constant(&p)?;
    let scenario = ScenarioSpec::new(format!("unique_min({})", format_ratio(margin)), base.space);
    debug_assert_eq!(scenario.meta.minimizers.len(), 1);
    debug_assert_eq!(
        scenario.meta.gap,
        RiskGap::Gap(margin * BigRational::from_integer(2.into()))
    );
    Ok(scenario)
}

/// Feature-selection motivation: X = {0,1}^2 uniform, the label is the
/// first bit, and both hypotheses read only the irrelevant second bit
/// (one as-is, one negated). Both risks are exactly 1/2 — a symmetric
/// class with positive minimum risk — and the pair disagrees everywhere.
/// Input ids encode (b1, b2) as 2*b1 + b2.
pub fn irrelevant_feature() -> ScenarioSpec {
    let quarter = rat(1, 4);
    let label_of = |x: usize| if x >= 2 { 1 } else { -1 };
    let atoms = (0..4usize)
        .map(|x| (example(x, label_of(x)), quarter.clone()))
        .collect();
    // h_bit2 labels by the second bit; h_negbit2 is its complement.
    let bit2_signs: Vec<i8> = (0..4).map(|x| if x & 1 == 1 { 1 } else { -1 }).collect();
    let neg_signs: Vec<i8> = bit2_signs.iter().map(|s| -s).collect();
    let space = HypothesisSpace::new(
        vec![
            Hypothesis::from_signs("h_bit2", &bit2_signs).expect("signs"),
            Hypothesis::from_signs("h_negbit2", &neg_signs).expect("signs"),
        ],
        FiniteDistribution::new(atoms).expect("fixed atoms are valid"),
    )
    .expect("fixed space is valid");
    ScenarioSpec::new("irrelevant_feature", space)
}

/// Parses a builtin reference: `name`, `name(arg)`, or `name:arg`, with the
/// argument a fraction string where the scenario takes one.
pub fn from_spec_string(spec: &str) -> Result<ScenarioSpec, ScenarioError> {
    let spec = spec.trim();
    let (name, arg) = if let Some(open) = spec.find('(') {
        let close = spec
            .rfind(')')
            .ok_or_else(|| ScenarioError::BadParameter(format!("unclosed `(` in `{spec}`")))?;
        (&spec[..open], Some(spec[open + 1..close].trim()))
    } else if let Some((name, arg)) = spec.split_once(':') {
        (name, Some(arg.trim()))
    } else {
        (spec, None)
    };
    let parse_arg = |what: &str| -> Result<BigRational, ScenarioError> {
        let raw = arg.ok_or_else(|| {
            ScenarioError::BadParameter(format!("{name} needs a {what} argument"))
        })?;
        parse_ratio(raw).map_err(|e| ScenarioError::BadParameter(e.to_string()))
    };
    match name {
        "two_constant" => two_constant(&parse_arg("probability")?),
        "unique_min" => unique_min(&parse_arg("margin")?),
        "symmetric_n_min" => {
            let n = parse_arg("count")?;
            if !n.is_integer() {
                return Err(ScenarioError::BadParameter(format!(
                    "symmetric_n_min needs an integer, got {}",
                    format_ratio(&n)
                )));
            }
            use num_traits::ToPrimitive;
            let n = n
                .to_integer()
                .to_usize()
                .ok_or_else(|| ScenarioError::BadParameter("n out of range".into()))?;
            symmetric_n_min(n)
        }
        "three_hyp_two_min" => Ok(three_hyp_two_min()),
        "irrelevant_feature" => Ok(irrelevant_feature()),
        other => Err(ScenarioError::Unknown(other.to_string())),
    }
}

/// All built-in scenarios used by default sweeps and the verification
/// suite, with representative parameters.
pub fn builtin_suite() -> Vec<ScenarioSpec> {
    vec![
        two_constant(&rat(1, 2)).expect("valid"),
        two_constant(&rat(7, 10)).expect("valid"),
        three_hyp_two_min(),
        symmetric_n_min(3).expect("valid"),
        unique_min(&rat(1, 5)).expect("valid"),
        irrelevant_feature(),
    ]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightDocument {
    Fraction(String),
    Float(f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomDocument {
    pub x: usize,
    pub y: i8,
    pub weight: WeightDocument,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisDocument {
    pub name: String,
    pub labels: Vec<i8>,
}

/// On-disk scenario description; weights are fraction strings like "1/4"
/// (floats are accepted and converted exactly).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDocument {
    pub name: String,
    pub input_space_size: usize,
    pub atoms: Vec<AtomDocument>,
    pub hypotheses: Vec<HypothesisDocument>,
}

/// Validates a scenario document and rebuilds all metadata from scratch.
pub fn load_scenario(json: &str) -> Result<ScenarioSpec, ScenarioError> {
    let doc: ScenarioDocument =
        serde_json::from_str(json).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    scenario_from_document(&doc)
}

pub fn scenario_from_document(doc: &ScenarioDocument) -> Result<ScenarioSpec, ScenarioError> {
    let mut atoms = Vec::with_capacity(doc.atoms.len());
    for atom in &doc.atoms {
        if atom.x >= doc.input_space_size {
            return Err(ScenarioError::Model(ModelError::InvalidExample {
                x_id: atom.x,
                input_space: doc.input_space_size,
            }));
        }
        let weight = match &atom.weight {
            WeightDocument::Fraction(s) => {
                parse_ratio(s).map_err(|e| ScenarioError::Parse(e.to_string()))?
            }
            WeightDocument::Float(f) => BigRational::from_float(*f).ok_or_else(|| {
                ScenarioError::Parse(format!("weight {f} is not a finite number"))
            })?,
        };
        atoms.push((Example::new(atom.x, Label::from_sign(atom.y)?), weight));
    }
    let mut hypotheses = Vec::with_capacity(doc.hypotheses.len());
    for h in &doc.hypotheses {
        if h.labels.len() != doc.input_space_size {
            return Err(ScenarioError::Model(ModelError::LabelLength {
                name: h.name.clone(),
                expected: doc.input_space_size,
                got: h.labels.len(),
            }));
        }
        hypotheses.push(Hypothesis::from_signs(h.name.clone(), &h.labels)?);
    }
    let space = HypothesisSpace::new(hypotheses, FiniteDistribution::new(atoms)?)?;
    Ok(ScenarioSpec::new(doc.name.clone(), space))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::risk;
    use crate::rational::ratio_to_f64;

    #[test]
    fn two_constant_metadata() {
        let s = two_constant(&rat(1, 2)).unwrap();
        assert_eq!(s.meta().minimizers, vec![0, 1]);
        assert_eq!(s.meta().gap, RiskGap::NoGap);
        assert_eq!(s.meta().disagreement_mass, Some(rat(1, 1)));

        let s = two_constant(&rat(7, 10)).unwrap();
        assert_eq!(s.meta().minimizers, vec![0]);
        assert_eq!(s.meta().gap, RiskGap::Gap(rat(2, 5)));

        let s = two_constant(&rat(0, 1)).unwrap();
        assert_eq!(s.meta().minimizers, vec![1]);

        assert!(two_constant(&rat(3, 2)).is_err());
    }

    #[test]
    fn three_hyp_metadata() {
        let s = three_hyp_two_min();
        assert_eq!(
            s.meta().risks,
            vec![rat(1, 4), rat(1, 4), rat(3, 4)]
        );
        assert_eq!(s.meta().minimizers, vec![0, 1]);
        assert_eq!(s.meta().gap, RiskGap::Gap(rat(1, 2)));
        assert_eq!(s.meta().disagreement_mass, Some(rat(1, 2)));
        assert_eq!(s.meta().z_split, Some((rat(1, 4), rat(1, 4))));
        assert_eq!(s.meta().pairwise_disagreement, vec![(0, 1, rat(1, 2))]);
    }

    #[test]
    fn symmetric_metadata() {
        let s = symmetric_n_min(3).unwrap();
        for r in &s.meta().risks {
            assert_eq!(r, &rat(1, 2));
        }
        assert_eq!(s.meta().minimizers, vec![0, 1, 2]);
        assert_eq!(s.meta().gap, RiskGap::NoGap);
        for (_, _, p) in &s.meta().pairwise_disagreement {
            assert_eq!(p, &rat(2, 3));
        }
        let s = symmetric_n_min(2).unwrap();
        assert_eq!(s.meta().pairwise_disagreement, vec![(0, 1, rat(1, 1))]);
        assert!(symmetric_n_min(1).is_err());
    }

    #[test]
    fn unique_min_metadata() {
        let s = unique_min(&rat(1, 5)).unwrap();
        assert_eq!(s.meta().minimizers, vec![0]);
        assert_eq!(s.meta().gap, RiskGap::Gap(rat(2, 5)));
        assert!(unique_min(&rat(0, 1)).is_err());
        assert!(unique_min(&rat(1, 2)).is_err());
    }

    #[test]
    fn irrelevant_feature_metadata() {
        let s = irrelevant_feature();
        assert_eq!(s.meta().risks, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(s.meta().minimizers, vec![0, 1]);
        assert_eq!(s.meta().disagreement_mass, Some(rat(1, 1)));
        assert_eq!(s.meta().z_split, Some((rat(1, 2), rat(1, 2))));
    }

    #[test]
    fn metadata_matches_recomputation() {
        for scenario in builtin_suite() {
            let space = scenario.space();
            for (j, h) in space.hypotheses().iter().enumerate() {
                assert_eq!(
                    &risk(h, space.distribution()).unwrap(),
                    &scenario.meta().risks[j]
                );
            }
            // Equal-risk identity and the p^2/2 mismatch mass for pairs.
            if let Some((z1, z2)) = &scenario.meta().z_split {
                assert_eq!(z1, z2);
                let p = scenario.meta().disagreement_mass.clone().unwrap();
                let mismatch =
                    BigRational::from_integer(2.into()) * z1 * z2;
                assert_eq!(mismatch, &p * &p / BigRational::from_integer(2.into()));
            }
        }
    }

    #[test]
    fn spec_string_forms() {
        assert_eq!(
            from_spec_string("two_constant(1/2)").unwrap().name(),
            "two_constant(1/2)"
        );
        assert_eq!(
            from_spec_string("two_constant:0.5").unwrap().name(),
            "two_constant(1/2)"
        );
        assert_eq!(
            from_spec_string("symmetric_n_min(3)").unwrap().name(),
            "symmetric_n_min(3)"
        );
        assert!(from_spec_string("nope").is_err());
        assert!(from_spec_string("two_constant").is_err());
        assert!(from_spec_string("symmetric_n_min(2/3)").is_err());
    }

    #[test]
    fn document_roundtrip_all_builtins() {
        for scenario in builtin_suite() {
            let json = scenario.to_json();
            let reloaded = load_scenario(&json).unwrap();
            assert_eq!(reloaded.name(), scenario.name());
            assert_eq!(reloaded.meta().risks, scenario.meta().risks);
            assert_eq!(reloaded.meta().minimizers, scenario.meta().minimizers);
            assert_eq!(reloaded.meta().gap, scenario.meta().gap);
        }
    }

    #[test]
    fn loader_rejections() {
        // Negative weight.
        let bad = r#"{"name":"bad","input_space_size":1,
            "atoms":[{"x":0,"y":1,"weight":"3/2"},{"x":0,"y":-1,"weight":"-1/2"}],
            "hypotheses":[{"name":"h","labels":[1]}]}"#;
        assert!(matches!(
            load_scenario(bad),
            Err(ScenarioError::Model(ModelError::NonPositiveWeight { .. }))
        ));
        // Weight sum violation.
        let bad = r#"{"name":"bad","input_space_size":1,
            "atoms":[{"x":0,"y":1,"weight":"1/2"},{"x":0,"y":-1,"weight":"1/4"}],
            "hypotheses":[{"name":"h","labels":[1]}]}"#;
        assert!(matches!(
            load_scenario(bad),
            Err(ScenarioError::Model(ModelError::WeightSum { .. }))
        ));
        // Duplicate atoms.
        let bad = r#"{"name":"bad","input_space_size":1,
            "atoms":[{"x":0,"y":1,"weight":"1/2"},{"x":0,"y":1,"weight":"1/2"}],
            "hypotheses":[{"name":"h","labels":[1]}]}"#;
        assert!(matches!(
            load_scenario(bad),
            Err(ScenarioError::Model(ModelError::DuplicateAtom { .. }))
        ));
        // Hypotheses equal on the support.
        let bad = r#"{"name":"bad","input_space_size":2,
            "atoms":[{"x":0,"y":1,"weight":"1/2"},{"x":0,"y":-1,"weight":"1/2"}],
            "hypotheses":[{"name":"u","labels":[1,1]},{"name":"v","labels":[1,-1]}]}"#;
        let err = load_scenario(bad).unwrap_err();
        assert!(err.to_string().contains("positive-probability"));
    }

    #[test]
    fn float_weights_accepted() {
        let doc = r#"{"name":"floaty","input_space_size":1,
            "atoms":[{"x":0,"y":1,"weight":0.25},{"x":0,"y":-1,"weight":0.75}],
            "hypotheses":[{"name":"h","labels":[1]}]}"#;
        let s = load_scenario(doc).unwrap();
        assert!((ratio_to_f64(&s.meta().risks[0]) - 0.75).abs() < 1e-15);
    }
}
