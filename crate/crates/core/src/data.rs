//! Core data types shared by every stage of the pipeline: datasets and
//! their schemas, label sets, categorical encodings, and model /
//! ensemble descriptors.
//!
//! Everything here is an immutable value type after construction;
//! transforming operations return new values.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("duplicate column name `{0}` in schema")]
    DuplicateColumn(String),
    #[error("label column `{0}` does not name a schema column")]
    UnknownLabelColumn(String),
    #[error("row {row} has {got} cells, schema has {expected} columns")]
    RowArity { row: usize, got: usize, expected: usize },
    #[error("row {row}, column `{column}`: non-finite numeric value {value}")]
    NonFiniteCell { row: usize, column: String, value: f64 },
    #[error("row {row}, column `{column}`: expected a numeric cell")]
    KindMismatch { row: usize, column: String },
    #[error("duplicate label `{0}` in label set")]
    DuplicateLabel(String),
    #[error("label set must not be empty")]
    EmptyLabelSet,
    #[error("unknown attack type `{0}`")]
    UnknownAttackType(String),
    #[error("ensemble spec must have at least one member")]
    NoMembers,
    #[error("ensemble spec has {members} members but {weights} weights")]
    WeightArity { members: usize, weights: usize },
    #[error("ensemble weights must be non-negative, got {0}")]
    NegativeWeight(f64),
    #[error("ensemble spec needs at least one positive weight")]
    AllWeightsZero,
    #[error("unknown model kind `{0}` (expected cart, rf, knn, or nb)")]
    UnknownModelKind(String),
    #[error("unknown preset `{0}` (expected dt-rf-knn-nb, dt-rf-nb, or dt-rf-knn)")]
    UnknownPreset(String),
}

/// Whether a column holds real-valued measurements or discrete tokens
/// (e.g. a door state of `ON` / `OFF`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureKind {
    Numeric,
    Categorical,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub kind: FeatureKind,
}

/// Ordered column layout of a dataset plus the names of its label
/// columns. A label column is "present" only when its name actually
/// appears among `columns`; prediction inputs may carry neither.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<Column>,
    pub binary_label_column: Option<String>,
    pub type_label_column: Option<String>,
}

impl Schema {
    pub fn new(
        columns: Vec<Column>,
        binary_label_column: Option<String>,
        type_label_column: Option<String>,
    ) -> Result<Self, DataError> {
        let schema = Schema { columns, binary_label_column, type_label_column };
        schema.validate()?;
        Ok(schema)
    }

    pub fn validate(&self) -> Result<(), DataError> {
        let mut seen = HashMap::new();
        for c in &self.columns {
            if seen.insert(c.name.as_str(), ()).is_some() {
                return Err(DataError::DuplicateColumn(c.name.clone()));
            }
        }
        for label in [&self.binary_label_column, &self.type_label_column].into_iter().flatten() {
            if !seen.contains_key(label.as_str()) {
                return Err(DataError::UnknownLabelColumn(label.clone()));
            }
        }
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn is_label_column(&self, name: &str) -> bool {
        self.binary_label_column.as_deref() == Some(name)
            || self.type_label_column.as_deref() == Some(name)
    }

    /// Indices of non-label columns, in schema order.
    pub fn feature_indices(&self) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| !self.is_label_column(&c.name))
            .map(|(i, _)| i)
            .collect()
    }
}

/// One cell of a dataset. Missingness is an explicit state; it is never
/// smuggled through a sentinel number.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Number(f64),
    Token(String),
    Missing,
}

impl Cell {
    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            Cell::Number(x) => Some(*x),
            _ => None,
        }
    }

    /// Display string used for CSV output, stratification keys, and
    /// stats. Numbers use Rust's shortest round-trip formatting.
    pub fn display_string(&self) -> String {
        match self {
            Cell::Number(x) => format!("{x}"),
            Cell::Token(t) => t.clone(),
            Cell::Missing => String::new(),
        }
    }
}

/// An in-memory table of telemetry records.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub schema: Schema,
    pub rows: Vec<Vec<Cell>>,
}

impl Dataset {
    pub fn new(schema: Schema, rows: Vec<Vec<Cell>>) -> Result<Self, DataError> {
        let ds = Dataset { schema, rows };
        ds.validate()?;
        Ok(ds)
    }

    /// Check the structural invariants: every row has one cell per
    /// column, numeric cells are finite, and numeric columns never hold
    /// tokens. Run after every transforming operation.
    pub fn validate(&self) -> Result<(), DataError> {
        self.schema.validate()?;
        let width = self.schema.columns.len();
        for (r, row) in self.rows.iter().enumerate() {
            if row.len() != width {
                return Err(DataError::RowArity { row: r + 1, got: row.len(), expected: width });
            }
            for (c, cell) in row.iter().enumerate() {
                match (self.schema.columns[c].kind, cell) {
                    (_, Cell::Missing) => {}
                    (FeatureKind::Numeric, Cell::Number(x)) => {
                        if !x.is_finite() {
                            return Err(DataError::NonFiniteCell {
                                row: r + 1,
                                column: self.schema.columns[c].name.clone(),
                                value: *x,
                            });
                        }
                    }
                    (FeatureKind::Numeric, Cell::Token(_)) => {
                        return Err(DataError::KindMismatch {
                            row: r + 1,
                            column: self.schema.columns[c].name.clone(),
                        });
                    }
                    (FeatureKind::Categorical, _) => {}
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.columns.len()
    }

    pub fn column_cells(&self, col: usize) -> impl Iterator<Item = &Cell> {
        self.rows.iter().map(move |r| &r[col])
    }
}

/// Ordered set of distinct class labels; positions are the label
/// indices used throughout the classifiers and voting machinery.
/// Serializes as a plain array of labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct LabelSet {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl TryFrom<Vec<String>> for LabelSet {
    type Error = DataError;

    fn try_from(labels: Vec<String>) -> Result<Self, DataError> {
        LabelSet::new(labels)
    }
}

impl From<LabelSet> for Vec<String> {
    fn from(set: LabelSet) -> Vec<String> {
        set.labels
    }
}

impl LabelSet {
    pub fn new<I, S>(labels: I) -> Result<Self, DataError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(DataError::EmptyLabelSet);
        }
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(DataError::DuplicateLabel(l.clone()));
            }
        }
        Ok(LabelSet { labels, index })
    }

    /// The two-label set used by the normal-vs-attack task.
    pub fn binary() -> Self {
        LabelSet::new(["0", "1"]).expect("static labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn label(&self, idx: usize) -> Option<&str> {
        self.labels.get(idx).map(String::as_str)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// The multi-class label vocabulary: normal traffic first, then the
/// seven attack types in their documented order.
pub const ATTACK_LABELS: [&str; 8] =
    ["normal", "password", "scanning", "xss", "ddos", "ransomware", "injection", "backdoor"];

/// Canonical 8-label set for the multi-class task.
pub fn canonical_attack_labels() -> LabelSet {
    LabelSet::new(ATTACK_LABELS).expect("canonical labels are distinct")
}

/// Normalize a raw attack-type string before matching the canonical
/// set. Source files mix spellings ("DDos", "Ransomeware"), so matching
/// is case-insensitive and tolerates the known misspelling.
pub fn normalize_type_label(raw: &str) -> String {
    let s = raw.trim().to_lowercase();
    if s == "ransomeware" {
        "ransomware".to_string()
    } else {
        s
    }
}

/// Map a normalized attack-type string to its canonical index; unknown
/// types are an error, never silently dropped.
pub fn canonical_attack_index(raw: &str) -> Result<usize, DataError> {
    let norm = normalize_type_label(raw);
    ATTACK_LABELS
        .iter()
        .position(|l| *l == norm)
        .ok_or(DataError::UnknownAttackType(raw.to_string()))
}

/// Per-column categorical encoding: token -> contiguous integer code in
/// first-seen order. Tokens unseen at fit time map to the reserved code
/// `tokens.len()` at apply time. Serializes as the ordered token array.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<String>", into = "Vec<String>")]
pub struct ColumnEncoding {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

impl From<Vec<String>> for ColumnEncoding {
    fn from(tokens: Vec<String>) -> Self {
        let index = tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        ColumnEncoding { tokens, index }
    }
}

impl From<ColumnEncoding> for Vec<String> {
    fn from(enc: ColumnEncoding) -> Vec<String> {
        enc.tokens
    }
}

impl ColumnEncoding {
    pub fn new() -> Self {
        ColumnEncoding::default()
    }

    pub fn code_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn insert(&mut self, token: &str) -> usize {
        match self.code_of(token) {
            Some(c) => c,
            None => {
                let code = self.tokens.len();
                self.tokens.push(token.to_string());
                self.index.insert(token.to_string(), code);
                code
            }
        }
    }

    pub fn token_of(&self, code: usize) -> Option<&str> {
        self.tokens.get(code).map(String::as_str)
    }

    /// Code assigned to tokens not seen at fit time.
    pub fn unseen_code(&self) -> usize {
        self.tokens.len()
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Fitted categorical encodings for every column that was encoded,
/// keyed by column name. Ordered map so reports and params files
/// serialize deterministically.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingMap {
    pub columns: std::collections::BTreeMap<String, ColumnEncoding>,
}

impl EncodingMap {
    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

/// The four base learner kinds the ensemble combines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Cart,
    RandomForest,
    Knn,
    GaussianNb,
}

impl ModelKind {
    pub fn parse(s: &str) -> Result<Self, DataError> {
        match s.trim().to_lowercase().as_str() {
            "cart" | "dt" => Ok(ModelKind::Cart),
            "rf" | "forest" => Ok(ModelKind::RandomForest),
            "knn" => Ok(ModelKind::Knn),
            "nb" | "gnb" => Ok(ModelKind::GaussianNb),
            other => Err(DataError::UnknownModelKind(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Cart => "cart",
            ModelKind::RandomForest => "rf",
            ModelKind::Knn => "knn",
            ModelKind::GaussianNb => "nb",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// CART hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CartParams {
    pub max_depth: usize,
    pub min_leaf_samples: usize,
    pub min_impurity_decrease: f64,
}

impl Default for CartParams {
    fn default() -> Self {
        CartParams { max_depth: 12, min_leaf_samples: 2, min_impurity_decrease: 0.0 }
    }
}

/// Random forest hyperparameters. `features_per_split: None` means
/// floor(sqrt(p)) at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub n_trees: usize,
    pub tree: CartParams,
    pub features_per_split: Option<usize>,
    pub bootstrap: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams {
            n_trees: 100,
            tree: CartParams::default(),
            features_per_split: None,
            bootstrap: true,
        }
    }
}

/// k-nearest-neighbors hyperparameters (exact Euclidean distance).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnParams {
    pub k: usize,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 5 }
    }
}

/// Gaussian naive Bayes hyperparameters. The variance floor is
/// `var_smoothing_fraction` times the largest per-feature variance of
/// the training data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbParams {
    pub var_smoothing_fraction: f64,
}

impl Default for GnbParams {
    fn default() -> Self {
        GnbParams { var_smoothing_fraction: 1e-9 }
    }
}

/// One ensemble member: kind plus its hyperparameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Cart(CartParams),
    Forest(ForestParams),
    Knn(KnnParams),
    Gnb(GnbParams),
}

impl ModelParams {
    pub fn kind(&self) -> ModelKind {
        match self {
            ModelParams::Cart(_) => ModelKind::Cart,
            ModelParams::Forest(_) => ModelKind::RandomForest,
            ModelParams::Knn(_) => ModelKind::Knn,
            ModelParams::Gnb(_) => ModelKind::GaussianNb,
        }
    }

    pub fn default_for(kind: ModelKind) -> Self {
        match kind {
            ModelKind::Cart => ModelParams::Cart(CartParams::default()),
            ModelKind::RandomForest => ModelParams::Forest(ForestParams::default()),
            ModelKind::Knn => ModelParams::Knn(KnnParams::default()),
            ModelKind::GaussianNb => ModelParams::Gnb(GnbParams::default()),
        }
    }
}

/// How member outputs are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Voting {
    /// Each member casts one label; weighted plurality wins.
    Hard,
    /// Members cast distributions; argmax of the weighted average wins.
    Soft,
}

impl Voting {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_lowercase().as_str() {
            "hard" => Some(Voting::Hard),
            "soft" => Some(Voting::Soft),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Voting::Hard => "hard",
            Voting::Soft => "soft",
        }
    }
}

/// The published member combinations, all with uniform weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    DtRfKnnNb,
    DtRfNb,
    DtRfKnn,
}

impl Preset {
    pub const ALL: [Preset; 3] = [Preset::DtRfKnnNb, Preset::DtRfNb, Preset::DtRfKnn];

    pub fn parse(s: &str) -> Result<Self, DataError> {
        match s.trim().to_lowercase().as_str() {
            "dt-rf-knn-nb" => Ok(Preset::DtRfKnnNb),
            "dt-rf-nb" => Ok(Preset::DtRfNb),
            "dt-rf-knn" => Ok(Preset::DtRfKnn),
            other => Err(DataError::UnknownPreset(other.to_string())),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Preset::DtRfKnnNb => "dt-rf-knn-nb",
            Preset::DtRfNb => "dt-rf-nb",
            Preset::DtRfKnn => "dt-rf-knn",
        }
    }

    pub fn member_kinds(&self) -> Vec<ModelKind> {
        match self {
            Preset::DtRfKnnNb => vec![
                ModelKind::Cart,
                ModelKind::RandomForest,
                ModelKind::Knn,
                ModelKind::GaussianNb,
            ],
            Preset::DtRfNb => {
                vec![ModelKind::Cart, ModelKind::RandomForest, ModelKind::GaussianNb]
            }
            Preset::DtRfKnn => vec![ModelKind::Cart, ModelKind::RandomForest, ModelKind::Knn],
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Member list, per-member weights, and voting mode of an ensemble.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub members: Vec<ModelParams>,
    pub weights: Vec<f64>,
    pub voting: Voting,
    /// Preset name when the spec came from one; kept for reporting.
    pub preset: Option<Preset>,
}

impl EnsembleSpec {
    pub fn new(
        members: Vec<ModelParams>,
        weights: Vec<f64>,
        voting: Voting,
    ) -> Result<Self, DataError> {
        let spec = EnsembleSpec { members, weights, voting, preset: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Uniform-weight spec from default member parameters.
    pub fn from_kinds(kinds: &[ModelKind], voting: Voting) -> Result<Self, DataError> {
        let members: Vec<ModelParams> =
            kinds.iter().map(|k| ModelParams::default_for(*k)).collect();
        let weights = vec![1.0; members.len()];
        EnsembleSpec::new(members, weights, voting)
    }

    /// One of the three published combinations, uniform weights.
    pub fn preset(preset: Preset, voting: Voting) -> Self {
        let mut spec = EnsembleSpec::from_kinds(&preset.member_kinds(), voting)
            .expect("presets are non-empty");
        spec.preset = Some(preset);
        spec
    }

    /// Single-member spec; the ensemble degenerates to that member.
    pub fn single(params: ModelParams, voting: Voting) -> Self {
        EnsembleSpec::new(vec![params], vec![1.0], voting).expect("one member is valid")
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.members.is_empty() {
            return Err(DataError::NoMembers);
        }
        if self.members.len() != self.weights.len() {
            return Err(DataError::WeightArity {
                members: self.members.len(),
                weights: self.weights.len(),
            });
        }
        if let Some(w) = self.weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(DataError::NegativeWeight(*w));
        }
        if !self.weights.iter().any(|w| *w > 0.0) {
            return Err(DataError::AllWeightsZero);
        }
        Ok(())
    }

    pub fn member_kinds(&self) -> Vec<ModelKind> {
        self.members.iter().map(ModelParams::kind).collect()
    }

    /// Identifier used in reports: the preset name, or the member kinds
    /// joined with `-` for ad-hoc specs.
    pub fn id(&self) -> String {
        match self.preset {
            Some(p) => p.as_str().to_string(),
            None => self.member_kinds().iter().map(|k| k.as_str()).collect::<Vec<_>>().join("-"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_labels_order_and_indices() {
        let set = canonical_attack_labels();
        assert_eq!(
            set.labels(),
            [
                "normal",
                "password",
                "scanning",
                "xss",
                "ddos",
                "ransomware",
                "injection",
                "backdoor"
            ]
        );
        assert_eq!(set.index_of("normal"), Some(0));
        assert_eq!(set.index_of("backdoor"), Some(7));
        assert_eq!(set.len(), 8);
    }

    #[test]
    fn type_label_normalization() {
        assert_eq!(normalize_type_label(" DDos "), "ddos");
        assert_eq!(normalize_type_label("Ransomeware"), "ransomware");
        assert_eq!(canonical_attack_index("XSS").unwrap(), 3);
        assert!(matches!(canonical_attack_index("flooding"), Err(DataError::UnknownAttackType(_))));
    }

    #[test]
    fn schema_rejects_duplicates_and_unknown_labels() {
        let cols = vec![
            Column { name: "a".into(), kind: FeatureKind::Numeric },
            Column { name: "a".into(), kind: FeatureKind::Numeric },
        ];
        assert!(matches!(Schema::new(cols, None, None), Err(DataError::DuplicateColumn(_))));

        let cols = vec![Column { name: "a".into(), kind: FeatureKind::Numeric }];
        assert!(matches!(
            Schema::new(cols, Some("label".into()), None),
            Err(DataError::UnknownLabelColumn(_))
        ));
    }

    #[test]
    fn dataset_validation_catches_arity_and_nan() {
        let schema =
            Schema::new(vec![Column { name: "x".into(), kind: FeatureKind::Numeric }], None, None)
                .unwrap();
        let bad_arity = Dataset::new(schema.clone(), vec![vec![]]);
        assert!(matches!(bad_arity, Err(DataError::RowArity { row: 1, .. })));

        let bad_nan = Dataset::new(schema, vec![vec![Cell::Number(f64::NAN)]]);
        assert!(matches!(bad_nan, Err(DataError::NonFiniteCell { .. })));
    }

    #[test]
    fn encoding_codes_are_first_seen_contiguous() {
        let mut enc = ColumnEncoding::new();
        assert_eq!(enc.insert("OFF"), 0);
        assert_eq!(enc.insert("ON"), 1);
        assert_eq!(enc.insert("OFF"), 0);
        assert_eq!(enc.unseen_code(), 2);
        assert_eq!(enc.token_of(1), Some("ON"));
    }

    #[test]
    fn presets_contain_exactly_their_named_kinds() {
        for preset in Preset::ALL {
            let spec = EnsembleSpec::preset(preset, Voting::Hard);
            assert_eq!(spec.member_kinds(), preset.member_kinds());
            assert!(spec.weights.iter().all(|w| *w == 1.0));
            assert_eq!(spec.id(), preset.as_str());
        }
        assert_eq!(Preset::parse("dt-rf-knn-nb").unwrap().member_kinds().len(), 4);
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(
            EnsembleSpec::new(vec![], vec![], Voting::Hard),
            Err(DataError::NoMembers)
        ));
        let m = vec![ModelParams::default_for(ModelKind::Cart)];
        assert!(matches!(
            EnsembleSpec::new(m.clone(), vec![1.0, 2.0], Voting::Hard),
            Err(DataError::WeightArity { .. })
        ));
        assert!(matches!(
            EnsembleSpec::new(m.clone(), vec![-1.0], Voting::Hard),
            Err(DataError::NegativeWeight(_))
        ));
        assert!(matches!(
            EnsembleSpec::new(m, vec![0.0], Voting::Hard),
            Err(DataError::AllWeightsZero)
        ));
    }
}
