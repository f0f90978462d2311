use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::linalg::{LoewnerComparison, ToleranceConfig, WitnessCertificate};

/// One inequality margin: holds iff `gap ≥ −slack`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub gap: f64,
    pub slack: f64,
}

impl Margin {
    pub fn new(name: impl Into<String>, gap: f64, slack: f64) -> Self {
        Self { name: name.into(), gap, slack }
    }

    pub fn from_loewner(name: impl Into<String>, c: &LoewnerComparison) -> Self {
        Self::new(name, c.gap, c.slack)
    }

    pub fn holds(&self) -> bool {
        self.gap >= -self.slack
    }

    fn severity(&self) -> f64 {
        self.gap / self.slack.max(f64::MIN_POSITIVE)
    }
}

/// Everything needed to regenerate an instance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct InstanceDigest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    pub dims: Vec<usize>,
    pub exponents: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map_hash: Option<String>,
}

impl InstanceDigest {
    pub fn new(dims: Vec<usize>) -> Self {
        Self { dims, ..Self::default() }
    }

    pub fn exponent(mut self, name: &str, value: f64) -> Self {
        self.exponents.insert(name.to_string(), value);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheckReport {
    pub case_id: String,
    pub holds: bool,
    /// `false` for exploratory runs whose outcome is recorded but not required.
    pub asserted: bool,
    /// Margin of the most severe sub-check.
    pub gap: f64,
    pub slack: f64,
    pub margins: Vec<Margin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessCertificate>,
    pub instance: InstanceDigest,
    pub tolerances: ToleranceConfig,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl InequalityCheckReport {
    pub fn builder(case_id: impl Into<String>, tol: &ToleranceConfig) -> ReportBuilder {
        ReportBuilder {
            case_id: case_id.into(),
            tolerances: *tol,
            asserted: true,
            margins: Vec::new(),
            witness: None,
            instance: InstanceDigest::default(),
            metrics: BTreeMap::new(),
            notes: Vec::new(),
        }
    }

    pub fn margin(&self, name: &str) -> Option<&Margin> {
        self.margins.iter().find(|m| m.name == name)
    }

    /// `holds` agrees with the margins and the headline gap.
    pub fn is_consistent(&self) -> bool {
        let all = self.margins.iter().all(Margin::holds);
        !self.margins.is_empty() && all == self.holds && (self.gap >= -self.slack) == self.holds
    }
}

#[derive(Debug, Clone)]
pub struct ReportBuilder {
    case_id: String,
    tolerances: ToleranceConfig,
    asserted: bool,
    margins: Vec<Margin>,
    witness: Option<WitnessCertificate>,
    instance: InstanceDigest,
    metrics: BTreeMap<String, f64>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn margin(mut self, m: Margin) -> Self {
        self.margins.push(m);
        self
    }

    pub fn push_margin(&mut self, m: Margin) {
        self.margins.push(m);
    }

    pub fn witness(mut self, w: WitnessCertificate) -> Self {
        self.witness = Some(w);
        self
    }

    pub fn set_witness(&mut self, w: WitnessCertificate) {
        self.witness = Some(w);
    }

    pub fn instance(mut self, d: InstanceDigest) -> Self {
        self.instance = d;
        self
    }

    pub fn metric(mut self, name: &str, v: f64) -> Self {
        self.metrics.insert(name.to_string(), v);
        self
    }

    pub fn push_metric(&mut self, name: &str, v: f64) {
        self.metrics.insert(name.to_string(), v);
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn exploratory(mut self) -> Self {
        self.asserted = false;
        self
    }

    pub fn build(self) -> InequalityCheckReport {
        assert!(!self.margins.is_empty(), "report {} has no margins", self.case_id);
        let worst = self
            .margins
            .iter()
            .min_by(|a, b| a.severity().total_cmp(&b.severity()))
            .expect("non-empty");
        let holds = self.margins.iter().all(Margin::holds);
        InequalityCheckReport {
            gap: worst.gap,
            slack: worst.slack,
            holds,
            case_id: self.case_id,
            asserted: self.asserted,
            margins: self.margins,
            witness: self.witness,
            instance: self.instance,
            tolerances: self.tolerances,
            metrics: self.metrics,
            notes: self.notes,
        }
    }
}
