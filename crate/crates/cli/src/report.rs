//! Serializable records. Every integer is a decimal string.

use std::collections::BTreeMap;

use metablock::proof::Certificate;
use metablock::verify::PointReport;
use metablock::{Exact, GroupParams, InvariantSet};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsRecord {
    pub p: String,
    pub m: String,
    pub n: String,
    pub l: String,
    pub e: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvariantsRecord {
    pub k: String,
    pub k0: String,
    pub k1: String,
    pub l: String,
    pub e: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProvenanceTag {
    Proved,
    Extrapolated,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub params: ParamsRecord,
    pub invariants: Option<InvariantsRecord>,
    pub checks: Vec<CheckRecord>,
    pub provenance: Option<ProvenanceTag>,
    /// Further named quantities, for reports that are not about a block.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, String>,
}

impl ReportRecord {
    pub fn new<T: Exact>(params: &GroupParams<T>, e: Option<u64>) -> Self {
        ReportRecord {
            params: ParamsRecord {
                p: params.p().to_string(),
                m: params.m().to_string(),
                n: params.n().to_string(),
                l: params.l().to_string(),
                e: e.map(|e| e.to_string()),
            },
            invariants: None,
            checks: Vec::new(),
            provenance: None,
            values: BTreeMap::new(),
        }
    }

    pub fn with_invariants<T: Exact>(mut self, inv: &InvariantSet<T>) -> Self {
        self.invariants = Some(InvariantsRecord {
            k: inv.k.to_string(),
            k0: inv.k0.to_string(),
            k1: inv.k1.to_string(),
            l: inv.l.to_string(),
            e: inv.e.to_string(),
        });
        self.provenance = Some(match inv.provenance() {
            metablock::Provenance::Proved => ProvenanceTag::Proved,
            metablock::Provenance::Extrapolated => ProvenanceTag::Extrapolated,
        });
        self
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckRecord { name: name.into(), pass, detail: detail.into() });
    }

    pub fn value(&mut self, name: &str, value: impl ToString) {
        self.values.insert(name.to_string(), value.to_string());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn from_point(point: &PointReport) -> Self {
        let mut rec = ReportRecord {
            params: ParamsRecord {
                p: point.p.to_string(),
                m: point.m.to_string(),
                n: point.n.to_string(),
                l: point.l.to_string(),
                e: point.e.map(|e| e.to_string()),
            },
            invariants: None,
            checks: point.checks.iter().map(|c| CheckRecord { name: c.name.to_string(), pass: c.pass, detail: c.detail.clone() }).collect(),
            provenance: None,
            values: BTreeMap::new(),
        };
        if let Some(inv) = &point.invariants {
            rec = rec.with_invariants(inv);
        }
        rec
    }
}

/// One CSV row; columns follow the JSON field order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvRow {
    pub p: String,
    pub m: String,
    pub n: String,
    pub l: String,
    pub e: String,
    pub k: String,
    pub k0: String,
    pub k1: String,
    pub l_b: String,
    pub e_b: String,
    pub pass: bool,
    pub failed: String,
    pub provenance: String,
}

impl From<&ReportRecord> for CsvRow {
    fn from(r: &ReportRecord) -> Self {
        let inv = r.invariants.clone();
        let get = |f: fn(&InvariantsRecord) -> &String| inv.as_ref().map(|i| f(i).clone()).unwrap_or_default();
        CsvRow {
            p: r.params.p.clone(),
            m: r.params.m.clone(),
            n: r.params.n.clone(),
            l: r.params.l.clone(),
            e: r.params.e.clone().unwrap_or_default(),
            k: get(|i| &i.k),
            k0: get(|i| &i.k0),
            k1: get(|i| &i.k1),
            l_b: get(|i| &i.l),
            e_b: get(|i| &i.e),
            pass: r.passed(),
            failed: r.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect::<Vec<_>>().join(";"),
            provenance: match r.provenance {
                Some(ProvenanceTag::Proved) => "proved".into(),
                Some(ProvenanceTag::Extrapolated) => "extrapolated".into(),
                None => String::new(),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NamedValue {
    pub name: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundRecord {
    pub name: String,
    pub lo: String,
    pub hi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub kind: String,
    pub claim: String,
    pub parameters: Vec<NamedValue>,
    pub witness: Option<Vec<NamedValue>>,
    pub search_box: Vec<BoundRecord>,
    pub checked_values: Vec<NamedValue>,
    pub certified: bool,
}

fn named<T: Exact>(items: &[(String, T)]) -> Vec<NamedValue> {
    items.iter().map(|(name, v)| NamedValue { name: name.clone(), value: v.to_string() }).collect()
}

impl<T: Exact> From<&Certificate<T>> for CertificateRecord {
    fn from(c: &Certificate<T>) -> Self {
        CertificateRecord {
            kind: c.kind.as_str().to_string(),
            claim: c.claim.clone(),
            parameters: named(&c.parameters),
            witness: c.witness.as_deref().map(named),
            search_box: c.search_box.iter().map(|b| BoundRecord { name: b.name.clone(), lo: b.lo.to_string(), hi: b.hi.to_string() }).collect(),
            checked_values: named(&c.checked_values),
            certified: c.certified,
        }
    }
}

impl CertificateRecord {
    pub fn render(&self) -> String {
        let list = |v: &[NamedValue]| v.iter().map(|x| format!("{}={}", x.name, x.value)).collect::<Vec<_>>().join(", ");
        let mut out = format!("[{}] {}", self.claim, self.kind);
        if !self.parameters.is_empty() {
            out += &format!(" ({})", list(&self.parameters));
        }
        out += &format!(": certified={}\n", self.certified);
        out += &format!("  values: {}\n", list(&self.checked_values));
        if let Some(w) = &self.witness {
            out += &format!("  witness: {}\n", list(w));
        }
        if !self.search_box.is_empty() {
            let boxes: Vec<_> = self.search_box.iter().map(|b| format!("{} in [{}, {}]", b.name, b.lo, b.hi)).collect();
            out += &format!("  search box: {}\n", boxes.join(", "));
        }
        out
    }
}
