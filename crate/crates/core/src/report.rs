//! Structured verdicts of theorem checks.

use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::filtration::Filtration;
use crate::process::Process;
use crate::rational::Rational;
use crate::space::SampleSpace;
use crate::time::RandomTime;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub label: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NamedValue {
    pub name: String,
    pub value: Rational,
}

/// A concrete counterexample, always with exact values.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Witness {
    pub condition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_time: Option<RandomTime>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<NamedValue>,
}

impl Witness {
    pub fn new(condition: impl Into<String>) -> Self {
        Witness {
            condition: condition.into(),
            ..Witness::default()
        }
    }

    pub fn at(mut self, time: usize, outcome: usize) -> Self {
        self.time = Some(time);
        self.outcome = Some(outcome);
        self
    }

    pub fn time(mut self, time: usize) -> Self {
        self.time = Some(time);
        self
    }

    pub fn outcome(mut self, outcome: usize) -> Self {
        self.outcome = Some(outcome);
        self
    }

    pub fn block(mut self, block: &[usize]) -> Self {
        self.block = Some(block.to_vec());
        self
    }

    pub fn random_time(mut self, tau: &RandomTime) -> Self {
        self.random_time = Some(tau.clone());
        self
    }

    pub fn value(mut self, name: impl Into<String>, value: Rational) -> Self {
        self.values.push(NamedValue {
            name: name.into(),
            value,
        });
        self
    }

    pub fn relabel(mut self, condition: impl Into<String>) -> Self {
        self.condition = condition.into();
        self
    }
}

/// Boolean outcome of a predicate plus a counterexample when it fails.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            holds: true,
            witness: None,
        }
    }

    pub fn fail(witness: Witness) -> Self {
        Verdict {
            holds: false,
            witness: Some(witness),
        }
    }
}

/// Result of checking an equivalence theorem on one instance.
///
/// `agree` is true iff every entry of `conditions` has the same boolean.
/// `facts` are informational and take no part in agreement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub instance_digest: String,
    pub agree: bool,
    pub conditions: Vec<Condition>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub facts: Vec<Condition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub notes: BTreeMap<String, String>,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, instance_digest: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            instance_digest: instance_digest.into(),
            agree: true,
            conditions: Vec::new(),
            facts: Vec::new(),
            witness: None,
            notes: BTreeMap::new(),
        }
    }

    pub fn condition(&mut self, label: impl Into<String>, holds: bool) -> &mut Self {
        self.conditions.push(Condition {
            label: label.into(),
            holds,
        });
        self.agree = self
            .conditions
            .windows(2)
            .all(|pair| pair[0].holds == pair[1].holds);
        self
    }

    /// Records a condition and keeps its witness if none was stored yet.
    pub fn verdict(&mut self, label: impl Into<String>, verdict: Verdict) -> &mut Self {
        let label = label.into();
        if let Some(w) = verdict.witness {
            self.offer_witness(w);
        }
        self.condition(label, verdict.holds)
    }

    pub fn fact(&mut self, label: impl Into<String>, holds: bool) -> &mut Self {
        self.facts.push(Condition {
            label: label.into(),
            holds,
        });
        self
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.notes.insert(key.into(), value.to_string());
        self
    }

    /// First witness wins.
    pub fn offer_witness(&mut self, witness: Witness) -> &mut Self {
        if self.witness.is_none() {
            self.witness = Some(witness);
        }
        self
    }

    pub fn holds(&self, label: &str) -> Option<bool> {
        self.conditions
            .iter()
            .chain(&self.facts)
            .find(|c| c.label == label)
            .map(|c| c.holds)
    }

    /// All conditions agree and all are true.
    pub fn all_true(&self) -> bool {
        self.agree && self.conditions.iter().all(|c| c.holds)
    }

    /// All conditions agree and all are false.
    pub fn all_false(&self) -> bool {
        self.agree && self.conditions.iter().all(|c| !c.holds)
    }
}

/// Short stable fingerprint of an instance's canonical text form.
pub fn instance_digest(
    space: &SampleSpace,
    filtrations: &[&Filtration],
    times: &[&RandomTime],
    processes: &[&Process],
) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"p:");
    for p in space.probs() {
        hasher.update(p.to_fraction_string().as_bytes());
        hasher.update(b",");
    }
    for f in filtrations {
        hasher.update(b"|F:");
        for part in f.parts() {
            hasher.update(format!("{:?};", part.blocks()).as_bytes());
        }
    }
    for tau in times {
        hasher.update(format!("|t:{tau}").as_bytes());
    }
    for x in processes {
        hasher.update(b"|x:");
        for row in x.rows() {
            for v in row {
                hasher.update(v.to_fraction_string().as_bytes());
                hasher.update(b",");
            }
            hasher.update(b";");
        }
    }
    hex::encode(&hasher.finalize()[..8])
}
