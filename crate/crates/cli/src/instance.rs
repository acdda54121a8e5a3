//! The JSON instance format.
//!
//! ```json
//! {
//!   "omega": 4,
//!   "probs": ["1/4", "1/4", "1/4", "1/4"],
//!   "horizon": 2,
//!   "filtrations": {"F": [[[0,1,2,3]], [[0,1],[2,3]], [[0,1],[2,3]]]},
//!   "times": {"tau": [1, 2, "inf", 1]},
//!   "processes": {"V": [["0","0","0","0"], ["1/2","0","0","1"], ["1","1","0","1"]]}
//! }
//! ```
//!
//! Outcomes are 0-based. A filtration named `F` is the reference filtration
//! and `G` the larger one; a file with a single filtration uses it as `F`.

use std::collections::BTreeMap;
use std::fmt;

use pseudostop_core::{FilteredPair, Filtration, Partition, Process, RandomTime, Rational, SampleSpace, Time};
use serde::{Deserialize, Serialize};

/// Input rejected, with the place it was found.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{location}: {message}")]
pub struct InputError {
    pub location: String,
    pub message: String,
}

impl InputError {
    pub fn new(location: impl Into<String>, message: impl fmt::Display) -> Self {
        InputError {
            location: location.into(),
            message: message.to_string(),
        }
    }
}

/// Raw file contents, before validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub omega: usize,
    pub probs: Vec<String>,
    pub horizon: usize,
    pub filtrations: BTreeMap<String, Vec<Vec<Vec<usize>>>>,
    #[serde(default)]
    pub times: BTreeMap<String, Vec<Time>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub processes: BTreeMap<String, Vec<Vec<String>>>,
}

/// A validated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub space: SampleSpace,
    pub horizon: usize,
    pub filtrations: BTreeMap<String, Filtration>,
    pub times: BTreeMap<String, RandomTime>,
    pub processes: BTreeMap<String, Process>,
}

fn parse_rational(s: &str, location: String) -> Result<Rational, InputError> {
    s.parse::<Rational>()
        .map_err(|e| InputError::new(location, e))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let location = if path == "." {
                format!("line {}, column {}", inner.line(), inner.column())
            } else {
                format!("line {}, column {} ({path})", inner.line(), inner.column())
            };
            InputError::new(location, inner)
        })
    }

    pub fn validate(&self) -> Result<Instance, InputError> {
        let n = self.omega;
        if self.probs.len() != n {
            return Err(InputError::new(
                "probs",
                format!("expected {n} probabilities, found {}", self.probs.len()),
            ));
        }
        let mut probs = Vec::with_capacity(n);
        for (i, p) in self.probs.iter().enumerate() {
            let value = parse_rational(p, format!("probs[{i}]"))?;
            if !value.is_positive() {
                return Err(InputError::new(
                    format!("probs[{i}]"),
                    format!("probability must be positive, got {value}"),
                ));
            }
            probs.push(value);
        }
        let total: Rational = probs.iter().copied().sum();
        if total != Rational::ONE {
            return Err(InputError::new("probs", format!("probabilities sum to {total}, expected 1")));
        }
        let space = SampleSpace::new(probs).map_err(|e| InputError::new("probs", e))?;

        if self.filtrations.is_empty() {
            return Err(InputError::new("filtrations", "at least one filtration is required"));
        }
        let mut filtrations = BTreeMap::new();
        for (name, parts) in &self.filtrations {
            let location = format!("filtrations.{name}");
            if parts.len() != self.horizon + 1 {
                return Err(InputError::new(
                    location,
                    format!("expected {} partitions (t = 0..={}), found {}", self.horizon + 1, self.horizon, parts.len()),
                ));
            }
            let mut partitions = Vec::with_capacity(parts.len());
            for (t, blocks) in parts.iter().enumerate() {
                let p = Partition::new(n, blocks.clone()).map_err(|e| InputError::new(format!("{location}[{t}]"), e))?;
                partitions.push(p);
            }
            let f = Filtration::new(partitions).map_err(|e| InputError::new(&location, e))?;
            filtrations.insert(name.clone(), f);
        }
        if let (Some(f), Some(g)) = (filtrations.get("F"), filtrations.get("G")) {
            FilteredPair::new(space.clone(), f.clone(), g.clone())
                .map_err(|e| InputError::new("filtrations.G", e))?;
        }

        let mut times = BTreeMap::new();
        for (name, values) in &self.times {
            let location = format!("times.{name}");
            if values.len() != n {
                return Err(InputError::new(location, format!("expected {n} values, found {}", values.len())));
            }
            let tau = RandomTime::new(values.clone());
            if let Err(e) = tau.validate(n, self.horizon) {
                let i = values.iter().position(|v| matches!(v, Time::At(t) if *t > self.horizon)).unwrap_or(0);
                return Err(InputError::new(format!("{location}[{i}]"), e));
            }
            times.insert(name.clone(), tau);
        }

        let mut processes = BTreeMap::new();
        for (name, rows) in &self.processes {
            let location = format!("processes.{name}");
            if rows.len() != self.horizon + 1 {
                return Err(InputError::new(
                    location,
                    format!("expected {} rows, found {}", self.horizon + 1, rows.len()),
                ));
            }
            let mut parsed = Vec::with_capacity(rows.len());
            for (t, row) in rows.iter().enumerate() {
                if row.len() != n {
                    return Err(InputError::new(
                        format!("{location}[{t}]"),
                        format!("expected {n} values, found {}", row.len()),
                    ));
                }
                let values = row
                    .iter()
                    .enumerate()
                    .map(|(i, v)| parse_rational(v, format!("{location}[{t}][{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                parsed.push(values);
            }
            let x = Process::new(parsed).map_err(|e| InputError::new(&location, e))?;
            processes.insert(name.clone(), x);
        }

        Ok(Instance {
            space,
            horizon: self.horizon,
            filtrations,
            times,
            processes,
        })
    }
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        InstanceFile::from_json(text)?.validate()
    }

    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            omega: self.space.len(),
            probs: self.space.probs().iter().map(|p| p.to_fraction_string()).collect(),
            horizon: self.horizon,
            filtrations: self
                .filtrations
                .iter()
                .map(|(name, f)| (name.clone(), f.parts().iter().map(|p| p.blocks().to_vec()).collect()))
                .collect(),
            times: self
                .times
                .iter()
                .map(|(name, tau)| (name.clone(), tau.values().to_vec()))
                .collect(),
            processes: self
                .processes
                .iter()
                .map(|(name, x)| {
                    let rows = x
                        .rows()
                        .iter()
                        .map(|row| row.iter().map(|v| v.to_fraction_string()).collect())
                        .collect();
                    (name.clone(), rows)
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("instance files serialize")
    }

    /// The reference filtration: `F`, or the only filtration present.
    pub fn reference(&self) -> Option<&Filtration> {
        self.filtrations
            .get("F")
            .or_else(|| (self.filtrations.len() == 1).then(|| self.filtrations.values().next()).flatten())
    }

    /// `(F, G)` when both are present.
    pub fn pair(&self) -> Option<FilteredPair> {
        let f = self.filtrations.get("F")?;
        let g = self.filtrations.get("G")?;
        Some(FilteredPair::new(self.space.clone(), f.clone(), g.clone()).expect("validated pair"))
    }

    /// Builds an instance from a pair and named times.
    pub fn from_pair(pair: &FilteredPair, times: &[(&str, &RandomTime)]) -> Self {
        Instance {
            space: pair.space.clone(),
            horizon: pair.horizon(),
            filtrations: [("F".to_string(), pair.f.clone()), ("G".to_string(), pair.g.clone())]
                .into_iter()
                .collect(),
            times: times.iter().map(|(n, t)| (n.to_string(), (*t).clone())).collect(),
            processes: BTreeMap::new(),
        }
    }
}
