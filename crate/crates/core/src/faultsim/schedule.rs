//! Fault schedules: where and what to inject.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Circuit coordinate of a fault location.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Location {
    /// Protocol round, 1-based.
    pub round: u32,
    /// Position of the stabilizer measurement inside the round, 1-based.
    pub generator_index: u32,
    /// Position of the operation inside the gadget, 0-based.
    pub gate_index: u32,
}

/// Location classes with independent stochastic rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LocationClass {
    Gate,
    Idle,
    Measurement,
    Tldu,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum FaultKind {
    /// Pauli `X^x Z^z` on the operation's operands, injected after a gate or before a measurement.
    Pauli { x: Vec<u32>, z: Vec<u32> },
    /// The operand with this index is lost just before the operation runs.
    Loss { operand: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaultEvent {
    pub location: Location,
    pub kind: FaultKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct ClassRates {
    pub gate: f64,
    pub idle: f64,
    pub measurement: f64,
    pub tldu: f64,
}

impl ClassRates {
    pub fn uniform(p: f64) -> Self {
        Self { gate: p, idle: p, measurement: p, tldu: p }
    }

    pub fn get(&self, class: LocationClass) -> f64 {
        match class {
            LocationClass::Gate => self.gate,
            LocationClass::Idle => self.idle,
            LocationClass::Measurement => self.measurement,
            LocationClass::Tldu => self.tldu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum NoiseMode {
    #[default]
    Deterministic,
    /// Independent Bernoulli Pauli and loss events per location and operand.
    Stochastic {
        #[serde(rename = "pPauli")]
        p_pauli: ClassRates,
        #[serde(rename = "pLoss")]
        p_loss: ClassRates,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct FaultSchedule {
    pub events: Vec<FaultEvent>,
    pub mode: NoiseMode,
    /// Inject faults inside cat-state preparation too (otherwise preparation is ideal).
    #[serde(default, rename = "catPrepFaults")]
    pub cat_prep_faults: bool,
}

impl FaultSchedule {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn deterministic(events: Vec<FaultEvent>) -> Self {
        Self { events, ..Self::default() }
    }

    pub fn stochastic(p_pauli: ClassRates, p_loss: ClassRates) -> Self {
        Self { events: vec![], mode: NoiseMode::Stochastic { p_pauli, p_loss }, cat_prep_faults: false }
    }

    /// Events grouped by location, in schedule order.
    pub fn by_location(&self) -> BTreeMap<Location, Vec<FaultKind>> {
        let mut out: BTreeMap<Location, Vec<FaultKind>> = BTreeMap::new();
        for e in &self.events {
            out.entry(e.location).or_default().push(e.kind.clone());
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain data")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}
