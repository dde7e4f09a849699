use std::collections::BTreeSet;

use serde::Serialize;

/// One oracle query: one observable setting and its estimate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LedgerEntry {
    pub label: String,
    pub observable_hash: u64,
    pub estimate: f64,
    /// `None` in exact mode.
    pub n_shots: Option<u64>,
    /// Indices (in the fixed Pauli ordering) of the non-identity Pauli
    /// strings the observable expands into; empty when not computed.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub pauli_support: Vec<usize>,
}

/// Append-only record of every query; `count()` is the number of
/// measurements in the protocol's sense.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct MeasurementLedger {
    entries: Vec<LedgerEntry>,
}

impl MeasurementLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub(crate) fn record(&mut self, entry: LedgerEntry) {
        self.entries.push(entry);
    }

    pub fn count(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter()
    }

    /// Entries recorded after the first `start` ones.
    pub fn since(&self, start: usize) -> &[LedgerEntry] {
        &self.entries[start.min(self.entries.len())..]
    }

    /// Number of distinct non-identity Pauli settings needed to realize
    /// every recorded observable.
    pub fn pauli_settings(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|e| e.pauli_support.iter().copied())
            .collect::<BTreeSet<_>>()
            .len()
    }
}
