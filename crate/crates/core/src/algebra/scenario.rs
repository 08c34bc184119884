use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::OperatorSymbol;
use crate::error::{invalid, Result};

/// Parties, settings per party and outcomes per (party, setting).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scenario {
    outcomes: Vec<Vec<usize>>,
}

impl Scenario {
    /// `outcomes[party][setting]` is the number of outcomes of that setting.
    pub fn new(outcomes: Vec<Vec<usize>>) -> Result<Self> {
        if outcomes.is_empty() {
            return Err(invalid("a scenario needs at least one party"));
        }
        for (party, settings) in outcomes.iter().enumerate() {
            if settings.is_empty() {
                return Err(invalid(format!("party {party} has no settings")));
            }
            if let Some(x) = settings.iter().position(|&n| n < 2) {
                return Err(invalid(format!(
                    "party {party} setting {x} has {} outcomes; at least 2 are required",
                    settings[x]
                )));
            }
        }
        Ok(Scenario { outcomes })
    }

    /// Two parties: `x` settings with `a` outcomes each for the first and `y`
    /// settings with `b` outcomes each for the second.
    pub fn bipartite(x: usize, y: usize, a: usize, b: usize) -> Result<Self> {
        Scenario::new(vec![vec![a; x], vec![b; y]])
    }

    pub fn chsh() -> Self {
        Scenario { outcomes: vec![vec![2, 2], vec![2, 2]] }
    }

    pub fn parties(&self) -> usize {
        self.outcomes.len()
    }

    pub fn settings(&self, party: usize) -> usize {
        self.outcomes[party].len()
    }

    pub fn outcomes(&self, party: usize, setting: usize) -> usize {
        self.outcomes[party][setting]
    }

    pub fn max_outcomes(&self, party: usize) -> usize {
        self.outcomes[party].iter().copied().max().unwrap_or(0)
    }

    pub fn outcome_table(&self) -> &[Vec<usize>] {
        &self.outcomes
    }

    /// Whether `s` belongs to the reduced alphabet of this scenario.
    pub fn contains(&self, s: OperatorSymbol) -> bool {
        s.party < self.parties()
            && s.setting < self.settings(s.party)
            && s.outcome + 1 < self.outcomes(s.party, s.setting)
    }
}

/// All retained projectors (last outcome of each setting dropped), ordered by
/// (party, setting, outcome).
pub fn reduced_alphabet(scenario: &Scenario) -> Vec<OperatorSymbol> {
    let mut out = Vec::new();
    for (party, settings) in scenario.outcomes.iter().enumerate() {
        for (setting, &n) in settings.iter().enumerate() {
            for outcome in 0..n - 1 {
                out.push(OperatorSymbol::new(party, setting, outcome));
            }
        }
    }
    out
}
