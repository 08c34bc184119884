use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use super::{reduced_alphabet, Monomial, OperatorSymbol, Scenario};
use crate::error::{invalid, Error, Result};

/// A hierarchy level: all words up to `base` symbols, plus words matching
/// extra party patterns. `"1+AB"` is base 1 with the pattern "one symbol of
/// party A and one of party B".
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelSpec {
    pub base: usize,
    /// Each pattern is a party multiset stored as per-party counts.
    pub patterns: Vec<Vec<usize>>,
}

impl LevelSpec {
    pub fn new(base: usize) -> Self {
        LevelSpec { base, patterns: Vec::new() }
    }

    /// The `1+AB` intermediate level.
    pub fn one_plus_ab() -> Self {
        LevelSpec { base: 1, patterns: vec![vec![1, 1]] }
    }

    /// Longest word in the generated basis.
    pub fn max_length(&self) -> usize {
        self.patterns.iter().map(|p| p.iter().sum::<usize>()).fold(self.base, usize::max)
    }
}

impl fmt::Display for LevelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.base)?;
        for pattern in &self.patterns {
            let mut s = String::new();
            for (party, &count) in pattern.iter().enumerate() {
                for _ in 0..count {
                    s.push((b'A' + party as u8) as char);
                }
            }
            write!(f, "+{s}")?;
        }
        Ok(())
    }
}

impl FromStr for LevelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.trim().split('+');
        let base = parts
            .next()
            .and_then(|b| b.trim().parse().ok())
            .ok_or_else(|| invalid(format!("malformed level {s:?}: expected e.g. \"3\" or \"1+AB\"")))?;
        let mut patterns = Vec::new();
        for part in parts {
            let part = part.trim();
            if part.is_empty() || !part.bytes().all(|c| c.is_ascii_uppercase()) {
                return Err(invalid(format!("malformed level pattern {part:?} in {s:?}")));
            }
            let mut counts = Vec::new();
            for c in part.bytes() {
                let party = (c - b'A') as usize;
                if counts.len() <= party {
                    counts.resize(party + 1, 0);
                }
                counts[party] += 1;
            }
            patterns.push(counts);
        }
        Ok(LevelSpec { base, patterns })
    }
}

/// All canonical non-zero words of the level over the reduced alphabet,
/// ordered by length and then lexicographically by (party, setting,
/// outcome). The identity comes first.
pub fn generate_basis(scenario: &Scenario, level: &LevelSpec) -> Result<Vec<Monomial>> {
    let parties = scenario.parties();
    for pattern in &level.patterns {
        if pattern.len() > parties && pattern[parties..].iter().any(|&c| c > 0) {
            return Err(invalid(format!(
                "level pattern refers to party {} but the scenario has {parties}",
                pattern.len() - 1
            )));
        }
    }
    let alphabet = reduced_alphabet(scenario);
    let mut words: BTreeSet<(usize, Vec<OperatorSymbol>)> = BTreeSet::new();
    let mut collect = |caps: &[usize], total: usize| {
        let mut word = Vec::new();
        extend_words(&alphabet, caps, total, &mut word, &mut |w| {
            words.insert((w.len(), w.to_vec()));
        });
    };
    collect(&vec![level.base; parties], level.base);
    for pattern in &level.patterns {
        let mut caps = vec![0; parties];
        caps[..pattern.len().min(parties)].copy_from_slice(&pattern[..pattern.len().min(parties)]);
        collect(&caps, pattern.iter().sum());
    }
    Ok(words.into_iter().map(|(_, w)| Monomial::Word(w)).collect())
}

/// Depth-first enumeration of canonical words: parties non-decreasing,
/// adjacent same-party symbols from different settings, `caps[p]` symbols of
/// party `p` at most and `total` symbols at most.
fn extend_words(
    alphabet: &[OperatorSymbol],
    caps: &[usize],
    total: usize,
    word: &mut Vec<OperatorSymbol>,
    emit: &mut dyn FnMut(&[OperatorSymbol]),
) {
    emit(word);
    if word.len() == total {
        return;
    }
    for &s in alphabet {
        if let Some(&last) = word.last() {
            if s.party < last.party || (s.party == last.party && s.setting == last.setting) {
                continue;
            }
        }
        let used = word.iter().filter(|w| w.party == s.party).count();
        if used >= caps[s.party] {
            continue;
        }
        word.push(s);
        extend_words(alphabet, caps, total, word, emit);
        word.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{canonicalize, product};
    use alloc::string::ToString;

    #[test]
    fn level_parsing() {
        assert_eq!("3".parse::<LevelSpec>().unwrap(), LevelSpec::new(3));
        assert_eq!("1+AB".parse::<LevelSpec>().unwrap(), LevelSpec::one_plus_ab());
        assert_eq!("2+AAB".parse::<LevelSpec>().unwrap().patterns, vec![vec![2, 1]]);
        assert_eq!(LevelSpec::one_plus_ab().to_string(), "1+AB");
        assert!("x".parse::<LevelSpec>().is_err());
        assert!("1+ab".parse::<LevelSpec>().is_err());
        assert!("1+".parse::<LevelSpec>().is_err());
    }

    #[test]
    fn chsh_levels() {
        let chsh = Scenario::chsh();
        assert_eq!(generate_basis(&chsh, &LevelSpec::new(0)).unwrap(), vec![Monomial::identity()]);
        let l1 = generate_basis(&chsh, &LevelSpec::new(1)).unwrap();
        let labels: Vec<String> = l1.iter().map(|m| m.to_string()).collect();
        assert_eq!(labels, ["1", "A0.0", "A1.0", "B0.0", "B1.0"]);
        let ab = generate_basis(&chsh, &LevelSpec::one_plus_ab()).unwrap();
        assert_eq!(ab.len(), 9);
        assert!(ab[5..].iter().all(|m| m.len() == 2 && m.party_len(0) == 1 && m.party_len(1) == 1));
    }

    /// Brute force: canonicalize every raw word up to length n.
    fn brute_force(scenario: &Scenario, n: usize) -> BTreeSet<Monomial> {
        let alphabet = reduced_alphabet(scenario);
        let mut out = BTreeSet::new();
        let mut frontier = vec![Monomial::identity()];
        out.insert(Monomial::identity());
        for _ in 0..n {
            let mut next = Vec::new();
            for m in &frontier {
                for &s in &alphabet {
                    let p = product(m, &canonicalize(&[s]));
                    if !p.is_zero() {
                        next.push(p);
                    }
                }
            }
            for m in &next {
                out.insert(m.clone());
            }
            frontier = next;
        }
        out
    }

    #[test]
    fn basis_matches_brute_force() {
        for (sc, n) in [
            (Scenario::chsh(), 3),
            (Scenario::bipartite(2, 3, 3, 2).unwrap(), 3),
            (Scenario::new(vec![vec![2], vec![3, 2], vec![2, 2]]).unwrap(), 2),
        ] {
            let basis = generate_basis(&sc, &LevelSpec::new(n)).unwrap();
            let set: BTreeSet<Monomial> = basis.iter().cloned().collect();
            assert_eq!(set.len(), basis.len(), "duplicates");
            assert_eq!(set, brute_force(&sc, n));
            assert!(basis.windows(2).all(|w| w[0].len() <= w[1].len()));
        }
    }

    #[test]
    fn table_one_basis_sizes() {
        // Level-3 sizes for the two-party rows.
        for ((x, y, a, b), size) in [((2, 2, 2, 2), 25), ((3, 3, 2, 2), 88), ((3, 3, 3, 3), 577)] {
            let sc = Scenario::bipartite(x, y, a, b).unwrap();
            assert_eq!(generate_basis(&sc, &LevelSpec::new(3)).unwrap().len(), size);
        }
    }

    #[test]
    fn pattern_out_of_range() {
        let level: LevelSpec = "1+AC".parse().unwrap();
        assert!(generate_basis(&Scenario::chsh(), &level).is_err());
    }
}
