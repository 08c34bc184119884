use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{invalid, Error};

/// One retained projector `party`/`setting`/`outcome`, all 0-indexed.
///
/// Ordering is lexicographic by (party, setting, outcome).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorSymbol {
    pub party: usize,
    pub setting: usize,
    pub outcome: usize,
}

impl OperatorSymbol {
    pub const fn new(party: usize, setting: usize, outcome: usize) -> Self {
        OperatorSymbol { party, setting, outcome }
    }

    /// Product of two adjacent same-party projectors is zero.
    pub fn orthogonal_to(self, other: OperatorSymbol) -> bool {
        self.party == other.party && self.setting == other.setting && self.outcome != other.outcome
    }
}

/// Written as party letter, setting, dot, outcome: `A0.0`, `B1.0`. Parties
/// past `Z` are written `P26:0.1`.
impl fmt::Display for OperatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.party < 26 {
            write!(f, "{}{}.{}", (b'A' + self.party as u8) as char, self.setting, self.outcome)
        } else {
            write!(f, "P{}:{}.{}", self.party, self.setting, self.outcome)
        }
    }
}

impl FromStr for OperatorSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let bad = || invalid(format!("malformed operator symbol {s:?}"));
        let (party, rest) = if let Some(rest) = s.strip_prefix('P').filter(|r| r.contains(':')) {
            let (p, rest) = rest.split_once(':').ok_or_else(bad)?;
            (p.parse().map_err(|_| bad())?, rest)
        } else {
            let c = s.chars().next().ok_or_else(bad)?;
            if !c.is_ascii_uppercase() {
                return Err(bad());
            }
            ((c as u8 - b'A') as usize, &s[1..])
        };
        let (x, a) = rest.split_once('.').ok_or_else(bad)?;
        Ok(OperatorSymbol { party, setting: x.parse().map_err(|_| bad())?, outcome: a.parse().map_err(|_| bad())? })
    }
}

/// A product of projectors in canonical form, or the zero operator.
///
/// Canonical words are sorted by party (stable within a party) and contain
/// no adjacent pair from the same setting: equal neighbours have been merged
/// and orthogonal neighbours turn the whole product into [`Monomial::Zero`].
/// The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Monomial {
    Zero,
    Word(Vec<OperatorSymbol>),
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial::Word(Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Monomial::Zero)
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, Monomial::Word(w) if w.is_empty())
    }

    /// Symbols of a non-zero monomial; empty for zero.
    pub fn symbols(&self) -> &[OperatorSymbol] {
        match self {
            Monomial::Zero => &[],
            Monomial::Word(w) => w,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Number of symbols belonging to `party`.
    pub fn party_len(&self, party: usize) -> usize {
        self.symbols().iter().filter(|s| s.party == party).count()
    }

    /// Self-adjoint monomials have real expectation values.
    pub fn is_self_adjoint(&self) -> bool {
        adjoint(self) == *self
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Monomial::Zero => f.write_str("0"),
            Monomial::Word(w) if w.is_empty() => f.write_str("1"),
            Monomial::Word(w) => {
                for (i, s) in w.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{s}")?;
                }
                Ok(())
            }
        }
    }
}

/// Parses the [`Display`](fmt::Display) form and canonicalizes it.
impl FromStr for Monomial {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.trim() {
            "0" => Ok(Monomial::Zero),
            "1" | "" => Ok(Monomial::identity()),
            t => {
                let raw = t.split_whitespace().map(str::parse).collect::<Result<Vec<_>, _>>()?;
                Ok(canonicalize(&raw))
            }
        }
    }
}

/// Brings a raw product into canonical form: stable sort by party, then
/// `P P = P` and `P_a P_a' = 0` for different outcomes of one setting.
pub fn canonicalize(raw: &[OperatorSymbol]) -> Monomial {
    let mut sorted: Vec<OperatorSymbol> = raw.to_vec();
    sorted.sort_by_key(|s| s.party);
    let mut out: Vec<OperatorSymbol> = Vec::with_capacity(sorted.len());
    for s in sorted {
        match out.last() {
            Some(&top) if top == s => {}
            Some(&top) if top.orthogonal_to(s) => return Monomial::Zero,
            _ => out.push(s),
        }
    }
    Monomial::Word(out)
}

/// Projectors are Hermitian, so the adjoint reverses each party's block.
pub fn adjoint(m: &Monomial) -> Monomial {
    match m {
        Monomial::Zero => Monomial::Zero,
        Monomial::Word(w) => {
            let mut out = w.clone();
            let mut start = 0;
            while start < out.len() {
                let party = out[start].party;
                let end = start + out[start..].iter().take_while(|s| s.party == party).count();
                out[start..end].reverse();
                start = end;
            }
            Monomial::Word(out)
        }
    }
}

/// Canonical form of the concatenation `m1 m2`.
pub fn product(m1: &Monomial, m2: &Monomial) -> Monomial {
    match (m1, m2) {
        (Monomial::Word(a), Monomial::Word(b)) => {
            let mut raw = Vec::with_capacity(a.len() + b.len());
            raw.extend_from_slice(a);
            raw.extend_from_slice(b);
            canonicalize(&raw)
        }
        _ => Monomial::Zero,
    }
}
