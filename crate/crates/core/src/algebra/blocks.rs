use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::{Monomial, OperatorSymbol};
use crate::error::{invalid, Result};

/// The simplified single-party factor of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Block {
    party: usize,
    symbols: Vec<OperatorSymbol>,
}

impl Block {
    /// Fails unless every symbol belongs to `party` and adjacent symbols are
    /// neither identical nor orthogonal.
    pub fn new(party: usize, symbols: Vec<OperatorSymbol>) -> Result<Self> {
        if let Some(s) = symbols.iter().find(|s| s.party != party) {
            return Err(invalid(format!("symbol {s} does not belong to party {party}")));
        }
        if let Some(w) = symbols.windows(2).find(|w| w[0].setting == w[1].setting) {
            return Err(invalid(format!("block is not simplified at {} {}", w[0], w[1])));
        }
        Ok(Block { party, symbols })
    }

    /// Block over abstract independent projectors `P_i`.
    pub fn from_indices(indices: &[usize]) -> Result<Self> {
        Block::new(0, indices.iter().map(|&i| abstract_symbol(i)).collect())
    }

    pub fn party(&self) -> usize {
        self.party
    }

    pub fn symbols(&self) -> &[OperatorSymbol] {
        &self.symbols
    }

    /// Norm of the block: its simplified length, 0 for the identity.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn first(&self) -> Option<OperatorSymbol> {
        self.symbols.first().copied()
    }

    pub fn last(&self) -> Option<OperatorSymbol> {
        self.symbols.last().copied()
    }

    /// Multiset of consecutive pairs, as a sorted list.
    pub fn consecutive_pairs(&self) -> Vec<(OperatorSymbol, OperatorSymbol)> {
        let mut pairs: Vec<_> = self.symbols.windows(2).map(|w| (w[0], w[1])).collect();
        pairs.sort();
        pairs
    }

    /// Everything homogeneity compares: length, endpoints, pair multiset.
    fn homogeneity_key(&self) -> HomogeneityKey {
        (self.len(), self.first(), self.last(), self.consecutive_pairs())
    }
}

/// Independent projector number `i` in the single-party experiments.
pub const fn abstract_symbol(i: usize) -> OperatorSymbol {
    OperatorSymbol::new(0, i, 0)
}

/// One block per party that appears in `m`, in party order.
pub fn blocks_of(m: &Monomial) -> Result<Vec<Block>> {
    let Monomial::Word(word) = m else {
        return Err(invalid("the zero monomial has no block decomposition"));
    };
    let mut blocks: Vec<Block> = Vec::new();
    for &s in word {
        match blocks.last_mut() {
            Some(b) if b.party == s.party => b.symbols.push(s),
            _ => blocks.push(Block { party: s.party, symbols: vec![s] }),
        }
    }
    Ok(blocks)
}

type HomogeneityKey = (usize, Option<OperatorSymbol>, Option<OperatorSymbol>, Vec<(OperatorSymbol, OperatorSymbol)>);

/// Same length, same first and last symbol, same multiset of consecutive
/// pairs.
pub fn is_homogeneous_pair(a: &Block, b: &Block) -> bool {
    a.party == b.party && a.homogeneity_key() == b.homogeneity_key()
}

/// The two length-5 homogeneous blocks `P0 P1 P0 P2 P0` and `P0 P2 P0 P1 P0`.
pub fn example_one_pair() -> (Block, Block) {
    (
        Block::from_indices(&[0, 1, 0, 2, 0]).expect("simplified"),
        Block::from_indices(&[0, 2, 0, 1, 0]).expect("simplified"),
    )
}

/// Every unordered pair of distinct simplified blocks of length `1..=max_len`
/// over `num_symbols` independent projectors that is homogeneous.
pub fn enumerate_homogeneous_pairs(max_len: usize, num_symbols: usize) -> Result<Vec<(Block, Block)>> {
    if max_len > 8 || num_symbols > 5 {
        return Err(invalid(format!(
            "enumeration bounded to max_len <= 8 and num_symbols <= 5, got {max_len} and {num_symbols}"
        )));
    }
    let mut groups: BTreeMap<_, Vec<Block>> = BTreeMap::new();
    let mut seq = Vec::new();
    simplified_sequences(num_symbols, max_len, &mut seq, &mut |s| {
        if !s.is_empty() {
            let block = Block::from_indices(s).expect("simplified by construction");
            groups.entry(block.homogeneity_key()).or_default().push(block);
        }
    });
    let mut pairs = Vec::new();
    for members in groups.values() {
        for (i, a) in members.iter().enumerate() {
            for b in &members[i + 1..] {
                pairs.push((a.clone(), b.clone()));
            }
        }
    }
    Ok(pairs)
}

fn simplified_sequences(symbols: usize, max_len: usize, seq: &mut Vec<usize>, emit: &mut dyn FnMut(&[usize])) {
    emit(seq);
    if seq.len() == max_len {
        return;
    }
    for s in 0..symbols {
        if seq.last() == Some(&s) {
            continue;
        }
        seq.push(s);
        simplified_sequences(symbols, max_len, seq, emit);
        seq.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::canonicalize;

    const A0: OperatorSymbol = OperatorSymbol::new(0, 0, 0);
    const A1: OperatorSymbol = OperatorSymbol::new(0, 1, 0);
    const B0: OperatorSymbol = OperatorSymbol::new(1, 0, 0);

    #[test]
    fn identity_has_no_blocks() {
        assert!(blocks_of(&Monomial::identity()).unwrap().is_empty());
    }

    #[test]
    fn blocks_split_by_party() {
        let blocks = blocks_of(&canonicalize(&[A0, A1, B0])).unwrap();
        assert_eq!(blocks.len(), 2);
        assert_eq!(blocks[0].symbols(), [A0, A1]);
        assert_eq!(blocks[1].symbols(), [B0]);
        let single = blocks_of(&canonicalize(&[A0, A1, A0])).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(single[0].len(), 3);
    }

    #[test]
    fn zero_has_no_blocks() {
        assert!(blocks_of(&Monomial::Zero).is_err());
    }

    #[test]
    fn example_one_is_homogeneous() {
        let (p, q) = example_one_pair();
        assert!(is_homogeneous_pair(&p, &q));
        assert!(is_homogeneous_pair(&p, &p));
        let a = Block::from_indices(&[0, 1, 2]).unwrap();
        let b = Block::from_indices(&[0, 2, 1]).unwrap();
        assert!(!is_homogeneous_pair(&a, &b));
    }

    #[test]
    fn unsimplified_block_rejected() {
        assert!(Block::from_indices(&[0, 0, 1]).is_err());
        assert!(Block::new(0, vec![OperatorSymbol::new(0, 0, 0), OperatorSymbol::new(0, 0, 1)]).is_err());
    }

    #[test]
    fn shortest_homogeneous_pairs() {
        for s in 0..=4 {
            assert!(enumerate_homogeneous_pairs(4, s).unwrap().is_empty(), "{s} symbols");
        }
        assert!(enumerate_homogeneous_pairs(5, 2).unwrap().is_empty());
        let pairs = enumerate_homogeneous_pairs(5, 3).unwrap();
        let (p, q) = example_one_pair();
        assert!(pairs.iter().any(|(a, b)| (a == &p && b == &q) || (a == &q && b == &p)));
        assert!(pairs.iter().all(|(a, b)| a.len() == 5 && a != b));
    }

    #[test]
    fn enumeration_guard() {
        assert!(enumerate_homogeneous_pairs(9, 3).is_err());
        assert!(enumerate_homogeneous_pairs(5, 6).is_err());
    }
}
