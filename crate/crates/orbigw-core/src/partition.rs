//! Integer partitions decorated by cyclic-group elements, and monodromy
//! vectors of twisted insertions.
//!
//! A weighted partition is a multiset of parts `(size, dec)` with `size >= 1`
//! and decoration `dec` in `{0, ..., n}`; the canonical form sorts by size
//! descending, then decoration ascending. A monodromy vector is a multiset of
//! nonzero sectors `{1, ..., n}`, kept sorted ascending.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::rational::{factorial_int, Rational};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct WeightedPart {
    pub size: u64,
    pub dec: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionError {
    ZeroPart,
    DecorationOutOfRange { dec: u32, n: u32 },
    SectorOutOfRange { sector: u32, n: u32 },
    Parse(String),
}

impl core::fmt::Display for PartitionError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            PartitionError::ZeroPart => write!(f, "partition parts must be positive"),
            PartitionError::DecorationOutOfRange { dec, n } => {
                write!(f, "decoration {dec} outside 0..={n}")
            }
            PartitionError::SectorOutOfRange { sector, n } => {
                write!(f, "sector {sector} outside 1..={n}")
            }
            PartitionError::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

/// Partition with parts decorated by elements of `Z_{n+1}`, in canonical order
/// (size descending, decoration ascending within a size).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct WeightedPartition {
    parts: Vec<WeightedPart>,
}

fn canonicalize(parts: &mut [WeightedPart]) {
    parts.sort_by(|a, b| b.size.cmp(&a.size).then(a.dec.cmp(&b.dec)));
}

impl WeightedPartition {
    pub fn new(mut parts: Vec<WeightedPart>, n: u32) -> Result<Self, PartitionError> {
        for p in &parts {
            if p.size == 0 {
                return Err(PartitionError::ZeroPart);
            }
            if p.dec > n {
                return Err(PartitionError::DecorationOutOfRange { dec: p.dec, n });
            }
        }
        canonicalize(&mut parts);
        Ok(WeightedPartition { parts })
    }

    /// Builds from `(size, dec)` pairs; panics on invalid data (test helper).
    pub fn from_pairs(pairs: &[(u64, u32)], n: u32) -> Self {
        Self::new(
            pairs
                .iter()
                .map(|&(size, dec)| WeightedPart { size, dec })
                .collect(),
            n,
        )
        .expect("invalid partition data")
    }

    pub fn parts(&self) -> &[WeightedPart] {
        &self.parts
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.parts.iter().map(|p| p.size).collect()
    }

    pub fn decorations(&self) -> Vec<u32> {
        self.parts.iter().map(|p| p.dec).collect()
    }

    /// Total size `|lambda|`.
    pub fn size(&self) -> u64 {
        self.parts.iter().map(|p| p.size).sum()
    }

    /// Number of parts `l`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Number of parts with trivial decoration, `l'`.
    pub fn len_trivial(&self) -> usize {
        self.parts.iter().filter(|p| p.dec == 0).count()
    }

    /// Number of parts with nonzero decoration, `l'' = l - l'`.
    pub fn len_twisted(&self) -> usize {
        self.len() - self.len_trivial()
    }

    pub fn decoration_sum(&self) -> u64 {
        self.parts.iter().map(|p| p.dec as u64).sum()
    }

    /// Applies `dec -> (n+1-dec) mod (n+1)` to every part.
    pub fn negate_decorations(&self, n: u32) -> Self {
        let mut parts: Vec<WeightedPart> = self
            .parts
            .iter()
            .map(|p| WeightedPart {
                size: p.size,
                dec: if p.dec == 0 { 0 } else { n + 1 - p.dec },
            })
            .collect();
        canonicalize(&mut parts);
        WeightedPartition { parts }
    }

    /// `|Aut|` of the underlying plain partition (decorations ignored).
    pub fn aut_plain(&self) -> Rational {
        plain_aut(&self.sizes())
    }

    /// `|Aut|` of the decorated partition: equal `(size, dec)` pairs commute.
    pub fn aut_decorated(&self) -> Rational {
        let mut acc = BigInt::from(1u32);
        let mut i = 0;
        while i < self.parts.len() {
            let mut j = i;
            while j < self.parts.len() && self.parts[j] == self.parts[i] {
                j += 1;
            }
            acc *= factorial_int((j - i) as u64);
            i = j;
        }
        Rational::from_bigint(acc)
    }

    /// Gluing factor `|Aut(rho)| * (n+1)^l * prod rho_i` (decorated Aut).
    pub fn gluing_factor(&self, n: u32) -> Rational {
        let mut acc = self.aut_decorated();
        for p in &self.parts {
            acc *= Rational::from_int(p.size as i64);
        }
        acc * Rational::from_int(n as i64 + 1).pow(self.len() as i64)
    }

    /// Parses `"(size,dec)(size,dec)..."`, whitespace tolerant.
    pub fn parse(s: &str, n: u32) -> Result<Self, PartitionError> {
        let s = s.trim();
        let mut parts = Vec::new();
        let mut rest = s;
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| PartitionError::Parse(format!("expected '(' in {rest:?}")))?;
            if !rest[..open].trim().is_empty() {
                return Err(PartitionError::Parse(format!(
                    "unexpected text {:?}",
                    &rest[..open]
                )));
            }
            let close = rest
                .find(')')
                .ok_or_else(|| PartitionError::Parse(String::from("unbalanced '('")))?;
            let body = &rest[open + 1..close];
            let (a, b) = body
                .split_once(',')
                .ok_or_else(|| PartitionError::Parse(format!("expected size,dec in {body:?}")))?;
            let size: u64 = a
                .trim()
                .parse()
                .map_err(|_| PartitionError::Parse(format!("bad size {a:?}")))?;
            let dec: u32 = b
                .trim()
                .parse()
                .map_err(|_| PartitionError::Parse(format!("bad decoration {b:?}")))?;
            parts.push(WeightedPart { size, dec });
            rest = rest[close + 1..].trim_start();
        }
        if parts.is_empty() {
            return Err(PartitionError::Parse(String::from("empty partition")));
        }
        Self::new(parts, n)
    }

    pub fn format(&self) -> String {
        self.parts
            .iter()
            .map(|p| format!("({},{})", p.size, p.dec))
            .collect::<Vec<_>>()
            .join("")
    }
}

/// `|Aut|` of a plain partition given by its multiset of sizes.
pub fn plain_aut(sizes: &[u64]) -> Rational {
    let mut sorted = sizes.to_vec();
    sorted.sort_unstable();
    let mut acc = BigInt::from(1u32);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        acc *= factorial_int((j - i) as u64);
        i = j;
    }
    Rational::from_bigint(acc)
}

/// All plain partitions of `m`, parts descending, in deterministic order.
pub fn plain_partitions(m: u64) -> Vec<Vec<u64>> {
    fn rec(remaining: u64, max_part: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if remaining == 0 {
            out.push(cur.clone());
            return;
        }
        let mut part = max_part.min(remaining);
        while part >= 1 {
            cur.push(part);
            rec(remaining - part, part, cur, out);
            cur.pop();
            part -= 1;
        }
    }
    let mut out = Vec::new();
    rec(m, m, &mut Vec::new(), &mut out);
    out
}

/// All decorated partitions of `m` with decorations in `{0..n}`, canonical,
/// each exactly once.
pub fn all_weighted_partitions(m: u64, n: u32) -> Vec<WeightedPartition> {
    let mut out = Vec::new();
    for plain in plain_partitions(m) {
        // Group equal sizes; decorate each group with a multiset of sectors.
        let mut groups: Vec<(u64, usize)> = Vec::new();
        for &s in &plain {
            match groups.last_mut() {
                Some((size, count)) if *size == s => *count += 1,
                _ => groups.push((s, 1)),
            }
        }
        let mut partial: Vec<Vec<WeightedPart>> = vec![Vec::new()];
        for (size, count) in groups {
            let decs = decoration_multisets(n, count);
            let mut next = Vec::with_capacity(partial.len() * decs.len());
            for base in &partial {
                for ds in &decs {
                    let mut ext = base.clone();
                    for &d in ds {
                        ext.push(WeightedPart { size, dec: d });
                    }
                    next.push(ext);
                }
            }
            partial = next;
        }
        for parts in partial {
            out.push(WeightedPartition::new(parts, n).unwrap());
        }
    }
    out.sort();
    out
}

/// Non-decreasing tuples over `{0..n}` of the given length.
fn decoration_multisets(n: u32, len: usize) -> Vec<Vec<u32>> {
    fn rec(n: u32, len: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            out.push(cur.clone());
            return;
        }
        for d in min..=n {
            cur.push(d);
            rec(n, len - 1, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, len, 0, &mut Vec::new(), &mut out);
    out
}

/// Multiset of nonzero twisted sectors, sorted ascending.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Hash, Default)]
pub struct MonodromyVector {
    entries: Vec<u32>,
}

impl MonodromyVector {
    pub fn empty() -> Self {
        MonodromyVector::default()
    }

    pub fn new(mut entries: Vec<u32>, n: u32) -> Result<Self, PartitionError> {
        for &e in &entries {
            if e == 0 || e > n {
                return Err(PartitionError::SectorOutOfRange { sector: e, n });
            }
        }
        entries.sort_unstable();
        Ok(MonodromyVector { entries })
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> u64 {
        self.entries.iter().map(|&e| e as u64).sum()
    }

    /// Multiset automorphism count: product of multiplicity factorials.
    pub fn aut(&self) -> Rational {
        let mut acc = BigInt::from(1u32);
        let mut i = 0;
        while i < self.entries.len() {
            let mut j = i;
            while j < self.entries.len() && self.entries[j] == self.entries[i] {
                j += 1;
            }
            acc *= factorial_int((j - i) as u64);
            i = j;
        }
        Rational::from_bigint(acc)
    }

    /// New vector with `sector` inserted (kept sorted).
    pub fn with_inserted(&self, sector: u32) -> Self {
        let mut entries = self.entries.clone();
        entries.push(sector);
        entries.sort_unstable();
        MonodromyVector { entries }
    }

    /// Parses a comma-separated list; an empty string is the empty vector.
    pub fn parse(s: &str, n: u32) -> Result<Self, PartitionError> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let mut entries = Vec::new();
        for tok in s.split(',') {
            let e: u32 = tok
                .trim()
                .parse()
                .map_err(|_| PartitionError::Parse(format!("bad sector {tok:?}")))?;
            entries.push(e);
        }
        Self::new(entries, n)
    }

    pub fn format(&self) -> String {
        self.entries
            .iter()
            .map(|e| format!("{e}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

/// All monodromy vectors over `{1..n}` with length from 0 to `max_len`.
pub fn monodromy_vectors_up_to(n: u32, max_len: usize) -> Vec<MonodromyVector> {
    fn rec(n: u32, len: usize, min: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if len == 0 {
            out.push(cur.clone());
            return;
        }
        for d in min..=n {
            cur.push(d);
            rec(n, len - 1, d, cur, out);
            cur.pop();
        }
    }
    let mut raw = Vec::new();
    for len in 0..=max_len {
        if n == 0 && len > 0 {
            break;
        }
        rec(n, len, 1, &mut Vec::new(), &mut raw);
    }
    raw.into_iter()
        .map(|entries| MonodromyVector { entries })
        .collect()
}

/// Total twisting parity: the key is admissible iff the decoration sums and
/// monodromies cancel mod `n+1`.
pub fn parity_holds(mu: &WeightedPartition, nu: &WeightedPartition, gamma: &MonodromyVector, n: u32) -> bool {
    (mu.decoration_sum() + nu.decoration_sum() + gamma.sum()) % (n as u64 + 1) == 0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_and_stats() {
        let p = WeightedPartition::from_pairs(&[(1, 2), (3, 1), (3, 0), (1, 0)], 2);
        assert_eq!(
            p.parts(),
            &[
                WeightedPart { size: 3, dec: 0 },
                WeightedPart { size: 3, dec: 1 },
                WeightedPart { size: 1, dec: 0 },
                WeightedPart { size: 1, dec: 2 },
            ]
        );
        assert_eq!(p.size(), 8);
        assert_eq!(p.len(), 4);
        assert_eq!(p.len_trivial(), 2);
        assert_eq!(p.len_twisted(), 2);
        assert_eq!(p.decoration_sum(), 3);
    }

    #[test]
    fn automorphisms() {
        let p = WeightedPartition::from_pairs(&[(2, 1), (2, 2), (1, 0)], 2);
        assert_eq!(p.aut_plain(), Rational::from_int(2));
        assert_eq!(p.aut_decorated(), Rational::one());
        let q = WeightedPartition::from_pairs(&[(2, 1), (2, 1), (2, 1)], 2);
        assert_eq!(q.aut_decorated(), Rational::from_int(6));
        // Gluing factor: |Aut| * (n+1)^l * prod sizes = 6 * 27 * 8.
        assert_eq!(q.gluing_factor(2), Rational::from_int(6 * 27 * 8));
    }

    #[test]
    fn negation_is_involution() {
        let n = 3;
        for p in all_weighted_partitions(3, n) {
            assert_eq!(p.negate_decorations(n).negate_decorations(n), p);
        }
        let p = WeightedPartition::from_pairs(&[(2, 1), (1, 0), (1, 3)], 3);
        assert_eq!(
            p.negate_decorations(3),
            WeightedPartition::from_pairs(&[(2, 3), (1, 0), (1, 1)], 3)
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(plain_partitions(5).len(), 7);
        assert_eq!(all_weighted_partitions(2, 1).len(), 5);
        assert_eq!(all_weighted_partitions(3, 1).len(), 10);
        // Every enumerated partition is distinct and canonical.
        let all = all_weighted_partitions(4, 2);
        for w in all.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn parsing_roundtrip() {
        let p = WeightedPartition::parse("(3,1) (1,0)(1,2)", 2).unwrap();
        assert_eq!(p.format(), "(3,1)(1,0)(1,2)");
        assert!(WeightedPartition::parse("(3,5)", 2).is_err());
        assert!(WeightedPartition::parse("(0,1)", 2).is_err());
        assert!(WeightedPartition::parse("", 2).is_err());
        let g = MonodromyVector::parse("2, 1, 1", 2).unwrap();
        assert_eq!(g.format(), "1,1,2");
        assert_eq!(g.aut(), Rational::from_int(2));
        assert!(MonodromyVector::parse("0", 2).is_err());
        assert!(MonodromyVector::parse("3", 2).is_err());
        assert_eq!(MonodromyVector::parse("", 2).unwrap().len(), 0);
    }

    #[test]
    fn monodromy_enumeration() {
        // Lengths 0..=2 over {1,2}: 1 + 2 + 3 = 6.
        assert_eq!(monodromy_vectors_up_to(2, 2).len(), 6);
        assert_eq!(monodromy_vectors_up_to(0, 3).len(), 1);
    }

    #[test]
    fn parity() {
        let n = 2;
        let mu = WeightedPartition::from_pairs(&[(1, 1)], n);
        let nu = WeightedPartition::from_pairs(&[(1, 1)], n);
        let g1 = MonodromyVector::new(vec![1], n).unwrap();
        assert!(parity_holds(&mu, &nu, &g1, n));
        assert!(!parity_holds(&mu, &nu, &MonodromyVector::empty(), n));
    }
}
