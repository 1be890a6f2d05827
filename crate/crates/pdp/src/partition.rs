//! Partition representations: size-biased index sequences, set partitions,
//! and the multiplicity / indicator vectors used by the discrete-base
//! evidence formulas.

use crate::error::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::hash::Hash;

/// Upper limit for exhaustive partition enumeration (Bell(12) is about 4.2e6).
pub const ENUMERATION_CAP: usize = 12;

/// A partition of {1..N} in size-biased order: item i belongs to block
/// `assignments[i-1]`, blocks are numbered 1..=M by order of first
/// appearance, so `assignments[0] == 1` and each later entry is at most
/// one past the running maximum.
///
/// `counts[k-1]` is the size of block k. The counts are what the
/// probability formulas consume; the assignment sequence is what the
/// set-level fragmentation and coagulation operations consume.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SizeBiasedPartition {
    assignments: Vec<usize>,
    counts: Vec<usize>,
}

impl SizeBiasedPartition {
    /// Builds from an assignment sequence already in size-biased form.
    pub fn from_assignments(assignments: Vec<usize>) -> Result<SizeBiasedPartition> {
        if assignments.is_empty() {
            return Err(Error::invalid("empty assignment sequence"));
        }
        let mut counts: Vec<usize> = Vec::new();
        for (i, &k) in assignments.iter().enumerate() {
            if k == 0 || k > counts.len() + 1 {
                return Err(Error::invalid(format!(
                    "assignment {k} at position {i} breaks size-biased numbering (running max {})",
                    counts.len()
                )));
            }
            if k == counts.len() + 1 {
                counts.push(1);
            } else {
                counts[k - 1] += 1;
            }
        }
        Ok(SizeBiasedPartition { assignments, counts })
    }

    /// Number of items N.
    pub fn n(&self) -> usize {
        self.assignments.len()
    }

    /// Number of blocks M.
    pub fn m(&self) -> usize {
        self.counts.len()
    }

    /// Block index (1-based) per item.
    pub fn assignments(&self) -> &[usize] {
        &self.assignments
    }

    /// Block sizes, indexed by block number - 1.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// The blocks as sets over ground set {1..N}.
    pub fn to_set_partition(&self) -> SetPartition {
        let mut blocks: Vec<Vec<usize>> = vec![Vec::new(); self.m()];
        for (i, &k) in self.assignments.iter().enumerate() {
            blocks[k - 1].push(i + 1);
        }
        // first appearance order equals least-element order here
        SetPartition { blocks }
    }
}

/// Maps an arbitrary label sequence to size-biased index form, relabelling
/// by order of first appearance: 12,435,7198,12,12,35,7198 -> 1,2,3,1,1,4,3.
pub fn canonicalize<T: Eq + Hash>(labels: &[T]) -> Result<SizeBiasedPartition> {
    if labels.is_empty() {
        return Err(Error::invalid("empty label sequence"));
    }
    let mut seen: HashMap<&T, usize> = HashMap::new();
    let mut assignments = Vec::with_capacity(labels.len());
    let mut counts = Vec::new();
    for label in labels {
        let next = seen.len() + 1;
        let k = *seen.entry(label).or_insert(next);
        if k == next {
            counts.push(1);
        } else {
            counts[k - 1] += 1;
        }
        assignments.push(k);
    }
    Ok(SizeBiasedPartition { assignments, counts })
}

/// Calls `f` once per partition of {1..n}, each presented in size-biased
/// form through a reused buffer. n is capped at [`ENUMERATION_CAP`].
pub fn for_each_partition<F: FnMut(&SizeBiasedPartition)>(n: usize, mut f: F) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("cannot enumerate partitions of zero items"));
    }
    if n > ENUMERATION_CAP {
        return Err(Error::invalid(format!(
            "partition enumeration capped at n <= {ENUMERATION_CAP}, got {n}"
        )));
    }
    let mut scratch = SizeBiasedPartition { assignments: vec![1; n], counts: vec![n] };
    fn rec<F: FnMut(&SizeBiasedPartition)>(p: &mut SizeBiasedPartition, pos: usize, f: &mut F) {
        let n = p.assignments.len();
        if pos == n {
            f(p);
            return;
        }
        let m = p.counts.len();
        for k in 1..=m + 1 {
            if k == m + 1 {
                p.counts.push(0);
            }
            p.assignments[pos] = k;
            p.counts[k - 1] += 1;
            rec(p, pos + 1, f);
            p.counts[k - 1] -= 1;
            if k == m + 1 {
                p.counts.pop();
            }
        }
    }
    // item 1 always opens block 1
    scratch.counts = vec![1];
    scratch.assignments[0] = 1;
    rec(&mut scratch, 1, &mut f);
    Ok(())
}

/// All partitions of {1..n} in size-biased form. Materializes Bell(n)
/// partitions; prefer [`for_each_partition`] when streaming suffices.
pub fn enumerate_partitions(n: usize) -> Result<Vec<SizeBiasedPartition>> {
    let mut out = Vec::new();
    for_each_partition(n, |p| out.push(p.clone()))?;
    Ok(out)
}

/// A partition of an arbitrary finite set of positive integers, held as
/// sorted blocks ordered by least element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds from blocks in any order; sorts members and orders blocks by
    /// least element. Blocks must be nonempty and pairwise disjoint.
    pub fn new(mut blocks: Vec<Vec<usize>>) -> Result<SetPartition> {
        if blocks.is_empty() {
            return Err(Error::invalid("set partition needs at least one block"));
        }
        let mut seen = std::collections::HashSet::new();
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::invalid("set partition blocks must be nonempty"));
            }
            b.sort_unstable();
            for &e in b.iter() {
                if !seen.insert(e) {
                    return Err(Error::invalid(format!("element {e} appears in two blocks")));
                }
            }
        }
        blocks.sort_by_key(|b| b[0]);
        Ok(SetPartition { blocks })
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn counts(&self) -> Vec<usize> {
        self.blocks.iter().map(Vec::len).collect()
    }

    pub fn ground_size(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Reads off the size-biased assignment sequence; requires the ground
    /// set to be exactly {1..N}.
    pub fn to_size_biased(&self) -> Result<SizeBiasedPartition> {
        let n = self.ground_size();
        let mut owner = vec![0usize; n];
        for (bi, b) in self.blocks.iter().enumerate() {
            for &e in b {
                if e == 0 || e > n {
                    return Err(Error::invalid(format!(
                        "ground set must be {{1..{n}}} to form an index sequence, found element {e}"
                    )));
                }
                owner[e - 1] = bi + 1;
            }
        }
        // blocks are ordered by least element, which is first-appearance
        // order when items are visited 1..N
        SizeBiasedPartition::from_assignments(owner)
    }
}

/// Per-block table multiplicities for a discrete base: `t[m]` tables serve
/// block m's value. Valid against counts when 1 <= t[m] <= n[m].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiplicityVector {
    t: Vec<usize>,
}

impl MultiplicityVector {
    pub fn new(t: Vec<usize>, counts: &[usize]) -> Result<MultiplicityVector> {
        if t.len() != counts.len() {
            return Err(Error::invalid(format!(
                "multiplicity vector length {} does not match {} blocks",
                t.len(),
                counts.len()
            )));
        }
        for (m, (&tm, &nm)) in t.iter().zip(counts).enumerate() {
            if tm == 0 || tm > nm {
                return Err(Error::invalid(format!(
                    "multiplicity t[{m}]={tm} outside 1..={nm}"
                )));
            }
        }
        Ok(MultiplicityVector { t })
    }

    pub fn values(&self) -> &[usize] {
        &self.t
    }

    /// Total table count T = sum of multiplicities.
    pub fn total(&self) -> usize {
        self.t.iter().sum()
    }
}

/// Table indicators for the items of one block: `r[i] = 1` marks item i as
/// opening a table. At least one item must open.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndicatorVector {
    r: Vec<u8>,
}

impl IndicatorVector {
    pub fn new(r: Vec<u8>) -> Result<IndicatorVector> {
        if r.is_empty() {
            return Err(Error::invalid("indicator vector must be nonempty"));
        }
        if r.iter().any(|&x| x > 1) {
            return Err(Error::invalid("indicators must be 0 or 1"));
        }
        if r.iter().all(|&x| x == 0) {
            return Err(Error::invalid("indicator vector needs at least one 1"));
        }
        Ok(IndicatorVector { r })
    }

    pub fn values(&self) -> &[u8] {
        &self.r
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Implied multiplicity t = number of ones.
    pub fn multiplicity(&self) -> usize {
        self.r.iter().map(|&x| x as usize).sum()
    }
}
