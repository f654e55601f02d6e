//! Set partitions, gold-rush labelings and proposal profiles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Consortium;
use crate::network::{self, Mask};

/// Iterates restricted growth strings of length `n`: `a[0] = 0` and
/// `a[i] <= 1 + max(a[..i])`. Each string encodes one set partition, so the
/// iterator yields Bell(n) items.
pub struct SetPartitions {
    labels: Vec<usize>,
    maxes: Vec<usize>,
    done: bool,
}

impl SetPartitions {
    pub fn new(n: usize) -> Self {
        SetPartitions { labels: vec![0; n], maxes: vec![0; n], done: n == 0 }
    }
}

impl Iterator for SetPartitions {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.labels.clone();
        let n = self.labels.len();
        // Find the rightmost position that can still be incremented.
        let mut i = n;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.maxes[i - 1] {
                self.labels[i] += 1;
                self.maxes[i] = self.maxes[i - 1].max(self.labels[i]);
                for j in i + 1..n {
                    self.labels[j] = 0;
                    self.maxes[j] = self.maxes[i];
                }
                break;
            }
        }
        Some(out)
    }
}

/// Bell number, by the Bell triangle.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            let last = *next.last().unwrap();
            next.push(last + x);
        }
        row = next;
    }
    row[0]
}

/// Gold-rush strategy profile: one label per player.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling(pub Vec<usize>);

impl Labeling {
    pub fn new(labels: Vec<usize>) -> Self {
        Labeling(labels)
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Label classes as masks, ordered by smallest member.
    pub(crate) fn class_masks(&self) -> Vec<Mask> {
        let mut classes: Vec<(usize, Mask)> = Vec::new();
        for (i, &l) in self.0.iter().enumerate() {
            match classes.iter_mut().find(|(label, _)| *label == l) {
                Some((_, m)) => *m |= 1 << i,
                None => classes.push((l, 1 << i)),
            }
        }
        classes.into_iter().map(|(_, m)| m).collect()
    }

    /// Renames labels to first-occurrence order, so equal partitions compare equal.
    pub fn canonical(&self) -> Labeling {
        let mut map: Vec<(usize, usize)> = Vec::new();
        let labels = self
            .0
            .iter()
            .map(|&l| match map.iter().find(|(from, _)| *from == l) {
                Some(&(_, to)) => to,
                None => {
                    let to = map.len();
                    map.push((l, to));
                    to
                }
            })
            .collect();
        Labeling(labels)
    }
}

/// Canonical round-1 strategy state: a partition of the players into the
/// blocks they propose, ordered by smallest member.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ProposalProfile {
    blocks: Vec<Consortium>,
}

impl ProposalProfile {
    /// Requires the blocks to cover `0..n` exactly once.
    pub fn new(n: usize, blocks: Vec<Consortium>) -> Result<Self> {
        let mut seen: Mask = 0;
        for b in &blocks {
            for &i in b.members() {
                if i >= n {
                    return Err(Error::InvalidProfile(format!("player {i} does not exist")));
                }
                if seen >> i & 1 == 1 {
                    return Err(Error::InvalidProfile(format!("player {i} appears twice")));
                }
                seen |= 1 << i;
            }
        }
        if network::size(seen) != n {
            return Err(Error::InvalidProfile("blocks do not cover every player".into()));
        }
        Ok(Self::from_sorted(blocks))
    }

    /// The given blocks plus a singleton for every uncovered player.
    pub fn with_singletons(n: usize, blocks: Vec<Consortium>) -> Result<Self> {
        let covered = network::mask_of(blocks.iter().flat_map(|b| b.members().iter().copied()));
        let mut all = blocks;
        for i in 0..n {
            if covered >> i & 1 == 0 {
                all.push(Consortium::new([i])?);
            }
        }
        Self::new(n, all)
    }

    pub fn singletons(n: usize) -> Self {
        Self::from_sorted((0..n).map(|i| Consortium::new([i]).unwrap()).collect())
    }

    pub fn from_labeling(lab: &Labeling) -> Self {
        Self::from_masks(&lab.class_masks())
    }

    pub(crate) fn from_masks(masks: &[Mask]) -> Self {
        Self::from_sorted(masks.iter().map(|&m| Consortium::from_sorted(network::members(m).collect())).collect())
    }

    fn from_sorted(mut blocks: Vec<Consortium>) -> Self {
        blocks.sort_by_key(|b| b.members()[0]);
        ProposalProfile { blocks }
    }

    pub fn blocks(&self) -> &[Consortium] {
        &self.blocks
    }

    pub fn n(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    pub(crate) fn masks(&self) -> Vec<Mask> {
        self.blocks.iter().map(|b| network::mask_of(b.members().iter().copied())).collect()
    }

    /// Labeling that realizes this partition in the gold-rush game.
    pub fn to_labeling(&self) -> Labeling {
        let mut labels = vec![0; self.n()];
        for (l, b) in self.blocks.iter().enumerate() {
            for &i in b.members() {
                labels[i] = l;
            }
        }
        Labeling(labels)
    }
}

// Compact text form: blocks separated by `|`, members by `,` (e.g. `0,1,3|2`).
impl fmt::Display for ProposalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, b) in self.blocks.iter().enumerate() {
            if i > 0 {
                write!(f, "|")?;
            }
            let ids: Vec<String> = b.members().iter().map(|m| m.to_string()).collect();
            write!(f, "{}", ids.join(","))?;
        }
        Ok(())
    }
}

impl fmt::Debug for ProposalProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the block list only; callers check coverage with [`ProposalProfile::new`]
/// or pad with [`ProposalProfile::with_singletons`].
impl FromStr for ProposalProfile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let blocks = parse_blocks(s)?;
        let n = blocks.iter().map(|b| b.len()).sum();
        ProposalProfile::new(n, blocks)
    }
}

pub fn parse_blocks(s: &str) -> Result<Vec<Consortium>> {
    s.split('|')
        .filter(|b| !b.trim().is_empty())
        .map(|b| {
            let ids = b
                .split(',')
                .map(|x| x.trim().parse::<usize>().map_err(|e| Error::Parse(format!("bad player id {x:?}: {e}"))))
                .collect::<Result<Vec<_>>>()?;
            Consortium::new(ids)
        })
        .collect()
}
