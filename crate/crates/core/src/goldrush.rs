//! Gold-rush game: every player picks a label, players sharing a label form
//! a consortium, and the best eligible consortium wins.
//!
//! Outcomes depend only on the partition into label classes, so labelings
//! are enumerated as set partitions.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::equilibrium::{check_limit, Stability};
use crate::error::Result;
use crate::model::{Consortium, Instance, Outcome};
use crate::network::{self, Mask, Network};
use crate::par;
use crate::partition::{Labeling, SetPartitions};
use crate::rational::Rational;
use crate::subsets::{find_sow, SowResult};

/// A unilateral relabeling that strictly helps the player.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relabel {
    pub player: usize,
    pub label: usize,
}

/// A coalition and the full labeling after it moves.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldrushDeviation {
    pub coalition: Consortium,
    pub labels: Labeling,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum PriceOfAnarchy {
    Bounded(Rational),
    /// Every Nash equilibrium leaves the prize unawarded.
    Unbounded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoldrushReport {
    pub sow: SowResult,
    pub labelings: usize,
    pub nash_equilibria: usize,
    /// Winners of Nash equilibria; `None` stands for "no winner".
    pub nash_winners: BTreeSet<Option<Consortium>>,
    pub poa: PriceOfAnarchy,
    pub worst_nash: Option<Labeling>,
}

fn winner_of(net: &Network, classes: &[Mask]) -> Option<Mask> {
    net.best(classes.iter().copied().filter(|&c| net.is_eligible(c)))
}

/// Strict gain for a player going from old winner to new winner.
fn gains(player_bit: Mask, old: Option<Mask>, new: Option<Mask>) -> bool {
    match new {
        Some(w) if w & player_bit != 0 => match old {
            Some(o) if o & player_bit != 0 => network::size(w) < network::size(o),
            _ => true,
        },
        _ => false,
    }
}

pub fn goldrush_outcome(inst: &Instance, lab: &Labeling) -> Outcome {
    Outcome::new(inst, winner_of(inst.net(), &lab.class_masks()).map(|m| inst.consortium_of(m)))
}

fn label_of_class(lab: &Labeling, class: Mask) -> usize {
    lab.labels()[class.trailing_zeros() as usize]
}

/// Smallest label in `0..=n` not used by anyone outside `movers`.
fn fresh_label(lab: &Labeling, movers: Mask) -> usize {
    let used: Vec<usize> = (0..lab.len()).filter(|i| movers >> i & 1 == 0).map(|i| lab.labels()[i]).collect();
    (0..=lab.len()).find(|l| !used.contains(l)).expect("n+1 labels for n players")
}

/// Nash test; the witness names a player and a better label.
pub fn goldrush_is_nash(inst: &Instance, lab: &Labeling) -> Stability<Relabel> {
    let net = inst.net();
    let classes = lab.class_masks();
    let old = winner_of(net, &classes);
    for i in 0..inst.n() {
        let bit: Mask = 1 << i;
        let rest: Vec<Mask> = classes.iter().map(|&c| c & !bit).filter(|&c| c != 0).collect();
        let alone = classes.contains(&bit);
        let targets = rest.iter().map(|&c| Some(c)).chain((!alone).then_some(None));
        for target in targets {
            let moved: Vec<Mask> = match target {
                Some(t) => rest.iter().map(|&c| if c == t { c | bit } else { c }).collect(),
                None => rest.iter().copied().chain([bit]).collect(),
            };
            if gains(bit, old, winner_of(net, &moved)) {
                let label = match target {
                    Some(t) => label_of_class(lab, t),
                    None => fresh_label(lab, bit),
                };
                return Stability::Unstable(Relabel { player: i, label });
            }
        }
    }
    Stability::Stable
}

/// Strong-equilibrium test. Every member of a profitable coalition must be
/// in the new winner, so the coalition moves as one class, either on its own
/// or joining one class of the players that stay put.
pub fn goldrush_is_strong(inst: &Instance, lab: &Labeling) -> Stability<GoldrushDeviation> {
    let net = inst.net();
    let classes = lab.class_masks();
    let old = winner_of(net, &classes);
    for s in 1..=net.full() {
        let rest: Vec<Mask> = classes.iter().map(|&c| c & !s).filter(|&c| c != 0).collect();
        for target in rest.iter().map(|&c| Some(c)).chain([None]) {
            let moved: Vec<Mask> = match target {
                Some(t) => rest.iter().map(|&c| if c == t { c | s } else { c }).collect(),
                None => rest.iter().copied().chain([s]).collect(),
            };
            let new = winner_of(net, &moved);
            if network::members(s).all(|i| gains(1 << i, old, new)) {
                let label = match target {
                    Some(t) => label_of_class(lab, t),
                    None => fresh_label(lab, s),
                };
                let mut labels = lab.labels().to_vec();
                for i in network::members(s) {
                    labels[i] = label;
                }
                return Stability::Unstable(GoldrushDeviation {
                    coalition: inst.consortium_of(s),
                    labels: Labeling::new(labels),
                });
            }
        }
        if s == net.full() {
            break;
        }
    }
    Stability::Stable
}

/// Nash winners over all labelings up to renaming, and the price of anarchy.
pub fn goldrush_report(inst: &Instance, limit: usize) -> Result<GoldrushReport> {
    check_limit(inst, limit)?;
    let sow = find_sow(inst)?;
    let labelings: Vec<Labeling> = SetPartitions::new(inst.n()).map(Labeling::new).collect();
    let verdicts = par::map(&labelings, |lab| {
        goldrush_is_nash(inst, lab).is_stable().then(|| winner_of(inst.net(), &lab.class_masks()))
    });
    let net = inst.net();
    let mut nash_winners = BTreeSet::new();
    let mut nash = 0;
    let mut worst: Option<(Mask, &Labeling)> = None;
    for (lab, v) in labelings.iter().zip(&verdicts) {
        if let Some(w) = v {
            nash += 1;
            nash_winners.insert(w.map(|m| inst.consortium_of(m)));
            if let Some(m) = *w {
                if worst.is_none_or(|(b, _)| net.avg_gt(b, m)) {
                    worst = Some((m, lab));
                }
            }
        }
    }
    let poa = match worst {
        Some((m, _)) => PriceOfAnarchy::Bounded(sow.avg / inst.avg_of_mask(m)),
        None => PriceOfAnarchy::Unbounded,
    };
    Ok(GoldrushReport {
        sow,
        labelings: labelings.len(),
        nash_equilibria: nash,
        nash_winners,
        poa,
        worst_nash: worst.map(|(_, l)| l.clone()),
    })
}
