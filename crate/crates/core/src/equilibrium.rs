//! Strong-equilibrium search shared by the CCC and MAGNET games.
//!
//! Both games share the same round-1 rule (the best eligible consistent
//! block wins) and differ only in how the round-1 winner becomes the final
//! winner: CCC keeps it, MAGNET runs the appeal closure. The search is
//! written once against a `finalize` map from round-1 winner to final
//! winner.
//!
//! Two reductions keep the search small:
//!
//! * A block that is not eligible can never win and, once broken, leaves
//!   only ineligible pieces behind, so it is outcome-equivalent to its
//!   members proposing singletons. Profiles are therefore enumerated as
//!   packings of disjoint eligible sets.
//! * Every deviator must end up in the new final winner `F`, which is
//!   `finalize(B)` for the new round-1 winner `B`. For a fixed `B` the
//!   largest admissible coalition (every member of `F` who strictly gains)
//!   breaks the most competing blocks, so it is the only one worth testing.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Consortium, Instance};
use crate::network::{self, Mask, Network};
use crate::par;
use crate::partition::ProposalProfile;
use crate::rational::Rational;
use crate::subsets::{find_sow, SowResult};

/// Default cap on the number of players for exhaustive equilibrium reports.
pub const DEFAULT_LIMIT: usize = 6;

/// A joint deviation: the coalition and the blocks its members now propose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Deviation {
    pub coalition: Consortium,
    pub blocks: Vec<Consortium>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Stability<W> {
    Stable,
    Unstable(W),
}

impl<W> Stability<W> {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable)
    }

    pub fn witness(&self) -> Option<&W> {
        match self {
            Stability::Stable => None,
            Stability::Unstable(w) => Some(w),
        }
    }
}

/// One strong-equilibrium profile with a winner.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equilibrium {
    pub profile: ProposalProfile,
    pub round1: Consortium,
    pub winner: Consortium,
    pub avg: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumReport {
    pub sow: SowResult,
    /// Canonical profiles examined (packings of disjoint eligible sets).
    pub profiles: usize,
    pub equilibria: Vec<Equilibrium>,
    pub winnerless_equilibria: usize,
    pub se_winners: Vec<Consortium>,
    pub spoa: Rational,
    pub spos: Rational,
    pub worst: Equilibrium,
    pub best: Equilibrium,
}

/// Drops blocks that cannot win.
pub(crate) fn eligible_blocks(net: &Network, blocks: &[Mask]) -> Vec<Mask> {
    blocks.iter().copied().filter(|&b| net.is_eligible(b)).collect()
}

/// Final winner of a profile whose eligible blocks are `blocks`.
pub(crate) fn final_winner(net: &Network, blocks: &[Mask], finalize: &impl Fn(Mask) -> Mask) -> Option<(Mask, Mask)> {
    net.best(blocks.iter().copied()).map(|w1| (w1, finalize(w1)))
}

/// A profitable deviation from the profile with eligible blocks `blocks`,
/// as (coalition, block formed by the coalition or 0 for none).
pub(crate) fn find_deviation(
    net: &Network,
    blocks: &[Mask],
    eligible: &[Mask],
    finalize: &impl Fn(Mask) -> Mask,
) -> Option<(Mask, Mask)> {
    let old_final = final_winner(net, blocks, finalize).map_or(0, |(_, f)| f);
    let old_size = network::size(old_final);
    for &b in eligible {
        let f = finalize(b);
        let mut gainers = f & !old_final;
        if old_final != 0 && network::size(f) < old_size {
            gainers |= f & old_final;
        }
        if gainers == 0 {
            continue;
        }
        // The coalition proposes `b` itself and breaks every block it touches.
        if b & !gainers == 0 && blocks.iter().all(|&c| c & gainers != 0 || !net.beats(c, b)) {
            return Some((gainers, b));
        }
        // `b` is an existing block left intact; the coalition only breaks rivals.
        if blocks.contains(&b) {
            let s = gainers & !b;
            if s != 0 && blocks.iter().all(|&c| c == b || c & s != 0 || !net.beats(c, b)) {
                return Some((s, 0));
            }
        }
    }
    None
}

pub(crate) fn deviation_witness(inst: &Instance, coalition: Mask, block: Mask) -> Deviation {
    let mut blocks = Vec::new();
    if block != 0 {
        blocks.push(inst.consortium_of(block));
    }
    blocks.extend(network::members(coalition & !block).map(|i| inst.consortium_of(1 << i)));
    Deviation { coalition: inst.consortium_of(coalition), blocks }
}

/// Every set of pairwise disjoint eligible sets, including the empty one.
pub(crate) fn packings(eligible: &[Mask]) -> Vec<Vec<Mask>> {
    fn grow(eligible: &[Mask], from: usize, used: Mask, current: &mut Vec<Mask>, out: &mut Vec<Vec<Mask>>) {
        out.push(current.clone());
        for (i, &e) in eligible.iter().enumerate().skip(from) {
            if e & used == 0 {
                current.push(e);
                grow(eligible, i + 1, used | e, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    grow(eligible, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Profile built from eligible blocks, everyone else proposing alone.
pub(crate) fn profile_from_packing(net: &Network, blocks: &[Mask]) -> ProposalProfile {
    let covered = blocks.iter().fold(0, |a, b| a | b);
    let mut all: Vec<Mask> = blocks.to_vec();
    all.extend(network::members(net.full() & !covered).map(|i| 1 << i));
    ProposalProfile::from_masks(&all)
}

pub(crate) fn check_limit(inst: &Instance, limit: usize) -> Result<()> {
    if inst.n() > limit {
        Err(Error::TooLarge { n: inst.n(), limit })
    } else {
        Ok(())
    }
}

/// Exhaustive report over all canonical profiles.
pub(crate) fn report(inst: &Instance, finalize: &(impl Fn(Mask) -> Mask + Sync)) -> Result<EquilibriumReport> {
    let net = inst.net();
    let sow = find_sow(inst)?;
    let eligible = net.eligible_sets();
    let profiles = packings(&eligible);
    let verdicts = par::map(&profiles, |blocks| {
        if find_deviation(net, blocks, &eligible, finalize).is_some() {
            None
        } else {
            Some(final_winner(net, blocks, finalize))
        }
    });
    let mut equilibria = Vec::new();
    let mut winnerless = 0;
    for (blocks, verdict) in profiles.iter().zip(verdicts) {
        match verdict {
            None => {}
            Some(None) => winnerless += 1,
            Some(Some((w1, f))) => equilibria.push((blocks, w1, f)),
        }
    }
    let worst =
        equilibria.iter().copied().min_by(|a, b| net.rank_cmp(b.2, a.2)).ok_or(Error::NoStrongEquilibriumWithWinner)?;
    let best = equilibria.iter().copied().min_by(|a, b| net.rank_cmp(a.2, b.2)).unwrap();
    let to_eq = |(blocks, w1, f): (&Vec<Mask>, Mask, Mask)| Equilibrium {
        profile: profile_from_packing(net, blocks),
        round1: inst.consortium_of(w1),
        winner: inst.consortium_of(f),
        avg: inst.avg_of_mask(f),
    };
    let worst = to_eq(worst);
    let best = to_eq(best);
    let se_winners: BTreeSet<Consortium> = equilibria.iter().map(|e| inst.consortium_of(e.2)).collect();
    Ok(EquilibriumReport {
        spoa: sow.avg / worst.avg,
        spos: sow.avg / best.avg,
        sow,
        profiles: profiles.len(),
        equilibria: equilibria.into_iter().map(to_eq).collect(),
        winnerless_equilibria: winnerless,
        se_winners: se_winners.into_iter().collect(),
        worst,
        best,
    })
}

/// Memoized finalize map over every eligible set.
pub(crate) fn memo(eligible: &[Mask], f: impl Fn(Mask) -> Mask + Sync + Send) -> HashMap<Mask, Mask> {
    let finals = par::map(eligible, |&m| f(m));
    eligible.iter().copied().zip(finals).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packings_are_disjoint_and_complete() {
        let sets = [0b0011, 0b0110, 0b1100, 0b1000];
        let p = packings(&sets);
        // {}, each single set, {0011,1100}, {0011,1000}, {0110,1000}
        assert_eq!(p.len(), 8);
        for packing in &p {
            let mut used = 0;
            for &m in packing {
                assert_eq!(used & m, 0);
                used |= m;
            }
        }
    }
}
