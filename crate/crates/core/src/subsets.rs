//! Connected-subset enumeration and the social optimum winner (SOW).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Consortium, Instance};
use crate::network::{self, Mask};
use crate::par;
use crate::rational::Rational;

/// Minimal-size eligible consortium of maximum average, ties broken by the
/// lexicographically smallest member list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SowResult {
    #[serde(rename = "members")]
    pub consortium: Consortium,
    pub avg: Rational,
    #[serde(rename = "k")]
    pub size: usize,
}

/// Every connected subset of at most `max_size` players (all sizes when
/// `None`), smallest first and lexicographic within a size.
pub fn connected_subsets(inst: &Instance, max_size: Option<usize>) -> impl Iterator<Item = Consortium> + '_ {
    let net = inst.net();
    let limit = max_size.unwrap_or(inst.n()).min(inst.n());
    let mut masks = net.connected_sets(limit);
    masks.sort_by(|&a, &b| network::size(a).cmp(&network::size(b)).then(network::lex_cmp_same_size(a, b)));
    masks.into_iter().map(move |m| inst.consortium_of(m))
}

pub(crate) fn sow_mask(inst: &Instance) -> Option<Mask> {
    let net = inst.net();
    // One shard per anchor (smallest member); the ranking is a total order so
    // the merged result does not depend on shard order.
    let shards = par::map_range(inst.n(), |anchor| {
        let mut best: Option<Mask> = None;
        net.connected_with_anchor(anchor, inst.n(), &mut |m| {
            if net.sum(m) >= net.threshold() && best.is_none_or(|b| net.beats(m, b)) {
                best = Some(m);
            }
        });
        best
    });
    net.best(shards.into_iter().flatten())
}

pub fn find_sow(inst: &Instance) -> Result<SowResult> {
    let m = sow_mask(inst).ok_or(Error::NoEligibleConsortium)?;
    Ok(SowResult { consortium: inst.consortium_of(m), avg: inst.avg_of_mask(m), size: network::size(m) })
}

/// Minimum hop count from `u` to a member of `s`; `None` when unreachable.
pub fn distance(inst: &Instance, u: usize, s: &Consortium) -> Option<usize> {
    inst.net().distance(u, inst.mask(s))
}
