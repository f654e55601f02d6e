//! MAGNET game: a CCC round followed by appeal rounds.
//!
//! In each appeal round every nonempty set `X` of outsiders with `X ∪ W`
//! connected and `avg(X ∪ W) > avg(W)` (strict, against the winner `W` at
//! the start of the round) is accepted, and all accepted sets join `W`
//! together. Rounds repeat until nothing is accepted. Outsiders always
//! appeal when they can, so the final winner is a function of the round-1
//! winner alone.

use serde::Serialize;

use crate::ccc::ccc_winner;
use crate::equilibrium::{self, Deviation, EquilibriumReport, Stability};
use crate::error::{Error, Result};
use crate::model::{is_eligible, Consortium, Instance, Outcome};
use crate::network::{self, Mask, Network};
use crate::partition::ProposalProfile;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureRound {
    pub winner_before: Consortium,
    pub accepted_appeals: Vec<Consortium>,
    pub winner_after: Consortium,
}

/// Round-by-round record of the appeal process; the last round accepts nothing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClosureTrace {
    pub rounds: Vec<ClosureRound>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Closure {
    #[serde(rename = "final")]
    pub final_winner: Consortium,
    pub trace: ClosureTrace,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MagnetOutcome {
    pub outcome: Outcome,
    pub round1: Option<Consortium>,
    pub trace: Option<ClosureTrace>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MagnetReport {
    #[serde(flatten)]
    pub report: EquilibriumReport,
    /// One trace per distinct round-1 winner among the equilibria.
    pub traces: Vec<ClosureTrace>,
}

fn improves(net: &Network, x: Mask, w: Mask, w_size: i128, w_sum: i128) -> bool {
    // avg(X ∪ W) > avg(W)  <=>  avg(X) > avg(W)
    net.sum(x) * w_size > w_sum * network::size(x) as i128 && net.is_connected(x | w)
}

/// Every appeal accepted against `w` in one round.
pub(crate) fn accepted_appeals(net: &Network, w: Mask) -> Vec<Mask> {
    let outside = net.full() & !w;
    let (w_size, w_sum) = (network::size(w) as i128, net.sum(w));
    let mut out = Vec::new();
    let mut x = outside;
    while x != 0 {
        if improves(net, x, w, w_size, w_sum) {
            out.push(x);
        }
        x = (x - 1) & outside;
    }
    out.sort_by(|&a, &b| network::size(a).cmp(&network::size(b)).then(network::lex_cmp_same_size(a, b)));
    out
}

/// Union of the appeals accepted against `w`.
fn appeal_union(net: &Network, w: Mask) -> Mask {
    let outside = net.full() & !w;
    let (w_size, w_sum) = (network::size(w) as i128, net.sum(w));
    let mut union = 0;
    let mut x = outside;
    while x != 0 {
        if x & !union != 0 && improves(net, x, w, w_size, w_sum) {
            union |= x;
        }
        x = (x - 1) & outside;
    }
    union
}

/// Fixed point of the appeal process started from `w`.
pub(crate) fn closure_mask(net: &Network, mut w: Mask) -> Mask {
    loop {
        let grow = appeal_union(net, w);
        if grow == 0 {
            return w;
        }
        w |= grow;
    }
}

pub fn magnet_closure(inst: &Instance, w1: &Consortium) -> Result<Closure> {
    if !is_eligible(inst, w1) {
        return Err(Error::IneligibleStart(w1.to_string()));
    }
    let net = inst.net();
    let mut w = inst.mask(w1);
    let mut rounds = Vec::new();
    loop {
        let appeals = accepted_appeals(net, w);
        let after = appeals.iter().fold(w, |a, &x| a | x);
        rounds.push(ClosureRound {
            winner_before: inst.consortium_of(w),
            accepted_appeals: appeals.iter().map(|&x| inst.consortium_of(x)).collect(),
            winner_after: inst.consortium_of(after),
        });
        if after == w {
            break;
        }
        w = after;
    }
    Ok(Closure { final_winner: inst.consortium_of(w), trace: ClosureTrace { rounds } })
}

pub fn magnet_outcome(inst: &Instance, p: &ProposalProfile) -> MagnetOutcome {
    match ccc_winner(inst, p) {
        None => MagnetOutcome { outcome: Outcome::new(inst, None), round1: None, trace: None },
        Some(w1) => {
            let closure = magnet_closure(inst, &w1).expect("round-1 winner is eligible");
            MagnetOutcome {
                outcome: Outcome::new(inst, Some(closure.final_winner)),
                round1: Some(w1),
                trace: Some(closure.trace),
            }
        }
    }
}

pub fn magnet_is_strong(inst: &Instance, p: &ProposalProfile) -> Stability<Deviation> {
    let net = inst.net();
    let eligible = net.eligible_sets();
    let finals = equilibrium::memo(&eligible, |m| closure_mask(net, m));
    let blocks = equilibrium::eligible_blocks(net, &p.masks());
    match equilibrium::find_deviation(net, &blocks, &eligible, &|m| finals[&m]) {
        None => Stability::Stable,
        Some((s, x)) => Stability::Unstable(equilibrium::deviation_witness(inst, s, x)),
    }
}

pub fn magnet_report(inst: &Instance, limit: usize) -> Result<MagnetReport> {
    equilibrium::check_limit(inst, limit)?;
    let net = inst.net();
    let eligible = net.eligible_sets();
    let finals = equilibrium::memo(&eligible, |m| closure_mask(net, m));
    let report = equilibrium::report(inst, &|m| finals[&m])?;
    let mut starts: Vec<&Consortium> = report.equilibria.iter().map(|e| &e.round1).collect();
    starts.sort();
    starts.dedup();
    let traces = starts.into_iter().map(|w1| magnet_closure(inst, w1).map(|c| c.trace)).collect::<Result<Vec<_>>>()?;
    Ok(MagnetReport { report, traces })
}
