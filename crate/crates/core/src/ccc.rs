//! Consensual consortium composition: a consortium exists only if every
//! member proposes exactly that member list; the best eligible one wins.

use crate::equilibrium::{self, Deviation, EquilibriumReport, Stability};
use crate::error::Result;
use crate::model::{Consortium, Instance, Outcome};
use crate::partition::ProposalProfile;

/// Best eligible block: highest average, then smallest, then lexicographic.
pub fn ccc_winner(inst: &Instance, p: &ProposalProfile) -> Option<Consortium> {
    let net = inst.net();
    net.best(p.masks().into_iter().filter(|&b| net.is_eligible(b))).map(|m| inst.consortium_of(m))
}

pub fn ccc_outcome(inst: &Instance, p: &ProposalProfile) -> Outcome {
    Outcome::new(inst, ccc_winner(inst, p))
}

/// Strong-equilibrium test with a witness deviation when it fails.
pub fn ccc_is_strong(inst: &Instance, p: &ProposalProfile) -> Stability<Deviation> {
    let net = inst.net();
    let blocks = equilibrium::eligible_blocks(net, &p.masks());
    let eligible = net.eligible_sets();
    match equilibrium::find_deviation(net, &blocks, &eligible, &|m| m) {
        None => Stability::Stable,
        Some((s, x)) => Stability::Unstable(equilibrium::deviation_witness(inst, s, x)),
    }
}

/// Every strong equilibrium, its winners, SPOA and SPOS.
pub fn ccc_report(inst: &Instance, limit: usize) -> Result<EquilibriumReport> {
    equilibrium::check_limit(inst, limit)?;
    equilibrium::report(inst, &|m| m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibrium::DEFAULT_LIMIT;
    use crate::partition::parse_blocks;
    use crate::rational::Rational;
    use crate::subsets::find_sow;

    fn r(v: i64) -> Rational {
        Rational::from(v)
    }

    fn complete(n: usize) -> Vec<(usize, usize)> {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
    }

    fn clique(values: &[i64], t: i64) -> Instance {
        Instance::new(values.len(), complete(values.len()), values.iter().map(|&v| r(v)).collect(), r(t), r(1)).unwrap()
    }

    fn profile(n: usize, s: &str) -> ProposalProfile {
        ProposalProfile::with_singletons(n, parse_blocks(s).unwrap()).unwrap()
    }

    fn c(ids: &[usize]) -> Consortium {
        Consortium::new(ids.iter().copied()).unwrap()
    }

    #[test]
    fn winner_examples() {
        let k4 = clique(&[5, 5, 5, 3], 12);
        assert_eq!(ccc_winner(&k4, &profile(4, "0,1,3|2")), Some(c(&[0, 1, 3])));
        assert_eq!(ccc_winner(&k4, &profile(4, "0,1,2|3")), Some(c(&[0, 1, 2])));
        assert_eq!(ccc_winner(&k4, &ProposalProfile::singletons(4)), None);
        let o = ccc_outcome(&k4, &profile(4, "0,1,3|2"));
        assert_eq!(o.utilities[2], r(0));
        assert_eq!(o.utilities[0], Rational::new(1, 3).unwrap());
    }

    #[test]
    fn strong_equilibrium_examples() {
        let lower = clique(&[59, 59, 59, 3], 120);
        assert!(ccc_is_strong(&lower, &profile(4, "0,1,3|2")).is_stable());

        // No winner while an eligible set exists.
        let k4 = clique(&[5, 5, 5, 3], 12);
        let v = ccc_is_strong(&k4, &ProposalProfile::singletons(4));
        let dev = v.witness().unwrap();
        assert_eq!(dev.blocks, vec![dev.coalition.clone()]);

        // Winner is everyone while the optimum is a strict subset.
        let everyone = profile(4, "0,1,2,3");
        let v = ccc_is_strong(&k4, &everyone);
        assert_eq!(v.witness().unwrap().coalition, c(&[0, 1, 2]));
    }

    #[test]
    fn report_examples() {
        let lower = clique(&[59, 59, 59, 3], 120);
        let rep = ccc_report(&lower, DEFAULT_LIMIT).unwrap();
        assert_eq!(rep.spoa, Rational::new(177, 121).unwrap());
        assert!(rep.spoa <= Rational::new(3, 2).unwrap());
        assert!(rep.se_winners.iter().all(|w| w.len() == 3));

        let pair = Instance::new(2, [(0, 1)], vec![r(3), r(4)], r(7), r(1)).unwrap();
        let rep = ccc_report(&pair, DEFAULT_LIMIT).unwrap();
        assert_eq!((rep.spoa, rep.spos), (r(1), r(1)));
        assert_eq!(rep.se_winners, vec![c(&[0, 1])]);
    }

    #[test]
    fn report_respects_limit() {
        let big = clique(&[1; 7], 3);
        assert_eq!(ccc_report(&big, DEFAULT_LIMIT).unwrap_err().name(), "TooLarge");
        assert!(ccc_report(&big, 7).is_ok());
    }

    #[test]
    fn clique_winners_have_sow_size() {
        let k5 = clique(&[9, 7, 6, 4, 1], 15);
        let rep = ccc_report(&k5, DEFAULT_LIMIT).unwrap();
        let k = find_sow(&k5).unwrap().size;
        assert!(rep.se_winners.iter().all(|w| w.len() == k));
    }
}
