//! Brute-force reference implementations. Nothing here uses the solver's
//! internals: sets are sorted `Vec<usize>`, arithmetic is `Rational`, and
//! every search enumerates the raw strategy space.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use consortia::{Consortium, Instance, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Set = Vec<usize>;

pub fn r(v: i64) -> Rational {
    Rational::from(v)
}

pub fn q(p: i64, d: i64) -> Rational {
    Rational::new(p as i128, d as i128).unwrap()
}

pub fn to_set(c: &Consortium) -> Set {
    c.members().to_vec()
}

pub fn subsets_of(items: &[usize]) -> Vec<Set> {
    (0..1usize << items.len())
        .map(|m| (0..items.len()).filter(|i| m >> i & 1 == 1).map(|i| items[i]).collect())
        .collect()
}

pub fn connected(inst: &Instance, s: &[usize]) -> bool {
    if s.is_empty() {
        return false;
    }
    let mut seen = vec![s[0]];
    let mut queue = VecDeque::from([s[0]]);
    while let Some(u) = queue.pop_front() {
        for &v in s {
            if !seen.contains(&v) && inst.has_edge(u, v) {
                seen.push(v);
                queue.push_back(v);
            }
        }
    }
    seen.len() == s.len()
}

pub fn sum(inst: &Instance, s: &[usize]) -> Rational {
    s.iter().map(|&i| inst.value(i)).sum()
}

pub fn avg(inst: &Instance, s: &[usize]) -> Rational {
    sum(inst, s) / Rational::from(s.len())
}

pub fn eligible(inst: &Instance, s: &[usize]) -> bool {
    connected(inst, s) && sum(inst, s) >= inst.threshold()
}

/// `Less` means `a` ranks ahead of `b`.
pub fn rank(inst: &Instance, a: &[usize], b: &[usize]) -> Ordering {
    avg(inst, b).cmp(&avg(inst, a)).then(a.len().cmp(&b.len())).then(a.cmp(b))
}

pub fn best<'a>(inst: &Instance, sets: impl IntoIterator<Item = &'a Set>) -> Option<Set> {
    sets.into_iter().min_by(|a, b| rank(inst, a, b)).cloned()
}

pub fn all_players(inst: &Instance) -> Set {
    (0..inst.n()).collect()
}

pub fn connected_subsets(inst: &Instance) -> BTreeSet<Set> {
    subsets_of(&all_players(inst)).into_iter().filter(|s| connected(inst, s)).collect()
}

pub fn sow(inst: &Instance) -> Option<Set> {
    let el: Vec<Set> = subsets_of(&all_players(inst)).into_iter().filter(|s| eligible(inst, s)).collect();
    best(inst, &el)
}

/// Every set partition of `items`.
pub fn partitions(items: &[usize]) -> Vec<Vec<Set>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![Vec::new()];
    };
    let mut out = Vec::new();
    for p in partitions(rest) {
        for i in 0..p.len() {
            let mut q = p.clone();
            q[i].insert(0, first);
            out.push(q);
        }
        let mut q = p;
        q.push(vec![first]);
        out.push(q);
    }
    out
}

pub fn ccc_winner(inst: &Instance, blocks: &[Set]) -> Option<Set> {
    best(inst, blocks.iter().filter(|b| eligible(inst, b)))
}

/// Fixed point of the appeal process, testing every outside subset.
pub fn closure(inst: &Instance, start: &[usize]) -> Set {
    let mut w: Set = start.to_vec();
    loop {
        let outside: Set = (0..inst.n()).filter(|i| !w.contains(i)).collect();
        let base = avg(inst, &w);
        let mut grown = w.clone();
        for x in subsets_of(&outside).into_iter().filter(|x| !x.is_empty()) {
            let mut joined = w.clone();
            joined.extend(&x);
            joined.sort();
            if connected(inst, &joined) && avg(inst, &joined) > base {
                grown.extend(&x);
            }
        }
        grown.sort();
        grown.dedup();
        if grown == w {
            return w;
        }
        w = grown;
    }
}

pub fn magnet_winner(inst: &Instance, blocks: &[Set]) -> Option<Set> {
    ccc_winner(inst, blocks).map(|w| closure(inst, &w))
}

pub fn utility(inst: &Instance, winner: &Option<Set>, i: usize) -> Rational {
    match winner {
        Some(w) if w.contains(&i) => inst.prize() / Rational::from(w.len()),
        _ => Rational::zero(),
    }
}

/// Blocks after coalition `s` abandons its blocks and proposes `new_blocks`;
/// players left behind in a broken block stand alone.
pub fn after_deviation(profile: &[Set], s: &[usize], new_blocks: &[Set]) -> Vec<Set> {
    let mut out: Vec<Set> = Vec::new();
    for b in profile {
        if b.iter().any(|i| s.contains(i)) {
            out.extend(b.iter().filter(|i| !s.contains(i)).map(|&i| vec![i]));
        } else {
            out.push(b.clone());
        }
    }
    out.extend(new_blocks.iter().cloned());
    out
}

/// First profitable joint deviation, trying every coalition and every
/// partition of it.
pub fn deviation(inst: &Instance, profile: &[Set], winner: &dyn Fn(&[Set]) -> Option<Set>) -> Option<(Set, Vec<Set>)> {
    let old = winner(profile);
    for s in subsets_of(&all_players(inst)).into_iter().filter(|s| !s.is_empty()) {
        for part in partitions(&s) {
            let new = winner(&after_deviation(profile, &s, &part));
            if s.iter().all(|&i| utility(inst, &new, i) > utility(inst, &old, i)) {
                return Some((s, part));
            }
        }
    }
    None
}

pub struct NaiveReport {
    pub se_winners: BTreeSet<Set>,
    pub spoa: Option<Rational>,
    pub spos: Option<Rational>,
}

pub fn se_report(inst: &Instance, winner: &dyn Fn(&[Set]) -> Option<Set>) -> NaiveReport {
    let opt = sow(inst).map(|s| avg(inst, &s));
    let mut se_winners = BTreeSet::new();
    for p in partitions(&all_players(inst)) {
        if deviation(inst, &p, winner).is_none() {
            if let Some(w) = winner(&p) {
                se_winners.insert(w);
            }
        }
    }
    let worst = se_winners.iter().map(|w| avg(inst, w)).min();
    let bestv = se_winners.iter().map(|w| avg(inst, w)).max();
    NaiveReport { spoa: opt.zip(worst).map(|(o, w)| o / w), spos: opt.zip(bestv).map(|(o, b)| o / b), se_winners }
}

pub fn goldrush_winner(inst: &Instance, labels: &[usize]) -> Option<Set> {
    let mut classes: Vec<Set> = Vec::new();
    for l in labels.iter().collect::<BTreeSet<_>>() {
        classes.push((0..labels.len()).filter(|&i| labels[i] == *l).collect());
    }
    best(inst, classes.iter().filter(|c| eligible(inst, c)))
}

pub fn goldrush_nash(inst: &Instance, labels: &[usize]) -> bool {
    let n = inst.n();
    let old = goldrush_winner(inst, labels);
    for i in 0..n {
        for l in 0..=n {
            let mut moved = labels.to_vec();
            moved[i] = l;
            let new = goldrush_winner(inst, &moved);
            if utility(inst, &new, i) > utility(inst, &old, i) {
                return false;
            }
        }
    }
    true
}

/// Every coalition, every assignment of labels `0..=n` to its members.
pub fn goldrush_strong(inst: &Instance, labels: &[usize]) -> bool {
    let n = inst.n();
    let old = goldrush_winner(inst, labels);
    for s in subsets_of(&all_players(inst)).into_iter().filter(|s| !s.is_empty()) {
        let base = n + 1;
        for code in 0..base.pow(s.len() as u32) {
            let mut moved = labels.to_vec();
            let mut c = code;
            for &i in &s {
                moved[i] = c % base;
                c /= base;
            }
            let new = goldrush_winner(inst, &moved);
            if s.iter().all(|&i| utility(inst, &new, i) > utility(inst, &old, i)) {
                return false;
            }
        }
    }
    true
}

/// Restricted growth strings of length `n`.
pub fn labelings(n: usize) -> Vec<Vec<usize>> {
    partitions(&(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|p| {
            let mut labels = vec![0; n];
            for (l, b) in p.iter().enumerate() {
                for &i in b {
                    labels[i] = l;
                }
            }
            labels
        })
        .collect()
}

/// Seeded random instance with `2..=max_n` players, half-integer values and
/// an edge probability of one half.
pub fn random_instance(rng: &mut ChaCha8Rng, max_n: usize) -> Instance {
    loop {
        let n = rng.random_range(2..=max_n);
        let t = rng.random_range(3..=12i64);
        let values: Vec<Rational> = (0..n).map(|_| q(rng.random_range(0..2 * t), 2)).collect();
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).filter(|_| rng.random_bool(0.6)).collect();
        if let Ok(inst) = Instance::new(n, edges, values, r(t), r(1)) {
            return inst;
        }
    }
}

pub fn random_instances(seed: u64, count: usize, max_n: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_instance(&mut rng, max_n)).collect()
}
