//! Bitmask view of an instance used by every hot loop.
//!
//! Values and the threshold are rescaled by the lcm of their denominators so
//! sums and average comparisons are plain `i128` arithmetic. Player sets are
//! `u32` masks; bit `i` is player `i`.

use std::cmp::Ordering;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::rational::Rational;

pub type Mask = u32;

/// Largest supported player count (one bit per player in a [`Mask`]).
pub const MAX_PLAYERS: usize = 32;

/// Per-mask lookup tables are built up to this many players.
const TABLE_LIMIT: usize = 16;

#[inline]
pub fn size(m: Mask) -> usize {
    m.count_ones() as usize
}

pub fn members(m: Mask) -> impl Iterator<Item = usize> {
    let mut rest = m;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(i)
        }
    })
}

pub fn mask_of(ids: impl IntoIterator<Item = usize>) -> Mask {
    ids.into_iter().fold(0, |m, i| m | (1 << i))
}

/// Lexicographic order of the sorted member lists of two equal-size masks.
#[inline]
pub fn lex_cmp_same_size(a: Mask, b: Mask) -> Ordering {
    let diff = a ^ b;
    if diff == 0 {
        Ordering::Equal
    } else if a & (diff & diff.wrapping_neg()) != 0 {
        Ordering::Less
    } else {
        Ordering::Greater
    }
}

#[derive(Clone, Debug)]
pub struct Network {
    n: usize,
    adj: Vec<Mask>,
    weight: Vec<i128>,
    threshold: i128,
    sums: Option<Vec<i128>>,
    connected: Option<Vec<u64>>,
}

impl Network {
    pub fn new(n: usize, edges: &[(usize, usize)], values: &[Rational], threshold: Rational) -> Result<Self> {
        let mut adj = vec![0 as Mask; n];
        for &(a, b) in edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        let mut lcm: i128 = threshold.denom();
        for v in values {
            lcm = lcm.lcm(&v.denom());
            if lcm > (1i128 << 80) {
                return Err(Error::Overflow);
            }
        }
        let scale = |r: &Rational| -> Result<i128> { r.numer().checked_mul(lcm / r.denom()).ok_or(Error::Overflow) };
        let weight = values.iter().map(scale).collect::<Result<Vec<_>>>()?;
        let total = weight.iter().try_fold(0i128, |acc, w| acc.checked_add(*w)).ok_or(Error::Overflow)?;
        // Average comparisons multiply a sum by a set size.
        total.checked_mul(64).ok_or(Error::Overflow)?;
        let threshold = scale(&threshold)?;
        let mut net = Network { n, adj, weight, threshold, sums: None, connected: None };
        if n <= TABLE_LIMIT {
            net.build_tables();
        }
        Ok(net)
    }

    fn build_tables(&mut self) {
        let count = 1usize << self.n;
        let mut sums = vec![0i128; count];
        for m in 1..count {
            let low = m.trailing_zeros() as usize;
            sums[m] = sums[m & (m - 1)] + self.weight[low];
        }
        let mut connected = vec![0u64; count.div_ceil(64)];
        for m in 1..count {
            if self.connected_bfs(m as Mask) {
                connected[m / 64] |= 1 << (m % 64);
            }
        }
        self.sums = Some(sums);
        self.connected = Some(connected);
    }

    pub fn full(&self) -> Mask {
        if self.n == 32 {
            Mask::MAX
        } else {
            (1 << self.n) - 1
        }
    }

    #[inline]
    pub fn adj(&self, i: usize) -> Mask {
        self.adj[i]
    }

    /// Players adjacent to some member of `m` (may include members of `m`).
    #[inline]
    pub fn neighbourhood(&self, m: Mask) -> Mask {
        members(m).fold(0, |acc, i| acc | self.adj[i])
    }

    #[cfg(test)]
    pub fn weight(&self, i: usize) -> i128 {
        self.weight[i]
    }

    #[inline]
    pub fn threshold(&self) -> i128 {
        self.threshold
    }

    #[inline]
    pub fn sum(&self, m: Mask) -> i128 {
        match &self.sums {
            Some(t) => t[m as usize],
            None => members(m).map(|i| self.weight[i]).sum(),
        }
    }

    #[inline]
    pub fn is_connected(&self, m: Mask) -> bool {
        match &self.connected {
            Some(t) => t[m as usize / 64] >> (m as usize % 64) & 1 == 1,
            None => self.connected_bfs(m),
        }
    }

    fn connected_bfs(&self, m: Mask) -> bool {
        if m == 0 {
            return false;
        }
        let mut seen = m & m.wrapping_neg();
        let mut frontier = seen;
        while frontier != 0 {
            let next = self.neighbourhood(frontier) & m & !seen;
            seen |= next;
            frontier = next;
        }
        seen == m
    }

    #[inline]
    pub fn is_eligible(&self, m: Mask) -> bool {
        m != 0 && self.sum(m) >= self.threshold && self.is_connected(m)
    }

    /// Ranking used by every winner rule: higher average first, then fewer
    /// members, then the lexicographically smaller member list.
    /// `Less` means `a` is preferred.
    #[inline]
    pub fn rank_cmp(&self, a: Mask, b: Mask) -> Ordering {
        let (sa, sb) = (size(a) as i128, size(b) as i128);
        (self.sum(b) * sa).cmp(&(self.sum(a) * sb)).then(sa.cmp(&sb)).then_with(|| lex_cmp_same_size(a, b))
    }

    #[inline]
    pub fn beats(&self, a: Mask, b: Mask) -> bool {
        self.rank_cmp(a, b) == Ordering::Less
    }

    /// Best-ranked mask among `candidates`.
    pub fn best(&self, candidates: impl IntoIterator<Item = Mask>) -> Option<Mask> {
        candidates.into_iter().fold(None, |best, m| match best {
            Some(b) if !self.beats(m, b) => Some(b),
            _ => Some(m),
        })
    }

    /// `avg(a) > avg(b)`, strictly.
    #[inline]
    pub fn avg_gt(&self, a: Mask, b: Mask) -> bool {
        self.sum(a) * size(b) as i128 > self.sum(b) * size(a) as i128
    }

    /// Connected sets containing `anchor` as their smallest member, grown by
    /// neighbour expansion (ESU). Each such set is visited exactly once.
    pub fn connected_with_anchor(&self, anchor: usize, max_size: usize, visit: &mut impl FnMut(Mask)) {
        if max_size == 0 {
            return;
        }
        let above: Mask = if anchor + 1 >= 32 { 0 } else { !((1 << (anchor + 1)) - 1) };
        let start = 1 << anchor;
        self.extend(start, self.adj[anchor] & above, self.adj[anchor] | start, above, max_size, visit);
    }

    fn extend(
        &self,
        sub: Mask,
        mut ext: Mask,
        closed: Mask,
        above: Mask,
        max_size: usize,
        visit: &mut impl FnMut(Mask),
    ) {
        visit(sub);
        if size(sub) == max_size {
            return;
        }
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let exclusive = self.adj[w] & !closed & above;
            self.extend(sub | (1 << w), ext | exclusive, closed | self.adj[w], above, max_size, visit);
        }
    }

    /// Every connected set of at most `max_size` players.
    pub fn connected_sets(&self, max_size: usize) -> Vec<Mask> {
        let mut out = Vec::new();
        for v in 0..self.n {
            self.connected_with_anchor(v, max_size, &mut |m| out.push(m));
        }
        out
    }

    /// Every eligible set, best-ranked first.
    pub fn eligible_sets(&self) -> Vec<Mask> {
        let mut out: Vec<Mask> =
            self.connected_sets(self.n).into_iter().filter(|&m| self.sum(m) >= self.threshold).collect();
        out.sort_by(|&a, &b| self.rank_cmp(a, b));
        out
    }

    /// Hop distance from `u` to the nearest member of `target`.
    pub fn distance(&self, u: usize, target: Mask) -> Option<usize> {
        let mut seen: Mask = 1 << u;
        let mut frontier = seen;
        let mut d = 0;
        loop {
            if frontier & target != 0 {
                return Some(d);
            }
            let next = self.neighbourhood(frontier) & !seen;
            if next == 0 {
                return None;
            }
            seen |= next;
            frontier = next;
            d += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> Network {
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
        Network::new(n, &edges, &vec![Rational::one(); n], Rational::from(2)).unwrap()
    }

    #[test]
    fn lex_order_matches_sorted_lists() {
        assert_eq!(lex_cmp_same_size(0b101, 0b110), Ordering::Less);
        assert_eq!(lex_cmp_same_size(0b1001, 0b0011), Ordering::Greater);
        assert_eq!(lex_cmp_same_size(0b11, 0b11), Ordering::Equal);
    }

    #[test]
    fn esu_visits_each_connected_set_once() {
        let net = line(5);
        let mut sets = net.connected_sets(5);
        let total = sets.len();
        sets.sort();
        sets.dedup();
        assert_eq!(sets.len(), total);
        // A path on 5 vertices has 5*6/2 intervals.
        assert_eq!(total, 15);
        assert!(sets.iter().all(|&m| net.is_connected(m)));
    }

    #[test]
    fn table_and_bfs_agree() {
        let net = line(6);
        for m in 1..(1u32 << 6) {
            assert_eq!(net.is_connected(m), net.connected_bfs(m));
            assert_eq!(net.sum(m), members(m).map(|i| net.weight(i)).sum::<i128>());
        }
    }

    #[test]
    fn distance_on_a_path() {
        let net = line(5);
        assert_eq!(net.distance(0, 0b10000), Some(4));
        assert_eq!(net.distance(2, 0b00100), Some(0));
    }
}
