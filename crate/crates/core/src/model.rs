//! Instances, consortia and the eligibility predicate shared by every protocol.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::network::{self, Mask, Network, MAX_PLAYERS};
use crate::rational::Rational;

/// Instance as read from or written to disk, before validation.
///
/// ```json
/// {"n": 3, "edges": [[0,1],[1,2]], "values": ["3/2", 4, 0], "threshold": 5, "prize": 1}
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawInstance {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
    pub values: Vec<Rational>,
    pub threshold: Rational,
    pub prize: Rational,
}

/// A validated game instance: collaboration network, values, threshold `T`
/// and prize `M`. Immutable once built.
#[derive(Clone, Debug)]
pub struct Instance {
    n: usize,
    edges: Vec<(usize, usize)>,
    values: Vec<Rational>,
    threshold: Rational,
    prize: Rational,
    net: Network,
}

impl PartialEq for Instance {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.edges == other.edges
            && self.values == other.values
            && self.threshold == other.threshold
            && self.prize == other.prize
    }
}

impl Eq for Instance {}

/// Checks every standing assumption and builds the instance.
pub fn validate_instance(raw: RawInstance) -> Result<Instance> {
    let RawInstance { n, edges, values, threshold, prize } = raw;
    if n < 2 {
        return Err(Error::MalformedGraph(format!("need at least 2 players, got {n}")));
    }
    if n > MAX_PLAYERS {
        return Err(Error::TooLarge { n, limit: MAX_PLAYERS });
    }
    if values.len() != n {
        return Err(Error::BadParams(format!("{} values for {n} players", values.len())));
    }
    let mut norm = Vec::with_capacity(edges.len());
    for [a, b] in edges {
        if a >= n || b >= n {
            return Err(Error::MalformedGraph(format!("edge [{a},{b}] references a missing player")));
        }
        if a == b {
            return Err(Error::MalformedGraph(format!("self-loop at {a}")));
        }
        norm.push((a.min(b), a.max(b)));
    }
    norm.sort_unstable();
    if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::MalformedGraph(format!("duplicate edge [{},{}]", w[0].0, w[0].1)));
    }
    if !threshold.is_positive() {
        return Err(Error::NonPositiveParameter("threshold"));
    }
    if !prize.is_positive() {
        return Err(Error::NonPositiveParameter("prize"));
    }
    for (player, v) in values.iter().enumerate() {
        if v.is_negative() {
            return Err(Error::BadParams(format!("player {player} has negative value {v}")));
        }
        if *v >= threshold {
            return Err(Error::DominantPlayer { player, value: v.to_string(), threshold: threshold.to_string() });
        }
    }
    let total: Rational = values.iter().sum();
    if total < threshold {
        return Err(Error::InsufficientTotal { total: total.to_string(), threshold: threshold.to_string() });
    }
    let net = Network::new(n, &norm, &values, threshold)?;
    Ok(Instance { n, edges: norm, values, threshold, prize, net })
}

impl Instance {
    pub fn new(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
        values: Vec<Rational>,
        threshold: Rational,
        prize: Rational,
    ) -> Result<Self> {
        validate_instance(RawInstance {
            n,
            edges: edges.into_iter().map(|(a, b)| [a, b]).collect(),
            values,
            threshold,
            prize,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn value(&self, i: usize) -> Rational {
        self.values[i]
    }

    pub fn threshold(&self) -> Rational {
        self.threshold
    }

    pub fn prize(&self) -> Rational {
        self.prize
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.net.adj(a) >> b & 1 == 1
    }

    pub fn neighbours(&self, i: usize) -> Vec<usize> {
        network::members(self.net.adj(i)).collect()
    }

    pub(crate) fn net(&self) -> &Network {
        &self.net
    }

    /// Same graph and parameters with different values.
    pub fn with_values(&self, values: Vec<Rational>) -> Result<Self> {
        Instance::new(self.n, self.edges.iter().copied(), values, self.threshold, self.prize)
    }

    pub fn to_raw(&self) -> RawInstance {
        RawInstance {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
            values: self.values.clone(),
            threshold: self.threshold,
            prize: self.prize,
        }
    }

    /// Canonical JSON: sorted edges, rationals as strings.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_raw()).expect("instance serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        validate_instance(raw)
    }

    /// Checks that every id is a player of this instance.
    pub fn consortium(&self, ids: impl IntoIterator<Item = usize>) -> Result<Consortium> {
        let c = Consortium::new(ids)?;
        match c.members().iter().find(|&&i| i >= self.n) {
            Some(i) => Err(Error::InvalidConsortium(format!("player {i} does not exist"))),
            None => Ok(c),
        }
    }

    pub(crate) fn mask(&self, c: &Consortium) -> Mask {
        debug_assert!(c.members().iter().all(|&i| i < self.n));
        network::mask_of(c.members().iter().copied())
    }

    pub(crate) fn consortium_of(&self, m: Mask) -> Consortium {
        Consortium(network::members(m).collect())
    }

    pub(crate) fn sum_of_mask(&self, m: Mask) -> Rational {
        network::members(m).map(|i| self.values[i]).sum()
    }

    pub(crate) fn avg_of_mask(&self, m: Mask) -> Rational {
        self.sum_of_mask(m) / Rational::from(network::size(m))
    }
}

/// A nonempty set of players, kept sorted so set equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Consortium(Vec<usize>);

impl Consortium {
    pub fn new(ids: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v: Vec<usize> = ids.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        if v.is_empty() {
            return Err(Error::InvalidConsortium("empty".into()));
        }
        Ok(Consortium(v))
    }

    pub(crate) fn from_sorted(ids: Vec<usize>) -> Self {
        debug_assert!(!ids.is_empty() && ids.windows(2).all(|w| w[0] < w[1]));
        Consortium(ids)
    }

    pub fn members(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }
}

impl TryFrom<Vec<usize>> for Consortium {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Consortium::new(v)
    }
}

impl From<Consortium> for Vec<usize> {
    fn from(c: Consortium) -> Vec<usize> {
        c.0
    }
}

impl fmt::Display for Consortium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Consortium {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Evaluation {
    pub sum: Rational,
    pub avg: Rational,
}

/// True iff the subgraph induced by `s` is connected.
pub fn is_connected(inst: &Instance, s: &Consortium) -> bool {
    inst.net.is_connected(inst.mask(s))
}

pub fn evaluate(inst: &Instance, s: &Consortium) -> Evaluation {
    let sum: Rational = s.members().iter().map(|&i| inst.values[i]).sum();
    Evaluation { sum, avg: sum / Rational::from(s.len()) }
}

/// Connected and reaching the threshold.
pub fn is_eligible(inst: &Instance, s: &Consortium) -> bool {
    is_connected(inst, s) && evaluate(inst, s).sum >= inst.threshold
}

/// Winner (if any) and the per-player share of the prize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub winner: Option<Consortium>,
    pub utilities: Vec<Rational>,
}

impl Outcome {
    /// Winners split the prize evenly; everyone else gets nothing.
    pub fn new(inst: &Instance, winner: Option<Consortium>) -> Self {
        let mut utilities = vec![Rational::zero(); inst.n()];
        if let Some(w) = &winner {
            let share = inst.prize() / Rational::from(w.len());
            for &i in w.members() {
                utilities[i] = share;
            }
        }
        Outcome { winner, utilities }
    }
}
