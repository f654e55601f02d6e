//! Bound checks, the three-nonzero distance bound, SPOA sweeps and
//! worst-case instance search.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::ccc::ccc_report;
use crate::equilibrium::EquilibriumReport;
use crate::error::{Error, Result};
use crate::generators::{gen_graph, paper_instance, GraphFamily, PaperInstance, PaperParams};
use crate::goldrush::{goldrush_is_nash, goldrush_is_strong, goldrush_outcome, goldrush_report, PriceOfAnarchy};
use crate::magnet::magnet_report;
use crate::model::{evaluate, Consortium, Instance, RawInstance};
use crate::network::{self, Mask};
use crate::par;
use crate::partition::{Labeling, SetPartitions};
use crate::rational::Rational;
use crate::subsets::{distance, find_sow};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Game {
    Goldrush,
    Ccc,
    Magnet,
}

impl Game {
    pub fn name(self) -> &'static str {
        match self {
            Game::Goldrush => "goldrush",
            Game::Ccc => "ccc",
            Game::Magnet => "magnet",
        }
    }
}

impl fmt::Display for Game {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Game {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "goldrush" | "gold-rush" => Ok(Game::Goldrush),
            "ccc" => Ok(Game::Ccc),
            "magnet" => Ok(Game::Magnet),
            _ => Err(Error::BadParams(format!("unknown game {s:?}"))),
        }
    }
}

/// One upper-bound check: `holds` iff `observed <= claimed`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundVerdict {
    pub bound_name: String,
    pub claimed: Rational,
    pub observed: Rational,
    pub holds: bool,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub instance: RawInstance,
    pub profile: Option<String>,
}

impl BoundVerdict {
    pub fn new(name: impl Into<String>, claimed: Rational, observed: Rational, witness: Option<Witness>) -> Self {
        BoundVerdict { bound_name: name.into(), claimed, observed, holds: observed <= claimed, witness }
    }
}

impl fmt::Display for BoundVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "bound={} claimed={} observed={} (~{:.6}) holds={}",
            self.bound_name,
            self.claimed,
            self.observed,
            self.observed.to_f64(),
            self.holds
        )?;
        if let (false, Some(w)) = (self.holds, &self.witness) {
            write!(f, " witness={}", serde_json::to_string(w).expect("witness serializes"))?;
        }
        Ok(())
    }
}

fn witness(inst: &Instance, profile: Option<String>) -> Option<Witness> {
    Some(Witness { instance: inst.to_raw(), profile })
}

// ---------------------------------------------------------------------------
// Structural properties of equilibrium winners

/// The three structural properties of a winner `z` relative to the SOW.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct WinnerProperties {
    pub intersects_sow: bool,
    pub not_larger_than_sow: bool,
    /// `avg(z) >= avg(SOW \ z)`; true when `SOW \ z` is empty.
    pub dominates_rest: bool,
    pub rest_empty: bool,
}

impl WinnerProperties {
    pub fn all_hold(&self) -> bool {
        self.intersects_sow && self.not_larger_than_sow && self.dominates_rest
    }
}

pub fn verify_winner_properties(inst: &Instance, z: &Consortium) -> Result<WinnerProperties> {
    let sow = find_sow(inst)?;
    let zm = inst.mask(z);
    let sm = inst.mask(&sow.consortium);
    let rest = sm & !zm;
    let dominates_rest = rest == 0 || inst.avg_of_mask(zm) >= inst.avg_of_mask(rest);
    Ok(WinnerProperties {
        intersects_sow: zm & sm != 0,
        not_larger_than_sow: z.len() <= sow.size,
        dominates_rest,
        rest_empty: rest == 0,
    })
}

// ---------------------------------------------------------------------------
// Three nonzero players

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ThreeNzBound {
    /// `(dist(p_x, w) + |w|) / k`.
    pub bound: Rational,
    pub px: usize,
    pub x: Rational,
    pub distance: usize,
    pub w_size: usize,
    pub k: usize,
    /// `x <= dist * sum(w) / |w|`.
    pub distance_inequality_holds: bool,
}

/// Distance bound for an instance with exactly three nonzero players. `p_x`
/// is the nonzero player outside `w` that belongs to the SOW.
pub fn three_nz_bound(inst: &Instance, w: &Consortium) -> Result<ThreeNzBound> {
    let nonzero: Vec<usize> = (0..inst.n()).filter(|&i| !inst.value(i).is_zero()).collect();
    if nonzero.len() != 3 {
        return Err(Error::NotThreeNonzero(nonzero.len()));
    }
    let sow = find_sow(inst)?;
    let px = nonzero
        .iter()
        .copied()
        .find(|&i| !w.contains(i) && sow.consortium.contains(i))
        .ok_or(Error::NoOutsideNonzero)?;
    let d = distance(inst, px, w).ok_or_else(|| Error::BadParams(format!("player {px} cannot reach {w}")))?;
    let x = inst.value(px);
    let sum_w: Rational = w.members().iter().map(|&i| inst.value(i)).sum();
    let distance_inequality_holds = x * Rational::from(w.len()) <= Rational::from(d) * sum_w;
    Ok(ThreeNzBound {
        bound: Rational::from(d + w.len()) / Rational::from(sow.size),
        px,
        x,
        distance: d,
        w_size: w.len(),
        k: sow.size,
        distance_inequality_holds,
    })
}

// ---------------------------------------------------------------------------
// Closed-form bounds and sweeps

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFamily {
    Clique,
    Line,
    General,
    CccClique,
}

impl FromStr for BoundFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clique" => Ok(BoundFamily::Clique),
            "line" => Ok(BoundFamily::Line),
            "general" => Ok(BoundFamily::General),
            "ccc-clique" => Ok(BoundFamily::CccClique),
            _ => Err(Error::BadParams(format!("unknown bound family {s:?}"))),
        }
    }
}

/// `clique`: 1 + 1/k, `line`: 1 + (k-1)/k, `general`: 2, `ccc-clique`: 1 + 1/(k-1).
pub fn theoretical_bounds(k: usize, family: BoundFamily) -> Result<Rational> {
    if k < 2 {
        return Err(Error::BadParams(format!("k must be at least 2, got {k}")));
    }
    let one = Rational::one();
    let k_r = Rational::from(k);
    Ok(match family {
        BoundFamily::Clique => one + one / k_r,
        BoundFamily::Line => one + Rational::from(k - 1) / k_r,
        BoundFamily::General => Rational::from(2),
        BoundFamily::CccClique => one + one / Rational::from(k - 1),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepFamily {
    Clique,
    Line,
}

impl SweepFamily {
    pub fn name(self) -> &'static str {
        match self {
            SweepFamily::Clique => "clique",
            SweepFamily::Line => "line",
        }
    }
}

impl FromStr for SweepFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "clique" | "complete" => Ok(SweepFamily::Clique),
            "line" => Ok(SweepFamily::Line),
            _ => Err(Error::BadParams(format!("sweeps support clique or line, got {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SweepRow {
    pub k: usize,
    pub game: Game,
    pub family: SweepFamily,
    /// Largest spoa over the ε values tried.
    pub observed: Rational,
    pub bound: Rational,
    /// `(ε, spoa)` in the order tried, ε shrinking.
    pub by_eps: Vec<(Rational, Rational)>,
}

/// The extremal instance a sweep uses for `(family, game, k, ε)`, with its
/// threshold fixed per family: `12k` for the MAGNET clique, 120 for the CCC
/// clique and `30k` for the line.
pub fn sweep_instance(family: SweepFamily, game: Game, k: usize, eps: Rational) -> Result<Instance> {
    match (family, game) {
        (_, Game::Goldrush) => Err(Error::BadParams("sweeps cover ccc and magnet".into())),
        (SweepFamily::Clique, Game::Magnet) => {
            paper_instance(PaperInstance::MagnetCliqueLower, &PaperParams::new(Rational::from(12 * k), eps).k(k))
        }
        (SweepFamily::Clique, Game::Ccc) => {
            paper_instance(PaperInstance::CccCliqueLower, &PaperParams::new(Rational::from(120), eps).k(k))
        }
        (SweepFamily::Line, _) => {
            paper_instance(PaperInstance::LineWorstcase, &PaperParams::new(Rational::from(30 * k), eps).n(k))
        }
    }
}

/// ε values a sweep tries, largest first.
pub fn sweep_eps(family: SweepFamily) -> Vec<Rational> {
    match family {
        SweepFamily::Clique => [4, 2, 1].map(Rational::from).to_vec(),
        SweepFamily::Line => [3, 1].map(Rational::from).to_vec(),
    }
}

fn spoa_of(inst: &Instance, game: Game, limit: usize) -> Result<EquilibriumReport> {
    match game {
        Game::Ccc => ccc_report(inst, limit),
        Game::Magnet => magnet_report(inst, limit).map(|r| r.report),
        Game::Goldrush => Err(Error::BadParams("gold-rush has no strong-equilibrium report".into())),
    }
}

pub fn spoa_sweep(
    family: SweepFamily,
    ks: impl IntoIterator<Item = usize>,
    game: Game,
    limit: usize,
) -> Result<Vec<SweepRow>> {
    let bound_family = match (family, game) {
        (SweepFamily::Clique, Game::Ccc) => BoundFamily::CccClique,
        (SweepFamily::Clique, _) => BoundFamily::Clique,
        (SweepFamily::Line, _) => BoundFamily::Line,
    };
    ks.into_iter()
        .map(|k| {
            let mut by_eps = Vec::new();
            for eps in sweep_eps(family) {
                let inst = sweep_instance(family, game, k, eps)?;
                by_eps.push((eps, spoa_of(&inst, game, limit)?.spoa));
            }
            let observed = by_eps.iter().map(|&(_, s)| s).max().expect("at least one eps");
            Ok(SweepRow { k, game, family, observed, bound: theoretical_bounds(k, bound_family)?, by_eps })
        })
        .collect()
}

pub const SWEEP_CSV_HEADER: &str = "k,game,family,observed_spoa_num,observed_spoa_den,bound_num,bound_den";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.k,
            r.game,
            r.family.name(),
            r.observed.numer(),
            r.observed.denom(),
            r.bound.numer(),
            r.bound.denom()
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Graph enumeration

/// Largest `n` for which the all-graphs and tree families are enumerated.
pub const MAX_ENUMERATED_N: usize = 6;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::with_capacity(n), &mut vec![false; n], &mut out);
    out
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
}

fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Mask> {
    let mut adj = vec![0; n];
    for &(a, b) in edges {
        adj[a] |= 1 << b;
        adj[b] |= 1 << a;
    }
    adj
}

fn connected_adj(adj: &[Mask]) -> bool {
    let full: Mask = if adj.len() == 32 { Mask::MAX } else { (1 << adj.len()) - 1 };
    let mut seen: Mask = 1;
    let mut frontier: Mask = 1;
    while frontier != 0 {
        let mut next = 0;
        for i in network::members(frontier) {
            next |= adj[i];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen & full == full
}

/// One representative per isomorphism class of connected graphs on `n`
/// nodes, each the edge set whose pair-index bitmask is smallest in its class.
pub fn connected_graphs(n: usize) -> Result<&'static [Vec<(usize, usize)>]> {
    type Graphs = Vec<Vec<(usize, usize)>>;
    static CACHE: [OnceLock<Graphs>; MAX_ENUMERATED_N + 1] = [const { OnceLock::new() }; MAX_ENUMERATED_N + 1];
    if !(2..=MAX_ENUMERATED_N).contains(&n) {
        return Err(Error::BadParams(format!("graph enumeration covers 2 <= n <= {MAX_ENUMERATED_N}, got {n}")));
    }
    Ok(CACHE[n].get_or_init(|| {
        let ps = pairs(n);
        let mut index = vec![vec![0usize; n]; n];
        for (i, &(a, b)) in ps.iter().enumerate() {
            index[a][b] = i;
            index[b][a] = i;
        }
        let perms = permutations(n);
        // Pair index images under each permutation.
        let images: Vec<Vec<usize>> =
            perms.iter().map(|p| ps.iter().map(|&(a, b)| index[p[a]][p[b]]).collect()).collect();
        let masks: Vec<u32> = (0..1u32 << ps.len())
            .filter(|&m| {
                let edges: Vec<_> = (0..ps.len()).filter(|i| m >> i & 1 == 1).map(|i| ps[i]).collect();
                m.count_ones() as usize >= n - 1 && connected_adj(&adjacency(n, &edges))
            })
            .collect();
        let canonical = par::map(&masks, |&m| {
            images.iter().all(|img| {
                let mut image = 0u32;
                for (i, &j) in img.iter().enumerate() {
                    image |= (m >> i & 1) << j;
                }
                image >= m
            })
        });
        masks
            .iter()
            .zip(canonical)
            .filter(|&(_, c)| c)
            .map(|(&m, _)| (0..ps.len()).filter(|i| m >> i & 1 == 1).map(|i| ps[i]).collect())
            .collect()
    }))
}

/// Node permutations that map the edge set onto itself.
pub fn automorphisms(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let adj = adjacency(n, edges);
    permutations(n).into_iter().filter(|p| edges.iter().all(|&(a, b)| adj[p[a]] >> p[b] & 1 == 1)).collect()
}

// ---------------------------------------------------------------------------
// Worst-case search

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchFamily {
    /// Every connected graph up to isomorphism.
    All,
    Tree,
    Graph(GraphFamily),
}

impl fmt::Display for SearchFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchFamily::All => f.write_str("all"),
            SearchFamily::Tree => f.write_str("tree"),
            SearchFamily::Graph(g) => write!(f, "{g}"),
        }
    }
}

impl FromStr for SearchFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" | "all-graphs" => Ok(SearchFamily::All),
            "tree" | "trees" => Ok(SearchFamily::Tree),
            _ => s.parse().map(SearchFamily::Graph),
        }
    }
}

impl SearchFamily {
    pub fn graphs(self, n: usize) -> Result<Vec<Vec<(usize, usize)>>> {
        Ok(match self {
            SearchFamily::All => connected_graphs(n)?.to_vec(),
            SearchFamily::Tree => connected_graphs(n)?.iter().filter(|g| g.len() == n - 1).cloned().collect(),
            SearchFamily::Graph(f) if n >= f.min_n() => vec![gen_graph(f, n)?],
            SearchFamily::Graph(_) => Vec::new(),
        })
    }
}

/// Values allowed at one threshold.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueGrid {
    pub threshold: Rational,
    pub values: Vec<Rational>,
}

impl ValueGrid {
    /// `{0, ε, T/3, T/2, T-ε}`.
    pub fn standard(threshold: Rational, eps: Rational) -> Self {
        let mut values =
            vec![Rational::zero(), eps, threshold / Rational::from(3), threshold / Rational::from(2), threshold - eps];
        values.sort();
        values.dedup();
        ValueGrid { threshold, values }
    }

    /// Standard grids at `T = 6` and `T = 12` with `ε = 1`.
    pub fn defaults() -> Vec<ValueGrid> {
        [6, 12].map(|t| ValueGrid::standard(Rational::from(t), Rational::one())).to_vec()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "mode")]
pub enum SearchMode {
    /// Every value assignment, up to graph automorphism.
    Exhaustive,
    Random {
        seed: u64,
        samples: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub game: Game,
    pub family: SearchFamily,
    pub n_min: usize,
    pub n_max: usize,
    pub grids: Vec<ValueGrid>,
    pub mode: SearchMode,
    pub limit: usize,
}

impl SearchConfig {
    pub fn new(game: Game, family: SearchFamily, n_max: usize) -> Self {
        SearchConfig {
            game,
            family,
            n_min: 2,
            n_max,
            grids: ValueGrid::defaults(),
            mode: SearchMode::Exhaustive,
            limit: crate::equilibrium::DEFAULT_LIMIT,
        }
    }
}

/// Equilibrium figures for one instance. For gold-rush these are the price
/// of anarchy and stability over Nash equilibria.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GameSummary {
    pub spoa: Rational,
    pub spos: Rational,
    pub worst_winner: Consortium,
    pub worst_profile: String,
    pub se_winners: Vec<Consortium>,
}

/// `None` when the game has no equilibrium with a winner.
pub fn summarize(inst: &Instance, game: Game, limit: usize) -> Result<Option<GameSummary>> {
    let rep = match game {
        Game::Goldrush => {
            let rep = goldrush_report(inst, limit)?;
            let PriceOfAnarchy::Bounded(poa) = rep.poa else {
                return Ok(None);
            };
            let lab = rep.worst_nash.expect("bounded poa has a witness");
            let winners: Vec<Consortium> = rep.nash_winners.into_iter().flatten().collect();
            let best = winners.iter().map(|w| evaluate(inst, w).avg).max().expect("some winner");
            return Ok(Some(GameSummary {
                spoa: poa,
                spos: rep.sow.avg / best,
                worst_winner: goldrush_outcome(inst, &lab).winner.expect("worst nash has a winner"),
                worst_profile: format!("{:?}", lab.labels()),
                se_winners: winners,
            }));
        }
        Game::Ccc => ccc_report(inst, limit),
        Game::Magnet => magnet_report(inst, limit).map(|r| r.report),
    };
    match rep {
        Ok(r) => Ok(Some(GameSummary {
            spoa: r.spoa,
            spos: r.spos,
            worst_winner: r.worst.winner.clone(),
            worst_profile: r.worst.profile.to_string(),
            se_winners: r.se_winners,
        })),
        Err(Error::NoStrongEquilibriumWithWinner) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchHit {
    pub instance: RawInstance,
    pub spoa: Rational,
    pub spos: Rational,
    pub winner: Consortium,
    pub profile: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    pub game: Game,
    pub family: String,
    pub evaluated: usize,
    /// Instances with no equilibrium that awards the prize.
    pub without_equilibrium: usize,
    pub best: Option<SearchHit>,
    /// Smallest-encoding instance with `1 < spos < spoa`, if any was seen.
    pub spos_gap: Option<SearchHit>,
}

fn value_tuples(n: usize, grid: &ValueGrid, autos: &[Vec<usize>]) -> Vec<Vec<Rational>> {
    let g = grid.values.len();
    let total = g.pow(n as u32);
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    let mut image = vec![0usize; n];
    for code in 0..total {
        let mut c = code;
        for slot in idx.iter_mut().rev() {
            *slot = c % g;
            c /= g;
        }
        let minimal = autos.iter().all(|p| {
            for i in 0..n {
                image[p[i]] = idx[i];
            }
            image >= idx
        });
        if !minimal {
            continue;
        }
        let values: Vec<Rational> = idx.iter().map(|&i| grid.values[i]).collect();
        let sum: Rational = values.iter().sum();
        if sum >= grid.threshold {
            out.push(values);
        }
    }
    out
}

/// Candidate instances for a search, in a fixed order.
pub fn search_candidates(config: &SearchConfig) -> Result<Vec<Instance>> {
    if config.n_min < 2 || config.n_min > config.n_max {
        return Err(Error::BadParams(format!("bad size range {}..={}", config.n_min, config.n_max)));
    }
    if config.n_max > config.limit {
        return Err(Error::TooLarge { n: config.n_max, limit: config.limit });
    }
    if config.grids.is_empty() {
        return Err(Error::BadParams("empty value grid".into()));
    }
    let one = Rational::one();
    let graphs: Vec<(usize, Vec<(usize, usize)>)> = (config.n_min..=config.n_max)
        .map(|n| config.family.graphs(n).map(|gs| gs.into_iter().map(move |g| (n, g))))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out = Vec::new();
    match config.mode {
        SearchMode::Exhaustive => {
            for (n, edges) in &graphs {
                let autos = automorphisms(*n, edges);
                for grid in &config.grids {
                    for values in value_tuples(*n, grid, &autos) {
                        out.push(Instance::new(*n, edges.iter().copied(), values, grid.threshold, one)?);
                    }
                }
            }
        }
        SearchMode::Random { seed, samples } => {
            if graphs.is_empty() {
                return Ok(out);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            while out.len() < samples {
                let (n, edges) = &graphs[rng.random_range(0..graphs.len())];
                let grid = &config.grids[rng.random_range(0..config.grids.len())];
                let values: Vec<Rational> =
                    (0..*n).map(|_| grid.values[rng.random_range(0..grid.values.len())]).collect();
                if values.iter().sum::<Rational>() >= grid.threshold {
                    out.push(Instance::new(*n, edges.iter().copied(), values, grid.threshold, one)?);
                }
            }
        }
    }
    Ok(out)
}

/// Exhaustive or seeded-random search for the instance maximizing the
/// game's spoa. The result is independent of thread count.
pub fn worst_case_search(config: &SearchConfig) -> Result<SearchResult> {
    let candidates = search_candidates(config)?;
    let summaries = par::map(&candidates, |inst| summarize(inst, config.game, config.limit));
    let mut best: Option<(SearchHit, String)> = None;
    let mut gap: Option<(SearchHit, String)> = None;
    let mut without = 0;
    let one = Rational::one();
    for (inst, s) in candidates.iter().zip(summaries) {
        let Some(s) = s? else {
            without += 1;
            continue;
        };
        let key = inst.to_json();
        let hit = || SearchHit {
            instance: inst.to_raw(),
            spoa: s.spoa,
            spos: s.spos,
            winner: s.worst_winner.clone(),
            profile: s.worst_profile.clone(),
        };
        if best.as_ref().is_none_or(|b| b.0.spoa < s.spoa || (b.0.spoa == s.spoa && key < b.1)) {
            best = Some((hit(), key.clone()));
        }
        if one < s.spos && s.spos < s.spoa && gap.as_ref().is_none_or(|g| key < g.1) {
            gap = Some((hit(), key));
        }
    }
    Ok(SearchResult {
        game: config.game,
        family: config.family.to_string(),
        evaluated: candidates.len(),
        without_equilibrium: without,
        best: best.map(|b| b.0),
        spos_gap: gap.map(|g| g.0),
    })
}

// ---------------------------------------------------------------------------
// Gold-rush checks

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GoldrushAudit {
    pub labelings: usize,
    pub nash: usize,
    /// Nash labelings with a winner but more than one label in use.
    pub dichotomy_violations: usize,
    /// Labelings that are strong equilibria.
    pub strong: usize,
    pub has_strict_eligible_subset: bool,
}

/// Enumerates every labeling up to renaming and records the Nash and
/// strong-equilibrium structure.
pub fn goldrush_audit(inst: &Instance) -> GoldrushAudit {
    let labelings: Vec<Labeling> = SetPartitions::new(inst.n()).map(Labeling::new).collect();
    let rows = par::map(&labelings, |lab| {
        let nash = goldrush_is_nash(inst, lab).is_stable();
        let winner = goldrush_outcome(inst, lab).winner.is_some();
        let one_label = lab.labels().iter().all(|&l| l == lab.labels()[0]);
        (nash, nash && winner && !one_label, goldrush_is_strong(inst, lab).is_stable())
    });
    let net = inst.net();
    let full = net.full();
    GoldrushAudit {
        labelings: labelings.len(),
        nash: rows.iter().filter(|r| r.0).count(),
        dichotomy_violations: rows.iter().filter(|r| r.1).count(),
        strong: rows.iter().filter(|r| r.2).count(),
        has_strict_eligible_subset: net.eligible_sets().iter().any(|&m| m != full),
    }
}

// ---------------------------------------------------------------------------
// Verification grid

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridLevel {
    /// Smaller sizes and samples; runs in a few seconds.
    Quick,
    /// The full grid.
    Default,
}

impl FromStr for GridLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(GridLevel::Quick),
            "default" | "full" => Ok(GridLevel::Default),
            _ => Err(Error::BadParams(format!("unknown grid {s:?}"))),
        }
    }
}

/// Structural properties of every MAGNET equilibrium winner of `inst`; returns
/// the number of violations and the first offending winner.
pub fn winner_property_violations(inst: &Instance, limit: usize) -> Result<(usize, Option<Consortium>)> {
    let rep = magnet_report(inst, limit)?;
    let mut bad = 0;
    let mut first = None;
    for z in &rep.report.se_winners {
        if !verify_winner_properties(inst, z)?.all_hold() {
            bad += 1;
            first.get_or_insert_with(|| z.clone());
        }
    }
    Ok((bad, first))
}

/// Cartwheel instances with three nonzero players: every placement of the
/// values `ε`, `t-ε` and each `X` on the 9-node cartwheel, plus the
/// arrangements of the two named constructions.
pub fn three_nz_grid(level: GridLevel) -> Result<Vec<Instance>> {
    let t = Rational::from(40);
    let eps = Rational::one();
    let xs: Vec<Rational> = match level {
        GridLevel::Quick => [11, 20].map(Rational::from).to_vec(),
        GridLevel::Default => [2, 10, 11, 20, 21, 30].map(Rational::from).to_vec(),
    };
    let edges = gen_graph(GraphFamily::Cartwheel, 9)?;
    let mut out = Vec::new();
    for a in 0..9 {
        for b in 0..9 {
            for c in 0..9 {
                if a == b || b == c || a == c {
                    continue;
                }
                for &x in &xs {
                    let mut v = vec![Rational::zero(); 9];
                    v[a] = eps;
                    v[b] = t - eps;
                    v[c] = x;
                    out.push(Instance::new(9, edges.iter().copied(), v, t, Rational::one())?);
                }
            }
        }
    }
    Ok(out)
}

/// Distance inequality and bound over the MAGNET equilibrium winners
/// of one three-nonzero instance. Returns `(inequality violations, bound
/// violations, max spoa / bound)`.
pub fn three_nz_audit(inst: &Instance) -> Result<(usize, usize, Option<Rational>)> {
    let rep = match magnet_report(inst, inst.n()) {
        Ok(r) => r.report,
        Err(Error::NoStrongEquilibriumWithWinner) => return Ok((0, 0, None)),
        Err(e) => return Err(e),
    };
    let mut inequality_bad = 0;
    let mut bound_bad = 0;
    let mut worst_ratio: Option<Rational> = None;
    for w in &rep.se_winners {
        match three_nz_bound(inst, w) {
            Ok(b) => {
                if !b.distance_inequality_holds {
                    inequality_bad += 1;
                }
                let ratio = rep.sow.avg / evaluate(inst, w).avg;
                if ratio > b.bound {
                    bound_bad += 1;
                }
                let r = ratio / b.bound;
                if worst_ratio.is_none_or(|m| r > m) {
                    worst_ratio = Some(r);
                }
            }
            Err(Error::NoOutsideNonzero) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((inequality_bad, bound_bad, worst_ratio))
}

fn max_verdict(
    name: &str,
    claimed: Rational,
    items: impl IntoIterator<Item = (Rational, Option<Witness>)>,
) -> BoundVerdict {
    let mut observed = Rational::zero();
    let mut wit = None;
    for (v, w) in items {
        if wit.is_none() || v > observed {
            observed = v;
            wit = w;
        }
    }
    BoundVerdict::new(name, claimed, observed, wit)
}

fn count_verdict(name: &str, count: usize, wit: Option<Witness>) -> BoundVerdict {
    BoundVerdict::new(name, Rational::zero(), Rational::from(count), wit)
}

/// Runs the verification grid and returns one verdict per bound.
pub fn verify_grid(level: GridLevel) -> Result<Vec<BoundVerdict>> {
    let quick = level == GridLevel::Quick;
    let mut out = Vec::new();
    let mut extremal_instances: Vec<Instance> = Vec::new();

    // Line worst case against 1 + (n-1)/n.
    let line_ns: &[usize] = if quick { &[3] } else { &[3, 4, 5] };
    for &n in line_ns {
        for eps in sweep_eps(SweepFamily::Line) {
            let inst = sweep_instance(SweepFamily::Line, Game::Magnet, n, eps)?;
            let rep = magnet_report(&inst, inst.n())?.report;
            out.push(BoundVerdict::new(
                format!("magnet-line-n{n}-eps{eps}"),
                theoretical_bounds(n, BoundFamily::Line)?,
                rep.spoa,
                witness(&inst, Some(rep.worst.profile.to_string())),
            ));
            extremal_instances.push(inst);
        }
    }

    // Cliques.
    let ks: &[usize] = if quick { &[2, 3] } else { &[2, 3, 4] };
    for &k in ks {
        for game in [Game::Magnet, Game::Ccc] {
            let rows = spoa_sweep(SweepFamily::Clique, [k], game, crate::equilibrium::DEFAULT_LIMIT)?;
            let row = &rows[0];
            let inst = sweep_instance(SweepFamily::Clique, game, k, *sweep_eps(SweepFamily::Clique).last().unwrap())?;
            out.push(BoundVerdict::new(format!("{game}-clique-k{k}"), row.bound, row.observed, witness(&inst, None)));
            for eps in sweep_eps(SweepFamily::Clique) {
                extremal_instances.push(sweep_instance(SweepFamily::Clique, game, k, eps)?);
            }
        }
    }

    // Winner properties and existence on every instance above.
    let mut violations = 0;
    let mut missing = 0;
    let mut bad_wit = None;
    for inst in &extremal_instances {
        match winner_property_violations(inst, inst.n()) {
            Ok((v, z)) => {
                violations += v;
                if v > 0 && bad_wit.is_none() {
                    bad_wit = witness(inst, z.map(|z| z.to_string()));
                }
            }
            Err(Error::NoStrongEquilibriumWithWinner) => missing += 1,
            Err(e) => return Err(e),
        }
    }
    out.push(count_verdict("magnet-winner-properties-violations", violations, bad_wit));
    out.push(count_verdict("magnet-instances-without-se", missing, None));

    // MAGNET global bound.
    let mut config = SearchConfig::new(Game::Magnet, SearchFamily::All, if quick { 4 } else { 5 });
    let general = worst_case_search(&config)?;
    config.n_min = 6;
    config.n_max = 6;
    config.mode = SearchMode::Random { seed: 7, samples: if quick { 20 } else { 300 } };
    let sample = worst_case_search(&config)?;
    out.push(max_verdict(
        "magnet-general",
        Rational::from(2),
        [&general, &sample].into_iter().filter_map(|r| r.best.as_ref()).map(hit_witness),
    ));
    let (_, missing, first) = generic_existence(11, if quick { 100 } else { 2000 }, 6)?;
    out.push(count_verdict("magnet-generic-instances-without-se", missing, first.and_then(|i| witness(&i, None))));

    // CCC stays below 3 on trees.
    let mut config = SearchConfig::new(Game::Ccc, SearchFamily::Tree, if quick { 5 } else { 6 });
    config.grids = vec![ValueGrid::standard(Rational::from(12), Rational::one())];
    let trees = worst_case_search(&config)?;
    out.push(max_verdict("ccc-conjectured", Rational::from(3), trees.best.as_ref().map(hit_witness)));

    // Gold-rush.
    let gold_ns: &[usize] = if quick { &[3, 4] } else { &[3, 4, 5] };
    for &n in gold_ns {
        let half = Rational::new(n as i128, 2)?;
        let mut items = Vec::new();
        for eps in [2, 1].map(Rational::from) {
            let inst = paper_instance(PaperInstance::GoldrushWorst, &PaperParams::new(Rational::from(12), eps).n(n))?;
            if let PriceOfAnarchy::Bounded(p) = goldrush_report(&inst, n)?.poa {
                items.push((p, witness(&inst, None)));
            }
        }
        for inst in distinct_cliques(n, if quick { 8 } else { 10 })? {
            if let PriceOfAnarchy::Bounded(p) = goldrush_report(&inst, n)?.poa {
                items.push((p, witness(&inst, None)));
            }
        }
        out.push(max_verdict(&format!("goldrush-clique-n{n}"), half, items));
    }
    let mut dichotomy = 0;
    let mut strong_with_subset = 0;
    for n in 2..=*gold_ns.last().unwrap() {
        for inst in distinct_cliques(n, if quick { 8 } else { 10 })? {
            let a = goldrush_audit(&inst);
            dichotomy += a.dichotomy_violations;
            if a.has_strict_eligible_subset {
                strong_with_subset += a.strong;
            }
        }
    }
    out.push(count_verdict("goldrush-dichotomy-violations", dichotomy, None));
    out.push(count_verdict("goldrush-strong-with-eligible-subset", strong_with_subset, None));

    // Three nonzero players on the cartwheel.
    let grid = three_nz_grid(level)?;
    let audits = par::map(&grid, three_nz_audit);
    let mut inequality_bad = 0;
    let mut bound_bad = 0;
    let mut first_bad = None;
    for (inst, a) in grid.iter().zip(audits) {
        let (l, b, _) = a?;
        inequality_bad += l;
        bound_bad += b;
        if l + b > 0 && first_bad.is_none() {
            first_bad = witness(inst, None);
        }
    }
    out.push(count_verdict("three-nz-distance-inequality-violations", inequality_bad, first_bad.clone()));
    out.push(count_verdict("three-nz-bound-violations", bound_bad, first_bad));
    Ok(out)
}

/// MAGNET equilibrium existence on random connected graphs with values drawn
/// from `0..1000` and `T = 1000`, where average ties are rare. Returns
/// `(instances, instances without an equilibrium, first such instance)`.
pub fn generic_existence(seed: u64, count: usize, n_max: usize) -> Result<(usize, usize, Option<Instance>)> {
    let t: i64 = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = Vec::with_capacity(count);
    while instances.len() < count {
        let n = rng.random_range(3..=n_max);
        let graphs = connected_graphs(n)?;
        let edges = &graphs[rng.random_range(0..graphs.len())];
        let values: Vec<Rational> = (0..n).map(|_| Rational::from(rng.random_range(0..t))).collect();
        if let Ok(inst) = Instance::new(n, edges.iter().copied(), values, Rational::from(t), Rational::one()) {
            instances.push(inst);
        }
    }
    let found = par::map(&instances, |inst| match magnet_report(inst, n_max) {
        Ok(_) => Ok(true),
        Err(Error::NoStrongEquilibriumWithWinner) => Ok(false),
        Err(e) => Err(e),
    });
    let mut missing = 0;
    let mut first = None;
    for (inst, f) in instances.iter().zip(found) {
        if !f? {
            missing += 1;
            first.get_or_insert_with(|| inst.clone());
        }
    }
    Ok((count, missing, first))
}

fn hit_witness(h: &SearchHit) -> (Rational, Option<Witness>) {
    (h.spoa, Some(Witness { instance: h.instance.clone(), profile: Some(h.profile.clone()) }))
}

/// Complete graphs on `n` players with distinct integer values in `0..t`
/// and threshold `t`, one per value set.
pub fn distinct_cliques(n: usize, t: i64) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    let edges = gen_graph(GraphFamily::Complete, n)?;
    for m in 0u64..1 << t {
        if m.count_ones() as usize != n {
            continue;
        }
        let values: Vec<Rational> = (0..t).filter(|i| m >> i & 1 == 1).rev().map(Rational::from).collect();
        if values.iter().sum::<Rational>() >= Rational::from(t) {
            out.push(Instance::new(n, edges.iter().copied(), values, Rational::from(t), Rational::one())?);
        }
    }
    Ok(out)
}
