//! Graph families and the parameterized extremal instances.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;
use crate::rational::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphFamily {
    Complete,
    Line,
    Cycle,
    /// Cycle plus chords `{0, ⌈n/2⌉}` and `{n-1, ⌈n/2⌉-1}`.
    Cartwheel,
    /// Node 0 joined to every other node.
    Star,
}

impl GraphFamily {
    pub const ALL: [GraphFamily; 5] =
        [GraphFamily::Complete, GraphFamily::Line, GraphFamily::Cycle, GraphFamily::Cartwheel, GraphFamily::Star];

    pub fn name(self) -> &'static str {
        match self {
            GraphFamily::Complete => "complete",
            GraphFamily::Line => "line",
            GraphFamily::Cycle => "cycle",
            GraphFamily::Cartwheel => "cartwheel",
            GraphFamily::Star => "star",
        }
    }

    pub fn min_n(self) -> usize {
        match self {
            GraphFamily::Cycle => 3,
            GraphFamily::Cartwheel => 5,
            _ => 2,
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GraphFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete" | "clique" => Ok(GraphFamily::Complete),
            "line" | "path" => Ok(GraphFamily::Line),
            "cycle" => Ok(GraphFamily::Cycle),
            "cartwheel" => Ok(GraphFamily::Cartwheel),
            "star" => Ok(GraphFamily::Star),
            _ => Err(Error::BadParams(format!("unknown graph family {s:?}"))),
        }
    }
}

/// Edge list of the family on `n` nodes, each edge as `(small, large)`, sorted.
pub fn gen_graph(family: GraphFamily, n: usize) -> Result<Vec<(usize, usize)>> {
    if n < family.min_n() {
        return Err(Error::BadParams(format!("{family} needs n >= {}, got {n}", family.min_n())));
    }
    let line = (0..n - 1).map(|i| (i, i + 1));
    let mut edges: Vec<(usize, usize)> = match family {
        GraphFamily::Complete => (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect(),
        GraphFamily::Line => line.collect(),
        GraphFamily::Cycle => line.chain([(0, n - 1)]).collect(),
        GraphFamily::Cartwheel => {
            let h = n.div_ceil(2);
            line.chain([(0, n - 1), (0, h), (h - 1, n - 1)]).collect()
        }
        GraphFamily::Star => (1..n).map(|i| (0, i)).collect(),
    };
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

/// Instance on a named graph family.
pub fn family_instance(
    family: GraphFamily,
    values: Vec<Rational>,
    threshold: Rational,
    prize: Rational,
) -> Result<Instance> {
    let edges = gen_graph(family, values.len())?;
    Instance::new(values.len(), edges, values, threshold, prize)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PaperInstance {
    /// `k` players at `T/(k-1) - ε` and one at `kε`, on a clique.
    CccCliqueLower,
    /// `k-2` players at `T/(k-1)`, then `T/(k-1) - ε`, `T/k`, `ε`, on a clique.
    MagnetCliqueLower,
    /// Line `[T(n-1)/n, 0.., T-ε, 0.., ε]` with `n-2` zeros in each gap.
    LineWorstcase,
    /// Clique with values `T/2 + ε`, `T/2`, and `n-2` distinct values summing to `ε`.
    GoldrushWorst,
    /// Cartwheel on 9 nodes: `ε` at 0, `T-ε` at 3, `X` at 6.
    Cartwheel3nz,
    /// Cartwheel on 9 nodes: `ε` at 1, `T-ε` at 3, `X` at 8.
    Cartwheel3nzK3,
}

impl PaperInstance {
    pub const ALL: [PaperInstance; 6] = [
        PaperInstance::CccCliqueLower,
        PaperInstance::MagnetCliqueLower,
        PaperInstance::LineWorstcase,
        PaperInstance::GoldrushWorst,
        PaperInstance::Cartwheel3nz,
        PaperInstance::Cartwheel3nzK3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PaperInstance::CccCliqueLower => "ccc-clique-lower",
            PaperInstance::MagnetCliqueLower => "magnet-clique-lower",
            PaperInstance::LineWorstcase => "line-worstcase",
            PaperInstance::GoldrushWorst => "goldrush-worst",
            PaperInstance::Cartwheel3nz => "cartwheel-3nz",
            PaperInstance::Cartwheel3nzK3 => "cartwheel-3nz-k3",
        }
    }
}

impl fmt::Display for PaperInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PaperInstance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PaperInstance::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::BadParams(format!("unknown instance family {s:?}")))
    }
}

/// Parameters for [`paper_instance`]. `n` is used by the line and gold-rush
/// families, `k` by the clique families, `x` by the cartwheels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PaperParams {
    pub n: Option<usize>,
    pub k: Option<usize>,
    pub threshold: Rational,
    pub eps: Rational,
    pub prize: Rational,
    pub x: Option<Rational>,
}

impl PaperParams {
    pub fn new(threshold: Rational, eps: Rational) -> Self {
        PaperParams { n: None, k: None, threshold, eps, prize: Rational::one(), x: None }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn k(mut self, k: usize) -> Self {
        self.k = Some(k);
        self
    }

    pub fn x(mut self, x: Rational) -> Self {
        self.x = Some(x);
        self
    }

    fn need_n(&self, min: usize) -> Result<usize> {
        match self.n {
            Some(n) if n >= min => Ok(n),
            Some(n) => Err(Error::BadParams(format!("n must be at least {min}, got {n}"))),
            None => Err(Error::BadParams("missing parameter n".into())),
        }
    }

    fn need_k(&self) -> Result<usize> {
        match self.k {
            Some(k) if k >= 2 => Ok(k),
            Some(k) => Err(Error::BadParams(format!("k must be at least 2, got {k}"))),
            None => Err(Error::BadParams("missing parameter k".into())),
        }
    }
}

fn frac(a: Rational, b: usize) -> Rational {
    a / Rational::from(b)
}

/// Builds one of the extremal constructions. Values outside `[0, T)` or a
/// non-positive `ε` are rejected with `BadParams`.
pub fn paper_instance(which: PaperInstance, p: &PaperParams) -> Result<Instance> {
    let (t, eps) = (p.threshold, p.eps);
    if !t.is_positive() {
        return Err(Error::NonPositiveParameter("threshold"));
    }
    if !eps.is_positive() {
        return Err(Error::BadParams(format!("eps must be positive, got {eps}")));
    }
    let zero = Rational::zero();
    let (family, values) = match which {
        PaperInstance::CccCliqueLower => {
            let k = p.need_k()?;
            let mut v = vec![frac(t, k - 1) - eps; k];
            v.push(eps * Rational::from(k));
            (GraphFamily::Complete, v)
        }
        PaperInstance::MagnetCliqueLower => {
            let k = p.need_k()?;
            let mut v = vec![frac(t, k - 1); k - 2];
            v.extend([frac(t, k - 1) - eps, frac(t, k), eps]);
            (GraphFamily::Complete, v)
        }
        PaperInstance::LineWorstcase => {
            let n = p.need_n(2)?;
            let mut v = vec![frac(t * Rational::from(n - 1), n)];
            v.extend(std::iter::repeat_n(zero, n - 2));
            v.push(t - eps);
            v.extend(std::iter::repeat_n(zero, n - 2));
            v.push(eps);
            (GraphFamily::Line, v)
        }
        PaperInstance::GoldrushWorst => {
            let n = p.need_n(3)?;
            let total = (n - 2) * (n - 1) / 2;
            let mut v = vec![frac(t, 2) + eps, frac(t, 2)];
            v.extend((1..=n - 2).map(|i| eps * Rational::from(i) / Rational::from(total)));
            (GraphFamily::Complete, v)
        }
        PaperInstance::Cartwheel3nz | PaperInstance::Cartwheel3nzK3 => {
            if let Some(n) = p.n.filter(|&n| n != 9) {
                return Err(Error::BadParams(format!("{which} is defined on 9 nodes, got n={n}")));
            }
            let x = p.x.ok_or_else(|| Error::BadParams("missing parameter X".into()))?;
            let (at_eps, at_x) = if which == PaperInstance::Cartwheel3nz { (0, 6) } else { (1, 8) };
            let mut v = vec![zero; 9];
            v[at_eps] = eps;
            v[3] = t - eps;
            v[at_x] = x;
            (GraphFamily::Cartwheel, v)
        }
    };
    if let Some(bad) = values.iter().find(|v| v.is_negative() || **v >= t) {
        return Err(Error::BadParams(format!("{which}: value {bad} outside [0, {t})")));
    }
    family_instance(family, values, t, p.prize)
}
