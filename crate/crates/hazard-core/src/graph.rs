//! Random-graph model specifications.
//!
//! A [`GraphSpec`] describes a distribution over graphs through per-edge
//! presence probabilities. Homogeneous families (complete blocks, stars,
//! rank-one weight products) are kept in structured form so that specs with
//! `n` in the 1e4..1e5 range stay O(n) in memory and can be sampled in time
//! proportional to the number of *realized* edges.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limit on node counts accepted by generators (guards `side^d`).
pub const MAX_NODES: usize = 1 << 26;

/// Nonnegative node weights for the rank-one (Poissonian) generator.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    total: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::DegenerateWeights);
        }
        let mut total = 0.0;
        for &w in &weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::DegenerateWeights);
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::DegenerateWeights);
        }
        Ok(Self { weights, total })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total(&self) -> f64 {
        self.total
    }
}

/// How the initial influencer set is chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum InfluencerScheme {
    /// A fixed node set (kept sorted and deduplicated).
    Fixed { nodes: Vec<u32> },
    /// Uniformly random subset of exactly `n0` nodes.
    UniformK { n0: usize },
    /// Each node is an influencer independently with probability `q`.
    Bernoulli { q: f64 },
}

impl InfluencerScheme {
    pub fn fixed(mut nodes: Vec<u32>) -> Self {
        nodes.sort_unstable();
        nodes.dedup();
        InfluencerScheme::Fixed { nodes }
    }

    /// Checks the scheme against a graph of `n` nodes.
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            InfluencerScheme::Fixed { nodes } => {
                for &v in nodes {
                    if v as usize >= n {
                        return Err(Error::IndexOutOfRange { index: v as u64, n });
                    }
                }
                Ok(())
            }
            InfluencerScheme::UniformK { n0 } => {
                if *n0 > n {
                    return Err(Error::Domain(format!(
                        "scenario n0 = {n0} exceeds node count {n}"
                    )));
                }
                Ok(())
            }
            InfluencerScheme::Bernoulli { q } => {
                if !(0.0..=1.0).contains(q) || !q.is_finite() {
                    return Err(Error::Domain(format!(
                        "scenario q = {q} must lie in [0, 1]"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn label(&self) -> String {
        match self {
            InfluencerScheme::Fixed { nodes } => format!("fixed(|I|={})", nodes.len()),
            InfluencerScheme::UniformK { n0 } => format!("uniform(n0={n0})"),
            InfluencerScheme::Bernoulli { q } => format!("bernoulli(q={q})"),
        }
    }
}

/// One structured group of edge probabilities.
#[derive(Debug, Clone)]
pub(crate) enum EdgeBlock {
    /// Explicit entries keyed by canonical pair (i <= j when undirected).
    Sparse { entries: BTreeMap<(u32, u32), f64> },
    /// The same probability on every pair {i, j} with lo <= i < j < n,
    /// optionally including the diagonal {i, i}.
    Complete { lo: u32, p: f64, diagonal: bool },
    /// Probability `p` on {hub, j} for every j != hub.
    Star { hub: u32, p: f64 },
    /// p_ij = 1 - exp(-w_i w_j / total) for i <= j (diagonal included).
    WeightProduct { weights: Vec<f64>, total: f64 },
}

/// Immutable description of a random-graph model.
///
/// Probabilities are strictly below one; a probability-one edge would make
/// every spectral bound in this crate vacuous, so it is rejected at
/// construction. Node indices are 0-based. For undirected specs the pair
/// {i, j} is stored once under the key (min, max) and queries are symmetric.
#[derive(Debug, Clone)]
pub struct GraphSpec {
    n: usize,
    undirected: bool,
    label: String,
    blocks: Vec<EdgeBlock>,
}

fn check_probability(p: f64, context: &str) -> Result<()> {
    if !p.is_finite() || !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidProbability {
            value: p,
            context: context.to_string(),
        });
    }
    Ok(())
}

impl GraphSpec {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn undirected(&self) -> bool {
        self.undirected
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn blocks(&self) -> &[EdgeBlock] {
        &self.blocks
    }

    /// Probability of the directed edge (i, j); symmetric when undirected.
    pub fn probability(&self, i: u32, j: u32) -> f64 {
        let key = self.canonical(i, j);
        for block in &self.blocks {
            match block {
                EdgeBlock::Sparse { entries } => {
                    if let Some(&p) = entries.get(&key) {
                        return p;
                    }
                }
                EdgeBlock::Complete { lo, p, diagonal } => {
                    let (a, b) = key;
                    if a >= *lo && b >= *lo && (a != b || *diagonal) {
                        return *p;
                    }
                }
                EdgeBlock::Star { hub, p } => {
                    let (a, b) = key;
                    if (a == *hub) != (b == *hub) {
                        return *p;
                    }
                }
                EdgeBlock::WeightProduct { weights, total } => {
                    let (a, b) = key;
                    let lambda = weights[a as usize] * weights[b as usize] / *total;
                    if lambda > 0.0 {
                        return -(-lambda).exp_m1();
                    }
                }
            }
        }
        0.0
    }

    fn canonical(&self, i: u32, j: u32) -> (u32, u32) {
        if self.undirected && i > j {
            (j, i)
        } else {
            (i, j)
        }
    }

    /// Visits every stored entry as (i, j, p) in canonical order per block.
    /// Entries with p = 0 are visited only when explicitly stored (sparse).
    pub fn for_each_entry(&self, mut f: impl FnMut(u32, u32, f64)) {
        for block in &self.blocks {
            match block {
                EdgeBlock::Sparse { entries } => {
                    for (&(i, j), &p) in entries {
                        f(i, j, p);
                    }
                }
                EdgeBlock::Complete { lo, p, diagonal } => {
                    let lo = *lo as usize;
                    for i in lo..self.n {
                        let start = if *diagonal { i } else { i + 1 };
                        for j in start..self.n {
                            f(i as u32, j as u32, *p);
                        }
                    }
                }
                EdgeBlock::Star { hub, p } => {
                    // Each pair {hub, j} appears once since j runs over the
                    // non-hub nodes exactly once.
                    for j in 0..self.n as u32 {
                        if j != *hub {
                            let (a, b) = if *hub < j { (*hub, j) } else { (j, *hub) };
                            f(a, b, *p);
                        }
                    }
                }
                EdgeBlock::WeightProduct { weights, total } => {
                    for i in 0..self.n {
                        for j in i..self.n {
                            let lambda = weights[i] * weights[j] / *total;
                            if lambda > 0.0 {
                                f(i as u32, j as u32, -(-lambda).exp_m1());
                            }
                        }
                    }
                }
            }
        }
    }

    /// Number of stored entries (explicit zeros included).
    pub fn entry_count(&self) -> usize {
        let mut count = 0usize;
        self.for_each_entry(|_, _, _| count += 1);
        count
    }

    /// Sum of stored edge probabilities (expected realized edge count).
    pub fn expected_edge_count(&self) -> f64 {
        let mut sum = 0.0;
        self.for_each_entry(|_, _, p| sum += p);
        sum
    }

    /// Largest stored probability, i.e. the max-norm of the expected
    /// adjacency matrix.
    pub fn max_probability(&self) -> f64 {
        let mut max = 0.0f64;
        for block in &self.blocks {
            match block {
                EdgeBlock::Sparse { entries } => {
                    for &p in entries.values() {
                        max = max.max(p);
                    }
                }
                EdgeBlock::Complete { p, .. } | EdgeBlock::Star { p, .. } => max = max.max(*p),
                EdgeBlock::WeightProduct { weights, total } => {
                    let top = weights.iter().fold(0.0f64, |m, &w| m.max(w));
                    let lambda = top * top / *total;
                    max = max.max(-(-lambda).exp_m1());
                }
            }
        }
        max
    }

    /// Builds a spec from explicit entries. Self-loops are accepted; for
    /// undirected specs a pair may be given in either orientation but only
    /// once.
    pub fn from_entries(
        n: usize,
        undirected: bool,
        label: impl Into<String>,
        entries: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("graph must have at least one node".into()));
        }
        if n > MAX_NODES {
            return Err(Error::SizeLimit {
                requested: n as u128,
                limit: MAX_NODES,
            });
        }
        let mut map = BTreeMap::new();
        for (i, j, p) in entries {
            if i as usize >= n {
                return Err(Error::IndexOutOfRange { index: i as u64, n });
            }
            if j as usize >= n {
                return Err(Error::IndexOutOfRange { index: j as u64, n });
            }
            check_probability(p, &format!("edge ({i}, {j})"))?;
            let key = if undirected && i > j { (j, i) } else { (i, j) };
            if map.insert(key, p).is_some() {
                return Err(Error::Domain(format!(
                    "duplicate edge entry ({}, {})",
                    key.0, key.1
                )));
            }
        }
        Ok(Self {
            n,
            undirected,
            label: label.into(),
            blocks: vec![EdgeBlock::Sparse { entries: map }],
        })
    }
}

/// Homogeneous model with p = c/n on every pair {i, j}, i <= j (the diagonal
/// is included so that the hazard radius takes the exact closed form
/// `-n ln(1 - c/n)`).
pub fn erdos_spec(n: usize, c: f64) -> Result<GraphSpec> {
    if n == 0 {
        return Err(Error::Domain("graph must have at least one node".into()));
    }
    if !c.is_finite() || c < 0.0 {
        return Err(Error::Domain(format!("mean degree parameter c = {c}")));
    }
    let p = c / n as f64;
    check_probability(p, "uniform pair probability c/n")?;
    let blocks = if p > 0.0 {
        vec![EdgeBlock::Complete {
            lo: 0,
            p,
            diagonal: true,
        }]
    } else {
        Vec::new()
    };
    Ok(GraphSpec {
        n,
        undirected: true,
        label: format!("erdos(n={n},c={c})"),
        blocks,
    })
}

/// Rank-one model: p_ij = 1 - exp(-w_i w_j / sum(w)), self-loops allowed.
pub fn norros_reittu_spec(w: &WeightVector) -> Result<GraphSpec> {
    let n = w.len();
    let top = w.weights().iter().fold(0.0f64, |m, &x| m.max(x));
    let max_lambda = top * top / w.total();
    let max_p = -(-max_lambda).exp_m1();
    check_probability(max_p, "weight-product pair probability")?;
    Ok(GraphSpec {
        n,
        undirected: true,
        label: format!("norros-reittu(n={n})"),
        blocks: vec![EdgeBlock::WeightProduct {
            weights: w.weights().to_vec(),
            total: w.total(),
        }],
    })
}

/// Star around node 0: probability p on {0, j} for j >= 1, zero elsewhere.
pub fn star_spec(n: usize, p: f64) -> Result<GraphSpec> {
    if n < 2 {
        return Err(Error::Domain(format!("star needs n >= 2, got {n}")));
    }
    check_probability(p, "star edge probability")?;
    let blocks = if p > 0.0 {
        vec![EdgeBlock::Star { hub: 0, p }]
    } else {
        Vec::new()
    };
    Ok(GraphSpec {
        n,
        undirected: true,
        label: format!("star(n={n},p={p})"),
        blocks,
    })
}

/// Homogeneous percolation on a d-dimensional torus with `side^d` nodes;
/// the periodic boundary gives every node degree exactly 2d.
pub fn grid_spec(d: u32, side: usize, p: f64) -> Result<GraphSpec> {
    if d < 1 {
        return Err(Error::Domain("grid dimension must be >= 1".into()));
    }
    if side < 2 {
        return Err(Error::Domain(format!("grid side must be >= 2, got {side}")));
    }
    check_probability(p, "grid edge probability")?;
    let mut n: u128 = 1;
    for _ in 0..d {
        n = n.saturating_mul(side as u128);
        if n > MAX_NODES as u128 {
            return Err(Error::SizeLimit {
                requested: n,
                limit: MAX_NODES,
            });
        }
    }
    let n = n as usize;
    let mut entries = BTreeMap::new();
    if p > 0.0 {
        // Node index in mixed radix base `side`; +1 step per axis (mod side).
        for node in 0..n {
            let mut stride = 1usize;
            for _ in 0..d {
                let coord = (node / stride) % side;
                let neighbor = node - coord * stride + ((coord + 1) % side) * stride;
                let key = if node < neighbor {
                    (node as u32, neighbor as u32)
                } else {
                    (neighbor as u32, node as u32)
                };
                // side = 2 collapses the two directions onto the same pair.
                entries.insert(key, p);
                stride *= side;
            }
        }
    }
    Ok(GraphSpec {
        n,
        undirected: true,
        label: format!("grid(d={d},side={side},p={p})"),
        blocks: vec![EdgeBlock::Sparse { entries }],
    })
}

/// Star with hub probability `a` plus a homogeneous background `b` on the
/// non-hub pairs; requires b < a.
pub fn random_star_spec(n: usize, a: f64, b: f64) -> Result<GraphSpec> {
    if n < 2 {
        return Err(Error::Domain(format!("random star needs n >= 2, got {n}")));
    }
    check_probability(a, "hub edge probability")?;
    check_probability(b, "background edge probability")?;
    if b >= a {
        return Err(Error::ParameterOrder { a, b });
    }
    let mut blocks = vec![EdgeBlock::Star { hub: 0, p: a }];
    if b > 0.0 {
        blocks.push(EdgeBlock::Complete {
            lo: 1,
            p: b,
            diagonal: false,
        });
    }
    Ok(GraphSpec {
        n,
        undirected: true,
        label: format!("random-star(n={n},a={a},b={b})"),
        blocks,
    })
}

/// Semantic equality: same node count, orientation and entry map (label and
/// internal block layout are ignored). Intended for moderate-size specs;
/// cost is proportional to the number of stored entries.
impl PartialEq for GraphSpec {
    fn eq(&self, other: &Self) -> bool {
        if self.n != other.n || self.undirected != other.undirected {
            return false;
        }
        let mut lhs = BTreeMap::new();
        self.for_each_entry(|i, j, p| {
            lhs.insert((i, j), p);
        });
        let mut rhs = BTreeMap::new();
        other.for_each_entry(|i, j, p| {
            rhs.insert((i, j), p);
        });
        lhs == rhs
    }
}

/// Writes a spec in the edge-list format:
/// comments start with `#`, the header line is `n <count> <directed|undirected>`
/// and every following line is `i j p` with p printed to 17 significant
/// digits so that reloading reproduces the exact same float.
pub fn to_edge_list(spec: &GraphSpec, path: impl AsRef<Path>) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut out = BufWriter::new(file);
    writeln!(out, "# label: {}", spec.label)?;
    writeln!(
        out,
        "n {} {}",
        spec.n,
        if spec.undirected {
            "undirected"
        } else {
            "directed"
        }
    )?;
    let mut buf = String::new();
    let mut io_err: Option<std::io::Error> = None;
    spec.for_each_entry(|i, j, p| {
        if io_err.is_some() {
            return;
        }
        buf.clear();
        let _ = write!(buf, "{i} {j} {p:.16e}");
        if let Err(e) = writeln!(out, "{buf}") {
            io_err = Some(e);
        }
    });
    if let Some(e) = io_err {
        return Err(e.into());
    }
    out.flush()?;
    Ok(())
}

/// Parses the edge-list format written by [`to_edge_list`].
pub fn from_edge_list(path: impl AsRef<Path>) -> Result<GraphSpec> {
    let path = path.as_ref();
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let file = File::open(path)?;
    let reader = BufReader::new(file);

    let mut label: Option<String> = None;
    let mut header: Option<(usize, bool)> = None;
    let mut entries: BTreeMap<(u32, u32), f64> = BTreeMap::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if label.is_none() {
                if let Some(l) = comment.trim().strip_prefix("label:") {
                    label = Some(l.trim().to_string());
                }
            }
            continue;
        }
        let tokens: Vec<&str> = trimmed.split_whitespace().collect();
        match header {
            None => {
                if tokens.len() != 3 || tokens[0] != "n" {
                    return Err(err(
                        lineno,
                        "expected header `n <count> <directed|undirected>`".into(),
                    ));
                }
                let n: usize = tokens[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid node count `{}`", tokens[1])))?;
                if n == 0 {
                    return Err(err(lineno, "node count must be >= 1".into()));
                }
                if n > MAX_NODES {
                    return Err(Error::SizeLimit {
                        requested: n as u128,
                        limit: MAX_NODES,
                    });
                }
                let undirected = match tokens[2] {
                    "undirected" => true,
                    "directed" => false,
                    other => {
                        return Err(err(
                            lineno,
                            format!("expected `directed` or `undirected`, got `{other}`"),
                        ))
                    }
                };
                header = Some((n, undirected));
            }
            Some((n, undirected)) => {
                if tokens.len() != 3 {
                    return Err(err(lineno, format!("expected `i j p`, got `{trimmed}`")));
                }
                let i: u32 = tokens[0]
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid node index `{}`", tokens[0])))?;
                let j: u32 = tokens[1]
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid node index `{}`", tokens[1])))?;
                let p: f64 = tokens[2]
                    .parse()
                    .map_err(|_| err(lineno, format!("invalid probability `{}`", tokens[2])))?;
                if i as usize >= n || j as usize >= n {
                    return Err(err(
                        lineno,
                        format!("node index out of range in `{trimmed}`"),
                    ));
                }
                if !p.is_finite() || !(0.0..1.0).contains(&p) {
                    return Err(err(lineno, format!("probability {p} must lie in [0, 1)")));
                }
                let key = if undirected && i > j { (j, i) } else { (i, j) };
                if entries.insert(key, p).is_some() {
                    return Err(err(
                        lineno,
                        format!("duplicate edge ({}, {})", key.0, key.1),
                    ));
                }
            }
        }
    }

    let (n, undirected) =
        header.ok_or_else(|| err(0, "missing header line `n <count> <...>`".into()))?;
    Ok(GraphSpec {
        n,
        undirected,
        label: label.unwrap_or_else(|| "edge-list".into()),
        blocks: vec![EdgeBlock::Sparse { entries }],
    })
}
