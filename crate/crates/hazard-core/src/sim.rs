//! Seeded Monte Carlo samplers and exact small-instance oracles.
//!
//! Every sampler is a pure function of `(inputs, TrialSeed)`: replaying a
//! seed reproduces the draw bit-exactly, and distinct trial indices give
//! independent streams, so trials can be distributed across workers in any
//! order.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, LogNormal, Poisson};

use crate::bounds::IncubationDist;
use crate::error::{Error, Result};
use crate::graph::{EdgeBlock, GraphSpec, InfluencerScheme};

/// Enumeration oracle cap: at most this many non-self-loop entries.
pub const MAX_ENUM_EDGES: usize = 25;
/// Joint-pattern cap for the correlated SIR oracle.
const MAX_SIR_PATTERNS: u64 = 1 << 24;

/// Deterministic per-trial randomness derived from a master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeed {
    pub master: u64,
    pub index: u64,
}

/// Independent named substreams of one trial.
#[derive(Debug, Clone, Copy)]
pub enum StreamDomain {
    Graph,
    Scenario,
    SitePercolation,
    Sir,
    Cascade,
}

impl StreamDomain {
    fn tag(self) -> u64 {
        match self {
            StreamDomain::Graph => 1,
            StreamDomain::Scenario => 2,
            StreamDomain::SitePercolation => 3,
            StreamDomain::Sir => 4,
            StreamDomain::Cascade => 5,
        }
    }
}

impl TrialSeed {
    pub fn new(master: u64, index: u64) -> Self {
        Self { master, index }
    }

    /// Keyed counter stream: the 256-bit ChaCha key encodes
    /// (master, index, domain), so streams never overlap across trials or
    /// domains.
    pub fn rng(&self, domain: StreamDomain) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master.to_le_bytes());
        key[8..16].copy_from_slice(&self.index.to_le_bytes());
        key[16..24].copy_from_slice(&domain.tag().to_le_bytes());
        key[24..32].copy_from_slice(&0x9E37_79B9_7F4A_7C15u64.to_le_bytes());
        ChaCha8Rng::from_seed(key)
    }
}

/// Emits indices of a Bernoulli(p) process over `0..total` in increasing
/// order, in expected time proportional to the number of successes.
fn skip_sample(rng: &mut ChaCha8Rng, total: u64, p: f64, mut emit: impl FnMut(u64)) {
    if p <= 0.0 || total == 0 {
        return;
    }
    debug_assert!(p < 1.0);
    let lnq = (1.0 - p).ln();
    let mut pos: u64 = 0;
    loop {
        let u: f64 = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / lnq).floor();
        if !(skip < (total - pos) as f64) {
            break;
        }
        pos += skip as u64;
        emit(pos);
        pos += 1;
        if pos >= total {
            break;
        }
    }
}

/// Inverse of the row-major enumeration of pairs (i, j), i < j < m.
fn decode_pair(k: u64, m: u64) -> (u64, u64) {
    let cum = |i: u64| i * (2 * m - i - 1) / 2;
    let mf = 2.0 * m as f64 - 1.0;
    let disc = (mf * mf - 8.0 * k as f64).max(0.0);
    let mut i = ((mf - disc.sqrt()) * 0.5).floor().max(0.0) as u64;
    while i > 0 && cum(i) > k {
        i -= 1;
    }
    while cum(i + 1) <= k {
        i += 1;
    }
    let j = i + 1 + (k - cum(i));
    (i, j)
}

/// Draws an index proportional to `weights` via its cumulative sums.
/// The first index whose cumulative sum exceeds the target is chosen, so
/// zero-weight nodes are never selected.
fn weighted_pick(rng: &mut ChaCha8Rng, cumulative: &[f64]) -> usize {
    let total = *cumulative.last().unwrap();
    let target = rng.random::<f64>() * total;
    cumulative
        .partition_point(|&c| c <= target)
        .min(cumulative.len() - 1)
}

/// Streams one Bernoulli realization of the spec as canonical (i, j) pairs.
fn for_each_realized_edge(spec: &GraphSpec, rng: &mut ChaCha8Rng, mut emit: impl FnMut(u32, u32)) {
    let n = spec.n() as u64;
    for block in spec.blocks() {
        match block {
            EdgeBlock::Sparse { entries } => {
                for (&(i, j), &p) in entries {
                    if p > 0.0 && rng.random::<f64>() < p {
                        emit(i, j);
                    }
                }
            }
            EdgeBlock::Complete { lo, p, diagonal } => {
                let m = n - *lo as u64;
                let pairs = m * (m - 1) / 2;
                let total = pairs + if *diagonal { m } else { 0 };
                let lo = *lo as u64;
                skip_sample(rng, total, *p, |k| {
                    if k < pairs {
                        let (i, j) = decode_pair(k, m);
                        emit((lo + i) as u32, (lo + j) as u32);
                    } else {
                        let i = (lo + (k - pairs)) as u32;
                        emit(i, i);
                    }
                });
            }
            EdgeBlock::Star { hub, p } => {
                let hub = *hub as u64;
                skip_sample(rng, n - 1, *p, |k| {
                    let j = if k < hub { k } else { k + 1 };
                    let (a, b) = if hub < j { (hub, j) } else { (j, hub) };
                    emit(a as u32, b as u32);
                });
            }
            EdgeBlock::WeightProduct { weights, total } => {
                // Poisson pair process: events arrive at rate total/2 with
                // both endpoints drawn proportional to the weights, so the
                // unordered pair {i, j} receives Poisson(w_i w_j / total)
                // events; an edge is present iff at least one event hits it.
                let mut cumulative = Vec::with_capacity(weights.len());
                let mut acc = 0.0;
                for &w in weights {
                    acc += w;
                    cumulative.push(acc);
                }
                let events = Poisson::new(total / 2.0)
                    .expect("positive rate")
                    .sample(rng) as u64;
                let mut seen = HashSet::new();
                for _ in 0..events {
                    let u = weighted_pick(rng, &cumulative) as u32;
                    let v = weighted_pick(rng, &cumulative) as u32;
                    if u != v {
                        let key = if u < v { (u, v) } else { (v, u) };
                        if seen.insert(key) {
                            emit(key.0, key.1);
                        }
                    }
                }
                // Self-loop rate w_i^2 / total, drawn exactly per node.
                for (i, &w) in weights.iter().enumerate() {
                    if w > 0.0 {
                        let p = -(-w * w / total).exp_m1();
                        if rng.random::<f64>() < p {
                            emit(i as u32, i as u32);
                        }
                    }
                }
            }
        }
    }
}

/// One realized graph as adjacency lists of the directed edges.
#[derive(Debug, Clone)]
pub struct SampledGraph {
    n: usize,
    out: Vec<Vec<u32>>,
    symmetric: bool,
    realized: usize,
}

impl SampledGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn out_neighbors(&self, i: u32) -> &[u32] {
        &self.out[i as usize]
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    /// Number of realized canonical entries (undirected pairs stored once,
    /// self-loops included).
    pub fn realized_entries(&self) -> usize {
        self.realized
    }
}

fn sample_graph_in(spec: &GraphSpec, seed: &TrialSeed, domain: StreamDomain) -> SampledGraph {
    let mut rng = seed.rng(domain);
    let mut out = vec![Vec::new(); spec.n()];
    let mut realized = 0usize;
    for_each_realized_edge(spec, &mut rng, |i, j| {
        realized += 1;
        out[i as usize].push(j);
        if spec.undirected() && i != j {
            out[j as usize].push(i);
        }
    });
    SampledGraph {
        n: spec.n(),
        out,
        symmetric: spec.undirected(),
        realized,
    }
}

/// Independent Bernoulli draw of every stored entry; undirected entries are
/// drawn once and mirrored.
pub fn sample_graph(spec: &GraphSpec, seed: &TrialSeed) -> SampledGraph {
    sample_graph_in(spec, seed, StreamDomain::Graph)
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            size: vec![1; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Multiset of component sizes, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStats {
    sizes: Vec<usize>,
}

impl ComponentStats {
    pub fn new(mut sizes: Vec<usize>) -> Self {
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        Self { sizes }
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    /// Size of the largest component (0 when there are no nodes).
    pub fn largest(&self) -> usize {
        self.sizes.first().copied().unwrap_or(0)
    }

    /// Number of components of size at least `m`.
    pub fn n_at_least(&self, m: usize) -> usize {
        self.sizes.iter().take_while(|&&s| s >= m).count()
    }

    /// Total number of covered nodes.
    pub fn total(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// `sum_k C_k (1 - exp(-a C_k))`.
    pub fn linkperco_lhs(&self, a: f64) -> f64 {
        self.sizes
            .iter()
            .map(|&c| c as f64 * -(-a * c as f64).exp_m1())
            .sum()
    }

    /// `C1 (1 - exp(-a (C1 - 1)))`.
    pub fn c1_transform(&self, a: f64) -> f64 {
        let c1 = self.largest() as f64;
        c1 * -(-a * (c1 - 1.0)).exp_m1()
    }
}

/// Connected components of a symmetric realized graph.
pub fn components(graph: &SampledGraph) -> Result<ComponentStats> {
    if !graph.symmetric {
        return Err(Error::Asymmetric);
    }
    let mut uf = UnionFind::new(graph.n);
    for (i, neighbors) in graph.out.iter().enumerate() {
        for &j in neighbors {
            uf.union(i as u32, j);
        }
    }
    Ok(stats_from_union_find(&mut uf, graph.n))
}

fn stats_from_union_find(uf: &mut UnionFind, n: usize) -> ComponentStats {
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        if uf.find(v) == v {
            sizes.push(uf.size[v as usize] as usize);
        }
    }
    ComponentStats::new(sizes)
}

/// Component structure of one realization of an undirected spec, supporting
/// O(|I| log |I|) influence queries. Sharing the graph stream domain with
/// [`sample_graph`] means the same seed realizes the same graph.
#[derive(Debug, Clone)]
pub struct ComponentView {
    component: Vec<u32>,
    component_sizes: Vec<usize>,
}

pub fn sample_component_view(spec: &GraphSpec, seed: &TrialSeed) -> Result<ComponentView> {
    if !spec.undirected() {
        return Err(Error::Asymmetric);
    }
    let n = spec.n();
    let mut rng = seed.rng(StreamDomain::Graph);
    let mut uf = UnionFind::new(n);
    for_each_realized_edge(spec, &mut rng, |i, j| uf.union(i, j));
    let mut component = vec![u32::MAX; n];
    let mut component_sizes = Vec::new();
    for v in 0..n as u32 {
        let root = uf.find(v);
        if component[root as usize] == u32::MAX {
            component[root as usize] = component_sizes.len() as u32;
            component_sizes.push(uf.size[root as usize] as usize);
        }
        component[v as usize] = component[root as usize];
    }
    Ok(ComponentView {
        component,
        component_sizes,
    })
}

impl ComponentView {
    /// |R(I)| = total size of the distinct components touched by `I`.
    pub fn influence_of(&self, influencers: &[u32]) -> usize {
        let mut ids: Vec<u32> = influencers
            .iter()
            .map(|&v| self.component[v as usize])
            .collect();
        ids.sort_unstable();
        ids.dedup();
        ids.iter().map(|&c| self.component_sizes[c as usize]).sum()
    }

    pub fn stats(&self) -> ComponentStats {
        ComponentStats::new(self.component_sizes.clone())
    }
}

/// Breadth-first closure of `influencers` along directed edges.
pub fn reachable_set(graph: &SampledGraph, influencers: &[u32]) -> Result<Vec<u32>> {
    let n = graph.n;
    let mut visited = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    for &v in influencers {
        if v as usize >= n {
            return Err(Error::IndexOutOfRange { index: v as u64, n });
        }
        if !visited[v as usize] {
            visited[v as usize] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &graph.out[v as usize] {
            if !visited[w as usize] {
                visited[w as usize] = true;
                queue.push_back(w);
            }
        }
    }
    Ok((0..n as u32).filter(|&v| visited[v as usize]).collect())
}

/// Site percolation: nodes survive independently with probability `probs[i]`
/// and the induced subgraph on survivors is decomposed into components.
/// Removed nodes contribute nothing to the size multiset.
pub fn sample_site_percolation(
    n: usize,
    edges: &[(u32, u32)],
    probs: &[f64],
    seed: &TrialSeed,
) -> Result<ComponentStats> {
    if probs.len() != n {
        return Err(Error::Domain(format!(
            "expected {n} node probabilities, got {}",
            probs.len()
        )));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidProbability {
                value: p,
                context: format!("site survival probability of node {i}"),
            });
        }
    }
    let mut rng = seed.rng(StreamDomain::SitePercolation);
    let survives: Vec<bool> = probs.iter().map(|&p| rng.random::<f64>() < p).collect();
    let mut uf = UnionFind::new(n);
    for &(i, j) in edges {
        if i as usize >= n {
            return Err(Error::IndexOutOfRange { index: i as u64, n });
        }
        if j as usize >= n {
            return Err(Error::IndexOutOfRange { index: j as u64, n });
        }
        if survives[i as usize] && survives[j as usize] {
            uf.union(i, j);
        }
    }
    let mut sizes = Vec::new();
    for v in 0..n as u32 {
        if survives[v as usize] && uf.find(v) == v {
            sizes.push(uf.size[v as usize] as usize);
        }
    }
    Ok(ComponentStats::new(sizes))
}

fn sample_incubation(
    incubation: &IncubationDist,
    rng: &mut ChaCha8Rng,
    n: usize,
) -> Result<Vec<f64>> {
    incubation.validate()?;
    let mut times = Vec::with_capacity(n);
    match incubation {
        IncubationDist::Exponential { rate } => {
            let dist = Exp::new(*rate).map_err(|e| Error::Domain(e.to_string()))?;
            for _ in 0..n {
                times.push(dist.sample(rng));
            }
        }
        IncubationDist::LogNormal { mu, sigma } => {
            let dist = LogNormal::new(*mu, *sigma).map_err(|e| Error::Domain(e.to_string()))?;
            for _ in 0..n {
                times.push(dist.sample(rng));
            }
        }
        IncubationDist::Deterministic { d } => {
            times.resize(n, *d);
        }
    }
    Ok(times)
}

/// Final infected set of an SIR epidemic via the static reduction: node `i`
/// draws one incubation time `D_i`; the directed edge (i, j) is realized iff
/// an independent Exp(beta) transmission time beats `D_i`. Out-edges of a
/// node share its incubation draw and are therefore positively correlated.
pub fn sample_sir_final(
    n: usize,
    edges: &[(u32, u32)],
    beta: f64,
    incubation: &IncubationDist,
    influencers: &[u32],
    seed: &TrialSeed,
) -> Result<Vec<u32>> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::Domain(format!("beta = {beta} must be > 0")));
    }
    let mut rng = seed.rng(StreamDomain::Sir);
    let incubation_times = sample_incubation(incubation, &mut rng, n)?;
    let transmission = Exp::new(beta).map_err(|e| Error::Domain(e.to_string()))?;
    let mut out = vec![Vec::new(); n];
    let mut realized = 0usize;
    for &(i, j) in edges {
        if i as usize >= n {
            return Err(Error::IndexOutOfRange { index: i as u64, n });
        }
        if j as usize >= n {
            return Err(Error::IndexOutOfRange { index: j as u64, n });
        }
        if i == j {
            return Err(Error::Domain(format!("self-loop edge ({i}, {i})")));
        }
        if transmission.sample(&mut rng) < incubation_times[i as usize] {
            out[i as usize].push(j);
        }
        if transmission.sample(&mut rng) < incubation_times[j as usize] {
            out[j as usize].push(i);
        }
        realized += 1;
    }
    let graph = SampledGraph {
        n,
        out,
        symmetric: false,
        realized,
    };
    reachable_set(&graph, influencers)
}

/// Discrete-time cascade draw: every stored entry is an independent
/// transmission coin (undirected specs share one coin per pair), followed by
/// the reachability closure.
pub fn sample_dtic(spec: &GraphSpec, influencers: &[u32], seed: &TrialSeed) -> Result<Vec<u32>> {
    let graph = sample_graph_in(spec, seed, StreamDomain::Cascade);
    reachable_set(&graph, influencers)
}

/// Converts continuous-time cascade rate integrals `Lambda_ij` into the
/// equivalent infinite-horizon transmission probabilities
/// `1 - exp(-Lambda_ij)`.
pub fn ctic_to_dtic_spec(
    n: usize,
    lambdas: &[(u32, u32, f64)],
    label: impl Into<String>,
) -> Result<GraphSpec> {
    let mut entries = Vec::with_capacity(lambdas.len());
    for &(i, j, lambda) in lambdas {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Domain(format!(
                "rate integral for edge ({i}, {j}) = {lambda} must be >= 0"
            )));
        }
        entries.push((i, j, -(-lambda).exp_m1()));
    }
    GraphSpec::from_entries(n, false, label, entries)
}

/// Continuous-time cascade at infinite horizon.
pub fn sample_ctic(
    n: usize,
    lambdas: &[(u32, u32, f64)],
    influencers: &[u32],
    seed: &TrialSeed,
) -> Result<Vec<u32>> {
    let spec = ctic_to_dtic_spec(n, lambdas, "ctic")?;
    sample_dtic(&spec, influencers, seed)
}

/// Draws an influencer set according to the scheme (sorted, deduplicated).
pub fn draw_influencers(
    scheme: &InfluencerScheme,
    n: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<u32>> {
    scheme.validate(n)?;
    match scheme {
        InfluencerScheme::Fixed { nodes } => Ok(nodes.clone()),
        InfluencerScheme::UniformK { n0 } => {
            // Partial Fisher-Yates: exactly uniform over size-n0 subsets.
            let mut pool: Vec<u32> = (0..n as u32).collect();
            for t in 0..*n0 {
                let pick = rng.random_range(t..n);
                pool.swap(t, pick);
            }
            let mut chosen: Vec<u32> = pool[..*n0].to_vec();
            chosen.sort_unstable();
            Ok(chosen)
        }
        InfluencerScheme::Bernoulli { q } => {
            Ok((0..n as u32).filter(|_| rng.random::<f64>() < *q).collect())
        }
    }
}

struct EnumerationSetup {
    /// (local i, local j, p) for every positive non-self-loop entry.
    edges: Vec<(usize, usize, f64)>,
    /// Global ids of the edge-touched nodes.
    relevant: Vec<u32>,
    undirected: bool,
}

fn enumeration_setup(spec: &GraphSpec) -> Result<EnumerationSetup> {
    let mut raw = Vec::new();
    spec.for_each_entry(|i, j, p| {
        if p > 0.0 && i != j {
            raw.push((i, j, p));
        }
    });
    if raw.len() > MAX_ENUM_EDGES {
        return Err(Error::Capacity(format!(
            "{} edge entries exceed the enumeration cap of {MAX_ENUM_EDGES}",
            raw.len()
        )));
    }
    let mut relevant: Vec<u32> = raw.iter().flat_map(|&(i, j, _)| [i, j]).collect();
    relevant.sort_unstable();
    relevant.dedup();
    let local = |v: u32| relevant.binary_search(&v).unwrap();
    let edges = raw
        .into_iter()
        .map(|(i, j, p)| (local(i), local(j), p))
        .collect();
    Ok(EnumerationSetup {
        edges,
        relevant,
        undirected: spec.undirected(),
    })
}

fn closure_from(adjacency: &[u64], start: u64) -> u64 {
    let mut reached = start;
    loop {
        let mut next = reached;
        let mut bits = reached;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            next |= adjacency[v];
        }
        if next == reached {
            return reached;
        }
        reached = next;
    }
}

/// Exact influence `E[|R(I, A)|]` by enumerating all edge realizations.
/// Self-loops and zero-probability entries never affect reachability and
/// are excluded from the enumeration; at most [`MAX_ENUM_EDGES`] entries.
pub fn exact_influence(spec: &GraphSpec, influencers: &[u32]) -> Result<f64> {
    let scheme = InfluencerScheme::fixed(influencers.to_vec());
    exact_influence_scheme(spec, &scheme)
}

/// Exact expected influence under any influencer scheme.
///
/// For the random schemes the per-realization average over influencer draws
/// is computed in closed form from the ancestor counts of each node, so no
/// sampling over `I` is involved.
pub fn exact_influence_scheme(spec: &GraphSpec, scheme: &InfluencerScheme) -> Result<f64> {
    scheme.validate(spec.n())?;
    let setup = enumeration_setup(spec)?;
    let nl = setup.relevant.len();
    let n = spec.n();

    // Probability that a random influencer set hits a fixed ancestor set of
    // size r, indexed by r.
    let hit_probability: Option<Vec<f64>> = match scheme {
        InfluencerScheme::Fixed { .. } => None,
        InfluencerScheme::UniformK { n0 } => {
            let k = *n0;
            let mut table = vec![0.0; nl + 1];
            for (r, slot) in table.iter_mut().enumerate() {
                let mut miss = 1.0;
                for t in 0..k {
                    miss *= n.saturating_sub(r + t) as f64 / (n - t) as f64;
                }
                *slot = 1.0 - miss;
            }
            Some(table)
        }
        InfluencerScheme::Bernoulli { q } => {
            let mut table = vec![0.0; nl + 1];
            for (r, slot) in table.iter_mut().enumerate() {
                table_fill_bernoulli(slot, *q, r);
            }
            Some(table)
        }
    };

    let fixed: Option<(u64, usize)> = match scheme {
        InfluencerScheme::Fixed { nodes } => {
            let mut mask = 0u64;
            for &v in nodes {
                if let Ok(idx) = setup.relevant.binary_search(&v) {
                    mask |= 1 << idx;
                }
            }
            Some((mask, nodes.len()))
        }
        _ => None,
    };

    let mut adjacency = vec![0u64; nl];
    let mut total = 0.0;
    enumerate_realizations(
        &setup.edges,
        setup.undirected,
        &mut adjacency,
        0,
        1.0,
        &mut |adjacency, probability| {
            let value = match (&fixed, &hit_probability) {
                (Some((mask, base)), _) => {
                    let closure = closure_from(adjacency, *mask);
                    let outside = (closure & !mask).count_ones() as usize;
                    (*base + outside) as f64
                }
                (None, Some(table)) => {
                    // reach[v] = nodes reachable from v (including v).
                    let mut reach: Vec<u64> = adjacency.to_vec();
                    for (v, r) in reach.iter_mut().enumerate() {
                        *r |= 1 << v;
                    }
                    for k in 0..nl {
                        for v in 0..nl {
                            if reach[v] >> k & 1 == 1 {
                                reach[v] |= reach[k];
                            }
                        }
                    }
                    let mut expected = (n - nl) as f64 * table[1];
                    for u in 0..nl {
                        let ancestors = reach.iter().filter(|&&mask| mask >> u & 1 == 1).count();
                        expected += table[ancestors];
                    }
                    expected
                }
                _ => unreachable!(),
            };
            total += probability * value;
        },
    );
    Ok(total)
}

fn table_fill_bernoulli(slot: &mut f64, q: f64, r: usize) {
    // 1 - (1-q)^r without drift for small q.
    *slot = -((1.0 - q).powi(r as i32) - 1.0);
}

fn enumerate_realizations(
    edges: &[(usize, usize, f64)],
    undirected: bool,
    adjacency: &mut Vec<u64>,
    depth: usize,
    probability: f64,
    visit: &mut impl FnMut(&[u64], f64),
) {
    if depth == edges.len() {
        visit(adjacency, probability);
        return;
    }
    let (i, j, p) = edges[depth];
    enumerate_realizations(
        edges,
        undirected,
        adjacency,
        depth + 1,
        probability * (1.0 - p),
        visit,
    );
    adjacency[i] |= 1 << j;
    let mirrored = undirected && adjacency[j] >> i & 1 == 0;
    if mirrored {
        adjacency[j] |= 1 << i;
    }
    enumerate_realizations(
        edges,
        undirected,
        adjacency,
        depth + 1,
        probability * p,
        visit,
    );
    adjacency[i] &= !(1u64 << j);
    if mirrored {
        adjacency[j] &= !(1u64 << i);
    }
}

/// Exact SIR influence with exponential incubation, by enumerating the
/// joint out-edge success patterns of every node.
///
/// Conditional on `D_i`, the out-edges of node `i` succeed independently
/// with probability `1 - exp(-beta D_i)`; integrating out the exponential
/// incubation gives, for a pattern with `w` successes out of `d` edges,
/// `P = sum_{t<=w} C(w,t) (-1)^t delta / (delta + (t + d - w) beta)`.
pub fn exact_sir_influence(
    n: usize,
    edges: &[(u32, u32)],
    beta: f64,
    delta: f64,
    influencers: &[u32],
) -> Result<f64> {
    if !(beta > 0.0 && delta > 0.0) {
        return Err(Error::Domain("beta and delta must be > 0".into()));
    }
    if n > 64 {
        return Err(Error::Capacity(
            "SIR oracle supports at most 64 nodes".into(),
        ));
    }
    let mut neighbors = vec![Vec::new(); n];
    for &(i, j) in edges {
        if i as usize >= n {
            return Err(Error::IndexOutOfRange { index: i as u64, n });
        }
        if j as usize >= n {
            return Err(Error::IndexOutOfRange { index: j as u64, n });
        }
        if i == j {
            return Err(Error::Domain(format!("self-loop edge ({i}, {i})")));
        }
        neighbors[i as usize].push(j);
        neighbors[j as usize].push(i);
    }
    let total_bits: u32 = neighbors.iter().map(|nb| nb.len() as u32).sum();
    if total_bits as u64 >= 63 || (1u64 << total_bits) > MAX_SIR_PATTERNS {
        return Err(Error::Capacity(format!(
            "2^{total_bits} joint SIR patterns exceed the cap of {MAX_SIR_PATTERNS}"
        )));
    }
    let mut start = 0u64;
    for &v in influencers {
        if v as usize >= n {
            return Err(Error::IndexOutOfRange { index: v as u64, n });
        }
        start |= 1 << v;
    }

    // pattern_probability[d][w]: probability that a specific success
    // pattern with w successes occurs for a node of out-degree d.
    let max_degree = neighbors.iter().map(Vec::len).max().unwrap_or(0);
    let mut pattern_probability = vec![Vec::new(); max_degree + 1];
    let binomial = |n: usize, k: usize| -> f64 {
        let mut value = 1.0;
        for t in 0..k {
            value = value * (n - t) as f64 / (t + 1) as f64;
        }
        value
    };
    for (d, row) in pattern_probability.iter_mut().enumerate() {
        for w in 0..=d {
            let mut p = 0.0;
            for t in 0..=w {
                let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
                p += sign * binomial(w, t) * delta / (delta + (t + d - w) as f64 * beta);
            }
            row.push(p);
        }
        debug_assert!(((0..=d).map(|w| binomial(d, w) * row[w]).sum::<f64>() - 1.0).abs() < 1e-10);
    }

    fn recurse(
        node: usize,
        neighbors: &[Vec<u32>],
        pattern_probability: &[Vec<f64>],
        adjacency: &mut [u64],
        probability: f64,
        start: u64,
        total: &mut f64,
    ) {
        if node == neighbors.len() {
            let closure = closure_from(adjacency, start);
            *total += probability * closure.count_ones() as f64;
            return;
        }
        let degree = neighbors[node].len();
        for mask in 0u32..(1 << degree) {
            let successes = mask.count_ones() as usize;
            let p = pattern_probability[degree][successes];
            let mut out = 0u64;
            for (bit, &target) in neighbors[node].iter().enumerate() {
                if mask >> bit & 1 == 1 {
                    out |= 1 << target;
                }
            }
            adjacency[node] = out;
            recurse(
                node + 1,
                neighbors,
                pattern_probability,
                adjacency,
                probability * p,
                start,
                total,
            );
        }
        adjacency[node] = 0;
    }

    let mut adjacency = vec![0u64; n];
    let mut total = 0.0;
    recurse(
        0,
        &neighbors,
        &pattern_probability,
        &mut adjacency,
        1.0,
        start,
        &mut total,
    );
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{erdos_spec, norros_reittu_spec, star_spec, WeightVector};
    use proptest::prelude::*;

    fn seed(master: u64, index: u64) -> TrialSeed {
        TrialSeed::new(master, index)
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = erdos_spec(60, 2.0).unwrap();
        let a = sample_graph(&spec, &seed(7, 3));
        let b = sample_graph(&spec, &seed(7, 3));
        assert_eq!(a.out, b.out);
        let c = sample_graph(&spec, &seed(7, 4));
        assert_ne!(a.out, c.out);
    }

    #[test]
    fn empty_spec_samples_empty_graph() {
        let spec = erdos_spec(10, 0.0).unwrap();
        let g = sample_graph(&spec, &seed(1, 1));
        assert_eq!(g.realized_entries(), 0);
        let stats = components(&g).unwrap();
        assert_eq!(stats.sizes(), &[1usize; 10][..]);
    }

    #[test]
    fn component_view_matches_components() {
        let spec = erdos_spec(200, 1.5).unwrap();
        for index in 0..20 {
            let s = seed(42, index);
            let g = sample_graph(&spec, &s);
            let direct = components(&g).unwrap();
            let view = sample_component_view(&spec, &s).unwrap();
            assert_eq!(direct, view.stats());
            assert_eq!(direct.total(), 200);
        }
    }

    #[test]
    fn skip_sampler_matches_per_pair_marginals() {
        // Complete block on 4 nodes with diagonal: 6 pairs + 4 loops.
        let spec = erdos_spec(4, 2.0).unwrap();
        let p = 0.5;
        let trials = 40_000;
        let mut counts = std::collections::BTreeMap::new();
        for t in 0..trials {
            let g = sample_graph(&spec, &seed(11, t));
            for i in 0..4u32 {
                for &j in g.out_neighbors(i) {
                    if i <= j {
                        *counts.entry((i, j)).or_insert(0usize) += 1;
                    }
                }
            }
        }
        assert_eq!(counts.len(), 10);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        for (&pair, &count) in &counts {
            let freq = count as f64 / trials as f64;
            assert!((freq - p).abs() < 4.0 * sigma, "pair {pair:?}: freq {freq}");
        }
    }

    #[test]
    fn pair_decoding_is_exact_for_all_indices() {
        for m in 2u64..=150 {
            let mut expected = Vec::new();
            for i in 0..m {
                for j in (i + 1)..m {
                    expected.push((i, j));
                }
            }
            for (k, &pair) in expected.iter().enumerate() {
                assert_eq!(decode_pair(k as u64, m), pair, "m={m} k={k}");
            }
        }
        // Spot-check the far end of a large block for float-precision slips.
        let m = 100_000u64;
        let pairs = m * (m - 1) / 2;
        for k in [0, 1, m - 2, pairs / 2, pairs - m, pairs - 1] {
            let (i, j) = decode_pair(k, m);
            assert!(i < j && j < m);
            let cum = i * (2 * m - i - 1) / 2;
            assert_eq!(cum + (j - i - 1), k, "k={k}");
        }
    }

    #[test]
    fn zero_weight_nodes_never_picked() {
        let mut rng = seed(55, 0).rng(StreamDomain::Graph);
        let cumulative = [0.0, 0.0, 1.0, 1.0, 2.5];
        for _ in 0..10_000 {
            let idx = weighted_pick(&mut rng, &cumulative);
            assert!(idx == 2 || idx == 4, "picked zero-weight index {idx}");
        }
    }

    #[test]
    fn realized_edge_count_is_binomial() {
        let spec = erdos_spec(500, 2.0).unwrap();
        let mean_p = spec.expected_edge_count();
        let trials = 400u64;
        let mut total = 0.0;
        for t in 0..trials {
            total += sample_graph(&spec, &seed(5, t)).realized_entries() as f64;
        }
        let mean = total / trials as f64;
        // Var of one draw ~ sum p(1-p); stderr over the trial mean.
        let var_one: f64 = (mean_p * (1.0 - 2.0 / 500.0)).max(0.5);
        let stderr = (var_one / trials as f64).sqrt();
        assert!(
            (mean - mean_p).abs() < 4.0 * stderr.max(1.0),
            "mean {mean} expected {mean_p}"
        );
    }

    #[test]
    fn norros_reittu_sampler_marginals() {
        let w = WeightVector::new(vec![1.0, 2.0, 3.0]).unwrap();
        let spec = norros_reittu_spec(&w).unwrap();
        let trials = 60_000u64;
        let mut count01 = 0usize;
        let mut count12 = 0usize;
        let mut loop2 = 0usize;
        for t in 0..trials {
            let g = sample_graph(&spec, &seed(23, t));
            if g.out_neighbors(0).contains(&1) {
                count01 += 1;
            }
            if g.out_neighbors(1).contains(&2) {
                count12 += 1;
            }
            // Self-loop: node 2 listed in its own neighbors.
            if g.out_neighbors(2).contains(&2) {
                loop2 += 1;
            }
        }
        for (count, p) in [
            (count01, spec.probability(0, 1)),
            (count12, spec.probability(1, 2)),
            (loop2, spec.probability(2, 2)),
        ] {
            let freq = count as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * sigma, "freq {freq} vs p {p}");
        }
    }

    #[test]
    fn reachable_set_examples() {
        let spec =
            crate::graph::GraphSpec::from_entries(3, false, "path", [(0, 1, 0.999), (1, 2, 0.999)])
                .unwrap();
        let mut g = sample_graph(&spec, &seed(1, 0));
        // Force the deterministic shape for the example.
        g.out = vec![vec![1], vec![2], vec![]];
        assert_eq!(reachable_set(&g, &[]).unwrap(), Vec::<u32>::new());
        assert_eq!(reachable_set(&g, &[0]).unwrap(), vec![0, 1, 2]);
        assert_eq!(reachable_set(&g, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        assert!(reachable_set(&g, &[9]).is_err());
    }

    #[test]
    fn components_examples() {
        let spec =
            crate::graph::GraphSpec::from_entries(3, true, "pair", [(0, 1, 0.9999)]).unwrap();
        let mut found = false;
        for t in 0..10 {
            let g = sample_graph(&spec, &seed(2, t));
            if g.out_neighbors(0).contains(&1) {
                let stats = components(&g).unwrap();
                assert_eq!(stats.sizes(), &[2, 1]);
                assert_eq!(stats.n_at_least(2), 1);
                assert_eq!(stats.n_at_least(1), 2);
                found = true;
                break;
            }
        }
        assert!(found);

        let directed = crate::graph::GraphSpec::from_entries(3, false, "d", [(0, 1, 0.5)]).unwrap();
        let g = sample_graph(&directed, &seed(3, 0));
        assert!(matches!(components(&g), Err(Error::Asymmetric)));
    }

    #[test]
    fn reachability_monotone_under_coupling() {
        // Couple two nested realizations through shared uniforms.
        let n = 12usize;
        let mut rng = seed(77, 0).rng(StreamDomain::Graph);
        for _ in 0..50 {
            let mut lo_adj = vec![Vec::new(); n];
            let mut hi_adj = vec![Vec::new(); n];
            let mut realized = (0, 0);
            for i in 0..n as u32 {
                for j in (i + 1)..n as u32 {
                    let u: f64 = rng.random();
                    if u < 0.08 {
                        lo_adj[i as usize].push(j);
                        lo_adj[j as usize].push(i);
                        realized.0 += 1;
                    }
                    if u < 0.2 {
                        hi_adj[i as usize].push(j);
                        hi_adj[j as usize].push(i);
                        realized.1 += 1;
                    }
                }
            }
            let lo = SampledGraph {
                n,
                out: lo_adj,
                symmetric: true,
                realized: realized.0,
            };
            let hi = SampledGraph {
                n,
                out: hi_adj,
                symmetric: true,
                realized: realized.1,
            };
            let r_lo = reachable_set(&lo, &[0, 3]).unwrap();
            let r_hi = reachable_set(&hi, &[0, 3]).unwrap();
            assert!(r_lo.iter().all(|v| r_hi.contains(v)));
        }
    }

    #[test]
    fn site_percolation_examples() {
        let triangle = [(0u32, 1u32), (1, 2), (0, 2)];
        let stats = sample_site_percolation(3, &triangle, &[0.0; 3], &seed(4, 0)).unwrap();
        assert!(stats.sizes().is_empty());
        assert_eq!(stats.total(), 0);

        let nearly_one = [1.0 - 1e-9; 3];
        let stats = sample_site_percolation(3, &triangle, &nearly_one, &seed(4, 1)).unwrap();
        assert_eq!(stats.sizes(), &[3]);
    }

    #[test]
    fn site_percolation_triangle_distribution() {
        // P(C1 >= 2) = P(at least two of three nodes survive) = 1/2.
        let triangle = [(0u32, 1u32), (1, 2), (0, 2)];
        let probs = [0.5; 3];
        let trials = 100_000u64;
        let mut hits = 0usize;
        for t in 0..trials {
            let stats = sample_site_percolation(3, &triangle, &probs, &seed(9, t)).unwrap();
            if stats.largest() >= 2 {
                hits += 1;
            }
        }
        let freq = hits as f64 / trials as f64;
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((freq - 0.5).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn sir_two_node_mean_and_marginal() {
        let edges = [(0u32, 1u32)];
        let incubation = IncubationDist::Exponential { rate: 1.0 };
        let trials = 100_000u64;
        let mut size_total = 0usize;
        let mut transmissions = 0usize;
        for t in 0..trials {
            let set = sample_sir_final(2, &edges, 1.0, &incubation, &[0], &seed(13, t)).unwrap();
            size_total += set.len();
            if set.len() == 2 {
                transmissions += 1;
            }
        }
        let mean = size_total as f64 / trials as f64;
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!((mean - 1.5).abs() < 3.0 * sigma, "mean {mean}");
        let marginal = transmissions as f64 / trials as f64;
        assert!((marginal - 0.5).abs() < 3.0 * sigma, "marginal {marginal}");
    }

    #[test]
    fn sir_marginal_matches_laplace_for_each_variant() {
        let edges = [(0u32, 1u32)];
        let trials = 60_000u64;
        let beta = 0.8;
        let variants = [
            IncubationDist::Exponential { rate: 1.3 },
            IncubationDist::LogNormal {
                mu: 0.2,
                sigma: 0.7,
            },
            IncubationDist::Deterministic { d: 1.1 },
        ];
        for incubation in &variants {
            let expected = crate::bounds::sir_transmission_probability(beta, incubation).unwrap();
            let mut hits = 0usize;
            for t in 0..trials {
                let set =
                    sample_sir_final(2, &edges, beta, incubation, &[0], &seed(17, t)).unwrap();
                if set.len() == 2 {
                    hits += 1;
                }
            }
            let freq = hits as f64 / trials as f64;
            let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
            assert!(
                (freq - expected).abs() < 3.5 * sigma,
                "{incubation:?}: freq {freq} expected {expected}"
            );
        }
    }

    #[test]
    fn sir_sibling_edges_positively_correlated() {
        // Hub 0 with leaves 1 and 2; the two out-edges of the hub share D_0.
        let edges = [(0u32, 1u32), (0, 2)];
        let incubation = IncubationDist::Exponential { rate: 1.0 };
        let trials = 100_000u64;
        let (mut x_sum, mut y_sum, mut xy_sum) = (0.0, 0.0, 0.0);
        let mut samples = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let set = sample_sir_final(3, &edges, 1.0, &incubation, &[0], &seed(19, t)).unwrap();
            let x = if set.contains(&1) { 1.0 } else { 0.0 };
            let y = if set.contains(&2) { 1.0 } else { 0.0 };
            x_sum += x;
            y_sum += y;
            xy_sum += x * y;
            samples.push((x, y));
        }
        let t = trials as f64;
        let (mx, my) = (x_sum / t, y_sum / t);
        let cov = xy_sum / t - mx * my;
        let var: f64 = samples
            .iter()
            .map(|&(x, y)| {
                let centered = (x - mx) * (y - my);
                (centered - cov) * (centered - cov)
            })
            .sum::<f64>()
            / t;
        let stderr = (var / t).sqrt();
        assert!(cov >= -3.0 * stderr, "cov {cov} stderr {stderr}");
        // For beta = delta the joint success probability is
        // E[(1 - e^{-D})^2] = 1 - 2/2 + 1/3 = 1/3 > 1/4.
        assert!(
            cov > 0.05,
            "expected clearly positive correlation, got {cov}"
        );
    }

    #[test]
    fn exact_influence_examples() {
        let triangle = crate::graph::GraphSpec::from_entries(
            3,
            true,
            "triangle",
            [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)],
        )
        .unwrap();
        let sigma = exact_influence(&triangle, &[0]).unwrap();
        assert!((sigma - 2.25).abs() < 1e-12);

        let star = star_spec(5, 0.3).unwrap();
        let sigma = exact_influence(&star, &[0]).unwrap();
        assert!((sigma - 2.2).abs() < 1e-12);

        let everyone: Vec<u32> = (0..5).collect();
        assert_eq!(exact_influence(&star, &everyone).unwrap(), 5.0);
    }

    #[test]
    fn exact_influence_capacity() {
        let spec = erdos_spec(9, 3.0).unwrap(); // 36 pairs > 25
        assert!(matches!(
            exact_influence(&spec, &[0]),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn exact_scheme_uniform_matches_subset_average() {
        let spec = crate::graph::GraphSpec::from_entries(
            5,
            true,
            "t",
            [(0, 1, 0.4), (1, 2, 0.7), (3, 4, 0.2), (0, 4, 0.15)],
        )
        .unwrap();
        let n0 = 2;
        // Brute-force average over all C(5, 2) subsets.
        let mut total = 0.0;
        let mut count = 0;
        for a in 0..5u32 {
            for b in (a + 1)..5u32 {
                total += exact_influence(&spec, &[a, b]).unwrap();
                count += 1;
            }
        }
        let brute = total / count as f64;
        let fast = exact_influence_scheme(&spec, &InfluencerScheme::UniformK { n0 }).unwrap();
        assert!((brute - fast).abs() < 1e-10, "{brute} vs {fast}");
    }

    #[test]
    fn exact_scheme_bernoulli_matches_subset_average() {
        let spec = crate::graph::GraphSpec::from_entries(
            4,
            false,
            "directed",
            [(0, 1, 0.5), (1, 2, 0.3), (2, 0, 0.8), (2, 3, 0.25)],
        )
        .unwrap();
        let q: f64 = 0.3;
        let mut total = 0.0;
        for mask in 0u32..16 {
            let influencers: Vec<u32> = (0..4).filter(|b| mask >> b & 1 == 1).collect();
            let weight =
                q.powi(mask.count_ones() as i32) * (1.0 - q).powi(4 - mask.count_ones() as i32);
            let sigma = if influencers.is_empty() {
                0.0
            } else {
                exact_influence(&spec, &influencers).unwrap()
            };
            total += weight * sigma;
        }
        let fast = exact_influence_scheme(&spec, &InfluencerScheme::Bernoulli { q }).unwrap();
        assert!((total - fast).abs() < 1e-10, "{total} vs {fast}");
    }

    #[test]
    fn monte_carlo_converges_to_exact_influence() {
        let triangle = crate::graph::GraphSpec::from_entries(
            3,
            true,
            "triangle",
            [(0, 1, 0.5), (1, 2, 0.5), (0, 2, 0.5)],
        )
        .unwrap();
        let trials = 100_000u64;
        let mut values = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let view = sample_component_view(&triangle, &seed(29, t)).unwrap();
            values.push(view.influence_of(&[0]) as f64);
        }
        let mean: f64 = values.iter().sum::<f64>() / trials as f64;
        let var: f64 =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64;
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (mean - 2.25).abs() <= 3.0 * stderr,
            "mean {mean} stderr {stderr}"
        );
    }

    #[test]
    fn exact_sir_examples() {
        let sigma = exact_sir_influence(2, &[(0, 1)], 1.0, 1.0, &[0]).unwrap();
        assert!((sigma - 1.5).abs() < 1e-12);

        let sigma = exact_sir_influence(3, &[(0, 1), (1, 2)], 1.0, 1.0, &[0]).unwrap();
        assert!((sigma - 1.75).abs() < 1e-10);

        let tiny_beta = exact_sir_influence(3, &[(0, 1), (1, 2)], 1e-12, 1.0, &[0, 2]).unwrap();
        assert!((tiny_beta - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exact_sir_matches_monte_carlo() {
        let edges = [(0u32, 1u32), (1, 2), (0, 2), (2, 3)];
        let exact = exact_sir_influence(4, &edges, 1.0, 1.5, &[0]).unwrap();
        let incubation = IncubationDist::Exponential { rate: 1.5 };
        let trials = 100_000u64;
        let mut values = Vec::with_capacity(trials as usize);
        for t in 0..trials {
            let set = sample_sir_final(4, &edges, 1.0, &incubation, &[0], &seed(31, t)).unwrap();
            values.push(set.len() as f64);
        }
        let mean: f64 = values.iter().sum::<f64>() / trials as f64;
        let var: f64 =
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (trials - 1) as f64;
        let stderr = (var / trials as f64).sqrt();
        assert!(
            (mean - exact).abs() <= 3.0 * stderr,
            "mean {mean} exact {exact}"
        );
    }

    #[test]
    fn ctic_equals_dtic_with_matched_parameters() {
        // Constant rate lambda on a window tau integrates to lambda*tau, so
        // the infinite-horizon cascade equals a discrete cascade with
        // p = 1 - exp(-lambda*tau), entry for entry.
        let lambda = 0.7;
        let tau = 1.3;
        let rates = [
            (0u32, 1u32, lambda * tau),
            (1, 2, lambda * tau),
            (2, 0, 0.4),
        ];
        let ctic = ctic_to_dtic_spec(4, &rates, "ctic").unwrap();
        let probs: Vec<(u32, u32, f64)> = rates
            .iter()
            .map(|&(i, j, l)| (i, j, -(-l).exp_m1()))
            .collect();
        let dtic = crate::graph::GraphSpec::from_entries(4, false, "dtic", probs).unwrap();
        let a = exact_influence(&ctic, &[0]).unwrap();
        let b = exact_influence(&dtic, &[0]).unwrap();
        assert!((a - b).abs() <= 1e-12);
    }

    #[test]
    fn dtic_trivial_cases() {
        let spec =
            crate::graph::GraphSpec::from_entries(3, false, "empty", [] as [(u32, u32, f64); 0])
                .unwrap();
        let set = sample_dtic(&spec, &[1], &seed(37, 0)).unwrap();
        assert_eq!(set, vec![1]);
    }

    #[test]
    fn ctic_validates_rates() {
        assert!(ctic_to_dtic_spec(2, &[(0, 1, -0.5)], "bad").is_err());
        let spec = ctic_to_dtic_spec(2, &[(0, 1, 0.7)], "ok").unwrap();
        let expected = -(-0.7f64).exp_m1();
        assert_eq!(spec.probability(0, 1), expected);
    }

    #[test]
    fn influencer_draws() {
        let mut rng = seed(41, 0).rng(StreamDomain::Scenario);
        let fixed = InfluencerScheme::fixed(vec![3, 1, 3]);
        assert_eq!(draw_influencers(&fixed, 5, &mut rng).unwrap(), vec![1, 3]);

        let uniform = InfluencerScheme::UniformK { n0: 3 };
        for _ in 0..100 {
            let drawn = draw_influencers(&uniform, 6, &mut rng).unwrap();
            assert_eq!(drawn.len(), 3);
            assert!(drawn.windows(2).all(|w| w[0] < w[1]));
        }

        // Exact uniformity over pairs from {0,1,2}: chi-square-ish check.
        let mut counts = std::collections::BTreeMap::new();
        let pair = InfluencerScheme::UniformK { n0: 2 };
        let draws = 30_000;
        for _ in 0..draws {
            let drawn = draw_influencers(&pair, 3, &mut rng).unwrap();
            *counts.entry((drawn[0], drawn[1])).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        for (&pair, &count) in &counts {
            let freq = count as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() < 0.02, "{pair:?}: {freq}");
        }

        let bern = InfluencerScheme::Bernoulli { q: 1.0 };
        assert_eq!(
            draw_influencers(&bern, 4, &mut rng).unwrap(),
            vec![0, 1, 2, 3]
        );
    }

    proptest! {
        #[test]
        fn component_sizes_partition_nodes(
            n in 1usize..40,
            edges in proptest::collection::vec((0u32..40, 0u32..40, 0.05f64..0.95), 0..60),
            master in 0u64..1000,
        ) {
            let mut seen = std::collections::BTreeSet::new();
            let mut list = Vec::new();
            for (i, j, p) in edges {
                let (i, j) = (i % n as u32, j % n as u32);
                let key = if i > j { (j, i) } else { (i, j) };
                if seen.insert(key) {
                    list.push((key.0, key.1, p));
                }
            }
            let spec = crate::graph::GraphSpec::from_entries(n, true, "prop", list).unwrap();
            let g = sample_graph(&spec, &seed(master, 0));
            let stats = components(&g).unwrap();
            prop_assert_eq!(stats.total(), n);
            let sizes = stats.sizes();
            prop_assert!(sizes.windows(2).all(|w| w[0] >= w[1]));
            prop_assert_eq!(stats.n_at_least(1), sizes.len());
        }
    }
}
