//! Hazard matrices and their symmetrized spectral radius.
//!
//! The hazard matrix of a spec has entries `h_ij = -ln(1 - p_ij)`; the
//! hazard radius is the spectral radius of `(H + H^T)/2`. Structured specs
//! keep their block form here so the matrix-vector product stays O(n + nnz)
//! and specs with 1e5 nodes remain tractable.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{EdgeBlock, GraphSpec};

/// Default relative-residual tolerance for the power iteration.
pub const DEFAULT_SPECTRAL_TOL: f64 = 1e-10;
/// Default iteration cap for the power iteration.
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Rank-one expected-adjacency products are dense; cap the dimension for
/// which the O(n^2) product is attempted.
const RANK_ONE_DENSE_LIMIT: usize = 4096;
/// Cap for materializing dense copies (test oracles, tiny instances).
const DENSE_LIMIT: usize = 2048;

#[derive(Debug, Clone)]
enum HazardPart {
    /// Canonical entries (i <= j when undirected): (i, j, hazard, probability).
    Sparse {
        entries: Vec<(u32, u32, f64, f64)>,
        undirected: bool,
    },
    Complete {
        lo: u32,
        h: f64,
        p: f64,
        diagonal: bool,
    },
    Star {
        hub: u32,
        h: f64,
        p: f64,
    },
    /// h_ij = w_i w_j / total (diagonal included); p_ij = 1 - exp(-h_ij).
    RankOne {
        weights: Vec<f64>,
        total: f64,
    },
}

/// A hazard matrix, possibly with the incoming columns of an influencer set
/// zeroed out (`h_ij(I) = 1{j not in I} * h_ij`).
#[derive(Debug, Clone)]
pub struct HazardMatrix {
    n: usize,
    parts: Vec<HazardPart>,
    /// 1.0 for live columns, 0.0 for masked ones; `None` means no mask.
    mask: Option<Vec<f64>>,
}

/// Spectral summary of a hazard matrix.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct HazardSummary {
    /// Spectral radius of (H + H^T)/2.
    pub rho_h: f64,
    /// Spectral radius of (P + P^T)/2 for the expected adjacency P.
    pub rho_p: f64,
    /// Largest entry of P (max-norm), taken over the unmasked spec.
    pub p_max: f64,
    /// Power-iteration count (worst of the two solves).
    pub iterations: usize,
    /// Final relative Rayleigh residual (worst of the two solves).
    pub residual: f64,
}

fn hazard_of(p: f64) -> f64 {
    -(-p).ln_1p()
}

fn prob_of_hazard(h: f64) -> f64 {
    -(-h).exp_m1()
}

/// Builds the hazard matrix of a spec: entrywise `-ln(1 - p_ij)` with the
/// same sparsity pattern.
pub fn hazard_matrix(spec: &GraphSpec) -> HazardMatrix {
    let parts = spec
        .blocks()
        .iter()
        .map(|block| match block {
            EdgeBlock::Sparse { entries } => HazardPart::Sparse {
                entries: entries
                    .iter()
                    .map(|(&(i, j), &p)| (i, j, hazard_of(p), p))
                    .collect(),
                undirected: spec.undirected(),
            },
            EdgeBlock::Complete { lo, p, diagonal } => HazardPart::Complete {
                lo: *lo,
                h: hazard_of(*p),
                p: *p,
                diagonal: *diagonal,
            },
            EdgeBlock::Star { hub, p } => HazardPart::Star {
                hub: *hub,
                h: hazard_of(*p),
                p: *p,
            },
            EdgeBlock::WeightProduct { weights, total } => HazardPart::RankOne {
                weights: weights.clone(),
                total: *total,
            },
        })
        .collect();
    HazardMatrix {
        n: spec.n(),
        parts,
        mask: None,
    }
}

/// Hazard matrix with the incoming edges of the nodes in `influencers`
/// removed.
pub fn masked_hazard_matrix(spec: &GraphSpec, influencers: &[u32]) -> Result<HazardMatrix> {
    let mut matrix = hazard_matrix(spec);
    let mut mask = vec![1.0; spec.n()];
    for &v in influencers {
        if v as usize >= spec.n() {
            return Err(Error::IndexOutOfRange {
                index: v as u64,
                n: spec.n(),
            });
        }
        mask[v as usize] = 0.0;
    }
    matrix.mask = Some(mask);
    Ok(matrix)
}

impl HazardMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Builds a matrix from raw symmetric hazard entries (i <= j).
    pub fn from_symmetric_hazard_entries(
        n: usize,
        entries: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self> {
        Self::from_hazard_entries(n, entries, true)
    }

    /// Builds a matrix from raw directed hazard entries.
    pub fn from_directed_hazard_entries(
        n: usize,
        entries: impl IntoIterator<Item = (u32, u32, f64)>,
    ) -> Result<Self> {
        Self::from_hazard_entries(n, entries, false)
    }

    fn from_hazard_entries(
        n: usize,
        entries: impl IntoIterator<Item = (u32, u32, f64)>,
        undirected: bool,
    ) -> Result<Self> {
        let mut list = Vec::new();
        for (i, j, h) in entries {
            if i as usize >= n {
                return Err(Error::IndexOutOfRange { index: i as u64, n });
            }
            if j as usize >= n {
                return Err(Error::IndexOutOfRange { index: j as u64, n });
            }
            if !h.is_finite() || h < 0.0 {
                return Err(Error::Domain(format!(
                    "hazard entry ({i}, {j}) = {h} must be finite and >= 0"
                )));
            }
            let (a, b) = if undirected && i > j { (j, i) } else { (i, j) };
            list.push((a, b, h, prob_of_hazard(h)));
        }
        Ok(HazardMatrix {
            n,
            parts: vec![HazardPart::Sparse {
                entries: list,
                undirected,
            }],
            mask: None,
        })
    }

    fn mask_at(&self, i: usize) -> f64 {
        self.mask.as_ref().map_or(1.0, |m| m[i])
    }

    /// Masked, unsymmetrized entry `h_ij(I)`.
    pub fn hazard_entry(&self, i: u32, j: u32) -> f64 {
        let mj = self.mask_at(j as usize);
        if mj == 0.0 {
            return 0.0;
        }
        for part in &self.parts {
            let h = match part {
                HazardPart::Sparse {
                    entries,
                    undirected,
                } => {
                    let key = if *undirected && i > j { (j, i) } else { (i, j) };
                    entries
                        .iter()
                        .find(|&&(a, b, _, _)| (a, b) == key)
                        .map(|&(_, _, h, _)| h)
                }
                HazardPart::Complete {
                    lo, h, diagonal, ..
                } => (i >= *lo && j >= *lo && (i != j || *diagonal)).then_some(*h),
                HazardPart::Star { hub, h, .. } => ((i == *hub) != (j == *hub)).then_some(*h),
                HazardPart::RankOne { weights, total } => {
                    let lambda = weights[i as usize] * weights[j as usize] / *total;
                    (lambda > 0.0).then_some(lambda)
                }
            };
            if let Some(h) = h {
                return h * mj;
            }
        }
        0.0
    }

    /// y += contribution of (M + M^T)/2 applied to x, where M is the masked
    /// matrix selected by `select` (hazard or probability entries).
    fn sym_matvec(&self, x: &[f64], y: &mut [f64], use_hazard: bool) -> Result<()> {
        let n = self.n;
        let m = |i: usize| self.mask_at(i);
        for part in &self.parts {
            match part {
                HazardPart::Sparse {
                    entries,
                    undirected,
                } => {
                    for &(i, j, h, p) in entries {
                        let v = if use_hazard { h } else { p };
                        if v == 0.0 {
                            continue;
                        }
                        let (i, j) = (i as usize, j as usize);
                        if i == j {
                            y[i] += v * m(i) * x[i];
                        } else if *undirected {
                            let w = v * 0.5 * (m(i) + m(j));
                            y[i] += w * x[j];
                            y[j] += w * x[i];
                        } else {
                            let w = v * 0.5 * m(j);
                            y[i] += w * x[j];
                            y[j] += w * x[i];
                        }
                    }
                }
                HazardPart::Complete { lo, h, p, diagonal } => {
                    let v = if use_hazard { *h } else { *p };
                    if v == 0.0 {
                        continue;
                    }
                    let lo = *lo as usize;
                    let mut sum = 0.0;
                    let mut masked_sum = 0.0;
                    for j in lo..n {
                        sum += x[j];
                        masked_sum += m(j) * x[j];
                    }
                    for i in lo..n {
                        let mi = m(i);
                        let mut acc = 0.5 * v * (mi * (sum - x[i]) + (masked_sum - mi * x[i]));
                        if *diagonal {
                            acc += v * mi * x[i];
                        }
                        y[i] += acc;
                    }
                }
                HazardPart::Star { hub, h, p } => {
                    let v = if use_hazard { *h } else { *p };
                    if v == 0.0 {
                        continue;
                    }
                    let hub = *hub as usize;
                    let mh = m(hub);
                    let mut sum = 0.0;
                    let mut masked_sum = 0.0;
                    for j in 0..n {
                        if j != hub {
                            sum += x[j];
                            masked_sum += m(j) * x[j];
                        }
                    }
                    y[hub] += 0.5 * v * (mh * sum + masked_sum);
                    for j in 0..n {
                        if j != hub {
                            y[j] += 0.5 * v * (mh + m(j)) * x[hub];
                        }
                    }
                }
                HazardPart::RankOne { weights, total } => {
                    if use_hazard {
                        // H = u u^T with u = w / sqrt(total).
                        let scale = 1.0 / total;
                        let mut dot = 0.0;
                        let mut masked_dot = 0.0;
                        for j in 0..n {
                            dot += weights[j] * x[j];
                            masked_dot += weights[j] * m(j) * x[j];
                        }
                        for i in 0..n {
                            y[i] += 0.5 * scale * weights[i] * (masked_dot + m(i) * dot);
                        }
                    } else {
                        if n > RANK_ONE_DENSE_LIMIT {
                            return Err(Error::SizeLimit {
                                requested: n as u128,
                                limit: RANK_ONE_DENSE_LIMIT,
                            });
                        }
                        for i in 0..n {
                            let wi = weights[i];
                            if wi == 0.0 {
                                continue;
                            }
                            let mi = m(i);
                            let mut acc = 0.0;
                            for j in 0..n {
                                let lambda = wi * weights[j] / *total;
                                if lambda > 0.0 {
                                    acc += prob_of_hazard(lambda) * 0.5 * (mi + m(j)) * x[j];
                                }
                            }
                            y[i] += acc;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Dense copy of the symmetrized (masked) hazard matrix, for small-n
    /// cross-checks.
    pub fn to_dense_symmetric(&self, use_hazard: bool) -> Result<Vec<Vec<f64>>> {
        if self.n > DENSE_LIMIT {
            return Err(Error::SizeLimit {
                requested: self.n as u128,
                limit: DENSE_LIMIT,
            });
        }
        let mut rows = vec![vec![0.0; self.n]; self.n];
        let mut x = vec![0.0; self.n];
        for j in 0..self.n {
            x[j] = 1.0;
            let mut y = vec![0.0; self.n];
            self.sym_matvec(&x, &mut y, use_hazard)?;
            for i in 0..self.n {
                rows[i][j] = y[i];
            }
            x[j] = 0.0;
        }
        Ok(rows)
    }

    fn max_probability(&self) -> f64 {
        let mut max = 0.0f64;
        for part in &self.parts {
            match part {
                HazardPart::Sparse { entries, .. } => {
                    for &(_, _, _, p) in entries {
                        max = max.max(p);
                    }
                }
                HazardPart::Complete { p, .. } | HazardPart::Star { p, .. } => max = max.max(*p),
                HazardPart::RankOne { weights, total } => {
                    let top = weights.iter().fold(0.0f64, |acc, &w| acc.max(w));
                    max = max.max(prob_of_hazard(top * top / *total));
                }
            }
        }
        max
    }
}

/// Shifted power iteration for the spectral radius of a nonnegative
/// symmetric operator. The diagonal shift by the max row sum makes the top
/// eigenvalue of the shifted operator strictly dominant in modulus, which is
/// required for matrices whose spectrum contains -rho (stars).
fn symmetric_radius(
    matrix: &HazardMatrix,
    use_hazard: bool,
    tol: f64,
    max_iter: usize,
) -> Result<(f64, usize, f64)> {
    let n = matrix.n;
    let ones = vec![1.0; n];
    let mut row_sums = vec![0.0; n];
    matrix.sym_matvec(&ones, &mut row_sums, use_hazard)?;
    let shift = row_sums.iter().fold(0.0f64, |m, &r| m.max(r));
    if shift == 0.0 {
        return Ok((0.0, 0, 0.0));
    }

    let norm = (n as f64).sqrt();
    let mut x: Vec<f64> = vec![1.0 / norm; n];
    let mut y = vec![0.0; n];
    let mut best = 0.0;
    let mut best_residual = f64::INFINITY;
    for iter in 1..=max_iter {
        y.iter_mut().for_each(|v| *v = 0.0);
        matrix.sym_matvec(&x, &mut y, use_hazard)?;
        for i in 0..n {
            y[i] += shift * x[i];
        }
        let mu: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
        let lambda = mu - shift;
        let mut residual_sq = 0.0;
        for i in 0..n {
            let r = y[i] - mu * x[i];
            residual_sq += r * r;
        }
        let residual = residual_sq.sqrt() / lambda.abs().max(f64::MIN_POSITIVE);
        best = lambda;
        best_residual = residual;
        if residual <= tol {
            return Ok((lambda, iter, residual));
        }
        let y_norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        for i in 0..n {
            x[i] = y[i] / y_norm;
        }
    }
    Err(Error::Convergence {
        best,
        iterations: max_iter,
        residual: best_residual,
    })
}

/// Computes the hazard radius `rho((H + H^T)/2)` and, alongside it, the
/// spectral radius of the symmetrized expected adjacency.
pub fn hazard_radius(matrix: &HazardMatrix, tol: f64, max_iter: usize) -> Result<HazardSummary> {
    assert!(tol > 0.0, "tolerance must be positive");
    let (rho_h, it_h, res_h) = symmetric_radius(matrix, true, tol, max_iter)?;
    let (rho_p, it_p, res_p) = symmetric_radius(matrix, false, tol, max_iter)?;
    Ok(HazardSummary {
        rho_h,
        rho_p,
        p_max: matrix.max_probability(),
        iterations: it_h.max(it_p),
        residual: res_h.max(res_p),
    })
}

/// Convenience wrapper: hazard radius of a spec with default settings.
///
/// ```
/// let spec = hazard_core::erdos_spec(100, 0.5).unwrap();
/// let summary = hazard_core::spec_hazard_radius(&spec).unwrap();
/// // Uniform pair probability p = c/n gives the closed form -n ln(1 - c/n).
/// assert!((summary.rho_h + 100.0 * (1.0f64 - 0.005).ln()).abs() < 1e-10);
/// ```
pub fn spec_hazard_radius(spec: &GraphSpec) -> Result<HazardSummary> {
    hazard_radius(&hazard_matrix(spec), DEFAULT_SPECTRAL_TOL, DEFAULT_MAX_ITER)
}

/// Spectral radius of the 0/1 support adjacency of a spec (stored entries,
/// self-loops included when stored).
pub fn support_spectral_radius(spec: &GraphSpec) -> Result<f64> {
    let parts = spec
        .blocks()
        .iter()
        .map(|block| match block {
            EdgeBlock::Sparse { entries } => HazardPart::Sparse {
                entries: entries
                    .iter()
                    .filter(|(_, &p)| p > 0.0)
                    .map(|(&(i, j), _)| (i, j, 1.0, 1.0 - std::f64::consts::E.recip()))
                    .collect(),
                undirected: spec.undirected(),
            },
            EdgeBlock::Complete { lo, diagonal, .. } => HazardPart::Complete {
                lo: *lo,
                h: 1.0,
                p: 0.5,
                diagonal: *diagonal,
            },
            EdgeBlock::Star { hub, .. } => HazardPart::Star {
                hub: *hub,
                h: 1.0,
                p: 0.5,
            },
            EdgeBlock::WeightProduct { weights, .. } => HazardPart::RankOne {
                weights: weights
                    .iter()
                    .map(|&w| if w > 0.0 { 1.0 } else { 0.0 })
                    .collect(),
                total: 1.0,
            },
        })
        .collect();
    let matrix = HazardMatrix {
        n: spec.n(),
        parts,
        mask: None,
    };
    let (rho, _, _) = symmetric_radius(&matrix, true, DEFAULT_SPECTRAL_TOL, DEFAULT_MAX_ITER)?;
    Ok(rho)
}
