//! Comparison of two clusterings.
//!
//! Builds the contingency table of a ground-truth clustering against a
//! geometric clustering and scores their agreement with five metrics:
//! adjusted Rand index, adjusted mutual information, Fowlkes–Mallows index,
//! homogeneity, and completeness. All information measures use natural
//! logarithms; sums are accumulated in `f64` and cast to the caller's scalar
//! at the end.

use crate::error::{Error, Result};
use crate::graph::ClusterLabeling;
use crate::scalar::{cast, Scalar};

/// Co-occurrence counts of two clusterings over the same vertex set.
///
/// `count(i, j)` is the number of vertices in cluster `i` of the first
/// clustering and cluster `j` of the second; row sums `a_i` and column sums
/// `b_j` are the cluster sizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<u64>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
    rows: usize,
    cols: usize,
}

/// Build the contingency table of two clusterings of the same vertices.
pub fn contingency(c1: &ClusterLabeling, c2: &ClusterLabeling) -> Result<ContingencyTable> {
    if c1.len() != c2.len() {
        return Err(Error::SizeMismatch {
            context: "contingency table",
            left: c1.len(),
            right: c2.len(),
        });
    }
    let rows = c1.cluster_count();
    let cols = c2.cluster_count();
    let mut counts = vec![0u64; rows * cols];
    for (&x, &y) in c1.labels().iter().zip(c2.labels()) {
        counts[x as usize * cols + y as usize] += 1;
    }
    let row_sums: Vec<u64> = (0..rows)
        .map(|i| counts[i * cols..(i + 1) * cols].iter().sum())
        .collect();
    let col_sums: Vec<u64> = (0..cols)
        .map(|j| (0..rows).map(|i| counts[i * cols + j]).sum())
        .collect();
    Ok(ContingencyTable {
        counts,
        row_sums,
        col_sums,
        n: c1.len() as u64,
        rows,
        cols,
    })
}

impl ContingencyTable {
    /// Number of rows (clusters of the first clustering).
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns (clusters of the second clustering).
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Total number of vertices.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Count of vertices in row cluster `i` and column cluster `j`.
    pub fn count(&self, i: usize, j: usize) -> u64 {
        self.counts[i * self.cols + j]
    }

    /// Row sums `a_i`.
    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    /// Column sums `b_j`.
    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    /// Whether the two clusterings are the same partition (up to cluster
    /// relabeling): every row and every column hits exactly one cell.
    pub fn is_identical_partition(&self) -> bool {
        if self.rows != self.cols {
            return false;
        }
        let one_hit = |line: Box<dyn Iterator<Item = u64> + '_>| {
            line.filter(|&c| c > 0).count() == 1
        };
        (0..self.rows).all(|i| one_hit(Box::new((0..self.cols).map(move |j| self.count(i, j)))))
            && (0..self.cols)
                .all(|j| one_hit(Box::new((0..self.rows).map(move |i| self.count(i, j)))))
    }
}

/// `x` choose 2, in checked 64-bit arithmetic.
fn comb2(x: u64) -> u64 {
    let pairs = x as u128 * x.saturating_sub(1) as u128 / 2;
    u64::try_from(pairs).expect("pair count fits in 64 bits")
}

struct PairCounts {
    /// Σ_ij C(n_ij, 2): pairs together in both clusterings.
    ss: f64,
    /// Σ_i C(a_i, 2).
    sa: f64,
    /// Σ_j C(b_j, 2).
    sb: f64,
    /// C(n, 2).
    total: f64,
}

fn pair_counts(t: &ContingencyTable) -> Result<PairCounts> {
    if t.n < 2 {
        return Err(Error::TooFew {
            context: "pair-counting metrics",
            minimum: 2,
            unit: "vertices",
            actual: t.n as usize,
        });
    }
    let ss: u64 = t.counts.iter().map(|&c| comb2(c)).sum();
    let sa: u64 = t.row_sums.iter().map(|&a| comb2(a)).sum();
    let sb: u64 = t.col_sums.iter().map(|&b| comb2(b)).sum();
    Ok(PairCounts {
        ss: ss as f64,
        sa: sa as f64,
        sb: sb as f64,
        total: comb2(t.n) as f64,
    })
}

/// Rand index: the fraction of vertex pairs on which the clusterings agree
/// (grouped in both, or separated in both).
pub fn rand_index<F: Scalar>(t: &ContingencyTable) -> Result<F> {
    let p = pair_counts(t)?;
    Ok(cast((p.total - p.sa - p.sb + 2.0 * p.ss) / p.total))
}

/// Adjusted Rand index: Rand index rescaled so that independent clusterings
/// score 0 in expectation and identical ones score 1.
///
/// When the adjustment denominator vanishes (both clusterings all-singletons
/// or both one single cluster), the score is 1 if the partitions are equal
/// and 0 otherwise.
pub fn adjusted_rand_index<F: Scalar>(t: &ContingencyTable) -> Result<F> {
    let p = pair_counts(t)?;
    let expected = p.sa * p.sb / p.total;
    let denominator = 0.5 * (p.sa + p.sb) - expected;
    if denominator == 0.0 {
        return Ok(if t.is_identical_partition() {
            F::one()
        } else {
            F::zero()
        });
    }
    let ari = (p.ss - expected) / denominator;
    Ok(cast(ari.clamp(-1.0, 1.0)))
}

/// Fowlkes–Mallows index: geometric mean of pairwise precision and recall,
/// `Σ C(n_ij,2) / sqrt(Σ C(a_i,2) · Σ C(b_j,2))`.
///
/// When either clustering has no grouped pairs at all (all singletons) the
/// ratio is 0/0; the score is then 1 for equal partitions and 0 otherwise.
pub fn fowlkes_mallows<F: Scalar>(t: &ContingencyTable) -> Result<F> {
    let p = pair_counts(t)?;
    if p.sa == 0.0 || p.sb == 0.0 {
        return Ok(if t.is_identical_partition() {
            F::one()
        } else {
            F::zero()
        });
    }
    Ok(cast((p.ss / p.sa).sqrt() * (p.ss / p.sb).sqrt()))
}

fn entropy_f64(sums: &[u64], n: u64) -> f64 {
    let nf = n as f64;
    sums.iter()
        .map(|&s| {
            let p = s as f64 / nf;
            -p * p.ln()
        })
        .sum()
}

/// Shannon entropy (in nats) of a clustering given its cluster sizes.
pub fn entropy<F: Scalar>(cluster_sizes: &[u64], n: u64) -> F {
    cast(entropy_f64(cluster_sizes, n))
}

fn mutual_information_f64(t: &ContingencyTable) -> f64 {
    let n = t.n as f64;
    let mut mi = 0.0;
    for i in 0..t.rows {
        for j in 0..t.cols {
            let nij = t.count(i, j);
            if nij == 0 {
                continue;
            }
            let joint = nij as f64 / n;
            mi += joint * ((nij as f64 * n) / (t.row_sums[i] as f64 * t.col_sums[j] as f64)).ln();
        }
    }
    mi
}

/// Mutual information (in nats) between the two clusterings.
pub fn mutual_information<F: Scalar>(t: &ContingencyTable) -> F {
    cast(mutual_information_f64(t))
}

fn ln_factorials(n: u64) -> Vec<f64> {
    let mut table = Vec::with_capacity(n as usize + 1);
    table.push(0.0);
    let mut acc = 0.0;
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

fn expected_mutual_information_f64(t: &ContingencyTable) -> f64 {
    let n = t.n;
    let nf = n as f64;
    let lnf = ln_factorials(n);
    let mut emi = 0.0;
    for &a in &t.row_sums {
        for &b in &t.col_sums {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                // Hypergeometric log-probability of the cell taking value
                // nij under random permutations with fixed marginals. The
                // last index is grouped as `n + nij - a - b` because the
                // loop bound only guarantees the *sum* is non-negative;
                // `n - a - b` alone can underflow.
                let ln_weight = lnf[a as usize] + lnf[b as usize]
                    + lnf[(n - a) as usize]
                    + lnf[(n - b) as usize]
                    - lnf[n as usize]
                    - lnf[nij as usize]
                    - lnf[(a - nij) as usize]
                    - lnf[(b - nij) as usize]
                    - lnf[(n + nij - a - b) as usize];
                let info = (nij as f64 / nf) * ((nf * nij as f64) / (a as f64 * b as f64)).ln();
                emi += info * ln_weight.exp();
            }
        }
    }
    emi
}

/// Expected mutual information (in nats) under the permutation model: the
/// mean MI over all relabelings that preserve both clusterings' cluster
/// sizes, computed analytically from the hypergeometric cell distribution.
pub fn expected_mutual_information<F: Scalar>(t: &ContingencyTable) -> F {
    cast(expected_mutual_information_f64(t))
}

/// Adjusted mutual information: `(MI − EMI) / (mean(H_a, H_b) − EMI)` with
/// the arithmetic-mean normalizer.
///
/// Equal partitions score exactly 1. When the denominator vanishes for
/// unequal partitions (chance-level agreement is the best possible), the
/// score is 0.
pub fn adjusted_mutual_information<F: Scalar>(t: &ContingencyTable) -> F {
    if t.is_identical_partition() {
        return F::one();
    }
    let mi = mutual_information_f64(t);
    let emi = expected_mutual_information_f64(t);
    let mean_entropy = 0.5 * (entropy_f64(&t.row_sums, t.n) + entropy_f64(&t.col_sums, t.n));
    let denominator = mean_entropy - emi;
    if denominator.abs() < 1e-12 * mean_entropy.abs().max(1.0) {
        return F::zero();
    }
    cast(((mi - emi) / denominator).min(1.0))
}

/// Homogeneity and completeness, in that order.
///
/// Homogeneity is 1 when every cluster of the second clustering contains
/// members of only one cluster of the first (`1 − H(C|C′)/H(C)`);
/// completeness is the same statement with the roles swapped. A clustering
/// with zero entropy (a single cluster) is vacuously homogeneous/complete,
/// scoring 1.
pub fn homogeneity_completeness<F: Scalar>(t: &ContingencyTable) -> (F, F) {
    let n = t.n as f64;
    let h_rows = entropy_f64(&t.row_sums, t.n);
    let h_cols = entropy_f64(&t.col_sums, t.n);

    // H(rows | cols) and H(cols | rows) from the same pass over the table.
    let mut h_rows_given_cols = 0.0;
    let mut h_cols_given_rows = 0.0;
    for i in 0..t.rows {
        for j in 0..t.cols {
            let nij = t.count(i, j);
            if nij == 0 {
                continue;
            }
            let joint = nij as f64 / n;
            h_rows_given_cols -= joint * (nij as f64 / t.col_sums[j] as f64).ln();
            h_cols_given_rows -= joint * (nij as f64 / t.row_sums[i] as f64).ln();
        }
    }

    let hom = if h_rows == 0.0 {
        1.0
    } else {
        1.0 - h_rows_given_cols / h_rows
    };
    let cmp = if h_cols == 0.0 {
        1.0
    } else {
        1.0 - h_cols_given_rows / h_cols
    };
    (cast(hom.clamp(0.0, 1.0)), cast(cmp.clamp(0.0, 1.0)))
}

/// The five clustering-quality scores plus provenance metadata.
///
/// Serialized field names (`cq_ari`, `cq_ami`, `cq_fmi`, `cq_hom`, `cq_cmp`)
/// are part of the output format.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CqReport<F> {
    /// Adjusted Rand index of truth vs. geometric clustering.
    pub cq_ari: F,
    /// Adjusted mutual information.
    pub cq_ami: F,
    /// Fowlkes–Mallows index.
    pub cq_fmi: F,
    /// Homogeneity.
    pub cq_hom: F,
    /// Completeness.
    pub cq_cmp: F,
    /// Context describing how the scores were produced.
    pub meta: ReportMeta,
}

/// Provenance recorded next to a set of scores.
#[derive(Debug, Clone, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct ReportMeta {
    /// Number of vertices compared.
    pub n: usize,
    /// Cluster count of the ground truth.
    pub k_truth: usize,
    /// Cluster count of the geometric clustering.
    pub k_geo: usize,
    /// Normalizer used in the AMI denominator.
    pub ami_normalizer: String,
    /// Name of the drawing that was scored, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub layout: Option<String>,
    /// Seed of the randomized stages, if any.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    /// k-means restart count, if k-means produced the geometric clustering.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub restarts: Option<usize>,
    /// Which degenerate-case conventions fired while scoring.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub degenerate: Vec<String>,
}

impl<F: Copy> CqReport<F> {
    /// The five scores with their serialized names, in canonical order.
    pub fn metric_values(&self) -> [(&'static str, F); 5] {
        [
            ("cq_ari", self.cq_ari),
            ("cq_ami", self.cq_ami),
            ("cq_fmi", self.cq_fmi),
            ("cq_hom", self.cq_hom),
            ("cq_cmp", self.cq_cmp),
        ]
    }
}

/// Score a geometric clustering against the ground truth with all five
/// metrics.
pub fn cq_scores<F: Scalar>(
    truth: &ClusterLabeling,
    geo: &ClusterLabeling,
) -> Result<CqReport<F>> {
    let t = contingency(truth, geo)?;
    let p = pair_counts(&t)?;

    let mut degenerate = Vec::new();
    if 0.5 * (p.sa + p.sb) - p.sa * p.sb / p.total == 0.0 {
        degenerate.push("ari_zero_denominator".to_string());
    }
    if p.sa == 0.0 || p.sb == 0.0 {
        degenerate.push("fmi_no_grouped_pairs".to_string());
    }
    if entropy_f64(t.row_sums(), t.n()) == 0.0 {
        degenerate.push("hom_truth_entropy_zero".to_string());
    }
    if entropy_f64(t.col_sums(), t.n()) == 0.0 {
        degenerate.push("cmp_geo_entropy_zero".to_string());
    }

    let cq_ari = adjusted_rand_index(&t)?;
    let cq_ami = adjusted_mutual_information(&t);
    let cq_fmi = fowlkes_mallows(&t)?;
    let (cq_hom, cq_cmp) = homogeneity_completeness(&t);

    Ok(CqReport {
        cq_ari,
        cq_ami,
        cq_fmi,
        cq_hom,
        cq_cmp,
        meta: ReportMeta {
            n: truth.len(),
            k_truth: truth.cluster_count(),
            k_geo: geo.cluster_count(),
            ami_normalizer: "arithmetic_mean".to_string(),
            layout: None,
            seed: None,
            restarts: None,
            degenerate,
        },
    })
}
