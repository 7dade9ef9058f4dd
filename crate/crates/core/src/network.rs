//! Regular interbank liability networks.
//!
//! Entry `(i, j)` of the claims matrix is `y_ij`, the face value bank `j`
//! owes bank `i`. Bank indices are zero-based in the API and one-based in
//! the edge-list file format.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numfmt::full_precision;

/// Whole-matching resamples allowed before giving up on a configuration-model draw.
pub const MAX_SAMPLE_RETRIES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Topology {
    Ring,
    Complete,
    /// Random regular network with in- and out-degree `c`.
    Regular(usize),
}

impl Topology {
    /// Family name without the connectivity, as written in CSV rows.
    pub fn family(&self) -> &'static str {
        match self {
            Topology::Ring => "ring",
            Topology::Complete => "complete",
            Topology::Regular(_) => "regular",
        }
    }

    /// Nominal number of creditors per bank.
    pub fn connectivity(&self, n: usize) -> usize {
        match *self {
            Topology::Ring => 1,
            Topology::Complete => n - 1,
            Topology::Regular(c) => c,
        }
    }

    pub fn is_random(&self) -> bool {
        matches!(self, Topology::Regular(_))
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Regular(c) => write!(f, "regular({c})"),
            other => f.write_str(other.family()),
        }
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "ring" => Ok(Topology::Ring),
            "complete" => Ok(Topology::Complete),
            _ => {
                let inner = s
                    .strip_prefix("regular(")
                    .and_then(|rest| rest.strip_suffix(')'))
                    .ok_or_else(|| Error::domain(format!("unknown topology `{s}`")))?;
                let c = inner
                    .parse::<usize>()
                    .map_err(|_| Error::domain(format!("bad connectivity in `{s}`")))?;
                Ok(Topology::Regular(c))
            }
        }
    }
}

/// Weighted directed liability network.
#[derive(Debug, Clone, PartialEq)]
pub struct InterbankNetwork {
    n: usize,
    nominal_y: f64,
    claims: Vec<f64>,
    // creditor -> [(debtor, y_ij)], nonzero entries only
    rows: Vec<Vec<(usize, f64)>>,
    liability: Vec<f64>,
    claim_total: Vec<f64>,
    label: Topology,
    seed: Option<u64>,
}

impl InterbankNetwork {
    /// Builds a network from a dense row-major claims matrix.
    pub fn from_claims(n: usize, nominal_y: f64, label: Topology, seed: Option<u64>, claims: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::domain(format!("need at least 2 banks, got {n}")));
        }
        if claims.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: claims.len(),
            });
        }
        let mut rows = vec![Vec::new(); n];
        let mut liability = vec![0.0; n];
        let mut claim_total = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let w = claims[i * n + j];
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::domain(format!(
                        "claim ({},{}) = {w} is not a finite nonnegative amount",
                        i + 1,
                        j + 1
                    )));
                }
                if w == 0.0 {
                    continue;
                }
                if i == j {
                    return Err(Error::domain(format!("self-loop on bank {}", i + 1)));
                }
                rows[i].push((j, w));
                liability[j] += w;
                claim_total[i] += w;
            }
        }
        Ok(InterbankNetwork {
            n,
            nominal_y,
            claims,
            rows,
            liability,
            claim_total,
            label,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nominal_y(&self) -> f64 {
        self.nominal_y
    }

    /// `y_ij`: what bank `debtor` owes bank `creditor`.
    pub fn claim(&self, creditor: usize, debtor: usize) -> f64 {
        self.claims[creditor * self.n + debtor]
    }

    /// Nonzero claims held by `creditor`.
    pub fn claims_of(&self, creditor: usize) -> &[(usize, f64)] {
        &self.rows[creditor]
    }

    /// Realized junior liability `y_i = sum_j y_ji` per bank.
    pub fn liability(&self) -> &[f64] {
        &self.liability
    }

    /// Total claims `sum_j y_ij` per bank.
    pub fn claim_total(&self) -> &[f64] {
        &self.claim_total
    }

    pub fn label(&self) -> Topology {
        self.label
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Writes the edge list: header `n y label seed`, then one-based
    /// `i j weight` triples in row-major order.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> Result<()> {
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        writeln!(
            out,
            "{} {} {} {}",
            self.n,
            full_precision(self.nominal_y),
            self.label,
            seed
        )?;
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, w) in row {
                writeln!(out, "{} {} {}", i + 1, j + 1, full_precision(w))?;
            }
        }
        Ok(())
    }

    pub fn read_edge_list<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input
            .lines()
            .enumerate()
            .map(|(k, line)| (k + 1, line))
            .filter(|(_, line)| line.as_ref().map_or(true, |l| !l.trim().is_empty()));
        let (_, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "empty edge list".into(),
        })?;
        let header = header?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: 1,
                msg: format!("expected `n y label seed`, got `{header}`"),
            });
        }
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let n: usize = fields[0]
            .parse()
            .map_err(|_| bad(format!("bad bank count `{}`", fields[0])))?;
        let y: f64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("bad liability `{}`", fields[1])))?;
        let label: Topology = fields[2].parse().map_err(|e: Error| bad(e.to_string()))?;
        let seed = match fields[3] {
            "-" => None,
            s => Some(s.parse::<u64>().map_err(|_| bad(format!("bad seed `{s}`")))?),
        };
        if n < 2 {
            return Err(bad(format!("need at least 2 banks, got {n}")));
        }
        let mut claims = vec![0.0; n * n];
        for (line_no, line) in lines {
            let line = line?;
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(err(format!("expected `i j weight`, got `{line}`")));
            }
            let i: usize = parts[0].parse().map_err(|_| err(format!("bad index `{}`", parts[0])))?;
            let j: usize = parts[1].parse().map_err(|_| err(format!("bad index `{}`", parts[1])))?;
            let w: f64 = parts[2]
                .parse()
                .map_err(|_| err(format!("bad weight `{}`", parts[2])))?;
            if i == 0 || j == 0 || i > n || j > n {
                return Err(err(format!("index out of range 1..={n}")));
            }
            claims[(i - 1) * n + (j - 1)] = w;
        }
        Self::from_claims(n, y, label, seed, claims)
    }
}

/// Directed cycle: bank `i` is the sole creditor of bank `i - 1`, bank 1 of bank `n`.
pub fn make_ring(n: usize, y: f64) -> Result<InterbankNetwork> {
    check_basic(n, y)?;
    let mut claims = vec![0.0; n * n];
    for i in 0..n {
        let debtor = (i + n - 1) % n;
        claims[i * n + debtor] = y;
    }
    InterbankNetwork::from_claims(n, y, Topology::Ring, None, claims)
}

/// Every bank owes every other bank `y / (n - 1)`.
pub fn make_complete(n: usize, y: f64) -> Result<InterbankNetwork> {
    check_basic(n, y)?;
    let w = y / (n - 1) as f64;
    let mut claims = vec![w; n * n];
    for i in 0..n {
        claims[i * n + i] = 0.0;
    }
    InterbankNetwork::from_claims(n, y, Topology::Complete, None, claims)
}

/// Samples a directed configuration model with `c` in- and out-stubs per bank.
///
/// Out-stubs (claims) are matched to a uniformly shuffled list of in-stubs
/// (liabilities). Self-loops are dropped and multi-edges collapse to a single
/// edge of weight `y / c`. Draws that leave some bank without any liability
/// are rejected and the whole matching is redrawn.
pub fn make_random_regular(n: usize, c: usize, y: f64, seed: u64) -> Result<InterbankNetwork> {
    check_basic(n, y)?;
    if c < 1 || c > n - 1 {
        return Err(Error::domain(format!("connectivity {c} outside [1, {}]", n - 1)));
    }
    let w = y / c as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let creditors: Vec<usize> = (0..n).flat_map(|i| std::iter::repeat_n(i, c)).collect();
    let mut debtors = creditors.clone();
    for _ in 0..MAX_SAMPLE_RETRIES {
        debtors.shuffle(&mut rng);
        let mut claims = vec![0.0; n * n];
        let mut has_liability = vec![false; n];
        for (&i, &j) in creditors.iter().zip(&debtors) {
            if i != j {
                claims[i * n + j] = w;
                has_liability[j] = true;
            }
        }
        if has_liability.iter().all(|&b| b) {
            return InterbankNetwork::from_claims(n, y, Topology::Regular(c), Some(seed), claims);
        }
    }
    Err(Error::Sampling {
        retries: MAX_SAMPLE_RETRIES,
    })
}

/// Builds any of the three families; `seed` is ignored for deterministic ones.
pub fn make_network(topology: Topology, n: usize, y: f64, seed: u64) -> Result<InterbankNetwork> {
    match topology {
        Topology::Ring => make_ring(n, y),
        Topology::Complete => make_complete(n, y),
        Topology::Regular(c) => make_random_regular(n, c, y, seed),
    }
}

fn check_basic(n: usize, y: f64) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("need at least 2 banks, got {n}")));
    }
    if !(y > 0.0) {
        return Err(Error::domain(format!("liability must be positive, got {y}")));
    }
    Ok(())
}

/// No-shock investments `z_i = a + (y_in_i - y_out_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompensatedInvestments {
    pub base: Vec<f64>,
}

pub fn compensate(network: &InterbankNetwork, a: f64) -> CompensatedInvestments {
    let base = network
        .liability()
        .iter()
        .zip(network.claim_total())
        .map(|(&y_in, &y_out)| a + (y_in - y_out))
        .collect();
    CompensatedInvestments { base }
}
