//! Efficiency of a discovery curve.
//!
//! The efficiency after `q` queries is the discrete integral of the curve,
//! `E_q = sum_{i=1..q} m'(i)`. It is normalized between the worst strategy
//! (all negative pairs first) and the best one (all links first), and
//! compared against the expected curve of uniform random querying, whose
//! success probability per query is the density.
//!
//! Sums are exact integers; conversion to `f64` happens only for ratios.

use crate::error::{Error, Result};
use crate::graph::{density, pair_count, Graph};
use crate::oracle::MeasurementTrace;

/// Slack allowed on a normalized value before it is reported as out of range.
const NORMALIZATION_SLACK: f64 = 1e-9;

fn triangular(t: u128) -> u128 {
    t * (t + 1) / 2
}

/// `E_q = sum_{i=1..q} m'(i)`.
pub fn efficiency(trace: &MeasurementTrace, q: usize) -> Result<u128> {
    let curve = trace.cumulative();
    if q > curve.len() {
        return Err(Error::QueryCountOutOfRange {
            q,
            limit: curve.len(),
        });
    }
    Ok(curve[..q].iter().map(|&c| c as u128).sum())
}

/// Efficiency of the worst strategy: `P - m` negative tests, then the links.
pub fn efficiency_min(n: usize, m: usize, q: usize) -> Result<u128> {
    let pairs = pair_count(n);
    if q > pairs {
        return Err(Error::QueryCountOutOfRange { q, limit: pairs });
    }
    if m > pairs {
        return Err(Error::QueryCountOutOfRange { q: m, limit: pairs });
    }
    let negatives = pairs - m;
    Ok(if q <= negatives {
        0
    } else {
        triangular((q - negatives) as u128)
    })
}

/// Efficiency of the best strategy: the `m` links first.
pub fn efficiency_max(m: usize, q: usize) -> u128 {
    let (m, q) = (m as u128, q as u128);
    if q <= m {
        triangular(q)
    } else {
        triangular(m) + (q - m) * m
    }
}

/// Expected efficiency of uniform random querying with per-query success
/// probability `delta`: `q(q+1)/2 * delta`.
pub fn efficiency_random_expected(delta: f64, q: usize) -> f64 {
    triangular(q as u128) as f64 * delta
}

/// `(E - E_min) / (E_max - E_min)`.
pub fn normalized_efficiency(e: f64, n: usize, m: usize, q: usize) -> Result<f64> {
    let lo = efficiency_min(n, m, q)?;
    let hi = efficiency_max(m, q);
    if hi <= lo {
        return Err(Error::UndefinedNormalization);
    }
    let value = (e - lo as f64) / (hi - lo) as f64;
    if !(-NORMALIZATION_SLACK..=1.0 + NORMALIZATION_SLACK).contains(&value) {
        return Err(Error::EfficiencyOutOfRange(value));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Normalized efficiency of the random baseline at `q`.
pub fn normalized_random_efficiency(delta: f64, n: usize, m: usize, q: usize) -> Result<f64> {
    normalized_efficiency(efficiency_random_expected(delta, q), n, m, q)
}

/// `R_q = Ē_q(S) / Ē_q(ran)`.
pub fn relative_efficiency(e_norm: f64, delta: f64, n: usize, m: usize, q: usize) -> Result<f64> {
    let baseline = normalized_random_efficiency(delta, n, m, q)?;
    if baseline <= 0.0 {
        return Err(Error::UndefinedRelative);
    }
    Ok(e_norm / baseline)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EfficiencyReport {
    pub q: usize,
    pub m_prime_final: u64,
    /// Queries actually performed within the first `q` (a strategy may stop early).
    pub queries: usize,
    /// Fraction of all pairs tested.
    pub pct_pairs_tested: f64,
    /// Fraction of the hidden links found.
    pub pct_links_found: f64,
    pub efficiency: u128,
    pub normalized: f64,
    pub relative: f64,
}

/// All efficiency columns for `trace` on `g` after `q` queries.
pub fn build_report(trace: &MeasurementTrace, g: &Graph, q: usize) -> Result<EfficiencyReport> {
    let e = efficiency(trace, q)?;
    let (n, m) = (g.node_count(), g.edge_count());
    let normalized = normalized_efficiency(e as f64, n, m, q)?;
    let relative = relative_efficiency(normalized, density(g), n, m, q)?;
    let m_prime = trace.links_at(q).unwrap_or(0);
    let queries = trace.queries().min(q);
    Ok(EfficiencyReport {
        q,
        m_prime_final: m_prime,
        queries,
        pct_pairs_tested: queries as f64 / g.pair_count() as f64,
        pct_links_found: m_prime as f64 / m as f64,
        efficiency: e,
        normalized,
        relative,
    })
}
