use super::{PirSession, QueryPool};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, EchelonBasis};

/// A set of colluding batches (groups) and the queries they pool.
#[derive(Clone, Debug, PartialEq)]
pub struct CollusionScenario {
    pub colluders: Vec<usize>,
    /// Spanning-subset positions held by the colluders.
    pub pooled: Vec<usize>,
    /// `pooled.len() / m`.
    pub delta: f64,
}

impl CollusionScenario {
    pub fn new(pool: &QueryPool, session: &PirSession, colluders: &[usize]) -> Result<Self> {
        let mut pooled = Vec::new();
        for &b in colluders {
            let batch = session.batches.get(b).ok_or_else(|| {
                Error::InvalidParams(format!("colluder batch {b} out of range for {} batches", session.a()))
            })?;
            pooled.extend_from_slice(batch);
        }
        pooled.sort_unstable();
        pooled.dedup();
        Ok(Self {
            colluders: colluders.to_vec(),
            delta: pooled.len() as f64 / pool.contents() as f64,
            pooled,
        })
    }

    /// `b * ceil(w / a)`: the most queries `b` balanced batches can hold.
    pub fn size_bound(&self, session: &PirSession) -> usize {
        let w: usize = session.batches.iter().map(Vec::len).sum();
        let distinct: std::collections::HashSet<_> = self.colluders.iter().collect();
        distinct.len() * w.div_ceil(session.a())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeakageReport {
    pub pooled_count: usize,
    pub delta: f64,
    /// Whether each base vector `e_j` lies in the span of the pooled queries.
    pub base_in_span: Vec<bool>,
    pub leaked: bool,
}

/// Pools the colluders' queries and checks every base vector for span
/// membership.
pub fn collusion_leakage(pool: &QueryPool, session: &PirSession, colluders: &[usize]) -> Result<LeakageReport> {
    let scenario = CollusionScenario::new(pool, session, colluders)?;
    let m = pool.contents();
    let mut basis = EchelonBasis::new(m);
    for &k in &scenario.pooled {
        basis.insert(pool.spanning_query(k).clone());
    }
    let base_in_span: Vec<bool> = (0..m).map(|j| basis.contains(&BitVec::unit(m, j))).collect();
    Ok(LeakageReport {
        pooled_count: scenario.pooled.len(),
        delta: scenario.delta,
        leaked: base_in_span.iter().any(|&b| b),
        base_in_span,
    })
}
