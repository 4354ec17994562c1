use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{collusion_leakage, generate_pool, LeakageReport, PirFetch, PirSession, PoolOrigin, QueryPool};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, RngState};

/// Everything an offline adversary analysis needs from one private fetch.
///
/// Text form is one `key=value` per line:
///
/// ```text
/// seed=7
/// stream=0
/// counter=0
/// epsilon=0.01
/// contents=32
/// spanning=0,1,2,...
/// request=5
/// coefficients=<hex>
/// batches=2
/// batch.0.group=0
/// batch.0.queries=4,17,9
/// batch.0.upload_bytes=12
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct SessionRecord {
    pub origin: PoolOrigin,
    pub epsilon: f64,
    pub contents: usize,
    pub spanning_subset: Vec<usize>,
    pub request_index: usize,
    pub coefficients: BitVec,
    pub batches: Vec<Vec<usize>>,
    pub assignment: Vec<usize>,
}

impl SessionRecord {
    pub fn new(pool: &QueryPool, fetch: &PirFetch) -> Self {
        Self {
            origin: pool.origin,
            epsilon: pool.epsilon,
            contents: pool.contents(),
            spanning_subset: pool.spanning_subset.clone(),
            request_index: fetch.expansion.request.index,
            coefficients: fetch.expansion.coefficients.clone(),
            batches: fetch.session.batches.clone(),
            assignment: fetch.session.batch_assignment.clone(),
        }
    }

    /// Bytes uploaded for batch `i`: its queries, `m` bits each.
    pub fn upload_bytes(&self, batch: usize) -> usize {
        (self.batches[batch].len() * self.contents).div_ceil(8)
    }

    pub fn export(&self) -> String {
        let mut out = String::new();
        let o = self.origin;
        let _ = writeln!(out, "seed={}\nstream={}\ncounter={}", o.seed, o.stream, o.counter);
        let _ = writeln!(out, "epsilon={}\ncontents={}", self.epsilon, self.contents);
        let _ = writeln!(out, "spanning={}", join(&self.spanning_subset));
        let _ = writeln!(out, "request={}", self.request_index);
        let _ = writeln!(out, "coefficients={}", self.coefficients.to_hex());
        let _ = writeln!(out, "batches={}", self.batches.len());
        for (i, batch) in self.batches.iter().enumerate() {
            let _ = writeln!(out, "batch.{i}.group={}", self.assignment[i]);
            let _ = writeln!(out, "batch.{i}.queries={}", join(batch));
            let _ = writeln!(out, "batch.{i}.upload_bytes={}", self.upload_bytes(i));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut fields = BTreeMap::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value: {line:?}")))?;
            fields.insert(k.to_string(), v.to_string());
        }
        let get = |k: &str| {
            fields
                .get(k)
                .map(String::as_str)
                .ok_or_else(|| Error::Parse(format!("missing session field {k:?}")))
        };
        let contents: usize = number(get("contents")?)?;
        let count: usize = number(get("batches")?)?;
        let mut batches = Vec::with_capacity(count);
        let mut assignment = Vec::with_capacity(count);
        for i in 0..count {
            assignment.push(number(get(&format!("batch.{i}.group"))?)?);
            batches.push(list(get(&format!("batch.{i}.queries"))?)?);
        }
        let record = Self {
            origin: PoolOrigin {
                seed: number(get("seed")?)?,
                stream: number(get("stream")?)?,
                counter: number(get("counter")?)?,
            },
            epsilon: number(get("epsilon")?)?,
            contents,
            spanning_subset: list(get("spanning")?)?,
            request_index: number(get("request")?)?,
            coefficients: BitVec::from_hex(contents, get("coefficients")?)?,
            batches,
            assignment,
        };
        for i in 0..count {
            let recorded: usize = number(get(&format!("batch.{i}.upload_bytes"))?)?;
            if recorded != record.upload_bytes(i) {
                return Err(Error::Parse(format!(
                    "batch {i} upload size does not match its queries"
                )));
            }
        }
        Ok(record)
    }

    /// Regenerates the pool from its recorded origin and checks that the
    /// spanning subset agrees.
    pub fn replay_pool(&self) -> Result<QueryPool> {
        let o = self.origin;
        let pool = generate_pool(
            self.contents,
            self.epsilon,
            &mut RngState::at(o.seed, o.stream, o.counter),
        )?;
        if pool.spanning_subset != self.spanning_subset {
            return Err(Error::Integrity("replayed pool has a different spanning subset".into()));
        }
        Ok(pool)
    }

    pub fn session(&self) -> PirSession {
        PirSession {
            requested_batches: self.batches.len(),
            batches: self.batches.clone(),
            batch_assignment: self.assignment.clone(),
            responses: Vec::new(),
        }
    }

    /// Leakage analysis for `colluders`, run from the record alone.
    pub fn replay_leakage(&self, colluders: &[usize]) -> Result<LeakageReport> {
        collusion_leakage(&self.replay_pool()?, &self.session(), colluders)
    }
}

fn join(values: &[usize]) -> String {
    values.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn number<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
}

fn list(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(number).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pir::pir_fetch;
    use crate::retrieval::ContentRequest;
    use crate::sim::TranscriptLedger;
    use crate::storage::{Cluster, SystemParams};

    #[test]
    fn offline_replay_matches_live_analysis() {
        let c = Cluster::build(SystemParams::new(12, 8, 16, 32, 0.5).unwrap(), 2).unwrap();
        let mut rng = RngState::new(40);
        rng.next_word();
        let pool = generate_pool(16, 0.01, &mut rng).unwrap();
        let req = ContentRequest::new(6, 16).unwrap();
        let fetch = pir_fetch(&c, &pool, &req, 2, &mut rng, &mut TranscriptLedger::new()).unwrap();
        let record = SessionRecord::new(&pool, &fetch);
        let text = record.export();
        let parsed = SessionRecord::parse(&text).unwrap();
        assert_eq!(parsed, record);
        for colluders in [vec![], vec![0], vec![1], vec![0, 1]] {
            assert_eq!(
                parsed.replay_leakage(&colluders).unwrap(),
                collusion_leakage(&pool, &fetch.session, &colluders).unwrap()
            );
        }
    }

    #[test]
    fn tampered_sizes_are_rejected() {
        let text = "seed=1\nstream=0\ncounter=0\nepsilon=0.5\ncontents=4\nspanning=0,1,2,3\nrequest=0\n\
                    coefficients=01\nbatches=1\nbatch.0.group=0\nbatch.0.queries=0\nbatch.0.upload_bytes=9\n";
        assert!(SessionRecord::parse(text).is_err());
        assert!(SessionRecord::parse(&text.replace("upload_bytes=9", "upload_bytes=1")).is_ok());
        assert!(SessionRecord::parse("seed=1").is_err());
    }
}
