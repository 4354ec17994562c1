//! Random-query private retrieval.
//!
//! The user draws a pool of uniform query vectors in `F_2^m`, keeps the first
//! `m` that were rank-increasing, and writes the request `e_r` as a
//! combination of them: `e_r = sum_k d_k q_{t_k}`. The queries with `d_k = 1`
//! are shuffled and dealt round-robin to `a` reconstruction groups. Each
//! group solves `V p = sum of its queries`, aggregates `f V p` and sends one
//! content-sized answer back, so the user downloads exactly `a * M` bits and
//! XORs the answers into `f_r`.

mod collusion;
mod session;

pub use collusion::{collusion_leakage, CollusionScenario, LeakageReport};
pub use session::SessionRecord;

use crate::error::{Error, Result};
use crate::gf2::{random_bitvec, BitMatrix, BitVec, EchelonBasis, RngState};
use crate::retrieval::{ContentRequest, DecodingSolution};
use crate::sim::{Direction, Endpoint, MessageKind, TranscriptLedger};
use crate::storage::Cluster;

/// `m + ceil(log2(1 / epsilon))`: the pool size that spans `F_2^m` with
/// probability at least `1 - epsilon`.
pub fn pool_capacity(contents: usize, epsilon: f64) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParams(format!(
            "epsilon must lie in (0, 1), got {epsilon}"
        )));
    }
    Ok(contents + (1.0 / epsilon).log2().ceil() as usize)
}

/// Where a pool's random draws started, enough to regenerate it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PoolOrigin {
    pub seed: u64,
    pub stream: u64,
    pub counter: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QueryPool {
    pub epsilon: f64,
    pub capacity: usize,
    /// All drawn query vectors in draw order; at least `capacity` of them.
    pub queries: Vec<BitVec>,
    /// Draw indices of the first `m` rank-increasing queries.
    pub spanning_subset: Vec<usize>,
    /// Number of draws after which the pool first had rank `m`.
    pub attained: usize,
    pub origin: PoolOrigin,
}

impl QueryPool {
    pub fn contents(&self) -> usize {
        self.spanning_subset.len()
    }

    pub fn spanned_within_capacity(&self) -> bool {
        self.attained <= self.capacity
    }

    /// All queries as the columns of an `m x A` matrix.
    pub fn query_matrix(&self) -> BitMatrix {
        BitMatrix::from_columns(self.contents(), &self.queries)
    }

    /// The `m x m` invertible matrix of spanning queries.
    pub fn spanning_matrix(&self) -> BitMatrix {
        BitMatrix::from_columns(self.contents(), &self.spanning_queries())
    }

    pub fn spanning_queries(&self) -> Vec<BitVec> {
        self.spanning_subset.iter().map(|&i| self.queries[i].clone()).collect()
    }

    /// The `k`-th spanning query `q_{t_k}`.
    pub fn spanning_query(&self, k: usize) -> &BitVec {
        &self.queries[self.spanning_subset[k]]
    }
}

/// Draws `capacity` uniform queries, then keeps drawing until they span.
pub fn generate_pool(contents: usize, epsilon: f64, rng: &mut RngState) -> Result<QueryPool> {
    let capacity = pool_capacity(contents, epsilon)?;
    let origin = PoolOrigin {
        seed: rng.seed(),
        stream: rng.stream(),
        counter: rng.counter(),
    };
    let mut basis = EchelonBasis::new(contents);
    let mut queries = Vec::with_capacity(capacity);
    let mut spanning_subset = Vec::with_capacity(contents);
    let mut attained = 0;
    while queries.len() < capacity || !basis.is_full() {
        let q = random_bitvec(rng, contents)?;
        if !basis.is_full() && basis.insert(q.clone()) {
            spanning_subset.push(queries.len());
            if basis.is_full() {
                attained = queries.len() + 1;
            }
        }
        queries.push(q);
    }
    Ok(QueryPool {
        epsilon,
        capacity,
        queries,
        spanning_subset,
        attained,
        origin,
    })
}

/// `e_r` written over the spanning queries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryExpansion {
    pub request: ContentRequest,
    pub coefficients: BitVec,
}

impl QueryExpansion {
    /// Number of queries that must be sent.
    pub fn weight(&self) -> usize {
        self.coefficients.weight()
    }
}

pub fn expand_request(pool: &QueryPool, request: &ContentRequest) -> Result<QueryExpansion> {
    let coefficients = pool.spanning_matrix().solve(&request.basis)?;
    let mut check = BitVec::zeros(pool.contents());
    for k in coefficients.iter_ones() {
        check.xor_assign(pool.spanning_query(k));
    }
    if check != request.basis {
        return Err(Error::Integrity(format!(
            "expansion of e_{} does not reconstruct",
            request.index
        )));
    }
    Ok(QueryExpansion {
        request: request.clone(),
        coefficients,
    })
}

/// Query batches for one private fetch.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PirSession {
    pub requested_batches: usize,
    /// Spanning-subset positions `k` in each batch.
    pub batches: Vec<Vec<usize>>,
    /// Group serving each batch.
    pub batch_assignment: Vec<usize>,
    /// Aggregated answer per batch, filled in by [`pir_fetch`].
    pub responses: Vec<BitVec>,
}

impl PirSession {
    /// Number of batches actually used; smaller than requested when the
    /// expansion has fewer non-zero coefficients than batches.
    pub fn a(&self) -> usize {
        self.batches.len()
    }

    pub fn batch_queries(&self, pool: &QueryPool, batch: usize) -> Vec<BitVec> {
        self.batches[batch]
            .iter()
            .map(|&k| pool.spanning_query(k).clone())
            .collect()
    }

    pub fn combined_response(&self, content_bits: usize) -> BitVec {
        self.responses
            .iter()
            .fold(BitVec::zeros(content_bits), |acc, r| &acc ^ r)
    }
}

/// Shuffles the queries with `d_k = 1` and deals them round-robin into `a`
/// batches, so batch sizes differ by at most one. Group assignment is left
/// as batch `i` to group `i`.
pub fn partition_queries(expansion: &QueryExpansion, a: usize, rng: &mut RngState) -> Result<PirSession> {
    if a == 0 {
        return Err(Error::InvalidParams("need at least one batch".into()));
    }
    let mut selected: Vec<usize> = expansion.coefficients.iter_ones().collect();
    if selected.is_empty() {
        return Err(Error::DegenerateRequest);
    }
    let used = a.min(selected.len());
    rng.shuffle(&mut selected);
    let mut batches = vec![Vec::new(); used];
    for (i, k) in selected.into_iter().enumerate() {
        batches[i % used].push(k);
    }
    Ok(PirSession {
        requested_batches: a,
        batches,
        batch_assignment: (0..used).collect(),
        responses: Vec::new(),
    })
}

/// One group's share of the queries and its plan to answer them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RGQueryBatch {
    pub group_id: usize,
    pub batch: Vec<BitVec>,
    pub combined_target: BitVec,
    pub response_plan: DecodingSolution,
}

impl RGQueryBatch {
    /// The coordinator's canonical solution of `V p = sum of the batch`.
    pub fn plan(cluster: &Cluster, group_id: usize, batch: Vec<BitVec>) -> Result<Self> {
        let group = cluster.group(group_id);
        let mut combined_target = BitVec::zeros(group.contents());
        for q in &batch {
            combined_target.xor_assign(q);
        }
        let full = group.stacked.solve(&combined_target)?;
        Ok(Self {
            group_id,
            batch,
            combined_target,
            response_plan: DecodingSolution::from_full(full, group.block_len()),
        })
    }
}

/// Runs one group's side of a private fetch. The ledger gets the query upload
/// to the coordinator, the coordinator's slices to members, the members'
/// shares back to the coordinator, and one `M`-bit answer to the user.
pub fn answer_batch(cluster: &Cluster, batch: &RGQueryBatch, ledger: &mut TranscriptLedger) -> BitVec {
    let group = cluster.group(batch.group_id);
    let coordinator = group.coordinator_id;
    let m = group.contents();
    ledger.record(
        Endpoint::User,
        Endpoint::Server(coordinator),
        Direction::Up,
        MessageKind::QueryUpload,
        m * batch.batch.len(),
        None,
    );
    let mut answer = BitVec::zeros(cluster.params.content_bits);
    for (&id, block) in group.member_ids.iter().zip(&batch.response_plan.blocks) {
        let share = cluster.server(id).respond(block);
        if id != coordinator {
            ledger.record(
                Endpoint::Server(coordinator),
                Endpoint::Server(id),
                Direction::Down,
                MessageKind::Control,
                block.len(),
                Some(block.clone()),
            );
            ledger.record(
                Endpoint::Server(id),
                Endpoint::Server(coordinator),
                Direction::Up,
                MessageKind::Share,
                share.len(),
                Some(share.clone()),
            );
        }
        answer.xor_assign(&share);
    }
    ledger.record(
        Endpoint::Server(coordinator),
        Endpoint::User,
        Direction::Down,
        MessageKind::Response,
        answer.len(),
        Some(answer.clone()),
    );
    answer
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PirFetch {
    pub content: BitVec,
    pub expansion: QueryExpansion,
    pub session: PirSession,
}

/// How query batches are mapped onto groups. Both walk the groups in id
/// order; they differ only when there are more batches than groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BatchAssignment {
    /// Batch `i` goes to group `i`; too few groups is an error.
    #[default]
    Distinct,
    /// Batch `i` goes to group `i mod G`. A group that receives several
    /// batches sees their union, exactly like colluding groups would, so this
    /// keeps exactness and cPoP but weakens privacy.
    RoundRobin,
}

/// Private fetch of `request` using `a` distinct groups.
pub fn pir_fetch(
    cluster: &Cluster,
    pool: &QueryPool,
    request: &ContentRequest,
    a: usize,
    rng: &mut RngState,
    ledger: &mut TranscriptLedger,
) -> Result<PirFetch> {
    pir_fetch_with(cluster, pool, request, a, BatchAssignment::Distinct, rng, ledger)
}

pub fn pir_fetch_with(
    cluster: &Cluster,
    pool: &QueryPool,
    request: &ContentRequest,
    a: usize,
    assignment: BatchAssignment,
    rng: &mut RngState,
    ledger: &mut TranscriptLedger,
) -> Result<PirFetch> {
    let groups = cluster.groups.len();
    if assignment == BatchAssignment::Distinct && a > groups {
        return Err(Error::InsufficientGroups {
            needed: a,
            available: groups,
        });
    }
    if pool.contents() != cluster.params.contents {
        return Err(Error::InvalidParams(format!(
            "pool dimension {} does not match {} contents",
            pool.contents(),
            cluster.params.contents
        )));
    }
    let expansion = expand_request(pool, request)?;
    let mut session = partition_queries(&expansion, a, rng)?;
    session.batch_assignment = (0..session.a()).map(|i| i % groups).collect();
    for (i, &group_id) in session.batch_assignment.iter().enumerate() {
        let batch = RGQueryBatch::plan(cluster, group_id, session.batch_queries(pool, i))?;
        session.responses.push(answer_batch(cluster, &batch, ledger));
    }
    Ok(PirFetch {
        content: session.combined_response(cluster.params.content_bits),
        expansion,
        session,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::measure_cpop;
    use crate::storage::SystemParams;
    use proptest::prelude::*;

    fn cluster() -> Cluster {
        Cluster::build(SystemParams::new(12, 8, 16, 48, 0.5).unwrap(), 11).unwrap()
    }

    #[test]
    fn capacity_matches_epsilon() {
        assert_eq!(pool_capacity(64, 0.01).unwrap(), 71);
        assert_eq!(pool_capacity(10, 0.5).unwrap(), 11);
        assert_eq!(pool_capacity(10, 0.25).unwrap(), 12);
        assert!(pool_capacity(10, 0.0).is_err());
        assert!(pool_capacity(10, 1.0).is_err());
    }

    #[test]
    fn pool_spans_and_records_attained() {
        let mut rng = RngState::new(1);
        for _ in 0..200 {
            let pool = generate_pool(12, 0.01, &mut rng).unwrap();
            assert_eq!(pool.spanning_matrix().rank(), 12);
            assert!(pool.attained >= 12);
            assert!(pool.queries.len() >= pool.capacity);
            assert_eq!(pool.queries.len(), pool.capacity.max(pool.attained));
            assert_eq!(*pool.spanning_subset.last().unwrap() + 1, pool.attained);
            // Attained is the first prefix of full rank.
            let prefix = BitMatrix::from_columns(12, &pool.queries[..pool.attained - 1]);
            assert!(prefix.rank() < 12);
        }
    }

    #[test]
    fn pool_regenerates_from_origin() {
        let mut rng = RngState::new(5);
        rng.next_word();
        let pool = generate_pool(20, 0.1, &mut rng).unwrap();
        let o = pool.origin;
        let again = generate_pool(20, 0.1, &mut RngState::at(o.seed, o.stream, o.counter)).unwrap();
        assert_eq!(pool, again);
    }

    #[test]
    fn identity_pool_expands_to_basis() {
        let pool = QueryPool {
            epsilon: 0.5,
            capacity: 5,
            queries: (0..4).map(|i| BitVec::unit(4, i)).collect(),
            spanning_subset: vec![0, 1, 2, 3],
            attained: 4,
            origin: PoolOrigin {
                seed: 0,
                stream: 0,
                counter: 0,
            },
        };
        for r in 0..4 {
            let req = ContentRequest::new(r, 4).unwrap();
            assert_eq!(expand_request(&pool, &req).unwrap().coefficients, req.basis);
        }
    }

    #[test]
    fn balanced_split() {
        let expansion = QueryExpansion {
            request: ContentRequest::new(0, 12).unwrap(),
            coefficients: BitVec::parse_bits("111111111100").unwrap(),
        };
        let s = partition_queries(&expansion, 4, &mut RngState::new(0)).unwrap();
        let mut sizes: Vec<usize> = s.batches.iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 3, 3]);
        let one = partition_queries(&expansion, 1, &mut RngState::new(0)).unwrap();
        let mut all = one.batches[0].clone();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn too_many_batches_are_reduced() {
        let expansion = QueryExpansion {
            request: ContentRequest::new(0, 6).unwrap(),
            coefficients: BitVec::parse_bits("010100").unwrap(),
        };
        let s = partition_queries(&expansion, 4, &mut RngState::new(0)).unwrap();
        assert_eq!(s.a(), 2);
        assert_eq!(s.requested_batches, 4);
        let zero = QueryExpansion {
            coefficients: BitVec::zeros(6),
            ..expansion
        };
        assert!(matches!(
            partition_queries(&zero, 1, &mut RngState::new(0)),
            Err(Error::DegenerateRequest)
        ));
    }

    #[test]
    fn degenerate_batches_answer_directly() {
        let c = cluster();
        let lib = c.library().unwrap();
        let direct = RGQueryBatch::plan(&c, 0, vec![BitVec::unit(16, 3)]).unwrap();
        assert_eq!(&answer_batch(&c, &direct, &mut TranscriptLedger::new()), lib.get(3));
        let q = BitVec::parse_bits("1011000000000001").unwrap();
        let empty = RGQueryBatch::plan(&c, 0, vec![q.clone(), q]).unwrap();
        assert!(empty.combined_target.is_zero());
        assert!(answer_batch(&c, &empty, &mut TranscriptLedger::new()).is_zero());
    }

    #[test]
    fn fetch_is_exact_with_cpop_a() {
        let c = cluster();
        assert!(c.groups.len() >= 2);
        let lib = c.library().unwrap();
        let mut rng = RngState::new(9);
        for a in 1..=c.groups.len() {
            for r in 0..16 {
                let pool = generate_pool(16, 0.01, &mut rng).unwrap();
                let mut ledger = TranscriptLedger::new();
                let req = ContentRequest::new(r, 16).unwrap();
                let out = pir_fetch(&c, &pool, &req, a, &mut rng, &mut ledger).unwrap();
                assert_eq!(&out.content, lib.get(r));
                assert_eq!(measure_cpop(&ledger, 48), out.session.a() as f64);
            }
        }
    }

    #[test]
    fn too_few_groups() {
        let c = cluster();
        let pool = generate_pool(16, 0.01, &mut RngState::new(0)).unwrap();
        let err = pir_fetch(
            &c,
            &pool,
            &ContentRequest::new(0, 16).unwrap(),
            c.groups.len() + 1,
            &mut RngState::new(0),
            &mut TranscriptLedger::new(),
        );
        assert!(matches!(err, Err(Error::InsufficientGroups { .. })));
    }

    #[test]
    fn round_robin_reuses_groups() {
        let c = Cluster::build(SystemParams::new(8, 8, 32, 40, 0.5).unwrap(), 7).unwrap();
        assert_eq!(c.groups.len(), 1);
        let lib = c.library().unwrap();
        let mut rng = RngState::new(1);
        for r in 0..32 {
            let pool = generate_pool(32, 0.01, &mut rng).unwrap();
            let mut ledger = TranscriptLedger::new();
            let req = ContentRequest::new(r, 32).unwrap();
            let out = pir_fetch_with(&c, &pool, &req, 4, BatchAssignment::RoundRobin, &mut rng, &mut ledger).unwrap();
            assert_eq!(&out.content, lib.get(r));
            assert_eq!(out.session.batch_assignment, vec![0; 4]);
            assert_eq!(measure_cpop(&ledger, 40), 4.0);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn expansion_reconstructs(seed in any::<u64>(), r in 0usize..24) {
            let pool = generate_pool(24, 0.05, &mut RngState::new(seed)).unwrap();
            let req = ContentRequest::new(r, 24).unwrap();
            let d = expand_request(&pool, &req).unwrap();
            let mut sum = BitVec::zeros(24);
            for k in d.coefficients.iter_ones() {
                sum.xor_assign(pool.spanning_query(k));
            }
            prop_assert_eq!(sum, req.basis);
        }

        #[test]
        fn batches_partition_support(seed in any::<u64>(), a in 1usize..8) {
            let mut rng = RngState::new(seed);
            let pool = generate_pool(24, 0.05, &mut rng).unwrap();
            let d = expand_request(&pool, &ContentRequest::new(seed as usize % 24, 24).unwrap()).unwrap();
            let s = partition_queries(&d, a, &mut rng).unwrap();
            let mut all: Vec<usize> = s.batches.concat();
            all.sort_unstable();
            prop_assert_eq!(all, d.coefficients.iter_ones().collect::<Vec<_>>());
            let sizes: Vec<usize> = s.batches.iter().map(Vec::len).collect();
            prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }

        #[test]
        fn batch_plan_solves(seed in any::<u64>()) {
            let c = cluster();
            let mut rng = RngState::new(seed);
            let batch: Vec<BitVec> = (0..3).map(|_| random_bitvec(&mut rng, 16).unwrap()).collect();
            for g in 0..c.groups.len() {
                let b = RGQueryBatch::plan(&c, g, batch.clone()).unwrap();
                prop_assert_eq!(c.group(g).stacked.mul_vec(&b.response_plan.full), b.combined_target.clone());
            }
        }
    }
}
