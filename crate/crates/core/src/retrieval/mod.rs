//! Direct (non-private) retrieval through a reconstruction group, and the
//! wiretap view of it as a one-time-pad cipher.
//!
//! A direct retrieval of content `r` solves `V y = e_r` for the group's
//! stacked encoding matrix `V`, hands each member its slice `y_i`, and the
//! user XORs the members' answers `f V_i y_i`. An eavesdropper who sees every
//! member-to-user link except one observes
//!
//! ```text
//! ciphertext = sum of the wiretapped answers
//! key        = the one unobserved answer
//! ciphertext = content XOR key
//! ```
//!
//! Two planners are provided. [`plan_retrieval`] is the canonical solver
//! (free variables zero). It is deterministic but routinely leaves the last
//! member's slice at zero, which makes the key zero. [`KeySchedule`]
//! instead fixes the last member's slice first, choosing a distinct non-zero
//! selector for every content, and solves the remaining members around it.

mod keyed;
mod secrecy;

pub use keyed::{plan_keyed_retrieval, select_key, KeySchedule};
pub use secrecy::{
    decompose_secrecy, key_uniformity_report, Eavesdropper, KeyUniformityReport, Observation, SecrecyDecomposition,
};

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::sim::{Direction, Endpoint, MessageKind, TranscriptLedger};
use crate::storage::{Cluster, ReconstructionGroup};

/// A request for content `index` (0-based), carried as the basis vector `e_index`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentRequest {
    pub index: usize,
    pub basis: BitVec,
}

impl ContentRequest {
    pub fn new(index: usize, contents: usize) -> Result<Self> {
        if index >= contents {
            return Err(Error::InvalidParams(format!(
                "content index {index} out of range for {contents} contents"
            )));
        }
        Ok(Self {
            index,
            basis: BitVec::unit(contents, index),
        })
    }
}

/// A solution of `V y = target` split into one slice per group member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodingSolution {
    pub full: BitVec,
    pub blocks: Vec<BitVec>,
}

impl DecodingSolution {
    pub fn from_full(full: BitVec, block_len: usize) -> Self {
        assert_eq!(
            full.len() % block_len,
            0,
            "solution length must be a multiple of the block length"
        );
        let blocks = (0..full.len() / block_len)
            .map(|i| full.slice(i * block_len, block_len))
            .collect();
        Self { full, blocks }
    }

    pub fn from_blocks(blocks: Vec<BitVec>) -> Self {
        let full = blocks.iter().skip(1).fold(blocks[0].clone(), |acc, b| acc.concat(b));
        Self { full, blocks }
    }
}

/// Canonical decoding vector for `request` in `group`.
pub fn plan_retrieval(group: &ReconstructionGroup, request: &ContentRequest) -> Result<DecodingSolution> {
    let full = group.stacked.solve(&request.basis)?;
    Ok(DecodingSolution::from_full(full, group.block_len()))
}

/// Runs a direct retrieval with the given plan and returns the aggregated
/// content. The ledger receives, in order: the request to every member, the
/// coordinator's slice to every other member, and one content-sized share
/// from every member to the user.
pub fn execute_plan(
    cluster: &Cluster,
    group_id: usize,
    request: &ContentRequest,
    plan: &DecodingSolution,
    ledger: &mut TranscriptLedger,
) -> BitVec {
    let group = cluster.group(group_id);
    let m = cluster.params.contents;
    for &id in &group.member_ids {
        ledger.record(
            Endpoint::User,
            Endpoint::Server(id),
            Direction::Up,
            MessageKind::Request,
            m,
            Some(request.basis.clone()),
        );
    }
    let coordinator = group.coordinator_id;
    for (&id, block) in group.member_ids.iter().zip(&plan.blocks) {
        if id != coordinator {
            ledger.record(
                Endpoint::Server(coordinator),
                Endpoint::Server(id),
                Direction::Down,
                MessageKind::Control,
                block.len(),
                Some(block.clone()),
            );
        }
    }
    let mut result = BitVec::zeros(cluster.params.content_bits);
    for (&id, block) in group.member_ids.iter().zip(&plan.blocks) {
        let share = cluster.server(id).respond(block);
        result.xor_assign(&share);
        ledger.record(
            Endpoint::Server(id),
            Endpoint::User,
            Direction::Down,
            MessageKind::Share,
            share.len(),
            Some(share),
        );
    }
    result
}

/// Direct retrieval with the canonical planner.
pub fn execute_retrieval(
    cluster: &Cluster,
    group_id: usize,
    request: &ContentRequest,
    ledger: &mut TranscriptLedger,
) -> Result<BitVec> {
    let plan = plan_retrieval(cluster.group(group_id), request)?;
    Ok(execute_plan(cluster, group_id, request, &plan, ledger))
}

/// Records the one-time exchange of encoding matrices from every member to
/// the coordinator. Intra-group, so it never counts toward cPoP.
pub fn record_setup_exchange(cluster: &Cluster, group_id: usize, ledger: &mut TranscriptLedger) {
    let group = cluster.group(group_id);
    let bits = cluster.params.contents * cluster.params.files_per_server;
    for &id in &group.member_ids {
        if id != group.coordinator_id {
            ledger.record(
                Endpoint::Server(id),
                Endpoint::Server(group.coordinator_id),
                Direction::Up,
                MessageKind::Setup,
                bits,
                None,
            );
        }
    }
}
