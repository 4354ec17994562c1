use super::{ServerEncoding, SystemParams};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, EchelonBasis};

/// A set of servers whose stacked encoding matrix has rank `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconstructionGroup {
    pub group_id: usize,
    pub member_ids: Vec<usize>,
    /// `[V_1 V_2 .. V_J]`, `m x (J * h)`.
    pub stacked: BitMatrix,
    pub coordinator_id: usize,
}

impl ReconstructionGroup {
    /// Stacks the members' encodings side by side; the coordinator is the
    /// lowest-indexed member.
    pub fn new(group_id: usize, members: &[&ServerEncoding]) -> Self {
        assert!(!members.is_empty(), "a group needs at least one member");
        let stacked = members[1..]
            .iter()
            .fold(members[0].encoding.clone(), |acc, s| acc.hstack(&s.encoding));
        let member_ids: Vec<usize> = members.iter().map(|s| s.server_id).collect();
        let coordinator_id = *member_ids.iter().min().expect("non-empty");
        Self {
            group_id,
            member_ids,
            stacked,
            coordinator_id,
        }
    }

    pub fn size(&self) -> usize {
        self.member_ids.len()
    }

    /// Files per member.
    pub fn block_len(&self) -> usize {
        self.stacked.cols() / self.member_ids.len()
    }

    pub fn contents(&self) -> usize {
        self.stacked.rows()
    }

    /// Position of `server_id` within the member list.
    pub fn position(&self, server_id: usize) -> Option<usize> {
        self.member_ids.iter().position(|&id| id == server_id)
    }
}

/// How servers are packed into reconstruction groups.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GroupingPolicy {
    /// Close a group as soon as its stacked rank reaches `m`.
    #[default]
    Minimal,
    /// Close a group one server after its rank reaches `m`, so the members
    /// other than the last already span every content. This leaves the last
    /// member's local decoding vector free to act as a key selector.
    WithSpare,
}

/// Greedy consecutive packing with [`GroupingPolicy::Minimal`].
pub fn form_groups(params: &SystemParams, servers: &[ServerEncoding]) -> Result<Vec<ReconstructionGroup>> {
    form_groups_with(params, servers, GroupingPolicy::Minimal)
}

/// Packs consecutive servers into groups, testing the stacked rank after each
/// addition. Servers left at the tail that cannot complete a group on their
/// own join the last complete group, so every server belongs to exactly one
/// group.
pub fn form_groups_with(
    params: &SystemParams,
    servers: &[ServerEncoding],
    policy: GroupingPolicy,
) -> Result<Vec<ReconstructionGroup>> {
    let m = params.contents;
    if servers.len() * params.files_per_server < m {
        return Err(Error::Infeasible {
            m,
            reason: format!(
                "{} servers x {} files is below rank {m}",
                servers.len(),
                params.files_per_server
            ),
        });
    }

    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut basis = EchelonBasis::new(m);
    let mut spanned = false;
    for (idx, server) in servers.iter().enumerate() {
        current.push(idx);
        if spanned {
            // Only reached under WithSpare: this is the spare.
            groups.push(std::mem::take(&mut current));
            basis = EchelonBasis::new(m);
            spanned = false;
            continue;
        }
        for col in server.encoding.columns() {
            basis.insert(col);
        }
        if basis.is_full() {
            match policy {
                GroupingPolicy::Minimal => {
                    groups.push(std::mem::take(&mut current));
                    basis = EchelonBasis::new(m);
                }
                GroupingPolicy::WithSpare => spanned = true,
            }
        }
    }

    if groups.is_empty() && spanned {
        // WithSpare ran out of servers before finding a spare.
        groups.push(std::mem::take(&mut current));
    }
    if groups.is_empty() {
        return Err(Error::Infeasible {
            m,
            reason: "the servers together never reach full rank".into(),
        });
    }
    groups.last_mut().expect("non-empty").extend(current);

    Ok(groups
        .iter()
        .enumerate()
        .map(|(gid, idxs)| {
            let members: Vec<&ServerEncoding> = idxs.iter().map(|&i| &servers[i]).collect();
            ReconstructionGroup::new(gid, &members)
        })
        .collect())
}
