use super::{
    encode_server, form_groups_with, ContentLibrary, GroupingPolicy, ReconstructionGroup, ServerEncoding, SystemParams,
};
use crate::error::{Error, Result};
use crate::gf2::RngState;

/// Everything a simulated deployment holds after the data preloading phase.
#[derive(Clone, Debug, PartialEq)]
pub struct Cluster {
    pub params: SystemParams,
    pub seed: u64,
    /// Plaintext contents. `None` for encoded-only clusters.
    pub library: Option<ContentLibrary>,
    pub servers: Vec<ServerEncoding>,
    pub groups: Vec<ReconstructionGroup>,
}

/// Stream id for content generation; servers use `1 + server_id`.
const CONTENT_STREAM: u64 = 0;

impl Cluster {
    pub fn build(params: SystemParams, seed: u64) -> Result<Self> {
        Self::build_with(params, seed, GroupingPolicy::Minimal)
    }

    /// Generates contents, encodes every server on its own stream, then
    /// forms groups.
    pub fn build_with(params: SystemParams, seed: u64, policy: GroupingPolicy) -> Result<Self> {
        params.validate()?;
        let root = RngState::new(seed);
        let library = ContentLibrary::generate(&params, &mut root.fork(CONTENT_STREAM));
        let servers = (0..params.servers)
            .map(|id| encode_server(&params, &library, id, &mut root.fork(1 + id as u64)))
            .collect::<Result<Vec<_>>>()?;
        let groups = form_groups_with(&params, &servers, policy)?;
        Ok(Self {
            params,
            seed,
            library: Some(library),
            servers,
            groups,
        })
    }

    /// Drops the plaintext, keeping only what servers store.
    pub fn encoded_only(mut self) -> Self {
        self.library = None;
        self
    }

    pub fn group(&self, group_id: usize) -> &ReconstructionGroup {
        &self.groups[group_id]
    }

    pub fn server(&self, server_id: usize) -> &ServerEncoding {
        &self.servers[server_id]
    }

    pub fn library(&self) -> Result<&ContentLibrary> {
        self.library
            .as_ref()
            .ok_or_else(|| Error::InvalidParams("cluster was stored without plaintext contents".into()))
    }

    /// Checks every structural invariant, returning the first violation.
    pub fn check_integrity(&self) -> Result<()> {
        let p = &self.params;
        p.validate()?;
        if self.servers.len() != p.servers {
            return Err(Error::Integrity(format!(
                "expected {} servers, found {}",
                p.servers,
                self.servers.len()
            )));
        }
        for (i, s) in self.servers.iter().enumerate() {
            if s.server_id != i {
                return Err(Error::Integrity(format!(
                    "server at position {i} has id {}",
                    s.server_id
                )));
            }
            if s.encoding.rows() != p.contents || s.encoding.cols() != p.files_per_server {
                return Err(Error::Integrity(format!("server {i} encoding has wrong shape")));
            }
            let rank = s.encoding.rank();
            if rank != p.files_per_server {
                return Err(Error::Integrity(format!(
                    "server {i} encoding has rank {rank}, expected {}",
                    p.files_per_server
                )));
            }
            if let Some(lib) = &self.library {
                for (j, col) in s.encoding.columns().iter().enumerate() {
                    if s.stored[j] != lib.combine(col) {
                        return Err(Error::Integrity(format!(
                            "server {i} file {j} does not match its encoding vector"
                        )));
                    }
                }
            }
        }
        let mut seen = vec![false; self.servers.len()];
        for (gid, g) in self.groups.iter().enumerate() {
            if g.group_id != gid {
                return Err(Error::Integrity(format!(
                    "group at position {gid} has id {}",
                    g.group_id
                )));
            }
            for &id in &g.member_ids {
                if id >= seen.len() || std::mem::replace(&mut seen[id], true) {
                    return Err(Error::Integrity(format!("server {id} is missing or in two groups")));
                }
            }
            if g.position(g.coordinator_id).is_none() {
                return Err(Error::Integrity(format!("group {gid} coordinator is not a member")));
            }
            let rank = g.stacked.rank();
            if rank != p.contents {
                return Err(Error::Integrity(format!(
                    "group {gid} has rank {rank}, expected {}",
                    p.contents
                )));
            }
        }
        if let Some(id) = seen.iter().position(|s| !s) {
            return Err(Error::Integrity(format!("server {id} belongs to no group")));
        }
        Ok(())
    }
}
