use std::collections::HashSet;

use super::{select_key, ContentRequest, DecodingSolution};
use crate::analysis::{chi_square_uniform, ChiSquare};
use crate::error::{Error, Result};
use crate::gf2::{BitVec, EchelonBasis, RngState};
use crate::sim::{Endpoint, MessageKind, TranscriptLedger};
use crate::storage::{encode_server, Cluster, ContentLibrary, ReconstructionGroup, ServerEncoding, SystemParams};

/// A retrieval viewed as a cipher: the wiretapped answers form the
/// ciphertext, the one unobserved answer is the key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SecrecyDecomposition {
    pub ciphertext: BitVec,
    pub key: BitVec,
    pub message: BitVec,
    pub wiretapped_count: usize,
}

impl SecrecyDecomposition {
    pub fn identity_holds(&self) -> bool {
        &self.ciphertext ^ &self.key == self.message
    }
}

/// Splits the answers of `plan` into ciphertext (all members but the last)
/// and key (the last member). The message is read from the plaintext library
/// so that the identity is checked against ground truth.
pub fn decompose_secrecy(
    cluster: &Cluster,
    group_id: usize,
    request: &ContentRequest,
    plan: &DecodingSolution,
) -> Result<SecrecyDecomposition> {
    let group = cluster.group(group_id);
    if group.size() < 2 {
        return Err(Error::SingletonGroup(group_id));
    }
    let message = cluster.library()?.get(request.index).clone();
    let mut shares = group
        .member_ids
        .iter()
        .zip(&plan.blocks)
        .map(|(&id, block)| cluster.server(id).respond(block));
    let mut ciphertext = BitVec::zeros(cluster.params.content_bits);
    for share in shares.by_ref().take(group.size() - 1) {
        ciphertext.xor_assign(&share);
    }
    let key = shares.next().expect("group has at least two members");
    Ok(SecrecyDecomposition {
        ciphertext,
        key,
        message,
        wiretapped_count: group.size() - 1,
    })
}

/// An adversary tapping every server-to-user link except one.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Eavesdropper {
    pub unobserved: usize,
    /// Whether the adversary also learns which content was requested (it
    /// can read the request message itself).
    pub knows_request_index: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observation {
    pub ciphertext: BitVec,
    pub request_index: Option<usize>,
    pub links_tapped: usize,
}

impl Eavesdropper {
    /// The standard scenario: the group's last member is the unobserved link,
    /// and the request index is known.
    pub fn missing_last(group: &ReconstructionGroup) -> Self {
        Self {
            unobserved: *group.member_ids.last().expect("non-empty group"),
            knows_request_index: true,
        }
    }

    /// Replays a transcript and XORs every observed member share.
    pub fn observe(&self, ledger: &TranscriptLedger, content_bits: usize) -> Observation {
        let mut ciphertext = BitVec::zeros(content_bits);
        let mut tapped = HashSet::new();
        let mut request_index = None;
        for e in ledger.entries() {
            match (e.kind, e.from, e.to) {
                (MessageKind::Share, Endpoint::Server(id), Endpoint::User) if id != self.unobserved => {
                    if let Some(p) = &e.payload {
                        ciphertext.xor_assign(p);
                        tapped.insert(id);
                    }
                }
                (MessageKind::Request, Endpoint::User, _) if self.knows_request_index => {
                    request_index = e.payload.as_ref().and_then(BitVec::first_one);
                }
                _ => {}
            }
        }
        Observation {
            ciphertext,
            request_index,
            links_tapped: tapped.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct KeyUniformityReport {
    pub samples: usize,
    pub key_bits: usize,
    pub one_frequency: Vec<f64>,
    /// Goodness of fit against the uniform law on all `2^M` keys, for `M <= 12`.
    pub chi_square: Option<ChiSquare>,
}

impl KeyUniformityReport {
    /// Largest per-bit distance from 1/2.
    pub fn max_bit_deviation(&self) -> f64 {
        self.one_frequency.iter().map(|f| (f - 0.5).abs()).fold(0.0, f64::max)
    }
}

/// Samples keys from fresh clusters: each sample draws a new library and new
/// encodings, forms one group with a spare member, picks a uniformly random
/// request, and records the key (the spare's answer under its key selector).
pub fn key_uniformity_report(params: &SystemParams, samples: usize, rng: &RngState) -> Result<KeyUniformityReport> {
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    params.validate()?;
    let bits = params.content_bits;
    let histogram_bins = (bits <= 12).then(|| 1usize << bits);
    let mut ones = vec![0u64; bits];
    let mut histogram = vec![0u64; histogram_bins.unwrap_or(0)];

    for i in 0..samples {
        let mut srng = rng.fork(i as u64);
        let library = ContentLibrary::generate(params, &mut srng);
        let group_servers = spare_group(params, &library, &mut srng)?;
        let members: Vec<&ServerEncoding> = group_servers.iter().collect();
        let group = ReconstructionGroup::new(0, &members);
        let request = ContentRequest::new(srng.below(params.contents), params.contents)?;
        let selector = select_key(&group, &request, &HashSet::new())?;
        let key = group_servers.last().expect("spare").respond(&selector);
        for b in key.iter_ones() {
            ones[b] += 1;
        }
        if histogram_bins.is_some() {
            histogram[key.words()[0] as usize] += 1;
        }
    }

    let chi_square = histogram_bins.map(|_| chi_square_uniform(&histogram));
    Ok(KeyUniformityReport {
        samples,
        key_bits: bits,
        one_frequency: ones.iter().map(|&c| c as f64 / samples as f64).collect(),
        chi_square,
    })
}

/// Encodes servers one at a time until their stacked rank is `m`, then one more.
fn spare_group(params: &SystemParams, library: &ContentLibrary, rng: &mut RngState) -> Result<Vec<ServerEncoding>> {
    let mut basis = EchelonBasis::new(params.contents);
    let mut servers = Vec::new();
    while !basis.is_full() {
        if servers.len() + 1 >= params.servers {
            return Err(Error::Infeasible {
                m: params.contents,
                reason: format!("{} servers do not leave room for a spare", params.servers),
            });
        }
        let s = encode_server(params, library, servers.len(), rng)?;
        for c in s.encoding.columns() {
            basis.insert(c);
        }
        servers.push(s);
    }
    servers.push(encode_server(params, library, servers.len(), rng)?);
    Ok(servers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::retrieval::{execute_plan, plan_retrieval, KeySchedule};
    use crate::storage::GroupingPolicy;

    #[test]
    fn two_member_ciphertext_is_first_share() {
        let c = Cluster::build_with(
            SystemParams::new(2, 4, 4, 40, 0.5).unwrap(),
            1,
            GroupingPolicy::WithSpare,
        )
        .unwrap();
        let g = c.group(0);
        assert_eq!(g.size(), 2);
        let sched = KeySchedule::build(g).unwrap();
        for r in 0..4 {
            let req = ContentRequest::new(r, 4).unwrap();
            let d = decompose_secrecy(&c, 0, &req, sched.plan(r)).unwrap();
            assert_eq!(
                d.ciphertext,
                c.server(g.member_ids[0]).respond(&sched.plan(r).blocks[0])
            );
            assert!(d.identity_holds());
            assert_eq!(d.wiretapped_count, 1);
        }
    }

    #[test]
    fn singleton_is_rejected() {
        let c = Cluster::build(SystemParams::new(1, 4, 4, 8, 0.5).unwrap(), 0).unwrap();
        let req = ContentRequest::new(0, 4).unwrap();
        let plan = plan_retrieval(c.group(0), &req).unwrap();
        assert!(matches!(
            decompose_secrecy(&c, 0, &req, &plan),
            Err(Error::SingletonGroup(0))
        ));
    }

    #[test]
    fn canonical_plan_zeroes_appended_leftover_key() {
        // A leftover server appended to a group is never a pivot, so the
        // canonical solver gives it a zero slice and the key collapses.
        let p = SystemParams::new(3, 4, 8, 16, 0.5).unwrap();
        let c = (0..)
            .map(|s| Cluster::build(p, s).unwrap())
            .find(|c| c.groups.len() == 1 && c.group(0).size() == 3)
            .unwrap();
        let req = ContentRequest::new(0, 8).unwrap();
        let plan = plan_retrieval(c.group(0), &req).unwrap();
        let d = decompose_secrecy(&c, 0, &req, &plan).unwrap();
        assert!(d.key.is_zero());
        assert_eq!(d.ciphertext, d.message);
    }

    #[test]
    fn eavesdropper_replay_recovers_ciphertext() {
        let c = Cluster::build_with(
            SystemParams::new(8, 4, 12, 64, 0.5).unwrap(),
            7,
            GroupingPolicy::WithSpare,
        )
        .unwrap();
        let g = c.group(0);
        let sched = KeySchedule::build(g).unwrap();
        let req = ContentRequest::new(5, 12).unwrap();
        let mut ledger = TranscriptLedger::new();
        execute_plan(&c, 0, &req, sched.plan(5), &mut ledger);
        let replayed = TranscriptLedger::parse(&ledger.export()).unwrap();
        let eve = Eavesdropper::missing_last(g);
        let obs = eve.observe(&replayed, 64);
        let d = decompose_secrecy(&c, 0, &req, sched.plan(5)).unwrap();
        assert_eq!(obs.ciphertext, d.ciphertext);
        assert_eq!(obs.request_index, Some(5));
        assert_eq!(obs.links_tapped, g.size() - 1);
        let blind = Eavesdropper {
            knows_request_index: false,
            ..eve
        };
        assert_eq!(blind.observe(&replayed, 64).request_index, None);
    }

    #[test]
    fn fair_source_gives_fair_keys() {
        let p = SystemParams::new(6, 4, 8, 16, 0.5).unwrap();
        let report = key_uniformity_report(&p, 4000, &RngState::new(3)).unwrap();
        // 3 sigma at n = 4000 is about 0.024.
        assert!(report.max_bit_deviation() < 0.03, "{:?}", report.one_frequency);
    }

    #[test]
    fn single_content_key_is_the_content() {
        // With one content every encoding vector is [1], so the key is f_1
        // itself and carries the raw source bias.
        let p = SystemParams::new(3, 1, 1, 8, 0.9).unwrap();
        let report = key_uniformity_report(&p, 20_000, &RngState::new(4)).unwrap();
        for f in &report.one_frequency {
            assert!((f - 0.9).abs() < 0.007, "{f}");
        }
    }

    #[test]
    fn report_is_reproducible() {
        let p = SystemParams::new(6, 4, 8, 6, 0.8).unwrap();
        let a = key_uniformity_report(&p, 500, &RngState::new(8)).unwrap();
        let b = key_uniformity_report(&p, 500, &RngState::new(8)).unwrap();
        assert_eq!(a, b);
        assert!(a.chi_square.is_some());
    }
}
