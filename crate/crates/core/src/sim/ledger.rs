//! Logical network transcript.
//!
//! Every message a protocol step claims to send is appended here exactly
//! once. There is no latency or loss model; cost is measured in bits only.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    User,
    Server(usize),
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::User => f.write_str("user"),
            Endpoint::Server(id) => write!(f, "s{id}"),
        }
    }
}

impl FromStr for Endpoint {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "user" {
            return Ok(Endpoint::User);
        }
        s.strip_prefix('s')
            .and_then(|id| id.parse().ok())
            .map(Endpoint::Server)
            .ok_or_else(|| Error::Parse(format!("bad endpoint {s:?}")))
    }
}

/// `Up` is toward the user's request path (user to server, member to
/// coordinator); `Down` is the reverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MessageKind {
    /// A direct request carrying `e_r`.
    Request,
    /// A batch of random query vectors.
    QueryUpload,
    /// Coordinator-to-member local decoding vector.
    Control,
    /// A member's `f V_i y_i` contribution.
    Share,
    /// A group's aggregated answer to a query batch.
    Response,
    /// One-time encoding matrix exchange inside a group.
    Setup,
}

impl MessageKind {
    fn as_str(self) -> &'static str {
        match self {
            MessageKind::Request => "request",
            MessageKind::QueryUpload => "query",
            MessageKind::Control => "control",
            MessageKind::Share => "share",
            MessageKind::Response => "response",
            MessageKind::Setup => "setup",
        }
    }
}

impl FromStr for MessageKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "request" => MessageKind::Request,
            "query" => MessageKind::QueryUpload,
            "control" => MessageKind::Control,
            "share" => MessageKind::Share,
            "response" => MessageKind::Response,
            "setup" => MessageKind::Setup,
            other => return Err(Error::Parse(format!("bad message kind {other:?}"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    /// Links with the user at one end (low-bandwidth).
    UserFacing,
    /// Server-to-server links inside a group.
    IntraGroup,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub from: Endpoint,
    pub to: Endpoint,
    pub direction: Direction,
    pub bits: usize,
    pub kind: MessageKind,
    /// The transmitted bits, kept so that wiretap analyses can replay them.
    pub payload: Option<BitVec>,
}

impl LedgerEntry {
    pub fn scope(&self) -> Scope {
        if self.from == Endpoint::User || self.to == Endpoint::User {
            Scope::UserFacing
        } else {
            Scope::IntraGroup
        }
    }

    pub fn is_user_download(&self) -> bool {
        self.to == Endpoint::User
    }
}

impl fmt::Display for LedgerEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Up => "up",
            Direction::Down => "down",
        };
        let payload = self.payload.as_ref().map_or_else(|| "-".to_string(), BitVec::to_hex);
        write!(
            f,
            "{}->{}\t{dir}\t{}\t{}\t{payload}",
            self.from,
            self.to,
            self.bits,
            self.kind.as_str()
        )
    }
}

impl FromStr for LedgerEntry {
    type Err = Error;

    fn from_str(line: &str) -> Result<Self> {
        let fields: Vec<&str> = line.split('\t').collect();
        let [link, dir, bits, kind, payload] = fields[..] else {
            return Err(Error::Parse(format!("expected 5 tab-separated fields: {line:?}")));
        };
        let (from, to) = link
            .split_once("->")
            .ok_or_else(|| Error::Parse(format!("bad link {link:?}")))?;
        let direction = match dir {
            "up" => Direction::Up,
            "down" => Direction::Down,
            other => return Err(Error::Parse(format!("bad direction {other:?}"))),
        };
        let bits: usize = bits
            .parse()
            .map_err(|_| Error::Parse(format!("bad bit count {bits:?}")))?;
        let payload = match payload {
            "-" => None,
            hex => Some(BitVec::from_hex(bits, hex)?),
        };
        Ok(LedgerEntry {
            from: from.parse()?,
            to: to.parse()?,
            direction,
            bits,
            kind: kind.parse()?,
            payload,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TranscriptLedger {
    entries: Vec<LedgerEntry>,
}

impl TranscriptLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(
        &mut self,
        from: Endpoint,
        to: Endpoint,
        direction: Direction,
        kind: MessageKind,
        bits: usize,
        payload: Option<BitVec>,
    ) {
        debug_assert!(payload.as_ref().is_none_or(|p| p.len() == bits));
        self.entries.push(LedgerEntry {
            from,
            to,
            direction,
            bits,
            kind,
            payload,
        });
    }

    pub fn entries(&self) -> &[LedgerEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Appends a sub-ledger, e.g. one produced by an independent batch.
    pub fn merge(&mut self, other: TranscriptLedger) {
        self.entries.extend(other.entries);
    }

    pub fn in_scope(&self, scope: Scope) -> impl Iterator<Item = &LedgerEntry> {
        self.entries.iter().filter(move |e| e.scope() == scope)
    }

    /// Bits the user downloaded from servers.
    pub fn user_download_bits(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.is_user_download())
            .map(|e| e.bits)
            .sum()
    }

    pub fn user_upload_bits(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.from == Endpoint::User)
            .map(|e| e.bits)
            .sum()
    }

    pub fn intra_group_bits(&self) -> usize {
        self.in_scope(Scope::IntraGroup).map(|e| e.bits).sum()
    }

    pub fn total_bits(&self) -> usize {
        self.entries.iter().map(|e| e.bits).sum()
    }

    /// One line per entry: `from->to <TAB> up|down <TAB> bits <TAB> kind <TAB> payload-hex|-`.
    pub fn export(&self) -> String {
        self.entries.iter().map(|e| format!("{e}\n")).collect()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let entries = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }
}

/// Communication price of privacy: user download bits over content size.
/// Query uploads and intra-group traffic are not counted.
pub fn measure_cpop(ledger: &TranscriptLedger, content_bits: usize) -> f64 {
    ledger.user_download_bits() as f64 / content_bits as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TranscriptLedger {
        let mut l = TranscriptLedger::new();
        l.record(
            Endpoint::User,
            Endpoint::Server(0),
            Direction::Up,
            MessageKind::QueryUpload,
            12,
            Some(BitVec::unit(12, 3)),
        );
        l.record(
            Endpoint::Server(0),
            Endpoint::Server(1),
            Direction::Down,
            MessageKind::Control,
            4,
            None,
        );
        l.record(
            Endpoint::Server(1),
            Endpoint::Server(0),
            Direction::Up,
            MessageKind::Share,
            10,
            Some(BitVec::ones(10)),
        );
        l.record(
            Endpoint::Server(0),
            Endpoint::User,
            Direction::Down,
            MessageKind::Response,
            10,
            Some(BitVec::zeros(10)),
        );
        l
    }

    #[test]
    fn scopes_and_totals() {
        let l = sample();
        assert_eq!(l.user_download_bits(), 10);
        assert_eq!(l.user_upload_bits(), 12);
        assert_eq!(l.intra_group_bits(), 14);
        assert_eq!(l.total_bits(), 36);
        assert_eq!(measure_cpop(&l, 10), 1.0);
    }

    #[test]
    fn export_round_trip() {
        let l = sample();
        let text = l.export();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("user->s0\tup\t12\tquery\t"));
        assert_eq!(TranscriptLedger::parse(&text).unwrap(), l);
    }

    #[test]
    fn rejects_garbage() {
        assert!(TranscriptLedger::parse("user->s0\tsideways\t1\tquery\t-").is_err());
        assert!(TranscriptLedger::parse("nonsense").is_err());
    }
}
