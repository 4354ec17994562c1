//! Binary cluster file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic            4 bytes  "SAPR"
//! version          u16      currently 1
//! servers          u32
//! files_per_server u32
//! contents         u32
//! content_bits     u32
//! source_bias      u32      parts per million
//! seed             u64
//! flags            u8       bit 0: plaintext contents present
//! [contents]       m blocks of ceil(M/8) bytes, only if flag bit 0
//! per server:
//!   server_id      u32
//!   encoding       ceil(m*h/8) bytes, column-major: entry (i, j) is bit j*m + i
//!   stored files   h blocks of ceil(M/8) bytes
//! group_count      u32
//! per group:
//!   group_id       u32
//!   coordinator    u32
//!   member_count   u32
//!   member ids     member_count x u32
//! ```
//!
//! Bit strings pack bit `i` into byte `i / 8` at position `i % 8`; padding bits
//! must be zero. Trailing bytes are rejected.

use std::path::Path;

use super::{Cluster, ContentLibrary, ReconstructionGroup, ServerEncoding, SystemParams, BIAS_SCALE};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};

pub const MAGIC: &[u8; 4] = b"SAPR";
pub const FORMAT_VERSION: u16 = 1;
const FLAG_CONTENTS: u8 = 1;

pub fn save_cluster(path: impl AsRef<Path>, cluster: &Cluster) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, encode_cluster(cluster)).map_err(|e| Error::io(path, e))
}

/// Reads a cluster file and checks its integrity.
pub fn load_cluster(path: impl AsRef<Path>) -> Result<Cluster> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_cluster(&bytes)
}

pub fn encode_cluster(cluster: &Cluster) -> Vec<u8> {
    let p = &cluster.params;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    for v in [p.servers, p.files_per_server, p.contents, p.content_bits] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&p.bias_ppm().to_le_bytes());
    out.extend_from_slice(&cluster.seed.to_le_bytes());
    out.push(if cluster.library.is_some() { FLAG_CONTENTS } else { 0 });
    if let Some(lib) = &cluster.library {
        for c in lib.iter() {
            out.extend_from_slice(&c.to_bytes());
        }
    }
    for s in &cluster.servers {
        out.extend_from_slice(&(s.server_id as u32).to_le_bytes());
        out.extend_from_slice(&column_major(&s.encoding).to_bytes());
        for f in &s.stored {
            out.extend_from_slice(&f.to_bytes());
        }
    }
    out.extend_from_slice(&(cluster.groups.len() as u32).to_le_bytes());
    for g in &cluster.groups {
        out.extend_from_slice(&(g.group_id as u32).to_le_bytes());
        out.extend_from_slice(&(g.coordinator_id as u32).to_le_bytes());
        out.extend_from_slice(&(g.member_ids.len() as u32).to_le_bytes());
        for &id in &g.member_ids {
            out.extend_from_slice(&(id as u32).to_le_bytes());
        }
    }
    out
}

/// Parses a cluster image. Structural problems are reported as
/// [`Error::MalformedFile`] with the offset of the first bad byte; a
/// well-formed file whose contents break a cluster invariant yields
/// [`Error::Integrity`].
pub fn decode_cluster(bytes: &[u8]) -> Result<Cluster> {
    let mut r = Reader { buf: bytes, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(r.malformed_at(0, "bad magic"));
    }
    let version_at = r.pos;
    let version = r.u16()?;
    if version != FORMAT_VERSION {
        return Err(r.malformed_at(version_at, &format!("unsupported version {version}")));
    }
    let params_at = r.pos;
    let servers = r.u32()? as usize;
    let files_per_server = r.u32()? as usize;
    let contents = r.u32()? as usize;
    let content_bits = r.u32()? as usize;
    let bias_ppm = r.u32()?;
    let seed = r.u64()?;
    if bias_ppm > BIAS_SCALE as u32 {
        return Err(r.malformed_at(params_at + 16, "bias above 1"));
    }
    let params = SystemParams {
        servers,
        files_per_server,
        contents,
        content_bits,
        source_bias: f64::from(bias_ppm) / BIAS_SCALE,
    };
    if let Err(e) = params.validate() {
        return Err(r.malformed_at(params_at, &e.to_string()));
    }
    if files_per_server > contents {
        return Err(r.malformed_at(params_at, "files per server exceeds content count"));
    }

    let flags_at = r.pos;
    let flags = r.u8()?;
    if flags & !FLAG_CONTENTS != 0 {
        return Err(r.malformed_at(flags_at, "unknown flag bits"));
    }
    let library = if flags & FLAG_CONTENTS != 0 {
        let items = (0..contents)
            .map(|_| r.bits(content_bits))
            .collect::<Result<Vec<_>>>()?;
        Some(ContentLibrary::new(items)?)
    } else {
        None
    };

    let mut server_list = Vec::with_capacity(servers.min(1 << 16));
    for _ in 0..servers {
        let server_id = r.u32()? as usize;
        let flat = r.bits(contents * files_per_server)?;
        let encoding = from_column_major(contents, files_per_server, &flat);
        let stored = (0..files_per_server)
            .map(|_| r.bits(content_bits))
            .collect::<Result<Vec<_>>>()?;
        server_list.push(ServerEncoding {
            server_id,
            encoding,
            stored,
        });
    }
    for (i, s) in server_list.iter().enumerate() {
        if s.server_id != i {
            return Err(Error::Integrity(format!(
                "server at position {i} has id {}",
                s.server_id
            )));
        }
    }

    let group_count = r.u32()? as usize;
    let mut groups = Vec::with_capacity(group_count.min(servers));
    for _ in 0..group_count {
        let group_id = r.u32()? as usize;
        let coordinator_id = r.u32()? as usize;
        let count_at = r.pos;
        let count = r.u32()? as usize;
        if count == 0 || count > servers {
            return Err(r.malformed_at(count_at, "bad group member count"));
        }
        let mut member_ids = Vec::with_capacity(count);
        for _ in 0..count {
            let id_at = r.pos;
            let id = r.u32()? as usize;
            if id >= servers {
                return Err(r.malformed_at(id_at, "group member out of range"));
            }
            member_ids.push(id);
        }
        let members: Vec<&ServerEncoding> = member_ids.iter().map(|&id| &server_list[id]).collect();
        let mut group = ReconstructionGroup::new(group_id, &members);
        group.coordinator_id = coordinator_id;
        groups.push(group);
    }
    if r.pos != bytes.len() {
        return Err(r.malformed_at(r.pos, "trailing bytes"));
    }

    let cluster = Cluster {
        params,
        seed,
        library,
        servers: server_list,
        groups,
    };
    cluster.check_integrity()?;
    Ok(cluster)
}

fn column_major(mat: &BitMatrix) -> BitVec {
    let rows = mat.rows();
    let mut flat = BitVec::zeros(rows * mat.cols());
    for i in 0..rows {
        for j in mat.row(i).iter_ones() {
            flat.set(j * rows + i, true);
        }
    }
    flat
}

fn from_column_major(rows: usize, cols: usize, flat: &BitVec) -> BitMatrix {
    let mut mat = BitMatrix::zeros(rows, cols);
    for k in flat.iter_ones() {
        mat.set(k % rows, k / rows, true);
    }
    mat
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn malformed_at(&self, offset: usize, reason: &str) -> Error {
        Error::MalformedFile {
            offset,
            reason: reason.to_string(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() - self.pos < n {
            return Err(self.malformed_at(self.buf.len(), &format!("truncated: needed {n} more bytes")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn bits(&mut self, len: usize) -> Result<BitVec> {
        let at = self.pos;
        let bytes = self.take(len.div_ceil(8))?;
        BitVec::from_bytes(len, bytes).ok_or_else(|| self.malformed_at(at + bytes.len() - 1, "non-zero padding bits"))
    }
}
