use crate::error::{Error, Result};

/// Fixed-point scale used for the source bias, both in memory and on disk.
pub const BIAS_SCALE: f64 = 1e6;

/// Size and shape of a storage cluster.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SystemParams {
    /// Number of servers.
    pub servers: usize,
    /// Encoded files each server can hold.
    pub files_per_server: usize,
    /// Number of distinct contents in the library.
    pub contents: usize,
    /// Size of each content in bits.
    pub content_bits: usize,
    /// Probability that a raw content bit is 1. Quantized to 1e-6.
    pub source_bias: f64,
}

impl SystemParams {
    pub fn new(
        servers: usize,
        files_per_server: usize,
        contents: usize,
        content_bits: usize,
        source_bias: f64,
    ) -> Result<Self> {
        let params = Self {
            servers,
            files_per_server,
            contents,
            content_bits,
            source_bias: (source_bias * BIAS_SCALE).round() / BIAS_SCALE,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(Error::InvalidParams(msg));
        if self.servers == 0 || self.files_per_server == 0 || self.contents == 0 {
            return invalid("server count, files per server and content count must be positive".into());
        }
        if self.content_bits == 0 {
            return invalid("content size must be at least one bit".into());
        }
        if !(0.0..=1.0).contains(&self.source_bias) {
            return invalid(format!("source bias {} outside [0, 1]", self.source_bias));
        }
        if self.servers.saturating_mul(self.files_per_server) < self.contents {
            return Err(Error::Infeasible {
                m: self.contents,
                reason: format!(
                    "{} servers x {} files cannot hold rank {}",
                    self.servers, self.files_per_server, self.contents
                ),
            });
        }
        Ok(())
    }

    /// Whether `contents < 2^files_per_server`, the condition under which every
    /// content can be given its own non-zero key selector.
    pub fn secrecy_condition_met(&self) -> bool {
        self.files_per_server >= usize::BITS as usize || self.contents < (1usize << self.files_per_server)
    }

    pub fn bias_ppm(&self) -> u32 {
        (self.source_bias * BIAS_SCALE).round() as u32
    }
}
