use super::SystemParams;
use crate::error::{Error, Result};
use crate::gf2::{random_bitvec, BitMatrix, BitVec, EchelonBasis, RngState};

/// The raw contents `f_1 .. f_m`, each `content_bits` long.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContentLibrary {
    contents: Vec<BitVec>,
}

impl ContentLibrary {
    pub fn new(contents: Vec<BitVec>) -> Result<Self> {
        let Some(first) = contents.first() else {
            return Err(Error::InvalidParams("library needs at least one content".into()));
        };
        let bits = first.len();
        if contents.iter().any(|c| c.len() != bits) {
            return Err(Error::InvalidParams("contents differ in length".into()));
        }
        Ok(Self { contents })
    }

    /// Draws every bit independently, 1 with probability `source_bias`.
    pub fn generate(params: &SystemParams, rng: &mut RngState) -> Self {
        let contents = (0..params.contents)
            .map(|_| {
                if params.source_bias == 0.5 {
                    random_bitvec(rng, params.content_bits).expect("content_bits >= 1")
                } else {
                    BitVec::from_fn(params.content_bits, |_| rng.bernoulli(params.source_bias))
                }
            })
            .collect();
        Self { contents }
    }

    pub fn len(&self) -> usize {
        self.contents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contents.is_empty()
    }

    pub fn content_bits(&self) -> usize {
        self.contents[0].len()
    }

    pub fn get(&self, index: usize) -> &BitVec {
        &self.contents[index]
    }

    pub fn iter(&self) -> impl Iterator<Item = &BitVec> {
        self.contents.iter()
    }

    /// `f * coeffs`: the XOR of the contents selected by `coeffs`.
    pub fn combine(&self, coeffs: &BitVec) -> BitVec {
        assert_eq!(coeffs.len(), self.contents.len(), "one coefficient per content");
        let mut acc = BitVec::zeros(self.content_bits());
        for k in coeffs.iter_ones() {
            acc.xor_assign(&self.contents[k]);
        }
        acc
    }
}

/// One server's encoding matrix (`m x h`, columns are encoding vectors) and
/// the encoded files it stores.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ServerEncoding {
    pub server_id: usize,
    pub encoding: BitMatrix,
    pub stored: Vec<BitVec>,
}

impl ServerEncoding {
    /// Stores the files `f * v_j` for each column of `encoding`.
    pub fn from_encoding(server_id: usize, encoding: BitMatrix, library: &ContentLibrary) -> Self {
        let stored = encoding.columns().iter().map(|col| library.combine(col)).collect();
        Self {
            server_id,
            encoding,
            stored,
        }
    }

    pub fn files(&self) -> usize {
        self.encoding.cols()
    }

    /// What the server sends for a local decoding vector `selector`: the XOR of
    /// its stored files picked by `selector`, i.e. `f * V_i * selector`.
    pub fn respond(&self, selector: &BitVec) -> BitVec {
        assert_eq!(
            selector.len(),
            self.files(),
            "selector must have one bit per stored file"
        );
        let bits = self.stored.first().map_or(0, BitVec::len);
        let mut acc = BitVec::zeros(bits);
        for j in selector.iter_ones() {
            acc.xor_assign(&self.stored[j]);
        }
        acc
    }
}

/// Outcome of full-rank column sampling.
#[derive(Clone, Debug)]
pub struct FullRankSample {
    pub columns: Vec<BitVec>,
    /// Uniform columns drawn, including rejected ones.
    pub draws: usize,
}

impl FullRankSample {
    pub fn rejections(&self) -> usize {
        self.draws - self.columns.len()
    }
}

/// Draws `count` linearly independent columns of length `dim` by rejection:
/// each uniform candidate is discarded if it already lies in the span of the
/// accepted ones (the zero vector included).
pub fn sample_full_rank(dim: usize, count: usize, rng: &mut RngState) -> Result<FullRankSample> {
    if count > dim {
        return Err(Error::InvalidParams(format!(
            "cannot draw {count} independent vectors in dimension {dim}"
        )));
    }
    let mut basis = EchelonBasis::new(dim);
    let mut columns = Vec::with_capacity(count);
    let mut draws = 0;
    while columns.len() < count {
        let candidate = random_bitvec(rng, dim)?;
        draws += 1;
        if basis.insert(candidate.clone()) {
            columns.push(candidate);
        }
    }
    Ok(FullRankSample { columns, draws })
}

/// Data preloading for one server: a full-rank `m x h` encoding matrix and
/// the `h` encoded files it implies.
pub fn encode_server(
    params: &SystemParams,
    library: &ContentLibrary,
    server_id: usize,
    rng: &mut RngState,
) -> Result<ServerEncoding> {
    if params.files_per_server > params.contents {
        return Err(Error::InvalidParams(format!(
            "files per server ({}) exceeds content count ({})",
            params.files_per_server, params.contents
        )));
    }
    let sample = sample_full_rank(params.contents, params.files_per_server, rng)?;
    let encoding = BitMatrix::from_columns(params.contents, &sample.columns);
    Ok(ServerEncoding::from_encoding(server_id, encoding, library))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, h: usize, m: usize, bits: usize, bias: f64) -> SystemParams {
        SystemParams::new(n, h, m, bits, bias).unwrap()
    }

    #[test]
    fn bias_extremes() {
        let mut rng = RngState::new(1);
        let zeros = ContentLibrary::generate(&params(4, 4, 4, 100, 0.0), &mut rng);
        assert!(zeros.iter().all(BitVec::is_zero));
        let ones = ContentLibrary::generate(&params(4, 4, 4, 100, 1.0), &mut rng);
        assert!(ones.iter().all(|c| c.weight() == 100));
    }

    #[test]
    fn biased_contents_match_bias() {
        // Binomial 3 sigma at n = 1e4, p = 0.9 is 0.009.
        let p = params(1, 3, 3, 10_000, 0.9);
        let lib = ContentLibrary::generate(&p, &mut RngState::new(2));
        for c in lib.iter() {
            let freq = c.weight() as f64 / 10_000.0;
            assert!((freq - 0.9).abs() <= 0.01, "{freq}");
        }
    }

    #[test]
    fn single_content_single_file() {
        let p = params(1, 1, 1, 32, 0.5);
        let mut rng = RngState::new(3);
        let lib = ContentLibrary::generate(&p, &mut rng);
        let server = encode_server(&p, &lib, 0, &mut rng).unwrap();
        assert_eq!(server.encoding, BitMatrix::identity(1));
        assert_eq!(&server.stored[0], lib.get(0));
    }

    #[test]
    fn square_encoding_is_invertible() {
        let p = params(1, 8, 8, 16, 0.5);
        let mut rng = RngState::new(4);
        let lib = ContentLibrary::generate(&p, &mut rng);
        for id in 0..20 {
            let server = encode_server(&p, &lib, id, &mut rng).unwrap();
            assert!(server.encoding.try_invert().is_ok());
        }
    }

    #[test]
    fn too_many_files_is_rejected() {
        let p = SystemParams {
            servers: 1,
            files_per_server: 5,
            contents: 4,
            content_bits: 8,
            source_bias: 0.5,
        };
        let lib = ContentLibrary::generate(&p, &mut RngState::new(0));
        assert!(matches!(
            encode_server(&p, &lib, 0, &mut RngState::new(0)),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn stored_files_rederive_from_library() {
        let p = params(3, 6, 10, 77, 0.3);
        let mut rng = RngState::new(5);
        let lib = ContentLibrary::generate(&p, &mut rng);
        let server = encode_server(&p, &lib, 0, &mut rng).unwrap();
        assert_eq!(server.encoding.rank(), 6);
        for (j, col) in server.encoding.columns().iter().enumerate() {
            assert_eq!(server.stored[j], lib.combine(col));
        }
    }

    /// Expected uniform draws to collect `h` independent vectors in F_2^m:
    /// the k-th acceptance is geometric with success 1 - 2^(k - m).
    fn expected_draws(m: usize, h: usize) -> f64 {
        (0..h).map(|k| 1.0 / (1.0 - 2f64.powi(k as i32 - m as i32))).sum()
    }

    #[test]
    fn average_draws_match_geometric_sum() {
        for (m, h) in [(8usize, 5usize), (12, 9), (16, 16)] {
            let mut rng = RngState::new(6);
            let runs = 10_000;
            let total: usize = (0..runs).map(|_| sample_full_rank(m, h, &mut rng).unwrap().draws).sum();
            let mean = total as f64 / runs as f64;
            let expected = expected_draws(m, h);
            assert!(
                (mean - expected).abs() < 0.05 * expected,
                "m={m} h={h}: {mean} vs {expected}"
            );
            if m - h >= 3 {
                assert!(mean < (h + 3) as f64);
            }
        }
    }
}
