//! Synthetic labeled corpora with a controllable class signal.
//!
//! Documents mix two sources: a Zipf-shaped background over the whole token
//! inventory, and a per-class keyword set injected with probability `signal`
//! per position. At `signal = 0` every class draws from the identical
//! background; as it rises, classes become separable.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, Stream};

#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SyntheticSpec {
    pub classes: usize,
    /// Content-token inventory size; tokens are named `w000`, `w001`, ...
    pub vocab_size: usize,
    pub docs_per_class: usize,
    pub test_docs_per_class: usize,
    /// Per-position probability of emitting one of the class's keywords.
    pub signal: f64,
    pub keywords_per_class: usize,
    pub doc_len: (usize, usize),
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            classes: 4,
            vocab_size: 500,
            docs_per_class: 600,
            test_docs_per_class: 100,
            signal: 0.12,
            keywords_per_class: 5,
            doc_len: (20, 50),
            zipf_exponent: 1.1,
            seed: 0,
        }
    }
}

/// First background rank used for keywords; ranks below stay class-neutral
/// so the most frequent tokens never carry label signal.
const KEYWORD_BASE_RANK: usize = 10;

impl SyntheticSpec {
    pub fn validate(&self) -> Result<()> {
        if self.classes < 2 {
            return Err(Error::Config(format!(
                "synthetic corpus needs at least 2 classes, got {}",
                self.classes
            )));
        }
        let needed = KEYWORD_BASE_RANK + self.classes * self.keywords_per_class;
        if self.vocab_size < needed {
            return Err(Error::Config(format!(
                "vocab size {} too small for {} classes x {} keywords (needs >= {needed})",
                self.vocab_size, self.classes, self.keywords_per_class
            )));
        }
        if !(0.0..=1.0).contains(&self.signal) {
            return Err(Error::Config(format!(
                "signal must be in [0, 1], got {}",
                self.signal
            )));
        }
        if self.keywords_per_class == 0 {
            return Err(Error::Config("keywords_per_class must be positive".into()));
        }
        if self.docs_per_class == 0 {
            return Err(Error::Config("docs_per_class must be positive".into()));
        }
        let (lo, hi) = self.doc_len;
        if lo == 0 || lo > hi {
            return Err(Error::Config(format!(
                "document length range ({lo}, {hi}) is empty"
            )));
        }
        if !(self.zipf_exponent > 0.0) {
            return Err(Error::Config("zipf exponent must be positive".into()));
        }
        Ok(())
    }

    /// Token indices carrying the signal for `class`.
    pub fn keyword_ranks(&self, class: usize) -> std::ops::Range<usize> {
        let start = KEYWORD_BASE_RANK + class * self.keywords_per_class;
        start..start + self.keywords_per_class
    }

    pub fn token_name(&self, rank: usize) -> String {
        let width = (self.vocab_size.max(2) - 1).to_string().len();
        format!("w{rank:0width$}")
    }
}

struct ZipfSampler {
    cumulative: Vec<f64>,
}

impl ZipfSampler {
    fn new(n: usize, exponent: f64) -> Self {
        let mut cumulative = Vec::with_capacity(n);
        let mut total = 0.0;
        for rank in 0..n {
            total += 1.0 / ((rank + 1) as f64).powf(exponent);
            cumulative.push(total);
        }
        ZipfSampler { cumulative }
    }

    fn draw(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("non-empty inventory");
        let u: f64 = rng.gen::<f64>() * total;
        self.cumulative.partition_point(|&c| c <= u)
    }
}

fn generate_doc(
    spec: &SyntheticSpec,
    class: usize,
    zipf: &ZipfSampler,
    rng: &mut ChaCha8Rng,
) -> String {
    let (lo, hi) = spec.doc_len;
    let len = rng.gen_range(lo..=hi);
    let keywords = spec.keyword_ranks(class);
    let mut tokens = Vec::with_capacity(len);
    for _ in 0..len {
        let rank = if spec.signal > 0.0 && rng.gen::<f64>() < spec.signal {
            keywords.start + rng.gen_range(0..spec.keywords_per_class)
        } else {
            zipf.draw(rng)
        };
        tokens.push(spec.token_name(rank));
    }
    tokens.join(" ")
}

/// Generates (train, test) corpora. Labels are 0-based class indices; docs
/// are emitted class-major, so each split's label histogram is uniform.
pub fn generate_synthetic(
    spec: &SyntheticSpec,
) -> Result<(Vec<(usize, String)>, Vec<(usize, String)>)> {
    spec.validate()?;
    let zipf = ZipfSampler::new(spec.vocab_size, spec.zipf_exponent);
    let mut rng = stream_rng(spec.seed, Stream::Synthetic, 0);

    let emit = |docs_per_class: usize, rng: &mut ChaCha8Rng| -> Vec<(usize, String)> {
        let mut out = Vec::with_capacity(spec.classes * docs_per_class);
        for class in 0..spec.classes {
            for _ in 0..docs_per_class {
                out.push((class, generate_doc(spec, class, &zipf, rng)));
            }
        }
        out
    };

    let train = emit(spec.docs_per_class, &mut rng);
    let test = emit(spec.test_docs_per_class, &mut rng);
    Ok((train, test))
}
