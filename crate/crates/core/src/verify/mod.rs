//! Independent checks of the engine: sampling from the exact subdomains,
//! randomized inequality suites, and exhaustive code search.

pub mod code;
pub mod lemmas;
pub mod oracle;
pub mod sampling;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};

pub use code::{is_bk_hash, max_code_exhaustive, Code, CodeSearch, HashCheck, SearchOrder};
pub use lemmas::{check_lemma_inequalities, LemmaCheck, LemmaReport};
pub use oracle::{check_fast_against_naive, OracleReport, ORACLE_TOLERANCE};
pub use sampling::{sample_subdomain, SampleReport};

/// Samples per parallel batch.
pub(crate) const BATCH: usize = 1024;

/// Generator for batch `index` of a run seeded with `seed`: same key,
/// separate stream per batch.
pub(crate) fn batch_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform point of the simplex scaled to total `mass`, written into `out`.
pub(crate) fn dirichlet_into(rng: &mut ChaCha8Rng, mass: f64, out: &mut [f64]) {
    let mut total = 0.0;
    for x in out.iter_mut() {
        let e: f64 = Exp1.sample(rng);
        *x = e;
        total += e;
    }
    for x in out.iter_mut() {
        *x *= mass / total;
    }
}
