//! Uniform random approval profiles.
//!
//! Streams come from ChaCha8 seeded with `seed_from_u64(seed)`; instance `i`
//! of a dataset uses stream `i`. Each voter draws a ballot size uniformly
//! from `min_size..=max_size`, then a uniform subset of that size.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::ApprovalProfile;
use crate::par::{map_indexed, Execution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformParams {
    pub m: usize,
    pub n: usize,
    pub min_size: usize,
    pub max_size: usize,
}

impl Default for UniformParams {
    fn default() -> Self {
        UniformParams {
            m: 20,
            n: 50,
            min_size: 2,
            max_size: 5,
        }
    }
}

impl UniformParams {
    fn check(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::parameter("uniform profiles need m >= 1 and n >= 1"));
        }
        if self.min_size == 0 || self.min_size > self.max_size || self.max_size > self.m {
            return Err(Error::parameter(format!(
                "ballot size range [{}, {}] must lie within [1, {}]",
                self.min_size, self.max_size, self.m
            )));
        }
        Ok(())
    }
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn sample_profile(rng: &mut ChaCha8Rng, params: &UniformParams) -> Result<ApprovalProfile> {
    let ballots: Vec<Vec<usize>> = (0..params.n)
        .map(|_| {
            let size = rng.random_range(params.min_size..=params.max_size);
            sample(rng, params.m, size).into_vec()
        })
        .collect();
    ApprovalProfile::new(params.m, ballots)
}

/// The first profile of [`uniform_dataset`] for this seed.
pub fn gen_uniform_profile(seed: u64, params: &UniformParams) -> Result<ApprovalProfile> {
    params.check()?;
    sample_profile(&mut stream(seed, 0), params)
}

/// `count` independent profiles; profile `i` depends only on `seed` and `i`.
pub fn uniform_dataset(seed: u64, count: usize, params: &UniformParams) -> Result<Vec<ApprovalProfile>> {
    params.check()?;
    map_indexed(count, Execution::default(), |i| sample_profile(&mut stream(seed, i as u64), params))
        .into_iter()
        .collect()
}
