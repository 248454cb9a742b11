//! Seeded train/test split with round-robin training folds.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// A reproducible 80/20 split with the training ids partitioned into
/// near-equal folds. Ids are sorted before shuffling, so the plan depends
/// only on the id set and the seed, not on input order.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitPlan {
    pub seed: u64,
    pub test_ids: Vec<String>,
    pub folds: Vec<Vec<String>>,
}

impl SplitPlan {
    pub fn n_folds(&self) -> usize {
        self.folds.len()
    }

    /// All training ids (every fold), in plan order.
    pub fn train_ids(&self) -> impl Iterator<Item = &String> {
        self.folds.iter().flatten()
    }

    /// Training ids excluding fold `held_out`.
    pub fn train_ids_excluding(&self, held_out: usize) -> impl Iterator<Item = &String> {
        self.folds
            .iter()
            .enumerate()
            .filter(move |(i, _)| *i != held_out)
            .flat_map(|(_, fold)| fold.iter())
    }
}

/// Default protocol: 20% test, 5 folds.
pub fn make_split(ids: &[String], seed: u64) -> Result<SplitPlan, EvalError> {
    make_split_with(ids, seed, 0.2, 5)
}

pub fn make_split_with(
    ids: &[String],
    seed: u64,
    test_fraction: f64,
    n_folds: usize,
) -> Result<SplitPlan, EvalError> {
    if ids.len() < 10 {
        return Err(EvalError::InvalidInput(alloc::format!(
            "need at least 10 ids to split, got {}",
            ids.len()
        )));
    }
    if !(0.0..1.0).contains(&test_fraction) || n_folds == 0 {
        return Err(EvalError::InvalidInput(alloc::format!(
            "bad split parameters: test_fraction={test_fraction} n_folds={n_folds}"
        )));
    }

    let mut sorted: Vec<String> = ids.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != ids.len() {
        return Err(EvalError::InvalidInput(String::from("duplicate ids in split input")));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sorted.shuffle(&mut rng);

    let n_test = ((sorted.len() as f64 * test_fraction) as usize).max(1);
    let test_ids = sorted[..n_test].to_vec();
    let mut folds: Vec<Vec<String>> = (0..n_folds).map(|_| Vec::new()).collect();
    for (i, id) in sorted[n_test..].iter().enumerate() {
        folds[i % n_folds].push(id.clone());
    }
    Ok(SplitPlan { seed, test_ids, folds })
}
