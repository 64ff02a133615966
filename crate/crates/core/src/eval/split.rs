use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng;
use crate::{Error, Result};

/// One cross-validation fold over the known accounts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub fold: usize,
    /// Sorted.
    pub train: Vec<String>,
    /// Sorted.
    pub test: Vec<String>,
}

/// Shuffles the known accounts and cuts them into `folds` test sets whose
/// sizes differ by at most one, the larger ones first.
pub fn kfold_split(known: &[String], folds: usize, seed: u64) -> Result<Vec<FoldSplit>> {
    let mut ids = known.to_vec();
    ids.sort_unstable();
    ids.dedup();
    if folds < 2 {
        return Err(Error::config(format!("need at least 2 folds, got {folds}")));
    }
    if ids.len() < folds {
        return Err(Error::input(format!(
            "{} known accounts cannot fill {folds} folds",
            ids.len()
        )));
    }
    ids.shuffle(&mut rng::stream(seed, &[0x004b_464f_4c44]));

    let (base, extra) = (ids.len() / folds, ids.len() % folds);
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for fold in 0..folds {
        let end = start + base + usize::from(fold < extra);
        let mut test = ids[start..end].to_vec();
        let mut train: Vec<String> = ids[..start].iter().chain(&ids[end..]).cloned().collect();
        test.sort_unstable();
        train.sort_unstable();
        out.push(FoldSplit { fold, train, test });
        start = end;
    }
    Ok(out)
}
