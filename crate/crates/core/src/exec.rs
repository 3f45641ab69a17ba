// Order-preserving map over indices; runs on the rayon pool with the
// `parallel` feature, sequentially otherwise.

use alloc::vec::Vec;

use crate::error::Result;
use crate::verdict::{Budget, Diagnostics};

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Run seeded starts in batches of eight; return the best-residual run of the
/// first batch that reaches `target`, or the overall best. Ties go to the
/// lower start index. Records budget use in `diagnostics`.
pub fn batched_search<T, F>(
    budget: &Budget,
    diagnostics: &mut Diagnostics,
    target: f64,
    run: F,
) -> Result<Option<T>>
where
    T: Send,
    F: Fn(usize) -> Result<(f64, usize, T)> + Sync + Send,
{
    const BATCH: usize = 8;
    let mut best: Option<(f64, T)> = None;
    let mut start = 0;
    diagnostics.best_residual = f64::INFINITY;
    while start < budget.starts {
        let count = BATCH.min(budget.starts - start);
        let results = map_indexed(count, |i| run(start + i));
        for r in results {
            let (residual, iters, value) = r?;
            let residual = if residual.is_nan() { f64::INFINITY } else { residual };
            diagnostics.starts_used += 1;
            diagnostics.iterations += iters;
            let better = match &best {
                Some((b, _)) => residual < *b,
                None => true,
            };
            if better {
                best = Some((residual, value));
            }
        }
        start += count;
        if let Some((b, _)) = &best {
            diagnostics.best_residual = *b;
            if *b <= target {
                break;
            }
        }
    }
    Ok(best.map(|(_, v)| v))
}
