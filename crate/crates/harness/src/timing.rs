//! Batched wall-clock timing.

use std::time::Instant;

use cutfem::operator::{Breakdown, OperatorContext};

use crate::Error;

/// Median of `batches` measurements, each the mean time of `reps` calls.
pub fn median_batch_seconds(reps: usize, batches: usize, mut f: impl FnMut()) -> f64 {
    f();
    let mut means: Vec<f64> = (0..batches.max(1))
        .map(|_| {
            let t = Instant::now();
            for _ in 0..reps {
                f();
            }
            t.elapsed().as_secs_f64() / reps.max(1) as f64
        })
        .collect();
    means.sort_by(f64::total_cmp);
    means[means.len() / 2]
}

/// Seconds per vmult and the component breakdown accumulated over every
/// application, warm-up included.
pub fn time_vmult(ctx: &OperatorContext<f64>, reps: usize, batches: usize) -> Result<(f64, Breakdown), Error> {
    let n = ctx.n_active();
    let u: Vec<f64> = (0..n).map(|i| ((i % 97) as f64 * 0.37).sin()).collect();
    let mut w = vec![0.0; n];
    let mut status = Ok(());
    ctx.reset_breakdown();
    let secs = median_batch_seconds(reps, batches, || {
        if status.is_ok() {
            status = ctx.vmult(&u, &mut w);
        }
    });
    status?;
    Ok((secs, ctx.breakdown()))
}
