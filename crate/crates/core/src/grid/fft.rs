//! Unnormalized n-dimensional FFT over a row-major array, one axis at a time.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};

/// In-place transform along every axis. `Inverse` does not divide by the
/// sample count.
pub(crate) fn fft_nd(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    assert_eq!(data.len(), total, "buffer does not match shape");
    let mut planner = FftPlanner::new();
    for axis in 0..shape.len() {
        let n = shape[axis];
        if n < 2 {
            continue;
        }
        let inner: usize = shape[axis + 1..].iter().product();
        let fft = planner.plan_fft(n, direction);
        if inner == 1 {
            // contiguous lines; hand several to each call
            let lines_per_task = (1 << 14) / n + 1;
            data.par_chunks_mut(n * lines_per_task).for_each(|chunk| {
                fft.process(chunk);
            });
            continue;
        }
        let block = n * inner;
        // columns are handled in groups to bound the scratch size
        let group = inner.min(256);
        data.par_chunks_mut(block).for_each(|blk| {
            let mut buf = vec![Complex64::new(0.0, 0.0); group * n];
            let mut start = 0;
            while start < inner {
                let w = group.min(inner - start);
                let buf = &mut buf[..w * n];
                for k in 0..n {
                    let row = &blk[k * inner + start..k * inner + start + w];
                    for (c, v) in row.iter().enumerate() {
                        buf[c * n + k] = *v;
                    }
                }
                fft.process(buf);
                for k in 0..n {
                    let row = &mut blk[k * inner + start..k * inner + start + w];
                    for (c, v) in row.iter_mut().enumerate() {
                        *v = buf[c * n + k];
                    }
                }
                start += w;
            }
        });
    }
}
