use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::C64;

/// Unnormalized forward/inverse DFT pair of one fixed length.
///
/// `forward` computes `X_k = sum_j x_j e^{-2 pi i jk/N}`, `inverse` the same
/// sum with the opposite sign.
pub(crate) struct Dft {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl Dft {
    pub(crate) fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Dft {
            n,
            fwd: planner.plan_fft_forward(n),
            inv: planner.plan_fft_inverse(n),
        }
    }

    pub(crate) fn forward(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.fwd.process(buf);
    }

    pub(crate) fn inverse(&self, buf: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        self.inv.process(buf);
    }
}
