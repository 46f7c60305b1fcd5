use std::cell::RefCell;
use std::sync::Arc;

use num_traits::{Float, FloatConst};
use rustfft::{Fft, FftNum, FftPlanner};

/// Floating point scalar usable by the generic parts of the crate.
///
/// Implemented for `f32` and `f64`. Each thread keeps its own FFT planner so
/// repeated transforms of the same length reuse their plans.
pub trait Real: Float + FloatConst + FftNum + Default + std::fmt::Display {
    fn plan_fft(n: usize, inverse: bool) -> Arc<dyn Fft<Self>>;

    /// Lossy conversion from an `f64` literal.
    fn lit(x: f64) -> Self {
        <Self as num_traits::NumCast>::from(x).expect("representable literal")
    }

    fn of_usize(n: usize) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("representable integer")
    }

    fn of_i64(n: i64) -> Self {
        <Self as num_traits::NumCast>::from(n).expect("representable integer")
    }
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn plan_fft(n: usize, inverse: bool) -> Arc<dyn Fft<Self>> {
                thread_local! {
                    static PLANNER: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
                }
                PLANNER.with(|p| {
                    let mut p = p.borrow_mut();
                    if inverse {
                        p.plan_fft_inverse(n)
                    } else {
                        p.plan_fft_forward(n)
                    }
                })
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);
