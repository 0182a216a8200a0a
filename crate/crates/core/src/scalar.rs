//! Scalar abstraction for the solver core.
//!
//! Everything downstream (meshes, assembly, factorizations, interface
//! iterations) is generic over [`Real`], so the same code instantiates for
//! `f32` and `f64`. The experiment drivers pin `f64`; the `f32` instantiation
//! exists for callers that trade accuracy for memory.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating-point scalar usable by the solver core.
///
/// A thin bundle over `num_traits::Float`: adds conversions from literals and
/// the marker bounds needed to share immutable solver state across the
/// concurrent subdomain sweeps.
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Panics only for non-representable values,
    /// which cannot happen for the constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal not representable in this scalar type")
    }

    /// Converts a count into the scalar type.
    fn of_usize(n: usize) -> Self {
        Self::from_usize(n).expect("count not representable in this scalar type")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Shorthand used throughout the crate for `T::lit`.
pub fn lit<T: Real>(x: f64) -> T {
    T::lit(x)
}

/// Euclidean norm of a slice.
pub fn norm2<T: Real>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt()
}

/// Dot product of two slices.
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

/// `y += s * x`.
pub fn axpy<T: Real>(s: T, x: &[T], y: &mut [T]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi = *yi + s * xi;
    }
}

/// Relative `l2` distance `|a - b| / max(|b|, floor)`.
pub fn rel_diff<T: Real>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    let mut diff = T::zero();
    let mut scale = T::zero();
    for (&x, &y) in a.iter().zip(b) {
        diff = diff + (x - y) * (x - y);
        scale = scale + y * y;
    }
    let scale = scale.sqrt();
    if scale > T::zero() {
        diff.sqrt() / scale
    } else {
        diff.sqrt()
    }
}

/// Runs two independent closures, in parallel when the platform allows it.
///
/// The fluid and structure sweeps inside one interface-operator application
/// are independent of each other; this is the only concurrency in the solve
/// path, so plain scoped threads suffice.
pub fn join2<A, B, FA, FB>(fa: FA, fb: FB) -> (A, B)
where
    A: Send,
    B: Send,
    FA: FnOnce() -> A + Send,
    FB: FnOnce() -> B + Send,
{
    std::thread::scope(|s| {
        let hb = s.spawn(fb);
        let a = fa();
        let b = hb.join().expect("subdomain sweep panicked");
        (a, b)
    })
}
