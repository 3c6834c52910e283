//! Global comparison tolerance.
//!
//! Every "almost everywhere" comparison in the crate is a per-atom comparison
//! within a single tolerance. The default is `1e-9`; [`with_tolerance`]
//! overrides it for the duration of a closure on the current thread.

use std::cell::Cell;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

thread_local! {
    static CURRENT: Cell<f64> = const { Cell::new(DEFAULT_TOLERANCE) };
}

/// The tolerance in effect on this thread.
pub fn tolerance() -> f64 {
    CURRENT.with(|c| c.get())
}

/// Runs `f` with `eps` as the tolerance, restoring the previous value afterwards.
pub fn with_tolerance<T>(eps: f64, f: impl FnOnce() -> T) -> T {
    struct Restore(f64);
    impl Drop for Restore {
        fn drop(&mut self) {
            CURRENT.with(|c| c.set(self.0));
        }
    }
    let _guard = Restore(CURRENT.with(|c| c.replace(eps)));
    f()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_is_scoped() {
        assert_eq!(tolerance(), DEFAULT_TOLERANCE);
        let inner = with_tolerance(1e-3, tolerance);
        assert_eq!(inner, 1e-3);
        assert_eq!(tolerance(), DEFAULT_TOLERANCE);
    }
}
