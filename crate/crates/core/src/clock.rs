//! Wall-clock abstraction so solvers can time sweeps without `std`.
//!
//! The core crate never reads a real clock. Solvers take a `&dyn Clock` and
//! record whatever it returns; the CLI supplies a monotonic implementation
//! when timing is requested and [`NullClock`] otherwise, which keeps exported
//! traces byte-reproducible by default.

/// Source of monotonic timestamps in milliseconds.
pub trait Clock {
    fn now_ms(&self) -> f64;
}

/// Clock that always reads zero. Timing columns become deterministic zeros.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullClock;

impl Clock for NullClock {
    fn now_ms(&self) -> f64 {
        0.0
    }
}
