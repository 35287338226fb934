//! Cooperative cancellation. Long-running loops poll a [`Deadline`] between
//! solver calls; a single call is never interrupted.

pub trait Deadline {
    fn expired(&self) -> bool;
}

/// A deadline that never fires.
#[derive(Debug, Clone, Copy, Default)]
pub struct Never;

impl Deadline for Never {
    fn expired(&self) -> bool {
        false
    }
}

/// A deadline that has already passed. Equivalent to a zero time budget.
#[derive(Debug, Clone, Copy, Default)]
pub struct Expired;

impl Deadline for Expired {
    fn expired(&self) -> bool {
        true
    }
}

impl<D: Deadline + ?Sized> Deadline for &D {
    fn expired(&self) -> bool {
        (**self).expired()
    }
}
