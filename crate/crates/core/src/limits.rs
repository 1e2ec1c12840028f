//! Resource bounds for reduction and class enumeration.

/// Bounds shared by every bounded operation. Equivalence classes larger
/// than `max_class_size` are reported as truncated; reduction sequences
/// longer than `fuel` raise a fuel-exhausted error.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_class_size: usize,
    pub fuel: u64,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            max_class_size: 10_000,
            fuel: 100_000,
        }
    }
}

impl Limits {
    pub fn with_class_size(mut self, n: usize) -> Limits {
        self.max_class_size = n;
        self
    }

    pub fn with_fuel(mut self, n: u64) -> Limits {
        self.fuel = n;
        self
    }
}
