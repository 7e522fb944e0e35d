//! Fixtures shared by the criterion benchmarks.

use lmsb::gkz::{frobenius_basis, FrobeniusBasis};
use lmsb::registry::{builtin, ModelData};

/// A built-in model together with its period basis at `order`.
pub fn fixture(name: &str, order: u32) -> (ModelData, FrobeniusBasis) {
    let m = builtin(name).expect("built-in model");
    let fb = frobenius_basis(&m, order).expect("period basis");
    (m, fb)
}

#[cfg(test)]
mod tests {
    #[test]
    fn fixtures_build() {
        let (m, fb) = super::fixture("f1", 3);
        assert_eq!(fb.nvars(), m.nmoduli());
    }
}
