//! Fixtures shared by the criterion benches.

use asep_core::exact::rat;
use asep_core::AsepParams;

/// Singular set `a = 2, b = d = −1/2, c = 2^{N+1}, q = 1/2`.
pub fn singular(n: u32) -> AsepParams {
    AsepParams::from_awparams(rat(2, 1), rat(-1, 2), rat(2i64.pow(n + 1), 1), rat(-1, 2), rat(1, 2))
        .expect("valid singular set")
}

pub fn generic() -> AsepParams {
    AsepParams::from_rates(rat(1, 1), rat(1, 2), rat(1, 5), rat(1, 3), rat(1, 3)).expect("valid rates")
}
