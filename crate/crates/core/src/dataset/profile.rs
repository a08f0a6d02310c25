use super::{CompilationProfile, Compiler, OptLevel};
use crate::emu::{fnv1a64, prf};

const PROFILE_DOMAIN: u64 = 0x5052_4f46_0000_0000;
const STRIP_DOMAIN: u64 = 0x5354_5250_0000_0000;

/// Uniform draw from `0..n` by multiply-high.
fn below(x: u64, n: u64) -> u64 {
    ((x as u128 * n as u128) >> 64) as u64
}

/// Deterministic pseudo-random compiler, optimization level and stripped bit
/// for a record, uniform over the 6 × 5 grid.
pub fn assign_profile(seed: u64, record_id: &str) -> CompilationProfile {
    let h = fnv1a64(record_id.as_bytes());
    let cell = below(prf(seed, PROFILE_DOMAIN ^ h), 30) as usize;
    CompilationProfile {
        compiler: Compiler::ALL[cell / OptLevel::ALL.len()],
        opt_level: OptLevel::ALL[cell % OptLevel::ALL.len()],
        stripped: prf(seed, STRIP_DOMAIN ^ h) >> 63 == 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        assert_eq!(assign_profile(3, "abc"), assign_profile(3, "abc"));
        let p = assign_profile(3, "abc");
        assert_eq!(Compiler::ALL[p.grid_cell() / 5], p.compiler);
    }

    #[test]
    fn covers_grid() {
        let cells: std::collections::BTreeSet<usize> = (0..2000)
            .map(|i| assign_profile(0, &i.to_string()).grid_cell())
            .collect();
        assert_eq!(cells.len(), 30);
    }
}
