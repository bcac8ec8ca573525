use std::collections::BTreeSet;

use num_bigint::BigUint;
use rand::RngCore;

use super::{GridSpec, HyperparameterSetting, SearchError, SettingId};
use crate::seed::{derive_seed, rng_from_seed};

/// Uniform integer in `[0, bound)` by rejection on the bit length of
/// `bound`. `bound` must be positive.
pub fn uniform_below<R: RngCore + ?Sized>(bound: &BigUint, rng: &mut R) -> BigUint {
    assert!(bound.bits() > 0, "bound must be positive");
    let bits = bound.bits();
    let len = bits.div_ceil(8) as usize;
    let spare = (len as u64 * 8 - bits) as u32;
    let mut buf = vec![0u8; len];
    loop {
        rng.fill_bytes(&mut buf);
        buf[len - 1] &= 0xffu8 >> spare;
        let candidate = BigUint::from_bytes_le(&buf);
        if &candidate < bound {
            return candidate;
        }
    }
}

/// `n` distinct settings drawn uniformly without replacement, in draw
/// order.
pub fn sample_rgs(grid: &GridSpec, n: usize, seed: u64) -> Result<Vec<HyperparameterSetting>, SearchError> {
    let pool = grid.pool_size();
    if BigUint::from(n) > pool {
        return Err(SearchError::NTooLarge { n, pool });
    }
    let mut rng = rng_from_seed(derive_seed(seed, &["rgs".into()]));
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let id = uniform_below(&pool, &mut rng);
        if seen.insert(id.clone()) {
            let id = SettingId(id);
            let hp = grid.unrank(&id)?;
            out.push(HyperparameterSetting { id, hp });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{base_hyperparameters, table1_grid};

    fn pool_of(k: usize) -> GridSpec {
        let mut g = GridSpec::single(&base_hyperparameters());
        g.epochs = (1..=k as u32).map(|e| e * 10).collect();
        g
    }

    #[test]
    fn full_draw_is_a_permutation() {
        let g = pool_of(10);
        let mut ids: Vec<_> = sample_rgs(&g, 10, 3).unwrap().into_iter().map(|s| s.id).collect();
        ids.sort();
        assert_eq!(ids, (0..10u64).map(SettingId::from).collect::<Vec<_>>());
        assert!(matches!(sample_rgs(&g, 11, 3), Err(SearchError::NTooLarge { .. })));
    }

    #[test]
    fn seeds_control_the_draw() {
        let g = pool_of(10);
        let ids = |seed| sample_rgs(&g, 5, seed).unwrap().into_iter().map(|s| s.id).collect::<Vec<_>>();
        assert_eq!(ids(1), ids(1));
        assert_ne!(ids(1), ids(2));
    }

    #[test]
    fn large_pools_stay_in_range() {
        let g = table1_grid();
        let pool = g.pool_size();
        for s in sample_rgs(&g, 200, 9).unwrap() {
            assert!(s.id.0 < pool);
            assert_eq!(g.rank(&s.hp).unwrap(), s.id);
        }
    }
}
