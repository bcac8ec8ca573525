//! Size a search space and price an exhaustive search of it.

use gridsmith::campaign::estimate_total_time;
use gridsmith::fixtures::table1_grid;
use gridsmith::searchspace::SettingId;

fn main() {
    let grid = table1_grid();
    let pool = grid.pool_size();
    println!("structures {}", grid.structure_count());
    println!("settings   {pool}");

    for rtps in [1.0, 10.0, 117.0] {
        let t = estimate_total_time(&pool, rtps);
        println!("at {rtps:>5} s/setting: {:.3e} years", t.years);
    }

    // settings are addressed by rank
    let id = SettingId(&pool / 2u32);
    let hp = grid.unrank(&id).expect("in range");
    println!("setting {id}: {hp:?}");
    assert_eq!(grid.rank(&hp), Some(id));
}
