//! Randomized invariants.

use moufang::loopcore::{associator, commutator, is_moufang, translate, Loop, LoopTable, Scan, Translation};
use moufang::products::GdLoop;
use moufang::{Exec, Ring};
use proptest::prelude::*;

fn gd3() -> LoopTable {
    GdLoop::gl2(&Ring::field(3).unwrap(), false).unwrap().materialize(432, Exec::Auto).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequential_and_parallel_scans_agree(seed in any::<u64>(), n in 5usize..9) {
        // Cyclic groups with one row transposed are Latin but not Moufang.
        let c = LoopTable::cyclic(n);
        let rows: Vec<Vec<usize>> = (0..n)
            .map(|x| (0..n).map(|y| match (x, y) { (0, _) | (_, 0) => c.mul(x, y), _ => {
                let v = c.mul(x, y);
                if v == 1 { 2 } else if v == 2 { 1 } else { v }
            } }).collect())
            .collect();
        if let Ok(t) = LoopTable::from_rows(&rows) {
            let s = Scan { seed, budget: 500, ..Scan::default() };
            prop_assert_eq!(is_moufang(&t, s.with_exec(Exec::Sequential)), is_moufang(&t, s.with_exec(Exec::Parallel)));
        }
    }

    #[test]
    fn inner_maps_fix_identity(x in 0usize..432, y in 0usize..432) {
        let t = gd3();
        for kind in [Translation::T, Translation::Lxy, Translation::Rxy, Translation::Dxy] {
            prop_assert_eq!(translate(&t, kind, &x, Some(&y), &0).unwrap(), 0);
        }
    }

    #[test]
    fn diassociativity(x in 0usize..432, y in 0usize..432) {
        let t = gd3();
        let words = [x, y, t.mul(x, y), t.inv(x), commutator(&t, &x, &y)];
        for a in words {
            for b in words {
                for c in words {
                    prop_assert_eq!(associator(&t, &a, &b, &c), t.identity());
                }
            }
        }
    }
}
