//! Oracle-only checks of the risk-reduction fixture, frozen before the
//! engine is compared against it.

use trendfolio_testkit::fixtures::risk_reduction_panel;
use trendfolio_testkit::oracle::{grid, std_curve, unique_argmin, Mode};

pub const SEED: u64 = 6;
pub const ARGMIN_INDEX: usize = 37;

#[test]
fn oracle_min_variance_is_interior_and_positive() {
    let p = risk_reduction_panel(SEED);
    let alphas = grid(-2.0, 0.1, 41);
    for mode in [Mode::InSample, Mode::OutOfSample] {
        let stds = std_curve(&p.prices, &p.volumes, &alphas, mode);
        let k = unique_argmin(&stds).expect("unique minimum");
        assert_eq!(k, ARGMIN_INDEX, "{mode:?}");
        assert!(alphas[k] > 0.0 && k < alphas.len() - 1);
        // strictly decreasing from alpha = -1 (index 10) to the minimum
        assert!(stds[10..=k].windows(2).all(|w| w[1] < w[0]));
        assert!(stds[k..].windows(2).all(|w| w[1] > w[0]));
    }
}
