#[path = "support/fe_oracles.rs"]
mod fe_oracles;

use fe_oracles::{elasticity_patch_error, manufactured_l2_error};
use geneo::fem::ElementType;

#[test]
fn patch_test_hex8() {
    let e = elasticity_patch_error(ElementType::Hex8);
    assert!(e <= 1e-9, "{e:e}");
}

#[test]
fn patch_test_serendipity20() {
    let e = elasticity_patch_error(ElementType::Serendipity20);
    assert!(e <= 1e-9, "{e:e}");
}

#[test]
fn hex8_l2_error_converges_at_second_order() {
    let e: Vec<f64> = [4, 8, 16]
        .iter()
        .map(|&n| manufactured_l2_error(n, ElementType::Hex8))
        .collect();
    for w in e.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.6..=4.4).contains(&ratio), "errors {e:?}");
    }
}

#[test]
fn serendipity_beats_hex8_on_the_same_mesh() {
    let h8 = manufactured_l2_error(4, ElementType::Hex8);
    let s20 = manufactured_l2_error(4, ElementType::Serendipity20);
    assert!(s20 < 0.25 * h8, "{s20:e} vs {h8:e}");
}
