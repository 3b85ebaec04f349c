pub use galereg;

use galereg::classify::{ci_table, n5_family_lattice};
use galereg::Lattice;

/// Named lattices spanning the oracle's dispatch paths.
pub fn fixtures() -> Vec<(&'static str, Lattice)> {
    vec![
        (
            "twisted_cubic",
            Lattice::from_kernel(&[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]).unwrap(),
        ),
        (
            "non_cm_n5",
            Lattice::from_pairs(&[(1, 1), (-1, 1), (-1, 0), (-1, -1), (2, -1)]).unwrap(),
        ),
        ("n5_family", n5_family_lattice(2, 3).unwrap()),
        ("ci_table_row", ci_table().saturated.last().unwrap().clone()),
        (
            "non_saturated",
            Lattice::from_pairs(&[(1, 1), (1, -2), (-2, 1)]).unwrap(),
        ),
    ]
}
