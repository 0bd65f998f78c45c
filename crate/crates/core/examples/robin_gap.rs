//! Robin eigenvalue as a function of the boundary coefficient, with the
//! quantitative gap bound between two coefficients.

use dnstrip::transverse::{lemma_gap_bound, robin_lambda0};

fn main() -> dnstrip::Result<()> {
    let d = 1.0;
    let alphas = [-0.5, 0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];
    for w in alphas.windows(2) {
        let (a2, a1) = (w[0], w[1]);
        let l1 = robin_lambda0(d, a1)?.lambda0;
        let l2 = robin_lambda0(d, a2)?.lambda0;
        let bound = lemma_gap_bound(d, a1, a2)?;
        println!("alpha {a2:>5} -> {a1:>5}: lambda0 {l2:.9} -> {l1:.9}, bound on the lower {bound:.9}");
    }
    Ok(())
}
