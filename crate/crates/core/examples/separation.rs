//! The separation search: a shortest path-type element whose conjugate of
//! `sigma` is not in Sigma. It succeeds in BS(2,3) and must exhaust its cap
//! in BS(2,2), where Sigma is central.
//!
//!     cargo run --example separation

use bass_serre_ht::base_groups::make_bs_presentation;
use bass_serre_ht::ht_builder::hnn::{separates, separation_search};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bs23 = make_bs_presentation(2, 3)?;
    for s in [3, 6, -3, 9] {
        let sigma = bs23.element(s);
        let gamma = separation_search(&bs23, sigma, 12)?;
        assert!(separates(&bs23, sigma, &gamma));
        println!("BS(2,3) sigma={s}: gamma = {gamma}");
    }

    let bs22 = make_bs_presentation(2, 2)?;
    match separation_search(&bs22, bs22.element(2), 12) {
        Ok(g) => println!("BS(2,2): unexpected {g}"),
        Err(e) => println!("BS(2,2): {e}"),
    }
    Ok(())
}
