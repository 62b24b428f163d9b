//! Normal forms in BS(2,3) and Z/2 * Z/3: reduction, products, inverses and
//! the enumeration order used by the builder.
//!
//!     cargo run --example normal_forms

use bass_serre_ht::amalgam_words::{self, reduce_amalgam, AmalgamWord};
use bass_serre_ht::base_groups::{make_bs_presentation, zmod_free_product};
use bass_serre_ht::hnn_words::{self, reduce, reduce_with, HnnWord, PinchOrder};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bs = make_bs_presentation(2, 3)?;
    println!("{}", bs.config());
    for text in ["T h3 t", "t T", "h1 t h2 T", "t h4 T h1", "T h2 t T h3 t"] {
        let w = HnnWord::parse(text, &bs)?;
        let left = reduce_with(&w, &bs, PinchOrder::LeftmostFirst);
        let right = reduce_with(&w, &bs, PinchOrder::RightmostFirst);
        assert_eq!(left, right);
        println!("  {text:<16} -> {}", reduce(&w, &bs));
    }

    let a = reduce(&HnnWord::parse("h1 t", &bs)?, &bs);
    let b = reduce(&HnnWord::parse("T h5", &bs)?, &bs);
    println!("  ({a}) * ({b}) = {}", hnn_words::multiply(&a, &b, &bs)?);
    println!("  ({a})^-1 = {}", hnn_words::invert(&a, &bs)?);

    let first: Vec<String> = hnn_words::enumerate_nontrivial(&bs, 12).iter().map(|g| g.to_string()).collect();
    println!("  first nontrivial elements: {}", first.join(", "));

    let fp = zmod_free_product(2, 3)?;
    println!("{}", fp.config());
    for text in ["1:1 1:1", "1:1 2:1 2:2 1:1", "2:1 2:1 2:1", "1:1 2:1 1:1 2:2"] {
        let w = AmalgamWord::parse(text, &fp)?;
        println!("  {text:<16} -> {}", reduce_amalgam(&w, &fp));
    }
    let first: Vec<String> = amalgam_words::enumerate_nontrivial(&fp, 12).iter().map(|g| g.to_string()).collect();
    println!("  first nontrivial elements: {}", first.join(", "));
    Ok(())
}
