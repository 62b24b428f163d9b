//! BS(2,3) acting on its Bass-Serre tree through the free globalization of a
//! one-orbit pre-action: a raw word and its normal form move a point to the
//! same place, and the nontrivial elements move the base point.
//!
//!     cargo run --example translation_action

use bass_serre_ht::base_groups::make_bs_presentation;
use bass_serre_ht::hnn_words::{enumerate_nontrivial, reduce, HnnWord};
use bass_serre_ht::preaction_hnn::{GPoint, PreActionHnn};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = make_bs_presentation(2, 3)?;
    let empty = PreActionHnn::empty(data.clone(), 1);
    let gl = empty.globalization();
    let x = GPoint::core(0, data.identity());

    for text in ["t h1 T h2", "h3 T h1 t t", "T h3 t h1"] {
        let w = HnnWord::parse(text, &data)?;
        let g = reduce(&w, &data);
        let (raw, nf) = (gl.eval_word(&x, &w), gl.eval(&x, &g));
        assert_eq!(raw, nf);
        println!("{x} . {text:<12} = {raw}   (normal form {g})");
    }

    // free action: only the identity fixes the base point
    let moved = enumerate_nontrivial(&data, 200).iter().filter(|g| gl.eval(&x, g) != x).count();
    println!("{moved}/200 nontrivial elements move {x}");

    // the truncated translation pre-action agrees inside its ball
    let ball = PreActionHnn::translation_truncation(data.clone(), 2);
    println!("radius-2 truncation: {} orbits, {} entries, global: {}", ball.orbits().len(), ball.len(), ball.is_global());
    Ok(())
}
