//! Free globalization of a random finite pre-action of BS(2,3): the core is
//! kept, every frontier edge opens onto a tree, and the lazily built copies
//! can be promoted back into a finite pre-action.
//!
//!     cargo run --example globalize -- [seed]

use bass_serre_ht::base_groups::make_bs_presentation;
use bass_serre_ht::hnn_words::enumerate_nontrivial;
use bass_serre_ht::preaction_hnn::{sample_transitive, GPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(3);
    let data = make_bs_presentation(2, 3)?;
    let core = sample_transitive(&data, 4, 2, &mut ChaCha8Rng::seed_from_u64(seed));
    println!("{}", core.serialize());

    let gl = core.globalization();
    let cw = gl.core_window();
    let frontier: Vec<_> = (0..cw.graph.edge_count()).filter(|&e| gl.is_frontier(cw.edge(e))).collect();
    let treeing = frontier.iter().filter(|&&e| cw.graph.is_treeing_edge(e).unwrap_or(false)).count();
    println!("frontier edges: {}, treeing in the core window: {treeing}", frontier.len());

    let x = GPoint::core(0, data.identity());
    for g in enumerate_nontrivial(&data, 6) {
        println!("{x} . {g} = {}", gl.eval(&x, &g));
    }

    let w = gl.window(std::slice::from_ref(&x.orbit), 2);
    let (promoted, _) = core.promote(&w.vertices);
    println!("promoted radius-2 window: {} orbits, {} entries (core had {})", promoted.orbits().len(), promoted.len(), core.len());
    Ok(())
}
