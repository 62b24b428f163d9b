//! Windows of the Bass-Serre trees of BS(2,3) and Z/2 * Z/3, with their
//! degree profile and DOT output.
//!
//!     cargo run --example bass_serre_window > window.dot

use std::collections::BTreeMap;

use bass_serre_ht::base_groups::{make_bs_presentation, zmod_free_product};
use bass_serre_ht::graphs::Graph;
use bass_serre_ht::preaction_amalgam::PreActionAmalgam;
use bass_serre_ht::preaction_hnn::{GOrbit, PreActionHnn};

fn degrees(g: &Graph) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in 0..g.vertex_count() {
        *hist.entry(g.degree(v)).or_insert(0) += 1;
    }
    hist
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bs = make_bs_presentation(2, 3)?;
    let core = PreActionHnn::empty(bs, 1);
    let w = core.globalization().window(&[GOrbit::Core(0)], 3);
    eprintln!(
        "BS(2,3) radius 3: {} vertices, {} edges, tree: {}, degree histogram {:?}",
        w.graph.vertex_count(),
        w.graph.edge_count(),
        w.graph.is_tree(),
        degrees(&w.graph)
    );

    let fp = zmod_free_product(2, 3)?;
    let core = PreActionAmalgam::empty(fp, 1, 0);
    let gl = core.globalization();
    let w3 = gl.window(&gl.core_vertices(), 3);
    eprintln!(
        "Z/2*Z/3 radius 3: {} vertices, tree: {}, degree histogram {:?}",
        w3.graph.vertex_count(),
        w3.graph.is_tree(),
        degrees(&w3.graph)
    );

    print!("{}", w.to_dot("bs23"));
    Ok(())
}
