//! Treeing edges of a small graph: an edge is treeing when the half-graph
//! beyond it is a tree. Extending a path until its last edge is treeing is
//! the basic move of the builder.
//!
//!     cargo run --example treeing_edges

use bass_serre_ht::graphs::{Graph, Path};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // a triangle 0-1-2 with a tail 2-3-4 and a leaf 1-5
    let mut g = Graph::new();
    let v: Vec<_> = (0..6).map(|i| g.add_vertex(format!("v{i}"))).collect();
    let mut positive = Vec::new();
    for (s, r) in [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (1, 5)] {
        positive.push(g.add_edge(v[s], v[r])?);
    }
    for &e in &positive {
        for e in [e, Graph::antipode(e)] {
            println!(
                "{} -> {}: treeing {}",
                g.label(g.source(e)),
                g.label(g.range(e)),
                g.is_treeing_edge(e)?
            );
        }
    }

    // start on the triangle and walk out to a treeing edge
    let start = Path::new(vec![positive[0]]);
    let ext = g.extend_to_treeing(&start)?;
    let names: Vec<String> = ext.edges.iter().map(|&e| format!("{}->{}", g.label(g.source(e)), g.label(g.range(e)))).collect();
    println!("extend_to_treeing: {}", names.join(" "));
    print!("{}", g.to_dot("example"));
    Ok(())
}
