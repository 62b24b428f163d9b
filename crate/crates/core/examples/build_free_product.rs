//! The builder on Z/2 * Z/3 with a hand-written demand file, including an
//! explicit faithfulness demand.
//!
//!     cargo run --release --example build_free_product

use bass_serre_ht::base_groups::zmod_free_product;
use bass_serre_ht::ht_builder::{parse_demands, run_rounds, AmalgamEngine, Engine, RoundsConfig};

const DEMANDS: &str = "\
# Z/2 * Z/3, points (orbit, element of Z/2)
map (0,0) -> (1,1)
map (0,1) (2,0) -> (1,0) (2,1)
moves \"1:1 2:1\"
map (0,0) (1,1) (2,1) -> (2,0) (0,1) (1,0)
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let data = zmod_free_product(2, 3)?;
    let demands = parse_demands::<AmalgamEngine>(&data, DEMANDS)?;
    let cfg = RoundsConfig { rounds: demands.len(), faithful: 6, ..RoundsConfig::default() };
    let outcome = run_rounds::<AmalgamEngine>(&data, &demands, &cfg)?;
    print!("{}", outcome.transcript_text());
    print!("{}", outcome.certificates_text());
    let (o, e) = AmalgamEngine::core_size(&outcome.state.core);
    println!("discharged {}/{} demands; core {o} orbits, {e} entries", outcome.state.discharged, demands.len());
    Ok(())
}
