//! Run the builder on BS(2,3) with a seeded demand schedule, then re-verify
//! every certificate from the serialized pre-action.
//!
//!     cargo run --release --example build_bs23 -- [rounds] [seed]

use bass_serre_ht::base_groups::{make_bs_presentation, Presentation};
use bass_serre_ht::cli::{generate_demands, GenConfig};
use bass_serre_ht::ht_builder::{parse_demands, run_rounds, verify_certificates_text, Engine, HnnEngine, RoundsConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rounds: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(0);

    let data = make_bs_presentation(2, 3)?;
    let text = generate_demands(&Presentation::Hnn(data.clone()), &GenConfig { count: rounds, seed, ..GenConfig::default() })?;
    print!("{text}");
    let demands = parse_demands::<HnnEngine>(&data, &text)?;

    let outcome = run_rounds::<HnnEngine>(&data, &demands, &RoundsConfig { rounds, ..RoundsConfig::default() })?;
    print!("{}", outcome.transcript_text());
    if let Some(e) = &outcome.error {
        return Err(e.to_string().into());
    }

    let (orbits, entries) = HnnEngine::core_size(&outcome.state.core);
    println!("final core: {orbits} orbits, {entries} entries, frozen points: {}", outcome.state.frozen.len());

    // round trip through the file formats
    let core = HnnEngine::parse_core(&HnnEngine::serialize(&outcome.state.core))?;
    let results = verify_certificates_text::<HnnEngine>(&core, &outcome.certificates_text())?;
    let ok = results.iter().filter(|r| r.1).count();
    println!("{ok}/{} certificates verify after reload", results.len());
    Ok(())
}
