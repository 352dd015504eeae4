//! Binary and CSV trace formats, and the text scenario config.

use csi_vitals::channel_model::{synthesize_trace, SimScenario};
use csi_vitals::trace_io::{
    decode_trace, encode_trace, export_csv, import_csv, parse_scenario, scenario_to_config,
};

fn main() -> csi_vitals::Result<()> {
    let scenario =
        parse_scenario("# short demo\nduration=2\nn_subcarriers=3\nbreathing.freq=0.25\nseed=1\n")?;
    let (trace, _) = synthesize_trace(&scenario)?;

    let mut bytes = Vec::new();
    encode_trace(&trace, &mut bytes)?;
    println!(
        "binary: {} bytes, round trip equal: {}",
        bytes.len(),
        decode_trace(&bytes[..])? == trace
    );

    let csv = export_csv(&trace);
    println!("csv: {} lines, first rows:", csv.lines().count());
    for line in csv.lines().take(3) {
        println!("  {line}");
    }
    println!("csv round trip equal: {}", import_csv(&csv, None)? == trace);

    let text = scenario_to_config(&scenario);
    println!(
        "config round trip equal: {}",
        parse_scenario(&text)? == scenario
    );
    assert_ne!(scenario, SimScenario::default());
    Ok(())
}
