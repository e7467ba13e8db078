use anyhow::Result;
use serde_json::json;
use wavetrace_core::write_records;

use crate::args::ConvertArgs;
use crate::config::FileConfig;
use crate::input::load_records;
use crate::output::OutDir;

pub fn run(args: ConvertArgs, file: &FileConfig) -> Result<()> {
    let monitored = file.monitored(&args.input.monitored);
    let records = load_records(&args.input.input, &monitored)?;
    let mut out = OutDir::create(&args.out.out)?;
    let mut buf = Vec::new();
    write_records(&mut buf, &records)?;
    out.write_text("records.csv", std::str::from_utf8(&buf)?)?;
    let config = json!({
        "input": args.input.input.display().to_string(),
        "monitored": monitored,
    });
    println!(
        "convert: {} records -> {}",
        records.len(),
        args.out.out.display()
    );
    out.finish("convert", &config)
}
