//! Scan the year-1 reward surface on a 40 x 40 grid and write it as CSV.
//!
//! cargo run --example landscape -- /tmp/year1.csv

use scarce_rl::harness::{landscape_scan, write_landscape_csv};
use scarce_rl::EnvConfig;

fn main() -> scarce_rl::Result<()> {
    let config = EnvConfig::builtin("env_a").expect("builtin");
    let scan = landscape_scan(&config, 1, 40, None)?;
    let (itn, irs, max) = scan.max();
    println!("{} cells, max {max:.2} at ({itn:.3}, {irs:.3}), mean {:.2}", scan.len(), scan.mean());

    // A coarse text rendering, ITN across, IRS up.
    let coarse = landscape_scan(&config, 1, 12, None)?;
    for row in (0..12).rev() {
        let line: String = (0..12)
            .map(|col| {
                let r = coarse.cells[col * 12 + row].2;
                match r {
                    r if r > 80.0 => '#',
                    r if r > 40.0 => '+',
                    r if r > 0.0 => '.',
                    _ => ' ',
                }
            })
            .collect();
        println!("|{line}|");
    }

    if let Some(path) = std::env::args().nth(1) {
        write_landscape_csv(&scan.for_display(), std::fs::File::create(&path)?)?;
        println!("wrote {path} (rewards / 100)");
    }
    Ok(())
}
