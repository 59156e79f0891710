//! Prints the reproduction report of every scenario, or of those named on
//! the command line.

use amnesia::models::{reproduce, Scenario, ScenarioParams};

fn main() {
    let names: Vec<String> = std::env::args().skip(1).collect();
    for s in Scenario::ALL {
        if !names.is_empty() && !names.iter().any(|n| n == s.name()) {
            continue;
        }
        let start = std::time::Instant::now();
        match reproduce(&ScenarioParams::new(s)) {
            Ok(r) => print!("{r}"),
            Err(e) => println!("scenario {s}: error: {e}"),
        }
        println!("  ({:.2?})", start.elapsed());
    }
}
