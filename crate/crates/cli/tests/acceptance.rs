use std::process::ExitCode;

use nhtopo_cli::acceptance;

fn main() -> ExitCode {
    let only: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, ..) in acceptance::CRITERIA {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let outcome = acceptance::run(id).expect("known criterion");
        println!("{outcome}");
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
