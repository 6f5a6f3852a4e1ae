use std::process::ExitCode;

use canoma_verify::CRITERIA;

fn main() -> ExitCode {
    let mut failures = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        let (tag, detail) = match check() {
            Ok(o) => (if o.pass { "PASS" } else { "FAIL" }, o.detail),
            Err(err) => ("FAIL", format!("error: {err}")),
        };
        if tag == "FAIL" {
            failures += 1;
        }
        println!("criterion {} [{tag}] {name}: {detail}", i + 1);
    }
    println!("acceptance: {} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
