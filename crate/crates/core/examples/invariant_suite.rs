//! Runs the invariant suite, optionally filtered by the first argument.

use dnstrip::scenario::{validate, ValidateOptions};

fn main() {
    let table = validate(&ValidateOptions {
        filter: std::env::args().nth(1),
        ..Default::default()
    });
    print!("{}", table.render());
    if !table.all_pass() {
        std::process::exit(1);
    }
}
