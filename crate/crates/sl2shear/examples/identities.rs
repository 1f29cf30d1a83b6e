//! The numeric identity suite.
//!
//! Every product identity used by the comparison arguments, checked as 2x2
//! matrices and in the simply connected cover (where central corrections by
//! pi U appear).
//!
//! ```bash
//! cargo run --example identities
//! ```

use sl2shear::oracle::identity_suite;

fn main() {
    let report = identity_suite(7, 64);
    println!("{report}");
    std::process::exit(if report.all_pass() { 0 } else { 1 });
}
