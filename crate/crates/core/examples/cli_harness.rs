//! Running the command harness in-process.

fn main() {
    let code = liebn::harness::run(["liebn", "verify", "--suite", "rotation", "--format", "csv"]);
    println!("exit code {code}");
}
