//! Drive the command-line harness from code: a small GUPS sweep written to
//! CSV, then read back.
//!
//! ```text
//! cargo run --release --example sweep_to_csv -- sweep.csv
//! ```

use randaccess::harness::run_cli;

fn main() {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "sweep.csv".into());
    let code = run_cli([
        "randbench",
        "sweep",
        "--benchmark",
        "gups",
        "--n",
        "18",
        "--workers",
        "1,2",
        "--batch",
        "1,8,64",
        "--reps",
        "2",
        "--verify",
        "--out",
        &path,
    ]);
    assert_eq!(code, 0, "sweep failed");

    let mut reader = csv::Reader::from_path(&path).expect("report exists");
    let headers = reader.headers().expect("header line").clone();
    let col = |name: &str| headers.iter().position(|h| h == name).expect("column");
    let (workers, batch, gups) = (col("workers"), col("batch"), col("gups"));
    for row in reader.records() {
        let row = row.expect("row");
        println!(
            "workers {:>2} batch {:>2}: {} GUPS",
            &row[workers], &row[batch], &row[gups]
        );
    }
}
