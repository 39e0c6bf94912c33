//! Semiclassical de Finetti error rate: for a pure condensate over D = 2
//! modes the trace distance between the normalized one-body matrix and the
//! lower-symbol reconstruction equals 2(D-1)/(N+D), a clean 1/N law.
//!
//! Run with `cargo run --release --example definetti_sweep`.

use bosegas::harness::experiments::run_definetti_sweep;
use bosegas::harness::{linear_fit, standalone_provenance, DefinettiFamily};

fn main() {
    let provenance = standalone_provenance("definetti_example", 42);
    let outcome = run_definetti_sweep(
        2,
        1,
        &[10, 25, 50, 100, 200],
        60_000,
        &DefinettiFamily::Condensate,
        42,
        "condensate_rate",
        &provenance,
    );
    print!("{}", outcome.table.to_csv());
    println!("{}", outcome.summary);
    let ns = outcome.table.numeric_column("n");
    let ds = outcome.table.numeric_column("distance");
    let pts: Vec<(f64, f64)> = ns.iter().zip(ds.iter()).map(|(&n, &d)| (n.ln(), d.ln())).collect();
    let (slope, _) = linear_fit(&pts);
    println!("measured slope {slope:.3} (the semiclassical rate is -1)");
}
