//! Generate an R-MAT graph, look at its degree skew, and save it as an edge list.
//!
//! ```text
//! cargo run --release --example generate_graph -- 12 graph.txt
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter};

use randaccess::graph::{generate, read_edge_list, validate_csr, write_edge_list, GenConfig};

fn main() -> randaccess::Result<()> {
    let mut args = std::env::args().skip(1);
    let scale: u32 = args.next().map_or(10, |a| a.parse().expect("scale"));
    let path = args.next();

    let cfg = GenConfig::new(scale).seed(7);
    let g = generate(&cfg)?;
    validate_csr(&g).expect("generator output is valid CSR");

    let mut degrees: Vec<usize> = (0..g.num_vertices() as u32)
        .map(|v| g.out_degree(v))
        .collect();
    degrees.sort_unstable_by(|a, b| b.cmp(a));
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    println!("|V| = {}, |E| = {}", g.num_vertices(), g.num_edges());
    println!("top out-degrees: {:?}", &degrees[..8.min(degrees.len())]);
    println!(
        "mean out-degree {:.1}, vertices with none: {isolated}",
        g.num_edges() as f64 / g.num_vertices() as f64
    );

    let self_loops = g.edges().filter(|(u, v, _)| u == v).count();
    println!("self-loops kept: {self_loops}");

    if let Some(path) = path {
        write_edge_list(&g, BufWriter::new(File::create(&path)?))?;
        let back = read_edge_list(BufReader::new(File::open(&path)?))?;
        assert_eq!(back, g);
        println!("wrote and re-read {path}");
    }
    Ok(())
}
