//! The GUPS value stream: step it, jump ahead, and split it across workers.
//!
//! ```text
//! cargo run --example lfsr_stream
//! ```

use randaccess::gf2_stream::Gf2Stream;
use randaccess::gups::segment_start;

fn main() {
    let mut s = Gf2Stream::new();
    let first: Vec<u64> = (0..6).map(|_| s.next()).collect();
    println!("first values: {first:#x?}");

    // seek is O(log k); stepping is O(k)
    let k = 1_000_003;
    let mut walked = Gf2Stream::new();
    walked.advance(k);
    assert_eq!(Gf2Stream::seek(k), walked);
    println!("value {k}: {:#018x}", Gf2Stream::seek(k).state());

    let total = 4u64 << 20;
    for w in 0..4 {
        let start = segment_start(total, 4, w);
        let mut seg = Gf2Stream::seek(start);
        println!(
            "worker {w}: starts at index {start:>8}, first value {:#018x}",
            seg.next()
        );
    }

    let mut buf = [0u64; 4];
    Gf2Stream::seek(10).fill(&mut buf);
    println!("values 11..=14: {buf:x?}");
}
