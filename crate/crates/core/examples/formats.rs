//! Write and read back the two instance formats.
//!
//!     cargo run --example formats

use lll_discrepancy::formats::{emit, parse_str, Format, Instance};
use lll_discrepancy::generate::{gen_hypergraph, gen_matrix};

fn main() -> Result<(), lll_discrepancy::Error> {
    let m = Instance::Matrix(gen_matrix(3, 4, 4.0, 2.0, 0.5, 0)?);
    let text = emit(&m);
    print!("{text}");
    assert_eq!(emit(&parse_str(&text, Format::MatrixMarket)?), text);

    let h = Instance::Hypergraph(gen_hypergraph(9, 3, 2, 0)?);
    let text = emit(&h);
    print!("\n{text}");
    assert_eq!(emit(&parse_str(&text, Format::EdgeList)?), text);

    // errors carry a line and column
    let bad = "%%MatrixMarket matrix coordinate real general\n%%disc R=4 Delta=2\n1 1 1\n1 1 2.5\n";
    match parse_str(bad, Format::MatrixMarket) {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
