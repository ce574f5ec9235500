//! Writing a gate to the JSON matrix format and reading it back.

use spinpow::geometry::ep_geometric;
use spinpow::haar::haar_unitary;
use spinpow::io::{parse_gate, read_gate, write_gate};

fn main() -> spinpow::Result<()> {
    let u = haar_unitary(4, 5)?;
    let path = std::env::temp_dir().join("spinpow_gate.json");
    write_gate(&path, &u)?;
    let back = read_gate(&path)?;
    println!("round trip exact: {}", back.matrix() == u.matrix());
    println!("e_p before {:.15}, after {:.15}", ep_geometric(&u, 1)?, ep_geometric(&back, 1)?);

    let broken = r#"{"j": "1/2", "matrix": [[[1, 0], [0, 0]], [[0, 0], [0.5, 0]]]}"#;
    println!("non-unitary input: {}", parse_gate(broken).unwrap_err());
    let malformed = r#"{"j": "1/2", "matrix": [[[1, 0], [0, 0]], [[0, 0], "one"]]}"#;
    println!("malformed input: {}", parse_gate(malformed).unwrap_err());
    Ok(())
}
