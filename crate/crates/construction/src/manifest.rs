//! JSON-lines manifest of the assembled blocks.

use crate::assemble::BlockRecord;
use std::io::{self, Write};

/// Writes one JSON object per block, one per line.
pub fn write_manifest<W: Write>(blocks: &[BlockRecord], mut out: W) -> io::Result<()> {
    for b in blocks {
        serde_json::to_writer(&mut out, b)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// The manifest as a string.
pub fn manifest_string(blocks: &[BlockRecord]) -> String {
    let mut buf = Vec::new();
    write_manifest(blocks, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assemble::{zero_branching, BranchingConfig};
    use branchlab_core::{GridSpec, LateralBc};

    #[test]
    fn one_line_per_block_with_scales_and_averages() {
        let g = GridSpec::new(2, 16, 16, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let b = zero_branching(
            &g,
            &BranchingConfig {
                n_blocks: 1,
                levels: 1,
            },
        )
        .unwrap();
        let text = manifest_string(&b.blocks);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2 * 16);
        let v: serde_json::Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(v["level"], 1);
        assert_eq!(v["orientation"], "RefineDown");
        assert_eq!(v["sigma_h"], 0.5);
        assert_eq!(v["index"][0], -2);
        assert_eq!(v["fine_avgs"].as_array().unwrap().len(), 4);
        assert_eq!(v["coarse_avg"], 0.0);
    }
}
