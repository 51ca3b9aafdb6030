//! Regenerates the shipped test corpus:
//!
//! ```text
//! cargo run -p pdp-core --example gen_corpus -- crates/core/tests/data/corpus
//! ```
//!
//! Grids from 2x2 to 5x5 and random plane graphs with 6 to 14 vertices, each
//! with 1 to 3 pairs. Everything is derived from fixed seeds.

use std::fs;
use std::path::PathBuf;

use pdp_core::instance::{gen_grid, gen_random_planar, serialize_instance};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/tests/data/corpus".into()),
    );
    fs::create_dir_all(&dir)?;
    let mut written = 0;

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for rows in 2..=5 {
        for cols in rows..=5 {
            for k in 1..=3 {
                if 2 * k > rows * cols {
                    continue;
                }
                for rep in 0..3 {
                    let mut cells: Vec<(usize, usize)> = (1..=rows)
                        .flat_map(|r| (1..=cols).map(move |c| (r, c)))
                        .collect();
                    cells.shuffle(&mut rng);
                    let pairs: Vec<_> = cells[..2 * k].chunks(2).map(|c| (c[0], c[1])).collect();
                    let inst = gen_grid(rows, cols, &pairs)?;
                    fs::write(
                        dir.join(format!("grid_{rows}x{cols}_k{k}_{rep}.pdp")),
                        serialize_instance(&inst),
                    )?;
                    written += 1;
                }
            }
        }
    }

    for n in 6..=14 {
        for k in 1..=3 {
            if n < 2 * k + 2 {
                continue;
            }
            for rep in 0..5u64 {
                let seed = 1000 * n as u64 + 100 * k as u64 + rep;
                let inst = gen_random_planar(n, k, seed)?;
                fs::write(
                    dir.join(format!("random_n{n:02}_k{k}_{rep}.pdp")),
                    serialize_instance(&inst),
                )?;
                written += 1;
            }
        }
    }
    println!("wrote {written} instances to {}", dir.display());
    Ok(())
}
