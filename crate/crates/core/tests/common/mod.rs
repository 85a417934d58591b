#![allow(dead_code)]

use spectral_moments::{generate, GenParams, Graph, GraphKind};

pub const ER_PROBS: [f64; 3] = [0.1, 0.3, 0.5];

/// 200 seeded G(n, p) graphs with `n` in 3..=30.
pub fn er_corpus() -> Vec<(String, Graph)> {
    (0..200)
        .map(|i| {
            let n = 3 + (i * 7) % 28;
            let p = ER_PROBS[i % 3];
            let seed = 1000 + i as u64;
            (format!("er(n={n},p={p},seed={seed})"), generate(GraphKind::ErdosRenyi, n, GenParams { p, seed }).unwrap())
        })
        .collect()
}

/// The random corpus plus complete graphs, stars, paths and rings up to 200 nodes.
pub fn full_corpus() -> Vec<(String, Graph)> {
    let mut out = er_corpus();
    let sizes = [3usize, 4, 5, 6, 7, 8, 12, 20, 50, 200];
    for &n in &sizes {
        for (name, kind) in
            [("complete", GraphKind::Complete), ("star", GraphKind::Star), ("path", GraphKind::Path), ("ring", GraphKind::Ring)]
        {
            out.push((format!("{name}({n})"), generate(kind, n, GenParams::default()).unwrap()));
        }
    }
    out
}
