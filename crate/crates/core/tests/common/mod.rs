#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use revcheck::{
    build_support, generate_reversible, is_irreducible, spanning_tree, GeneratorConfig,
    SquareMatrix, TransitionMatrix,
};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rows(r: &[&[f64]]) -> TransitionMatrix {
    TransitionMatrix::from_rows(r.iter().map(|row| row.to_vec()).collect()).unwrap()
}

pub fn example_p() -> TransitionMatrix {
    rows(&[
        &[0.425, 0.0, 0.075, 0.5],
        &[0.0, 0.55, 0.25, 0.2],
        &[0.3, 0.25, 0.45, 0.0],
        &[0.5, 0.05, 0.0, 0.45],
    ])
}

/// P^(3) with the (4,2) entry the column operation actually produces.
pub fn example_p3() -> TransitionMatrix {
    rows(&[
        &[0.425, 0.0, 0.075, 0.5],
        &[0.0, 0.55, 0.25, 0.2],
        &[0.075, 0.25, 0.675, 0.0],
        &[0.5, 0.2, 0.0, 0.3],
    ])
}

pub fn biased_cycle() -> TransitionMatrix {
    rows(&[&[0.0, 0.7, 0.3], &[0.3, 0.0, 0.7], &[0.7, 0.3, 0.0]])
}

fn normalize(mut m: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    for row in &mut m {
        let s: f64 = row.iter().sum();
        for x in row.iter_mut() {
            *x /= s;
        }
        // put the rounding residue on the largest entry
        let s: f64 = row.iter().sum();
        let k = (0..row.len())
            .max_by(|&a, &b| row[a].total_cmp(&row[b]))
            .unwrap();
        row[k] += 1.0 - s;
    }
    m
}

/// Random irreducible chain with each off-diagonal entry present with
/// probability `density`; zeros are generally not symmetric.
pub fn random_irreducible(n: usize, density: f64, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    loop {
        let m: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if i == j {
                            if rng.gen_bool(0.5) {
                                rng.gen_range(0.05..1.0)
                            } else {
                                0.0
                            }
                        } else if rng.gen_bool(density) {
                            rng.gen_range(0.05..1.0)
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        if m.iter().any(|r| r.iter().all(|&x| x == 0.0)) {
            continue;
        }
        let p = TransitionMatrix::from_rows(normalize(m)).unwrap();
        if is_irreducible(&p) {
            return p;
        }
    }
}

/// Random symmetric zero pairs that leave the mutual graph connected.
pub fn random_zero_pairs(n: usize, rng: &mut ChaCha8Rng) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.3) {
                pairs.push((i, j));
            }
        }
    }
    // drop pairs until the remaining support is connected
    while !pairs.is_empty() {
        let uniform = TransitionMatrix::uniform(n).unwrap();
        let mut m = uniform.to_rows();
        for &(i, j) in &pairs {
            m[i][j] = 0.0;
            m[j][i] = 0.0;
        }
        let p = TransitionMatrix::from_rows(normalize(m)).unwrap();
        if spanning_tree(&build_support(&p), 0).is_ok() {
            break;
        }
        let k = rng.gen_range(0..pairs.len());
        pairs.swap_remove(k);
    }
    pairs
}

pub fn random_reversible(n: usize, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let zero_pairs = if rng.gen_bool(0.5) {
        random_zero_pairs(n, rng)
    } else {
        Vec::new()
    };
    generate_reversible(&GeneratorConfig {
        n,
        ops_count: rng.gen_range(0..=20),
        seed: rng.gen(),
        zero_pairs,
    })
    .unwrap()
    .matrix
}

/// Rescale one positive off-diagonal entry by a factor well away from 1,
/// compensating on the diagonal.
pub fn perturb(p: &TransitionMatrix, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let n = p.n();
    let mut m = p.to_rows();
    let candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && m[i][j] > 0.0)
        .collect();
    let (i, j) = candidates[rng.gen_range(0..candidates.len())];
    let (old, room) = (m[i][j], m[i][i]);
    let factor = if room >= 0.3 * old && rng.gen_bool(0.5) {
        rng.gen_range(1.3..=(1.0 + room / old).min(2.0))
    } else {
        rng.gen_range(0.3..0.7)
    };
    let new = old * factor;
    m[i][i] = (room - (new - old)).max(0.0);
    m[i][j] = new;
    TransitionMatrix::from_rows(normalize(m)).unwrap()
}

/// Zero one direction of a mutual pair, keeping the chain irreducible.
/// Returns `None` if no such pair exists.
pub fn break_zero_symmetry(p: &TransitionMatrix, rng: &mut ChaCha8Rng) -> Option<TransitionMatrix> {
    let n = p.n();
    let mut candidates: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| i != j && p.get(i, j) > 0.0 && p.get(j, i) > 0.0)
        .collect();
    while !candidates.is_empty() {
        let (i, j) = candidates.swap_remove(rng.gen_range(0..candidates.len()));
        let mut m = p.to_rows();
        m[i][i] += m[i][j];
        m[i][j] = 0.0;
        let q = TransitionMatrix::from_rows(m).unwrap();
        if is_irreducible(&q) {
            return Some(q);
        }
    }
    None
}

/// Random symmetric stochastic matrix, with some symmetric zeros, irreducible.
pub fn random_symmetric(n: usize, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    loop {
        let mut m = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                if rng.gen_bool(0.7) {
                    let x = rng.gen_range(0.05..1.0);
                    m[i][j] = x;
                    m[j][i] = x;
                }
            }
        }
        let max_row = m
            .iter()
            .map(|r| r.iter().sum::<f64>())
            .fold(0.0, f64::max)
            .max(1e-3);
        let scale = 1.0 / (max_row * rng.gen_range(1.0..1.5));
        for i in 0..n {
            for j in 0..n {
                m[i][j] *= scale;
            }
            let off: f64 = m[i].iter().sum();
            m[i][i] = (1.0 - off).max(0.0);
        }
        let p = TransitionMatrix::from_rows(m).unwrap();
        if is_irreducible(&p) {
            return p;
        }
    }
}

/// Random matrix where column `col` is positive in every off-diagonal entry.
pub fn random_with_full_column(n: usize, rng: &mut ChaCha8Rng) -> TransitionMatrix {
    let col = rng.gen_range(0..n);
    loop {
        let p = if rng.gen_bool(0.5) {
            // reversible: generator without zeros in `col`
            let zeros: Vec<_> = random_zero_pairs(n, rng)
                .into_iter()
                .filter(|&(i, j)| i != col && j != col)
                .collect();
            generate_reversible(&GeneratorConfig {
                n,
                ops_count: rng.gen_range(0..=15),
                seed: rng.gen(),
                zero_pairs: zeros,
            })
            .unwrap()
            .matrix
        } else {
            let mut m = random_irreducible(n, 0.5, rng).to_rows();
            for (i, row) in m.iter_mut().enumerate() {
                if i != col && row[col] == 0.0 {
                    row[col] = rng.gen_range(0.05..0.5);
                }
            }
            TransitionMatrix::from_rows(normalize(m)).unwrap()
        };
        if revcheck::kelly_column(&p).is_some() && is_irreducible(&p) {
            return p;
        }
    }
}
