//! Independent oracles shared by the integration tests. None of them call
//! into the library's arithmetic.
#![allow(dead_code)]

use std::collections::HashSet;
use std::path::PathBuf;

use growthlab::models::spec::{load_group_spec, LoadedSpec};
use growthlab::words::Word;
use num_bigint::BigInt;
use num_traits::ToPrimitive;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.group"))
}

pub fn fixture(name: &str) -> LoadedSpec {
    load_group_spec(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// `2·3^R − 1`: reduced words of length ≤ R in F₂.
pub fn free2_ball(r: u32) -> u64 {
    2 * 3u64.pow(r) - 1
}

/// Cumulative Heisenberg ball sizes by BFS on triples with
/// `(a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab')`, generators `(±1,0,0), (0,±1,0)`.
pub fn heisenberg_brute_force(r_max: usize) -> Vec<u64> {
    type H = (i64, i64, i64);
    let mul = |p: H, q: H| (p.0 + q.0, p.1 + q.1, p.2 + q.2 + p.0 * q.1);
    let gens: [H; 4] = [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0)];
    let mut seen: HashSet<H> = HashSet::from([(0, 0, 0)]);
    let mut frontier = vec![(0, 0, 0)];
    let mut out = vec![1u64];
    for _ in 0..r_max {
        let mut next = Vec::new();
        for &g in &frontier {
            for &s in &gens {
                let h = mul(g, s);
                if seen.insert(h) {
                    next.push(h);
                }
            }
        }
        frontier = next;
        out.push(seen.len() as u64);
    }
    out
}

/// Square integer matrices in i128, enough for the fixture oracles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IMat(pub Vec<Vec<i128>>);

impl IMat {
    pub fn identity(n: usize) -> Self {
        IMat((0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect())
    }

    /// Identity plus `sum c·E_ij` (1-based indices).
    pub fn unit_plus(n: usize, entries: &[(usize, usize, i128)]) -> Self {
        let mut m = Self::identity(n);
        for &(i, j, c) in entries {
            m.0[i - 1][j - 1] += c;
        }
        m
    }

    pub fn mul(&self, o: &IMat) -> IMat {
        let n = self.0.len();
        IMat(
            (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| self.0[i][k] * o.0[k][j]).sum())
                        .collect()
                })
                .collect(),
        )
    }

    pub fn pow(&self, mut e: u64) -> IMat {
        let mut acc = Self::identity(self.0.len());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }
}

/// A faithful matrix model keyed by generator label, with explicit inverses.
pub struct MatrixOracle {
    pub dim: usize,
    pub gens: Vec<(&'static str, IMat, IMat)>,
}

impl MatrixOracle {
    fn lookup(&self, label: &str) -> IMat {
        for (l, m, inv) in &self.gens {
            if *l == label {
                return m.clone();
            }
            if l.to_uppercase() == label {
                return inv.clone();
            }
        }
        panic!("oracle has no generator {label}")
    }

    pub fn word(&self, w: &Word) -> IMat {
        let gens = w.generating_set();
        w.resolved()
            .fold(IMat::identity(self.dim), |acc, g| acc.mul(&self.lookup(gens.label(g))))
    }

    /// `Π label_i^(e_i)` in order.
    pub fn powers(&self, labels: &[String], exps: &[BigInt]) -> IMat {
        let mut acc = IMat::identity(self.dim);
        for (l, e) in labels.iter().zip(exps) {
            let k = e.to_i64().expect("exponent fits i64");
            let base = if k < 0 { self.lookup(&l.to_uppercase()) } else { self.lookup(l) };
            acc = acc.mul(&base.pow(k.unsigned_abs()));
        }
        acc
    }
}

/// heis_by_z in 4×4 unitriangular matrices: t = I+E34, y = I+E12+E23,
/// x = [t, y] = I−E24, z = [x, y] = I+E14.
pub fn heis_by_z_oracle() -> MatrixOracle {
    MatrixOracle {
        dim: 4,
        gens: vec![
            ("t", IMat::unit_plus(4, &[(3, 4, 1)]), IMat::unit_plus(4, &[(3, 4, -1)])),
            ("y", IMat::unit_plus(4, &[(1, 2, 1), (2, 3, 1)]), IMat::unit_plus(4, &[(1, 2, -1), (2, 3, -1), (1, 3, 1)])),
            ("x", IMat::unit_plus(4, &[(2, 4, -1)]), IMat::unit_plus(4, &[(2, 4, 1)])),
            ("z", IMat::unit_plus(4, &[(1, 4, 1)]), IMat::unit_plus(4, &[(1, 4, -1)])),
        ],
    }
}

/// sol_fib as affine maps `[[A^k, n], [0, 1]]` with A = [[2,1],[1,1]].
pub fn sol_oracle() -> MatrixOracle {
    let m = |rows: [[i128; 3]; 3]| IMat(rows.iter().map(|r| r.to_vec()).collect());
    MatrixOracle {
        dim: 3,
        gens: vec![
            ("a", m([[1, 0, 1], [0, 1, 0], [0, 0, 1]]), m([[1, 0, -1], [0, 1, 0], [0, 0, 1]])),
            ("b", m([[1, 0, 0], [0, 1, 1], [0, 0, 1]]), m([[1, 0, 0], [0, 1, -1], [0, 0, 1]])),
            ("t", m([[2, 1, 0], [1, 1, 0], [0, 0, 1]]), m([[1, -1, 0], [-1, 2, 0], [0, 0, 1]])),
        ],
    }
}

/// Float eigenvalue oracle: `Some(true)` if every eigenvalue modulus is
/// within 1e-6 of 1, `Some(false)` if one lies outside `[1−1e-3, 1+1e-3]`,
/// `None` in the dead zone between.
pub fn float_unit_circle(rows: &[Vec<i64>]) -> Option<bool> {
    let n = rows.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| rows[i][j] as f64);
    let moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    if moduli.iter().all(|r| (r - 1.0).abs() <= 1e-6) {
        Some(true)
    } else if moduli.iter().any(|r| (r - 1.0).abs() > 1e-3) {
        Some(false)
    } else {
        None
    }
}

/// Integer determinant by cofactor expansion.
pub fn det(rows: &[Vec<i64>]) -> i64 {
    let n = rows.len();
    if n == 1 {
        return rows[0][0];
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = rows[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(k, _)| k != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * rows[0][j] * det(&minor)
        })
        .sum()
}

/// Seeded random integer matrices, dimension 2–4, entries in [−3, 3], |det| = 1.
pub fn random_unimodular(count: usize, seed: u64) -> Vec<Vec<Vec<i64>>> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=4);
        let rows: Vec<Vec<i64>> = (0..n).map(|_| (0..n).map(|_| rng.gen_range(-3..=3)).collect()).collect();
        if det(&rows).abs() == 1 {
            out.push(rows);
        }
    }
    out
}

/// Uniform random words of length 0..=max_len over the model's generators.
pub fn random_words(
    gens: &std::sync::Arc<growthlab::words::SymmetricGeneratingSet>,
    count: usize,
    max_len: usize,
    seed: u64,
) -> Vec<Word> {
    use growthlab::words::Letter;
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(0..=max_len);
            let letters = (0..len).map(|_| Letter::new(rng.gen_range(0..gens.len()))).collect();
            Word::new(std::sync::Arc::clone(gens), letters).unwrap()
        })
        .collect()
}
