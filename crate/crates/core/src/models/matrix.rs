//! Exact rational matrices and matrix groups.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::words::SymmetricGeneratingSet;

/// Square matrix of reduced rationals, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    dim: usize,
    entries: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn from_rows(rows: Vec<Vec<BigRational>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Schema("matrix must have at least one row".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Schema(format!("matrix is not {dim}x{dim}")));
        }
        Ok(RationalMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_integers(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigRational::one();
        }
        RationalMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.dim + col]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.is_integer())
    }

    pub fn mul(&self, other: &RationalMatrix) -> RationalMatrix {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        if self.is_integral() && other.is_integral() {
            // Integer fast path avoids a gcd per product.
            let a: Vec<&BigInt> = self.entries.iter().map(|e| e.numer()).collect();
            let b: Vec<&BigInt> = other.entries.iter().map(|e| e.numer()).collect();
            let mut entries = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = BigInt::zero();
                    for k in 0..n {
                        let (x, y) = (a[i * n + k], b[k * n + j]);
                        if !x.is_zero() && !y.is_zero() {
                            acc += x * y;
                        }
                    }
                    entries.push(BigRational::from_integer(acc));
                }
            }
            return RationalMatrix { dim: n, entries };
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigRational::zero();
                for k in 0..n {
                    let (x, y) = (self.get(i, k), other.get(k, j));
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                entries.push(acc);
            }
        }
        RationalMatrix { dim: n, entries }
    }

    pub fn determinant(&self) -> BigRational {
        let n = self.dim;
        let mut m: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut det = BigRational::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
                return BigRational::zero();
            };
            if pivot != col {
                m.swap(pivot, col);
                det = -det;
            }
            let p = m[col][col].clone();
            det *= &p;
            for r in col + 1..n {
                if m[r][col].is_zero() {
                    continue;
                }
                let factor = &m[r][col] / &p;
                for c in col..n {
                    let delta = &factor * &m[col][c];
                    m[r][c] -= delta;
                }
            }
        }
        det
    }

    /// Exact inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<RationalMatrix> {
        let n = self.dim;
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).clone()).collect())
            .collect();
        let mut inv: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if i == j { BigRational::one() } else { BigRational::zero() })
                    .collect()
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
            a.swap(pivot, col);
            inv.swap(pivot, col);
            let p = a[col][col].clone();
            for c in 0..n {
                a[col][c] /= &p;
                inv[col][c] /= &p;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let factor = a[r][col].clone();
                for c in 0..n {
                    let da = &factor * &a[col][c];
                    a[r][c] -= da;
                    let di = &factor * &inv[col][c];
                    inv[r][c] -= di;
                }
            }
        }
        Some(RationalMatrix {
            dim: n,
            entries: inv.into_iter().flatten().collect(),
        })
    }

    /// Injective byte encoding: dimension, then each entry as sign, numerator
    /// magnitude, and denominator magnitude with length prefixes.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.dim as u32).to_le_bytes());
        for e in &self.entries {
            write_bigint(out, e.numer());
            write_bigint(out, e.denom());
        }
    }
}

pub(crate) fn write_bigint(out: &mut Vec<u8>, x: &BigInt) {
    let (sign, mag) = x.to_bytes_le();
    out.push(match sign {
        num_bigint::Sign::Minus => 0,
        num_bigint::Sign::NoSign => 1,
        num_bigint::Sign::Plus => 2,
    });
    out.extend_from_slice(&(mag.len() as u32).to_le_bytes());
    if !x.is_zero() {
        out.extend_from_slice(&mag);
    }
}

impl fmt::Display for RationalMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.dim {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.dim {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

/// Parses `"n"` or `"n/d"` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    let parse_int = |s: &str| {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Schema(format!("invalid rational entry {text:?}")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let (n, d) = (parse_int(n)?, parse_int(d)?);
            if d.is_zero() {
                return Err(Error::Schema(format!("zero denominator in {text:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(parse_int(text)?)),
    }
}

/// A subgroup of GL(m, Q) given by one matrix per symmetric generator.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    gens: Arc<SymmetricGeneratingSet>,
    dim: usize,
    matrices: Vec<RationalMatrix>,
}

impl MatrixGroup {
    /// `matrices[i]` is the image of generator `i`. Every matrix must be
    /// invertible and paired generators must be exact inverses.
    pub fn new(gens: Arc<SymmetricGeneratingSet>, matrices: Vec<RationalMatrix>) -> Result<Self> {
        if matrices.len() != gens.len() {
            return Err(Error::Schema(format!(
                "{} generators but {} matrices",
                gens.len(),
                matrices.len()
            )));
        }
        let dim = matrices.first().map(RationalMatrix::dim).unwrap_or(1);
        for (i, m) in matrices.iter().enumerate() {
            if m.dim() != dim {
                return Err(Error::Schema(format!(
                    "matrix for {} has dimension {} instead of {dim}",
                    gens.label(i),
                    m.dim()
                )));
            }
            if m.determinant().is_zero() {
                return Err(Error::Inconsistent(format!(
                    "matrix for {} is singular",
                    gens.label(i)
                )));
            }
        }
        for i in gens.pair_representatives() {
            let j = gens.inverse(i);
            if !matrices[i].mul(&matrices[j]).is_identity() {
                return Err(Error::Inconsistent(format!(
                    "declared inverse {} is not the exact inverse of {}",
                    gens.label(j),
                    gens.label(i)
                )));
            }
        }
        Ok(MatrixGroup {
            gens,
            dim,
            matrices,
        })
    }

    pub fn generators(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, generator: usize) -> &RationalMatrix {
        &self.matrices[generator]
    }

    /// True when every generator matrix has integer entries and determinant ±1.
    pub fn is_unimodular_integral(&self) -> bool {
        self.matrices
            .iter()
            .all(|m| m.is_integral() && m.determinant().abs().is_one())
    }
}
