//! Exact spectral tests on integer matrices: characteristic polynomials, the
//! all-eigenvalues-on-the-unit-circle criterion, enclosures of the spectral
//! radius, and the entropy lower bound it implies.

pub mod screen;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::models::matrix::RationalMatrix;

pub use screen::{conjugation_matrix, virtual_nilpotency_screen, ScreenEntry, ScreenReport, ScreenVerdict};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerMatrix {
    dim: usize,
    entries: Vec<BigInt>,
}

impl IntegerMatrix {
    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 || rows.iter().any(|r| r.len() != dim) {
            return Err(Error::Parameter("matrix must be square and non-empty".into()));
        }
        Ok(IntegerMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect())
    }

    /// Rejects matrices with non-integer entries.
    pub fn from_rational(m: &RationalMatrix) -> Result<Self> {
        let n = m.dim();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let e = m.get(i, j);
                if !e.is_integer() {
                    return Err(Error::Parameter(format!("entry ({i}, {j}) = {e} is not an integer")));
                }
                entries.push(e.to_integer());
            }
        }
        Ok(IntegerMatrix { dim: n, entries })
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = BigInt::one();
        }
        IntegerMatrix { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.dim + j]
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.get(i, j).to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let entries = (0..n * n).map(|k| self.get(k % n, k / n).clone()).collect();
        IntegerMatrix { dim: n, entries }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = BigInt::zero();
                for k in 0..n {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                entries.push(acc);
            }
        }
        IntegerMatrix { dim: n, entries }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut acc = Self::identity(self.dim);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn minus_identity(&self) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.entries[i * self.dim + i] -= 1;
        }
        m
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    fn trace(&self) -> BigInt {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn determinant(&self) -> BigInt {
        let c = char_poly(self);
        if self.dim % 2 == 0 {
            c[self.dim].clone()
        } else {
            -c[self.dim].clone()
        }
    }
}

impl fmt::Display for IntegerMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.dim)
            .map(|i| {
                let row: Vec<String> = (0..self.dim).map(|j| self.get(i, j).to_string()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect();
        write!(f, "[{}]", rows.join(", "))
    }
}

/// Monic characteristic polynomial `det(xI − A)`, coefficients from the
/// leading one down: `x² − 3x + 1` is `[1, −3, 1]`. Faddeev–LeVerrier; every
/// division is exact.
pub fn char_poly(a: &IntegerMatrix) -> Vec<BigInt> {
    let n = a.dim();
    let mut coeffs = vec![BigInt::one()];
    let mut m = IntegerMatrix {
        dim: n,
        entries: vec![BigInt::zero(); n * n],
    };
    for k in 1..=n {
        // M_k = A M_(k-1) + c_(n-k+1) I ;  c_(n-k) = -tr(A M_k) / k
        m = a.mul(&m);
        let c_prev = coeffs[k - 1].clone();
        for i in 0..n {
            m.entries[i * n + i] += &c_prev;
        }
        let t = a.mul(&m).trace();
        coeffs.push(-t / BigInt::from(k));
    }
    coeffs
}

fn euler_phi(mut m: u64) -> u64 {
    let mut result = m;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// `lcm { m ≤ k² + k : φ(m) ≤ k }`: every root of unity of degree at most
/// `k` has order dividing it.
pub fn root_of_unity_exponent(k: usize) -> u64 {
    let k = k as u64;
    (1..=k * k + k)
        .filter(|&m| euler_phi(m) <= k)
        .fold(1u64, |acc, m| acc.lcm(&m))
}

/// Whether every eigenvalue of the integer matrix `a` has modulus one.
///
/// With `|det| = 1` this holds iff all eigenvalues are roots of unity
/// (Kronecker), iff `(A^L − I)^k = 0` for the exponent `L` above.
pub fn unit_circle_test(a: &IntegerMatrix) -> bool {
    if !a.determinant().abs().is_one() {
        return false;
    }
    let k = a.dim();
    let n = a.pow(root_of_unity_exponent(k)).minus_identity();
    n.pow(k as u64).is_zero()
}

pub fn unit_circle_test_rational(m: &RationalMatrix) -> Result<bool> {
    Ok(unit_circle_test(&IntegerMatrix::from_rational(m)?))
}

/// Rational interval containing the largest root modulus of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Enclosure {
    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let lo = self.lo.to_f64().unwrap_or(f64::NAN);
        let hi = self.hi.to_f64().unwrap_or(f64::NAN);
        lo <= x && x <= hi
    }
}

/// Schur–Cohn: whether every root of `p` (ascending coefficients, nonzero
/// leading term) lies in the open unit disk.
fn schur_stable(p: &[BigInt]) -> bool {
    let mut q: Vec<BigInt> = p.to_vec();
    while q.len() > 1 {
        let n = q.len() - 1;
        let (a0, an) = (q[0].clone(), q[n].clone());
        if a0.abs() >= an.abs() {
            return false;
        }
        // (a_n q(x) − a_0 xⁿ q(1/x)) / x has the same roots inside the disk, minus the one at 0.
        let mut next: Vec<BigInt> = (0..n).map(|j| &an * &q[j + 1] - &a0 * &q[n - 1 - j]).collect();
        let g = next.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in next.iter_mut() {
                *c /= &g;
            }
        }
        q = next;
    }
    true
}

/// Whether all roots of the monic `coeffs` (descending) have modulus `< r`.
fn all_roots_below(coeffs: &[BigInt], r: &BigRational) -> bool {
    // q(x) = bⁿ p(a x / b) has integer coefficients c_i aⁱ b^(n−i).
    let n = coeffs.len() - 1;
    let (a, b) = (r.numer(), r.denom());
    let ascending: Vec<BigInt> = (0..=n)
        .map(|i| &coeffs[n - i] * num_traits::pow(a.clone(), i) * num_traits::pow(b.clone(), n - i))
        .collect();
    schur_stable(&ascending)
}

/// Enclosure of the spectral radius of `a` of width at most `tol`.
///
/// Exactly `[1, 1]` when every eigenvalue lies on the unit circle; otherwise
/// bisection on `ρ` with an exact Schur–Cohn test of "all roots below ρ".
pub fn lambda_max(a: &IntegerMatrix, tol: &BigRational) -> Result<Enclosure> {
    if !tol.is_positive() {
        return Err(Error::Parameter(format!("tolerance must be positive, got {tol}")));
    }
    if unit_circle_test(a) {
        return Ok(Enclosure {
            lo: BigRational::one(),
            hi: BigRational::one(),
        });
    }
    polynomial_root_radius(&char_poly(a), tol)
}

/// Same as [`lambda_max`] for a monic polynomial given by descending coefficients.
pub fn polynomial_root_radius(coeffs: &[BigInt], tol: &BigRational) -> Result<Enclosure> {
    let n = coeffs.len() - 1;
    let bound = coeffs[1..].iter().map(|c| c.abs()).max().unwrap_or_default() + 1;
    let mut hi = BigRational::from_integer(bound);
    // |product of roots| = |c_n| ≥ 1 forces a root of modulus ≥ 1.
    let mut lo = if n > 0 && !coeffs[n].is_zero() {
        BigRational::one()
    } else {
        BigRational::zero()
    };
    let two = BigRational::from_integer(2.into());
    while &hi - &lo > *tol {
        let mid = (&lo + &hi) / &two;
        if all_roots_below(coeffs, &mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Enclosure { lo, hi })
}

/// `ln2 · lnλ / (ln2 + 5 lnλ)` at the enclosure's lower end, rounded down.
pub fn osin_lower_bound(enclosure: &Enclosure) -> Result<f64> {
    if enclosure.lo < BigRational::one() {
        return Err(Error::Parameter(format!(
            "spectral radius enclosure starts at {} < 1",
            enclosure.lo
        )));
    }
    Ok(osin_formula(enclosure.lo.to_f64().unwrap_or(f64::INFINITY)))
}

/// The bound at a given spectral radius `λ ≥ 1`.
pub fn osin_formula(lambda: f64) -> f64 {
    if lambda <= 1.0 {
        return 0.0;
    }
    let (l2, ll) = (std::f64::consts::LN_2, lambda.ln());
    let value = l2 * ll / (l2 + 5.0 * ll);
    // One ulp down keeps the value below the exact bound despite rounding.
    f64::from_bits(value.to_bits().saturating_sub(1)).max(0.0)
}

/// Everything the spectral layer says about one matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralSummary {
    pub char_poly: Vec<String>,
    pub unit_circle: bool,
    pub lambda_max_lo: String,
    pub lambda_max_hi: String,
    pub osin_bound: f64,
}

pub fn spectral_summary(a: &IntegerMatrix, tol: &BigRational) -> Result<SpectralSummary> {
    let enclosure = lambda_max(a, tol)?;
    let unit_circle = unit_circle_test(a);
    Ok(SpectralSummary {
        char_poly: char_poly(a).iter().map(|c| c.to_string()).collect(),
        unit_circle,
        lambda_max_lo: enclosure.lo.to_string(),
        lambda_max_hi: enclosure.hi.to_string(),
        osin_bound: if unit_circle { 0.0 } else { osin_lower_bound(&enclosure)? },
    })
}

pub fn default_tolerance() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64.pow(10)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(rows: &[Vec<i64>]) -> IntegerMatrix {
        IntegerMatrix::from_i64(rows).unwrap()
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(char_poly(&IntegerMatrix::identity(2)), ints(&[1, -2, 1]));
        assert_eq!(char_poly(&m(&[vec![2, 1], vec![1, 1]])), ints(&[1, -3, 1]));
        assert_eq!(char_poly(&m(&[vec![0, -1], vec![1, 0]])), ints(&[1, 0, 1]));
    }

    /// det(xI − A) for 3×3 by cofactor expansion at x = 0, 1, 2, 3.
    #[test]
    fn char_poly_matches_direct_determinants() {
        let a = m(&[vec![1, 2, -1], vec![0, 3, 4], vec![-2, 1, 1]]);
        let c = char_poly(&a);
        for x in 0..4i64 {
            let b: Vec<Vec<i64>> = (0..3)
                .map(|i| {
                    (0..3)
                        .map(|j| (if i == j { x } else { 0 }) - a.get(i, j).to_i64().unwrap())
                        .collect()
                })
                .collect();
            let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
                - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
                + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
            let p: BigInt = c.iter().fold(BigInt::zero(), |acc, k| acc * x + k);
            assert_eq!(p, BigInt::from(det));
        }
    }

    #[test]
    fn unit_circle_examples() {
        assert!(unit_circle_test(&IntegerMatrix::identity(3)));
        assert!(unit_circle_test(&m(&[vec![1, 1], vec![0, 1]])));
        assert!(unit_circle_test(&m(&[vec![0, -1], vec![1, 0]])));
        assert!(!unit_circle_test(&m(&[vec![2, 1], vec![1, 1]])));
        assert!(!unit_circle_test(&m(&[vec![2, 0], vec![0, 1]])));
        // Eigenvalues of orders 4 and 3 mixed in one matrix.
        let mixed = m(&[
            vec![0, -1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, -1],
        ]);
        assert!(unit_circle_test(&mixed));
    }

    #[test]
    fn exponent_covers_small_orders() {
        assert_eq!(root_of_unity_exponent(1), 2);
        assert_eq!(root_of_unity_exponent(2), 12);
        assert_eq!(root_of_unity_exponent(4), 120);
    }

    #[test]
    fn lambda_max_examples() {
        let tol = BigRational::new(1.into(), BigInt::from(10u64.pow(9)));
        let id = lambda_max(&IntegerMatrix::identity(2), &tol).unwrap();
        assert_eq!((id.lo.clone(), id.hi.clone()), (BigRational::one(), BigRational::one()));
        let e = lambda_max(&m(&[vec![2, 1], vec![1, 1]]), &tol).unwrap();
        let golden = (3.0 + 5f64.sqrt()) / 2.0;
        assert!(e.contains(golden), "{e:?}");
        assert!(e.width() <= tol);
        // p(lo) < 0 < p(hi) on either side of the larger root of x² − 3x + 1.
        let p = |x: &BigRational| x * x - BigRational::from_integer(3.into()) * x + BigRational::one();
        assert!(p(&e.lo) <= BigRational::zero() && p(&e.hi) > BigRational::zero());
        let rot = lambda_max(&m(&[vec![0, -1], vec![1, 0]]), &tol).unwrap();
        assert_eq!(rot.lo, BigRational::one());
        assert!(lambda_max(&IntegerMatrix::identity(2), &BigRational::zero()).is_err());
    }

    #[test]
    fn complex_pair_radius() {
        // x² − 2x + 5 has roots 1 ± 2i of modulus √5.
        let tol = BigRational::new(1.into(), BigInt::from(10u64.pow(9)));
        let e = polynomial_root_radius(&ints(&[1, -2, 5]), &tol).unwrap();
        assert!(e.contains(5f64.sqrt()));
    }

    #[test]
    fn osin_values() {
        let at = |x: f64| osin_formula(x);
        assert_eq!(at(1.0), 0.0);
        assert!((at((3.0 + 5f64.sqrt()) / 2.0) - 0.1212).abs() < 5e-5);
        assert!((at(2.0) - std::f64::consts::LN_2 / 6.0).abs() < 1e-12);
        assert!((at(2.0) - 0.11552).abs() < 1e-5);
        let below = Enclosure {
            lo: BigRational::new(1.into(), 2.into()),
            hi: BigRational::one(),
        };
        assert!(osin_lower_bound(&below).is_err());
    }

    fn small_matrix() -> impl Strategy<Value = IntegerMatrix> {
        (2usize..=4).prop_flat_map(|n| {
            proptest::collection::vec(-3i64..=3, n * n).prop_map(move |v| {
                IntegerMatrix::from_i64(&v.chunks(n).map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn transpose_has_same_char_poly(a in small_matrix()) {
            prop_assert_eq!(char_poly(&a.transpose()), char_poly(&a));
        }

        #[test]
        fn block_diagonal_multiplies(a in small_matrix(), b in small_matrix()) {
            let (n, k) = (a.dim(), b.dim());
            let rows: Vec<Vec<BigInt>> = (0..n + k)
                .map(|i| (0..n + k).map(|j| {
                    if i < n && j < n { a.get(i, j).clone() }
                    else if i >= n && j >= n { b.get(i - n, j - n).clone() }
                    else { BigInt::zero() }
                }).collect())
                .collect();
            let block = IntegerMatrix::from_rows(rows).unwrap();
            let (pa, pb) = (char_poly(&a), char_poly(&b));
            let mut product = vec![BigInt::zero(); pa.len() + pb.len() - 1];
            for (i, x) in pa.iter().enumerate() {
                for (j, y) in pb.iter().enumerate() {
                    product[i + j] += x * y;
                }
            }
            prop_assert_eq!(char_poly(&block), product);
        }

        #[test]
        fn osin_is_monotone(x in 1.0f64..50.0, dx in 0.0f64..10.0) {
            prop_assert!(osin_formula(x) <= osin_formula(x + dx) + 1e-15);
        }
    }
}
