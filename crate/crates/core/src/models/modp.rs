//! Z_p ⋊ Z with the generator of Z acting by doubling.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::words::SymmetricGeneratingSet;

/// Pair `(a mod p, n)` multiplying as `(a, n)(b, m) = (a + 2ⁿb mod p, n + m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModPElement {
    pub residue: u64,
    pub shift: i64,
}

#[derive(Clone, Debug)]
pub struct ModPExtension {
    gens: Arc<SymmetricGeneratingSet>,
    p: u64,
    /// `images[i]` is the element for generator `i`.
    images: Vec<ModPElement>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

impl ModPExtension {
    /// The first generator pair is the torsion generator α = (1, 0), the
    /// second is γ = (0, 1).
    pub fn new(gens: Arc<SymmetricGeneratingSet>, p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Inconsistent(format!("p = {p} is not prime")));
        }
        if p == 2 {
            return Err(Error::Unsupported(
                "p = 2 makes the doubling action trivial; only odd primes are modeled".into(),
            ));
        }
        if p > u32::MAX as u64 {
            return Err(Error::Unsupported(format!("p = {p} is too large")));
        }
        let reps = gens.pair_representatives();
        if reps.len() != 2 {
            return Err(Error::Schema(
                "mod_p_extension needs exactly two generator pairs (alpha, gamma)".into(),
            ));
        }
        let (alpha, gamma) = (reps[0], reps[1]);
        if gens.inverse(alpha) == alpha || gens.inverse(gamma) == gamma {
            return Err(Error::Inconsistent(
                "alpha and gamma have infinite or odd order and cannot be self-inverse".into(),
            ));
        }
        let mut images = vec![ModPElement { residue: 0, shift: 0 }; gens.len()];
        images[alpha] = ModPElement { residue: 1, shift: 0 };
        images[gens.inverse(alpha)] = ModPElement {
            residue: p - 1,
            shift: 0,
        };
        images[gamma] = ModPElement { residue: 0, shift: 1 };
        images[gens.inverse(gamma)] = ModPElement {
            residue: 0,
            shift: -1,
        };
        Ok(ModPExtension { gens, p, images })
    }

    pub fn generators(&self) -> &Arc<SymmetricGeneratingSet> {
        &self.gens
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self, i: usize) -> ModPElement {
        self.images[i]
    }

    /// 2ⁿ mod p, for any integer n (2 is a unit mod odd p).
    pub fn power_of_two(&self, n: i64) -> u64 {
        let exp = n.rem_euclid((self.p - 1) as i64) as u64;
        let (mut base, mut e, mut acc) = (2u64 % self.p, exp, 1u64);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % self.p;
            }
            base = base * base % self.p;
            e >>= 1;
        }
        acc
    }

    pub fn multiply(&self, x: ModPElement, y: ModPElement) -> ModPElement {
        let twisted = self.power_of_two(x.shift) * y.residue % self.p;
        ModPElement {
            residue: (x.residue + twisted) % self.p,
            shift: x.shift + y.shift,
        }
    }

    pub fn inverse(&self, x: ModPElement) -> ModPElement {
        // (a, n)⁻¹ = (-2⁻ⁿ a, -n)
        let t = self.power_of_two(-x.shift) * x.residue % self.p;
        ModPElement {
            residue: (self.p - t) % self.p,
            shift: -x.shift,
        }
    }
}
