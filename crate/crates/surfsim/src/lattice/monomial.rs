//! Exact symbolic algebra for phase-tracked Majorana monomials.
//!
//! A monomial is i^k · ĉ_{j1} ĉ_{j2} ⋯ ĉ_{jm} with distinct, strictly
//! increasing indices after normalization (using ĉ_a ĉ_b = −ĉ_b ĉ_a for
//! a ≠ b and ĉ_a² = 1). This gives every operator product a canonical form,
//! so two products are equal as operators iff their normal forms are equal.
//! The lattice construction uses this to fix and then verify stabilizer
//! orientations exactly, with no floating point involved.

/// i^phase · ĉ_{indices[0]} ⋯ ĉ_{indices[last]}, indices strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub phase: u8, // exponent of i, mod 4
    pub indices: Vec<u32>,
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial { phase: 0, indices: Vec::new() }
    }

    /// i · ĉ_a ĉ_b — the standard stabilizer-pair form.
    pub fn pair(a: usize, b: usize) -> Self {
        assert_ne!(a, b);
        Monomial { phase: 1, indices: vec![a as u32, b as u32] }.normalized()
    }

    /// i^k times the ordered product of the given (possibly repeated)
    /// Majorana factors, brought to normal form.
    pub fn from_factors(phase: u8, factors: &[usize]) -> Self {
        Monomial {
            phase: phase % 4,
            indices: factors.iter().map(|&f| f as u32).collect(),
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        // Insertion sort with sign tracking: each adjacent swap of distinct
        // factors contributes −1 = i².
        let v = &mut self.indices;
        let mut swaps = 0usize;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                swaps += 1;
                j -= 1;
            }
        }
        // Cancel equal adjacent pairs (ĉ² = 1).
        let mut out = Vec::with_capacity(v.len());
        let mut i = 0;
        while i < v.len() {
            if i + 1 < v.len() && v[i] == v[i + 1] {
                i += 2;
            } else {
                out.push(v[i]);
                i += 1;
            }
        }
        self.indices = out;
        self.phase = ((self.phase as usize + 2 * swaps) % 4) as u8;
        self
    }

    /// Product self · other in normal form.
    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut indices = Vec::with_capacity(self.indices.len() + other.indices.len());
        indices.extend_from_slice(&self.indices);
        indices.extend_from_slice(&other.indices);
        Monomial {
            phase: (self.phase + other.phase) % 4,
            indices,
        }
        .normalized()
    }

    /// Multiplicative inverse: monomials here are unitary with M·M† = 1,
    /// and for a normal-form monomial of m factors, M† has reversed order,
    /// i.e. sign (−1)^{m(m−1)/2}, and conjugated phase.
    pub fn inverse(&self) -> Monomial {
        let m = self.indices.len();
        let reverse_swaps = m * (m - 1) / 2;
        let phase = ((4 - self.phase as usize) % 4 + 2 * reverse_swaps) % 4;
        Monomial { phase: phase as u8, indices: self.indices.clone() }
    }

    pub fn is_identity(&self) -> bool {
        self.indices.is_empty() && self.phase == 0
    }

    pub fn is_minus_identity(&self) -> bool {
        self.indices.is_empty() && self.phase == 2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_normalizes_order_with_sign() {
        // i ĉ_2 ĉ_1 = −i ĉ_1 ĉ_2 = i³ ĉ_1 ĉ_2.
        let m = Monomial::pair(2, 1);
        assert_eq!(m.indices, vec![1, 2]);
        assert_eq!(m.phase, 3);
    }

    #[test]
    fn squares_of_pairs_are_minus_identity() {
        // (i ĉ_a ĉ_b)² = i² ĉ_aĉ_bĉ_aĉ_b = i²·(−1) ĉ_a²ĉ_b² = +1… check:
        let p = Monomial::pair(0, 1);
        let sq = p.times(&p);
        // i²·(ĉ_0ĉ_1ĉ_0ĉ_1) = i²·(−ĉ_0ĉ_0ĉ_1ĉ_1) = i²·(−1) = +1.
        assert!(sq.is_identity(), "{sq:?}");
    }

    #[test]
    fn inverse_cancels() {
        let m = Monomial::from_factors(3, &[4, 1, 7, 2]);
        assert!(m.times(&m.inverse()).is_identity());
        assert!(m.inverse().times(&m).is_identity());
    }

    #[test]
    fn repeated_factors_cancel_across_products() {
        // (i ĉ_1 ĉ_2)(i ĉ_2 ĉ_3) = i² ĉ_1 ĉ_3 = −ĉ_1 ĉ_3.
        let a = Monomial::pair(1, 2);
        let b = Monomial::pair(2, 3);
        let ab = a.times(&b);
        assert_eq!(ab.indices, vec![1, 3]);
        assert_eq!(ab.phase, 2);
    }

    #[test]
    fn disjoint_even_monomials_commute() {
        let a = Monomial::pair(0, 1);
        let b = Monomial::pair(5, 3);
        assert_eq!(a.times(&b), b.times(&a));
    }

    #[test]
    fn overlapping_pairs_anticommute() {
        let a = Monomial::pair(0, 1);
        let b = Monomial::pair(1, 2);
        let ab = a.times(&b);
        let ba = b.times(&a);
        assert_eq!(ab.indices, ba.indices);
        assert_eq!((ab.phase + 2) % 4, ba.phase);
    }

    #[test]
    fn four_factor_algebra_matches_hand_expansion() {
        // Ŝ = −ĉ_0ĉ_1ĉ_2ĉ_3 times Ẑ = iĉ_1ĉ_2 should equal iĉ_0ĉ_3.
        let s = Monomial::from_factors(2, &[0, 1, 2, 3]);
        let z = Monomial::pair(1, 2);
        let sz = s.times(&z);
        assert_eq!(sz, Monomial::pair(0, 3));
    }
}
