//! Signed Pauli products in the symplectic bit representation.
//!
//! A product on `n` qubits is stored as two packed bit vectors plus a power
//! of `i`. Qubit `q` carries the factor selected by `(x_q, z_q)`:
//! `(0,0) = I`, `(1,0) = X`, `(0,1) = Z`, `(1,1) = Y`. The operator is
//! `i^phase · ⊗ factors`, with the phase bookkeeping absorbing the `i` in
//! `Y = iXZ`, so multiplication tracks signs exactly modulo a global phase.

use std::fmt;
use std::str::FromStr;

type Word = u64;
const WORD_BITS: usize = 64;

fn words_for(num_qubits: usize) -> usize {
    (num_qubits + WORD_BITS - 1) / WORD_BITS
}

/// Single-qubit Pauli factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factor {
    I,
    X,
    Y,
    Z,
}

impl Factor {
    pub fn from_bits(x: bool, z: bool) -> Factor {
        match (x, z) {
            (false, false) => Factor::I,
            (true, false) => Factor::X,
            (false, true) => Factor::Z,
            (true, true) => Factor::Y,
        }
    }

    pub fn bits(self) -> (bool, bool) {
        match self {
            Factor::I => (false, false),
            Factor::X => (true, false),
            Factor::Z => (false, true),
            Factor::Y => (true, true),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Factor::I => 'I',
            Factor::X => 'X',
            Factor::Y => 'Y',
            Factor::Z => 'Z',
        }
    }
}

/// Eigenvalue sign of a Hermitian Pauli product.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flipped(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn times(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign encoded as a phase exponent: `+1 → 0`, `-1 → 2`.
    pub fn phase_exp(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 2,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sign::Plus => write!(f, "+"),
            Sign::Minus => write!(f, "-"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PauliError {
    LengthMismatch { left: usize, right: usize },
    IndexOutOfRange { index: usize, num_qubits: usize },
    BadPositions(String),
    NotHermitian,
    Parse { column: usize, message: String },
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PauliError::LengthMismatch { left, right } => {
                write!(f, "operator lengths differ: {left} vs {right}")
            }
            PauliError::IndexOutOfRange { index, num_qubits } => {
                write!(f, "qubit index {index} out of range for {num_qubits} qubits")
            }
            PauliError::BadPositions(msg) => write!(f, "bad position list: {msg}"),
            PauliError::NotHermitian => write!(f, "operator is not Hermitian"),
            PauliError::Parse { column, message } => {
                write!(f, "parse error at column {column}: {message}")
            }
        }
    }
}

impl std::error::Error for PauliError {}

/// A signed Pauli product on a fixed number of qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliProduct {
    num_qubits: usize,
    x: Vec<Word>,
    z: Vec<Word>,
    phase: u8, // exponent of i, mod 4
}

impl PauliProduct {
    pub fn identity(num_qubits: usize) -> PauliProduct {
        let w = words_for(num_qubits);
        PauliProduct {
            num_qubits,
            x: vec![0; w],
            z: vec![0; w],
            phase: 0,
        }
    }

    pub fn from_factors(factors: &[Factor]) -> PauliProduct {
        let mut p = PauliProduct::identity(factors.len());
        for (q, &f) in factors.iter().enumerate() {
            p.set_factor(q, f);
        }
        p
    }

    /// The operator acting as `f` on qubit `q` and identity elsewhere.
    pub fn single(num_qubits: usize, q: usize, f: Factor) -> PauliProduct {
        let mut p = PauliProduct::identity(num_qubits);
        p.set_factor(q, f);
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn phase_exp(&self) -> u8 {
        self.phase
    }

    pub fn is_hermitian(&self) -> bool {
        self.phase % 2 == 0
    }

    /// Sign of a Hermitian product.
    pub fn sign(&self) -> Result<Sign, PauliError> {
        match self.phase {
            0 => Ok(Sign::Plus),
            2 => Ok(Sign::Minus),
            _ => Err(PauliError::NotHermitian),
        }
    }

    pub fn negated(&self) -> PauliProduct {
        let mut p = self.clone();
        p.phase = (p.phase + 2) & 3;
        p
    }

    /// Multiplies the global phase by `i^k`.
    pub fn times_i(&self, k: u8) -> PauliProduct {
        let mut p = self.clone();
        p.phase = (p.phase + k) & 3;
        p
    }

    /// Hermitian representative with the same bits and phase forced to 0 or 2.
    /// Odd phases are multiplied by `i` once, matching `Y = iXZ`.
    pub fn hermitized(&self) -> PauliProduct {
        if self.phase % 2 == 1 {
            self.times_i(1)
        } else {
            self.clone()
        }
    }

    /// Same bits with phase reset to 0 (the `+1` representative).
    pub fn unsigned(&self) -> PauliProduct {
        let mut p = self.clone();
        p.phase = 0;
        p
    }

    pub fn x_bit(&self, q: usize) -> bool {
        (self.x[q / WORD_BITS] >> (q % WORD_BITS)) & 1 == 1
    }

    pub fn z_bit(&self, q: usize) -> bool {
        (self.z[q / WORD_BITS] >> (q % WORD_BITS)) & 1 == 1
    }

    pub fn factor(&self, q: usize) -> Factor {
        Factor::from_bits(self.x_bit(q), self.z_bit(q))
    }

    pub fn set_factor(&mut self, q: usize, f: Factor) {
        let (x, z) = f.bits();
        let w = q / WORD_BITS;
        let m = 1u64 << (q % WORD_BITS);
        if x {
            self.x[w] |= m;
        } else {
            self.x[w] &= !m;
        }
        if z {
            self.z[w] |= m;
        } else {
            self.z[w] &= !m;
        }
    }

    pub fn is_identity_bits(&self) -> bool {
        self.x.iter().all(|&w| w == 0) && self.z.iter().all(|&w| w == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.is_identity_bits() && self.phase == 0
    }

    pub fn same_bits(&self, other: &PauliProduct) -> bool {
        self.num_qubits == other.num_qubits && self.x == other.x && self.z == other.z
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(&a, &b)| (a | b).count_ones() as usize)
            .sum()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.num_qubits)
            .filter(|&q| self.x_bit(q) || self.z_bit(q))
            .collect()
    }

    fn check_len(&self, other: &PauliProduct) -> Result<(), PauliError> {
        if self.num_qubits != other.num_qubits {
            return Err(PauliError::LengthMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(())
    }

    /// Operator product `self · other` with exact phase tracking.
    pub fn multiply(&self, other: &PauliProduct) -> Result<PauliProduct, PauliError> {
        self.check_len(other)?;
        let mut out = self.clone();
        out.mul_assign(other);
        Ok(out)
    }

    /// In-place operator product; lengths must already match.
    pub fn mul_assign(&mut self, other: &PauliProduct) {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut t = self.phase as u32 + other.phase as u32;
        for w in 0..self.x.len() {
            let (x1, z1) = (self.x[w], self.z[w]);
            let (x2, z2) = (other.x[w], other.z[w]);
            let (x3, z3) = (x1 ^ x2, z1 ^ z2);
            t += (x1 & z1).count_ones();
            t += (x2 & z2).count_ones();
            t += 3 * (x3 & z3).count_ones();
            t += 2 * (z1 & x2).count_ones();
            self.x[w] = x3;
            self.z[w] = z3;
        }
        self.phase = (t % 4) as u8;
    }

    /// Symplectic product: 0 if the operators commute, 1 if they anticommute.
    pub fn anticommute_bit(&self, other: &PauliProduct) -> u8 {
        debug_assert_eq!(self.num_qubits, other.num_qubits);
        let mut t = 0u32;
        for w in 0..self.x.len() {
            t += (self.x[w] & other.z[w]).count_ones();
            t += (self.z[w] & other.x[w]).count_ones();
        }
        (t & 1) as u8
    }

    pub fn commutes_with(&self, other: &PauliProduct) -> Result<bool, PauliError> {
        self.check_len(other)?;
        Ok(self.anticommute_bit(other) == 0)
    }

    /// Conjugation by Hadamard on every qubit: swaps X and Z, sends Y to -Y.
    pub fn hadamard_all(&self) -> PauliProduct {
        let mut t = self.phase as u32;
        for w in 0..self.x.len() {
            t += 2 * (self.x[w] & self.z[w]).count_ones();
        }
        PauliProduct {
            num_qubits: self.num_qubits,
            x: self.z.clone(),
            z: self.x.clone(),
            phase: (t % 4) as u8,
        }
    }

    /// Embeds the product on the listed qubits of a larger register,
    /// identity elsewhere. Positions must be strictly increasing.
    pub fn embed(&self, positions: &[usize], total: usize) -> Result<PauliProduct, PauliError> {
        if positions.len() != self.num_qubits {
            return Err(PauliError::BadPositions(format!(
                "{} positions for {} qubits",
                positions.len(),
                self.num_qubits
            )));
        }
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PauliError::BadPositions("not strictly increasing".into()));
        }
        if let Some(&last) = positions.last() {
            if last >= total {
                return Err(PauliError::IndexOutOfRange {
                    index: last,
                    num_qubits: total,
                });
            }
        }
        let mut out = PauliProduct::identity(total);
        out.phase = self.phase;
        for (k, &pos) in positions.iter().enumerate() {
            out.set_factor(pos, self.factor(k));
        }
        Ok(out)
    }

    /// Restriction to the listed qubits. The result carries phase 0; the
    /// global phase stays with the full operator.
    pub fn restrict(&self, positions: &[usize]) -> Result<PauliProduct, PauliError> {
        if positions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(PauliError::BadPositions("not strictly increasing".into()));
        }
        let mut out = PauliProduct::identity(positions.len());
        for (k, &pos) in positions.iter().enumerate() {
            if pos >= self.num_qubits {
                return Err(PauliError::IndexOutOfRange {
                    index: pos,
                    num_qubits: self.num_qubits,
                });
            }
            out.set_factor(k, self.factor(pos));
        }
        Ok(out)
    }

    /// Tensor product, appending `other`'s qubits after `self`'s.
    pub fn tensor(&self, other: &PauliProduct) -> PauliProduct {
        let total = self.num_qubits + other.num_qubits;
        let mut out = PauliProduct::identity(total);
        out.phase = (self.phase + other.phase) & 3;
        for q in 0..self.num_qubits {
            out.set_factor(q, self.factor(q));
        }
        for q in 0..other.num_qubits {
            out.set_factor(self.num_qubits + q, other.factor(q));
        }
        out
    }

    /// Conjugation by a Hadamard on qubit `q`.
    pub fn conj_h(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.phase = (self.phase + 2) & 3;
        }
        self.set_factor(q, Factor::from_bits(z, x));
    }

    /// Conjugation by the S gate on qubit `q` (X -> Y, Y -> -X, Z -> Z).
    pub fn conj_s(&mut self, q: usize) {
        let (x, z) = (self.x_bit(q), self.z_bit(q));
        if x && z {
            self.phase = (self.phase + 2) & 3;
        }
        if x {
            self.set_factor(q, Factor::from_bits(x, !z));
        }
    }

    /// Conjugation by CNOT with control `a` and target `b`.
    pub fn conj_cnot(&mut self, a: usize, b: usize) {
        let (xa, za) = (self.x_bit(a), self.z_bit(a));
        let (xb, zb) = (self.x_bit(b), self.z_bit(b));
        if xa && zb && !(xb ^ za) {
            self.phase = (self.phase + 2) & 3;
        }
        self.set_factor(b, Factor::from_bits(xb ^ xa, zb));
        self.set_factor(a, Factor::from_bits(xa, za ^ zb));
    }

    /// Bits packed into a single word: x bits at 0..n, z bits at n..2n.
    pub(crate) fn packed_row(&self) -> u64 {
        assert!(
            2 * self.num_qubits <= 64,
            "packed row requires at most 32 qubits"
        );
        let mut row = 0u64;
        for q in 0..self.num_qubits {
            if self.x_bit(q) {
                row |= 1 << q;
            }
            if self.z_bit(q) {
                row |= 1 << (self.num_qubits + q);
            }
        }
        row
    }

    pub(crate) fn from_packed_row(num_qubits: usize, row: u64) -> PauliProduct {
        let mut p = PauliProduct::identity(num_qubits);
        for q in 0..num_qubits {
            let x = (row >> q) & 1 == 1;
            let z = (row >> (num_qubits + q)) & 1 == 1;
            p.set_factor(q, Factor::from_bits(x, z));
        }
        p
    }
}

impl fmt::Display for PauliProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            0 => "+",
            1 => "+i",
            2 => "-",
            3 => "-i",
            _ => unreachable!(),
        };
        write!(f, "{prefix}")?;
        for q in 0..self.num_qubits {
            write!(f, "{}", self.factor(q).as_char())?;
        }
        Ok(())
    }
}

// Debug prints the operator string; the raw words add nothing.
impl fmt::Debug for PauliProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for PauliProduct {
    type Err = PauliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = s.strip_prefix("-i").or_else(|| s.strip_prefix("\u{2212}i")) {
            (3, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (0, r)
        } else if let Some(r) = s.strip_prefix('-').or_else(|| s.strip_prefix('\u{2212}')) {
            (2, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (1, r)
        } else {
            (0, s)
        };
        if rest.is_empty() {
            return Err(PauliError::Parse {
                column: s.len(),
                message: "empty Pauli string".into(),
            });
        }
        let mut factors = Vec::with_capacity(rest.len());
        for (k, ch) in rest.chars().enumerate() {
            let f = match ch {
                'I' => Factor::I,
                'X' => Factor::X,
                'Y' => Factor::Y,
                'Z' => Factor::Z,
                other => {
                    return Err(PauliError::Parse {
                        column: s.len() - rest.len() + k + 1,
                        message: format!("unexpected character '{other}'"),
                    })
                }
            };
            factors.push(f);
        }
        let mut p = PauliProduct::from_factors(&factors);
        p.phase = phase;
        Ok(p)
    }
}

/// Calls `f` with every Pauli bit pattern of exactly `weight` on `n` qubits.
/// Phases are 0; the visitor sees `3^weight · C(n, weight)` operators.
pub fn for_each_pauli_of_weight<F: FnMut(&PauliProduct)>(n: usize, weight: usize, f: &mut F) {
    fn recurse<F: FnMut(&PauliProduct)>(
        p: &mut PauliProduct,
        start: usize,
        remaining: usize,
        f: &mut F,
    ) {
        if remaining == 0 {
            f(p);
            return;
        }
        let n = p.num_qubits();
        for q in start..=(n - remaining) {
            for fac in [Factor::X, Factor::Y, Factor::Z] {
                p.set_factor(q, fac);
                recurse(p, q + 1, remaining - 1, f);
            }
            p.set_factor(q, Factor::I);
        }
    }
    if weight > n {
        return;
    }
    let mut p = PauliProduct::identity(n);
    recurse(&mut p, 0, weight, f);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use proptest::prelude::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(s: &str) -> PauliProduct {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let prod = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(prod.factor(0), Factor::Y);
        assert_eq!(prod.phase_exp(), 3);
    }

    #[test]
    fn xxxx_times_xxii_is_iixx() {
        let prod = p("XXXX").multiply(&p("XXII")).unwrap();
        assert_eq!(prod, p("IIXX"));
        assert_eq!(prod.phase_exp(), 0);
    }

    #[test]
    fn hermitian_squares_to_identity() {
        for s in ["Y", "-X", "XZZ", "-YY", "XYZI"] {
            let a = p(s);
            let sq = a.multiply(&a).unwrap();
            assert!(sq.is_identity_bits());
            assert_eq!(sq.phase_exp(), 0, "square of {s}");
        }
    }

    #[test]
    fn commutation_examples() {
        assert!(p("XX").commutes_with(&p("ZZ")).unwrap());
        assert!(!p("X").commutes_with(&p("Z")).unwrap());
        assert!(!p("ZIII").commutes_with(&p("XXXX")).unwrap());
    }

    #[test]
    fn hadamard_examples() {
        assert_eq!(p("XIXIXIX").hadamard_all(), p("ZIZIZIZ"));
        assert_eq!(p("III").hadamard_all(), p("III"));
        // Y -> -Y
        assert_eq!(p("Y").hadamard_all(), p("-Y"));
    }

    #[test]
    fn hadamard_matches_dense_conjugation_on_y() {
        let y = p("Y");
        let expected = dense::pauli_matrix(&y.hadamard_all());
        let h = dense::hadamard_matrix(1);
        let got = h.mul(&dense::pauli_matrix(&y)).mul(&h);
        assert!(expected.max_abs_diff(&got) < 1e-12);
    }

    #[test]
    fn embed_examples() {
        assert_eq!(p("XX").embed(&[0, 2], 4).unwrap(), p("XIXI"));
        assert_eq!(p("ZZ").embed(&[1, 3], 4).unwrap(), p("IZIZ"));
        assert_eq!(
            PauliProduct::identity(2).embed(&[1, 4], 6).unwrap(),
            PauliProduct::identity(6)
        );
        assert!(p("XX").embed(&[2, 1], 4).is_err());
        assert!(p("XX").embed(&[0, 4], 4).is_err());
    }

    #[test]
    fn weight_examples() {
        assert_eq!(PauliProduct::identity(3).weight(), 0);
        assert_eq!(p("XZZ").weight(), 3);
        assert_eq!(p("IZIZ").weight(), 2);
    }

    #[test]
    fn parse_display_round_trip() {
        for s in ["+XZZ", "-YY", "+iXZ", "-iZZZ", "+IIII"] {
            let q: PauliProduct = s.parse().unwrap();
            assert_eq!(q.to_string(), s.replace("+i", "+i").to_string());
        }
        assert_eq!(p("XZZ").to_string(), "+XZZ");
        assert!("".parse::<PauliProduct>().is_err());
        assert!("+XQ".parse::<PauliProduct>().is_err());
    }

    fn random_pauli(rng: &mut StdRng, n: usize) -> PauliProduct {
        let mut q = PauliProduct::identity(n);
        for i in 0..n {
            let f = match rng.gen_range(0..4) {
                0 => Factor::I,
                1 => Factor::X,
                2 => Factor::Y,
                _ => Factor::Z,
            };
            q.set_factor(i, f);
        }
        q.times_i(rng.gen_range(0..4))
    }

    #[test]
    fn multiply_associative_and_unital() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..1200 {
            let n = rng.gen_range(1..=16);
            let (a, b, c) = (
                random_pauli(&mut rng, n),
                random_pauli(&mut rng, n),
                random_pauli(&mut rng, n),
            );
            let ab_c = a.multiply(&b).unwrap().multiply(&c).unwrap();
            let a_bc = a.multiply(&b.multiply(&c).unwrap()).unwrap();
            assert_eq!(ab_c, a_bc);
            let id = PauliProduct::identity(n);
            assert_eq!(a.multiply(&id).unwrap(), a);
            assert_eq!(id.multiply(&a).unwrap(), a);
        }
    }

    #[test]
    fn product_order_differs_by_commutator_phase() {
        let mut rng = StdRng::seed_from_u64(12);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=16);
            let a = random_pauli(&mut rng, n);
            let b = random_pauli(&mut rng, n);
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            let offset = (ab.phase_exp() + 4 - ba.phase_exp()) % 4;
            assert_eq!(offset, 2 * a.anticommute_bit(&b));
        }
    }

    #[test]
    fn hadamard_is_involution() {
        let mut rng = StdRng::seed_from_u64(13);
        for _ in 0..500 {
            let n = rng.gen_range(1..=16);
            let a = random_pauli(&mut rng, n);
            assert_eq!(a.hadamard_all().hadamard_all(), a);
        }
    }

    #[test]
    fn dense_agreement_exhaustive_small() {
        // all bit patterns with all four phases for k = 1, 2
        for k in 1..=2usize {
            for code in 0..(1u32 << (2 * k)) {
                for ph in 0..4u8 {
                    let mut a = PauliProduct::from_packed_row(k, code as u64);
                    a = a.times_i(ph);
                    for code2 in 0..(1u32 << (2 * k)) {
                        let b = PauliProduct::from_packed_row(k, code2 as u64);
                        let prod = a.multiply(&b).unwrap();
                        let m = dense::pauli_matrix(&a).mul(&dense::pauli_matrix(&b));
                        assert!(dense::pauli_matrix(&prod).max_abs_diff(&m) < 1e-12);
                        let comm = a.commutes_with(&b).unwrap();
                        let ab = dense::pauli_matrix(&a).mul(&dense::pauli_matrix(&b));
                        let ba = dense::pauli_matrix(&b).mul(&dense::pauli_matrix(&a));
                        assert_eq!(comm, ab.max_abs_diff(&ba) < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn dense_agreement_sampled_three_qubit() {
        let mut rng = StdRng::seed_from_u64(14);
        let h = dense::hadamard_matrix(3);
        for _ in 0..60 {
            let a = random_pauli(&mut rng, 3);
            let b = random_pauli(&mut rng, 3);
            let prod = a.multiply(&b).unwrap();
            let m = dense::pauli_matrix(&a).mul(&dense::pauli_matrix(&b));
            assert!(dense::pauli_matrix(&prod).max_abs_diff(&m) < 1e-12);
            let had = h.mul(&dense::pauli_matrix(&a)).mul(&h);
            assert!(dense::pauli_matrix(&a.hadamard_all()).max_abs_diff(&had) < 1e-12);
        }
    }

    #[test]
    fn gate_conjugations_match_dense() {
        let mut rng = StdRng::seed_from_u64(15);
        for _ in 0..80 {
            let a = random_pauli(&mut rng, 2);
            let mut hq = a.clone();
            hq.conj_h(0);
            let h = dense::single_qubit_gate_matrix(dense::Gate1::H, 0, 2);
            assert!(
                dense::pauli_matrix(&hq)
                    .max_abs_diff(&h.mul(&dense::pauli_matrix(&a)).mul(&h.dagger()))
                    < 1e-12
            );
            let mut sq = a.clone();
            sq.conj_s(1);
            let s = dense::single_qubit_gate_matrix(dense::Gate1::S, 1, 2);
            assert!(
                dense::pauli_matrix(&sq)
                    .max_abs_diff(&s.mul(&dense::pauli_matrix(&a)).mul(&s.dagger()))
                    < 1e-12
            );
            let mut cq = a.clone();
            cq.conj_cnot(0, 1);
            let c = dense::cnot_matrix(0, 1, 2);
            assert!(
                dense::pauli_matrix(&cq)
                    .max_abs_diff(&c.mul(&dense::pauli_matrix(&a)).mul(&c.dagger()))
                    < 1e-12
            );
        }
    }

    proptest! {
        #[test]
        fn embed_then_restrict_is_identity(n in 1usize..8, seed in 0u64..1000) {
            let mut rng = StdRng::seed_from_u64(seed);
            let a = random_pauli(&mut rng, n);
            let total = n + rng.gen_range(0..4);
            // pick n strictly increasing positions in 0..total
            let mut positions: Vec<usize> = (0..total).collect();
            while positions.len() > n {
                let k = rng.gen_range(0..positions.len());
                positions.remove(k);
            }
            let e = a.embed(&positions, total).unwrap();
            let r = e.restrict(&positions).unwrap();
            prop_assert!(r.same_bits(&a));
            prop_assert_eq!(e.weight(), a.weight());
        }
    }
}
