//! Small dense state-vector / density-matrix oracle used to validate the
//! stabilizer machinery against exact linear algebra. Vectors go up to 12
//! qubits, matrices up to 8. Pauli actions are index permutations with
//! phases, so nothing here needs general matrix products beyond testing.

use std::fmt;

use num_complex::Complex64;

use crate::codes::StabilizerCode;
use crate::multicopy::MultiCopySetup;
use crate::pauli::{PauliProduct, Sign};
use crate::stab::StabilizerState;

pub const MAX_VECTOR_QUBITS: usize = 12;
pub const MAX_MATRIX_QUBITS: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub enum DenseError {
    Budget { qubits: usize, max: usize },
    ZeroProjector,
    Dimension { left: usize, right: usize },
    NotDensityMatrix(String),
}

impl fmt::Display for DenseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DenseError::Budget { qubits, max } => {
                write!(f, "dense oracle budget exceeded: {qubits} qubits (max {max})")
            }
            DenseError::ZeroProjector => write!(f, "projector annihilated every basis state"),
            DenseError::Dimension { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            DenseError::NotDensityMatrix(msg) => write!(f, "not a density matrix: {msg}"),
        }
    }
}

impl std::error::Error for DenseError {}

/// Amplitude vector on `2^num_qubits` basis states. Qubit 0 is the lowest
/// index bit.
#[derive(Clone, Debug)]
pub struct DenseVector {
    pub num_qubits: usize,
    pub amps: Vec<Complex64>,
}

impl DenseVector {
    pub fn basis_state(num_qubits: usize, index: usize) -> DenseVector {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        DenseVector { num_qubits, amps }
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> DenseVector {
        let n = self.norm();
        if n > 0.0 {
            for a in &mut self.amps {
                *a /= n;
            }
        }
        self
    }

    pub fn inner(&self, other: &DenseVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// Dense square matrix, row major.
#[derive(Clone, Debug)]
pub struct DenseMatrix {
    pub num_qubits: usize,
    pub data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn dim(&self) -> usize {
        1 << self.num_qubits
    }

    pub fn zero(num_qubits: usize) -> DenseMatrix {
        DenseMatrix {
            num_qubits,
            data: vec![Complex64::new(0.0, 0.0); 1 << (2 * num_qubits)],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        let d = self.dim();
        self.data[r * d + c] = v;
    }

    pub fn mul(&self, other: &DenseMatrix) -> DenseMatrix {
        assert_eq!(self.num_qubits, other.num_qubits);
        let d = self.dim();
        let mut out = DenseMatrix::zero(self.num_qubits);
        for r in 0..d {
            for k in 0..d {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..d {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> DenseMatrix {
        let d = self.dim();
        let mut out = DenseMatrix::zero(self.num_qubits);
        for r in 0..d {
            for c in 0..d {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Phase picked up when a Pauli product acts on basis state `b`:
/// `P|b> = phase(b) |b ^ x>` with `phase(b) = i^(p + #Y) (-1)^(z·b)`.
fn pauli_action_phase(p: &PauliProduct, b: usize) -> Complex64 {
    let n = p.num_qubits();
    let mut exp = p.phase_exp() as u32;
    let mut minus = 0u32;
    for q in 0..n {
        let (x, z) = (p.x_bit(q), p.z_bit(q));
        if x && z {
            exp += 1;
        }
        if z && (b >> q) & 1 == 1 {
            minus += 1;
        }
    }
    let i_pow = |k: u32| match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    i_pow(exp + 2 * minus)
}

fn pauli_x_mask(p: &PauliProduct) -> usize {
    (0..p.num_qubits())
        .filter(|&q| p.x_bit(q))
        .fold(0usize, |m, q| m | (1 << q))
}

/// Applies a Pauli product to a vector.
pub fn apply_pauli(p: &PauliProduct, v: &DenseVector) -> DenseVector {
    assert_eq!(p.num_qubits(), v.num_qubits);
    let xm = pauli_x_mask(p);
    let mut out = vec![Complex64::new(0.0, 0.0); v.amps.len()];
    for (b, &a) in v.amps.iter().enumerate() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        out[b ^ xm] = pauli_action_phase(p, b) * a;
    }
    DenseVector {
        num_qubits: v.num_qubits,
        amps: out,
    }
}

/// Conjugates a matrix by a Pauli product: `P ρ P†`.
pub fn conj_by_pauli(p: &PauliProduct, rho: &DenseMatrix) -> DenseMatrix {
    assert_eq!(p.num_qubits(), rho.num_qubits);
    let d = rho.dim();
    let xm = pauli_x_mask(p);
    let mut out = DenseMatrix::zero(rho.num_qubits);
    for r in 0..d {
        let pr = pauli_action_phase(p, r);
        for c in 0..d {
            let pc = pauli_action_phase(p, c);
            out.set(r ^ xm, c ^ xm, pr * pc.conj() * rho.get(r, c));
        }
    }
    out
}

/// Full matrix of a Pauli product (small sizes only; used by tests).
pub fn pauli_matrix(p: &PauliProduct) -> DenseMatrix {
    assert!(p.num_qubits() <= 6);
    let d = 1usize << p.num_qubits();
    let xm = pauli_x_mask(p);
    let mut m = DenseMatrix::zero(p.num_qubits());
    for b in 0..d {
        m.set(b ^ xm, b, pauli_action_phase(p, b));
    }
    m
}

/// Matrix of the transversal Hadamard on `num_qubits` qubits.
pub fn hadamard_matrix(num_qubits: usize) -> DenseMatrix {
    assert!(num_qubits <= 6);
    let d = 1usize << num_qubits;
    let scale = 1.0 / (d as f64).sqrt();
    let mut m = DenseMatrix::zero(num_qubits);
    for r in 0..d {
        for c in 0..d {
            let sign = if (r & c).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            m.set(r, c, Complex64::new(sign * scale, 0.0));
        }
    }
    m
}

#[derive(Clone, Copy, Debug)]
pub enum Gate1 {
    H,
    S,
}

/// Single-qubit gate embedded in a register (test support).
pub fn single_qubit_gate_matrix(gate: Gate1, q: usize, num_qubits: usize) -> DenseMatrix {
    assert!(num_qubits <= 6);
    let d = 1usize << num_qubits;
    let mut m = DenseMatrix::zero(num_qubits);
    let s2 = 1.0 / 2f64.sqrt();
    for b in 0..d {
        let bit = (b >> q) & 1;
        match gate {
            Gate1::H => {
                for (nb, amp) in [(b & !(1 << q), s2), (b | (1 << q), if bit == 1 { -s2 } else { s2 })] {
                    let v = m.get(nb, b) + Complex64::new(amp, 0.0);
                    m.set(nb, b, v);
                }
            }
            Gate1::S => {
                let amp = if bit == 1 {
                    Complex64::new(0.0, 1.0)
                } else {
                    Complex64::new(1.0, 0.0)
                };
                m.set(b, b, amp);
            }
        }
    }
    m
}

/// CNOT matrix embedded in a register (test support).
pub fn cnot_matrix(control: usize, target: usize, num_qubits: usize) -> DenseMatrix {
    assert!(num_qubits <= 6);
    let d = 1usize << num_qubits;
    let mut m = DenseMatrix::zero(num_qubits);
    for b in 0..d {
        let nb = if (b >> control) & 1 == 1 { b ^ (1 << target) } else { b };
        m.set(nb, b, Complex64::new(1.0, 0.0));
    }
    m
}

/// The unique joint +eigenvector of a full set of stabilizer generators,
/// built by applying the projector product to a reference basis state.
pub fn state_from_stabilizer(state: &StabilizerState) -> Result<DenseVector, DenseError> {
    let n = state.num_qubits();
    if n > MAX_VECTOR_QUBITS {
        return Err(DenseError::Budget {
            qubits: n,
            max: MAX_VECTOR_QUBITS,
        });
    }
    let project_all = |start: usize| -> DenseVector {
        let mut v = DenseVector::basis_state(n, start);
        for (s, g) in state.generators() {
            let gv = apply_pauli(g, &v);
            for (a, b) in v.amps.iter_mut().zip(gv.amps) {
                *a = (*a + s.as_f64() * b) * 0.5;
            }
        }
        v
    };
    // all-zeros reference first; fall back by scanning basis states
    for start in 0..(1usize << n) {
        let v = project_all(start);
        if v.norm() > 1e-9 {
            return Ok(v.normalized());
        }
    }
    Err(DenseError::ZeroProjector)
}

/// True iff `p|v> = sign |v>` within `tol`.
pub fn is_eigenvector(p: &PauliProduct, v: &DenseVector, sign: Sign, tol: f64) -> bool {
    let pv = apply_pauli(p, v);
    pv.amps
        .iter()
        .zip(&v.amps)
        .all(|(a, b)| (a - sign.as_f64() * b).norm() <= tol)
}

/// Projects a vector onto the `sign` eigenspace of `p` (unnormalized).
pub fn project(p: &PauliProduct, sign: Sign, v: &DenseVector) -> DenseVector {
    let pv = apply_pauli(p, v);
    let amps = v
        .amps
        .iter()
        .zip(pv.amps)
        .map(|(a, b)| (a + sign.as_f64() * b) * 0.5)
        .collect();
    DenseVector {
        num_qubits: v.num_qubits,
        amps,
    }
}

fn validate_density(rho: &DenseMatrix) -> Result<(), DenseError> {
    let tr = rho.trace();
    if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-8 {
        return Err(DenseError::NotDensityMatrix(format!("trace {tr}")));
    }
    let d = rho.dim();
    for r in 0..d {
        for c in 0..d {
            if (rho.get(r, c) - rho.get(c, r).conj()).norm() > 1e-8 {
                return Err(DenseError::NotDensityMatrix("not Hermitian".into()));
            }
        }
    }
    Ok(())
}

/// Averages `ρ` over the full stabilizer group of `state` and returns the
/// largest off-diagonal magnitude in the syndrome eigenbasis. The averaging
/// theorem predicts a residual at numerical noise level (≤ 1e-10).
pub fn verify_twirl(rho: &DenseMatrix, state: &StabilizerState) -> Result<f64, DenseError> {
    let n = state.num_qubits();
    if n > MAX_MATRIX_QUBITS {
        return Err(DenseError::Budget {
            qubits: n,
            max: MAX_MATRIX_QUBITS,
        });
    }
    if rho.num_qubits != n {
        return Err(DenseError::Dimension {
            left: rho.num_qubits,
            right: n,
        });
    }
    validate_density(rho)?;

    // average over all group elements (signs are irrelevant to conjugation)
    let count = 1usize << n;
    let mut avg = DenseMatrix::zero(n);
    for mask in 0..count {
        let mut q = PauliProduct::identity(n);
        for (j, (_, g)) in state.generators().enumerate() {
            if (mask >> j) & 1 == 1 {
                q.mul_assign(g);
            }
        }
        let c = conj_by_pauli(&q, rho);
        for (a, b) in avg.data.iter_mut().zip(c.data) {
            *a += b / count as f64;
        }
    }

    // syndrome eigenbasis: destabilizer images of the base state
    let base = state_from_stabilizer(state)?;
    let destab = state.destabilizers();
    let mut basis = Vec::with_capacity(count);
    for s in 0..count {
        let mut v = base.clone();
        for (j, d) in destab.iter().enumerate() {
            if (s >> j) & 1 == 1 {
                v = apply_pauli(d, &v);
            }
        }
        basis.push(v);
    }

    let mut max_off = 0.0f64;
    let dim = avg.dim();
    for s in 0..count {
        // w = avg |basis_s>
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        for r in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..dim {
                acc += avg.get(r, c) * basis[s].amps[c];
            }
            w[r] = acc;
        }
        for t in 0..count {
            if t == s {
                continue;
            }
            let element: Complex64 = basis[t]
                .amps
                .iter()
                .zip(&w)
                .map(|(a, b)| a.conj() * b)
                .sum();
            max_off = max_off.max(element.norm());
        }
    }
    Ok(max_off)
}

/// Simulates the ideal zero-error protocol densely: builds the multi-copy
/// state, projects every single-party parity check onto +1, and checks that
/// each operator in `encoded_targets` stabilizes the result with sign +1.
///
/// Runs when `copies · parties ≤ 12`; larger systems must be verified with
/// the stabilizer-algebra route instead.
pub fn verify_decoded_state(
    master: &StabilizerState,
    code: &StabilizerCode,
    encoded_targets: &[PauliProduct],
) -> Result<bool, DenseError> {
    let setup = MultiCopySetup::new(master.clone(), code.num_physical());
    let total = setup.total_qubits();
    if total > MAX_VECTOR_QUBITS {
        return Err(DenseError::Budget {
            qubits: total,
            max: MAX_VECTOR_QUBITS,
        });
    }
    let multistate = setup.multicopy_state();
    let mut v = state_from_stabilizer(&multistate)?;
    for party in 0..setup.parties() {
        let positions = setup.column_positions(party);
        for (_, check) in code.checks().generators() {
            let embedded = check.embed(&positions, total).expect("column embed");
            v = project(&embedded, Sign::Plus, &v);
            let norm = v.norm();
            if norm < 1e-9 {
                return Err(DenseError::ZeroProjector);
            }
            v = v.normalized();
        }
    }
    Ok(encoded_targets
        .iter()
        .all(|t| is_eigenvector(t, &v, Sign::Plus, 1e-10)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(s: &str) -> PauliProduct {
        s.parse().unwrap()
    }

    #[test]
    fn bell_amplitudes() {
        let bell = StabilizerState::builtin("bell").unwrap();
        let v = state_from_stabilizer(&bell).unwrap();
        let s2 = 1.0 / 2f64.sqrt();
        assert!((v.amps[0].norm() - s2).abs() < 1e-12);
        assert!((v.amps[3].norm() - s2).abs() < 1e-12);
        assert!(v.amps[1].norm() < 1e-12 && v.amps[2].norm() < 1e-12);
        // relative phase: both amplitudes equal
        assert!((v.amps[0] - v.amps[3]).norm() < 1e-12);
    }

    #[test]
    fn ghz_amplitudes() {
        let ghz = StabilizerState::builtin("ghz3").unwrap();
        let v = state_from_stabilizer(&ghz).unwrap();
        assert!((v.amps[0] - v.amps[7]).norm() < 1e-12);
        assert!((v.amps[0].norm() - 1.0 / 2f64.sqrt()).abs() < 1e-12);
        for k in 1..7 {
            assert!(v.amps[k].norm() < 1e-12);
        }
    }

    #[test]
    fn plus_state() {
        let plus = StabilizerState::new(vec![p("+X")]).unwrap();
        let v = state_from_stabilizer(&plus).unwrap();
        assert!((v.amps[0] - v.amps[1]).norm() < 1e-12);
    }

    #[test]
    fn state_invariant_under_generator_change() {
        let a = StabilizerState::new(vec![p("+XX"), p("+ZZ")]).unwrap();
        let b = StabilizerState::new(vec![p("+XX"), p("-YY")]).unwrap();
        let va = state_from_stabilizer(&a).unwrap();
        let vb = state_from_stabilizer(&b).unwrap();
        assert!((va.inner(&vb).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn contains_matches_eigenvectors_exhaustive_two_qubits() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..10 {
            let s = crate::stab::random_stabilizer_state(2, &mut rng);
            let v = state_from_stabilizer(&s).unwrap();
            for code in 0..16u64 {
                let q = PauliProduct::from_packed_row(2, code);
                match s.contains(&q) {
                    Some(sign) => assert!(is_eigenvector(&q, &v, sign, 1e-10)),
                    None => {
                        assert!(!is_eigenvector(&q, &v, Sign::Plus, 1e-6));
                        assert!(!is_eigenvector(&q, &v, Sign::Minus, 1e-6));
                    }
                }
            }
        }
    }

    #[test]
    fn contains_matches_eigenvectors_sampled_four_qubits() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..6 {
            let s = crate::stab::random_stabilizer_state(4, &mut rng);
            let v = state_from_stabilizer(&s).unwrap();
            for _ in 0..40 {
                let q = PauliProduct::from_packed_row(4, rng.gen_range(0..256));
                match s.contains(&q) {
                    Some(sign) => assert!(is_eigenvector(&q, &v, sign, 1e-10)),
                    None => {
                        assert!(!is_eigenvector(&q, &v, Sign::Plus, 1e-6));
                        assert!(!is_eigenvector(&q, &v, Sign::Minus, 1e-6));
                    }
                }
            }
        }
    }

    pub(crate) fn random_density(n: usize, rng: &mut StdRng) -> DenseMatrix {
        let d = 1usize << n;
        let terms = 3;
        let mut weights: Vec<f64> = (0..terms).map(|_| rng.gen::<f64>() + 0.05).collect();
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        let mut rho = DenseMatrix::zero(n);
        for w in weights {
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
                .collect();
            let v = DenseVector { num_qubits: n, amps }.normalized();
            for r in 0..d {
                for c in 0..d {
                    let val = rho.get(r, c) + w * v.amps[r] * v.amps[c].conj();
                    rho.set(r, c, val);
                }
            }
        }
        rho
    }

    #[test]
    fn twirl_diagonalizes_random_density_matrices() {
        let mut rng = StdRng::seed_from_u64(43);
        let bell = StabilizerState::builtin("bell").unwrap();
        for _ in 0..5 {
            let rho = random_density(2, &mut rng);
            let res = verify_twirl(&rho, &bell).unwrap();
            assert!(res < 1e-10, "residual {res}");
        }
    }

    #[test]
    fn twirl_fixed_points() {
        let bell = StabilizerState::builtin("bell").unwrap();
        let v = state_from_stabilizer(&bell).unwrap();
        let mut rho = DenseMatrix::zero(2);
        for r in 0..4 {
            for c in 0..4 {
                rho.set(r, c, v.amps[r] * v.amps[c].conj());
            }
        }
        // pure stabilized state is unchanged by the averaging
        let mut avg = DenseMatrix::zero(2);
        for mask in 0..4usize {
            let mut q = PauliProduct::identity(2);
            for (j, (_, g)) in bell.generators().enumerate() {
                if (mask >> j) & 1 == 1 {
                    q.mul_assign(g);
                }
            }
            let c = conj_by_pauli(&q, &rho);
            for (a, b) in avg.data.iter_mut().zip(c.data) {
                *a += b / 4.0;
            }
        }
        assert!(avg.max_abs_diff(&rho) < 1e-12);
        assert!(verify_twirl(&rho, &bell).unwrap() < 1e-12);
    }
}
