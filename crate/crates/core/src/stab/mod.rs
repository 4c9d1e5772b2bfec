//! Stabilizer groups and states: canonical form over GF(2) with exact sign
//! tracking, membership with sign, group equality, and the CSS structure
//! checks used by the code and state classifiers.

mod classify;

pub use classify::{classify_state, AxisPerm, Classification, CssWitness, LocalCliffordLayer};

use std::fmt;
use std::str::FromStr;

use crate::pauli::{Factor, PauliError, PauliProduct, Sign};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupError {
    NotHermitian { index: usize },
    NonCommuting { first: usize, second: usize },
    Dependent { index: usize },
    Inconsistent { index: usize },
    LengthMismatch { index: usize, expected: usize, got: usize },
    WrongGeneratorCount { expected: usize, got: usize },
    Empty,
    Pauli(PauliError),
}

impl fmt::Display for GroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupError::NotHermitian { index } => {
                write!(f, "generator {} is not Hermitian", index + 1)
            }
            GroupError::NonCommuting { first, second } => write!(
                f,
                "generators {} and {} anticommute",
                first + 1,
                second + 1
            ),
            GroupError::Dependent { index } => {
                write!(f, "generator {} is a product of earlier generators", index + 1)
            }
            GroupError::Inconsistent { index } => write!(
                f,
                "generator {} contradicts the earlier generators (the group would contain -I)",
                index + 1
            ),
            GroupError::LengthMismatch { index, expected, got } => write!(
                f,
                "generator {} acts on {got} qubits, expected {expected}",
                index + 1
            ),
            GroupError::WrongGeneratorCount { expected, got } => {
                write!(f, "state needs {expected} independent generators, got {got}")
            }
            GroupError::Empty => write!(f, "no generators given"),
            GroupError::Pauli(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for GroupError {}

impl From<PauliError> for GroupError {
    fn from(e: PauliError) -> Self {
        GroupError::Pauli(e)
    }
}

/// Unique reduced echelon form of a generating set, with signs and the
/// combination of original generators that produced each row.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    rows: Vec<PauliProduct>, // phase in {0, 2}; sign carried inline
    pivots: Vec<usize>,      // column: x bits at 0..n, z bits at n..2n
    combos: Vec<u64>,        // mask over original generators
}

impl CanonicalForm {
    pub fn rows(&self) -> &[PauliProduct] {
        &self.rows
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn col_bit(p: &PauliProduct, col: usize) -> bool {
        let n = p.num_qubits();
        if col < n {
            p.x_bit(col)
        } else {
            p.z_bit(col - n)
        }
    }

    /// Reduces `p`'s bit pattern against the rows. Returns the residual bits
    /// (zero iff in span), the accumulated signed group element, and the
    /// combination mask of original generators used.
    fn reduce(&self, p: &PauliProduct) -> (PauliProduct, PauliProduct, u64) {
        let mut residual = p.unsigned();
        let mut acc = PauliProduct::identity(p.num_qubits());
        let mut combo = 0u64;
        for (k, row) in self.rows.iter().enumerate() {
            if Self::col_bit(&residual, self.pivots[k]) {
                acc.mul_assign(row);
                let mut r = residual.clone();
                r.mul_assign(&row.unsigned());
                residual = r.unsigned();
                combo ^= self.combos[k];
            }
        }
        (residual, acc, combo)
    }
}

/// An abelian subgroup of the Pauli group given by independent, commuting,
/// Hermitian generators with tracked eigenvalue signs.
#[derive(Clone, Debug)]
pub struct PauliGroup {
    num_qubits: usize,
    gens: Vec<PauliProduct>, // phase 0
    signs: Vec<Sign>,
    canon: CanonicalForm,
}

impl PauliGroup {
    /// Validates Hermiticity, pairwise commutation, and independence, and
    /// computes the canonical form. Signs are split off the given phases.
    pub fn new(generators: Vec<PauliProduct>) -> Result<PauliGroup, GroupError> {
        if generators.is_empty() {
            return Err(GroupError::Empty);
        }
        let num_qubits = generators[0].num_qubits();
        let mut gens = Vec::with_capacity(generators.len());
        let mut signs = Vec::with_capacity(generators.len());
        for (i, g) in generators.iter().enumerate() {
            if g.num_qubits() != num_qubits {
                return Err(GroupError::LengthMismatch {
                    index: i,
                    expected: num_qubits,
                    got: g.num_qubits(),
                });
            }
            let sign = g.sign().map_err(|_| GroupError::NotHermitian { index: i })?;
            gens.push(g.unsigned());
            signs.push(sign);
        }
        for i in 0..gens.len() {
            for j in (i + 1)..gens.len() {
                if gens[i].anticommute_bit(&gens[j]) == 1 {
                    return Err(GroupError::NonCommuting { first: i, second: j });
                }
            }
        }
        let canon = Self::canonicalize(num_qubits, &gens, &signs)?;
        Ok(PauliGroup {
            num_qubits,
            gens,
            signs,
            canon,
        })
    }

    fn canonicalize(
        num_qubits: usize,
        gens: &[PauliProduct],
        signs: &[Sign],
    ) -> Result<CanonicalForm, GroupError> {
        // working rows carry the sign inline as phase 0/2
        let mut rows: Vec<PauliProduct> = gens
            .iter()
            .zip(signs)
            .map(|(g, s)| g.times_i(s.phase_exp()))
            .collect();
        let mut combos: Vec<u64> = (0..rows.len()).map(|i| 1u64 << i).collect();
        let mut pivots = Vec::new();
        let mut rank = 0usize;
        for col in 0..(2 * num_qubits) {
            let Some(pivot) = (rank..rows.len()).find(|&i| CanonicalForm::col_bit(&rows[i], col))
            else {
                continue;
            };
            rows.swap(rank, pivot);
            combos.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            let pivot_combo = combos[rank];
            for i in 0..rows.len() {
                if i != rank && CanonicalForm::col_bit(&rows[i], col) {
                    rows[i].mul_assign(&pivot_row);
                    combos[i] ^= pivot_combo;
                }
            }
            pivots.push(col);
            rank += 1;
        }
        // anything left reduced to identity bits: dependent or contradictory
        for (i, row) in rows.iter().enumerate().skip(rank) {
            if row.is_identity_bits() {
                let original = combos[i].trailing_zeros() as usize;
                // combo mask sorts to the highest original index involved
                let index = (0..64)
                    .rev()
                    .find(|&b| combos[i] & (1 << b) != 0)
                    .unwrap_or(original);
                return match row.sign() {
                    Ok(Sign::Plus) => Err(GroupError::Dependent { index }),
                    _ => Err(GroupError::Inconsistent { index }),
                };
            }
        }
        rows.truncate(rank);
        combos.truncate(rank);
        Ok(CanonicalForm {
            rows,
            pivots,
            combos,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn rank(&self) -> usize {
        self.canon.rows.len()
    }

    /// Generator `i` as a phase-0 product plus its eigenvalue sign.
    pub fn generator(&self, i: usize) -> (Sign, &PauliProduct) {
        (self.signs[i], &self.gens[i])
    }

    /// Generator `i` with its sign folded into the phase.
    pub fn signed_generator(&self, i: usize) -> PauliProduct {
        self.gens[i].times_i(self.signs[i].phase_exp())
    }

    pub fn generators(&self) -> impl Iterator<Item = (Sign, &PauliProduct)> {
        self.signs.iter().copied().zip(self.gens.iter())
    }

    pub fn canonical_form(&self) -> &CanonicalForm {
        &self.canon
    }

    /// Membership of the bit pattern of `p`: the sign the pattern carries in
    /// the group, or `None` when the bits are not in the span. The phase of
    /// `p` itself is ignored.
    pub fn contains(&self, p: &PauliProduct) -> Option<Sign> {
        self.contains_with_combo(p).map(|(s, _)| s)
    }

    /// Like `contains`, also reporting which original generators multiply to
    /// the element (as a bit mask).
    pub fn contains_with_combo(&self, p: &PauliProduct) -> Option<(Sign, u64)> {
        if p.num_qubits() != self.num_qubits {
            return None;
        }
        let (residual, acc, combo) = self.canon.reduce(p);
        if residual.is_identity_bits() {
            Some((acc.sign().expect("group elements are Hermitian"), combo))
        } else {
            None
        }
    }

    /// True iff `p` itself, sign included, is an element of the group.
    pub fn contains_operator(&self, p: &PauliProduct) -> bool {
        match (p.sign(), self.contains(p)) {
            (Ok(s), Some(t)) => s == t,
            _ => false,
        }
    }

    /// Canonical coset representative of `p` modulo the group: `p` multiplied
    /// by signed group elements until no pivot bit remains, phase tracked.
    pub fn reduce_operator(&self, p: &PauliProduct) -> PauliProduct {
        let mut reduced = p.clone();
        for (k, row) in self.canon.rows.iter().enumerate() {
            if CanonicalForm::col_bit(&reduced, self.canon.pivots[k]) {
                reduced.mul_assign(row);
            }
        }
        reduced
    }

    /// Group equality including signs.
    pub fn equals_group(&self, other: &PauliGroup) -> bool {
        self.num_qubits == other.num_qubits
            && self.canon.pivots == other.canon.pivots
            && self.canon.rows == other.canon.rows
    }

    /// Image of the group under transversal Hadamard, eigenvalues carried
    /// along (a generator with sign s maps to its conjugate with sign s).
    pub fn hadamard_image(&self) -> PauliGroup {
        let gens: Vec<PauliProduct> = self
            .generators()
            .map(|(s, g)| g.hadamard_all().times_i(s.phase_exp()))
            .collect();
        PauliGroup::new(gens).expect("conjugation preserves group validity")
    }

    /// Flips the sign of every generator that anticommutes with `p`.
    pub fn apply_pauli_frame(&self, p: &PauliProduct) -> PauliGroup {
        let gens: Vec<PauliProduct> = self
            .generators()
            .map(|(s, g)| {
                let s = if g.anticommute_bit(p) == 1 { s.flipped() } else { s };
                g.times_i(s.phase_exp())
            })
            .collect();
        PauliGroup::new(gens).expect("sign flips preserve group validity")
    }

    /// Same group with every eigenvalue forced to +1.
    pub fn sign_normalized(&self) -> PauliGroup {
        PauliGroup::new(self.gens.clone()).expect("bits unchanged")
    }

    fn x_rank(&self) -> usize {
        let rows: Vec<u64> = self.gens.iter().map(row_x_bits).collect();
        crate::gf2::rank(&rows, self.num_qubits)
    }

    fn z_rank(&self) -> usize {
        let rows: Vec<u64> = self.gens.iter().map(row_z_bits).collect();
        crate::gf2::rank(&rows, self.num_qubits)
    }

    /// True iff the group admits a generating set in which every generator
    /// is X-type or Z-type. Structural: the X-type and Z-type subgroups must
    /// together span the group.
    pub fn is_css_form(&self) -> bool {
        let r = self.rank();
        (r - self.z_rank()) + (r - self.x_rank()) == r
    }

    /// A generating set split into X-type and Z-type elements, when one
    /// exists. Generators that are already pure keep their order; otherwise
    /// the split is derived by elimination.
    pub fn css_generating_set(&self) -> Option<CssSplit> {
        if !self.is_css_form() {
            return None;
        }
        let pure = |g: &PauliProduct| {
            g.support().iter().all(|&q| !g.z_bit(q)) || g.support().iter().all(|&q| !g.x_bit(q))
        };
        if self.gens.iter().all(pure) {
            let mut x_type = Vec::new();
            let mut z_type = Vec::new();
            for (s, g) in self.generators() {
                let signed = g.times_i(s.phase_exp());
                if g.support().iter().all(|&q| !g.z_bit(q)) {
                    x_type.push(signed);
                } else {
                    z_type.push(signed);
                }
            }
            return Some(CssSplit { x_type, z_type });
        }
        Some(CssSplit {
            x_type: self.typed_subgroup_basis(true),
            z_type: self.typed_subgroup_basis(false),
        })
    }

    /// Basis of the subgroup of pure X-type (or Z-type) elements, signs
    /// tracked through the elimination.
    fn typed_subgroup_basis(&self, x_type: bool) -> Vec<PauliProduct> {
        let mut rows: Vec<PauliProduct> = self
            .generators()
            .map(|(s, g)| g.times_i(s.phase_exp()))
            .collect();
        let n = self.num_qubits;
        // eliminate on the unwanted component first; rows left with that
        // component zero form the typed subgroup
        let unwanted_bit = |p: &PauliProduct, q: usize| if x_type { p.z_bit(q) } else { p.x_bit(q) };
        let mut rank = 0usize;
        for q in 0..n {
            let Some(pivot) = (rank..rows.len()).find(|&i| unwanted_bit(&rows[i], q)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for i in 0..rows.len() {
                if i != rank && unwanted_bit(&rows[i], q) {
                    rows[i].mul_assign(&pivot_row);
                }
            }
            rank += 1;
        }
        rows.drain(..rank);
        rows.retain(|r| !r.is_identity_bits());
        rows
    }

    /// Pauli products `d_i` with `⟨d_i, g_j⟩ = δ_ij` against the generators.
    /// Exists whenever the generators are independent.
    pub fn destabilizers(&self) -> Vec<PauliProduct> {
        assert!(2 * self.num_qubits <= 64, "destabilizers need at most 32 qubits");
        let n = self.num_qubits;
        // the symplectic product of v against generator g is (z_g | x_g)·v
        let rows: Vec<u64> = self
            .gens
            .iter()
            .map(|g| {
                let mut r = 0u64;
                for q in 0..n {
                    if g.z_bit(q) {
                        r |= 1 << q;
                    }
                    if g.x_bit(q) {
                        r |= 1 << (n + q);
                    }
                }
                r
            })
            .collect();
        (0..self.gens.len())
            .map(|j| {
                let v = crate::gf2::solve(&rows, 2 * n, 1u64 << j)
                    .expect("independent generators give a nondegenerate system");
                PauliProduct::from_packed_row(n, v)
            })
            .collect()
    }
}

fn row_x_bits(g: &PauliProduct) -> u64 {
    let n = g.num_qubits();
    assert!(n <= 64);
    (0..n).filter(|&q| g.x_bit(q)).fold(0u64, |a, q| a | (1 << q))
}

fn row_z_bits(g: &PauliProduct) -> u64 {
    let n = g.num_qubits();
    assert!(n <= 64);
    (0..n).filter(|&q| g.z_bit(q)).fold(0u64, |a, q| a | (1 << q))
}

/// CSS generating set of a group: pure X-type and pure Z-type elements.
#[derive(Clone, Debug)]
pub struct CssSplit {
    pub x_type: Vec<PauliProduct>,
    pub z_type: Vec<PauliProduct>,
}

/// Classification of a stabilizer state under exhaustive local Clifford
/// search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StateClass {
    /// Reaches a CSS form whose group is invariant under transversal
    /// Hadamard.
    CssH,
    /// Reaches a CSS form but no Hadamard-invariant one.
    Css,
    /// No local Clifford image is in CSS form.
    General,
    /// Search budget exceeded and no positive answer found.
    Unknown,
}

impl fmt::Display for StateClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateClass::CssH => write!(f, "CSS-H"),
            StateClass::Css => write!(f, "CSS"),
            StateClass::General => write!(f, "GENERAL"),
            StateClass::Unknown => write!(f, "UNKNOWN"),
        }
    }
}

/// A pure stabilizer state: as many independent commuting generators as
/// qubits, each with an eigenvalue sign.
#[derive(Clone, Debug)]
pub struct StabilizerState {
    group: PauliGroup,
}

impl StabilizerState {
    pub fn new(generators: Vec<PauliProduct>) -> Result<StabilizerState, GroupError> {
        let group = PauliGroup::new(generators)?;
        if group.len() != group.num_qubits() {
            return Err(GroupError::WrongGeneratorCount {
                expected: group.num_qubits(),
                got: group.len(),
            });
        }
        Ok(StabilizerState { group })
    }

    pub fn group(&self) -> &PauliGroup {
        &self.group
    }

    pub fn num_qubits(&self) -> usize {
        self.group.num_qubits()
    }

    pub fn generator(&self, i: usize) -> (Sign, &PauliProduct) {
        self.group.generator(i)
    }

    pub fn generators(&self) -> impl Iterator<Item = (Sign, &PauliProduct)> {
        self.group.generators()
    }

    pub fn contains(&self, p: &PauliProduct) -> Option<Sign> {
        self.group.contains(p)
    }

    pub fn equals_group(&self, other: &StabilizerState) -> bool {
        self.group.equals_group(&other.group)
    }

    pub fn is_css_form(&self) -> bool {
        self.group.is_css_form()
    }

    pub fn apply_pauli_frame(&self, p: &PauliProduct) -> StabilizerState {
        StabilizerState {
            group: self.group.apply_pauli_frame(p),
        }
    }

    pub fn sign_normalized(&self) -> StabilizerState {
        StabilizerState {
            group: self.group.sign_normalized(),
        }
    }

    pub fn destabilizers(&self) -> Vec<PauliProduct> {
        self.group.destabilizers()
    }

    /// Builtin states usable by name from the CLI.
    pub fn builtin(name: &str) -> Option<StabilizerState> {
        let gens: &[&str] = match name.to_ascii_lowercase().as_str() {
            "bell" => &["+XX", "+ZZ"],
            "ghz3" => &["+ZZI", "+XXX", "+IZZ"],
            "ghz4" => &["+ZZII", "+IZZI", "+IIZZ", "+XXXX"],
            "triangle" => &["+XZZ", "+ZXZ", "+ZZX"],
            _ => return None,
        };
        let parsed: Vec<PauliProduct> = gens.iter().map(|s| s.parse().unwrap()).collect();
        Some(StabilizerState::new(parsed).unwrap())
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["bell", "ghz3", "ghz4", "triangle"]
    }

    /// Graph state of the given simple graph: one generator per vertex,
    /// X on the vertex and Z on its neighbours.
    pub fn graph_state(num_qubits: usize, edges: &[(usize, usize)]) -> Result<StabilizerState, GroupError> {
        let mut gens = Vec::with_capacity(num_qubits);
        for v in 0..num_qubits {
            let mut g = PauliProduct::single(num_qubits, v, Factor::X);
            for &(a, b) in edges {
                if a == v {
                    g.set_factor(b, Factor::Z);
                } else if b == v {
                    g.set_factor(a, Factor::Z);
                }
            }
            gens.push(g);
        }
        StabilizerState::new(gens)
    }

    /// Line-oriented text form: `qubits: n` then one `gen:` line per
    /// generator.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("qubits: {}\n", self.num_qubits());
        for (s, g) in self.generators() {
            out.push_str(&format!("gen: {}\n", g.times_i(s.phase_exp())));
        }
        out
    }
}

impl FromStr for StabilizerState {
    type Err = StateParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (num_qubits, gens, lines) = parse_generator_lines(text)?;
        let state = StabilizerState::new(gens).map_err(|e| {
            let line = group_error_line(&e, &lines);
            StateParseError { line, message: e.to_string() }
        })?;
        if state.num_qubits() != num_qubits {
            return Err(StateParseError {
                line: 1,
                message: format!("header says {num_qubits} qubits"),
            });
        }
        Ok(state)
    }
}

/// Parse failure with the 1-based line it occurred on.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for StateParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for StateParseError {}

pub(crate) fn group_error_line(e: &GroupError, gen_lines: &[usize]) -> usize {
    let idx = match e {
        GroupError::NotHermitian { index }
        | GroupError::Dependent { index }
        | GroupError::Inconsistent { index }
        | GroupError::LengthMismatch { index, .. } => *index,
        GroupError::NonCommuting { second, .. } => *second,
        _ => return 1,
    };
    gen_lines.get(idx).copied().unwrap_or(1)
}

/// Shared parser for the state and code file formats: returns the declared
/// qubit count, the `gen:` operators, and the line number of each.
pub(crate) fn parse_generator_lines(
    text: &str,
) -> Result<(usize, Vec<PauliProduct>, Vec<usize>), StateParseError> {
    let mut num_qubits = None;
    let mut gens = Vec::new();
    let mut gen_lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix("qubits:") {
            let n: usize = rest.trim().parse().map_err(|_| StateParseError {
                line: lineno,
                message: format!("bad qubit count '{}'", rest.trim()),
            })?;
            num_qubits = Some(n);
        } else if let Some(rest) = line.strip_prefix("gen:") {
            let p: PauliProduct = rest.trim().parse().map_err(|e: PauliError| StateParseError {
                line: lineno,
                message: e.to_string(),
            })?;
            gens.push(p);
            gen_lines.push(lineno);
        } else if line.starts_with("logical_x:") || line.starts_with("logical_z:") {
            // handled by the code parser; ignore here
            continue;
        } else {
            return Err(StateParseError {
                line: lineno,
                message: format!("unrecognized line '{line}'"),
            });
        }
    }
    let num_qubits = num_qubits.ok_or(StateParseError {
        line: 1,
        message: "missing 'qubits:' header".into(),
    })?;
    for (k, g) in gens.iter().enumerate() {
        if g.num_qubits() != num_qubits {
            return Err(StateParseError {
                line: gen_lines[k],
                message: format!(
                    "operator has {} qubits, header says {num_qubits}",
                    g.num_qubits()
                ),
            });
        }
    }
    Ok((num_qubits, gens, gen_lines))
}

/// A random pure stabilizer state drawn by conjugating the computational
/// basis state through a random Clifford circuit, with random signs.
pub fn random_stabilizer_state<R: rand::Rng + ?Sized>(
    num_qubits: usize,
    rng: &mut R,
) -> StabilizerState {
    let mut gens: Vec<PauliProduct> = (0..num_qubits)
        .map(|q| PauliProduct::single(num_qubits, q, Factor::Z))
        .collect();
    let steps = 3 * num_qubits * num_qubits + 6;
    for _ in 0..steps {
        match rng.gen_range(0..3) {
            0 => {
                let q = rng.gen_range(0..num_qubits);
                gens.iter_mut().for_each(|g| g.conj_h(q));
            }
            1 => {
                let q = rng.gen_range(0..num_qubits);
                gens.iter_mut().for_each(|g| g.conj_s(q));
            }
            _ => {
                if num_qubits >= 2 {
                    let a = rng.gen_range(0..num_qubits);
                    let mut b = rng.gen_range(0..num_qubits);
                    while b == a {
                        b = rng.gen_range(0..num_qubits);
                    }
                    gens.iter_mut().for_each(|g| g.conj_cnot(a, b));
                }
            }
        }
    }
    // random eigenvalue pattern
    for g in gens.iter_mut() {
        if rng.gen::<bool>() {
            *g = g.negated();
        }
    }
    StabilizerState::new(gens).expect("Clifford conjugation preserves validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn p(s: &str) -> PauliProduct {
        s.parse().unwrap()
    }

    fn state(gens: &[&str]) -> StabilizerState {
        StabilizerState::new(gens.iter().map(|s| p(s)).collect()).unwrap()
    }

    #[test]
    fn bell_canonical_pivots() {
        let bell = state(&["+XX", "+ZZ"]);
        assert_eq!(bell.group().canonical_form().pivots(), &[0, 2]);
    }

    #[test]
    fn dependent_sets_rejected() {
        // same bits, contradictory sign: the group would contain -I
        let err = StabilizerState::new(vec![p("+XX"), p("-XX")]).unwrap_err();
        assert!(matches!(err, GroupError::Inconsistent { .. }));
        // consistent but redundant third generator
        let err = PauliGroup::new(vec![p("+XX"), p("+ZZ"), p("-YY")]).unwrap_err();
        assert!(matches!(err, GroupError::Dependent { index: 2 }));
        let err = StabilizerState::new(vec![p("+XX"), p("+ZI")]).unwrap_err();
        assert!(matches!(err, GroupError::NonCommuting { .. }));
    }

    #[test]
    fn triangle_full_rank() {
        let tri = StabilizerState::builtin("triangle").unwrap();
        assert_eq!(tri.group().rank(), 3);
    }

    #[test]
    fn contains_examples() {
        let bell = StabilizerState::builtin("bell").unwrap();
        assert_eq!(bell.contains(&p("+YY")), Some(Sign::Minus));
        let ghz = StabilizerState::builtin("ghz3").unwrap();
        assert_eq!(ghz.contains(&p("+ZIZ")), Some(Sign::Plus));
        let tri = StabilizerState::builtin("triangle").unwrap();
        assert_eq!(tri.contains(&p("+XXI")), None);
    }

    #[test]
    fn bell_yy_sign_matches_dense() {
        let bell = StabilizerState::builtin("bell").unwrap();
        let v = dense::state_from_stabilizer(&bell).unwrap();
        assert!(dense::is_eigenvector(&p("YY"), &v, Sign::Minus, 1e-10));
    }

    #[test]
    fn group_equality() {
        let a = state(&["+XX", "+ZZ"]);
        let b = state(&["+ZZ", "+XX"]);
        assert!(a.equals_group(&b));
        let c = state(&["-XX", "+ZZ"]);
        assert!(!a.equals_group(&c));
        // different generating set, same group
        let d = state(&["+XX", "-YY"]);
        assert!(a.equals_group(&d));
    }

    #[test]
    fn css_form_examples() {
        assert!(StabilizerState::builtin("ghz3").unwrap().is_css_form());
        assert!(!StabilizerState::builtin("triangle").unwrap().is_css_form());
        let c6_checks = PauliGroup::new(vec![
            p("+XIXXIX"),
            p("+IXXIXX"),
            p("+ZIZZIZ"),
            p("+IZZIZZ"),
        ])
        .unwrap();
        assert!(c6_checks.is_css_form());
    }

    #[test]
    fn pauli_frame_examples() {
        let bell = StabilizerState::builtin("bell").unwrap();
        let flipped = bell.apply_pauli_frame(&p("ZI"));
        assert_eq!(flipped.generator(0).0, Sign::Minus); // XX
        assert_eq!(flipped.generator(1).0, Sign::Plus); // ZZ
        let same = bell.apply_pauli_frame(&PauliProduct::identity(2));
        assert!(bell.equals_group(&same));
        let ghz = StabilizerState::builtin("ghz3").unwrap();
        let f = ghz.apply_pauli_frame(&p("XII"));
        // expected flips derived from commutation
        for (i, (s, g)) in f.generators().enumerate() {
            let expect = if g.anticommute_bit(&p("XII")) == 1 {
                ghz.generator(i).0.flipped()
            } else {
                ghz.generator(i).0
            };
            assert_eq!(s, expect);
            assert!(["+ZZI", "+XXX", "+IZZ"].contains(&format!("{}", ghz.generator(i).1).as_str()));
        }
        assert_eq!(f.generator(0).0, Sign::Minus); // ZZI anticommutes with XII
        assert_eq!(f.generator(1).0, Sign::Plus); // XXX commutes
        assert_eq!(f.generator(2).0, Sign::Plus); // IZZ commutes
    }

    #[test]
    fn contains_sign_is_multiplicative() {
        let mut rng = StdRng::seed_from_u64(21);
        for _ in 0..40 {
            let n = rng.gen_range(2..=5);
            let s = random_stabilizer_state(n, &mut rng);
            // random pair of group elements via random generator subsets
            let mut g = PauliProduct::identity(n);
            let mut h = PauliProduct::identity(n);
            for i in 0..n {
                if rng.gen::<bool>() {
                    g.mul_assign(&s.group().signed_generator(i));
                }
                if rng.gen::<bool>() {
                    h.mul_assign(&s.group().signed_generator(i));
                }
            }
            let gh = g.multiply(&h).unwrap();
            let sg = s.contains(&g).unwrap();
            let sh = s.contains(&h).unwrap();
            let sgh = s.contains(&gh).unwrap();
            assert_eq!(sgh, sg.times(sh).times(gh.sign().unwrap().times(
                g.sign().unwrap().times(h.sign().unwrap()),
            )));
        }
    }

    #[test]
    fn canonical_form_idempotent_and_destabilizers() {
        let mut rng = StdRng::seed_from_u64(22);
        for _ in 0..30 {
            let n = rng.gen_range(1..=6);
            let s = random_stabilizer_state(n, &mut rng);
            // rebuilding from the canonical rows reproduces the group
            let rows: Vec<PauliProduct> = s.group().canonical_form().rows().to_vec();
            let rebuilt = StabilizerState::new(rows).unwrap();
            assert!(s.equals_group(&rebuilt));
            let d = s.destabilizers();
            for (i, di) in d.iter().enumerate() {
                for (j, (_, gj)) in s.generators().enumerate() {
                    assert_eq!(di.anticommute_bit(gj), u8::from(i == j));
                }
            }
        }
    }

    #[test]
    fn state_file_round_trip_and_errors() {
        let tri = StabilizerState::builtin("triangle").unwrap();
        let text = tri.to_file_string();
        let back: StabilizerState = text.parse().unwrap();
        assert!(tri.equals_group(&back));

        let err = "qubits: 2\ngen: +XX\ngen: +ZY\n".parse::<StabilizerState>().unwrap_err();
        assert_eq!(err.line, 3);
        let err = "qubits: 2\ngen: +XX\ngen: -XX\n".parse::<StabilizerState>().unwrap_err();
        assert_eq!(err.line, 3);
        let err = "gen: +XX\n".parse::<StabilizerState>().unwrap_err();
        assert_eq!(err.line, 1);
        let err = "qubits: 2\ngen: +XXX\n".parse::<StabilizerState>().unwrap_err();
        assert_eq!(err.line, 2);
    }

    #[test]
    fn css_split_matches_group() {
        let ghz = StabilizerState::builtin("ghz3").unwrap();
        let split = ghz.group().css_generating_set().unwrap();
        assert_eq!(split.x_type.len() + split.z_type.len(), 3);
        // mixed presentation of the same group still splits
        let mixed = StabilizerState::new(vec![
            p("+ZZI"),
            p("+XXX").multiply(&p("+ZZI")).unwrap(),
            p("+IZZ"),
        ])
        .unwrap();
        let split = mixed.group().css_generating_set().unwrap();
        let rebuilt = PauliGroup::new(
            split
                .x_type
                .iter()
                .chain(split.z_type.iter())
                .cloned()
                .collect(),
        )
        .unwrap();
        assert!(rebuilt.equals_group(ghz.group()));
    }
}
