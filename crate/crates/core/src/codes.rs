//! Stabilizer codes: check generators plus logical operator pairs, syndrome
//! computation and lookup tables, distance by enumeration, and the CSS /
//! Hadamard-invariance structure checks. The four builtin codes are stored
//! exactly as displayed in the literature.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::pauli::{for_each_pauli_of_weight, PauliError, PauliProduct};
use crate::stab::{group_error_line, GroupError, PauliGroup, StateParseError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodeError {
    Group(GroupError),
    LogicalNotHermitian { index: usize },
    LogicalAnticommutesWithCheck { logical: usize, check: usize },
    LogicalAlgebra(String),
    LogicalCountMismatch { expected: usize, got: usize },
    RankDeficient,
    UnknownBuiltin(String),
    BudgetExceeded { qubits: usize, max: usize },
    Dimension(PauliError),
    NoLogicals,
}

impl fmt::Display for CodeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeError::Group(e) => write!(f, "invalid check set: {e}"),
            CodeError::LogicalNotHermitian { index } => {
                write!(f, "logical operator {} is not Hermitian", index + 1)
            }
            CodeError::LogicalAnticommutesWithCheck { logical, check } => write!(
                f,
                "logical operator {} anticommutes with check {}",
                logical + 1,
                check + 1
            ),
            CodeError::LogicalAlgebra(msg) => write!(f, "bad logical algebra: {msg}"),
            CodeError::LogicalCountMismatch { expected, got } => {
                write!(f, "expected {expected} logical pairs, got {got}")
            }
            CodeError::RankDeficient => {
                write!(f, "checks and logicals are not jointly independent")
            }
            CodeError::UnknownBuiltin(name) => write!(f, "unknown builtin code '{name}'"),
            CodeError::BudgetExceeded { qubits, max } => {
                write!(f, "enumeration budget exceeded: {qubits} qubits (max {max})")
            }
            CodeError::Dimension(e) => write!(f, "{e}"),
            CodeError::NoLogicals => write!(f, "code encodes no logical qubits"),
        }
    }
}

impl std::error::Error for CodeError {}

impl From<GroupError> for CodeError {
    fn from(e: GroupError) -> Self {
        CodeError::Group(e)
    }
}

impl From<PauliError> for CodeError {
    fn from(e: PauliError) -> Self {
        CodeError::Dimension(e)
    }
}

/// Syndrome as one bit per check: bit j set means check j anticommutes with
/// the error (its eigenvalue flips).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Syndrome {
    pub bits: u32,
    pub len: usize,
}

impl Syndrome {
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            write!(f, "{}", (self.bits >> j) & 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    /// Lowest-weight representative producing the syndrome.
    pub correction: PauliProduct,
    /// Set when inequivalent errors share the syndrome; the protocol
    /// rejects instead of guessing.
    pub detect_only: bool,
}

/// Lookup table from syndromes to corrections, built by enumerating errors
/// up to a weight bound. Corrections are equivalence classes modulo the
/// check group; one representative is stored.
#[derive(Clone, Debug)]
pub struct SyndromeTable {
    pub num_checks: usize,
    pub max_weight: usize,
    pub entries: BTreeMap<u32, TableEntry>,
}

impl SyndromeTable {
    pub fn lookup(&self, s: Syndrome) -> Option<&TableEntry> {
        self.entries.get(&s.bits)
    }
}

/// A stabilizer code: commuting independent checks and logical X/Z pairs.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    name: Option<String>,
    checks: PauliGroup,
    logical_x: Vec<PauliProduct>,
    logical_z: Vec<PauliProduct>,
}

impl StabilizerCode {
    pub fn new(
        checks: Vec<PauliProduct>,
        logical_x: Vec<PauliProduct>,
        logical_z: Vec<PauliProduct>,
    ) -> Result<StabilizerCode, CodeError> {
        let checks = PauliGroup::new(checks)?;
        let n = checks.num_qubits();
        let expected_logicals = n - checks.len();
        if logical_x.len() != logical_z.len() || logical_x.len() != expected_logicals {
            return Err(CodeError::LogicalCountMismatch {
                expected: expected_logicals,
                got: logical_x.len().min(logical_z.len()),
            });
        }
        if expected_logicals == 0 {
            return Err(CodeError::NoLogicals);
        }
        for (i, l) in logical_x.iter().chain(logical_z.iter()).enumerate() {
            if !l.is_hermitian() {
                return Err(CodeError::LogicalNotHermitian { index: i % expected_logicals });
            }
        }
        for (li, l) in logical_x.iter().enumerate() {
            for (ci, (_, c)) in checks.generators().enumerate() {
                if l.anticommute_bit(c) == 1 {
                    return Err(CodeError::LogicalAnticommutesWithCheck { logical: li, check: ci });
                }
            }
        }
        for (li, l) in logical_z.iter().enumerate() {
            for (ci, (_, c)) in checks.generators().enumerate() {
                if l.anticommute_bit(c) == 1 {
                    return Err(CodeError::LogicalAnticommutesWithCheck { logical: li, check: ci });
                }
            }
        }
        for i in 0..expected_logicals {
            for j in 0..expected_logicals {
                let want_anti = u8::from(i == j);
                if logical_x[i].anticommute_bit(&logical_z[j]) != want_anti {
                    return Err(CodeError::LogicalAlgebra(format!(
                        "logical X{} vs Z{}",
                        i + 1,
                        j + 1
                    )));
                }
                if i < j
                    && (logical_x[i].anticommute_bit(&logical_x[j]) == 1
                        || logical_z[i].anticommute_bit(&logical_z[j]) == 1)
                {
                    return Err(CodeError::LogicalAlgebra(format!(
                        "logical pair {} vs {} anticommute",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        // checks plus all logicals must be jointly independent
        let mut rows: Vec<u64> = checks
            .generators()
            .map(|(_, g)| g.packed_row())
            .chain(logical_x.iter().map(|l| l.packed_row()))
            .chain(logical_z.iter().map(|l| l.packed_row()))
            .collect();
        let full = rows.len();
        if crate::gf2::echelonize(&mut rows, 2 * n).len() != full {
            return Err(CodeError::RankDeficient);
        }
        Ok(StabilizerCode {
            name: None,
            checks,
            logical_x,
            logical_z,
        })
    }

    /// The builtin codes: C4 (four-qubit error-detecting, two logicals),
    /// C5 (five-qubit error-correcting), C6 (six-qubit Hadamard-invariant
    /// detecting code, two logicals), C7 (Steane's seven-qubit code).
    pub fn builtin(name: &str) -> Result<StabilizerCode, CodeError> {
        let canonical = name.to_ascii_uppercase();
        let (checks, lx, lz): (&[&str], &[&str], &[&str]) = match canonical.as_str() {
            "C4" => (
                &["+XXXX", "+ZZZZ"],
                &["+XXII", "+IXIX"],
                &["+ZIZI", "+IIZZ"],
            ),
            "C5" => (
                &["+XZZXI", "+IXZZX", "+XIXZZ", "+ZXIXZ"],
                &["+XXXXX"],
                &["+ZZZZZ"],
            ),
            "C6" => (
                &["+XIXXIX", "+IXXIXX", "+ZIZZIZ", "+IZZIZZ"],
                &["+XXXIII", "+IIIXXX"],
                &["+ZZZIII", "+IIIZZZ"],
            ),
            "C7" => (
                &[
                    "+XIXIXIX", "+IXXIIXX", "+IIIXXXX", "+ZIZIZIZ", "+IZZIIZZ", "+IIIZZZZ",
                ],
                &["+XXXXXXX"],
                &["+ZZZZZZZ"],
            ),
            _ => return Err(CodeError::UnknownBuiltin(name.to_string())),
        };
        let parse = |v: &[&str]| v.iter().map(|s| s.parse().unwrap()).collect();
        let mut code = StabilizerCode::new(parse(checks), parse(lx), parse(lz))?;
        code.name = Some(canonical);
        Ok(code)
    }

    pub fn builtin_names() -> &'static [&'static str] {
        &["C4", "C5", "C6", "C7"]
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn num_physical(&self) -> usize {
        self.checks.num_qubits()
    }

    pub fn num_logical(&self) -> usize {
        self.logical_x.len()
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    pub fn checks(&self) -> &PauliGroup {
        &self.checks
    }

    pub fn logical_x(&self, i: usize) -> &PauliProduct {
        &self.logical_x[i]
    }

    pub fn logical_z(&self, i: usize) -> &PauliProduct {
        &self.logical_z[i]
    }

    /// Hermitian logical Y representative: `i · X_L · Z_L` with the phase
    /// normalized to a sign, matching the single-qubit `Y = iXZ`.
    pub fn logical_y(&self, i: usize) -> PauliProduct {
        self.logical_x[i]
            .multiply(&self.logical_z[i])
            .expect("same register")
            .times_i(1)
    }

    /// Syndrome of an error: bit j set iff check j anticommutes with it.
    pub fn syndrome(&self, error: &PauliProduct) -> Result<Syndrome, CodeError> {
        if error.num_qubits() != self.num_physical() {
            return Err(CodeError::Dimension(PauliError::LengthMismatch {
                left: error.num_qubits(),
                right: self.num_physical(),
            }));
        }
        let mut bits = 0u32;
        for (j, (_, c)) in self.checks.generators().enumerate() {
            bits |= u32::from(error.anticommute_bit(c)) << j;
        }
        Ok(Syndrome {
            bits,
            len: self.checks.len(),
        })
    }

    /// Builds the syndrome lookup table over all errors of weight at most
    /// `max_weight`. Errors equivalent modulo the check group collapse to
    /// one entry; collisions between inequivalent errors mark the syndrome
    /// detect-only.
    pub fn syndrome_table(&self, max_weight: usize) -> SyndromeTable {
        let n = self.num_physical();
        let mut entries: BTreeMap<u32, TableEntry> = BTreeMap::new();
        entries.insert(
            0,
            TableEntry {
                correction: PauliProduct::identity(n),
                detect_only: false,
            },
        );
        for w in 1..=max_weight {
            for_each_pauli_of_weight(n, w, &mut |e| {
                let s = self.syndrome(e).expect("size matches");
                match entries.get_mut(&s.bits) {
                    None => {
                        entries.insert(
                            s.bits,
                            TableEntry {
                                correction: e.clone(),
                                detect_only: false,
                            },
                        );
                    }
                    Some(entry) => {
                        let diff = entry.correction.multiply(e).expect("same register");
                        if self.checks.contains(&diff).is_none() {
                            entry.detect_only = true;
                        }
                    }
                }
            });
        }
        SyndromeTable {
            num_checks: self.checks.len(),
            max_weight,
            entries,
        }
    }

    /// Minimum weight of a logical operator: commutes with every check but
    /// lies outside the check group. Enumeration only; refuses registers
    /// beyond `max_qubits`.
    pub fn distance_with_budget(&self, max_qubits: usize) -> Result<usize, CodeError> {
        let n = self.num_physical();
        if n > max_qubits {
            return Err(CodeError::BudgetExceeded {
                qubits: n,
                max: max_qubits,
            });
        }
        for w in 1..=n {
            let mut found = false;
            for_each_pauli_of_weight(n, w, &mut |e| {
                if found {
                    return;
                }
                let commutes = self
                    .checks
                    .generators()
                    .all(|(_, c)| e.anticommute_bit(c) == 0);
                if commutes && self.checks.contains(e).is_none() {
                    found = true;
                }
            });
            if found {
                return Ok(w);
            }
        }
        unreachable!("a code with logical qubits has logical operators");
    }

    pub fn distance(&self) -> Result<usize, CodeError> {
        self.distance_with_budget(10)
    }

    /// True iff the check group admits a generating set of pure X-type and
    /// pure Z-type elements.
    pub fn is_css(&self) -> bool {
        self.checks.is_css_form()
    }

    /// CSS and Hadamard invariant: transversal Hadamard maps the check group
    /// to itself with unchanged eigenvalues, and exchanges each logical X
    /// with its logical Z modulo the check group.
    pub fn is_css_h(&self) -> bool {
        if !self.is_css() {
            return false;
        }
        if !self.checks.equals_group(&self.checks.hadamard_image()) {
            return false;
        }
        for i in 0..self.num_logical() {
            let hx = self.logical_x[i].hadamard_all();
            let q = hx.multiply(&self.logical_z[i]).expect("same register");
            if !self.checks.contains_operator(&q) {
                return false;
            }
            let hz = self.logical_z[i].hadamard_all();
            let q = hz.multiply(&self.logical_x[i]).expect("same register");
            if !self.checks.contains_operator(&q) {
                return false;
            }
        }
        true
    }

    /// File form: the state format plus `logical_x:` / `logical_z:` lines.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("qubits: {}\n", self.num_physical());
        for (s, g) in self.checks.generators() {
            out.push_str(&format!("gen: {}\n", g.times_i(s.phase_exp())));
        }
        for l in &self.logical_x {
            out.push_str(&format!("logical_x: {l}\n"));
        }
        for l in &self.logical_z {
            out.push_str(&format!("logical_z: {l}\n"));
        }
        out
    }
}

impl FromStr for StabilizerCode {
    type Err = StateParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let (num_qubits, checks, gen_lines) = crate::stab::parse_generator_lines(text)?;
        let mut logical_x = Vec::new();
        let mut logical_z = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = lineno + 1;
            let parse = |rest: &str| -> Result<PauliProduct, StateParseError> {
                let p: PauliProduct = rest.trim().parse().map_err(|e: PauliError| StateParseError {
                    line: lineno,
                    message: e.to_string(),
                })?;
                if p.num_qubits() != num_qubits {
                    return Err(StateParseError {
                        line: lineno,
                        message: format!(
                            "operator has {} qubits, header says {num_qubits}",
                            p.num_qubits()
                        ),
                    });
                }
                Ok(p)
            };
            if let Some(rest) = line.strip_prefix("logical_x:") {
                logical_x.push(parse(rest)?);
            } else if let Some(rest) = line.strip_prefix("logical_z:") {
                logical_z.push(parse(rest)?);
            }
        }
        StabilizerCode::new(checks, logical_x, logical_z).map_err(|e| {
            let line = match &e {
                CodeError::Group(g) => group_error_line(g, &gen_lines),
                _ => 1,
            };
            StateParseError {
                line,
                message: e.to_string(),
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::Factor;

    fn c(name: &str) -> StabilizerCode {
        StabilizerCode::builtin(name).unwrap()
    }

    #[test]
    fn builtin_shapes() {
        let c4 = c("C4");
        assert_eq!((c4.num_physical(), c4.num_logical(), c4.num_checks()), (4, 2, 2));
        assert_eq!(c4.logical_x(0).to_string(), "+XXII");
        assert_eq!(c4.logical_z(0).to_string(), "+ZIZI");
        assert_eq!(c4.logical_x(1).to_string(), "+IXIX");
        assert_eq!(c4.logical_z(1).to_string(), "+IIZZ");
        let c7 = c("C7");
        assert_eq!((c7.num_physical(), c7.num_logical(), c7.num_checks()), (7, 1, 6));
        assert_eq!(c7.logical_x(0).to_string(), "+XXXXXXX");
        let c6 = c("C6");
        assert_eq!((c6.num_physical(), c6.num_logical()), (6, 2));
        assert_eq!(c6.logical_x(0).to_string(), "+XXXIII");
        assert_eq!(c6.logical_z(1).to_string(), "+IIIZZZ");
        let c5 = c("C5");
        assert_eq!((c5.num_physical(), c5.num_logical(), c5.num_checks()), (5, 1, 4));
        assert!(StabilizerCode::builtin("C9").is_err());
    }

    #[test]
    fn syndrome_examples() {
        let c4 = c("C4");
        // X on any qubit flips only the Z-type check
        for q in 0..4 {
            let e = PauliProduct::single(4, q, Factor::X);
            let s = c4.syndrome(&e).unwrap();
            assert_eq!(s.to_string(), "01");
        }
        for q in 0..4 {
            let e = PauliProduct::single(4, q, Factor::Y);
            assert_eq!(c4.syndrome(&e).unwrap().to_string(), "11");
        }
        let id = PauliProduct::identity(4);
        assert!(c4.syndrome(&id).unwrap().is_zero());
    }

    #[test]
    fn syndrome_invariant_under_check_multiplication() {
        let c5 = c("C5");
        let e: PauliProduct = "+XIIII".parse().unwrap();
        let s0 = c5.syndrome(&e).unwrap();
        for (_, chk) in c5.checks().generators() {
            let e2 = e.multiply(chk).unwrap();
            assert_eq!(c5.syndrome(&e2).unwrap(), s0);
        }
    }

    #[test]
    fn c7_weight_one_table_fully_correcting() {
        let c7 = c("C7");
        let table = c7.syndrome_table(1);
        // 21 single-qubit errors occupy 21 distinct nonzero syndromes
        assert_eq!(table.entries.len(), 22);
        assert!(table.entries.values().all(|e| !e.detect_only));
        let mut nonzero = 0;
        for_each_pauli_of_weight(7, 1, &mut |e| {
            let s = c7.syndrome(e).unwrap();
            assert!(!s.is_zero());
            let entry = table.lookup(s).unwrap();
            // decode(syndrome(e)) is e modulo the check group
            let diff = entry.correction.multiply(e).unwrap();
            assert!(c7.checks().contains(&diff).is_some());
            nonzero += 1;
        });
        assert_eq!(nonzero, 21);
    }

    #[test]
    fn c4_weight_one_table_detect_only() {
        let c4 = c("C4");
        let table = c4.syndrome_table(1);
        for_each_pauli_of_weight(4, 1, &mut |e| {
            let s = c4.syndrome(e).unwrap();
            assert!(!s.is_zero());
            assert!(table.lookup(s).unwrap().detect_only);
        });
    }

    #[test]
    fn c5_weight_one_distinct_syndromes() {
        let c5 = c("C5");
        let mut seen = std::collections::BTreeSet::new();
        for_each_pauli_of_weight(5, 1, &mut |e| {
            let s = c5.syndrome(e).unwrap();
            assert!(!s.is_zero());
            seen.insert(s.bits);
        });
        assert_eq!(seen.len(), 15);
    }

    #[test]
    fn distances() {
        assert_eq!(c("C4").distance().unwrap(), 2);
        assert_eq!(c("C5").distance().unwrap(), 3);
        assert_eq!(c("C6").distance().unwrap(), 2);
        assert_eq!(c("C7").distance().unwrap(), 3);
    }

    #[test]
    fn css_flags() {
        assert!(c("C4").is_css());
        assert!(!c("C4").is_css_h());
        assert!(!c("C5").is_css());
        assert!(!c("C5").is_css_h());
        assert!(c("C6").is_css());
        assert!(c("C6").is_css_h());
        assert!(c("C7").is_css());
        assert!(c("C7").is_css_h());
    }

    #[test]
    fn css_h_implies_css() {
        for name in StabilizerCode::builtin_names() {
            let code = c(name);
            if code.is_css_h() {
                assert!(code.is_css());
            }
        }
    }

    #[test]
    fn file_round_trip() {
        for name in StabilizerCode::builtin_names() {
            let code = c(name);
            let text = code.to_file_string();
            let back: StabilizerCode = text.parse().unwrap();
            assert!(back.checks().equals_group(code.checks()));
            assert_eq!(back.num_logical(), code.num_logical());
            for i in 0..code.num_logical() {
                assert_eq!(back.logical_x(i), code.logical_x(i));
                assert_eq!(back.logical_z(i), code.logical_z(i));
            }
        }
    }

    #[test]
    fn validation_rejects_bad_logicals() {
        // logical X anticommuting with a check
        let err = StabilizerCode::new(
            vec!["+XXXX".parse().unwrap(), "+ZZZZ".parse().unwrap()],
            vec!["+XIII".parse().unwrap(), "+IXIX".parse().unwrap()],
            vec!["+ZIZI".parse().unwrap(), "+IIZZ".parse().unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, CodeError::LogicalAnticommutesWithCheck { .. }));
        // wrong pairing
        let err = StabilizerCode::new(
            vec!["+XXXX".parse().unwrap(), "+ZZZZ".parse().unwrap()],
            vec!["+XXII".parse().unwrap(), "+IXIX".parse().unwrap()],
            vec!["+IIZZ".parse().unwrap(), "+ZIZI".parse().unwrap()],
        )
        .unwrap_err();
        assert!(matches!(err, CodeError::LogicalAlgebra(_)));
    }

    #[test]
    fn logical_y_is_hermitian_and_anticommutes_properly() {
        for name in StabilizerCode::builtin_names() {
            let code = c(name);
            for i in 0..code.num_logical() {
                let y = code.logical_y(i);
                assert!(y.is_hermitian(), "{name} logical Y {i}");
                assert_eq!(y.anticommute_bit(code.logical_x(i)), 1);
                assert_eq!(y.anticommute_bit(code.logical_z(i)), 1);
            }
        }
    }
}
