//! The multi-copy operator machinery: arrays indexed by (copy row, party
//! column), multi-party parity-check construction from a (state, code)
//! pair, the two sufficiency conditions, and the zero-error decoded-group
//! computation.
//!
//! Qubit layout is row major and fixed everywhere: qubit(r, c) = r·parties + c.

use std::collections::BTreeSet;
use std::fmt;

use crate::codes::{StabilizerCode, Syndrome};
use crate::gf2;
use crate::pauli::{PauliProduct, Sign};
use crate::stab::{
    classify_state, GroupError, LocalCliffordLayer, PauliGroup, StabilizerState, StateClass,
};

/// A Pauli product on copies·parties qubits viewed as an m×n grid.
#[derive(Clone, Debug)]
pub struct OperatorArray {
    rows: usize,
    cols: usize,
    op: PauliProduct,
}

impl OperatorArray {
    pub fn new(rows: usize, cols: usize, op: PauliProduct) -> OperatorArray {
        assert_eq!(op.num_qubits(), rows * cols, "operator size must match grid");
        OperatorArray { rows, cols, op }
    }

    /// Builds the array whose row `r` is `rows[r]`; phases multiply into the
    /// whole operator.
    pub fn from_rows(rows: &[PauliProduct]) -> OperatorArray {
        assert!(!rows.is_empty());
        let cols = rows[0].num_qubits();
        let mut op = rows[0].clone();
        for r in &rows[1..] {
            assert_eq!(r.num_qubits(), cols);
            op = op.tensor(r);
        }
        OperatorArray {
            rows: rows.len(),
            cols,
            op,
        }
    }

    /// Builds the array whose column `c` is `cols[c]`.
    pub fn from_columns(cols: &[PauliProduct], copies: usize) -> OperatorArray {
        let parties = cols.len();
        let total = copies * parties;
        let mut op = PauliProduct::identity(total);
        let mut phase = 0u8;
        for (c, col) in cols.iter().enumerate() {
            assert_eq!(col.num_qubits(), copies);
            let positions: Vec<usize> = (0..copies).map(|r| r * parties + c).collect();
            let embedded = col.embed(&positions, total).expect("column layout");
            phase = (phase + embedded.phase_exp()) & 3;
            op.mul_assign(&embedded.unsigned());
        }
        // disjoint supports never interact, so phases just add
        OperatorArray {
            rows: copies,
            cols: parties,
            op: op.times_i(phase),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn op(&self) -> &PauliProduct {
        &self.op
    }

    /// Row `r` as a phase-0 product on the party register.
    pub fn row(&self, r: usize) -> PauliProduct {
        let positions: Vec<usize> = (0..self.cols).map(|c| r * self.cols + c).collect();
        self.op.restrict(&positions).expect("row layout")
    }

    /// Column `c` as a phase-0 product on the copy register.
    pub fn column(&self, c: usize) -> PauliProduct {
        let positions: Vec<usize> = (0..self.rows).map(|r| r * self.cols + c).collect();
        self.op.restrict(&positions).expect("column layout")
    }

    fn bits_key(&self) -> Vec<u64> {
        let n = self.op.num_qubits();
        let mut key = Vec::with_capacity(2 * ((n + 63) / 64));
        let mut word = 0u64;
        let mut count = 0;
        let push_bit = |key: &mut Vec<u64>, word: &mut u64, count: &mut usize, bit: bool| {
            if bit {
                *word |= 1 << (*count % 64);
            }
            *count += 1;
            if *count % 64 == 0 {
                key.push(*word);
                *word = 0;
            }
        };
        for q in 0..n {
            push_bit(&mut key, &mut word, &mut count, self.op.x_bit(q));
            push_bit(&mut key, &mut word, &mut count, self.op.z_bit(q));
        }
        if count % 64 != 0 {
            key.push(word);
        }
        key
    }
}

impl fmt::Display for OperatorArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let party = |c: usize| (b'A' + (c as u8 % 26)) as char;
        write!(f, "    ")?;
        for c in 0..self.cols {
            write!(f, " {}", party(c))?;
        }
        writeln!(f)?;
        for r in 0..self.rows {
            write!(f, "{:3} |", r + 1)?;
            for c in 0..self.cols {
                write!(f, " {}", self.op.factor(r * self.cols + c).as_char())?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// `m` copies of an n-party master state, eigenvalues normalized to +1.
#[derive(Clone, Debug)]
pub struct MultiCopySetup {
    master: StabilizerState,
    copies: usize,
}

impl MultiCopySetup {
    /// Signs of the given master are normalized to +1; the caller's Pauli
    /// frame accounts for the difference.
    pub fn new(master: StabilizerState, copies: usize) -> MultiCopySetup {
        MultiCopySetup {
            master: master.sign_normalized(),
            copies,
        }
    }

    pub fn master(&self) -> &StabilizerState {
        &self.master
    }

    pub fn copies(&self) -> usize {
        self.copies
    }

    pub fn parties(&self) -> usize {
        self.master.num_qubits()
    }

    pub fn total_qubits(&self) -> usize {
        self.copies * self.parties()
    }

    /// Positions of party `c`'s qubits in the row-major layout.
    pub fn column_positions(&self, c: usize) -> Vec<usize> {
        (0..self.copies).map(|r| r * self.parties() + c).collect()
    }

    /// Master generator `j` embedded at copy `r`, identity elsewhere.
    pub fn single_copy_generator(&self, j: usize, r: usize) -> PauliProduct {
        let n = self.parties();
        let positions: Vec<usize> = (0..n).map(|c| r * n + c).collect();
        let (_, g) = self.master.generator(j);
        g.embed(&positions, self.total_qubits()).expect("row layout")
    }

    /// The full multi-copy state generated by all single-copy generators.
    pub fn multicopy_state(&self) -> StabilizerState {
        let mut gens = Vec::with_capacity(self.total_qubits());
        for r in 0..self.copies {
            for j in 0..self.parties() {
                gens.push(self.single_copy_generator(j, r));
            }
        }
        StabilizerState::new(gens).expect("single-copy generators are valid")
    }

    /// True iff the array, sign included, lies in the multi-copy stabilizer
    /// of the all-+1 master: every row is in the master group and the row
    /// signs multiply back to the array's sign.
    pub fn in_multicopy_stabilizer(&self, array: &OperatorArray) -> bool {
        if array.rows() != self.copies || array.cols() != self.parties() {
            return false;
        }
        let Ok(array_sign) = array.op().sign() else {
            return false;
        };
        let mut sign = Sign::Plus;
        for r in 0..array.rows() {
            let row = array.row(r);
            match self.master.contains(&row) {
                Some(s) => sign = sign.times(s),
                None => return false,
            }
        }
        sign == array_sign
    }
}

/// Which variant of the code generator a party measures for one check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantKind {
    Direct,
    Hadamard,
    YProduct,
    Identity,
}

impl VariantKind {
    pub fn label(self) -> &'static str {
        match self {
            VariantKind::Direct => "g",
            VariantKind::Hadamard => "H(g)",
            VariantKind::YProduct => "Y(g)",
            VariantKind::Identity => "I",
        }
    }
}

/// One multi-party parity check with its provenance.
#[derive(Clone, Debug)]
pub struct PlanCheck {
    pub array: OperatorArray,
    pub master_index: usize,
    pub code_gen_index: usize,
    /// Expected no-error outcome of the +1-representative array.
    pub expected_sign: Sign,
    pub column_variants: Vec<VariantKind>,
    /// Copies where a flip of this group's own generator is sensed.
    sense_z: u64,
    /// Copies where a flip of the partner (Hadamard-image) element is sensed.
    sense_x: u64,
}

/// Encoded master generator: the logical image of one master generator.
#[derive(Clone, Debug)]
pub struct EncodedMaster {
    pub array: OperatorArray,
    pub logical_index: usize,
    pub master_index: usize,
    /// Sign with which the +1-representative array sits in the multi-copy
    /// stabilizer; -1 means the decoded state is a known logical frame flip
    /// away.
    pub frame_sign: Sign,
}

#[derive(Clone, Debug)]
enum PairKind {
    /// The Hadamard image of the master generator is not in the group.
    None,
    /// The Hadamard image has the same bits as the generator itself.
    SelfPaired,
    /// The Hadamard image is a distinct group element with the given
    /// combination over the master generators.
    Distinct { combo: u64 },
}

#[derive(Clone, Debug)]
enum GroupEntry {
    /// Virtual correction: per-copy flip masks for the generator sector and
    /// the partner sector.
    Correct { vz: u64, vx: u64 },
    DetectOnly,
}

/// Per-master-generator decoder: the checks it owns and a lookup table from
/// their joint outcome pattern to a virtual correction.
#[derive(Clone, Debug)]
pub struct GroupDecoder {
    pub master_index: usize,
    pair: PairKind,
    /// Indices into `CheckPlan::checks`, one per syndrome bit slot.
    pub check_ids: Vec<usize>,
    table: std::collections::BTreeMap<u32, GroupEntry>,
}

impl GroupDecoder {
    pub fn syndrome_len(&self) -> usize {
        self.check_ids.len()
    }
}

/// The reason a (state, code) pair cannot drive the protocol.
#[derive(Clone, Debug)]
pub enum Witness {
    /// Condition 1: no check is sensitive to this single-copy generator
    /// flip.
    UnseenFlip { master_index: usize, copy: usize },
    /// Condition 2: this encoded master generator is not in the multi-copy
    /// stabilizer.
    EncodedMaster { array: OperatorArray },
}

#[derive(Clone, Debug)]
pub struct IncompatibilityReport {
    pub condition: u8,
    pub witness: Witness,
    /// First row of an attempted check that falls outside the master group,
    /// when one exists; the narrative counterpart of the witness.
    pub offending_row: Option<PauliProduct>,
    pub master_generator: Option<PauliProduct>,
}

impl fmt::Display for IncompatibilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "incompatible: sufficiency condition {} fails", self.condition)?;
        match &self.witness {
            Witness::UnseenFlip { master_index, copy } => {
                write!(
                    f,
                    "witness: no parity check senses a flip of master generator {} on copy {}",
                    master_index + 1,
                    copy + 1
                )?;
                if let Some(g) = &self.master_generator {
                    write!(f, " ({g})")?;
                }
                writeln!(f)?;
            }
            Witness::EncodedMaster { array } => {
                writeln!(
                    f,
                    "witness: encoded master generator outside the multi-copy stabilizer:"
                )?;
                write!(f, "{array}")?;
            }
        }
        if let Some(row) = &self.offending_row {
            writeln!(
                f,
                "diagnostic: candidate check row {row} is not in the master stabilizer"
            )?;
        }
        Ok(())
    }
}

#[derive(Debug)]
pub enum PlanError {
    Incompatible(Box<IncompatibilityReport>),
    State(GroupError),
}

impl fmt::Display for PlanError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlanError::Incompatible(r) => write!(f, "{r}"),
            PlanError::State(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for PlanError {}

/// A complete purification plan for one (state, code) pair.
#[derive(Clone, Debug)]
pub struct CheckPlan {
    setup: MultiCopySetup,
    code: StabilizerCode,
    /// Local Clifford layer applied to the given state before planning.
    pub rotation: Option<LocalCliffordLayer>,
    pub checks: Vec<PlanCheck>,
    pub encoded: Vec<EncodedMaster>,
    pub groups: Vec<GroupDecoder>,
    destabilizers: Vec<PauliProduct>,
}

impl CheckPlan {
    pub fn setup(&self) -> &MultiCopySetup {
        &self.setup
    }

    pub fn code(&self) -> &StabilizerCode {
        &self.code
    }

    pub fn copies(&self) -> usize {
        self.setup.copies()
    }

    pub fn parties(&self) -> usize {
        self.setup.parties()
    }

    pub fn total_qubits(&self) -> usize {
        self.setup.total_qubits()
    }

    /// Joint syndrome of an error across all decoder groups, one bit pattern
    /// per group in group order.
    pub fn group_syndromes(&self, error: &PauliProduct) -> Vec<Syndrome> {
        self.groups
            .iter()
            .map(|g| {
                let mut bits = 0u32;
                for (slot, &cid) in g.check_ids.iter().enumerate() {
                    bits |= u32::from(error.anticommute_bit(self.checks[cid].array.op())) << slot;
                }
                Syndrome {
                    bits,
                    len: g.check_ids.len(),
                }
            })
            .collect()
    }

    /// Decodes group syndromes into a physical correction, or reports why
    /// the round must be rejected.
    pub fn correction_for(&self, syndromes: &[Syndrome]) -> Result<PauliProduct, DecodeReject> {
        let n = self.parties();
        let m = self.copies();
        let gens = self.setup.master().num_qubits();
        // per-group virtual corrections
        let mut targets: Vec<(usize, &PairKind, u64, u64)> = Vec::new();
        for (g, s) in self.groups.iter().zip(syndromes) {
            match g.table.get(&s.bits) {
                None => return Err(DecodeReject::UnknownSyndrome { master_index: g.master_index }),
                Some(GroupEntry::DetectOnly) => {
                    return Err(DecodeReject::DetectOnly { master_index: g.master_index })
                }
                Some(GroupEntry::Correct { vz, vx }) => {
                    targets.push((g.master_index, &g.pair, *vz, *vx));
                }
            }
        }
        // reconcile per copy: solve for which destabilizer flips to apply
        let mut correction = PauliProduct::identity(self.total_qubits());
        for r in 0..m {
            let mut rows = Vec::new();
            let mut rhs = 0u64;
            for (j, pair, vz, vx) in &targets {
                rows.push(1u64 << j);
                if (vz >> r) & 1 == 1 {
                    rhs |= 1 << (rows.len() - 1);
                }
                if let PairKind::Distinct { combo } = pair {
                    rows.push(*combo);
                    if (vx >> r) & 1 == 1 {
                        rhs |= 1 << (rows.len() - 1);
                    }
                }
            }
            let Some(solution) = gf2::solve(&rows, gens, rhs) else {
                return Err(DecodeReject::Inconsistent);
            };
            if solution != 0 {
                let positions: Vec<usize> = (0..n).map(|c| r * n + c).collect();
                for j in 0..gens {
                    if (solution >> j) & 1 == 1 {
                        let d = self.destabilizers[j]
                            .embed(&positions, self.total_qubits())
                            .expect("row layout");
                        correction.mul_assign(&d);
                    }
                }
            }
        }
        Ok(correction.unsigned())
    }

    /// True iff the residual acts trivially on the decoded output: zero
    /// syndrome on every check and commuting with every encoded master.
    pub fn residual_is_trivial(&self, residual: &PauliProduct) -> bool {
        self.checks
            .iter()
            .all(|c| residual.anticommute_bit(c.array.op()) == 0)
            && self
                .encoded
                .iter()
                .all(|e| residual.anticommute_bit(e.array.op()) == 0)
    }

    /// Paper-style text dump of the plan.
    pub fn dump(&self, state_label: &str, code_label: &str) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "plan: state={}, code={}, copies={}, parties={}\n",
            state_label,
            code_label,
            self.copies(),
            self.parties()
        ));
        match &self.rotation {
            Some(layer) if !layer.is_identity() => {
                out.push_str(&format!("pre-rotation: {}\n", layer.describe()));
            }
            _ => out.push_str("pre-rotation: none\n"),
        }
        out.push_str("master generators:\n");
        for (j, (s, g)) in self.setup.master().generators().enumerate() {
            out.push_str(&format!("  {}: {}\n", j + 1, g.times_i(s.phase_exp())));
        }
        for (k, check) in self.checks.iter().enumerate() {
            let variants: Vec<String> = check
                .column_variants
                .iter()
                .map(|v| v.label().to_string())
                .collect();
            out.push_str(&format!(
                "check {}: master {}, code generator {}, expected {}1, columns [{}]\n",
                k + 1,
                check.master_index + 1,
                check.code_gen_index + 1,
                check.expected_sign,
                variants.join(", ")
            ));
            out.push_str(&format!("{}", check.array));
        }
        for enc in &self.encoded {
            out.push_str(&format!(
                "encoded master {}: logical {}, master {}, frame {}1\n",
                enc.master_index + 1,
                enc.logical_index + 1,
                enc.master_index + 1,
                enc.frame_sign
            ));
            out.push_str(&format!("{}", enc.array));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecodeReject {
    DetectOnly { master_index: usize },
    UnknownSyndrome { master_index: usize },
    Inconsistent,
}

impl fmt::Display for DecodeReject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodeReject::DetectOnly { master_index } => {
                write!(f, "detect-only syndrome in group {}", master_index + 1)
            }
            DecodeReject::UnknownSyndrome { master_index } => {
                write!(f, "undiagnosed syndrome in group {}", master_index + 1)
            }
            DecodeReject::Inconsistent => write!(f, "group diagnoses disagree"),
        }
    }
}

/// Code classes used by the sufficiency matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeClass {
    CssH,
    Css,
    Stabilizer,
}

impl CodeClass {
    pub fn of(code: &StabilizerCode) -> CodeClass {
        if code.is_css_h() {
            CodeClass::CssH
        } else if code.is_css() {
            CodeClass::Css
        } else {
            CodeClass::Stabilizer
        }
    }
}

impl fmt::Display for CodeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeClass::CssH => write!(f, "CSS-H"),
            CodeClass::Css => write!(f, "CSS"),
            CodeClass::Stabilizer => write!(f, "STABILIZER (non-CSS)"),
        }
    }
}

/// The sufficiency matrix: which (state class, code class) pairings are
/// guaranteed to admit a working plan. Everything else is "not guaranteed",
/// not impossible.
pub fn class_compatibility(state: StateClass, code: CodeClass) -> bool {
    match (state, code) {
        (StateClass::CssH, _) => true,
        (_, CodeClass::CssH) => true,
        (StateClass::Css, CodeClass::Css) => true,
        _ => false,
    }
}

/// Working presentation chosen for plan construction: a generating set of
/// the (sign-normalized) master group, possibly re-split into CSS type.
struct WorkingState {
    state: StabilizerState,
    /// Candidate construction style per master generator.
    type_matched: bool,
}

fn choose_presentation(master: &StabilizerState, code: &StabilizerCode) -> WorkingState {
    let normalized = master.sign_normalized();
    let code_class = CodeClass::of(code);
    match code_class {
        CodeClass::CssH => WorkingState {
            state: normalized,
            type_matched: false,
        },
        CodeClass::Css => {
            if let Some(split) = normalized.group().css_generating_set() {
                let gens: Vec<PauliProduct> = split
                    .x_type
                    .iter()
                    .chain(split.z_type.iter())
                    .map(|g| g.unsigned())
                    .collect();
                WorkingState {
                    state: StabilizerState::new(gens).expect("split of a valid group"),
                    type_matched: true,
                }
            } else {
                WorkingState {
                    state: normalized,
                    type_matched: false,
                }
            }
        }
        CodeClass::Stabilizer => {
            // a Hadamard-invariant CSS presentation lets the plain code
            // generators serve as columns for the X-type masters
            let split_ok = normalized.group().css_generating_set().is_some()
                && normalized
                    .group()
                    .sign_normalized()
                    .equals_group(&normalized.group().sign_normalized().hadamard_image());
            if split_ok {
                let split = normalized.group().css_generating_set().unwrap();
                let gens: Vec<PauliProduct> = split
                    .x_type
                    .iter()
                    .chain(split.z_type.iter())
                    .map(|g| g.unsigned())
                    .collect();
                WorkingState {
                    state: StabilizerState::new(gens).expect("split of a valid group"),
                    type_matched: false,
                }
            } else {
                WorkingState {
                    state: normalized,
                    type_matched: false,
                }
            }
        }
    }
}

/// One column variant with the sensing contribution of the rows it creates.
fn column_variant(
    master_factor: crate::pauli::Factor,
    direct: &PauliProduct,
    hadamard: &PauliProduct,
    yprod: &PauliProduct,
    copies: usize,
) -> (VariantKind, PauliProduct) {
    use crate::pauli::Factor;
    match master_factor {
        Factor::I => (VariantKind::Identity, PauliProduct::identity(copies)),
        Factor::X => (VariantKind::Direct, direct.clone()),
        Factor::Z => (VariantKind::Hadamard, hadamard.clone()),
        Factor::Y => (VariantKind::YProduct, yprod.clone()),
    }
}

/// Builds the plan for the state exactly as presented (up to sign
/// normalization and a CSS re-split of the same group). Fails with a
/// structured report when either sufficiency condition does not hold.
pub fn build_check_plan(
    master: &StabilizerState,
    code: &StabilizerCode,
) -> Result<CheckPlan, PlanError> {
    let working = choose_presentation(master, code);
    build_plan_for_presentation(working, code)
}

/// Like `build_check_plan`, but when the as-presented plan fails and the
/// state classifies as CSS or CSS-H, retries on the locally rotated
/// presentation found by the classifier. Returns the rotation used, if any.
pub fn build_rotated_check_plan(
    master: &StabilizerState,
    code: &StabilizerCode,
    budget: usize,
) -> Result<CheckPlan, PlanError> {
    let first = build_check_plan(master, code);
    if first.is_ok() {
        return first;
    }
    let classification = classify_state(master, budget);
    let Some(witness) = classification.witness else {
        return first;
    };
    let rotated = witness.layer.apply(master);
    match build_check_plan(&rotated, code) {
        Ok(mut plan) => {
            plan.rotation = Some(witness.layer);
            Ok(plan)
        }
        Err(_) => first,
    }
}

fn build_plan_for_presentation(
    working: WorkingState,
    code: &StabilizerCode,
) -> Result<CheckPlan, PlanError> {
    use crate::pauli::Factor;
    let copies = code.num_physical();
    let setup = MultiCopySetup::new(working.state.clone(), copies);
    let n = setup.parties();
    let master = setup.master().clone();

    // code generator variants, columns canonicalized to +1 representatives,
    // with feasibility = membership of the bits in the check group
    struct Variants {
        direct: PauliProduct,
        hadamard: PauliProduct,
        hadamard_ok: bool,
        yprod: PauliProduct,
        yprod_ok: bool,
    }
    let variants: Vec<Variants> = code
        .checks()
        .generators()
        .map(|(_, g)| {
            let h = g.hadamard_all().unsigned();
            let y = g.multiply(&h).expect("same register").unsigned();
            Variants {
                direct: g.clone(),
                hadamard_ok: code.checks().contains(&h).is_some(),
                hadamard: h,
                yprod_ok: code.checks().contains(&y).is_some(),
                yprod: y,
            }
        })
        .collect();

    // candidate checks
    let mut checks: Vec<PlanCheck> = Vec::new();
    let mut seen: BTreeSet<Vec<u64>> = BTreeSet::new();
    for (j, (_, s)) in master.generators().enumerate() {
        let s_is_x_type = (0..n).all(|c| !s.z_bit(c));
        let s_is_z_type = (0..n).all(|c| !s.x_bit(c));
        for (i, v) in variants.iter().enumerate() {
            let candidate = if working.type_matched && (s_is_x_type || s_is_z_type) {
                // pure-type master with the matching pure-type code
                // generator, columns used directly
                let g_is_x_type = (0..copies).all(|r| !v.direct.z_bit(r));
                let g_is_z_type = (0..copies).all(|r| !v.direct.x_bit(r));
                if (s_is_x_type && !g_is_x_type) || (s_is_z_type && !g_is_z_type) {
                    continue;
                }
                let cols: Vec<PauliProduct> = (0..n)
                    .map(|c| {
                        if s.factor(c) == Factor::I {
                            PauliProduct::identity(copies)
                        } else {
                            v.direct.clone()
                        }
                    })
                    .collect();
                let kinds: Vec<VariantKind> = (0..n)
                    .map(|c| {
                        if s.factor(c) == Factor::I {
                            VariantKind::Identity
                        } else {
                            VariantKind::Direct
                        }
                    })
                    .collect();
                let sense_z: u64 = (0..copies)
                    .filter(|&r| v.direct.factor(r) != Factor::I)
                    .fold(0, |m, r| m | (1 << r));
                Some((cols, kinds, sense_z, 0u64))
            } else {
                // Hadamard-variant columns keyed by the master letters
                let mut cols = Vec::with_capacity(n);
                let mut kinds = Vec::with_capacity(n);
                let mut feasible = true;
                for c in 0..n {
                    let (kind, col) =
                        column_variant(s.factor(c), &v.direct, &v.hadamard, &v.yprod, copies);
                    match kind {
                        VariantKind::Hadamard if !v.hadamard_ok => feasible = false,
                        VariantKind::YProduct if !v.yprod_ok => feasible = false,
                        _ => {}
                    }
                    kinds.push(kind);
                    cols.push(col);
                }
                if !feasible {
                    None
                } else {
                    let mut sense_z = 0u64;
                    let mut sense_x = 0u64;
                    for r in 0..copies {
                        match v.direct.factor(r) {
                            Factor::X => sense_z |= 1 << r,
                            Factor::Z => sense_x |= 1 << r,
                            Factor::Y => {
                                sense_z |= 1 << r;
                                sense_x |= 1 << r;
                            }
                            Factor::I => {}
                        }
                    }
                    Some((cols, kinds, sense_z, sense_x))
                }
            };
            let Some((cols, kinds, sense_z, sense_x)) = candidate else {
                continue;
            };
            let array = OperatorArray::from_columns(&cols, copies);
            // every row must lie in the master group (bitwise); signs are
            // recorded as the expected outcome
            let mut expected = Sign::Plus;
            let mut ok = true;
            let mut nontrivial = false;
            for r in 0..copies {
                let row = array.row(r);
                if row.is_identity_bits() {
                    continue;
                }
                nontrivial = true;
                match master.contains(&row) {
                    Some(sig) => expected = expected.times(sig),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok || !nontrivial {
                continue;
            }
            let key = array.bits_key();
            if !seen.insert(key) {
                continue;
            }
            checks.push(PlanCheck {
                array,
                master_index: j,
                code_gen_index: i,
                expected_sign: expected,
                column_variants: kinds,
                sense_z,
                sense_x,
            });
        }
    }

    // encoded master generators, one per (logical qubit, master generator)
    let mut encoded = Vec::new();
    for l in 0..code.num_logical() {
        let lx = code.logical_x(l).clone();
        let lz = code.logical_z(l).clone();
        let ly = code.logical_y(l).unsigned();
        for (j, (_, s)) in master.generators().enumerate() {
            let cols: Vec<PauliProduct> = (0..n)
                .map(|c| match s.factor(c) {
                    Factor::I => PauliProduct::identity(copies),
                    Factor::X => lx.clone(),
                    Factor::Z => lz.clone(),
                    Factor::Y => ly.clone(),
                })
                .collect();
            let array = OperatorArray::from_columns(&cols, copies);
            encoded.push(EncodedMaster {
                array,
                logical_index: l,
                master_index: j,
                frame_sign: Sign::Plus, // fixed below
            });
        }
    }

    // condition 2: every encoded master must be in the multi-copy stabilizer
    for enc in encoded.iter_mut() {
        let mut sign = Sign::Plus;
        let mut offending = None;
        for r in 0..copies {
            let row = enc.array.row(r);
            if row.is_identity_bits() {
                continue;
            }
            match master.contains(&row) {
                Some(sig) => sign = sign.times(sig),
                None => {
                    offending = Some(row);
                    break;
                }
            }
        }
        if let Some(row) = offending {
            return Err(PlanError::Incompatible(Box::new(IncompatibilityReport {
                condition: 2,
                witness: Witness::EncodedMaster {
                    array: enc.array.clone(),
                },
                offending_row: Some(row),
                master_generator: Some(master.generator(enc.master_index).1.clone()),
            })));
        }
        if sign != enc.array.op().sign().expect("encoded arrays are Hermitian") {
            return Err(PlanError::Incompatible(Box::new(IncompatibilityReport {
                condition: 2,
                witness: Witness::EncodedMaster {
                    array: enc.array.clone(),
                },
                offending_row: None,
                master_generator: Some(master.generator(enc.master_index).1.clone()),
            })));
        }
        enc.frame_sign = sign;
    }

    // condition 1: every single-copy generator flip must flip some check
    if let Some((master_index, copy)) = first_unseen_flip(&setup, &checks) {
        let offending_row = diagnose_offending_row(&master, code, master_index);
        return Err(PlanError::Incompatible(Box::new(IncompatibilityReport {
            condition: 1,
            witness: Witness::UnseenFlip { master_index, copy },
            offending_row,
            master_generator: Some(master.generator(master_index).1.clone()),
        })));
    }

    // decoder groups
    let mut groups = Vec::new();
    for j in 0..n {
        let check_ids: Vec<usize> = {
            let mut ids: Vec<usize> = (0..checks.len())
                .filter(|&k| checks[k].master_index == j)
                .collect();
            ids.sort_by_key(|&k| checks[k].code_gen_index);
            ids
        };
        if check_ids.is_empty() {
            continue;
        }
        let (_, s) = master.generator(j);
        let h = s.hadamard_all().unsigned();
        let pair = if h.same_bits(s) {
            PairKind::SelfPaired
        } else {
            match master.group().contains_with_combo(&h) {
                Some((_, combo)) => PairKind::Distinct { combo },
                None => PairKind::None,
            }
        };
        let table = build_group_table(&checks, &check_ids, &pair, copies, code);
        groups.push(GroupDecoder {
            master_index: j,
            pair,
            check_ids,
            table,
        });
    }

    let destabilizers = master.destabilizers();
    Ok(CheckPlan {
        setup,
        code: code.clone(),
        rotation: None,
        checks,
        encoded,
        groups,
        destabilizers,
    })
}

/// Sub-syndrome of a virtual error over a group's checks.
fn virtual_syndrome(
    checks: &[PlanCheck],
    check_ids: &[usize],
    pair: &PairKind,
    vz: u64,
    vx: u64,
) -> u32 {
    let vx_eff = match pair {
        PairKind::SelfPaired => vz,
        _ => vx,
    };
    let mut bits = 0u32;
    for (slot, &cid) in check_ids.iter().enumerate() {
        let c = &checks[cid];
        let parity =
            ((c.sense_z & vz).count_ones() + (c.sense_x & vx_eff).count_ones()) & 1;
        bits |= parity << slot;
    }
    bits
}

/// Decode table over single-copy virtual errors (weight one), with
/// equivalence collapse modulo the code's check group and detect-only
/// marking for genuine collisions.
fn build_group_table(
    checks: &[PlanCheck],
    check_ids: &[usize],
    pair: &PairKind,
    copies: usize,
    code: &StabilizerCode,
) -> std::collections::BTreeMap<u32, GroupEntry> {
    let mut table = std::collections::BTreeMap::new();
    table.insert(0, GroupEntry::Correct { vz: 0, vx: 0 });
    let alphabet: &[(u64, u64)] = match pair {
        PairKind::Distinct { .. } => &[(1, 0), (0, 1), (1, 1)], // Z, X, Y
        _ => &[(1, 0)],
    };
    let equivalent = |vz1: u64, vx1: u64, vz2: u64, vx2: u64| -> bool {
        // same effect when the virtual errors differ by a check element
        let diff = virtual_to_pauli(copies, vz1 ^ vz2, vx1 ^ vx2);
        code.checks().contains(&diff).is_some()
    };
    for r in 0..copies {
        for &(z, x) in alphabet {
            let vz = z << r;
            let vx = x << r;
            let key = virtual_syndrome(checks, check_ids, pair, vz, vx);
            match table.get_mut(&key) {
                None => {
                    table.insert(key, GroupEntry::Correct { vz, vx });
                }
                Some(GroupEntry::Correct { vz: pz, vx: px }) => {
                    if !equivalent(*pz, *px, vz, vx) {
                        table.insert(key, GroupEntry::DetectOnly);
                    }
                }
                Some(GroupEntry::DetectOnly) => {}
            }
        }
    }
    table
}

/// Virtual (vx, vz) masks as a Pauli on the copy register, for equivalence
/// tests against the check group.
fn virtual_to_pauli(copies: usize, vz: u64, vx: u64) -> PauliProduct {
    use crate::pauli::Factor;
    let mut p = PauliProduct::identity(copies);
    for r in 0..copies {
        let z = (vz >> r) & 1 == 1;
        let x = (vx >> r) & 1 == 1;
        p.set_factor(r, Factor::from_bits(x, z));
    }
    p
}

/// First (master generator, copy) flip no check is sensitive to, scanning
/// master-major.
fn first_unseen_flip(setup: &MultiCopySetup, checks: &[PlanCheck]) -> Option<(usize, usize)> {
    let n = setup.parties();
    let m = setup.copies();
    let mut covered = vec![false; n * m];
    for check in checks {
        for r in 0..m {
            let row = check.array.row(r);
            if row.is_identity_bits() {
                continue;
            }
            let (_, combo) = setup
                .master()
                .group()
                .contains_with_combo(&row)
                .expect("plan rows are in the master group");
            for j in 0..n {
                if (combo >> j) & 1 == 1 {
                    covered[j * m + r] = true;
                }
            }
        }
    }
    for j in 0..n {
        for r in 0..m {
            if !covered[j * m + r] {
                return Some((j, r));
            }
        }
    }
    None
}

/// Narrative diagnostic for a condition failure: the first row of a
/// direct-column candidate for this master generator that leaves the group.
fn diagnose_offending_row(
    master: &StabilizerState,
    code: &StabilizerCode,
    master_index: usize,
) -> Option<PauliProduct> {
    use crate::pauli::Factor;
    let (_, s) = master.generator(master_index);
    let n = master.num_qubits();
    for (_, g) in code.checks().generators() {
        for r in 0..code.num_physical() {
            if g.factor(r) == Factor::I {
                continue;
            }
            let mut row = PauliProduct::identity(n);
            for c in 0..n {
                if s.factor(c) != Factor::I {
                    row.set_factor(c, g.factor(r));
                }
            }
            if master.contains(&row).is_none() {
                return Some(row);
            }
        }
    }
    None
}

/// Condition 1 as a standalone check on a built plan.
pub fn check_condition_1(plan: &CheckPlan) -> Result<(), (usize, usize)> {
    match first_unseen_flip(&plan.setup, &plan.checks) {
        None => Ok(()),
        Some(w) => Err(w),
    }
}

/// Condition 2 as a standalone check on a built plan.
pub fn check_condition_2(plan: &CheckPlan) -> Result<(), OperatorArray> {
    for enc in &plan.encoded {
        if !plan.setup.in_multicopy_stabilizer(&enc.array) {
            return Err(enc.array.clone());
        }
    }
    Ok(())
}

#[derive(Debug)]
pub enum DecodedGroupError {
    TooLarge { qubits: usize, max: usize },
    Group(GroupError),
}

impl fmt::Display for DecodedGroupError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecodedGroupError::TooLarge { qubits, max } => {
                write!(f, "system too large for symbolic decode: {qubits} qubits (max {max})")
            }
            DecodedGroupError::Group(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for DecodedGroupError {}

/// Stabilizer group of the logical output after the zero-error protocol:
/// measure every single-party parity check with all outcomes normalized to
/// +1, then read the surviving stabilizer through the logical operator
/// dictionary. Logical qubit layout is party major: party c's logical l sits
/// at c·num_logical + l.
pub fn decoded_logical_group(
    master: &StabilizerState,
    code: &StabilizerCode,
) -> Result<PauliGroup, DecodedGroupError> {
    let setup = MultiCopySetup::new(master.clone(), code.num_physical());
    let total = setup.total_qubits();
    if 2 * total > 64 {
        return Err(DecodedGroupError::TooLarge {
            qubits: total,
            max: 32,
        });
    }
    let n = setup.parties();
    let m = setup.copies();
    let k = code.num_logical();

    // post-measurement stabilizer with all check outcomes +1
    let mut gens: Vec<PauliProduct> = Vec::with_capacity(total);
    for r in 0..m {
        for j in 0..n {
            gens.push(setup.single_copy_generator(j, r));
        }
    }
    let mut measured: Vec<PauliProduct> = Vec::new();
    for c in 0..n {
        let positions = setup.column_positions(c);
        for (_, chk) in code.checks().generators() {
            measured.push(chk.embed(&positions, total).expect("column layout"));
        }
    }
    for meas in &measured {
        let anti: Vec<usize> = (0..gens.len())
            .filter(|&i| gens[i].anticommute_bit(meas) == 1)
            .collect();
        if let Some(&first) = anti.first() {
            let pivot = gens[first].clone();
            for &i in &anti[1..] {
                gens[i].mul_assign(&pivot);
            }
            gens[first] = meas.clone();
        }
        // a commuting measurement is already determined by the group
    }

    // reduce each survivor modulo the measured checks, then decompose column
    // by column over the per-party {checks, logicals} basis
    let check_group =
        PauliGroup::new(measured.clone()).map_err(DecodedGroupError::Group)?;

    // per-party basis: checks then logical X then logical Z, with combos
    let mut basis_rows: Vec<u64> = Vec::new();
    let mut basis_ops: Vec<PauliProduct> = Vec::new();
    for (_, chk) in code.checks().generators() {
        basis_rows.push(chk.packed_row());
        basis_ops.push(chk.clone());
    }
    for l in 0..k {
        basis_rows.push(code.logical_x(l).packed_row());
        basis_ops.push(code.logical_x(l).clone());
    }
    for l in 0..k {
        basis_rows.push(code.logical_z(l).packed_row());
        basis_ops.push(code.logical_z(l).clone());
    }
    let num_checks = code.num_checks();
    let mut ech = basis_rows.clone();
    let mut combos: Vec<u64> = (0..ech.len()).map(|i| 1u64 << i).collect();
    // echelonize with combination tracking
    {
        let width = 2 * m;
        let mut rank = 0usize;
        for col in 0..width {
            let mask = 1u64 << col;
            let Some(p) = (rank..ech.len()).find(|&i| ech[i] & mask != 0) else {
                continue;
            };
            ech.swap(rank, p);
            combos.swap(rank, p);
            for i in 0..ech.len() {
                if i != rank && ech[i] & mask != 0 {
                    ech[i] ^= ech[rank];
                    combos[i] ^= combos[rank];
                }
            }
            rank += 1;
        }
        ech.truncate(rank);
        combos.truncate(rank);
    }

    let mut logical_gens: Vec<PauliProduct> = Vec::new();
    for t in &gens {
        // coset representative modulo the measured checks, sign tracked
        let reduced = check_group.reduce_operator(t);
        if reduced.is_identity_bits() {
            continue;
        }
        let total_sign = reduced
            .sign()
            .expect("post-measurement elements are Hermitian");
        // decompose column by column over the per-party basis
        let mut lambda = PauliProduct::identity(k * n);
        let mut sign = total_sign;
        let mut decomposable = true;
        for c in 0..n {
            let positions = setup.column_positions(c);
            let col = reduced.restrict(&positions).expect("column layout");
            if col.is_identity_bits() {
                continue;
            }
            let mut v = col.packed_row();
            let mut used = 0u64;
            for (row_idx, &row) in ech.iter().enumerate() {
                let pivot = row.trailing_zeros();
                if v & (1u64 << pivot) != 0 {
                    v ^= row;
                    used ^= combos[row_idx];
                }
            }
            if v != 0 {
                decomposable = false;
                break;
            }
            // rebuild the product in basis order to fix the sign
            let mut prod = PauliProduct::identity(m);
            for (b, op) in basis_ops.iter().enumerate() {
                if (used >> b) & 1 == 1 {
                    prod.mul_assign(op);
                }
            }
            let prod = prod.hermitized();
            debug_assert!(prod.same_bits(&col));
            sign = sign.times(prod.sign().expect("hermitized product"));
            for l in 0..k {
                let xb = (used >> (num_checks + l)) & 1 == 1;
                let zb = (used >> (num_checks + k + l)) & 1 == 1;
                lambda.set_factor(c * k + l, crate::pauli::Factor::from_bits(xb, zb));
            }
        }
        if !decomposable {
            continue;
        }
        let lambda = lambda.times_i(sign.phase_exp());
        if lambda.is_identity_bits() {
            continue;
        }
        let mut attempt = logical_gens.clone();
        attempt.push(lambda.clone());
        match PauliGroup::new(attempt) {
            Ok(_) => logical_gens.push(lambda),
            Err(GroupError::Dependent { .. }) => {}
            Err(e) => return Err(DecodedGroupError::Group(e)),
        }
    }
    PauliGroup::new(logical_gens).map_err(DecodedGroupError::Group)
}
