//! Forward pulse-schedule compilation and the generation-time cost model.
//!
//! A verified derivation chain, read in reverse with inverted senses, is the
//! generation schedule: extract the initial Hamiltonian, align its axes to
//! the chain's terminal line, then undo the chain step by step until the
//! stabilizer sum stands. Costs follow the fixed accounting:
//!
//! - an interaction block (one edge group, used once each way per cycle)
//!   takes `2τ_op + 9τ_rot`;
//! - a rotation step takes `2τ_rot` (once in each conjugation half of the
//!   cycle), except rotations stacked with an interaction block, which run
//!   inside its window and are free;
//! - the initial-Hamiltonian prologue carries the chain's stated
//!   rotation-time overhead;
//! - a two-half code (Steane) doubles its half and adds one `2τ_rot`
//!   conversion rotation.

use serde::Serialize;

use crate::codes::{CodeSpec, ResolvedStep};
use crate::error::{Error, Result};
use crate::pauli::{Angle, Axis, ElementaryOp, PauliSum};
use crate::text;
use crate::InteractionKind;

/// Device timing constants. `τ_op = π/(4J)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CostModel {
    pub tau_op_ns: f64,
    pub tau_rot_ns: f64,
}

impl CostModel {
    /// Defaults for a coupling of `J/(2π) = 20 MHz` and 1 ns rotations:
    /// `τ_op = 6.25 ns`, `τ_rot = 1 ns`.
    pub fn default_device() -> CostModel {
        CostModel {
            tau_op_ns: 6.25,
            tau_rot_ns: 1.0,
        }
    }

    /// From a coupling frequency `J/(2π)` in Hz: `τ_op = π/(4J)` with
    /// `J = 2π·j_hz`.
    pub fn from_j_hz(j_hz: f64, tau_rot_ns: f64) -> CostModel {
        CostModel {
            tau_op_ns: 1e9 / (8.0 * j_hz),
            tau_rot_ns,
        }
    }
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel::default_device()
    }
}

/// A symbolic duration `a·τ_op + b·τ_rot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Duration {
    pub tau_op: u32,
    pub tau_rot: u32,
}

impl Duration {
    pub const ZERO: Duration = Duration {
        tau_op: 0,
        tau_rot: 0,
    };

    pub fn new(tau_op: u32, tau_rot: u32) -> Duration {
        Duration { tau_op, tau_rot }
    }

    pub fn ns(&self, model: &CostModel) -> f64 {
        self.tau_op as f64 * model.tau_op_ns + self.tau_rot as f64 * model.tau_rot_ns
    }

    pub fn add(self, other: Duration) -> Duration {
        Duration {
            tau_op: self.tau_op + other.tau_op,
            tau_rot: self.tau_rot + other.tau_rot,
        }
    }

    /// Render as `a*tau_op + b*tau_rot`.
    pub fn expr(&self) -> String {
        format!("{}*tau_op + {}*tau_rot", self.tau_op, self.tau_rot)
    }
}

/// What a scheduled step is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// Extraction of the initial Hamiltonian from the always-on lattice.
    ExtractionPrologue,
    /// A group of parallel single-qubit rotations.
    RotationGroup,
    /// One use of a selected edge group each way (`±H_op`).
    InteractionBlock,
    /// The rotation step converting one generated half into the other.
    ConversionRotation,
}

/// One scheduled step of the forward generation sequence.
#[derive(Debug, Clone)]
pub struct ScheduledStep {
    pub kind: StepKind,
    pub ops: Vec<ElementaryOp>,
    pub duration: Duration,
    pub label: String,
    /// Rotations that run inside an interaction window (zero duration).
    pub concurrent: bool,
}

/// A contiguous generation segment producing one target sum.
#[derive(Debug, Clone)]
pub struct Segment {
    pub label: String,
    pub steps: Vec<ScheduledStep>,
    /// The initial Hamiltonian with the terminal line's signs, unit
    /// amplitudes.
    pub conjugation_input: PauliSum,
    pub target: PauliSum,
}

impl Segment {
    pub fn duration(&self) -> Duration {
        self.steps
            .iter()
            .fold(Duration::ZERO, |acc, s| acc.add(s.duration))
    }

    /// Conjugate the signed initial Hamiltonian through every op in order.
    pub fn conjugate_through(&self) -> Result<PauliSum> {
        let mut h = self.conjugation_input.clone();
        for step in &self.steps {
            for op in &step.ops {
                h = h.conjugate_elementary(op)?;
            }
        }
        Ok(h)
    }
}

/// An ordered pulse schedule for generating a code's stabilizer sum.
#[derive(Debug, Clone)]
pub struct PulseSequence {
    pub code: String,
    pub kind: InteractionKind,
    pub n_qubits: usize,
    pub segments: Vec<Segment>,
    pub prologue_tau_rot: u32,
}

impl PulseSequence {
    pub fn total_duration(&self) -> Duration {
        self.segments
            .iter()
            .fold(Duration::ZERO, |acc, s| acc.add(s.duration()))
    }

    /// The full stabilizer sum this sequence generates (all segments).
    pub fn total_target(&self) -> Result<PauliSum> {
        let mut sum = PauliSum::zero(self.n_qubits);
        for seg in &self.segments {
            sum = sum.add(&seg.target)?;
        }
        Ok(sum)
    }
}

/// Compile a verified chain into the forward generation schedule.
///
/// Refuses with the first failing line if the chain does not verify.
pub fn compile(code: &CodeSpec, kind: InteractionKind) -> Result<PulseSequence> {
    let report = crate::codes::verify_chain(code, kind)?;
    if !report.all_exact {
        return Err(Error::UnverifiedChain {
            code: code.name.clone(),
            kind: kind.to_string(),
            line: report.first_mismatch_line().unwrap_or(0),
        });
    }
    let chain = code.chain(kind)?;
    let terminal = chain.terminal().clone();

    let (alignment_ops, signed_h_ini) = derive_alignment(&terminal, &chain.h_ini)?;

    let mut steps = Vec::new();
    steps.push(ScheduledStep {
        kind: StepKind::ExtractionPrologue,
        ops: Vec::new(),
        duration: Duration::new(0, chain.prologue_tau_rot),
        label: "extract initial Hamiltonian".into(),
        concurrent: false,
    });
    if !alignment_ops.is_empty() {
        steps.push(ScheduledStep {
            kind: StepKind::RotationGroup,
            ops: alignment_ops,
            duration: Duration::new(0, 2),
            label: "align initial axes to the terminal line".into(),
            concurrent: false,
        });
    }
    for (i, resolved) in report.resolved.iter().enumerate().rev() {
        steps.extend(reverse_step(resolved, i + 2));
    }

    let mut segments = Vec::new();
    if code.chain_covers_half {
        let conversion = conversion_rotation(code, &chain.target)?;
        let target_x = chain.target.clone();
        let target_z = apply_ops(&target_x, &conversion.ops)?;
        let mut steps_z = steps.clone();
        steps_z.push(conversion);
        segments.push(Segment {
            label: "x-type half".into(),
            steps,
            conjugation_input: signed_h_ini.clone(),
            target: target_x,
        });
        segments.push(Segment {
            label: "z-type half".into(),
            steps: steps_z,
            conjugation_input: signed_h_ini,
            target: target_z,
        });
    } else {
        segments.push(Segment {
            label: "full".into(),
            steps,
            conjugation_input: signed_h_ini,
            target: chain.target.clone(),
        });
    }

    let seq = PulseSequence {
        code: code.name.clone(),
        kind,
        n_qubits: code.n,
        segments,
        prologue_tau_rot: chain.prologue_tau_rot,
    };

    // Compilation correctness: conjugating the signed initial Hamiltonian
    // through each segment must land on its target bit-exactly, and the
    // segment targets must add up to the full stabilizer sum.
    for seg in &seq.segments {
        let out = seg.conjugate_through()?;
        if !out.exact_eq(&seg.target) {
            return Err(Error::MalformedOp(format!(
                "compiled segment `{}` does not reproduce its target",
                seg.label
            )));
        }
    }
    if !seq.total_target()?.exact_eq(&code.stabilizer_sum()) {
        return Err(Error::MalformedOp(
            "compiled segments do not add up to the stabilizer sum".into(),
        ));
    }
    Ok(seq)
}

/// Turn one resolved (forward-chain) step into scheduled inverse steps.
/// Within a chain step rotations precede edges, so the inverse applies the
/// inverted edges first.
fn reverse_step(step: &ResolvedStep, chain_line: usize) -> Vec<ScheduledStep> {
    let mut rotations = Vec::new();
    let mut edges = Vec::new();
    for op in step.ops.iter().rev() {
        match op {
            ElementaryOp::AxisRotation { .. } => rotations.push(op.inverse()),
            _ => edges.push(op.inverse()),
        }
    }
    let mut out = Vec::new();
    if !edges.is_empty() {
        out.push(ScheduledStep {
            kind: StepKind::InteractionBlock,
            ops: edges,
            duration: Duration::new(2, 9),
            label: format!("undo chain line {chain_line} (edges)"),
            concurrent: false,
        });
    }
    if !rotations.is_empty() {
        let concurrent = step.concurrent_rotations;
        out.push(ScheduledStep {
            kind: StepKind::RotationGroup,
            ops: rotations,
            duration: if concurrent {
                Duration::ZERO
            } else {
                Duration::new(0, 2)
            },
            label: format!("undo chain line {chain_line} (rotations)"),
            concurrent,
        });
    }
    out
}

/// Find the parallel rotation group mapping the initial Hamiltonian's axes
/// onto the terminal line's axes, and the signed initial Hamiltonian it
/// acts on (the terminal conjugated back through the group).
fn derive_alignment(
    terminal: &PauliSum,
    h_ini: &PauliSum,
) -> Result<(Vec<ElementaryOp>, PauliSum)> {
    let n = terminal.n_qubits();
    let term_letters = consistent_letters(terminal)?;
    let base_letters = consistent_letters(h_ini)?;
    let mut ops = Vec::new();
    for q in 1..=n {
        match (base_letters[q], term_letters[q]) {
            (Some(from), Some(to)) if from != to => {
                ops.push(ElementaryOp::AxisRotation {
                    qubit: q,
                    axis: Axis::third(from, to),
                    angle: Angle::pi_over_4(2),
                });
            }
            (Some(_), Some(_)) => {}
            (None, None) => {}
            _ => {
                return Err(Error::MalformedOp(format!(
                    "initial Hamiltonian and terminal line disagree on qubit {q} support"
                )))
            }
        }
    }
    // Invert the group to recover the signed initial Hamiltonian.
    let mut signed = terminal.clone();
    for op in &ops {
        signed = signed.conjugate_elementary(&op.inverse())?;
    }
    // Sanity: the signed form must touch exactly the recorded strings.
    let base_keys: Vec<_> = h_ini.iter().map(|(s, _)| s).collect();
    let signed_keys: Vec<_> = signed.iter().map(|(s, _)| s).collect();
    if base_keys != signed_keys {
        return Err(Error::MalformedOp(
            "axis alignment does not map the initial Hamiltonian onto the terminal line".into(),
        ));
    }
    Ok((ops, signed))
}

/// The per-qubit letter used consistently across all terms, or an error if
/// a qubit carries two different letters.
fn consistent_letters(sum: &PauliSum) -> Result<Vec<Option<Axis>>> {
    let n = sum.n_qubits();
    let mut letters: Vec<Option<Axis>> = vec![None; n + 1];
    for (string, _) in sum.iter() {
        for q in 1..=n {
            if let Some(axis) = string.letter(q)? {
                match letters[q] {
                    None => letters[q] = Some(axis),
                    Some(prev) if prev == axis => {}
                    Some(prev) => {
                        return Err(Error::MalformedOp(format!(
                            "qubit {q} carries both {} and {}",
                            prev.letter(),
                            axis.letter()
                        )))
                    }
                }
            }
        }
    }
    Ok(letters)
}

/// The conversion step for two-half codes: parallel π/2 y-rotations on all
/// qubits map the X-type half onto the Z-type half.
fn conversion_rotation(code: &CodeSpec, target_x: &PauliSum) -> Result<ScheduledStep> {
    let ops: Vec<ElementaryOp> = (1..=code.n)
        .map(|q| ElementaryOp::AxisRotation {
            qubit: q,
            axis: Axis::Y,
            angle: Angle::pi_over_4(2),
        })
        .collect();
    let target_z = apply_ops(target_x, &ops)?;
    let mut expect = PauliSum::zero(code.n);
    for g in code.generators.iter().skip(code.generators.len() / 2) {
        expect.add_string(g, 1.0)?;
    }
    if !target_z.exact_eq(&expect) {
        return Err(Error::MalformedOp(
            "conversion rotation does not map the X half onto the Z half".into(),
        ));
    }
    Ok(ScheduledStep {
        kind: StepKind::ConversionRotation,
        ops,
        duration: Duration::new(0, 2),
        label: "convert x-type half to z-type half".into(),
        concurrent: false,
    })
}

fn apply_ops(h: &PauliSum, ops: &[ElementaryOp]) -> Result<PauliSum> {
    let mut out = h.clone();
    for op in ops {
        out = out.conjugate_elementary(op)?;
    }
    Ok(out)
}

/// Cost of an entire sequence under a timing model.
#[derive(Debug, Clone, Serialize)]
pub struct CostReport {
    pub code: String,
    pub kind: InteractionKind,
    pub tau_op_units: u32,
    pub tau_rot_units: u32,
    pub total_ns: f64,
    pub formula: String,
}

/// Sum the per-step duration formulas.
pub fn cost(seq: &PulseSequence, model: &CostModel) -> CostReport {
    let d = seq.total_duration();
    CostReport {
        code: seq.code.clone(),
        kind: seq.kind,
        tau_op_units: d.tau_op,
        tau_rot_units: d.tau_rot,
        total_ns: d.ns(model),
        formula: d.expr(),
    }
}

/// Raw pulse counts feeding the fidelity model: interaction uses are the
/// `τ_op` units (one `±H_op` use each), rotation units are the `τ_rot`
/// units including the π-pulses inside interaction blocks and the
/// extraction prologue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Census {
    pub n_interaction_uses: u32,
    pub n_single_rotations: u32,
    pub n_pulses_total: u32,
}

pub fn pulse_census(seq: &PulseSequence) -> Census {
    let d = seq.total_duration();
    Census {
        n_interaction_uses: d.tau_op,
        n_single_rotations: d.tau_rot,
        n_pulses_total: d.tau_op + d.tau_rot,
    }
}

/// One entry of the generator-by-generator baseline accounting.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineEntry {
    pub label: String,
    pub duration: Duration,
}

/// Cost of the previous, generator-by-generator method.
#[derive(Debug, Clone, Serialize)]
pub struct BaselineReport {
    pub code: String,
    pub kind: InteractionKind,
    pub entries: Vec<BaselineEntry>,
    pub tau_op_units: u32,
    pub tau_rot_units: u32,
    pub total_ns: f64,
}

/// The stated per-generator accounting of the baseline method.
pub fn baseline_cost(code: &CodeSpec, kind: InteractionKind, model: &CostModel) -> Result<BaselineReport> {
    let entry = |label: &str, a: u32, b: u32| BaselineEntry {
        label: label.into(),
        duration: Duration::new(a, b),
    };
    let entries: Vec<BaselineEntry> = match (code.name.as_str(), kind) {
        ("nine-qubit", InteractionKind::Xy) => {
            // G1..G6: one block plus two rotation steps and the initial
            // extraction each (G_i → Z_iX_{i+1} → Y_i → X_i); G7, G8: the
            // recorded three-block reduction.
            let mut v: Vec<BaselineEntry> = (1..=6)
                .map(|i| entry(&format!("G{i}"), 2, 23))
                .collect();
            v.push(entry("G7", 6, 45));
            v.push(entry("G8", 6, 45));
            v
        }
        ("nine-qubit", InteractionKind::Ising) => {
            // G1..G6 are already two-body: direct extraction only.
            let mut v: Vec<BaselineEntry> =
                (1..=6).map(|i| entry(&format!("G{i}"), 0, 4)).collect();
            v.push(entry("G7", 4, 28));
            v.push(entry("G8", 4, 28));
            v
        }
        ("five-qubit", InteractionKind::Xy) => {
            vec![entry("G1..G4 (2D accounting)", 24, 162)]
        }
        ("five-qubit", InteractionKind::Ising) => vec![
            entry("G1", 2, 17),
            entry("G2", 2, 17),
            entry("G3", 4, 28),
            entry("G4", 6, 35),
        ],
        ("steane", InteractionKind::Xy) => vec![
            entry("x-type half", 22, 143),
            entry("z-type half (+ conversion)", 22, 145),
        ],
        ("steane", InteractionKind::Ising) => vec![
            entry("G1", 4, 26),
            entry("G2", 6, 35),
            entry("G3", 8, 48),
            entry("G4", 4, 26),
            entry("G5", 6, 35),
            entry("G6", 8, 48),
            entry("conversion", 0, 2),
        ],
        _ => {
            return Err(Error::UnknownCode(format!(
                "no baseline accounting for {}/{kind}",
                code.name
            )))
        }
    };
    let total = entries
        .iter()
        .fold(Duration::ZERO, |acc, e| acc.add(e.duration));
    Ok(BaselineReport {
        code: code.name.clone(),
        kind,
        entries,
        tau_op_units: total.tau_op,
        tau_rot_units: total.tau_rot,
        total_ns: total.ns(model),
    })
}

/// A place where two published values disagree; the adopted value is the
/// one whose arithmetic is internally consistent.
#[derive(Debug, Clone, Serialize)]
pub struct ValueDiscrepancy {
    pub field: String,
    pub adopted: f64,
    pub alternate: f64,
    pub note: String,
}

/// One row of the generation-time comparison.
#[derive(Debug, Clone, Serialize)]
pub struct TableRow {
    pub code: String,
    pub kind: InteractionKind,
    pub previous_tau_op: u32,
    pub previous_tau_rot: u32,
    pub previous_ns: f64,
    pub new_tau_op: u32,
    pub new_tau_rot: u32,
    pub new_ns: f64,
    pub improvement_pct: f64,
    pub discrepancies: Vec<ValueDiscrepancy>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TablesReport {
    pub tau_op_ns: f64,
    pub tau_rot_ns: f64,
    pub rows: Vec<TableRow>,
}

/// Reproduce the generation-time comparison for all six code/interaction
/// pairs, flagging the tabulated values that contradict the running-text
/// arithmetic instead of silently reconciling them.
pub fn tables(model: &CostModel) -> Result<TablesReport> {
    let codes = crate::codes::builtin_codes()?;
    let mut rows = Vec::new();
    for kind in [InteractionKind::Xy, InteractionKind::Ising] {
        for code in &codes {
            let seq = compile(code, kind)?;
            let new = cost(&seq, model);
            let prev = baseline_cost(code, kind, model)?;
            let improvement_pct = 100.0 * (1.0 - new.total_ns / prev.total_ns);
            let mut discrepancies = Vec::new();
            if code.name == "nine-qubit" && kind == InteractionKind::Xy {
                discrepancies.push(ValueDiscrepancy {
                    field: "new_tau_rot".into(),
                    adopted: 94.0,
                    alternate: 92.0,
                    note: "the summary table lists 92 rotation units, but 16*6.25 + 94 = 194 ns \
                           matches the stated total"
                        .into(),
                });
                discrepancies.push(ValueDiscrepancy {
                    field: "previous_ns".into(),
                    adopted: 378.0,
                    alternate: 376.0,
                    note: "the running text once states 376 ns; 24*6.25 + 228 = 378 ns".into(),
                });
            }
            if code.name == "nine-qubit" && kind == InteractionKind::Ising {
                discrepancies.push(ValueDiscrepancy {
                    field: "new_tau_rot".into(),
                    adopted: 63.0,
                    alternate: 61.0,
                    note: "the summary table lists 61 rotation units, but 10*6.25 + 63 = 125.5 ns \
                           matches the stated total"
                        .into(),
                });
            }
            rows.push(TableRow {
                code: code.name.clone(),
                kind,
                previous_tau_op: prev.tau_op_units,
                previous_tau_rot: prev.tau_rot_units,
                previous_ns: prev.total_ns,
                new_tau_op: new.tau_op_units,
                new_tau_rot: new.tau_rot_units,
                new_ns: new.total_ns,
                improvement_pct,
                discrepancies,
            });
        }
    }
    Ok(TablesReport {
        tau_op_ns: model.tau_op_ns,
        tau_rot_ns: model.tau_rot_ns,
        rows,
    })
}

/// JSON-friendly schedule row.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleRow {
    pub segment: usize,
    pub segment_label: String,
    pub index: usize,
    pub kind: StepKind,
    pub label: String,
    pub qubits: Vec<usize>,
    pub ops: Vec<OpExport>,
    pub t_start_expr: String,
    pub duration_expr: String,
    pub t_start_ns: f64,
    pub duration_ns: f64,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum OpExport {
    Rotation {
        qubit: usize,
        axis: char,
        angle: String,
        angle_rad: f64,
    },
    XyEdge {
        i: usize,
        j: usize,
        theta: String,
        theta_rad: f64,
    },
    IsingEdge {
        i: usize,
        j: usize,
        theta: String,
        theta_rad: f64,
    },
    PauliEvolution {
        string: String,
        theta: String,
        theta_rad: f64,
    },
}

fn angle_text(a: Angle) -> String {
    match a {
        Angle::Exact(k) => match k {
            0 => "0".into(),
            1 => "pi/4".into(),
            -1 => "-pi/4".into(),
            2 => "pi/2".into(),
            -2 => "-pi/2".into(),
            4 => "pi".into(),
            -4 => "-pi".into(),
            other => format!("{other}*pi/4"),
        },
        Angle::Rad(v) => format!("{v}"),
    }
}

fn export_op(op: &ElementaryOp) -> OpExport {
    match op {
        ElementaryOp::AxisRotation { qubit, axis, angle } => OpExport::Rotation {
            qubit: *qubit,
            axis: axis.letter().to_ascii_lowercase(),
            angle: angle_text(*angle),
            angle_rad: angle.radians(),
        },
        ElementaryOp::XyEdge { i, j, theta } => OpExport::XyEdge {
            i: *i,
            j: *j,
            theta: angle_text(*theta),
            theta_rad: theta.radians(),
        },
        ElementaryOp::IsingEdge { i, j, theta } => OpExport::IsingEdge {
            i: *i,
            j: *j,
            theta: angle_text(*theta),
            theta_rad: theta.radians(),
        },
        ElementaryOp::PauliEvolution { string, theta } => OpExport::PauliEvolution {
            string: text::render_string(string),
            theta: angle_text(*theta),
            theta_rad: theta.radians(),
        },
    }
}

fn op_qubits(op: &ElementaryOp) -> Vec<usize> {
    match op {
        ElementaryOp::AxisRotation { qubit, .. } => vec![*qubit],
        ElementaryOp::XyEdge { i, j, .. } | ElementaryOp::IsingEdge { i, j, .. } => vec![*i, *j],
        ElementaryOp::PauliEvolution { string, .. } => (1..=string.n_qubits())
            .filter(|&q| string.letter(q).unwrap().is_some())
            .collect(),
    }
}

/// Full schedule export with symbolic and evaluated start times.
#[derive(Debug, Clone, Serialize)]
pub struct ScheduleExport {
    pub code: String,
    pub kind: InteractionKind,
    pub n_qubits: usize,
    pub tau_op_ns: f64,
    pub tau_rot_ns: f64,
    pub steps: Vec<ScheduleRow>,
    pub total_tau_op: u32,
    pub total_tau_rot: u32,
    pub total_ns: f64,
}

pub fn export_schedule(seq: &PulseSequence, model: &CostModel) -> ScheduleExport {
    let mut rows = Vec::new();
    let mut t = Duration::ZERO;
    for (si, seg) in seq.segments.iter().enumerate() {
        for (i, step) in seg.steps.iter().enumerate() {
            let mut qubits: Vec<usize> = step.ops.iter().flat_map(op_qubits).collect();
            qubits.sort_unstable();
            qubits.dedup();
            rows.push(ScheduleRow {
                segment: si,
                segment_label: seg.label.clone(),
                index: i,
                kind: step.kind,
                label: step.label.clone(),
                qubits,
                ops: step.ops.iter().map(export_op).collect(),
                t_start_expr: t.expr(),
                duration_expr: step.duration.expr(),
                t_start_ns: t.ns(model),
                duration_ns: step.duration.ns(model),
            });
            t = t.add(step.duration);
        }
    }
    let total = seq.total_duration();
    ScheduleExport {
        code: seq.code.clone(),
        kind: seq.kind,
        n_qubits: seq.n_qubits,
        tau_op_ns: model.tau_op_ns,
        tau_rot_ns: model.tau_rot_ns,
        steps: rows,
        total_tau_op: total.tau_op,
        total_tau_rot: total.tau_rot,
        total_ns: total.ns(model),
    }
}

/// Flattened CSV timing table. Columns:
/// `segment,step,kind,label,qubits,duration_tau_op,duration_tau_rot,`
/// `t_start_tau_op,t_start_tau_rot,t_start_ns,duration_ns`.
pub fn schedule_csv(seq: &PulseSequence, model: &CostModel) -> String {
    let mut out = String::from(
        "segment,step,kind,label,qubits,duration_tau_op,duration_tau_rot,\
         t_start_tau_op,t_start_tau_rot,t_start_ns,duration_ns\n",
    );
    let mut t = Duration::ZERO;
    for (si, seg) in seq.segments.iter().enumerate() {
        for (i, step) in seg.steps.iter().enumerate() {
            let mut qubits: Vec<usize> = step.ops.iter().flat_map(op_qubits).collect();
            qubits.sort_unstable();
            qubits.dedup();
            let qubits: Vec<String> = qubits.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!(
                "{},{},{:?},\"{}\",\"{}\",{},{},{},{},{},{}\n",
                si,
                i,
                step.kind,
                step.label,
                qubits.join(" "),
                step.duration.tau_op,
                step.duration.tau_rot,
                t.tau_op,
                t.tau_rot,
                t.ns(model),
                step.duration.ns(model),
            ));
            t = t.add(step.duration);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::builtin_code;

    fn model() -> CostModel {
        CostModel::default_device()
    }

    #[test]
    fn default_model_constants() {
        let m = CostModel::from_j_hz(20e6, 1.0);
        assert!((m.tau_op_ns - 6.25).abs() < 1e-12);
    }

    #[test]
    fn new_method_costs_match_recorded_formulas() {
        let cases = [
            ("nine-qubit", InteractionKind::Xy, 16, 94, 194.0),
            ("five-qubit", InteractionKind::Xy, 10, 65, 127.5),
            ("steane", InteractionKind::Xy, 20, 132, 257.0),
            ("nine-qubit", InteractionKind::Ising, 10, 63, 125.5),
            ("five-qubit", InteractionKind::Ising, 12, 76, 151.0),
            ("steane", InteractionKind::Ising, 20, 124, 249.0),
        ];
        for (name, kind, a, b, ns) in cases {
            let code = builtin_code(name).unwrap();
            let seq = compile(&code, kind).unwrap();
            let c = cost(&seq, &model());
            assert_eq!((c.tau_op_units, c.tau_rot_units), (a, b), "{name}/{kind}");
            assert!((c.total_ns - ns).abs() < 1e-9, "{name}/{kind}: {}", c.total_ns);
        }
    }

    #[test]
    fn baseline_costs_match_recorded_totals() {
        let cases = [
            ("nine-qubit", InteractionKind::Xy, 24, 228, 378.0),
            ("five-qubit", InteractionKind::Xy, 24, 162, 312.0),
            ("steane", InteractionKind::Xy, 44, 288, 563.0),
            ("nine-qubit", InteractionKind::Ising, 8, 80, 130.0),
            ("five-qubit", InteractionKind::Ising, 14, 97, 184.5),
            ("steane", InteractionKind::Ising, 36, 220, 445.0),
        ];
        for (name, kind, a, b, ns) in cases {
            let code = builtin_code(name).unwrap();
            let r = baseline_cost(&code, kind, &model()).unwrap();
            assert_eq!((r.tau_op_units, r.tau_rot_units), (a, b), "{name}/{kind}");
            assert!((r.total_ns - ns).abs() < 1e-9, "{name}/{kind}");
        }
    }

    #[test]
    fn improvements_match_recorded_percentages() {
        let want = [
            ("nine-qubit", InteractionKind::Xy, 48.7),
            ("five-qubit", InteractionKind::Xy, 59.1),
            ("steane", InteractionKind::Xy, 54.4),
            ("nine-qubit", InteractionKind::Ising, 3.5),
            ("five-qubit", InteractionKind::Ising, 18.2),
            ("steane", InteractionKind::Ising, 44.0),
        ];
        let report = tables(&model()).unwrap();
        for (name, kind, pct) in want {
            let row = report
                .rows
                .iter()
                .find(|r| r.code == name && r.kind == kind)
                .unwrap();
            assert!(
                (row.improvement_pct - pct).abs() < 0.5,
                "{name}/{kind}: {}",
                row.improvement_pct
            );
        }
        // the two coefficient discrepancies are flagged, not reconciled
        let nine_xy = report
            .rows
            .iter()
            .find(|r| r.code == "nine-qubit" && r.kind == InteractionKind::Xy)
            .unwrap();
        assert!(nine_xy
            .discrepancies
            .iter()
            .any(|d| d.field == "new_tau_rot" && d.alternate == 92.0));
        assert_eq!(nine_xy.new_tau_rot, 94);
    }

    #[test]
    fn compiled_conjugation_reproduces_targets() {
        for code in crate::codes::builtin_codes().unwrap() {
            for kind in [InteractionKind::Xy, InteractionKind::Ising] {
                // compile() verifies internally; this re-checks explicitly.
                let seq = compile(&code, kind).unwrap();
                for seg in &seq.segments {
                    assert!(seg.conjugate_through().unwrap().exact_eq(&seg.target));
                }
                assert!(seq
                    .total_target()
                    .unwrap()
                    .exact_eq(&code.stabilizer_sum()));
            }
        }
    }

    #[test]
    fn census_matches_independent_recount() {
        let code = builtin_code("steane").unwrap();
        let seq = compile(&code, InteractionKind::Xy).unwrap();
        let census = pulse_census(&seq);
        assert_eq!(census.n_interaction_uses, 20);
        assert_eq!(census.n_single_rotations, 132);
        assert_eq!(census.n_pulses_total, 152);
        // recount step by step
        let mut a = 0;
        let mut b = 0;
        for seg in &seq.segments {
            for step in &seg.steps {
                a += step.duration.tau_op;
                b += step.duration.tau_rot;
            }
        }
        assert_eq!((a, b), (census.n_interaction_uses, census.n_single_rotations));
    }

    #[test]
    fn zero_cost_model_collapses_to_zero() {
        let code = builtin_code("five-qubit").unwrap();
        let seq = compile(&code, InteractionKind::Xy).unwrap();
        let zero = CostModel {
            tau_op_ns: 0.0,
            tau_rot_ns: 0.0,
        };
        assert_eq!(cost(&seq, &zero).total_ns, 0.0);
    }

    #[test]
    fn unverified_chain_is_refused() {
        let mut code = builtin_code("five-qubit").unwrap();
        let chain = code.chains.get_mut(&InteractionKind::Xy).unwrap();
        let bad = crate::text::parse("-Y2Y3 - Y1Z2Z3Z4X5 + Y4Z5Z1Y2 + Y3Z4Z5Y1", 5).unwrap();
        chain.steps[0].expected = bad;
        match compile(&code, InteractionKind::Xy) {
            Err(Error::UnverifiedChain { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected refusal, got {other:?}"),
        }
    }

    #[test]
    fn schedule_export_is_deterministic() {
        let code = builtin_code("five-qubit").unwrap();
        let seq = compile(&code, InteractionKind::Xy).unwrap();
        let a = serde_json::to_string(&export_schedule(&seq, &model())).unwrap();
        let b = serde_json::to_string(&export_schedule(&seq, &model())).unwrap();
        assert_eq!(a, b);
        let csv = schedule_csv(&seq, &model());
        assert!(csv.lines().count() > 10);
        assert!(csv.starts_with("segment,step,kind,label"));
    }

    #[test]
    fn cost_is_permutation_invariant() {
        // permuting commuting steps never changes the cost
        let code = builtin_code("five-qubit").unwrap();
        let mut seq = compile(&code, InteractionKind::Xy).unwrap();
        let before = cost(&seq, &model());
        seq.segments[0].steps.reverse();
        let after = cost(&seq, &model());
        assert_eq!(
            (before.tau_op_units, before.tau_rot_units),
            (after.tau_op_units, after.tau_rot_units)
        );
    }
}
