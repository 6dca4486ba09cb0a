//! Built-in stabilizer codes and their derivation chains.
//!
//! The nine-qubit, five-qubit and Steane codes ship with their stabilizer
//! generators, logical operators, initial Hamiltonians, and the derivation
//! chains that reduce the stabilizer sum to a single-qubit (or, for the
//! Steane Ising case, two-body) line. Chains live in fixture files so a
//! mismatch against the recorded lines is a failing fixture, not a logic
//! change; the default fixtures are compiled in and can be overridden with
//! the `STABGEN_FIXTURE_DIR` environment variable.
//!
//! [`verify_chain`] replays a chain step by step. Rotation senses (±π/2)
//! and edge senses (±π/4) are not recorded in the annotations; the verifier
//! searches them per step and persists the resolved choice so compilation
//! is deterministic afterwards.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Angle, Axis, ElementaryOp, PauliString, PauliSum};
use crate::text;
use crate::InteractionKind;

/// Environment variable naming a directory with `<code>_<kind>.chain`
/// fixture files that override the compiled-in ones.
pub const FIXTURE_DIR_ENV: &str = "STABGEN_FIXTURE_DIR";

/// An axis exchange applied to one qubit within a chain step, e.g.
/// `x<->z` on qubit 4. Realized as a ±π/2 rotation about the third axis;
/// the sense is resolved during verification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Exchange {
    pub qubit: usize,
    pub a: Axis,
    pub b: Axis,
}

impl Exchange {
    pub fn rotation_axis(&self) -> Axis {
        Axis::third(self.a, self.b)
    }

    /// The rotation with a chosen sense (`+1` → +π/2, `-1` → -π/2).
    pub fn op(&self, sense: i8) -> ElementaryOp {
        ElementaryOp::AxisRotation {
            qubit: self.qubit,
            axis: self.rotation_axis(),
            angle: Angle::pi_over_4(2 * sense as i32),
        }
    }
}

/// One annotated line of a derivation chain: parallel axis exchanges
/// and/or a group of disjoint edge evolutions, plus the expected next line.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub rotations: Vec<Exchange>,
    pub edges: Vec<(usize, usize)>,
    pub expected: PauliSum,
    /// Annotation kept when the bundled line differs from (or completes)
    /// the recorded source derivation.
    pub orig_note: Option<String>,
}

impl ChainStep {
    /// Rotations stacked with an edge group run inside the interaction
    /// window and add no pulse time of their own.
    pub fn concurrent_rotations(&self) -> bool {
        !self.rotations.is_empty() && !self.edges.is_empty()
    }
}

/// A full derivation chain: the target stabilizer sum, the annotated steps,
/// the single-qubit (or two-body) initial Hamiltonian reached, and the cost
/// of extracting that initial Hamiltonian in rotation-time units.
#[derive(Debug, Clone)]
pub struct DerivationChain {
    pub code: String,
    pub kind: InteractionKind,
    pub n_qubits: usize,
    pub target: PauliSum,
    pub steps: Vec<ChainStep>,
    pub h_ini: PauliSum,
    pub prologue_tau_rot: u32,
}

impl DerivationChain {
    /// The last printed line (the fully reduced form).
    pub fn terminal(&self) -> &PauliSum {
        self.steps
            .last()
            .map(|s| &s.expected)
            .unwrap_or(&self.target)
    }
}

/// A stabilizer code with its derivation chains.
#[derive(Debug, Clone)]
pub struct CodeSpec {
    pub name: String,
    pub n: usize,
    pub k: usize,
    pub generators: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub chains: BTreeMap<InteractionKind, DerivationChain>,
    /// For the Steane code the chain covers the X-type half only; the rest
    /// is the chain target conjugated by parallel π/2 y-rotations on every
    /// qubit, and the full schedule doubles the half with one extra
    /// conversion rotation step.
    pub chain_covers_half: bool,
    /// Measurement-free preparation route.
    pub prep: PrepRoute,
}

/// How the encoded states are prepared without measurements.
#[derive(Debug, Clone)]
pub enum PrepRoute {
    /// Ordered `(generator index, modified qubit)` factors
    /// `exp(±iπ/4·G̃_j)` applied to `|0…0⟩` in list order.
    ModifiedGenerators(Vec<(usize, usize)>),
    /// Product of three-qubit cat blocks via one commuting exponential.
    GhzBlocks,
}

impl CodeSpec {
    /// `Σ_i G_i` with unit coefficients.
    pub fn stabilizer_sum(&self) -> PauliSum {
        let mut sum = PauliSum::zero(self.n);
        for g in &self.generators {
            sum.add_string(g, 1.0).expect("generators are canonical");
        }
        sum
    }

    /// The stabilizer Hamiltonian `-Σ_i G_i` whose ground manifold is the
    /// code space.
    pub fn stabilizer_hamiltonian(&self) -> PauliSum {
        self.stabilizer_sum().scaled(-1.0)
    }

    pub fn chain(&self, kind: InteractionKind) -> Result<&DerivationChain> {
        self.chains.get(&kind).ok_or_else(|| Error::MissingChain {
            code: self.name.clone(),
            kind: kind.to_string(),
        })
    }
}

fn pauli(n: usize, axes: &[(usize, Axis)]) -> PauliString {
    PauliString::from_axes(n, axes).expect("static code data")
}

/// The three built-in codes with both interaction chains attached.
pub fn builtin_codes() -> Result<Vec<CodeSpec>> {
    use Axis::{X, Z};
    let mut codes = Vec::new();

    // Nine-qubit code: n=9, k=1, l=8.
    let n = 9;
    let generators = vec![
        pauli(n, &[(1, Z), (2, Z)]),
        pauli(n, &[(2, Z), (3, Z)]),
        pauli(n, &[(4, Z), (5, Z)]),
        pauli(n, &[(5, Z), (6, Z)]),
        pauli(n, &[(7, Z), (8, Z)]),
        pauli(n, &[(8, Z), (9, Z)]),
        pauli(n, &[(1, X), (2, X), (3, X), (4, X), (5, X), (6, X)]),
        pauli(n, &[(4, X), (5, X), (6, X), (7, X), (8, X), (9, X)]),
    ];
    codes.push(CodeSpec {
        name: "nine-qubit".into(),
        n,
        k: 1,
        generators,
        logical_x: pauli(n, &[(1, Z), (4, Z), (7, Z)]),
        logical_z: pauli(n, &[(1, X), (2, X), (3, X)]),
        chains: load_chains("nine-qubit")?,
        chain_covers_half: false,
        prep: PrepRoute::GhzBlocks,
    });

    // Five-qubit code: n=5, k=1, l=4.
    let n = 5;
    let generators = vec![
        pauli(n, &[(1, X), (2, Z), (3, Z), (4, X)]),
        pauli(n, &[(2, X), (3, Z), (4, Z), (5, X)]),
        pauli(n, &[(3, X), (4, Z), (5, Z), (1, X)]),
        pauli(n, &[(4, X), (5, Z), (1, Z), (2, X)]),
    ];
    codes.push(CodeSpec {
        name: "five-qubit".into(),
        n,
        k: 1,
        generators,
        logical_x: pauli(n, &[(1, X), (2, X), (3, X), (4, X), (5, X)]),
        logical_z: pauli(n, &[(1, Z), (2, Z), (3, Z), (4, Z), (5, Z)]),
        chains: load_chains("five-qubit")?,
        chain_covers_half: false,
        // Factors applied in the order G̃1, G̃3, G̃4, G̃2 with modified
        // qubits 1, 3, 2, 5.
        prep: PrepRoute::ModifiedGenerators(vec![(0, 1), (2, 3), (3, 2), (1, 5)]),
    });

    // Steane code: n=7, k=1, l=6.
    let n = 7;
    let generators = vec![
        pauli(n, &[(1, X), (2, X), (3, X), (4, X)]),
        pauli(n, &[(1, X), (2, X), (5, X), (6, X)]),
        pauli(n, &[(1, X), (3, X), (5, X), (7, X)]),
        pauli(n, &[(1, Z), (2, Z), (3, Z), (4, Z)]),
        pauli(n, &[(1, Z), (2, Z), (5, Z), (6, Z)]),
        pauli(n, &[(1, Z), (3, Z), (5, Z), (7, Z)]),
    ];
    codes.push(CodeSpec {
        name: "steane".into(),
        n,
        k: 1,
        generators,
        logical_x: pauli(n, &[(5, X), (6, X), (7, X)]),
        logical_z: pauli(n, &[(5, Z), (6, Z), (7, Z)]),
        chains: load_chains("steane")?,
        chain_covers_half: true,
        prep: PrepRoute::ModifiedGenerators(vec![(0, 4), (1, 6), (2, 7)]),
    });

    Ok(codes)
}

/// Look a built-in code up by name (`nine-qubit`, `five-qubit`, `steane`;
/// a few aliases accepted).
pub fn builtin_code(name: &str) -> Result<CodeSpec> {
    let canonical = match name.to_ascii_lowercase().as_str() {
        "nine-qubit" | "nine" | "9" | "shor" => "nine-qubit",
        "five-qubit" | "five" | "5" => "five-qubit",
        "steane" | "seven-qubit" | "7" => "steane",
        other => return Err(Error::UnknownCode(other.into())),
    };
    builtin_codes()?
        .into_iter()
        .find(|c| c.name == canonical)
        .ok_or_else(|| Error::UnknownCode(name.into()))
}

const CHAIN_FIXTURES: &[(&str, &str)] = &[
    (
        "nine_qubit_xy",
        include_str!("../fixtures/chains/nine_qubit_xy.chain"),
    ),
    (
        "nine_qubit_ising",
        include_str!("../fixtures/chains/nine_qubit_ising.chain"),
    ),
    (
        "five_qubit_xy",
        include_str!("../fixtures/chains/five_qubit_xy.chain"),
    ),
    (
        "five_qubit_ising",
        include_str!("../fixtures/chains/five_qubit_ising.chain"),
    ),
    ("steane_xy", include_str!("../fixtures/chains/steane_xy.chain")),
    (
        "steane_ising",
        include_str!("../fixtures/chains/steane_ising.chain"),
    ),
];

const OLD_METHOD_FIXTURES: &[(&str, &str)] = &[
    (
        "nine_g7_xy",
        include_str!("../fixtures/old_method/nine_g7_xy.chain"),
    ),
    (
        "five_g1_ising",
        include_str!("../fixtures/old_method/five_g1_ising.chain"),
    ),
    (
        "five_g3_ising",
        include_str!("../fixtures/old_method/five_g3_ising.chain"),
    ),
];

fn fixture_text(stem: &str, builtin: &str) -> Result<String> {
    if let Ok(dir) = std::env::var(FIXTURE_DIR_ENV) {
        let path = std::path::Path::new(&dir).join(format!("{stem}.chain"));
        if path.exists() {
            return Ok(std::fs::read_to_string(path)?);
        }
    }
    Ok(builtin.to_string())
}

fn load_chains(code: &str) -> Result<BTreeMap<InteractionKind, DerivationChain>> {
    let stem_base = code.replace('-', "_");
    let mut chains = BTreeMap::new();
    for kind in [InteractionKind::Xy, InteractionKind::Ising] {
        let stem = format!("{stem_base}_{kind}");
        let builtin = CHAIN_FIXTURES
            .iter()
            .find(|(s, _)| *s == stem)
            .map(|(_, t)| *t)
            .ok_or_else(|| Error::MissingChain {
                code: code.into(),
                kind: kind.to_string(),
            })?;
        let chain = parse_chain(&fixture_text(&stem, builtin)?)?;
        chains.insert(kind, chain);
    }
    Ok(chains)
}

/// The generator-by-generator baseline reduction chains that are recorded
/// in full (the remaining baseline entries are cost-only; see
/// `compile::baseline_cost`).
pub fn old_method_chains() -> Result<Vec<DerivationChain>> {
    OLD_METHOD_FIXTURES
        .iter()
        .map(|(stem, builtin)| parse_chain(&fixture_text(stem, builtin)?))
        .collect()
}

/// Parse a `.chain` fixture.
///
/// Grammar (one record per line, `#` comments):
/// ```text
/// code: five-qubit
/// kind: xy
/// qubits: 5
/// target: <pauli sum>
/// step: <annotation> => <pauli sum> [!orig: <note>]
/// h_ini: <pauli sum>
/// prologue: <rotation-time units>
/// ```
/// Annotations combine axis exchanges `(x<->z:2,3)` and edge groups
/// `H_XY^{12}+H_XY^{34}` / `H_Ising^{23}`, comma-separated when stacked.
pub fn parse_chain(input: &str) -> Result<DerivationChain> {
    let mut code = None;
    let mut kind = None;
    let mut qubits = None;
    let mut target = None;
    let mut steps: Vec<ChainStep> = Vec::new();
    let mut h_ini = None;
    let mut prologue = None;

    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("line {}: missing `:`", lineno + 1)))?;
        let value = value.trim();
        match key.trim() {
            "code" => code = Some(value.to_string()),
            "kind" => kind = Some(value.parse::<InteractionKind>()?),
            "qubits" => {
                qubits = Some(value.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("line {}: bad qubit count", lineno + 1))
                })?)
            }
            "target" => {
                let n = qubits.ok_or_else(|| {
                    Error::Parse("`qubits:` must precede `target:`".into())
                })?;
                target = Some(text::parse(value, n)?);
            }
            "step" => {
                let n = qubits
                    .ok_or_else(|| Error::Parse("`qubits:` must precede `step:`".into()))?;
                let k = kind
                    .ok_or_else(|| Error::Parse("`kind:` must precede `step:`".into()))?;
                steps.push(parse_step(value, n, k, lineno + 1)?);
            }
            "h_ini" => {
                let n = qubits
                    .ok_or_else(|| Error::Parse("`qubits:` must precede `h_ini:`".into()))?;
                h_ini = Some(text::parse(value, n)?);
            }
            "prologue" => {
                prologue = Some(value.parse::<u32>().map_err(|_| {
                    Error::Parse(format!("line {}: bad prologue count", lineno + 1))
                })?)
            }
            other => {
                return Err(Error::Parse(format!(
                    "line {}: unknown key `{other}`",
                    lineno + 1
                )))
            }
        }
    }

    Ok(DerivationChain {
        code: code.ok_or_else(|| Error::Parse("missing `code:`".into()))?,
        kind: kind.ok_or_else(|| Error::Parse("missing `kind:`".into()))?,
        n_qubits: qubits.ok_or_else(|| Error::Parse("missing `qubits:`".into()))?,
        target: target.ok_or_else(|| Error::Parse("missing `target:`".into()))?,
        steps,
        h_ini: h_ini.ok_or_else(|| Error::Parse("missing `h_ini:`".into()))?,
        prologue_tau_rot: prologue.ok_or_else(|| Error::Parse("missing `prologue:`".into()))?,
    })
}

fn parse_step(value: &str, n: usize, kind: InteractionKind, lineno: usize) -> Result<ChainStep> {
    let (annotation, rest) = value
        .split_once("=>")
        .ok_or_else(|| Error::Parse(format!("line {lineno}: step missing `=>`")))?;
    let (expected_text, orig_note) = match rest.split_once("!orig:") {
        Some((e, note)) => (e.trim(), Some(note.trim().to_string())),
        None => (rest.trim(), None),
    };
    let expected = text::parse(expected_text, n)?;
    let (rotations, edges) = parse_annotation(annotation.trim(), kind, lineno)?;
    if rotations.is_empty() && edges.is_empty() {
        return Err(Error::Parse(format!("line {lineno}: empty annotation")));
    }
    Ok(ChainStep {
        rotations,
        edges,
        expected,
        orig_note,
    })
}

/// Parse an annotation like `(y<->z:4)(x<->z:7), H_XY^{12}+H_XY^{56}`.
pub fn parse_annotation(
    s: &str,
    kind: InteractionKind,
    lineno: usize,
) -> Result<(Vec<Exchange>, Vec<(usize, usize)>)> {
    let mut rotations = Vec::new();
    let mut edges = Vec::new();
    let normalized = s.replace('↔', "<->");
    let mut rest = normalized.as_str();
    while !rest.is_empty() {
        rest = rest.trim_start_matches([' ', ',']);
        if rest.is_empty() {
            break;
        }
        if let Some(body) = rest.strip_prefix('(') {
            let close = body
                .find(')')
                .ok_or_else(|| Error::Parse(format!("line {lineno}: unclosed `(`")))?;
            parse_exchange_group(&body[..close], &mut rotations, lineno)?;
            rest = &body[close + 1..];
        } else if rest.starts_with("H_") {
            let end = rest
                .find(|c: char| c == ',' || c == '(')
                .unwrap_or(rest.len());
            parse_edge_group(&rest[..end], kind, &mut edges, lineno)?;
            rest = &rest[end..];
        } else {
            return Err(Error::Parse(format!(
                "line {lineno}: unexpected annotation `{rest}`"
            )));
        }
    }
    for e in &edges {
        if e.0 == 0 || e.1 == 0 || e.0 > u32::MAX as usize {
            return Err(Error::Parse(format!("line {lineno}: bad edge")));
        }
    }
    Ok((rotations, edges))
}

fn parse_exchange_group(body: &str, out: &mut Vec<Exchange>, lineno: usize) -> Result<()> {
    // body = "x<->z:2,4,6,8"
    let (axes, qubits) = body
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("line {lineno}: exchange missing `:`")))?;
    let (a, b) = axes
        .split_once("<->")
        .ok_or_else(|| Error::Parse(format!("line {lineno}: exchange missing `<->`")))?;
    let parse_axis = |t: &str| -> Result<Axis> {
        match t.trim() {
            "x" | "X" => Ok(Axis::X),
            "y" | "Y" => Ok(Axis::Y),
            "z" | "Z" => Ok(Axis::Z),
            other => Err(Error::Parse(format!("line {lineno}: bad axis `{other}`"))),
        }
    };
    let (a, b) = (parse_axis(a)?, parse_axis(b)?);
    if a == b {
        return Err(Error::Parse(format!("line {lineno}: exchange of equal axes")));
    }
    for q in qubits.split(',') {
        let qubit = q
            .trim()
            .parse::<usize>()
            .map_err(|_| Error::Parse(format!("line {lineno}: bad qubit `{q}`")))?;
        out.push(Exchange { qubit, a, b });
    }
    Ok(())
}

fn parse_edge_group(
    body: &str,
    kind: InteractionKind,
    out: &mut Vec<(usize, usize)>,
    lineno: usize,
) -> Result<()> {
    // body = "H_XY^{12}+H_XY^{34}" or "H_Ising^{23}"
    for part in body.split('+') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (head, idx) = part
            .split_once('^')
            .ok_or_else(|| Error::Parse(format!("line {lineno}: edge missing `^`")))?;
        let label = head.trim_start_matches("H_").to_ascii_lowercase();
        let matches_kind = match kind {
            InteractionKind::Xy => label == "xy",
            InteractionKind::Ising => label == "ising" || label == "zz",
        };
        if !matches_kind {
            return Err(Error::Parse(format!(
                "line {lineno}: edge label `{head}` does not match chain kind {kind}"
            )));
        }
        let digits: String = idx.chars().filter(|c| c.is_ascii_digit() || *c == ',').collect();
        let (i, j) = if let Some((i, j)) = digits.split_once(',') {
            (
                i.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad edge `{idx}`")))?,
                j.parse::<usize>()
                    .map_err(|_| Error::Parse(format!("line {lineno}: bad edge `{idx}`")))?,
            )
        } else {
            if digits.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {lineno}: edge `{idx}` needs two single digits or a comma"
                )));
            }
            let mut it = digits.chars();
            (
                it.next().unwrap().to_digit(10).unwrap() as usize,
                it.next().unwrap().to_digit(10).unwrap() as usize,
            )
        };
        out.push((i, j));
    }
    Ok(())
}

/// Sense-resolved edition of a chain step, ready for compilation.
#[derive(Debug, Clone)]
pub struct ResolvedStep {
    /// Rotations first, then edge evolutions; all angles concrete.
    pub ops: Vec<ElementaryOp>,
    pub concurrent_rotations: bool,
}

/// Per-line verification outcome.
#[derive(Debug, Clone, Serialize)]
pub enum LineOutcome {
    /// The printed line is reproduced bit-exactly; `negative_senses` counts
    /// how many rotation/edge senses resolved to the negative branch.
    Exact { negative_senses: usize },
    /// No sense assignment reproduces the line; the closest candidate's
    /// differing terms are listed as `(string, got, expected)`.
    Mismatch { diff: Vec<(String, f64, f64)> },
}

#[derive(Debug, Clone, Serialize)]
pub struct LineStatus {
    pub line: usize,
    pub annotation: String,
    pub outcome: LineOutcome,
    pub orig_note: Option<String>,
}

/// Result of replaying a full chain.
#[derive(Debug, Clone)]
pub struct ChainReport {
    pub code: String,
    pub kind: InteractionKind,
    pub lines: Vec<LineStatus>,
    pub resolved: Vec<ResolvedStep>,
    pub all_exact: bool,
}

impl ChainReport {
    pub fn first_mismatch_line(&self) -> Option<usize> {
        self.lines
            .iter()
            .find(|l| matches!(l.outcome, LineOutcome::Mismatch { .. }))
            .map(|l| l.line)
    }

    /// Fixture lines that deviate from the recorded source derivation.
    pub fn source_deviations(&self) -> Vec<(usize, String)> {
        self.lines
            .iter()
            .filter_map(|l| l.orig_note.clone().map(|n| (l.line, n)))
            .collect()
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "chain {} / {}:", self.code, self.kind)?;
        for l in &self.lines {
            match &l.outcome {
                LineOutcome::Exact { negative_senses } => writeln!(
                    f,
                    "  line {:2}  exact  ({} negative sense{})  {}",
                    l.line,
                    negative_senses,
                    if *negative_senses == 1 { "" } else { "s" },
                    l.annotation
                )?,
                LineOutcome::Mismatch { diff } => {
                    writeln!(f, "  line {:2}  MISMATCH  {}", l.line, l.annotation)?;
                    for (s, got, want) in diff {
                        writeln!(f, "           {s}: got {got}, expected {want}")?;
                    }
                }
            }
            if let Some(note) = &l.orig_note {
                writeln!(f, "           fixture deviates from source: {note}")?;
            }
        }
        Ok(())
    }
}

/// Replay a chain step by step, resolving rotation and edge senses so each
/// printed line is reproduced bit-exactly. Mismatched lines are recorded
/// with a diff and the replay continues from the printed line.
pub fn verify_chain(code: &CodeSpec, kind: InteractionKind) -> Result<ChainReport> {
    let chain = code.chain(kind)?;
    let mut current = chain.target.clone();
    let mut lines = Vec::new();
    let mut resolved = Vec::new();

    for (idx, step) in chain.steps.iter().enumerate() {
        let annotation = describe_step(step, kind);
        match resolve_step(&current, step, kind)? {
            StepResolution::Exact { ops, negative } => {
                lines.push(LineStatus {
                    line: idx + 2, // line 1 is the target
                    annotation,
                    outcome: LineOutcome::Exact {
                        negative_senses: negative,
                    },
                    orig_note: step.orig_note.clone(),
                });
                resolved.push(ResolvedStep {
                    ops,
                    concurrent_rotations: step.concurrent_rotations(),
                });
            }
            StepResolution::Mismatch { best } => {
                let diff = best
                    .diff_terms(&step.expected)
                    .into_iter()
                    .map(|(s, got, want)| (text::render_string(&s), got, want))
                    .collect();
                lines.push(LineStatus {
                    line: idx + 2,
                    annotation,
                    outcome: LineOutcome::Mismatch { diff },
                    orig_note: step.orig_note.clone(),
                });
                resolved.push(ResolvedStep {
                    ops: Vec::new(),
                    concurrent_rotations: step.concurrent_rotations(),
                });
            }
        }
        current = step.expected.clone();
    }

    let all_exact = lines
        .iter()
        .all(|l| matches!(l.outcome, LineOutcome::Exact { .. }));
    Ok(ChainReport {
        code: code.name.clone(),
        kind,
        lines,
        resolved,
        all_exact,
    })
}

enum StepResolution {
    Exact { ops: Vec<ElementaryOp>, negative: usize },
    Mismatch { best: PauliSum },
}

/// Try every sense assignment (2^m, rotations then edges); the first exact
/// match in ascending-mask order wins, which prefers positive senses.
fn resolve_step(
    current: &PauliSum,
    step: &ChainStep,
    kind: InteractionKind,
) -> Result<StepResolution> {
    let m = step.rotations.len() + step.edges.len();
    let mut best: Option<(usize, PauliSum)> = None;
    for mask in 0u32..(1u32 << m) {
        let ops = step_ops(step, kind, mask);
        let mut h = current.clone();
        for op in &ops {
            h = h.conjugate_elementary(op)?;
        }
        if h.exact_eq(&step.expected) {
            return Ok(StepResolution::Exact {
                ops,
                negative: mask.count_ones() as usize,
            });
        }
        let n_diff = h.diff_terms(&step.expected).len();
        if best.as_ref().is_none_or(|(d, _)| n_diff < *d) {
            best = Some((n_diff, h));
        }
    }
    Ok(StepResolution::Mismatch {
        best: best.expect("at least one candidate").1,
    })
}

/// Build the op list for one sense assignment: bit set = negative sense.
fn step_ops(step: &ChainStep, kind: InteractionKind, mask: u32) -> Vec<ElementaryOp> {
    let mut ops = Vec::with_capacity(step.rotations.len() + step.edges.len());
    for (i, ex) in step.rotations.iter().enumerate() {
        let sense = if mask >> i & 1 == 0 { 1 } else { -1 };
        ops.push(ex.op(sense));
    }
    for (i, &(a, b)) in step.edges.iter().enumerate() {
        let bit = step.rotations.len() + i;
        let theta = Angle::pi_over_4(if mask >> bit & 1 == 0 { 1 } else { -1 });
        ops.push(match kind {
            InteractionKind::Xy => ElementaryOp::XyEdge { i: a, j: b, theta },
            InteractionKind::Ising => ElementaryOp::IsingEdge { i: a, j: b, theta },
        });
    }
    ops
}

fn describe_step(step: &ChainStep, kind: InteractionKind) -> String {
    let mut parts = Vec::new();
    // group exchanges by axis pair, preserving first-seen order
    let mut groups: Vec<((Axis, Axis), Vec<usize>)> = Vec::new();
    for ex in &step.rotations {
        if let Some(g) = groups.iter_mut().find(|(k, _)| *k == (ex.a, ex.b)) {
            g.1.push(ex.qubit);
        } else {
            groups.push(((ex.a, ex.b), vec![ex.qubit]));
        }
    }
    for ((a, b), qs) in groups {
        let qs: Vec<String> = qs.iter().map(|q| q.to_string()).collect();
        parts.push(format!(
            "({}<->{}:{})",
            a.letter().to_ascii_lowercase(),
            b.letter().to_ascii_lowercase(),
            qs.join(",")
        ));
    }
    if !step.edges.is_empty() {
        let label = match kind {
            InteractionKind::Xy => "H_XY",
            InteractionKind::Ising => "H_Ising",
        };
        let edges: Vec<String> = step
            .edges
            .iter()
            .map(|(i, j)| format!("{label}^{{{i}{j}}}"))
            .collect();
        parts.push(edges.join("+"));
    }
    parts.join(", ")
}

/// Verify the chain-reversal invariant: applying the reversed, sense-
/// inverted step list to the terminal line reproduces the target exactly.
pub fn verify_reversal(code: &CodeSpec, kind: InteractionKind) -> Result<bool> {
    let chain = code.chain(kind)?;
    let report = verify_chain(code, kind)?;
    if !report.all_exact {
        return Ok(false);
    }
    let mut h = chain.terminal().clone();
    for step in report.resolved.iter().rev() {
        for op in step.ops.iter().rev() {
            h = h.conjugate_elementary(&op.inverse())?;
        }
    }
    Ok(h.exact_eq(&chain.target))
}
