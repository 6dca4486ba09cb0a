//! Exact symbolic algebra of Pauli strings and real-weighted Pauli sums.
//!
//! A [`PauliString`] is stored in symplectic form: bit `i` of `x_mask` /
//! `z_mask` says whether X / Z acts on qubit `i+1` (both bits set means Y),
//! together with a unit phase `i^k`. The global sign convention is
//! `X·Z = -i·Y`, equivalently `X·Y = i·Z`, `Y·Z = i·X`, `Z·X = i·Y`.
//!
//! A [`PauliSum`] is a Hermitian operator: a map from phase-canonical strings
//! to real coefficients. Phases produced during arithmetic are folded into
//! the sign of the coefficient immediately; a residual `±i` is an error.
//!
//! Conjugation angles that are multiples of π/4 are carried exactly (see
//! [`Angle`]), so replaying a derivation chain is bit-exact rather than
//! tolerance-based.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// Hard cap on qubit count so masks fit in a `u64`.
pub const MAX_QUBITS: usize = 64;

/// One of the four unit phases `i^k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Phase {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    /// Exponent `k` with the phase equal to `i^k`.
    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }

    /// The real sign for phases `+1`/`-1`; `None` for `±i`.
    pub fn real_sign(self) -> Option<f64> {
        match self {
            Phase::PlusOne => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }
}

/// Single-qubit Pauli axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn letter(self) -> char {
        match self {
            Axis::X => 'X',
            Axis::Y => 'Y',
            Axis::Z => 'Z',
        }
    }

    /// The axis orthogonal to both arguments. Panics if `a == b`.
    pub fn third(a: Axis, b: Axis) -> Axis {
        match (a, b) {
            (Axis::X, Axis::Y) | (Axis::Y, Axis::X) => Axis::Z,
            (Axis::X, Axis::Z) | (Axis::Z, Axis::X) => Axis::Y,
            (Axis::Y, Axis::Z) | (Axis::Z, Axis::Y) => Axis::X,
            _ => panic!("third axis of equal axes"),
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Axis::X => (true, false),
            Axis::Y => (true, true),
            Axis::Z => (false, true),
        }
    }
}

/// An angle, exact when it is a multiple of π/4.
///
/// `Exact(k)` means `k·π/4`. Trigonometric values at these angles are emitted
/// as exact integers so that chain replay involves only `±1` coefficient
/// arithmetic. Anything else falls back to `f64` radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    Exact(i32),
    Rad(f64),
}

impl Angle {
    pub const QUARTER_PI: Angle = Angle::Exact(1);

    pub fn pi_over_4(k: i32) -> Angle {
        Angle::Exact(k)
    }

    pub fn radians(self) -> f64 {
        match self {
            Angle::Exact(k) => k as f64 * std::f64::consts::FRAC_PI_4,
            Angle::Rad(v) => v,
        }
    }

    pub fn neg(self) -> Angle {
        match self {
            Angle::Exact(k) => Angle::Exact(-k),
            Angle::Rad(v) => Angle::Rad(-v),
        }
    }

    /// Half of this angle, staying exact when possible.
    pub fn half(self) -> Angle {
        match self {
            Angle::Exact(k) if k % 2 == 0 => Angle::Exact(k / 2),
            other => Angle::Rad(other.radians() / 2.0),
        }
    }

    /// `(cos 2θ, sin 2θ)` for conjugation by `exp(-iθP)`.
    pub fn cos_sin_2theta(self) -> (f64, f64) {
        match self {
            Angle::Exact(k) => {
                // 2θ = k·π/2
                match k.rem_euclid(4) {
                    0 => (1.0, 0.0),
                    1 => (0.0, 1.0),
                    2 => (-1.0, 0.0),
                    _ => (0.0, -1.0),
                }
            }
            Angle::Rad(v) => ((2.0 * v).cos(), (2.0 * v).sin()),
        }
    }
}

/// An n-qubit Pauli string `i^k · L_1 ⊗ … ⊗ L_n` in symplectic form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    x_mask: u64,
    z_mask: u64,
    phase: Phase,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> PauliString {
        assert!(n_qubits >= 1 && n_qubits <= MAX_QUBITS);
        PauliString {
            n_qubits,
            x_mask: 0,
            z_mask: 0,
            phase: Phase::PlusOne,
        }
    }

    /// A single-axis Pauli on one qubit (1-based index).
    pub fn single(n_qubits: usize, qubit: usize, axis: Axis) -> Result<PauliString> {
        let mut s = PauliString::identity(n_qubits);
        s.set_letter(qubit, Some(axis))?;
        Ok(s)
    }

    pub fn from_masks(n_qubits: usize, x_mask: u64, z_mask: u64, phase: Phase) -> PauliString {
        assert!(n_qubits >= 1 && n_qubits <= MAX_QUBITS);
        let keep = mask_for(n_qubits);
        PauliString {
            n_qubits,
            x_mask: x_mask & keep,
            z_mask: z_mask & keep,
            phase,
        }
    }

    /// Build from `(qubit, axis)` pairs; duplicate qubits are rejected.
    pub fn from_axes(n_qubits: usize, axes: &[(usize, Axis)]) -> Result<PauliString> {
        let mut s = PauliString::identity(n_qubits);
        for &(q, a) in axes {
            if s.letter(q)?.is_some() {
                return Err(Error::MalformedOp(format!("qubit {q} listed twice")));
            }
            s.set_letter(q, Some(a))?;
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of qubits acted on non-trivially.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// The letter on `qubit` (1-based), `None` for identity.
    pub fn letter(&self, qubit: usize) -> Result<Option<Axis>> {
        let bit = self.bit_for(qubit)?;
        let x = self.x_mask >> bit & 1 != 0;
        let z = self.z_mask >> bit & 1 != 0;
        Ok(match (x, z) {
            (false, false) => None,
            (true, false) => Some(Axis::X),
            (true, true) => Some(Axis::Y),
            (false, true) => Some(Axis::Z),
        })
    }

    pub fn set_letter(&mut self, qubit: usize, axis: Option<Axis>) -> Result<()> {
        let bit = self.bit_for(qubit)?;
        let (x, z) = axis.map_or((false, false), Axis::bits);
        self.x_mask = self.x_mask & !(1 << bit) | (u64::from(x) << bit);
        self.z_mask = self.z_mask & !(1 << bit) | (u64::from(z) << bit);
        Ok(())
    }

    /// Same string with phase forced to `+1`.
    pub fn canonical(&self) -> PauliString {
        PauliString {
            phase: Phase::PlusOne,
            ..self.clone()
        }
    }

    pub fn with_phase(&self, phase: Phase) -> PauliString {
        PauliString {
            phase,
            ..self.clone()
        }
    }

    /// Exact group product `self · other`, phase included.
    pub fn mul(&self, other: &PauliString) -> Result<PauliString> {
        self.check_same_size(other)?;
        let mut k = self.phase.exponent() as u32 + other.phase.exponent() as u32;
        // Per-qubit letter products contribute i (cyclic order X→Y→Z) or
        // i^3 (anti-cyclic); only qubits where both strings act matter.
        let mut both = (self.x_mask | self.z_mask) & (other.x_mask | other.z_mask);
        while both != 0 {
            let bit = both.trailing_zeros();
            both &= both - 1;
            let l1 = (self.x_mask >> bit & 1) | (self.z_mask >> bit & 1) << 1;
            let l2 = (other.x_mask >> bit & 1) | (other.z_mask >> bit & 1) << 1;
            k += LETTER_PHASE[l1 as usize][l2 as usize] as u32;
        }
        Ok(PauliString {
            n_qubits: self.n_qubits,
            x_mask: self.x_mask ^ other.x_mask,
            z_mask: self.z_mask ^ other.z_mask,
            phase: Phase::from_exponent((k % 4) as u8),
        })
    }

    /// Whether the two strings commute (symplectic inner product is even).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        self.check_same_size(other)?;
        let a = (self.x_mask & other.z_mask).count_ones();
        let b = (self.z_mask & other.x_mask).count_ones();
        Ok((a + b) % 2 == 0)
    }

    fn bit_for(&self, qubit: usize) -> Result<u32> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                index: qubit,
                n: self.n_qubits,
            });
        }
        Ok((qubit - 1) as u32)
    }

    fn check_same_size(&self, other: &PauliString) -> Result<()> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        Ok(())
    }
}

fn mask_for(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// `LETTER_PHASE[a][b]` = exponent of i in `L_a · L_b`, letters encoded as
/// `x + 2z` (I=0, X=1, Z=2, Y=3).
const LETTER_PHASE: [[u8; 4]; 4] = [
    //         I  X  Z  Y
    /* I */ [0, 0, 0, 0],
    /* X */ [0, 0, 3, 1], // X·Z = -iY, X·Y = iZ
    /* Z */ [0, 1, 0, 3], // Z·X = iY,  Z·Y = -iX
    /* Y */ [0, 3, 1, 0], // Y·X = -iZ, Y·Z = iX
];

/// An elementary pulse operation, closed under conjugation of Pauli sums.
#[derive(Debug, Clone, PartialEq)]
pub enum ElementaryOp {
    /// Single-qubit rotation by `angle` about `axis`; conjugation acts with
    /// `exp(-i(angle/2)·P_axis)`. Chain steps use `angle = ±π/2` (axis
    /// exchange) or `±π` (sign flip).
    AxisRotation {
        qubit: usize,
        axis: Axis,
        angle: Angle,
    },
    /// `exp(-iθP)` for an arbitrary phase-canonical string `P`.
    PauliEvolution { string: PauliString, theta: Angle },
    /// `exp(-iθ X_iX_j)·exp(-iθ Y_iY_j)`; the two factors commute.
    XyEdge { i: usize, j: usize, theta: Angle },
    /// `exp(-iθ Z_iZ_j)`.
    IsingEdge { i: usize, j: usize, theta: Angle },
}

impl ElementaryOp {
    /// The same operation with all angles negated.
    pub fn inverse(&self) -> ElementaryOp {
        match self.clone() {
            ElementaryOp::AxisRotation { qubit, axis, angle } => ElementaryOp::AxisRotation {
                qubit,
                axis,
                angle: angle.neg(),
            },
            ElementaryOp::PauliEvolution { string, theta } => ElementaryOp::PauliEvolution {
                string,
                theta: theta.neg(),
            },
            ElementaryOp::XyEdge { i, j, theta } => ElementaryOp::XyEdge {
                i,
                j,
                theta: theta.neg(),
            },
            ElementaryOp::IsingEdge { i, j, theta } => ElementaryOp::IsingEdge {
                i,
                j,
                theta: theta.neg(),
            },
        }
    }

    /// The evolution factors `(P, θ)` this operation is built from.
    pub fn factors(&self, n_qubits: usize) -> Result<Vec<(PauliString, Angle)>> {
        match self {
            ElementaryOp::AxisRotation { qubit, axis, angle } => Ok(vec![(
                PauliString::single(n_qubits, *qubit, *axis)?,
                angle.half(),
            )]),
            ElementaryOp::PauliEvolution { string, theta } => {
                if string.n_qubits() != n_qubits {
                    return Err(Error::DimensionMismatch(string.n_qubits(), n_qubits));
                }
                Ok(vec![(string.clone(), *theta)])
            }
            ElementaryOp::XyEdge { i, j, theta } => {
                check_edge(*i, *j, n_qubits)?;
                Ok(vec![
                    (
                        PauliString::from_axes(n_qubits, &[(*i, Axis::X), (*j, Axis::X)])?,
                        *theta,
                    ),
                    (
                        PauliString::from_axes(n_qubits, &[(*i, Axis::Y), (*j, Axis::Y)])?,
                        *theta,
                    ),
                ])
            }
            ElementaryOp::IsingEdge { i, j, theta } => {
                check_edge(*i, *j, n_qubits)?;
                Ok(vec![(
                    PauliString::from_axes(n_qubits, &[(*i, Axis::Z), (*j, Axis::Z)])?,
                    *theta,
                )])
            }
        }
    }
}

fn check_edge(i: usize, j: usize, n: usize) -> Result<()> {
    if i == j {
        return Err(Error::MalformedOp(format!("edge ({i},{j}) needs i ≠ j")));
    }
    if i == 0 || j == 0 || i > n || j > n {
        return Err(Error::MalformedOp(format!(
            "edge ({i},{j}) out of range for {n} qubits"
        )));
    }
    Ok(())
}

/// A Hermitian operator as a real-weighted sum of phase-canonical strings.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: BTreeMap<(u64, u64), f64>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> PauliSum {
        assert!(n_qubits >= 1 && n_qubits <= MAX_QUBITS);
        PauliSum {
            n_qubits,
            terms: BTreeMap::new(),
        }
    }

    /// A sum with a single term.
    pub fn term(string: &PauliString, coefficient: f64) -> Result<PauliSum> {
        let mut s = PauliSum::zero(string.n_qubits());
        s.add_string(string, coefficient)?;
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Iterate `(string, coefficient)` in a deterministic mask order.
    pub fn iter(&self) -> impl Iterator<Item = (PauliString, f64)> + '_ {
        self.terms.iter().map(|(&(x, z), &c)| {
            (
                PauliString::from_masks(self.n_qubits, x, z, Phase::PlusOne),
                c,
            )
        })
    }

    pub fn coefficient(&self, string: &PauliString) -> f64 {
        *self
            .terms
            .get(&(string.x_mask(), string.z_mask()))
            .unwrap_or(&0.0)
    }

    /// Add `coefficient · string`, folding the string's phase into the sign.
    /// Strings with `±i` phases are rejected: they would break Hermiticity.
    pub fn add_string(&mut self, string: &PauliString, coefficient: f64) -> Result<()> {
        if string.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(string.n_qubits(), self.n_qubits));
        }
        let sign = string
            .phase()
            .real_sign()
            .ok_or(Error::ImaginaryCoefficient)?;
        let key = (string.x_mask(), string.z_mask());
        let entry = self.terms.entry(key).or_insert(0.0);
        *entry += sign * coefficient;
        if *entry == 0.0 {
            self.terms.remove(&key);
        }
        Ok(())
    }

    pub fn scaled(&self, factor: f64) -> PauliSum {
        let mut out = self.clone();
        if factor == 0.0 {
            out.terms.clear();
            return out;
        }
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out
    }

    pub fn add(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = self.clone();
        for (&key, &c) in &other.terms {
            let entry = out.terms.entry(key).or_insert(0.0);
            *entry += c;
            if *entry == 0.0 {
                out.terms.remove(&key);
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &PauliSum) -> Result<PauliSum> {
        self.add(&other.scaled(-1.0))
    }

    /// Drop terms with `|c| <= eps` (for float-angle paths; exact paths never
    /// produce dust).
    pub fn pruned(&self, eps: f64) -> PauliSum {
        let mut out = self.clone();
        out.terms.retain(|_, c| c.abs() > eps);
        out
    }

    /// Conjugation `exp(-iθP) · H · exp(iθP)` term by term.
    ///
    /// A term `Q` commuting with `P` is untouched; otherwise it maps to
    /// `cos(2θ)·Q + sin(2θ)·(i·Q·P)`, where `i·Q·P` is again a canonical
    /// string with a real sign.
    pub fn conjugate_evolution(&self, p: &PauliString, theta: Angle) -> Result<PauliSum> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(p.n_qubits(), self.n_qubits));
        }
        if p.phase() != Phase::PlusOne {
            return Err(Error::NonCanonicalPhase {
                phase_exponent: p.phase().exponent(),
            });
        }
        let (cos2, sin2) = theta.cos_sin_2theta();
        let mut out = PauliSum::zero(self.n_qubits);
        for (q, c) in self.iter() {
            if q.commutes(p)? {
                out.add_string(&q, c)?;
                continue;
            }
            if cos2 != 0.0 {
                out.add_string(&q, c * cos2)?;
            }
            if sin2 != 0.0 {
                // i·Q·P is Hermitian with a real sign because {P,Q} = 0.
                let qp = q.mul(p)?;
                let r = qp.with_phase(qp.phase().mul(Phase::PlusI));
                out.add_string(&r, c * sin2)?;
            }
        }
        Ok(out)
    }

    /// Conjugate by an elementary pulse operation.
    pub fn conjugate_elementary(&self, op: &ElementaryOp) -> Result<PauliSum> {
        let mut h = self.clone();
        for (p, theta) in op.factors(self.n_qubits)? {
            h = h.conjugate_evolution(&p, theta)?;
        }
        Ok(h)
    }

    /// The Hermitian commutator `(1/i)[self, other]`.
    pub fn commutator_over_i(&self, other: &PauliSum) -> Result<PauliSum> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(self.n_qubits, other.n_qubits));
        }
        let mut out = PauliSum::zero(self.n_qubits);
        for (p, a) in self.iter() {
            for (q, b) in other.iter() {
                if p.commutes(&q)? {
                    continue;
                }
                // (1/i)(PQ - QP) = (2/i)·PQ = 2·i^{m-1}·R with PQ = i^m R.
                let r = p.mul(&q)?;
                let folded = r.with_phase(Phase::from_exponent(r.phase().exponent() + 3));
                out.add_string(&folded, 2.0 * a * b)?;
            }
        }
        Ok(out)
    }

    /// Hilbert-Schmidt norm `[Tr(H†H)/2^n]^{1/2} = sqrt(Σ c²)`.
    pub fn hs_norm(&self) -> f64 {
        self.terms.values().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// Sum of absolute coefficients (triangle-inequality norm bound).
    pub fn l1_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Bit-exact structural equality (same strings, identical `f64` values).
    pub fn exact_eq(&self, other: &PauliSum) -> bool {
        self.n_qubits == other.n_qubits && self.terms == other.terms
    }

    /// Coefficient-wise comparison within `tol`.
    pub fn approx_eq(&self, other: &PauliSum, tol: f64) -> bool {
        if self.n_qubits != other.n_qubits {
            return false;
        }
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).unwrap_or(&0.0);
            let b = other.terms.get(k).unwrap_or(&0.0);
            (a - b).abs() <= tol
        })
    }

    /// Strings present in `self` but with a different coefficient in `other`,
    /// plus strings only in `other`; used for mismatch diffs.
    pub fn diff_terms(&self, other: &PauliSum) -> Vec<(PauliString, f64, f64)> {
        let keys: std::collections::BTreeSet<_> =
            self.terms.keys().chain(other.terms.keys()).collect();
        keys.into_iter()
            .filter_map(|&(x, z)| {
                let a = *self.terms.get(&(x, z)).unwrap_or(&0.0);
                let b = *other.terms.get(&(x, z)).unwrap_or(&0.0);
                if a != b {
                    Some((
                        PauliString::from_masks(self.n_qubits, x, z, Phase::PlusOne),
                        a,
                        b,
                    ))
                } else {
                    None
                }
            })
            .collect()
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Phase::PlusOne => write!(f, "+1"),
            Phase::PlusI => write!(f, "+i"),
            Phase::MinusOne => write!(f, "-1"),
            Phase::MinusI => write!(f, "-i"),
        }
    }
}
