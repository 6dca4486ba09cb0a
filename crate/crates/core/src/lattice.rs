//! Always-on lattice Hamiltonians and π-pulse toggling patterns.
//!
//! Physical qubits sit on parallel 1D arrays (one logical qubit per array)
//! with nearest-neighbour couplings inside each array and rung couplings
//! between identical sites of adjacent arrays. Four toggled frames A, B,
//! B′, A′, each a π-pulse dressing of the bare Hamiltonian, select either
//! every single-qubit term or one chosen edge per array at first order in
//! the average Hamiltonian.
//!
//! Frame ordering convention: one cycle is the operator product
//! `e^{-iτH_A} e^{-iτH_B} e^{-iτH_B'} e^{-iτH_A'}`, whose first-order
//! generator over the cycle is `2τ(H_a + H_a')` with `H_a = (A+B)/2` and
//! `H_a' = (A'+B')/2`. The "cycle units" used throughout normalize that
//! exponent by τ, so a report's `effective` is directly comparable with the
//! selected `2ΣH_0` or `4h_edge` forms.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::pauli::{Angle, Axis, ElementaryOp, PauliString, PauliSum};
use crate::sim::DenseOperator;
use crate::text;
use crate::InteractionKind;

/// Geometry and couplings of the qubit lattice.
#[derive(Debug, Clone)]
pub struct LatticeSpec {
    pub n_logical: usize,
    pub n_phys: usize,
    pub kind: InteractionKind,
    /// `(array k, site i) → J` for the intra-array bond `(k,i)-(k,i+1)`.
    pub intra_j: BTreeMap<(usize, usize), f64>,
    /// `(array k, site i) → J` for the rung `(k,i)-(k+1,i)`.
    pub inter_j: BTreeMap<(usize, usize), f64>,
    /// `(array k, site i) → Ω`.
    pub omega: BTreeMap<(usize, usize), f64>,
}

impl LatticeSpec {
    /// Uniform couplings and amplitudes.
    pub fn uniform(
        n_logical: usize,
        n_phys: usize,
        kind: InteractionKind,
        j: f64,
        omega: f64,
    ) -> LatticeSpec {
        let mut intra_j = BTreeMap::new();
        let mut inter_j = BTreeMap::new();
        let mut omega_map = BTreeMap::new();
        for k in 1..=n_logical {
            for i in 1..=n_phys {
                omega_map.insert((k, i), omega);
                if i < n_phys {
                    intra_j.insert((k, i), j);
                }
                if k < n_logical {
                    inter_j.insert((k, i), j);
                }
            }
        }
        LatticeSpec {
            n_logical,
            n_phys,
            kind,
            intra_j,
            inter_j,
            omega: omega_map,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_logical * self.n_phys
    }

    /// Global 1-based qubit index of site `i` in array `k`.
    pub fn qubit(&self, k: usize, i: usize) -> usize {
        (k - 1) * self.n_phys + i
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_logical == 0 || self.n_phys < 2 {
            return Err(Error::UnsupportedGeometry(format!(
                "need at least one array of two qubits, got {}x{}",
                self.n_logical, self.n_phys
            )));
        }
        for (&(k, i), j) in &self.intra_j {
            if k == 0 || k > self.n_logical || i == 0 || i >= self.n_phys || !j.is_finite() {
                return Err(Error::UnsupportedGeometry(format!(
                    "bad intra coupling at ({k},{i})"
                )));
            }
        }
        for (&(k, i), j) in &self.inter_j {
            if k == 0 || k >= self.n_logical || i == 0 || i > self.n_phys || !j.is_finite() {
                return Err(Error::UnsupportedGeometry(format!(
                    "bad inter coupling at ({k},{i})"
                )));
            }
        }
        for (&(k, i), w) in &self.omega {
            if k == 0 || k > self.n_logical || i == 0 || i > self.n_phys || !w.is_finite() {
                return Err(Error::UnsupportedGeometry(format!(
                    "bad amplitude at ({k},{i})"
                )));
            }
        }
        Ok(())
    }

    pub fn max_j(&self) -> f64 {
        self.intra_j
            .values()
            .chain(self.inter_j.values())
            .fold(0.0f64, |m, j| m.max(j.abs()))
    }

    pub fn max_omega(&self) -> f64 {
        self.omega.values().fold(0.0f64, |m, w| m.max(w.abs()))
    }

    /// Every edge as global qubit pairs with its strength.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (&(k, i), &j) in &self.intra_j {
            out.push((self.qubit(k, i), self.qubit(k, i + 1), j));
        }
        for (&(k, i), &j) in &self.inter_j {
            out.push((self.qubit(k, i), self.qubit(k + 1, i), j));
        }
        out
    }
}

/// `Σ Ω_i X_i` plus `Σ J (X_iX_j + Y_iY_j)` or `Σ J Z_iZ_j`.
pub fn build_lattice_hamiltonian(spec: &LatticeSpec) -> Result<PauliSum> {
    spec.validate()?;
    let n = spec.n_qubits();
    let mut h = PauliSum::zero(n);
    for (&(k, i), &w) in &spec.omega {
        if w != 0.0 {
            h.add_string(&PauliString::single(n, spec.qubit(k, i), Axis::X)?, w)?;
        }
    }
    for (a, b, j) in spec.edges() {
        if j == 0.0 {
            continue;
        }
        match spec.kind {
            InteractionKind::Xy => {
                h.add_string(&PauliString::from_axes(n, &[(a, Axis::X), (b, Axis::X)])?, j)?;
                h.add_string(&PauliString::from_axes(n, &[(a, Axis::Y), (b, Axis::Y)])?, j)?;
            }
            InteractionKind::Ising => {
                h.add_string(&PauliString::from_axes(n, &[(a, Axis::Z), (b, Axis::Z)])?, j)?;
            }
        }
    }
    Ok(h)
}

/// What a toggling pattern selects at first order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PatternKind {
    /// The full single-qubit part `2ΣH_0` (cycle units).
    SingleQubit,
    /// The intra-array edge `(i, i+1)` of every array, `4h_edge` each.
    Edge(usize, usize),
}

/// One toggled frame: a π-pulse set and the signed Hamiltonian it realizes.
#[derive(Debug, Clone)]
pub struct Frame {
    pub label: &'static str,
    /// Global qubits receiving a π-pulse in this frame.
    pub pulsed: BTreeSet<usize>,
    /// Explicit per-term signs: single-qubit terms by qubit.
    pub single_signs: BTreeMap<usize, i8>,
    /// Explicit per-term signs: interaction terms by global edge.
    pub interaction_signs: BTreeMap<(usize, usize), i8>,
    pub hamiltonian: PauliSum,
}

/// The four frames of one extraction cycle.
#[derive(Debug, Clone)]
pub struct TogglingPattern {
    pub kind: PatternKind,
    pub pulse_axis: Axis,
    pub frames: [Frame; 4],
}

impl TogglingPattern {
    pub fn frame(&self, label: &str) -> &Frame {
        self.frames
            .iter()
            .find(|f| f.label == label)
            .expect("frame label")
    }

    /// Check that every frame equals the bare Hamiltonian conjugated by its
    /// π-pulse set, term for term.
    pub fn verify_realizable(&self, spec: &LatticeSpec) -> Result<bool> {
        let bare = build_lattice_hamiltonian(spec)?;
        for frame in &self.frames {
            let mut h = bare.clone();
            for &q in &frame.pulsed {
                h = h.conjugate_elementary(&ElementaryOp::AxisRotation {
                    qubit: q,
                    axis: self.pulse_axis,
                    angle: Angle::pi_over_4(4),
                })?;
            }
            if !h.exact_eq(&frame.hamiltonian) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The π-pulse axis that flips the single-qubit terms and both interaction
/// letters: z for the XY coupling, y for the Ising coupling.
pub fn pulse_axis(kind: InteractionKind) -> Axis {
    match kind {
        InteractionKind::Xy => Axis::Z,
        InteractionKind::Ising => Axis::Y,
    }
}

fn make_frame(
    spec: &LatticeSpec,
    label: &'static str,
    axis: Axis,
    pulsed: BTreeSet<usize>,
) -> Result<Frame> {
    let n = spec.n_qubits();
    let mut single_signs = BTreeMap::new();
    let mut interaction_signs = BTreeMap::new();
    let mut h = PauliSum::zero(n);
    for (&(k, i), &w) in &spec.omega {
        let q = spec.qubit(k, i);
        let sign: i8 = if pulsed.contains(&q) { -1 } else { 1 };
        single_signs.insert(q, sign);
        if w != 0.0 {
            h.add_string(&PauliString::single(n, q, Axis::X)?, sign as f64 * w)?;
        }
    }
    for (a, b, j) in spec.edges() {
        let flips = pulsed.contains(&a) as u8 + pulsed.contains(&b) as u8;
        let sign: i8 = if flips % 2 == 1 { -1 } else { 1 };
        interaction_signs.insert((a, b), sign);
        if j == 0.0 {
            continue;
        }
        match spec.kind {
            InteractionKind::Xy => {
                h.add_string(
                    &PauliString::from_axes(n, &[(a, Axis::X), (b, Axis::X)])?,
                    sign as f64 * j,
                )?;
                h.add_string(
                    &PauliString::from_axes(n, &[(a, Axis::Y), (b, Axis::Y)])?,
                    sign as f64 * j,
                )?;
            }
            InteractionKind::Ising => {
                h.add_string(
                    &PauliString::from_axes(n, &[(a, Axis::Z), (b, Axis::Z)])?,
                    sign as f64 * j,
                )?;
            }
        }
    }
    let _ = axis;
    Ok(Frame {
        label,
        pulsed,
        single_signs,
        interaction_signs,
        hamiltonian: h,
    })
}

/// Select the single-qubit part of every array: frames pulse
/// odd / even sites of odd- / even-offset arrays (offsets counted from the
/// first array), cancelling every coupling at first order and leaving
/// `2ΣH_0` per cycle.
pub fn pattern_select_h0(spec: &LatticeSpec) -> Result<TogglingPattern> {
    spec.validate()?;
    let axis = pulse_axis(spec.kind);
    let site_set = |site_parity_odd: bool, array_offset_odd: bool| -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        for k in 1..=spec.n_logical {
            if ((k - 1) % 2 == 1) != array_offset_odd {
                continue;
            }
            for i in 1..=spec.n_phys {
                if (i % 2 == 1) == site_parity_odd {
                    set.insert(spec.qubit(k, i));
                }
            }
        }
        set
    };
    let frames = [
        make_frame(spec, "A", axis, site_set(true, true))?,
        make_frame(spec, "B", axis, site_set(true, false))?,
        make_frame(spec, "B'", axis, site_set(false, true))?,
        make_frame(spec, "A'", axis, site_set(false, false))?,
    ];
    Ok(TogglingPattern {
        kind: PatternKind::SingleQubit,
        pulse_axis: axis,
        frames,
    })
}

/// Select the intra-array edge `(i, i+1)` of every array. The B frame
/// pulses both edge endpoints plus every second site outward on even-offset
/// arrays and the complementary set on odd-offset arrays; B′ swaps the two
/// roles; A is bare and A′ pulses everything.
pub fn pattern_select_edge(spec: &LatticeSpec, i: usize) -> Result<TogglingPattern> {
    spec.validate()?;
    if i == 0 || i + 1 > spec.n_phys {
        return Err(Error::UnsupportedGeometry(format!(
            "edge ({},{}) out of range for {} sites",
            i,
            i + 1,
            spec.n_phys
        )));
    }
    let axis = pulse_axis(spec.kind);
    // In-array pulse set containing the edge pair: {i, i+1} ∪ {i-2, i-4, …}
    // ∪ {i+3, i+5, …}; its complement is the partner set.
    let mut in_set = BTreeSet::new();
    in_set.insert(i);
    in_set.insert(i + 1);
    let mut q = i;
    while q > 2 {
        q -= 2;
        in_set.insert(q);
    }
    let mut q = i + 1;
    while q + 2 <= spec.n_phys {
        q += 2;
        in_set.insert(q);
    }
    let out_set: BTreeSet<usize> = (1..=spec.n_phys).filter(|s| !in_set.contains(s)).collect();

    let assemble = |even_offset_sites: &BTreeSet<usize>,
                    odd_offset_sites: &BTreeSet<usize>|
     -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        for k in 1..=spec.n_logical {
            let sites = if (k - 1) % 2 == 0 {
                even_offset_sites
            } else {
                odd_offset_sites
            };
            for &s in sites {
                set.insert(spec.qubit(k, s));
            }
        }
        set
    };
    let all: BTreeSet<usize> = (1..=spec.n_qubits()).collect();
    let frames = [
        make_frame(spec, "A", axis, BTreeSet::new())?,
        make_frame(spec, "B", axis, assemble(&in_set, &out_set))?,
        make_frame(spec, "B'", axis, assemble(&out_set, &in_set))?,
        make_frame(spec, "A'", axis, all)?,
    ];
    Ok(TogglingPattern {
        kind: PatternKind::Edge(i, i + 1),
        pulse_axis: axis,
        frames,
    })
}

/// First-order average-Hamiltonian analysis of one A·B·B′·A′ cycle.
#[derive(Debug, Clone)]
pub struct BchFirstOrder {
    pub tau: f64,
    pub n_reps: usize,
    pub h_a: PauliSum,
    pub h_b: PauliSum,
    pub h_a_prime: PauliSum,
    pub h_b_prime: PauliSum,
    /// First-order generator per cycle in cycle units: `2(H_a + H_a')`.
    pub effective: PauliSum,
    /// Second-order error per cycle in cycle units:
    /// `τ·(C(H_b,H_a) - C(H_b',H_a') + 4·C(H_a,H_a'))` with
    /// `C(x,y) = (1/i)[x,y]`.
    pub error_estimate: PauliSum,
}

impl BchFirstOrder {
    /// The effective Hamiltonian averaged over the whole window `4nτ`.
    pub fn effective_avg(&self) -> PauliSum {
        self.effective.scaled(0.25)
    }

    /// The error term averaged over the whole window `4nτ`.
    pub fn error_estimate_avg(&self) -> PauliSum {
        self.error_estimate.scaled(0.25)
    }
}

/// Evaluate the extended first-order formula for four frame Hamiltonians.
///
/// With `H_a = (A+B)/2`, `H_b = (A-B)/2`, `H_a' = (A'+B')/2`,
/// `H_b' = (A'-B')/2`, one cycle generates `2τ(H_a+H_a')` plus the
/// second-order commutator correction
/// `τ²([H_b,H_a] - [H_b',H_a'] + 4[H_a,H_a'])`.
pub fn bch_first_order(
    h_frame_a: &PauliSum,
    h_frame_b: &PauliSum,
    h_frame_b_prime: &PauliSum,
    h_frame_a_prime: &PauliSum,
    tau: f64,
    n_reps: usize,
) -> Result<BchFirstOrder> {
    if n_reps == 0 || tau <= 0.0 {
        return Err(Error::MalformedOp("need n ≥ 1 and τ > 0".into()));
    }
    let h_a = h_frame_a.add(h_frame_b)?.scaled(0.5);
    let h_b = h_frame_a.sub(h_frame_b)?.scaled(0.5);
    let h_a_prime = h_frame_a_prime.add(h_frame_b_prime)?.scaled(0.5);
    let h_b_prime = h_frame_a_prime.sub(h_frame_b_prime)?.scaled(0.5);
    let effective = h_a.add(&h_a_prime)?.scaled(2.0);
    let c1 = h_b.commutator_over_i(&h_a)?;
    let c2 = h_b_prime.commutator_over_i(&h_a_prime)?;
    let c3 = h_a.commutator_over_i(&h_a_prime)?;
    let error_estimate = c1.sub(&c2)?.add(&c3.scaled(4.0))?.scaled(tau);
    Ok(BchFirstOrder {
        tau,
        n_reps,
        h_a,
        h_b,
        h_a_prime,
        h_b_prime,
        effective,
        error_estimate,
    })
}

/// Exact cycle generator from the dense oracle, in the same cycle units as
/// [`BchFirstOrder::effective`]: the principal log of
/// `(e^{-iτA} e^{-iτB} e^{-iτB'} e^{-iτA'})^n` divided by `-i n τ`.
pub fn exact_cycle_generator(pattern: &TogglingPattern, tau: f64, n_reps: usize) -> Result<PauliSum> {
    let u = cycle_unitary(pattern, tau, n_reps)?;
    let k = u.principal_log_generator()?;
    // U = exp(iK) and U ≈ exp(-i n τ E)  ⇒  E = -K/(nτ).
    let e = k.scaled(num_complex::Complex64::new(-1.0 / (n_reps as f64 * tau), 0.0));
    dense_to_pauli_sum(&e)
}

/// The dense unitary of `n` toggled cycles.
pub fn cycle_unitary(pattern: &TogglingPattern, tau: f64, n_reps: usize) -> Result<DenseOperator> {
    let n_qubits = pattern.frames[0].hamiltonian.n_qubits();
    let mut cycle = DenseOperator::identity(n_qubits);
    for frame in &pattern.frames {
        let hd = DenseOperator::from_pauli_sum(&frame.hamiltonian)?;
        cycle = cycle.mul(&DenseOperator::exp_hermitian(&hd, tau));
    }
    let mut u = DenseOperator::identity(n_qubits);
    for _ in 0..n_reps {
        u = u.mul(&cycle);
    }
    Ok(u)
}

/// Project a Hermitian dense operator back onto the Pauli basis.
pub fn dense_to_pauli_sum(op: &DenseOperator) -> Result<PauliSum> {
    let n = op.n_qubits();
    let dim = 1usize << n;
    let mut sum = PauliSum::zero(n);
    // coefficient of P is Tr(P·M)/d; enumerate strings with letters drawn
    // from the operator's support pattern. For small n a full enumeration
    // over 4^n strings is affordable.
    let mut masks = Vec::with_capacity(4usize.pow(n as u32));
    for x in 0..(1u64 << n) {
        for z in 0..(1u64 << n) {
            masks.push((x, z));
        }
    }
    for (x, z) in masks {
        let p = PauliString::from_masks(n, x, z, crate::pauli::Phase::PlusOne);
        let pd = DenseOperator::from_pauli_string(&p)?;
        let mut tr = num_complex::Complex64::new(0.0, 0.0);
        for c in 0..dim {
            for r in 0..dim {
                // Tr(P M) = Σ_rc P[c,r]·M[r,c]; P is sparse but this stays
                // simple and is only used on small systems.
                let pv = pd.matrix()[(c, r)];
                if pv != num_complex::Complex64::new(0.0, 0.0) {
                    tr += pv * op.matrix()[(r, c)];
                }
            }
        }
        let coeff = tr.re / dim as f64;
        if coeff.abs() > 1e-13 {
            sum.add_string(&p, coeff)?;
        }
    }
    Ok(sum)
}

/// Echo construction removing the residual `ΣZ_i` left by extraction on
/// Hamiltonians carrying a third Pauli species: evolve, flip every qubit
/// about x with a π-pulse pair, evolve again. Terms odd under the global
/// flip cancel at first order.
#[derive(Debug, Clone)]
pub struct EchoReport {
    /// `(H + XHX)/2` — what survives the echo.
    pub surviving: PauliSum,
    /// `(H - XHX)/2` — what the echo removes.
    pub cancelled: PauliSum,
    /// Cancelled terms that are not single-qubit Z (collateral removals the
    /// caller presumably wanted to keep).
    pub non_z_casualties: Vec<PauliString>,
}

pub fn echo_remove_z(h_eff: &PauliSum) -> Result<EchoReport> {
    let n = h_eff.n_qubits();
    let mut flipped = h_eff.clone();
    for q in 1..=n {
        flipped = flipped.conjugate_elementary(&ElementaryOp::AxisRotation {
            qubit: q,
            axis: Axis::X,
            angle: Angle::pi_over_4(4),
        })?;
    }
    let surviving = h_eff.add(&flipped)?.scaled(0.5);
    let cancelled = h_eff.sub(&flipped)?.scaled(0.5);
    let non_z_casualties = cancelled
        .iter()
        .filter(|(p, _)| !(p.weight() == 1 && p.x_mask() == 0))
        .map(|(p, _)| p)
        .collect();
    Ok(EchoReport {
        surviving,
        cancelled,
        non_z_casualties,
    })
}

/// Exact-vs-estimate perturbation accounting for one pattern.
#[derive(Debug, Clone)]
pub struct PerturbationReport {
    pub kind: PatternKind,
    pub tau: f64,
    pub n_reps: usize,
    /// First-order generator per cycle (cycle units).
    pub ideal: PauliSum,
    /// Symbolic second-order error (cycle units).
    pub symbolic_error: PauliSum,
    pub error_norm: f64,
    /// Closed-form order-of-magnitude estimate `(10 or 20)·τ·N·J·Ω`.
    pub estimate_norm: f64,
    pub ratio: f64,
    /// Dense-oracle exact generator and its deviation norm, when the system
    /// is small enough to simulate.
    pub exact: Option<PauliSum>,
    pub exact_deviation_norm: Option<f64>,
}

/// JSON-facing summary of a perturbation report.
#[derive(Debug, Clone, Serialize)]
pub struct PerturbationSummary {
    pub ideal: String,
    pub exact: Option<String>,
    pub error_norm: f64,
    pub estimate_norm: f64,
    pub ratio: f64,
}

impl PerturbationReport {
    pub fn summary(&self) -> PerturbationSummary {
        PerturbationSummary {
            ideal: text::render(&self.ideal),
            exact: self.exact.as_ref().map(text::render),
            error_norm: self.error_norm,
            estimate_norm: self.estimate_norm,
            ratio: self.ratio,
        }
    }
}

/// Compute the symbolic first-order error of a pattern, its norm, the
/// closed-form estimate, and (for dense-simulable sizes) the exact
/// deviation measured against the principal-log oracle.
pub fn perturbation_norm_report(
    spec: &LatticeSpec,
    pattern: &TogglingPattern,
    tau: f64,
    n_reps: usize,
    with_dense: bool,
) -> Result<PerturbationReport> {
    let bch = bch_first_order(
        &pattern.frames[0].hamiltonian,
        &pattern.frames[1].hamiltonian,
        &pattern.frames[2].hamiltonian,
        &pattern.frames[3].hamiltonian,
        tau,
        n_reps,
    )?;
    let prefactor = match pattern.kind {
        PatternKind::SingleQubit => 20.0,
        PatternKind::Edge(..) => 10.0,
    };
    let estimate_norm =
        prefactor * tau * spec.n_qubits() as f64 * spec.max_j() * spec.max_omega();
    let error_norm = bch.error_estimate.hs_norm();
    let (exact, exact_deviation_norm) = if with_dense && spec.n_qubits() <= crate::sim::MAX_DENSE_QUBITS
    {
        let e = exact_cycle_generator(pattern, tau, n_reps)?;
        let dev = e.sub(&bch.effective)?.hs_norm();
        (Some(e), Some(dev))
    } else {
        (None, None)
    };
    Ok(PerturbationReport {
        kind: pattern.kind,
        tau,
        n_reps,
        ideal: bch.effective,
        symbolic_error: bch.error_estimate,
        error_norm,
        estimate_norm,
        ratio: if estimate_norm > 0.0 {
            error_norm / estimate_norm
        } else {
            0.0
        },
        exact,
        exact_deviation_norm,
    })
}

/// Parse a plain key-value configuration:
/// `n_logical`, `n_phys`, `coupling_kind`, `j`, `omega`, `tau`, `n`.
pub fn parse_extraction_config(input: &str) -> Result<(LatticeSpec, f64, usize)> {
    let mut n_logical = 1usize;
    let mut n_phys = 5usize;
    let mut kind = InteractionKind::Ising;
    let mut j = 1.0f64;
    let mut omega = 1.0f64;
    let mut tau = 0.01f64;
    let mut n = 1usize;
    for (lineno, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: missing `=`", lineno + 1)))?;
        let value = value.trim();
        let bad = |what: &str| Error::Parse(format!("config line {}: bad {what}", lineno + 1));
        match key.trim().to_ascii_lowercase().as_str() {
            "n_logical" => n_logical = value.parse().map_err(|_| bad("n_logical"))?,
            "n_phys" => n_phys = value.parse().map_err(|_| bad("n_phys"))?,
            "coupling_kind" | "kind" => kind = value.parse()?,
            "j" => j = value.parse().map_err(|_| bad("j"))?,
            "omega" | "Ω" => omega = value.parse().map_err(|_| bad("omega"))?,
            "tau" => tau = value.parse().map_err(|_| bad("tau"))?,
            "n" => n = value.parse().map_err(|_| bad("n"))?,
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
    }
    Ok((LatticeSpec::uniform(n_logical, n_phys, kind, j, omega), tau, n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_site_xy_hamiltonian() {
        let spec = LatticeSpec::uniform(1, 2, InteractionKind::Xy, 1.0, 0.0);
        let h = build_lattice_hamiltonian(&spec).unwrap();
        let want = text::parse("X1X2 + Y1Y2", 2).unwrap();
        assert!(h.exact_eq(&want));
    }

    #[test]
    fn five_site_ising_counts() {
        let spec = LatticeSpec::uniform(1, 5, InteractionKind::Ising, 0.5, 2.0);
        let h = build_lattice_hamiltonian(&spec).unwrap();
        // 5 single-qubit + 4 coupling terms
        assert_eq!(h.n_terms(), 9);
    }

    #[test]
    fn three_by_five_xy_term_counts() {
        // 15 single-qubit terms, 12 intra bonds, 10 rungs (each XY bond
        // contributes two strings).
        let spec = LatticeSpec::uniform(3, 5, InteractionKind::Xy, 1.0, 1.0);
        let h = build_lattice_hamiltonian(&spec).unwrap();
        assert_eq!(spec.edges().len(), 12 + 10);
        assert_eq!(h.n_terms(), 15 + 2 * (12 + 10));
    }

    #[test]
    fn h0_pattern_frames_are_pulse_realizable() {
        for kind in [InteractionKind::Xy, InteractionKind::Ising] {
            for n_logical in [1, 2] {
                let spec = LatticeSpec::uniform(n_logical, 5, kind, 0.3, 1.1);
                let pat = pattern_select_h0(&spec).unwrap();
                assert!(pat.verify_realizable(&spec).unwrap(), "{kind}/{n_logical}");
            }
        }
    }

    #[test]
    fn h0_pattern_first_array_frame_a_is_bare() {
        // With a single array, frame A applies no pulses.
        let spec = LatticeSpec::uniform(1, 5, InteractionKind::Ising, 0.3, 1.0);
        let pat = pattern_select_h0(&spec).unwrap();
        let bare = build_lattice_hamiltonian(&spec).unwrap();
        assert!(pat.frame("A").pulsed.is_empty());
        assert!(pat.frame("A").hamiltonian.exact_eq(&bare));
        assert_eq!(
            pat.frame("B").pulsed.iter().copied().collect::<Vec<_>>(),
            vec![1, 3, 5]
        );
    }

    #[test]
    fn h0_pattern_selects_all_single_qubit_terms() {
        for kind in [InteractionKind::Xy, InteractionKind::Ising] {
            let spec = LatticeSpec::uniform(2, 5, kind, 0.4, 0.9);
            let pat = pattern_select_h0(&spec).unwrap();
            let bch = bch_first_order(
                &pat.frames[0].hamiltonian,
                &pat.frames[1].hamiltonian,
                &pat.frames[2].hamiltonian,
                &pat.frames[3].hamiltonian,
                0.01,
                1,
            )
            .unwrap();
            // effective = 2·ΣΩX, all couplings cancelled
            let h0 = {
                let mut h = PauliSum::zero(spec.n_qubits());
                for q in 1..=spec.n_qubits() {
                    h.add_string(
                        &PauliString::single(spec.n_qubits(), q, Axis::X).unwrap(),
                        0.9,
                    )
                    .unwrap();
                }
                h
            };
            assert!(bch.effective.exact_eq(&h0.scaled(2.0)), "{kind}");
        }
    }

    #[test]
    fn h0_pattern_zero_coupling_is_exact() {
        let spec = LatticeSpec::uniform(1, 5, InteractionKind::Ising, 0.0, 1.0);
        let pat = pattern_select_h0(&spec).unwrap();
        let bch = bch_first_order(
            &pat.frames[0].hamiltonian,
            &pat.frames[1].hamiltonian,
            &pat.frames[2].hamiltonian,
            &pat.frames[3].hamiltonian,
            0.05,
            1,
        )
        .unwrap();
        assert!(bch.error_estimate.is_zero());
        let exact = exact_cycle_generator(&pat, 0.05, 1).unwrap();
        assert!(exact.approx_eq(&bch.effective, 1e-9));
    }

    #[test]
    fn edge_pattern_matches_recorded_pulse_sets() {
        // Edge (2,3) on a five-site array: B pulses {2,3,5} on even-offset
        // arrays and {1,4} on odd-offset arrays.
        let spec = LatticeSpec::uniform(2, 5, InteractionKind::Ising, 0.3, 1.0);
        let pat = pattern_select_edge(&spec, 2).unwrap();
        let b: Vec<usize> = pat.frame("B").pulsed.iter().copied().collect();
        assert_eq!(b, vec![2, 3, 5, 6, 9]); // {2,3,5} of array 1, {1,4} of array 2
        let bp: Vec<usize> = pat.frame("B'").pulsed.iter().copied().collect();
        assert_eq!(bp, vec![1, 4, 7, 8, 10]);
        assert_eq!(pat.frame("A'").pulsed.len(), 10);
        assert!(pat.verify_realizable(&spec).unwrap());
    }

    #[test]
    fn edge_pattern_selects_four_h_edge() {
        let spec = LatticeSpec::uniform(1, 5, InteractionKind::Ising, 0.7, 1.3);
        let pat = pattern_select_edge(&spec, 2).unwrap();
        let bch = bch_first_order(
            &pat.frames[0].hamiltonian,
            &pat.frames[1].hamiltonian,
            &pat.frames[2].hamiltonian,
            &pat.frames[3].hamiltonian,
            0.01,
            1,
        )
        .unwrap();
        let want = PauliSum::term(
            &PauliString::from_axes(5, &[(2, Axis::Z), (3, Axis::Z)]).unwrap(),
            4.0 * 0.7,
        )
        .unwrap();
        assert!(bch.effective.exact_eq(&want));
    }

    #[test]
    fn edge_pattern_with_zero_omega_has_no_first_order_error() {
        let spec = LatticeSpec::uniform(1, 5, InteractionKind::Ising, 0.7, 0.0);
        let pat = pattern_select_edge(&spec, 2).unwrap();
        // A' = A and B' = B up to the vanished single-qubit terms.
        let report = perturbation_norm_report(&spec, &pat, 0.01, 1, false).unwrap();
        assert!(report.symbolic_error.is_zero());
        assert_eq!(report.estimate_norm, 0.0);
    }

    #[test]
    fn every_surviving_term_has_nonzero_frame_sign_sum() {
        let spec = LatticeSpec::uniform(2, 5, InteractionKind::Ising, 0.3, 1.0);
        for pat in [
            pattern_select_h0(&spec).unwrap(),
            pattern_select_edge(&spec, 2).unwrap(),
        ] {
            let sum = pat.frames[0]
                .hamiltonian
                .add(&pat.frames[1].hamiltonian)
                .unwrap()
                .add(&pat.frames[2].hamiltonian)
                .unwrap()
                .add(&pat.frames[3].hamiltonian)
                .unwrap();
            let bch = bch_first_order(
                &pat.frames[0].hamiltonian,
                &pat.frames[1].hamiltonian,
                &pat.frames[2].hamiltonian,
                &pat.frames[3].hamiltonian,
                0.01,
                1,
            )
            .unwrap();
            // the first-order effective equals the four-frame sum, so only
            // terms whose frame signs do not cancel survive
            assert!(bch.effective.exact_eq(&sum));
        }
    }

    #[test]
    fn echo_removes_z_and_keeps_flip_even_terms() {
        let mut h = PauliSum::zero(2);
        h.add_string(&PauliString::single(2, 1, Axis::Z).unwrap(), 1.0)
            .unwrap();
        h.add_string(&PauliString::single(2, 1, Axis::X).unwrap(), 1.0)
            .unwrap();
        let rep = echo_remove_z(&h).unwrap();
        assert!(rep
            .surviving
            .exact_eq(&PauliSum::term(&PauliString::single(2, 1, Axis::X).unwrap(), 1.0).unwrap()));
        assert!(rep.non_z_casualties.is_empty());

        // a pure ΣZ input vanishes entirely
        let z =
            PauliSum::term(&PauliString::single(2, 1, Axis::Z).unwrap(), 1.0).unwrap();
        assert!(echo_remove_z(&z).unwrap().surviving.is_zero());

        // residual 4ΣZ + an XY edge: the edge survives untouched
        let mut h = PauliSum::zero(5);
        for q in 1..=5 {
            h.add_string(&PauliString::single(5, q, Axis::Z).unwrap(), 4.0)
                .unwrap();
        }
        let xx = PauliString::from_axes(5, &[(2, Axis::X), (3, Axis::X)]).unwrap();
        let yy = PauliString::from_axes(5, &[(2, Axis::Y), (3, Axis::Y)]).unwrap();
        h.add_string(&xx, 1.0).unwrap();
        h.add_string(&yy, 1.0).unwrap();
        let rep = echo_remove_z(&h).unwrap();
        let mut want = PauliSum::zero(5);
        want.add_string(&xx, 1.0).unwrap();
        want.add_string(&yy, 1.0).unwrap();
        assert!(rep.surviving.exact_eq(&want));
        assert_eq!(rep.cancelled.n_terms(), 5);
    }

    #[test]
    fn config_parsing_round_trip() {
        let (spec, tau, n) = parse_extraction_config(
            "n_logical = 2\nn_phys = 5\ncoupling_kind = ising\nj = 0.5\nomega = 1.5\ntau = 0.02\nn = 4\n",
        )
        .unwrap();
        assert_eq!(spec.n_logical, 2);
        assert_eq!(spec.n_phys, 5);
        assert_eq!(spec.kind, InteractionKind::Ising);
        assert_eq!(spec.max_j(), 0.5);
        assert_eq!(spec.max_omega(), 1.5);
        assert_eq!(tau, 0.02);
        assert_eq!(n, 4);
        assert!(parse_extraction_config("nonsense = 1").is_err());
    }
}
