//! Dense statevector / operator oracle for up to [`MAX_DENSE_QUBITS`] qubits.
//!
//! Basis ordering: qubit 1 is the most significant bit, so `|00010⟩` on five
//! qubits is basis index 2. All symbolic operations in this crate can be
//! cross-checked against their dense counterparts here; the dense path never
//! reuses the symbolic conjugation code.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

pub const MAX_DENSE_QUBITS: usize = 10;

type C = Complex64;

fn check_dense(n: usize) -> Result<()> {
    if n > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits {
            n,
            max: MAX_DENSE_QUBITS,
        });
    }
    Ok(())
}

/// Basis index of the bit pattern where `qubit` (1-based) maps to bit
/// `n - qubit` (qubit 1 = MSB).
fn qubit_bit(n: usize, qubit: usize) -> u32 {
    (n - qubit) as u32
}

/// Action of a Pauli string on a basis state:
/// `P|b⟩ = i^(k + #Y) · (-1)^(|z∧b|) |b ⊕ x⟩` with `x`,`z` in basis-bit order.
#[derive(Debug, Clone)]
struct BasisAction {
    flip: u64,
    z_bits: u64,
    prefactor: C,
}

impl BasisAction {
    fn new(p: &PauliString) -> BasisAction {
        let n = p.n_qubits();
        let mut flip = 0u64;
        let mut z_bits = 0u64;
        for q in 1..=n {
            let bit = qubit_bit(n, q);
            if p.x_mask() >> (q - 1) & 1 != 0 {
                flip |= 1 << bit;
            }
            if p.z_mask() >> (q - 1) & 1 != 0 {
                z_bits |= 1 << bit;
            }
        }
        let y_count = (p.x_mask() & p.z_mask()).count_ones() as u8;
        let k = (p.phase().exponent() + y_count) % 4;
        let prefactor = match k {
            0 => C::new(1.0, 0.0),
            1 => C::new(0.0, 1.0),
            2 => C::new(-1.0, 0.0),
            _ => C::new(0.0, -1.0),
        };
        BasisAction {
            flip,
            z_bits,
            prefactor,
        }
    }

    #[inline]
    fn phase_on(&self, basis: u64) -> C {
        if (self.z_bits & basis).count_ones() % 2 == 1 {
            -self.prefactor
        } else {
            self.prefactor
        }
    }
}

/// Dense complex amplitude vector over the 2^n basis states.
#[derive(Debug, Clone)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C>,
}

impl StateVector {
    /// `|0…0⟩`.
    pub fn zero_state(n_qubits: usize) -> StateVector {
        StateVector::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> StateVector {
        check_dense(n_qubits).expect("dense limit");
        let dim = 1usize << n_qubits;
        assert!(index < dim);
        let mut amplitudes = vec![C::new(0.0, 0.0); dim];
        amplitudes[index] = C::new(1.0, 0.0);
        StateVector {
            n_qubits,
            amplitudes,
        }
    }

    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<C>) -> Result<StateVector> {
        check_dense(n_qubits)?;
        if amplitudes.len() != 1 << n_qubits {
            return Err(Error::DimensionMismatch(amplitudes.len(), 1 << n_qubits));
        }
        Ok(StateVector {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> StateVector {
        let n = self.norm();
        let mut out = self.clone();
        for a in &mut out.amplitudes {
            *a /= n;
        }
        out
    }

    pub fn inner(&self, other: &StateVector) -> C {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Apply a Pauli string (a signed basis permutation).
    pub fn apply_pauli(&self, p: &PauliString) -> Result<StateVector> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(p.n_qubits(), self.n_qubits));
        }
        let act = BasisAction::new(p);
        let dim = self.amplitudes.len();
        let mut out = vec![C::new(0.0, 0.0); dim];
        for (b, &a) in self.amplitudes.iter().enumerate() {
            if a != C::new(0.0, 0.0) {
                out[b ^ act.flip as usize] += act.phase_on(b as u64) * a;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// Apply `exp(-iθP) = cosθ·I - i·sinθ·P` without matrix exponentiation.
    pub fn evolve_pauli_exp(&self, p: &PauliString, theta: f64) -> Result<StateVector> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(p.n_qubits(), self.n_qubits));
        }
        let act = BasisAction::new(p);
        let c = C::new(theta.cos(), 0.0);
        let s = C::new(0.0, -theta.sin());
        let dim = self.amplitudes.len();
        let mut out = vec![C::new(0.0, 0.0); dim];
        for (b, &a) in self.amplitudes.iter().enumerate() {
            if a != C::new(0.0, 0.0) {
                out[b] += c * a;
                out[b ^ act.flip as usize] += s * act.phase_on(b as u64) * a;
            }
        }
        Ok(StateVector {
            n_qubits: self.n_qubits,
            amplitudes: out,
        })
    }

    /// Apply `exp(-iθH)` for a Hamiltonian whose terms all commute pairwise
    /// (the exponential factorizes exactly). Errors if they do not.
    pub fn evolve_commuting_sum(&self, h: &PauliSum, theta: f64) -> Result<StateVector> {
        let terms: Vec<_> = h.iter().collect();
        for (i, (p, _)) in terms.iter().enumerate() {
            for (q, _) in &terms[i + 1..] {
                if !p.commutes(q)? {
                    return Err(Error::MalformedOp(
                        "evolve_commuting_sum needs pairwise-commuting terms".into(),
                    ));
                }
            }
        }
        let mut state = self.clone();
        for (p, c) in terms {
            state = state.evolve_pauli_exp(&p, theta * c)?;
        }
        Ok(state)
    }

    /// Fidelity with `other` up to a global phase: `|⟨other|self⟩|²`.
    pub fn overlap_sq(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }
}

/// Dense 2^n × 2^n complex operator.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    n_qubits: usize,
    matrix: DMatrix<C>,
}

impl DenseOperator {
    pub fn identity(n_qubits: usize) -> DenseOperator {
        check_dense(n_qubits).expect("dense limit");
        let dim = 1 << n_qubits;
        DenseOperator {
            n_qubits,
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn from_matrix(n_qubits: usize, matrix: DMatrix<C>) -> DenseOperator {
        assert_eq!(matrix.nrows(), 1 << n_qubits);
        assert_eq!(matrix.ncols(), 1 << n_qubits);
        DenseOperator { n_qubits, matrix }
    }

    /// Dense matrix of a Pauli string.
    pub fn from_pauli_string(p: &PauliString) -> Result<DenseOperator> {
        check_dense(p.n_qubits())?;
        let act = BasisAction::new(p);
        let dim = 1usize << p.n_qubits();
        let mut m = DMatrix::zeros(dim, dim);
        for b in 0..dim {
            m[(b ^ act.flip as usize, b)] = act.phase_on(b as u64);
        }
        Ok(DenseOperator {
            n_qubits: p.n_qubits(),
            matrix: m,
        })
    }

    /// Kronecker-assembled matrix of a Hermitian Pauli sum.
    pub fn from_pauli_sum(h: &PauliSum) -> Result<DenseOperator> {
        check_dense(h.n_qubits())?;
        let dim = 1usize << h.n_qubits();
        let mut m = DMatrix::zeros(dim, dim);
        for (p, c) in h.iter() {
            let act = BasisAction::new(&p);
            for b in 0..dim {
                m[(b ^ act.flip as usize, b)] += act.phase_on(b as u64) * C::new(c, 0.0);
            }
        }
        Ok(DenseOperator {
            n_qubits: h.n_qubits(),
            matrix: m,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn matrix(&self) -> &DMatrix<C> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn mul(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix * &other.matrix,
        }
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn sub(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix - &other.matrix,
        }
    }

    pub fn add(&self, other: &DenseOperator) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: &self.matrix + &other.matrix,
        }
    }

    pub fn scaled(&self, factor: C) -> DenseOperator {
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: self.matrix.map(|v| v * factor),
        }
    }

    /// Frobenius norm.
    pub fn fro_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Hilbert-Schmidt norm with the 1/d normalization,
    /// `[Tr(A†A)/d]^{1/2}` — matches [`PauliSum::hs_norm`].
    pub fn hs_norm(&self) -> f64 {
        self.fro_norm() / (self.dim() as f64).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix
            .iter()
            .map(|v| v.norm())
            .fold(0.0f64, f64::max)
    }

    pub fn apply(&self, s: &StateVector) -> Result<StateVector> {
        if s.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(s.n_qubits(), self.n_qubits));
        }
        let v = DVector::from_column_slice(s.amplitudes());
        let w = &self.matrix * v;
        StateVector::from_amplitudes(self.n_qubits, w.iter().copied().collect())
    }

    /// Left-multiply by a Pauli string in O(4^n): `P · M`.
    pub fn pauli_mul_left(&self, p: &PauliString) -> Result<DenseOperator> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(p.n_qubits(), self.n_qubits));
        }
        let act = BasisAction::new(p);
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for r in 0..dim {
            let src = r ^ act.flip as usize;
            let ph = act.phase_on(src as u64);
            for c in 0..dim {
                m[(r, c)] = ph * self.matrix[(src, c)];
            }
        }
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    /// Right-multiply by a Pauli string in O(4^n): `M · P`.
    pub fn pauli_mul_right(&self, p: &PauliString) -> Result<DenseOperator> {
        if p.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(p.n_qubits(), self.n_qubits));
        }
        let act = BasisAction::new(p);
        let dim = self.dim();
        let mut m = DMatrix::zeros(dim, dim);
        for c in 0..dim {
            let ph = act.phase_on(c as u64);
            let dst = c ^ act.flip as usize;
            for r in 0..dim {
                m[(r, dst)] = self.matrix[(r, c)] * ph;
            }
        }
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    /// Conjugation by a single Pauli exponential,
    /// `e^{-iθP} M e^{iθP} = c²M + s²PMP + i·c·s·(MP - PM)`,
    /// using signed-permutation products instead of dense matmuls.
    pub fn conjugate_by_pauli_exp(&self, p: &PauliString, theta: f64) -> Result<DenseOperator> {
        let (c, s) = (theta.cos(), theta.sin());
        let pm = self.pauli_mul_left(p)?;
        let mp = self.pauli_mul_right(p)?;
        let pmp = mp.pauli_mul_left(p)?;
        let ics = C::new(0.0, c * s);
        let m = self.matrix.map(|v| v * C::new(c * c, 0.0))
            + pmp.matrix.map(|v| v * C::new(s * s, 0.0))
            + (mp.matrix - pm.matrix).map(|v| v * ics);
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            matrix: m,
        })
    }

    /// Matrix exponential `exp(M)` by scaling-and-squaring with a Taylor
    /// series on the scaled matrix.
    pub fn expm(&self) -> DenseOperator {
        let norm = self.max_abs() * self.dim() as f64;
        let mut squarings = 0u32;
        let mut scale = 1.0;
        while norm * scale > 0.5 {
            scale *= 0.5;
            squarings += 1;
        }
        let a = self.matrix.map(|v| v * C::new(scale, 0.0));
        let dim = self.dim();
        let mut sum = DMatrix::<C>::identity(dim, dim);
        let mut term = DMatrix::<C>::identity(dim, dim);
        for k in 1..=24 {
            term = &term * &a;
            term /= C::new(k as f64, 0.0);
            sum += &term;
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        let mut m = sum;
        for _ in 0..squarings {
            m = &m * &m;
        }
        DenseOperator {
            n_qubits: self.n_qubits,
            matrix: m,
        }
    }

    /// `exp(-iθ·H)` for Hermitian `H` given as a dense operator.
    pub fn exp_hermitian(h: &DenseOperator, theta: f64) -> DenseOperator {
        h.scaled(C::new(0.0, -theta)).expm()
    }

    /// Eigendecomposition of a Hermitian operator; eigenvalues ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, DMatrix<C>) {
        let se = self.matrix.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
        let vals: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
        let dim = self.dim();
        let mut vecs = DMatrix::zeros(dim, dim);
        for (col, &i) in order.iter().enumerate() {
            vecs.set_column(col, &se.eigenvectors.column(i));
        }
        (vals, vecs)
    }

    /// Principal logarithm of a unitary, as the Hermitian generator `K` with
    /// `U = exp(iK)` and the eigenphases of `U` in `(-π, π)`.
    ///
    /// Uses the Cayley transform `C = i(I-U)(I+U)^{-1}`, which is Hermitian
    /// for unitary `U` with no eigenvalue at -1; its eigenvalues `c` map to
    /// eigenphases `2·atan(c)`, which selects the principal branch without
    /// any series expansion.
    pub fn principal_log_generator(&self) -> Result<DenseOperator> {
        let dim = self.dim();
        let id = DMatrix::<C>::identity(dim, dim);
        let denom = (&id + &self.matrix).lu();
        let inv = denom.try_inverse().ok_or_else(|| {
            Error::MalformedOp("principal log undefined: unitary has eigenvalue -1".into())
        })?;
        let cayley = (&id - &self.matrix) * inv;
        let cayley = cayley.map(|v| v * C::new(0.0, 1.0));
        // Hermitize against roundoff before the eigensolve.
        let herm = (&cayley + cayley.adjoint()).map(|v| v * C::new(0.5, 0.0));
        let op = DenseOperator {
            n_qubits: self.n_qubits,
            matrix: herm,
        };
        let (vals, vecs) = op.hermitian_eigen();
        let mut diag = DMatrix::<C>::zeros(dim, dim);
        for (i, c) in vals.iter().enumerate() {
            diag[(i, i)] = C::new(2.0 * c.atan(), 0.0);
        }
        let k = &vecs * diag * vecs.adjoint();
        Ok(DenseOperator {
            n_qubits: self.n_qubits,
            matrix: k,
        })
    }
}

/// Eigendecomposition of a Hermitian Pauli sum: ground energy, degeneracy,
/// and an orthonormal ground-space basis.
#[derive(Debug, Clone)]
pub struct GroundSpace {
    pub energy: f64,
    pub dimension: usize,
    pub basis: Vec<StateVector>,
}

/// Full Hermitian eigendecomposition of `h`; the ground space collects all
/// eigenvalues within `1e-9` (relative to the spectral width) of the minimum.
pub fn ground_space(h: &PauliSum) -> Result<GroundSpace> {
    let op = DenseOperator::from_pauli_sum(h)?;
    let (vals, vecs) = op.hermitian_eigen();
    let spread = (vals[vals.len() - 1] - vals[0]).max(1.0);
    let tol = 1e-9 * spread;
    let e0 = vals[0];
    let mut basis = Vec::new();
    for (i, &v) in vals.iter().enumerate() {
        if v - e0 <= tol {
            let col = vecs.column(i);
            basis.push(StateVector::from_amplitudes(
                h.n_qubits(),
                col.iter().copied().collect(),
            )?);
        }
    }
    Ok(GroundSpace {
        energy: e0,
        dimension: basis.len(),
        basis,
    })
}

/// Principal angles between two subspaces spanned by orthonormal bases:
/// `cos θ_k` are the singular values of the overlap matrix.
pub fn principal_angle_cosines(a: &[StateVector], b: &[StateVector]) -> Vec<f64> {
    let rows = a.len();
    let cols = b.len();
    let mut overlap = DMatrix::<C>::zeros(rows, cols);
    for (i, u) in a.iter().enumerate() {
        for (j, v) in b.iter().enumerate() {
            overlap[(i, j)] = u.inner(v);
        }
    }
    let svd = overlap.svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{Axis, Phase};

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn basis_ordering_msb_first() {
        // |00010⟩ on 5 qubits: qubit 4 is 1 → index 2.
        let s = StateVector::basis(5, 2);
        assert_eq!(s.amplitude(2), c(1.0, 0.0));
        let z4 = PauliString::single(5, 4, Axis::Z).unwrap();
        let t = s.apply_pauli(&z4).unwrap();
        assert_eq!(t.amplitude(2), c(-1.0, 0.0));
    }

    #[test]
    fn z_on_one_qubit_is_diag_1_minus1() {
        let z = PauliString::single(1, 1, Axis::Z).unwrap();
        let m = DenseOperator::from_pauli_string(&z).unwrap();
        assert_eq!(m.matrix()[(0, 0)], c(1.0, 0.0));
        assert_eq!(m.matrix()[(1, 1)], c(-1.0, 0.0));
        assert_eq!(m.matrix()[(0, 1)], c(0.0, 0.0));
    }

    #[test]
    fn y_action_has_correct_phases() {
        let y = PauliString::single(1, 1, Axis::Y).unwrap();
        let s = StateVector::zero_state(1).apply_pauli(&y).unwrap();
        assert_eq!(s.amplitude(1), c(0.0, 1.0)); // Y|0⟩ = i|1⟩
        let s = StateVector::basis(1, 1).apply_pauli(&y).unwrap();
        assert_eq!(s.amplitude(0), c(0.0, -1.0)); // Y|1⟩ = -i|0⟩
    }

    #[test]
    fn phase_prefactor_respected() {
        let p = PauliString::single(1, 1, Axis::X)
            .unwrap()
            .with_phase(Phase::MinusI);
        let s = StateVector::zero_state(1).apply_pauli(&p).unwrap();
        assert_eq!(s.amplitude(1), c(0.0, -1.0));
    }

    #[test]
    fn xx_plus_yy_matrix_block() {
        // X1X2 + Y1Y2 swaps |01⟩ and |10⟩ with amplitude 2.
        let mut h = PauliSum::zero(2);
        h.add_string(
            &PauliString::from_axes(2, &[(1, Axis::X), (2, Axis::X)]).unwrap(),
            1.0,
        )
        .unwrap();
        h.add_string(
            &PauliString::from_axes(2, &[(1, Axis::Y), (2, Axis::Y)]).unwrap(),
            1.0,
        )
        .unwrap();
        let m = DenseOperator::from_pauli_sum(&h).unwrap();
        assert_eq!(m.matrix()[(1, 2)], c(2.0, 0.0));
        assert_eq!(m.matrix()[(2, 1)], c(2.0, 0.0));
        assert_eq!(m.matrix()[(0, 0)], c(0.0, 0.0));
        assert_eq!(m.matrix()[(3, 3)], c(0.0, 0.0));
    }

    #[test]
    fn evolve_pauli_exp_matches_expm() {
        let p = PauliString::from_axes(3, &[(1, Axis::X), (2, Axis::Y), (3, Axis::Z)]).unwrap();
        let theta = 0.437;
        let u = DenseOperator::exp_hermitian(&DenseOperator::from_pauli_string(&p).unwrap(), theta);
        let mut s0 = StateVector::zero_state(3);
        // make a non-trivial input state
        s0 = s0
            .evolve_pauli_exp(&PauliString::single(3, 2, Axis::X).unwrap(), 0.3)
            .unwrap();
        let direct = s0.evolve_pauli_exp(&p, theta).unwrap();
        let via_matrix = u.apply(&s0).unwrap();
        for i in 0..8 {
            assert!((direct.amplitude(i) - via_matrix.amplitude(i)).norm() < 1e-12);
        }
        assert!((direct.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_by_pauli_exp_matches_dense_products() {
        let h = {
            let mut h = PauliSum::zero(2);
            h.add_string(&PauliString::single(2, 1, Axis::Z).unwrap(), 0.8)
                .unwrap();
            h.add_string(
                &PauliString::from_axes(2, &[(1, Axis::X), (2, Axis::Y)]).unwrap(),
                -0.3,
            )
            .unwrap();
            h
        };
        let p = PauliString::from_axes(2, &[(1, Axis::Z), (2, Axis::Z)]).unwrap();
        let theta = 0.256;
        let m = DenseOperator::from_pauli_sum(&h).unwrap();
        let fast = m.conjugate_by_pauli_exp(&p, theta).unwrap();
        let u = DenseOperator::exp_hermitian(&DenseOperator::from_pauli_string(&p).unwrap(), theta);
        let slow = u.mul(&m).mul(&u.adjoint());
        assert!(fast.sub(&slow).fro_norm() < 1e-12);
    }

    #[test]
    fn hs_norm_cross_check() {
        let mut h = PauliSum::zero(2);
        h.add_string(&PauliString::single(2, 1, Axis::Z).unwrap(), 1.5)
            .unwrap();
        h.add_string(
            &PauliString::from_axes(2, &[(1, Axis::Y), (2, Axis::X)]).unwrap(),
            -0.25,
        )
        .unwrap();
        let dense = DenseOperator::from_pauli_sum(&h).unwrap();
        assert!((h.hs_norm() - dense.hs_norm()).abs() < 1e-12);
    }

    #[test]
    fn ground_space_of_single_qubit() {
        // -Z1: ground |0⟩, energy -1, non-degenerate.
        let h = PauliSum::term(&PauliString::single(1, 1, Axis::Z).unwrap(), -1.0).unwrap();
        let gs = ground_space(&h).unwrap();
        assert!((gs.energy + 1.0).abs() < 1e-12);
        assert_eq!(gs.dimension, 1);
        assert!(gs.basis[0].amplitude(0).norm() > 0.999);
    }

    #[test]
    fn principal_log_recovers_generator() {
        // U = exp(-i t H) for a small random Hermitian H; the principal log
        // generator K satisfies U = exp(iK), i.e. K = -tH.
        let mut h = PauliSum::zero(2);
        h.add_string(&PauliString::single(2, 1, Axis::X).unwrap(), 0.4)
            .unwrap();
        h.add_string(
            &PauliString::from_axes(2, &[(1, Axis::Z), (2, Axis::Z)]).unwrap(),
            0.7,
        )
        .unwrap();
        let hd = DenseOperator::from_pauli_sum(&h).unwrap();
        let t = 0.35;
        let u = DenseOperator::exp_hermitian(&hd, t);
        let k = u.principal_log_generator().unwrap();
        let recovered = k.scaled(c(-1.0 / t, 0.0));
        assert!(recovered.sub(&hd).fro_norm() < 1e-10);
    }

    #[test]
    fn principal_angles_detect_equal_spans() {
        let a = vec![StateVector::basis(2, 0), StateVector::basis(2, 1)];
        // same span, rotated basis
        let inv = 1.0 / 2f64.sqrt();
        let b = vec![
            StateVector::from_amplitudes(
                2,
                vec![c(inv, 0.0), c(inv, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
            StateVector::from_amplitudes(
                2,
                vec![c(inv, 0.0), c(-inv, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            )
            .unwrap(),
        ];
        let cosines = principal_angle_cosines(&a, &b);
        assert!(cosines.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        let c2 = principal_angle_cosines(&a, &[StateVector::basis(2, 2)]);
        assert!(c2[0] < 1e-12);
    }
}
