//! Bell operator assembly, quantum value, top-eigenspace state, and the
//! odd-correlation audit.
//!
//! Observables are dichotomic qubit measurements a.sigma given by unit
//! Bloch vectors; the idle setting 0 always maps to the identity. The
//! operator is the coefficient-weighted sum of Kronecker products, and
//! the protocol state is the uniform mixture over its top eigenspace.


use crate::error::{CcrError, Result};
use crate::inequality::InequalitySpec;
use crate::linalg::{
    expectation, hermitian_eig, kron, pauli, ComplexMatrix, PauliLabel, C64,
};
use crate::tol;

/// Unit Bloch vectors per party and non-idle setting.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableAssignment {
    /// bloch[p][s-1] defines party p's observable at setting s >= 1.
    pub bloch: Vec<Vec<[f64; 3]>>,
}

impl ObservableAssignment {
    pub fn new(bloch: Vec<Vec<[f64; 3]>>) -> Result<Self> {
        for (p, row) in bloch.iter().enumerate() {
            for (s, v) in row.iter().enumerate() {
                let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
                if (norm - 1.0).abs() > tol::BLOCH_NORM {
                    return Err(CcrError::Validation(format!(
                        "Bloch vector of party {p}, setting {}: norm {norm} is not 1",
                        s + 1
                    )));
                }
            }
        }
        Ok(ObservableAssignment { bloch })
    }

    /// setting 1 -> sigma_x, setting 2 -> sigma_z for every party.
    pub fn xz(spec: &InequalitySpec) -> Result<Self> {
        Self::two_setting(spec, [1.0, 0.0, 0.0], [0.0, 0.0, 1.0])
    }

    /// setting 1 -> sigma_z, setting 2 -> sigma_x for every party.
    pub fn zx(spec: &InequalitySpec) -> Result<Self> {
        Self::two_setting(spec, [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    }

    fn two_setting(spec: &InequalitySpec, one: [f64; 3], two: [f64; 3]) -> Result<Self> {
        if spec.settings_per_party.iter().any(|&l| l != 2) {
            return Err(CcrError::Usage(
                "the default assignment needs exactly two settings per party".into(),
            ));
        }
        Ok(ObservableAssignment {
            bloch: vec![vec![one, two]; spec.party_count],
        })
    }

    /// 2x2 observable for a setting; identity at the idle setting 0.
    pub fn observable(&self, party: usize, setting: u8) -> ComplexMatrix {
        if setting == 0 {
            return ComplexMatrix::identity(2);
        }
        let v = self.bloch[party][setting as usize - 1];
        let mut m = pauli(PauliLabel::X).scaled(C64::new(v[0], 0.0));
        m.add_scaled(&pauli(PauliLabel::Y), C64::new(v[1], 0.0))
            .unwrap();
        m.add_scaled(&pauli(PauliLabel::Z), C64::new(v[2], 0.0))
            .unwrap();
        m
    }

    fn covers(&self, spec: &InequalitySpec) -> Result<()> {
        if self.bloch.len() != spec.party_count {
            return Err(CcrError::Usage(format!(
                "assignment covers {} parties, inequality has {}",
                self.bloch.len(),
                spec.party_count
            )));
        }
        for (p, (row, &l)) in self
            .bloch
            .iter()
            .zip(spec.settings_per_party.iter())
            .enumerate()
        {
            if row.len() != l as usize {
                return Err(CcrError::Usage(format!(
                    "assignment gives {} observables for party {p}, expected {l}",
                    row.len()
                )));
            }
        }
        Ok(())
    }
}

/// The inequality's operator under an observable assignment.
#[derive(Debug, Clone)]
pub struct BellOperator {
    pub matrix: ComplexMatrix,
    pub spec: InequalitySpec,
    pub assignment: ObservableAssignment,
}

/// Mixed state of a qubit register.
#[derive(Debug, Clone)]
pub struct DensityState {
    pub matrix: ComplexMatrix,
    pub qubits: usize,
}

impl DensityState {
    /// Validates Hermiticity, unit trace, dimension 2^k, and positive
    /// semidefiniteness up to the eigenvalue floor.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(CcrError::Validation("density matrix must be square".into()));
        }
        let n = matrix.rows;
        if !n.is_power_of_two() {
            return Err(CcrError::Validation(format!(
                "density matrix dimension {n} is not a power of two"
            )));
        }
        let defect = matrix.hermitian_defect();
        if defect > tol::HERMITIAN {
            return Err(CcrError::Validation(format!(
                "density matrix is not Hermitian: defect {defect:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > tol::DENSITY_TRACE || trace.im.abs() > tol::DENSITY_TRACE {
            return Err(CcrError::Validation(format!(
                "density matrix trace {trace} is not 1"
            )));
        }
        let eig = hermitian_eig(&matrix)?;
        if eig.eigenvalues[0] < tol::DENSITY_EIG_FLOOR {
            return Err(CcrError::Validation(format!(
                "density matrix has negative eigenvalue {:.3e}",
                eig.eigenvalues[0]
            )));
        }
        Ok(DensityState {
            matrix,
            qubits: n.trailing_zeros() as usize,
        })
    }

    /// trace(rho * op).
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<f64> {
        expectation(&self.matrix, op)
    }
}

/// Weighted sum of Kronecker products over the inequality's terms.
pub fn build_bell_operator(
    spec: &InequalitySpec,
    assign: &ObservableAssignment,
) -> Result<BellOperator> {
    assign.covers(spec)?;
    let dim = 1usize << spec.party_count;
    let mut matrix = ComplexMatrix::zeros(dim, dim);
    for (x, c) in &spec.terms {
        let factors: Vec<ComplexMatrix> = x
            .iter()
            .enumerate()
            .map(|(p, &xp)| assign.observable(p, xp))
            .collect();
        let term = kron(&factors)?;
        let weight = *c.numer() as f64 / *c.denom() as f64;
        matrix.add_scaled(&term, C64::new(weight, 0.0))?;
    }
    let defect = matrix.hermitian_defect();
    if defect > tol::HERMITIAN {
        return Err(CcrError::Numerical(format!(
            "operator lost Hermiticity: defect {defect:.3e}"
        )));
    }
    Ok(BellOperator {
        matrix,
        spec: spec.clone(),
        assignment: assign.clone(),
    })
}

/// Largest eigenvalue of the operator and its degeneracy (eigenvalues
/// within a relative band of the top).
pub fn quantum_value(spec: &InequalitySpec, assign: &ObservableAssignment) -> Result<(f64, usize)> {
    let op = build_bell_operator(spec, assign)?;
    let eig = hermitian_eig(&op.matrix)?;
    Ok(top_cluster(&eig.eigenvalues))
}

/// (top eigenvalue, multiplicity) from an ascending eigenvalue list.
fn top_cluster(eigenvalues: &[f64]) -> (f64, usize) {
    let top = *eigenvalues.last().expect("non-empty spectrum");
    let norm = eigenvalues
        .iter()
        .fold(0.0f64, |a, &l| a.max(l.abs()));
    let band = tol::DEGENERACY_REL * norm.max(1.0);
    let multiplicity = eigenvalues.iter().filter(|&&l| top - l <= band).count();
    (top, multiplicity)
}

/// Top eigenvalue of the pentagon operator in closed form:
/// 1/4 + sqrt(11/3) cos(theta/3) with theta = arccot(-sqrt(108/1223))
/// taken in (0, pi), i.e. theta = pi/2 + arctan(sqrt(108/1223)).
/// The principal-branch reading arctan(1/sqrt(108/1223))/3 evaluates to
/// about 1.9927 and does not reproduce the operator's spectrum; see the
/// branch test.
pub fn closed_form_quantum_value() -> f64 {
    let u = (108.0f64 / 1223.0).sqrt();
    let theta = std::f64::consts::FRAC_PI_2 + u.atan();
    0.25 + (11.0f64 / 3.0).sqrt() * (theta / 3.0).cos()
}

/// Uniform mixture over the degenerate top eigenspace: P/m where P
/// projects onto the top cluster of multiplicity m. Basis-independent.
pub fn top_eigenspace_mixture(
    spec: &InequalitySpec,
    assign: &ObservableAssignment,
) -> Result<DensityState> {
    let op = build_bell_operator(spec, assign)?;
    let eig = hermitian_eig(&op.matrix)?;
    let (_, multiplicity) = top_cluster(&eig.eigenvalues);
    let n = eig.dim();
    let indices: Vec<usize> = (n - multiplicity..n).collect();
    let projector = eig.eigenspace_projector(&indices);
    DensityState::new(projector.scaled(C64::new(1.0 / multiplicity as f64, 0.0)))
}

/// trace(state . labels[0] x labels[1] x ...).
pub fn pauli_correlation(state: &DensityState, labels: &[PauliLabel]) -> Result<f64> {
    if labels.len() != state.qubits {
        return Err(CcrError::Usage(format!(
            "correlation needs {} labels, got {}",
            state.qubits,
            labels.len()
        )));
    }
    let factors: Vec<ComplexMatrix> = labels.iter().map(|&l| pauli(l)).collect();
    state.expectation(&kron(&factors)?)
}

/// All Pauli strings of odd weight over {X, Y, Z} on a register.
pub fn odd_weight_strings(qubits: usize) -> Vec<Vec<PauliLabel>> {
    let mut out = Vec::new();
    let mut positions = Vec::new();
    for weight in (1..=qubits).step_by(2) {
        positions.clear();
        combinations(qubits, weight, &mut positions, &mut |chosen| {
            let mut labels = vec![vec![PauliLabel::I; qubits]];
            for &pos in chosen {
                let mut next = Vec::with_capacity(labels.len() * 3);
                for base in &labels {
                    for letter in PauliLabel::NONTRIVIAL {
                        let mut s = base.clone();
                        s[pos] = letter;
                        next.push(s);
                    }
                }
                labels = next;
            }
            out.extend(labels);
        });
    }
    out
}

fn combinations(n: usize, k: usize, prefix: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if k == 0 {
        emit(prefix);
        return;
    }
    let start = prefix.last().map_or(0, |&p| p + 1);
    for i in start..=n.saturating_sub(k) {
        prefix.push(i);
        combinations(n, k - 1, prefix, emit);
        prefix.pop();
    }
}

/// Largest odd-weight Pauli correlation magnitude of a state, with the
/// string attaining it.
pub fn odd_correlation_audit(state: &DensityState) -> Result<(f64, Vec<PauliLabel>)> {
    let mut max_abs = 0.0f64;
    let mut worst = vec![PauliLabel::I; state.qubits];
    for labels in odd_weight_strings(state.qubits) {
        let value = pauli_correlation(state, &labels)?.abs();
        if value > max_abs {
            max_abs = value;
            worst = labels;
        }
    }
    Ok((max_abs, worst))
}

/// Success probability of the game at a given operator value q:
/// 1/2 (1 + q / sum |g|).
pub fn success_probability_quantum(spec: &InequalitySpec, q: f64) -> f64 {
    let total = spec.abs_sum();
    let total_f = *total.numer() as f64 / *total.denom() as f64;
    0.5 * (1.0 + q / total_f)
}
