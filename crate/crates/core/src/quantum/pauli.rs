//! Pauli strings and Pauli transfer matrices.
//!
//! Ordering convention: single-qubit letters sort `X < Y < Z < I`, and
//! strings sort lexicographically with qubit 1 as the leading letter. For two
//! qubits this gives `XX, XY, XZ, XI, YX, ..., II`, with the identity last.
//! Qubit 1 is the most significant tensor factor.

use std::fmt;

use nalgebra::{Complex, DMatrix, DVector};

use super::{state::trace_product, DensityMatrix, PureState, UnitaryMatrix};
use crate::error::{Error, Result};
use crate::scalar::{c, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
    I,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::X, Pauli::Y, Pauli::Z, Pauli::I];

    pub fn symbol(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
            Pauli::I => 'I',
        }
    }

    pub fn from_symbol(ch: char) -> Option<Self> {
        match ch.to_ascii_uppercase() {
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            'I' => Some(Pauli::I),
            _ => None,
        }
    }

    pub fn matrix<T: Real>(self) -> DMatrix<Complex<T>> {
        let (a, b, cc, d) = match self {
            Pauli::X => (c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)),
            Pauli::Y => (c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)),
            Pauli::Z => (c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)),
            Pauli::I => (c(1., 0.), c(0., 0.), c(0., 0.), c(1., 0.)),
        };
        DMatrix::from_row_slice(2, 2, &[a, b, cc, d])
    }

    /// Eigenstates with their eigenvalues, `+1` first.
    fn eigenstates<T: Real>(self) -> [(T, [Complex<T>; 2]); 2] {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let one = T::one();
        match self {
            Pauli::X => [(one, [c(h, 0.), c(h, 0.)]), (-one, [c(h, 0.), c(-h, 0.)])],
            Pauli::Y => [(one, [c(h, 0.), c(0., h)]), (-one, [c(h, 0.), c(0., -h)])],
            Pauli::Z => [(one, [c(1., 0.), c(0., 0.)]), (-one, [c(0., 0.), c(1., 0.)])],
            Pauli::I => [(one, [c(1., 0.), c(0., 0.)]), (one, [c(0., 0.), c(1., 0.)])],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::ZeroDimension);
        }
        Ok(Self { letters })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let letters = s
            .chars()
            .map(|ch| Pauli::from_symbol(ch).ok_or_else(|| Error::InvalidPulse(format!("bad Pauli letter '{ch}'"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(letters)
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self {
            letters: vec![Pauli::I; n_qubits],
        }
    }

    /// All `4^n` strings in the fixed ordering.
    pub fn all(n_qubits: usize) -> Vec<Self> {
        (0..4usize.pow(n_qubits as u32))
            .map(|i| Self::from_index(n_qubits, i))
            .collect()
    }

    /// Position of this string in [`PauliString::all`].
    pub fn index(&self) -> usize {
        self.letters.iter().fold(0, |acc, &p| acc * 4 + p as usize)
    }

    pub fn from_index(n_qubits: usize, mut index: usize) -> Self {
        let mut letters = vec![Pauli::I; n_qubits];
        for slot in letters.iter_mut().rev() {
            *slot = Pauli::ALL[index % 4];
            index /= 4;
        }
        Self { letters }
    }

    pub fn n_qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn is_identity(&self) -> bool {
        self.letters.iter().all(|&p| p == Pauli::I)
    }

    pub fn label(&self) -> String {
        self.letters.iter().map(|p| p.symbol()).collect()
    }

    pub fn matrix<T: Real>(&self) -> DMatrix<Complex<T>> {
        let mut m = DMatrix::<Complex<T>>::identity(1, 1);
        for p in &self.letters {
            m = m.kronecker(&p.matrix::<T>());
        }
        m
    }

    /// Signed decomposition into product eigenstates:
    /// `P = sum_s w_s |psi_s><psi_s|` with `w_s = +-1`, `2^n` terms.
    pub fn eigenstate_decomposition<T: Real>(&self) -> Vec<(T, PureState<T>)> {
        let mut terms: Vec<(T, DVector<Complex<T>>)> = vec![(T::one(), DVector::from_element(1, c(1., 0.)))];
        for &p in &self.letters {
            let mut next = Vec::with_capacity(terms.len() * 2);
            for (w, v) in &terms {
                for (sign, amps) in p.eigenstates::<T>() {
                    let factor = DVector::from_column_slice(&amps);
                    next.push((*w * sign, v.kronecker(&factor)));
                }
            }
            terms = next;
        }
        terms
            .into_iter()
            .map(|(w, v)| (w, PureState::normalized(v).expect("product of unit vectors")))
            .collect()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Cached dense matrices of every `n`-qubit Pauli string.
#[derive(Debug, Clone)]
pub struct PauliBasis<T: Real> {
    n_qubits: usize,
    strings: Vec<PauliString>,
    matrices: Vec<DMatrix<Complex<T>>>,
}

impl<T: Real> PauliBasis<T> {
    pub fn new(n_qubits: usize) -> Self {
        let strings = PauliString::all(n_qubits);
        let matrices = strings.iter().map(|s| s.matrix()).collect();
        Self {
            n_qubits,
            strings,
            matrices,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn strings(&self) -> &[PauliString] {
        &self.strings
    }

    pub fn matrix(&self, index: usize) -> &DMatrix<Complex<T>> {
        &self.matrices[index]
    }

    /// Real coefficients `c_i = tr(P_i M) / 2^n` of a Hermitian `M`.
    pub fn coefficients(&self, m: &DMatrix<Complex<T>>) -> DVector<T> {
        let scale = T::one() / T::from_usize(self.dim()).unwrap();
        DVector::from_iterator(
            self.len(),
            self.matrices.iter().map(|p| trace_product(p, m).re * scale),
        )
    }

    /// `sum_i c_i P_i`.
    pub fn synthesize(&self, coefficients: &DVector<T>) -> DMatrix<Complex<T>> {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for (p, &w) in self.matrices.iter().zip(coefficients.iter()) {
            if w != T::zero() {
                m += p * Complex::new(w, T::zero());
            }
        }
        m
    }
}

/// Real `4^n x 4^n` matrix of a channel in the Pauli basis.
///
/// Stored with inputs along columns: `entries[(j, i)]` is the coefficient of
/// output Pauli `j` when the channel acts on input Pauli `i`, so composition
/// of channels is matrix multiplication.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTransferMatrix<T: Real> {
    n_qubits: usize,
    entries: DMatrix<T>,
}

impl<T: Real> PauliTransferMatrix<T> {
    pub fn from_entries(n_qubits: usize, entries: DMatrix<T>) -> Result<Self> {
        let size = 4usize.pow(n_qubits as u32);
        if entries.nrows() != size || entries.ncols() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: entries.nrows(),
            });
        }
        Ok(Self { n_qubits, entries })
    }

    pub fn identity(n_qubits: usize) -> Self {
        let size = 4usize.pow(n_qubits as u32);
        Self {
            n_qubits,
            entries: DMatrix::identity(size, size),
        }
    }

    /// Depolarizing channel `rho -> (1-p) rho + p I/d`.
    pub fn depolarizing(n_qubits: usize, p: T) -> Self {
        let mut ptm = Self::identity(n_qubits);
        let id = PauliString::identity(n_qubits).index();
        for i in 0..ptm.entries.nrows() {
            if i != id {
                ptm.entries[(i, i)] = T::one() - p;
            }
        }
        ptm
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Hilbert-space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &DMatrix<T> {
        &self.entries
    }

    /// Coefficient of output Pauli `output` for input Pauli `input`.
    pub fn coefficient(&self, input: usize, output: usize) -> T {
        self.entries[(output, input)]
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &Self) -> Result<Self> {
        if self.n_qubits != first.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                actual: first.n_qubits,
            });
        }
        Ok(Self {
            n_qubits: self.n_qubits,
            entries: &self.entries * &first.entries,
        })
    }

    /// Applies the channel to an operator through its Pauli expansion.
    pub fn apply(&self, basis: &PauliBasis<T>, rho: &DMatrix<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
        if basis.n_qubits() != self.n_qubits || rho.nrows() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: rho.nrows(),
            });
        }
        let coeffs = basis.coefficients(rho);
        Ok(basis.synthesize(&(&self.entries * coeffs)))
    }

    pub fn apply_to_state(&self, basis: &PauliBasis<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::from_matrix_unchecked(self.apply(basis, rho.matrix())?))
    }

    /// `||R^T R - I||_F`; zero for unitary channels.
    pub fn orthogonality_deviation(&self) -> T {
        let n = self.entries.nrows();
        (self.entries.transpose() * &self.entries - DMatrix::<T>::identity(n, n)).norm()
    }

    pub fn labels(&self) -> Vec<String> {
        PauliString::all(self.n_qubits).iter().map(|s| s.label()).collect()
    }

    /// CSV with a header of Pauli labels; row `i` lists the output
    /// coefficients for input Pauli `i`, columns in the same ordering.
    pub fn to_csv(&self) -> String {
        let mut out = self.labels().join(",");
        out.push('\n');
        for input in 0..self.entries.ncols() {
            let row: Vec<String> = (0..self.entries.nrows())
                .map(|output| format!("{}", self.coefficient(input, output).as_f64()))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Qubit count for a Hilbert-space dimension, if it is a power of two.
pub fn qubit_count(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// `R_ji = tr(P_j U P_i U^dag) / 2^n`.
pub fn ptm_from_unitary<T: Real>(u: &UnitaryMatrix<T>, n_qubits: usize) -> Result<PauliTransferMatrix<T>> {
    let n = qubit_count(u.dim())?;
    if n != n_qubits {
        return Err(Error::DimensionMismatch {
            expected: 1 << n_qubits,
            actual: u.dim(),
        });
    }
    let basis = PauliBasis::<T>::new(n);
    let size = basis.len();
    let mut entries = DMatrix::zeros(size, size);
    for i in 0..size {
        let image = u.matrix() * basis.matrix(i) * u.matrix().adjoint();
        entries.set_column(i, &basis.coefficients(&image));
    }
    Ok(PauliTransferMatrix { n_qubits, entries })
}
