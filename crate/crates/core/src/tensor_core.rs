//! Dense complex linear algebra over composite qudit systems.
//!
//! Basis kets `|a1 a2 ... ak>` are stored at the mixed-radix flat index with
//! the first subsystem as the most significant digit, so `|ab>` over dims
//! `[3, 2]` lives at `a * 2 + b`.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result};

/// Largest number of amplitudes (or operator entries) we are willing to store.
pub const MAX_AMPLITUDES: usize = 1_000_000;

/// Relative slack accepted on the norm of user supplied amplitudes.
pub const CONSTRUCTION_TOL: f64 = 1e-8;

/// Tolerance for unitarity and density-matrix validation.
pub const VALIDATION_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Ordered subsystem dimensions of a composite system.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    dims: Vec<usize>,
    strides: Vec<usize>,
    size: usize,
}

impl SubsystemLayout {
    pub fn new(dims: impl Into<Vec<usize>>) -> Result<Self> {
        let dims = dims.into();
        let mut size = 1usize;
        for (index, &d) in dims.iter().enumerate() {
            if d == 0 {
                return Err(Error::ZeroDimension { index });
            }
            size = size
                .checked_mul(d)
                .filter(|&s| s <= MAX_AMPLITUDES)
                .ok_or(Error::TooLarge { size: size.saturating_mul(d), limit: MAX_AMPLITUDES })?;
        }
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self { dims, strides, size })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_subsystems(&self) -> usize {
        self.dims.len()
    }

    /// Total number of amplitudes.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn stride(&self, subsystem: usize) -> usize {
        self.strides[subsystem]
    }

    /// Flat index of the ket with the given digits.
    ///
    /// Panics if the digit count or any digit is out of range.
    pub fn encode(&self, digits: &[usize]) -> usize {
        assert_eq!(digits.len(), self.dims.len(), "digit count does not match layout");
        digits
            .iter()
            .zip(&self.dims)
            .zip(&self.strides)
            .map(|((&a, &d), &s)| {
                assert!(a < d, "digit {a} out of range for dimension {d}");
                a * s
            })
            .sum()
    }

    pub fn decode(&self, mut index: usize) -> Vec<usize> {
        assert!(index < self.size, "flat index {index} out of range");
        let mut digits = vec![0; self.dims.len()];
        for (i, &d) in self.dims.iter().enumerate().rev() {
            digits[i] = index % d;
            index /= d;
        }
        digits
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::new(dims)
    }

    /// Joint dimension of the listed subsystems.
    pub fn joint_dim(&self, subsystems: &[usize]) -> usize {
        subsystems.iter().map(|&s| self.dims[s]).product()
    }

    fn check_selection(&self, targets: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.dims.len()];
        for &t in targets {
            if t >= self.dims.len() {
                return Err(Error::InvalidTargets { targets: targets.to_vec(), reason: "index out of range" });
            }
            if std::mem::replace(&mut seen[t], true) {
                return Err(Error::InvalidTargets { targets: targets.to_vec(), reason: "duplicate index" });
            }
        }
        Ok(())
    }

    fn complement(&self, subsystems: &[usize]) -> Vec<usize> {
        (0..self.dims.len()).filter(|i| !subsystems.contains(i)).collect()
    }

    /// Flat-index offsets of every joint ket of `subsystems`, enumerated in
    /// mixed-radix order of the subsystems as listed (first one most
    /// significant), with all other digits held at zero.
    fn offsets(&self, subsystems: &[usize]) -> Vec<usize> {
        let mut offsets = vec![0usize];
        for &s in subsystems {
            let (d, stride) = (self.dims[s], self.strides[s]);
            offsets = offsets.iter().flat_map(|&base| (0..d).map(move |a| base + a * stride)).collect();
        }
        offsets
    }
}

impl fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.dims)
    }
}

/// Square dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let entries = (0..dim * dim).map(|k| f(k / dim, k % dim)).collect();
        Self { dim, entries }
    }

    /// Builds a matrix from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::NotSquare { dim, rows: bad.len() });
        }
        Ok(Self { dim, entries: rows.concat() })
    }

    /// Real-valued convenience constructor, mostly for fixtures.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> =
            rows.iter().map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn row(&self, row: usize) -> &[Complex64] {
        &self.entries[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex64]> {
        self.entries.chunks(self.dim.max(1)).take(self.dim)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |r, c| self.get(c, r).conj())
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Self {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * other.get(k, c);
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "matrix dimensions differ");
        self.entries.iter().zip(&other.entries).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// True when every row and column holds exactly one entry equal to 1 and
    /// the rest are exactly 0.
    pub fn is_permutation(&self) -> bool {
        let n = self.dim;
        let mut col_hits = vec![0usize; n];
        for r in 0..n {
            let mut row_hits = 0;
            for (&v, hits) in self.row(r).iter().zip(col_hits.iter_mut()) {
                if v == ONE {
                    row_hits += 1;
                    *hits += 1;
                } else if v != ZERO {
                    return false;
                }
            }
            if row_hits != 1 {
                return false;
            }
        }
        col_hits.iter().all(|&h| h == 1)
    }

    fn to_nalgebra(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |r, c| self.get(r, c))
    }
}

/// Normalized pure state over a [`SubsystemLayout`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Validates length and norm (within [`CONSTRUCTION_TOL`]) and then
    /// renormalizes exactly.
    pub fn new(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.size() {
            return Err(Error::LengthMismatch { expected: layout.size(), got: amps.len() });
        }
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        if (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::NotNormalized { norm, tol: CONSTRUCTION_TOL });
        }
        let amps = if norm == 1.0 { amps } else { amps.into_iter().map(|a| a / norm).collect() };
        Ok(Self { layout, amps })
    }

    /// Like [`StateVector::new`] but accepts any nonzero norm.
    pub fn normalized(layout: SubsystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.size() {
            return Err(Error::LengthMismatch { expected: layout.size(), got: amps.len() });
        }
        let norm = amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::ZeroVector);
        }
        Ok(Self { layout, amps: amps.into_iter().map(|a| a / norm).collect() })
    }

    /// Computational basis ket `|digits>`.
    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        if digits.len() != layout.num_subsystems() || digits.iter().zip(layout.dims()).any(|(a, d)| a >= d) {
            return Err(Error::InvalidTargets { targets: digits.to_vec(), reason: "basis digits out of range" });
        }
        let mut amps = vec![ZERO; layout.size()];
        amps[layout.encode(digits)] = ONE;
        Ok(Self { layout, amps })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Complex64 {
        self.amps[self.layout.encode(digits)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    /// `self ⊗ other`, layouts concatenated.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        let amps = self.amps.iter().flat_map(|&a| other.amps.iter().map(move |&b| a * b)).collect();
        Ok(Self { layout, amps })
    }

    /// `<self|other>`, conjugating `self`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.same_layout(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        self.inner(other).map(|z| z.norm_sqr())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> Result<f64> {
        self.same_layout(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Applies `u` to the listed subsystems, identity elsewhere.
    ///
    /// The operator's basis is the mixed-radix order of `targets` as listed,
    /// so `targets = [0, 2]` means `u` is indexed by `|a0 a2>` with `a0` most
    /// significant. Works fiber by fiber without building `u ⊗ I`.
    pub fn apply_on(&self, u: &UnitaryOperator, targets: &[usize]) -> Result<Self> {
        self.layout.check_selection(targets)?;
        let joint = self.layout.joint_dim(targets);
        if u.dim() != joint {
            return Err(Error::DimensionMismatch { operator: u.dim(), targets: joint });
        }
        let fiber = self.layout.offsets(targets);
        let rest = self.layout.offsets(&self.layout.complement(targets));
        let m = u.matrix();
        let mut out = vec![ZERO; self.amps.len()];
        let mut gathered = vec![ZERO; joint];
        for &base in &rest {
            for (g, &off) in gathered.iter_mut().zip(&fiber) {
                *g = self.amps[base + off];
            }
            for (r, &off) in fiber.iter().enumerate() {
                out[base + off] = m.row(r).iter().zip(&gathered).map(|(x, y)| x * y).sum();
            }
        }
        Ok(Self { layout: self.layout.clone(), amps: out })
    }

    /// Reduced density matrix of `keep` (in the listed order), tracing out
    /// every other subsystem.
    pub fn reduce(&self, keep: &[usize]) -> Result<DensityMatrix> {
        self.layout.check_selection(keep)?;
        let kept = self.layout.offsets(keep);
        let rest = self.layout.offsets(&self.layout.complement(keep));
        let n = kept.len();
        let mut rho = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let v: Complex64 =
                    rest.iter().map(|&base| self.amps[base + kept[i]] * self.amps[base + kept[j]].conj()).sum();
                rho.set(i, j, v);
                rho.set(j, i, v.conj());
            }
        }
        DensityMatrix::new(rho)
    }

    /// Reorders subsystems: subsystem `order[k]` of `self` becomes subsystem
    /// `k` of the result.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        self.layout.check_selection(order)?;
        if order.len() != self.layout.num_subsystems() {
            return Err(Error::InvalidTargets {
                targets: order.to_vec(),
                reason: "not a permutation of all subsystems",
            });
        }
        let dims: Vec<usize> = order.iter().map(|&s| self.layout.dims()[s]).collect();
        let layout = SubsystemLayout::new(dims)?;
        let source = self.layout.offsets(order);
        let amps = source.iter().map(|&i| self.amps[i]).collect();
        Ok(Self { layout, amps })
    }

    /// Drops `subsystem`, which must be in the basis state `|value>` up to
    /// [`VALIDATION_TOL`] of leaked weight. The remaining subsystems keep
    /// their order.
    pub fn discard_basis_factor(&self, subsystem: usize, value: usize) -> Result<Self> {
        self.layout.check_selection(&[subsystem])?;
        if value >= self.layout.dims()[subsystem] {
            return Err(Error::NotProductFactor { subsystem, value });
        }
        let rest_subsystems = self.layout.complement(&[subsystem]);
        let layout = SubsystemLayout::new(rest_subsystems.iter().map(|&s| self.layout.dims()[s]).collect::<Vec<_>>())?;
        let shift = value * self.layout.stride(subsystem);
        let amps: Vec<Complex64> =
            self.layout.offsets(&rest_subsystems).iter().map(|&i| self.amps[i + shift]).collect();
        let kept = amps.iter().map(Complex64::norm_sqr).sum::<f64>();
        if (1.0 - kept).abs() > VALIDATION_TOL {
            return Err(Error::NotProductFactor { subsystem, value });
        }
        Self::normalized(layout, amps)
    }

    fn same_layout(&self, other: &StateVector) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::LayoutMismatch {
                left: self.layout.dims().to_vec(),
                right: other.layout.dims().to_vec(),
            });
        }
        Ok(())
    }
}

/// Square complex matrix with `U^dag U = I` checked at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    matrix: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let size = matrix.dim().saturating_mul(matrix.dim());
        if size > MAX_AMPLITUDES {
            return Err(Error::TooLarge { size, limit: MAX_AMPLITUDES });
        }
        let deviation = matrix.adjoint().matmul(&matrix).max_abs_diff(&ComplexMatrix::identity(matrix.dim()));
        if deviation > VALIDATION_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(dim) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &UnitaryOperator) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch { operator: self.dim(), targets: other.dim() });
        }
        Self::new(self.matrix.matmul(&other.matrix))
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let hermitian_dev = matrix.max_abs_diff(&matrix.adjoint());
        if hermitian_dev > VALIDATION_TOL {
            return Err(Error::NotDensityMatrix(format!("not Hermitian (deviation {hermitian_dev:e})")));
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > VALIDATION_TOL {
            return Err(Error::NotDensityMatrix(format!("trace is {trace}")));
        }
        let mut eigenvalues: Vec<f64> = matrix.to_nalgebra().symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        if let Some(&min) = eigenvalues.last() {
            if min < -VALIDATION_TOL {
                return Err(Error::NotDensityMatrix(format!("negative eigenvalue {min:e}")));
            }
        }
        Ok(Self { matrix, eigenvalues })
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        self.matrix.entries.iter().map(Complex64::norm_sqr).sum()
    }
}
