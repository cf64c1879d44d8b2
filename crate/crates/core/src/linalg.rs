//! Exact complex linear algebra on the two- and four-dimensional spaces of
//! the experiment.
//!
//! Basis conventions are fixed crate-wide:
//!
//! * path factor: `(|↑⟩ₚ, |↓⟩ₚ)`, i.e. the two interferometer arms ψ₁, ψ₂;
//! * spin factor: `(|↑⟩_z, |↓⟩_z)`;
//! * product space: `(|↑ₚ↑_z⟩, |↑ₚ↓_z⟩, |↓ₚ↑_z⟩, |↓ₚ↓_z⟩)`, path index major.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Cx = Complex64;

/// Norm tolerance applied when a state is constructed.
pub const NORM_TOL_CONSTRUCT: f64 = 1e-12;
/// Norm tolerance applied as an operation precondition.
pub const NORM_TOL_OP: f64 = 1e-9;
pub const HERMITIAN_TOL: f64 = 1e-12;
pub const DICHOTOMIC_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated in an expectation value.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

const ZERO: Cx = Cx::new(0.0, 0.0);
const ONE: Cx = Cx::new(1.0, 0.0);

fn all_finite(values: &[Cx]) -> bool {
    values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Column vector of complex amplitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ket<const N: usize>([Cx; N]);

pub type Vec2 = Ket<2>;
pub type Vec4 = Ket<4>;

impl<const N: usize> Ket<N> {
    pub fn new(amplitudes: [Cx; N]) -> Result<Self> {
        if !all_finite(&amplitudes) {
            return Err(Error::NonFinite("ket"));
        }
        Ok(Self(amplitudes))
    }

    /// Builds a ket that must already be normalized to within
    /// [`NORM_TOL_CONSTRUCT`].
    pub fn normalized(amplitudes: [Cx; N]) -> Result<Self> {
        let ket = Self::new(amplitudes)?;
        let norm_sqr = ket.norm_sqr();
        if (norm_sqr - 1.0).abs() > NORM_TOL_CONSTRUCT {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(ket)
    }

    pub fn from_real(amplitudes: [f64; N]) -> Result<Self> {
        Self::new(amplitudes.map(|x| Cx::new(x, 0.0)))
    }

    pub fn amplitudes(&self) -> &[Cx; N] {
        &self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &Self) -> Cx {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn ensure_normalized(&self, tol: f64) -> Result<()> {
        let norm_sqr = self.norm_sqr();
        if (norm_sqr - 1.0).abs() > tol {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(())
    }

    /// Outer product `|self⟩⟨self|`.
    pub fn projector(&self) -> Mat<N> {
        let mut m = Mat::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[i] * self.0[j].conj();
            }
        }
        m
    }
}

/// Dense square complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat<const N: usize>([[Cx; N]; N]);

pub type Mat2 = Mat<2>;
pub type Mat4 = Mat<4>;

impl<const N: usize> Mat<N> {
    pub fn zero() -> Self {
        Self([[ZERO; N]; N])
    }

    pub fn identity() -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            m.0[i][i] = ONE;
        }
        m
    }

    pub fn from_rows(rows: [[Cx; N]; N]) -> Self {
        Self(rows)
    }

    pub fn from_real(rows: [[f64; N]; N]) -> Self {
        Self(rows.map(|row| row.map(|x| Cx::new(x, 0.0))))
    }

    pub fn diag(entries: [f64; N]) -> Self {
        let mut m = Self::zero();
        for (i, x) in entries.into_iter().enumerate() {
            m.0[i][i] = Cx::new(x, 0.0);
        }
        m
    }

    pub fn rows(&self) -> &[[Cx; N]; N] {
        &self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Cx {
        self.0[row][col]
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = self.0[j][i].conj();
            }
        }
        m
    }

    pub fn scale(&self, k: Cx) -> Self {
        Self(self.0.map(|row| row.map(|x| x * k)))
    }

    pub fn apply(&self, ket: &Ket<N>) -> Ket<N> {
        let mut out = [ZERO; N];
        for (i, out_i) in out.iter_mut().enumerate() {
            *out_i = (0..N).map(|j| self.0[i][j] * ket.0[j]).sum();
        }
        Ket(out)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((self.0[i][j] - other.0[i][j]).norm());
            }
        }
        worst
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn trace(&self) -> Cx {
        (0..N).map(|i| self.0[i][i]).sum()
    }

    fn is_finite(&self) -> bool {
        self.0.iter().all(|row| all_finite(row))
    }
}

impl<const N: usize> Add for Mat<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] += rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Sub for Mat<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut m = self;
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] -= rhs.0[i][j];
            }
        }
        m
    }
}

impl<const N: usize> Mul for Mat<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut m = Self::zero();
        for i in 0..N {
            for j in 0..N {
                m.0[i][j] = (0..N).map(|k| self.0[i][k] * rhs.0[k][j]).sum();
            }
        }
        m
    }
}

/// Kronecker product of two 2×2 matrices in the path-major product basis.
pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
    let mut m = Mat4::zero();
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m.0[2 * i + k][2 * j + l] = a.0[i][j] * b.0[k][l];
                }
            }
        }
    }
    m
}

/// Hermitian matrix. Construction checks `M = M†` to [`HERMITIAN_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Herm<const N: usize>(Mat<N>);

pub type Herm2 = Herm<2>;
pub type Herm4 = Herm<4>;

impl<const N: usize> Herm<N> {
    pub fn new(m: Mat<N>) -> Result<Self> {
        if !m.is_finite() {
            return Err(Error::NonFinite("matrix"));
        }
        let deviation = m.max_abs_diff(&m.adjoint());
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(m))
    }

    pub fn identity() -> Self {
        Self(Mat::identity())
    }

    pub fn matrix(&self) -> &Mat<N> {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.scale(Cx::new(-1.0, 0.0)))
    }

    /// Max deviation of `self²` from the identity.
    pub fn dichotomic_deviation(&self) -> f64 {
        (self.0 * self.0).max_abs_diff(&Mat::identity())
    }
}

pub fn sigma_x() -> Herm2 {
    Herm(Mat2::from_real([[0.0, 1.0], [1.0, 0.0]]))
}

pub fn sigma_y() -> Herm2 {
    Herm(Mat2::from_rows([
        [ZERO, Cx::new(0.0, -1.0)],
        [Cx::new(0.0, 1.0), ZERO],
    ]))
}

pub fn sigma_z() -> Herm2 {
    Herm(Mat2::diag([1.0, -1.0]))
}

/// `a ⊗ b` with `a` acting on the path factor and `b` on the spin factor.
pub fn tensor(path_op: &Herm2, spin_op: &Herm2) -> Herm4 {
    // Kronecker products of Hermitian matrices are Hermitian.
    Herm(kron(&path_op.0, &spin_op.0))
}

/// `⟨ψ|M|ψ⟩` for a normalized state.
///
/// Rejects states whose norm² deviates from one by more than
/// [`NORM_TOL_OP`]; the imaginary part is checked against
/// [`IMAG_RESIDUE_TOL`] and dropped.
pub fn expectation<const N: usize>(state: &Ket<N>, op: &Herm<N>) -> Result<f64> {
    state.ensure_normalized(NORM_TOL_OP)?;
    let value = state.inner(&op.0.apply(state));
    if value.im.abs() > IMAG_RESIDUE_TOL {
        return Err(Error::ImaginaryExpectation { residue: value.im });
    }
    Ok(value.re)
}

/// Spectral projectors `(P₊, P₋)` of a dichotomic operator, so that
/// `P₊ + P₋ = I` and `P₊ − P₋ = op`.
pub fn projectors_of(op: &Herm2) -> Result<(Herm2, Herm2)> {
    let deviation = op.dichotomic_deviation();
    if deviation > DICHOTOMIC_TOL {
        return Err(Error::NotDichotomic { deviation });
    }
    let half = Cx::new(0.5, 0.0);
    let id = Mat2::identity();
    let plus = (id + op.0).scale(half);
    let minus = (id - op.0).scale(half);
    Ok((Herm(plus), Herm(minus)))
}
