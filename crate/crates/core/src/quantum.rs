//! Dense linear algebra for two-qubit pure states.
//!
//! Basis order is fixed as `(|++>, |+->, |-+>, |-->)` where `|+>`/`|->` are the
//! eigenvectors of sigma_z with eigenvalues +1/-1; the first qubit is the high
//! index bit. Every expectation value is computed by building the full 4x4
//! operator and contracting it against the state vector. Closed forms are kept
//! out of this module on purpose; the test suite uses them as oracles.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A complex amplitude; finite components are enforced wherever one enters a state.
pub type ComplexAmplitude<T> = Complex<T>;

type Mat2<T> = [[Complex<T>; 2]; 2];
type Mat4<T> = [[Complex<T>; 4]; 4];

/// Real unit 3-vector used as a measurement or Bloch direction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Direction<T> {
    x: T,
    y: T,
    z: T,
}

impl<T: Scalar> Direction<T> {
    /// Validates that `(x, y, z)` is already a unit vector.
    pub fn new(x: T, y: T, z: T) -> Result<Self> {
        check_finite(&[x, y, z])?;
        let norm_sq = x * x + y * y + z * z;
        if (norm_sq - T::one()).abs() > T::exact_tol() {
            return Err(Error::NotUnit {
                norm_sq: norm_sq.as_f64(),
            });
        }
        Ok(Self { x, y, z })
    }

    /// Scales `(x, y, z)` onto the unit sphere.
    pub fn normalized(x: T, y: T, z: T) -> Result<Self> {
        check_finite(&[x, y, z])?;
        let norm = (x * x + y * y + z * z).sqrt();
        if norm <= T::min_positive_value() {
            return Err(Error::NotUnit { norm_sq: 0.0 });
        }
        Ok(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// `(sin angle, 0, cos angle)`: the x-z plane family used for the named configurations.
    pub fn planar(angle: T) -> Self {
        Self {
            x: angle.sin(),
            y: T::zero(),
            z: angle.cos(),
        }
    }

    /// Polar angle from +z, azimuth from +x towards +y.
    pub fn spherical(polar: T, azimuth: T) -> Self {
        let s = polar.sin();
        Self {
            x: s * azimuth.cos(),
            y: s * azimuth.sin(),
            z: polar.cos(),
        }
    }

    /// Coordinate axis `i` (0 = x, 1 = y, 2 = z).
    pub fn axis(i: usize) -> Self {
        let mut v = [T::zero(); 3];
        v[i] = T::one();
        Self {
            x: v[0],
            y: v[1],
            z: v[2],
        }
    }

    pub fn x(&self) -> T {
        self.x
    }

    pub fn y(&self) -> T {
        self.y
    }

    pub fn z(&self) -> T {
        self.z
    }

    pub fn to_array(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn dot_array(&self, v: &[T; 3]) -> T {
        self.x * v[0] + self.y * v[1] + self.z * v[2]
    }

    pub fn neg(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    /// Angle between two directions in `[0, pi]`.
    pub fn angle_to(&self, other: &Self) -> T {
        let c = self.dot(other).max(-T::one()).min(T::one());
        c.acos()
    }
}

/// Which tensor factor a single-qubit operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

/// Argument of a projector expectation: the unit operator or `P(a) = (1 + a.sigma)/2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Setting<T> {
    Identity,
    Along(Direction<T>),
}

/// Single-qubit Hermitian operator placed on one tensor factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LocalOp<T> {
    Identity,
    /// `a.sigma`, eigenvalues +1 and -1.
    Spin(Direction<T>),
    /// `(1 + a.sigma)/2`, eigenvalues 1 and 0.
    Projector(Direction<T>),
}

impl<T: Scalar> LocalOp<T> {
    fn matrix(&self) -> Mat2<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let one = Complex::new(T::one(), T::zero());
        match self {
            LocalOp::Identity => [[one, zero], [zero, one]],
            LocalOp::Spin(a) => spin_matrix(a),
            LocalOp::Projector(a) => {
                let half = T::lit(0.5);
                let s = spin_matrix(a);
                let mut p = [[zero; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        let id = if i == j { one } else { zero };
                        p[i][j] = (id + s[i][j]).scale(half);
                    }
                }
                p
            }
        }
    }
}

impl<T: Scalar> From<Setting<T>> for LocalOp<T> {
    fn from(s: Setting<T>) -> Self {
        match s {
            Setting::Identity => LocalOp::Identity,
            Setting::Along(a) => LocalOp::Projector(a),
        }
    }
}

/// `a.sigma = a_x sigma_x + a_y sigma_y + a_z sigma_z` in the sigma_z eigenbasis.
fn spin_matrix<T: Scalar>(a: &Direction<T>) -> Mat2<T> {
    let sigma_x: Mat2<T> = [
        [
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::one(), T::zero()),
        ],
        [
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        ],
    ];
    let sigma_y: Mat2<T> = [
        [
            Complex::new(T::zero(), T::zero()),
            Complex::new(T::zero(), -T::one()),
        ],
        [
            Complex::new(T::zero(), T::one()),
            Complex::new(T::zero(), T::zero()),
        ],
    ];
    let sigma_z: Mat2<T> = [
        [
            Complex::new(T::one(), T::zero()),
            Complex::new(T::zero(), T::zero()),
        ],
        [
            Complex::new(T::zero(), T::zero()),
            Complex::new(-T::one(), T::zero()),
        ],
    ];
    let mut m = [[Complex::new(T::zero(), T::zero()); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] =
                sigma_x[i][j].scale(a.x) + sigma_y[i][j].scale(a.y) + sigma_z[i][j].scale(a.z);
        }
    }
    m
}

fn kron<T: Scalar>(left: &Mat2<T>, right: &Mat2<T>) -> Mat4<T> {
    let mut m = [[Complex::new(T::zero(), T::zero()); 4]; 4];
    for i1 in 0..2 {
        for i2 in 0..2 {
            for j1 in 0..2 {
                for j2 in 0..2 {
                    m[2 * i1 + i2][2 * j1 + j2] = left[i1][j1] * right[i2][j2];
                }
            }
        }
    }
    m
}

fn check_finite<T: Scalar>(values: &[T]) -> Result<()> {
    match values.iter().find(|v| !v.is_finite()) {
        Some(v) => Err(Error::NonFinite(format!("{v}"))),
        None => Ok(()),
    }
}

/// Normalized pure state of two qubits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState<T> {
    amps: [Complex<T>; 4],
}

impl<T: Scalar> TwoQubitState<T> {
    /// Normalizes an arbitrary non-zero amplitude vector.
    pub fn from_amplitudes(amps: [Complex<T>; 4]) -> Result<Self> {
        let flat: Vec<T> = amps.iter().flat_map(|c| [c.re, c.im]).collect();
        check_finite(&flat)?;
        // divide by the largest magnitude before taking the norm
        let scale = amps.iter().map(|c| c.norm()).fold(T::zero(), T::max);
        if scale <= T::zero() {
            return Err(Error::DegenerateState);
        }
        let scaled = amps.map(|c| c.unscale(scale));
        let norm = scaled.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt();
        Ok(Self {
            amps: scaled.map(|c| c.unscale(norm)),
        })
    }

    /// `(alpha |+->  -  beta |-+>) / sqrt(|alpha|^2 + |beta|^2)`.
    pub fn alpha_beta(alpha: Complex<T>, beta: Complex<T>) -> Result<Self> {
        let zero = Complex::new(T::zero(), T::zero());
        Self::from_amplitudes([zero, alpha, -beta, zero])
    }

    /// Real positive member of the `alpha_beta` family with `alpha^2 = alpha_sq`.
    pub fn from_alpha_squared(alpha_sq: T) -> Result<Self> {
        if !(alpha_sq >= T::zero() && alpha_sq <= T::one()) {
            return Err(Error::OutOfRange {
                name: "alpha2",
                value: alpha_sq.as_f64(),
                lo: 0.0,
                hi: 1.0,
            });
        }
        let alpha = alpha_sq.sqrt();
        let beta = (T::one() - alpha_sq).sqrt();
        Self::alpha_beta(
            Complex::new(alpha, T::zero()),
            Complex::new(beta, T::zero()),
        )
    }

    /// Tensor product of two single-qubit states given as `(c_+, c_-)` pairs.
    pub fn product(first: [Complex<T>; 2], second: [Complex<T>; 2]) -> Result<Self> {
        Self::from_amplitudes([
            first[0] * second[0],
            first[0] * second[1],
            first[1] * second[0],
            first[1] * second[1],
        ])
    }

    /// Product state whose marginal Bloch vectors are `n1` and `n2`.
    pub fn product_from_bloch(n1: &Direction<T>, n2: &Direction<T>) -> Self {
        Self::product(qubit_from_bloch(n1), qubit_from_bloch(n2))
            .expect("Bloch-sphere qubit has unit norm")
    }

    pub fn amplitudes(&self) -> &[Complex<T>; 4] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Concurrence below `tol` means the state factorizes.
    pub fn is_product(&self, tol: T) -> bool {
        concurrence(self) <= tol
    }

    /// `<psi| left (x) right |psi>` by dense contraction.
    ///
    /// Panics if the imaginary residue exceeds the exact tolerance, which can
    /// only happen if the operators stopped being Hermitian.
    pub fn expectation(&self, left: LocalOp<T>, right: LocalOp<T>) -> T {
        let m = kron(&left.matrix(), &right.matrix());
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..4 {
            let mut row = Complex::new(T::zero(), T::zero());
            for j in 0..4 {
                row = row + m[i][j] * self.amps[j];
            }
            acc = acc + self.amps[i].conj() * row;
        }
        assert!(
            acc.im.abs() < T::exact_tol(),
            "imaginary residue {} in Hermitian expectation",
            acc.im
        );
        acc.re
    }
}

fn qubit_from_bloch<T: Scalar>(n: &Direction<T>) -> [Complex<T>; 2] {
    let half = T::lit(0.5);
    let polar = n.z().max(-T::one()).min(T::one()).acos();
    let azimuth = n.y().atan2(n.x());
    [
        Complex::new((polar * half).cos(), T::zero()),
        Complex::from_polar((polar * half).sin(), azimuth),
    ]
}

/// `<psi| (a.sigma) (x) (b.sigma) |psi>`.
pub fn pauli_expectation<T: Scalar>(
    state: &TwoQubitState<T>,
    a: &Direction<T>,
    b: &Direction<T>,
) -> T {
    state.expectation(LocalOp::Spin(*a), LocalOp::Spin(*b))
}

/// `<(a.sigma) (x) 1>` or `<1 (x) (a.sigma)>`.
pub fn marginal_expectation<T: Scalar>(
    state: &TwoQubitState<T>,
    a: &Direction<T>,
    side: Side,
) -> T {
    match side {
        Side::First => state.expectation(LocalOp::Spin(*a), LocalOp::Identity),
        Side::Second => state.expectation(LocalOp::Identity, LocalOp::Spin(*a)),
    }
}

/// `<psi| P(a) (x) P(b) |psi>` with `P(a) = (1 + a.sigma)/2`; either side may be the identity.
pub fn projector_expectation<T: Scalar>(
    state: &TwoQubitState<T>,
    a: Setting<T>,
    b: Setting<T>,
) -> T {
    state.expectation(a.into(), b.into())
}

/// All Pauli-axis correlations `T[i][j] = <sigma_i (x) sigma_j>` plus both Bloch vectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrelationTensor<T> {
    pub t: [[T; 3]; 3],
    pub m1: [T; 3],
    pub m2: [T; 3],
}

impl<T: Scalar> CorrelationTensor<T> {
    /// `a^T T b`.
    pub fn correlation(&self, a: &Direction<T>, b: &Direction<T>) -> T {
        let a = a.to_array();
        let b = b.to_array();
        let mut acc = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                acc = acc + a[i] * self.t[i][j] * b[j];
            }
        }
        acc
    }

    /// `T - m1 m2^T`, the matrix of the covariance form `G(a, b)`.
    pub fn covariance(&self) -> [[T; 3]; 3] {
        let mut g = self.t;
        for (i, row) in g.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = *v - self.m1[i] * self.m2[j];
            }
        }
        g
    }

    pub fn max_abs_entry(&self) -> T {
        self.t
            .iter()
            .flatten()
            .chain(self.m1.iter())
            .chain(self.m2.iter())
            .fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

pub fn correlation_tensor<T: Scalar>(state: &TwoQubitState<T>) -> CorrelationTensor<T> {
    let axes = [Direction::axis(0), Direction::axis(1), Direction::axis(2)];
    let mut t = [[T::zero(); 3]; 3];
    for (i, a) in axes.iter().enumerate() {
        for (j, b) in axes.iter().enumerate() {
            t[i][j] = pauli_expectation(state, a, b);
        }
    }
    CorrelationTensor {
        t,
        m1: axes.map(|a| marginal_expectation(state, &a, Side::First)),
        m2: axes.map(|a| marginal_expectation(state, &a, Side::Second)),
    }
}

/// Pure-state concurrence `2|a0 a3 - a1 a2|`.
pub fn concurrence<T: Scalar>(state: &TwoQubitState<T>) -> T {
    let a = state.amplitudes();
    (a[0] * a[3] - a[1] * a[2]).norm() * T::lit(2.0)
}
