//! CHSH functional, covariance criterion `G(a, b)`, and the three-way verdict.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{svd3, Mat3};
use crate::quantum::{
    correlation_tensor, marginal_expectation, pauli_expectation, projector_expectation,
    CorrelationTensor, Direction, Setting, Side, TwoQubitState,
};
use crate::scalar::Scalar;

/// Default threshold for declaring an exactly evaluated `G` to be zero.
pub const DEFAULT_G_TOL: f64 = 1e-10;

/// The named planar configurations `(theta, phi, theta', phi')`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConfigLabel {
    A,
    B,
    C,
}

impl ConfigLabel {
    pub const ALL: [ConfigLabel; 3] = [ConfigLabel::A, ConfigLabel::B, ConfigLabel::C];

    pub fn angles<T: Scalar>(self) -> [T; 4] {
        let pi = T::PI();
        let f = |num: f64, den: f64| pi * T::lit(num) / T::lit(den);
        match self {
            ConfigLabel::A => [f(1.0, 3.0), f(1.0, 8.0), f(1.0, 4.0), f(1.0, 6.0)],
            ConfigLabel::B => [f(1.0, 4.0), f(1.0, 2.0), f(3.0, 4.0), T::zero()],
            ConfigLabel::C => [f(1.0, 6.0), f(3.0, 4.0), pi, T::zero()],
        }
    }

    /// Angle literals as written for humans, e.g. `pi/3,pi/8,pi/4,pi/6`.
    pub fn angle_literals(self) -> &'static str {
        match self {
            ConfigLabel::A => "pi/3,pi/8,pi/4,pi/6",
            ConfigLabel::B => "pi/4,pi/2,3pi/4,0",
            ConfigLabel::C => "pi/6,3pi/4,pi,0",
        }
    }
}

impl fmt::Display for ConfigLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConfigLabel::A => "A",
            ConfigLabel::B => "B",
            ConfigLabel::C => "C",
        };
        f.write_str(s)
    }
}

impl FromStr for ConfigLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A" => Ok(ConfigLabel::A),
            "B" => Ok(ConfigLabel::B),
            "C" => Ok(ConfigLabel::C),
            _ => Err(Error::UnknownConfig(s.to_string())),
        }
    }
}

/// The four measurement directions of `B = a.s (x) (b+b').s + a'.s (x) (b-b').s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChshConfig<T> {
    pub a: Direction<T>,
    pub a_prime: Direction<T>,
    pub b: Direction<T>,
    pub b_prime: Direction<T>,
    planar: Option<[T; 4]>,
}

impl<T: Scalar> ChshConfig<T> {
    pub fn new(
        a: Direction<T>,
        a_prime: Direction<T>,
        b: Direction<T>,
        b_prime: Direction<T>,
    ) -> Self {
        Self {
            a,
            a_prime,
            b,
            b_prime,
            planar: None,
        }
    }

    /// Directions `v(angle) = (sin angle, 0, cos angle)` for `(theta, phi, theta', phi')`.
    pub fn planar(theta: T, phi: T, theta_prime: T, phi_prime: T) -> Self {
        Self {
            a: Direction::planar(theta),
            a_prime: Direction::planar(theta_prime),
            b: Direction::planar(phi),
            b_prime: Direction::planar(phi_prime),
            planar: Some([theta, phi, theta_prime, phi_prime]),
        }
    }

    pub fn named(label: ConfigLabel) -> Self {
        let [t, p, tp, pp] = label.angles();
        Self::planar(t, p, tp, pp)
    }

    /// `(theta, phi, theta', phi')` when built from the planar family.
    pub fn planar_angles(&self) -> Option<[T; 4]> {
        self.planar
    }

    /// The pairs `(a,b), (a,b'), (a',b), (a',b')` in that order.
    pub fn pairs(&self) -> [(Direction<T>, Direction<T>); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// Tsirelson ceiling `2 sqrt 2`.
pub fn tsirelson_bound<T: Scalar>() -> T {
    T::lit(2.0) * T::SQRT_2()
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')` through dense contractions.
///
/// Panics if the result exceeds the Tsirelson bound, which would indicate a
/// broken expectation engine rather than bad input.
pub fn chsh_value<T: Scalar>(state: &TwoQubitState<T>, config: &ChshConfig<T>) -> T {
    let [ab, abp, apb, apbp] = config
        .pairs()
        .map(|(a, b)| pauli_expectation(state, &a, &b));
    let value = ab + abp + apb - apbp;
    assert!(
        value.abs() <= tsirelson_bound::<T>() + T::loose_tol(),
        "CHSH value {value} exceeds the Tsirelson bound"
    );
    value
}

/// Same functional evaluated through a precomputed correlation tensor.
pub fn chsh_from_tensor<T: Scalar>(tensor: &CorrelationTensor<T>, config: &ChshConfig<T>) -> T {
    let [ab, abp, apb, apbp] = config.pairs().map(|(a, b)| tensor.correlation(&a, &b));
    ab + abp + apb - apbp
}

/// `G(a,b) = <a.s (x) b.s> - <a.s (x) 1><1 (x) b.s>`.
pub fn g_value<T: Scalar>(state: &TwoQubitState<T>, a: &Direction<T>, b: &Direction<T>) -> T {
    pauli_expectation(state, a, b)
        - marginal_expectation(state, a, Side::First) * marginal_expectation(state, b, Side::Second)
}

/// `4 [<P(a) (x) P(b)> - <P(a) (x) 1><1 (x) P(b)>]`, equal to `g_value`.
pub fn g_projector_form<T: Scalar>(
    state: &TwoQubitState<T>,
    a: &Direction<T>,
    b: &Direction<T>,
) -> T {
    let joint = projector_expectation(state, Setting::Along(*a), Setting::Along(*b));
    let left = projector_expectation(state, Setting::Along(*a), Setting::Identity);
    let right = projector_expectation(state, Setting::Identity, Setting::Along(*b));
    T::lit(4.0) * (joint - left * right)
}

/// Matrix `G` with `g_value(a, b) = a^T G b`.
pub fn g_tensor<T: Scalar>(state: &TwoQubitState<T>) -> Mat3<T> {
    correlation_tensor(state).covariance()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparabilityVerdict<T> {
    /// Every `G(a, b)` vanishes to within the tolerance.
    pub compatible: bool,
    /// Largest singular value of the `G` matrix, i.e. `max |G(a, b)|`.
    pub max_abs_g: T,
    pub singular_values: [T; 3],
    pub witness_a: Direction<T>,
    pub witness_b: Direction<T>,
}

/// Tests `G(a, b) = 0` for every pair of directions at once.
pub fn separability_test<T: Scalar>(
    state: &TwoQubitState<T>,
    tol: T,
) -> Result<SeparabilityVerdict<T>> {
    if tol.is_nan() || tol <= T::zero() {
        return Err(Error::BadTolerance(tol.as_f64()));
    }
    let svd = svd3(&g_tensor(state));
    let [ux, uy, uz] = svd.u[0];
    let [vx, vy, vz] = svd.v[0];
    Ok(SeparabilityVerdict {
        compatible: svd.values[0] <= tol,
        max_abs_g: svd.values[0],
        singular_values: svd.values,
        witness_a: Direction::normalized(ux, uy, uz)?,
        witness_b: Direction::normalized(vx, vy, vz)?,
    })
}

/// Extrema of `x(u+v) + y(u-v)` over the box `|x| <= |x0|, |y| <= |y0|, |u| <= |u0|, |v| <= |v0|`.
///
/// The form is linear in each variable, so its extrema sit on the 16 corners.
pub fn four_corner_bound<T: Scalar>(
    m1_a: T,
    m1_a_prime: T,
    m2_b: T,
    m2_b_prime: T,
) -> Result<(T, T)> {
    let names = ["m1_a", "m1_a_prime", "m2_b", "m2_b_prime"];
    let inputs = [m1_a, m1_a_prime, m2_b, m2_b_prime];
    for (name, v) in names.into_iter().zip(inputs) {
        if v.is_nan() || v.abs() > T::one() {
            return Err(Error::OutOfRange {
                name,
                value: v.as_f64(),
                lo: -1.0,
                hi: 1.0,
            });
        }
    }
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for mask in 0u8..16 {
        let pick = |bit: u8, v: T| if mask & (1 << bit) == 0 { v } else { -v };
        let x = pick(0, m1_a);
        let y = pick(1, m1_a_prime);
        let u = pick(2, m2_b);
        let v = pick(3, m2_b_prime);
        let f = x * (u + v) + y * (u - v);
        lo = lo.min(f);
        hi = hi.max(f);
    }
    Ok((lo, hi))
}

/// Which description a state/configuration pair is consistent with.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseLabel {
    /// CHSH is violated: only quantum mechanics accounts for the correlations.
    Qm,
    /// CHSH holds but at least one of the four `G` values is nonzero.
    ChshConsistent,
    /// All four `G` values vanish: factorized correlations, local realism passes both tests.
    GConsistent,
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CaseLabel::Qm => "QM",
            CaseLabel::ChshConsistent => "CHSH-consistent",
            CaseLabel::GConsistent => "G-consistent",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriterionVerdict<T> {
    pub chsh_value: T,
    pub chsh_violated: bool,
    pub tsirelson_ok: bool,
    /// `G` on `(a,b), (a,b'), (a',b), (a',b')`.
    pub g_values: [T; 4],
    pub g_zero: bool,
    pub case_label: CaseLabel,
}

impl<T: Scalar> CriterionVerdict<T> {
    pub fn g_max_abs(&self) -> T {
        self.g_values.iter().fold(T::zero(), |m, g| m.max(g.abs()))
    }
}

pub fn classify<T: Scalar>(
    state: &TwoQubitState<T>,
    config: &ChshConfig<T>,
    tol: T,
) -> Result<CriterionVerdict<T>> {
    if tol.is_nan() || tol <= T::zero() {
        return Err(Error::BadTolerance(tol.as_f64()));
    }
    let value = chsh_value(state, config);
    let g_values = config.pairs().map(|(a, b)| g_value(state, &a, &b));
    let chsh_violated = value.abs() > T::lit(2.0) + tol;
    let g_zero = g_values.iter().all(|g| g.abs() <= tol);
    let case_label = if chsh_violated {
        CaseLabel::Qm
    } else if g_zero {
        CaseLabel::GConsistent
    } else {
        CaseLabel::ChshConsistent
    };
    Ok(CriterionVerdict {
        chsh_value: value,
        chsh_violated,
        tsirelson_ok: value.abs() <= tsirelson_bound::<T>() + tol,
        g_values,
        g_zero,
        case_label,
    })
}
