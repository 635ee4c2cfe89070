//! Noncontextual local hidden-variables models and their Monte Carlo estimates.
//!
//! A single qubit with Bloch vector `n` (`|n| <= 1`) is described by a hidden
//! unit vector `lambda`, uniform on the sphere, and the dichotomic response
//! `sign(a . (n + lambda))` with ties resolved to `+1`. Because `a . lambda` is
//! uniform on `[-1, 1]`, the ensemble average of the response is exactly
//! `a . n`. Two-qubit models combine two such responses, fed by the marginal
//! Bloch vectors of the state, with either independent (`Factorized`) or shared
//! (`DeltaCorrelated`) hidden variables.

use rand::Rng;

use crate::criteria::ChshConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{self, map_chunks, McEstimate, Moments};
use crate::quantum::{correlation_tensor, Direction, Setting, TwoQubitState};
use crate::scalar::Scalar;

/// Multiplier on the standard error used for Monte Carlo consistency verdicts.
pub const SIGMA_MULTIPLIER: f64 = 5.0;

/// Bloch vector of a qubit marginal; need not be unit length.
pub type BlochVector<T> = [T; 3];

// Stream family of each estimator.
const RUN_CORRELATION: u64 = 0;
const RUN_CHSH: u64 = 1;
const RUN_LINEARITY_LHS: u64 = 2;
const RUN_LINEARITY_RHS: u64 = 3;
const RUN_CONDITIONAL: u64 = 4;
const RUN_D2_MARGINAL: u64 = 5;

/// Hidden unit vector drawn uniformly from the sphere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HiddenVariable<T>(Direction<T>);

impl<T: Scalar> HiddenVariable<T> {
    pub fn new(lambda: Direction<T>) -> Self {
        Self(lambda)
    }

    pub fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let [x, y, z] = montecarlo::unit_sphere::<T, R>(rng);
        Self(Direction::new(x, y, z).expect("sphere sample is a unit vector"))
    }

    pub fn direction(&self) -> &Direction<T> {
        &self.0
    }
}

/// Outcome of a dichotomic measurement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    #[inline]
    pub fn value(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    #[inline]
    fn from_sign<T: Scalar>(x: T) -> Self {
        if x < T::zero() {
            Outcome::Minus
        } else {
            Outcome::Plus
        }
    }
}

/// `sign(a . (n + lambda))`, with `sign(0) = +1`.
pub fn d2_response<T: Scalar>(
    n: &BlochVector<T>,
    a: &Direction<T>,
    lambda: &HiddenVariable<T>,
) -> Outcome {
    Outcome::from_sign(a.dot_array(n) + a.dot(lambda.direction()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// `rho(l1, l2) = rho1(l1) rho2(l2)`: independent hidden variables.
    Factorized,
    /// `rho(l1) delta(l1 - l2)`: both sides read the same hidden variable.
    DeltaCorrelated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponseRule {
    /// [`d2_response`].
    Sign,
    /// `sign(a . n)`; ignores the hidden variable entirely. Used to exercise diagnostics.
    LambdaBlind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HvModel {
    pub kind: ModelKind,
    pub response: ResponseRule,
}

impl HvModel {
    pub fn factorized() -> Self {
        Self {
            kind: ModelKind::Factorized,
            response: ResponseRule::Sign,
        }
    }

    pub fn delta_correlated() -> Self {
        Self {
            kind: ModelKind::DeltaCorrelated,
            response: ResponseRule::Sign,
        }
    }

    pub fn with_response(self, response: ResponseRule) -> Self {
        Self { response, ..self }
    }

    pub fn respond<T: Scalar>(
        &self,
        n: &BlochVector<T>,
        a: &Direction<T>,
        lambda: &HiddenVariable<T>,
    ) -> Outcome {
        match self.response {
            ResponseRule::Sign => d2_response(n, a, lambda),
            ResponseRule::LambdaBlind => Outcome::from_sign(a.dot_array(n)),
        }
    }

    /// Draws `(lambda1, lambda2)` according to the weight density of the model.
    pub fn draw<T: Scalar, R: Rng + ?Sized>(
        &self,
        rng: &mut R,
    ) -> (HiddenVariable<T>, HiddenVariable<T>) {
        let l1 = HiddenVariable::sample(rng);
        match self.kind {
            ModelKind::Factorized => (l1, HiddenVariable::sample(rng)),
            ModelKind::DeltaCorrelated => (l1, l1),
        }
    }
}

/// Marginal Bloch vectors `(n1, n2)` fed to the two local responses.
pub fn bloch_vectors<T: Scalar>(state: &TwoQubitState<T>) -> (BlochVector<T>, BlochVector<T>) {
    let ct = correlation_tensor(state);
    (ct.m1, ct.m2)
}

fn product_flag<T: Scalar>(state: &TwoQubitState<T>) -> bool {
    state.is_product(T::lit(crate::criteria::DEFAULT_G_TOL))
}

/// Ensemble average of [`d2_response`] over uniform `lambda`; converges to `a . n`.
pub fn d2_marginal<T: Scalar>(
    n: &BlochVector<T>,
    a: &Direction<T>,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    montecarlo::estimate(n_samples, seed, RUN_D2_MARGINAL, |rng| {
        let lambda = HiddenVariable::<T>::sample(rng);
        f64::from(d2_response(n, a, &lambda).value())
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HvRun {
    pub estimate: McEstimate,
    /// `false` when the state is entangled; the marginal-fed model cannot represent it.
    pub product_state: bool,
}

/// Monte Carlo estimate of `integral rho(l1, l2) a(psi, l1) b(psi, l2)`.
pub fn hv_correlation<T: Scalar>(
    model: &HvModel,
    state: &TwoQubitState<T>,
    a: &Direction<T>,
    b: &Direction<T>,
    n_samples: u64,
    seed: u64,
) -> Result<HvRun> {
    let (n1, n2) = bloch_vectors(state);
    let estimate = montecarlo::estimate(n_samples, seed, RUN_CORRELATION, |rng| {
        let (l1, l2) = model.draw::<T, _>(rng);
        f64::from(model.respond(&n1, a, &l1).value() * model.respond(&n2, b, &l2).value())
    })?;
    Ok(HvRun {
        estimate,
        product_state: product_flag(state),
    })
}

/// `a b + a b' + a' b - a' b'` for one draw of dichotomic outcomes; always `+2` or `-2`.
pub fn chsh_combination(a: Outcome, a_prime: Outcome, b: Outcome, b_prime: Outcome) -> i32 {
    let (a, ap, b, bp) = (a.value(), a_prime.value(), b.value(), b_prime.value());
    a * (b + bp) + ap * (b - bp)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HvChshRun {
    pub estimate: McEstimate,
    /// Samples whose combination was `+2`.
    pub plus_two: u64,
    /// Samples whose combination was `-2`.
    pub minus_two: u64,
    pub product_state: bool,
}

/// Samples the CHSH combination draw by draw.
///
/// Panics if a draw ever yields something other than `+-2`.
pub fn hv_chsh<T: Scalar>(
    model: &HvModel,
    state: &TwoQubitState<T>,
    config: &ChshConfig<T>,
    n_samples: u64,
    seed: u64,
) -> Result<HvChshRun> {
    let (n1, n2) = bloch_vectors(state);
    let parts = map_chunks(n_samples, seed, RUN_CHSH, |rng, len| {
        let (mut plus, mut minus) = (0u64, 0u64);
        for _ in 0..len {
            let (l1, l2) = model.draw::<T, _>(rng);
            let v = chsh_combination(
                model.respond(&n1, &config.a, &l1),
                model.respond(&n1, &config.a_prime, &l1),
                model.respond(&n2, &config.b, &l2),
                model.respond(&n2, &config.b_prime, &l2),
            );
            match v {
                2 => plus += 1,
                -2 => minus += 1,
                other => panic!("CHSH combination of dichotomic outcomes was {other}"),
            }
        }
        (plus, minus)
    })?;
    let (plus_two, minus_two) = parts
        .iter()
        .fold((0, 0), |(p, m), (dp, dm)| (p + dp, m + dm));
    let moments = Moments::from_two_point(plus_two, minus_two, 2.0);
    Ok(HvChshRun {
        estimate: moments.estimate(seed),
        plus_two,
        minus_two,
        product_state: product_flag(state),
    })
}

fn check_non_collinear<T: Scalar>(b: &Direction<T>, b_prime: &Direction<T>) -> Result<()> {
    let dot = b.dot(b_prime);
    if dot.abs() >= T::one() - T::lit(1e-9) {
        return Err(Error::Collinear { dot: dot.as_f64() });
    }
    Ok(())
}

/// Certificate that `|b+b'| bt(l) = b(l) + b'(l)` has no dichotomic solution.
#[derive(Clone, Debug, PartialEq)]
pub struct PointwiseFailure<T> {
    /// `|b + b'|`, strictly between 0 and 2 for non-collinear inputs.
    pub norm_sum: T,
    /// Possible values of the left side: `+-|b+b'|`.
    pub lhs_values: [T; 2],
    /// Possible values of the right side.
    pub rhs_values: [T; 3],
    /// Smallest `|lhs - rhs|` over all eight outcome assignments.
    pub margin: T,
    pub unsatisfiable: bool,
}

pub fn pointwise_linearity_failure<T: Scalar>(
    b: &Direction<T>,
    b_prime: &Direction<T>,
) -> Result<PointwiseFailure<T>> {
    check_non_collinear(b, b_prime)?;
    let sum = [
        b.x() + b_prime.x(),
        b.y() + b_prime.y(),
        b.z() + b_prime.z(),
    ];
    let norm_sum = sum.iter().map(|v| *v * *v).sum::<T>().sqrt();
    let two = T::lit(2.0);
    let outcomes = [Outcome::Plus, Outcome::Minus];
    let mut margin = T::infinity();
    for ob in outcomes {
        for obp in outcomes {
            for obt in outcomes {
                let lhs = norm_sum * T::lit(f64::from(obt.value()));
                let rhs = T::lit(f64::from(ob.value() + obp.value()));
                margin = margin.min((lhs - rhs).abs());
            }
        }
    }
    Ok(PointwiseFailure {
        norm_sum,
        lhs_values: [-norm_sum, norm_sum],
        rhs_values: [-two, T::zero(), two],
        margin,
        unsatisfiable: margin > T::zero(),
    })
}

/// Two Monte Carlo estimates that should agree, with their discrepancy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Comparison {
    pub lhs: McEstimate,
    pub rhs: McEstimate,
    pub discrepancy: f64,
    /// `sqrt(se_lhs^2 + se_rhs^2)`.
    pub combined_std_error: f64,
    pub consistent: bool,
}

impl Comparison {
    fn new(lhs: McEstimate, rhs: McEstimate) -> Self {
        let discrepancy = lhs.mean - rhs.mean;
        let combined_std_error = lhs.std_error.hypot(rhs.std_error);
        let slack = (SIGMA_MULTIPLIER * combined_std_error).max(1e-12);
        Self {
            lhs,
            rhs,
            discrepancy,
            combined_std_error,
            consistent: discrepancy.abs() <= slack,
        }
    }
}

/// Compares `<a (b + b')>` with `|b+b'| <a bt>` under a model, `bt = (b+b')/|b+b'|`.
///
/// With `a = Setting::Identity` the first factor is the unit operator.
pub fn ensemble_linearity_check<T: Scalar>(
    model: &HvModel,
    state: &TwoQubitState<T>,
    a: Setting<T>,
    b: &Direction<T>,
    b_prime: &Direction<T>,
    n_samples: u64,
    seed: u64,
) -> Result<Comparison> {
    check_non_collinear(b, b_prime)?;
    let (n1, n2) = bloch_vectors(state);
    let (bx, by, bz) = (
        b.x() + b_prime.x(),
        b.y() + b_prime.y(),
        b.z() + b_prime.z(),
    );
    let norm_sum = (bx * bx + by * by + bz * bz).sqrt();
    let b_tilde = Direction::normalized(bx, by, bz)?;
    let a_value = |l1: &HiddenVariable<T>| match a {
        Setting::Identity => 1,
        Setting::Along(dir) => model.respond(&n1, &dir, l1).value(),
    };

    let lhs = montecarlo::estimate(n_samples, seed, RUN_LINEARITY_LHS, |rng| {
        let (l1, l2) = model.draw::<T, _>(rng);
        let bsum = model.respond(&n2, b, &l2).value() + model.respond(&n2, b_prime, &l2).value();
        f64::from(a_value(&l1) * bsum)
    })?;
    let norm_sum = norm_sum.as_f64();
    let rhs = montecarlo::estimate(n_samples, seed, RUN_LINEARITY_RHS, |rng| {
        let (l1, l2) = model.draw::<T, _>(rng);
        norm_sum * f64::from(a_value(&l1) * model.respond(&n2, &b_tilde, &l2).value())
    })?;
    Ok(Comparison::new(lhs, rhs))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalReport {
    /// Fraction of draws whose `a`-response was `-1`.
    pub acceptance: f64,
    pub accepted: u64,
    /// No draw was accepted, so the conditional density is undefined.
    pub vacuous: bool,
    /// Conditioned vs unconditioned second-side means along x, y, z.
    pub axes: Vec<Comparison>,
}

impl ConditionalReport {
    pub fn consistent(&self) -> bool {
        self.vacuous || self.axes.iter().all(|c| c.consistent)
    }
}

/// Weights the second-side hidden variable by `(1 - a(psi, l1))/2` through rejection
/// and compares the resulting second-side expectations with the unweighted ones.
pub fn conditional_density_demo<T: Scalar>(
    model: &HvModel,
    a: &Direction<T>,
    state: &TwoQubitState<T>,
    n_samples: u64,
    seed: u64,
) -> Result<ConditionalReport> {
    let (n1, n2) = bloch_vectors(state);
    let axes: [Direction<T>; 3] = [Direction::axis(0), Direction::axis(1), Direction::axis(2)];
    let parts = map_chunks(n_samples, seed, RUN_CONDITIONAL, |rng, len| {
        let mut all = [Moments::default(); 3];
        let mut kept = [Moments::default(); 3];
        for _ in 0..len {
            let (l1, l2) = model.draw::<T, _>(rng);
            let accept = model.respond(&n1, a, &l1) == Outcome::Minus;
            for (i, axis) in axes.iter().enumerate() {
                let v = f64::from(model.respond(&n2, axis, &l2).value());
                all[i].push(v);
                if accept {
                    kept[i].push(v);
                }
            }
        }
        (all, kept)
    })?;
    let mut all = [Moments::default(); 3];
    let mut kept = [Moments::default(); 3];
    for (pa, pk) in &parts {
        for i in 0..3 {
            all[i].merge(&pa[i]);
            kept[i].merge(&pk[i]);
        }
    }
    let accepted = kept[0].count;
    let vacuous = accepted == 0;
    let axes = if vacuous {
        Vec::new()
    } else {
        (0..3)
            .map(|i| Comparison::new(kept[i].estimate(seed), all[i].estimate(seed)))
            .collect()
    };
    Ok(ConditionalReport {
        acceptance: accepted as f64 / n_samples as f64,
        accepted,
        vacuous,
        axes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Direction, TwoQubitState};

    fn z() -> Direction {
        Direction::axis(2)
    }

    #[test]
    fn tie_resolves_to_plus() {
        let a = z();
        let lambda = HiddenVariable::new(a.neg());
        assert_eq!(d2_response(&a.to_array(), &a, &lambda), Outcome::Plus);
    }

    #[test]
    fn eigenstate_limit_is_deterministic() {
        let mut rng = montecarlo::chunk_rng(3, 0, 0);
        for _ in 0..10_000 {
            let l = HiddenVariable::<f64>::sample(&mut rng);
            if l.direction().z() > -1.0 {
                assert_eq!(d2_response(&[0.0, 0.0, 1.0], &z(), &l), Outcome::Plus);
            }
        }
    }

    #[test]
    fn chsh_combination_is_pm2() {
        let o = [Outcome::Plus, Outcome::Minus];
        for a in o {
            for ap in o {
                for b in o {
                    for bp in o {
                        assert_eq!(chsh_combination(a, ap, b, bp).abs(), 2);
                    }
                }
            }
        }
    }

    #[test]
    fn zero_samples_is_error() {
        let s = TwoQubitState::from_alpha_squared(1.0).unwrap();
        assert_eq!(
            hv_correlation(&HvModel::factorized(), &s, &z(), &z(), 0, 1),
            Err(Error::NoSamples)
        );
    }

    #[test]
    fn delta_model_identical_settings_perfectly_correlated() {
        let s = TwoQubitState::product_from_bloch(&z(), &z());
        let run = hv_correlation(&HvModel::delta_correlated(), &s, &z(), &z(), 10_000, 8).unwrap();
        assert_eq!(run.estimate.mean, 1.0);
        assert!(run.product_state);
    }

    #[test]
    fn entangled_state_is_flagged() {
        let s = TwoQubitState::from_alpha_squared(0.5).unwrap();
        let run = hv_correlation(&HvModel::factorized(), &s, &z(), &z(), 1000, 8).unwrap();
        assert!(!run.product_state);
    }

    #[test]
    fn pointwise_examples() {
        let x = Direction::axis(0);
        let y = Direction::axis(1);
        let r = pointwise_linearity_failure(&x, &y).unwrap();
        assert!((r.norm_sum - 2f64.sqrt()).abs() < 1e-15);
        assert!(r.unsatisfiable);

        let third = 2.0 * std::f64::consts::FRAC_PI_3;
        let r = pointwise_linearity_failure(&Direction::planar(0.0), &Direction::planar(third))
            .unwrap();
        assert!((r.norm_sum - 1.0).abs() < 1e-12);
        assert!((r.margin - 1.0).abs() < 1e-12);

        assert!(matches!(
            pointwise_linearity_failure(&z(), &z()),
            Err(Error::Collinear { .. })
        ));
        assert!(pointwise_linearity_failure(&z(), &z().neg()).is_err());
    }

    #[test]
    fn lambda_blind_delta_model_reports_discrepancy() {
        let s = TwoQubitState::from_alpha_squared(0.8).unwrap();
        let model = HvModel::delta_correlated().with_response(ResponseRule::LambdaBlind);
        let b = Direction::planar(0.4);
        let bp = Direction::planar(2.0);
        let r =
            ensemble_linearity_check(&model, &s, Setting::Along(z()), &b, &bp, 1000, 2).unwrap();
        // deterministic responses: both sides are exact constants
        assert_eq!(r.combined_std_error, 0.0);
        assert!(!r.consistent);
    }

    #[test]
    fn aligned_conditioning_is_vacuous() {
        let s = TwoQubitState::product_from_bloch(&z(), &Direction::axis(0));
        let r = conditional_density_demo(&HvModel::factorized(), &z(), &s, 50_000, 4).unwrap();
        assert!(r.vacuous);
        assert_eq!(r.accepted, 0);
        assert!(r.consistent());
    }
}
