//! Independent oracles shared by the integration and acceptance tests.
//!
//! Nothing here calls the library's expectation, tensor, SVD or optimizer code:
//! expectations are explicit basis sums over `sigma . n` matrices written out
//! entry by entry, and maxima come from dense grids with local zoom.

#![allow(dead_code)]

use bellbench_core::{Complex64, Direction, TwoQubitState};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform direction by rejection from the cube.
pub fn random_vec3<R: Rng>(rng: &mut R) -> [f64; 3] {
    loop {
        let v = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

pub fn random_direction<R: Rng>(rng: &mut R) -> Direction {
    let [x, y, z] = random_vec3(rng);
    Direction::normalized(x, y, z).unwrap()
}

pub fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}

/// Random pure state from four uniform complex amplitudes, normalized.
pub fn random_state<R: Rng>(rng: &mut R) -> TwoQubitState {
    let amps = std::array::from_fn(|_| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    TwoQubitState::from_amplitudes(amps).unwrap()
}

/// Product of two random single-qubit states with random phases.
pub fn random_product_state<R: Rng>(rng: &mut R) -> TwoQubitState {
    let mut qubit = || {
        let t = rng.random_range(0.0..std::f64::consts::PI);
        let p = random_angle(rng);
        let g = random_angle(rng);
        [
            Complex64::from_polar((t / 2.0).cos(), g),
            Complex64::from_polar((t / 2.0).sin(), g + p),
        ]
    };
    let (u, v) = (qubit(), qubit());
    TwoQubitState::from_amplitudes([u[0] * v[0], u[0] * v[1], u[1] * v[0], u[1] * v[1]]).unwrap()
}

/// `alpha^2` with `alpha beta >= min_ab` for the real family.
pub fn random_alpha_squared<R: Rng>(rng: &mut R, min_ab: f64) -> f64 {
    loop {
        let a2: f64 = rng.random();
        if (a2 * (1.0 - a2)).sqrt() >= min_ab {
            return a2;
        }
    }
}

fn planar(angle: f64) -> [f64; 3] {
    [angle.sin(), 0.0, angle.cos()]
}

/// `sigma . n` written out entry by entry.
pub fn spin_matrix(n: [f64; 3]) -> [[Complex64; 2]; 2] {
    let [x, y, z] = n;
    [
        [Complex64::new(z, 0.0), Complex64::new(x, -y)],
        [Complex64::new(x, y), Complex64::new(-z, 0.0)],
    ]
}

pub fn identity2() -> [[Complex64; 2]; 2] {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    [[one, zero], [zero, one]]
}

/// `(1 + sigma . n) / 2`.
pub fn projector_matrix(n: [f64; 3]) -> [[Complex64; 2]; 2] {
    let s = spin_matrix(n);
    let id = identity2();
    std::array::from_fn(|i| std::array::from_fn(|j| (id[i][j] + s[i][j]) * 0.5))
}

/// `sum_{ijkl} conj(psi_{ik}) A_ij B_kl psi_{jl}` with `psi_{ik}` at index `2i + k`.
pub fn basis_sum(
    amps: &[Complex64; 4],
    left: &[[Complex64; 2]; 2],
    right: &[[Complex64; 2]; 2],
) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..2 {
        for k in 0..2 {
            for j in 0..2 {
                for l in 0..2 {
                    acc += amps[2 * i + k].conj() * left[i][j] * right[k][l] * amps[2 * j + l];
                }
            }
        }
    }
    acc
}

pub fn corr_oracle(state: &TwoQubitState, a: [f64; 3], b: [f64; 3]) -> f64 {
    basis_sum(state.amplitudes(), &spin_matrix(a), &spin_matrix(b)).re
}

pub fn first_marginal_oracle(state: &TwoQubitState, a: [f64; 3]) -> f64 {
    basis_sum(state.amplitudes(), &spin_matrix(a), &identity2()).re
}

pub fn second_marginal_oracle(state: &TwoQubitState, b: [f64; 3]) -> f64 {
    basis_sum(state.amplitudes(), &identity2(), &spin_matrix(b)).re
}

pub fn g_oracle(state: &TwoQubitState, a: [f64; 3], b: [f64; 3]) -> f64 {
    corr_oracle(state, a, b) - first_marginal_oracle(state, a) * second_marginal_oracle(state, b)
}

pub fn chsh_oracle(
    state: &TwoQubitState,
    a: [f64; 3],
    ap: [f64; 3],
    b: [f64; 3],
    bp: [f64; 3],
) -> f64 {
    corr_oracle(state, a, b) + corr_oracle(state, a, bp) + corr_oracle(state, ap, b)
        - corr_oracle(state, ap, bp)
}

/// `E(theta, phi) = -2 alpha beta sin theta sin phi - cos theta cos phi` for the real family.
pub fn closed_form_e(alpha_sq: f64, theta: f64, phi: f64) -> f64 {
    let ab = (alpha_sq * (1.0 - alpha_sq)).sqrt();
    -2.0 * ab * theta.sin() * phi.sin() - theta.cos() * phi.cos()
}

/// `|<B>|` for configuration B on the real family: `sqrt 2 (1 + 2 alpha beta)`.
pub fn config_b_magnitude(alpha_sq: f64) -> f64 {
    let ab = (alpha_sq * (1.0 - alpha_sq)).sqrt();
    std::f64::consts::SQRT_2 * (1.0 + 2.0 * ab)
}

/// Roots of `sqrt 2 (1 + 2 alpha beta) = 2`: `alpha^2 (1 - alpha^2) = ((sqrt 2 - 1)/2)^2`.
pub fn config_b_crossings() -> [f64; 2] {
    let c = ((std::f64::consts::SQRT_2 - 1.0) / 2.0).powi(2);
    let d = (1.0 - 4.0 * c).sqrt();
    [(1.0 - d) / 2.0, (1.0 + d) / 2.0]
}

/// `2 sqrt(1 + 4 alpha^2 beta^2)`: the largest CHSH value for the real family.
pub fn closed_form_max_chsh(alpha_sq: f64) -> f64 {
    2.0 * (1.0 + 4.0 * alpha_sq * (1.0 - alpha_sq)).sqrt()
}

/// `G_ij = g(e_i, e_j)` from basis sums.
pub fn g_matrix_oracle(state: &TwoQubitState) -> [[f64; 3]; 3] {
    let e = |i: usize| {
        let mut v = [0.0; 3];
        v[i] = 1.0;
        v
    };
    std::array::from_fn(|i| std::array::from_fn(|j| g_oracle(state, e(i), e(j))))
}

fn sphere_point(polar: f64, azimuth: f64) -> [f64; 3] {
    [
        polar.sin() * azimuth.cos(),
        polar.sin() * azimuth.sin(),
        polar.cos(),
    ]
}

/// Zooms a 2-parameter grid maximum: each level searches `+-span` around the
/// incumbent with `2 * half + 1` points per axis, then shrinks the span.
fn zoom2<F: Fn(f64, f64) -> f64>(f: F, mut best: (f64, f64), mut span: f64, levels: usize) -> f64 {
    let half = 5i32;
    let mut best_value = f(best.0, best.1);
    for _ in 0..levels {
        let (c0, c1) = best;
        let h = span / f64::from(half);
        for i in -half..=half {
            for j in -half..=half {
                let p = (c0 + f64::from(i) * h, c1 + f64::from(j) * h);
                let v = f(p.0, p.1);
                if v > best_value {
                    best_value = v;
                    best = p;
                }
            }
        }
        span /= 4.0;
    }
    best_value
}

/// `max_{a,b} |a^T G b|`: grid over `a` on the sphere at `step`, exact inner maximum
/// `|G^T a|` over `b` (Cauchy-Schwarz), then local zoom around the best cell.
pub fn max_g_grid_oracle(g: &[[f64; 3]; 3], step: f64) -> f64 {
    let objective = |polar: f64, azimuth: f64| {
        let a = sphere_point(polar, azimuth);
        (0..3)
            .map(|j| (0..3).map(|i| a[i] * g[i][j]).sum::<f64>().powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let n_polar = (std::f64::consts::PI / step).round() as usize;
    let n_az = (std::f64::consts::TAU / step).round() as usize;
    let mut best = (0.0, 0.0);
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..=n_polar {
        for j in 0..n_az {
            let p = (i as f64 * step, j as f64 * step);
            let v = objective(p.0, p.1);
            if v > best_value {
                best_value = v;
                best = p;
            }
        }
    }
    zoom2(objective, best, step, 16)
}

/// Dense-slice CHSH oracle on the x-z plane.
///
/// `(b, b')` runs over a full grid of `step`; for each pair the best planar `a` and `a'`
/// are exact because `<B>` is linear in `a`: `a . v` over `a = (sin t, 0, cos t)` peaks at
/// `sqrt(f(0)^2 + f(pi/2)^2)` where `f(t)` is the bracket evaluated at `a(t)`. The grid
/// optimum is then zoomed to convergence.
pub fn chsh_slice_oracle(state: &TwoQubitState, step: f64) -> f64 {
    let n = (std::f64::consts::TAU / step).round() as usize;
    let phis: Vec<f64> = (0..n).map(|i| i as f64 * step).collect();
    let ez = planar(0.0);
    let ex = planar(std::f64::consts::FRAC_PI_2);
    let ez_row: Vec<f64> = phis
        .iter()
        .map(|&p| corr_oracle(state, ez, planar(p)))
        .collect();
    let ex_row: Vec<f64> = phis
        .iter()
        .map(|&p| corr_oracle(state, ex, planar(p)))
        .collect();
    let cell = |j: usize, l: usize| {
        let plus = (ez_row[j] + ez_row[l]).hypot(ex_row[j] + ex_row[l]);
        let minus = (ez_row[j] - ez_row[l]).hypot(ex_row[j] - ex_row[l]);
        plus + minus
    };
    let mut best = (0usize, 0usize);
    let mut best_value = f64::NEG_INFINITY;
    for j in 0..n {
        for l in 0..n {
            let v = cell(j, l);
            if v > best_value {
                best_value = v;
                best = (j, l);
            }
        }
    }
    let objective = |phi: f64, phi_p: f64| {
        let (b, bp) = (planar(phi), planar(phi_p));
        let f =
            |a: [f64; 3], sign: f64| corr_oracle(state, a, b) + sign * corr_oracle(state, a, bp);
        f(ez, 1.0).hypot(f(ex, 1.0)) + f(ez, -1.0).hypot(f(ex, -1.0))
    };
    zoom2(objective, (phis[best.0], phis[best.1]), step, 16)
}

/// `E[sign(a . (n + lambda))]` over `lambda` uniform on the sphere, by quadrature.
///
/// Coordinates `lambda = (s cos p, s sin p, u)` with `s = sqrt(1 - u^2)`. For each
/// azimuth the sign changes in `u` are roots of a quadratic, so the inner integral over
/// `u` is exact; the outer azimuthal integral uses `n_azimuth` midpoint nodes.
pub fn d2_quadrature(n: [f64; 3], a: [f64; 3], n_azimuth: usize) -> f64 {
    let c: f64 = (0..3).map(|i| a[i] * n[i]).sum();
    let f = |u: f64, rho: f64| c + a[2] * u + rho * (1.0 - u * u).max(0.0).sqrt();
    let mut total = 0.0;
    for k in 0..n_azimuth {
        let p = (k as f64 + 0.5) * std::f64::consts::TAU / n_azimuth as f64;
        let rho = a[0] * p.cos() + a[1] * p.sin();
        let qa = a[2] * a[2] + rho * rho;
        let qb = 2.0 * c * a[2];
        let qc = c * c - rho * rho;
        let mut cuts = vec![-1.0, 1.0];
        if qa > 1e-300 {
            let disc = qb * qb - 4.0 * qa * qc;
            if disc >= 0.0 {
                let r = disc.sqrt();
                for u in [(-qb - r) / (2.0 * qa), (-qb + r) / (2.0 * qa)] {
                    if u > -1.0 && u < 1.0 {
                        cuts.push(u);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let mut inner = 0.0;
        for w in cuts.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let s = if f(mid, rho) >= 0.0 { 1.0 } else { -1.0 };
            inner += s * (w[1] - w[0]);
        }
        total += inner / 2.0;
    }
    total / n_azimuth as f64
}

/// Extrema of `x(u+v) + y(u-v)` on a dense grid over the box.
pub fn four_corner_grid(bounds: [f64; 4], points: usize) -> (f64, f64) {
    let axis = |r: f64| -> Vec<f64> {
        (0..points)
            .map(|i| -r + 2.0 * r * i as f64 / (points - 1) as f64)
            .collect()
    };
    let (xs, ys, us, vs) = (
        axis(bounds[0]),
        axis(bounds[1]),
        axis(bounds[2]),
        axis(bounds[3]),
    );
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &x in &xs {
        for &y in &ys {
            for &u in &us {
                for &v in &vs {
                    let f = x * (u + v) + y * (u - v);
                    lo = lo.min(f);
                    hi = hi.max(f);
                }
            }
        }
    }
    (lo, hi)
}
