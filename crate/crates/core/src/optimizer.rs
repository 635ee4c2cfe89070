//! Measurement-configuration searches.
//!
//! `maximize_chsh` runs a three-level search: a coarse grid at `pi/18`, a
//! local grid at `pi/90` around the coarse winner, then coordinate ascent.
//! Every coordinate enters the CHSH functional through one direction vector,
//! linearly in `(cos x, sin x)`, so each one-dimensional subproblem
//! `C + A cos x + B sin x` is solved exactly from three evaluations.
//!
//! Candidate evaluation uses the correlation tensor (bilinearity); the winning
//! configuration is re-evaluated through the dense expectation engine.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::criteria::{chsh_from_tensor, chsh_value, g_tensor, g_value, ChshConfig};
use crate::linalg::Mat3;
use crate::quantum::{correlation_tensor, CorrelationTensor, Direction, TwoQubitState};
use crate::scalar::Scalar;

pub const MAX_SWEEPS: usize = 200;
/// A sweep improving the objective by less than this ends coordinate ascent.
pub const SWEEP_TOL: f64 = 1e-10;
/// Samples of `alpha^2` used to bracket crossings before bisection.
pub const CROSSING_SCAN_INTERVALS: usize = 1000;
pub const CROSSING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Optimum<T> {
    Chsh(ChshConfig<T>),
    Pair(Direction<T>, Direction<T>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchResult<T> {
    /// Objective re-evaluated on `best` through the dense path.
    pub best_value: T,
    pub best: Optimum<T>,
    /// Best value found by the grid levels alone.
    pub grid_value: T,
    /// Coordinate-ascent sweeps performed.
    pub iterations: usize,
    /// Finest grid spacing used, in radians.
    pub grid_resolution: T,
    pub refined: bool,
}

impl<T: Scalar> SearchResult<T> {
    pub fn config(&self) -> Option<&ChshConfig<T>> {
        match &self.best {
            Optimum::Chsh(c) => Some(c),
            Optimum::Pair(..) => None,
        }
    }

    pub fn pair(&self) -> Option<(Direction<T>, Direction<T>)> {
        match self.best {
            Optimum::Pair(a, b) => Some((a, b)),
            Optimum::Chsh(_) => None,
        }
    }
}

fn grid<T: Scalar>(start: T, step: T, count: usize) -> Vec<T> {
    (0..count)
        .map(|i| start + step * T::lit(i as f64))
        .collect()
}

/// Parallel argmax over `dims`-dimensional grid indices; ties go to the lowest linear index.
fn grid_argmax<T, F>(sizes: &[usize], objective: F) -> (T, Vec<usize>)
where
    T: Scalar,
    F: Fn(&[usize]) -> T + Sync,
{
    let total: usize = sizes.iter().product();
    let unravel = |mut k: usize| {
        let mut idx = vec![0; sizes.len()];
        for d in (0..sizes.len()).rev() {
            idx[d] = k % sizes[d];
            k /= sizes[d];
        }
        idx
    };
    let (value, linear) = (0..total)
        .into_par_iter()
        .map(|k| (objective(&unravel(k)), k))
        .reduce(
            || (T::neg_infinity(), usize::MAX),
            |x, y| match x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal) {
                Ordering::Greater => x,
                Ordering::Less => y,
                Ordering::Equal => {
                    if x.1 <= y.1 {
                        x
                    } else {
                        y
                    }
                }
            },
        );
    (value, unravel(linear))
}

/// Exact maximization of `|f|` over one angle when `f = C + A cos x + B sin x`.
fn trig_line_max<T: Scalar, F: FnMut(T) -> T>(mut f: F) -> (T, T) {
    let f0 = f(T::zero());
    let fpi = f(T::PI());
    let fhalf = f(T::FRAC_PI_2());
    let half = T::lit(0.5);
    let c = (f0 + fpi) * half;
    let a = (f0 - fpi) * half;
    let b = fhalf - c;
    let x = b.atan2(a);
    let r = (a * a + b * b).sqrt();
    if (c + r).abs() >= (c - r).abs() {
        (x, (c + r).abs())
    } else {
        (x + T::PI(), (c - r).abs())
    }
}

/// Coordinate ascent on `|objective(params)|` with exact trigonometric line searches.
fn coordinate_ascent<T: Scalar, F: Fn(&[T]) -> T>(
    params: &mut [T],
    objective: F,
    tol: T,
) -> (T, usize) {
    let mut best = objective(params).abs();
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let before = best;
        for i in 0..params.len() {
            let mut trial = params.to_vec();
            let (x, value) = trig_line_max(|x| {
                trial[i] = x;
                objective(&trial)
            });
            if value > best {
                params[i] = x;
                best = value;
            }
        }
        if best - before < tol {
            break;
        }
    }
    (objective(params).abs(), sweeps)
}

fn planar_config<T: Scalar>(p: &[T]) -> ChshConfig<T> {
    ChshConfig::planar(p[0], p[1], p[2], p[3])
}

fn spherical_config<T: Scalar>(p: &[T]) -> ChshConfig<T> {
    ChshConfig::new(
        Direction::spherical(p[0], p[1]),
        Direction::spherical(p[2], p[3]),
        Direction::spherical(p[4], p[5]),
        Direction::spherical(p[6], p[7]),
    )
}

fn to_spherical<T: Scalar>(d: &Direction<T>) -> [T; 2] {
    let polar = d.z().max(-T::one()).min(T::one()).acos();
    [polar, d.y().atan2(d.x())]
}

fn mat_vec<T: Scalar>(m: &Mat3<T>, v: &[T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| m[i][0] * v[0] + m[i][1] * v[1] + m[i][2] * v[2])
}

fn mat_t_vec<T: Scalar>(m: &Mat3<T>, v: &[T; 3]) -> [T; 3] {
    [0, 1, 2].map(|j| m[0][j] * v[0] + m[1][j] * v[1] + m[2][j] * v[2])
}

fn norm3<T: Scalar>(v: &[T; 3]) -> T {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

/// `|T (b + b')| + |T (b - b')|`: the CHSH value with `a`, `a'` chosen optimally.
fn best_alice_value<T: Scalar>(t: &Mat3<T>, b: &[T; 3], bp: &[T; 3]) -> T {
    let plus = [b[0] + bp[0], b[1] + bp[1], b[2] + bp[2]];
    let minus = [b[0] - bp[0], b[1] - bp[1], b[2] - bp[2]];
    norm3(&mat_vec(t, &plus)) + norm3(&mat_vec(t, &minus))
}

fn best_alice_direction<T: Scalar>(t: &Mat3<T>, c: &[T; 3]) -> Direction<T> {
    let v = mat_vec(t, c);
    Direction::normalized(v[0], v[1], v[2]).unwrap_or_else(|_| Direction::axis(2))
}

/// Maximizes `|<B>|` over measurement configurations.
///
/// With `planar` the directions are restricted to `(sin x, 0, cos x)`.
pub fn maximize_chsh<T: Scalar>(state: &TwoQubitState<T>, planar: bool) -> SearchResult<T> {
    let tensor = correlation_tensor(state);
    if planar {
        maximize_chsh_planar(state, &tensor)
    } else {
        maximize_chsh_general(state, &tensor)
    }
}

fn maximize_chsh_planar<T: Scalar>(
    state: &TwoQubitState<T>,
    tensor: &CorrelationTensor<T>,
) -> SearchResult<T> {
    let pi = T::PI();
    let coarse_step = pi / T::lit(18.0);
    let fine_step = pi / T::lit(90.0);
    let objective = |p: &[T]| chsh_from_tensor(tensor, &planar_config(p));

    let coarse = grid(T::zero(), coarse_step, 36);
    let dirs: Vec<Direction<T>> = coarse.iter().map(|&x| Direction::planar(x)).collect();
    let (_, idx) = grid_argmax(&[36; 4], |i| {
        let cfg = ChshConfig::new(dirs[i[0]], dirs[i[2]], dirs[i[1]], dirs[i[3]]);
        chsh_from_tensor(tensor, &cfg).abs()
    });
    let center = [
        coarse[idx[0]],
        coarse[idx[1]],
        coarse[idx[2]],
        coarse[idx[3]],
    ];

    let offsets = grid(-coarse_step, fine_step, 11);
    let (grid_value, idx) = grid_argmax(&[11; 4], |i| {
        let p = [0, 1, 2, 3].map(|d| center[d] + offsets[i[d]]);
        objective(&p).abs()
    });
    let mut params: Vec<T> = (0..4).map(|d| center[d] + offsets[idx[d]]).collect();

    let (_, sweeps) = coordinate_ascent(&mut params, objective, T::lit(SWEEP_TOL));
    let config = planar_config(&params);
    SearchResult {
        best_value: chsh_value(state, &config).abs(),
        best: Optimum::Chsh(config),
        grid_value,
        iterations: sweeps,
        grid_resolution: fine_step,
        refined: true,
    }
}

fn maximize_chsh_general<T: Scalar>(
    state: &TwoQubitState<T>,
    tensor: &CorrelationTensor<T>,
) -> SearchResult<T> {
    let pi = T::PI();
    let coarse_step = pi / T::lit(18.0);
    let fine_step = pi / T::lit(90.0);
    let t = &tensor.t;

    // coarse sphere grid for b and b'; a and a' follow analytically
    let polar = grid(T::zero(), coarse_step, 19);
    let azimuth = grid(T::zero(), coarse_step, 36);
    let sphere: Vec<[T; 3]> = polar
        .iter()
        .flat_map(|&p| {
            azimuth
                .iter()
                .map(move |&az| Direction::spherical(p, az).to_array())
        })
        .collect();
    let n = sphere.len();
    let (_, idx) = grid_argmax(&[n, n], |i| {
        best_alice_value(t, &sphere[i[0]], &sphere[i[1]])
    });
    let angles_of = |k: usize| [polar[k / azimuth.len()], azimuth[k % azimuth.len()]];
    let [pb, ab] = angles_of(idx[0]);
    let [pbp, abp] = angles_of(idx[1]);
    let center = [pb, ab, pbp, abp];

    let offsets = grid(-coarse_step, fine_step, 11);
    let (grid_value, idx) = grid_argmax(&[11; 4], |i| {
        let p = [0, 1, 2, 3].map(|d| center[d] + offsets[i[d]]);
        let b = Direction::spherical(p[0], p[1]).to_array();
        let bp = Direction::spherical(p[2], p[3]).to_array();
        best_alice_value(t, &b, &bp)
    });
    let bob = [0, 1, 2, 3].map(|d| center[d] + offsets[idx[d]]);
    let b = Direction::spherical(bob[0], bob[1]);
    let bp = Direction::spherical(bob[2], bob[3]);
    let (bv, bpv) = (b.to_array(), bp.to_array());
    let a = best_alice_direction(t, &[bv[0] + bpv[0], bv[1] + bpv[1], bv[2] + bpv[2]]);
    let ap = best_alice_direction(t, &[bv[0] - bpv[0], bv[1] - bpv[1], bv[2] - bpv[2]]);

    let mut params = Vec::with_capacity(8);
    params.extend(to_spherical(&a));
    params.extend(to_spherical(&ap));
    params.extend(bob);
    let objective = |p: &[T]| chsh_from_tensor(tensor, &spherical_config(p));
    let (_, sweeps) = coordinate_ascent(&mut params, objective, T::lit(SWEEP_TOL));
    let config = spherical_config(&params);
    SearchResult {
        best_value: chsh_value(state, &config).abs(),
        best: Optimum::Chsh(config),
        grid_value,
        iterations: sweeps,
        grid_resolution: fine_step,
        refined: true,
    }
}

/// Maximizes `|G(a, b)|` over direction pairs.
///
/// A `pi/90` sphere grid for `b` (with `a` along `G b`) seeds alternating exact
/// block updates `a <- G b / |G b|`, `b <- G^T a / |G^T a|`.
pub fn maximize_g<T: Scalar>(state: &TwoQubitState<T>) -> SearchResult<T> {
    let g = g_tensor(state);
    let step = T::PI() / T::lit(90.0);
    let polar = grid(T::zero(), step, 91);
    let azimuth = grid(T::zero(), step, 180);
    let (grid_value, idx) = grid_argmax(&[polar.len(), azimuth.len()], |i| {
        norm3(&mat_vec(
            &g,
            &Direction::spherical(polar[i[0]], azimuth[i[1]]).to_array(),
        ))
    });
    let mut b = Direction::spherical(polar[idx[0]], azimuth[idx[1]]).to_array();
    let mut a = [T::zero(); 3];
    let mut value = T::zero();
    let mut sweeps = 0;
    let tiny = T::min_positive_value();
    while sweeps < MAX_SWEEPS {
        sweeps += 1;
        let gb = mat_vec(&g, &b);
        let ngb = norm3(&gb);
        if ngb <= tiny {
            break;
        }
        a = gb.map(|x| x / ngb);
        let gta = mat_t_vec(&g, &a);
        let ngta = norm3(&gta);
        b = gta.map(|x| x / ngta);
        let improved = ngta - value;
        value = ngta;
        if improved < T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    let da = Direction::normalized(a[0], a[1], a[2]).unwrap_or_else(|_| Direction::axis(2));
    let db = Direction::normalized(b[0], b[1], b[2]).unwrap_or_else(|_| Direction::axis(2));
    SearchResult {
        best_value: g_value(state, &da, &db).abs(),
        best: Optimum::Pair(da, db),
        grid_value,
        iterations: sweeps,
        grid_resolution: step,
        refined: true,
    }
}

/// Values of `alpha^2` in `[0, 1]` where `|<B>|` crosses `threshold` for the real
/// positive `alpha_beta` family, located by scanning then bisecting to `1e-10`.
pub fn find_crossings<T: Scalar>(config: &ChshConfig<T>, threshold: T) -> Vec<T> {
    let excess = |x: T| {
        let state = TwoQubitState::from_alpha_squared(x).expect("alpha^2 in [0,1]");
        chsh_value(&state, config).abs() - threshold
    };
    let n = CROSSING_SCAN_INTERVALS;
    let xs: Vec<T> = (0..=n).map(|i| T::lit(i as f64 / n as f64)).collect();
    let fs: Vec<T> = xs.par_iter().map(|&x| excess(x)).collect();
    let tol = T::lit(CROSSING_TOL);
    let mut roots = Vec::new();
    for i in 0..n {
        let (mut lo, mut hi) = (xs[i], xs[i + 1]);
        let (mut flo, fhi) = (fs[i], fs[i + 1]);
        if flo == T::zero() {
            roots.push(lo);
            continue;
        }
        if i + 1 == n && fhi == T::zero() {
            roots.push(hi);
            continue;
        }
        if flo.signum() == fhi.signum() || fhi == T::zero() {
            continue;
        }
        while hi - lo > tol {
            let mid = (lo + hi) * T::lit(0.5);
            let fm = excess(mid);
            if fm.signum() == flo.signum() {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        roots.push((lo + hi) * T::lit(0.5));
    }
    roots
}
