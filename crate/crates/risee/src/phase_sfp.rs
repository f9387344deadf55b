//! Phase-shift optimization for fixed powers by sequential fractional
//! programming (majorization-minimization) with a closed-form per-iteration
//! minimizer.
//!
//! Each iteration replaces the quadratic objective `x^H A x` with the
//! surrogate obtained from `M = lambda_max I >= A`:
//!
//! ```text
//! f(y | y_t) = y^H M y - 2 Re(y^H (M - A) y_t) + y_t^H (M - A) y_t
//! ```
//!
//! which upper-bounds the objective everywhere, touches it at the anchor
//! `y_t`, and shares its gradient there. Over unit-modulus entries the
//! minimizer aligns each phase with `c = (M - A) y_t`, so every iteration
//! is a closed-form update and the objective sequence is non-increasing.

use crate::linalg::CVector;
use crate::phase_gradient::PhaseOptim;
use crate::quadratic::PhaseQuadratic;
use crate::types::{ChannelRealization, PhaseProfile, PowerAllocation, Result};

/// One majorization step: the frozen pieces of the surrogate at an anchor.
#[derive(Debug, Clone)]
pub struct SurrogateModel {
    /// Largest eigenvalue of the full quadratic form.
    pub lambda_max: f64,
    /// Alignment vector `(lambda_max I - A) y_t` restricted to the
    /// diagonal support, length N.
    pub c: CVector,
    /// The anchor phases `y_t` was derived from.
    pub anchor: PhaseProfile,
    anchor_objective: f64,
}

impl SurrogateModel {
    pub fn build(quad: &PhaseQuadratic, anchor: &PhaseProfile) -> Self {
        let x = PhaseQuadratic::support_vector(anchor);
        let ax = quad.atilde() * &x;
        let lambda = quad.lambda_max();
        let c = CVector::from_iterator(
            x.len(),
            x.iter().zip(ax.iter()).map(|(xi, axi)| xi * lambda - axi),
        );
        SurrogateModel {
            lambda_max: lambda,
            c,
            anchor: anchor.clone(),
            anchor_objective: quad.value_of(&x),
        }
    }

    /// Surrogate value at arbitrary phases. Equals the true objective at
    /// the anchor and upper-bounds it everywhere else.
    pub fn value(&self, phases: &PhaseProfile) -> f64 {
        let x = PhaseQuadratic::support_vector(phases);
        let n = x.len() as f64;
        let cross = x.dotc(&self.c).re; // Re(x^H c)
        2.0 * self.lambda_max * n - self.anchor_objective - 2.0 * cross
    }

    /// Closed-form minimizer of the surrogate over the feasible phases:
    /// each support entry aligns with `c`, `x_n = c_n / |c_n|`, i.e.
    /// `theta_n = -arg(c_n)`. A (numerically) zero `c_n` leaves that
    /// element at the anchor's phase, since any phase is optimal for it;
    /// the cutoff is relative to `lambda_max`, which sets the scale of `c`.
    pub fn minimize(&self) -> PhaseProfile {
        let cutoff = 1e-13 * self.lambda_max.max(f64::MIN_POSITIVE);
        let angles: Vec<f64> = self
            .c
            .iter()
            .zip(self.anchor.angles())
            .map(|(cn, &anchor_angle)| {
                if cn.norm() <= cutoff {
                    anchor_angle
                } else {
                    -cn.arg()
                }
            })
            .collect();
        PhaseProfile::new(angles)
    }
}

/// Largest eigenvalue of the full quadratic form for this draw and power
/// allocation, via the singular-value product of the Kronecker factors.
pub fn lambda_max(ch: &ChannelRealization, powers: &PowerAllocation) -> Result<f64> {
    Ok(PhaseQuadratic::new(ch, powers)?.lambda_max())
}

/// One majorization-minimization update from `anchor`.
pub fn sfp_update(model: &SurrogateModel) -> PhaseProfile {
    model.minimize()
}

/// Minimize the required BS power over the surface phases by iterating
/// closed-form surrogate minimizations from `theta0`.
///
/// Stops when the squared change of the reflection matrix falls below
/// `epsilon` or after `max_iters` iterations. The objective sequence is
/// non-increasing; the best iterate found is returned.
pub fn optimize_phases_sfp(
    theta0: &PhaseProfile,
    powers: &PowerAllocation,
    ch: &ChannelRealization,
    epsilon: f64,
    max_iters: usize,
) -> Result<PhaseOptim> {
    let quad = PhaseQuadratic::new(ch, powers)?;
    optimize_with_quadratic(&quad, theta0, epsilon, max_iters)
}

pub(crate) fn optimize_with_quadratic(
    quad: &PhaseQuadratic,
    theta0: &PhaseProfile,
    epsilon: f64,
    max_iters: usize,
) -> Result<PhaseOptim> {
    let mut theta = theta0.clone();
    let mut objective = quad.value(&theta);
    let mut best = (objective, theta.clone());
    let mut iterations = 0;

    for _ in 0..max_iters {
        let model = SurrogateModel::build(quad, &theta);
        let next = model.minimize();
        let next_objective = quad.value(&next);
        debug_assert!(next_objective <= objective + 1e-12 * objective.abs().max(1.0));

        let change = next.reflection_distance_sq(&theta);
        theta = next;
        objective = next_objective;
        iterations += 1;
        if objective < best.0 {
            best = (objective, theta.clone());
        }
        if change < epsilon {
            break;
        }
    }

    Ok(PhaseOptim {
        phases: best.1,
        objective: best.0,
        iterations,
        stalled: false,
    })
}

/// Surrogate-alignment vector as a plain function of the inputs.
pub fn surrogate_alignment(
    ch: &ChannelRealization,
    powers: &PowerAllocation,
    anchor: &PhaseProfile,
) -> Result<CVector> {
    let quad = PhaseQuadratic::new(ch, powers)?;
    Ok(SurrogateModel::build(&quad, anchor).c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::generate_channels;
    use crate::linalg::{CMatrix, C64};
    use crate::quadratic::objective_f;
    use crate::types::{Rect, SystemConfig};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn unit_config(m: usize, k: usize, n: usize) -> SystemConfig {
        let mut c = SystemConfig::outdoor(m, k, n);
        c.pathloss_ref = 1.0;
        c.pathloss_exp = 0.0;
        c.user_region = Rect::new(0.0, 10.0, 0.0, 10.0);
        c
    }

    fn random_setup(seed: u64, n: usize, m: usize) -> (ChannelRealization, PowerAllocation) {
        let c = unit_config(m, n, n);
        let ch = generate_channels(&c, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5f9);
        let p = PowerAllocation::new((0..n).map(|_| rng.gen_range(0.2..3.0)).collect());
        (ch, p)
    }

    fn random_phases(rng: &mut ChaCha8Rng, n: usize) -> PhaseProfile {
        PhaseProfile::new((0..n).map(|_| rng.gen_range(0.0..TAU)).collect())
    }

    #[test]
    fn surrogate_is_tight_at_anchor() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..10u64 {
            let (ch, p) = random_setup(seed, 3, 6);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let anchor = random_phases(&mut rng, 3);
            let model = SurrogateModel::build(&quad, &anchor);
            let f = model.value(&anchor);
            let obj = quad.value(&anchor);
            assert!((f - obj).abs() <= 1e-10 * obj.max(1.0), "{f} vs {obj}");
        }
    }

    #[test]
    fn surrogate_upper_bounds_objective_everywhere() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..5u64 {
            let (ch, p) = random_setup(seed + 20, 3, 6);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let anchor = random_phases(&mut rng, 3);
            let model = SurrogateModel::build(&quad, &anchor);
            for _ in 0..1000 {
                let y = random_phases(&mut rng, 3);
                let gap = model.value(&y) - quad.value(&y);
                assert!(gap >= -1e-10, "majorization violated by {gap}");
            }
        }
    }

    #[test]
    fn surrogate_gradient_matches_objective_at_anchor() {
        // directional derivatives of surrogate and objective agree at the
        // anchor (the third majorization condition), checked by central
        // differences along random directions
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = 1e-6;
        for seed in 0..10u64 {
            let (ch, p) = random_setup(seed + 40, 3, 6);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let anchor = random_phases(&mut rng, 3);
            let model = SurrogateModel::build(&quad, &anchor);
            let dir: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let shift = |b: f64| {
                PhaseProfile::new(
                    anchor
                        .angles()
                        .iter()
                        .zip(&dir)
                        .map(|(t, d)| t + b * d)
                        .collect::<Vec<_>>(),
                )
            };
            let df = (model.value(&shift(h)) - model.value(&shift(-h))) / (2.0 * h);
            let dofj = (quad.value(&shift(h)) - quad.value(&shift(-h))) / (2.0 * h);
            let scale = dofj.abs().max(quad.value(&anchor)).max(1e-12);
            assert!((df - dofj).abs() / scale < 1e-4, "{df} vs {dofj}");
        }
    }

    #[test]
    fn degenerate_majorizer_touches_everywhere() {
        // identity channels make the full form a multiple of the identity,
        // so the surrogate equals the objective for every feasible point
        let ch = ChannelRealization {
            h1: CMatrix::identity(2, 2),
            h2: CMatrix::identity(2, 2),
            user_positions: vec![[0.0, 0.0]; 2],
        };
        let p = PowerAllocation::new(vec![1.0, 1.0]);
        let quad = PhaseQuadratic::new(&ch, &p).unwrap();
        let model = SurrogateModel::build(&quad, &PhaseProfile::new(vec![0.4, 1.9]));
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let y = random_phases(&mut rng, 2);
            assert!((model.value(&y) - quad.value(&y)).abs() < 1e-10);
        }
        // all c entries are zero, so the anchor is kept verbatim
        let kept = model.minimize();
        assert_eq!(kept.angles(), model.anchor.angles());
    }

    #[test]
    fn update_aligns_with_real_positive_c() {
        let model = SurrogateModel {
            lambda_max: 1.0,
            c: CVector::from_vec(vec![C64::new(2.0, 0.0), C64::new(0.5, 0.0)]),
            anchor: PhaseProfile::uniform(2, 1.0),
            anchor_objective: 0.0,
        };
        let out = model.minimize();
        for &t in out.angles() {
            assert!(t.abs() < 1e-15);
        }
    }

    #[test]
    fn update_beats_a_fine_surrogate_grid() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for seed in 0..4u64 {
            let (ch, p) = random_setup(seed + 60, 2, 4);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let anchor = random_phases(&mut rng, 2);
            let model = SurrogateModel::build(&quad, &anchor);
            let closed = model.value(&model.minimize());

            let points = 721;
            let mut grid_best = f64::INFINITY;
            for i in 0..points {
                for j in 0..points {
                    let t = PhaseProfile::new(vec![
                        i as f64 * TAU / points as f64,
                        j as f64 * TAU / points as f64,
                    ]);
                    grid_best = grid_best.min(model.value(&t));
                }
            }
            assert!(
                closed <= grid_best + 1e-6 * (1.0 + grid_best.abs()),
                "closed {closed} vs grid {grid_best}"
            );
        }
    }

    #[test]
    fn objective_never_increases_across_iterations() {
        for seed in 0..10u64 {
            let (ch, p) = random_setup(seed, 3, 6);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let mut theta = PhaseProfile::uniform(3, std::f64::consts::FRAC_PI_2);
            let mut prev = quad.value(&theta);
            for _ in 0..30 {
                let model = SurrogateModel::build(&quad, &theta);
                theta = model.minimize();
                let v = quad.value(&theta);
                assert!(v <= prev + 1e-12 * prev.max(1.0));
                prev = v;
            }
        }
    }

    #[test]
    fn converges_near_gradient_stationarity() {
        for seed in 0..10u64 {
            let (ch, p) = random_setup(seed + 80, 3, 6);
            let out = optimize_phases_sfp(
                &PhaseProfile::uniform(3, std::f64::consts::FRAC_PI_2),
                &p,
                &ch,
                1e-14,
                2000,
            )
            .unwrap();
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let g = quad.gradient(&out.phases);
            assert!(
                g.norm() < 1e-3 * out.objective.max(1.0),
                "seed {seed}: gradient norm {} at objective {}",
                g.norm(),
                out.objective
            );
        }
    }

    #[test]
    fn matches_grid_oracle_at_n2() {
        for seed in 0..10u64 {
            let (ch, p) = random_setup(seed + 40, 2, 4);
            let quad = PhaseQuadratic::new(&ch, &p).unwrap();
            let points = 721;
            let mut f_grid = f64::INFINITY;
            for i in 0..points {
                for j in 0..points {
                    let t = PhaseProfile::new(vec![
                        i as f64 * TAU / points as f64,
                        j as f64 * TAU / points as f64,
                    ]);
                    f_grid = f_grid.min(quad.value(&t));
                }
            }
            let out = optimize_phases_sfp(
                &PhaseProfile::uniform(2, std::f64::consts::FRAC_PI_2),
                &p,
                &ch,
                1e-14,
                2000,
            )
            .unwrap();
            assert!(
                out.objective <= f_grid * 1.02 + 1e-12,
                "seed {}: {} vs grid {f_grid}",
                seed + 40,
                out.objective
            );
        }
    }

    #[test]
    fn grid_minimizer_is_a_fixed_point() {
        let (ch, p) = random_setup(3, 2, 4);
        let quad = PhaseQuadratic::new(&ch, &p).unwrap();
        let points = 721;
        let mut best = (f64::INFINITY, vec![0.0; 2]);
        for i in 0..points {
            for j in 0..points {
                let theta = vec![
                    i as f64 * TAU / points as f64,
                    j as f64 * TAU / points as f64,
                ];
                let v = quad.value(&PhaseProfile::new(theta.clone()));
                if v < best.0 {
                    best = (v, theta);
                }
            }
        }
        let start = PhaseProfile::new(best.1);
        let out = optimize_phases_sfp(&start, &p, &ch, 1e-3, 100).unwrap();
        assert!(
            out.iterations <= 2,
            "took {} iterations from the minimizer",
            out.iterations
        );
        assert!(out.objective <= best.0 + 1e-9 * best.0);
    }

    #[test]
    fn sfp_update_is_one_model_minimization() {
        let (ch, p) = random_setup(5, 3, 6);
        let quad = PhaseQuadratic::new(&ch, &p).unwrap();
        let anchor = PhaseProfile::new(vec![0.2, 1.4, 3.0]);
        let model = SurrogateModel::build(&quad, &anchor);
        assert_eq!(sfp_update(&model).angles(), model.minimize().angles());
    }

    #[test]
    fn single_element_is_a_fixed_point() {
        let (ch, p) = random_setup(8, 1, 2);
        let theta0 = PhaseProfile::uniform(1, 0.77);
        let out = optimize_phases_sfp(&theta0, &p, &ch, 1e-9, 100).unwrap();
        assert_eq!(out.iterations, 1);
        let f0 = objective_f(&theta0, &p, &ch).unwrap();
        assert!((out.objective - f0).abs() <= 1e-12 * f0.max(1.0));
    }
}
