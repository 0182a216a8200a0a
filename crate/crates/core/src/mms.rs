//! Manufactured solution for the accuracy studies.
//!
//! The velocity, pressure and displacement are smooth trigonometric fields on
//! the two stacked unit squares, chosen so that the velocity is divergence
//! free, the displacement rate equals the velocity everywhere, and the normal
//! stresses balance across the interface `y = 1`. The forcings are derived
//! analytically by substituting the fields into the strong equations; the
//! test-suite checks the closed forms against finite differences.

use crate::scalar::{lit, Real};
use crate::subdomain::MaterialParams;

/// Closed-form fields and forcings of the manufactured case.
#[derive(Debug, Clone)]
pub struct ManufacturedSolution<T> {
    rho_f: T,
    nu_f: T,
    rho_s: T,
    nu_s: T,
}

impl<T: Real> ManufacturedSolution<T> {
    pub fn new(params: &MaterialParams<T>) -> Self {
        ManufacturedSolution {
            rho_f: params.rho_f,
            nu_f: params.nu_f,
            rho_s: params.rho_s,
            nu_s: params.nu_s,
        }
    }

    /// Fluid velocity; also the displacement rate, which makes the interface
    /// kinematic condition hold identically.
    pub fn velocity(&self, x: T, y: T, t: T) -> [T; 2] {
        let u1 = (x + t).cos() * (y + t).sin() + (x + t).sin() * (y + t).cos();
        [u1, -u1]
    }

    pub fn velocity_grad(&self, x: T, y: T, t: T) -> [[T; 2]; 2] {
        // u1 = sin(x + y + 2t) by the angle-sum identity
        let c = (x + y + lit::<T>(2.0) * t).cos();
        [[c, c], [-c, -c]]
    }

    pub fn pressure(&self, x: T, y: T, t: T) -> T {
        let two = lit::<T>(2.0);
        two * self.nu_f * ((x + t).sin() * (y + t).sin() - (x + t).cos() * (y + t).cos())
            + two * self.nu_s * (x + t).cos() * (y + t).sin()
    }

    pub fn displacement(&self, x: T, y: T, t: T) -> [T; 2] {
        [
            (x + t).sin() * (y + t).sin(),
            (x + t).cos() * (y + t).cos(),
        ]
    }

    pub fn displacement_grad(&self, x: T, y: T, t: T) -> [[T; 2]; 2] {
        [
            [(x + t).cos() * (y + t).sin(), (x + t).sin() * (y + t).cos()],
            [-(x + t).sin() * (y + t).cos(), -(x + t).cos() * (y + t).sin()],
        ]
    }

    /// Time derivative of the displacement (equals the velocity field).
    pub fn displacement_rate(&self, x: T, y: T, t: T) -> [T; 2] {
        self.velocity(x, y, t)
    }

    /// Body force of the momentum equation,
    /// `rho_f du/dt - 2 nu_f div D(u) + grad p`.
    pub fn fluid_forcing(&self, x: T, y: T, t: T) -> [T; 2] {
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        let c = (x + y + two * t).cos();
        let s = (x + y + two * t).sin();
        [
            two * self.rho_f * c + four * self.nu_f * s
                - two * self.nu_s * (x + t).sin() * (y + t).sin(),
            -two * self.rho_f * c + two * self.nu_s * (x + t).cos() * (y + t).cos(),
        ]
    }

    /// Body force of the elastodynamics equation,
    /// `rho_s d2eta/dt2 - 2 nu_s div D(eta) - lambda grad div eta`
    /// (the displacement is divergence free, so the Lame term drops out).
    pub fn structure_forcing(&self, x: T, y: T, t: T) -> [T; 2] {
        let two = lit::<T>(2.0);
        let c = (x + y + two * t).cos();
        [
            two * self.rho_s * c + two * self.nu_s * (x + t).sin() * (y + t).sin(),
            -two * self.rho_s * c + two * self.nu_s * (x + t).cos() * (y + t).cos(),
        ]
    }

    /// Fluid normal stress `sigma_f n_f` on a horizontal line with
    /// `n_f = (0, 1)`.
    pub fn fluid_traction_up(&self, x: T, y: T, t: T) -> [T; 2] {
        let two = lit::<T>(2.0);
        let c = (x + y + two * t).cos();
        [T::zero(), -two * self.nu_f * c - self.pressure(x, y, t)]
    }

    /// Structure normal stress `sigma_s n_s` on a horizontal line with
    /// `n_s = (0, -1)`.
    pub fn structure_traction_down(&self, x: T, y: T, t: T) -> [T; 2] {
        let two = lit::<T>(2.0);
        [T::zero(), two * self.nu_s * (x + t).cos() * (y + t).sin()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_params() -> MaterialParams<f64> {
        MaterialParams {
            rho_f: 1.0,
            nu_f: 1.0,
            rho_s: 1.0,
            nu_s: 1.0,
            lambda: 1.0,
            alpha_f: 1.0,
            alpha_s: 100.0,
        }
    }

    fn sample_points() -> Vec<(f64, f64, f64)> {
        let mut state = 0xC0FFEEu64;
        let mut rand = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..25).map(|_| (rand(), 2.0 * rand(), 0.01 * rand())).collect()
    }

    #[test]
    fn velocity_is_divergence_free() {
        let mms = ManufacturedSolution::new(&unit_params());
        for (x, y, t) in sample_points() {
            let g = mms.velocity_grad(x, y, t);
            assert!((g[0][0] + g[1][1]).abs() <= 1e-12);
        }
    }

    #[test]
    fn interface_kinematics_hold_pointwise() {
        let mms = ManufacturedSolution::new(&unit_params());
        for (x, _, t) in sample_points() {
            let u = mms.velocity(x, 1.0, t);
            let rate = mms.displacement_rate(x, 1.0, t);
            // analytic limit of (eta(t + h) - eta(t)) / h as a cross-check
            let h = 1e-6;
            let ep = mms.displacement(x, 1.0, t + h);
            let em = mms.displacement(x, 1.0, t - h);
            for c in 0..2 {
                assert!((u[c] - rate[c]).abs() <= 1e-12);
                assert!(((ep[c] - em[c]) / (2.0 * h) - u[c]).abs() <= 1e-8);
            }
        }
    }

    #[test]
    fn velocity_at_origin_is_zero() {
        let mms = ManufacturedSolution::new(&unit_params());
        let u = mms.velocity(0.0, 0.0, 0.0);
        assert_eq!(u[0], 0.0);
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn tractions_balance_on_interface() {
        let mms = ManufacturedSolution::new(&unit_params());
        for (x, _, t) in sample_points() {
            let f = mms.fluid_traction_up(x, 1.0, t);
            let s = mms.structure_traction_down(x, 1.0, t);
            assert!((f[0] + s[0]).abs() < 1e-13);
            assert!((f[1] + s[1]).abs() < 1e-13);
        }
    }

    /// Finite-difference oracle for both derived forcings: rebuild
    /// `rho du/dt - div sigma` from the field values alone.
    #[test]
    fn forcings_match_finite_difference_oracle() {
        let p = unit_params();
        let mms = ManufacturedSolution::new(&p);
        // second-difference stencils need a larger step to stay clear of
        // cancellation noise (eps / h^2)
        let h = 1e-4;
        for (x, y, t) in sample_points().into_iter().take(20) {
            // fluid: rho_f u_t - nu_f lap(u) - nu_f grad(div u) + grad p
            // (2 div D(u) = lap(u) + grad div u)
            let mut f_fd = [0.0f64; 2];
            for c in 0..2 {
                let ut = (mms.velocity(x, y, t + h)[c] - mms.velocity(x, y, t - h)[c]) / (2.0 * h);
                let lap = (mms.velocity(x + h, y, t)[c] + mms.velocity(x - h, y, t)[c]
                    + mms.velocity(x, y + h, t)[c]
                    + mms.velocity(x, y - h, t)[c]
                    - 4.0 * mms.velocity(x, y, t)[c])
                    / (h * h);
                // div u = 0 analytically; grad div u follows suit
                let gp = if c == 0 {
                    (mms.pressure(x + h, y, t) - mms.pressure(x - h, y, t)) / (2.0 * h)
                } else {
                    (mms.pressure(x, y + h, t) - mms.pressure(x, y - h, t)) / (2.0 * h)
                };
                f_fd[c] = p.rho_f * ut - p.nu_f * lap + gp;
            }
            let f = mms.fluid_forcing(x, y, t);
            assert!((f[0] - f_fd[0]).abs() < 1e-6, "fluid x at ({x},{y},{t})");
            assert!((f[1] - f_fd[1]).abs() < 1e-6, "fluid y at ({x},{y},{t})");

            // structure: rho_s eta_tt - nu_s lap(eta) (div eta = 0)
            let mut s_fd = [0.0f64; 2];
            for c in 0..2 {
                let att = (mms.displacement(x, y, t + h)[c] + mms.displacement(x, y, t - h)[c]
                    - 2.0 * mms.displacement(x, y, t)[c])
                    / (h * h);
                let lap = (mms.displacement(x + h, y, t)[c] + mms.displacement(x - h, y, t)[c]
                    + mms.displacement(x, y + h, t)[c]
                    + mms.displacement(x, y - h, t)[c]
                    - 4.0 * mms.displacement(x, y, t)[c])
                    / (h * h);
                s_fd[c] = p.rho_s * att - p.nu_s * lap;
            }
            let s = mms.structure_forcing(x, y, t);
            assert!((s[0] - s_fd[0]).abs() < 1e-6, "structure x at ({x},{y},{t})");
            assert!((s[1] - s_fd[1]).abs() < 1e-6, "structure y at ({x},{y},{t})");
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        let mms = ManufacturedSolution::new(&unit_params());
        let h = 1e-6;
        for (x, y, t) in sample_points().into_iter().take(10) {
            let gu = mms.velocity_grad(x, y, t);
            let ge = mms.displacement_grad(x, y, t);
            for c in 0..2 {
                let dx_u =
                    (mms.velocity(x + h, y, t)[c] - mms.velocity(x - h, y, t)[c]) / (2.0 * h);
                let dy_u =
                    (mms.velocity(x, y + h, t)[c] - mms.velocity(x, y - h, t)[c]) / (2.0 * h);
                assert!((gu[c][0] - dx_u).abs() < 1e-8);
                assert!((gu[c][1] - dy_u).abs() < 1e-8);
                let dx_e = (mms.displacement(x + h, y, t)[c]
                    - mms.displacement(x - h, y, t)[c])
                    / (2.0 * h);
                let dy_e = (mms.displacement(x, y + h, t)[c]
                    - mms.displacement(x, y - h, t)[c])
                    / (2.0 * h);
                assert!((ge[c][0] - dx_e).abs() < 1e-8);
                assert!((ge[c][1] - dy_e).abs() < 1e-8);
            }
        }
    }
}
