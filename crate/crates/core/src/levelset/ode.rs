//! Adaptive Dormand–Prince 5(4) integration for small autonomous systems.

pub type Vec3 = [f64; 3];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy(y: &Vec3, h: f64, terms: &[(f64, &Vec3)]) -> Vec3 {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..3 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// One Dormand–Prince step of size `h`: the fifth-order solution and the
/// embedded error estimate.
pub fn dopri_step<F: Fn(&Vec3) -> Vec3>(f: &F, y: &Vec3, h: f64) -> (Vec3, Vec3) {
    let mut k: [Vec3; 7] = [[0.0; 3]; 7];
    k[0] = f(y);
    for s in 1..7 {
        let terms: Vec<(f64, &Vec3)> = (0..s).map(|j| (A[s][j], &k[j])).collect();
        k[s] = f(&axpy(y, h, &terms));
    }
    let y5 = axpy(y, h, &(0..7).map(|j| (B5[j], &k[j])).collect::<Vec<_>>());
    let mut err = [0.0; 3];
    for i in 0..3 {
        err[i] = h * (0..7).map(|j| (B5[j] - B4[j]) * k[j][i]).sum::<f64>();
    }
    (y5, err)
}

/// Classical fixed-step fourth-order Runge–Kutta step.
pub fn rk4_step<F: Fn(&Vec3) -> Vec3>(f: &F, y: &Vec3, h: f64) -> Vec3 {
    let k1 = f(y);
    let k2 = f(&axpy(y, h / 2.0, &[(1.0, &k1)]));
    let k3 = f(&axpy(y, h / 2.0, &[(1.0, &k2)]));
    let k4 = f(&axpy(y, h, &[(1.0, &k3)]));
    axpy(
        y,
        h,
        &[
            (1.0 / 6.0, &k1),
            (1.0 / 3.0, &k2),
            (1.0 / 3.0, &k3),
            (1.0 / 6.0, &k4),
        ],
    )
}

/// Step-size controller state.
#[derive(Debug, Clone)]
pub struct Controller {
    pub rtol: f64,
    pub atol: f64,
    pub h: f64,
    pub h_max: f64,
}

impl Controller {
    pub fn new(tol: f64) -> Self {
        Controller {
            rtol: tol,
            atol: tol,
            h: 1e-3,
            h_max: 0.05,
        }
    }

    /// Takes one accepted step from `y`, retrying with smaller steps as
    /// needed. Returns the step size used and the new state.
    pub fn advance<F: Fn(&Vec3) -> Vec3>(
        &mut self,
        f: &F,
        y: &Vec3,
    ) -> Result<(f64, Vec3), String> {
        for _ in 0..200 {
            let h = self.h.min(self.h_max);
            let (y1, e) = dopri_step(f, y, h);
            let mut sum = 0.0;
            for i in 0..3 {
                let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                sum += (e[i] / sc).powi(2);
            }
            let err = (sum / 3.0).sqrt();
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 && y1.iter().all(|v| v.is_finite()) {
                self.h = h * factor;
                return Ok((h, y1));
            }
            self.h = h * factor.min(0.9);
            if self.h < 1e-14 {
                break;
            }
        }
        Err("step size underflow".into())
    }
}
