use std::sync::LazyLock;

use nalgebra::Matrix3;

use crate::qalgebra::{c, C64};

pub type Mat3 = Matrix3<C64>;

/// Spin-1 matrices in the basis `|+1>, |0>, |-1>` (ħ = 1).
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub sx: Mat3,
    pub sy: Mat3,
    pub sz: Mat3,
}

pub static SPIN1: LazyLock<SpinOperators> = LazyLock::new(SpinOperators::spin1);

impl SpinOperators {
    pub fn spin1() -> Self {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = c(0.0, 0.0);
        let sx = Mat3::new(z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z, c(r, 0.0), z);
        let sy = Mat3::new(z, c(0.0, -r), z, c(0.0, r), z, c(0.0, -r), z, c(0.0, r), z);
        let sz = Mat3::new(c(1.0, 0.0), z, z, z, z, z, z, z, c(-1.0, 0.0));
        Self { sx, sy, sz }
    }

    pub fn splus(&self) -> Mat3 {
        self.sx + self.sy * c(0.0, 1.0)
    }

    pub fn sminus(&self) -> Mat3 {
        self.sx - self.sy * c(0.0, 1.0)
    }
}
