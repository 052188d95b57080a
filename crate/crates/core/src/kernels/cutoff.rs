/// Smooth radial cut-off: 0 on `|t| <= 1`, 1 on `|t| >= 2`, quintic
/// smoothstep `6u^5 - 15u^4 + 10u^3` with `u = |t| - 1` in between.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CutoffFunction;

impl CutoffFunction {
    pub fn eval(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= 1.0 {
            0.0
        } else if a >= 2.0 {
            1.0
        } else {
            let u = a - 1.0;
            u * u * u * (10.0 + u * (-15.0 + 6.0 * u))
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        let a = t.abs();
        if a <= 1.0 || a >= 2.0 {
            0.0
        } else {
            let u = a - 1.0;
            30.0 * u * u * (1.0 - u) * (1.0 - u) * t.signum()
        }
    }
}
