/// Gamma function (Lanczos approximation with reflection for negative
/// arguments), as provided by `statrs`.
pub fn gamma(x: f64) -> f64 {
    statrs::function::gamma::gamma(x)
}
