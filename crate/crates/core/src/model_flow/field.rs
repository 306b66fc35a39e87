use num_complex::Complex64;

/// Real 2×2 matrix, row-major: `[[∂u/∂x, ∂u/∂y], [∂w/∂x, ∂w/∂y]]` for `v = u + iw`.
pub type Jacobian = [[f64; 2]; 2];

/// `v(z) = ¼(|z|⁴ − 2z·Re(z²) − z² + 2z)`.
pub fn eval_v(z: Complex64) -> Complex64 {
    let z2 = z * z;
    (Complex64::from(z.norm_sqr() * z.norm_sqr()) - z * (2.0 * z2.re) - z2 + z * 2.0) * 0.25
}

/// Wirtinger derivatives `(∂v/∂z, ∂v/∂z̄)`.
///
/// Writing `v = ¼(z²z̄² − z³ − z z̄² − z² + 2z)`:
/// `∂v/∂z = ¼(2z z̄² − 3z² − z̄² − 2z + 2)` and `∂v/∂z̄ = ¼(2z² z̄ − 2z z̄)`.
pub fn wirtinger_derivatives(z: Complex64) -> (Complex64, Complex64) {
    let zb = z.conj();
    let dz = (z * zb * zb * 2.0 - z * z * 3.0 - zb * zb - z * 2.0 + 2.0) * 0.25;
    let dzbar = (z * z * zb * 2.0 - z * zb * 2.0) * 0.25;
    (dz, dzbar)
}

/// Realification of `δ ↦ a·δ + b·δ̄` with `a = ∂v/∂z`, `b = ∂v/∂z̄`.
pub fn real_jacobian(z: Complex64) -> Jacobian {
    let (a, b) = wirtinger_derivatives(z);
    [[a.re + b.re, -a.im + b.im], [a.im + b.im, a.re - b.re]]
}

/// Radial and horizontal components of `v` on the circle `z = 1 + e^{iθ}`.
///
/// The radial part is `Re(v · conj(e^{iθ}))`, identically zero; the
/// horizontal part is `Re v = ½ sin²θ (3 + 2cos θ)`, positive except at
/// `θ ∈ {0, π}`. (The often-quoted `¾ sin²θ (2 + cos θ)` agrees only at
/// `θ = ±π/2`.)
pub fn circle_decompose(theta: f64) -> (f64, f64) {
    let w = Complex64::from_polar(1.0, theta);
    let v = eval_v(1.0 + w);
    ((v * w.conj()).re, v.re)
}
