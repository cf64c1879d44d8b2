//! Reference computations for the integration tests.
//!
//! Everything here is written against plain `Complex64` arithmetic on
//! explicit 4-vectors and never calls into the crate's linear algebra,
//! preparation or measurement code.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use std::f64::consts::{PI, TAU};

/// `(0, a, b·e^{iδ}, 0)` in the `(↑↑, ↑↓, ↓↑, ↓↓)` path-major basis.
pub fn state(a: f64, b: f64, delta: f64) -> [C; 4] {
    [C::new(0.0, 0.0), C::new(a, 0.0), C::from_polar(b, delta), C::new(0.0, 0.0)]
}

/// Path observable from the BS2 + PS output channels, as an explicit
/// difference of outer products.
pub fn path_op(theta: f64, phi: f64) -> [[C; 2]; 2] {
    let psi3 = [C::from_polar(theta.sin(), phi), C::from_polar(theta.cos(), phi)];
    let psi4 = [C::new(theta.cos(), 0.0), C::new(-theta.sin(), 0.0)];
    let mut m = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = psi3[i] * psi3[j].conj() - psi4[i] * psi4[j].conj();
        }
    }
    m
}

pub fn spin_op(n: [f64; 3]) -> [[C; 2]; 2] {
    [
        [C::new(n[2], 0.0), C::new(n[0], -n[1])],
        [C::new(n[0], n[1]), C::new(-n[2], 0.0)],
    ]
}

pub fn xz(polar: f64) -> [f64; 3] {
    [polar.sin(), 0.0, polar.cos()]
}

/// `Σ conj(ψ_{ik}) A_{ij} B_{kl} ψ_{jl}` with ψ indexed `[2·path + spin]`.
pub fn correlation(psi: &[C; 4], a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> f64 {
    let mut acc = C::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    acc += psi[2 * i + k].conj() * a[i][j] * b[k][l] * psi[2 * j + l];
                }
            }
        }
    }
    assert!(acc.im.abs() < 1e-12);
    acc.re
}

/// Joint probabilities (++, +−, −+, −−) from `(I ± A)/2 ⊗ (I ± B)/2`.
pub fn joint(psi: &[C; 4], a: &[[C; 2]; 2], b: &[[C; 2]; 2]) -> [f64; 4] {
    let id = [[C::new(1.0, 0.0), C::new(0.0, 0.0)], [C::new(0.0, 0.0), C::new(1.0, 0.0)]];
    let proj = |m: &[[C; 2]; 2], sign: f64| {
        let mut p = [[C::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                p[i][j] = (id[i][j] + m[i][j] * sign) * 0.5;
            }
        }
        p
    };
    let mut out = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        out[k] = correlation(psi, &proj(a, sa), &proj(b, sb));
    }
    out
}

pub fn chsh(psi: &[C; 4], theta1: f64, theta2: f64, n1: [f64; 3], n2: [f64; 3]) -> f64 {
    let (a1, a2) = (path_op(theta1, 0.0), path_op(theta2, 0.0));
    let (b1, b2) = (spin_op(n1), spin_op(n2));
    correlation(psi, &a1, &b1) + correlation(psi, &a1, &b2) + correlation(psi, &a2, &b1)
        - correlation(psi, &a2, &b2)
}

/// Maximum of `|S|` over the full grid θ₁, θ₂ ∈ {kπ/R}, β₁, β₂ ∈ {2kπ/R}
/// (spin axes in the x–z plane).
///
/// For fixed (θ₁, θ₂) the objective is `f(β₁) + g(β₂)`, so the (β₁, β₂)
/// extremes of the grid are attained at independent extremes of `f` and
/// `g`; the result is exactly the brute-force maximum over all `R⁴` points.
pub fn grid_max(psi: &[C; 4], res: usize) -> f64 {
    let thetas: Vec<_> = (0..res).map(|k| path_op(k as f64 * PI / res as f64, 0.0)).collect();
    let spins: Vec<_> = (0..res).map(|k| spin_op(xz(k as f64 * TAU / res as f64))).collect();
    let table: Vec<Vec<f64>> = thetas
        .iter()
        .map(|a| spins.iter().map(|b| correlation(psi, a, b)).collect())
        .collect();
    let mut best = f64::NEG_INFINITY;
    for e1 in &table {
        for e2 in &table {
            let (mut fmax, mut fmin, mut gmax, mut gmin) =
                (f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY);
            for j in 0..res {
                let f = e1[j] + e2[j];
                let g = e1[j] - e2[j];
                fmax = fmax.max(f);
                fmin = fmin.min(f);
                gmax = gmax.max(g);
                gmin = gmin.min(g);
            }
            best = best.max(fmax + gmax).max(-(fmin + gmin));
        }
    }
    best
}

/// Literal four-fold loop; only practical for small `res`.
pub fn grid_max_literal(psi: &[C; 4], res: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i1 in 0..res {
        for i2 in 0..res {
            for j1 in 0..res {
                for j2 in 0..res {
                    let s = chsh(
                        psi,
                        i1 as f64 * PI / res as f64,
                        i2 as f64 * PI / res as f64,
                        xz(j1 as f64 * TAU / res as f64),
                        xz(j2 as f64 * TAU / res as f64),
                    );
                    best = best.max(s.abs());
                }
            }
        }
    }
    best
}

/// Maximal |S| for `a|↑↓⟩ + b·e^{iδ}|↓↑⟩` with δ = π and spin axes
/// anywhere; validated against [`grid_max`] before use.
pub fn partial_entanglement_max(a: f64) -> f64 {
    2.0 * (1.0 + 4.0 * a * a * (1.0 - a * a)).sqrt()
}
