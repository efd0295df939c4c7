//! Adaptive panel quadrature built on a Gauss–Legendre (7, 15) pair.
//!
//! A panel is accepted when the 7- and 15-point estimates agree to the
//! requested tolerance, otherwise it is bisected. The refined panel list is
//! kept, so cumulative integrals (cdf tables) can be assembled from the same
//! sweep.

use crate::scalar::Real;

/// Gauss–Legendre 7-point nodes on [-1, 1].
const G7_NODES: [f64; 7] = [
    -0.9491079123427584,
    -0.7415311855993945,
    -0.4058451513773972,
    0.0,
    0.4058451513773972,
    0.7415311855993945,
    0.9491079123427584,
];

const G7_WEIGHTS: [f64; 7] = [
    0.12948496616886992,
    0.2797053914892766,
    0.38183005050511876,
    0.4179591836734691,
    0.38183005050511876,
    0.2797053914892766,
    0.12948496616886992,
];

/// Gauss–Legendre 15-point nodes on [-1, 1].
const G15_NODES: [f64; 15] = [
    -0.9879925180204854,
    -0.937273392400706,
    -0.8482065834104272,
    -0.7244177313601701,
    -0.5709721726085388,
    -0.3941513470775634,
    -0.20119409399743454,
    0.0,
    0.20119409399743454,
    0.3941513470775634,
    0.5709721726085388,
    0.7244177313601701,
    0.8482065834104272,
    0.937273392400706,
    0.9879925180204854,
];

const G15_WEIGHTS: [f64; 15] = [
    0.030753241996118154,
    0.07036604748810715,
    0.10715922046717176,
    0.13957067792615432,
    0.16626920581699411,
    0.18616100001556224,
    0.19843148532711163,
    0.20257824192556137,
    0.19843148532711163,
    0.18616100001556224,
    0.16626920581699411,
    0.13957067792615432,
    0.10715922046717176,
    0.07036604748810715,
    0.030753241996118154,
];

/// Fixed 15-point Gauss–Legendre estimate of `∫_a^b f`.
pub fn gauss15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> T {
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let mut acc = T::zero();
    for (node, weight) in G15_NODES.iter().zip(G15_WEIGHTS.iter()) {
        acc = acc + T::of(*weight) * f(mid + half * T::of(*node));
    }
    acc * half
}

fn gauss7<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> T {
    let half = (b - a) * T::of(0.5);
    let mid = (a + b) * T::of(0.5);
    let mut acc = T::zero();
    for (node, weight) in G7_NODES.iter().zip(G7_WEIGHTS.iter()) {
        acc = acc + T::of(*weight) * f(mid + half * T::of(*node));
    }
    acc * half
}

/// One refined panel from an adaptive sweep: `[lo, hi]` with its integral.
#[derive(Debug, Clone, Copy)]
pub struct Panel<T> {
    pub lo: T,
    pub hi: T,
    pub integral: T,
}

/// Adaptively integrates `f` over `[a, b]`, returning the refined panels in
/// order. Each panel satisfies |G15 - G7| <= `tol` scaled by panel share.
pub fn adaptive_panels<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    tol: T,
    max_depth: u32,
) -> Vec<Panel<T>> {
    let mut panels = Vec::new();
    subdivide(f, a, b, tol, max_depth, &mut panels);
    panels
}

fn subdivide<T: Real, F: Fn(T) -> T>(
    f: &F,
    a: T,
    b: T,
    tol: T,
    depth: u32,
    out: &mut Vec<Panel<T>>,
) {
    let coarse = gauss7(f, a, b);
    let fine = gauss15(f, a, b);
    let err = (fine - coarse).abs();
    if err <= tol || depth == 0 || (b - a).abs() <= T::epsilon() * (a.abs() + b.abs() + T::one()) {
        out.push(Panel {
            lo: a,
            hi: b,
            integral: fine,
        });
        return;
    }
    let mid = (a + b) * T::of(0.5);
    let half_tol = tol * T::of(0.5);
    subdivide(f, a, mid, half_tol, depth - 1, out);
    subdivide(f, mid, b, half_tol, depth - 1, out);
}

/// Adaptive integral of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T, tol: T) -> T {
    adaptive_panels(f, a, b, tol, 48)
        .iter()
        .map(|p| p.integral)
        .sum()
}
