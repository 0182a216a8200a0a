//! Quadrature rules on the reference triangle and the unit interval.
//!
//! Symmetric (Dunavant-style) rules cover the polynomial degrees needed by
//! assembly; a tensorized Gauss rule through the Duffy transform handles any
//! higher degree requested by the error norms and test oracles. Weights are
//! scaled so that they sum to the reference-triangle area 1/2.

use crate::scalar::{lit, Real};

/// One quadrature rule: reference points `(xi, eta)` with weights.
#[derive(Debug, Clone)]
pub struct TriRule<T> {
    pub points: Vec<[T; 2]>,
    pub weights: Vec<T>,
}

/// Orbit of a symmetric rule in barycentric coordinates.
enum Orbit {
    Centroid(f64),
    /// (a, a, 1-2a) permutations, 3 points.
    Three(f64, f64),
    /// (a, b, 1-a-b) permutations, 6 points.
    Six(f64, f64, f64),
}

fn expand<T: Real>(orbits: &[Orbit]) -> TriRule<T> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut push = |l: [f64; 3], w: f64| {
        // barycentric -> reference coordinates (xi, eta) = (l1, l2)
        points.push([lit::<T>(l[1]), lit::<T>(l[2])]);
        weights.push(lit::<T>(w * 0.5));
    };
    for orbit in orbits {
        match *orbit {
            Orbit::Centroid(w) => push([1.0 / 3.0; 3], w),
            Orbit::Three(a, w) => {
                let b = 1.0 - 2.0 * a;
                push([a, a, b], w);
                push([a, b, a], w);
                push([b, a, a], w);
            }
            Orbit::Six(a, b, w) => {
                let c = 1.0 - a - b;
                for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
                    push(p, w);
                }
            }
        }
    }
    TriRule { points, weights }
}

/// Smallest stored rule exact for polynomials of the given total degree.
pub fn triangle_rule<T: Real>(degree: usize) -> TriRule<T> {
    match degree {
        0 | 1 => expand(&[Orbit::Centroid(1.0)]),
        2 => expand(&[Orbit::Three(1.0 / 6.0, 1.0 / 3.0)]),
        3 | 4 => expand(&[
            Orbit::Three(0.445948490915965, 0.223381589678011),
            Orbit::Three(0.091576213509771, 0.109951743655322),
        ]),
        5 => expand(&[
            Orbit::Centroid(0.225),
            Orbit::Three(0.470142064105115, 0.132394152788506),
            Orbit::Three(0.101286507323456, 0.125939180544827),
        ]),
        6 => expand(&[
            Orbit::Three(0.249286745170910, 0.116786275726379),
            Orbit::Three(0.063089014491502, 0.050844906370207),
            Orbit::Six(0.310352451033785, 0.636502499121399, 0.082851075618374),
        ]),
        d => duffy_rule(d),
    }
}

/// Tensorized Gauss rule mapped to the triangle by the Duffy transform
/// `(s, t) -> (s, t (1 - s))`; exact for total degree `d` with
/// `n = ceil((d + 2) / 2)` points per direction.
fn duffy_rule<T: Real>(degree: usize) -> TriRule<T> {
    let n = (degree + 3) / 2;
    let gl = gauss_legendre_01(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for &(s, ws) in &gl {
        for &(t, wt) in &gl {
            points.push([lit::<T>(s), lit::<T>(t * (1.0 - s))]);
            weights.push(lit::<T>(ws * wt * (1.0 - s)));
        }
    }
    TriRule { points, weights }
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_01(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // initial guess on [-1, 1], refined by Newton on P_n
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-15 {
                let (p2, d2) = legendre(n, x);
                dp = d2;
                x -= p2 / d2;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((x + 1.0) / 2.0, w / 2.0));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// Legendre polynomial value and derivative at `x`.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
