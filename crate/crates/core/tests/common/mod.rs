//! Shared fixtures: the worked examples and benchmark systems.

#![allow(dead_code)]

use singular_deflate::{Complex64, Exponent, PolySystem, Polynomial, Rat, Scalar};

pub fn poly<K: Scalar>(nvars: usize, terms: &[(i64, &[u32])]) -> Polynomial<K> {
    Polynomial::from_terms(
        nvars,
        terms
            .iter()
            .map(|(c, e)| (Exponent::from_slice(e), K::from_int(*c))),
    )
}

pub fn e(v: &[u32]) -> Exponent {
    Exponent::from_slice(v)
}

/// {x1 + x2^2, x1^2 + x2^2}: multiplicity-2 root at the origin.
pub fn illustrative<K: Scalar>() -> PolySystem<K> {
    PolySystem::new(
        2,
        vec![
            poly(2, &[(1, &[1, 0]), (1, &[0, 2])]),
            poly(2, &[(1, &[2, 0]), (1, &[0, 2])]),
        ],
    )
}

/// {x1 - x2 + x1^2, x1 - x2 + x2^2}: multiplicity-3 root at the origin.
pub fn mult3<K: Scalar>() -> PolySystem<K> {
    PolySystem::new(
        2,
        vec![
            poly(2, &[(1, &[1, 0]), (-1, &[0, 1]), (1, &[2, 0])]),
            poly(2, &[(1, &[1, 0]), (-1, &[0, 1]), (1, &[0, 2])]),
        ],
    )
}

/// The Caprasse benchmark (4 polynomials, 4 variables).
pub fn caprasse<K: Scalar>() -> PolySystem<K> {
    PolySystem::new(
        4,
        vec![
            poly(
                4,
                &[
                    (1, &[3, 0, 1, 0]),
                    (-4, &[1, 2, 1, 0]),
                    (-4, &[2, 1, 0, 1]),
                    (-2, &[0, 3, 0, 1]),
                    (-4, &[2, 0, 0, 0]),
                    (10, &[0, 2, 0, 0]),
                    (-4, &[1, 0, 1, 0]),
                    (10, &[0, 1, 0, 1]),
                    (-2, &[0, 0, 0, 0]),
                ],
            ),
            poly(
                4,
                &[
                    (1, &[1, 0, 3, 0]),
                    (-4, &[0, 1, 2, 1]),
                    (-4, &[1, 0, 1, 2]),
                    (-2, &[0, 1, 0, 3]),
                    (-4, &[1, 0, 1, 0]),
                    (10, &[0, 1, 0, 1]),
                    (-4, &[0, 0, 2, 0]),
                    (10, &[0, 0, 0, 2]),
                    (-2, &[0, 0, 0, 0]),
                ],
            ),
            poly(
                4,
                &[
                    (1, &[0, 2, 1, 0]),
                    (2, &[1, 1, 0, 1]),
                    (-2, &[1, 0, 0, 0]),
                    (-1, &[0, 0, 1, 0]),
                ],
            ),
            poly(
                4,
                &[
                    (1, &[1, 0, 0, 2]),
                    (2, &[0, 1, 1, 1]),
                    (-2, &[0, 0, 1, 0]),
                    (-1, &[1, 0, 0, 0]),
                ],
            ),
        ],
    )
}

/// The multiplicity-4 root of the Caprasse system:
/// (-2i/sqrt(3), -i/sqrt(3), 2i/sqrt(3), i/sqrt(3)).
pub fn caprasse_root() -> Vec<Complex64> {
    let inv_sqrt3 = 1.0 / 3.0_f64.sqrt();
    vec![
        Complex64::new(0.0, -2.0 * inv_sqrt3),
        Complex64::new(0.0, -inv_sqrt3),
        Complex64::new(0.0, 2.0 * inv_sqrt3),
        Complex64::new(0.0, inv_sqrt3),
    ]
}

/// Breadth-2 family: {x1^3 + x1^2 - x2^2, x2^3 + x2^2 - x3, ...,
/// x_{n-1}^3 + x_{n-1}^2 - x_n, x_n^2} with a multiplicity-2^n root at the
/// origin.
pub fn family<K: Scalar>(n: usize) -> PolySystem<K> {
    assert!(n >= 2);
    let mut polys = Vec::with_capacity(n);
    let unit = |i: usize, p: u32| {
        let mut v = vec![0u32; n];
        v[i] = p;
        v
    };
    // x1^3 + x1^2 - x2^2
    polys.push(Polynomial::from_terms(
        n,
        [
            (Exponent::from_slice(&unit(0, 3)), K::from_int(1)),
            (Exponent::from_slice(&unit(0, 2)), K::from_int(1)),
            (Exponent::from_slice(&unit(1, 2)), K::from_int(-1)),
        ],
    ));
    for k in 1..n - 1 {
        polys.push(Polynomial::from_terms(
            n,
            [
                (Exponent::from_slice(&unit(k, 3)), K::from_int(1)),
                (Exponent::from_slice(&unit(k, 2)), K::from_int(1)),
                (Exponent::from_slice(&unit(k + 1, 1)), K::from_int(-1)),
            ],
        ));
    }
    polys.push(Polynomial::from_terms(
        n,
        [(Exponent::from_slice(&unit(n - 1, 2)), K::from_int(1))],
    ));
    PolySystem::new(n, polys)
}

/// First multiple-iteration benchmark:
/// {x1^4 - x2 x3 x4, x2^4 - x1 x3 x4, x3^4 - x1 x2 x4, x4^4 - x1 x2 x3}
/// at the origin (delta = 131, o = 10).
pub fn bench1<K: Scalar>() -> PolySystem<K> {
    PolySystem::new(
        4,
        vec![
            poly(4, &[(1, &[4, 0, 0, 0]), (-1, &[0, 1, 1, 1])]),
            poly(4, &[(1, &[0, 4, 0, 0]), (-1, &[1, 0, 1, 1])]),
            poly(4, &[(1, &[0, 0, 4, 0]), (-1, &[1, 1, 0, 1])]),
            poly(4, &[(1, &[0, 0, 0, 4]), (-1, &[1, 1, 1, 0])]),
        ],
    )
}

/// Second benchmark: {x^4, x^2 y + y^4, z + z^2 - 7x^3 - 8x^2} at
/// (0, 0, -1) (delta = 16, o = 7).
pub fn bench2<K: Scalar>() -> PolySystem<K> {
    PolySystem::new(
        3,
        vec![
            poly(3, &[(1, &[4, 0, 0])]),
            poly(3, &[(1, &[2, 1, 0]), (1, &[0, 4, 0])]),
            poly(
                3,
                &[
                    (1, &[0, 0, 1]),
                    (1, &[0, 0, 2]),
                    (-7, &[3, 0, 0]),
                    (-8, &[2, 0, 0]),
                ],
            ),
        ],
    )
}

/// Third benchmark (float domain, sqrt(5)/sqrt(7) coefficients), with the
/// approximate root Z3 = (1.5055, 0.36528) (delta = 5, o = 4, breadth 1).
pub fn bench3() -> PolySystem<f64> {
    let s5 = 5.0_f64.sqrt();
    let s7 = 7.0_f64.sqrt();
    let t = |c: f64, e: &[u32]| (Exponent::from_slice(e), c);
    let f1 = Polynomial::from_terms(
        2,
        [
            t(1.0, &[3, 0]),
            t(6.0, &[2, 1]),
            t(12.0, &[1, 2]),
            t(8.0, &[0, 3]),
            t(-3.0 * s5, &[2, 0]),
            t(-12.0 * s5, &[1, 1]),
            t(-12.0 * s5, &[0, 2]),
            t(14.0, &[1, 0]),
            t(33.0, &[0, 1]),
            t(s7 - 6.0 * s5, &[0, 0]),
        ],
    );
    let f2 = Polynomial::from_terms(
        2,
        [
            t(8.0, &[3, 0]),
            t(-12.0, &[2, 1]),
            t(6.0, &[1, 2]),
            t(-1.0, &[0, 3]),
            t(-12.0 * s7, &[2, 0]),
            t(12.0 * s7, &[1, 1]),
            t(-3.0 * s7, &[0, 2]),
            t(41.0, &[1, 0]),
            t(-18.0, &[0, 1]),
            t(-s5 - 6.0 * s7, &[0, 0]),
        ],
    );
    PolySystem::new(2, vec![f1, f2]).with_point(vec![1.5055, 0.36528])
}

/// Exact root of the third benchmark: ((sqrt5 + 2 sqrt7)/5, (2 sqrt5 - sqrt7)/5).
pub fn bench3_root() -> (f64, f64) {
    let s5 = 5.0_f64.sqrt();
    let s7 = 7.0_f64.sqrt();
    ((s5 + 2.0 * s7) / 5.0, (2.0 * s5 - s7) / 5.0)
}

/// Fourth benchmark at (0, 0, -1) (delta = 18, o = 7); the cubes are
/// expanded exactly in the polynomial ring.
pub fn bench4() -> PolySystem<Rat> {
    let f1: Polynomial<Rat> = poly(
        3,
        &[
            (2, &[1, 0, 0]),
            (2, &[2, 0, 0]),
            (2, &[0, 1, 0]),
            (2, &[0, 2, 0]),
            (1, &[0, 0, 2]),
            (-1, &[0, 0, 0]),
        ],
    );
    // (x1 + x2 - x3 - 1)^3 - x1^3
    let lin: Polynomial<Rat> = poly(
        3,
        &[
            (1, &[1, 0, 0]),
            (1, &[0, 1, 0]),
            (-1, &[0, 0, 1]),
            (-1, &[0, 0, 0]),
        ],
    );
    let f2 = &(&lin * &lin) * &lin - poly(3, &[(1, &[3, 0, 0])]);
    // (2 x1^3 + 5 x2^2 + 10 x3 + 5 x3^2 + 5)^3 - 1000 x1^5
    let g: Polynomial<Rat> = poly(
        3,
        &[
            (2, &[3, 0, 0]),
            (5, &[0, 2, 0]),
            (10, &[0, 0, 1]),
            (5, &[0, 0, 2]),
            (5, &[0, 0, 0]),
        ],
    );
    let f3 = &(&g * &g) * &g - poly(3, &[(1000, &[5, 0, 0])]);
    PolySystem::new(3, vec![f1, f2, f3])
}

pub fn origin<K: Scalar>(n: usize) -> Vec<K> {
    vec![K::zero(); n]
}

pub fn rat_point(coords: &[i64]) -> Vec<Rat> {
    coords.iter().map(|&c| Rat::from_int(c)).collect()
}
