//! Small dense-vector helpers over coordinate slices.

use smallvec::SmallVec;

pub(crate) type Coord = SmallVec<[f64; 6]>;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn axpby(a: f64, x: &[f64], b: f64, y: &[f64]) -> Coord {
    x.iter().zip(y).map(|(xi, yi)| a * xi + b * yi).collect()
}

pub(crate) fn scale(a: f64, x: &[f64]) -> Coord {
    x.iter().map(|v| a * v).collect()
}

pub(crate) fn sub(x: &[f64], y: &[f64]) -> Coord {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

/// Orthonormal basis of the orthogonal complement of `v` (assumed nonzero).
pub(crate) fn complement_basis(v: &[f64]) -> Vec<Coord> {
    let n = v.len();
    let nv = norm(v);
    let unit: Coord = v.iter().map(|x| x / nv).collect();
    let mut basis: Vec<Coord> = Vec::with_capacity(n.saturating_sub(1));
    for i in 0..n {
        let mut e: Coord = smallvec::smallvec![0.0; n];
        e[i] = 1.0;
        let c = dot(&e, &unit);
        for (ej, uj) in e.iter_mut().zip(unit.iter()) {
            *ej -= c * uj;
        }
        for b in &basis {
            let c = dot(&e, b);
            for (ej, bj) in e.iter_mut().zip(b.iter()) {
                *ej -= c * bj;
            }
        }
        let ne = norm(&e);
        if ne > 1e-8 {
            basis.push(e.iter().map(|x| x / ne).collect());
        }
        if basis.len() + 1 == n {
            break;
        }
    }
    basis
}

/// Angle between two vectors, accurate for nearly parallel inputs.
pub(crate) fn angle(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let c = dot(a, b) / (na * nb);
    if c > 0.7 {
        let chord = a
            .iter()
            .zip(b)
            .map(|(x, y)| {
                let d = x / na - y / nb;
                d * d
            })
            .sum::<f64>()
            .sqrt();
        2.0 * (0.5 * chord).min(1.0).asin()
    } else {
        c.clamp(-1.0, 1.0).acos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complement_basis_is_orthonormal() {
        let v = [0.3, -0.2, 0.9, 0.1];
        let b = complement_basis(&v);
        assert_eq!(b.len(), 3);
        for (i, x) in b.iter().enumerate() {
            assert!(dot(x, &v).abs() < 1e-12);
            for (j, y) in b.iter().enumerate() {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(x, y) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn angle_small_and_large() {
        assert!((angle(&[1.0, 0.0], &[0.0, 1.0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let e: f64 = 1e-9;
        assert!((angle(&[1.0, 0.0], &[e.cos(), e.sin()]) - e).abs() < 1e-20);
        assert!((angle(&[1.0, 0.0], &[-1.0, 0.0]) - std::f64::consts::PI).abs() < 1e-15);
    }
}
