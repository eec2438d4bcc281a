//! One-dimensional Gauss–Legendre and Gauss–Lobatto point sets on `[0, 1]`.

use crate::scalar::Real;

/// Evaluates the Legendre polynomial `P_n` and its derivative at `x ∈ [-1, 1]`.
fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    if n == 0 {
        return (p0, T::zero());
    }
    let mut p1 = x;
    for j in 2..=n {
        let jf = T::from_usize_lossy(j);
        let p2 = ((jf + jf - T::one()) * x * p1 - (jf - T::one()) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let nf = T::from_usize_lossy(n);
    // Away from the endpoints, (1 - x²) P'_n = n (P_{n-1} - x P_n).
    let dp = nf * (p0 - x * p1) / (T::one() - x * x);
    (p1, dp)
}

/// Newton iterations used for every root; converges quadratically from the
/// Chebyshev starting guesses for the degrees used in practice.
const NEWTON_STEPS: usize = 100;

/// `n`-point Gauss–Legendre rule on `[0, 1]`, points ascending.
pub fn gauss_legendre<T: Real>(n: usize) -> (Vec<T>, Vec<T>) {
    assert!(n >= 1, "Gauss rule needs at least one point");
    let mut pts = vec![T::zero(); n];
    let mut wts = vec![T::zero(); n];
    let eps = T::epsilon() * T::lit(4.0);
    let pi = T::PI();
    for i in 0..n.div_ceil(2) {
        // i-th largest root in [-1, 1]
        let mut x = (pi * (T::from_usize_lossy(i) + T::lit(0.75)) / (T::from_usize_lossy(n) + T::lit(0.5))).cos();
        let mut dp = T::one();
        for _ in 0..NEWTON_STEPS {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= eps {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = T::lit(2.0) / ((T::one() - x * x) * dp * dp);
        let half = T::lit(0.5);
        // map [-1,1] -> [0,1]
        pts[n - 1 - i] = half * (T::one() + x);
        pts[i] = half * (T::one() - x);
        wts[n - 1 - i] = half * w;
        wts[i] = half * w;
    }
    (pts, wts)
}

/// `n + 1` Gauss–Lobatto points on `[0, 1]` (roots of `(1 - x²) P'_n`), ascending.
pub fn gauss_lobatto_points<T: Real>(n: usize) -> Vec<T> {
    assert!(n >= 1);
    let mut pts = vec![T::zero(); n + 1];
    pts[n] = T::one();
    let eps = T::epsilon() * T::lit(4.0);
    let pi = T::PI();
    let nn1 = T::from_usize_lossy(n * (n + 1));
    for j in 1..n {
        let mut x = -(pi * T::from_usize_lossy(j) / T::from_usize_lossy(n)).cos();
        for _ in 0..NEWTON_STEPS {
            let (p, dp) = legendre(n, x);
            // Legendre ODE gives P'' from P and P'.
            let ddp = (T::lit(2.0) * x * dp - nn1 * p) / (T::one() - x * x);
            let dx = dp / ddp;
            x -= dx;
            if dx.abs() <= eps {
                break;
            }
        }
        pts[j] = T::lit(0.5) * (T::one() + x);
    }
    // enforce exact symmetry about 1/2
    for j in 1..=n / 2 {
        let a = pts[j];
        let b = T::one() - pts[n - j];
        let m = T::lit(0.5) * (a + b);
        pts[j] = m;
        pts[n - j] = T::one() - m;
    }
    if n % 2 == 0 {
        pts[n / 2] = T::lit(0.5);
    }
    pts
}

/// Tensor-product Gauss rule on an axis-aligned box. Points are stored
/// flat (`dim` coordinates each) in lexicographic order, first axis fastest.
pub fn tensor_gauss<T: Real>(lo: &[T], hi: &[T], n: usize) -> (Vec<T>, Vec<T>) {
    let dim = lo.len();
    let (p1, w1) = gauss_legendre::<T>(n);
    let total = n.pow(dim as u32);
    let mut pts = Vec::with_capacity(total * dim);
    let mut wts = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut w = T::one();
        for a in 0..dim {
            let i = rem % n;
            rem /= n;
            let len = hi[a] - lo[a];
            pts.push(lo[a] + len * p1[i]);
            w *= len * w1[i];
        }
        wts.push(w);
    }
    (pts, wts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_integrates_monomials_exactly() {
        for n in 1..=12 {
            let (x, w) = gauss_legendre::<f64>(n);
            for p in 0..2 * n {
                let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                assert!((s - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "n={n} p={p} s={s}");
            }
        }
    }

    #[test]
    fn two_point_gauss_values() {
        let (x, w) = gauss_legendre::<f64>(2);
        assert!((x[0] - (0.5 - 0.5 / 3f64.sqrt())).abs() < 1e-15);
        assert!((w[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lobatto_points_low_order() {
        assert_eq!(gauss_lobatto_points::<f64>(1), vec![0.0, 1.0]);
        assert_eq!(gauss_lobatto_points::<f64>(2), vec![0.0, 0.5, 1.0]);
        let p3 = gauss_lobatto_points::<f64>(3);
        assert!((p3[1] - (0.5 - 0.5 / 5f64.sqrt())).abs() < 1e-15);
        let p4 = gauss_lobatto_points::<f64>(4);
        assert!((p4[1] - (0.5 - 0.5 * (3.0f64 / 7.0).sqrt())).abs() < 1e-15);
    }

    #[test]
    fn f32_rule_is_usable() {
        let (x, w) = gauss_legendre::<f32>(4);
        let s: f32 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
        assert!((s - 1.0 / 3.0).abs() < 1e-6);
    }
}
