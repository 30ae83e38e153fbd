use crate::scalar::Real;

fn max_norm<T: Real, const N: usize>(v: &[T; N]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn combine<T: Real, const N: usize>(a: &[T; N], b: &[T; N], c: &[T; N], h: T) -> [T; N] {
    let mut out = [T::zero(); N];
    for i in 0..N {
        out[i] = (a[i] + T::lit(4.0) * b[i] + c[i]) * h / T::lit(6.0);
    }
    out
}

/// Adaptive Simpson quadrature of a vector-valued integrand on `[a, b]`.
///
/// Refines until the Richardson-corrected local error is below `tol` in the
/// max norm; `b < a` yields the negated integral.
pub fn adaptive_simpson<T, const N: usize, F>(f: &F, a: T, b: T, tol: T, max_depth: u32) -> [T; N]
where
    T: Real,
    F: Fn(T) -> [T; N],
{
    if a == b {
        return [T::zero(); N];
    }
    let fa = f(a);
    let fb = f(b);
    let m = (a + b) * T::lit(0.5);
    let fm = f(m);
    let whole = combine(&fa, &fm, &fb, b - a);
    recurse(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn recurse<T, const N: usize, F>(
    f: &F,
    a: T,
    b: T,
    fa: [T; N],
    fm: [T; N],
    fb: [T; N],
    whole: [T; N],
    tol: T,
    depth: u32,
) -> [T; N]
where
    T: Real,
    F: Fn(T) -> [T; N],
{
    let m = (a + b) * T::lit(0.5);
    let lm = (a + m) * T::lit(0.5);
    let rm = (m + b) * T::lit(0.5);
    let flm = f(lm);
    let frm = f(rm);
    let left = combine(&fa, &flm, &fm, m - a);
    let right = combine(&fm, &frm, &fb, b - m);
    let mut delta = [T::zero(); N];
    for i in 0..N {
        delta[i] = left[i] + right[i] - whole[i];
    }
    if depth == 0 || max_norm(&delta) <= T::lit(15.0) * tol {
        let mut out = [T::zero(); N];
        for i in 0..N {
            out[i] = left[i] + right[i] + delta[i] / T::lit(15.0);
        }
        return out;
    }
    let half = tol * T::lit(0.5);
    let l = recurse(f, a, m, fa, flm, fm, left, half, depth - 1);
    let r = recurse(f, m, b, fm, frm, fb, right, half, depth - 1);
    let mut out = [T::zero(); N];
    for i in 0..N {
        out[i] = l[i] + r[i];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_power_law() {
        let f = |r: f64| [r.powf(-1.5), r.ln()];
        let got = adaptive_simpson(&f, 1.0, 50.0, 1e-12, 40);
        let exact0 = 2.0 * (1.0 - 50f64.powf(-0.5));
        let exact1 = 50.0 * 50f64.ln() - 49.0;
        assert!((got[0] - exact0).abs() < 1e-10);
        assert!((got[1] - exact1).abs() < 1e-9);
        let back = adaptive_simpson(&f, 50.0, 1.0, 1e-12, 40);
        assert!((back[0] + exact0).abs() < 1e-10);
    }
}
