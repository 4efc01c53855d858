//! Shared helpers for integration tests.
//!
//! The Bessel evaluations use the classic rational/asymptotic fits (absolute
//! accuracy around 1e-8), which is far below every tolerance they back. Only
//! orders 0..=3 are needed; higher orders come from the upward recurrence,
//! which is harmless at these arguments.

#![allow(dead_code)]

pub fn bessel_j0(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 8.0 {
        let y = x * x;
        let num = 57568490574.0
            + y * (-13362590354.0
                + y * (651619640.7 + y * (-11214424.18 + y * (77392.33017 + y * (-184.9052456)))));
        let den = 57568490411.0
            + y * (1029532985.0 + y * (9494680.718 + y * (59272.64853 + y * (267.8532712 + y))));
        num / den
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 0.785398164;
        let p0 = 1.0
            + y * (-0.1098628627e-2
                + y * (0.2734510407e-4 + y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
        let q0 = -0.1562499995e-1
            + y * (0.1430488765e-3
                + y * (-0.6911147651e-5 + y * (0.7621095161e-6 + y * (-0.934935152e-7))));
        (0.636619772 / ax).sqrt() * (xx.cos() * p0 - z * xx.sin() * q0)
    }
}

pub fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    let j = if ax < 8.0 {
        let y = x * x;
        let num = x
            * (72362614232.0
                + y * (-7895059235.0
                    + y * (242396853.1
                        + y * (-2972611.439 + y * (15704.48260 + y * (-30.16036606))))));
        let den = 144725228442.0
            + y * (2300535178.0 + y * (18583304.74 + y * (99447.43394 + y * (376.9991397 + y))));
        num / den
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let xx = ax - 2.356194491;
        let p1 = 1.0
            + y * (0.183105e-2
                + y * (-0.3516396496e-4 + y * (0.2457520174e-5 + y * (-0.240337019e-6))));
        let q1 = 0.04687499995
            + y * (-0.2002690873e-3
                + y * (0.8449199096e-5 + y * (-0.88228987e-6 + y * 0.105787412e-6)));
        let v = (0.636619772 / ax).sqrt() * (xx.cos() * p1 - z * xx.sin() * q1);
        if x < 0.0 {
            -v
        } else {
            v
        }
    };
    j
}

pub fn bessel_y0(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 8.0 {
        let y = x * x;
        let num = -2957821389.0
            + y * (7062834065.0
                + y * (-512359803.6 + y * (10879881.29 + y * (-86327.92757 + y * 228.4622733))));
        let den = 40076544269.0
            + y * (745249964.8 + y * (7189466.438 + y * (47447.26470 + y * (226.1030244 + y))));
        num / den + 0.636619772 * bessel_j0(x) * x.ln()
    } else {
        let z = 8.0 / x;
        let y = z * z;
        let xx = x - 0.785398164;
        let p0 = 1.0
            + y * (-0.1098628627e-2
                + y * (0.2734510407e-4 + y * (-0.2073370639e-5 + y * 0.2093887211e-6)));
        let q0 = -0.1562499995e-1
            + y * (0.1430488765e-3
                + y * (-0.6911147651e-5 + y * (0.7621095161e-6 + y * (-0.934935152e-7))));
        (0.636619772 / x).sqrt() * (xx.sin() * p0 + z * xx.cos() * q0)
    }
}

pub fn bessel_y1(x: f64) -> f64 {
    assert!(x > 0.0);
    if x < 8.0 {
        let y = x * x;
        let num = x
            * (-4.900604943e13
                + y * (1.275274390e13
                    + y * (-5.153438139e11
                        + y * (7.349264551e9 + y * (-4.237922726e7 + y * 8.511937935e4)))));
        let den = 2.499580570e14
            + y * (4.244419664e12
                + y * (3.733650367e10 + y * (2.245904002e8 + y * (1.020426050e6 + y * (3.549632885e3 + y)))));
        num / den + 0.636619772 * (bessel_j1(x) * x.ln() - 1.0 / x)
    } else {
        let z = 8.0 / x;
        let y = z * z;
        let xx = x - 2.356194491;
        let p1 = 1.0
            + y * (0.183105e-2
                + y * (-0.3516396496e-4 + y * (0.2457520174e-5 + y * (-0.240337019e-6))));
        let q1 = 0.04687499995
            + y * (-0.2002690873e-3
                + y * (0.8449199096e-5 + y * (-0.88228987e-6 + y * 0.105787412e-6)));
        (0.636619772 / x).sqrt() * (xx.sin() * p1 + z * xx.cos() * q1)
    }
}

/// `J_m(x)` by upward recurrence from orders 0 and 1. Fine for `m <= 3` at
/// the argument sizes exercised here.
pub fn bessel_jm(m: usize, x: f64) -> f64 {
    match m {
        0 => bessel_j0(x),
        1 => bessel_j1(x),
        _ => {
            let mut prev = bessel_j0(x);
            let mut cur = bessel_j1(x);
            for k in 1..m {
                let next = (2.0 * k as f64 / x) * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

pub fn bessel_ym(m: usize, x: f64) -> f64 {
    match m {
        0 => bessel_y0(x),
        1 => bessel_y1(x),
        _ => {
            let mut prev = bessel_y0(x);
            let mut cur = bessel_y1(x);
            for k in 1..m {
                let next = (2.0 * k as f64 / x) * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

pub fn bessel_jm_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        -bessel_j1(x)
    } else {
        bessel_jm(m - 1, x) - (m as f64 / x) * bessel_jm(m, x)
    }
}

pub fn bessel_ym_prime(m: usize, x: f64) -> f64 {
    if m == 0 {
        -bessel_y1(x)
    } else {
        bessel_ym(m - 1, x) - (m as f64 / x) * bessel_ym(m, x)
    }
}

/// Positive roots `k` of the Neumann cross product
/// `J_m'(k r0) Y_m'(k r1) - J_m'(k r1) Y_m'(k r0)`; `k^2` are the Neumann
/// eigenvalues of `-Laplace` on the annulus restricted to angular mode `m`.
pub fn neumann_annulus_roots(m: usize, r0: f64, r1: f64, count: usize) -> Vec<f64> {
    let f = |k: f64| {
        bessel_jm_prime(m, k * r0) * bessel_ym_prime(m, k * r1)
            - bessel_jm_prime(m, k * r1) * bessel_ym_prime(m, k * r0)
    };
    let mut roots = Vec::new();
    let step = 0.01;
    let mut k = 0.05;
    let mut fk = f(k);
    while roots.len() < count && k < 200.0 {
        let k2 = k + step;
        let f2 = f(k2);
        if fk == 0.0 {
            roots.push(k);
        } else if fk.signum() != f2.signum() {
            let (mut lo, mut hi) = (k, k2);
            let mut flo = fk;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo.signum() != fm.signum() {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        k = k2;
        fk = f2;
    }
    assert_eq!(roots.len(), count, "did not find enough cross-product roots");
    roots
}

/// Observed convergence order from three successive errors on halved grids.
pub fn observed_order(err_coarse: f64, err_fine: f64) -> f64 {
    (err_coarse / err_fine).ln() / std::f64::consts::LN_2
}
