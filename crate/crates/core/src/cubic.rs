//! Real roots of a monic cubic `x³ + b x² + c x + d`.
//!
//! Closed form (trigonometric for three real roots, Cardano otherwise) on the
//! depressed cubic, followed by Newton polishing on the original polynomial.

/// Evaluates `x³ + b x² + c x + d` and its derivative.
#[inline]
pub fn eval_monic(b: f64, c: f64, d: f64, x: f64) -> (f64, f64) {
    let p = ((x + b) * x + c) * x + d;
    let dp = (3.0 * x + 2.0 * b) * x + c;
    (p, dp)
}

fn polish(b: f64, c: f64, d: f64, mut x: f64) -> f64 {
    for _ in 0..8 {
        let (p, dp) = eval_monic(b, c, d, x);
        if dp == 0.0 || !dp.is_finite() {
            break;
        }
        let step = p / dp;
        let next = x - step;
        if !next.is_finite() {
            break;
        }
        // Near a double root Newton can overshoot; accept only improvements.
        let (pn, _) = eval_monic(b, c, d, next);
        if pn.abs() > p.abs() {
            break;
        }
        x = next;
        if step.abs() <= 4.0 * f64::EPSILON * x.abs() {
            break;
        }
    }
    x
}

/// All real roots, ascending. One or three entries; a double root appears twice.
pub fn real_roots(b: f64, c: f64, d: f64) -> Vec<f64> {
    // x = t - b/3  ->  t³ + p t + q = 0
    let shift = b / 3.0;
    let p = c - b * shift;
    let q = d - shift * c + 2.0 * shift * shift * shift;

    let scale = p.abs().max(q.abs().powf(2.0 / 3.0)).max(f64::MIN_POSITIVE);
    let mut roots = if p.abs() <= 1e-300 && q.abs() <= 1e-300 {
        vec![-shift; 3]
    } else {
        let half_q = 0.5 * q;
        let third_p = p / 3.0;
        let disc = half_q * half_q + third_p * third_p * third_p;
        if disc > 1e-14 * scale * scale * scale {
            let sq = disc.sqrt();
            // Cardano with the cancellation-free branch.
            let u = -(half_q + half_q.signum() * sq);
            let a = u.cbrt();
            let t = if a != 0.0 { a - third_p / a } else { 0.0 };
            vec![t - shift]
        } else if disc < -1e-14 * scale * scale * scale {
            let m = 2.0 * (-third_p).sqrt();
            let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            let tau = 2.0 * std::f64::consts::PI / 3.0;
            (0..3)
                .map(|k| m * (theta - tau * k as f64).cos() - shift)
                .collect()
        } else {
            // Double root: t1 = 3q/p (simple), t2 = -3q/(2p) (double).
            if p == 0.0 {
                vec![-shift; 3]
            } else {
                let simple = 3.0 * q / p;
                let double = -1.5 * q / p;
                vec![simple - shift, double - shift, double - shift]
            }
        }
    };
    for r in roots.iter_mut() {
        *r = polish(b, c, d, *r);
    }
    roots.sort_by(|x, y| x.partial_cmp(y).unwrap());
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn from_roots(r: [f64; 3]) -> (f64, f64, f64) {
        let b = -(r[0] + r[1] + r[2]);
        let c = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let d = -r[0] * r[1] * r[2];
        (b, c, d)
    }

    #[test]
    fn three_distinct_roots() {
        let (b, c, d) = from_roots([-1.0, 2.0, 5.0]);
        let r = real_roots(b, c, d);
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([-1.0, 2.0, 5.0]) {
            assert!((x - e).abs() < 1e-13);
        }
    }

    #[test]
    fn single_real_root() {
        // (x - 2)(x² + 1)
        let r = real_roots(-2.0, 1.0, -2.0);
        assert_eq!(r.len(), 1);
        assert!((r[0] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn double_and_triple_roots() {
        let (b, c, d) = from_roots([1.0, 3.0, 3.0]);
        let r = real_roots(b, c, d);
        assert_eq!(r.len(), 3);
        assert!((r[0] - 1.0).abs() < 1e-12);
        assert!((r[1] - 3.0).abs() < 1e-6 && (r[2] - 3.0).abs() < 1e-6);

        let r = real_roots(-6.0, 12.0, -8.0);
        assert!(r.iter().all(|x| (x - 2.0).abs() < 1e-4));
    }

    proptest! {
        #[test]
        fn recovers_well_separated_roots(
            a in -1e3f64..1e3, gap1 in 1e-2f64..1e3, gap2 in 1e-2f64..1e3
        ) {
            let roots = [a, a + gap1, a + gap1 + gap2];
            let (b, c, d) = from_roots(roots);
            let r = real_roots(b, c, d);
            prop_assert_eq!(r.len(), 3);
            let span = roots[2].abs().max(roots[0].abs()).max(1.0);
            for (x, e) in r.iter().zip(roots) {
                prop_assert!((x - e).abs() <= 1e-7 * span, "{} vs {}", x, e);
            }
        }
    }
}
