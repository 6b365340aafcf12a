//! Structural and numerical verification for a loaded category: pentagon
//! coherence, F-unitarity, quantum-dimension consistency and checks of
//! explicitly supplied inverse matrices. Failure is reported, not raised;
//! every residual is an entrywise max modulus so the worst index tuple can be
//! named directly.

use crate::catcore::{CategoryData, FKey, MaxAbs};
use crate::{C64, CMat};
use std::time::Instant;

/// Default tolerance for structural identities (pentagon, inverse data).
pub const TOL_STRUCTURAL: f64 = 1e-9;
/// Default tolerance for unitarity checks.
pub const TOL_UNITARY: f64 = 1e-10;

/// Outcome of one verification run.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub check: String,
    pub pass: bool,
    pub residual: f64,
    /// Human-readable description of the worst-offending index tuple.
    pub worst: String,
    pub millis: f64,
}

impl VerificationReport {
    pub fn new(check: &str, residual: f64, tol: f64, worst: String, t0: Instant) -> Self {
        VerificationReport {
            check: check.to_string(),
            pass: residual <= tol,
            residual,
            worst,
            millis: t0.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn records(&self) -> String {
        format!(
            "check={} pass={} residual={:.3e} worst={} millis={:.1}",
            self.check, self.pass, self.residual, self.worst, self.millis
        )
    }
}

impl std::fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:<18} {}  residual {:.3e}  ({})",
            self.check,
            if self.pass { "PASS" } else { "FAIL" },
            self.residual,
            self.worst
        )
    }
}

/// Pentagon coherence: for every 5-tuple `(u,v,w,t;x)` the two re-association
/// routes between the right- and left-nested fusion trees of `u⊗v⊗w⊗t → x`
/// agree. In matrix entries, with `M = F` in the crate's storage convention,
///
/// ```text
/// Σ_σ M^x_{u v y1}[(z1,g,σ),(y2,b,r)] · M^x_{z1 w t}[(z2,d,e),(y1,a,σ)]
///   = Σ_{m,μ,ν,φ} M^{y2}_{v w t}[(m,μ,ν),(y1,a,b)]
///       · M^x_{u m t}[(z2,φ,e),(y2,ν,r)] · M^{z2}_{u v w}[(z1,g,d),(m,μ,φ)]
/// ```
///
/// for all free indices. The index wiring is pinned by the bundled raw data:
/// generic rank-3 data passes only with the correct wiring.
pub fn check_pentagon(cat: &CategoryData, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let rk = cat.rank();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for u in 0..rk {
        for v in 0..rk {
            for w in 0..rk {
                for t in 0..rk {
                    for x in 0..rk {
                        let r = pentagon_residual(cat, u, v, w, t, x);
                        if r > worst {
                            worst = r;
                            worst_at = format!(
                                "({},{},{},{};{})",
                                cat.name_of(u),
                                cat.name_of(v),
                                cat.name_of(w),
                                cat.name_of(t),
                                cat.name_of(x)
                            );
                        }
                    }
                }
            }
        }
    }
    VerificationReport::new("pentagon", worst, tol, worst_at, t0)
}

/// Max residual of the pentagon identity for one 5-tuple.
pub fn pentagon_residual(cat: &CategoryData, u: usize, v: usize, w: usize, t: usize, x: usize) -> f64 {
    let rk = cat.rank();
    let n = |a: usize, b: usize, c: usize| cat.hom_dim(a, b, c);
    let mut worst = 0.0f64;
    for y1 in 0..rk {
        for a in 0..n(w, t, y1) {
            for y2 in 0..rk {
                for b in 0..n(v, y1, y2) {
                    for r in 0..n(u, y2, x) {
                        for z1 in 0..rk {
                            for g in 0..n(u, v, z1) {
                                for z2 in 0..rk {
                                    for d in 0..n(z1, w, z2) {
                                        for e in 0..n(z2, t, x) {
                                            let mut lhs = C64::new(0.0, 0.0);
                                            for s in 0..n(z1, y1, x) {
                                                lhs += cat.f_entry(u, v, y1, x, (z1, g, s), (y2, b, r))
                                                    * cat.f_entry(z1, w, t, x, (z2, d, e), (y1, a, s));
                                            }
                                            let mut rhs = C64::new(0.0, 0.0);
                                            for m in 0..rk {
                                                for mu in 0..n(v, w, m) {
                                                    for nu in 0..n(m, t, y2) {
                                                        for ph in 0..n(u, m, z2) {
                                                            rhs += cat.f_entry(v, w, t, y2, (m, mu, nu), (y1, a, b))
                                                                * cat.f_entry(u, m, t, x, (z2, ph, e), (y2, nu, r))
                                                                * cat.f_entry(u, v, w, z2, (z1, g, d), (m, mu, ph));
                                                        }
                                                    }
                                                }
                                            }
                                            worst = worst.max((lhs - rhs).norm());
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    worst
}

/// `‖F†F − I‖_max` over every stored F-matrix.
pub fn check_unitarity(cat: &CategoryData, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for (u, v, w, x) in cat.stored_fkeys() {
        let m = cat.f_matrix(u, v, w, x);
        let id = CMat::identity(m.ncols(), m.ncols());
        let r = (m.adjoint() * &m - id).max_abs();
        if r > worst {
            worst = r;
            worst_at = format!(
                "F^{}_{{{},{},{}}}",
                cat.name_of(x),
                cat.name_of(u),
                cat.name_of(v),
                cat.name_of(w)
            );
        }
    }
    VerificationReport::new("unitarity", worst, tol, worst_at, t0)
}

/// Checks a claimed inverse against the stored F-matrix at `key`:
/// both `‖F·A − I‖_max` and `‖A·F − I‖_max`.
pub fn check_inverse_data(cat: &CategoryData, claimed: &CMat, key: FKey, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let (u, v, w, x) = key;
    let m = cat.f_matrix(u, v, w, x);
    let name = format!(
        "F^{}_{{{},{},{}}}",
        cat.name_of(x),
        cat.name_of(u),
        cat.name_of(v),
        cat.name_of(w)
    );
    if claimed.nrows() != m.ncols() || claimed.ncols() != m.nrows() {
        return VerificationReport::new("inverse_data", f64::INFINITY, tol, format!("{name} shape"), t0);
    }
    let id = CMat::identity(m.nrows(), m.nrows());
    let r1 = (&m * claimed - &id).max_abs();
    let r2 = (claimed * &m - &id).max_abs();
    VerificationReport::new("inverse_data", r1.max(r2), tol, name, t0)
}

/// Quantum-dimension consistency:
/// `Σ_t dim(t)·N[s][f][t] = dim(s)·dim(f)` for all `s,f`, and
/// `Σ_{s,t} dim(s)·dim(t)·N[s][t][f] = D²·dim(f)` for all `f`.
pub fn check_dim_consistency(cat: &CategoryData, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let rk = cat.rank();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for s in 0..rk {
        for f in 0..rk {
            let lhs: f64 = (0..rk).map(|t| cat.dim(t) * cat.hom_dim(s, f, t) as f64).sum();
            let r = (lhs - cat.dim(s) * cat.dim(f)).abs();
            if r > worst {
                worst = r;
                worst_at = format!("row ({},{})", cat.name_of(s), cat.name_of(f));
            }
        }
    }
    let d2 = cat.total_dim_sq();
    for f in 0..rk {
        let lhs: f64 = (0..rk)
            .flat_map(|s| (0..rk).map(move |t| (s, t)))
            .map(|(s, t)| cat.dim(s) * cat.dim(t) * cat.hom_dim(s, t, f) as f64)
            .sum();
        let r = (lhs - d2 * cat.dim(f)).abs();
        if r > worst {
            worst = r;
            worst_at = format!("D2 row ({})", cat.name_of(f));
        }
    }
    VerificationReport::new("dim_consistency", worst, tol, worst_at, t0)
}

/// Perron-Frobenius consistency oracle: largest eigenvalue of the fusion
/// matrix `(N_a)_{bc} = N[a][b][c]` reproduces `dim(a)` for each `a`.
/// Power iteration on the (entrywise nonnegative) fusion matrices.
pub fn perron_frobenius_dims(cat: &CategoryData) -> Vec<f64> {
    let rk = cat.rank();
    let mut out = Vec::with_capacity(rk);
    for a in 0..rk {
        let mut v = vec![1.0f64; rk];
        let mut lam = 0.0;
        for _ in 0..2000 {
            let mut w = vec![0.0f64; rk];
            for b in 0..rk {
                for c in 0..rk {
                    w[c] += cat.hom_dim(a, b, c) as f64 * v[b];
                }
            }
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                break;
            }
            for x in w.iter_mut() {
                *x /= norm;
            }
            lam = (0..rk)
                .map(|c| {
                    let mut acc = 0.0;
                    for b in 0..rk {
                        acc += cat.hom_dim(a, b, c) as f64 * w[b];
                    }
                    acc * w[c]
                })
                .sum();
            v = w;
        }
        out.push(lam);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::{e_normalized, e_raw, z2, GaugeTransform};

    #[test]
    fn pentagon_bundled() {
        assert!(check_pentagon(&z2(), TOL_STRUCTURAL).pass);
        let r = check_pentagon(&e_raw(), TOL_STRUCTURAL);
        assert!(r.pass, "E_raw pentagon residual {}", r.residual);
        let r = check_pentagon(&e_normalized(), TOL_STRUCTURAL);
        assert!(r.pass, "E_normalized pentagon residual {}", r.residual);
    }

    #[test]
    fn pentagon_detects_sign_flip() {
        let mut cat = e_raw();
        let (x, y) = cat.e_fingerprint().unwrap();
        // flip entry (1,1) of F^x_{xyx} from 1 to -1 through a crafted gauge-free edit
        let mut g = GaugeTransform::identity();
        // direct mutation is not exposed; emulate by gauging the (x,y;x) vertex by -1,
        // which flips the whole 2x2 row structure and must break the pentagon.
        g.set((x, y, x), CMat::from_diagonal_element(1, 1, C64::new(-1.0, 0.0)));
        // a *consistent* gauge keeps the pentagon; so instead check that an
        // inconsistent edit fails: rescale only one of the two vertex types that
        // must transform together by hand-editing the matrix set via gauge of a
        // single vertex applied to a single matrix.
        let gauged = cat.apply_gauge(&g).unwrap();
        assert!(check_pentagon(&gauged, TOL_STRUCTURAL).pass);
        // true mutation: reparse with a flipped sign
        let src = crate::catcore::E_RAW_SRC.replacen("F x y x x\n1, 0", "F x y x x\n-1, 0", 1);
        cat = crate::catcore::parse_category(&src).unwrap();
        let r = check_pentagon(&cat, TOL_STRUCTURAL);
        assert!(!r.pass, "sign flip must break pentagon, residual {}", r.residual);
    }

    #[test]
    fn unitarity_bundled() {
        assert!(check_unitarity(&z2(), TOL_UNITARY).pass);
        assert!(check_unitarity(&e_normalized(), TOL_UNITARY).pass);
        let r = check_unitarity(&e_raw(), TOL_UNITARY);
        assert!(!r.pass, "raw basis is not unitary");
    }

    #[test]
    fn unitary_implies_unimodular_det() {
        for cat in [z2(), e_normalized()] {
            for (u, v, w, x) in cat.stored_fkeys() {
                let det = cat.f_matrix(u, v, w, x).determinant();
                assert!((det.norm() - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn inverse_data_bundled() {
        let cat = e_raw();
        let (x, _) = cat.e_fingerprint().unwrap();
        let key = (x, x, x, x);
        let claimed = cat.claimed_inverse(key).expect("appendix inverse bundled").clone();
        let r = check_inverse_data(&cat, &claimed, key, TOL_STRUCTURAL);
        assert!(r.pass, "claimed inverse residual {}", r.residual);
        // transpose is not the inverse
        let r = check_inverse_data(&cat, &claimed.transpose(), key, TOL_STRUCTURAL);
        assert!(!r.pass);
        // identity vs identity
        let z = z2();
        let e = z.label_by_name("e").unwrap();
        let idm = CMat::identity(1, 1);
        let r = check_inverse_data(&z, &idm, (e, e, e, e), TOL_STRUCTURAL);
        assert!(r.pass && r.residual == 0.0);
    }

    #[test]
    fn dims_bundled_and_mutated() {
        assert!(check_dim_consistency(&z2(), 1e-9).pass);
        assert!(check_dim_consistency(&e_raw(), 1e-9).pass);
        // dims all 1 fails on the (x,x) row with residual 3
        let src = crate::catcore::E_RAW_SRC.replace("x = 1+sqrt(3)", "x = 1");
        let cat = crate::catcore::parse_category(&src).unwrap();
        let r = check_dim_consistency(&cat, 1e-9);
        assert!(!r.pass && (r.residual - 3.0).abs() < 1e-12);
    }

    #[test]
    fn perron_frobenius_matches_dims() {
        for cat in [z2(), e_raw()] {
            let pf = perron_frobenius_dims(&cat);
            for l in 0..cat.rank() {
                assert!((pf[l] - cat.dim(l)).abs() < 1e-9, "label {l}: {} vs {}", pf[l], cat.dim(l));
            }
        }
    }

    #[test]
    fn gauge_roundtrip_and_pentagon_invariance() {
        use rand::{Rng, SeedableRng};
        let cat = e_normalized();
        let (x, y) = cat.e_fingerprint().unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut rand_mat = |n: usize| {
            CMat::from_fn(n, n, |_, _| {
                let m: f64 = rng.gen_range(0.5..2.0);
                let p: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                C64::from_polar(m, p) / (n as f64)
            }) + CMat::identity(n, n)
        };
        let mut g = GaugeTransform::identity();
        for key in [(x, x, 0), (x, x, x), (x, x, y), (x, y, x), (y, x, x), (y, y, 0)] {
            let n = cat.hom_dim(key.0, key.1, key.2);
            g.set(key, rand_mat(n));
        }
        let gauged = cat.apply_gauge(&g).unwrap();
        assert!(check_pentagon(&gauged, 1e-8).pass, "pentagon is gauge invariant");
        let back = gauged.apply_gauge(&g.inverse(&cat).unwrap()).unwrap();
        for key in cat.stored_fkeys() {
            let d = (back.f_matrix(key.0, key.1, key.2, key.3)
                - cat.f_matrix(key.0, key.1, key.2, key.3))
            .max_abs();
            assert!(d < 1e-12, "roundtrip deviation {d}");
        }
    }
}
