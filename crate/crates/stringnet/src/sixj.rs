//! (+) and (−) 6j-symbols computed from F-matrices, the derived G-matrices,
//! and the symmetry checks: mirror conjugate symmetry, unitarity of the 6j
//! blocks, the loop-insertion identity, and the (failing, for the bundled
//! rank-3 category) tetrahedral symmetries.
//!
//! Index conventions. For `{u v y(a b); w x z(g d)}₊`:
//!   `a ∈ Hom(u⊗y, w)`, `b ∈ Hom(y⊗x, v)`, `g ∈ Hom(w⊗x, z)`, `d ∈ Hom(u⊗v, z)`,
//! and the value is `√(dim y · dim z)/√(dim v · dim w) · F^z_{uyx}[(w,a,g),(v,b,d)]`.
//! For `{u v y(a b); w x z(g d)}₋`:
//!   `a ∈ Hom(y⊗v, x)`, `b ∈ Hom(w⊗y, u)`, same `g, d` slots, value
//!   `√(dim y · dim z)/√(dim u · dim x) · (F^z_{wyv})⁻¹[(x,a,g),(u,b,d)]`.
//! Per fixed `(u,v,w,x)` the symbols assemble into a square matrix with rows
//! `(z,g,d)` and columns `(y,a,b)`.

use crate::catcore::{CategoryData, FKey, MaxAbs};
use crate::verify::VerificationReport;
use crate::{C64, CMat};
use std::collections::{BTreeMap, HashMap};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SixJError {
    #[error("F-matrix F^{x}_{{{u},{v},{w}}} is numerically singular (cond > 1e12)")]
    SingularF { u: String, v: String, w: String, x: String },
    #[error("category '{0}' fails unitarity; G-matrices are defined only on a unitary basis")]
    NotUnitary(String),
}

/// Sign of a 6j table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// One table of 6j-symbols, indexed by six labels and four basis indices.
#[derive(Debug, Clone)]
pub struct SixJTable {
    pub sign: Sign,
    /// (u,v,y,w,x,z) -> values[a][b][g][d] flattened as a*nb*ng*nd + ...
    tab: BTreeMap<(usize, usize, usize, usize, usize, usize), (Vec<C64>, [usize; 4])>,
}

impl SixJTable {
    /// Value at labels `(u,v,y,w,x,z)` and basis indices `(a,b,g,d)`,
    /// zero when inadmissible.
    pub fn get(&self, l: (usize, usize, usize, usize, usize, usize), idx: (usize, usize, usize, usize)) -> C64 {
        match self.tab.get(&l) {
            None => C64::new(0.0, 0.0),
            Some((vals, sh)) => {
                let (a, b, g, d) = idx;
                if a >= sh[0] || b >= sh[1] || g >= sh[2] || d >= sh[3] {
                    return C64::new(0.0, 0.0);
                }
                vals[((a * sh[1] + b) * sh[2] + g) * sh[3] + d]
            }
        }
    }

    pub fn shape(&self, l: (usize, usize, usize, usize, usize, usize)) -> Option<[usize; 4]> {
        self.tab.get(&l).map(|(_, s)| *s)
    }

    pub fn keys(&self) -> impl Iterator<Item = &(usize, usize, usize, usize, usize, usize)> {
        self.tab.keys()
    }

    /// Structured text dump: one record per entry, re/im at 17 significant digits.
    pub fn export(&self, cat: &CategoryData) -> String {
        let mut keys: Vec<_> = self.tab.keys().copied().collect();
        keys.sort_unstable();
        let mut out = String::new();
        let sgn = if self.sign == Sign::Plus { "+" } else { "-" };
        for k in keys {
            let (vals, sh) = &self.tab[&k];
            let (u, v, y, w, x, z) = k;
            for a in 0..sh[0] {
                for b in 0..sh[1] {
                    for g in 0..sh[2] {
                        for d in 0..sh[3] {
                            let val = vals[((a * sh[1] + b) * sh[2] + g) * sh[3] + d];
                            out.push_str(&format!(
                                "sixj{} u={} v={} y={} w={} x={} z={} a={} b={} g={} d={} re={:.17e} im={:.17e}\n",
                                sgn,
                                cat.name_of(u),
                                cat.name_of(v),
                                cat.name_of(y),
                                cat.name_of(w),
                                cat.name_of(x),
                                cat.name_of(z),
                                a, b, g, d, val.re, val.im
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Compute the (+) table from F-matrices.
pub fn compute_plus(cat: &CategoryData) -> SixJTable {
    let rk = cat.rank();
    let mut tab = BTreeMap::new();
    for u in 0..rk {
        for v in 0..rk {
            for y in 0..rk {
                for w in 0..rk {
                    for x in 0..rk {
                        for z in 0..rk {
                            let sh = [
                                cat.hom_dim(u, y, w),
                                cat.hom_dim(y, x, v),
                                cat.hom_dim(w, x, z),
                                cat.hom_dim(u, v, z),
                            ];
                            if sh.iter().any(|&s| s == 0) {
                                continue;
                            }
                            let m = cat.f_matrix(u, y, x, z);
                            let rows = cat.row_triples(u, y, x, z);
                            let cols = cat.col_triples(u, y, x, z);
                            let pref = (cat.dim(y) * cat.dim(z)).sqrt() / (cat.dim(v) * cat.dim(w)).sqrt();
                            let mut vals = Vec::with_capacity(sh.iter().product());
                            for a in 0..sh[0] {
                                for b in 0..sh[1] {
                                    for g in 0..sh[2] {
                                        for d in 0..sh[3] {
                                            let ri = rows.iter().position(|&t| t == (w, a, g)).unwrap();
                                            let ci = cols.iter().position(|&t| t == (v, b, d)).unwrap();
                                            vals.push(pref * m[(ri, ci)]);
                                        }
                                    }
                                }
                            }
                            tab.insert((u, v, y, w, x, z), (vals, sh));
                        }
                    }
                }
            }
        }
    }
    SixJTable { sign: Sign::Plus, tab }
}

/// Compute the (−) table; F-inverses are dense solves with a condition guard.
pub fn compute_minus(cat: &CategoryData) -> Result<SixJTable, SixJError> {
    let rk = cat.rank();
    let mut inv_cache: HashMap<FKey, CMat> = HashMap::new();
    let mut tab = BTreeMap::new();
    for u in 0..rk {
        for v in 0..rk {
            for y in 0..rk {
                for w in 0..rk {
                    for x in 0..rk {
                        for z in 0..rk {
                            let sh = [
                                cat.hom_dim(y, v, x),
                                cat.hom_dim(w, y, u),
                                cat.hom_dim(w, x, z),
                                cat.hom_dim(u, v, z),
                            ];
                            if sh.iter().any(|&s| s == 0) {
                                continue;
                            }
                            let key = (w, y, v, z);
                            if !inv_cache.contains_key(&key) {
                                let m = cat.f_matrix(w, y, v, z);
                                let svd = m.clone().svd(false, false);
                                let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
                                let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
                                if smin <= 0.0 || smax / smin > 1e12 {
                                    return Err(SixJError::SingularF {
                                        u: cat.name_of(w),
                                        v: cat.name_of(y),
                                        w: cat.name_of(v),
                                        x: cat.name_of(z),
                                    });
                                }
                                inv_cache.insert(key, m.try_inverse().unwrap());
                            }
                            let mi = &inv_cache[&key];
                            // F rows (z-type) index Minv columns; F cols (y-type) index Minv rows
                            let rows = cat.row_triples(w, y, v, z);
                            let cols = cat.col_triples(w, y, v, z);
                            let pref = (cat.dim(y) * cat.dim(z)).sqrt() / (cat.dim(u) * cat.dim(x)).sqrt();
                            let mut vals = Vec::with_capacity(sh.iter().product());
                            for a in 0..sh[0] {
                                for b in 0..sh[1] {
                                    for g in 0..sh[2] {
                                        for d in 0..sh[3] {
                                            let ci = cols.iter().position(|&t| t == (x, a, g)).unwrap();
                                            let ri = rows.iter().position(|&t| t == (u, b, d)).unwrap();
                                            vals.push(pref * mi[(ci, ri)]);
                                        }
                                    }
                                }
                            }
                            tab.insert((u, v, y, w, x, z), (vals, sh));
                        }
                    }
                }
            }
        }
    }
    Ok(SixJTable { sign: Sign::Minus, tab })
}

/// Splitting-tree associativity matrices, defined (on a unitary basis) by
/// `(G^{uvw}_x)^{y b a}_{z d g} = conj (F^x_{uvw})^{y a b}_{z g d}`.
#[derive(Debug, Clone)]
pub struct GMatrixSet {
    pub mats: HashMap<FKey, CMat>,
}

/// Derive G from F; refuses when the category fails `check_unitarity`, since
/// the defining theorem assumes a unitary basis.
pub fn compute_g(cat: &CategoryData, tol: f64) -> Result<GMatrixSet, SixJError> {
    let rep = crate::verify::check_unitarity(cat, tol);
    if !rep.pass {
        return Err(SixJError::NotUnitary(cat.name.clone()));
    }
    let mut mats = HashMap::new();
    for key in cat.stored_fkeys() {
        let (u, v, w, x) = key;
        let m = cat.f_matrix(u, v, w, x);
        let rows = cat.row_triples(u, v, w, x);
        let cols = cat.col_triples(u, v, w, x);
        // G rows are (z, d, g) and columns (y, b, a): the same index pairs as
        // F with the two basis slots in swapped roles, each list sorted
        // lexicographically in its own order.
        let mut rows_g: Vec<(usize, usize, usize)> = rows.iter().map(|&(z, g, d)| (z, d, g)).collect();
        rows_g.sort_unstable();
        let mut cols_g: Vec<(usize, usize, usize)> = cols.iter().map(|&(y, a, b)| (y, b, a)).collect();
        cols_g.sort_unstable();
        let mut g = CMat::zeros(rows.len(), cols.len());
        for (ri, &(z, gg, dd)) in rows.iter().enumerate() {
            for (ci, &(y, aa, bb)) in cols.iter().enumerate() {
                let gr = rows_g.iter().position(|&t| t == (z, dd, gg)).unwrap();
                let gc = cols_g.iter().position(|&t| t == (y, bb, aa)).unwrap();
                g[(gr, gc)] = m[(ri, ci)].conj();
            }
        }
        mats.insert(key, g);
    }
    Ok(GMatrixSet { mats })
}

/// Mirror conjugate symmetry:
/// `{w x y(b a); u v z(d g)}₋ = conj {u v y(a b); w x z(g d)}₊`.
pub fn check_mirror_conjugate(plus: &SixJTable, minus: &SixJTable, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for (&(u, v, y, w, x, z), (vals, sh)) in &plus.tab {
        for a in 0..sh[0] {
            for b in 0..sh[1] {
                for g in 0..sh[2] {
                    for d in 0..sh[3] {
                        let p = vals[((a * sh[1] + b) * sh[2] + g) * sh[3] + d];
                        let m = minus.get((w, x, y, u, v, z), (b, a, d, g));
                        let r = (m - p.conj()).norm();
                        if r > worst {
                            worst = r;
                            worst_at = format!("({u},{v},{y},{w},{x},{z})[{a}{b}{g}{d}]");
                        }
                    }
                }
            }
        }
    }
    VerificationReport::new("mirror_conjugate", worst, tol, worst_at, t0)
}

/// Assemble the 6j block matrix at fixed `(u,v,w,x)`: rows `(z,g,d)`,
/// columns `(y,a,b)`. Returns `None` when empty.
pub fn sixj_block(cat: &CategoryData, plus: &SixJTable, u: usize, v: usize, w: usize, x: usize) -> Option<CMat> {
    let rk = cat.rank();
    let mut rows = Vec::new();
    for z in 0..rk {
        for g in 0..cat.hom_dim(w, x, z) {
            for d in 0..cat.hom_dim(u, v, z) {
                rows.push((z, g, d));
            }
        }
    }
    let mut cols = Vec::new();
    for y in 0..rk {
        for a in 0..cat.hom_dim(u, y, w) {
            for b in 0..cat.hom_dim(y, x, v) {
                cols.push((y, a, b));
            }
        }
    }
    if rows.is_empty() || cols.is_empty() {
        return None;
    }
    let mut m = CMat::zeros(rows.len(), cols.len());
    for (ri, &(z, g, d)) in rows.iter().enumerate() {
        for (ci, &(y, a, b)) in cols.iter().enumerate() {
            m[(ri, ci)] = plus.get((u, v, y, w, x, z), (a, b, g, d));
        }
    }
    Some(m)
}

/// Unitarity of every 6j block: `‖M†M − I‖_max ≤ tol`.
pub fn check_sixj_unitarity(cat: &CategoryData, plus: &SixJTable, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let rk = cat.rank();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for u in 0..rk {
        for v in 0..rk {
            for w in 0..rk {
                for x in 0..rk {
                    if let Some(m) = sixj_block(cat, plus, u, v, w, x) {
                        debug_assert_eq!(m.nrows(), m.ncols());
                        let id = CMat::identity(m.ncols(), m.ncols());
                        let r = (m.adjoint() * &m - id).max_abs();
                        if r > worst {
                            worst = r;
                            worst_at = format!(
                                "({},{},{},{})",
                                cat.name_of(u),
                                cat.name_of(v),
                                cat.name_of(w),
                                cat.name_of(x)
                            );
                        }
                    }
                }
            }
        }
    }
    VerificationReport::new("sixj_unitarity", worst, tol, worst_at, t0)
}

/// Loop-insertion identity: for all `(g, g', t)` and z-slot indices,
/// `dim(g')·Σ_{s,η,ε} {g g s(η ε); g' g' 1}₊ · conj {g g s(η ε); g' g' t(c1 c2)}₊`
/// equals `dim(g')` exactly when `t = 1` and `0` otherwise.
pub fn check_loop_identity(cat: &CategoryData, plus: &SixJTable, tol: f64) -> VerificationReport {
    let t0 = Instant::now();
    let rk = cat.rank();
    let e = cat.unit();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    for g in 0..rk {
        for gp in 0..rk {
            if cat.hom_dim(g, g, e) == 0 || cat.hom_dim(gp, gp, e) == 0 {
                continue;
            }
            for t in 0..rk {
                let n1 = cat.hom_dim(gp, gp, t);
                let n2 = cat.hom_dim(g, g, t);
                for c1 in 0..n1 {
                    for c2 in 0..n2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for s in 0..rk {
                            let sh = match plus.shape((g, g, s, gp, gp, e)) {
                                Some(sh) => sh,
                                None => continue,
                            };
                            for eta in 0..sh[0] {
                                for eps in 0..sh[1] {
                                    let p1 = plus.get((g, g, s, gp, gp, e), (eta, eps, 0, 0));
                                    let p2 = plus.get((g, g, s, gp, gp, t), (eta, eps, c1, c2));
                                    acc += p1 * p2.conj();
                                }
                            }
                        }
                        acc *= C64::from(cat.dim(gp));
                        let want = if t == e { C64::from(cat.dim(gp)) } else { C64::new(0.0, 0.0) };
                        let r = (acc - want).norm();
                        if r > worst {
                            worst = r;
                            worst_at = format!("(g={},g'={},t={})", cat.name_of(g), cat.name_of(gp), cat.name_of(t));
                        }
                    }
                }
            }
        }
    }
    VerificationReport::new("loop_identity", worst, tol, worst_at, t0)
}

/// One violated tetrahedral relation.
#[derive(Debug, Clone)]
pub struct TetraViolation {
    pub relation: String,
    pub labels: (usize, usize, usize, usize, usize, usize),
    pub residual: f64,
}

/// Result of the tetrahedral symmetry check: condition (a) — table equality
/// `{..}₊ = {..(b a)..}₋` on all tuples — plus the generator relations on
/// multiplicity-free tuples.
#[derive(Debug, Clone)]
pub struct TetraReport {
    pub report: VerificationReport,
    pub violations: Vec<TetraViolation>,
}

/// Check the 24 tetrahedral symmetries through their generators.
pub fn check_tetrahedral(cat: &CategoryData, plus: &SixJTable, minus: &SixJTable, tol: f64) -> TetraReport {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut worst_at = String::from("-");
    let mut violations = Vec::new();
    // (a) plus = minus with the (b a) index transposition, all tuples
    for (&k, (vals, sh)) in &plus.tab {
        let mut r = 0.0f64;
        for a in 0..sh[0] {
            for b in 0..sh[1] {
                for g in 0..sh[2] {
                    for d in 0..sh[3] {
                        let p = vals[((a * sh[1] + b) * sh[2] + g) * sh[3] + d];
                        let m = minus.get(k, (b, a, g, d));
                        r = r.max((p - m).norm());
                    }
                }
            }
        }
        if r > tol {
            violations.push(TetraViolation {
                relation: "plus=minus".into(),
                labels: k,
                residual: r,
            });
        }
        if r > worst {
            worst = r;
            worst_at = format!("plus=minus at {:?}", k);
        }
    }
    // (b) generator relations on multiplicity-free tuples
    let mult_free = |k: (usize, usize, usize, usize, usize, usize)| {
        plus.shape(k).map(|sh| sh == [1, 1, 1, 1]).unwrap_or(false)
    };
    let keys: Vec<_> = plus.tab.keys().copied().collect();
    for k in keys {
        let (u, v, y, w, x, z) = k;
        if !mult_free(k) {
            continue;
        }
        let t = plus.get(k, (0, 0, 0, 0));
        let checks: Vec<(&str, (usize, usize, usize, usize, usize, usize), C64)> = vec![
            ("swap-columns", (v, u, y, x, w, z), C64::from(1.0)),
            ("flip-rows", (x, w, y, v, u, z), C64::from(1.0)),
            (
                "cyclic",
                (y, x, w, u, z, v),
                C64::from((cat.dim(y) * cat.dim(z)).sqrt() / (cat.dim(v) * cat.dim(w)).sqrt()),
            ),
        ];
        for (name, kk, scale) in checks {
            if !mult_free(kk) {
                continue;
            }
            let other = plus.get(kk, (0, 0, 0, 0));
            let r = (t - other * scale).norm();
            if r > tol {
                violations.push(TetraViolation { relation: name.into(), labels: k, residual: r });
            }
            if r > worst {
                worst = r;
                worst_at = format!("{name} at {:?}", k);
            }
        }
    }
    TetraReport {
        report: VerificationReport::new("tetrahedral", worst, tol, worst_at, t0),
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catcore::{e_normalized, e_raw, z2};

    #[test]
    fn mirror_and_unitarity_theorem() {
        for cat in [z2(), e_normalized()] {
            let plus = compute_plus(&cat);
            let minus = compute_minus(&cat).unwrap();
            let r = check_mirror_conjugate(&plus, &minus, 1e-10);
            assert!(r.pass, "{}: mirror residual {}", cat.name, r.residual);
            let r = check_sixj_unitarity(&cat, &plus, 1e-10);
            assert!(r.pass, "{}: 6j unitarity residual {}", cat.name, r.residual);
        }
    }

    #[test]
    fn raw_basis_fails_mirror() {
        let cat = e_raw();
        let plus = compute_plus(&cat);
        let minus = compute_minus(&cat).unwrap();
        let r = check_mirror_conjugate(&plus, &minus, 1e-10);
        assert!(!r.pass);
    }

    #[test]
    fn unit_symbol_is_one() {
        for cat in [z2(), e_normalized()] {
            let plus = compute_plus(&cat);
            let e = cat.unit();
            let v = plus.get((e, e, e, e, e, e), (0, 0, 0, 0));
            assert!((v - C64::from(1.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn specific_value_xxyxxy() {
        // all four Hom spaces one-dimensional; value -1/(1+sqrt 3)
        let cat = e_normalized();
        let (x, y) = cat.e_fingerprint().unwrap();
        let plus = compute_plus(&cat);
        let v = plus.get((x, x, y, x, x, y), (0, 0, 0, 0));
        let want = -1.0 / (1.0 + 3f64.sqrt());
        assert!((v - C64::from(want)).norm() < 1e-14, "{v} vs {want}");
    }

    #[test]
    fn loop_identity_bundled() {
        for cat in [z2(), e_normalized()] {
            let plus = compute_plus(&cat);
            let r = check_loop_identity(&cat, &plus, 1e-9);
            assert!(r.pass, "{}: loop residual {}", cat.name, r.residual);
        }
    }

    #[test]
    fn reconstruct_f_from_plus() {
        // inverting the defining formula reproduces F entrywise
        for cat in [z2(), e_normalized(), e_raw()] {
            let plus = compute_plus(&cat);
            let mut worst = 0.0f64;
            for (u, y, x, z) in cat.stored_fkeys() {
                let m = cat.f_matrix(u, y, x, z);
                let rows = cat.row_triples(u, y, x, z);
                let cols = cat.col_triples(u, y, x, z);
                for (ri, &(w, a, g)) in rows.iter().enumerate() {
                    for (ci, &(v, b, d)) in cols.iter().enumerate() {
                        let p = plus.get((u, v, y, w, x, z), (a, b, g, d));
                        let back = p * (cat.dim(v) * cat.dim(w)).sqrt() / (cat.dim(y) * cat.dim(z)).sqrt();
                        worst = worst.max((back - m[(ri, ci)]).norm());
                    }
                }
            }
            assert!(worst < 1e-12, "{}: reconstruction residual {}", cat.name, worst);
        }
    }

    #[test]
    fn g_matrices() {
        let cat = e_normalized();
        let g = compute_g(&cat, 1e-10).unwrap();
        for (key, m) in &g.mats {
            let id = CMat::identity(m.ncols(), m.ncols());
            assert!((m.adjoint() * m - id).max_abs() < 1e-12, "G unitary at {key:?}");
        }
        // Z2: all G = 1
        let z = z2();
        let gz = compute_g(&z, 1e-10).unwrap();
        for m in gz.mats.values() {
            assert!((m[(0, 0)] - C64::from(1.0)).norm() < 1e-14);
        }
        // raw basis refused: theorem hypothesis violated
        assert!(matches!(compute_g(&e_raw(), 1e-10), Err(SixJError::NotUnitary(_))));
    }

    #[test]
    fn tetrahedral_fails_on_e_passes_on_z2() {
        let z = z2();
        let pz = compute_plus(&z);
        let mz = compute_minus(&z).unwrap();
        let rep = check_tetrahedral(&z, &pz, &mz, 1e-9);
        assert!(rep.report.pass, "Z2 residual {}", rep.report.residual);
        let cat = e_normalized();
        let p = compute_plus(&cat);
        let m = compute_minus(&cat).unwrap();
        let rep = check_tetrahedral(&cat, &p, &m, 1e-9);
        assert!(!rep.report.pass);
        assert!(rep.violations.iter().any(|v| v.relation == "plus=minus"));
    }

    #[test]
    fn table_export_format() {
        let z = z2();
        let p = compute_plus(&z);
        let dump = p.export(&z);
        assert!(dump.lines().count() > 0);
        assert!(dump.lines().all(|l| l.starts_with("sixj+")));
    }
}
