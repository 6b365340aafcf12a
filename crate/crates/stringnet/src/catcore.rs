//! Data model for a spherical fusion category given by explicit coefficient
//! data: labels, fusion multiplicities, quantum dimensions and the F-matrix
//! collection, plus file loading and gauge transformations.
//!
//! Conventions (left multiplication):
//!   `F^x_{uvw}` is stored as the matrix `M[(z,g,d), (y,a,b)]` with
//!   rows indexed by triples `(z, g, d)`, `g ∈ Hom(u⊗v, z)`, `d ∈ Hom(z⊗w, x)`,
//!   and columns by `(y, a, b)`, `a ∈ Hom(v⊗w, y)`, `b ∈ Hom(u⊗y, x)`, both
//!   sorted lexicographically by label id then basis indices. The defining
//!   relation expands the right-nested tree in left-nested trees:
//!   `RT_{y,a,b} = Σ_{z,g,d} M[(z,g,d),(y,a,b)] · LT_{z,g,d}`.
//! Any F-matrix with `u`, `v` or `w` equal to the tensor unit is the identity
//! in the canonical basis and is synthesized rather than stored.

use crate::expr;
use crate::{C64, CMat};
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CatError {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("shape mismatch for F^{x}_{{{u},{v},{w}}}: expected {expected_rows}x{expected_cols}, got {got_rows}x{got_cols}")]
    ShapeMismatch {
        u: String,
        v: String,
        w: String,
        x: String,
        expected_rows: usize,
        expected_cols: usize,
        got_rows: usize,
        got_cols: usize,
    },
    #[error("missing F-matrix for admissible quadruple ({u},{v},{w};{x})")]
    MissingFMatrix { u: String, v: String, w: String, x: String },
    #[error("category is not self-dual: N[{a}][{b}][unit] = {n}")]
    NotSelfDual { a: String, b: String, n: usize },
    #[error("fusion rules violate the unit axiom at ({a},{b})")]
    UnitAxiom { a: String, b: String },
    #[error("fusion rules are not associative at ({a},{b},{c};{d})")]
    NonAssociative { a: String, b: String, c: String, d: String },
    #[error("quantum dimension of '{0}' is not positive")]
    NonPositiveDim(String),
    #[error("singular gauge matrix on vertex ({u},{v};{x})")]
    SingularGauge { u: String, v: String, x: String },
    #[error("gauge shape mismatch on vertex ({u},{v};{x})")]
    GaugeShape { u: String, v: String, x: String },
    #[error("F-matrix F^{x}_{{{u},{v},{w}}} is numerically singular")]
    SingularF { u: String, v: String, w: String, x: String },
    #[error("unknown label '{0}'")]
    UnknownLabel(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A simple object: dense id plus a short display name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Label {
    pub id: usize,
    pub name: String,
}

/// Key of an F-matrix: `F^x_{uvw}` as `(u, v, w, x)`.
pub type FKey = (usize, usize, usize, usize);

/// Key of a trivalent vertex type `(u, v; x)` for `Hom(u⊗v, x)`.
pub type VertexKey = (usize, usize, usize);

/// Per-vertex-type invertible basis changes on Hom spaces. Vertex types
/// involving the tensor unit are frozen to the identity.
#[derive(Debug, Clone)]
pub struct GaugeTransform {
    pub mats: HashMap<VertexKey, CMat>,
}

impl GaugeTransform {
    pub fn identity() -> Self {
        GaugeTransform { mats: HashMap::new() }
    }

    pub fn set(&mut self, key: VertexKey, m: CMat) {
        self.mats.insert(key, m);
    }

    /// Gauge matrix for a vertex type (identity when absent).
    pub fn mat(&self, cat: &CategoryData, key: VertexKey) -> CMat {
        match self.mats.get(&key) {
            Some(m) => m.clone(),
            None => CMat::identity(cat.hom_dim(key.0, key.1, key.2), cat.hom_dim(key.0, key.1, key.2)),
        }
    }

    /// Inverse gauge (per-vertex matrix inverses).
    pub fn inverse(&self, cat: &CategoryData) -> Result<Self, CatError> {
        let mut mats = HashMap::new();
        for (&k, m) in &self.mats {
            let inv = m.clone().try_inverse().ok_or_else(|| CatError::SingularGauge {
                u: cat.name_of(k.0),
                v: cat.name_of(k.1),
                x: cat.name_of(k.2),
            })?;
            mats.insert(k, inv);
        }
        Ok(GaugeTransform { mats })
    }
}

/// Immutable coefficient data of a spherical fusion category.
#[derive(Debug, Clone)]
pub struct CategoryData {
    pub name: String,
    pub provenance: String,
    labels: Vec<Label>,
    unit: usize,
    n: Vec<Vec<Vec<usize>>>,
    dims: Vec<f64>,
    f: HashMap<FKey, CMat>,
    /// Inverse matrices supplied by the data file, for `verify::check_inverse_data`.
    claimed_inverses: HashMap<FKey, CMat>,
}

impl fmt::Display for CategoryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (rank {})", self.name, self.rank())
    }
}

impl CategoryData {
    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn name_of(&self, id: usize) -> String {
        self.labels[id].name.clone()
    }

    pub fn label_by_name(&self, name: &str) -> Option<usize> {
        self.labels.iter().find(|l| l.name == name).map(|l| l.id)
    }

    /// Fusion multiplicity `N[u][v][x] = dim Hom(u⊗v, x)`.
    pub fn hom_dim(&self, u: usize, v: usize, x: usize) -> usize {
        self.n[u][v][x]
    }

    pub fn dim(&self, l: usize) -> f64 {
        self.dims[l]
    }

    /// Total quantum dimension squared `D² = Σ_s dim(s)²`.
    pub fn total_dim_sq(&self) -> f64 {
        self.dims.iter().map(|d| d * d).sum()
    }

    pub fn claimed_inverse(&self, key: FKey) -> Option<&CMat> {
        self.claimed_inverses.get(&key)
    }

    /// Row triples `(z, g, d)` of `F^x_{uvw}`, lexicographic.
    pub fn row_triples(&self, u: usize, v: usize, w: usize, x: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for z in 0..self.rank() {
            for g in 0..self.n[u][v][z] {
                for d in 0..self.n[z][w][x] {
                    out.push((z, g, d));
                }
            }
        }
        out
    }

    /// Column triples `(y, a, b)` of `F^x_{uvw}`, lexicographic.
    pub fn col_triples(&self, u: usize, v: usize, w: usize, x: usize) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for y in 0..self.rank() {
            for a in 0..self.n[v][w][y] {
                for b in 0..self.n[u][y][x] {
                    out.push((y, a, b));
                }
            }
        }
        out
    }

    /// All quadruples `(u,v,w;x)` with a nonempty F-matrix.
    pub fn admissible_fkeys(&self) -> Vec<FKey> {
        let mut out = Vec::new();
        let rk = self.rank();
        for u in 0..rk {
            for v in 0..rk {
                for w in 0..rk {
                    for x in 0..rk {
                        if self.f_dim(u, v, w, x) > 0 {
                            out.push((u, v, w, x));
                        }
                    }
                }
            }
        }
        out
    }

    /// Nonunit quadruples, i.e. those whose F-matrix is explicit data.
    pub fn stored_fkeys(&self) -> Vec<FKey> {
        let mut keys: Vec<FKey> = self.f.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    /// Row count (= column count) of `F^x_{uvw}`.
    pub fn f_dim(&self, u: usize, v: usize, w: usize, x: usize) -> usize {
        (0..self.rank()).map(|z| self.n[u][v][z] * self.n[z][w][x]).sum()
    }

    /// The F-matrix at `(u,v,w;x)`: stored data for nonunit keys, the
    /// canonical identity pairing when a slot is the unit.
    pub fn f_matrix(&self, u: usize, v: usize, w: usize, x: usize) -> CMat {
        if let Some(m) = self.f.get(&(u, v, w, x)) {
            return m.clone();
        }
        let rows = self.row_triples(u, v, w, x);
        let cols = self.col_triples(u, v, w, x);
        let e = self.unit;
        debug_assert!(u == e || v == e || w == e, "missing nonunit F-matrix");
        let mut m = CMat::zeros(rows.len(), cols.len());
        for (ri, &(z, g, d)) in rows.iter().enumerate() {
            for (ci, &(y, a, b)) in cols.iter().enumerate() {
                let hit = if u == e {
                    y == x && z == v && a == d && b == 0 && g == 0
                } else if v == e {
                    y == w && z == u && a == 0 && g == 0 && b == d
                } else {
                    y == v && z == x && a == 0 && d == 0 && g == b
                };
                if hit {
                    m[(ri, ci)] = C64::new(1.0, 0.0);
                }
            }
        }
        m
    }

    /// Single F entry addressed by row/col triples (zero when either triple
    /// is inadmissible).
    pub fn f_entry(
        &self,
        u: usize,
        v: usize,
        w: usize,
        x: usize,
        row: (usize, usize, usize),
        col: (usize, usize, usize),
    ) -> C64 {
        let (z, g, d) = row;
        let (y, a, b) = col;
        if self.n[u][v][z] <= g || self.n[z][w][x] <= d || self.n[v][w][y] <= a || self.n[u][y][x] <= b {
            return C64::new(0.0, 0.0);
        }
        let rows = self.row_triples(u, v, w, x);
        let cols = self.col_triples(u, v, w, x);
        let ri = rows.iter().position(|&t| t == row).unwrap();
        let ci = cols.iter().position(|&t| t == col).unwrap();
        self.f_matrix(u, v, w, x)[(ri, ci)]
    }

    /// Fusion-rule fingerprint of the rank-3 category with x⊗x = 1 ⊕ 2x ⊕ y:
    /// returns the (x, y) label ids when this category matches.
    pub fn e_fingerprint(&self) -> Option<(usize, usize)> {
        if self.rank() != 3 {
            return None;
        }
        let e = self.unit;
        let others: Vec<usize> = (0..3).filter(|&l| l != e).collect();
        for &x in &others {
            let y = others.iter().copied().find(|&l| l != x)?;
            if self.n[x][x][e] == 1
                && self.n[x][x][x] == 2
                && self.n[x][x][y] == 1
                && self.n[x][y][x] == 1
                && self.n[y][x][x] == 1
                && self.n[y][y][e] == 1
                && self.n[y][y][y] == 0
            {
                return Some((x, y));
            }
        }
        None
    }

    /// Apply a gauge transformation, producing a new category with
    /// `F'[(z,g',d'),(y,a',b')] = Σ A^{vw}_y[a',a] A^{uy}_x[b',b] F[(z,g,d),(y,a,b)]
    ///  (A^{uv}_z)⁻¹[g,g'] (A^{zw}_x)⁻¹[d,d']`.
    /// Vertex types involving the unit are frozen to the identity.
    pub fn apply_gauge(&self, g: &GaugeTransform) -> Result<CategoryData, CatError> {
        for (&(u, v, x), m) in &g.mats {
            let n = self.hom_dim(u, v, x);
            if m.nrows() != n || m.ncols() != n {
                return Err(CatError::GaugeShape {
                    u: self.name_of(u),
                    v: self.name_of(v),
                    x: self.name_of(x),
                });
            }
        }
        let e = self.unit;
        let mat = |u: usize, v: usize, x: usize| -> CMat {
            if u == e || v == e {
                CMat::identity(self.hom_dim(u, v, x), self.hom_dim(u, v, x))
            } else {
                g.mat(self, (u, v, x))
            }
        };
        let inv = |u: usize, v: usize, x: usize| -> Result<CMat, CatError> {
            mat(u, v, x).try_inverse().ok_or_else(|| CatError::SingularGauge {
                u: self.name_of(u),
                v: self.name_of(v),
                x: self.name_of(x),
            })
        };
        let mut f = HashMap::new();
        for (&(u, v, w, x), m) in &self.f {
            let rows = self.row_triples(u, v, w, x);
            let cols = self.col_triples(u, v, w, x);
            let mut out = CMat::zeros(rows.len(), cols.len());
            for (ri, &(z, gg, dd)) in rows.iter().enumerate() {
                let auv_inv = inv(u, v, z)?;
                let azw_inv = inv(z, w, x)?;
                for (ci, &(y, aa, bb)) in cols.iter().enumerate() {
                    let avw = mat(v, w, y);
                    let auy = mat(u, y, x);
                    let mut acc = C64::new(0.0, 0.0);
                    for (ri2, &(z2, g2, d2)) in rows.iter().enumerate() {
                        if z2 != z {
                            continue;
                        }
                        for (ci2, &(y2, a2, b2)) in cols.iter().enumerate() {
                            if y2 != y {
                                continue;
                            }
                            acc += avw[(aa, a2)]
                                * auy[(bb, b2)]
                                * m[(ri2, ci2)]
                                * auv_inv[(g2, gg)]
                                * azw_inv[(d2, dd)];
                        }
                    }
                    out[(ri, ci)] = acc;
                }
            }
            f.insert((u, v, w, x), out);
        }
        Ok(CategoryData {
            name: self.name.clone(),
            provenance: format!("{} (gauged)", self.provenance),
            labels: self.labels.clone(),
            unit: self.unit,
            n: self.n.clone(),
            dims: self.dims.clone(),
            f,
            claimed_inverses: HashMap::new(),
        })
    }
}

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

/// Load a category from a file path.
pub fn load_category(path: &std::path::Path) -> Result<CategoryData, CatError> {
    let text = std::fs::read_to_string(path)?;
    parse_category(&text)
}

/// Parse the sectioned text format:
///
/// ```text
/// [meta]        name = ..., provenance = ...
/// [labels]      id name [unit]
/// [dims]        name = expr
/// [fusion]      a b c N          (nonunit triples; unit rules are implied)
/// [fmatrices]   F u v w x        followed by rows of comma-separated exprs
/// [inverses]    same layout as fmatrices, optional
/// ```
pub fn parse_category(text: &str) -> Result<CategoryData, CatError> {
    #[derive(PartialEq, Clone, Copy)]
    enum Sec {
        None,
        Meta,
        Labels,
        Dims,
        Fusion,
        FMat,
        Inv,
    }
    let perr = |line: usize, msg: &str| CatError::Parse { line, msg: msg.to_string() };

    let mut sec = Sec::None;
    let mut name = String::new();
    let mut provenance = String::new();
    let mut labels: Vec<Label> = Vec::new();
    let mut unit: Option<usize> = None;
    let mut dim_exprs: Vec<(String, String, usize)> = Vec::new();
    let mut fusion: Vec<(String, String, String, usize, usize)> = Vec::new();
    struct RawMat {
        key: (String, String, String, String),
        rows: Vec<Vec<C64>>,
        line: usize,
    }
    let mut fmats: Vec<RawMat> = Vec::new();
    let mut invs: Vec<RawMat> = Vec::new();

    for (lno, raw) in text.lines().enumerate() {
        let line = lno + 1;
        let s = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if s.is_empty() {
            continue;
        }
        if s.starts_with('[') {
            sec = match s {
                "[meta]" => Sec::Meta,
                "[labels]" => Sec::Labels,
                "[dims]" => Sec::Dims,
                "[fusion]" => Sec::Fusion,
                "[fmatrices]" => Sec::FMat,
                "[inverses]" => Sec::Inv,
                _ => return Err(perr(line, &format!("unknown section {s}"))),
            };
            continue;
        }
        match sec {
            Sec::None => return Err(perr(line, "content before any section")),
            Sec::Meta => {
                let (k, v) = s
                    .split_once('=')
                    .ok_or_else(|| perr(line, "expected key = value"))?;
                match k.trim() {
                    "name" => name = v.trim().to_string(),
                    "provenance" => provenance = v.trim().to_string(),
                    other => return Err(perr(line, &format!("unknown meta key {other}"))),
                }
            }
            Sec::Labels => {
                let parts: Vec<&str> = s.split_whitespace().collect();
                if parts.len() < 2 || parts.len() > 3 {
                    return Err(perr(line, "expected: id name [unit]"));
                }
                let id: usize = parts[0]
                    .parse()
                    .map_err(|_| perr(line, "label id must be an integer"))?;
                if id != labels.len() {
                    return Err(perr(line, "label ids must be dense and in order"));
                }
                if parts.len() == 3 {
                    if parts[2] != "unit" {
                        return Err(perr(line, "third field must be 'unit'"));
                    }
                    if unit.is_some() {
                        return Err(perr(line, "two unit labels"));
                    }
                    unit = Some(id);
                }
                labels.push(Label { id, name: parts[1].to_string() });
            }
            Sec::Dims => {
                let (k, v) = s
                    .split_once('=')
                    .ok_or_else(|| perr(line, "expected: label = expression"))?;
                dim_exprs.push((k.trim().to_string(), v.trim().to_string(), line));
            }
            Sec::Fusion => {
                let parts: Vec<&str> = s.split_whitespace().collect();
                if parts.len() != 4 {
                    return Err(perr(line, "expected: a b c N"));
                }
                let n: usize = parts[3]
                    .parse()
                    .map_err(|_| perr(line, "multiplicity must be an integer"))?;
                fusion.push((
                    parts[0].to_string(),
                    parts[1].to_string(),
                    parts[2].to_string(),
                    n,
                    line,
                ));
            }
            Sec::FMat | Sec::Inv => {
                let dst: &mut Vec<RawMat> = if sec == Sec::FMat { &mut fmats } else { &mut invs };
                if let Some(rest) = s.strip_prefix("F ") {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 4 {
                        return Err(perr(line, "expected: F u v w x"));
                    }
                    dst.push(RawMat {
                        key: (
                            parts[0].to_string(),
                            parts[1].to_string(),
                            parts[2].to_string(),
                            parts[3].to_string(),
                        ),
                        rows: Vec::new(),
                        line,
                    });
                } else {
                    let cur = dst
                        .last_mut()
                        .ok_or_else(|| perr(line, "matrix row before any 'F u v w x' header"))?;
                    let mut row = Vec::new();
                    for cell in s.split(',') {
                        let v = expr::eval(cell.trim())
                            .map_err(|e| perr(line, &format!("bad expression '{}': {e}", cell.trim())))?;
                        row.push(v);
                    }
                    cur.rows.push(row);
                }
            }
        }
    }

    if labels.is_empty() {
        return Err(perr(0, "no labels"));
    }
    let unit = unit.ok_or_else(|| perr(0, "no unit label declared"))?;
    let rank = labels.len();
    let by_name: HashMap<String, usize> = labels.iter().map(|l| (l.name.clone(), l.id)).collect();
    let resolve = |nm: &str, line: usize| -> Result<usize, CatError> {
        by_name
            .get(nm)
            .copied()
            .ok_or_else(|| perr(line, &format!("unknown label '{nm}'")))
    };

    // dims
    let mut dims = vec![f64::NAN; rank];
    for (nm, ex, line) in &dim_exprs {
        let id = resolve(nm, *line)?;
        let v = expr::eval(ex).map_err(|e| perr(*line, &format!("bad dim expression: {e}")))?;
        if v.im.abs() > 1e-12 {
            return Err(perr(*line, "quantum dimension must be real"));
        }
        dims[id] = v.re;
    }
    for l in &labels {
        if dims[l.id].is_nan() {
            return Err(perr(0, &format!("missing dim for label '{}'", l.name)));
        }
        if dims[l.id] <= 0.0 {
            return Err(CatError::NonPositiveDim(l.name.clone()));
        }
    }

    // fusion tensor: unit rules implied, file supplies the rest
    let mut n = vec![vec![vec![0usize; rank]; rank]; rank];
    for a in 0..rank {
        n[unit][a][a] = 1;
        n[a][unit][a] = 1;
    }
    n[unit][unit][unit] = 1;
    for (a, b, c, mult, line) in &fusion {
        let (a, b, c) = (resolve(a, *line)?, resolve(b, *line)?, resolve(c, *line)?);
        if a == unit || b == unit {
            if *mult != if (a == unit && b == c) || (b == unit && a == c) { 1 } else { 0 } {
                return Err(CatError::UnitAxiom {
                    a: labels[a].name.clone(),
                    b: labels[b].name.clone(),
                });
            }
            continue;
        }
        n[a][b][c] = *mult;
    }

    let mut cat = CategoryData {
        name,
        provenance,
        labels,
        unit,
        n,
        dims,
        f: HashMap::new(),
        claimed_inverses: HashMap::new(),
    };

    validate_fusion(&cat)?;

    // F-matrices
    let to_mat = |cat: &CategoryData, rm: &RawMat| -> Result<(FKey, CMat), CatError> {
        let u = resolve(&rm.key.0, rm.line)?;
        let v = resolve(&rm.key.1, rm.line)?;
        let w = resolve(&rm.key.2, rm.line)?;
        let x = resolve(&rm.key.3, rm.line)?;
        let nr = cat.row_triples(u, v, w, x).len();
        let nc = cat.col_triples(u, v, w, x).len();
        let got_rows = rm.rows.len();
        let got_cols = rm.rows.iter().map(|r| r.len()).max().unwrap_or(0);
        if got_rows != nr || rm.rows.iter().any(|r| r.len() != nc) {
            return Err(CatError::ShapeMismatch {
                u: cat.name_of(u),
                v: cat.name_of(v),
                w: cat.name_of(w),
                x: cat.name_of(x),
                expected_rows: nr,
                expected_cols: nc,
                got_rows,
                got_cols,
            });
        }
        let mut m = CMat::zeros(nr, nc);
        for (ri, row) in rm.rows.iter().enumerate() {
            for (ci, &v) in row.iter().enumerate() {
                m[(ri, ci)] = v;
            }
        }
        Ok(((u, v, w, x), m))
    };

    for rm in &fmats {
        let (key, m) = to_mat(&cat, rm)?;
        cat.f.insert(key, m);
    }
    for rm in &invs {
        let (key, m) = to_mat(&cat, rm)?;
        cat.claimed_inverses.insert(key, m);
    }

    // every nonunit admissible quadruple must be present
    for (u, v, w, x) in cat.admissible_fkeys() {
        if u == unit || v == unit || w == unit {
            continue;
        }
        if !cat.f.contains_key(&(u, v, w, x)) {
            return Err(CatError::MissingFMatrix {
                u: cat.name_of(u),
                v: cat.name_of(v),
                w: cat.name_of(w),
                x: cat.name_of(x),
            });
        }
    }
    // invertibility guard (condition number via smallest singular value)
    for (&(u, v, w, x), m) in &cat.f {
        let svd = m.clone().svd(false, false);
        let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
        if smin <= 0.0 || smax / smin > 1e12 {
            return Err(CatError::SingularF {
                u: cat.name_of(u),
                v: cat.name_of(v),
                w: cat.name_of(w),
                x: cat.name_of(x),
            });
        }
    }
    Ok(cat)
}

/// Structural checks on the fusion ring: self-duality, unit axiom and
/// associativity of multiplicities.
fn validate_fusion(cat: &CategoryData) -> Result<(), CatError> {
    let rank = cat.rank();
    let e = cat.unit;
    for a in 0..rank {
        for b in 0..rank {
            let want = usize::from(a == b);
            if cat.n[a][b][e] != want {
                return Err(CatError::NotSelfDual {
                    a: cat.name_of(a),
                    b: cat.name_of(b),
                    n: cat.n[a][b][e],
                });
            }
            if cat.n[e][a][b] != usize::from(a == b) || cat.n[a][e][b] != usize::from(a == b) {
                return Err(CatError::UnitAxiom { a: cat.name_of(a), b: cat.name_of(b) });
            }
        }
    }
    for a in 0..rank {
        for b in 0..rank {
            for c in 0..rank {
                for d in 0..rank {
                    let lhs: usize = (0..rank).map(|t| cat.n[a][b][t] * cat.n[t][c][d]).sum();
                    let rhs: usize = (0..rank).map(|t| cat.n[b][c][t] * cat.n[a][t][d]).sum();
                    if lhs != rhs {
                        return Err(CatError::NonAssociative {
                            a: cat.name_of(a),
                            b: cat.name_of(b),
                            c: cat.name_of(c),
                            d: cat.name_of(d),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Bundled categories
// ---------------------------------------------------------------------------

pub const E_RAW_SRC: &str = include_str!("../data/e_raw.cat");
pub const E_NORMALIZED_SRC: &str = include_str!("../data/e_normalized.cat");
pub const Z2_SRC: &str = include_str!("../data/z2.cat");

/// Bundled rank-3 category in its raw, non-unitary basis.
pub fn e_raw() -> CategoryData {
    parse_category(E_RAW_SRC).expect("bundled e_raw parses")
}

/// Bundled rank-3 category in the unitary normalization.
pub fn e_normalized() -> CategoryData {
    parse_category(E_NORMALIZED_SRC).expect("bundled e_normalized parses")
}

/// Bundled Z2 group category.
pub fn z2() -> CategoryData {
    parse_category(Z2_SRC).expect("bundled z2 parses")
}

/// Resolve a CLI category argument: a bundled alias or a file path.
pub fn load_by_name_or_path(arg: &str) -> Result<CategoryData, CatError> {
    match arg {
        "e_raw" | "E_raw" => Ok(e_raw()),
        "e_normalized" | "E_normalized" => Ok(e_normalized()),
        "z2" | "Z2" => Ok(z2()),
        path => load_category(std::path::Path::new(path)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_categories_load() {
        let e = e_raw();
        assert_eq!(e.rank(), 3);
        let (x, y) = e.e_fingerprint().unwrap();
        assert_eq!(e.hom_dim(x, x, x), 2);
        assert_eq!(e.hom_dim(x, y, x), 1);
        assert!((e.dim(x) - (1.0 + 3f64.sqrt())).abs() < 1e-14);
        let z = z2();
        assert_eq!(z.rank(), 2);
        assert!((z.total_dim_sq() - 2.0).abs() < 1e-14);
        let en = e_normalized();
        assert!((en.total_dim_sq() - (6.0 + 2.0 * 3f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn e_raw_fxyx_matches_table() {
        let e = e_raw();
        let (x, y) = e.e_fingerprint().unwrap();
        let m = e.f_matrix(x, y, x, x);
        assert_eq!(m.nrows(), 2);
        assert!((m[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((m[(1, 1)] - C64::new(-1.0, 0.0)).norm() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);
    }

    #[test]
    fn shape_mismatch_is_reported() {
        // N[x][x][x] = 2 forces a 6x6 F^x_xxx; a 5x5 must be rejected.
        let mut src = String::from(
            "[labels]\n0 1 unit\n1 x\n2 y\n[dims]\n1 = 1\nx = 1+sqrt(3)\ny = 1\n\
             [fusion]\nx x 1 1\nx x x 2\nx x y 1\nx y x 1\ny x x 1\ny y 1 1\n[fmatrices]\nF x x x x\n",
        );
        for _ in 0..5 {
            src.push_str("1, 1, 1, 1, 1\n");
        }
        match parse_category(&src) {
            Err(CatError::ShapeMismatch { expected_rows: 6, expected_cols: 6, got_rows: 5, .. }) => {}
            other => panic!("expected shape mismatch, got {other:?}"),
        }
    }

    #[test]
    fn missing_fmatrix_is_reported() {
        let src = "[labels]\n0 1 unit\n1 e\n[dims]\n1 = 1\ne = 1\n[fusion]\ne e 1 1\n[fmatrices]\n";
        match parse_category(src) {
            Err(CatError::MissingFMatrix { .. }) => {}
            other => panic!("expected missing F error, got {other:?}"),
        }
    }

    #[test]
    fn non_self_dual_rejected() {
        // Z3 fusion rules: g⊗g = g², not self-dual.
        let src = "[labels]\n0 1 unit\n1 g\n2 h\n[dims]\n1 = 1\ng = 1\nh = 1\n\
                   [fusion]\ng g h 1\nh h g 1\ng h 1 1\nh g 1 1\n[fmatrices]\n";
        match parse_category(src) {
            Err(CatError::NotSelfDual { .. }) => {}
            other => panic!("expected self-duality rejection, got {other:?}"),
        }
    }

    #[test]
    fn unit_fmatrices_are_identity_pairings() {
        let e = e_normalized();
        let (x, _) = e.e_fingerprint().unwrap();
        for &(u, v, w, t) in &[(0, x, x, 0), (x, 0, x, 0), (x, x, 0, 0), (0, x, x, x)] {
            let m = e.f_matrix(u, v, w, t);
            if m.nrows() == 0 {
                continue;
            }
            let prod = &m * m.adjoint();
            let id = CMat::identity(m.nrows(), m.nrows());
            assert!((prod - id).max_abs() < 1e-14);
        }
    }
}

/// Entrywise max modulus, the residual norm used across the crate.
pub trait MaxAbs {
    fn max_abs(&self) -> f64;
}

impl MaxAbs for CMat {
    fn max_abs(&self) -> f64 {
        self.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}
