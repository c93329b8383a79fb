//! Spherical and Euclidean Coxeter complexes of rank one and two.
//!
//! The spherical Weyl group of rank two is the dihedral group of order `2m`
//! acting on the unit circle, with model chamber the arc `[0, pi/m]`. In rank
//! one it is `{+1, -1}` acting on the two-point sphere. The affine Weyl group
//! is the semidirect product of the spherical group with a translation lattice.

use std::cmp::Ordering;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::{parse_rational, Rational, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoxeterError {
    #[error("rank must be 1 or 2, got {0}")]
    InvalidRank(u32),
    #[error("rank-2 complexes need m >= 2, got {0}")]
    InvalidOrder(u32),
    #[error("translation lattice is degenerate: {0}")]
    DegenerateLattice(String),
    #[error("translation lattice is not stable under the spherical Weyl group")]
    LatticeNotStable,
    #[error("point has the wrong rank for this complex")]
    RankMismatch,
}

/// Spherical Coxeter complex: rank 1 (`S^0` with `Z/2`) or rank 2 (circle with dihedral group).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SphericalCoxeterComplex {
    rank: u32,
    m: u32,
}

impl SphericalCoxeterComplex {
    pub fn rank_one() -> Self {
        SphericalCoxeterComplex { rank: 1, m: 1 }
    }

    pub fn dihedral(m: u32) -> Result<Self, CoxeterError> {
        if m < 2 {
            return Err(CoxeterError::InvalidOrder(m));
        }
        Ok(SphericalCoxeterComplex { rank: 2, m })
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// Order parameter `m`; `1` for rank one.
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Angular width of the model chamber, `pi/m` (zero in rank one).
    pub fn chamber_width(&self) -> f64 {
        if self.rank == 1 {
            0.0
        } else {
            PI / self.m as f64
        }
    }

    /// Number of elements of the spherical Weyl group.
    pub fn order(&self) -> usize {
        if self.rank == 1 {
            2
        } else {
            2 * self.m as usize
        }
    }

    /// Enumerates the spherical Weyl group.
    pub fn elements(&self) -> Vec<WeylElement> {
        if self.rank == 1 {
            return vec![WeylElement::Sign(false), WeylElement::Sign(true)];
        }
        let m = self.m;
        (0..m)
            .map(|k| WeylElement::Rotation { k, m })
            .chain((0..m).map(|k| WeylElement::Reflection { k, m }))
            .collect()
    }

    /// Angles of the walls on the circle (rank two): the `2m` multiples of `pi/m`.
    pub fn walls(&self) -> Vec<f64> {
        if self.rank == 1 {
            return vec![];
        }
        (0..2 * self.m).map(|k| k as f64 * PI / self.m as f64).collect()
    }

    /// Folds an angle (radians) into the model chamber `[0, pi/m]`.
    pub fn fold_angle(&self, angle: f64) -> f64 {
        if self.rank == 1 {
            return 0.0;
        }
        let w = self.chamber_width();
        let mut a = angle.rem_euclid(2.0 * w);
        if a > w {
            a = 2.0 * w - a;
        }
        a.clamp(0.0, w)
    }

    /// Type of the antipode of a point of type `theta`.
    pub fn antipodal_involution(&self, theta: f64) -> f64 {
        if self.rank == 1 {
            return 0.0;
        }
        self.fold_angle(theta + PI)
    }
}

/// Element of the spherical Weyl group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeylElement {
    /// Rank one: `true` is `x -> -x`.
    Sign(bool),
    /// Rotation by `2 pi k / m`.
    Rotation { k: u32, m: u32 },
    /// Reflection in the line at angle `pi k / m`.
    Reflection { k: u32, m: u32 },
}

impl WeylElement {
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        match *self {
            WeylElement::Sign(false) => v,
            WeylElement::Sign(true) => [-v[0], -v[1]],
            WeylElement::Rotation { k, m } => {
                let (c, s) = cos_sin_pi_fraction(2 * k as i64, m as i64);
                [c * v[0] - s * v[1], s * v[0] + c * v[1]]
            }
            WeylElement::Reflection { k, m } => {
                let (c, s) = cos_sin_pi_fraction(2 * k as i64, m as i64);
                [c * v[0] + s * v[1], s * v[0] - c * v[1]]
            }
        }
    }

    pub fn apply_scalar<S: Scalar>(&self, x: S) -> S {
        match self {
            WeylElement::Sign(true) => -x,
            _ => x,
        }
    }
}

/// `(cos, sin)` of `num/den * pi`, exact at multiples of `pi/2` and for the
/// cosine at multiples of `pi/3`.
pub fn cos_sin_pi_fraction(num: i64, den: i64) -> (f64, f64) {
    let period = 2 * den;
    let n = num.rem_euclid(period);
    // n/den * pi in [0, 2pi)
    if (2 * n) % den == 0 {
        return match (2 * n) / den {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        };
    }
    let angle = n as f64 / den as f64 * PI;
    if (3 * n) % den == 0 {
        let c = match (3 * n) / den {
            1 | 5 => 0.5,
            _ => -0.5,
        };
        return (c, angle.sin());
    }
    (angle.cos(), angle.sin())
}

/// Translation part `L_trans` of the affine Weyl group.
#[derive(Debug, Clone, PartialEq)]
pub enum TranslationLattice {
    Trivial,
    Full,
    /// Rank one: `c Z` with `c > 0`.
    Line(Rational),
    /// Rank two: integer span of a basis.
    Plane([[f64; 2]; 2]),
}

/// Input document for [`build_complex`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexSpec {
    pub rank: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default = "default_lattice")]
    pub lattice: serde_json::Value,
}

fn default_lattice() -> serde_json::Value {
    serde_json::Value::String("trivial".into())
}

/// Euclidean Coxeter complex `(E, W_aff)` with `W_aff = W_sph x| L_trans`.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanCoxeterComplex {
    spherical: SphericalCoxeterComplex,
    lattice: TranslationLattice,
}

pub fn build_complex(spec: &ComplexSpec) -> Result<EuclideanCoxeterComplex, CoxeterError> {
    let spherical = match spec.rank {
        1 => SphericalCoxeterComplex::rank_one(),
        2 => SphericalCoxeterComplex::dihedral(spec.m.unwrap_or(0))?,
        r => return Err(CoxeterError::InvalidRank(r)),
    };
    let lattice = match &spec.lattice {
        serde_json::Value::String(s) if s == "trivial" => TranslationLattice::Trivial,
        serde_json::Value::String(s) if s == "full" => TranslationLattice::Full,
        serde_json::Value::String(s) if s == "Z" && spec.rank == 1 => {
            TranslationLattice::Line(Rational::from_integer(1))
        }
        serde_json::Value::Array(gens) => parse_generators(spec.rank, gens)?,
        other => {
            return Err(CoxeterError::DegenerateLattice(format!(
                "unrecognised lattice {other}"
            )))
        }
    };
    EuclideanCoxeterComplex::new(spherical, lattice)
}

fn parse_generators(
    rank: u32,
    gens: &[serde_json::Value],
) -> Result<TranslationLattice, CoxeterError> {
    let bad = |msg: &str| CoxeterError::DegenerateLattice(msg.to_string());
    let rows: Vec<Vec<serde_json::Value>> = gens
        .iter()
        .map(|g| g.as_array().cloned().ok_or_else(|| bad("generator must be an array")))
        .collect::<Result<_, _>>()?;
    if rank == 1 {
        let [row] = rows.as_slice() else {
            return Err(bad("rank 1 needs exactly one generator"));
        };
        let [c] = row.as_slice() else {
            return Err(bad("rank 1 generators have one coordinate"));
        };
        let c = parse_rational(&c.to_string().trim_matches('"').to_string())
            .ok_or_else(|| bad("generator must be a rational number"))?;
        return Ok(TranslationLattice::Line(c));
    }
    let [a, b] = rows.as_slice() else {
        return Err(bad("rank 2 needs exactly two generators"));
    };
    let coord = |v: &serde_json::Value| v.as_f64().ok_or_else(|| bad("coordinates must be numbers"));
    if a.len() != 2 || b.len() != 2 {
        return Err(bad("rank 2 generators have two coordinates"));
    }
    Ok(TranslationLattice::Plane([
        [coord(&a[0])?, coord(&a[1])?],
        [coord(&b[0])?, coord(&b[1])?],
    ]))
}

/// Point of the model space `E`: exact on the line, floating point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EPoint {
    Exact(#[serde(with = "crate::scalar::rational_serde")] Rational),
    Real([f64; 2]),
}

impl EPoint {
    pub fn line(x: f64) -> Self {
        EPoint::Real([x, 0.0])
    }

    pub fn to_f64(&self) -> [f64; 2] {
        match self {
            EPoint::Exact(x) => [x.to_f64(), 0.0],
            EPoint::Real(v) => *v,
        }
    }
}

/// Vector of the Euclidean Weyl chamber: metric length plus type in `[0, pi/m]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaVector {
    pub length: f64,
    /// Type angle in radians; always `0` in rank one and for the zero vector.
    pub theta: f64,
}

impl DeltaVector {
    pub fn new(length: f64, theta: f64) -> Self {
        if length == 0.0 {
            DeltaVector { length: 0.0, theta: 0.0 }
        } else {
            DeltaVector { length, theta }
        }
    }

    /// Distance in the cone `Delta_euc` over the chamber.
    pub fn distance(&self, other: &DeltaVector) -> f64 {
        let (a, b) = (self.length, other.length);
        let d = (self.theta - other.theta).abs();
        ((a - b).powi(2) + 4.0 * a * b * (d / 2.0).sin().powi(2)).max(0.0).sqrt()
    }

    pub fn scaled(&self, c: f64) -> DeltaVector {
        DeltaVector::new(self.length * c, self.theta)
    }
}

/// Canonical representative of the `W_aff`-orbit of an oriented pair `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinedLength {
    pub p: EPoint,
    pub q: EPoint,
}

impl RefinedLength {
    pub fn approx_eq(&self, other: &RefinedLength, tol: f64) -> bool {
        match (self.p, self.q, other.p, other.q) {
            (EPoint::Exact(a), EPoint::Exact(b), EPoint::Exact(c), EPoint::Exact(d)) => {
                a == c && b == d
            }
            _ => {
                let (a, b, c, d) = (self.p.to_f64(), self.q.to_f64(), other.p.to_f64(), other.q.to_f64());
                a.iter().chain(b.iter()).zip(c.iter().chain(d.iter())).all(|(x, y)| (x - y).abs() <= tol)
            }
        }
    }
}

/// Affine Weyl group element `x -> linear(x) + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineElement {
    pub linear: WeylElement,
    pub translation: EPoint,
}

impl AffineElement {
    pub fn apply(&self, p: &EPoint) -> EPoint {
        match (p, &self.translation) {
            (EPoint::Exact(x), EPoint::Exact(t)) => EPoint::Exact(self.linear.apply_scalar(*x) + *t),
            _ => {
                let v = self.linear.apply(p.to_f64());
                let t = self.translation.to_f64();
                EPoint::Real([v[0] + t[0], v[1] + t[1]])
            }
        }
    }
}

impl EuclideanCoxeterComplex {
    pub fn new(
        spherical: SphericalCoxeterComplex,
        lattice: TranslationLattice,
    ) -> Result<Self, CoxeterError> {
        match (&lattice, spherical.rank) {
            (TranslationLattice::Line(c), 1) => {
                if *c <= Rational::from_integer(0) {
                    return Err(CoxeterError::DegenerateLattice("generator must be positive".into()));
                }
            }
            (TranslationLattice::Plane(basis), 2) => {
                if det(basis).abs() < 1e-12 {
                    return Err(CoxeterError::DegenerateLattice("generators are dependent".into()));
                }
                for w in spherical.elements() {
                    for g in basis {
                        let img = w.apply(*g);
                        let c = solve(basis, img);
                        if c.iter().any(|x| (x - x.round()).abs() > 1e-9) {
                            return Err(CoxeterError::LatticeNotStable);
                        }
                    }
                }
            }
            (TranslationLattice::Trivial | TranslationLattice::Full, _) => {}
            _ => return Err(CoxeterError::DegenerateLattice("generator rank mismatch".into())),
        }
        Ok(EuclideanCoxeterComplex { spherical, lattice })
    }

    /// `(R, {x -> +-x + 2k})`: the complex of a simplicial tree with unit edges,
    /// generated by the reflections at the integer points.
    pub fn simplicial_line() -> Self {
        EuclideanCoxeterComplex {
            spherical: SphericalCoxeterComplex::rank_one(),
            lattice: TranslationLattice::Line(Rational::from_integer(2)),
        }
    }

    /// `(E, W_sph)`: the complex of a Euclidean building with one vertex.
    pub fn one_vertex(spherical: SphericalCoxeterComplex) -> Self {
        EuclideanCoxeterComplex { spherical, lattice: TranslationLattice::Trivial }
    }

    pub fn spherical(&self) -> &SphericalCoxeterComplex {
        &self.spherical
    }

    pub fn lattice(&self) -> &TranslationLattice {
        &self.lattice
    }

    pub fn rank(&self) -> u32 {
        self.spherical.rank
    }

    /// Whether `W_aff` is finite (trivial translation lattice).
    pub fn is_finite(&self) -> bool {
        self.lattice == TranslationLattice::Trivial
    }

    /// Unique representative of the `W_sph`-orbit of `v` in the Euclidean chamber.
    pub fn chamber_project(&self, v: [f64; 2]) -> DeltaVector {
        if self.rank() == 1 {
            return DeltaVector::new(v[0].abs(), 0.0);
        }
        let r = v[0].hypot(v[1]);
        if r == 0.0 {
            return DeltaVector::new(0.0, 0.0);
        }
        DeltaVector::new(r, self.spherical.fold_angle(v[1].atan2(v[0])))
    }

    pub fn delta_length(&self, p: &EPoint, q: &EPoint) -> DeltaVector {
        match (p, q) {
            (EPoint::Exact(a), EPoint::Exact(b)) => DeltaVector::new((*b - *a).abs().to_f64(), 0.0),
            _ => {
                let (a, b) = (p.to_f64(), q.to_f64());
                self.chamber_project([b[0] - a[0], b[1] - a[1]])
            }
        }
    }

    pub fn antipodal_involution(&self, theta: f64) -> f64 {
        self.spherical.antipodal_involution(theta)
    }

    /// Canonical `W_aff`-orbit representative of `(p, q)`: the lexicographically
    /// least orbit element whose first point lies in the fixed fundamental domain
    /// of the translation lattice.
    pub fn refined_length(&self, p: &EPoint, q: &EPoint) -> Result<RefinedLength, CoxeterError> {
        match (p, q) {
            (EPoint::Exact(a), EPoint::Exact(b)) => {
                if self.rank() != 1 {
                    return Err(CoxeterError::RankMismatch);
                }
                let lattice = match &self.lattice {
                    TranslationLattice::Trivial => LineLattice::Trivial,
                    TranslationLattice::Full => LineLattice::Full,
                    TranslationLattice::Line(c) => LineLattice::Generated(*c),
                    TranslationLattice::Plane(_) => return Err(CoxeterError::RankMismatch),
                };
                let (p, q) = canonical_line_pair(*a, *b, lattice);
                Ok(RefinedLength { p: EPoint::Exact(p), q: EPoint::Exact(q) })
            }
            _ => {
                let (a, b) = (p.to_f64(), q.to_f64());
                if self.rank() == 1 {
                    if a[1] != 0.0 || b[1] != 0.0 {
                        return Err(CoxeterError::RankMismatch);
                    }
                    let lattice = match &self.lattice {
                        TranslationLattice::Trivial => LineLattice::Trivial,
                        TranslationLattice::Full => LineLattice::Full,
                        TranslationLattice::Line(c) => LineLattice::Generated(c.to_f64()),
                        TranslationLattice::Plane(_) => return Err(CoxeterError::RankMismatch),
                    };
                    let (p, q) = canonical_line_pair(a[0], b[0], lattice);
                    return Ok(RefinedLength {
                        p: EPoint::Real([clean(p), 0.0]),
                        q: EPoint::Real([clean(q), 0.0]),
                    });
                }
                Ok(self.canonical_plane_pair(a, b))
            }
        }
    }

    fn canonical_plane_pair(&self, p: [f64; 2], q: [f64; 2]) -> RefinedLength {
        let mut best: Option<[f64; 4]> = None;
        for w in self.spherical.elements() {
            let (wp, wq) = (w.apply(p), w.apply(q));
            let cand = match &self.lattice {
                TranslationLattice::Trivial => [wp[0], wp[1], wq[0], wq[1]],
                TranslationLattice::Full => [0.0, 0.0, wq[0] - wp[0], wq[1] - wp[1]],
                TranslationLattice::Plane(basis) => {
                    let c = solve(basis, wp);
                    let (k0, k1) = (c[0].snapped_floor(), c[1].snapped_floor());
                    let t = [
                        -(k0 * basis[0][0] + k1 * basis[1][0]),
                        -(k0 * basis[0][1] + k1 * basis[1][1]),
                    ];
                    [wp[0] + t[0], wp[1] + t[1], wq[0] + t[0], wq[1] + t[1]]
                }
                TranslationLattice::Line(_) => unreachable!("validated at construction"),
            };
            let cand = cand.map(clean);
            best = Some(match best {
                Some(b) if lex_cmp_tol(&b, &cand) != Ordering::Greater => b,
                _ => cand,
            });
        }
        let b = best.expect("Weyl group is non-empty");
        RefinedLength { p: EPoint::Real([b[0], b[1]]), q: EPoint::Real([b[2], b[3]]) }
    }

    /// Generators of `W_aff` (simple reflections of `W_sph` plus lattice
    /// translations), used to sample group elements.
    pub fn generators(&self) -> Vec<AffineElement> {
        let zero_exact = EPoint::Exact(Rational::from_integer(0));
        let zero_real = EPoint::Real([0.0, 0.0]);
        let mut gens = Vec::new();
        if self.rank() == 1 {
            gens.push(AffineElement { linear: WeylElement::Sign(true), translation: zero_exact });
            match &self.lattice {
                TranslationLattice::Line(c) => {
                    for t in [*c, -*c] {
                        gens.push(AffineElement {
                            linear: WeylElement::Sign(false),
                            translation: EPoint::Exact(t),
                        });
                    }
                }
                TranslationLattice::Full => {
                    for t in [Rational::new(1, 3), Rational::new(-5, 7)] {
                        gens.push(AffineElement {
                            linear: WeylElement::Sign(false),
                            translation: EPoint::Exact(t),
                        });
                    }
                }
                _ => {}
            }
            return gens;
        }
        let m = self.spherical.m;
        for k in [0, 1] {
            gens.push(AffineElement { linear: WeylElement::Reflection { k, m }, translation: zero_real });
        }
        let identity = WeylElement::Rotation { k: 0, m };
        match &self.lattice {
            TranslationLattice::Plane(basis) => {
                for g in basis {
                    gens.push(AffineElement { linear: identity, translation: EPoint::Real(*g) });
                    gens.push(AffineElement {
                        linear: identity,
                        translation: EPoint::Real([-g[0], -g[1]]),
                    });
                }
            }
            TranslationLattice::Full => {
                gens.push(AffineElement { linear: identity, translation: EPoint::Real([0.3, -1.7]) });
            }
            _ => {}
        }
        gens
    }
}

#[derive(Debug, Clone, Copy)]
enum LineLattice<S> {
    Trivial,
    Full,
    Generated(S),
}

fn canonical_line_pair<S: Scalar>(p: S, q: S, lattice: LineLattice<S>) -> (S, S) {
    let mut best: Option<(S, S)> = None;
    for flip in [false, true] {
        let (wp, wq) = if flip { (-p, -q) } else { (p, q) };
        let cand = match lattice {
            LineLattice::Trivial => (wp, wq),
            LineLattice::Full => (S::zero(), wq - wp),
            LineLattice::Generated(c) => {
                let k = (wp / c).snapped_floor();
                (wp - k * c, wq - k * c)
            }
        };
        best = Some(match best {
            Some(b) if lex_pair_tol(b, cand) != Ordering::Greater => b,
            _ => cand,
        });
    }
    best.expect("two candidates")
}

fn lex_pair_tol<S: Scalar>(a: (S, S), b: (S, S)) -> Ordering {
    let cmp = |x: S, y: S| {
        if x.near(y) {
            Ordering::Equal
        } else {
            x.partial_cmp(&y).unwrap_or(Ordering::Equal)
        }
    };
    cmp(a.0, b.0).then(cmp(a.1, b.1))
}

fn lex_cmp_tol(a: &[f64; 4], b: &[f64; 4]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        if !x.near(*y) {
            return x.partial_cmp(y).unwrap_or(Ordering::Equal);
        }
    }
    Ordering::Equal
}

fn clean(x: f64) -> f64 {
    if x.abs() < 1e-13 {
        0.0
    } else {
        x
    }
}

fn det(b: &[[f64; 2]; 2]) -> f64 {
    b[0][0] * b[1][1] - b[1][0] * b[0][1]
}

/// Coefficients `c` with `c[0] b[0] + c[1] b[1] = v`.
fn solve(b: &[[f64; 2]; 2], v: [f64; 2]) -> [f64; 2] {
    let d = det(b);
    [
        (v[0] * b[1][1] - v[1] * b[1][0]) / d,
        (b[0][0] * v[1] - b[0][1] * v[0]) / d,
    ]
}
