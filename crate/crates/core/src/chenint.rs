//! Piecewise smooth paths, iterated integrals by transport of the truncated
//! word series, and the ε-regularized integrals of the genus-zero model.
//!
//! Convention: for `γ: [0,1] → M`,
//! `∫_γ b₁…b_n = ∫_{1≥t₁≥…≥t_n≥0} γ*b₁(t₁)…γ*b_n(t_n)`, so the first letter
//! sits at the latest time and `∫_{γ₁γ₂}` (first `γ₂`, then `γ₁`) is the
//! product `T_{γ₁}·T_{γ₂}` of the word series.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::barcx::{BarElement, BarError};
use crate::logforms::{ExtLattice, FormElement, FormError, FormSymbol};
use crate::p1model::P1Form;
use crate::wlattice::{LatticeData, LatticeError};

/// Gauss–Legendre nodes per panel.
pub const GL_ORDER: usize = 20;
/// Maximum panels per segment.
pub const PANEL_BUDGET: usize = 4096;
pub const MAX_DEPTH: usize = 48;
/// Longest word supported by the transport.
pub const MAX_LENGTH: usize = 8;
pub const DEFAULT_TOL: f64 = 1e-10;
/// Guard radius around `0` and `1` in the genus-zero model.
pub const P1_GUARD: f64 = 1e-13;
/// Tolerance for endpoint matching at segment junctions.
pub const ENDPOINT_TOL: f64 = 1e-12;
/// Tolerance for recognizing a deck transformation between endpoints.
pub const LOOP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChenError {
    #[error("endpoint mismatch: {0}")]
    EndpointMismatch(String),
    #[error("segment {segment} comes within {distance:e} of a puncture (guard {guard:e})")]
    GuardViolation { segment: usize, distance: f64, guard: f64 },
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("alphabet and path belong to different models")]
    ModelMismatch,
    #[error("word length {0} exceeds the supported maximum {MAX_LENGTH}")]
    LengthTooLarge(usize),
    #[error("invalid tolerance {0:e}")]
    InvalidTolerance(f64),
    #[error("log-polynomial fit residual {residual:e} exceeds {tol:e}")]
    FitInstability { residual: f64, tol: f64 },
    #[error("bar element must have bar degree 0")]
    NotDegreeZero,
    #[error("letter index {0} is not a basis one-form of the model")]
    UnknownLetter(usize),
    #[error("empty word")]
    EmptyWord,
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Bar(#[from] BarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Edagger,
    P1,
}

/// A point `(z, s)` of `ℂ²`; the genus-zero model ignores `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub z: C64,
    pub s: C64,
}

impl Pt {
    pub fn new(z: C64, s: C64) -> Self {
        Pt { z, s }
    }

    fn dist(&self, o: &Pt) -> f64 {
        ((self.z - o.z).norm_sqr() + (self.s - o.s).norm_sqr()).sqrt()
    }

    fn scale(&self) -> f64 {
        1.0 + self.z.norm() + self.s.norm()
    }
}

/// One smooth piece, parametrized by `t ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub enum Segment {
    Line {
        from: Pt,
        to: Pt,
    },
    /// `z = center + r·e^{iθ}`, `θ` linear between the two angles (radians),
    /// `s` linear between its endpoint values.
    Arc {
        center: C64,
        radius: f64,
        angles: [f64; 2],
        s: [C64; 2],
    },
    /// `z = anchor + from·(to/from)^t`: geometric approach to `anchor`.
    Geometric {
        anchor: C64,
        from: C64,
        to: C64,
        s: [C64; 2],
    },
}

/// Position, velocity and `z − 1` (for the genus-zero model, computed without
/// cancellation where the segment allows it).
#[derive(Debug, Clone, Copy)]
struct Sample {
    z: C64,
    s: C64,
    dz: C64,
    ds: C64,
    zm1: C64,
}

impl Segment {
    pub fn start(&self) -> Pt {
        self.point(0.0)
    }

    pub fn end(&self) -> Pt {
        self.point(1.0)
    }

    pub fn point(&self, t: f64) -> Pt {
        let s = self.sample(t);
        Pt::new(s.z, s.s)
    }

    fn sample(&self, t: f64) -> Sample {
        match self {
            Segment::Line { from, to } => {
                let z = from.z + (to.z - from.z) * t;
                Sample {
                    z,
                    s: from.s + (to.s - from.s) * t,
                    dz: to.z - from.z,
                    ds: to.s - from.s,
                    zm1: (from.z - 1.0) + (to.z - from.z) * t,
                }
            }
            Segment::Arc { center, radius, angles, s } => {
                let th = angles[0] + (angles[1] - angles[0]) * t;
                let e = C64::from_polar(*radius, th);
                Sample {
                    z: center + e,
                    s: s[0] + (s[1] - s[0]) * t,
                    dz: C64::i() * (angles[1] - angles[0]) * e,
                    ds: s[1] - s[0],
                    zm1: (center - 1.0) + e,
                }
            }
            Segment::Geometric { anchor, from, to, s } => {
                let l = (to / from).ln();
                let w = from * (l * t).exp();
                Sample {
                    z: anchor + w,
                    s: s[0] + (s[1] - s[0]) * t,
                    dz: w * l,
                    ds: s[1] - s[0],
                    zm1: (anchor - 1.0) + w,
                }
            }
        }
    }

    pub fn reversed(&self) -> Segment {
        match self {
            Segment::Line { from, to } => Segment::Line { from: *to, to: *from },
            Segment::Arc { center, radius, angles, s } => {
                Segment::Arc { center: *center, radius: *radius, angles: [angles[1], angles[0]], s: [s[1], s[0]] }
            }
            Segment::Geometric { anchor, from, to, s } => {
                Segment::Geometric { anchor: *anchor, from: *to, to: *from, s: [s[1], s[0]] }
            }
        }
    }

    /// The pieces `[0, t]` and `[t, 1]`.
    pub fn split(&self, t: f64) -> (Segment, Segment) {
        let mid = self.point(t);
        match self {
            Segment::Line { from, to } => {
                (Segment::Line { from: *from, to: mid }, Segment::Line { from: mid, to: *to })
            }
            Segment::Arc { center, radius, angles, s } => {
                let th = angles[0] + (angles[1] - angles[0]) * t;
                (
                    Segment::Arc { center: *center, radius: *radius, angles: [angles[0], th], s: [s[0], mid.s] },
                    Segment::Arc { center: *center, radius: *radius, angles: [th, angles[1]], s: [mid.s, s[1]] },
                )
            }
            Segment::Geometric { anchor, from, to, s } => {
                let w = mid.z - anchor;
                let w = if (w - from * ((to / from).ln() * t).exp()).norm() <= 1e-15 * w.norm() {
                    w
                } else {
                    from * ((to / from).ln() * t).exp()
                };
                (
                    Segment::Geometric { anchor: *anchor, from: *from, to: w, s: [s[0], mid.s] },
                    Segment::Geometric { anchor: *anchor, from: w, to: *to, s: [mid.s, s[1]] },
                )
            }
        }
    }

    pub fn translated(&self, dz: C64, ds: C64) -> Segment {
        let sh = |p: &Pt| Pt::new(p.z + dz, p.s + ds);
        match self {
            Segment::Line { from, to } => Segment::Line { from: sh(from), to: sh(to) },
            Segment::Arc { center, radius, angles, s } => {
                Segment::Arc { center: center + dz, radius: *radius, angles: *angles, s: [s[0] + ds, s[1] + ds] }
            }
            Segment::Geometric { anchor, from, to, s } => {
                Segment::Geometric { anchor: anchor + dz, from: *from, to: *to, s: [s[0] + ds, s[1] + ds] }
            }
        }
    }

    /// Smallest distance from the `z`-projection to `p`.
    fn distance_to(&self, p: C64) -> f64 {
        match self {
            Segment::Line { from, to } => point_segment_distance(p, from.z, to.z),
            Segment::Arc { center, radius, angles, .. } => {
                let d = p - center;
                let sweep = angles[1] - angles[0];
                let ends = (self.start().z - p).norm().min((self.end().z - p).norm());
                if sweep.abs() >= 2.0 * PI {
                    return (d.norm() - radius).abs();
                }
                let (lo, hi) = if sweep >= 0.0 { (angles[0], angles[1]) } else { (angles[1], angles[0]) };
                let phi = d.arg();
                let k = ((lo - phi) / (2.0 * PI)).ceil();
                let phi = phi + 2.0 * PI * k;
                if phi <= hi {
                    (d.norm() - radius).abs().min(ends)
                } else {
                    ends
                }
            }
            Segment::Geometric { .. } => {
                const N: usize = 512;
                let mut best = f64::INFINITY;
                let mut prev = self.point(0.0).z;
                for i in 1..=N {
                    let cur = self.point(i as f64 / N as f64).z;
                    best = best.min(point_segment_distance(p, prev, cur));
                    prev = cur;
                }
                best
            }
        }
    }

    /// `z`-bounding box `(min re, max re, min im, max im)`.
    fn bbox(&self) -> (f64, f64, f64, f64) {
        let pts: Vec<C64> = match self {
            Segment::Line { from, to } => vec![from.z, to.z],
            Segment::Arc { center, radius, .. } => {
                vec![center + C64::new(*radius, *radius), center - C64::new(*radius, *radius)]
            }
            Segment::Geometric { .. } => (0..=64).map(|i| self.point(i as f64 / 64.0).z).collect(),
        };
        pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, p| {
            (b.0.min(p.re), b.1.max(p.re), b.2.min(p.im), b.3.max(p.im))
        })
    }
}

fn point_segment_distance(p: C64, a: C64, b: C64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Piecewise smooth path in the universal cover of one of the two models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPath", into = "RawPath")]
pub struct PathSpec {
    model: Model,
    segments: Vec<Segment>,
}

impl PathSpec {
    pub fn new(model: Model, segments: Vec<Segment>) -> Result<Self, ChenError> {
        if segments.is_empty() {
            return Err(ChenError::InvalidPath("a path needs at least one segment".into()));
        }
        for seg in &segments {
            let ok = match seg {
                Segment::Line { from, to } => [from.z, from.s, to.z, to.s].iter().all(|c| c.is_finite()),
                Segment::Arc { center, radius, angles, s } => {
                    center.is_finite()
                        && radius.is_finite()
                        && *radius > 0.0
                        && angles.iter().all(|a| a.is_finite())
                        && s.iter().all(|c| c.is_finite())
                }
                Segment::Geometric { anchor, from, to, s } => {
                    anchor.is_finite()
                        && from.is_finite()
                        && to.is_finite()
                        && from.norm() > 0.0
                        && to.norm() > 0.0
                        && s.iter().all(|c| c.is_finite())
                }
            };
            if !ok {
                return Err(ChenError::InvalidPath("non-finite or degenerate segment data".into()));
            }
        }
        for (i, w) in segments.windows(2).enumerate() {
            let (a, b) = (w[0].end(), w[1].start());
            if a.dist(&b) > ENDPOINT_TOL * a.scale() {
                return Err(ChenError::InvalidPath(format!(
                    "segments {i} and {} do not join (gap {:e})",
                    i + 1,
                    a.dist(&b)
                )));
            }
        }
        Ok(PathSpec { model, segments })
    }

    pub fn line(model: Model, from: Pt, to: Pt) -> Self {
        PathSpec { model, segments: vec![Segment::Line { from, to }] }
    }

    /// Polyline through the given points.
    pub fn polyline(model: Model, pts: &[Pt]) -> Result<Self, ChenError> {
        if pts.len() < 2 {
            return Err(ChenError::InvalidPath("polyline needs two points".into()));
        }
        Self::new(model, pts.windows(2).map(|w| Segment::Line { from: w[0], to: w[1] }).collect())
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn start(&self) -> Pt {
        self.segments[0].start()
    }

    pub fn end(&self) -> Pt {
        self.segments[self.segments.len() - 1].end()
    }

    pub fn reversed(&self) -> PathSpec {
        PathSpec { model: self.model, segments: self.segments.iter().rev().map(Segment::reversed).collect() }
    }

    pub fn translated(&self, dz: C64, ds: C64) -> PathSpec {
        PathSpec { model: self.model, segments: self.segments.iter().map(|s| s.translated(dz, ds)).collect() }
    }

    /// Splits segment `i` at parameter `t`; returns `(first part, second
    /// part)` in traversal order.
    pub fn split_at(&self, i: usize, t: f64) -> Result<(PathSpec, PathSpec), ChenError> {
        if i >= self.segments.len() || !(0.0 < t && t < 1.0) {
            return Err(ChenError::InvalidPath("split point out of range".into()));
        }
        let (a, b) = self.segments[i].split(t);
        let mut first = self.segments[..i].to_vec();
        first.push(a);
        let mut second = vec![b];
        second.extend_from_slice(&self.segments[i + 1..]);
        Ok((PathSpec { model: self.model, segments: first }, PathSpec { model: self.model, segments: second }))
    }

    /// Deck transformation `(m, n)` carrying the start to the end, if the
    /// path closes up in `E†`.
    pub fn loop_class(&self, lat: &LatticeData) -> Option<(i64, i64)> {
        let (a, b) = (self.start(), self.end());
        match self.model {
            Model::P1 => (a.dist(&b) <= LOOP_TOL * a.scale()).then_some((0, 0)),
            Model::Edagger => {
                let (m, n) = lat.lattice_coordinates(b.z - a.z).ok()?;
                let ds = b.s - a.s + lat.eta_of(m, n);
                let dz = b.z - a.z - lat.lattice_point(m, n);
                (dz.norm() + ds.norm() <= LOOP_TOL * a.scale()).then_some((m, n))
            }
        }
    }

    /// Checks every segment against the guard radius of the model.
    pub fn check_guard(&self, lat: Option<&LatticeData>) -> Result<(), ChenError> {
        for (i, seg) in self.segments.iter().enumerate() {
            let (d, guard) = match (self.model, lat) {
                (Model::P1, _) => (seg.distance_to(C64::zero()).min(seg.distance_to(C64::new(1.0, 0.0))), P1_GUARD),
                (Model::Edagger, Some(l)) => (lattice_distance(seg, l), l.guard_radius()),
                (Model::Edagger, None) => return Err(ChenError::ModelMismatch),
            };
            if d <= guard {
                return Err(ChenError::GuardViolation { segment: i, distance: d, guard });
            }
        }
        Ok(())
    }
}

fn lattice_distance(seg: &Segment, l: &LatticeData) -> f64 {
    let (x0, x1, y0, y1) = seg.bbox();
    let corners = [C64::new(x0, y0), C64::new(x0, y1), C64::new(x1, y0), C64::new(x1, y1)];
    let coords: Vec<(f64, f64)> = corners.iter().map(|c| l.coordinates(*c)).collect();
    let amin = coords.iter().map(|c| c.0).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
    let amax = coords.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
    let bmin = coords.iter().map(|c| c.1).fold(f64::INFINITY, f64::min).floor() as i64 - 1;
    let bmax = coords.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max).ceil() as i64 + 1;
    let mut best = f64::INFINITY;
    for m in amin..=amax {
        for n in bmin..=bmax {
            best = best.min(seg.distance_to(l.lattice_point(m, n)));
        }
    }
    best
}

/// `γ₁γ₂`: first `γ₂`, then `γ₁`. The end of `γ₂` must equal the start of `γ₁`.
pub fn compose_paths(g1: &PathSpec, g2: &PathSpec) -> Result<PathSpec, ChenError> {
    if g1.model != g2.model {
        return Err(ChenError::ModelMismatch);
    }
    let (a, b) = (g2.end(), g1.start());
    if a.dist(&b) > ENDPOINT_TOL * a.scale() {
        return Err(ChenError::EndpointMismatch(format!(
            "end of the first-traversed path ({}, {}) differs from start of the second ({}, {})",
            a.z, a.s, b.z, b.s
        )));
    }
    let mut segs = g2.segments.clone();
    segs.extend(g1.segments.iter().cloned());
    Ok(PathSpec { model: g1.model, segments: segs })
}

/// Like [`compose_paths`] in the `E†` model when the endpoints only agree
/// modulo `L`: `γ₁` is moved by the deck transformation `(m, n)`, which is
/// returned.
pub fn compose_mod_lattice(
    g1: &PathSpec,
    g2: &PathSpec,
    lat: &LatticeData,
) -> Result<(PathSpec, (i64, i64)), ChenError> {
    if g1.model != Model::Edagger || g2.model != Model::Edagger {
        return Err(ChenError::ModelMismatch);
    }
    let (a, b) = (g2.end(), g1.start());
    let (m, n) = lat
        .lattice_coordinates(a.z - b.z)
        .map_err(|_| ChenError::EndpointMismatch("endpoints not congruent modulo L".into()))?;
    let dz = lat.lattice_point(m, n);
    let ds = -lat.eta_of(m, n);
    if (b.z + dz - a.z).norm() + (b.s + ds - a.s).norm() > LOOP_TOL * a.scale() {
        return Err(ChenError::EndpointMismatch("fiber coordinates not congruent modulo L".into()));
    }
    let moved = g1.translated(dz, ds);
    // snap the junction exactly
    let mut segs = g2.segments.clone();
    segs.extend(moved.segments);
    Ok((PathSpec { model: Model::Edagger, segments: segs }, (m, n)))
}

pub fn reverse_path(g: &PathSpec) -> PathSpec {
    g.reversed()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPath {
    model: Model,
    segments: Vec<RawSegment>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum RawSegment {
    Line {
        from: Vec<f64>,
        to: Vec<f64>,
    },
    Arc {
        center: Vec<f64>,
        radius: f64,
        angles: [f64; 2],
        #[serde(default)]
        s: Vec<f64>,
    },
    Geometric {
        anchor: Vec<f64>,
        from: Vec<f64>,
        to: Vec<f64>,
        #[serde(default)]
        s: Vec<f64>,
    },
}

fn c_of(v: &[f64]) -> Result<C64, ChenError> {
    match v {
        [re, im] => Ok(C64::new(*re, *im)),
        _ => Err(ChenError::InvalidPath(format!("expected [re, im], got {v:?}"))),
    }
}

fn pt_of(v: &[f64]) -> Result<Pt, ChenError> {
    match v {
        [a, b] => Ok(Pt::new(C64::new(*a, *b), C64::zero())),
        [a, b, c, d] => Ok(Pt::new(C64::new(*a, *b), C64::new(*c, *d))),
        _ => Err(ChenError::InvalidPath(format!("expected [re, im] or [re, im, re, im], got {v:?}"))),
    }
}

fn s_pair(v: &[f64]) -> Result<[C64; 2], ChenError> {
    match v {
        [] => Ok([C64::zero(); 2]),
        [a, b] => Ok([C64::new(*a, *b); 2]),
        [a, b, c, d] => Ok([C64::new(*a, *b), C64::new(*c, *d)]),
        _ => Err(ChenError::InvalidPath(format!("bad s specification {v:?}"))),
    }
}

impl TryFrom<RawPath> for PathSpec {
    type Error = ChenError;
    fn try_from(r: RawPath) -> Result<Self, ChenError> {
        let segs = r
            .segments
            .iter()
            .map(|s| {
                Ok(match s {
                    RawSegment::Line { from, to } => Segment::Line { from: pt_of(from)?, to: pt_of(to)? },
                    RawSegment::Arc { center, radius, angles, s } => {
                        Segment::Arc { center: c_of(center)?, radius: *radius, angles: *angles, s: s_pair(s)? }
                    }
                    RawSegment::Geometric { anchor, from, to, s } => {
                        Segment::Geometric { anchor: c_of(anchor)?, from: c_of(from)?, to: c_of(to)?, s: s_pair(s)? }
                    }
                })
            })
            .collect::<Result<Vec<_>, ChenError>>()?;
        PathSpec::new(r.model, segs)
    }
}

impl From<PathSpec> for RawPath {
    fn from(p: PathSpec) -> Self {
        let c = |z: C64| vec![z.re, z.im];
        let pt = |p: Pt| vec![p.z.re, p.z.im, p.s.re, p.s.im];
        let sp = |s: [C64; 2]| vec![s[0].re, s[0].im, s[1].re, s[1].im];
        RawPath {
            model: p.model,
            segments: p
                .segments
                .into_iter()
                .map(|s| match s {
                    Segment::Line { from, to } => RawSegment::Line { from: pt(from), to: pt(to) },
                    Segment::Arc { center, radius, angles, s } => {
                        RawSegment::Arc { center: c(center), radius, angles, s: sp(s) }
                    }
                    Segment::Geometric { anchor, from, to, s } => {
                        RawSegment::Geometric { anchor: c(anchor), from: c(from), to: c(to), s: sp(s) }
                    }
                })
                .collect(),
        }
    }
}

/// The one-forms whose iterated integrals are computed.
#[derive(Debug, Clone)]
pub enum Alphabet<'a> {
    Edagger { ext: &'a ExtLattice, forms: Vec<FormElement> },
    P1 { forms: Vec<P1Form> },
}

impl Alphabet<'_> {
    pub fn len(&self) -> usize {
        match self {
            Alphabet::Edagger { forms, .. } => forms.len(),
            Alphabet::P1 { forms } => forms.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn model(&self) -> Model {
        match self {
            Alphabet::Edagger { .. } => Model::Edagger,
            Alphabet::P1 { .. } => Model::P1,
        }
    }

    fn lattice(&self) -> Option<&LatticeData> {
        match self {
            Alphabet::Edagger { ext, .. } => Some(ext.base()),
            Alphabet::P1 { .. } => None,
        }
    }

    /// `dt`-coefficients of every letter at the sample.
    fn eval(&self, s: &Sample, out: &mut [C64]) -> Result<(), ChenError> {
        match self {
            Alphabet::Edagger { ext, forms } => {
                let top = forms
                    .iter()
                    .flat_map(|f| f.terms().map(|(s, _)| *s))
                    .filter_map(|s| match s {
                        FormSymbol::Omega(n) => Some(n),
                        FormSymbol::Nu => None,
                    })
                    .max();
                let f = match top {
                    Some(n) => ext.f_range(s.z, s.s, n)?,
                    None => Vec::new(),
                };
                for (o, form) in out.iter_mut().zip(forms) {
                    let (cz, cs) = form.evaluate(&f);
                    *o = cz * s.dz + cs * s.ds;
                }
            }
            Alphabet::P1 { forms } => {
                for (o, form) in out.iter_mut().zip(forms) {
                    *o = form.eval(s.z, s.zm1, s.dz);
                }
            }
        }
        Ok(())
    }
}

/// Ambient model whose degree-1 basis indexes the letters of bar elements.
#[derive(Debug, Clone, Copy)]
pub enum Ambient<'a> {
    /// Basis `ν, ω⁽⁰⁾, …, ω⁽ᴺ⁾` as in [`crate::logforms::dga_presentation`].
    Edagger(&'a ExtLattice),
    /// Basis `ω₀, ω₁`.
    P1,
}

impl<'a> Ambient<'a> {
    pub fn model(&self) -> Model {
        match self {
            Ambient::Edagger(_) => Model::Edagger,
            Ambient::P1 => Model::P1,
        }
    }

    /// The alphabet made of the given basis letters.
    pub fn alphabet(&self, letters: &[usize]) -> Result<Alphabet<'a>, ChenError> {
        match self {
            Ambient::Edagger(ext) => {
                let forms = letters
                    .iter()
                    .map(|&i| {
                        if i > ext.truncation() + 1 {
                            return Err(ChenError::UnknownLetter(i));
                        }
                        Ok(FormElement::symbol(FormSymbol::from_basis_index(i)))
                    })
                    .collect::<Result<_, _>>()?;
                Ok(Alphabet::Edagger { ext, forms })
            }
            Ambient::P1 => {
                let forms = letters
                    .iter()
                    .map(|&i| if i < 2 { Ok(P1Form::letter(i as u8)) } else { Err(ChenError::UnknownLetter(i)) })
                    .collect::<Result<_, _>>()?;
                Ok(Alphabet::P1 { forms })
            }
        }
    }
}

/// Truncated word series over an alphabet of size `d`: `coeffs[n]` holds the
/// `dⁿ` words of length `n`, indexed in base `d` with the first letter most
/// significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    d: usize,
    coeffs: Vec<Vec<C64>>,
}

impl Series {
    pub fn identity(d: usize, ell: usize) -> Self {
        let mut coeffs: Vec<Vec<C64>> = (0..=ell).map(|n| vec![C64::zero(); d.pow(n as u32)]).collect();
        coeffs[0][0] = C64::new(1.0, 0.0);
        Series { d, coeffs }
    }

    pub fn ell(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `later · earlier`.
    pub fn after(later: &Series, earlier: &Series) -> Series {
        let d = later.d;
        let mut out = Series::identity(d, later.ell());
        for n in 1..=later.ell() {
            for (w, slot) in out.coeffs[n].iter_mut().enumerate() {
                let mut acc = C64::zero();
                for k in 0..=n {
                    let tail = d.pow((n - k) as u32);
                    acc += later.coeffs[k][w / tail] * earlier.coeffs[n - k][w % tail];
                }
                *slot = acc;
            }
        }
        out
    }

    fn max_diff(&self, o: &Series, n: usize) -> f64 {
        self.coeffs[n].iter().zip(&o.coeffs[n]).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    fn max_abs(&self, n: usize) -> f64 {
        self.coeffs[n].iter().map(|a| a.norm()).fold(0.0, f64::max)
    }
}

/// Panel refinement record for one segment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SegmentLog {
    pub panels: usize,
    pub max_depth: usize,
}

/// All iterated integrals of an alphabet along a path up to a length bound.
#[derive(Debug, Clone)]
pub struct TransportResult {
    series: Series,
    /// estimated absolute error, per word length
    pub error: Vec<f64>,
    pub segments: Vec<SegmentLog>,
}

impl TransportResult {
    pub fn alphabet_size(&self) -> usize {
        self.series.d
    }

    pub fn ell_max(&self) -> usize {
        self.series.ell()
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    /// `∫ b₁…b_n` for a word of alphabet positions.
    pub fn get(&self, word: &[usize]) -> C64 {
        let d = self.series.d;
        let idx = word.iter().fold(0usize, |acc, &b| acc * d + b);
        self.series.coeffs[word.len()][idx]
    }
}

struct Quadrature {
    x: Vec<f64>,
    w: Vec<f64>,
    /// `s[i][j] = ∫_{−1}^{x_i} ℓ_j`, `ℓ_j` the Lagrange basis on the nodes
    s: Vec<Vec<f64>>,
}

/// `P_0(x), …, P_{n}(x)`.
fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for k in 1..n {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p.truncate(n + 1);
    p
}

fn quadrature() -> &'static Quadrature {
    static Q: OnceLock<Quadrature> = OnceLock::new();
    Q.get_or_init(|| {
        let m = GL_ORDER;
        let mut x = vec![0.0; m];
        let mut w = vec![0.0; m];
        for i in 0..m {
            let mut r = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
            for _ in 0..100 {
                let p = legendre_all(m, r);
                let dp = m as f64 * (r * p[m] - p[m - 1]) / (r * r - 1.0);
                let dr = p[m] / dp;
                r -= dr;
                if dr.abs() < 1e-16 {
                    break;
                }
            }
            let p = legendre_all(m, r);
            let dp = m as f64 * (r * p[m] - p[m - 1]) / (r * r - 1.0);
            x[m - 1 - i] = r;
            w[m - 1 - i] = 2.0 / ((1.0 - r * r) * dp * dp);
        }
        // interpolant coefficients c_k = (2k+1)/2 Σ_j w_j P_k(x_j) f_j, and
        // ∫_{−1}^{x} P_k = (P_{k+1} − P_{k−1})/(2k+1), ∫_{−1}^{x} P_0 = x + 1
        let p_at: Vec<Vec<f64>> = x.iter().map(|&xi| legendre_all(m, xi)).collect();
        let mut s = vec![vec![0.0; m]; m];
        for i in 0..m {
            let pi = &p_at[i];
            let ip: Vec<f64> = (0..m)
                .map(|k| if k == 0 { x[i] + 1.0 } else { (pi[k + 1] - pi[k - 1]) / (2 * k + 1) as f64 })
                .collect();
            for j in 0..m {
                s[i][j] = (0..m).map(|k| ip[k] * (2 * k + 1) as f64 / 2.0 * w[j] * p_at[j][k]).sum();
            }
        }
        Quadrature { x, w, s }
    })
}

struct SegmentTransport<'a, 'b> {
    alpha: &'b Alphabet<'a>,
    seg: &'b Segment,
    ell: usize,
    tol: f64,
    panels: usize,
    max_depth: usize,
    error: Vec<f64>,
}

impl SegmentTransport<'_, '_> {
    /// Series of one panel `[a, b]` by spectral integration.
    fn panel(&self, a: f64, b: f64) -> Result<Series, ChenError> {
        let q = quadrature();
        let m = GL_ORDER;
        let d = self.alpha.len();
        let h = 0.5 * (b - a);
        // vals[letter][node]
        let mut vals = vec![vec![C64::zero(); m]; d];
        let mut buf = vec![C64::zero(); d];
        for j in 0..m {
            let t = a + h * (1.0 + q.x[j]);
            self.alpha.eval(&self.seg.sample(t), &mut buf)?;
            for (l, v) in buf.iter().enumerate() {
                if !v.is_finite() {
                    return Err(ChenError::QuadratureFailure("non-finite integrand".into()));
                }
                vals[l][j] = v * h;
            }
        }
        let mut out = Series::identity(d, self.ell);
        // prev[v][node] = running integral of the suffix word v
        let mut prev: Vec<Vec<C64>> = vec![vec![C64::new(1.0, 0.0); m]];
        for n in 1..=self.ell {
            let tail = d.pow((n - 1) as u32);
            let keep = n < self.ell;
            let mut next = if keep { Vec::with_capacity(d * tail) } else { Vec::new() };
            for (b, letter) in vals.iter().enumerate() {
                for (v, jv) in prev.iter().enumerate() {
                    let g: Vec<C64> = (0..m).map(|j| letter[j] * jv[j]).collect();
                    out.coeffs[n][b * tail + v] = (0..m).map(|j| q.w[j] * g[j]).sum();
                    if keep {
                        next.push(q.s.iter().map(|row| row.iter().zip(&g).map(|(s, x)| s * x).sum()).collect());
                    }
                }
            }
            prev = next;
        }
        Ok(out)
    }

    fn run(&mut self) -> Result<Series, ChenError> {
        let coarse = self.panel(0.0, 1.0)?;
        self.panels = 1;
        self.refine(0.0, 1.0, coarse, 0)
    }

    fn refine(&mut self, a: f64, b: f64, coarse: Series, depth: usize) -> Result<Series, ChenError> {
        let mid = 0.5 * (a + b);
        let left = self.panel(a, mid)?;
        let right = self.panel(mid, b)?;
        self.panels += 1;
        self.max_depth = self.max_depth.max(depth + 1);
        let fine = Series::after(&right, &left);
        let width = b - a;
        let errs: Vec<f64> = (0..=self.ell).map(|n| coarse.max_diff(&fine, n)).collect();
        let ok = (1..=self.ell).all(|n| errs[n] <= self.tol * width * (1.0 + fine.max_abs(n)));
        if ok {
            for n in 1..=self.ell {
                self.error[n] += errs[n];
            }
            return Ok(fine);
        }
        if depth + 1 >= MAX_DEPTH || self.panels >= PANEL_BUDGET {
            return Err(ChenError::QuadratureFailure(format!(
                "tolerance {:e} not reached within {} panels (depth {})",
                self.tol,
                self.panels,
                depth + 1
            )));
        }
        let l = self.refine(a, mid, left, depth + 1)?;
        let r = self.refine(mid, b, right, depth + 1)?;
        Ok(Series::after(&r, &l))
    }
}

/// Iterated integrals of all words of length `≤ ell` over the alphabet.
pub fn chen_transport(alpha: &Alphabet, path: &PathSpec, ell: usize, tol: f64) -> Result<TransportResult, ChenError> {
    if ell > MAX_LENGTH {
        return Err(ChenError::LengthTooLarge(ell));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(ChenError::InvalidTolerance(tol));
    }
    if alpha.model() != path.model {
        return Err(ChenError::ModelMismatch);
    }
    path.check_guard(alpha.lattice())?;
    let d = alpha.len();
    let mut total = Series::identity(d, ell);
    let mut error = vec![0.0; ell + 1];
    let mut logs = Vec::new();
    for (i, seg) in path.segments.iter().enumerate() {
        let mut st = SegmentTransport { alpha, seg, ell, tol, panels: 0, max_depth: 0, error: vec![0.0; ell + 1] };
        let s = st.run().map_err(|e| match e {
            ChenError::Form(FormError::Lattice(LatticeError::NearPole { distance, guard })) => {
                ChenError::GuardViolation { segment: i, distance, guard }
            }
            other => other,
        })?;
        total = Series::after(&s, &total);
        for n in 0..=ell {
            error[n] += st.error[n];
        }
        logs.push(SegmentLog { panels: st.panels, max_depth: st.max_depth });
    }
    Ok(TransportResult { series: total, error, segments: logs })
}

/// Letters used by a bar-degree-0 element, in increasing order.
fn used_letters(xi: &BarElement) -> Result<Vec<usize>, ChenError> {
    let mut used = std::collections::BTreeSet::new();
    for (w, _) in xi.terms() {
        for l in &w.0 {
            if l.deg != 1 {
                return Err(ChenError::NotDegreeZero);
            }
            used.insert(l.idx);
        }
    }
    Ok(used.into_iter().collect())
}

/// `Σ_w c_w ∫_γ w` for a bar element with letters in the ambient basis.
pub fn eval_bar_element(xi: &BarElement, amb: Ambient, path: &PathSpec, tol: f64) -> Result<C64, ChenError> {
    let letters = used_letters(xi)?;
    let alpha = amb.alphabet(&letters)?;
    let ell = xi.length();
    let tr = chen_transport(&alpha, path, ell, tol)?;
    Ok(eval_on_transport(xi, &letters, &tr))
}

/// Evaluates `xi` on a transport whose alphabet position `k` is basis letter
/// `letters[k]`.
pub fn eval_on_transport(xi: &BarElement, letters: &[usize], tr: &TransportResult) -> C64 {
    let mut total = C64::zero();
    for (w, c) in xi.terms() {
        let pos: Vec<usize> =
            w.0.iter().map(|l| letters.iter().position(|&x| x == l.idx).expect("letter present")).collect();
        total += crate::exact::to_f64(c) * tr.get(&pos);
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomotopyReport {
    pub value1: C64,
    pub value2: C64,
    pub difference: f64,
}

/// Evaluates `xi` on two paths with common endpoints.
pub fn homotopy_report(
    xi: &BarElement,
    amb: Ambient,
    g1: &PathSpec,
    g2: &PathSpec,
    tol: f64,
) -> Result<HomotopyReport, ChenError> {
    let g2 = match amb {
        Ambient::Edagger(ext) => {
            let lat = ext.base();
            let (a, b) = (g1.start(), g2.start());
            let (m, n) = lat
                .lattice_coordinates(a.z - b.z)
                .map_err(|_| ChenError::EndpointMismatch("start points not congruent".into()))?;
            let moved = g2.translated(lat.lattice_point(m, n), -lat.eta_of(m, n));
            let (c, d) = (g1.end(), moved.end());
            let (p, q) = lat
                .lattice_coordinates(c.z - d.z)
                .map_err(|_| ChenError::EndpointMismatch("end points not congruent".into()))?;
            if (c.s - d.s + lat.eta_of(p, q)).norm() > LOOP_TOL * c.scale() {
                return Err(ChenError::EndpointMismatch("end points not congruent".into()));
            }
            moved
        }
        Ambient::P1 => {
            if g1.start().dist(&g2.start()) > ENDPOINT_TOL * g1.start().scale()
                || g1.end().dist(&g2.end()) > ENDPOINT_TOL * g1.end().scale()
            {
                return Err(ChenError::EndpointMismatch("paths do not share endpoints".into()));
            }
            g2.clone()
        }
    };
    let v1 = eval_bar_element(xi, amb, g1, tol)?;
    let v2 = eval_bar_element(xi, amb, &g2, tol)?;
    Ok(HomotopyReport { value1: v1, value2: v2, difference: (v1 - v2).norm() })
}

/// Cutoffs `ε = 2^{−k}` used for regularization.
pub const EPS_EXPONENTS: std::ops::RangeInclusive<i32> = 12..=40;
/// Powers of `ε` kept in the fit model.
pub const EPS_ORDER: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularizedIntegral {
    pub value: C64,
    /// coefficients of `logʲ ε`, `j = 0..=n`, in the `ε⁰` part of the fit
    pub log_coeffs: Vec<C64>,
    /// root-mean-square residual of the fit
    pub residual: f64,
}

/// `I(ε)` along the straight path from `ε` to `1 − ε`, split at `½` and
/// parametrized geometrically towards each end.
fn cutoff_integral(word: &[u8], eps: f64, tol: f64) -> Result<C64, ChenError> {
    let alpha = Alphabet::P1 { forms: vec![P1Form::w0(), P1Form::w1()] };
    let zero = [C64::zero(); 2];
    let path = PathSpec::new(
        Model::P1,
        vec![
            Segment::Geometric { anchor: C64::zero(), from: C64::new(eps, 0.0), to: C64::new(0.5, 0.0), s: zero },
            Segment::Geometric {
                anchor: C64::new(1.0, 0.0),
                from: C64::new(-0.5, 0.0),
                to: C64::new(-eps, 0.0),
                s: zero,
            },
        ],
    )?;
    let tr = chen_transport(&alpha, &path, word.len(), tol)?;
    let pos: Vec<usize> = word.iter().map(|&b| b as usize).collect();
    Ok(tr.get(&pos))
}

/// Regularized iterated integral of a word in `ω₀ = 0`, `ω₁ = 1` from the
/// tangent vector `1` at `0` to the tangent vector `−1` at `1`: the
/// `log ε`-free constant term of `I(ε)`, from a least-squares fit of
/// `Σ_{m≤3} εᵐ P_m(log ε)`, `deg P_m ≤ |word|`.
pub fn regularized_integral_p1(word: &[u8], tol: f64) -> Result<RegularizedIntegral, ChenError> {
    if word.is_empty() {
        return Err(ChenError::EmptyWord);
    }
    if word.iter().any(|&b| b > 1) {
        return Err(ChenError::UnknownLetter(word.iter().copied().find(|&b| b > 1).unwrap() as usize));
    }
    let n = word.len();
    let ks: Vec<i32> = EPS_EXPONENTS.collect();
    let quad_tol = tol.min(1e-12);
    let values: Vec<C64> =
        ks.iter().map(|&k| cutoff_integral(word, 2f64.powi(-k), quad_tol)).collect::<Result<_, _>>()?;
    let k0 = *ks.first().unwrap() as f64;
    let lscale = (*ks.last().unwrap() as f64) * std::f64::consts::LN_2;
    let cols = (EPS_ORDER + 1) * (n + 1);
    let mut a = DMatrix::<f64>::zeros(ks.len(), cols);
    for (r, &k) in ks.iter().enumerate() {
        let le = -(k as f64) * std::f64::consts::LN_2 / lscale;
        let er = 2f64.powf(k0 - k as f64);
        for m in 0..=EPS_ORDER {
            for j in 0..=n {
                a[(r, m * (n + 1) + j)] = er.powi(m as i32) * le.powi(j as i32);
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let solve = |b: DVector<f64>| -> Result<DVector<f64>, ChenError> {
        svd.solve(&b, 1e-13).map_err(|e| ChenError::FitInstability { residual: f64::NAN, tol: e.len() as f64 })
    };
    let bre = DVector::from_iterator(ks.len(), values.iter().map(|v| v.re));
    let bim = DVector::from_iterator(ks.len(), values.iter().map(|v| v.im));
    let (xre, xim) = (solve(bre.clone())?, solve(bim.clone())?);
    let rre = &a * &xre - bre;
    let rim = &a * &xim - bim;
    let residual = ((rre.norm_squared() + rim.norm_squared()) / ks.len() as f64).sqrt();
    let scale = 1.0 + values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let fit_tol = 1e3 * tol * scale;
    if residual > fit_tol {
        return Err(ChenError::FitInstability { residual, tol: fit_tol });
    }
    let log_coeffs = (0..=n).map(|j| C64::new(xre[j], xim[j]) / lscale.powi(j as i32)).collect();
    Ok(RegularizedIntegral { value: C64::new(xre[0], xim[0]), log_coeffs, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wlattice::{lattice_from_curve, CurveSpec};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn p1(z: C64) -> Pt {
        Pt::new(z, C64::zero())
    }

    #[test]
    fn quadrature_integrates_polynomials() {
        let q = quadrature();
        let total: f64 = q.w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
        // ∫_{−1}^{x} t³ dt = (x⁴ − 1)/4
        for (i, &x) in q.x.iter().enumerate() {
            let v: f64 = (0..GL_ORDER).map(|j| q.s[i][j] * q.x[j].powi(3)).sum();
            assert!((v - (x.powi(4) - 1.0) / 4.0).abs() < 1e-14);
        }
    }

    #[test]
    fn p1_loop_gives_two_pi_i() {
        let alpha = Alphabet::P1 { forms: vec![P1Form::w0(), P1Form::w1()] };
        let circle = PathSpec::new(
            Model::P1,
            vec![Segment::Arc { center: C64::zero(), radius: 0.25, angles: [0.0, 2.0 * PI], s: [C64::zero(); 2] }],
        )
        .unwrap();
        let tr = chen_transport(&alpha, &circle, 2, 1e-12).unwrap();
        assert!((tr.get(&[0]) - c(0.0, 2.0 * PI)).norm() < 1e-12);
        assert!(tr.get(&[1]).norm() < 1e-12);
        assert_eq!(tr.get(&[]), c(1.0, 0.0));
        // ∫ ω₀ω₀ = (2πi)²/2
        assert!((tr.get(&[0, 0]) - c(0.0, 2.0 * PI).powi(2) / 2.0).norm() < 1e-11);
    }

    #[test]
    fn line_integrals_and_reversal() {
        let alpha = Alphabet::P1 { forms: vec![P1Form::w0(), P1Form::w1()] };
        let g = PathSpec::polyline(Model::P1, &[p1(c(0.3, 0.1)), p1(c(0.5, 0.6)), p1(c(2.0, -0.4))]).unwrap();
        let tr = chen_transport(&alpha, &g, 3, 1e-12).unwrap();
        let ln = |z: C64| z.ln();
        let expect = ln(c(2.0, -0.4)) - ln(c(0.3, 0.1));
        assert!((tr.get(&[0]) - expect).norm() < 1e-12);
        let rv = chen_transport(&alpha, &g.reversed(), 3, 1e-12).unwrap();
        for w in [vec![0usize, 1], vec![1, 1, 0], vec![0, 1, 1]] {
            let mut r = w.clone();
            r.reverse();
            let sign = if w.len() % 2 == 0 { 1.0 } else { -1.0 };
            assert!((rv.get(&w) - sign * tr.get(&r)).norm() < 1e-11);
        }
    }

    #[test]
    fn edagger_translate_path() {
        let l = lattice_from_curve(&CurveSpec::from_ints(5, 2).unwrap(), 1e-10).unwrap();
        let ext = ExtLattice::new(l.clone(), 4);
        let z0 = 0.5 * (l.omega1 + l.omega2);
        let path = PathSpec::line(Model::Edagger, Pt::new(z0, C64::zero()), Pt::new(z0 + l.omega1, -l.eta1));
        assert_eq!(path.loop_class(&l), Some((1, 0)));
        let alpha = Alphabet::Edagger { ext: &ext, forms: vec![FormElement::omega(0), FormElement::nu()] };
        let tr = chen_transport(&alpha, &path, 2, 1e-12).unwrap();
        assert!((tr.get(&[0]) - l.omega1).norm() < 1e-12);
        assert!((tr.get(&[1]) + l.eta1).norm() < 1e-12);
    }

    #[test]
    fn guard_and_model_errors() {
        let alpha = Alphabet::P1 { forms: vec![P1Form::w0()] };
        let bad = PathSpec::line(Model::P1, p1(c(-1.0, 1e-3)), p1(c(0.5, 1e-3)));
        let through = PathSpec::line(Model::P1, p1(c(-1.0, 0.0)), p1(c(0.5, 0.0)));
        assert!(chen_transport(&alpha, &bad, 1, 1e-10).is_ok());
        assert!(matches!(chen_transport(&alpha, &through, 1, 1e-10), Err(ChenError::GuardViolation { .. })));
        let l = lattice_from_curve(&CurveSpec::from_ints(4, 0).unwrap(), 1e-10).unwrap();
        let ext = ExtLattice::new(l, 2);
        let ea = Alphabet::Edagger { ext: &ext, forms: vec![FormElement::omega(1)] };
        assert_eq!(chen_transport(&ea, &through, 1, 1e-10).unwrap_err(), ChenError::ModelMismatch);
        assert!(matches!(chen_transport(&alpha, &bad, 9, 1e-10), Err(ChenError::LengthTooLarge(9))));
        assert!(matches!(chen_transport(&alpha, &bad, 1, 0.0), Err(ChenError::InvalidTolerance(_))));
    }

    #[test]
    fn composition_requires_matching_endpoints() {
        let a = PathSpec::line(Model::P1, p1(c(0.5, 0.5)), p1(c(0.5, -0.5)));
        let b = PathSpec::line(Model::P1, p1(c(2.0, 0.0)), p1(c(0.5, 0.5)));
        let ab = compose_paths(&a, &b).unwrap();
        assert_eq!(ab.start(), b.start());
        assert_eq!(ab.end(), a.end());
        assert!(matches!(compose_paths(&b, &a), Err(ChenError::EndpointMismatch(_))));
    }

    #[test]
    fn json_schema_round_trip() {
        let js = r#"{"model":"edagger","segments":[
            {"kind":"line","from":[0.1,0.2,0,0],"to":[0.5,0.2,1,0]},
            {"kind":"arc","center":[0.5,0.0],"radius":0.2,"angles":[1.5707963267948966,0.0],"s":[1,0,1,0]}]}"#;
        let p: PathSpec = serde_json::from_str(js).unwrap();
        assert_eq!(p.segments().len(), 2);
        let back: PathSpec = serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(back, p);
        let gap = r#"{"model":"p1","segments":[
            {"kind":"line","from":[0.1,0.2],"to":[0.5,0.2]},
            {"kind":"line","from":[0.6,0.2],"to":[0.5,0.9]}]}"#;
        assert!(serde_json::from_str::<PathSpec>(gap).is_err());
    }

    #[test]
    fn unreachable_tolerance_fails() {
        let alpha = Alphabet::P1 { forms: vec![P1Form::w0(), P1Form::w1()] };
        let circle = PathSpec::new(
            Model::P1,
            vec![Segment::Arc { center: c(0.5, 0.0), radius: 0.6, angles: [0.0, 2.0 * PI], s: [C64::zero(); 2] }],
        )
        .unwrap();
        assert!(chen_transport(&alpha, &circle, 3, 1e-10).is_ok());
        assert!(matches!(chen_transport(&alpha, &circle, 3, 1e-15), Err(ChenError::QuadratureFailure(_))));
    }

    #[test]
    fn regularized_low_words() {
        let z2 = PI * PI / 6.0;
        let r = regularized_integral_p1(&[0, 1], 1e-10).unwrap();
        assert!((r.value - c(-z2, 0.0)).norm() < 1e-9, "{:?}", r);
        let r1 = regularized_integral_p1(&[1], 1e-10).unwrap();
        assert!(r1.value.norm() < 1e-10, "{:?}", r1);
        assert!((r1.log_coeffs[1] - c(1.0, 0.0)).norm() < 1e-8);
    }
}
