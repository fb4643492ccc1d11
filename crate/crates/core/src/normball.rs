//! Reconstruction and certification of polytopal seminorm unit balls from
//! sampled values, in dimension at most three.
//!
//! A sample `(v, c)` with `c > 0` contributes the points `±v/c` to an inner
//! hull `H`; samples with `c = 0` span the lineality space, which is factored
//! out before the hull is taken. Since `H` is centrally symmetric and contains
//! the origin in its interior, every facet is `{x : n·x = 1}` and the gauge is
//! `max_F n_F·v`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

type Q = BigRational;

fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

fn to_q(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

/// Lattice vectors with nonnegative rational values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSet {
    pub dim: usize,
    pub samples: Vec<(Vec<i64>, Q)>,
}

impl SampleSet {
    /// Validates dimensions, signs, and duplicates (`v` and `−v` count as
    /// the same sample).
    pub fn new(dim: usize, samples: Vec<(Vec<i64>, Q)>) -> Result<Self> {
        if dim == 0 || dim > 3 {
            return Err(Error::Unsupported(format!("ball dimension {dim}")));
        }
        let mut seen: BTreeMap<Vec<i64>, Q> = BTreeMap::new();
        for (v, c) in &samples {
            if v.len() != dim {
                return Err(Error::Input(format!(
                    "sample {v:?} has {} coordinates, expected {dim}",
                    v.len()
                )));
            }
            if c.is_negative() {
                return Err(Error::Input(format!("negative value {c} at {v:?}")));
            }
            if v.iter().all(|&x| x == 0) {
                if !c.is_zero() {
                    return Err(Error::Input("zero vector with nonzero value".into()));
                }
                continue;
            }
            let neg: Vec<i64> = v.iter().map(|x| -x).collect();
            let key = if v > &neg { v.clone() } else { neg };
            if let Some(old) = seen.get(&key) {
                if old != c {
                    return Err(Error::Input(format!(
                        "inconsistent values {old} and {c} at {v:?}"
                    )));
                }
            } else {
                seen.insert(key, c.clone());
            }
        }
        Ok(SampleSet { dim, samples })
    }

    /// Parses lines `v1,v2[,v3],value`; values may be integers, fractions
    /// `a/b`, or decimals. Blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut dim = None;
        let mut samples = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 2 {
                return Err(Error::Parse {
                    line: ln + 1,
                    col: 1,
                    msg: "expected coordinates and a value".into(),
                });
            }
            let d = fields.len() - 1;
            if *dim.get_or_insert(d) != d {
                return Err(Error::Parse {
                    line: ln + 1,
                    col: 1,
                    msg: "inconsistent number of coordinates".into(),
                });
            }
            let v = fields[..d]
                .iter()
                .map(|f| f.parse::<i64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| Error::Parse {
                    line: ln + 1,
                    col: 1,
                    msg: e.to_string(),
                })?;
            let c = parse_rational(fields[d]).ok_or_else(|| Error::Parse {
                line: ln + 1,
                col: line.rfind(',').map_or(1, |i| i + 2),
                msg: format!("bad value {:?}", fields[d]),
            })?;
            samples.push((v, c));
        }
        SampleSet::new(dim.unwrap_or(0), samples)
    }
}

/// Parses `3`, `-7/2`, or `1.25` exactly.
pub fn parse_rational(s: &str) -> Option<Q> {
    if let Some((n, d)) = s.split_once('/') {
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(Q::new(n.trim().parse().ok()?, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let neg = int.trim_start().starts_with('-');
        let ip: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().ok()?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let fp: BigInt = frac.parse().ok()?;
        let mag = ip.abs() * &scale + fp;
        return Some(Q::new(if neg { -mag } else { mag }, scale));
    }
    Some(Q::from_integer(s.trim().parse().ok()?))
}

/// A facet `{x : normal·x = 1}` of the reconstructed ball.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Outward normal in the ambient coordinates.
    pub normal: Vec<Q>,
    /// Indices into [`BallCertificate::vertices`].
    pub vertices: Vec<usize>,
    /// A sample in the open cone over the relative interior with matching value.
    pub witness: Option<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallCertificate {
    pub dim: usize,
    /// Vertices in ambient coordinates; for a seminorm these are
    /// representatives modulo the lineality space.
    pub vertices: Vec<Vec<Q>>,
    pub facets: Vec<Facet>,
    /// Integer basis of the lineality space.
    pub lineality: Vec<Vec<i64>>,
    /// Dimension of the hull after factoring out the lineality space.
    pub hull_dim: usize,
    pub certified: bool,
    /// Human-readable reasons for a missing certificate.
    pub gaps: Vec<String>,
    /// Integer rows mapping ambient vectors to quotient coordinates.
    projection: Vec<Vec<i64>>,
    /// Rational basis of the hull's span in quotient coordinates.
    span: Vec<Vec<Q>>,
}

/// Gauge value, possibly infinite for directions outside the sampled span.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Gauge {
    Finite(Q),
    Infinite,
}

impl Gauge {
    pub fn finite(&self) -> Option<&Q> {
        match self {
            Gauge::Finite(x) => Some(x),
            Gauge::Infinite => None,
        }
    }
}

/// Row-reduces `rows` over Q and returns a basis of their span.
fn row_basis(rows: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let pv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let src = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m
}

/// Basis of `{n : n·w = 0 for all w}`, scaled to primitive integer vectors.
fn annihilator(ws: &[Vec<Q>], dim: usize) -> Vec<Vec<i64>> {
    let basis = row_basis(ws);
    let pivots: Vec<usize> = basis
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let mut out = Vec::new();
    for free in (0..dim).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Q::zero(); dim];
        v[free] = Q::one();
        for (row, &p) in basis.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        out.push(primitive_integer(&v));
    }
    out
}

fn primitive_integer(v: &[Q]) -> Vec<i64> {
    use num_integer::Integer;
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * Q::from_integer(l.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    ints.iter()
        .map(|x| (x / &g).to_i64().expect("small coordinates"))
        .collect()
}

/// Solves the square system `a·x = b`, if uniquely solvable.
fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut m: Vec<Vec<Q>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !m[i][c].is_zero())?;
        m.swap(c, p);
        let pv = m[c][c].clone();
        for x in m[c].iter_mut() {
            *x = &*x / &pv;
        }
        for i in 0..n {
            if i != c && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let src = m[c].clone();
                for (x, y) in m[i].iter_mut().zip(&src) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut r| r.pop().unwrap()).collect())
}

/// Coordinates of `y` in the (row-reduced) basis `span`, or `None` if `y`
/// is outside the span.
fn span_coords(span: &[Vec<Q>], y: &[Q]) -> Option<Vec<Q>> {
    // rows of `span` are in reduced echelon form: the coordinate along row i
    // is the entry of y at that row's pivot column
    let coords: Vec<Q> = span
        .iter()
        .map(|row| {
            let p = row.iter().position(|x| !x.is_zero()).unwrap();
            y[p].clone()
        })
        .collect();
    let mut back = vec![Q::zero(); y.len()];
    for (c, row) in coords.iter().zip(span) {
        for (b, r) in back.iter_mut().zip(row) {
            *b += c * r;
        }
    }
    (back.as_slice() == y).then_some(coords)
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Builds the inner hull and its certificate.
pub fn reconstruct_ball(s: &SampleSet) -> Result<BallCertificate> {
    let dim = s.dim;
    let zero_dirs: Vec<Vec<Q>> = s
        .samples
        .iter()
        .filter(|(v, c)| c.is_zero() && v.iter().any(|&x| x != 0))
        .map(|(v, _)| to_q(v))
        .collect();
    let lineality: Vec<Vec<i64>> = row_basis(&zero_dirs)
        .iter()
        .map(|r| primitive_integer(r))
        .collect();
    let projection = annihilator(&zero_dirs, dim);
    let project = |v: &[i64]| -> Vec<Q> {
        projection
            .iter()
            .map(|row| q(row.iter().zip(v).map(|(a, b)| a * b).sum()))
            .collect()
    };
    let positive: Vec<(&Vec<i64>, &Q)> = s
        .samples
        .iter()
        .filter(|(_, c)| c.is_positive())
        .map(|(v, c)| (v, c))
        .collect();
    if positive.is_empty() {
        return Err(Error::Input("no sample with positive value".into()));
    }
    // points ±y/c in quotient coordinates
    let mut points: Vec<Vec<Q>> = Vec::new();
    for (v, c) in &positive {
        let y = project(v);
        if y.iter().all(Q::is_zero) {
            return Err(Error::Input(format!(
                "sample {v:?} has positive value but lies in the lineality space"
            )));
        }
        let p: Vec<Q> = y.iter().map(|x| x / *c).collect();
        let m: Vec<Q> = p.iter().map(|x| -x).collect();
        for pt in [p, m] {
            if !points.contains(&pt) {
                points.push(pt);
            }
        }
    }
    let span = row_basis(&points);
    let k = span.len();
    let local: Vec<Vec<Q>> = points
        .iter()
        .map(|p| span_coords(&span, p).expect("points lie in their span"))
        .collect();

    // supporting hyperplanes n·x = 1 through k affinely independent points
    let mut normals: Vec<Vec<Q>> = Vec::new();
    for subset in k_subsets(local.len(), k) {
        let a: Vec<Vec<Q>> = subset.iter().map(|&i| local[i].clone()).collect();
        let Some(n) = solve(&a, &vec![Q::one(); k]) else {
            continue;
        };
        if local.iter().all(|p| dot(&n, p) <= Q::one()) && !normals.contains(&n) {
            normals.push(n);
        }
    }

    // vertices: points whose tight normals have full rank
    let mut vertex_of_point = vec![None; local.len()];
    let mut vertices_local = Vec::new();
    for (i, p) in local.iter().enumerate() {
        let tight: Vec<Vec<Q>> = normals
            .iter()
            .filter(|n| dot(n, p) == Q::one())
            .cloned()
            .collect();
        if row_basis(&tight).len() == k {
            vertex_of_point[i] = Some(vertices_local.len());
            vertices_local.push(i);
        }
    }

    // pull back to ambient coordinates: quotient coords y = P v, local
    // coords l with y = Σ l_i span_i; a normal n on l is the functional
    // v ↦ n·l(P v)
    let span_pivots: Vec<usize> = span
        .iter()
        .map(|row| row.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let ambient_normal = |n: &[Q]| -> Vec<Q> {
        (0..dim)
            .map(|j| {
                n.iter()
                    .zip(&span_pivots)
                    .fold(Q::zero(), |acc, (ni, &p)| acc + ni * q(projection[p][j]))
            })
            .collect()
    };
    // a representative preimage for a vertex: the scaled sample itself
    let mut point_source: Vec<Vec<Q>> = Vec::new();
    for (v, c) in &positive {
        let p: Vec<Q> = v.iter().map(|&x| q(x) / *c).collect();
        let m: Vec<Q> = p.iter().map(|x| -x).collect();
        point_source.push(p);
        point_source.push(m);
    }
    let source_for = |pt: &Vec<Q>| -> Vec<Q> {
        let target = span_coords(&span, pt).unwrap();
        point_source
            .iter()
            .find(|src| {
                let y: Vec<Q> = projection
                    .iter()
                    .map(|row| {
                        row.iter()
                            .zip(src.iter())
                            .fold(Q::zero(), |a, (r, x)| a + q(*r) * x)
                    })
                    .collect();
                span_coords(&span, &y).as_ref() == Some(&target)
            })
            .cloned()
            .expect("every hull point comes from a sample")
    };
    let vertices: Vec<Vec<Q>> = vertices_local
        .iter()
        .map(|&i| source_for(&points[i]))
        .collect();

    let mut facets = Vec::new();
    let mut gaps = Vec::new();
    for n in &normals {
        let fv: Vec<usize> = local
            .iter()
            .enumerate()
            .filter(|(_, p)| dot(n, p) == Q::one())
            .filter_map(|(i, _)| vertex_of_point[i])
            .collect();
        // witness: a sample whose direction has n as its unique maximizer
        // and whose value matches
        let mut witness = None;
        for (v, c) in &positive {
            let y = project(v);
            let Some(l) = span_coords(&span, &y) else {
                continue;
            };
            for sign in [1i64, -1] {
                let ls: Vec<Q> = l.iter().map(|x| x * q(sign)).collect();
                let val = dot(n, &ls);
                if &val != *c {
                    continue;
                }
                if normals.iter().all(|m| m == n || dot(m, &ls) < val) {
                    witness = Some(v.iter().map(|x| x * sign).collect());
                    break;
                }
            }
            if witness.is_some() {
                break;
            }
        }
        let normal = ambient_normal(n);
        if witness.is_none() {
            gaps.push(format!(
                "no interior witness for facet {}",
                fmt_vec(&normal)
            ));
        }
        facets.push(Facet {
            normal,
            vertices: fv,
            witness,
        });
    }
    let full = dim - lineality.len();
    if k < full {
        gaps.push(format!(
            "samples span only {k} of {full} dimensions modulo the lineality space"
        ));
    }
    facets.sort_by(|a, b| a.normal.cmp(&b.normal));
    let certified = gaps.is_empty() && !facets.is_empty();
    Ok(BallCertificate {
        dim,
        vertices,
        facets,
        lineality,
        hull_dim: k,
        certified,
        gaps,
        projection,
        span,
    })
}

fn fmt_vec(v: &[Q]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// The Minkowski gauge of the reconstructed ball at `v`.
pub fn ball_norm_eval(b: &BallCertificate, v: &[i64]) -> Result<Gauge> {
    if v.len() != b.dim {
        return Err(Error::Input(format!(
            "vector has {} coordinates, expected {}",
            v.len(),
            b.dim
        )));
    }
    let y: Vec<Q> = b
        .projection
        .iter()
        .map(|row| q(row.iter().zip(v).map(|(a, x)| a * x).sum()))
        .collect();
    if y.iter().all(Q::is_zero) {
        return Ok(Gauge::Finite(Q::zero()));
    }
    if span_coords(&b.span, &y).is_none() {
        return Ok(Gauge::Infinite);
    }
    let vq = to_q(v);
    let best = b
        .facets
        .iter()
        .map(|f| dot(&f.normal, &vq))
        .max()
        .unwrap_or_else(Q::zero);
    Ok(Gauge::Finite(best))
}

impl BallCertificate {
    /// An SVG sketch of a two-dimensional ball with its sample points.
    pub fn to_svg(&self, samples: &SampleSet) -> Result<String> {
        if self.dim != 2 || self.hull_dim != 2 {
            return Err(Error::Unsupported(
                "SVG output needs a two-dimensional ball".into(),
            ));
        }
        let f = |x: &Q| x.numer().to_f64().unwrap_or(0.0) / x.denom().to_f64().unwrap_or(1.0);
        let mut pts: Vec<(f64, f64)> = self.vertices.iter().map(|v| (f(&v[0]), f(&v[1]))).collect();
        pts.sort_by(|a, b| a.1.atan2(a.0).total_cmp(&b.1.atan2(b.0)));
        let extent = pts
            .iter()
            .map(|(x, y)| x.abs().max(y.abs()))
            .fold(0.0f64, f64::max)
            .max(1e-9);
        let scale = 180.0 / extent;
        let tx = |(x, y): (f64, f64)| (200.0 + x * scale, 200.0 - y * scale);
        let poly: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = tx(p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        let mut out = String::new();
        out.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"400\" height=\"400\" viewBox=\"0 0 400 400\">\n");
        out.push_str("<line x1=\"0\" y1=\"200\" x2=\"400\" y2=\"200\" stroke=\"#bbb\"/>\n");
        out.push_str("<line x1=\"200\" y1=\"0\" x2=\"200\" y2=\"400\" stroke=\"#bbb\"/>\n");
        out.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#cfe0f5\" stroke=\"#1f4e8c\" stroke-width=\"2\"/>\n",
            poly.join(" ")
        ));
        for (v, c) in &samples.samples {
            if !c.is_positive() {
                continue;
            }
            for s in [1.0, -1.0] {
                let p = (s * v[0] as f64 / f(c), s * v[1] as f64 / f(c));
                let (x, y) = tx(p);
                out.push_str(&format!(
                    "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"4\" fill=\"#c0392b\"/>\n"
                ));
            }
        }
        out.push_str("</svg>\n");
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(dim: usize, s: &[(&[i64], i64)]) -> SampleSet {
        SampleSet::new(dim, s.iter().map(|(v, c)| (v.to_vec(), q(*c))).collect()).unwrap()
    }

    #[test]
    fn octahedron() {
        let mut s: Vec<(&[i64], i64)> = vec![(&[1, 0, 0], 1), (&[0, 1, 0], 1), (&[0, 0, 1], 1)];
        let corners: Vec<[i64; 3]> = vec![[1, 1, 1], [-1, 1, 1], [1, -1, 1], [1, 1, -1]];
        for c in &corners {
            s.push((c, 3));
        }
        let b = reconstruct_ball(&set(3, &s)).unwrap();
        assert!(b.certified, "{:?}", b.gaps);
        assert_eq!(b.facets.len(), 8);
        assert_eq!(b.vertices.len(), 6);
        assert_eq!(ball_norm_eval(&b, &[1, 1, 1]).unwrap(), Gauge::Finite(q(3)));
        assert_eq!(
            ball_norm_eval(&b, &[2, -1, 0]).unwrap(),
            Gauge::Finite(q(3))
        );
    }

    #[test]
    fn square() {
        let b = reconstruct_ball(&set(
            2,
            &[(&[0, 1], 2), (&[1, 0], 2), (&[1, 1], 2), (&[-1, 1], 2)],
        ))
        .unwrap();
        assert!(b.certified);
        let half = Q::new(BigInt::from(1), BigInt::from(2));
        let mut vs = b.vertices.clone();
        vs.sort();
        let mut expect: Vec<Vec<Q>> = vec![];
        for sx in [-1, 1] {
            for sy in [-1, 1] {
                expect.push(vec![&half * q(sx), &half * q(sy)]);
            }
        }
        expect.sort();
        assert_eq!(vs, expect);
        assert_eq!(ball_norm_eval(&b, &[2, 3]).unwrap(), Gauge::Finite(q(6)));
    }

    #[test]
    fn single_sample_is_uncertified() {
        let b = reconstruct_ball(&set(2, &[(&[1, 0], 1)])).unwrap();
        assert!(!b.certified);
        assert_eq!(b.hull_dim, 1);
        assert_eq!(ball_norm_eval(&b, &[0, 1]).unwrap(), Gauge::Infinite);
        assert_eq!(ball_norm_eval(&b, &[3, 0]).unwrap(), Gauge::Finite(q(3)));
        assert_eq!(ball_norm_eval(&b, &[0, 0]).unwrap(), Gauge::Finite(q(0)));
    }

    #[test]
    fn lineality() {
        let b = reconstruct_ball(&set(2, &[(&[1, 0], 0), (&[0, 1], 2), (&[1, 1], 2)])).unwrap();
        assert_eq!(b.lineality, vec![vec![1, 0]]);
        assert!(b.certified, "{:?}", b.gaps);
        assert_eq!(ball_norm_eval(&b, &[5, 3]).unwrap(), Gauge::Finite(q(6)));
    }

    #[test]
    fn inconsistent_duplicates() {
        let r = SampleSet::new(2, vec![(vec![1, 0], q(1)), (vec![-1, 0], q(2))]);
        assert!(r.is_err());
        assert!(SampleSet::new(4, vec![]).is_err());
    }

    #[test]
    fn csv() {
        let s = SampleSet::from_csv("# v,value\n1,0,1\n0,1,3/2\n1,1,2.5\n").unwrap();
        assert_eq!(s.dim, 2);
        assert_eq!(s.samples[1].1, Q::new(BigInt::from(3), BigInt::from(2)));
        assert_eq!(s.samples[2].1, Q::new(BigInt::from(5), BigInt::from(2)));
        assert!(SampleSet::from_csv("1,0,x\n").is_err());
    }
}
