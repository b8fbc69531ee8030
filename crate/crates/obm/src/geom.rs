//! Low-level geometric kernel: vector helpers, convex hulls in 2D/3D, exact
//! polytope volume, halfspace intersection via polar duality, and facet
//! enumeration. All higher modules build on these primitives.

/// Dot product of two equal-length vectors.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], r: f64) -> Vec<f64> {
    a.iter().map(|x| x * r).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn normalize(a: &[f64]) -> Vec<f64> {
    let n = norm(a);
    if n == 0.0 {
        a.to_vec()
    } else {
        scale(a, 1.0 / n)
    }
}

pub fn cross3(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Signed area of the parallelogram spanned by (b-a) and (c-a).
pub fn orient2d(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// 2D convex hull (Andrew monotone chain), counterclockwise, no duplicates.
/// Collinear interior points are dropped.
pub fn hull2d(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts: Vec<Vec<f64>> = points.to_vec();
    pts.sort_by(|a, b| {
        a[0].partial_cmp(&b[0])
            .unwrap()
            .then(a[1].partial_cmp(&b[1]).unwrap())
    });
    pts.dedup_by(|a, b| (a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let scale_hint: f64 = pts
        .iter()
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-13 * scale_hint * scale_hint;
    let mut lower: Vec<Vec<f64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2
            && orient2d(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= eps
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2
            && orient2d(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= eps
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Shoelace area of a counterclockwise polygon.
pub fn polygon_area(verts: &[Vec<f64>]) -> f64 {
    let n = verts.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let a = &verts[i];
        let b = &verts[(i + 1) % n];
        s += a[0] * b[1] - b[0] * a[1];
    }
    s / 2.0
}

/// A triangular face of a 3D hull, indices into the point list, outward normal.
#[derive(Clone, Debug)]
pub struct HullFace {
    pub idx: [usize; 3],
    pub normal: Vec<f64>, // unit outward
    pub offset: f64,      // x . normal = offset on the face plane
}

/// Incremental 3D convex hull (quickhull). Returns outward-oriented
/// triangular faces. Near-coplanar points are absorbed with a relative
/// tolerance; exact predicates are not needed at desk scale.
pub fn hull3d(points: &[Vec<f64>]) -> Vec<HullFace> {
    let n = points.len();
    assert!(n >= 4, "hull3d needs at least 4 points");
    let scale_hint: f64 = points
        .iter()
        .map(|p| norm(p))
        .fold(0.0, f64::max)
        .max(1e-300);
    let eps = 1e-12 * scale_hint;

    // initial simplex: extreme points along x, farthest from line, farthest from plane
    let mut i0 = 0;
    let mut i1 = 0;
    for (i, p) in points.iter().enumerate() {
        if p[0] < points[i0][0] {
            i0 = i;
        }
        if p[0] > points[i1][0] {
            i1 = i;
        }
    }
    if i0 == i1 {
        i1 = (i0 + 1) % n;
    }
    let d01 = sub(&points[i1], &points[i0]);
    let mut i2 = usize::MAX;
    let mut best = eps;
    for (i, p) in points.iter().enumerate() {
        let v = sub(p, &points[i0]);
        let c = cross3(&d01, &v);
        let d = norm(&c);
        if d > best {
            best = d;
            i2 = i;
        }
    }
    assert!(i2 != usize::MAX, "hull3d: points are collinear");
    let nrm = cross3(&d01, &sub(&points[i2], &points[i0]));
    let mut i3 = usize::MAX;
    let mut best = eps * norm(&nrm).max(1e-300);
    for (i, p) in points.iter().enumerate() {
        let d = dot(&nrm, &sub(p, &points[i0])).abs();
        if d > best {
            best = d;
            i3 = i;
        }
    }
    assert!(i3 != usize::MAX, "hull3d: points are coplanar");

    let mk = |a: usize, b: usize, c: usize, inside: &[f64]| -> HullFace {
        let mut nv = cross3(&sub(&points[b], &points[a]), &sub(&points[c], &points[a]));
        nv = normalize(&nv);
        let mut off = dot(&nv, &points[a]);
        let (a, mut b, mut c) = (a, b, c);
        if dot(&nv, inside) > off {
            std::mem::swap(&mut b, &mut c);
            nv = scale(&nv, -1.0);
            off = -off;
        }
        HullFace { idx: [a, b, c], normal: nv, offset: off }
    };

    let centroid: Vec<f64> = {
        let mut c = vec![0.0; 3];
        for &i in &[i0, i1, i2, i3] {
            c = add(&c, &points[i]);
        }
        scale(&c, 0.25)
    };

    let mut faces: Vec<Option<HullFace>> = vec![
        Some(mk(i0, i1, i2, &centroid)),
        Some(mk(i0, i1, i3, &centroid)),
        Some(mk(i0, i2, i3, &centroid)),
        Some(mk(i1, i2, i3, &centroid)),
    ];

    // conflict lists: outside points per face
    let dist = |f: &HullFace, p: &[f64]| dot(&f.normal, p) - f.offset;
    let mut conflicts: Vec<Vec<usize>> = vec![Vec::new(); 4];
    for i in 0..n {
        if [i0, i1, i2, i3].contains(&i) {
            continue;
        }
        for (fi, f) in faces.iter().enumerate() {
            if dist(f.as_ref().unwrap(), &points[i]) > eps {
                conflicts[fi].push(i);
                break;
            }
        }
    }

    loop {
        // pick a face with conflicts
        let Some(fi) = (0..faces.len())
            .find(|&fi| faces[fi].is_some() && !conflicts[fi].is_empty())
        else {
            break;
        };
        let f = faces[fi].clone().unwrap();
        let &far = conflicts[fi]
            .iter()
            .max_by(|&&a, &&b| {
                dist(&f, &points[a])
                    .partial_cmp(&dist(&f, &points[b]))
                    .unwrap()
            })
            .unwrap();
        let p = &points[far];

        // find all faces visible from p
        let mut visible: Vec<usize> = Vec::new();
        for (gi, g) in faces.iter().enumerate() {
            if let Some(g) = g {
                if dist(g, p) > eps {
                    visible.push(gi);
                }
            }
        }
        // horizon: edges of visible faces shared with non-visible faces
        use std::collections::HashMap;
        let mut edge_count: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &vi in &visible {
            let idx = faces[vi].as_ref().unwrap().idx;
            for k in 0..3 {
                let a = idx[k];
                let b = idx[(k + 1) % 3];
                let key = (a.min(b), a.max(b));
                let e = edge_count.entry(key).or_insert((0, 0));
                e.0 += 1;
                e.1 = if a < b { vi } else { vi };
            }
        }
        let horizon: Vec<(usize, usize)> = edge_count
            .iter()
            .filter(|(_, &(c, _))| c == 1)
            .map(|(&(a, b), _)| (a, b))
            .collect();

        // orphaned conflict points from removed faces
        let mut orphans: Vec<usize> = Vec::new();
        for &vi in &visible {
            orphans.append(&mut conflicts[vi]);
            faces[vi] = None;
        }
        orphans.retain(|&i| i != far);
        orphans.sort_unstable();
        orphans.dedup();

        for &(a, b) in &horizon {
            let nf = mk(a, b, far, &centroid);
            let fi_new = faces.len();
            faces.push(Some(nf));
            conflicts.push(Vec::new());
            let nf = faces[fi_new].as_ref().unwrap().clone();
            let mut kept = Vec::new();
            for &o in &orphans {
                if conflicts[fi_new].contains(&o) {
                    continue;
                }
                if dist(&nf, &points[o]) > eps {
                    conflicts[fi_new].push(o);
                } else {
                    kept.push(o);
                }
            }
            orphans = kept;
        }
    }

    faces.into_iter().flatten().collect()
}

/// True if a 3D point set has no interior (fewer than 4 points, or all
/// points within tolerance of a common plane/line).
pub fn degenerate3d(points: &[Vec<f64>]) -> bool {
    if points.len() < 4 {
        return true;
    }
    let scale_hint: f64 = points.iter().map(|p| norm(p)).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-12 * scale_hint;
    let p0 = &points[0];
    let Some(p1) = points.iter().find(|p| norm(&sub(p, p0)) > eps) else {
        return true;
    };
    let d01 = sub(p1, p0);
    let Some(p2) = points
        .iter()
        .find(|p| norm(&cross3(&d01, &sub(p, p0))) > eps * norm(&d01))
    else {
        return true;
    };
    let nrm = cross3(&d01, &sub(p2, p0));
    !points
        .iter()
        .any(|p| dot(&nrm, &sub(p, p0)).abs() > eps * norm(&nrm))
}

/// Exact volume of the convex hull of a 3D point set: fan of signed
/// tetrahedra from the centroid over the hull faces.
pub fn volume3d(points: &[Vec<f64>]) -> f64 {
    if degenerate3d(points) {
        return 0.0;
    }
    let faces = hull3d(points);
    let mut c = vec![0.0; 3];
    for p in points {
        c = add(&c, p);
    }
    c = scale(&c, 1.0 / points.len() as f64);
    let mut v = 0.0;
    for f in &faces {
        let a = sub(&points[f.idx[0]], &c);
        let b = sub(&points[f.idx[1]], &c);
        let d = sub(&points[f.idx[2]], &c);
        v += dot(&a, &cross3(&b, &d)).abs() / 6.0;
    }
    v
}

/// A facet of a polytope: (unit outward normal, (n-1)-measure, offset).
#[derive(Clone, Debug)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub measure: f64,
    pub offset: f64,
}

/// Facets of a 2D polygon given in counterclockwise order.
pub fn polygon_facets(verts: &[Vec<f64>]) -> Vec<Facet> {
    let n = verts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let a = &verts[i];
        let b = &verts[(i + 1) % n];
        let e = sub(b, a);
        let len = norm(&e);
        if len < 1e-15 {
            continue;
        }
        let nu = vec![e[1] / len, -e[0] / len];
        out.push(Facet {
            offset: dot(&nu, a),
            normal: nu,
            measure: len,
        });
    }
    out
}

/// Facets of the 3D hull of a point set, with coplanar triangles merged.
pub fn hull3d_facets(points: &[Vec<f64>]) -> Vec<Facet> {
    let faces = hull3d(points);
    let mut out: Vec<Facet> = Vec::new();
    let scale_hint: f64 = points.iter().map(|p| norm(p)).fold(0.0, f64::max).max(1e-300);
    for f in &faces {
        let a = &points[f.idx[0]];
        let b = &points[f.idx[1]];
        let c = &points[f.idx[2]];
        let area = norm(&cross3(&sub(b, a), &sub(c, a))) / 2.0;
        if area < 1e-18 * scale_hint * scale_hint {
            continue;
        }
        let mut merged = false;
        for g in out.iter_mut() {
            if norm(&sub(&f.normal, &g.normal)) < 1e-9
                && (f.offset - g.offset).abs() < 1e-9 * scale_hint.max(1.0)
            {
                g.measure += area;
                merged = true;
                break;
            }
        }
        if !merged {
            out.push(Facet {
                normal: f.normal.clone(),
                measure: area,
                offset: f.offset,
            });
        }
    }
    out
}

/// Vertices of `{x : normals[i] . x <= offsets[i]}` assuming the origin is
/// interior (all offsets strictly positive): polar duality maps the
/// halfspaces to the points `n_i/c_i`, whose hull facets dualize back to
/// vertices. Dimension 2 or 3.
pub fn halfspace_intersection(normals: &[Vec<f64>], offsets: &[f64]) -> Vec<Vec<f64>> {
    let dim = normals[0].len();
    let dual: Vec<Vec<f64>> = normals
        .iter()
        .zip(offsets)
        .map(|(n, &c)| scale(n, 1.0 / c))
        .collect();
    match dim {
        2 => {
            let h = hull2d(&dual);
            polygon_facets(&h)
                .iter()
                .map(|f| scale(&f.normal, 1.0 / f.offset))
                .collect()
        }
        3 => {
            let facets = hull3d_facets(&dual);
            let mut verts: Vec<Vec<f64>> = facets
                .iter()
                .map(|f| scale(&f.normal, 1.0 / f.offset))
                .collect();
            dedup_points(&mut verts, 1e-10);
            verts
        }
        _ => panic!("dimension must be 2 or 3"),
    }
}

pub fn dedup_points(pts: &mut Vec<Vec<f64>>, tol: f64) {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for p in pts.iter() {
        if !out.iter().any(|q| norm(&sub(p, q)) < tol) {
            out.push(p.clone());
        }
    }
    *pts = out;
}

/// Point-in-convex-polygon test for a ccw polygon, with tolerance.
pub fn polygon_contains(verts: &[Vec<f64>], x: &[f64], tol: f64) -> bool {
    let n = verts.len();
    if n == 0 {
        return false;
    }
    if n == 1 {
        return norm(&sub(x, &verts[0])) <= tol;
    }
    if n == 2 {
        // segment
        let d = sub(&verts[1], &verts[0]);
        let t = dot(&sub(x, &verts[0]), &d) / dot(&d, &d);
        let t = t.clamp(0.0, 1.0);
        let proj = add(&verts[0], &scale(&d, t));
        return norm(&sub(x, &proj)) <= tol;
    }
    for i in 0..n {
        if orient2d(&verts[i], &verts[(i + 1) % n], x) < -tol {
            return false;
        }
    }
    true
}

/// Minkowski sum of two ccw convex polygons (edge merge).
pub fn polygon_minkowski_sum(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(a.len() * b.len());
    for p in a {
        for q in b {
            pts.push(add(p, q));
        }
    }
    hull2d(&pts)
}
