//! Specimen tessellation.
//!
//! A rectangular specimen is tiled with convex polygonal particles; every
//! edge shared by two particles receives a cohesive interface. Nodes are
//! duplicated so each particle owns private copies of its corners, which
//! makes interface separation a plain difference of nodal displacements.

use crate::real::{scalar, Real};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::io::{self, Write};
use thiserror::Error;

/// Tessellation pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Axis-aligned square particles.
    StructuredQuad,
    /// Each grid cell split into four triangles about its centroid,
    /// admitting crack paths along the +-45 degree diagonals.
    CrossedTriangle,
    /// Voronoi cells grown from a jittered seed grid.
    Voronoi { seed: u64 },
}

/// Rectangular specimen description.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecimenSpec<F: Real> {
    /// Horizontal extent (m).
    pub width: F,
    /// Vertical extent (m); loading platens act on y = 0 and y = height.
    pub height: F,
    /// Target particle size (m). Must divide both extents for the
    /// structured patterns.
    pub particle_size: F,
    pub pattern: Pattern,
}

/// Convex polygonal particle, node indices in counter-clockwise order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Particle {
    pub nodes: Vec<usize>,
}

/// Constant-strain triangle of a particle's internal fan subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Triangle {
    pub particle: usize,
    pub nodes: [usize; 3],
}

/// Cohesive interface along an edge shared by two particles.
///
/// `nodes_a[k]` and `nodes_b[k]` start geometrically coincident. The unit
/// normal points from particle `a` (the lower index) towards particle `b`;
/// the tangent is the edge direction as traversed by particle `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interface<F: Real> {
    pub particle_a: usize,
    pub particle_b: usize,
    pub nodes_a: [usize; 2],
    pub nodes_b: [usize; 2],
    pub normal: [F; 2],
    pub tangent: [F; 2],
    pub length: F,
}

impl<F: Real> Interface<F> {
    /// Tributary length of each of the two end-point integration points.
    pub fn tributary_length(&self) -> F {
        self.length / scalar(2.0)
    }
}

/// Tessellated specimen.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh<F: Real> {
    pub width: F,
    pub height: F,
    pub nodes: Vec<[F; 2]>,
    pub particles: Vec<Particle>,
    pub triangles: Vec<Triangle>,
    pub interfaces: Vec<Interface<F>>,
}

/// Node index sets on the four specimen edges; corner nodes appear in two
/// sets.
#[derive(Debug, Clone, Default)]
pub struct BoundarySets {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("specimen dimensions and particle size must be positive and finite")]
    BadDimensions,
    #[error("particle size {size} does not divide specimen extent {extent}")]
    NonDivisible { size: f64, extent: f64 },
    #[error("degenerate cell produced by tessellation (particle {0})")]
    DegenerateCell(usize),
}

fn polygon_area<F: Real>(pts: &[[F; 2]]) -> F {
    let two = scalar::<F>(2.0);
    let mut acc = F::zero();
    for i in 0..pts.len() {
        let j = (i + 1) % pts.len();
        acc = acc + pts[i][0] * pts[j][1] - pts[j][0] * pts[i][1];
    }
    acc / two
}

impl<F: Real> Mesh<F> {
    /// Area of one particle from its polygon nodes.
    pub fn particle_area(&self, particle: usize) -> F {
        let pts: Vec<[F; 2]> = self.particles[particle]
            .nodes
            .iter()
            .map(|&n| self.nodes[n])
            .collect();
        polygon_area(&pts)
    }

    /// Sum of all particle areas.
    pub fn total_area(&self) -> F {
        (0..self.particles.len())
            .map(|i| self.particle_area(i))
            .sum()
    }

    /// Plain-text columnar listing of nodes, particles, triangles and
    /// interfaces, for debugging and plotting.
    pub fn write_listing<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# cohfrac mesh listing")?;
        writeln!(
            w,
            "# specimen {:e} x {:e}",
            self.width.as_f64(),
            self.height.as_f64()
        )?;
        writeln!(w, "# nodes {}", self.nodes.len())?;
        writeln!(w, "# node <id> <x> <y>")?;
        for (i, n) in self.nodes.iter().enumerate() {
            writeln!(w, "node {} {:e} {:e}", i, n[0].as_f64(), n[1].as_f64())?;
        }
        writeln!(w, "# particles {}", self.particles.len())?;
        writeln!(w, "# particle <id> <n_vertices> <node ids...>")?;
        for (i, p) in self.particles.iter().enumerate() {
            write!(w, "particle {} {}", i, p.nodes.len())?;
            for n in &p.nodes {
                write!(w, " {n}")?;
            }
            writeln!(w)?;
        }
        writeln!(w, "# triangles {}", self.triangles.len())?;
        writeln!(w, "# triangle <id> <particle> <n0> <n1> <n2>")?;
        for (i, t) in self.triangles.iter().enumerate() {
            writeln!(
                w,
                "triangle {} {} {} {} {}",
                i, t.particle, t.nodes[0], t.nodes[1], t.nodes[2]
            )?;
        }
        writeln!(w, "# interfaces {}", self.interfaces.len())?;
        writeln!(
            w,
            "# interface <id> <pa> <pb> <a0> <a1> <b0> <b1> <nx> <ny> <length>"
        )?;
        for (i, f) in self.interfaces.iter().enumerate() {
            writeln!(
                w,
                "interface {} {} {} {} {} {} {} {:e} {:e} {:e}",
                i,
                f.particle_a,
                f.particle_b,
                f.nodes_a[0],
                f.nodes_a[1],
                f.nodes_b[0],
                f.nodes_b[1],
                f.normal[0].as_f64(),
                f.normal[1].as_f64(),
                f.length.as_f64()
            )?;
        }
        Ok(())
    }

    /// Midpoint of an interface in the reference configuration.
    pub fn interface_midpoint(&self, i: usize) -> [F; 2] {
        let f = &self.interfaces[i];
        let a = self.nodes[f.nodes_a[0]];
        let b = self.nodes[f.nodes_a[1]];
        let half = scalar::<F>(0.5);
        [(a[0] + b[0]) * half, (a[1] + b[1]) * half]
    }
}

fn grid_count(extent: f64, size: f64) -> Result<usize, MeshError> {
    let ratio = extent / size;
    let n = ratio.round();
    if n < 1.0 || (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(MeshError::NonDivisible { size, extent });
    }
    Ok(n as usize)
}

/// Builds particles (as CCW coordinate polygons) for every pattern; the
/// shared assembly step then creates nodes, fans triangles and matches
/// edges into interfaces.
pub fn tessellate<F: Real>(spec: &SpecimenSpec<F>) -> Result<Mesh<F>, MeshError> {
    let w = spec.width.as_f64();
    let h = spec.height.as_f64();
    let s = spec.particle_size.as_f64();
    if !(w > 0.0 && h > 0.0 && s > 0.0) || !w.is_finite() || !h.is_finite() || !s.is_finite() {
        return Err(MeshError::BadDimensions);
    }

    let polygons: Vec<Vec<[f64; 2]>> = match spec.pattern {
        Pattern::StructuredQuad => {
            let nx = grid_count(w, s)?;
            let ny = grid_count(h, s)?;
            let mut polys = Vec::with_capacity(nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    let x0 = i as f64 * s;
                    let x1 = (i + 1) as f64 * s;
                    let y0 = j as f64 * s;
                    let y1 = (j + 1) as f64 * s;
                    polys.push(vec![[x0, y0], [x1, y0], [x1, y1], [x0, y1]]);
                }
            }
            polys
        }
        Pattern::CrossedTriangle => {
            let nx = grid_count(w, s)?;
            let ny = grid_count(h, s)?;
            let mut polys = Vec::with_capacity(4 * nx * ny);
            for j in 0..ny {
                for i in 0..nx {
                    let x0 = i as f64 * s;
                    let x1 = (i + 1) as f64 * s;
                    let y0 = j as f64 * s;
                    let y1 = (j + 1) as f64 * s;
                    let cx = (x0 + x1) / 2.0;
                    let cy = (y0 + y1) / 2.0;
                    let c = [cx, cy];
                    // South, east, north, west triangles; all CCW.
                    polys.push(vec![[x0, y0], [x1, y0], c]);
                    polys.push(vec![[x1, y0], [x1, y1], c]);
                    polys.push(vec![[x1, y1], [x0, y1], c]);
                    polys.push(vec![[x0, y1], [x0, y0], c]);
                }
            }
            polys
        }
        Pattern::Voronoi { seed } => voronoi_polygons(w, h, s, seed)?,
    };

    assemble(spec, polygons)
}

/// Voronoi cells from a jittered grid of seeds, clipped to the specimen
/// rectangle by successive half-plane cuts.
fn voronoi_polygons(
    w: f64,
    h: f64,
    s: f64,
    seed: u64,
) -> Result<Vec<Vec<[f64; 2]>>, MeshError> {
    let nx = (w / s).round().max(1.0) as usize;
    let ny = (h / s).round().max(1.0) as usize;
    let dx = w / nx as f64;
    let dy = h / ny as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeds = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let jx: f64 = rng.gen_range(-0.35..0.35);
            let jy: f64 = rng.gen_range(-0.35..0.35);
            seeds.push([(i as f64 + 0.5 + jx) * dx, (j as f64 + 0.5 + jy) * dy]);
        }
    }

    let cutoff2 = (5.0 * s.max(dx).max(dy)).powi(2);
    let mut polys = Vec::with_capacity(seeds.len());
    for (k, &p) in seeds.iter().enumerate() {
        let mut poly = vec![[0.0, 0.0], [w, 0.0], [w, h], [0.0, h]];
        for (l, &q) in seeds.iter().enumerate() {
            if l == k {
                continue;
            }
            let d2 = (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
            if d2 > cutoff2 {
                continue;
            }
            poly = clip_half_plane(&poly, p, q);
            if poly.len() < 3 {
                return Err(MeshError::DegenerateCell(k));
            }
        }
        // Collapse near-duplicate vertices introduced by clipping.
        let eps = 1e-9 * s;
        let mut cleaned: Vec<[f64; 2]> = Vec::with_capacity(poly.len());
        for v in poly {
            if let Some(last) = cleaned.last() {
                if (last[0] - v[0]).abs() < eps && (last[1] - v[1]).abs() < eps {
                    continue;
                }
            }
            cleaned.push(v);
        }
        if cleaned.len() >= 2 {
            let first = cleaned[0];
            let last = *cleaned.last().unwrap();
            if (first[0] - last[0]).abs() < eps && (first[1] - last[1]).abs() < eps {
                cleaned.pop();
            }
        }
        if cleaned.len() < 3 {
            return Err(MeshError::DegenerateCell(k));
        }
        polys.push(cleaned);
    }
    Ok(polys)
}

/// Sutherland–Hodgman clip of `poly` against the half plane of points
/// closer to `p` than to `q`.
fn clip_half_plane(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Vec<[f64; 2]> {
    let mx = (p[0] + q[0]) / 2.0;
    let my = (p[1] + q[1]) / 2.0;
    let nx = q[0] - p[0];
    let ny = q[1] - p[1];
    // Inside: (x - m) . n <= 0
    let side = |v: &[f64; 2]| (v[0] - mx) * nx + (v[1] - my) * ny;

    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let sa = side(&a);
        let sb = side(&b);
        if sa <= 0.0 {
            out.push(a);
            if sb > 0.0 {
                let t = sa / (sa - sb);
                out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            }
        } else if sb <= 0.0 {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Quantized coordinate key for matching coincident edge endpoints across
/// particles.
fn quant_key(p: [f64; 2], inv_eps: f64) -> (i64, i64) {
    ((p[0] * inv_eps).round() as i64, (p[1] * inv_eps).round() as i64)
}

fn assemble<F: Real>(
    spec: &SpecimenSpec<F>,
    polygons: Vec<Vec<[f64; 2]>>,
) -> Result<Mesh<F>, MeshError> {
    let mut nodes: Vec<[F; 2]> = Vec::new();
    let mut particles: Vec<Particle> = Vec::with_capacity(polygons.len());
    let mut triangles: Vec<Triangle> = Vec::new();

    for (pi, poly) in polygons.iter().enumerate() {
        if polygon_area(
            &poly
                .iter()
                .map(|v| [scalar::<F>(v[0]), scalar::<F>(v[1])])
                .collect::<Vec<_>>(),
        ) <= F::zero()
        {
            return Err(MeshError::DegenerateCell(pi));
        }
        let base = nodes.len();
        for v in poly {
            nodes.push([scalar(v[0]), scalar(v[1])]);
        }
        let ids: Vec<usize> = (base..base + poly.len()).collect();
        for k in 1..poly.len() - 1 {
            triangles.push(Triangle {
                particle: pi,
                nodes: [ids[0], ids[k], ids[k + 1]],
            });
        }
        particles.push(Particle { nodes: ids });
    }

    // Match coincident edges across particles.
    let inv_eps = 1.0 / (1e-9 * spec.particle_size.as_f64());
    type EdgeRef = (usize, usize, usize); // particle, start node, end node
    let mut edge_map: HashMap<((i64, i64), (i64, i64)), Vec<EdgeRef>> = HashMap::new();
    for (pi, poly) in polygons.iter().enumerate() {
        let ids = &particles[pi].nodes;
        for e in 0..poly.len() {
            let a = poly[e];
            let b = poly[(e + 1) % poly.len()];
            let ka = quant_key(a, inv_eps);
            let kb = quant_key(b, inv_eps);
            let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
            edge_map
                .entry(key)
                .or_default()
                .push((pi, ids[e], ids[(e + 1) % poly.len()]));
        }
    }

    let mut interfaces: Vec<Interface<F>> = Vec::new();
    // Iterate particles in order so interface numbering is deterministic.
    let mut seen: HashMap<((i64, i64), (i64, i64)), bool> = HashMap::new();
    for (pi, poly) in polygons.iter().enumerate() {
        for e in 0..poly.len() {
            let a = poly[e];
            let b = poly[(e + 1) % poly.len()];
            let ka = quant_key(a, inv_eps);
            let kb = quant_key(b, inv_eps);
            let key = if ka <= kb { (ka, kb) } else { (kb, ka) };
            if seen.contains_key(&key) {
                continue;
            }
            let entries = &edge_map[&key];
            if entries.len() != 2 {
                continue; // boundary edge
            }
            seen.insert(key, true);
            let (mut lo, mut hi) = (entries[0], entries[1]);
            if lo.0 > hi.0 {
                core::mem::swap(&mut lo, &mut hi);
            }
            debug_assert_eq!(lo.0, pi.min(hi.0));
            // Opposite traversal in CCW polygons: particle b's edge runs
            // end-to-start relative to particle a's.
            let nodes_a = [lo.1, lo.2];
            let nodes_b = [hi.2, hi.1];

            let pa = nodes[nodes_a[0]];
            let pb = nodes[nodes_a[1]];
            let ex = (pb[0] - pa[0]).as_f64();
            let ey = (pb[1] - pa[1]).as_f64();
            let len = ex.hypot(ey);
            if len <= 0.0 {
                continue;
            }
            let tangent = [scalar::<F>(ex / len), scalar::<F>(ey / len)];
            // CCW traversal keeps the particle interior on the left, so the
            // outward normal of particle a is the tangent rotated -90 deg.
            let normal = [scalar::<F>(ey / len), scalar::<F>(-ex / len)];
            interfaces.push(Interface {
                particle_a: lo.0,
                particle_b: hi.0,
                nodes_a,
                nodes_b,
                normal,
                tangent,
                length: scalar(len),
            });
        }
    }

    Ok(Mesh {
        width: spec.width,
        height: spec.height,
        nodes,
        particles,
        triangles,
        interfaces,
    })
}

/// Collects the node sets on the four specimen edges. Every boundary node
/// lands in at least one set; corner nodes land in two.
pub fn boundary_sets<F: Real>(mesh: &Mesh<F>) -> BoundarySets {
    let w = mesh.width.as_f64();
    let h = mesh.height.as_f64();
    let tol = 1e-9 * w.max(h);
    let mut sets = BoundarySets::default();
    for (i, n) in mesh.nodes.iter().enumerate() {
        let x = n[0].as_f64();
        let y = n[1].as_f64();
        if (y - h).abs() <= tol {
            sets.top.push(i);
        }
        if y.abs() <= tol {
            sets.bottom.push(i);
        }
        if x.abs() <= tol {
            sets.left.push(i);
        }
        if (x - w).abs() <= tol {
            sets.right.push(i);
        }
    }
    sets
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::collections::HashSet;

    fn spec(width: f64, height: f64, size: f64, pattern: Pattern) -> SpecimenSpec<f64> {
        SpecimenSpec {
            width,
            height,
            particle_size: size,
            pattern,
        }
    }

    #[test]
    fn structured_quad_counts_match_grid_formulas() {
        let mesh = tessellate(&spec(0.05, 0.1, 0.002, Pattern::StructuredQuad)).unwrap();
        let (nx, ny) = (25usize, 50usize);
        assert_eq!(mesh.particles.len(), nx * ny);
        assert_eq!(mesh.particles.len(), 1250);
        let expected_ifaces = (nx - 1) * ny + nx * (ny - 1);
        assert_eq!(mesh.interfaces.len(), expected_ifaces);
        assert_eq!(mesh.interfaces.len(), 2425);
        assert_relative_eq!(mesh.total_area(), 0.05 * 0.1, max_relative = 1e-12);
    }

    #[test]
    fn single_particle_has_no_interfaces() {
        let mesh = tessellate(&spec(0.002, 0.002, 0.002, Pattern::StructuredQuad)).unwrap();
        assert_eq!(mesh.particles.len(), 1);
        assert_eq!(mesh.interfaces.len(), 0);
        let sets = boundary_sets(&mesh);
        assert_eq!(sets.top.len(), 2); // its upper edge nodes
    }

    #[test]
    fn two_block_case() {
        let mesh = tessellate(&spec(0.004, 0.002, 0.002, Pattern::StructuredQuad)).unwrap();
        assert_eq!(mesh.particles.len(), 2);
        assert_eq!(mesh.interfaces.len(), 1);
        let f = &mesh.interfaces[0];
        assert_relative_eq!(f.length, 0.002, max_relative = 1e-12);
        assert_eq!((f.particle_a, f.particle_b), (0, 1));
        // Normal points from particle 0 to particle 1 (+x here).
        assert_relative_eq!(f.normal[0], 1.0, max_relative = 1e-12);
        assert!(f.normal[1].abs() < 1e-12);
    }

    #[test]
    fn boundary_sets_distinct_coordinates() {
        let mesh = tessellate(&spec(0.05, 0.1, 0.002, Pattern::StructuredQuad)).unwrap();
        let sets = boundary_sets(&mesh);
        let distinct: HashSet<i64> = sets
            .top
            .iter()
            .map(|&n| (mesh.nodes[n][0] * 1e12).round() as i64)
            .collect();
        assert_eq!(distinct.len(), 26);
        // Corners are members of two sets.
        let top: HashSet<_> = sets.top.iter().copied().collect();
        let left: HashSet<_> = sets.left.iter().copied().collect();
        assert!(top.intersection(&left).count() >= 1);
    }

    #[test]
    fn crossed_triangle_counts_and_length() {
        let (nx, ny) = (4usize, 6usize);
        let s = 0.002;
        let mesh = tessellate(&spec(
            nx as f64 * s,
            ny as f64 * s,
            s,
            Pattern::CrossedTriangle,
        ))
        .unwrap();
        assert_eq!(mesh.particles.len(), 4 * nx * ny);
        let expected = 4 * nx * ny + (nx - 1) * ny + nx * (ny - 1);
        assert_eq!(mesh.interfaces.len(), expected);
        let total_len: f64 = mesh.interfaces.iter().map(|f| f.length).sum();
        let diag = s / 2.0 * 2f64.sqrt();
        let expected_len = (4 * nx * ny) as f64 * diag + (((nx - 1) * ny + nx * (ny - 1)) as f64) * s;
        assert_relative_eq!(total_len, expected_len, max_relative = 1e-12);
        assert_relative_eq!(
            mesh.total_area(),
            nx as f64 * s * ny as f64 * s,
            max_relative = 1e-12
        );
    }

    #[test]
    fn interface_endpoints_start_coincident_and_ordered() {
        for pattern in [
            Pattern::StructuredQuad,
            Pattern::CrossedTriangle,
            Pattern::Voronoi { seed: 3 },
        ] {
            let mesh = tessellate(&spec(0.02, 0.02, 0.004, pattern)).unwrap();
            for f in &mesh.interfaces {
                assert!(f.particle_a < f.particle_b);
                for k in 0..2 {
                    let a = mesh.nodes[f.nodes_a[k]];
                    let b = mesh.nodes[f.nodes_b[k]];
                    assert!((a[0] - b[0]).abs() < 1e-10);
                    assert!((a[1] - b[1]).abs() < 1e-10);
                }
                let n = f.normal;
                assert_relative_eq!(n[0].hypot(n[1]), 1.0, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn non_divisible_size_is_rejected() {
        assert!(matches!(
            tessellate(&spec(0.05, 0.1, 0.003, Pattern::StructuredQuad)),
            Err(MeshError::NonDivisible { .. })
        ));
    }

    #[test]
    fn retessellation_is_bit_identical() {
        for pattern in [
            Pattern::StructuredQuad,
            Pattern::CrossedTriangle,
            Pattern::Voronoi { seed: 42 },
        ] {
            let a = tessellate(&spec(0.02, 0.03, 0.005, pattern)).unwrap();
            let b = tessellate(&spec(0.02, 0.03, 0.005, pattern)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn voronoi_partitions_the_specimen() {
        let mesh = tessellate(&spec(0.05, 0.05, 0.005, Pattern::Voronoi { seed: 9 })).unwrap();
        assert_relative_eq!(mesh.total_area(), 0.05 * 0.05, max_relative = 1e-9);
        assert!(!mesh.interfaces.is_empty());
        // Different seeds give different meshes.
        let other = tessellate(&spec(0.05, 0.05, 0.005, Pattern::Voronoi { seed: 10 })).unwrap();
        assert_ne!(mesh, other);
    }

    #[test]
    fn listing_is_parseable_text() {
        let mesh = tessellate(&spec(0.004, 0.002, 0.002, Pattern::StructuredQuad)).unwrap();
        let mut buf = Vec::new();
        mesh.write_listing(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("node 0 0e0 0e0"));
        assert!(text.contains("interface 0 0 1"));
    }
}
