//! Modulation constellations and distance-preserving constructive
//! interference regions (DPCIRs).
//!
//! A DPCIR is parameterized per constellation point `x_m` by a 2x2 matrix
//! `A_m` whose rows are `x_m - x_{m,i}` for two neighboring points, plus a
//! binary weight per row. A received point `x` lies in the region when
//! `A_m (x - x_m) = w .* delta` for some `delta >= 0`: corner points get two
//! free components, edge points one (the other row pins movement along the
//! boundary), interior points none.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::{Matrix2, Vector2};

use crate::error::Error;

/// Supported modulation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModulationKind {
    Psk,
    Qam,
}

/// Boundary classification of a constellation point's ML decision region.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointKind {
    /// Bounded decision region; the DPCIR degenerates to the point itself.
    Interior,
    /// Unbounded region whose two unbounded edges have parallel normals.
    Edge,
    /// Unbounded region whose two unbounded edges have independent normals.
    Corner,
}

impl PointKind {
    pub fn is_boundary(self) -> bool {
        !matches!(self, PointKind::Interior)
    }
}

/// One symbol of a constellation, in unit-average-power coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstellationPoint {
    pub index: usize,
    pub coords: Vector2<f64>,
    pub kind: PointKind,
}

/// An equiprobable 2-D symbol set with unit average power.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    pub(crate) label: String,
    pub(crate) kind: ModulationKind,
    pub(crate) points: Vec<ConstellationPoint>,
}

/// DPCIR data for one constellation point: normal-vector matrix, per-row
/// binary weights, and the neighbor indices the rows were built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CirSpec {
    /// Rows are the normal vectors `x_m - x_{m,1}` and `x_m - x_{m,2}`.
    pub a_matrix: Matrix2<f64>,
    /// Per-row weights; a zero weight turns that row into an equality.
    pub weights: [bool; 2],
    pub neighbor_indices: [usize; 2],
}

/// Determinant magnitude below which `a_matrix` counts as singular.
pub const DET_TOLERANCE: f64 = 1e-12;

impl Constellation {
    /// Label string used at the CLI, e.g. `"psk4"`, `"qam16"`.
    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kind(&self) -> ModulationKind {
        self.kind
    }

    /// Number of points `M`.
    pub fn order(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[ConstellationPoint] {
        &self.points
    }

    pub fn point(&self, m: usize) -> Result<&ConstellationPoint, Error> {
        self.points.get(m).ok_or(Error::InvalidPointIndex {
            index: m,
            order: self.points.len(),
        })
    }

    /// `(1/M) * sum ||x_m||^2`; equals one up to rounding.
    pub fn average_power(&self) -> f64 {
        let total: f64 = self.points.iter().map(|p| p.coords.norm_squared()).sum();
        total / self.points.len() as f64
    }

    /// Parse a label like `"psk8"` or `"qam16"` and build the constellation.
    pub fn from_label(label: &str) -> Result<Self, Error> {
        let (kind, digits) = if let Some(rest) = label.strip_prefix("psk") {
            (ModulationKind::Psk, rest)
        } else if let Some(rest) = label.strip_prefix("qam") {
            (ModulationKind::Qam, rest)
        } else {
            return Err(Error::UnsupportedModulation(format!(
                "unknown label {label:?} (expected psk<M> or qam<M>)"
            )));
        };
        let order: usize = digits
            .parse()
            .map_err(|_| Error::UnsupportedModulation(format!("bad order in label {label:?}")))?;
        make_constellation(kind, order)
    }
}

/// Construct a PSK or square-QAM constellation of the given order.
///
/// PSK points sit at angles `(2m + 1) pi / M` so the first point falls in
/// the open first quadrant; QAM uses odd-integer levels scaled to unit
/// average power, enumerated re-major with both axes ascending.
pub fn make_constellation(kind: ModulationKind, order: usize) -> Result<Constellation, Error> {
    match kind {
        ModulationKind::Psk => make_psk(order),
        ModulationKind::Qam => make_qam(order),
    }
}

fn make_psk(order: usize) -> Result<Constellation, Error> {
    if order < 3 {
        return Err(Error::UnsupportedModulation(format!(
            "psk order must be >= 3, got {order} (order 2 has collinear neighbors)"
        )));
    }
    let points = (0..order)
        .map(|m| {
            let angle = (2 * m + 1) as f64 * core::f64::consts::PI / order as f64;
            ConstellationPoint {
                index: m,
                coords: Vector2::new(libm::cos(angle), libm::sin(angle)),
                kind: PointKind::Corner,
            }
        })
        .collect();
    Ok(Constellation {
        label: format!("psk{order}"),
        kind: ModulationKind::Psk,
        points,
    })
}

fn make_qam(order: usize) -> Result<Constellation, Error> {
    let side = libm::sqrt(order as f64) as usize;
    if side * side != order || side % 2 != 0 || side < 2 {
        return Err(Error::UnsupportedModulation(format!(
            "qam order must be a perfect square with even side (4, 16, 64, ...), got {order}"
        )));
    }
    // Odd-integer grid scaled so the equiprobable set has unit average power:
    // E[l^2] = (side^2 - 1) / 3 per dimension.
    let scale = libm::sqrt(3.0 / (2.0 * (order as f64 - 1.0)));
    let level = |i: usize| (2.0 * i as f64 - (side as f64 - 1.0)) * scale;
    let mut points = Vec::with_capacity(order);
    for i_re in 0..side {
        for i_im in 0..side {
            let extremes = [0, side - 1];
            let on_re = extremes.contains(&i_re);
            let on_im = extremes.contains(&i_im);
            let kind = match (on_re, on_im) {
                (true, true) => PointKind::Corner,
                (false, false) => PointKind::Interior,
                _ => PointKind::Edge,
            };
            points.push(ConstellationPoint {
                index: i_re * side + i_im,
                coords: Vector2::new(level(i_re), level(i_im)),
                kind,
            });
        }
    }
    Ok(Constellation {
        label: format!("qam{order}"),
        kind: ModulationKind::Qam,
        points,
    })
}

/// DPCIR data for point `m` of `constellation`.
///
/// Boundary points take their rows from Voronoi-adjacent neighbors: corner
/// points use the two neighbors across the unbounded edges of the decision
/// region, edge points one such neighbor (weight 0, pinning lateral motion)
/// plus the inward neighbor whose normal points out of the hull (weight 1).
/// Interior points use the two nearest points with both weights 0.
pub fn dpcir(constellation: &Constellation, m: usize) -> Result<CirSpec, Error> {
    let point = constellation.point(m)?;
    let (neighbors, weights) = match constellation.kind {
        ModulationKind::Psk => psk_neighbors(constellation, m)?,
        ModulationKind::Qam => qam_neighbors(constellation, m, point.kind)?,
    };
    let (neighbors, weights) = sort_rows(constellation, neighbors, weights);
    let x_m = point.coords;
    let row = |n: usize| x_m - constellation.points[n].coords;
    let r1 = row(neighbors[0]);
    let r2 = row(neighbors[1]);
    let a_matrix = Matrix2::new(r1.x, r1.y, r2.x, r2.y);
    if (weights[0] || weights[1]) && libm::fabs(a_matrix.determinant()) <= DET_TOLERANCE {
        return Err(Error::UnsupportedGeometry(format!(
            "singular DPCIR normal matrix at point {m} of {}",
            constellation.label
        )));
    }
    Ok(CirSpec {
        a_matrix,
        weights,
        neighbor_indices: neighbors,
    })
}

impl CirSpec {
    /// Inverse of the (nonsingular) normal matrix, by adjugate.
    pub fn a_inverse(&self) -> Matrix2<f64> {
        let a = &self.a_matrix;
        let det = a.determinant();
        Matrix2::new(a[(1, 1)], -a[(0, 1)], -a[(1, 0)], a[(0, 0)]) / det
    }

    pub fn weight_count(&self) -> usize {
        self.weights.iter().filter(|&&w| w).count()
    }
}

fn psk_neighbors(
    constellation: &Constellation,
    m: usize,
) -> Result<([usize; 2], [bool; 2]), Error> {
    let order = constellation.order();
    let prev = (m + order - 1) % order;
    let next = (m + 1) % order;
    if prev == next || prev == m || next == m {
        return Err(Error::UnsupportedGeometry(format!(
            "point {m} of {} has fewer than two distinct neighbors",
            constellation.label
        )));
    }
    Ok(([prev, next], [true, true]))
}

fn qam_neighbors(
    constellation: &Constellation,
    m: usize,
    kind: PointKind,
) -> Result<([usize; 2], [bool; 2]), Error> {
    let side = libm::sqrt(constellation.order() as f64) as usize;
    let (i_re, i_im) = (m / side, m % side);
    let idx = |re: usize, im: usize| re * side + im;
    // 4-adjacent grid steps that stay inward or along the boundary.
    let inward_re = |i: usize| if i == 0 { 1 } else { i - 1 };
    match kind {
        PointKind::Corner => {
            // Both unbounded Voronoi edges face the 4-adjacent inward points.
            let n1 = idx(inward_re(i_re), i_im);
            let n2 = idx(i_re, inward_re(i_im));
            Ok(([n1, n2], [true, true]))
        }
        PointKind::Edge => {
            let extremes = [0, side - 1];
            // Along the extreme axis the two lateral neighbors bound the
            // unbounded edges (their normals are anti-parallel); across it
            // sits exactly one inward neighbor whose row points outward.
            let (lateral_a, lateral_b, inward) = if extremes.contains(&i_re) {
                (
                    idx(i_re, i_im - 1),
                    idx(i_re, i_im + 1),
                    idx(inward_re(i_re), i_im),
                )
            } else {
                (
                    idx(i_re - 1, i_im),
                    idx(i_re + 1, i_im),
                    idx(i_re, inward_re(i_im)),
                )
            };
            let lateral = smaller_by_coords(constellation, lateral_a, lateral_b);
            // The inward row carries the free weight; sort_rows keeps the
            // pairing when it reorders.
            Ok(([inward, lateral], [true, false]))
        }
        PointKind::Interior => {
            let mut others: Vec<usize> = (0..constellation.order()).filter(|&j| j != m).collect();
            let x_m = constellation.points[m].coords;
            others.sort_by(|&a, &b| {
                let da = (constellation.points[a].coords - x_m).norm_squared();
                let db = (constellation.points[b].coords - x_m).norm_squared();
                da.partial_cmp(&db)
                    .unwrap_or(Ordering::Equal)
                    .then_with(|| coord_order(constellation, a, b))
            });
            if others.len() < 2 {
                return Err(Error::UnsupportedGeometry(format!(
                    "point {m} of {} has fewer than two distinct neighbors",
                    constellation.label
                )));
            }
            Ok(([others[0], others[1]], [false, false]))
        }
    }
}

/// Order rows by the neighbor's coordinates, (im, re) ascending, keeping
/// each weight attached to its row.
fn sort_rows(
    constellation: &Constellation,
    neighbors: [usize; 2],
    weights: [bool; 2],
) -> ([usize; 2], [bool; 2]) {
    if coord_order(constellation, neighbors[0], neighbors[1]) == Ordering::Greater {
        ([neighbors[1], neighbors[0]], [weights[1], weights[0]])
    } else {
        (neighbors, weights)
    }
}

fn coord_order(constellation: &Constellation, a: usize, b: usize) -> Ordering {
    let pa = constellation.points[a].coords;
    let pb = constellation.points[b].coords;
    (pa.y, pa.x)
        .partial_cmp(&(pb.y, pb.x))
        .unwrap_or(Ordering::Equal)
}

fn smaller_by_coords(constellation: &Constellation, a: usize, b: usize) -> usize {
    if coord_order(constellation, a, b) == Ordering::Greater {
        b
    } else {
        a
    }
}
