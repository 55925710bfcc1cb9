//! Spinless non-interacting fermions at fixed particle number.
//!
//! `E₀(λ)` is the sum of the `Nₚ` lowest single-particle levels. It is
//! continuous, but when two levels cross at the occupation frontier its
//! derivative jumps. The two one-sided slopes at the cusp are sums of the
//! occupied HFT slopes plus eigenvalues of the `H′` block of the frontier
//! cluster.

use crate::branches::{check_grid, linspace, track_branches, BranchPoint};
use crate::degenerate::{rotated_spectrum, DegenerateCluster, RotatedSpectrum};
use crate::error::{Error, Result};
use crate::model::ParametricModel;
use crate::tracking::best_match;

/// Bisection stops once the bracket is this narrow.
pub const CROSSING_TOL: f64 = 1e-10;
/// One-sided step used to attribute cusp slopes to the left and right.
pub const SIDE_STEP: f64 = 1e-4;

/// Number of particles, `1 <= Nₚ <= dim`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FillingSpec {
    n_particles: usize,
}

impl FillingSpec {
    pub fn new(n_particles: usize, dim: usize) -> Result<Self> {
        if n_particles == 0 || n_particles > dim {
            return Err(Error::FillingOutOfRange { n_particles, dim });
        }
        Ok(Self { n_particles })
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    fn check(&self, dim: usize) -> Result<()> {
        Self::new(self.n_particles, dim).map(|_| ())
    }
}

/// Sum of the `Nₚ` lowest eigenvalues of `H(λ)`.
pub fn ground_energy<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    fill: FillingSpec,
) -> Result<f64> {
    fill.check(model.dim())?;
    let spectrum = model.spectrum(lambda)?;
    Ok(spectrum.values[..fill.n_particles].iter().sum())
}

/// `dE₀/dλ` from the HFT, or both one-sided values at a cusp.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GroundSlope {
    Smooth(f64),
    Cusp { left: f64, right: f64 },
}

impl GroundSlope {
    pub fn smooth(self) -> Option<f64> {
        match self {
            GroundSlope::Smooth(s) => Some(s),
            GroundSlope::Cusp { .. } => None,
        }
    }
}

/// Frontier cluster straddling the occupation boundary, if any.
struct Frontier<'a> {
    cluster: &'a DegenerateCluster,
    /// Slopes of levels strictly below the cluster, summed.
    below: f64,
    /// Occupied members of the cluster.
    occupied: usize,
}

impl Frontier<'_> {
    fn find(rs: &RotatedSpectrum, n_particles: usize) -> Option<Frontier<'_>> {
        let cluster = rs.cluster_of(n_particles - 1)?;
        (cluster.end() > n_particles).then(|| Frontier {
            cluster,
            below: rs.slopes[..cluster.start].iter().sum(),
            occupied: n_particles - cluster.start,
        })
    }

    /// `(steepest, shallowest)`: the occupied members take the largest
    /// slopes just left of λ₀ and the smallest just right of it.
    fn candidates(&self, rs: &RotatedSpectrum) -> (f64, f64) {
        let slopes = rs.cluster_slopes(self.cluster);
        let k = self.occupied;
        let top: f64 = slopes[slopes.len() - k..].iter().sum();
        let bottom: f64 = slopes[..k].iter().sum();
        (self.below + top, self.below + bottom)
    }
}

/// HFT ground-state slope in the HFT-consistent basis. `tol = None` uses the
/// default degeneracy tolerance.
pub fn ground_slope_hft<M: ParametricModel + ?Sized>(
    model: &M,
    lambda: f64,
    fill: FillingSpec,
    tol: Option<f64>,
) -> Result<GroundSlope> {
    fill.check(model.dim())?;
    let rs = rotated_spectrum(model, lambda, tol)?;
    Ok(match Frontier::find(&rs, fill.n_particles) {
        Some(frontier) => {
            let (left, right) = frontier.candidates(&rs);
            GroundSlope::Cusp { left, right }
        }
        None => GroundSlope::Smooth(rs.slopes[..fill.n_particles].iter().sum()),
    })
}

/// Locates λ where tracked branches swap across the occupation frontier,
/// refined by bisection to [`CROSSING_TOL`].
pub fn find_crossings<M: ParametricModel + ?Sized>(
    model: &M,
    lo: f64,
    hi: f64,
    steps: usize,
    fill: FillingSpec,
) -> Result<Vec<f64>> {
    check_grid(model, lo, hi, steps)?;
    fill.check(model.dim())?;
    let points = track_branches(model, &linspace(lo, hi, steps), None)?;
    crossings_from_points(model, &points, fill)
}

fn occupied(point: &BranchPoint, fill: FillingSpec) -> Vec<usize> {
    let mut occ = point.lowest(fill.n_particles);
    occ.sort_unstable();
    occ
}

fn crossings_from_points<M: ParametricModel + ?Sized>(
    model: &M,
    points: &[BranchPoint],
    fill: FillingSpec,
) -> Result<Vec<f64>> {
    let mut found: Vec<f64> = Vec::new();
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (occ_a, occ_b) = (occupied(a, fill), occupied(b, fill));
        if occ_a == occ_b {
            continue;
        }
        let leaving: Vec<usize> = occ_a
            .iter()
            .filter(|i| !occ_b.contains(i))
            .copied()
            .collect();
        let entering: Vec<usize> = occ_b
            .iter()
            .filter(|i| !occ_a.contains(i))
            .copied()
            .collect();
        if leaving.len() != 1 || entering.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "{} levels swap across the frontier between lambda = {} and {}; increase --steps",
                leaving.len(),
                a.lambda,
                b.lambda
            )));
        }
        let lambda0 = bisect(model, a, b.lambda, leaving[0], entering[0])?;
        if found
            .last()
            .is_none_or(|&prev| (lambda0 - prev).abs() > 1e-8)
        {
            found.push(lambda0);
        }
    }
    Ok(found)
}

/// Bisects `g(λ) = ε_leaving(λ) − ε_entering(λ)`, which is `<= 0` at the
/// left end, continuing both branches from the left end of the bracket.
fn bisect<M: ParametricModel + ?Sized>(
    model: &M,
    left: &BranchPoint,
    right_lambda: f64,
    leaving: usize,
    entering: usize,
) -> Result<f64> {
    let mut lo = left.lambda;
    let mut hi = right_lambda;
    let mut refs = [
        left.spectrum.vector(leaving),
        left.spectrum.vector(entering),
    ];
    while hi - lo > CROSSING_TOL {
        let mid = 0.5 * (lo + hi);
        let spectrum = model.spectrum(mid)?;
        let mut values = [0.0; 2];
        let mut vectors: [Vec<f64>; 2] = Default::default();
        for (slot, (state, reference)) in [leaving, entering].into_iter().zip(&refs).enumerate() {
            let (j, overlap) = best_match(reference, &spectrum, state, lo)?;
            let mut v = spectrum.vector(j);
            if overlap < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            values[slot] = spectrum.values[j];
            vectors[slot] = v;
        }
        if values[0] - values[1] <= 0.0 {
            lo = mid;
            refs = vectors;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// The two slopes of `E₀` at a frontier crossing.
#[derive(Clone, Debug, PartialEq)]
pub struct CuspReport {
    pub lambda0: f64,
    pub slope_left: f64,
    pub slope_right: f64,
    /// Eigenvalues of the frontier cluster's `H′` block, ascending.
    pub cluster_slopes: Vec<f64>,
    /// Sorted-level indices of the frontier cluster.
    pub frontier_indices: Vec<usize>,
    /// Sum of HFT slopes of the levels below the cluster.
    pub occupied_slope: f64,
}

/// Builds both one-sided slopes at λ₀. Left and right are assigned by
/// comparing with one-sided differences of `E₀` over [`SIDE_STEP`].
pub fn cusp_report<M: ParametricModel + ?Sized>(
    model: &M,
    lambda0: f64,
    fill: FillingSpec,
) -> Result<CuspReport> {
    fill.check(model.dim())?;
    let rs = rotated_spectrum(model, lambda0, None)?;
    let frontier = Frontier::find(&rs, fill.n_particles)
        .ok_or(Error::NoFrontierDegeneracy { lambda: lambda0 })?;
    let (a, b) = frontier.candidates(&rs);

    let e0 = ground_energy(model, lambda0, fill)?;
    let left_fd = (e0 - ground_energy(model, lambda0 - SIDE_STEP, fill)?) / SIDE_STEP;
    let right_fd = (ground_energy(model, lambda0 + SIDE_STEP, fill)? - e0) / SIDE_STEP;
    let (slope_left, slope_right) = if (left_fd - a).abs() + (right_fd - b).abs()
        <= (left_fd - b).abs() + (right_fd - a).abs()
    {
        (a, b)
    } else {
        (b, a)
    };

    Ok(CuspReport {
        lambda0,
        slope_left,
        slope_right,
        cluster_slopes: rs.cluster_slopes(frontier.cluster).to_vec(),
        frontier_indices: frontier.cluster.range().collect(),
        occupied_slope: frontier.below,
    })
}

/// One sample of `E₀(λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub lambda: f64,
    pub energy: f64,
    /// HFT slope; at a grid point sitting on a cusp, the one-sided value
    /// for the side of λ₀ the point lies on (left when equal).
    pub slope: f64,
    /// Occupied branches, numbered by their order at the first grid point.
    pub occupied_branches: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateCurve {
    pub points: Vec<CurvePoint>,
    pub cusps: Vec<CuspReport>,
}

/// Samples `E₀` and `dE₀/dλ` on a grid and resolves every frontier cusp.
pub fn ground_state_curve<M: ParametricModel + ?Sized>(
    model: &M,
    lo: f64,
    hi: f64,
    steps: usize,
    fill: FillingSpec,
) -> Result<GroundStateCurve> {
    check_grid(model, lo, hi, steps)?;
    fill.check(model.dim())?;
    let branch_points = track_branches(model, &linspace(lo, hi, steps), None)?;
    let crossings = crossings_from_points(model, &branch_points, fill)?;
    let cusps = crossings
        .iter()
        .map(|&l0| cusp_report(model, l0, fill))
        .collect::<Result<Vec<_>>>()?;

    let mut points = Vec::with_capacity(branch_points.len());
    for bp in &branch_points {
        let lambda = bp.lambda;
        let energy = ground_energy(model, lambda, fill)?;
        let slope = match ground_slope_hft(model, lambda, fill, None)? {
            GroundSlope::Smooth(s) => s,
            GroundSlope::Cusp { left, right } => {
                let nearest = cusps.iter().min_by(|x, y| {
                    (x.lambda0 - lambda)
                        .abs()
                        .total_cmp(&(y.lambda0 - lambda).abs())
                });
                match nearest {
                    Some(c) if lambda > c.lambda0 => c.slope_right,
                    Some(c) => c.slope_left,
                    // Frontier degeneracy with no bracketed crossing: only
                    // the interior side of the grid is meaningful.
                    None if lambda == lo => right,
                    None => left,
                }
            }
        };
        points.push(CurvePoint {
            lambda,
            energy,
            slope,
            occupied_branches: occupied(bp, fill),
        });
    }
    Ok(GroundStateCurve { points, cusps })
}
