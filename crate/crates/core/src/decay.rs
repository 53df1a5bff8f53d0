//! Polynomial-decay class membership, decay inheritance through the
//! windowed solver, arctan compactification, and viscosity-sequence
//! diagnostics.
//!
//! Membership in the decay class of order `l` with `m` derivatives is
//! fitted on the annulus `1 <= |x| <= L/2`: for every `|gamma| <= m` the
//! constant `c_gamma = max |D^gamma f| (1 + |x|^l)` must stay below the
//! configured ceiling. A finite box cannot witness behaviour at infinity,
//! so profiles carry the box length and non-membership shows up as growth
//! of the fitted constants under an `L`-sweep.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::field::{multi_indices, Field, VectorField};
use crate::math;
use crate::solver::{solve_global, Direction, Forcing, SchemeParams};

/// Fitted decay constants for one field (or the max over components).
#[derive(Clone, Debug)]
pub struct DecayProfile {
    pub order: usize,
    pub m: usize,
    /// `(multi-index, fitted constant)` for every `|gamma| <= m`.
    pub fitted: Vec<([usize; 3], f64)>,
    pub member: bool,
    pub ceiling: f64,
    /// Annulus `[inner, outer]` used for the fit.
    pub fit_region: (f64, f64),
    pub box_length: f64,
}

impl DecayProfile {
    pub fn max_fitted(&self) -> f64 {
        self.fitted.iter().map(|&(_, c)| c).fold(0.0, f64::max)
    }
}

/// Fit the decay constants of a scalar field on the annulus.
pub fn decay_check(f: &Field, order: usize, m: usize, ceiling: f64) -> Result<DecayProfile> {
    let grid = f.grid();
    let outer = 0.5 * grid.box_length();
    if outer <= 1.0 {
        return Err(Error::EmptySampleSet(
            "decay annulus [1, L/2] is empty; box too small".to_string(),
        ));
    }
    let spec = f.to_spectral();
    let mut fitted = Vec::new();
    let mut member = true;
    for gamma in multi_indices(grid.dim(), m) {
        let df = spec.derivative_multi(gamma).into_physical();
        let mut c = 0.0f64;
        for (flat, val) in df.values().iter().enumerate() {
            let r = grid.radius(flat);
            if r < 1.0 || r > outer {
                continue;
            }
            let weighted = math::abs(*val) * (1.0 + math::powf(r, order as f64));
            if weighted > c {
                c = weighted;
            }
        }
        member &= c <= ceiling;
        fitted.push((gamma, c));
    }
    Ok(DecayProfile {
        order,
        m,
        fitted,
        member,
        ceiling,
        fit_region: (1.0, outer),
        box_length: grid.box_length(),
    })
}

/// Componentwise-max decay profile of a vector field.
pub fn decay_check_vector(
    v: &VectorField,
    order: usize,
    m: usize,
    ceiling: f64,
) -> Result<DecayProfile> {
    let mut out: Option<DecayProfile> = None;
    for c in v.components() {
        let p = decay_check(c, order, m, ceiling)?;
        out = Some(match out {
            None => p,
            Some(mut acc) => {
                for (a, b) in acc.fitted.iter_mut().zip(p.fitted.iter()) {
                    a.1 = a.1.max(b.1);
                }
                acc.member &= p.member;
                acc
            }
        });
    }
    Ok(out.expect("vector field has components"))
}

/// Run the windowed solver and decay-check every window output.
///
/// The data must pass the order-`m(D+1)` check; window outputs are fitted
/// at `order` (the inherited order `m(D+1) - 1` when `None`).
pub fn decay_inheritance_probe(
    data: &VectorField,
    params: &SchemeParams,
    windows: usize,
    order: Option<usize>,
    ceiling: f64,
) -> Result<Vec<DecayProfile>> {
    let d = data.grid().dim();
    let data_order = params.m * (d + 1);
    let initial = decay_check_vector(data, data_order, params.m, ceiling)?;
    if !initial.member {
        return Err(Error::InvalidParameter(alloc::format!(
            "data fails the order-{data_order} decay check (max constant {})",
            initial.max_fitted()
        )));
    }
    let check_order = order.unwrap_or(data_order.saturating_sub(1));
    let horizon = windows as f64 * params.dt;
    let traj = solve_global(data, params, horizon, Direction::Forward, &Forcing::None, false)?;
    let mut out = Vec::with_capacity(windows);
    for state in traj.states.iter().skip(1) {
        out.push(decay_check_vector(state, check_order, params.m, ceiling)?);
    }
    Ok(out)
}

/// A field resampled onto the arctan-compactified open cube
/// `(-pi/2, pi/2)^D`: node `y = arctan(x)` carries the original sample, so
/// sup norms are preserved exactly.
#[derive(Clone, Debug)]
pub struct CompactifiedField {
    /// Per-axis node coordinates `arctan(x_k)`, strictly inside the cube.
    pub axes: Vec<f64>,
    pub values: Vec<f64>,
    pub dim: usize,
    pub points_per_axis: usize,
}

impl CompactifiedField {
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(math::abs(*v)))
    }

    /// Max |value| over the outermost node shell (any index 0 or N-1);
    /// small values witness the continuous extension by zero.
    pub fn boundary_shell_max(&self) -> f64 {
        let n = self.points_per_axis;
        let mut out = 0.0f64;
        let total = self.values.len();
        for flat in 0..total {
            let mut rem = flat;
            let mut boundary = false;
            for _ in 0..self.dim {
                let idx = rem % n;
                rem /= n;
                if idx == 0 || idx == n - 1 {
                    boundary = true;
                }
            }
            if boundary {
                out = out.max(math::abs(self.values[flat]));
            }
        }
        out
    }

    /// Sup distance to another compactified field on the same lattice.
    pub fn sup_distance(&self, other: &CompactifiedField) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)))
    }
}

/// Arctan compactification `y_j = arctan(x_j)`: bijective node resampling
/// onto the open cube.
pub fn compactify(f: &Field) -> CompactifiedField {
    let grid = f.grid();
    let phys = f.to_physical();
    let axes = (0..grid.points_per_axis()).map(|i| math::atan(grid.coord(i))).collect();
    CompactifiedField {
        axes,
        values: phys.values().to_vec(),
        dim: grid.dim(),
        points_per_axis: grid.points_per_axis(),
    }
}

/// Viscosity-sequence diagnostics: pairwise sup distances of the
/// compactified final states.
#[derive(Clone, Debug)]
pub struct LimitDiagnostics {
    pub nu_sequence: Vec<f64>,
    /// Symmetric distance matrix with zero diagonal; rows past a failed
    /// solve are NaN.
    pub distances: Vec<Vec<f64>>,
    pub cauchy: bool,
    pub tolerance: f64,
    /// Index and message of the first failed solve, if any.
    pub failed: Option<(usize, String)>,
}

/// Solve the same problem along a strictly decreasing viscosity sequence
/// (the last entry may be 0) and compare compactified final states. The
/// `cauchy` flag requires the three pairwise distances of the last three
/// members to sit below `tolerance` with a decreasing consecutive trend.
pub fn viscosity_sequence_diag(
    data: &VectorField,
    nu_sequence: &[f64],
    horizon: f64,
    base: &SchemeParams,
    tolerance: f64,
) -> Result<LimitDiagnostics> {
    if nu_sequence.len() < 3 {
        return Err(Error::InvalidParameter(
            "viscosity sequence needs at least 3 entries".to_string(),
        ));
    }
    for w in nu_sequence.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::InvalidParameter(
                "viscosity sequence must be strictly decreasing".to_string(),
            ));
        }
    }
    let n = nu_sequence.len();
    let mut finals: Vec<Option<Vec<CompactifiedField>>> = Vec::with_capacity(n);
    let mut failed = None;
    for (i, &nu) in nu_sequence.iter().enumerate() {
        if failed.is_some() {
            finals.push(None);
            continue;
        }
        let mut p = *base;
        p.nu = nu;
        match solve_global(data, &p, horizon, Direction::Forward, &Forcing::None, false) {
            Ok(traj) => {
                let state = traj.states.last().expect("nonempty trajectory");
                finals.push(Some(
                    state.components().iter().map(compactify).collect(),
                ));
            }
            Err(e) => {
                failed = Some((i, alloc::format!("{e}")));
                finals.push(None);
            }
        }
    }
    let mut distances = alloc::vec![alloc::vec![f64::NAN; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                if finals[i].is_some() {
                    distances[i][j] = 0.0;
                }
                continue;
            }
            if let (Some(a), Some(b)) = (&finals[i], &finals[j]) {
                let d = a
                    .iter()
                    .zip(b.iter())
                    .fold(0.0f64, |m, (x, y)| m.max(x.sup_distance(y)));
                distances[i][j] = d;
            }
        }
    }
    let cauchy = if failed.is_some() {
        false
    } else {
        let (a, b, c) = (n - 3, n - 2, n - 1);
        let d_ab = distances[a][b];
        let d_bc = distances[b][c];
        let d_ac = distances[a][c];
        d_ab <= tolerance && d_bc <= tolerance && d_ac <= tolerance && d_bc <= d_ab
    };
    Ok(LimitDiagnostics {
        nu_sequence: nu_sequence.to_vec(),
        distances,
        cauchy,
        tolerance,
        failed,
    })
}
