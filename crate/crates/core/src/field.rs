//! Sampled scalar and vector fields on a periodic grid.
//!
//! A [`Field`] carries `N^D` real samples (physical representation) or the
//! complex Fourier coefficients `c_k` of the interpolating trigonometric
//! polynomial `f(x) = sum_k c_k exp(2 pi i k . x / L)` (spectral
//! representation). The spectral coefficients of a real field are
//! conjugate-symmetric. Discrete `L^2` norms are cell-volume weighted so that
//! Parseval holds exactly between the two representations.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::Grid;
use crate::math::{self, SplitMix64};

/// Which set of samples a field currently stores.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

#[derive(Clone, Debug)]
enum Samples {
    Physical(Vec<f64>),
    Spectral(Vec<Complex64>),
}

/// Real-valued scalar field on a [`Grid`], in physical or spectral form.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Grid,
    data: Samples,
}

/// Discrete `H^m ∩ C^m` norm report: plain `L^2` and sup norms of the field
/// plus the accumulated norm over all derivatives of order `<= m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormReport {
    pub l2: f64,
    pub sup: f64,
    pub hm_cm: f64,
    pub m: usize,
}

/// Enumerate all multi-indices `beta` over `d` axes with `|beta| <= m`,
/// ordered by total degree then lexicographically.
pub fn multi_indices(d: usize, m: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for total in 0..=m {
        let mut stack = vec![([0usize; 3], 0usize, total)];
        while let Some((mut beta, axis, rem)) = stack.pop() {
            if axis == d - 1 {
                beta[axis] = rem;
                out.push(beta);
                continue;
            }
            // push in reverse so the popped order is lexicographic
            for v in (0..=rem).rev() {
                beta[axis] = v;
                stack.push((beta, axis + 1, rem - v));
            }
        }
    }
    out
}

impl Field {
    /// Wrap physical samples (row-major, `x_1` slowest).
    pub fn from_values(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} samples, got {}",
                grid.node_count(),
                values.len()
            )));
        }
        Ok(Field { grid, data: Samples::Physical(values) })
    }

    /// Wrap spectral coefficients.
    pub fn from_spectral(grid: Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.node_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} coefficients, got {}",
                grid.node_count(),
                coeffs.len()
            )));
        }
        Ok(Field { grid, data: Samples::Spectral(coeffs) })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field { grid, data: Samples::Physical(vec![0.0; grid.node_count()]) }
    }

    /// Sample an analytic function of the node position.
    pub fn sample(grid: Grid, f: impl Fn([f64; 3]) -> f64) -> Self {
        let values = (0..grid.node_count()).map(|i| f(grid.position(i))).collect();
        Field { grid, data: Samples::Physical(values) }
    }

    /// Mean-zero band-limited random field: Gaussian coefficients on modes
    /// with `|k_a| <= max_mode`, conjugate-symmetrised, scaled so the sup
    /// norm equals `amplitude`. Deterministic in `seed`.
    pub fn random_smooth(grid: Grid, seed: u64, max_mode: i64, amplitude: f64) -> Self {
        let mut rng = SplitMix64::new(seed);
        let total = grid.node_count();
        let n = grid.points_per_axis();
        let mut spec = vec![Complex64::default(); total];
        for flat in 0..total {
            let idx = grid.indices(flat);
            let mut inside = true;
            for axis in 0..grid.dim() {
                if grid.signed_mode(idx[axis]).abs() > max_mode {
                    inside = false;
                    break;
                }
            }
            if inside {
                spec[flat] = Complex64::new(rng.next_gaussian(), rng.next_gaussian());
            }
        }
        // conjugate symmetry and zero mean
        let mut sym = spec.clone();
        for flat in 0..total {
            let idx = grid.indices(flat);
            let mut neg = [0usize; 3];
            for axis in 0..grid.dim() {
                neg[axis] = (n - idx[axis]) % n;
            }
            let nflat = grid.flat(neg);
            sym[flat] = 0.5 * (spec[flat] + spec[nflat].conj());
        }
        sym[0] = Complex64::default();
        let mut f = Field { grid, data: Samples::Spectral(sym) }.into_physical();
        let sup = f.sup_norm();
        if sup > 0.0 {
            f.scale(amplitude / sup);
        }
        f
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn representation(&self) -> Representation {
        match self.data {
            Samples::Physical(_) => Representation::Physical,
            Samples::Spectral(_) => Representation::Spectral,
        }
    }

    /// Physical samples; panics if the field is spectral.
    pub fn values(&self) -> &[f64] {
        match &self.data {
            Samples::Physical(v) => v,
            Samples::Spectral(_) => panic!("field is in spectral representation"),
        }
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        match &mut self.data {
            Samples::Physical(v) => v,
            Samples::Spectral(_) => panic!("field is in spectral representation"),
        }
    }

    /// Spectral coefficients; panics if the field is physical.
    pub fn coeffs(&self) -> &[Complex64] {
        match &self.data {
            Samples::Spectral(c) => c,
            Samples::Physical(_) => panic!("field is in physical representation"),
        }
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        match &mut self.data {
            Samples::Spectral(c) => c,
            Samples::Physical(_) => panic!("field is in physical representation"),
        }
    }

    pub fn is_finite(&self) -> bool {
        match &self.data {
            Samples::Physical(v) => v.iter().all(|x| x.is_finite()),
            Samples::Spectral(c) => c.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
        }
    }

    /// Forward transform; normalised so the mode-0 coefficient is the mean.
    pub fn into_spectral(self) -> Field {
        match self.data {
            Samples::Spectral(_) => self,
            Samples::Physical(v) => {
                let grid = self.grid;
                let mut buf: Vec<Complex64> =
                    v.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
                fft::transform_nd(&mut buf, grid.dim(), grid.points_per_axis(), false);
                let scale = 1.0 / grid.node_count() as f64;
                for z in buf.iter_mut() {
                    *z *= scale;
                }
                Field { grid, data: Samples::Spectral(buf) }
            }
        }
    }

    /// Inverse transform back to physical samples (real parts taken).
    pub fn into_physical(self) -> Field {
        match self.data {
            Samples::Physical(_) => self,
            Samples::Spectral(c) => {
                let grid = self.grid;
                let mut buf = c;
                fft::transform_nd(&mut buf, grid.dim(), grid.points_per_axis(), true);
                let values = buf.into_iter().map(|z| z.re).collect();
                Field { grid, data: Samples::Physical(values) }
            }
        }
    }

    pub fn to_spectral(&self) -> Field {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> Field {
        self.clone().into_physical()
    }

    /// Match the representation of `other`.
    pub fn into_repr(self, repr: Representation) -> Field {
        match repr {
            Representation::Physical => self.into_physical(),
            Representation::Spectral => self.into_spectral(),
        }
    }

    /// Spectral derivative of one axis. Odd orders zero the Nyquist mode;
    /// even orders keep its real multiplier.
    pub fn derivative(&self, axis: usize, order: usize) -> Result<Field> {
        if axis >= self.grid.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.grid.dim() });
        }
        let mut beta = [0usize; 3];
        beta[axis] = order;
        Ok(self.derivative_multi(beta))
    }

    /// Spectral derivative `D^beta` for a multi-index.
    pub fn derivative_multi(&self, beta: [usize; 3]) -> Field {
        let repr = self.representation();
        let grid = self.grid;
        let mut out = self.to_spectral();
        {
            let coeffs = out.coeffs_mut();
            let n = grid.points_per_axis();
            // per-axis multipliers (i omega)^order
            let mut axis_mult: Vec<Vec<Complex64>> = Vec::with_capacity(grid.dim());
            for axis in 0..grid.dim() {
                let order = beta[axis];
                let mut m = Vec::with_capacity(n);
                for k in 0..n {
                    let z = if order == 0 {
                        Complex64::new(1.0, 0.0)
                    } else if grid.is_nyquist(k) && order % 2 == 1 {
                        Complex64::default()
                    } else {
                        let i_om = Complex64::new(0.0, grid.omega(k));
                        let mut acc = Complex64::new(1.0, 0.0);
                        for _ in 0..order {
                            acc *= i_om;
                        }
                        acc
                    };
                    m.push(z);
                }
                axis_mult.push(m);
            }
            for flat in 0..coeffs.len() {
                let idx = grid.indices(flat);
                let mut w = Complex64::new(1.0, 0.0);
                for axis in 0..grid.dim() {
                    w *= axis_mult[axis][idx[axis]];
                }
                coeffs[flat] *= w;
            }
        }
        out.into_repr(repr)
    }

    /// Cell-volume-weighted `L^2` norm (Parseval-exact in either
    /// representation).
    pub fn l2_norm(&self) -> f64 {
        match &self.data {
            Samples::Physical(v) => {
                let s: f64 = v.iter().map(|x| x * x).sum();
                math::sqrt(s * self.grid.cell_volume())
            }
            Samples::Spectral(c) => {
                let s: f64 = c.iter().map(|z| z.norm_sqr()).sum();
                let ld = math::powf(self.grid.box_length(), self.grid.dim() as f64);
                math::sqrt(s * ld)
            }
        }
    }

    /// Sup norm over nodes (physical representation computed on demand).
    pub fn sup_norm(&self) -> f64 {
        match &self.data {
            Samples::Physical(v) => v.iter().fold(0.0f64, |m, x| m.max(math::abs(*x))),
            Samples::Spectral(_) => self.to_physical().sup_norm(),
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.data {
            Samples::Physical(v) => v.iter().sum::<f64>() / v.len() as f64,
            Samples::Spectral(c) => c[0].re,
        }
    }

    /// Cell-weighted inner product of two physical fields.
    pub fn inner_product(&self, other: &Field) -> Result<f64> {
        self.check_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let s: f64 =
            a.values().iter().zip(b.values().iter()).map(|(x, y)| x * y).sum();
        Ok(s * self.grid.cell_volume())
    }

    /// Norms of `D^beta f` accumulated over all `|beta| <= m`.
    pub fn norms(&self, m: usize) -> Result<NormReport> {
        if !self.is_finite() {
            return Err(Error::NonFinite("norms".to_string()));
        }
        let spec = self.to_spectral();
        let mut l2 = 0.0;
        let mut sup = 0.0;
        let mut hm_cm = 0.0;
        for beta in multi_indices(self.grid.dim(), m) {
            let df = spec.derivative_multi(beta);
            let d_l2 = df.l2_norm();
            let d_sup = df.sup_norm();
            if beta == [0, 0, 0] {
                l2 = d_l2;
                sup = d_sup;
            }
            hm_cm += d_l2 + d_sup;
        }
        Ok(NormReport { l2, sup, hm_cm, m })
    }

    pub fn scale(&mut self, a: f64) {
        match &mut self.data {
            Samples::Physical(v) => v.iter_mut().for_each(|x| *x *= a),
            Samples::Spectral(c) => c.iter_mut().for_each(|z| *z *= a),
        }
    }

    pub fn scaled(&self, a: f64) -> Field {
        let mut f = self.clone();
        f.scale(a);
        f
    }

    fn check_same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch("fields on different grids".to_string()));
        }
        Ok(())
    }

    /// `self + a * other`, elementwise, in the representation of `self`.
    pub fn add_scaled(&mut self, other: &Field, a: f64) -> Result<()> {
        self.check_same_grid(other)?;
        let repr = self.representation();
        let rhs = other.clone().into_repr(repr);
        match (&mut self.data, &rhs.data) {
            (Samples::Physical(v), Samples::Physical(w)) => {
                v.iter_mut().zip(w.iter()).for_each(|(x, y)| *x += a * y)
            }
            (Samples::Spectral(v), Samples::Spectral(w)) => {
                v.iter_mut().zip(w.iter()).for_each(|(x, y)| *x += a * y)
            }
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.add_scaled(other, -1.0)?;
        Ok(out)
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        let mut out = self.clone();
        out.add_scaled(other, 1.0)?;
        Ok(out)
    }

    /// Pointwise product of the physical samples.
    pub fn product(&self, other: &Field) -> Result<Field> {
        self.check_same_grid(other)?;
        let a = self.to_physical();
        let b = other.to_physical();
        let values =
            a.values().iter().zip(b.values().iter()).map(|(x, y)| x * y).collect();
        Field::from_values(self.grid, values)
    }

    /// Two-thirds-rule truncation: zero every mode with `|k_a| > N/3` on any
    /// axis (and the Nyquist mode). Returns in the input representation.
    pub fn dealias(&self) -> Field {
        let repr = self.representation();
        let grid = self.grid;
        let cut = (grid.points_per_axis() / 3) as i64;
        let mut out = self.to_spectral();
        {
            let coeffs = out.coeffs_mut();
            for flat in 0..coeffs.len() {
                let idx = grid.indices(flat);
                for axis in 0..grid.dim() {
                    let k = grid.signed_mode(idx[axis]);
                    if k.abs() > cut || grid.is_nyquist(idx[axis]) {
                        coeffs[flat] = Complex64::default();
                        break;
                    }
                }
            }
        }
        out.into_repr(repr)
    }

    /// Fraction of the field's squared mass carried by nodes in the outer
    /// shell where some `|x_a| >= (1 - margin) L/2`; a box-fit diagnostic
    /// for data that is supposed to decay before the boundary.
    pub fn tail_mass_fraction(&self, margin: f64) -> f64 {
        let f = self.to_physical();
        let cutoff = (1.0 - margin) * 0.5 * self.grid.box_length();
        let mut tail = 0.0;
        let mut total = 0.0;
        for (flat, x) in f.values().iter().enumerate() {
            let pos = self.grid.position(flat);
            let outer = (0..self.grid.dim()).any(|a| math::abs(pos[a]) >= cutoff);
            let e = x * x;
            total += e;
            if outer {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

/// Node-pair sampling policy for empirical continuity moduli: all
/// axis-neighbour pairs plus a seeded uniform sample of long-range pairs,
/// with optional distance window and origin-node exclusion (used when the
/// field is a derivative of data that is singular at the origin).
#[derive(Clone, Debug)]
pub struct PairPolicy {
    pub axis_neighbors: bool,
    pub random_pairs: usize,
    pub seed: u64,
    pub exclude_origin_node: bool,
    pub min_dist: f64,
    pub max_dist: f64,
}

impl Default for PairPolicy {
    fn default() -> Self {
        PairPolicy {
            axis_neighbors: true,
            random_pairs: 20_000,
            seed: 0x1eaf,
            exclude_origin_node: false,
            min_dist: 0.0,
            max_dist: f64::INFINITY,
        }
    }
}

/// Empirical Hölder modulus `max |f(x)-f(y)| / |x-y|^delta` over sampled
/// node pairs (minimum-image distances); `delta = 1` gives the empirical
/// Lipschitz constant.
pub fn holder_modulus(f: &Field, delta: f64, policy: &PairPolicy) -> Result<f64> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidParameter(format!("holder exponent must be in (0,1], got {delta}")));
    }
    let grid = f.grid();
    let phys = f.to_physical();
    let v = phys.values();
    let n = grid.points_per_axis();
    let origin_flat = {
        let mut idx = [0usize; 3];
        for a in 0..grid.dim() {
            idx[a] = n / 2; // coordinate 0 on each axis
        }
        grid.flat(idx)
    };
    let mut best = 0.0f64;
    let mut used = 0usize;
    let mut consider = |a: usize, b: usize| {
        if a == b {
            return;
        }
        if policy.exclude_origin_node && (a == origin_flat || b == origin_flat) {
            return;
        }
        let d = grid.torus_distance(a, b);
        if d <= 0.0 || d < policy.min_dist || d > policy.max_dist {
            return;
        }
        let q = math::abs(v[a] - v[b]) / math::powf(d, delta);
        if q > best {
            best = q;
        }
        used += 1;
    };
    if policy.axis_neighbors {
        for flat in 0..grid.node_count() {
            let idx = grid.indices(flat);
            for axis in 0..grid.dim() {
                let mut nb = idx;
                nb[axis] = (idx[axis] + 1) % n;
                consider(flat, grid.flat(nb));
            }
        }
    }
    let mut rng = SplitMix64::new(policy.seed);
    for _ in 0..policy.random_pairs {
        let a = rng.next_below(grid.node_count());
        let b = rng.next_below(grid.node_count());
        consider(a, b);
    }
    if used == 0 {
        return Err(Error::EmptySampleSet("no node pairs matched the policy".to_string()));
    }
    Ok(best)
}

/// `D` scalar components sharing one grid and representation.
#[derive(Clone, Debug)]
pub struct VectorField {
    components: Vec<Field>,
}

impl VectorField {
    pub fn new(components: Vec<Field>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter("vector field needs components".to_string()));
        }
        let grid = components[0].grid();
        if components.len() != grid.dim() {
            return Err(Error::GridMismatch(format!(
                "expected {} components, got {}",
                grid.dim(),
                components.len()
            )));
        }
        for c in &components {
            if c.grid() != grid {
                return Err(Error::GridMismatch("components on different grids".to_string()));
            }
            if c.representation() != components[0].representation() {
                return Err(Error::GridMismatch(
                    "components in different representations".to_string(),
                ));
            }
        }
        Ok(VectorField { components })
    }

    pub fn zeros(grid: Grid) -> Self {
        VectorField {
            components: (0..grid.dim()).map(|_| Field::zeros(grid)).collect(),
        }
    }

    pub fn sample(grid: Grid, f: impl Fn([f64; 3], usize) -> f64) -> Self {
        VectorField {
            components: (0..grid.dim()).map(|i| Field::sample(grid, |x| f(x, i))).collect(),
        }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.components[0].grid()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.components.len()
    }

    pub fn representation(&self) -> Representation {
        self.components[0].representation()
    }

    pub fn component(&self, i: usize) -> &Field {
        &self.components[i]
    }

    pub fn component_mut(&mut self, i: usize) -> &mut Field {
        &mut self.components[i]
    }

    pub fn components(&self) -> &[Field] {
        &self.components
    }

    pub fn into_components(self) -> Vec<Field> {
        self.components
    }

    pub fn into_spectral(self) -> VectorField {
        VectorField {
            components: self.components.into_iter().map(Field::into_spectral).collect(),
        }
    }

    pub fn into_physical(self) -> VectorField {
        VectorField {
            components: self.components.into_iter().map(Field::into_physical).collect(),
        }
    }

    pub fn to_spectral(&self) -> VectorField {
        self.clone().into_spectral()
    }

    pub fn to_physical(&self) -> VectorField {
        self.clone().into_physical()
    }

    pub fn is_finite(&self) -> bool {
        self.components.iter().all(Field::is_finite)
    }

    pub fn scale(&mut self, a: f64) {
        for c in &mut self.components {
            c.scale(a);
        }
    }

    pub fn scaled(&self, a: f64) -> VectorField {
        let mut v = self.clone();
        v.scale(a);
        v
    }

    pub fn add_scaled(&mut self, other: &VectorField, a: f64) -> Result<()> {
        for (c, o) in self.components.iter_mut().zip(other.components.iter()) {
            c.add_scaled(o, a)?;
        }
        Ok(())
    }

    pub fn sub(&self, other: &VectorField) -> Result<VectorField> {
        let mut out = self.clone();
        out.add_scaled(other, -1.0)?;
        Ok(out)
    }

    /// Spectral divergence `sum_a d_a v_a`.
    pub fn divergence(&self) -> Field {
        let grid = self.grid();
        let mut acc = Field::from_spectral(
            grid,
            vec![Complex64::default(); grid.node_count()],
        )
        .expect("zero spectrum");
        for (axis, c) in self.components.iter().enumerate() {
            let d = c.to_spectral().derivative_multi({
                let mut b = [0usize; 3];
                b[axis] = 1;
                b
            });
            acc.add_scaled(&d, 1.0).expect("same grid");
        }
        acc.into_repr(self.representation())
    }

    /// `||div v||_2` relative to the `L^2` norm of the full gradient.
    pub fn relative_divergence(&self) -> f64 {
        let div = self.divergence().l2_norm();
        let mut grad_sq = 0.0;
        for c in &self.components {
            let spec = c.to_spectral();
            for axis in 0..self.grid().dim() {
                let mut b = [0usize; 3];
                b[axis] = 1;
                let g = spec.derivative_multi(b).l2_norm();
                grad_sq += g * g;
            }
        }
        let grad = math::sqrt(grad_sq);
        if grad == 0.0 {
            if div == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            div / grad
        }
    }

    /// Max of the componentwise `L^2` norms.
    pub fn l2_norm_max(&self) -> f64 {
        self.components.iter().map(Field::l2_norm).fold(0.0, f64::max)
    }

    /// Euclidean `L^2` norm over all components.
    pub fn l2_norm(&self) -> f64 {
        let s: f64 = self.components.iter().map(|c| {
            let n = c.l2_norm();
            n * n
        }).sum();
        math::sqrt(s)
    }

    pub fn sup_norm(&self) -> f64 {
        self.components.iter().map(Field::sup_norm).fold(0.0, f64::max)
    }

    /// Max over components of the `H^m ∩ C^m` report.
    pub fn norms_max(&self, m: usize) -> Result<NormReport> {
        let mut out = NormReport { l2: 0.0, sup: 0.0, hm_cm: 0.0, m };
        for c in &self.components {
            let r = c.norms(m)?;
            out.l2 = out.l2.max(r.l2);
            out.sup = out.sup.max(r.sup);
            out.hm_cm = out.hm_cm.max(r.hm_cm);
        }
        Ok(out)
    }

    pub fn dealias(&self) -> VectorField {
        VectorField { components: self.components.iter().map(Field::dealias).collect() }
    }
}

/// Gradient of a scalar field as a vector field.
pub fn gradient(f: &Field) -> VectorField {
    let grid = f.grid();
    let spec = f.to_spectral();
    let comps = (0..grid.dim())
        .map(|axis| {
            let mut b = [0usize; 3];
            b[axis] = 1;
            spec.derivative_multi(b).into_repr(f.representation())
        })
        .collect();
    VectorField { components: comps }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Grid {
        Grid::new(3, 16, 2.0 * core::f64::consts::PI).unwrap()
    }

    #[test]
    fn constant_spectrum_is_dc() {
        let f = Field::sample(grid(), |_| 1.0).into_spectral();
        assert!((f.coeffs()[0].re - 1.0).abs() < 1e-12);
        let off: f64 = f.coeffs()[1..].iter().map(|z| z.norm()).sum();
        assert!(off < 1e-10);
    }

    #[test]
    fn sine_mode_two_amplitudes() {
        let g = grid();
        let l = g.box_length();
        let f = Field::sample(g, |x| math::sin(2.0 * core::f64::consts::PI * x[0] / l))
            .into_spectral();
        let nonzero: Vec<usize> = (0..g.node_count())
            .filter(|&i| f.coeffs()[i].norm() > 1e-10)
            .collect();
        assert_eq!(nonzero.len(), 2);
        let a = f.coeffs()[nonzero[0]];
        let b = f.coeffs()[nonzero[1]];
        assert!((a - b.conj()).norm() < 1e-12);
    }

    #[test]
    fn roundtrip_identity() {
        let f = Field::random_smooth(grid(), 3, 5, 1.0);
        let back = f.to_spectral().into_physical();
        let num = back.sub(&f).unwrap().l2_norm();
        let den = f.l2_norm();
        assert!(num / den < 1e-12, "roundtrip error {}", num / den);
    }

    #[test]
    fn parseval_exact() {
        let f = Field::random_smooth(grid(), 9, 5, 1.0);
        let a = f.l2_norm();
        let b = f.to_spectral().l2_norm();
        assert!((a - b).abs() / a < 1e-10);
    }

    #[test]
    fn spectral_derivative_of_sine() {
        let g = grid();
        let l = g.box_length();
        let w = 2.0 * core::f64::consts::PI / l;
        let f = Field::sample(g, |x| math::sin(w * x[0]));
        let df = f.derivative(0, 1).unwrap();
        let expect = Field::sample(g, |x| w * math::cos(w * x[0]));
        let err = df.sub(&expect).unwrap().sup_norm();
        assert!(err < 1e-10, "err {err}");
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        let f = Field::sample(grid(), |_| 3.5);
        assert!(f.derivative(1, 1).unwrap().sup_norm() < 1e-12);
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let g = grid();
        let l = g.box_length();
        let w = 2.0 * core::f64::consts::PI / l;
        let f = Field::sample(g, |x| {
            math::sin(w * x[0]) * math::cos(2.0 * w * x[1]) + 0.3 * math::cos(w * x[2])
        });
        let df = f.derivative(1, 1).unwrap();
        // centered differences as an independent oracle
        let h = g.spacing();
        let v = f.values();
        let mut max_err = 0.0f64;
        for flat in 0..g.node_count() {
            let idx = g.indices(flat);
            let mut up = idx;
            up[1] = (idx[1] + 1) % g.points_per_axis();
            let mut dn = idx;
            dn[1] = (idx[1] + g.points_per_axis() - 1) % g.points_per_axis();
            let fd = (v[g.flat(up)] - v[g.flat(dn)]) / (2.0 * h);
            max_err = max_err.max(math::abs(fd - df.values()[flat]));
        }
        // centered difference error is O(h^2)
        assert!(max_err < 2.0 * h * h, "fd mismatch {max_err}");
    }

    #[test]
    fn derivative_commutes_with_transform() {
        let f = Field::random_smooth(grid(), 21, 4, 1.0);
        let a = f.derivative(0, 1).unwrap().into_spectral();
        let b = f.to_spectral().derivative(0, 1).unwrap();
        let mut err = 0.0f64;
        for (x, y) in a.coeffs().iter().zip(b.coeffs().iter()) {
            err = err.max((x - y).norm());
        }
        assert!(err < 1e-13);
    }

    #[test]
    fn norms_constant_unit_box() {
        let g = Grid::new(3, 8, 1.0).unwrap();
        let c = 2.5;
        let f = Field::sample(g, |_| c);
        let r = f.norms(0).unwrap();
        assert!((r.l2 - c).abs() < 1e-12);
        assert!((r.sup - c).abs() < 1e-12);
        assert!((r.hm_cm - 2.0 * c).abs() < 1e-12);
    }

    #[test]
    fn norms_sine_closed_form() {
        let g = grid();
        let l = g.box_length();
        let w = 2.0 * core::f64::consts::PI / l;
        let f = Field::sample(g, |x| math::sin(w * x[0]));
        let r = f.norms(1).unwrap();
        // ||sin||_2 = sqrt(L^3 / 2), ||w cos||_2 = w sqrt(L^3/2), sups 1 and w
        let half = math::sqrt(l * l * l / 2.0);
        let expect = half + 1.0 + w * half + w + 2.0 * (0.0 + 0.0); // d/dx2, d/dx3 vanish
        assert!((r.l2 - half).abs() / half < 1e-12);
        assert!((r.sup - 1.0).abs() < 1e-12);
        assert!((r.hm_cm - expect).abs() / expect < 1e-10, "{} vs {}", r.hm_cm, expect);
        assert!(r.hm_cm >= r.l2 && r.hm_cm >= r.sup);
    }

    #[test]
    fn norms_zero_field() {
        let f = Field::zeros(grid());
        let r = f.norms(2).unwrap();
        assert_eq!((r.l2, r.sup, r.hm_cm), (0.0, 0.0, 0.0));
    }

    #[test]
    fn multi_index_count() {
        // D=3, m=2: C(3+2,3) = 10 indices
        assert_eq!(multi_indices(3, 2).len(), 10);
        assert_eq!(multi_indices(2, 3).len(), 10);
    }

    #[test]
    fn holder_constant_field_zero() {
        let f = Field::sample(grid(), |_| 4.0);
        for delta in [0.3, 0.7, 1.0] {
            let h = holder_modulus(&f, delta, &PairPolicy::default()).unwrap();
            assert_eq!(h, 0.0);
        }
    }

    #[test]
    fn holder_linear_like_field() {
        // smooth single-mode field: empirical Lipschitz approx sup |d1 f|
        let g = Grid::new(3, 8, 2.0 * core::f64::consts::PI).unwrap();
        let w = 1.0;
        let f = Field::sample(g, |x| math::sin(w * x[0]));
        let lip = holder_modulus(&f, 1.0, &PairPolicy::default()).unwrap();
        assert!(lip <= w + 1e-9);
        assert!(lip > 0.8 * w, "lip {lip}");
    }

    #[test]
    fn divergence_free_curl_mode() {
        let g = grid();
        // v = (sin x2, 0, 0): div = 0
        let v = VectorField::sample(g, |x, i| if i == 0 { math::sin(x[1]) } else { 0.0 });
        assert!(v.relative_divergence() < 1e-12);
    }

    #[test]
    fn tail_mass_compact_vs_constant() {
        let g = grid();
        let bump = Field::sample(g, |x| {
            let r = math::hypot3(x[0], x[1], x[2]);
            if r < 1.0 {
                1.0
            } else {
                0.0
            }
        });
        assert!(bump.tail_mass_fraction(0.2) < 1e-12);
        let flat = Field::sample(g, |_| 1.0);
        assert!(flat.tail_mass_fraction(0.2) > 0.1);
    }
}
