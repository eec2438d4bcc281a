//! Quadrature on the part of a box where a level set is positive, and on
//! the zero level set inside the box.
//!
//! Construction by dimension reduction: pick a height axis along which the
//! level set is monotone, build a rule on the base face that is smooth with
//! respect to the level set restricted to the bottom and top faces, then
//! integrate along every vertical line between the roots. Boxes where no
//! axis is monotone are bisected.

use std::fmt::Write as _;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::gauss::{gauss_legendre, tensor_gauss};
use crate::geometry::LevelSet;
use crate::scalar::Real;

/// Quadrature data of one cut cell in physical coordinates.
///
/// Points are stored flat, `dim` coordinates per point.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CutCellQuadrature<T> {
    pub dim: usize,
    pub interior_points: Vec<T>,
    pub interior_weights: Vec<T>,
    pub surface_points: Vec<T>,
    pub surface_weights: Vec<T>,
    /// Outward unit normals, `n·∇φ < 0`.
    pub surface_normals: Vec<T>,
}

impl<T: Real> CutCellQuadrature<T> {
    pub fn n_interior(&self) -> usize {
        self.interior_weights.len()
    }

    pub fn n_surface(&self) -> usize {
        self.surface_weights.len()
    }

    pub fn interior_point(&self, q: usize) -> &[T] {
        &self.interior_points[q * self.dim..(q + 1) * self.dim]
    }

    pub fn surface_point(&self, q: usize) -> &[T] {
        &self.surface_points[q * self.dim..(q + 1) * self.dim]
    }

    pub fn surface_normal(&self, q: usize) -> &[T] {
        &self.surface_normals[q * self.dim..(q + 1) * self.dim]
    }

    pub fn volume(&self) -> T {
        self.interior_weights.iter().copied().sum()
    }

    pub fn area(&self) -> T {
        self.surface_weights.iter().copied().sum()
    }

    /// Appends rows `cell,kind,x,y[,z],w[,nx,ny[,nz]]` (kind `I` or `S`).
    pub fn write_csv_rows(&self, cell: usize, out: &mut String) {
        for q in 0..self.n_interior() {
            let _ = write!(out, "{cell},I");
            for x in self.interior_point(q) {
                let _ = write!(out, ",{x}");
            }
            let _ = writeln!(out, ",{}", self.interior_weights[q]);
        }
        for q in 0..self.n_surface() {
            let _ = write!(out, "{cell},S");
            for x in self.surface_point(q) {
                let _ = write!(out, ",{x}");
            }
            let _ = write!(out, ",{}", self.surface_weights[q]);
            for n in self.surface_normal(q) {
                let _ = write!(out, ",{n}");
            }
            out.push('\n');
        }
    }
}

/// Header line matching [`CutCellQuadrature::write_csv_rows`].
pub fn csv_header(dim: usize) -> String {
    if dim == 3 {
        "cell_index,kind,x,y,z,w,nx,ny,nz\n".to_string()
    } else {
        "cell_index,kind,x,y,w,nx,ny\n".to_string()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureOptions {
    /// Gauss points per line segment and per base direction.
    pub order: usize,
    /// Bisection depth before falling back to center sampling.
    pub max_depth: usize,
    /// Sign and monotonicity samples per axis (corners included).
    pub samples_per_axis: usize,
}

impl QuadratureOptions {
    pub fn new(order: usize) -> Self {
        Self { order, max_depth: 8, samples_per_axis: (order + 1).max(3) }
    }
}

/// Counters describing how a rule was built.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QuadratureDiagnostics {
    /// Sub-boxes integrated by center sampling after `max_depth` bisections.
    pub fallbacks: usize,
    pub subdivisions: usize,
}

impl std::ops::AddAssign for QuadratureDiagnostics {
    fn add_assign(&mut self, o: Self) {
        self.fallbacks += o.fallbacks;
        self.subdivisions += o.subdivisions;
    }
}

/// Minimum ratio `|∂_a φ| / max_b |∂_b φ|` for an axis to serve as height direction.
const HEIGHT_AXIS_THRESHOLD: f64 = 1e-3;

/// A qualifying axis whose minimum relative slope is below this makes the
/// height function steep enough to cost Gauss accuracy; such boxes are
/// bisected once more while `depth < QUALITY_DEPTH`.
const QUALITY_SLOPE: f64 = 0.6;
const QUALITY_DEPTH: usize = 1;

/// Component `comp` of `φ` with some coordinates frozen; the free
/// coordinates keep their order.
#[derive(Clone, Debug)]
struct Restriction<T> {
    fixed: Vec<Option<T>>,
    comp: usize,
    /// Coordinates moved, in order, onto the zero set of another function
    /// before evaluating.
    solved: Vec<Solved<T>>,
}

/// Root of `target` along `axis` in `[lo, hi]`, clamped to the end where
/// `|target|` is smaller when there is none.
#[derive(Clone, Debug)]
struct Solved<T> {
    target: Rc<Restriction<T>>,
    axis: usize,
    lo: T,
    hi: T,
}

impl<T: Real> Restriction<T> {
    fn free(dim: usize, comp: usize) -> Self {
        Self { fixed: vec![None; dim], comp, solved: Vec::new() }
    }

    /// Full-space index of the `axis`-th free coordinate.
    fn slot(&self, axis: usize) -> usize {
        self.fixed.iter().enumerate().filter(|(_, f)| f.is_none()).nth(axis).map(|(i, _)| i).unwrap()
    }

    /// Freezes the `axis`-th free coordinate at `value`.
    fn restrict(&self, axis: usize, value: T) -> Self {
        let mut r = self.clone();
        r.fixed[self.slot(axis)] = Some(value);
        r
    }

    /// `self` evaluated on the zero set of `target` along the `axis`-th
    /// free coordinate; vanishes where the two zero sets cross.
    fn crossing(&self, target: &Self, axis: usize, lo: T, hi: T) -> Self {
        let slot = self.slot(axis);
        let mut r = self.clone();
        r.fixed[slot] = Some(lo);
        r.solved.insert(0, Solved { target: Rc::new(target.clone()), axis: slot, lo, hi });
        r
    }

    fn embed(&self, y: &[T], x: &mut [T]) {
        let mut it = y.iter();
        for (xi, f) in x.iter_mut().zip(&self.fixed) {
            *xi = match f {
                Some(v) => *v,
                None => *it.next().unwrap(),
            };
        }
    }
}

struct Builder<'a, T: Real> {
    phi: &'a dyn LevelSet<T>,
    dim: usize,
    opts: QuadratureOptions,
    cell: usize,
    gauss: (Vec<T>, Vec<T>),
    root_tol: T,
    diag: QuadratureDiagnostics,
    x: Vec<T>,
    g: Vec<T>,
}

/// Point set with flat coordinates.
struct Rule<T> {
    points: Vec<T>,
    weights: Vec<T>,
}

impl<T> Rule<T> {
    fn new() -> Self {
        Self { points: Vec::new(), weights: Vec::new() }
    }
}

struct Samples<T> {
    values: Vec<T>,
    grads: Vec<T>,
}

impl<'a, T: Real> Builder<'a, T> {
    fn new(phi: &'a dyn LevelSet<T>, opts: QuadratureOptions, cell: usize, h: T) -> Self {
        let dim = phi.dim();
        Self {
            phi,
            dim,
            opts,
            cell,
            gauss: gauss_legendre(opts.order),
            root_tol: (T::lit(1e-13) * h).max(T::epsilon() * T::lit(8.0) * h),
            diag: QuadratureDiagnostics::default(),
            x: vec![T::zero(); dim],
            g: vec![T::zero(); dim],
        }
    }

    fn eval(&mut self, f: &Restriction<T>, y: &[T]) -> T {
        f.embed(y, &mut self.x);
        let mut x = std::mem::take(&mut self.x);
        let v = self.eval_full(f, &mut x);
        self.x = x;
        v
    }

    /// Evaluates `f` at the full-space point `x` after applying its frozen
    /// and solved coordinates.
    fn eval_full(&self, f: &Restriction<T>, x: &mut [T]) -> T {
        for (xi, v) in x.iter_mut().zip(&f.fixed) {
            if let Some(v) = v {
                *xi = *v;
            }
        }
        for sv in &f.solved {
            x[sv.axis] = self.solve(sv, x);
        }
        self.phi.component_value(f.comp, x)
    }

    fn solve(&self, sv: &Solved<T>, x: &[T]) -> T {
        let mut z = x.to_vec();
        let mut g = |t: T| {
            z.copy_from_slice(x);
            z[sv.axis] = t;
            self.eval_full(&sv.target, &mut z)
        };
        let (mut a, mut b) = (sv.lo, sv.hi);
        let (fa, fb) = (g(a), g(b));
        if fa == T::zero() {
            return a;
        }
        if fb == T::zero() {
            return b;
        }
        if (fa < T::zero()) == (fb < T::zero()) || !(fa.is_finite() && fb.is_finite()) {
            return if fa.abs() <= fb.abs() { a } else { b };
        }
        let neg_a = fa < T::zero();
        while b - a > self.root_tol {
            let m = T::lit(0.5) * (a + b);
            let fm = g(m);
            if fm == T::zero() {
                return m;
            }
            if (fm < T::zero()) == neg_a {
                a = m;
            } else {
                b = m;
            }
        }
        T::lit(0.5) * (a + b)
    }

    /// Value and gradient with respect to the free coordinates; central
    /// differences when coordinates are solved for.
    fn eval_grad(&mut self, f: &Restriction<T>, y: &[T], grad: &mut [T]) -> T {
        if !f.solved.is_empty() {
            let step = self.root_tol * T::lit(1e6);
            let mut yy = y.to_vec();
            for (a, g) in grad.iter_mut().enumerate() {
                yy[a] = y[a] + step;
                let vp = self.eval(f, &yy);
                yy[a] = y[a] - step;
                let vm = self.eval(f, &yy);
                yy[a] = y[a];
                *g = (vp - vm) / (step + step);
            }
            return self.eval(f, y);
        }
        f.embed(y, &mut self.x);
        self.phi.component_gradient(f.comp, &self.x, &mut self.g);
        let mut j = 0;
        for (a, fx) in f.fixed.iter().enumerate() {
            if fx.is_none() {
                grad[j] = self.g[a];
                j += 1;
            }
        }
        self.phi.component_value(f.comp, &self.x)
    }

    fn sample(&mut self, f: &Restriction<T>, lo: &[T], hi: &[T]) -> Samples<T> {
        let n = lo.len();
        let s = self.opts.samples_per_axis.max(2);
        let total = s.pow(n as u32);
        let denom = T::from_usize_lossy(s - 1);
        let mut values = Vec::with_capacity(total);
        let mut grads = vec![T::zero(); total * n];
        let mut y = vec![T::zero(); n];
        let ext = vec![s; n];
        let mut idx = vec![0; n];
        for p in 0..total {
            crate::sumfac::unflatten(p, &ext, &mut idx);
            for a in 0..n {
                y[a] = lo[a] + (hi[a] - lo[a]) * T::from_usize_lossy(idx[a]) / denom;
            }
            let v = self.eval_grad(f, &y, &mut grads[p * n..(p + 1) * n]);
            if !v.is_finite() {
                values.push(T::nan());
            } else {
                values.push(v);
            }
        }
        Samples { values, grads }
    }

    /// Height axis for which every function is monotone with a gradient
    /// component bounded away from zero; best minimum relative slope wins.
    fn height_axis(&self, samples: &[Samples<T>], n: usize, depth: usize) -> Option<usize> {
        let thresh = T::lit(HEIGHT_AXIS_THRESHOLD);
        let mut best: Option<(usize, T)> = None;
        'axes: for a in 0..n {
            let mut score = T::infinity();
            for s in samples {
                let mut sign = 0i8;
                for p in 0..s.values.len() {
                    let g = &s.grads[p * n..(p + 1) * n];
                    let gmax = g.iter().fold(T::zero(), |m, v| m.max(v.abs()));
                    let ga = g[a];
                    if gmax == T::zero() || ga.abs() < thresh * gmax {
                        continue 'axes;
                    }
                    let sg = if ga > T::zero() { 1 } else { -1 };
                    if sign != 0 && sg != sign {
                        continue 'axes;
                    }
                    sign = sg;
                    score = score.min(ga.abs() / gmax);
                }
            }
            if best.is_none_or(|(_, b)| score > b) {
                best = Some((a, score));
            }
        }
        match best {
            Some((_, score)) if score < T::lit(QUALITY_SLOPE) && depth < QUALITY_DEPTH.min(self.opts.max_depth) => None,
            b => b.map(|(a, _)| a),
        }
    }

    fn check_finite(&self, s: &Samples<T>) -> Result<()> {
        if s.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::RootFinding { cell: self.cell });
        }
        Ok(())
    }

    /// Roots of `f` on the line `y + t e_axis`, `t ∈ [lo, hi)`, ascending.
    fn line_roots(&mut self, f: &Restriction<T>, y: &mut [T], axis: usize, lo: T, hi: T, out: &mut Vec<T>) -> Result<()> {
        let nsub = self.opts.order + 3;
        let len = hi - lo;
        let node = |i: usize| if i == nsub { hi } else { lo + len * T::from_usize_lossy(i) / T::from_usize_lossy(nsub) };
        y[axis] = lo;
        let mut f_prev = self.eval(f, y);
        if !f_prev.is_finite() {
            return Err(Error::RootFinding { cell: self.cell });
        }
        if f_prev == T::zero() {
            out.push(lo);
        }
        for i in 1..=nsub {
            let (a, b) = (node(i - 1), node(i));
            y[axis] = b;
            let f_b = self.eval(f, y);
            if !f_b.is_finite() {
                return Err(Error::RootFinding { cell: self.cell });
            }
            if f_b == T::zero() {
                if i < nsub {
                    out.push(b);
                }
            } else if f_prev != T::zero() && (f_prev < T::zero()) != (f_b < T::zero()) {
                let r = self.bisect(f, y, axis, a, b, f_prev)?;
                out.push(r);
            }
            f_prev = f_b;
        }
        Ok(())
    }

    fn bisect(&mut self, f: &Restriction<T>, y: &mut [T], axis: usize, mut a: T, mut b: T, fa: T) -> Result<T> {
        let neg_a = fa < T::zero();
        for _ in 0..200 {
            if b - a <= self.root_tol {
                break;
            }
            let m = T::lit(0.5) * (a + b);
            y[axis] = m;
            let fm = self.eval(f, y);
            if !fm.is_finite() {
                return Err(Error::RootFinding { cell: self.cell });
            }
            if fm == T::zero() {
                return Ok(m);
            }
            if (fm < T::zero()) == neg_a {
                a = m;
            } else {
                b = m;
            }
        }
        let m = T::lit(0.5) * (a + b);
        if !f.solved.is_empty() {
            return Ok(m);
        }
        // one Newton polish, kept only if it stays in the bracket
        y[axis] = m;
        let mut grad = vec![T::zero(); y.len()];
        let fm = self.eval_grad(f, y, &mut grad);
        let d = grad[axis];
        if d != T::zero() && fm.is_finite() {
            let t = m - fm / d;
            if t >= a && t <= b {
                return Ok(t);
            }
        }
        Ok(m)
    }

    fn push_segment(&self, rule: &mut Rule<T>, base: &[T], axis: usize, w: T, s: T, e: T) {
        let (gp, gw) = &self.gauss;
        let len = e - s;
        for (p, &pw) in gp.iter().zip(gw) {
            for (b, &v) in base.iter().enumerate() {
                if b == axis {
                    rule.points.push(s + len * *p);
                }
                rule.points.push(v);
            }
            if axis == base.len() {
                rule.points.push(s + len * *p);
            }
            rule.weights.push(w * len * pw);
        }
    }

    /// Rule on the whole box that is smooth between the zero sets of `funcs`.
    fn partition_rule(&mut self, lo: &[T], hi: &[T], funcs: Vec<Restriction<T>>, depth: usize) -> Result<Rule<T>> {
        let n = lo.len();
        let mut kept = Vec::new();
        let mut samples = Vec::new();
        for f in funcs {
            let s = self.sample(&f, lo, hi);
            self.check_finite(&s)?;
            let all_pos = s.values.iter().all(|&v| v > T::zero());
            let all_neg = s.values.iter().all(|&v| v < T::zero());
            // a restriction that vanishes identically imposes no breakpoints
            let all_zero = s.values.iter().all(|&v| v == T::zero());
            if !(all_pos || all_neg || all_zero) {
                kept.push(f);
                samples.push(s);
            }
        }
        if kept.is_empty() {
            let (points, weights) = tensor_gauss(lo, hi, self.opts.order);
            return Ok(Rule { points, weights });
        }
        let axis = if n == 1 { Some(0) } else { self.height_axis(&samples, n, depth) };
        let Some(axis) = axis else {
            if depth < self.opts.max_depth {
                self.diag.subdivisions += 1;
                let mut rule = Rule::new();
                for (slo, shi) in split_box(lo, hi) {
                    let sub = self.partition_rule(&slo, &shi, kept.clone(), depth + 1)?;
                    rule.points.extend(sub.points);
                    rule.weights.extend(sub.weights);
                }
                return Ok(rule);
            }
            self.diag.fallbacks += 1;
            let (points, weights) = tensor_gauss(lo, hi, self.opts.order);
            return Ok(Rule { points, weights });
        };
        let (base_lo, base_hi) = (drop_axis(lo, axis), drop_axis(hi, axis));
        let base = if n == 1 {
            Rule { points: Vec::new(), weights: vec![T::one()] }
        } else {
            let mut base_funcs = Vec::with_capacity(2 * kept.len());
            for f in &kept {
                base_funcs.push(f.restrict(axis, lo[axis]));
                base_funcs.push(f.restrict(axis, hi[axis]));
            }
            // a crossing curve meeting another zero set changes how the
            // pieces between them combine; plain restrictions stay separable
            for (i, f) in kept.iter().enumerate() {
                for g in &kept[i + 1..] {
                    if f.solved.is_empty() && g.solved.is_empty() {
                        continue;
                    }
                    let (simple, other) = if f.solved.len() <= g.solved.len() { (f, g) } else { (g, f) };
                    base_funcs.push(other.crossing(simple, axis, lo[axis], hi[axis]));
                }
            }
            self.partition_rule(&base_lo, &base_hi, base_funcs, depth)?
        };
        let mut rule = Rule::new();
        let mut y = vec![T::zero(); n];
        let mut roots = Vec::new();
        for (bp, &bw) in base.weights.iter().enumerate() {
            let bpt = &base.points[bp * (n - 1)..(bp + 1) * (n - 1)];
            insert_axis(bpt, axis, T::zero(), &mut y);
            roots.clear();
            for f in &kept {
                self.line_roots(f, &mut y, axis, lo[axis], hi[axis], &mut roots)?;
            }
            roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut s = lo[axis];
            for &r in roots.iter().chain(std::iter::once(&hi[axis])) {
                if r > s {
                    self.push_segment(&mut rule, bpt, axis, bw, s, r);
                    s = r;
                }
            }
        }
        Ok(rule)
    }

    /// Interior rule where `φ > 0` plus the surface rule, on a full-dimensional box.
    ///
    /// Each smooth component of `φ` is tracked separately so that the kinks
    /// of a maximum never have to be resolved by subdivision.
    fn volume(&mut self, lo: &[T], hi: &[T], depth: usize, interior: &mut Rule<T>, surface: &mut SurfaceRule<T>) -> Result<()> {
        let n = self.dim;
        let mut kept = Vec::new();
        let mut samples = Vec::new();
        for c in 0..self.phi.n_components() {
            let f = Restriction::free(n, c);
            let s = self.sample(&f, lo, hi);
            self.check_finite(&s)?;
            if s.values.iter().all(|&v| v > T::zero()) {
                let (p, w) = tensor_gauss(lo, hi, self.opts.order);
                interior.points.extend(p);
                interior.weights.extend(w);
                return Ok(());
            }
            let all_neg = s.values.iter().all(|&v| v < T::zero());
            let all_zero = s.values.iter().all(|&v| v == T::zero());
            if !(all_neg || all_zero) {
                kept.push(f);
                samples.push(s);
            }
        }
        if kept.is_empty() {
            return Ok(());
        }
        let Some(axis) = self.height_axis(&samples, n, depth) else {
            if depth < self.opts.max_depth {
                self.diag.subdivisions += 1;
                for (slo, shi) in split_box(lo, hi) {
                    self.volume(&slo, &shi, depth + 1, interior, surface)?;
                }
                return Ok(());
            }
            self.diag.fallbacks += 1;
            let center: Vec<T> = lo.iter().zip(hi).map(|(&a, &b)| T::lit(0.5) * (a + b)).collect();
            if self.phi.value(&center) >= T::zero() {
                let (p, w) = tensor_gauss(lo, hi, self.opts.order);
                interior.points.extend(p);
                interior.weights.extend(w);
            }
            return Ok(());
        };
        let mut base_funcs = Vec::with_capacity(2 * kept.len());
        for f in &kept {
            base_funcs.push(f.restrict(axis, lo[axis]));
            base_funcs.push(f.restrict(axis, hi[axis]));
        }
        // where two zero sets cross, the inside of a line switches from one
        // half-line to the other; break the base there
        for (i, f) in kept.iter().enumerate() {
            for g in &kept[i + 1..] {
                base_funcs.push(g.crossing(f, axis, lo[axis], hi[axis]));
            }
        }
        let base = self.partition_rule(&drop_axis(lo, axis), &drop_axis(hi, axis), base_funcs, depth)?;
        let mut y = vec![T::zero(); n];
        let mut grad = vec![T::zero(); n];
        let mut line = Vec::new();
        let mut roots: Vec<(T, usize)> = Vec::new();
        for (bp, &bw) in base.weights.iter().enumerate() {
            let bpt = &base.points[bp * (n - 1)..(bp + 1) * (n - 1)];
            insert_axis(bpt, axis, T::zero(), &mut y);
            roots.clear();
            for (i, f) in kept.iter().enumerate() {
                line.clear();
                self.line_roots(f, &mut y, axis, lo[axis], hi[axis], &mut line)?;
                roots.extend(line.iter().map(|&r| (r, i)));
            }
            roots.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut s = lo[axis];
            for &r in roots.iter().map(|(r, _)| r).chain(std::iter::once(&hi[axis])) {
                if r > s {
                    y[axis] = T::lit(0.5) * (s + r);
                    if self.max_of(&kept, &y, usize::MAX) > T::zero() {
                        self.push_segment(interior, bpt, axis, bw, s, r);
                    }
                    s = r;
                }
            }
            for &(r, i) in &roots {
                y[axis] = r;
                // a root inside another component is not on the boundary
                if kept.len() > 1 && self.max_of(&kept, &y, i) >= T::zero() {
                    continue;
                }
                self.eval_grad(&kept[i], &y, &mut grad);
                let gnorm = crate::scalar::norm2(&grad);
                let ga = grad[axis].abs();
                if gnorm == T::zero() || ga == T::zero() {
                    return Err(Error::RootFinding { cell: self.cell });
                }
                surface.points.extend_from_slice(&y);
                surface.weights.push(bw * gnorm / ga);
                surface.normals.extend(grad.iter().map(|&g| -g / gnorm));
            }
        }
        Ok(())
    }

    /// Maximum over `funcs` at `y`, skipping index `skip`.
    fn max_of(&mut self, funcs: &[Restriction<T>], y: &[T], skip: usize) -> T {
        let mut m = T::neg_infinity();
        for (i, f) in funcs.iter().enumerate() {
            if i != skip {
                m = m.max(self.eval(f, y));
            }
        }
        m
    }
}

struct SurfaceRule<T> {
    points: Vec<T>,
    weights: Vec<T>,
    normals: Vec<T>,
}

fn drop_axis<T: Copy>(v: &[T], axis: usize) -> Vec<T> {
    v.iter().enumerate().filter(|&(i, _)| i != axis).map(|(_, &x)| x).collect()
}

fn insert_axis<T: Copy>(base: &[T], axis: usize, value: T, out: &mut [T]) {
    let mut it = base.iter();
    for (i, o) in out.iter_mut().enumerate() {
        *o = if i == axis { value } else { *it.next().unwrap() };
    }
}

fn split_box<T: Real>(lo: &[T], hi: &[T]) -> Vec<(Vec<T>, Vec<T>)> {
    let n = lo.len();
    let mid: Vec<T> = lo.iter().zip(hi).map(|(&a, &b)| T::lit(0.5) * (a + b)).collect();
    (0..1usize << n)
        .map(|mask| {
            let slo = (0..n).map(|a| if mask >> a & 1 == 0 { lo[a] } else { mid[a] }).collect();
            let shi = (0..n).map(|a| if mask >> a & 1 == 0 { mid[a] } else { hi[a] }).collect();
            (slo, shi)
        })
        .collect()
}

/// Interior and surface rules of the box `[lo, hi]` intersected with `φ > 0`.
///
/// `cell` only labels errors.
pub fn cut_cell_quadrature<T: Real>(
    lo: &[T],
    hi: &[T],
    phi: &dyn LevelSet<T>,
    opts: QuadratureOptions,
    cell: usize,
) -> Result<(CutCellQuadrature<T>, QuadratureDiagnostics)> {
    let dim = lo.len();
    if phi.dim() != dim || !(dim == 2 || dim == 3) {
        return Err(Error::Dimension(dim));
    }
    if opts.order == 0 {
        return Err(Error::QuadratureTooLow { degree: 0, points: 0 });
    }
    let h = lo.iter().zip(hi).fold(T::zero(), |m, (&a, &b)| m.max(b - a));
    let mut b = Builder::new(phi, opts, cell, h);
    let mut interior = Rule::new();
    let mut surface = SurfaceRule { points: Vec::new(), weights: Vec::new(), normals: Vec::new() };
    b.volume(lo, hi, 0, &mut interior, &mut surface)?;
    let quad = CutCellQuadrature {
        dim,
        interior_points: interior.points,
        interior_weights: interior.weights,
        surface_points: surface.points,
        surface_weights: surface.weights,
        surface_normals: surface.normals,
    };
    Ok((quad, b.diag))
}

/// Interior part only: points and weights on `[lo, hi] ∩ {φ > 0}`.
pub fn interior_quadrature<T: Real>(
    lo: &[T],
    hi: &[T],
    phi: &dyn LevelSet<T>,
    opts: QuadratureOptions,
) -> Result<(Vec<T>, Vec<T>)> {
    let (q, _) = cut_cell_quadrature(lo, hi, phi, opts, 0)?;
    Ok((q.interior_points, q.interior_weights))
}

/// Surface part only: points, weights and outward normals on `[lo, hi] ∩ {φ = 0}`.
pub fn surface_quadrature<T: Real>(
    lo: &[T],
    hi: &[T],
    phi: &dyn LevelSet<T>,
    opts: QuadratureOptions,
) -> Result<(Vec<T>, Vec<T>, Vec<T>)> {
    let (q, _) = cut_cell_quadrature(lo, hi, phi, opts, 0)?;
    Ok((q.surface_points, q.surface_weights, q.surface_normals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HalfSpace, Sphere};

    fn opts(q: usize) -> QuadratureOptions {
        QuadratureOptions::new(q)
    }

    #[test]
    fn half_space_volume_and_surface() {
        let phi = HalfSpace::new(vec![1.0f64, 0.0], 0.5);
        let (q, d) = cut_cell_quadrature(&[0.0, 0.0], &[1.0, 1.0], &phi, opts(3), 0).unwrap();
        assert!((q.volume() - 0.5).abs() < 1e-14);
        assert!((q.area() - 1.0).abs() < 1e-14);
        for s in 0..q.n_surface() {
            let n = q.surface_normal(s);
            assert!((n[0] - 1.0).abs() < 1e-14 && n[1].abs() < 1e-14);
            assert!(q.surface_point(s)[0] == 0.5);
        }
        assert_eq!(d.fallbacks, 0);
    }

    #[test]
    fn inside_box_gets_full_tensor_rule() {
        let phi = Sphere::new(vec![0.0f64, 0.0, 0.0], 10.0);
        let (q, _) = cut_cell_quadrature(&[0.0, 0.0, 0.0], &[0.5, 0.25, 2.0], &phi, opts(2), 0).unwrap();
        assert_eq!(q.n_interior(), 8);
        assert!((q.volume() - 0.25).abs() < 1e-15);
        assert_eq!(q.n_surface(), 0);
    }

    #[test]
    fn circular_segment_area() {
        let phi = Sphere::new(vec![0.0f64, 0.0], 1.0);
        let (q, _) = cut_cell_quadrature(&[0.0, 0.0], &[0.6, 0.6], &phi, opts(5), 0).unwrap();
        // the part of [0,0.6]² outside the unit disk is empty, so the inside
        // area is the full square
        assert!((q.volume() - 0.36).abs() < 1e-14);
        let (q, _) = cut_cell_quadrature(&[0.6, 0.6], &[1.2, 1.2], &phi, opts(5), 0).unwrap();
        // region of the disk with x, y >= 0.6: ∫_{0.6}^{0.8} (sqrt(1-x²) - 0.6) dx
        let big = |x: f64| 0.5 * (x * (1.0 - x * x).sqrt() + x.asin());
        let exact = big(0.8) - big(0.6) - 0.6 * 0.2;
        assert!((q.volume() - exact).abs() < 1e-10, "{} vs {exact}", q.volume());
    }

    #[test]
    fn interface_on_lower_face_is_owned_by_the_upper_cell() {
        let phi = HalfSpace::new(vec![1.0f64, 0.0], 0.5);
        let (a, _) = cut_cell_quadrature(&[0.0, 0.0], &[0.5, 1.0], &phi, opts(2), 0).unwrap();
        let (b, _) = cut_cell_quadrature(&[0.5, 0.0], &[1.0, 1.0], &phi, opts(2), 1).unwrap();
        assert_eq!(a.n_surface() + b.n_surface(), 2);
        assert!((a.volume() + b.volume() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn csv_rows_have_expected_columns() {
        let phi = HalfSpace::new(vec![1.0f64, 0.0], 0.5);
        let (q, _) = cut_cell_quadrature(&[0.0, 0.0], &[1.0, 1.0], &phi, opts(1), 0).unwrap();
        let mut s = String::new();
        q.write_csv_rows(3, &mut s);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines.len(), q.n_interior() + q.n_surface());
        assert_eq!(lines[0].split(',').count(), 5);
        assert_eq!(lines.last().unwrap().split(',').count(), 7);
        assert!(lines[0].starts_with("3,I,"));
        assert_eq!(csv_header(2).trim().split(',').count(), 7);
    }

    #[test]
    fn center_of_small_ball_triggers_subdivision() {
        let phi = Sphere::new(vec![0.5, 0.5], 0.3);
        let (q, d) = cut_cell_quadrature(&[0.0, 0.0], &[1.0, 1.0], &phi, opts(6), 0).unwrap();
        assert!(d.subdivisions > 0);
        assert!((q.volume() - std::f64::consts::PI * 0.09).abs() < 1e-9);
        // quarter arcs per sub-box make the height parametrization nearly singular
        assert!((q.area() - std::f64::consts::PI * 0.6).abs() < 1e-7);
    }
}
