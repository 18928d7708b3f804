//! Particle-anchored dressing: relational coordinates `x_k - x_i`, the
//! dressing field `u_i = replicate(-x_i)`, frame shifts `Z_ij` and the
//! consistency relations between dressed and bare cocycle data.
//!
//! A dressing field is realised as nodewise samples along a path so the
//! cocycle machinery applies to it unchanged. It is not a [`GaugeField`].

use num_traits::Float;
use serde::Serialize;

use crate::bundle::{decompose_shift, Anchor, Config, GaugeField, Layout, Shift};
use crate::classical::{action, solve_with_mask, Solution, SolverOptions};
use crate::cocycle::{path_cocycle_along, sample_gauge, CocycleAccumulator, LagrangianModel};
use crate::error::{Error, Result};
use crate::path::{DiscretePath, Frame};
use crate::scalar::{Field, Real};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DressingChoice {
    anchor: usize,
}

impl DressingChoice {
    pub fn new(layout: &Layout, anchor: usize) -> Result<Self> {
        layout.check_particle(anchor)?;
        Ok(Self { anchor })
    }

    pub fn anchor(&self) -> usize {
        self.anchor
    }
}

/// Configuration seen from particle `anchor`; its block is identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationalConfig<T> {
    pub t: T,
    pub xbar: Vec<T>,
    pub anchor: usize,
}

fn relative<T: Field>(layout: &Layout, x: &[T], i: usize) -> Vec<T> {
    let xi = &x[layout.block(i)];
    let mut out: Vec<T> = x
        .iter()
        .enumerate()
        .map(|(c, v)| v.clone() - xi[c % layout.spatial_dim].clone())
        .collect();
    for c in layout.block(i) {
        out[c] = T::zero();
    }
    out
}

pub fn dress_config<T: Field>(layout: &Layout, p: &Config<T>, u: DressingChoice) -> Result<RelationalConfig<T>> {
    layout.check(p.x.len())?;
    layout.check_particle(u.anchor)?;
    Ok(RelationalConfig { t: p.t.clone(), xbar: relative(layout, &p.x, u.anchor), anchor: u.anchor })
}

/// `u_i(p) = replicate(-x_i)`.
pub fn dressing_field<T: Field>(layout: &Layout, p: &Config<T>, u: DressingChoice) -> Result<Shift<T>> {
    layout.check(p.x.len())?;
    let neg: Vec<T> = p.x[layout.block(u.anchor)].iter().map(|v| -v.clone()).collect();
    Ok(Shift::new(layout.replicate(&neg)))
}

/// Dressing field sampled at every node of a path.
pub fn dressing_samples<T: Field>(layout: &Layout, path: &DiscretePath<T>, u: DressingChoice) -> Result<Vec<Vec<T>>> {
    (0..path.nodes())
        .map(|k| dressing_field(layout, &path.config(k), u).map(|s| s.v))
        .collect()
}

pub fn dress_path<T: Field>(layout: &Layout, path: &DiscretePath<T>, u: DressingChoice) -> Result<DiscretePath<T>> {
    path.check_layout(layout)?;
    layout.check_particle(u.anchor)?;
    let x = path.x.iter().map(|x| relative(layout, x, u.anchor)).collect();
    Ok(DiscretePath { x, frame: Frame::Relational { anchor: u.anchor }, ..path.clone() })
}

/// `Z_ij = replicate(x_i - x_j)` along a path, so that `u_j = u_i + Z_ij`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameShift<T> {
    pub z: Vec<Vec<T>>,
    /// Set when `i == j`; the shift is then zero.
    pub identity: bool,
}

pub fn frame_shift<T: Field>(layout: &Layout, path: &DiscretePath<T>, i: usize, j: usize) -> Result<FrameShift<T>> {
    path.check_layout(layout)?;
    layout.check_particle(i)?;
    layout.check_particle(j)?;
    let z = path
        .x
        .iter()
        .map(|x| {
            let d: Vec<T> = x[layout.block(i)]
                .iter()
                .zip(&x[layout.block(j)])
                .map(|(a, b)| a.clone() - b.clone())
                .collect();
            layout.replicate(&d)
        })
        .collect();
    Ok(FrameShift { z, identity: i == j })
}

/// Dressed action evaluated as the action of the relational path and as
/// `S[gamma] + c_gamma(u_i)`.
pub fn dressed_action_split<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, u: DressingChoice) -> Result<(T, T)> {
    let layout = model.layout();
    let direct = action(model, &dress_path(&layout, path, u)?)?;
    let split = action(model, path)? + path_cocycle_along(model, path, &dressing_samples(&layout, path, u)?)?.value;
    Ok((direct, split))
}

pub fn dressed_action<T: Field>(model: &LagrangianModel<T>, path: &DiscretePath<T>, u: DressingChoice) -> Result<T> {
    let (direct, split) = dressed_action_split(model, path, u)?;
    let diff = (direct.clone() - split).approx_f64().abs();
    let tol = 1e-9 * (1.0 + direct.approx_f64().abs());
    if diff > tol {
        return Err(Error::CrossCheck { what: "dressed action", diff, tol });
    }
    Ok(direct)
}

/// Internal part `Y - replicate(Y_i)` of nodal gauge samples.
pub fn internal_samples<T: Field>(layout: &Layout, y: &[Vec<T>], i: usize) -> Result<Vec<Vec<T>>> {
    y.iter()
        .map(|s| decompose_shift(layout, &Shift::new(s.clone()), Anchor::Particle(i)).map(|d| d.internal.v))
        .collect()
}

/// Residual transformation of the first kind: adds `Y - Y_i` to a relational path.
pub fn residual_first_kind<T: Field>(layout: &Layout, rel: &DiscretePath<T>, u: DressingChoice, g: &GaugeField<T>) -> Result<DiscretePath<T>> {
    rel.check_layout(layout)?;
    let ybar = internal_samples(layout, &sample_gauge(rel, g), u.anchor)?;
    let mut out = rel.shifted(&ybar);
    for x in &mut out.x {
        for c in layout.block(u.anchor) {
            x[c] = T::zero();
        }
    }
    Ok(out)
}

/// `sum_{k != i} m_k / 2 |v_k - v_i|^2`.
pub fn relational_kinetic_density<T: Field>(model: &LagrangianModel<T>, v: &[T], i: usize) -> T {
    let l = model.layout();
    let vi = &v[l.block(i)];
    (0..l.n_particles).filter(|k| *k != i).fold(T::zero(), |acc, k| {
        let q = v[l.block(k)].iter().zip(vi).fold(T::zero(), |s, (a, b)| {
            let d = a.clone() - b.clone();
            s + d.clone() * d
        });
        acc + T::half() * model.params.masses[k].clone() * q
    })
}

/// Critical path of the dressed problem, anchor block frozen at zero.
pub fn dressed_critical_path<T: Real>(
    model: &LagrangianModel<T>,
    q0: &RelationalConfig<T>,
    q1: &RelationalConfig<T>,
    u: DressingChoice,
    m: usize,
    opts: &SolverOptions,
) -> Result<Solution<T>> {
    let layout = model.layout();
    if q1.t <= q0.t {
        return Err(Error::TimeOrder { t0: q0.t.approx_f64(), t1: q1.t.approx_f64() });
    }
    if q0.anchor != u.anchor || q1.anchor != u.anchor {
        return Err(Error::InvalidModel("relational endpoints use a different anchor".into()));
    }
    let frozen: Vec<bool> = (0..layout.dim()).map(|c| c / layout.spatial_dim == u.anchor).collect();
    let bare0 = Config { t: q0.t, x: relative(&layout, &q0.xbar, u.anchor) };
    let bare1 = Config { t: q1.t, x: relative(&layout, &q1.xbar, u.anchor) };
    let mut start = DiscretePath::straight(&bare0, &bare1, m)?;
    start.frame = Frame::Relational { anchor: u.anchor };
    solve_with_mask(model, start, &frozen, opts)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityResidual {
    pub name: &'static str,
    pub residual: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IdentityReport {
    pub entries: Vec<IdentityResidual>,
}

impl IdentityReport {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|e| e.name == name).map(|e| e.residual)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// Entrywise maximum with another report of the same shape; an empty
    /// report takes the other one's entries.
    pub fn merge_max(&mut self, other: &IdentityReport) {
        if self.entries.is_empty() {
            self.entries = other.entries.clone();
            return;
        }
        for (a, b) in self.entries.iter_mut().zip(&other.entries) {
            debug_assert_eq!(a.name, b.name);
            a.residual = a.residual.max(b.residual);
        }
    }
}

pub const IDENTITY_NAMES: [&str; 10] = [
    "dressing-external-shift",
    "dressing-internal-shift",
    "dressing-internal-shift-expanded",
    "dressing-frame-shift",
    "frame-shift-transform",
    "frame-shift-composite",
    "dressed-lagrangian-frame-change",
    "frame-correction-antisymmetry",
    "relational-lagrangian-telescoping",
    "rule-of-thumb-phase",
];

fn add<T: Field>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.clone() + v.clone()).collect())
        .collect()
}

fn sub<T: Field>(a: &[Vec<T>], b: &[Vec<T>]) -> Vec<Vec<T>> {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u.clone() - v.clone()).collect())
        .collect()
}

/// Evaluates both sides of every dressing identity on one path and gauge field.
/// The external-shift identity uses the mean-anchored external part of `g`.
pub fn identity_suite<T: Real>(model: &LagrangianModel<T>, path: &DiscretePath<T>, i: usize, j: usize, g: &GaugeField<T>) -> Result<IdentityReport> {
    if i == j {
        return Err(Error::SameAnchor);
    }
    let l = model.layout();
    let ui = DressingChoice::new(&l, i)?;
    let uj = DressingChoice::new(&l, j)?;
    let c = |p: &DiscretePath<T>, w: &[Vec<T>]| path_cocycle_along(model, p, w).map(|a| a.value);
    let err = |a: T, b: T| Float::abs((a - b).approx_f64());
    let mut entries = Vec::new();

    let u = dressing_samples(&l, path, ui)?;
    let gu = path.shifted(&u);
    let y = sample_gauge(path, g);

    // external shift: u(gamma^X) = u - X
    let x: Vec<Vec<T>> = y
        .iter()
        .map(|s| decompose_shift(&l, &Shift::new(s.clone()), Anchor::Mean).map(|d| d.external.v))
        .collect::<Result<_>>()?;
    let gx = path.shifted(&x);
    let lhs = c(&gx, &dressing_samples(&l, &gx, ui)?)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[0], residual: err(lhs, c(path, &u)? - c(path, &x)?) });

    // internal shift
    let gy = path.shifted(&y);
    let ybar_i = internal_samples(&l, &y, i)?;
    let lhs = c(&gy, &dressing_samples(&l, &gy, ui)?)?;
    let rhs = c(path, &add(&u, &ybar_i))? - c(path, &y)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[1], residual: err(lhs, rhs) });
    let rhs2 = c(path, &u)? + c(&gu, &ybar_i)? - c(path, &y)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[2], residual: err(lhs, rhs2) });

    // frame shift: c(u_i + Z) = c(u_i) + c_{gamma^{u_i}}(Z)
    let z = frame_shift(&l, path, i, j)?.z;
    let ujs = dressing_samples(&l, path, uj)?;
    let lhs = c(path, &ujs)?;
    let nodal = add(&u, &z)
        .iter()
        .zip(&ujs)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| Float::abs((*p - *q).approx_f64())))
        .fold(0.0, f64::max);
    let corr = c(&gu, &z)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[3], residual: err(lhs, c(path, &u)? + corr).max(nodal) });

    // Z transforms as Z + (Y_i - Y_j) under Y
    let zy = frame_shift(&l, &gy, i, j)?.z;
    let yd: Vec<Vec<T>> = y
        .iter()
        .map(|s| {
            let d: Vec<T> = s[l.block(i)].iter().zip(&s[l.block(j)]).map(|(a, b)| *a - *b).collect();
            l.replicate(&d)
        })
        .collect();
    let predicted = add(&z, &yd);
    let nodal = zy
        .iter()
        .zip(&predicted)
        .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| Float::abs((*p - *q).approx_f64())))
        .fold(0.0, f64::max);
    let gyu = gy.shifted(&dressing_samples(&l, &gy, ui)?);
    let lhs = c(&gyu, &zy)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[4], residual: err(lhs, c(&gyu, &predicted)?).max(nodal) });

    // composite identity
    let ybar_j = internal_samples(&l, &y, j)?;
    let guj = path.shifted(&ujs);
    let rhs = c(&gu, &z)? + c(&guj, &ybar_j)? - c(&gu, &ybar_i)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[5], residual: err(lhs, rhs) });

    // dressed Lagrangian under frame change, integrated and per interval
    let si = action(model, &gu)?;
    let sj = action(model, &guj)?;
    let mut worst = err(sj, si + corr);
    for k in 0..path.nodes() - 1 {
        let seg = |p: &DiscretePath<T>| DiscretePath::new(p.t[k..k + 2].to_vec(), p.x[k..k + 2].to_vec());
        let (a, b) = (seg(&gu)?, seg(&guj)?);
        let lhs = action(model, &b)?;
        let rhs = action(model, &a)? + c(&a, &z[k..k + 2])?;
        worst = worst.max(err(lhs, rhs));
    }
    entries.push(IdentityResidual { name: IDENTITY_NAMES[6], residual: worst });

    // swapping the anchors flips the correction term
    let zji = frame_shift(&l, path, j, i)?.z;
    let back = c(&guj, &zji)?;
    entries.push(IdentityResidual { name: IDENTITY_NAMES[7], residual: err(corr, -back) });

    // kinetic density of the j-dressed path is sum m_k/2 |v_k - v_j|^2
    let kinetic = |v: &[T]| -> T {
        v.iter().enumerate().fold(T::zero(), |acc, (c, a)| acc + T::half() * model.params.coord_mass(c) * *a * *a)
    };
    let mut worst = 0.0f64;
    for k in 0..path.nodes() - 1 {
        let v = path.velocity(k);
        let h = path.dt(k);
        let w: Vec<T> = ujs[k + 1].iter().zip(&ujs[k]).map(|(b, a)| (*b - *a) / h).collect();
        let via_cocycle = kinetic(&v) + crate::cocycle::cocycle_density(model, &Shift::new(v.clone()), &Shift::new(w))?;
        let telescoped = relational_kinetic_density(model, &v, j);
        let dressed = kinetic(&guj.velocity(k));
        worst = worst.max(err(via_cocycle, telescoped)).max(err(dressed, telescoped));
    }
    entries.push(IdentityResidual { name: IDENTITY_NAMES[8], residual: worst });

    // U(1) lift: C(u_j) = C(u_i) C_{gamma^{u_i}}(Z)
    let hbar = model.hbar();
    let cj = CocycleAccumulator::new(c(path, &ujs)?, hbar).phase();
    let ci = CocycleAccumulator::new(c(path, &u)?, hbar).phase();
    let cz = CocycleAccumulator::new(corr, hbar).phase();
    entries.push(IdentityResidual { name: IDENTITY_NAMES[9], residual: (cj - ci * cz).norm().approx_f64() });

    Ok(IdentityReport { entries })
}

/// Nodal difference `dress(path, j) - (dress(path, i) + Z_ij)`.
pub fn frame_relabel_defect<T: Real>(layout: &Layout, path: &DiscretePath<T>, i: usize, j: usize) -> Result<f64> {
    let di = dress_path(layout, path, DressingChoice::new(layout, i)?)?;
    let dj = dress_path(layout, path, DressingChoice::new(layout, j)?)?;
    let z = frame_shift(layout, path, i, j)?.z;
    Ok(sub(&dj.x, &add(&di.x, &z))
        .iter()
        .flatten()
        .map(|v| Float::abs(v.approx_f64()))
        .fold(0.0, f64::max))
}
