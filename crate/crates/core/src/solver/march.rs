//! Explicit pseudo-time marching on a padded array with two ghost layers.

use super::flux::{hllc, muscl_states, physical_flux, primitive, split_flux, swap, Q};
use super::{Inflow, SchemeId, SolverConfig, StepRecord, Viscosity};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::grid::{Grid, GridFunction};

const GHOST: usize = 2;

#[derive(Debug, Clone, Copy)]
struct Layout {
    nx: usize,
    ny: usize,
    w: usize,
}

impl Layout {
    fn new(grid: &Grid) -> Self {
        Layout {
            nx: grid.nx,
            ny: grid.ny,
            w: grid.nx + 2 * GHOST,
        }
    }

    fn padded_len(&self) -> usize {
        self.w * (self.ny + 2 * GHOST)
    }

    /// Flat index of cell `(i, j)`, ghosts at negative or past-the-end indices.
    #[inline]
    fn at(&self, i: isize, j: isize) -> usize {
        (j + GHOST as isize) as usize * self.w + (i + GHOST as isize) as usize
    }
}

/// Ghost-cell values: the exact inflow state at every ghost centre, and for
/// the top and bottom rows whether each column is prescribed or extrapolated.
struct Boundary {
    exact: Vec<Q>,
    bottom: Vec<bool>,
    top: Vec<bool>,
}

impl Boundary {
    fn new(grid: &Grid, lay: &Layout, inflow: &Inflow, gamma: f64) -> Self {
        let gas = crate::gas::GasModel {
            gamma,
            gas_constant: 1.0 / gamma,
        };
        let mut exact = vec![[0.0; 4]; lay.padded_len()];
        for j in -(GHOST as isize)..(lay.ny + GHOST) as isize {
            for i in -(GHOST as isize)..(lay.nx + GHOST) as isize {
                let (x, y) = grid.center(i, j);
                exact[lay.at(i, j)] = inflow.exact(x, y).to_conserved(&gas);
            }
        }
        let e = grid.extent;
        let bottom = (0..lay.nx)
            .map(|i| inflow.exact(grid.x_center(i), e.y0).v >= 0.0)
            .collect();
        let top = (0..lay.nx)
            .map(|i| inflow.exact(grid.x_center(i), e.y1).v <= 0.0)
            .collect();
        Boundary { exact, bottom, top }
    }

    fn fill(&self, lay: &Layout, u: &mut [Q]) {
        let (nx, ny) = (lay.nx as isize, lay.ny as isize);
        for i in 0..nx {
            for g in 1..=GHOST as isize {
                let b = lay.at(i, -g);
                u[b] = if self.bottom[i as usize] {
                    self.exact[b]
                } else {
                    u[lay.at(i, 0)]
                };
                let t = lay.at(i, ny - 1 + g);
                u[t] = if self.top[i as usize] {
                    self.exact[t]
                } else {
                    u[lay.at(i, ny - 1)]
                };
            }
        }
        for j in -(GHOST as isize)..ny + GHOST as isize {
            for g in 1..=GHOST as isize {
                let l = lay.at(-g, j);
                u[l] = self.exact[l];
                u[lay.at(nx - 1 + g, j)] = u[lay.at(nx - 1, j)];
            }
        }
    }
}

/// Face fluxes and scratch arrays reused between steps.
struct Workspace {
    /// x faces: `ny` rows of `nx + 1`, face `i` sits left of cell `i`.
    fx: Vec<Q>,
    /// y faces: `ny + 1` rows of `nx`, face `j` sits below cell row `j`.
    gy: Vec<Q>,
    /// Padded scratch: primitive variables (MUSCL) or predictor (MacCormack).
    pad: Vec<Q>,
    /// Padded physical fluxes of the current state (MacCormack, Lax-Wendroff).
    fc: Vec<Q>,
    gc: Vec<Q>,
    rates: Vec<Q>,
}

/// Steady-state marcher for one scheme on one grid.
pub struct Marcher {
    scheme: SchemeId,
    grid: Grid,
    gamma: f64,
    cfl: f64,
    limiter: super::Limiter,
    exec: Execution,
    lay: Layout,
    bc: Boundary,
    u: Vec<Q>,
    source: Option<Vec<Q>>,
    ws: Workspace,
    step: usize,
    last_dt: f64,
    last_outflow: f64,
}

fn to_interior(lay: &Layout, f: &GridFunction) -> Vec<Q> {
    let mut u = vec![[0.0; 4]; lay.padded_len()];
    let v = f.values();
    for j in 0..lay.ny {
        for i in 0..lay.nx {
            let k = (j * lay.nx + i) * 4;
            u[lay.at(i as isize, j as isize)] = [v[k], v[k + 1], v[k + 2], v[k + 3]];
        }
    }
    u
}

impl Marcher {
    pub fn new(cfg: &SolverConfig, initial: &GridFunction, source: Option<&GridFunction>) -> Result<Self> {
        cfg.validate()?;
        if !initial.grid().same_as(&cfg.grid) || initial.ncomp() != 4 {
            return Err(Error::GridMismatch(
                "initial state does not match the solver grid".into(),
            ));
        }
        let lay = Layout::new(&cfg.grid);
        let source = match source {
            Some(s) => {
                if !s.grid().same_as(&cfg.grid) || s.ncomp() != 4 {
                    return Err(Error::GridMismatch("source does not match the solver grid".into()));
                }
                if s.values().iter().all(|x| *x == 0.0) {
                    None
                } else {
                    let v = s.values();
                    Some(
                        (0..lay.nx * lay.ny)
                            .map(|k| [v[4 * k], v[4 * k + 1], v[4 * k + 2], v[4 * k + 3]])
                            .collect(),
                    )
                }
            }
            None => None,
        };
        let n = lay.padded_len();
        Ok(Marcher {
            scheme: cfg.scheme,
            grid: cfg.grid,
            gamma: cfg.gas.gamma,
            cfl: cfg.cfl,
            limiter: cfg.limiter,
            exec: cfg.execution,
            bc: Boundary::new(&cfg.grid, &lay, &cfg.inflow, cfg.gas.gamma),
            u: to_interior(&lay, initial),
            source,
            ws: Workspace {
                fx: vec![[0.0; 4]; lay.ny * (lay.nx + 1)],
                gy: vec![[0.0; 4]; (lay.ny + 1) * lay.nx],
                pad: vec![[0.0; 4]; n],
                fc: vec![[0.0; 4]; n],
                gc: vec![[0.0; 4]; n],
                rates: vec![[0.0; 4]; lay.nx * lay.ny],
            },
            lay,
            step: 0,
            last_dt: 0.0,
            last_outflow: 0.0,
        })
    }

    pub fn steps_taken(&self) -> usize {
        self.step
    }

    pub fn solution(&self) -> GridFunction {
        let lay = &self.lay;
        let mut v = Vec::with_capacity(lay.nx * lay.ny * 4);
        for j in 0..lay.ny {
            for i in 0..lay.nx {
                v.extend_from_slice(&self.u[lay.at(i as isize, j as isize)]);
            }
        }
        GridFunction::from_values(self.grid, 4, v).expect("marcher state is finite")
    }

    /// Integral of density over the interior.
    pub fn total_mass(&self) -> f64 {
        let lay = self.lay;
        let u = &self.u;
        let rows = self.exec.map_indices(lay.ny, |j| {
            (0..lay.nx).fold(0.0, |s, i| s + u[lay.at(i as isize, j as isize)][0])
        });
        rows.into_iter().fold(0.0, |s, r| s + r) * self.grid.cell_area()
    }

    /// Net mass leaving through the domain boundary per unit time during the
    /// most recent step (stage-averaged for two-stage schemes).
    pub fn boundary_mass_outflow(&self) -> f64 {
        self.last_outflow
    }

    fn face_outflow(&self) -> f64 {
        let (nx, ny) = (self.lay.nx, self.lay.ny);
        let ws = &self.ws;
        let mut x = 0.0;
        for j in 0..ny {
            x += ws.fx[j * (nx + 1) + nx][0] - ws.fx[j * (nx + 1)][0];
        }
        let mut y = 0.0;
        for i in 0..nx {
            y += ws.gy[ny * nx + i][0] - ws.gy[i][0];
        }
        x * self.grid.hy + y * self.grid.hx
    }

    pub fn last_dt(&self) -> f64 {
        self.last_dt
    }

    fn time_step(&self) -> f64 {
        let lay = self.lay;
        let (hx, hy, g) = (self.grid.hx, self.grid.hy, self.gamma);
        let u = &self.u;
        let rows = self.exec.map_indices(lay.ny, |j| {
            (0..lay.nx).fold(0.0f64, |m, i| {
                let q = u[lay.at(i as isize, j as isize)];
                let w = primitive(&q, g);
                let c = (g * w[3] / w[0]).sqrt();
                m.max((w[1].abs() + c) / hx + (w[2].abs() + c) / hy)
            })
        });
        let s = rows.into_iter().fold(0.0f64, f64::max);
        self.cfl / s
    }

    /// Fills ghosts, picks the time step and evaluates the spatial rates
    /// (without source) into `ws.rates`.
    fn evaluate(&mut self, dt: Option<f64>) -> f64 {
        self.bc.fill(&self.lay, &mut self.u);
        let dt = dt.unwrap_or_else(|| self.time_step());
        compute_faces(
            self.scheme,
            self.limiter,
            self.exec,
            &self.grid,
            self.gamma,
            &self.lay,
            &self.bc,
            &self.u,
            dt,
            &mut self.ws,
        );
        assemble(self.exec, &self.grid, &self.lay, &mut self.ws);
        dt
    }

    /// Spatial rates of the current state: `u_t = L(u)`.
    pub(crate) fn rates(&mut self) -> (Vec<Q>, f64) {
        let dt = self.evaluate(None);
        (self.ws.rates.clone(), dt)
    }

    /// Rates of the fourth-order central flux difference
    /// `-(F(i+1/2) - F(i-1/2)) / h` with
    /// `F(i+1/2) = (-F(i-1) + 7 F(i) + 7 F(i+1) - F(i+2)) / 12`, on the same
    /// ghost layers. Not marched; it only measures truncation errors.
    pub(crate) fn central_rates(&mut self) -> Vec<Q> {
        self.bc.fill(&self.lay, &mut self.u);
        let lay = self.lay;
        let (g, hx, hy) = (self.gamma, self.grid.hx, self.grid.hy);
        let u = &self.u;
        let at = |i: isize, j: isize| lay.at(i, j);
        let fx = |i: isize, j: isize| physical_flux(&u[at(i, j)], g);
        let gy = |i: isize, j: isize| swap(physical_flux(&swap(u[at(i, j)]), g));
        let face = |a: Q, b: Q, c: Q, d: Q| {
            let mut f = [0.0; 4];
            for k in 0..4 {
                f[k] = (-a[k] + 7.0 * b[k] + 7.0 * c[k] - d[k]) / 12.0;
            }
            f
        };
        let mut rates = vec![[0.0; 4]; lay.nx * lay.ny];
        self.exec.for_each_row(&mut rates, lay.nx, |j, row| {
            let j = j as isize;
            for (i, r) in row.iter_mut().enumerate() {
                let i = i as isize;
                let xl = face(fx(i - 2, j), fx(i - 1, j), fx(i, j), fx(i + 1, j));
                let xr = face(fx(i - 1, j), fx(i, j), fx(i + 1, j), fx(i + 2, j));
                let yb = face(gy(i, j - 2), gy(i, j - 1), gy(i, j), gy(i, j + 1));
                let yt = face(gy(i, j - 1), gy(i, j), gy(i, j + 1), gy(i, j + 2));
                for c in 0..4 {
                    r[c] = -(xr[c] - xl[c]) / hx - (yt[c] - yb[c]) / hy;
                }
            }
        });
        rates
    }

    fn add_source(&mut self) {
        let lay = self.lay;
        if let Some(s) = &self.source {
            self.exec.for_each_row(&mut self.ws.rates, lay.nx, |j, row| {
                for (i, r) in row.iter_mut().enumerate() {
                    let q = s[j * lay.nx + i];
                    for c in 0..4 {
                        r[c] += q[c];
                    }
                }
            });
        }
    }

    /// `u += a * rates` over the interior.
    fn apply(&mut self, a: f64, rates: &[Q]) {
        let lay = self.lay;
        self.exec.for_each_row(&mut self.u, lay.w, |jp, row| {
            if jp < GHOST || jp >= lay.ny + GHOST {
                return;
            }
            let j = jp - GHOST;
            for i in 0..lay.nx {
                let r = rates[j * lay.nx + i];
                let q = &mut row[i + GHOST];
                for c in 0..4 {
                    q[c] += a * r[c];
                }
            }
        });
    }

    /// One explicit step. The residual is the relative L2 norm of the
    /// density rate (including source) before the update.
    pub fn advance(&mut self) -> Result<StepRecord> {
        let dt = self.evaluate(None);
        self.add_source();
        let lay = self.lay;
        let rates = &self.ws.rates;
        let u = &self.u;
        let sums = self.exec.map_indices(lay.ny, |j| {
            let mut a = 0.0;
            let mut b = 0.0;
            for i in 0..lay.nx {
                let r = rates[j * lay.nx + i][0];
                let rho = u[lay.at(i as isize, j as isize)][0];
                a += r * r;
                b += rho * rho;
            }
            (a, b)
        });
        let (num, den) = sums.into_iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
        let residual = (num / den).sqrt();

        if self.scheme.stages() == 1 {
            let rates = std::mem::take(&mut self.ws.rates);
            self.apply(dt, &rates);
            self.ws.rates = rates;
            self.last_outflow = self.face_outflow();
        } else {
            // Heun: u1 = u + dt L(u), u_new = u + dt/2 (L(u) + L(u1))
            let first = self.ws.rates.clone();
            let start = self.u.clone();
            let out0 = self.face_outflow();
            self.apply(dt, &first);
            self.step += 1;
            let staged = self.check_state();
            self.step -= 1;
            staged?;
            self.evaluate(Some(dt));
            self.add_source();
            let out1 = self.face_outflow();
            self.u = start;
            let mut sum = std::mem::take(&mut self.ws.rates);
            for (s, f) in sum.iter_mut().zip(&first) {
                for c in 0..4 {
                    s[c] += f[c];
                }
            }
            self.apply(0.5 * dt, &sum);
            self.ws.rates = sum;
            self.last_outflow = 0.5 * (out0 + out1);
        }
        self.step += 1;
        self.last_dt = dt;
        self.check_state()?;
        Ok(StepRecord {
            step: self.step,
            residual,
            dt,
        })
    }

    fn check_state(&self) -> Result<()> {
        let lay = self.lay;
        let g = self.gamma;
        let u = &self.u;
        let bad = self.exec.map_indices(lay.ny, |j| {
            (0..lay.nx).find_map(|i| {
                let q = u[lay.at(i as isize, j as isize)];
                if !q.iter().all(|x| x.is_finite()) {
                    return Some((i, "non-finite state".to_string()));
                }
                let w = primitive(&q, g);
                if !(w[0] > 0.0) {
                    Some((i, format!("density {:e}", w[0])))
                } else if !(w[3] > 0.0) {
                    Some((i, format!("pressure {:e}", w[3])))
                } else {
                    None
                }
            })
        });
        match bad.into_iter().enumerate().find_map(|(j, b)| b.map(|(i, r)| (i, j, r))) {
            None => Ok(()),
            Some((i, j, reason)) => Err(Error::Divergence {
                scheme: self.scheme.label().to_string(),
                step: self.step,
                i,
                j,
                reason,
            }),
        }
    }
}

#[inline]
fn add(a: Q, b: Q) -> Q {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

/// Artificial-viscosity contribution to a face flux. `cells` are the four
/// cells straddling the face (two on each side, nearest in the middle) and
/// `speed` is the grid signal speed `h / dt` normal to the face, so the
/// viscosity adds `mu` times the second (or fourth) difference per step.
#[inline]
fn viscous_face(visc: Viscosity, cells: [&Q; 4], speed: f64) -> Q {
    let mut d = [0.0; 4];
    match visc {
        Viscosity::None => {}
        Viscosity::Second(mu) => {
            for c in 0..4 {
                d[c] = -mu * speed * (cells[2][c] - cells[1][c]);
            }
        }
        Viscosity::Fourth(mu) => {
            for c in 0..4 {
                d[c] = mu * speed * (cells[3][c] - 3.0 * cells[2][c] + 3.0 * cells[1][c] - cells[0][c]);
            }
        }
    }
    d
}

#[allow(clippy::too_many_arguments)]
fn compute_faces(
    scheme: SchemeId,
    limiter: super::Limiter,
    exec: Execution,
    grid: &Grid,
    g: f64,
    lay: &Layout,
    bc: &Boundary,
    u: &[Q],
    dt: f64,
    ws: &mut Workspace,
) {
    let lay = *lay;
    let nx = lay.nx as isize;
    let (hx, hy) = (grid.hx, grid.hy);
    let at = |i: isize, j: isize| lay.at(i, j);

    match scheme {
        SchemeId::S2H => {
            let pad = &mut ws.pad;
            exec.for_each_row(pad, lay.w, |jp, row| {
                let base = jp * lay.w;
                for (k, w) in row.iter_mut().enumerate() {
                    *w = primitive(&u[base + k], g);
                }
            });
        }
        SchemeId::MC | SchemeId::MC1 | SchemeId::MC2 | SchemeId::MC4 | SchemeId::LW => {
            let (fc, gc) = (&mut ws.fc, &mut ws.gc);
            exec.for_each_row(fc, lay.w, |jp, row| {
                let base = jp * lay.w;
                for (k, f) in row.iter_mut().enumerate() {
                    *f = physical_flux(&u[base + k], g);
                }
            });
            exec.for_each_row(gc, lay.w, |jp, row| {
                let base = jp * lay.w;
                for (k, f) in row.iter_mut().enumerate() {
                    *f = swap(physical_flux(&swap(u[base + k]), g));
                }
            });
        }
        SchemeId::S1 => {}
    }

    if scheme.is_maccormack() {
        let (fc, gc) = (&ws.fc, &ws.gc);
        exec.for_each_row(&mut ws.pad, lay.w, |jp, row| {
            if jp < GHOST || jp >= lay.ny + GHOST {
                return;
            }
            let j = jp as isize - GHOST as isize;
            for i in 0..nx {
                let k = at(i, j);
                let mut q = u[k];
                let dfx = fc[at(i + 1, j)];
                let dfx0 = fc[k];
                let dgy = gc[at(i, j + 1)];
                let dgy0 = gc[k];
                for c in 0..4 {
                    q[c] -= dt / hx * (dfx[c] - dfx0[c]) + dt / hy * (dgy[c] - dgy0[c]);
                }
                row[(i + GHOST as isize) as usize] = q;
            }
        });
        bc.fill(&lay, &mut ws.pad);
    }

    let visc = scheme.viscosity();
    let pad = &ws.pad;
    let (fc, gc) = (&ws.fc, &ws.gc);

    // x faces: row j, face index f in 0..=nx sits between cells f-1 and f.
    exec.for_each_row(&mut ws.fx, lay.nx + 1, |j, row| {
        let j = j as isize;
        for (f, out) in row.iter_mut().enumerate() {
            let f = f as isize;
            let (l, r) = (at(f - 1, j), at(f, j));
            let mut flux = match scheme {
                SchemeId::S1 => split_flux(&u[l], &u[r], g),
                SchemeId::S2H => {
                    let (wl, wr) = muscl_states([&pad[at(f - 2, j)], &pad[l], &pad[r], &pad[at(f + 1, j)]], limiter);
                    hllc(&wl, &wr, g)
                }
                SchemeId::LW => {
                    let mut half = [0.0; 4];
                    for c in 0..4 {
                        half[c] = 0.5 * (u[l][c] + u[r][c]) - 0.5 * dt / hx * (fc[r][c] - fc[l][c]);
                    }
                    physical_flux(&half, g)
                }
                _ => {
                    let a = fc[r];
                    let b = physical_flux(&pad[l], g);
                    [
                        0.5 * (a[0] + b[0]),
                        0.5 * (a[1] + b[1]),
                        0.5 * (a[2] + b[2]),
                        0.5 * (a[3] + b[3]),
                    ]
                }
            };
            if visc != Viscosity::None {
                let d = viscous_face(visc, [&u[at(f - 2, j)], &u[l], &u[r], &u[at(f + 1, j)]], hx / dt);
                flux = add(flux, d);
            }
            *out = flux;
        }
    });

    // y faces: face row f in 0..=ny sits between cell rows f-1 and f.
    exec.for_each_row(&mut ws.gy, lay.nx, |f, row| {
        let f = f as isize;
        for (i, out) in row.iter_mut().enumerate() {
            let i = i as isize;
            let (b, t) = (at(i, f - 1), at(i, f));
            let mut flux = match scheme {
                SchemeId::S1 => swap(split_flux(&swap(u[b]), &swap(u[t]), g)),
                SchemeId::S2H => {
                    let (wb, wt) = muscl_states(
                        [
                            &swap(pad[at(i, f - 2)]),
                            &swap(pad[b]),
                            &swap(pad[t]),
                            &swap(pad[at(i, f + 1)]),
                        ],
                        limiter,
                    );
                    swap(hllc(&wb, &wt, g))
                }
                SchemeId::LW => {
                    let mut half = [0.0; 4];
                    for c in 0..4 {
                        half[c] = 0.5 * (u[b][c] + u[t][c]) - 0.5 * dt / hy * (gc[t][c] - gc[b][c]);
                    }
                    swap(physical_flux(&swap(half), g))
                }
                _ => {
                    let a = gc[t];
                    let s = swap(physical_flux(&swap(pad[b]), g));
                    [
                        0.5 * (a[0] + s[0]),
                        0.5 * (a[1] + s[1]),
                        0.5 * (a[2] + s[2]),
                        0.5 * (a[3] + s[3]),
                    ]
                }
            };
            if visc != Viscosity::None {
                let d = viscous_face(visc, [&u[at(i, f - 2)], &u[b], &u[t], &u[at(i, f + 1)]], hy / dt);
                flux = add(flux, d);
            }
            *out = flux;
        }
    });
}

fn assemble(exec: Execution, grid: &Grid, lay: &Layout, ws: &mut Workspace) {
    let (nx, hx, hy) = (lay.nx, grid.hx, grid.hy);
    let (fx, gy) = (&ws.fx, &ws.gy);
    exec.for_each_row(&mut ws.rates, nx, |j, row| {
        for (i, r) in row.iter_mut().enumerate() {
            let (fl, fr) = (fx[j * (nx + 1) + i], fx[j * (nx + 1) + i + 1]);
            let (gb, gt) = (gy[j * nx + i], gy[(j + 1) * nx + i]);
            let mut q = [0.0; 4];
            for c in 0..4 {
                q[c] = -(fr[c] - fl[c]) / hx - (gt[c] - gb[c]) / hy;
            }
            *r = q;
        }
    });
}
