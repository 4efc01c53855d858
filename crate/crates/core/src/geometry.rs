//! Domain description, radial meshes and quadrature.
//!
//! The domain is fixed by four numbers: the two circle radii `R0 < R1` and
//! the physical constants `d`, `delta`, `kappa`. The natural measure of the
//! coupled problem weighs the bulk by area and the two boundary circles by
//! arc length, so the total measure of the closed annulus is
//! `pi (R1^2 - R0^2) + 2 pi (R0 + R1)`.
//!
//! All discrete structure lives on the radial interval `[R0, R1]`: angular
//! directions are handled analytically per Fourier mode.

use crate::error::CoreError;
use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::path::Path;

/// Angular wavenumber. Mode 0 is the radially symmetric branch.
pub type ModeIndex = usize;

/// Physical and discretization parameters of a run.
///
/// All fields are mandatory in config files; there are no built-in defaults
/// for physics constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainConfig {
    /// Inner radius, must be positive (the annulus never degenerates to a disk).
    pub r0: f64,
    /// Outer radius, must exceed `r0`.
    pub r1: f64,
    /// Bulk diffusion coefficient.
    pub d: f64,
    /// Surface diffusion coefficient.
    pub delta: f64,
    /// Robin coupling constant between trace and surface unknown.
    pub kappa: f64,
    /// Number of radial elements.
    pub n_elem: usize,
    /// Largest angular mode carried by a state.
    pub m_max: usize,
    /// Gauss points per element.
    pub quad_order: usize,
}

/// Optional time-stepping defaults a config file may carry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionDefaults {
    pub t_final: Option<f64>,
    pub dt: Option<f64>,
    pub theta: Option<f64>,
}

/// A fully parsed config file: domain parameters plus evolution defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub evolution: EvolutionDefaults,
}

impl DomainConfig {
    /// Checks every admissibility condition; returns the first violation.
    pub fn validate(&self) -> Result<(), CoreError> {
        if !(self.r0.is_finite() && self.r0 > 0.0) {
            return Err(CoreError::config(format!(
                "R0 must be finite and positive, got {}",
                self.r0
            )));
        }
        if !(self.r1.is_finite() && self.r1 > self.r0) {
            return Err(CoreError::config(format!(
                "R1 must exceed R0, got R0 = {}, R1 = {}",
                self.r0, self.r1
            )));
        }
        for (name, v) in [("d", self.d), ("delta", self.delta), ("kappa", self.kappa)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CoreError::config(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        if self.n_elem < 2 {
            return Err(CoreError::config(format!(
                "n_elem must be at least 2, got {}",
                self.n_elem
            )));
        }
        if self.quad_order < 4 {
            return Err(CoreError::config(format!(
                "quad_order must be at least 4, got {}",
                self.quad_order
            )));
        }
        Ok(())
    }

    /// Total measure of the closed annulus: bulk area plus the length of the
    /// two boundary circles.
    pub fn mu_total(&self) -> f64 {
        use std::f64::consts::PI;
        PI * (self.r1 * self.r1 - self.r0 * self.r0) + 2.0 * PI * (self.r0 + self.r1)
    }

    /// Width of the radial interval.
    pub fn width(&self) -> f64 {
        self.r1 - self.r0
    }

    /// Stable-within-a-process hash used to detect mixing of states built
    /// from different configs.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for v in [self.r0, self.r1, self.d, self.delta, self.kappa] {
            v.to_bits().hash(&mut h);
        }
        (self.n_elem, self.m_max, self.quad_order).hash(&mut h);
        h.finish()
    }
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, CoreError> {
        let text = std::fs::read_to_string(path)?;
        parse_run_config(&text)
    }
}

/// Parses a plain `key = value` config file.
///
/// Mandatory keys: `R0 R1 d delta kappa n_elem m_max quad_order`.
/// Optional keys: `t_final dt theta`. Blank lines and `#` comments are
/// ignored; anything else, including unknown or repeated keys, is rejected
/// with the offending line number.
pub fn parse_run_config(text: &str) -> Result<RunConfig, CoreError> {
    let mut r0 = None;
    let mut r1 = None;
    let mut d = None;
    let mut delta = None;
    let mut kappa = None;
    let mut n_elem = None;
    let mut m_max = None;
    let mut quad_order = None;
    let mut ev = EvolutionDefaults::default();

    fn set<T>(slot: &mut Option<T>, value: T, key: &str, line: usize) -> Result<(), CoreError> {
        if slot.is_some() {
            return Err(CoreError::ConfigLine {
                line,
                msg: format!("duplicate key `{key}`"),
            });
        }
        *slot = Some(value);
        Ok(())
    }

    fn float(value: &str, key: &str, line: usize) -> Result<f64, CoreError> {
        value.parse::<f64>().map_err(|_| CoreError::ConfigLine {
            line,
            msg: format!("value for `{key}` is not a number: `{value}`"),
        })
    }

    fn integer(value: &str, key: &str, line: usize) -> Result<usize, CoreError> {
        value.parse::<usize>().map_err(|_| CoreError::ConfigLine {
            line,
            msg: format!("value for `{key}` is not a non-negative integer: `{value}`"),
        })
    }

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (key, value) = trimmed.split_once('=').ok_or(CoreError::ConfigLine {
            line,
            msg: format!("expected `key = value`, got `{trimmed}`"),
        })?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "R0" => set(&mut r0, float(value, key, line)?, key, line)?,
            "R1" => set(&mut r1, float(value, key, line)?, key, line)?,
            "d" => set(&mut d, float(value, key, line)?, key, line)?,
            "delta" => set(&mut delta, float(value, key, line)?, key, line)?,
            "kappa" => set(&mut kappa, float(value, key, line)?, key, line)?,
            "n_elem" => set(&mut n_elem, integer(value, key, line)?, key, line)?,
            "m_max" => set(&mut m_max, integer(value, key, line)?, key, line)?,
            "quad_order" => set(&mut quad_order, integer(value, key, line)?, key, line)?,
            "t_final" => {
                let mut slot = None;
                set(&mut slot, float(value, key, line)?, key, line)?;
                if ev.t_final.replace(slot.unwrap()).is_some() {
                    return Err(CoreError::ConfigLine {
                        line,
                        msg: "duplicate key `t_final`".into(),
                    });
                }
            }
            "dt" => {
                if ev.dt.replace(float(value, key, line)?).is_some() {
                    return Err(CoreError::ConfigLine {
                        line,
                        msg: "duplicate key `dt`".into(),
                    });
                }
            }
            "theta" => {
                if ev.theta.replace(float(value, key, line)?).is_some() {
                    return Err(CoreError::ConfigLine {
                        line,
                        msg: "duplicate key `theta`".into(),
                    });
                }
            }
            _ => {
                return Err(CoreError::ConfigLine {
                    line,
                    msg: format!("unknown key `{key}`"),
                })
            }
        }
    }

    let require = |name: &str, v: Option<f64>| {
        v.ok_or_else(|| CoreError::config(format!("missing mandatory key `{name}`")))
    };
    let require_int = |name: &str, v: Option<usize>| {
        v.ok_or_else(|| CoreError::config(format!("missing mandatory key `{name}`")))
    };

    let domain = DomainConfig {
        r0: require("R0", r0)?,
        r1: require("R1", r1)?,
        d: require("d", d)?,
        delta: require("delta", delta)?,
        kappa: require("kappa", kappa)?,
        n_elem: require_int("n_elem", n_elem)?,
        m_max: require_int("m_max", m_max)?,
        quad_order: require_int("quad_order", quad_order)?,
    };
    domain.validate()?;
    Ok(RunConfig {
        domain,
        evolution: ev,
    })
}

/// Symbol of the Laplace-Beltrami operator of a circle of the given radius
/// on the angular mode `m`: applying it to `exp(i m theta)` multiplies by
/// `-m^2 / radius^2`.
pub fn laplace_beltrami_symbol(m: ModeIndex, radius: f64) -> f64 {
    let mf = m as f64;
    -(mf * mf) / (radius * radius)
}

/// Gauss-Legendre rule on `[-1, 1]`.
///
/// Nodes are Newton-refined roots of the Legendre polynomial; the returned
/// arrays are exactly symmetric about zero so that mirrored integrands
/// cancel exactly.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, p1) = legendre_pair(n, x);
            dp = n as f64 * (x * p - p1) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        let (_, _) = legendre_pair(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // The guess above starts from +1 side: i = 0 is the largest root.
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
        nodes[i] = -x;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, p1) = legendre_pair(n, 0.0);
        let dp = n as f64 * (0.0 - p1) / (-1.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}

/// Evaluates `(P_n(x), P_{n-1}(x))` by the three-term recurrence.
fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    (p, p_prev)
}

/// A one-dimensional mesh of the radial interval with a ready-to-use
/// composite Gauss rule.
///
/// Quadrature points are strictly interior to each element, hence strictly
/// inside `(R0, R1)`; weights already include the element Jacobian.
#[derive(Debug, Clone)]
pub struct RadialMesh {
    nodes: Vec<f64>,
    quad_order: usize,
    /// Per-element quadrature points, flattened: `points[e * q + i]`.
    points: Vec<f64>,
    /// Matching weights, scaled by the element half-width.
    weights: Vec<f64>,
}

impl RadialMesh {
    /// Builds a mesh on an explicit node vector (graded meshes enter here).
    pub fn from_nodes(nodes: Vec<f64>, quad_order: usize) -> Result<Self, CoreError> {
        if nodes.len() < 3 {
            return Err(CoreError::config(
                "a radial mesh needs at least 2 elements".to_string(),
            ));
        }
        if quad_order < 4 {
            return Err(CoreError::config(format!(
                "quad_order must be at least 4, got {quad_order}"
            )));
        }
        if !nodes.windows(2).all(|w| w[1] > w[0]) {
            return Err(CoreError::config(
                "mesh nodes must be strictly increasing".to_string(),
            ));
        }
        let (gx, gw) = gauss_legendre(quad_order);
        let n_elem = nodes.len() - 1;
        let mut points = Vec::with_capacity(n_elem * quad_order);
        let mut weights = Vec::with_capacity(n_elem * quad_order);
        for e in 0..n_elem {
            let (ra, rb) = (nodes[e], nodes[e + 1]);
            let half = 0.5 * (rb - ra);
            let mid = 0.5 * (ra + rb);
            for i in 0..quad_order {
                points.push(mid + half * gx[i]);
                weights.push(half * gw[i]);
            }
        }
        Ok(RadialMesh {
            nodes,
            quad_order,
            points,
            weights,
        })
    }

    pub fn n_elem(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn quad_order(&self) -> usize {
        self.quad_order
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn r0(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r1(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Element endpoints.
    pub fn span(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Quadrature points of element `e` (global coordinates).
    pub fn quad_points(&self, e: usize) -> &[f64] {
        &self.points[e * self.quad_order..(e + 1) * self.quad_order]
    }

    /// Quadrature weights of element `e`, Jacobian included.
    pub fn quad_weights(&self, e: usize) -> &[f64] {
        &self.weights[e * self.quad_order..(e + 1) * self.quad_order]
    }

    /// Index of the element containing `r` (boundary points go to the
    /// adjacent element, values outside are clamped).
    pub fn element_of(&self, r: f64) -> usize {
        let n = self.n_elem();
        match self
            .nodes
            .binary_search_by(|x| x.partial_cmp(&r).expect("non-finite radius"))
        {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        }
    }

    /// Composite quadrature of an arbitrary radial integrand.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for (p, w) in self.points.iter().zip(&self.weights) {
            acc += w * f(*p);
        }
        acc
    }
}

/// Uniform mesh over `[R0, R1]` as prescribed by the config.
pub fn build_radial_mesh(config: &DomainConfig) -> Result<RadialMesh, CoreError> {
    config.validate()?;
    let n = config.n_elem;
    let h = (config.r1 - config.r0) / n as f64;
    let mut nodes: Vec<f64> = (0..=n).map(|i| config.r0 + i as f64 * h).collect();
    // Pin the last node: accumulated rounding must not move the outer circle.
    nodes[n] = config.r1;
    RadialMesh::from_nodes(nodes, config.quad_order)
}
