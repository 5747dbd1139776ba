//! Time-series output types shared by every solver.

use num_complex::Complex64;

use crate::model::{BlockDensity, CouplingProfile};
use crate::Mat2;

/// Which solver produced a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Exact,
    Tcl2,
    Tcl2Mod,
    LargeN,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Exact, Method::Tcl2, Method::Tcl2Mod, Method::LargeN];

    pub fn label(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::Tcl2 => "tcl2",
            Method::Tcl2Mod => "tcl2mod",
            Method::LargeN => "largen",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "exact" => Ok(Method::Exact),
            "tcl2" => Ok(Method::Tcl2),
            "tcl2mod" => Ok(Method::Tcl2Mod),
            "largen" => Ok(Method::LargeN),
            other => Err(format!(
                "unknown method `{other}` (expected exact, tcl2, tcl2mod or largen)"
            )),
        }
    }
}

/// Time series of the rotating-frame coherence C(t) and population P_+(t).
///
/// Methods that do not produce a coherence (the large-N population formula)
/// fill `coherence_re`/`coherence_im` with NaN.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub times: Vec<f64>,
    pub coherence_re: Vec<f64>,
    pub coherence_im: Vec<f64>,
    pub population: Vec<f64>,
    pub method: Method,
    pub fingerprint: u64,
}

impl TrajectoryRecord {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Internal consistency: equal vector lengths, populations in [0, 1]
    /// within tolerance, times ascending.
    pub fn validate(&self) -> Result<(), String> {
        let n = self.times.len();
        if self.coherence_re.len() != n
            || self.coherence_im.len() != n
            || self.population.len() != n
        {
            return Err("vector lengths differ".into());
        }
        if self.times.windows(2).any(|w| w[1] < w[0]) {
            return Err("times not ascending".into());
        }
        for &p in &self.population {
            if !(-1e-10..=1.0 + 1e-10).contains(&p) {
                return Err(format!("population {p} outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Trajectory of the full block family, in the solver's interaction picture.
#[derive(Debug, Clone)]
pub struct BlockTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<BlockDensity>,
}

impl BlockTrajectory {
    /// P_+(t) (frame independent).
    pub fn population(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.population()).collect()
    }

    /// Per-sector populations (p_m^+, p_m^-) at step `i`, ascending m.
    pub fn sector_populations(&self, i: usize) -> Vec<(f64, f64)> {
        self.states[i]
            .blocks()
            .iter()
            .map(|b| (b[(0, 0)].re, b[(1, 1)].re))
            .collect()
    }

    /// Per-sector interaction-picture coherences <+|rho_m|-> at step `i`.
    pub fn sector_coherences(&self, i: usize) -> Vec<Complex64> {
        self.states[i].blocks().iter().map(|b| b[(0, 1)]).collect()
    }

    /// Total trace at each step.
    pub fn total_traces(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.total_trace()).collect()
    }
}

/// Deterministic 64-bit FNV-1a fingerprint of a model and its initial state.
pub fn model_fingerprint(profile: &CouplingProfile, initial: &BlockDensity) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(profile.n_bath() as u64);
    h.write_f64(profile.omega0());
    h.write_f64(profile.alpha0());
    h.write_f64(profile.k0());
    h.write_f64(profile.exponent());
    for &a in profile.alphas() {
        h.write_f64(a);
    }
    for b in initial.blocks() {
        write_mat2(&mut h, b);
    }
    h.finish()
}

/// Fingerprint for solvers whose initial state is implied (|+><+| with the
/// unpolarized bath) rather than held as blocks.
pub fn profile_fingerprint(profile: &CouplingProfile, tag: &str) -> u64 {
    let mut h = Fnv::new();
    h.write_u64(profile.n_bath() as u64);
    h.write_f64(profile.omega0());
    h.write_f64(profile.alpha0());
    h.write_f64(profile.k0());
    h.write_f64(profile.exponent());
    for &a in profile.alphas() {
        h.write_f64(a);
    }
    for byte in tag.bytes() {
        h.write_u8(byte);
    }
    h.finish()
}

fn write_mat2(h: &mut Fnv, m: &Mat2) {
    for idx in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        h.write_f64(m[idx].re);
        h.write_f64(m[idx].im);
    }
}

/// Minimal FNV-1a, fixed offsets, stable across runs and platforms.
struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write_u8(&mut self, b: u8) {
        self.0 ^= u64::from(b);
        self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
    }

    fn write_u64(&mut self, v: u64) {
        for b in v.to_le_bytes() {
            self.write_u8(b);
        }
    }

    fn write_f64(&mut self, v: f64) {
        self.write_u64(v.to_bits());
    }

    fn finish(&self) -> u64 {
        self.0
    }
}
