//! Scenario assembly, reports and the checks the CLI exposes.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, GradientSegment};
use crate::error::{Result, SgeError};
use crate::grid::Grid;
use crate::observables::{
    entanglement_entropy, peak_separation, position_density_z, semiclassical_segments, spin_rdm,
    DensityProfile,
};
use crate::oracle::{dense_hamiltonian, matrix_exponential, split_step_evolve, unitarity_defect, SampledSpinor};
use crate::propagator::{dense_factored_matrix, HybridState};
use crate::spin_algebra::{max_abs, SpinQN};
use crate::tolerances;
use crate::wavepacket::QuadExpPacket;
use crate::C64;

pub fn default_silver_config() -> ExperimentConfig {
    ExperimentConfig::silver()
}

/// Window of ±0.6 mm sampled with 4096 nodes, wide enough for both spin-1/2
/// beams at the magnet exit.
pub fn silver_grid() -> Grid {
    Grid::symmetric(6e-4, 4096).expect("static grid is valid")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Density,
    EntropyTimeline,
    CompareTable,
    BchCheck,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub cfg: ExperimentConfig,
    pub spin: SpinQN,
    pub initial_coeffs: Vec<C64>,
    pub segments: Vec<GradientSegment>,
    pub grid: Grid,
    pub oracle_steps: usize,
    pub entropy_samples: usize,
    pub outputs: Vec<Output>,
}

pub fn equal_superposition(spin: SpinQN) -> Vec<C64> {
    vec![C64::from(1.0 / (spin.dim() as f64).sqrt()); spin.dim()]
}

impl Scenario {
    /// Equal spin-1/2 superposition through the silver magnet.
    pub fn silver_sge() -> Self {
        let cfg = default_silver_config();
        let spin = SpinQN::half();
        Self {
            segments: vec![GradientSegment {
                beta: cfg.beta,
                duration: cfg.transit_time(),
            }],
            cfg,
            spin,
            initial_coeffs: equal_superposition(spin),
            grid: silver_grid(),
            oracle_steps: 4096,
            entropy_samples: 33,
            outputs: vec![Output::Density],
        }
    }

    pub fn total_duration(&self) -> f64 {
        self.segments.iter().map(|s| s.duration).sum()
    }

    pub fn validate(&self) -> Result<()> {
        self.cfg.validate()?;
        self.grid.validate()?;
        if self.initial_coeffs.len() != self.spin.dim() {
            return Err(SgeError::InvalidParameter(format!(
                "spin {} needs {} coefficients, got {}",
                self.spin,
                self.spin.dim(),
                self.initial_coeffs.len()
            )));
        }
        let w: f64 = self.initial_coeffs.iter().map(|c| c.norm_sqr()).sum();
        if (w - 1.0).abs() > 1e-10 {
            return Err(SgeError::InvalidParameter(format!("coefficients are not normalized: Σ|c|² = {w}")));
        }
        for seg in &self.segments {
            GradientSegment::new(seg.beta, seg.duration)?;
        }
        if self.oracle_steps == 0 {
            return Err(SgeError::InvalidParameter("oracle_steps must be >= 1".into()));
        }
        if self.entropy_samples < 2 {
            return Err(SgeError::InvalidParameter("entropy_samples must be >= 2".into()));
        }
        Ok(())
    }

    pub fn initial_state(&self) -> Result<HybridState> {
        HybridState::initial(&self.cfg, self.spin, self.initial_coeffs.clone())
    }

    pub fn final_state(&self) -> Result<HybridState> {
        self.initial_state()?.evolve_segments(&self.segments, &self.cfg)
    }

    pub fn wants(&self, output: Output) -> bool {
        self.outputs.contains(&output)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_scenario()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| SgeError::from(e).context(format!("reading {}", path.display())))?;
        Self::from_json(&text).map_err(|e| e.context(format!("parsing {}", path.display())))
    }
}

/// On-disk scenario. Every key is optional; missing keys take the silver
/// defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub mass_kg: Option<f64>,
    pub g_factor: Option<f64>,
    pub bohr_magneton_j_per_t: Option<f64>,
    pub hbar_j_s: Option<f64>,
    pub b0_tesla: Option<f64>,
    pub beta_tesla_per_m: Option<f64>,
    pub v0_m_per_s: Option<f64>,
    pub sigma_x_m: Option<f64>,
    pub sigma_y_m: Option<f64>,
    pub sigma_z_m: Option<f64>,
    pub magnet_length_m: Option<f64>,
    pub twice_s: Option<u32>,
    /// `[re, im]` per basis state, `m = s … −s`.
    pub coeffs: Option<Vec<[f64; 2]>>,
    pub segments: Option<Vec<SegmentFile>>,
    pub grid: Option<GridFile>,
    pub oracle_steps: Option<usize>,
    pub entropy_samples: Option<usize>,
    pub outputs: Option<Vec<Output>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentFile {
    pub beta_tesla_per_m: f64,
    pub duration_s: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridFile {
    pub z_min_m: f64,
    pub z_max_m: f64,
    pub n: usize,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        let base = Scenario::silver_sge();
        let d = base.cfg;
        let cfg = ExperimentConfig {
            mass: self.mass_kg.unwrap_or(d.mass),
            g_factor: self.g_factor.unwrap_or(d.g_factor),
            bohr_magneton: self.bohr_magneton_j_per_t.unwrap_or(d.bohr_magneton),
            hbar: self.hbar_j_s.unwrap_or(d.hbar),
            b0: self.b0_tesla.unwrap_or(d.b0),
            beta: self.beta_tesla_per_m.unwrap_or(d.beta),
            v0: self.v0_m_per_s.unwrap_or(d.v0),
            sigma_x: self.sigma_x_m.unwrap_or(d.sigma_x),
            sigma_y: self.sigma_y_m.unwrap_or(d.sigma_y),
            sigma_z: self.sigma_z_m.unwrap_or(d.sigma_z),
            magnet_length: self.magnet_length_m.unwrap_or(d.magnet_length),
        };
        cfg.validate()?;
        let spin = SpinQN::new(self.twice_s.unwrap_or(base.spin.twice_s()));
        let initial_coeffs = match self.coeffs {
            Some(c) => c.into_iter().map(|[re, im]| C64::new(re, im)).collect(),
            None => equal_superposition(spin),
        };
        let segments = match self.segments {
            Some(segs) => segs
                .into_iter()
                .map(|s| GradientSegment::new(s.beta_tesla_per_m, s.duration_s))
                .collect::<Result<_>>()?,
            None => vec![GradientSegment::new(cfg.beta, cfg.transit_time())?],
        };
        let grid = match self.grid {
            Some(g) => Grid::new(g.z_min_m, g.z_max_m, g.n)?,
            None => base.grid,
        };
        let sc = Scenario {
            cfg,
            spin,
            initial_coeffs,
            segments,
            grid,
            oracle_steps: self.oracle_steps.unwrap_or(base.oracle_steps),
            entropy_samples: self.entropy_samples.unwrap_or(base.entropy_samples),
            outputs: self.outputs.unwrap_or(base.outputs),
        };
        sc.validate()?;
        Ok(sc)
    }
}

/// Closed form vs split-step on the scenario grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OracleComparison {
    pub steps: usize,
    /// `‖p_oracle − p_closed‖₂ / ‖p_closed‖₂`.
    pub density_rel_l2: f64,
    /// Same for the spinor wavefunction, phases included.
    pub wavefunction_rel_l2: f64,
}

/// Integrates the scenario with the split-step oracle, distributing `steps`
/// over the segments in proportion to their durations.
pub fn oracle_final_state(sc: &Scenario, steps: usize) -> Result<SampledSpinor> {
    let total = sc.total_duration();
    let mut psi = SampledSpinor::from_hybrid(&sc.initial_state()?, &sc.grid);
    for seg in &sc.segments {
        if seg.duration == 0.0 {
            continue;
        }
        let n = ((steps as f64 * seg.duration / total).round() as usize).max(1);
        psi = split_step_evolve(&psi, seg.duration, n, &sc.cfg.with_beta(seg.beta))?;
    }
    Ok(psi)
}

pub fn compare_with_oracle(sc: &Scenario, steps: usize) -> Result<OracleComparison> {
    let closed = SampledSpinor::from_hybrid(&sc.final_state()?, &sc.grid);
    closed.check_boundary()?;
    let oracle = oracle_final_state(sc, steps).map_err(|e| e.context("split-step oracle"))?;
    let (pc, po) = (closed.density(), oracle.density());
    let num: f64 = pc.iter().zip(&po).map(|(a, b)| (a - b).powi(2)).sum();
    let den: f64 = pc.iter().map(|a| a * a).sum();
    Ok(OracleComparison {
        steps,
        density_rel_l2: (num / den).sqrt(),
        wavefunction_rel_l2: closed.rel_l2_distance(&oracle)?,
    })
}

/// Dense factorized propagator against `expm(−iH_e t/ħ)` on a periodic grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BchCheck {
    pub n: usize,
    pub twice_s: u32,
    pub t: f64,
    /// `max |U₁U₂ₐU₂ᵦU₂ᵧ − expm(−iH_e t/ħ)|` over all matrix entries.
    pub full_max_error: f64,
    /// Same difference applied to unit-norm Gaussian probes that are resolved
    /// by the grid and stay away from the periodic seam.
    pub resolved_max_error: f64,
    pub factored_unitarity: f64,
    pub exact_unitarity: f64,
}

impl BchCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.full_max_error <= tol
    }
}

/// Desk-scale factorization check in scaled units (`ħ = M = 1`).
pub fn bch_check(grid: &Grid, spin: SpinQN, t: f64, cfg: &ExperimentConfig) -> Result<BchCheck> {
    let factored = dense_factored_matrix(grid, t, cfg, spin)?;
    let h = dense_hamiltonian(grid, cfg, spin)?;
    let exact = matrix_exponential(&h, C64::new(0.0, -t / cfg.hbar))?;
    let diff = &factored - &exact;

    let n = grid.n;
    let width = grid.length() / 32.0;
    let k_step = 1.5 / width;
    let mut resolved: f64 = 0.0;
    for center in [-0.125, 0.0, 0.125].map(|f| f * grid.length() + 0.5 * (grid.z_min + grid.z_max)) {
        for k0 in [-k_step, 0.0, k_step] {
            let probe = QuadExpPacket::from_gaussian(width, center, k0)?.sample(grid);
            let scale = probe.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            for i in 0..spin.dim() {
                let mut v = DVector::zeros(n * spin.dim());
                for (j, p) in probe.iter().enumerate() {
                    v[i * n + j] = p / scale;
                }
                let err = (&diff * v).iter().map(|z| z.norm()).fold(0.0, f64::max);
                resolved = resolved.max(err);
            }
        }
    }
    Ok(BchCheck {
        n,
        twice_s: spin.twice_s(),
        t,
        full_max_error: max_abs(&diff),
        resolved_max_error: resolved,
        factored_unitarity: unitarity_defect(&factored),
        exact_unitarity: unitarity_defect(&exact),
    })
}

/// Scaled-unit setup of the factorization check: `ħ = M = γ = 1`, `B₀ = 1`,
/// `β = 0.5`, `t = 0.7` on `[−16, 16)`.
pub fn default_bch_setup(n: usize) -> Result<(Grid, ExperimentConfig, f64)> {
    Ok((Grid::symmetric(16.0, n)?, ExperimentConfig::scaled(1.0, 1.0, 0.5), 0.7))
}

/// Segments cut off at time `t`.
pub fn truncate_segments(segments: &[GradientSegment], t: f64) -> Vec<GradientSegment> {
    let mut left = t;
    let mut out = Vec::new();
    for seg in segments {
        if left <= 0.0 {
            break;
        }
        let d = seg.duration.min(left);
        out.push(GradientSegment { beta: seg.beta, duration: d });
        left -= d;
    }
    out
}

/// Entropy of the spin reduction at `samples` evenly spaced times.
pub fn entropy_timeline(sc: &Scenario, samples: usize) -> Result<Vec<(f64, f64)>> {
    if samples < 2 {
        return Err(SgeError::InvalidParameter("entropy timeline needs >= 2 samples".into()));
    }
    let initial = sc.initial_state()?;
    let total = sc.total_duration();
    (0..samples)
        .map(|k| {
            let t = total * k as f64 / (samples - 1) as f64;
            let st = initial.evolve_segments(&truncate_segments(&sc.segments, t), &sc.cfg)?;
            Ok((t, entanglement_entropy(&spin_rdm(&st)?)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub spin: String,
    pub transit_time_s: f64,
    pub total_duration_s: f64,
    pub m_values: Vec<f64>,
    /// Centroid of each component relative to field-free flight, basis order.
    pub deflection_m: Vec<f64>,
    pub semiclassical_deflection_m: Vec<f64>,
    /// `⟨p_z⟩` change per component, kg·m/s.
    pub momentum_kick: Vec<f64>,
    pub peak_separation_m: Option<f64>,
    pub entropy_nats: f64,
    /// Relative L2 density error of the closed form against split-step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_l2_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleComparison>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_timeline: Option<Vec<(f64, f64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bch: Option<Vec<BchCheck>>,
    #[serde(skip)]
    pub density: DensityProfile,
}

impl Report {
    fn check_finite(&self) -> Result<()> {
        let scalars = [self.transit_time_s, self.total_duration_s, self.entropy_nats]
            .into_iter()
            .chain(self.deflection_m.iter().copied())
            .chain(self.semiclassical_deflection_m.iter().copied())
            .chain(self.momentum_kick.iter().copied())
            .chain(self.peak_separation_m)
            .chain(self.oracle_l2_error);
        for v in scalars {
            if !v.is_finite() {
                return Err(SgeError::NonFinite);
            }
        }
        Ok(())
    }

    /// Failed tolerance checks, one message each.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(err) = self.oracle_l2_error {
            if err > tolerances::ORACLE_DENSITY_REL_L2 {
                out.push(format!(
                    "oracle density error {err:.3e} > {:.0e}",
                    tolerances::ORACLE_DENSITY_REL_L2
                ));
            }
        }
        for b in self.bch.iter().flatten() {
            if !b.passes(tolerances::BCH_MAX_ENTRY) {
                out.push(format!(
                    "BCH full-matrix error {:.3e} > {:.0e} (2s = {})",
                    b.full_max_error,
                    tolerances::BCH_MAX_ENTRY,
                    b.twice_s
                ));
            }
        }
        out
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(&mut w, self)?;
        writeln!(w)?;
        Ok(())
    }
}

/// Writes `z_m,p_per_m` rows with 15 significant digits.
pub fn write_density_csv(path: impl AsRef<Path>, profile: &DensityProfile) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "z_m,p_per_m")?;
    for (j, p) in profile.values.iter().enumerate() {
        writeln!(w, "{:.14e},{:.14e}", profile.grid.node(j), p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn run(sc: &Scenario) -> Result<Report> {
    sc.validate()?;
    let initial = sc.initial_state()?;
    let fin = initial.evolve_segments(&sc.segments, &sc.cfg)?;
    let total = sc.total_duration();
    let free = initial.apply_u2a(total, &sc.cfg)?;

    let m_values: Vec<f64> = sc.spin.m_values().collect();
    let deflection_m = fin
        .z_packets
        .iter()
        .zip(&free.z_packets)
        .map(|(p, f)| p.center() - f.center())
        .collect();
    let semi: Vec<(f64, f64)> = m_values
        .iter()
        .map(|&m| semiclassical_segments(&sc.cfg, &sc.segments, m))
        .collect();
    let momentum_kick = fin
        .z_packets
        .iter()
        .zip(&initial.z_packets)
        .map(|(p, q)| sc.cfg.hbar * (p.wavenumber() - q.wavenumber()))
        .collect();

    let density = position_density_z(&fin, &sc.grid).map_err(|e| e.context("final density"))?;
    let peak_separation_m = match peak_separation(&density) {
        Ok(d) => Some(d),
        Err(SgeError::Unresolved) => None,
        Err(e) => return Err(e),
    };
    let entropy_nats = entanglement_entropy(&spin_rdm(&fin)?)?;

    let oracle = if sc.wants(Output::CompareTable) && total > 0.0 {
        Some(compare_with_oracle(sc, sc.oracle_steps)?)
    } else {
        None
    };
    let entropy_timeline = if sc.wants(Output::EntropyTimeline) {
        Some(entropy_timeline(sc, sc.entropy_samples)?)
    } else {
        None
    };
    let bch = if sc.wants(Output::BchCheck) {
        let (grid, cfg, t) = default_bch_setup(64)?;
        Some(
            [SpinQN::half(), SpinQN::new(2)]
                .into_iter()
                .map(|s| bch_check(&grid, s, t, &cfg))
                .collect::<Result<Vec<_>>>()?,
        )
    } else {
        None
    };

    let report = Report {
        spin: sc.spin.to_string(),
        transit_time_s: sc.cfg.transit_time(),
        total_duration_s: total,
        m_values,
        deflection_m,
        semiclassical_deflection_m: semi.iter().map(|s| s.0).collect(),
        momentum_kick,
        peak_separation_m,
        entropy_nats,
        oracle_l2_error: oracle.map(|o| o.density_rel_l2),
        oracle,
        entropy_timeline,
        bch,
        density,
    };
    report.check_finite()?;
    Ok(report)
}
