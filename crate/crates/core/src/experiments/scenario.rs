use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::integrators::{StepSchedule, Thermostat};
use crate::state::{ExternalField, Regime};

/// Version of the scenario file layout. Bump when keys change meaning.
pub const SCENARIO_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Langevin1d,
    LjEos,
    Scaling,
    EstimatorChecks,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Langevin1d => "langevin1d",
            Experiment::LjEos => "lj-eos",
            Experiment::Scaling => "scaling",
            Experiment::EstimatorChecks => "estimator-checks",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelChoice {
    /// `K(x) = x / (1 + |x|^2)`
    Bounded,
    LennardJones,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitChoice {
    /// i.i.d. uniform on `[-half_width, half_width]^dim`
    Uniform { half_width: f64 },
    /// simple cubic lattice filling the periodic box
    Lattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemBlock {
    pub n: usize,
    pub dim: usize,
    /// Number density of a periodic box. Absent for systems in free space.
    pub density: Option<f64>,
    pub kernel: KernelChoice,
    pub regime: Regime,
    pub external: ExternalField,
    pub init: InitChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorBlock {
    pub schedule: StepSchedule,
    pub thermostat: Thermostat,
    pub beta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbmBlock {
    pub enabled: bool,
    pub p: usize,
    /// Split singular kernels into a cell-list part and a batched part.
    pub splitting: bool,
}

/// Burn-in, then samples every `sample_every` time units (every iteration
/// when absent) until `t_end` or until `samples` samples were taken.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub burn_in: f64,
    pub t_end: Option<f64>,
    pub sample_every: Option<f64>,
    pub samples: Option<usize>,
    pub seed: u64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub dir: PathBuf,
    /// Also write every equilibrium sample, not just histograms.
    pub samples: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HistogramSpec {
    pub lo: f64,
    pub hi: f64,
    pub bins: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrongSweep {
    pub sizes: Vec<usize>,
    pub taus: Vec<f64>,
    pub reference_tau: f64,
    /// Time at which trajectories are compared.
    pub t: f64,
    pub repetitions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Langevin1dStudy {
    /// Step sizes of the equilibrium runs.
    pub taus: Vec<f64>,
    /// Step size of the full-interaction reference run.
    pub reference_tau: f64,
    /// Drive every run from one fine-grid noise tape at `reference_tau`.
    pub coupled: bool,
    pub histogram: HistogramSpec,
    pub strong: StrongSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EosStudy {
    pub densities: Vec<f64>,
    pub thermostats: Vec<Thermostat>,
    /// Also run every point without random batches.
    pub oracle: bool,
    /// Keep every `trace_every`-th temperature sample in the trace table.
    pub trace_every: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingStudy {
    pub sizes: Vec<usize>,
    pub density: f64,
    /// Time evolved with split random batches before any timing, so that
    /// every size is measured on a melted configuration.
    pub melt_time: f64,
    pub warmup_steps: usize,
    /// Each timing block runs at least this many steps and this long.
    pub min_steps: usize,
    pub min_seconds: f64,
    /// Per-step time is the fastest of this many blocks.
    pub blocks: usize,
    /// Also time the full pair sum.
    pub full_baseline: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorStudy {
    /// `(N, p)` pairs checked over every partition.
    pub exhaustive: Vec<(usize, usize)>,
    pub position_sets: usize,
    pub mc_n: usize,
    pub mc_p: usize,
    pub mc_draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Study {
    Langevin1d(Langevin1dStudy),
    LjEos(EosStudy),
    Scaling(ScalingStudy),
    EstimatorChecks(EstimatorStudy),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    pub name: String,
    pub system: SystemBlock,
    pub integrator: IntegratorBlock,
    pub rbm: RbmBlock,
    pub run: RunBlock,
    pub output: OutputBlock,
    pub study: Study,
}

fn pow2(e: i32) -> f64 {
    2f64.powi(e)
}

impl Scenario {
    /// Desk-scale defaults for one experiment family.
    pub fn default_for(experiment: Experiment) -> Self {
        let output = OutputBlock {
            dir: PathBuf::from("out"),
            samples: false,
        };
        let rbm = RbmBlock {
            enabled: true,
            p: 2,
            splitting: true,
        };
        let lj_system = |n, density| SystemBlock {
            n,
            dim: 3,
            density: Some(density),
            kernel: KernelChoice::LennardJones,
            regime: Regime::Molecular,
            external: ExternalField::None,
            init: InitChoice::Lattice,
        };
        match experiment {
            Experiment::Langevin1d => Scenario {
                version: SCENARIO_VERSION,
                name: "langevin1d".into(),
                system: SystemBlock {
                    n: 100,
                    dim: 1,
                    density: None,
                    kernel: KernelChoice::Bounded,
                    regime: Regime::MeanField,
                    external: ExternalField::Harmonic { lambda: 2.5 },
                    init: InitChoice::Uniform { half_width: 0.5 },
                },
                integrator: IntegratorBlock {
                    schedule: StepSchedule::Fixed { tau: 0.02 },
                    thermostat: Thermostat::Langevin { gamma: 2.5 },
                    beta: 1.0,
                },
                rbm,
                run: RunBlock {
                    burn_in: 50.0,
                    t_end: Some(150.0),
                    sample_every: Some(0.5),
                    samples: None,
                    seed: 1,
                    repetitions: 1,
                },
                output,
                study: Study::Langevin1d(Langevin1dStudy {
                    taus: vec![0.5, 0.25, 0.125],
                    reference_tau: pow2(-8),
                    coupled: true,
                    histogram: HistogramSpec {
                        lo: -3.0,
                        hi: 3.0,
                        bins: 24,
                    },
                    strong: StrongSweep {
                        sizes: vec![50],
                        taus: (4..=8).map(|e| pow2(-e)).collect(),
                        reference_tau: pow2(-14),
                        t: 2.0,
                        repetitions: 8,
                    },
                }),
            },
            Experiment::LjEos => Scenario {
                version: SCENARIO_VERSION,
                name: "lj-eos".into(),
                system: lj_system(100, 0.5),
                integrator: IntegratorBlock {
                    schedule: StepSchedule::Fixed { tau: 0.001 },
                    thermostat: Thermostat::Langevin { gamma: 10.0 },
                    beta: 0.5,
                },
                rbm,
                run: RunBlock {
                    burn_in: 50.0,
                    t_end: None,
                    sample_every: Some(0.01),
                    samples: Some(10_000),
                    seed: 1,
                    repetitions: 1,
                },
                output,
                study: Study::LjEos(EosStudy {
                    densities: vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
                    thermostats: vec![Thermostat::Andersen { nu: 10.0 }, Thermostat::Langevin { gamma: 10.0 }],
                    oracle: false,
                    trace_every: 100,
                }),
            },
            Experiment::Scaling => Scenario {
                version: SCENARIO_VERSION,
                name: "scaling".into(),
                system: lj_system(512, 0.5),
                integrator: IntegratorBlock {
                    schedule: StepSchedule::Fixed { tau: pow2(-10) },
                    thermostat: Thermostat::Langevin { gamma: 10.0 },
                    beta: 0.5,
                },
                rbm,
                run: RunBlock {
                    burn_in: 0.0,
                    t_end: None,
                    sample_every: None,
                    samples: None,
                    seed: 1,
                    repetitions: 1,
                },
                output,
                study: Study::Scaling(ScalingStudy {
                    sizes: vec![512, 1024, 2048, 4096],
                    density: 0.5,
                    melt_time: 0.5,
                    warmup_steps: 5,
                    min_steps: 5,
                    min_seconds: 0.2,
                    blocks: 3,
                    full_baseline: true,
                }),
            },
            Experiment::EstimatorChecks => Scenario {
                version: SCENARIO_VERSION,
                name: "estimator-checks".into(),
                system: SystemBlock {
                    n: 20,
                    dim: 1,
                    density: None,
                    kernel: KernelChoice::Bounded,
                    regime: Regime::MeanField,
                    external: ExternalField::None,
                    init: InitChoice::Uniform { half_width: 2.0 },
                },
                integrator: IntegratorBlock {
                    schedule: StepSchedule::Fixed { tau: 0.02 },
                    thermostat: Thermostat::None,
                    beta: 1.0,
                },
                rbm: RbmBlock {
                    enabled: true,
                    p: 4,
                    splitting: false,
                },
                run: RunBlock {
                    burn_in: 0.0,
                    t_end: None,
                    sample_every: None,
                    samples: None,
                    seed: 1,
                    repetitions: 1,
                },
                output,
                study: Study::EstimatorChecks(EstimatorStudy {
                    exhaustive: vec![(4, 2), (6, 2), (4, 4), (6, 3)],
                    position_sets: 20,
                    mc_n: 20,
                    mc_p: 4,
                    mc_draws: 100_000,
                }),
            },
        }
    }

    /// Switch to long runs: large sample counts and fine reference steps.
    /// Expect hours of CPU time.
    pub fn paper_scale(&mut self) {
        match &mut self.study {
            Study::Langevin1d(s) => {
                self.system.n = 500;
                self.run.t_end = Some(300.0);
                s.taus = vec![1.0, 0.5, 0.25, 0.125];
                s.reference_tau = pow2(-10);
                s.strong.sizes = vec![50, 500, 2000];
                s.strong.reference_tau = pow2(-18);
            }
            Study::LjEos(_) => {
                self.run.samples = Some(100_000);
            }
            Study::Scaling(s) => {
                s.sizes = vec![500, 1000, 2000, 4000, 8000, 16000];
                s.min_seconds = 2.0;
            }
            Study::EstimatorChecks(s) => {
                s.position_sets = 200;
                s.mc_draws = 1_000_000;
            }
        }
    }

    pub fn experiment(&self) -> Experiment {
        match self.study {
            Study::Langevin1d(_) => Experiment::Langevin1d,
            Study::LjEos(_) => Experiment::LjEos,
            Study::Scaling(_) => Experiment::Scaling,
            Study::EstimatorChecks(_) => Experiment::EstimatorChecks,
        }
    }

    /// Overlay a TOML document on the defaults of `experiment`. Keys absent
    /// from the document keep their default values.
    pub fn from_toml(experiment: Experiment, text: &str) -> Result<Self> {
        Scenario::default_for(experiment).overlay(text)
    }

    /// Overlay a TOML document on this scenario and validate the result.
    pub fn overlay(&self, text: &str) -> Result<Self> {
        let experiment = self.experiment();
        let overrides: toml::Table = text.parse()?;
        if let Some(kind) = overrides
            .get("study")
            .and_then(|s| s.get("kind"))
            .and_then(|k| k.as_str())
        {
            if kind != experiment.name() {
                return Err(Error::config(
                    "study.kind",
                    format!("scenario is for `{kind}` but the subcommand is `{}`", experiment.name()),
                ));
            }
        }
        let mut merged = toml::Table::try_from(self).map_err(|e| Error::config("scenario", e.to_string()))?;
        merge(&mut merged, overrides);
        let text = toml::to_string(&merged).map_err(|e| Error::config("scenario", e.to_string()))?;
        let scenario: Scenario = toml::from_str(&text)?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Canonical TOML, without the output block.
    pub fn canonical(&self) -> String {
        let mut s = self.clone();
        s.output = OutputBlock {
            dir: PathBuf::new(),
            samples: false,
        };
        toml::to_string(&s).expect("scenario serialises")
    }

    /// First 16 hex digits of the SHA-256 of [`Scenario::canonical`].
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::config(
                "version",
                format!("unsupported scenario version {}, expected {SCENARIO_VERSION}", self.version),
            ));
        }
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(Error::config("name", "must be a nonempty file stem"));
        }
        let sys = &self.system;
        if sys.dim != 1 && sys.dim != 3 {
            return Err(Error::config("system.dim", "must be 1 or 3"));
        }
        if sys.n < 2 {
            return Err(Error::config("system.n", "need at least two particles"));
        }
        if let Some(rho) = sys.density {
            if !(rho > 0.0 && rho.is_finite()) {
                return Err(Error::config("system.density", "must be positive"));
            }
            if sys.dim != 3 {
                return Err(Error::config("system.density", "periodic boxes are three-dimensional"));
            }
        }
        if sys.kernel == KernelChoice::LennardJones && sys.density.is_none() {
            return Err(Error::config("system.density", "Lennard-Jones runs need a periodic box"));
        }
        if let InitChoice::Uniform { half_width } = sys.init {
            if !(half_width > 0.0) {
                return Err(Error::config("system.init.half_width", "must be positive"));
            }
        }
        if sys.init == InitChoice::Lattice && sys.density.is_none() {
            return Err(Error::config("system.init", "lattice start needs a density"));
        }
        if let ExternalField::Harmonic { lambda } = sys.external {
            if !(lambda >= 0.0) {
                return Err(Error::config("system.external.lambda", "must be nonnegative"));
            }
        }
        self.integrator.schedule.validate()?;
        self.integrator.thermostat.validate()?;
        if !(self.integrator.beta > 0.0) {
            return Err(Error::config("integrator.beta", "must be positive"));
        }
        if self.rbm.enabled {
            if self.rbm.p < 2 {
                return Err(Error::config("rbm.p", "must be at least 2"));
            }
            for n in self.particle_counts() {
                if n % self.rbm.p != 0 {
                    return Err(Error::config(
                        "rbm.p",
                        format!("batch size {} does not divide N = {n}", self.rbm.p),
                    ));
                }
            }
            if sys.kernel == KernelChoice::LennardJones && !self.rbm.splitting {
                return Err(Error::config(
                    "rbm.splitting",
                    "Lennard-Jones forces cannot be batched without splitting",
                ));
            }
        }
        let run = &self.run;
        if !(run.burn_in >= 0.0) {
            return Err(Error::config("run.burn_in", "must be nonnegative"));
        }
        if let Some(t) = run.t_end {
            if !(run.burn_in < t) {
                return Err(Error::config("run.t_end", "must exceed run.burn_in"));
            }
        }
        if let Some(dt) = run.sample_every {
            if !(dt > 0.0) {
                return Err(Error::config("run.sample_every", "must be positive"));
            }
        }
        if run.samples == Some(0) {
            return Err(Error::config("run.samples", "must be positive"));
        }
        if run.repetitions == 0 {
            return Err(Error::config("run.repetitions", "must be positive"));
        }
        match &self.study {
            Study::Langevin1d(s) => self.validate_langevin1d(s),
            Study::LjEos(s) => self.validate_eos(s),
            Study::Scaling(s) => validate_scaling(s),
            Study::EstimatorChecks(s) => validate_estimator(s),
        }
    }

    /// Every particle count the study will simulate.
    fn particle_counts(&self) -> Vec<usize> {
        match &self.study {
            Study::Langevin1d(s) => {
                let mut v = vec![self.system.n];
                v.extend(&s.strong.sizes);
                v
            }
            Study::Scaling(s) => s.sizes.clone(),
            Study::EstimatorChecks(s) => vec![s.mc_n],
            Study::LjEos(_) => vec![self.system.n],
        }
    }

    fn needs_sampling_plan(&self) -> Result<()> {
        if self.run.t_end.is_none() && self.run.samples.is_none() {
            return Err(Error::config("run", "set run.t_end or run.samples"));
        }
        Ok(())
    }

    fn validate_langevin1d(&self, s: &Langevin1dStudy) -> Result<()> {
        if self.system.dim != 1 || self.system.density.is_some() {
            return Err(Error::config("system.dim", "langevin1d runs a one-dimensional system in free space"));
        }
        if !matches!(self.integrator.thermostat, Thermostat::Langevin { .. }) {
            return Err(Error::config("integrator.thermostat", "langevin1d needs the Langevin thermostat"));
        }
        self.needs_sampling_plan()?;
        check_steps("study.taus", &s.taus)?;
        check_steps("study.reference_tau", &[s.reference_tau])?;
        if s.coupled {
            for &tau in &s.taus {
                check_power_of_two_ratio("study.taus", tau, s.reference_tau)?;
            }
        }
        let h = &s.histogram;
        if !(h.lo < h.hi) || h.bins == 0 {
            return Err(Error::config("study.histogram", "need lo < hi and at least one bin"));
        }
        let st = &s.strong;
        check_steps("study.strong.taus", &st.taus)?;
        for &tau in &st.taus {
            check_power_of_two_ratio("study.strong.taus", tau, st.reference_tau)?;
        }
        if !(st.t > 0.0) {
            return Err(Error::config("study.strong.t", "must be positive"));
        }
        if st.repetitions == 0 {
            return Err(Error::config("study.strong.repetitions", "must be positive"));
        }
        if st.sizes.iter().any(|&n| n < 2) {
            return Err(Error::config("study.strong.sizes", "need at least two particles"));
        }
        Ok(())
    }

    fn validate_eos(&self, s: &EosStudy) -> Result<()> {
        if self.system.dim != 3 {
            return Err(Error::config("system.dim", "lj-eos runs a three-dimensional fluid"));
        }
        self.needs_sampling_plan()?;
        if s.densities.is_empty() || s.densities.iter().any(|&r| !(r > 0.0 && r.is_finite())) {
            return Err(Error::config("study.densities", "need positive densities"));
        }
        if s.thermostats.is_empty() {
            return Err(Error::config("study.thermostats", "need at least one thermostat"));
        }
        for t in &s.thermostats {
            t.validate().map_err(|_| Error::config("study.thermostats", "friction or collision rate must be positive"))?;
        }
        if s.trace_every == 0 {
            return Err(Error::config("study.trace_every", "must be positive"));
        }
        Ok(())
    }
}

fn validate_scaling(s: &ScalingStudy) -> Result<()> {
    if s.sizes.is_empty() {
        return Err(Error::config("study.sizes", "need at least one size"));
    }
    if !(s.density > 0.0) {
        return Err(Error::config("study.density", "must be positive"));
    }
    if !(s.melt_time >= 0.0 && s.melt_time.is_finite()) {
        return Err(Error::config("study.melt_time", "must be finite and non-negative"));
    }
    if s.blocks == 0 || s.min_steps == 0 {
        return Err(Error::config("study.blocks", "need at least one block of one step"));
    }
    Ok(())
}

fn validate_estimator(s: &EstimatorStudy) -> Result<()> {
    for &(n, p) in &s.exhaustive {
        if p < 2 || n < 3 || n % p != 0 || n > 12 {
            return Err(Error::config(
                "study.exhaustive",
                format!("({n}, {p}): need 2 <= p, p | N and 3 <= N <= 12"),
            ));
        }
    }
    if s.mc_p < 2 || s.mc_n % s.mc_p != 0 || s.mc_n < 3 {
        return Err(Error::config("study.mc_p", "need 2 <= p, p | N and N >= 3"));
    }
    if s.position_sets == 0 || s.mc_draws == 0 {
        return Err(Error::config("study.mc_draws", "counts must be positive"));
    }
    Ok(())
}

fn check_steps(field: &str, taus: &[f64]) -> Result<()> {
    if taus.is_empty() || taus.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::config(field, "need positive step sizes"));
    }
    Ok(())
}

fn check_power_of_two_ratio(field: &str, tau: f64, fine: f64) -> Result<()> {
    let ratio = tau / fine;
    let m = ratio.round();
    if (ratio - m).abs() > 1e-9 * ratio || m < 1.0 || !(m as u64).is_power_of_two() {
        return Err(Error::config(
            field,
            format!("step {tau} is not a power-of-two multiple of {fine}"),
        ));
    }
    Ok(())
}

fn merge(base: &mut toml::Table, overrides: toml::Table) {
    for (key, value) in overrides {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [Experiment; 4] = [
        Experiment::Langevin1d,
        Experiment::LjEos,
        Experiment::Scaling,
        Experiment::EstimatorChecks,
    ];

    #[test]
    fn defaults_validate_and_round_trip() {
        for e in ALL {
            let s = Scenario::default_for(e);
            s.validate().unwrap();
            assert_eq!(s.experiment(), e);
            let back = Scenario::from_toml(e, &toml::to_string(&s).unwrap()).unwrap();
            assert_eq!(back, s);
            let mut p = s.clone();
            p.paper_scale();
            p.validate().unwrap();
        }
    }

    #[test]
    fn empty_document_gives_defaults() {
        for e in ALL {
            assert_eq!(Scenario::from_toml(e, "").unwrap(), Scenario::default_for(e));
        }
    }

    #[test]
    fn partial_override() {
        let s = Scenario::from_toml(
            Experiment::LjEos,
            "[study]\ndensities = [0.3]\n[integrator.thermostat]\nkind = \"andersen\"\nnu = 50.0\n",
        )
        .unwrap();
        let Study::LjEos(eos) = &s.study else { panic!() };
        assert_eq!(eos.densities, vec![0.3]);
        assert_eq!(eos.trace_every, 100);
        assert_eq!(s.integrator.thermostat, Thermostat::Andersen { nu: 50.0 });
    }

    #[test]
    fn errors_name_the_field() {
        let bad = |e, text: &str, field: &str| match Scenario::from_toml(e, text) {
            Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
            other => panic!("{text}: {other:?}"),
        };
        bad(Experiment::Langevin1d, "[rbm]\np = 3", "rbm.p");
        bad(Experiment::Langevin1d, "[run]\nt_end = 10.0", "run.t_end");
        bad(Experiment::Langevin1d, "[study]\ntaus = [0.3]", "study.taus");
        bad(Experiment::Scaling, "[study]\nkind = \"lj-eos\"", "study.kind");
        bad(Experiment::LjEos, "[rbm]\nsplitting = false", "rbm.splitting");
        bad(Experiment::LjEos, "[integrator]\nbeta = -1.0", "integrator.beta");
        assert!(matches!(
            Scenario::from_toml(Experiment::LjEos, "[rbm]\nbogus = 1"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            Scenario::from_toml(Experiment::LjEos, "[rbm]\np = \"two\""),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn hash_ignores_output_block() {
        let a = Scenario::default_for(Experiment::LjEos);
        let mut b = a.clone();
        b.output.dir = PathBuf::from("/elsewhere");
        assert_eq!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        b.run.seed = 2;
        assert_ne!(a.hash(), b.hash());
    }
}
