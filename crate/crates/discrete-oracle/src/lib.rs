//! Brute-force cross-check for the continuum solver: a finite set of
//! explicitly placed spins evolved under the same rate equations, with
//! Monte-Carlo estimation of ensemble observables.

use std::io::{BufRead, BufReader, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spinlab_core::{
    cooling_coefficient, hyperfine_coupling, units::cycles_to_angular, CouplingModel, NvProbe,
    SpinSpecies, TargetEnsemble,
};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("integration step underflow: dt = {dt:.3e} s")]
    StepUnderflow { dt: f64 },

    #[error("malformed ensemble file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn invalid(name: &'static str, message: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        message: message.into(),
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Bounding region in which spins are placed (then intersected with the
/// ensemble geometry and the exclusion radius).
#[derive(Debug, Clone, Copy)]
pub enum SampleRegion {
    Box { lower_nm: [f64; 3], upper_nm: [f64; 3] },
    Shell { r_min_nm: f64, r_max_nm: f64 },
}

impl SampleRegion {
    pub fn volume(&self) -> f64 {
        match *self {
            SampleRegion::Box { lower_nm, upper_nm } => (0..3)
                .map(|d| (upper_nm[d] - lower_nm[d]).max(0.0))
                .product(),
            SampleRegion::Shell { r_min_nm, r_max_nm } => {
                if r_max_nm <= r_min_nm {
                    0.0
                } else {
                    4.0 / 3.0 * std::f64::consts::PI * (r_max_nm.powi(3) - r_min_nm.powi(3))
                }
            }
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng) -> [f64; 3] {
        match *self {
            SampleRegion::Box { lower_nm, upper_nm } => [
                rng.gen_range(lower_nm[0]..upper_nm[0]),
                rng.gen_range(lower_nm[1]..upper_nm[1]),
                rng.gen_range(lower_nm[2]..upper_nm[2]),
            ],
            SampleRegion::Shell { r_min_nm, r_max_nm } => {
                // uniform in shell volume: r^3 uniform, direction isotropic
                let u: f64 = rng.gen();
                let r3 = r_min_nm.powi(3) + u * (r_max_nm.powi(3) - r_min_nm.powi(3));
                let r = r3.cbrt();
                let cos_t: f64 = rng.gen_range(-1.0..1.0);
                let sin_t = (1.0 - cos_t * cos_t).sqrt();
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                [r * sin_t * phi.cos(), r * sin_t * phi.sin(), r * cos_t]
            }
        }
    }
}

/// A concrete realization of the spin bath: explicit positions and per-spin
/// polarizations. The same seed reproduces the same positions bit-exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteEnsemble {
    pub positions: Vec<[f64; 3]>,
    pub polarizations: Vec<f64>,
    pub seed: u64,
}

impl DiscreteEnsemble {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn total_polarization(&self) -> f64 {
        self.polarizations.iter().sum()
    }
}

/// Poisson sample with mean `lambda`, built from <=30-mean chunks so the
/// Knuth product never underflows.
fn poisson(rng: &mut ChaCha8Rng, mut lambda: f64) -> usize {
    let mut count = 0usize;
    while lambda > 0.0 {
        let chunk = lambda.min(30.0);
        lambda -= chunk;
        let limit = (-chunk).exp();
        let mut prod: f64 = rng.gen();
        while prod > limit {
            count += 1;
            prod *= rng.gen::<f64>();
        }
    }
    count
}

/// Place spins uniformly at the ensemble density inside `region`, keeping
/// only points inside the ensemble geometry and outside the exclusion
/// radius. The accepted count is Poisson with mean n_t x accepted volume.
pub fn sample_ensemble(
    ensemble: &TargetEnsemble,
    probe: &NvProbe,
    region: &SampleRegion,
    exclusion_radius_nm: f64,
    seed: u64,
) -> Result<DiscreteEnsemble> {
    let volume = region.volume();
    if volume <= 0.0 {
        return Err(invalid("region", "sampling region has zero volume"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_candidates = poisson(&mut rng, ensemble.number_density_per_nm3 * volume);
    let mut positions = Vec::with_capacity(n_candidates);
    for _ in 0..n_candidates {
        let p = region.sample_point(&mut rng);
        let r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
        if r2 >= exclusion_radius_nm * exclusion_radius_nm
            && ensemble.geometry.contains(p, probe.depth_nm)
        {
            positions.push(p);
        }
    }
    let n = positions.len();
    Ok(DiscreteEnsemble {
        positions,
        polarizations: vec![0.0; n],
        seed,
    })
}

/// Pairwise flip-flop rate constant w0 (nm⁶/s) so that w_ij = w0/r⁶:
/// w0 = (mu0 hbar gamma_n² / 4pi)² * (3/10) / (2 Gamma_intra).
pub fn flip_flop_constant(species: &SpinSpecies, gamma_intra: f64) -> Result<f64> {
    if !(gamma_intra > 0.0) {
        return Err(invalid("gamma_intra", "must be > 0"));
    }
    let gamma_ang = cycles_to_angular(species.gamma_hz_per_t().abs());
    let c = spinlab_core::constants::MU0_OVER_4PI
        * spinlab_core::constants::HBAR
        * gamma_ang
        * gamma_ang
        * spinlab_core::constants::NM3_PER_M3;
    Ok(c * c * (3.0 / 10.0) / (2.0 * gamma_intra))
}

/// Integrate dP_i/dt = u(R_i)(1-P_i) - Gamma_SL P_i
/// [+ sum_j w_ij (P_j - P_i) when `flip_flop_w0` is set]
/// from the current state to `t_end` seconds later.
///
/// The local reaction is applied exactly per spin; the pairwise coupling
/// uses explicit Euler with dt <= 0.1 / max_i sum_j w_ij.
pub fn evolve_discrete(
    d: &mut DiscreteEnsemble,
    probe: &NvProbe,
    model: &CouplingModel,
    gamma_sl: f64,
    flip_flop_w0: Option<f64>,
    t_end: f64,
) -> Result<()> {
    if !(t_end >= 0.0) {
        return Err(invalid("t_end", "must be >= 0"));
    }
    let n = d.len();
    let u: Vec<f64> = d
        .positions
        .iter()
        .map(|&r| cooling_coefficient(model, probe, r))
        .collect();

    let exact_reaction = |p: &mut [f64], dt: f64| {
        for (pi, &ui) in p.iter_mut().zip(&u) {
            let total = ui + gamma_sl;
            if total > 0.0 {
                let p_inf = ui / total;
                *pi = p_inf + (*pi - p_inf) * (-total * dt).exp();
            }
        }
    };

    match flip_flop_w0 {
        None => {
            exact_reaction(&mut d.polarizations, t_end);
        }
        Some(w0) => {
            // dense pairwise rate table
            let mut w = vec![0.0; n * n];
            let mut row_sum = vec![0.0; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let dx = d.positions[i][0] - d.positions[j][0];
                    let dy = d.positions[i][1] - d.positions[j][1];
                    let dz = d.positions[i][2] - d.positions[j][2];
                    let r2 = (dx * dx + dy * dy + dz * dz)
                        .max(model.cutoff_radius_nm * model.cutoff_radius_nm);
                    let wij = w0 / (r2 * r2 * r2);
                    w[i * n + j] = wij;
                    w[j * n + i] = wij;
                    row_sum[i] += wij;
                    row_sum[j] += wij;
                }
            }
            let max_rate = row_sum.iter().fold(0.0f64, |m, &r| m.max(r));
            let dt = if max_rate > 0.0 { 0.1 / max_rate } else { t_end };
            if dt <= t_end * 1e-12 {
                return Err(Error::StepUnderflow { dt });
            }
            let mut t = 0.0;
            let mut delta = vec![0.0; n];
            while t < t_end {
                let h = dt.min(t_end - t);
                exact_reaction(&mut d.polarizations, h);
                for i in 0..n {
                    let mut acc = -row_sum[i] * d.polarizations[i];
                    for j in 0..n {
                        acc += w[i * n + j] * d.polarizations[j];
                    }
                    delta[i] = h * acc;
                }
                for (p, dp) in d.polarizations.iter_mut().zip(&delta) {
                    *p = (*p + dp).clamp(0.0, 1.0);
                }
                t += h;
            }
        }
    }
    Ok(())
}

/// Discrete estimator of the hyperfine field variance,
/// A_P² = (1/2) sum_i (1 - P_i) A²(R_i), in rad²/s².
pub fn discrete_hyperfine_variance(
    d: &DiscreteEnsemble,
    model: &CouplingModel,
    probe: &NvProbe,
) -> f64 {
    d.positions
        .iter()
        .zip(&d.polarizations)
        .map(|(&r, &p)| {
            let a = hyperfine_coupling(model, r, probe.axis);
            0.5 * (1.0 - p) * a * a
        })
        .sum()
}

/// Write the ensemble as CSV with a seed header line, for reproducibility.
pub fn dump_csv(d: &DiscreteEnsemble, mut writer: impl Write) -> Result<()> {
    writeln!(writer, "# seed {}", d.seed)?;
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["x_nm", "y_nm", "z_nm", "p"])?;
    for (pos, p) in d.positions.iter().zip(&d.polarizations) {
        w.write_record([
            format!("{:.12e}", pos[0]),
            format!("{:.12e}", pos[1]),
            format!("{:.12e}", pos[2]),
            format!("{:.12e}", p),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv(reader: impl Read) -> Result<DiscreteEnsemble> {
    let mut lines = BufReader::new(reader);
    let mut header = String::new();
    lines.read_line(&mut header)?;
    let seed = header
        .trim()
        .strip_prefix("# seed ")
        .ok_or_else(|| Error::Format("missing `# seed` header line".into()))?
        .parse::<u64>()
        .map_err(|e| Error::Format(format!("bad seed: {e}")))?;

    let mut positions = Vec::new();
    let mut polarizations = Vec::new();
    let mut rdr = csv::Reader::from_reader(lines);
    for record in rdr.records() {
        let record = record?;
        if record.len() != 4 {
            return Err(Error::Format(format!("expected 4 columns, got {}", record.len())));
        }
        let parse = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| Error::Format(format!("bad number `{}`: {e}", &record[i])))
        };
        positions.push([parse(0)?, parse(1)?, parse(2)?]);
        polarizations.push(parse(3)?);
    }
    Ok(DiscreteEnsemble {
        positions,
        polarizations,
        seed,
    })
}
